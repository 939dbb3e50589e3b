//! Incremental nth-prime lookup backed by a growing sieve of Eratosthenes.

use std::sync::Mutex;

static PRIMES: Mutex<Vec<u32>> = Mutex::new(Vec::new());

/// Upper bound on p_k valid for k >= 6 (Rosser): k (ln k + ln ln k).
fn sieve_bound(k: u64) -> u64 {
    if k < 6 {
        return 15;
    }
    let kf = k as f64;
    (kf * (kf.ln() + kf.ln().ln())).ceil() as u64 + 16
}

fn sieve_to(limit: u64) -> Vec<u32> {
    // odd-only bitset: bit i stands for 2i + 1
    let half = (limit / 2 + 1) as usize;
    let mut composite = vec![0u64; half / 64 + 1];
    let mut out = vec![2u32];
    let mut i = 1usize;
    while i < half {
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            let p = 2 * i as u64 + 1;
            if p > limit {
                break;
            }
            out.push(p as u32);
            let mut j = (p * p / 2) as usize;
            while j < half {
                composite[j / 64] |= 1 << (j % 64);
                j += p as usize;
            }
        }
        i += 1;
    }
    out
}

/// The k-th prime (1-based, `nth_prime(1) == 2`). `k` must be at least 1.
///
/// The sieve cache is shared process-wide and only ever grows.
pub fn nth_prime(k: u64) -> u64 {
    assert!(k >= 1, "prime index starts at 1");
    let mut cache = PRIMES.lock().unwrap_or_else(|e| e.into_inner());
    if (cache.len() as u64) < k {
        *cache = sieve_to(sieve_bound(k).max(2 * cache.last().copied().unwrap_or(0) as u64));
    }
    cache[(k - 1) as usize] as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_nth(k: u64) -> u64 {
        let mut count = 0;
        let mut x = 1u64;
        loop {
            x += 1;
            if (2..x).take_while(|d| d * d <= x).all(|d| !x.is_multiple_of(d)) {
                count += 1;
                if count == k {
                    return x;
                }
            }
        }
    }

    #[test]
    fn small_primes_match_trial_division() {
        for k in 1..=300 {
            assert_eq!(nth_prime(k), naive_nth(k), "k = {k}");
        }
    }

    #[test]
    fn known_values() {
        assert_eq!(nth_prime(4), 7);
        assert_eq!(nth_prime(16), 53);
        assert_eq!(nth_prime(10_000), 104_729);
    }
}
