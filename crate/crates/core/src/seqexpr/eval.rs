use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::primes;
use super::Node;

/// Default maximum bit length of any exact intermediate value (2^18 bits).
/// Rational reduction is quadratic in the operand size, so larger values
/// make sums and comparisons slow.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 18;
/// Default largest prime index served by the sieve.
pub const DEFAULT_PRIME_CEILING: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalConfig {
    pub bit_budget: u64,
    pub prime_ceiling: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            bit_budget: DEFAULT_BIT_BUDGET,
            prime_ceiling: DEFAULT_PRIME_CEILING,
        }
    }
}

impl EvalConfig {
    pub fn with_bit_budget(bit_budget: u64) -> Self {
        EvalConfig {
            bit_budget,
            ..EvalConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("expression value is not a positive integer ({0})")]
    NonPositiveValue(String),
    #[error("division is not exact")]
    InexactDivision,
    #[error("exact value exceeds the bit budget of {budget} bits")]
    BitBudgetExceeded { budget: u64 },
    #[error("prime index {index} is beyond the sieve ceiling {ceiling}")]
    PrimeCeilingExceeded { index: String, ceiling: u64 },
    #[error("growth-function argument `b` is not bound here")]
    UnboundArg,
    #[error("tower height must be at least 1")]
    InvalidTowerHeight,
}

pub(crate) struct Env<'a> {
    n: u64,
    b: Option<&'a BigUint>,
}

impl<'a> Env<'a> {
    pub(crate) fn index(n: u64) -> Env<'static> {
        Env { n, b: None }
    }

    pub(crate) fn with_arg(n: u64, b: &'a BigUint) -> Env<'a> {
        Env { n, b: Some(b) }
    }
}

fn check(v: BigUint, cfg: &EvalConfig) -> Result<BigUint, EvalError> {
    if v.bits() > cfg.bit_budget {
        Err(EvalError::BitBudgetExceeded { budget: cfg.bit_budget })
    } else {
        Ok(v)
    }
}

/// `base^exp` with the bit budget enforced before any large allocation.
pub(crate) fn pow_checked(base: &BigUint, exp: &BigUint, cfg: &EvalConfig) -> Result<BigUint, EvalError> {
    if exp.is_zero() || base.is_one() {
        return Ok(BigUint::one());
    }
    if base.is_zero() {
        return Ok(BigUint::zero());
    }
    let over = EvalError::BitBudgetExceeded { budget: cfg.bit_budget };
    let e = exp.to_u64().ok_or(over.clone())?;
    let bits = base.bits();
    // bit length of base^e is at least (bits - 1) * e + 1
    let lower = (bits - 1)
        .checked_mul(e)
        .and_then(|x| x.checked_add(1))
        .ok_or(over.clone())?;
    if lower > cfg.bit_budget {
        return Err(over);
    }
    let e32 = u32::try_from(e).map_err(|_| over)?;
    check(base.pow(e32), cfg)
}

pub(crate) fn factorial_checked(k: &BigUint, cfg: &EvalConfig) -> Result<BigUint, EvalError> {
    let over = EvalError::BitBudgetExceeded { budget: cfg.bit_budget };
    let k = k.to_u64().ok_or(over.clone())?;
    if k > 16 {
        // log2(k!) >= k (log2 k - log2 e)
        let kf = k as f64;
        if kf * (kf.log2() - std::f64::consts::LOG2_E) > cfg.bit_budget as f64 * 1.01 {
            return Err(over);
        }
    }
    let mut acc = BigUint::one();
    for i in 2..=k {
        acc *= i;
        if acc.bits() > cfg.bit_budget {
            return Err(over);
        }
    }
    Ok(acc)
}

pub(crate) fn nth_prime_checked(k: &BigUint, cfg: &EvalConfig) -> Result<BigUint, EvalError> {
    if k.is_zero() {
        return Err(EvalError::NonPositiveValue("nthprime(0)".into()));
    }
    match k.to_u64() {
        Some(i) if i <= cfg.prime_ceiling => Ok(BigUint::from(primes::nth_prime(i))),
        _ => Err(EvalError::PrimeCeilingExceeded {
            index: k.to_string(),
            ceiling: cfg.prime_ceiling,
        }),
    }
}

pub(crate) fn eval_node(node: &Node, env: &Env<'_>, cfg: &EvalConfig) -> Result<BigUint, EvalError> {
    let v = eval_inner(node, env, cfg)?;
    if v.is_zero() {
        return Err(EvalError::NonPositiveValue("expression evaluates to 0".into()));
    }
    Ok(v)
}

fn eval_inner(node: &Node, env: &Env<'_>, cfg: &EvalConfig) -> Result<BigUint, EvalError> {
    let ev = |x: &Node| eval_inner(x, env, cfg);
    match node {
        Node::Int(v) => Ok(v.clone()),
        Node::Index => Ok(BigUint::from(env.n)),
        Node::Arg => env.b.cloned().ok_or(EvalError::UnboundArg),
        Node::Add(l, r) => check(ev(l)? + ev(r)?, cfg),
        Node::Sub(l, r) => {
            let (a, b) = (ev(l)?, ev(r)?);
            if a <= b {
                Err(EvalError::NonPositiveValue(format!("{a} - {b}")))
            } else {
                Ok(a - b)
            }
        }
        Node::Mul(l, r) => {
            let (a, b) = (ev(l)?, ev(r)?);
            if a.bits() + b.bits() > cfg.bit_budget + 1 {
                return Err(EvalError::BitBudgetExceeded { budget: cfg.bit_budget });
            }
            check(a * b, cfg)
        }
        Node::Div(l, r) => {
            let (a, b) = (ev(l)?, ev(r)?);
            if b.is_zero() {
                return Err(EvalError::InexactDivision);
            }
            let (q, rem) = a.div_rem(&b);
            if rem.is_zero() {
                Ok(q)
            } else {
                Err(EvalError::InexactDivision)
            }
        }
        Node::Pow(l, r) => pow_checked(&ev(l)?, &ev(r)?, cfg),
        Node::Factorial(x) => factorial_checked(&ev(x)?, cfg),
        Node::NthPrime(x) => nth_prime_checked(&ev(x)?, cfg),
        Node::Tower { base, height, top } => {
            let base = ev(base)?;
            let height = ev(height)?;
            let mut f = ev(top)?;
            if height.is_zero() {
                return Err(EvalError::InvalidTowerHeight);
            }
            if base.is_one() && height > BigUint::one() {
                return Ok(BigUint::one());
            }
            let mut level = BigUint::one();
            while level < height {
                f = pow_checked(&base, &f, cfg)?;
                level += 1u32;
            }
            Ok(f)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{eval_sequence, SequenceExpr};
    use super::*;

    fn ev(s: &str, n: u64) -> Result<BigUint, EvalError> {
        eval_sequence(&SequenceExpr::parse(s).unwrap(), n)
    }

    #[test]
    fn factorial_values() {
        assert_eq!(ev("n!", 4).unwrap(), BigUint::from(24u32));
        assert_eq!(ev("n!", 0).unwrap(), BigUint::one());
        for n in 1..20u64 {
            assert_eq!(ev("n!", n + 1).unwrap(), ev("n!", n).unwrap() * (n + 1));
        }
    }

    #[test]
    fn nth_prime_of_double_exponential_index() {
        // index 2^(2^2) = 16, and the 16th prime is 53
        assert_eq!(ev("nthprime(2^(2^(n!)))", 2).unwrap(), BigUint::from(53u32));
        assert_eq!(ev("nthprime(2^(2^(n!)))", 1).unwrap(), BigUint::from(7u32));
        assert!(matches!(
            ev("nthprime(2^(2^(n!)))", 3),
            Err(EvalError::PrimeCeilingExceeded { .. })
        ));
    }

    #[test]
    fn tower_values() {
        assert_eq!(ev("tower(2, 2*n, 2*n)", 1).unwrap(), BigUint::from(4u32));
        let b2 = ev("tower(2, 2*n, 2*n)", 2).unwrap();
        assert_eq!(b2.bits(), 65537);
        assert_eq!(b2, BigUint::one() << 65536usize);
        assert!(matches!(
            ev("tower(2, 2*n, 2*n)", 3),
            Err(EvalError::BitBudgetExceeded { .. })
        ));
        assert_eq!(ev("tower(1, 50, 7)", 1).unwrap(), BigUint::one());
        assert_eq!(ev("tower(3, 1, 7)", 1).unwrap(), BigUint::from(7u32));
    }

    #[test]
    fn error_paths() {
        assert_eq!(ev("n - 3", 2), Err(EvalError::NonPositiveValue("2 - 3".into())));
        assert_eq!(ev("n/2", 3), Err(EvalError::InexactDivision));
        assert_eq!(ev("n/0", 3), Err(EvalError::InexactDivision));
        assert!(matches!(ev("0*n", 3), Err(EvalError::NonPositiveValue(_))));
        assert_eq!(ev("b + 1", 3), Err(EvalError::UnboundArg));
        assert_eq!(ev("tower(2, 0, 2)", 1), Err(EvalError::InvalidTowerHeight));
        assert!(matches!(ev("10^(n!)", 10), Err(EvalError::BitBudgetExceeded { .. })));
        assert!(matches!(ev("(10^9)!", 1), Err(EvalError::BitBudgetExceeded { .. })));
    }

    #[test]
    fn bit_budget_is_configurable() {
        let e = SequenceExpr::parse("2^n").unwrap();
        let cfg = EvalConfig::with_bit_budget(64);
        assert_eq!(e.eval(63, &cfg).unwrap().bits(), 64);
        assert!(e.eval(64, &cfg).is_err());
    }
}
