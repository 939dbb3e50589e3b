//! Orbits of `z^d + e^{2πiθ} z` near the fixed point 0, with θ taken from
//! the `cremer_tower` series. Illustrative only.

use std::io::Write;
use std::path::PathBuf;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use clap::Args;
use irrat_core::catalog::{builtin, Params};
use irrat_core::magnitude::{compare, magnitude_of, Certainty, Magnitude};
use irrat_core::seqexpr::EvalConfig;
use irrat_core::series::partial_sum;
use num_bigint::BigUint;
use num_traits::One;

pub const CSV_HEADER: [&str; 4] = ["seed_re", "seed_im", "step", "abs_z"];

pub const DISCLAIMER: &str = "illustrative only: floating-point orbits say nothing rigorous about Julia-set membership";

/// Orbits stop once |z| exceeds 2^ESCAPE_BITS; beyond radius 2 they diverge.
const ESCAPE_BITS: i32 = 32;
/// Extra bits carried while computing θ and e^{2πiθ}.
const GUARD_BITS: usize = 64;
const MAX_DEGREE: u32 = 1024;

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    /// Degree d of z^d + e^{2πiθ} z (also selects the series).
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    /// Iterations per seed.
    #[arg(long, default_value_t = 100)]
    pub iters: u64,
    /// Working precision in bits.
    #[arg(long, default_value_t = 256)]
    pub precision: usize,
    /// Output CSV path, `-` for stdout.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of seeds, evenly spaced on the circle |z| = seed-radius.
    #[arg(long, default_value_t = 1)]
    pub grid: u32,
    #[arg(long, default_value = "1e-3")]
    pub seed_radius: String,
    /// Use θ = 0 instead of the series value.
    #[arg(long)]
    pub theta_zero: bool,
}

/// Bits needed so that relative rounding error, multiplied by at most `d`
/// per step, stays below 2^-32 after `iters` steps.
pub fn required_bits(iters: u64, degree: u32) -> u64 {
    let per_step = (degree as f64).log2();
    32 + (iters as f64 * per_step).ceil() as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: u64,
    pub escaped: Vec<(u32, u64)>,
    pub theta: String,
}

const RM: RoundingMode = RoundingMode::ToEven;

fn to_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    x.format(Radix::Dec, RM, cc)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(f64::NAN)
}

fn from_biguint(v: &BigUint, p: usize) -> BigFloat {
    let base = BigFloat::from_u128(1u128 << 64, p);
    let mut x = BigFloat::from_u64(0, p);
    for d in v.to_u64_digits().iter().rev() {
        x = x.mul(&base, p, RM).add(&BigFloat::from_u64(*d, p), p, RM);
    }
    x
}

#[derive(Clone)]
struct C {
    re: BigFloat,
    im: BigFloat,
}

impl C {
    fn mul(&self, o: &C, p: usize) -> C {
        let re = self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM);
        C { re, im }
    }

    fn add(&self, o: &C, p: usize) -> C {
        C {
            re: self.re.add(&o.re, p, RM),
            im: self.im.add(&o.im, p, RM),
        }
    }

    fn powi(&self, mut e: u32, p: usize) -> C {
        let mut base = self.clone();
        let mut acc = C {
            re: BigFloat::from_u64(1, p),
            im: BigFloat::from_u64(0, p),
        };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, p);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, p);
            }
        }
        acc
    }

    fn abs(&self, p: usize) -> BigFloat {
        let s = self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM);
        s.sqrt(p, RM)
    }
}

/// θ to `bits` binary places from the `cremer_tower` partial sum. The
/// omitted tail is below 2/b_{N+1}, which is checked to be under 2^-bits.
fn theta_bits(degree: u32, bits: usize, cfg: &EvalConfig) -> Result<(BigUint, String), String> {
    let mut params = Params::new();
    params.insert("d".into(), degree.to_string());
    let entry = builtin("cremer_tower", &params).map_err(|e| e.to_string())?;
    let last = entry
        .exact_range(cfg, 64)
        .ok_or("no term of the series fits the bit budget")?;
    let s = partial_sum(&entry.spec, last, cfg).map_err(|e| e.to_string())?;
    let next = magnitude_of(&entry.spec.denom, last + 1, cfg).map_err(|e| e.to_string())?;
    let need = Magnitude::exact(BigUint::one() << (bits + 1));
    if compare(&need, &next) != Certainty::ProvenBelow {
        return Err(format!(
            "cannot certify θ to {bits} bits: b_{} is not provably above 2^{}",
            last + 1,
            bits + 1
        ));
    }
    let scaled = (s.numer().magnitude() << bits) / s.denom().magnitude();
    let shown = irrat_core::report::compact_rational(&s);
    Ok((scaled, format!("{shown} (partial sum through n = {last})")))
}

pub fn run_demo(args: &DemoArgs, cfg: &EvalConfig, out: &mut dyn Write) -> Result<Summary, String> {
    if args.degree < 2 || args.degree > MAX_DEGREE {
        return Err(format!("--degree must be between 2 and {MAX_DEGREE}"));
    }
    if args.grid == 0 {
        return Err("--grid must be at least 1".into());
    }
    let need = required_bits(args.iters, args.degree);
    if (args.precision as u64) < need {
        return Err(format!(
            "precision {} bits is insufficient for {} iterations of degree {}: need at least {need} bits",
            args.precision, args.iters, args.degree
        ));
    }
    let p = args.precision;
    let wp = p + GUARD_BITS;
    let mut cc = Consts::new().map_err(|e| format!("{e:?}"))?;

    let radius = BigFloat::parse(&args.seed_radius, Radix::Dec, p, RM, &mut cc);
    if radius.is_nan() || !radius.is_positive() {
        return Err(format!("--seed-radius {:?} is not a positive number", args.seed_radius));
    }

    let (theta, theta_text) = if args.theta_zero {
        (BigFloat::from_u64(0, wp), "0 (debug override)".to_string())
    } else {
        let (scaled, text) = theta_bits(args.degree, wp, cfg)?;
        let two_wp = BigFloat::from_u64(2, wp + 64).powi(wp, wp + 64, RM);
        (from_biguint(&scaled, wp + 64).div(&two_wp, wp, RM), text)
    };
    let two_pi = cc.pi(wp, RM).mul(&BigFloat::from_u64(2, wp), wp, RM);
    let angle = two_pi.mul(&theta, wp, RM);
    let lambda = C {
        re: angle.cos(wp, RM, &mut cc),
        im: angle.sin(wp, RM, &mut cc),
    };

    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(|e| e.to_string())?;
    let escape = BigFloat::from_u64(2, p).powi(ESCAPE_BITS as usize, p, RM);
    let mut summary = Summary {
        rows: 0,
        escaped: Vec::new(),
        theta: theta_text,
    };
    for k in 0..args.grid {
        let phi = two_pi
            .mul(&BigFloat::from_u32(k, wp), wp, RM)
            .div(&BigFloat::from_u32(args.grid, wp), wp, RM);
        let mut z = C {
            re: radius.mul(&phi.cos(wp, RM, &mut cc), p, RM),
            im: radius.mul(&phi.sin(wp, RM, &mut cc), p, RM),
        };
        let (sre, sim) = (to_f64(&z.re, &mut cc), to_f64(&z.im, &mut cc));
        for step in 1..=args.iters {
            z = z.powi(args.degree, p).add(&lambda.mul(&z, p), p);
            let a = z.abs(p);
            w.write_record([
                sre.to_string(),
                sim.to_string(),
                step.to_string(),
                format!("{:e}", to_f64(&a, &mut cc)),
            ])
            .map_err(|e| e.to_string())?;
            summary.rows += 1;
            if a.cmp(&escape).is_some_and(|c| c > 0) {
                summary.escaped.push((k, step));
                break;
            }
        }
    }
    w.flush().map_err(|e| e.to_string())?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(iters: u64) -> DemoArgs {
        DemoArgs {
            degree: 2,
            iters,
            precision: 256,
            out: "-".into(),
            grid: 1,
            seed_radius: "1e-3".into(),
            theta_zero: false,
        }
    }

    fn rows(csv: &[u8]) -> Vec<Vec<String>> {
        let mut r = csv::Reader::from_reader(csv);
        r.records()
            .map(|x| x.unwrap().iter().map(String::from).collect())
            .collect()
    }

    #[test]
    fn hundred_finite_rows() {
        let mut buf = Vec::new();
        let s = run_demo(&args(100), &EvalConfig::default(), &mut buf).unwrap();
        assert_eq!(s.rows, 100);
        let rs = rows(&buf);
        assert_eq!(rs.len(), 100);
        for r in &rs {
            let v: f64 = r[3].parse().unwrap();
            assert!(v.is_finite() && v > 0.0 && v < 1.0, "{r:?}");
        }
        assert_eq!(rs[0][0], "0.001");
    }

    #[test]
    fn zero_iterations_write_only_the_header() {
        let mut buf = Vec::new();
        run_demo(&args(0), &EvalConfig::default(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "seed_re,seed_im,step,abs_z\n");
    }

    #[test]
    fn theta_zero_escapes_from_a_tenth() {
        let mut a = args(30);
        a.theta_zero = true;
        a.seed_radius = "0.1".into();
        let mut buf = Vec::new();
        run_demo(&a, &EvalConfig::default(), &mut buf).unwrap();
        let vals: Vec<f64> = rows(&buf).iter().map(|r| r[3].parse().unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
        let first_above = vals.iter().position(|&v| v > 1.0).unwrap();
        assert!(first_above < 30);
        // 0.1 -> 0.11 -> 0.1221
        assert!((vals[0] - 0.11).abs() < 1e-12 && (vals[1] - 0.1221).abs() < 1e-12);
    }

    #[test]
    fn refuses_low_precision() {
        let mut a = args(1000);
        a.precision = 128;
        let err = run_demo(&a, &EvalConfig::default(), &mut Vec::new()).unwrap_err();
        assert!(err.contains("need at least 1032 bits"), "{err}");
    }

    #[test]
    fn theta_is_a_quarter_at_working_precision() {
        let (scaled, _) = theta_bits(2, 100, &EvalConfig::default()).unwrap();
        assert_eq!(scaled, BigUint::one() << 98u32);
    }
}
