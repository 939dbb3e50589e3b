//! Turns command-line flags (or a spec file) into a series and a check.

use std::path::PathBuf;

use clap::Args;
use irrat_core::catalog::{builtin, CatalogEntry, Params};
use irrat_core::criteria::{Check, CheckOptions, GrowthFn, DEFAULT_PREFIX};
use irrat_core::rational::parse_rational;
use irrat_core::report::InputEcho;
use irrat_core::seqexpr::{EvalConfig, SequenceExpr};
use irrat_core::series::{SeriesSpec, SignMode};
use irrat_core::specfile::{parse_sign_mode, parse_spec_file};

/// Environment variable overriding the exact bit budget.
pub const BIT_BUDGET_ENV: &str = "IRRAT_BIT_BUDGET";

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// Numerator sequence a_n.
    #[arg(long, allow_hyphen_values = true)]
    pub numer: Option<String>,
    /// Denominator sequence b_n.
    #[arg(long, allow_hyphen_values = true)]
    pub denom: Option<String>,
    /// positive | alternating | alternating-negative | pattern:+-...
    #[arg(long)]
    pub sign: Option<String>,
    /// First index of the series.
    #[arg(long)]
    pub start: Option<u64>,
    /// Use a catalog series by name (see `list`).
    #[arg(long, conflicts_with_all = ["numer", "denom"])]
    pub builtin: Option<String>,
    /// Catalog parameter, e.g. `--param r=3`. Repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Read the series from a key = value file.
    #[arg(long, conflicts_with_all = ["numer", "denom", "builtin"])]
    pub spec_file: Option<PathBuf>,
    /// Prefix depth for hypothesis checks.
    #[arg(long)]
    pub prefix: Option<u64>,
    /// Roth exponent: run the transcendence check.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Growth function in `b`: run the approximation check.
    #[arg(long)]
    pub growth: Option<String>,
    /// Polynomial degree d: run the Cremer check.
    #[arg(long)]
    pub degree: Option<u32>,
    /// irrational | lcm | roth | growth | cremer. Picked from the other flags by default.
    #[arg(long)]
    pub criterion: Option<String>,
    /// Second series numerator: run the pair-sum check.
    #[arg(long, requires = "pair_denom", allow_hyphen_values = true)]
    pub pair_numer: Option<String>,
    #[arg(long, requires = "pair_numer", allow_hyphen_values = true)]
    pub pair_denom: Option<String>,
}

#[derive(Debug)]
pub struct Resolved {
    pub spec: SeriesSpec,
    pub check: Check,
    pub entry: Option<CatalogEntry>,
    pub opts: CheckOptions,
    pub echo: InputEcho,
}

pub fn bit_budget_from_env() -> Result<EvalConfig, String> {
    match std::env::var(BIT_BUDGET_ENV) {
        Ok(text) => {
            let bits: u64 = text
                .trim()
                .parse()
                .map_err(|_| format!("{BIT_BUDGET_ENV}={text:?} is not a positive integer"))?;
            if bits == 0 {
                return Err(format!("{BIT_BUDGET_ENV} must be positive"));
            }
            Ok(EvalConfig::with_bit_budget(bits))
        }
        Err(_) => Ok(EvalConfig::default()),
    }
}

fn parse_param(text: &str) -> Result<(String, String), String> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| format!("--param expects KEY=VALUE, got {text:?}"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return Err(format!("--param expects KEY=VALUE, got {text:?}"));
    }
    Ok((k.to_string(), v.to_string()))
}

fn expr(text: &str, what: &str) -> Result<SequenceExpr, String> {
    SequenceExpr::parse(text).map_err(|e| format!("{what} {text:?}: {e}"))
}

impl SpecArgs {
    /// Merges a spec file (if any) under the explicit flags.
    fn merged(&self) -> Result<SpecArgs, String> {
        let mut out = self.clone();
        let Some(path) = &self.spec_file else { return Ok(out) };
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let file = parse_spec_file(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        out.numer = file.numer;
        out.denom = file.denom;
        out.builtin = file.builtin;
        if out.sign.is_none() {
            out.sign = file.sign.as_ref().map(irrat_core::report::sign_text);
        }
        out.start = out.start.or(file.start);
        for (k, v) in file.params {
            match k.as_str() {
                "prefix" => {
                    if out.prefix.is_none() {
                        out.prefix = Some(v.parse().map_err(|_| format!("prefix {v:?} is not an integer"))?);
                    }
                }
                "epsilon" => out.epsilon = out.epsilon.or(Some(v)),
                "growth" => out.growth = out.growth.or(Some(v)),
                "degree" => {
                    if out.degree.is_none() {
                        out.degree = Some(v.parse().map_err(|_| format!("degree {v:?} is not an integer"))?);
                    }
                }
                "criterion" => out.criterion = out.criterion.or(Some(v)),
                // digits is read by the command itself
                "digits" => {}
                _ => out.params.push(format!("{k}={v}")),
            }
        }
        Ok(out)
    }

    /// `digits` given in a spec file, if any.
    pub fn file_digits(&self) -> Result<Option<u32>, String> {
        let Some(path) = &self.spec_file else { return Ok(None) };
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let file = parse_spec_file(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        file.params
            .get("digits")
            .map(|v| v.parse().map_err(|_| format!("digits {v:?} is not an integer")))
            .transpose()
    }

    pub fn resolve(&self) -> Result<Resolved, String> {
        let args = self.merged()?;
        let eval = bit_budget_from_env()?;
        let prefix = args.prefix.unwrap_or(DEFAULT_PREFIX);
        if prefix == 0 {
            return Err("--prefix must be positive".into());
        }
        let opts = CheckOptions {
            prefix,
            eval,
            ..CheckOptions::default()
        };
        let mut params = Params::new();
        for p in &args.params {
            let (k, v) = parse_param(p)?;
            params.insert(k, v);
        }

        let epsilon = args
            .epsilon
            .as_deref()
            .map(|t| {
                parse_rational(t)
                    .filter(|v| v.numer() > &0.into())
                    .ok_or_else(|| format!("--epsilon {t:?} is not a positive rational"))
            })
            .transpose()?;
        let growth = args
            .growth
            .as_deref()
            .map(|t| GrowthFn::parse(t).map_err(|e| format!("--growth {t:?}: {e}")))
            .transpose()?;
        if args.degree.is_some_and(|d| d < 2) {
            return Err("--degree must be at least 2".into());
        }

        if let Some(name) = &args.builtin {
            if args.pair_numer.is_some() {
                return Err("--pair-numer cannot be combined with --builtin".into());
            }
            let mut degree = args.degree;
            if name == "cremer_tower" {
                if let Some(d) = degree.take() {
                    params.entry("d".into()).or_insert_with(|| d.to_string());
                }
            }
            let entry = builtin(name, &params).map_err(|e| e.to_string())?;
            let mut spec = entry.spec.clone();
            if let Some(s) = &args.sign {
                spec.sign_mode = parse_sign_mode(s)?;
            }
            if let Some(s) = args.start {
                spec.start_index = s;
            }
            let (check, criterion) = match (&args.criterion, growth, epsilon, degree) {
                (Some(c), growth, epsilon, degree) => pick(c, epsilon, growth, degree, None)?,
                (None, Some(f), _, _) => (Check::Growth(f), "growth"),
                (None, None, Some(eps), _) => (Check::Roth(eps), "roth"),
                (None, None, None, Some(d)) => (Check::Cremer(d), "cremer"),
                (None, None, None, None) => (entry.check.clone(), criterion_name(&entry.check)),
            };
            let echo = InputEcho {
                numer: spec.numer.to_string(),
                denom: spec.denom.to_string(),
                sign: spec.sign_mode.clone(),
                start: spec.start_index,
                builtin: Some(entry.name.to_string()),
                params: entry.params.clone(),
                criterion: Some(criterion.to_string()),
                prefix,
                bit_budget: opts.eval.bit_budget,
            };
            return Ok(Resolved {
                spec,
                check,
                entry: Some(entry),
                opts,
                echo,
            });
        }

        if !params.is_empty() {
            return Err("--param applies only to --builtin series".into());
        }
        let (Some(numer), Some(denom)) = (&args.numer, &args.denom) else {
            return Err("need --numer and --denom, --builtin NAME or --spec-file PATH".into());
        };
        let sign = match &args.sign {
            Some(s) => parse_sign_mode(s)?,
            None => SignMode::AllPositive,
        };
        let spec = SeriesSpec::new(expr(numer, "--numer")?, expr(denom, "--denom")?)
            .with_sign(sign)
            .starting_at(args.start.unwrap_or(1));
        spec.validate().map_err(|e| e.to_string())?;
        let pair = match (&args.pair_numer, &args.pair_denom) {
            (Some(n), Some(d)) => {
                Some(SeriesSpec::new(expr(n, "--pair-numer")?, expr(d, "--pair-denom")?).starting_at(spec.start_index))
            }
            _ => None,
        };
        let criterion = args.criterion.clone().unwrap_or_else(|| {
            if pair.is_some() {
                "sum-pair"
            } else if epsilon.is_some() {
                "roth"
            } else if growth.is_some() {
                "growth"
            } else if args.degree.is_some() {
                "cremer"
            } else {
                "irrational"
            }
            .to_string()
        });
        let (check, criterion) = pick(&criterion, epsilon, growth, args.degree, pair)?;
        let echo = InputEcho {
            numer: spec.numer.to_string(),
            denom: spec.denom.to_string(),
            sign: spec.sign_mode.clone(),
            start: spec.start_index,
            builtin: None,
            params: Params::new(),
            criterion: Some(criterion.to_string()),
            prefix,
            bit_budget: opts.eval.bit_budget,
        };
        Ok(Resolved {
            spec,
            check,
            entry: None,
            opts,
            echo,
        })
    }
}

fn pick(
    name: &str,
    epsilon: Option<num_rational::BigRational>,
    growth: Option<GrowthFn>,
    degree: Option<u32>,
    pair: Option<SeriesSpec>,
) -> Result<(Check, &'static str), String> {
    Ok(match name {
        "irrational" => (Check::Irrational, "irrational"),
        "lcm" => (Check::Lcm, "lcm"),
        "roth" => (Check::Roth(epsilon.ok_or("criterion roth needs --epsilon")?), "roth"),
        "growth" => (
            Check::Growth(growth.ok_or("criterion growth needs --growth")?),
            "growth",
        ),
        "cremer" => (
            Check::Cremer(degree.ok_or("criterion cremer needs --degree")?),
            "cremer",
        ),
        "sum-pair" => (
            Check::SumPair(Box::new(
                pair.ok_or("criterion sum-pair needs --pair-numer and --pair-denom")?,
            )),
            "sum-pair",
        ),
        other => return Err(format!("unknown criterion {other:?}")),
    })
}

pub fn criterion_name(check: &Check) -> &'static str {
    match check {
        Check::Irrational => "irrational",
        Check::SumPair(_) => "sum-pair",
        Check::Lcm => "lcm",
        Check::GeometricPoly(_) => "geometric-poly",
        Check::Growth(_) => "growth",
        Check::Roth(_) => "roth",
        Check::Cremer(_) => "cremer",
    }
}
