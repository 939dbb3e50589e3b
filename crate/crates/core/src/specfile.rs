//! Flat `key = value` series description files.
//!
//! ```text
//! # Σ 1/10^(n!)
//! numer = 1
//! denom = 10^(n!)
//! sign = positive
//! start = 1
//! epsilon = 1
//! ```
//!
//! `builtin = NAME` selects a catalog entry instead of `numer`/`denom`;
//! catalog parameters (`r`, `d`, `a`, `epsilon`) then go to the entry.

use std::fmt;

use crate::catalog::Params;
use crate::seqexpr::SequenceExpr;
use crate::series::SignMode;

/// Keys that carry check parameters rather than the series itself.
pub const PARAM_KEYS: &[&str] = &[
    "r",
    "d",
    "a",
    "epsilon",
    "growth",
    "degree",
    "prefix",
    "digits",
    "criterion",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct SpecFileError {
    /// 1-based line number.
    pub line: usize,
    /// 1-based column of the offending character.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SpecFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecFile {
    pub numer: Option<String>,
    pub denom: Option<String>,
    pub sign: Option<SignMode>,
    pub start: Option<u64>,
    pub builtin: Option<String>,
    pub params: Params,
}

/// Parses `positive`, `alternating`, `alternating-negative` or a periodic
/// pattern such as `pattern:+-+`.
pub fn parse_sign_mode(text: &str) -> Result<SignMode, String> {
    match text.trim() {
        "positive" => Ok(SignMode::AllPositive),
        "alternating" => Ok(SignMode::Alternating { first_positive: true }),
        "alternating-negative" => Ok(SignMode::Alternating { first_positive: false }),
        other => {
            let Some(pat) = other.strip_prefix("pattern:") else {
                return Err(format!(
                    "unknown sign mode {other:?} (expected positive, alternating, alternating-negative or pattern:...)"
                ));
            };
            if pat.is_empty() {
                return Err("empty sign pattern".into());
            }
            pat.chars()
                .map(|c| match c {
                    '+' => Ok(false),
                    '-' => Ok(true),
                    c => Err(format!("sign pattern may contain only + and -, found {c:?}")),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(|negative| SignMode::General { negative })
        }
    }
}

pub fn parse_spec_file(text: &str) -> Result<SpecFile, SpecFileError> {
    let mut out = SpecFile::default();
    // line of the first key naming the series, for conflict errors
    let mut series_key_line: Option<(usize, &str)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let err = |col: usize, message: String| SpecFileError {
            line,
            column: col + 1,
            message,
        };
        let Some(eq) = content.find('=') else {
            let col = content.len() - content.trim_start().len();
            return Err(err(col, "expected `key = value`".into()));
        };
        let key = content[..eq].trim();
        let key_col = content.len() - content.trim_start().len();
        let value_raw = &content[eq + 1..];
        let value = value_raw.trim();
        let value_col = eq + 1 + (value_raw.len() - value_raw.trim_start().len());
        if key.is_empty() {
            return Err(err(key_col, "missing key before `=`".into()));
        }
        if value.is_empty() {
            return Err(err(value_col, format!("missing value for `{key}`")));
        }
        let dup = |present: bool| {
            if present {
                Err(err(key_col, format!("duplicate key `{key}`")))
            } else {
                Ok(())
            }
        };
        if matches!(key, "numer" | "denom" | "builtin") {
            match series_key_line {
                Some((l, k)) if (k == "builtin") != (key == "builtin") => {
                    return Err(err(
                        key_col,
                        format!("`{key}` conflicts with `{k}` on line {l}: use `builtin` or `numer`/`denom`"),
                    ));
                }
                None => series_key_line = Some((line, if key == "builtin" { "builtin" } else { "numer" })),
                _ => {}
            }
        }
        match key {
            "numer" | "denom" => {
                SequenceExpr::parse(value).map_err(|e| {
                    let col = value_col + value.char_indices().nth(e.position).map_or(value.len(), |(i, _)| i);
                    err(col, format!("in `{key}`: {}", e.message))
                })?;
                let slot = if key == "numer" { &mut out.numer } else { &mut out.denom };
                dup(slot.is_some())?;
                *slot = Some(value.to_string());
            }
            "sign" => {
                dup(out.sign.is_some())?;
                out.sign = Some(parse_sign_mode(value).map_err(|m| err(value_col, m))?);
            }
            "start" => {
                dup(out.start.is_some())?;
                out.start = Some(value.parse().map_err(|_| {
                    err(
                        value_col,
                        format!("start must be a non-negative integer, got {value:?}"),
                    )
                })?);
            }
            "builtin" => {
                dup(out.builtin.is_some())?;
                out.builtin = Some(value.to_string());
            }
            k if PARAM_KEYS.contains(&k) => {
                dup(out.params.contains_key(k))?;
                out.params.insert(k.to_string(), value.to_string());
            }
            other => return Err(err(key_col, format!("unknown key `{other}`"))),
        }
    }
    if out.builtin.is_none() && (out.numer.is_none() || out.denom.is_none()) {
        return Err(SpecFileError {
            line: text.lines().count() + 1,
            column: 1,
            message: "need both `numer` and `denom`, or `builtin`".into(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_inline_spec() {
        let f =
            parse_spec_file("# liouville\nnumer = 1\ndenom = 10^(n!)\nsign=positive\nstart = 1\nepsilon = 1 # roth\n")
                .unwrap();
        assert_eq!(f.numer.as_deref(), Some("1"));
        assert_eq!(f.denom.as_deref(), Some("10^(n!)"));
        assert_eq!(f.sign, Some(SignMode::AllPositive));
        assert_eq!(f.start, Some(1));
        assert_eq!(f.params.get("epsilon").map(String::as_str), Some("1"));
    }

    #[test]
    fn reads_builtin() {
        let f = parse_spec_file("builtin = sin_recip\nr = 3\n").unwrap();
        assert_eq!(f.builtin.as_deref(), Some("sin_recip"));
        assert_eq!(f.params["r"], "3");
    }

    #[test]
    fn sign_modes() {
        assert_eq!(
            parse_sign_mode("alternating-negative").unwrap(),
            SignMode::Alternating { first_positive: false }
        );
        assert_eq!(
            parse_sign_mode("pattern:+-").unwrap(),
            SignMode::General {
                negative: vec![false, true]
            }
        );
        assert!(parse_sign_mode("pattern:+x").is_err());
        assert!(parse_sign_mode("sometimes").is_err());
    }

    #[test]
    fn expression_errors_point_into_the_line() {
        let e = parse_spec_file("numer = 1\ndenom =  2^(n+\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.column >= 10, "{e}");
    }

    #[test]
    fn structural_errors() {
        assert_eq!(parse_spec_file("numer 1\n").unwrap_err().line, 1);
        assert_eq!(parse_spec_file("numer = 1\nnumer = 2\n").unwrap_err().line, 2);
        assert_eq!(parse_spec_file("colour = red\n").unwrap_err().column, 1);
        assert!(parse_spec_file("numer = 1\n").is_err());
        assert!(parse_spec_file("start = -1\n").is_err());
        let e = parse_spec_file("builtin = e\nnumer = 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 1));
    }
}
