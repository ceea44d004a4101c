//! `classify` and `construct`, plus input parsing shared by the other
//! subcommands.

use std::str::FromStr;

use iet_core::scalar::parse_rational;
use iet_core::{
    classify_iet, construct_theorem_c, Caps, ComponentReport, ConstructionSpec, Expected, Iet, IetFile, Scalar,
    ScalarRepr,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::checks::{oracle_agreement, Agreement};
use crate::CliError;

pub fn load_iet(text: &str) -> Result<(Iet, Option<Expected>), CliError> {
    let file = IetFile::parse(text)?;
    Ok((file.to_iet()?, file.expected))
}

/// Exact rational from `p/q`, a decimal such as `0.001`, or scientific
/// notation such as `1e-3`.
pub fn parse_exact(text: &str) -> Result<BigRational, CliError> {
    let text = text.trim();
    let bad = || CliError::Parse(format!("not a rational number: {text:?}"));
    if text.contains('/') {
        return parse_rational(text).map_err(|_| bad());
    }
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(k) => (&text[..k], i32::from_str(&text[k + 1..]).map_err(|_| bad())?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return Err(bad());
    }
    let all: String = format!("{int}{frac}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(numer);
    if shift >= 0 {
        q *= BigRational::from_integer(Pow::pow(&ten, shift as u32));
    } else {
        q /= BigRational::from_integer(Pow::pow(&ten, (-shift) as u32));
    }
    Ok(if negative { -q } else { q })
}

/// A point given as a rational (see [`parse_exact`]) or as a scalar JSON
/// object over the IET's basis.
pub fn parse_point(t: &Iet, text: &str) -> Result<Scalar, CliError> {
    if text.trim_start().starts_with('{') {
        let repr: ScalarRepr = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        return Scalar::from_repr(t.basis(), &repr).map_err(|e| CliError::Parse(e.to_string()));
    }
    Ok(Scalar::from_rational(t.basis(), parse_exact(text)?))
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub caps: Caps,
    /// Oracle partition depth for `cross_check`.
    pub orbit_cap: usize,
    pub cross_check: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { caps: Caps::default(), orbit_cap: 16384, cross_check: false }
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyOutcome {
    pub report: ComponentReport,
    pub json: serde_json::Value,
}

pub fn cmd_classify(text: &str, options: &ClassifyOptions) -> Result<ClassifyOutcome, CliError> {
    let (t, expected) = load_iet(text)?;
    classify_loaded(&t, expected, options)
}

pub fn classify_loaded(
    t: &Iet,
    expected: Option<Expected>,
    options: &ClassifyOptions,
) -> Result<ClassifyOutcome, CliError> {
    let report = classify_iet(t, &options.caps)?;
    if let Some(e) = expected {
        if (e.n_per, e.n_min) != (report.n_per, report.n_min) {
            return Err(CliError::Invariant(format!(
                "expected n_per={} n_min={}, got {}",
                e.n_per,
                e.n_min,
                report.summary()
            )));
        }
    }
    if options.cross_check {
        match oracle_agreement(t, &report, options.orbit_cap) {
            Agreement::Agree => {}
            Agreement::Inconclusive => {
                return Err(CliError::Dynamical {
                    kind: "cap",
                    message: format!("oracle did not close every cycle within depth {}", options.orbit_cap),
                })
            }
            Agreement::Disagree(why) => return Err(CliError::Invariant(why)),
        }
    }
    let json = report.to_json();
    Ok(ClassifyOutcome { report, json })
}

/// Human-readable lines: the summary, then one line per component.
pub fn report_lines(report: &ComponentReport) -> Vec<String> {
    let mut lines = vec![report.summary()];
    for c in &report.components {
        let pieces = c.support.len();
        let measure = c.measure().to_f64();
        let line = match (c.period, c.flipped) {
            (Some(period), Some(flipped)) => format!(
                "periodic period={period} flipped={flipped} pieces={pieces} measure={measure:.6} witness={}",
                c.witness
            ),
            _ => format!("minimal pieces={pieces} measure={measure:.6} witness={}", c.witness),
        };
        lines.push(line);
    }
    lines
}

pub fn cmd_construct(spec: &ConstructionSpec) -> Result<IetFile, CliError> {
    let c = construct_theorem_c(spec)?;
    IetFile::from_construction(&c).map_err(|e| CliError::Invariant(e.to_string()))
}

/// `1 + magnitude·k/10^6` for `k` in `[-10^6, 10^6]`.
pub fn perturbation_factor(magnitude: &BigRational, k: i64) -> BigRational {
    BigRational::one() + magnitude * BigRational::new(k.into(), 1_000_000.into())
}

pub fn is_nonnegative(q: &BigRational) -> bool {
    *q >= BigRational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exact_numbers() {
        assert_eq!(parse_exact("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_exact("0.001").unwrap(), q(1, 1000));
        assert_eq!(parse_exact("2/6").unwrap(), q(1, 3));
        assert_eq!(parse_exact("-1.5E2").unwrap(), q(-150, 1));
        assert_eq!(parse_exact("7").unwrap(), q(7, 1));
        assert_eq!(parse_exact(".5").unwrap(), q(1, 2));
        assert!(parse_exact("abc").is_err());
        assert!(parse_exact("1e").is_err());
        assert!(parse_exact(".").is_err());
    }

    #[test]
    fn factors() {
        assert_eq!(perturbation_factor(&q(1, 1000), 1_000_000), q(1001, 1000));
        assert_eq!(perturbation_factor(&q(1, 1000), -500_000), q(1999, 2000));
        assert!(perturbation_factor(&BigRational::zero(), 17).is_one());
    }
}
