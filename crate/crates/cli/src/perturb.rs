//! Perturbation smoke test: classify copies of an IET whose lengths are
//! scaled by random rational factors close to 1 and compare the profiles.

use iet_core::{classify_iet, support_distance, Caps, ClassifyError, Component, ComponentReport, Iet, Scalar};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::{is_nonnegative, perturbation_factor};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct PerturbConfig {
    pub magnitude: BigRational,
    pub trials: usize,
    pub seed: u64,
    pub caps: Caps,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbTrial {
    pub trial: usize,
    pub outcome: String,
    pub n_per: Option<usize>,
    pub n_min: Option<usize>,
    pub preserved: bool,
    /// Largest matched support distance, relative to the domain length.
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbReport {
    pub magnitude: String,
    pub trials: usize,
    pub n_per: usize,
    pub n_min: usize,
    pub preserved: usize,
    pub tie_count: usize,
    pub cap_count: usize,
    pub error_count: usize,
    /// Largest support distance over preserved trials, relative to the
    /// domain length.
    pub max_rho: f64,
    pub results: Vec<PerturbTrial>,
}

impl PerturbReport {
    pub fn summary(&self) -> String {
        format!(
            "trials={} preserved={} profile=({},{}) max_rho={:.3e} tie_count={} cap_count={} error_count={}",
            self.trials,
            self.preserved,
            self.n_per,
            self.n_min,
            self.max_rho,
            self.tie_count,
            self.cap_count,
            self.error_count
        )
    }
}

pub fn perturb_lengths(t: &Iet, magnitude: &BigRational, rng: &mut ChaCha8Rng) -> Vec<Scalar> {
    t.lengths()
        .iter()
        .map(|l| l.scale(&perturbation_factor(magnitude, rng.gen_range(-1_000_000..=1_000_000))))
        .collect()
}

/// Largest distance from a component of `base` to its closest counterpart
/// of the same kind and period in `other`.
fn matched_distance(base: &ComponentReport, other: &ComponentReport) -> Option<Scalar> {
    let same = |a: &Component, b: &Component| a.kind == b.kind && a.period == b.period && a.flipped == b.flipped;
    let mut worst: Option<Scalar> = None;
    for a in &base.components {
        let best = other
            .components
            .iter()
            .filter(|b| same(a, b))
            .filter_map(|b| support_distance(&a.support, &b.support).ok())
            .reduce(Scalar::min)?;
        worst = Some(match worst {
            Some(w) => w.max(best),
            None => best,
        });
    }
    worst
}

pub fn run_perturb(t: &Iet, config: &PerturbConfig) -> Result<PerturbReport, CliError> {
    if !is_nonnegative(&config.magnitude) {
        return Err(CliError::Parse("perturbation magnitude must not be negative".into()));
    }
    let base = classify_iet(t, &config.caps)?;
    let c = t.total_length().to_f64();
    let results: Vec<PerturbTrial> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(trial as u64);
            let lengths = perturb_lengths(t, &config.magnitude, &mut rng);
            let copy = Iet::new(lengths, t.perm().clone()).expect("factors stay positive");
            match classify_iet(&copy, &config.caps) {
                Ok(r) => {
                    let preserved = (r.n_per, r.n_min) == (base.n_per, base.n_min);
                    let rho = if preserved { matched_distance(&base, &r).map(|d| d.to_f64() / c) } else { None };
                    PerturbTrial {
                        trial,
                        outcome: "classified".into(),
                        n_per: Some(r.n_per),
                        n_min: Some(r.n_min),
                        preserved: preserved && rho.is_some(),
                        rho,
                    }
                }
                Err(e) => PerturbTrial {
                    trial,
                    outcome: outcome_name(&e).into(),
                    n_per: None,
                    n_min: None,
                    preserved: false,
                    rho: None,
                },
            }
        })
        .collect();
    let count = |name: &str| results.iter().filter(|r| r.outcome == name).count();
    Ok(PerturbReport {
        magnitude: iet_core::scalar::format_rational(&config.magnitude),
        trials: config.trials,
        n_per: base.n_per,
        n_min: base.n_min,
        preserved: results.iter().filter(|r| r.preserved).count(),
        tie_count: count("tie"),
        cap_count: count("cap"),
        error_count: count("error"),
        max_rho: results.iter().filter_map(|r| r.rho).fold(0.0, f64::max),
        results,
    })
}

fn outcome_name(e: &ClassifyError) -> &'static str {
    if e.is_tie() {
        "tie"
    } else if e.is_cap() {
        "cap"
    } else {
        "error"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use iet_core::{Basis, SignedPermutation};
    use num_traits::Zero;

    fn flip_pair() -> Iet {
        let basis = Basis::new(vec![2]).unwrap();
        let lengths = vec![Scalar::basis_element(&basis, &[2]).unwrap(), Scalar::from_integer(&basis, 1)];
        Iet::new(lengths, SignedPermutation::new(vec![-2, 1]).unwrap()).unwrap()
    }

    #[test]
    fn zero_magnitude_is_identity() {
        let config = PerturbConfig { magnitude: BigRational::zero(), trials: 5, seed: 1, caps: Caps::default() };
        let report = run_perturb(&flip_pair(), &config).unwrap();
        assert_eq!(report.preserved, 5);
        assert_eq!(report.max_rho, 0.0);
    }

    #[test]
    fn small_perturbations_keep_the_profile() {
        let config = PerturbConfig {
            magnitude: BigRational::new(1.into(), 1000.into()),
            trials: 10,
            seed: 4,
            caps: Caps::default(),
        };
        let report = run_perturb(&flip_pair(), &config).unwrap();
        assert_eq!((report.n_per, report.n_min), (2, 0));
        assert_eq!(report.preserved, 10);
        assert!(report.max_rho < 1e-2);
    }
}
