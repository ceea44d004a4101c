//! Sampling harness for the component bound: random irreducible signed
//! permutations with flips and cone-sampled lengths, classified in
//! parallel.

use iet_core::construct::{cone_point, sample_independent, sampling_basis};
use iet_core::{classify_iet, rauzy_map, Caps, ClassifyError, Iet, SignedPermutation, StepKind};
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::checks::singular_point_checks;
use crate::CliError;

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub n: usize,
    pub sample_count: usize,
    pub seed: u64,
    pub rauzy_cap: usize,
    pub orbit_cap: usize,
    pub perturbation_magnitude: BigRational,
}

impl HarnessConfig {
    pub fn new(n: usize, sample_count: usize, seed: u64) -> HarnessConfig {
        let caps = Caps::default();
        HarnessConfig {
            n,
            sample_count,
            seed,
            rauzy_cap: caps.rauzy_cap,
            orbit_cap: crate::checks::CONNECTION_CAP,
            perturbation_magnitude: BigRational::new(1.into(), 1000.into()),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n == 0 {
            return Err(CliError::Parse("n must be at least 1".into()));
        }
        if self.rauzy_cap == 0 || self.orbit_cap == 0 {
            return Err(CliError::Parse("caps must be at least 1".into()));
        }
        if self.perturbation_magnitude <= BigRational::zero() {
            return Err(CliError::Parse("perturbation magnitude must be positive".into()));
        }
        Ok(())
    }

    pub fn caps(&self) -> Caps {
        Caps { rauzy_cap: self.rauzy_cap, ..Caps::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// `sample_count` random permutations.
    Random,
    /// Every irreducible permutation with a flip, `sample_count` length
    /// vectors each.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub perm: SignedPermutation,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub sampling: Sampling,
    pub seed: u64,
    pub samples: usize,
    pub terminated: usize,
    pub bound_violations: usize,
    pub nper_zero_with_flips: usize,
    pub singular_point_violations: usize,
    pub tie_count: usize,
    pub cap_count: usize,
    pub degenerate_count: usize,
    pub max_components: usize,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.bound_violations == 0 && self.nper_zero_with_flips == 0 && self.singular_point_violations == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "n={} samples={} terminated={} bound_violations={} nper_zero_with_flips={} singular_point_violations={} tie_count={} cap_count={} degenerate_count={}",
            self.n,
            self.samples,
            self.terminated,
            self.bound_violations,
            self.nper_zero_with_flips,
            self.singular_point_violations,
            self.tie_count,
            self.cap_count,
            self.degenerate_count
        )
    }
}

enum Outcome {
    Classified { n_per: usize, n_min: usize, flipped: usize, checks: Result<(), String> },
    Tie,
    Cap,
    Degenerate,
    Bound(String),
}

/// Uniform random irreducible signed permutation with at least one flip.
pub fn random_flip_irreducible<R: Rng>(n: usize, rng: &mut R) -> SignedPermutation {
    loop {
        let mut values: Vec<i64> = (1..=n as i64).collect();
        values.shuffle(rng);
        let entries: Vec<i64> = values.into_iter().map(|v| if rng.gen_bool(0.5) { -v } else { v }).collect();
        let p = SignedPermutation::new(entries).expect("shuffled values");
        if p.has_flips() && p.is_irreducible() {
            return p;
        }
    }
}

/// Lengths in the cone of a random short Rauzy word starting at `p`.
pub fn cone_lengths<R: Rng>(p: &SignedPermutation, rng: &mut R) -> Vec<iet_core::Scalar> {
    let basis = sampling_basis(p.len()).expect("n within the sampling bases");
    let mu = sample_independent(&basis, p.len(), rng);
    let mut word = Vec::new();
    let mut q = p.clone();
    for _ in 0..rng.gen_range(0..=4) {
        if !q.in_p_star() {
            break;
        }
        let kind = if rng.gen_bool(0.5) { StepKind::A } else { StepKind::B };
        q = rauzy_map(&q, kind).expect("in P*");
        word.push(kind);
    }
    cone_point(p, &word, &mu).expect("cone of an applicable word")
}

/// Permutation of trial `i` in random sampling.
pub fn trial_perm(seed: u64, n: usize, i: usize) -> SignedPermutation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e_ed0f_9e27);
    rng.set_stream(i as u64);
    random_flip_irreducible(n, &mut rng)
}

/// The IET of trial `i` with permutation `p`.
pub fn trial_iet(seed: u64, p: &SignedPermutation, i: usize) -> Iet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    Iet::new(cone_lengths(p, &mut rng), p.clone()).expect("positive lengths")
}

fn run_trial(config: &HarnessConfig, p: &SignedPermutation, trial: usize) -> Outcome {
    let t = trial_iet(config.seed, p, trial);
    match classify_iet(&t, &config.caps()) {
        Ok(report) => Outcome::Classified {
            n_per: report.n_per,
            n_min: report.n_min,
            flipped: report.flipped_count(),
            checks: singular_point_checks(&t, &report, config.orbit_cap),
        },
        Err(e) if e.is_tie() => Outcome::Tie,
        Err(e) if e.is_cap() => Outcome::Cap,
        Err(ClassifyError::DegenerateBlock { .. }) => Outcome::Degenerate,
        Err(e) => Outcome::Bound(e.to_string()),
    }
}

pub fn run_verify(config: &HarnessConfig, sampling: Sampling) -> Result<VerifyReport, CliError> {
    config.validate()?;
    let perms: Vec<SignedPermutation> = match sampling {
        Sampling::Random => (0..config.sample_count).map(|i| trial_perm(config.seed, config.n, i)).collect(),
        Sampling::Exhaustive => SignedPermutation::all(config.n)
            .into_iter()
            .filter(|p| p.has_flips() && p.is_irreducible())
            .flat_map(|p| std::iter::repeat_n(p, config.sample_count))
            .collect(),
    };
    let outcomes: Vec<Outcome> = perms.par_iter().enumerate().map(|(i, p)| run_trial(config, p, i)).collect();
    let mut report = VerifyReport {
        n: config.n,
        sampling,
        seed: config.seed,
        samples: perms.len(),
        terminated: 0,
        bound_violations: 0,
        nper_zero_with_flips: 0,
        singular_point_violations: 0,
        tie_count: 0,
        cap_count: 0,
        degenerate_count: 0,
        max_components: 0,
        failures: Vec::new(),
    };
    for (trial, (p, outcome)) in perms.iter().zip(outcomes).enumerate() {
        let mut fail = |reason: String| report.failures.push(Failure { trial, perm: p.clone(), reason });
        match outcome {
            Outcome::Classified { n_per, n_min, flipped, checks } => {
                report.terminated += 1;
                report.max_components = report.max_components.max(n_per + n_min);
                if n_per + 2 * n_min > config.n {
                    report.bound_violations += 1;
                    fail(format!("n_per={n_per} n_min={n_min}"));
                }
                if n_per == 0 || flipped == 0 {
                    report.nper_zero_with_flips += 1;
                    fail(format!("no flipped periodic component (n_per={n_per})"));
                }
                if let Err(why) = checks {
                    report.singular_point_violations += 1;
                    fail(why);
                }
            }
            Outcome::Tie => report.tie_count += 1,
            Outcome::Cap => report.cap_count += 1,
            Outcome::Degenerate => report.degenerate_count += 1,
            Outcome::Bound(why) => {
                report.terminated += 1;
                report.bound_violations += 1;
                fail(why);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_run() {
        let report = run_verify(&HarnessConfig::new(4, 0, 1), Sampling::Random).unwrap();
        assert_eq!(report.samples, 0);
        assert!(report.is_clean());
    }

    #[test]
    fn invalid_config() {
        let mut c = HarnessConfig::new(3, 1, 1);
        c.rauzy_cap = 0;
        assert!(matches!(run_verify(&c, Sampling::Random), Err(CliError::Parse(_))));
    }

    #[test]
    fn deterministic() {
        let c = HarnessConfig::new(4, 20, 9);
        assert_eq!(run_verify(&c, Sampling::Random).unwrap(), run_verify(&c, Sampling::Random).unwrap());
    }

    #[test]
    fn two_intervals_exhaustive() {
        let report = run_verify(&HarnessConfig::new(2, 10, 3), Sampling::Exhaustive).unwrap();
        // (-2,1), (2,-1), (-2,-1), each with 10 length vectors
        assert_eq!(report.samples, 30);
        assert!(report.is_clean(), "{report:?}");
        assert_eq!(report.tie_count, 0);
    }
}
