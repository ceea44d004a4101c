//! Example factories: permutations realizing a prescribed number of
//! periodic and minimal components, and length vectors sampled from the cone
//! of a Rauzy word.

use std::sync::Arc;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::IntMatrix;
use crate::perm::SignedPermutation;
use crate::rauzy::{follow_word, rauzy_map, rauzy_matrix, RauzyError, StepKind};
use crate::scalar::{rationally_independent, Basis, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("no construction for n={n}, k={k}, l={ell}")]
    InvalidCounts { n: usize, k: usize, ell: usize },
    #[error("b^(n-1)({p}) = {got}, expected {want}")]
    TargetMismatch { p: SignedPermutation, got: SignedPermutation, want: SignedPermutation },
    #[error("step {step} of the word leaves P*")]
    WordInapplicable { step: usize },
    #[error("sampled lengths do not follow the requested word")]
    ReplayMismatch,
    #[error("dimension {0} is too large for the sampling bases")]
    TooLarge(usize),
    #[error(transparent)]
    Rauzy(#[from] RauzyError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub seed: u64,
}

/// Whether `k` periodic and `ℓ` minimal components can be realized by an
/// irreducible `n`-IET with flips.
pub fn is_admissible(n: usize, k: usize, ell: usize) -> bool {
    (k >= 1 && ell >= 1 && 2 * ell < n && k + 2 * ell <= n) || (n >= 1 && k == n && ell == 0)
}

impl ConstructionSpec {
    pub fn is_admissible(&self) -> bool {
        is_admissible(self.n, self.k, self.ell)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub n_per: usize,
    pub n_min: usize,
}

/// The permutation `p` and the reducible target `q = b^{n-1}(p)`.
pub fn construction_pair(
    n: usize,
    k: usize,
    ell: usize,
) -> Result<(SignedPermutation, SignedPermutation), ConstructError> {
    if !is_admissible(n, k, ell) {
        return Err(ConstructError::InvalidCounts { n, k, ell });
    }
    let n_i = n as i64;
    let k_i = k as i64;
    let (p, q): (Vec<i64>, Vec<i64>) = if ell == 0 {
        (std::iter::once(-n_i).chain((1..n_i).rev()).collect(), (1..=n_i).map(|v| -v).collect())
    } else {
        // r intervals form the last minimal block
        let r = n_i - k_i - 2 * (ell as i64 - 1);
        let mut p: Vec<i64> = std::iter::once(-n_i).chain((n_i - k_i + 1..n_i).rev()).collect();
        let mut a = n_i - k_i - 1;
        while a > r {
            p.extend([-a, -(a + 1)]);
            a -= 2;
        }
        p.extend((1..=r).map(|v| -v));
        let mut q: Vec<i64> = (1..=r).rev().collect();
        let mut a = r + 1;
        while a < n_i - k_i {
            q.extend([a + 1, a]);
            a += 2;
        }
        q.extend((n_i - k_i + 1..=n_i).map(|v| -v));
        (p, q)
    };
    Ok((SignedPermutation::new(p).expect("valid construction"), SignedPermutation::new(q).expect("valid target")))
}

/// Radicands for sampling `n` rationally independent lengths: the first `m`
/// primes with `2^m ≥ n`.
pub fn sampling_basis(n: usize) -> Result<Arc<Basis>, ConstructError> {
    const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    let m = (usize::BITS - n.max(2).saturating_sub(1).leading_zeros()) as usize;
    if m > PRIMES.len() {
        return Err(ConstructError::TooLarge(n));
    }
    Ok(Basis::new(PRIMES[..m.max(1)].to_vec())?)
}

/// `n` positive lengths, linearly independent over `Q`, with every field
/// coefficient drawn from `{1..20}/{1..20}`.
pub fn sample_independent<R: Rng>(basis: &Arc<Basis>, n: usize, rng: &mut R) -> Vec<Scalar> {
    loop {
        let v: Vec<Scalar> = (0..n)
            .map(|_| {
                let mut coeffs = Vec::with_capacity(basis.dim());
                for mask in 0..basis.dim() {
                    let q = BigRational::new(rng.gen_range(1..=20i64).into(), rng.gen_range(1..=20i64).into());
                    coeffs.push((basis.subset_of(mask), q));
                }
                Scalar::from_terms(basis, coeffs).expect("subsets of the basis")
            })
            .collect();
        if rationally_independent(&v).expect("same basis") {
            return v;
        }
    }
}

/// Product of the step matrices along `word`, checking each step starts in
/// `P*`.
pub fn word_matrix(p: &SignedPermutation, word: &[StepKind]) -> Result<IntMatrix, ConstructError> {
    let mut m = IntMatrix::identity(p.len());
    let mut q = p.clone();
    for (step, &kind) in word.iter().enumerate() {
        if !q.in_p_star() {
            return Err(ConstructError::WordInapplicable { step });
        }
        m = m.mul(&rauzy_matrix(&q, kind)?);
        q = rauzy_map(&q, kind)?;
    }
    Ok(m)
}

/// `λ = M·μ` for a given positive `μ`, replayed to confirm the word.
pub fn cone_point(p: &SignedPermutation, word: &[StepKind], mu: &[Scalar]) -> Result<Vec<Scalar>, ConstructError> {
    let lambda = word_matrix(p, word)?.apply(mu);
    match follow_word(&lambda, p, word)? {
        Some(traj) if traj.final_lengths == mu => Ok(lambda),
        _ => Err(ConstructError::ReplayMismatch),
    }
}

/// Samples `λ` in the cone of `word` from a seed.
pub fn cone_sample(p: &SignedPermutation, word: &[StepKind], seed: u64) -> Result<Vec<Scalar>, ConstructError> {
    let basis = sampling_basis(p.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = sample_independent(&basis, p.len(), &mut rng);
    cone_point(p, word, &mu)
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub spec: ConstructionSpec,
    pub lengths: Vec<Scalar>,
    pub perm: SignedPermutation,
    pub target: SignedPermutation,
    pub expected: Expected,
}

pub fn construct_theorem_c(spec: &ConstructionSpec) -> Result<Construction, ConstructError> {
    let (p, want) = construction_pair(spec.n, spec.k, spec.ell)?;
    let word = vec![StepKind::B; spec.n - 1];
    let mut got = p.clone();
    for _ in 0..spec.n - 1 {
        got = rauzy_map(&got, StepKind::B)?;
    }
    if got != want || !p.is_irreducible() {
        return Err(ConstructError::TargetMismatch { p, got, want });
    }
    let lengths = cone_sample(&p, &word, spec.seed)?;
    Ok(Construction {
        spec: *spec,
        lengths,
        perm: p,
        target: want,
        expected: Expected { n_per: spec.k, n_min: spec.ell },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(v: &[i64]) -> SignedPermutation {
        SignedPermutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible(7, 3, 2));
        assert!(is_admissible(4, 4, 0));
        assert!(is_admissible(1, 1, 0));
        assert!(!is_admissible(4, 1, 2));
        assert!(!is_admissible(6, 1, 3));
        assert!(!is_admissible(4, 0, 1));
        assert!(!is_admissible(4, 2, 0));
        assert!(is_admissible(3, 1, 1));
    }

    #[test]
    fn pairs() {
        assert_eq!(
            construction_pair(7, 3, 2).unwrap(),
            (sp(&[-7, 6, 5, -3, -4, -1, -2]), sp(&[2, 1, 4, 3, -5, -6, -7]))
        );
        assert_eq!(construction_pair(4, 4, 0).unwrap(), (sp(&[-4, 3, 2, 1]), sp(&[-1, -2, -3, -4])));
        assert_eq!(construction_pair(5, 5, 0).unwrap().0, sp(&[-5, 4, 3, 2, 1]));
        assert_eq!(construction_pair(3, 1, 1).unwrap(), (sp(&[-3, -1, -2]), sp(&[2, 1, -3])));
        assert_eq!(construction_pair(4, 1, 2), Err(ConstructError::InvalidCounts { n: 4, k: 1, ell: 2 }));
    }

    #[test]
    fn bases() {
        assert_eq!(sampling_basis(1).unwrap().radicands(), &[2]);
        assert_eq!(sampling_basis(2).unwrap().radicands(), &[2]);
        assert_eq!(sampling_basis(3).unwrap().radicands(), &[2, 3]);
        assert_eq!(sampling_basis(4).unwrap().radicands(), &[2, 3]);
        assert_eq!(sampling_basis(5).unwrap().radicands(), &[2, 3, 5]);
        assert_eq!(sampling_basis(10).unwrap().radicands(), &[2, 3, 5, 7]);
    }

    #[test]
    fn cone_points() {
        let basis = Basis::new(vec![2]).unwrap();
        let one = Scalar::from_integer(&basis, 1);
        let r2 = Scalar::basis_element(&basis, &[2]).unwrap();
        let lambda = cone_point(&sp(&[-2, 1]), &[StepKind::B], &[one.clone(), r2.clone()]).unwrap();
        assert_eq!(lambda, vec![&one + &r2, one.clone()]);
        let mu = vec![one.clone(), r2.clone()];
        assert_eq!(cone_point(&sp(&[-2, 1]), &[], &mu).unwrap(), mu);
        assert_eq!(word_matrix(&sp(&[-1, -2]), &[StepKind::B]), Err(ConstructError::WordInapplicable { step: 0 }));
    }

    #[test]
    fn seeded_and_independent() {
        let a = cone_sample(&sp(&[-3, 1, 2]), &[], 7).unwrap();
        let b = cone_sample(&sp(&[-3, 1, 2]), &[], 7).unwrap();
        assert_eq!(a, b);
        assert!(rationally_independent(&a).unwrap());
    }
}
