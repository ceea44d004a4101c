#![allow(dead_code)]

use iet_core::construct::{sample_independent, sampling_basis};
use iet_core::{Iet, Scalar, SignedPermutation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn lengths(n: usize, seed: u64) -> Vec<Scalar> {
    let basis = sampling_basis(n).unwrap();
    sample_independent(&basis, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn perm_strategy(max_n: usize) -> impl Strategy<Value = SignedPermutation> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (Just((1..=n as i64).collect::<Vec<_>>()).prop_shuffle(), prop::collection::vec(any::<bool>(), n))
        })
        .prop_map(|(pi, flips)| {
            let entries = pi.iter().zip(&flips).map(|(&v, &f)| if f { -v } else { v }).collect();
            SignedPermutation::new(entries).unwrap()
        })
}

pub fn iet_strategy(max_n: usize) -> impl Strategy<Value = Iet> {
    (perm_strategy(max_n), any::<u64>()).prop_map(|(p, seed)| Iet::new(lengths(p.len(), seed), p).unwrap())
}

/// Irreducible permutations with at least one flip.
pub fn flip_irreducible_strategy(max_n: usize) -> impl Strategy<Value = SignedPermutation> {
    perm_strategy(max_n).prop_filter("irreducible with a flip", |p| p.is_irreducible() && p.has_flips())
}

/// A point `lo + (hi - lo)·k/d` strictly inside `(lo, hi)`.
pub fn inner_point(lo: &Scalar, hi: &Scalar, k: i64, d: i64) -> Scalar {
    lo + &(hi - lo).scale(&num_rational::BigRational::new(k.into(), d.into()))
}
