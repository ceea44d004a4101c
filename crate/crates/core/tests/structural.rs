mod common;

use iet_core::classify::{decompose, recombine};
use iet_core::rauzy::{rauzy_map, rauzy_matrix, rauzy_step, RauzyError};
use iet_core::{SignedPermutation, StepKind};
use num_bigint::BigInt;
use num_traits::Signed;

use common::lengths;

#[test]
fn irreducible_permutations_admit_induction() {
    for n in 2..=5 {
        for p in SignedPermutation::all(n) {
            if p.is_irreducible() {
                assert!(p.in_p_star(), "{p}");
            }
        }
    }
}

#[test]
fn decomposition_round_trips() {
    for n in 1..=5 {
        for p in SignedPermutation::all(n) {
            let d = decompose(&p);
            assert_eq!(recombine(&d), p);
            assert_eq!(d.blocks.iter().map(|b| b.len()).sum::<usize>(), n);
            assert!(d.blocks.iter().all(|b| b.perm.is_irreducible()), "{p}");
            assert_eq!(d.blocks.len() == 1, p.is_irreducible(), "{p}");
        }
    }
}

#[test]
fn step_matrices_are_unimodular() {
    for n in 2..=4 {
        for p in SignedPermutation::all(n).into_iter().filter(|p| p.in_p_star()) {
            for kind in [StepKind::A, StepKind::B] {
                let m = rauzy_matrix(&p, kind).unwrap();
                assert_eq!(m.det().abs(), BigInt::from(1), "{p} {kind:?}");
            }
        }
    }
}

#[test]
fn steps_agree_with_tables() {
    for n in 2..=4 {
        for (s, p) in SignedPermutation::all(n).into_iter().enumerate() {
            if !p.in_p_star() {
                assert!(matches!(rauzy_map(&p, StepKind::A), Err(RauzyError::NotInPStar(_))));
                continue;
            }
            let lambda = lengths(n, s as u64);
            let step = rauzy_step(&lambda, &p).unwrap();
            let kind = step.record.kind;
            assert_eq!(step.perm, rauzy_map(&p, kind).unwrap(), "{p}");
            assert_eq!(rauzy_matrix(&p, kind).unwrap().apply(&step.lengths), lambda, "{p}");
            assert!(step.lengths.iter().all(|l| l.is_positive()));
        }
    }
}
