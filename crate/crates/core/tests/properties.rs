mod common;

use std::cmp::Ordering;

use iet_core::classify::{classify, classify_iet, Caps};
use iet_core::orbits::first_return;
use iet_core::rauzy::{finite_expansion, follow_word, rauzy_step, RauzyError};
use iet_core::scalar::sum;
use iet_core::{Basis, Direction, Iet, Scalar};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use common::*;

fn scalar_strategy() -> impl Strategy<Value = Scalar> {
    prop::collection::vec((-20i64..=20, 1i64..=20), 4).prop_map(|cs| {
        let basis = Basis::new(vec![2, 3]).unwrap();
        let terms = cs
            .into_iter()
            .enumerate()
            .map(|(mask, (n, d))| (basis.subset_of(mask), BigRational::new(n.into(), d.into())))
            .collect::<Vec<_>>();
        Scalar::from_terms(&basis, terms).unwrap()
    })
}

/// Fixed-point evaluation with 60 decimal digits per square root; returns
/// the value times 10^60 and an error bound in the same units.
fn fixed_point(x: &Scalar) -> (BigRational, BigRational) {
    let scale = BigUint::from(10u32).pow(60);
    let mut value = BigRational::zero();
    let mut err = BigRational::zero();
    for (subset, c) in x.terms() {
        let prod: BigUint = subset.iter().map(|&d| BigUint::from(d)).product();
        let root = (prod * &scale * &scale).sqrt();
        value += c.clone() * BigRational::from_integer(BigInt::from(root));
        err += c.abs();
    }
    (value, err)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(a in scalar_strategy(), b in scalar_strategy(), c in scalar_strategy(), q in 1i64..50) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        let q = BigRational::new(q.into(), 7.into());
        prop_assert_eq!(a.scale(&q).div_rational(&q).unwrap(), a.clone());
    }

    #[test]
    fn sign_matches_fixed_point(a in scalar_strategy(), b in scalar_strategy()) {
        let x = &(&a * &b) - &a;
        let (value, err) = fixed_point(&x);
        // 10^-20 margin in units of 10^-60
        let margin = BigRational::from_integer(BigInt::from(10u32).pow(40));
        if value.abs() > err.clone() + margin {
            let expected = if value.is_positive() { Ordering::Greater } else { Ordering::Less };
            prop_assert_eq!(x.sign(), expected);
        }
        prop_assert_eq!(x.sign() == Ordering::Equal, x.coeffs().iter().all(Zero::is_zero));
    }

    #[test]
    fn evaluation_round_trip(t in iet_strategy(6), k in 1i64..1000) {
        let c = t.total_length().clone();
        let x = inner_point(&t.zero(), &c, k, 1000);
        if let Some(y) = t.evaluate(&x, Direction::Forward).unwrap() {
            prop_assert_eq!(t.evaluate(&y, Direction::Backward).unwrap(), Some(x));
        }
        let last = t.image_breakpoints().last().unwrap();
        prop_assert_eq!(last, &c);
        prop_assert_eq!(sum(t.basis(), t.lengths()), c);
    }

    #[test]
    fn isometric_pieces(t in iet_strategy(6), i in 0usize..6, j in 1i64..10, k in 1i64..10) {
        let i = i % t.n();
        let iv = t.domain_interval(i);
        let (j, k) = if j < k { (j, k) } else if j > k { (k, j) } else { return Ok(()) };
        let u = inner_point(&iv.lo, &iv.hi, j, 10);
        let v = inner_point(&iv.lo, &iv.hi, k, 10);
        let tu = t.evaluate(&u, Direction::Forward).unwrap().unwrap();
        let tv = t.evaluate(&v, Direction::Forward).unwrap().unwrap();
        prop_assert_eq!((&tu - &tv).abs(), &v - &u);
    }

    #[test]
    fn long_flipped_interval_has_fixed_point(t in iet_strategy(6)) {
        let half = t.total_length().half();
        for i in 0..t.n() {
            if t.perm().is_flipped(i) && t.lengths()[i].cmp_exact(&half) == Ordering::Greater {
                prop_assert!(t.flipped_fixed_points().iter().any(|(j, _)| *j == i));
            }
        }
        for (i, x) in t.flipped_fixed_points() {
            prop_assert_eq!(t.evaluate(&x, Direction::Forward).unwrap(), Some(x.clone()));
            prop_assert!(t.domain_interval(i).contains(&x));
        }
    }

    #[test]
    fn induction_is_first_return(t in iet_strategy(7), ks in prop::collection::vec(1i64..997, 10)) {
        prop_assume!(t.perm().in_p_star());
        let step = rauzy_step(t.lengths(), t.perm()).unwrap();
        let induced = Iet::new(step.lengths.clone(), step.perm.clone()).unwrap();
        let xi = &step.record.xi;
        prop_assert_eq!(induced.total_length(), xi);
        prop_assert!(xi.cmp_exact(t.total_length()) == Ordering::Less);
        prop_assert_eq!(step.record.matrix().apply(&step.lengths), t.lengths().to_vec());
        for k in ks {
            let x = inner_point(&t.zero(), xi, k, 997);
            let Some(direct) = first_return(&t, &x, xi, 10_000).unwrap() else { continue };
            let Some(s) = induced.step(&x).unwrap() else { continue };
            prop_assert_eq!(&s.value, &direct.point);
            prop_assert_eq!(s.flipped, direct.reversed);
        }
    }

    #[test]
    fn matrices_are_unimodular(p in perm_strategy(8)) {
        prop_assume!(p.in_p_star());
        for kind in [iet_core::StepKind::A, iet_core::StepKind::B] {
            let m = iet_core::rauzy_matrix(&p, kind).unwrap();
            prop_assert_eq!(m.det().abs(), BigInt::from(1));
        }
    }

    #[test]
    fn norms_decrease_and_cone_is_stable(
        p in flip_irreducible_strategy(7),
        seed in any::<u64>(),
        other in any::<u64>(),
    ) {
        prop_assume!(p.in_p_star());
        let lambda = lengths(p.len(), seed);
        let (_, traj) = match finite_expansion(&lambda, &p, 200) {
            Ok(v) => v,
            Err(RauzyError::CapExceeded { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let mut prev = sum(lambda[0].basis(), &lambda);
        for r in &traj.records {
            prop_assert!(r.xi.cmp_exact(&prev) == Ordering::Less);
            prev = r.xi.clone();
        }
        let m = traj.cumulative_matrix();
        prop_assert_eq!(m.apply(&traj.final_lengths), lambda.clone());
        prop_assert_eq!(m.solve(&lambda).unwrap(), traj.final_lengths.clone());
        // any other point of the cone follows the same word
        let mu = lengths(p.len(), other);
        let moved = m.apply(&mu);
        let replay = follow_word(&moved, &p, &traj.word()).unwrap().unwrap();
        prop_assert_eq!(replay.final_lengths, mu);
        prop_assert_eq!(replay.final_perm, traj.final_perm);
    }

    #[test]
    fn classification_invariants(p in flip_irreducible_strategy(6), seed in any::<u64>()) {
        let lambda = lengths(p.len(), seed);
        let caps = Caps::default();
        let Ok(report) = classify(&lambda, &p, &caps) else { return Ok(()) };
        let n = p.len();
        prop_assert!(report.n_per + 2 * report.n_min <= n);
        prop_assert!(report.flipped_count() >= 1);
        if report.n_min == 0 {
            prop_assert_eq!(report.n_per, n);
        }
        // induction preserves the component structure
        if !p.in_p_star() {
            return Ok(());
        }
        let step = rauzy_step(&lambda, &p).unwrap();
        let induced = Iet::new(step.lengths, step.perm).unwrap();
        if let Ok(other) = classify_iet(&induced, &caps) {
            prop_assert_eq!((other.n_per, other.n_min), (report.n_per, report.n_min));
            prop_assert_eq!(other.flipped_count(), report.flipped_count());
        }
    }
}
