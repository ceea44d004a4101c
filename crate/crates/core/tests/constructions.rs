use iet_core::classify::{classify, Caps, ComponentKind};
use iet_core::construct::{construct_theorem_c, is_admissible, ConstructError, ConstructionSpec};
use iet_core::orbits::{periodic_components_oracle, OracleCaps};
use iet_core::rauzy::{finite_expansion, follow_word, StepKind};
use iet_core::{Iet, SignedPermutation};

fn spec(n: usize, k: usize, ell: usize) -> ConstructionSpec {
    ConstructionSpec { n, k, ell, seed: 11 }
}

#[test]
fn seven_interval_example() {
    let c = construct_theorem_c(&spec(7, 3, 2)).unwrap();
    assert_eq!(c.perm, SignedPermutation::new(vec![-7, 6, 5, -3, -4, -1, -2]).unwrap());
    // six b-steps reach the target, but the permutation already splits
    // off the block (2,1) after two
    let traj = follow_word(&c.lengths, &c.perm, &[StepKind::B; 6]).unwrap().unwrap();
    assert_eq!(traj.final_perm, c.target);
    let (ell, traj) = finite_expansion(&c.lengths, &c.perm, 100).unwrap();
    assert_eq!(ell, 2);
    assert_eq!(traj.final_perm, SignedPermutation::new(vec![2, 1, -7, 6, 5, -3, -4]).unwrap());

    let report = classify(&c.lengths, &c.perm, &Caps::default()).unwrap();
    assert_eq!(report.summary(), "n_per=3 n_min=2 bound=7");
    assert_eq!(report.periods(), vec![2, 4, 4]);
    assert_eq!(report.flipped_count(), 3);

    let t = Iet::new(c.lengths.clone(), c.perm.clone()).unwrap();
    let oracle = periodic_components_oracle(&t, OracleCaps::default()).unwrap();
    let mut from_oracle: Vec<_> = oracle.components.iter().map(|p| (p.support.clone(), p.period, p.flipped)).collect();
    let mut from_classify: Vec<_> =
        report.periodic().map(|p| (p.support.clone(), p.period.unwrap(), p.flipped.unwrap())).collect();
    let key = |v: &(Vec<iet_core::Interval>, usize, bool)| v.0[0].lo.to_f64();
    from_oracle.sort_by(|a, b| key(a).total_cmp(&key(b)));
    from_classify.sort_by(|a, b| key(a).total_cmp(&key(b)));
    assert_eq!(from_oracle, from_classify);
    assert_eq!(report.minimal().count(), 2);
    assert!(report.components.iter().all(|c| c.kind == ComponentKind::Periodic || c.period.is_none()));
}

#[test]
fn sweep_up_to_ten() {
    for n in 1..=10 {
        for k in 0..=n {
            for ell in 0..=n {
                let s = spec(n, k, ell);
                match construct_theorem_c(&s) {
                    Ok(c) => {
                        assert!(is_admissible(n, k, ell));
                        assert!(c.perm.is_irreducible() && c.perm.has_flips());
                        let report = classify(&c.lengths, &c.perm, &Caps::default())
                            .unwrap_or_else(|e| panic!("({n},{k},{ell}): {e}"));
                        assert_eq!((report.n_per, report.n_min), (k, ell), "({n},{k},{ell})");
                    }
                    Err(ConstructError::InvalidCounts { .. }) => assert!(!is_admissible(n, k, ell)),
                    Err(e) => panic!("({n},{k},{ell}): {e}"),
                }
            }
        }
    }
}
