//! Decomposition into invariant blocks and classification of the invariant
//! components of an IET with flips.
//!
//! Irreducible blocks with flips are induced until they split; oriented
//! irreducible blocks are minimal once the Keane condition has been checked
//! to the configured depth; single intervals are periodic. Components of an
//! induced map are carried back to the original interval along the towers
//! of the first return map.

use std::cmp::Ordering;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::iet::{Iet, IetError, Interval, Location};
use crate::lattice::{Coords, Lattice};
use crate::orbits::has_nontrivial_connection;
use crate::perm::SignedPermutation;
use crate::rauzy::{finite_expansion, word_string, RauzyError, RauzyStepRecord, RauzyTrajectory};
use crate::scalar::{rationally_independent, Scalar};

pub fn is_irreducible(p: &SignedPermutation) -> bool {
    p.is_irreducible()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub perm: SignedPermutation,
    /// `d_j`, the number of intervals before the block.
    pub offset: usize,
}

impl Block {
    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
}

/// Splits `q` at every invariant prefix; each block is irreducible.
pub fn decompose(q: &SignedPermutation) -> BlockDecomposition {
    let n = q.len();
    let mut cuts: Vec<usize> = vec![0];
    cuts.extend(q.invariant_prefixes());
    cuts.push(n);
    let blocks = cuts
        .windows(2)
        .map(|w| {
            let d = w[0] as i64;
            let entries = q.entries()[w[0]..w[1]].iter().map(|&v| v.signum() * (v.abs() - d)).collect();
            Block { perm: SignedPermutation::new(entries).expect("invariant prefixes give blocks"), offset: w[0] }
        })
        .collect();
    BlockDecomposition { blocks }
}

pub fn recombine(decomposition: &BlockDecomposition) -> SignedPermutation {
    let entries = decomposition
        .blocks
        .iter()
        .flat_map(|b| {
            let d = b.offset as i64;
            b.perm.entries().iter().map(move |&v| v.signum() * (v.abs() + d))
        })
        .collect();
    SignedPermutation::new(entries).expect("blocks tile 1..=n")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Maximum Rauzy steps per expansion; also the Keane scan depth.
    pub rauzy_cap: usize,
    /// Maximum nesting of expansions.
    pub recursion_cap: usize,
    /// Maximum number of intervals produced when pulling the components of
    /// one induced map back along its towers.
    pub support_cap: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { rauzy_cap: 2000, recursion_cap: 32, support_cap: 500_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Iet(#[from] IetError),
    #[error(transparent)]
    Rauzy(#[from] RauzyError),
    #[error("more than {cap} nested expansions")]
    RecursionCapExceeded { cap: usize },
    #[error("oriented block {perm} fails the Keane check: {reason}")]
    DegenerateBlock { perm: SignedPermutation, reason: String },
    #[error("components need more than {cap} intervals")]
    SupportCapExceeded { cap: usize },
    #[error("lattice coordinates overflow")]
    CoordinateOverflow,
    #[error("component bound violated: n_per={n_per} n_min={n_min} n={n}")]
    BoundViolated { n_per: usize, n_min: usize, n: usize },
}

impl ClassifyError {
    pub fn is_tie(&self) -> bool {
        matches!(self, ClassifyError::Rauzy(RauzyError::TieEncountered { .. }))
    }

    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            ClassifyError::Rauzy(RauzyError::CapExceeded { .. })
                | ClassifyError::RecursionCapExceeded { .. }
                | ClassifyError::SupportCapExceeded { .. }
                | ClassifyError::CoordinateOverflow
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Periodic,
    Minimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub kind: ComponentKind,
    /// Sorted, with touching intervals merged.
    pub support: Vec<Interval>,
    /// Period of a generic point (periodic only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    /// Number of intervals `J, T(J), …` in the cycle (periodic only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flipped: Option<bool>,
    pub witness: Scalar,
    /// The cycle in orbit order (periodic only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cycle: Vec<Interval>,
}

impl Component {
    pub fn measure(&self) -> Scalar {
        let mut acc = Scalar::zero(self.witness.basis());
        for iv in &self.support {
            acc = acc + iv.length();
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentReport {
    pub n: usize,
    pub n_per: usize,
    pub n_min: usize,
    pub components: Vec<Component>,
    /// Every expansion run, in the order performed.
    pub provenance: Vec<RauzyTrajectory>,
}

impl ComponentReport {
    pub fn summary(&self) -> String {
        format!("n_per={} n_min={} bound={}", self.n_per, self.n_min, self.n)
    }

    /// Sorted periods of the periodic components.
    pub fn periods(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.components.iter().filter_map(|c| c.period).collect();
        v.sort_unstable();
        v
    }

    pub fn flipped_count(&self) -> usize {
        self.components.iter().filter(|c| c.flipped == Some(true)).count()
    }

    pub fn periodic(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.kind == ComponentKind::Periodic)
    }

    pub fn minimal(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.kind == ComponentKind::Minimal)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Step<'a> {
            #[serde(flatten)]
            record: &'a RauzyStepRecord,
        }
        let provenance: Vec<serde_json::Value> = self
            .provenance
            .iter()
            .map(|t| {
                let matrix: Vec<Vec<serde_json::Value>> = t
                    .cumulative_matrix()
                    .rows()
                    .into_iter()
                    .map(|row| row.into_iter().map(bigint_json).collect())
                    .collect();
                serde_json::json!({
                    "initial_perm": t.initial_perm,
                    "final_perm": t.final_perm,
                    "word": word_string(&t.word()),
                    "final_lengths": t.final_lengths,
                    "matrix": matrix,
                    "steps": t.records.iter().map(|r| Step { record: r }).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "n": self.n,
            "n_per": self.n_per,
            "n_min": self.n_min,
            "summary": self.summary(),
            "components": self.components,
            "provenance": provenance,
        })
    }
}

fn bigint_json(v: num_bigint::BigInt) -> serde_json::Value {
    match i64::try_from(&v) {
        Ok(x) => serde_json::Value::from(x),
        Err(_) => serde_json::Value::from(v.to_string()),
    }
}

pub fn check_component_bound(report: &ComponentReport, n: usize) -> bool {
    report.n_per + 2 * report.n_min <= n
}

fn third_point(iv: &Interval) -> Scalar {
    &iv.lo + &iv.length().scale(&BigRational::new(1.into(), 3.into()))
}

/// `(lo, hi)` in the lattice coordinates of one recursion level.
type Span = (Coords, Coords);

/// A component in the coordinates of one recursion level.
enum Found {
    Periodic { cycle: Vec<Span>, reversing: bool },
    Minimal { support: Vec<Span> },
}

impl Found {
    fn map_spans(self, mut f: impl FnMut(Span) -> Result<Span, ClassifyError>) -> Result<Found, ClassifyError> {
        Ok(match self {
            Found::Periodic { cycle, reversing } => {
                Found::Periodic { cycle: cycle.into_iter().map(&mut f).collect::<Result<_, _>>()?, reversing }
            }
            Found::Minimal { support } => {
                Found::Minimal { support: support.into_iter().map(f).collect::<Result<_, _>>()? }
            }
        })
    }
}

pub fn classify(lengths: &[Scalar], p: &SignedPermutation, caps: &Caps) -> Result<ComponentReport, ClassifyError> {
    classify_iet(&Iet::new(lengths.to_vec(), p.clone())?, caps)
}

pub fn classify_iet(t: &Iet, caps: &Caps) -> Result<ComponentReport, ClassifyError> {
    let mut provenance = Vec::new();
    let found = classify_level(t, caps, 0, &mut provenance)?;
    let lat = Lattice::new(t);
    let to_intervals = |spans: &[Span]| spans.iter().map(|(lo, hi)| lat.interval(lo, hi)).collect::<Vec<_>>();
    let mut components: Vec<Component> = found
        .into_iter()
        .map(|f| match f {
            Found::Periodic { cycle, reversing } => {
                let len = cycle.len();
                let support = to_intervals(&merge_spans(&lat, cycle.clone()));
                let cycle = to_intervals(&cycle);
                Component {
                    kind: ComponentKind::Periodic,
                    witness: third_point(&cycle[0]),
                    support,
                    period: Some(if reversing { 2 * len } else { len }),
                    cycle_length: Some(len),
                    flipped: Some(reversing),
                    cycle,
                }
            }
            Found::Minimal { support } => {
                let support = to_intervals(&support);
                Component {
                    kind: ComponentKind::Minimal,
                    witness: third_point(&support[0]),
                    support,
                    period: None,
                    cycle_length: None,
                    flipped: None,
                    cycle: Vec::new(),
                }
            }
        })
        .collect();
    components.sort_by(|a, b| a.support[0].lo.cmp_exact(&b.support[0].lo));
    let n_per = components.iter().filter(|c| c.kind == ComponentKind::Periodic).count();
    let n_min = components.len() - n_per;
    let report = ComponentReport { n: t.n(), n_per, n_min, components, provenance };
    if !check_component_bound(&report, t.n()) {
        return Err(ClassifyError::BoundViolated { n_per, n_min, n: t.n() });
    }
    Ok(report)
}

fn unit_prefix(n: usize, k: usize) -> Coords {
    (0..=n).map(|i| i64::from(i < k)).collect()
}

fn classify_level(
    t: &Iet,
    caps: &Caps,
    depth: usize,
    provenance: &mut Vec<RauzyTrajectory>,
) -> Result<Vec<Found>, ClassifyError> {
    let p = t.perm();
    let n = p.len();
    if !p.is_irreducible() {
        let mut out = Vec::new();
        for block in decompose(p).blocks {
            let (offset, m) = (block.offset, block.len());
            let sub = t.sub_block(offset, block.perm)?;
            // child coordinates sit at `offset..offset+m`, shifted by the
            // breakpoint `λ_1 + … + λ_offset`
            let embed = |c: &[i64]| -> Coords {
                let mut out = unit_prefix(n, offset);
                out[offset..offset + m].copy_from_slice(&c[..m]);
                out[n] = c[m];
                out
            };
            for f in classify_level(&sub, caps, depth, provenance)? {
                out.push(f.map_spans(|(lo, hi)| Ok((embed(&lo), embed(&hi))))?);
            }
        }
        return Ok(out);
    }
    if n == 1 {
        return Ok(vec![Found::Periodic {
            cycle: vec![(unit_prefix(1, 0), unit_prefix(1, 1))],
            reversing: p.is_flipped(0),
        }]);
    }
    if !p.has_flips() {
        if t.lengths().iter().all(Scalar::is_rational) {
            return Err(ClassifyError::DegenerateBlock { perm: p.clone(), reason: "all lengths are rational".into() });
        }
        // independent lengths satisfy the Keane condition outright
        let independent = rationally_independent(t.lengths()).map_err(IetError::from)?;
        if !independent && has_nontrivial_connection(&Lattice::new(t), caps.rauzy_cap) {
            return Err(ClassifyError::DegenerateBlock {
                perm: p.clone(),
                reason: format!("saddle connection within {} steps", caps.rauzy_cap),
            });
        }
        return Ok(vec![Found::Minimal { support: vec![(unit_prefix(n, 0), unit_prefix(n, n))] }]);
    }
    if depth >= caps.recursion_cap {
        return Err(ClassifyError::RecursionCapExceeded { cap: caps.recursion_cap });
    }
    let (_, trajectory) = finite_expansion(t.lengths(), p, caps.rauzy_cap)?;
    let induced = trajectory.final_iet()?;
    // λ = M·λ', so λ' = M⁻¹·λ has integer coordinates over λ
    let inverse = trajectory.cumulative_matrix().inverse().ok_or(ClassifyError::CoordinateOverflow)?;
    let rows: Vec<Vec<i64>> = inverse
        .rows()
        .into_iter()
        .map(|row| row.iter().map(i64::try_from).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()
        .map_err(|_| ClassifyError::CoordinateOverflow)?;
    provenance.push(trajectory);
    let inner = classify_level(&induced, caps, depth + 1, provenance)?;
    let lat = Lattice::new(t);
    let inner_lat = Lattice::new(&induced);
    let lift = |c: &[i64]| -> Result<Coords, ClassifyError> {
        let mut out = vec![0i64; n + 1];
        for (j, row) in rows.iter().enumerate() {
            if c[j] == 0 {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(row) {
                *o = r.checked_mul(c[j]).and_then(|v| o.checked_add(v)).ok_or(ClassifyError::CoordinateOverflow)?;
            }
        }
        out[n] = c[n];
        Ok(out.into())
    };
    let xi = lift(&unit_prefix(n, n))?;
    let cuts = &inner_lat.breakpoints()[1..n];
    let mut budget = Budget { left: caps.support_cap, cap: caps.support_cap };
    inner
        .into_iter()
        .map(|f| match f {
            Found::Periodic { cycle, reversing } => {
                let mut full = Vec::new();
                for (lo, hi) in &cycle {
                    full.extend(tower(&lat, (lift(lo)?, lift(hi)?), &xi, &mut budget)?);
                }
                Ok(Found::Periodic { cycle: full, reversing })
            }
            Found::Minimal { support } => {
                let mut pieces = Vec::new();
                for (lo, hi) in split_at(&inner_lat, support, cuts) {
                    pieces.extend(tower(&lat, (lift(&lo)?, lift(&hi)?), &xi, &mut budget)?);
                }
                Ok(Found::Minimal { support: merge_spans(&lat, pieces) })
            }
        })
        .collect()
}

struct Budget {
    left: usize,
    cap: usize,
}

impl Budget {
    fn charge(&mut self) -> Result<(), ClassifyError> {
        self.left = self.left.checked_sub(1).ok_or(ClassifyError::SupportCapExceeded { cap: self.cap })?;
        Ok(())
    }
}

/// `J, T(J), …, T^{r-1}(J)` for `J ⊂ (0, ξ)` inside one continuity interval
/// of the first return map to `(0, ξ)`. Each level is charged to `budget`.
fn tower(lat: &Lattice, base: Span, xi: &[i64], budget: &mut Budget) -> Result<Vec<Span>, ClassifyError> {
    let perm = lat.iet().perm();
    let mut levels = vec![base];
    loop {
        budget.charge()?;
        let (lo, hi) = levels.last().expect("non-empty");
        let (Location::Breakpoint(i) | Location::Interior(i)) = lat.locate(lo);
        let (a, b) = (lat.map_on(i, lo), lat.map_on(i, hi));
        let image = if perm.is_flipped(i) { (b, a) } else { (a, b) };
        if lat.cmp(&image.0, xi) == Ordering::Less {
            return Ok(levels);
        }
        levels.push(image);
    }
}

fn split_at(lat: &Lattice, support: Vec<Span>, cuts: &[Coords]) -> Vec<Span> {
    let mut out = Vec::new();
    for (mut lo, hi) in support {
        for c in cuts {
            if lat.cmp(&lo, c) == Ordering::Less && lat.cmp(c, &hi) == Ordering::Less {
                out.push((lo, c.clone()));
                lo = c.clone();
            }
        }
        out.push((lo, hi));
    }
    out
}

/// Sorted, with touching spans joined.
fn merge_spans(lat: &Lattice, mut spans: Vec<Span>) -> Vec<Span> {
    spans.sort_by(|a, b| lat.cmp(&a.0, &b.0));
    let mut out: Vec<Span> = Vec::with_capacity(spans.len());
    for (lo, hi) in spans {
        match out.last_mut() {
            Some(last) if lat.cmp(&last.1, &lo) == Ordering::Equal => last.1 = hi,
            _ => out.push((lo, hi)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Basis;

    fn sp(v: &[i64]) -> SignedPermutation {
        SignedPermutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn decompositions() {
        let d = decompose(&sp(&[-1, -2]));
        assert_eq!(d.blocks.iter().map(|b| b.perm.clone()).collect::<Vec<_>>(), vec![sp(&[-1]), sp(&[-1])]);
        let q = sp(&[2, 1, 4, 3, -5, -6, -7]);
        let d = decompose(&q);
        assert_eq!(
            d.blocks.iter().map(|b| b.perm.clone()).collect::<Vec<_>>(),
            vec![sp(&[2, 1]), sp(&[2, 1]), sp(&[-1]), sp(&[-1]), sp(&[-1])]
        );
        assert_eq!(d.blocks.iter().map(|b| b.offset).collect::<Vec<_>>(), vec![0, 2, 4, 5, 6]);
        assert_eq!(recombine(&d), q);
        let p = sp(&[-7, 6, 5, -3, -4, -1, -2]);
        assert_eq!(decompose(&p).blocks.len(), 1);
        assert!(!is_irreducible(&sp(&[1, -2])));
    }

    #[test]
    fn flipped_pair() {
        let basis = Basis::new(vec![2]).unwrap();
        let r2 = Scalar::basis_element(&basis, &[2]).unwrap();
        let one = Scalar::from_integer(&basis, 1);
        let report = classify(&[r2.clone(), one.clone()], &sp(&[-2, 1]), &Caps::default()).unwrap();
        assert_eq!(report.summary(), "n_per=2 n_min=0 bound=2");
        assert_eq!(report.periods(), vec![2, 4]);
        assert_eq!(report.flipped_count(), 2);
        // (0,1) ∪ (√2, 1+√2) is one cycle of two intervals, (1, √2) is reflected
        let c = &r2 + &one;
        assert_eq!(
            report.components[0].support,
            vec![Interval::new(&one - &one, one.clone()), Interval::new(r2.clone(), c)]
        );
        assert_eq!(report.components[1].support, vec![Interval::new(one.clone(), r2.clone())]);
    }

    #[test]
    fn oriented_rotation() {
        let basis = Basis::new(vec![2]).unwrap();
        let r2 = Scalar::basis_element(&basis, &[2]).unwrap();
        let one = Scalar::from_integer(&basis, 1);
        let report = classify(&[one.clone(), r2.clone()], &sp(&[2, 1]), &Caps::default()).unwrap();
        assert_eq!(report.summary(), "n_per=0 n_min=1 bound=2");
        let err = classify(&[one.clone(), one.clone()], &sp(&[2, 1]), &Caps::default()).unwrap_err();
        assert!(matches!(err, ClassifyError::DegenerateBlock { .. }));
        // irrational but commensurable: every orbit is periodic
        let twice = &r2 + &r2;
        let err = classify(&[r2.clone(), twice], &sp(&[2, 1]), &Caps::default()).unwrap_err();
        assert!(matches!(err, ClassifyError::DegenerateBlock { .. }));
        let err = classify(&[one.clone(), one], &sp(&[-2, 1]), &Caps::default()).unwrap_err();
        assert!(err.is_tie());
    }

    #[test]
    fn bound_check() {
        let report = |n_per, n_min, n| ComponentReport { n, n_per, n_min, components: vec![], provenance: vec![] };
        assert!(check_component_bound(&report(3, 2, 7), 7));
        assert!(check_component_bound(&report(5, 0, 5), 5));
        assert!(!check_component_bound(&report(1, 2, 4), 4));
    }
}
