//! Interval exchange transformations with flips, evaluated exactly.
//!
//! `T = T_(λ,p)` acts on `(0, c)` with `c = ‖λ‖`. Interval `i` occupies
//! `(x_{i-1}, x_i)` and is sent to image slot `π(i)`; on a flipped interval
//! the image is reversed. With `y_j` the cumulative image lengths,
//!
//! ```text
//! θ_i = +1:  T(x) = y_{π(i)-1} + (x - x_{i-1})
//! θ_i = -1:  T(x) = y_{π(i)}   - (x - x_{i-1})
//! ```

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::SignedPermutation;
use crate::scalar::{Basis, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IetError {
    #[error("{lengths} lengths given for a permutation of {perm} symbols")]
    DimensionMismatch { lengths: usize, perm: usize },
    #[error("length λ_{index} is not positive", index = .0 + 1)]
    NonPositiveLength(usize),
    #[error("point {0} lies outside the domain")]
    OutOfRange(String),
    #[error("interval does not lie inside a single continuity interval")]
    NotContinuous,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// An open interval `(lo, hi)` with exact endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Interval {
        debug_assert!(lo.cmp_exact(&hi) == Ordering::Less, "empty interval ({lo}, {hi})");
        Interval { lo, hi }
    }

    pub fn length(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Scalar {
        (&self.lo + &self.hi).half()
    }

    /// Strict containment `lo < x < hi`.
    pub fn contains(&self, x: &Scalar) -> bool {
        self.lo.cmp_exact(x) == Ordering::Less && x.cmp_exact(&self.hi) == Ordering::Less
    }

    /// Containment of the closure of `other` in the closure of `self`.
    pub fn covers(&self, other: &Interval) -> bool {
        self.lo.cmp_exact(&other.lo) != Ordering::Greater && other.hi.cmp_exact(&self.hi) != Ordering::Greater
    }

    pub fn shifted(&self, offset: &Scalar) -> Interval {
        Interval { lo: &self.lo + offset, hi: &self.hi + offset }
    }
}

impl std::fmt::Debug for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (&self.lo, &self.hi).serialize(serializer)
    }
}

/// Sorts intervals by left endpoint and fuses those whose closures touch.
pub fn merge_touching(mut intervals: Vec<Interval>) -> Vec<Interval> {
    sort_intervals(&mut intervals);
    let mut out: Vec<Interval> = Vec::with_capacity(intervals.len());
    for iv in intervals {
        match out.last_mut() {
            Some(last) if iv.lo.cmp_exact(&last.hi) != Ordering::Greater => {
                if iv.hi.cmp_exact(&last.hi) == Ordering::Greater {
                    last.hi = iv.hi;
                }
            }
            _ => out.push(iv),
        }
    }
    out
}

pub fn sort_intervals(intervals: &mut [Interval]) {
    intervals.sort_by(|a, b| a.lo.cmp_exact(&b.lo).then_with(|| a.hi.cmp_exact(&b.hi)));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// Where a point sits relative to a partition `0 = z_0 < … < z_n = c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// Strictly inside the `i`-th open piece (0-based).
    Interior(usize),
    /// Equal to the partition point `z_j`, `0 ≤ j ≤ n`.
    Breakpoint(usize),
}

/// Approach direction of a one-sided limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    /// `x → x_j⁻`
    #[serde(rename = "-")]
    Left,
    /// `x → x_j⁺`
    #[serde(rename = "+")]
    Right,
}

/// `w_j^±`, the one-sided limit of `T` at the breakpoint `x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneSidedLimitPoint {
    pub index: usize,
    pub side: Side,
    pub value: Scalar,
}

/// One forward application of `T` with the branch that was used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub value: Scalar,
    pub interval: usize,
    pub flipped: bool,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Iet {
    basis: Arc<Basis>,
    lengths: Vec<Scalar>,
    perm: SignedPermutation,
    breaks: Vec<Scalar>,
    image_breaks: Vec<Scalar>,
    // T(x) = offset_i + x on oriented intervals, offset_i - x on flipped ones
    offsets: Vec<Scalar>,
}

impl Iet {
    pub fn new(lengths: Vec<Scalar>, perm: SignedPermutation) -> Result<Iet, IetError> {
        let n = perm.len();
        if lengths.len() != n {
            return Err(IetError::DimensionMismatch { lengths: lengths.len(), perm: n });
        }
        let basis = lengths[0].basis().clone();
        for (i, l) in lengths.iter().enumerate() {
            if !l.same_basis(&lengths[0]) {
                return Err(ScalarError::BasisMismatch.into());
            }
            if !l.is_positive() {
                return Err(IetError::NonPositiveLength(i));
            }
        }
        let mut breaks = Vec::with_capacity(n + 1);
        breaks.push(Scalar::zero(&basis));
        for l in &lengths {
            let next = breaks.last().unwrap() + l;
            breaks.push(next);
        }
        let mut image_breaks = Vec::with_capacity(n + 1);
        image_breaks.push(Scalar::zero(&basis));
        for slot in 0..n {
            let next = image_breaks.last().unwrap() + &lengths[perm.interval_at_slot(slot)];
            image_breaks.push(next);
        }
        let offsets = (0..n)
            .map(|i| {
                let s = perm.slot(i);
                if perm.is_flipped(i) {
                    &image_breaks[s + 1] + &breaks[i]
                } else {
                    &image_breaks[s] - &breaks[i]
                }
            })
            .collect();
        Ok(Iet { basis, lengths, perm, breaks, image_breaks, offsets })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn lengths(&self) -> &[Scalar] {
        &self.lengths
    }

    pub fn perm(&self) -> &SignedPermutation {
        &self.perm
    }

    /// `c = ‖λ‖`.
    pub fn total_length(&self) -> &Scalar {
        &self.breaks[self.n()]
    }

    /// `x_0, …, x_n`.
    pub fn breakpoints(&self) -> &[Scalar] {
        &self.breaks
    }

    /// Interior singular points `x_1, …, x_{n-1}`.
    pub fn singular_points(&self) -> &[Scalar] {
        &self.breaks[1..self.n()]
    }

    /// `y_0, …, y_n`, the partition of the image.
    pub fn image_breakpoints(&self) -> &[Scalar] {
        &self.image_breaks
    }

    pub fn domain_interval(&self, i: usize) -> Interval {
        Interval::new(self.breaks[i].clone(), self.breaks[i + 1].clone())
    }

    pub fn domain(&self) -> Interval {
        Interval::new(Scalar::zero(&self.basis), self.total_length().clone())
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero(&self.basis)
    }

    /// Locates `x ∈ [0, c]` in the domain partition.
    pub fn locate(&self, x: &Scalar) -> Result<Location, IetError> {
        locate_in(&self.breaks, x)
    }

    /// Locates `y ∈ [0, c]` in the image partition.
    pub fn locate_image(&self, y: &Scalar) -> Result<Location, IetError> {
        locate_in(&self.image_breaks, y)
    }

    /// The affine branch of interval `i`, valid on its closure.
    pub fn map_on(&self, i: usize, x: &Scalar) -> Scalar {
        if self.perm.is_flipped(i) {
            &self.offsets[i] - x
        } else {
            &self.offsets[i] + x
        }
    }

    /// Inverse branch for image slot `slot`, valid on its closure.
    pub fn unmap_on_slot(&self, slot: usize, y: &Scalar) -> Scalar {
        let i = self.perm.interval_at_slot(slot);
        if self.perm.is_flipped(i) {
            &self.offsets[i] - y
        } else {
            y - &self.offsets[i]
        }
    }

    /// Forward step with branch information; `None` on a breakpoint.
    pub fn step(&self, x: &Scalar) -> Result<Option<Step>, IetError> {
        match self.locate(x)? {
            Location::Breakpoint(_) => Ok(None),
            Location::Interior(i) => {
                Ok(Some(Step { value: self.map_on(i, x), interval: i, flipped: self.perm.is_flipped(i) }))
            }
        }
    }

    /// Backward step; `None` on an image breakpoint.
    pub fn step_back(&self, y: &Scalar) -> Result<Option<Step>, IetError> {
        match self.locate_image(y)? {
            Location::Breakpoint(_) => Ok(None),
            Location::Interior(s) => {
                let i = self.perm.interval_at_slot(s);
                Ok(Some(Step { value: self.unmap_on_slot(s, y), interval: i, flipped: self.perm.is_flipped(i) }))
            }
        }
    }

    /// `T(x)` or `T⁻¹(x)`; `Ok(None)` exactly on the breakpoints of the
    /// requested direction.
    pub fn evaluate(&self, x: &Scalar, direction: Direction) -> Result<Option<Scalar>, IetError> {
        let step = match direction {
            Direction::Forward => self.step(x)?,
            Direction::Backward => self.step_back(x)?,
        };
        Ok(step.map(|s| s.value))
    }

    /// `w_j^±`. `None` for `w_0^-` and `w_n^+`, which do not exist.
    pub fn one_sided_limit(&self, index: usize, side: Side) -> Option<OneSidedLimitPoint> {
        let n = self.n();
        let interval = match side {
            Side::Right if index < n => index,
            Side::Left if index >= 1 && index <= n => index - 1,
            _ => return None,
        };
        Some(OneSidedLimitPoint { index, side, value: self.map_on(interval, &self.breaks[index]) })
    }

    /// The `2n` one-sided starts `w_0^+, w_1^±, …, w_{n-1}^±, w_n^-`.
    pub fn one_sided_limits(&self) -> Vec<OneSidedLimitPoint> {
        let mut out = Vec::with_capacity(2 * self.n());
        for j in 0..=self.n() {
            for side in [Side::Left, Side::Right] {
                if let Some(w) = self.one_sided_limit(j, side) {
                    out.push(w);
                }
            }
        }
        out
    }

    /// Fixed points of `T` inside flipped intervals, as `(interval, x*)`
    /// with 0-based interval indices.
    pub fn flipped_fixed_points(&self) -> Vec<(usize, Scalar)> {
        (0..self.n())
            .filter(|&i| self.perm.is_flipped(i))
            .filter_map(|i| {
                let fixed = self.offsets[i].half();
                self.domain_interval(i).contains(&fixed).then_some((i, fixed))
            })
            .collect()
    }

    /// Image of an open interval lying inside one domain interval, with the
    /// orientation of the branch (`true` when reversed).
    pub fn image_of_interval(&self, iv: &Interval) -> Result<(Interval, bool), IetError> {
        let i = match self.locate(&iv.midpoint())? {
            Location::Interior(i) => i,
            Location::Breakpoint(_) => return Err(IetError::NotContinuous),
        };
        if !self.domain_interval(i).covers(iv) {
            return Err(IetError::NotContinuous);
        }
        let a = self.map_on(i, &iv.lo);
        let b = self.map_on(i, &iv.hi);
        Ok(if self.perm.is_flipped(i) { (Interval::new(b, a), true) } else { (Interval::new(a, b), false) })
    }

    /// Restriction to the intervals `start..start+len`, translated to begin
    /// at `0`. Only meaningful when that block is invariant.
    pub fn sub_block(&self, start: usize, perm: SignedPermutation) -> Result<Iet, IetError> {
        let len = perm.len();
        Iet::new(self.lengths[start..start + len].to_vec(), perm)
    }
}

impl std::fmt::Debug for Iet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Iet").field("lengths", &self.lengths).field("perm", &self.perm).finish()
    }
}

fn locate_in(points: &[Scalar], x: &Scalar) -> Result<Location, IetError> {
    let n = points.len() - 1;
    if x.cmp_exact(&points[0]) == Ordering::Less || x.cmp_exact(&points[n]) == Ordering::Greater {
        return Err(IetError::OutOfRange(x.to_string()));
    }
    // number of partition points ≤ x, at least 1
    let k = points.partition_point(|p| p.cmp_exact(x) != Ordering::Greater);
    let i = k - 1;
    if points[i] == *x {
        Ok(Location::Breakpoint(i))
    } else {
        Ok(Location::Interior(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis() -> Arc<Basis> {
        Basis::new(vec![2]).unwrap()
    }

    fn int(v: i64) -> Scalar {
        Scalar::from_integer(&basis(), v)
    }

    fn rat(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(&basis(), n, d)
    }

    fn sqrt2() -> Scalar {
        Scalar::basis_element(&basis(), &[2]).unwrap()
    }

    fn iet(lengths: Vec<Scalar>, p: &[i64]) -> Iet {
        Iet::new(lengths, SignedPermutation::new(p.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn single_flip() {
        let t = iet(vec![int(1)], &[-1]);
        assert_eq!(t.evaluate(&rat(1, 2), Direction::Forward).unwrap(), Some(rat(1, 2)));
        assert_eq!(t.evaluate(&rat(1, 3), Direction::Forward).unwrap(), Some(rat(2, 3)));
        assert_eq!(t.flipped_fixed_points(), vec![(0, rat(1, 2))]);
        assert_eq!(t.evaluate(&int(0), Direction::Forward).unwrap(), None);
    }

    #[test]
    fn swap() {
        let t = iet(vec![int(1), int(1)], &[2, 1]);
        assert_eq!(t.evaluate(&rat(1, 2), Direction::Forward).unwrap(), Some(rat(3, 2)));
        assert_eq!(t.evaluate(&rat(3, 2), Direction::Forward).unwrap(), Some(rat(1, 2)));
        assert_eq!(t.evaluate(&int(1), Direction::Forward).unwrap(), None);
        assert!(t.flipped_fixed_points().is_empty());
    }

    #[test]
    fn flipped_irrational_pair() {
        // λ = (√2, 1), p = (-2, 1): T(x) = 1 + √2 - x on (0, √2), x - √2 on (√2, 1 + √2)
        let t = iet(vec![sqrt2(), int(1)], &[-2, 1]);
        let c = &int(1) + &sqrt2();
        assert_eq!(t.total_length(), &c);
        assert_eq!(t.image_breakpoints()[1], int(1));
        assert_eq!(t.evaluate(&int(1), Direction::Forward).unwrap(), Some(sqrt2()));
        let x = rat(1, 2);
        assert_eq!(t.evaluate(&x, Direction::Forward).unwrap(), Some(&c - &x));
        let y = &sqrt2() + &rat(1, 2);
        assert_eq!(t.evaluate(&y, Direction::Forward).unwrap(), Some(rat(1, 2)));
        // 1 is an image breakpoint, √2 a domain breakpoint
        assert_eq!(t.evaluate(&int(1), Direction::Backward).unwrap(), None);
        assert_eq!(t.evaluate(&sqrt2(), Direction::Forward).unwrap(), None);
        // endpoints of interval 1 go to the endpoints of slot 2, reversed
        assert_eq!(t.one_sided_limit(0, Side::Right).unwrap().value, c);
        assert_eq!(t.one_sided_limit(1, Side::Left).unwrap().value, int(1));
        assert_eq!(t.one_sided_limit(1, Side::Right).unwrap().value, int(0));
        assert_eq!(t.one_sided_limit(2, Side::Left).unwrap().value, int(1));
        assert_eq!(t.one_sided_limits().len(), 4);
    }

    #[test]
    fn flipped_interval_fixed_point() {
        let t = iet(vec![int(3), int(1)], &[-1, -2]);
        assert_eq!(t.flipped_fixed_points(), vec![(0, rat(3, 2)), (1, rat(7, 2))]);
        assert_eq!(t.evaluate(&rat(3, 2), Direction::Forward).unwrap(), Some(rat(3, 2)));
    }

    #[test]
    fn out_of_range() {
        let t = iet(vec![int(1)], &[-1]);
        assert!(matches!(t.evaluate(&int(2), Direction::Forward), Err(IetError::OutOfRange(_))));
        assert!(matches!(t.evaluate(&int(-1), Direction::Backward), Err(IetError::OutOfRange(_))));
    }

    #[test]
    fn construction_errors() {
        let p = SignedPermutation::new(vec![2, 1]).unwrap();
        assert_eq!(Iet::new(vec![int(1)], p.clone()), Err(IetError::DimensionMismatch { lengths: 1, perm: 2 }));
        assert_eq!(Iet::new(vec![int(1), int(0)], p.clone()), Err(IetError::NonPositiveLength(1)));
        let other = Scalar::from_integer(&Basis::new(vec![3]).unwrap(), 1);
        assert_eq!(Iet::new(vec![int(1), other], p), Err(IetError::Scalar(ScalarError::BasisMismatch)));
    }

    #[test]
    fn interval_images() {
        let t = iet(vec![sqrt2(), int(1)], &[-2, 1]);
        let iv = Interval::new(rat(1, 4), rat(1, 2));
        let (img, flipped) = t.image_of_interval(&iv).unwrap();
        assert!(flipped);
        let c = &int(1) + &sqrt2();
        assert_eq!(img, Interval::new(&c - &rat(1, 2), &c - &rat(1, 4)));
        let straddle = Interval::new(int(1), int(2));
        assert_eq!(t.image_of_interval(&straddle), Err(IetError::NotContinuous));
    }

    #[test]
    fn merging() {
        let v = vec![
            Interval::new(int(2), int(3)),
            Interval::new(int(0), int(1)),
            Interval::new(int(1), int(2)),
            Interval::new(int(4), int(5)),
        ];
        assert_eq!(merge_touching(v), vec![Interval::new(int(0), int(3)), Interval::new(int(4), int(5))]);
    }
}
