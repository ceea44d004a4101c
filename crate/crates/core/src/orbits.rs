//! Orbit simulation: saddle connections, rigid partitions, a brute-force
//! periodic component finder, minimal support estimates and the one-sided
//! support distance `ρ(X, Y) = sup_{y ∈ Y} d(y, X)`.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::iet::{merge_touching, Direction, Iet, IetError, Interval, Location, Side};
use crate::lattice::{Coords, Key, Lattice, Overflow};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error(transparent)]
    Iet(#[from] IetError),
    #[error("orbit of {point} hits the breakpoint x_{index} after {steps} steps")]
    OrbitHalted { point: String, index: usize, steps: usize },
    #[error("support distance needs non-empty unions")]
    EmptyInput,
}

/// A finite orbit segment. When `halted_at` is `Some(j)` the last point is
/// the breakpoint `x_j` (or the image breakpoint `y_j` going backwards).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub points: Vec<Scalar>,
    pub halted_at: Option<usize>,
}

pub fn orbit(t: &Iet, x: &Scalar, steps: usize, direction: Direction) -> Result<Orbit, OrbitError> {
    t.locate(x)?;
    let lat = Lattice::with_generator(t, x.clone());
    let mut c = lat.generator();
    let mut coords = vec![c.clone()];
    let mut halted_at = None;
    for _ in 0..steps {
        let next = match direction {
            Direction::Forward => lat.step(&c),
            Direction::Backward => lat.step_back(&c),
        };
        match next {
            Some((z, _)) => {
                coords.push(z.clone());
                c = z;
            }
            None => {
                let loc = match direction {
                    Direction::Forward => lat.locate(&c),
                    Direction::Backward => lat.locate_image(&c),
                };
                if let Location::Breakpoint(j) = loc {
                    halted_at = Some(j);
                }
                break;
            }
        }
    }
    if halted_at.is_none() {
        let last = coords.last().expect("non-empty");
        let loc = match direction {
            Direction::Forward => lat.locate(last),
            Direction::Backward => lat.locate_image(last),
        };
        if let Location::Breakpoint(j) = loc {
            halted_at = Some(j);
        }
    }
    Ok(Orbit { points: coords.iter().map(|c| lat.to_scalar(c)).collect(), halted_at })
}

/// First return of `x` to `(0, ξ)` under `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstReturn {
    pub point: Scalar,
    pub time: usize,
    /// Whether the composed branch reverses orientation.
    pub reversed: bool,
}

/// Iterates `T` from `x` until the orbit is back in `(0, ξ)`. `Ok(None)`
/// when the orbit hits a breakpoint first or `max_steps` is exhausted.
pub fn first_return(t: &Iet, x: &Scalar, xi: &Scalar, max_steps: usize) -> Result<Option<FirstReturn>, OrbitError> {
    t.locate(x)?;
    let lat = Lattice::with_generator(t, x.clone());
    let mut c = lat.generator();
    let mut reversed = false;
    for time in 1..=max_steps {
        let Some((next, i)) = lat.step(&c) else { return Ok(None) };
        reversed ^= t.perm().is_flipped(i);
        c = next;
        if lat.cmp_scalar(&c, xi) == Ordering::Less {
            return Ok(Some(FirstReturn { point: lat.to_scalar(&c), time, reversed }));
        }
    }
    Ok(None)
}

/// Orbit segment from `x_start` to `x_end` through the one-sided limit on
/// `side`; `length = itinerary.len() - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaddleConnection {
    pub start: usize,
    pub side: Side,
    pub end: usize,
    pub length: usize,
    pub itinerary: Vec<Scalar>,
}

impl SaddleConnection {
    /// Connections ending at `0` or `c`.
    pub fn is_trivial(&self, n: usize) -> bool {
        self.end == 0 || self.end == n
    }
}

pub(crate) struct RawConnection {
    pub start: usize,
    pub side: Side,
    pub end: usize,
    pub points: Vec<Coords>,
}

/// Scans the `2n` one-sided starts for up to `cap` iterates each.
pub(crate) fn scan_connections(lat: &Lattice, cap: usize, keep_points: bool) -> Vec<RawConnection> {
    let n = lat.n();
    let mut out = Vec::new();
    for j in 0..=n {
        for side in [Side::Left, Side::Right] {
            let Some(mut z) = lat.limit(j, side) else { continue };
            let mut points = vec![lat.breakpoint(j).clone()];
            for _ in 0..cap {
                if keep_points {
                    points.push(z.clone());
                }
                match lat.locate(&z) {
                    Location::Breakpoint(r) => {
                        if !keep_points {
                            points.push(z.clone());
                        }
                        out.push(RawConnection { start: j, side, end: r, points });
                        break;
                    }
                    Location::Interior(i) => z = lat.map_on(i, &z),
                }
            }
        }
    }
    out
}

/// Whether any one-sided start reaches an interior breakpoint within `cap`
/// iterates.
pub(crate) fn has_nontrivial_connection(lat: &Lattice, cap: usize) -> bool {
    let n = lat.n();
    scan_connections(lat, cap, false).iter().any(|c| c.end != 0 && c.end != n)
}

pub fn saddle_connections(t: &Iet, cap: usize) -> Vec<SaddleConnection> {
    let lat = Lattice::new(t);
    scan_connections(&lat, cap, true)
        .into_iter()
        .map(|raw| SaddleConnection {
            start: raw.start,
            side: raw.side,
            end: raw.end,
            length: raw.points.len() - 1,
            itinerary: raw.points.iter().map(|c| lat.to_scalar(c)).collect(),
        })
        .collect()
}

/// Cells of the common refinement of `T^{-t}(x_i)`, `0 ≤ t ≤ depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidPartition {
    pub depth: usize,
    pub cells: Vec<Interval>,
}

/// Sorted partition points including `0` and `c`.
fn partition_points(lat: &Lattice, depth: usize) -> Vec<Coords> {
    let n = lat.n();
    let mut points: Vec<Coords> = vec![lat.breakpoint(0).clone(), lat.breakpoint(n).clone()];
    for i in 1..n {
        let mut z = lat.breakpoint(i).clone();
        points.push(z.clone());
        for _ in 0..depth {
            match lat.step_back(&z) {
                Some((w, _)) => {
                    points.push(w.clone());
                    z = w;
                }
                None => break,
            }
        }
    }
    lat.sort_dedup(&mut points);
    points
}

pub fn rigid_partition(t: &Iet, depth: usize) -> RigidPartition {
    let lat = Lattice::new(t);
    let points = partition_points(&lat, depth);
    RigidPartition { depth, cells: points.windows(2).map(|w| lat.interval(&w[0], &w[1])).collect() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicComponent {
    /// Union of the cycle, merged and sorted.
    pub support: Vec<Interval>,
    /// `J, T(J), …` in orbit order.
    pub cycle: Vec<Interval>,
    /// Period of a generic point: the cycle length, doubled when the return
    /// map of the cycle reverses orientation.
    pub period: usize,
    pub cycle_length: usize,
    pub flipped: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub depth: usize,
    pub components: Vec<PeriodicComponent>,
    /// Cells that did not close up into a cycle at the final depth.
    pub unresolved: Vec<Interval>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    pub start_depth: usize,
    pub max_depth: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps { start_depth: 16, max_depth: 16384 }
    }
}

struct CellCycle {
    cells: Vec<usize>,
    reversing: bool,
}

fn cell_cycles(lat: &Lattice, points: &[Coords]) -> (Vec<CellCycle>, Vec<usize>) {
    let cells = points.len() - 1;
    let image: Vec<Option<(usize, bool)>> = (0..cells)
        .map(|k| {
            let i = match lat.locate(&points[k]) {
                Location::Breakpoint(j) => j,
                Location::Interior(i) => i,
            };
            let a = lat.map_on(i, &points[k]);
            let b = lat.map_on(i, &points[k + 1]);
            let flipped = lat.iet().perm().is_flipped(i);
            let (lo, hi) = if flipped { (b, a) } else { (a, b) };
            let idx = lat.find(points, &lo)?;
            (lat.cmp(&points[idx + 1], &hi) == Ordering::Equal).then_some((idx, flipped))
        })
        .collect();
    // 0 = unvisited, 1 = on the current path, 2 = done
    let mut state = vec![0u8; cells];
    let mut cycles = Vec::new();
    for start in 0..cells {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut k = start;
        loop {
            if state[k] != 0 {
                if state[k] == 1 {
                    let pos = path.iter().position(|&c| c == k).expect("on path");
                    let cyc: Vec<usize> = path[pos..].to_vec();
                    let reversing = cyc.iter().fold(false, |acc, &c| acc ^ image[c].expect("cycle").1);
                    cycles.push(CellCycle { cells: cyc, reversing });
                }
                break;
            }
            state[k] = 1;
            path.push(k);
            match image[k] {
                Some((next, _)) => k = next,
                None => break,
            }
        }
        for c in path {
            state[c] = 2;
        }
    }
    let mut on_cycle = vec![false; cells];
    for cyc in &cycles {
        for &c in &cyc.cells {
            on_cycle[c] = true;
        }
    }
    let rest = (0..cells).filter(|&c| !on_cycle[c]).collect();
    (cycles, rest)
}

/// Cell indices grouped into runs of adjacent cells.
fn runs(mut cells: Vec<usize>) -> Vec<(usize, usize)> {
    cells.sort_unstable();
    let mut out: Vec<(usize, usize)> = Vec::new();
    for c in cells {
        match out.last_mut() {
            Some((_, end)) if *end == c => *end = c + 1,
            _ => out.push((c, c + 1)),
        }
    }
    out
}

fn oracle_report(
    lat: &Lattice,
    depth: usize,
    points: &[Coords],
    cycles: Vec<CellCycle>,
    rest: Vec<usize>,
) -> OracleReport {
    let span = |(a, b): (usize, usize)| lat.interval(&points[a], &points[b]);
    let mut components: Vec<PeriodicComponent> = cycles
        .into_iter()
        .map(|cyc| {
            let len = cyc.cells.len();
            PeriodicComponent {
                support: runs(cyc.cells.clone()).into_iter().map(span).collect(),
                cycle: cyc.cells.iter().map(|&k| span((k, k + 1))).collect(),
                period: if cyc.reversing { 2 * len } else { len },
                cycle_length: len,
                flipped: cyc.reversing,
            }
        })
        .collect();
    components.sort_by(|a, b| a.support[0].lo.cmp_exact(&b.support[0].lo));
    OracleReport { depth, components, unresolved: runs(rest).into_iter().map(span).collect() }
}

/// Finds periodic components by following cells of ever deeper rigid
/// partitions. Stops as soon as every cell lies on a closed cycle; cells
/// still open at `max_depth` are reported as unresolved (minimal
/// components, or cycles too long for the depth).
pub fn periodic_components_oracle(t: &Iet, caps: OracleCaps) -> Result<OracleReport, OrbitError> {
    let lat = Lattice::new(t);
    let max_depth = caps.max_depth.max(1);
    let mut depth = caps.start_depth.clamp(1, max_depth);
    loop {
        let points = partition_points(&lat, depth);
        let (cycles, rest) = cell_cycles(&lat, &points);
        if rest.is_empty() || depth >= max_depth {
            return Ok(oracle_report(&lat, depth, &points, cycles, rest));
        }
        depth = (depth * 2).min(max_depth);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportEstimate {
    pub partition_depth: usize,
    pub support: Vec<Interval>,
    /// Fraction of `(0, c)` covered by the cells visited in the first half
    /// of the orbit and in the whole orbit.
    pub coverage_half: f64,
    pub coverage_full: f64,
}

/// Outer approximation of the orbit closure of `x`: the cells of a rigid
/// partition of depth `⌊√N⌋` visited by `N` iterates.
pub fn minimal_support_estimate(t: &Iet, x: &Scalar, steps: usize) -> Result<SupportEstimate, OrbitError> {
    t.locate(x)?;
    let depth = (steps as f64).sqrt().floor().max(1.0) as usize;
    let lat = Lattice::with_generator(t, x.clone());
    let points = partition_points(&lat, depth);
    let cells = points.len() - 1;
    let mut visited = vec![false; cells];
    let mut c = lat.generator();
    let mut half = Vec::new();
    for k in 0..steps.max(1) {
        let idx = points.partition_point(|p| lat.cmp(p, &c) != Ordering::Greater) - 1;
        if lat.cmp(&points[idx], &c) == Ordering::Equal {
            return Err(OrbitError::OrbitHalted { point: x.to_string(), index: idx, steps: k });
        }
        visited[idx.min(cells - 1)] = true;
        if k + 1 == steps / 2 {
            half = visited.clone();
        }
        match lat.step(&c) {
            Some((z, _)) => c = z,
            None => {
                let Location::Breakpoint(j) = lat.locate(&c) else { unreachable!() };
                return Err(OrbitError::OrbitHalted { point: x.to_string(), index: j, steps: k });
            }
        }
    }
    if half.is_empty() {
        half = visited.clone();
    }
    let total = lat.to_f64(lat.breakpoint(lat.n()));
    let coverage = |v: &[bool]| {
        (0..cells).filter(|&k| v[k]).map(|k| lat.to_f64(&points[k + 1]) - lat.to_f64(&points[k])).sum::<f64>() / total
    };
    let support =
        merge_touching((0..cells).filter(|&k| visited[k]).map(|k| lat.interval(&points[k], &points[k + 1])).collect());
    Ok(SupportEstimate {
        partition_depth: depth,
        support,
        coverage_half: coverage(&half),
        coverage_full: coverage(&visited),
    })
}

/// Distance from `y` to the closure of `xs`.
fn distance_to(y: &Scalar, xs: &[Interval]) -> Scalar {
    let mut best: Option<Scalar> = None;
    for iv in xs {
        let d = if y.cmp_exact(&iv.lo) == Ordering::Less {
            &iv.lo - y
        } else if y.cmp_exact(&iv.hi) == Ordering::Greater {
            y - &iv.hi
        } else {
            return Scalar::zero(y.basis());
        };
        best = Some(match best {
            Some(b) => b.min(d),
            None => d,
        });
    }
    best.expect("non-empty")
}

/// `ρ(X, Y) = sup_{y ∈ Y} d(y, X)`, computed exactly.
pub fn support_distance(xs: &[Interval], ys: &[Interval]) -> Result<Scalar, OrbitError> {
    if xs.is_empty() || ys.is_empty() {
        return Err(OrbitError::EmptyInput);
    }
    let xs = merge_touching(xs.to_vec());
    // d(·, X) is piecewise linear; its maximum over each closed piece of Y is
    // at an endpoint of the piece or at the midpoint of a gap of X.
    let mut candidates: Vec<Scalar> = ys.iter().flat_map(|iv| [iv.lo.clone(), iv.hi.clone()]).collect();
    for w in xs.windows(2) {
        let mid = (&w[0].hi + &w[1].lo).half();
        if ys.iter().any(|iv| iv.lo.cmp_exact(&mid) != Ordering::Greater && mid.cmp_exact(&iv.hi) != Ordering::Greater)
        {
            candidates.push(mid);
        }
    }
    Ok(candidates.iter().map(|y| distance_to(y, &xs)).reduce(Scalar::max).expect("non-empty"))
}

/// Checks that every endpoint of the given supports lies on a saddle
/// connection of length at most `max_cap`. Returns the length of the
/// longest connection needed, or the uncovered points.
pub fn boundaries_on_connections(t: &Iet, supports: &[Vec<Interval>], max_cap: usize) -> Result<usize, Vec<Scalar>> {
    let lat = Lattice::new(t);
    let connections = scan_connections(&lat, max_cap.max(1), true);
    // shortest connection through each point
    let mut shortest: HashMap<Key, usize> = HashMap::new();
    let mut exact = true;
    'scan: for raw in &connections {
        let len = raw.points.len() - 1;
        for c in &raw.points {
            match lat.key(c) {
                Ok(k) => {
                    let e = shortest.entry(k).or_insert(len);
                    *e = (*e).min(len);
                }
                Err(Overflow) => {
                    exact = false;
                    break 'scan;
                }
            }
        }
    }
    let needed = |x: &Scalar| -> Option<usize> {
        if exact {
            if let Ok(key) = lat.scalar_key(x) {
                return key.and_then(|k| shortest.get(&k).copied());
            }
        }
        connections
            .iter()
            .filter(|raw| raw.points.iter().any(|c| lat.cmp_scalar(c, x) == Ordering::Equal))
            .map(|raw| raw.points.len() - 1)
            .min()
    };
    let mut longest = 0;
    let mut missing = Vec::new();
    for x in supports.iter().flatten().flat_map(|iv| [&iv.lo, &iv.hi]) {
        match needed(x) {
            Some(len) => longest = longest.max(len),
            None => missing.push(x.clone()),
        }
    }
    if missing.is_empty() {
        Ok(longest)
    } else {
        Err(missing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::SignedPermutation;
    use crate::scalar::Basis;
    use std::sync::Arc;

    fn basis() -> Arc<Basis> {
        Basis::new(vec![2]).unwrap()
    }

    fn rat(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(&basis(), n, d)
    }

    fn r2() -> Scalar {
        Scalar::basis_element(&basis(), &[2]).unwrap()
    }

    fn iet(lengths: Vec<Scalar>, p: &[i64]) -> Iet {
        Iet::new(lengths, SignedPermutation::new(p.to_vec()).unwrap()).unwrap()
    }

    fn iv(a: Scalar, b: Scalar) -> Interval {
        Interval::new(a, b)
    }

    #[test]
    fn flip_orbits() {
        let t = iet(vec![rat(1, 1)], &[-1]);
        let o = orbit(&t, &rat(1, 3), 4, Direction::Forward).unwrap();
        assert_eq!(o.points, vec![rat(1, 3), rat(2, 3), rat(1, 3), rat(2, 3), rat(1, 3)]);
        assert_eq!(o.halted_at, None);
        let o = orbit(&t, &rat(1, 2), 3, Direction::Forward).unwrap();
        assert!(o.points.iter().all(|p| *p == rat(1, 2)));
        let s = saddle_connections(&t, 10);
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|c| c.length == 1 && c.is_trivial(1)));
        let from_zero = s.iter().find(|c| c.start == 0).unwrap();
        assert_eq!((from_zero.end, &from_zero.itinerary), (1, &vec![rat(0, 1), rat(1, 1)]));
        assert_eq!(rigid_partition(&t, 5).cells, vec![iv(rat(0, 1), rat(1, 1))]);
    }

    #[test]
    fn halting_orbit() {
        let t = iet(vec![r2(), rat(1, 1)], &[-2, 1]);
        // T(1/2 + √2) = 1/2, T(1/2) = 1/2 + √2: a 2-cycle
        let start = &rat(1, 2) + &r2();
        let o = orbit(&t, &start, 3, Direction::Forward).unwrap();
        assert_eq!(o.points, vec![start.clone(), rat(1, 2), start.clone(), rat(1, 2)]);
        let o = orbit(&t, &r2(), 3, Direction::Forward).unwrap();
        assert_eq!((o.points.len(), o.halted_at), (1, Some(1)));
    }

    #[test]
    fn partitions() {
        let t = iet(vec![r2(), rat(1, 1)], &[-2, 1]);
        let c = &r2() + &rat(1, 1);
        assert_eq!(rigid_partition(&t, 0).cells, vec![iv(rat(0, 1), r2()), iv(r2(), c.clone())]);
        // T⁻¹(√2) = 1 on the flipped branch
        assert_eq!(rigid_partition(&t, 1).cells, vec![iv(rat(0, 1), rat(1, 1)), iv(rat(1, 1), r2()), iv(r2(), c)]);
    }

    #[test]
    fn oracle_on_small_cases() {
        let t = iet(vec![rat(1, 1)], &[-1]);
        let rep = periodic_components_oracle(&t, OracleCaps::default()).unwrap();
        assert_eq!(rep.components.len(), 1);
        assert_eq!((rep.components[0].period, rep.components[0].flipped), (2, true));

        let t = iet(vec![r2(), rat(1, 1)], &[-2, 1]);
        let rep = periodic_components_oracle(&t, OracleCaps::default()).unwrap();
        assert_eq!(rep.components.len(), 2);
        assert!(rep.components.iter().all(|c| c.flipped));
        assert!(rep.unresolved.is_empty());

        let t = iet(vec![rat(1, 1), r2()], &[2, 1]);
        let rep = periodic_components_oracle(&t, OracleCaps::default()).unwrap();
        assert!(rep.components.is_empty());
        assert_eq!(rep.unresolved, vec![iv(rat(0, 1), &rat(1, 1) + &r2())]);
    }

    #[test]
    fn keane_rotation() {
        let t = iet(vec![rat(1, 1), r2()], &[2, 1]);
        let s = saddle_connections(&t, 50);
        assert!(s.len() >= 2);
        assert!(s.iter().all(|c| c.is_trivial(2)));
        let est = minimal_support_estimate(&t, &rat(1, 3), 400).unwrap();
        assert_eq!(est.support, vec![iv(rat(0, 1), &rat(1, 1) + &r2())]);
        assert!(est.coverage_full > 0.99);
    }

    #[test]
    fn distances() {
        let x = vec![iv(rat(0, 1), rat(1, 1))];
        let y = vec![iv(rat(0, 1), rat(2, 1))];
        assert_eq!(support_distance(&x, &x).unwrap(), rat(0, 1));
        assert_eq!(support_distance(&x, &y).unwrap(), rat(1, 1));
        assert_eq!(support_distance(&y, &x).unwrap(), rat(0, 1));
        let gap = vec![iv(rat(0, 1), rat(1, 1)), iv(rat(3, 1), rat(4, 1))];
        assert_eq!(support_distance(&gap, &y).unwrap(), rat(1, 1));
        assert_eq!(support_distance(&gap, &[iv(rat(0, 1), rat(4, 1))]).unwrap(), rat(1, 1));
        assert_eq!(support_distance(&[], &y), Err(OrbitError::EmptyInput));
    }
}
