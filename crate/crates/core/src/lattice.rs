//! Fast exact orbit arithmetic.
//!
//! Breakpoints, one-sided limits and their orbits all lie in the integer
//! span of `λ_1, …, λ_n` (plus at most one extra base point `g`), so they
//! are stored as integer coordinate vectors. Comparisons use a float
//! enclosure first and fall back to exact scalar arithmetic when it is
//! inconclusive.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::iet::{Iet, Interval, Location, Side};
use crate::scalar::Scalar;

/// Coordinates `(c_1, …, c_n, c_g)` of `Σ c_i λ_i + c_g g`.
pub type Coords = Box<[i64]>;

const EPS: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53

#[derive(Clone)]
pub struct Lattice {
    iet: Iet,
    generators: Vec<Scalar>,
    approx: Vec<f64>,
    err: Vec<f64>,
    breaks: Vec<Coords>,
    image_breaks: Vec<Coords>,
    offsets: Vec<Coords>,
    int_form: Option<IntForm>,
}

/// Generators scaled to a common denominator, for exact hashing of points.
#[derive(Clone)]
struct IntForm {
    denom: BigRational,
    gens: Vec<Vec<i128>>,
}

impl IntForm {
    fn new(generators: &[Scalar]) -> Option<IntForm> {
        let mut d = BigInt::one();
        for g in generators {
            for q in g.coeffs() {
                d = d.lcm(q.denom());
            }
        }
        let denom = BigRational::from_integer(d);
        let gens = generators
            .iter()
            .map(|g| g.coeffs().iter().map(|q| i128::try_from((q * &denom).to_integer()).ok()).collect())
            .collect::<Option<Vec<Vec<i128>>>>()?;
        Some(IntForm { denom, gens })
    }
}

/// Exact key of a point, see [`Lattice::key`].
pub type Key = Box<[i128]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

impl Lattice {
    pub fn new(iet: &Iet) -> Lattice {
        Lattice::with_generator(iet, iet.zero())
    }

    /// Lattice with the extra generator `g`, typically a base point.
    pub fn with_generator(iet: &Iet, g: Scalar) -> Lattice {
        let n = iet.n();
        let mut generators = iet.lengths().to_vec();
        generators.push(g);
        let (approx, err) = generators.iter().map(Scalar::enclosure).unzip();
        let unit = |i: usize| {
            let mut c = vec![0i64; n + 1];
            c[i] = 1;
            c
        };
        let mut breaks: Vec<Coords> = Vec::with_capacity(n + 1);
        let mut acc = vec![0i64; n + 1];
        breaks.push(acc.clone().into());
        for i in 0..n {
            acc[i] += 1;
            breaks.push(acc.clone().into());
        }
        let mut image_breaks: Vec<Coords> = Vec::with_capacity(n + 1);
        let mut acc = vec![0i64; n + 1];
        image_breaks.push(acc.clone().into());
        for slot in 0..n {
            let u = unit(iet.perm().interval_at_slot(slot));
            add_into(&mut acc, &u, 1);
            image_breaks.push(acc.clone().into());
        }
        let perm = iet.perm();
        let offsets = (0..n)
            .map(|i| {
                let s = perm.slot(i);
                let mut off = vec![0i64; n + 1];
                if perm.is_flipped(i) {
                    add_into(&mut off, &image_breaks[s + 1], 1);
                    add_into(&mut off, &breaks[i], 1);
                } else {
                    add_into(&mut off, &image_breaks[s], 1);
                    add_into(&mut off, &breaks[i], -1);
                }
                off.into()
            })
            .collect();
        let int_form = IntForm::new(&generators);
        Lattice { iet: iet.clone(), generators, approx, err, breaks, image_breaks, offsets, int_form }
    }

    pub fn iet(&self) -> &Iet {
        &self.iet
    }

    pub fn n(&self) -> usize {
        self.iet.n()
    }

    /// Coordinates of the extra generator.
    pub fn generator(&self) -> Coords {
        let mut c = vec![0i64; self.n() + 1];
        c[self.n()] = 1;
        c.into()
    }

    pub fn breakpoint(&self, j: usize) -> &Coords {
        &self.breaks[j]
    }

    pub fn breakpoints(&self) -> &[Coords] {
        &self.breaks
    }

    pub fn to_scalar(&self, c: &[i64]) -> Scalar {
        if let (Some(form), Ok(key)) = (&self.int_form, self.key(c)) {
            let coeffs = key.iter().map(|&k| BigRational::from_integer(BigInt::from(k)) / &form.denom).collect();
            return Scalar::from_coeffs(self.generators[0].basis(), coeffs);
        }
        let mut acc = self.iet.zero();
        for (ci, g) in c.iter().zip(&self.generators) {
            match ci {
                0 => {}
                1 => acc = acc + g,
                -1 => acc = acc - g,
                _ => acc = acc + g.scale(&BigRational::from_integer(BigInt::from(*ci))),
            }
        }
        acc
    }

    /// Exact value as an integer vector over the field basis, scaled by the
    /// common denominator of the generators. Two points are equal iff
    /// their keys are.
    pub fn key(&self, c: &[i64]) -> Result<Key, Overflow> {
        let form = self.int_form.as_ref().ok_or(Overflow)?;
        let dim = form.gens.first().map_or(0, Vec::len);
        let mut out = vec![0i128; dim];
        for (&ci, g) in c.iter().zip(&form.gens) {
            if ci == 0 {
                continue;
            }
            for (o, &gm) in out.iter_mut().zip(g) {
                *o = gm.checked_mul(ci as i128).and_then(|v| o.checked_add(v)).ok_or(Overflow)?;
            }
        }
        Ok(out.into())
    }

    /// Key of an arbitrary scalar; `Ok(None)` when it cannot be a point of
    /// the lattice's value group.
    pub fn scalar_key(&self, x: &Scalar) -> Result<Option<Key>, Overflow> {
        let form = self.int_form.as_ref().ok_or(Overflow)?;
        if !x.same_basis(&self.generators[0]) {
            return Err(Overflow);
        }
        let mut out = Vec::with_capacity(x.coeffs().len());
        for q in x.coeffs() {
            let v = q * &form.denom;
            if !v.is_integer() {
                return Ok(None);
            }
            out.push(i128::try_from(v.to_integer()).map_err(|_| Overflow)?);
        }
        Ok(Some(out.into()))
    }

    /// Float value and a rigorous bound on its error.
    pub fn approx(&self, c: &[i64]) -> (f64, f64) {
        let v = self.to_f64(c);
        let mag: f64 = c.iter().zip(&self.approx).map(|(&ci, g)| (ci as f64 * g).abs()).sum();
        let e: f64 = c.iter().zip(&self.err).map(|(&ci, g)| (ci as f64).abs() * g).sum::<f64>()
            + mag * (c.len() as f64 + 3.0) * 2.0 * EPS;
        (v, e)
    }

    pub fn to_f64(&self, c: &[i64]) -> f64 {
        c.iter().zip(&self.approx).map(|(&ci, a)| ci as f64 * a).sum()
    }

    /// Exact sign of `Σ (a_i - b_i) γ_i`.
    fn sign_of_diff(&self, a: &[i64], b: &[i64]) -> Ordering {
        let mut v = 0.0f64;
        let mut mag = 0.0f64;
        let mut e = 0.0f64;
        let mut zero = true;
        for i in 0..a.len() {
            let d = a[i] - b[i];
            if d == 0 {
                continue;
            }
            zero = false;
            let df = d as f64;
            let t = df * self.approx[i];
            v += t;
            mag += t.abs();
            e += df.abs() * self.err[i];
        }
        if zero {
            return Ordering::Equal;
        }
        let bound = e + mag * (a.len() as f64 + 3.0) * 2.0 * EPS;
        if bound.is_finite() && v.abs() > bound {
            return if v > 0.0 { Ordering::Greater } else { Ordering::Less };
        }
        let diff: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.to_scalar(&diff).sign()
    }

    pub fn cmp(&self, a: &[i64], b: &[i64]) -> Ordering {
        self.sign_of_diff(a, b)
    }

    pub fn cmp_scalar(&self, a: &[i64], x: &Scalar) -> Ordering {
        let (xa, xe) = x.enclosure();
        let (va, e) = self.approx(a);
        let e = e + xe;
        if e.is_finite() {
            if va + e < xa {
                return Ordering::Less;
            }
            if va - e > xa {
                return Ordering::Greater;
            }
        }
        self.to_scalar(a).cmp_exact(x)
    }

    fn locate_in(&self, points: &[Coords], c: &[i64]) -> Location {
        let n = points.len() - 1;
        let k = points.partition_point(|p| self.cmp(p, c) != Ordering::Greater);
        debug_assert!(k >= 1 && (k <= n || self.cmp(&points[n], c) == Ordering::Equal));
        let i = k - 1;
        if self.cmp(&points[i], c) == Ordering::Equal {
            Location::Breakpoint(i)
        } else {
            Location::Interior(i.min(n - 1))
        }
    }

    /// Location of a point known to lie in `[0, c]`.
    pub fn locate(&self, c: &[i64]) -> Location {
        self.locate_in(&self.breaks, c)
    }

    pub fn locate_image(&self, c: &[i64]) -> Location {
        self.locate_in(&self.image_breaks, c)
    }

    pub fn map_on(&self, i: usize, c: &[i64]) -> Coords {
        let sign = if self.iet.perm().is_flipped(i) { -1 } else { 1 };
        self.offsets[i].iter().zip(c).map(|(o, x)| o + sign * x).collect()
    }

    pub fn unmap_on_slot(&self, slot: usize, c: &[i64]) -> Coords {
        let i = self.iet.perm().interval_at_slot(slot);
        if self.iet.perm().is_flipped(i) {
            self.offsets[i].iter().zip(c).map(|(o, y)| o - y).collect()
        } else {
            c.iter().zip(self.offsets[i].iter()).map(|(y, o)| y - o).collect()
        }
    }

    /// `T(c)` and the interval used, or `None` on a breakpoint.
    pub fn step(&self, c: &[i64]) -> Option<(Coords, usize)> {
        match self.locate(c) {
            Location::Breakpoint(_) => None,
            Location::Interior(i) => Some((self.map_on(i, c), i)),
        }
    }

    pub fn step_back(&self, c: &[i64]) -> Option<(Coords, usize)> {
        match self.locate_image(c) {
            Location::Breakpoint(_) => None,
            Location::Interior(s) => Some((self.unmap_on_slot(s, c), self.iet.perm().interval_at_slot(s))),
        }
    }

    pub fn limit(&self, j: usize, side: Side) -> Option<Coords> {
        let n = self.n();
        let i = match side {
            Side::Right if j < n => j,
            Side::Left if (1..=n).contains(&j) => j - 1,
            _ => return None,
        };
        Some(self.map_on(i, &self.breaks[j]))
    }

    pub fn interval(&self, lo: &[i64], hi: &[i64]) -> Interval {
        Interval::new(self.to_scalar(lo), self.to_scalar(hi))
    }

    /// Sorts and removes duplicate values.
    pub fn sort_dedup(&self, points: &mut Vec<Coords>) {
        points.sort_by(|a, b| self.cmp(a, b));
        points.dedup_by(|a, b| self.cmp(a, b) == Ordering::Equal);
    }

    /// Index of `c` in a sorted, deduplicated list.
    pub fn find(&self, sorted: &[Coords], c: &[i64]) -> Option<usize> {
        sorted.binary_search_by(|p| self.cmp(p, c)).ok()
    }
}

fn add_into(acc: &mut [i64], v: &[i64], k: i64) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += k * x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iet::Direction;
    use crate::perm::SignedPermutation;
    use crate::scalar::Basis;

    #[test]
    fn agrees_with_scalar_evaluation() {
        let basis = Basis::new(vec![2, 3]).unwrap();
        let r2 = Scalar::basis_element(&basis, &[2]).unwrap();
        let r3 = Scalar::basis_element(&basis, &[3]).unwrap();
        let one = Scalar::from_integer(&basis, 1);
        let lengths = vec![r2.clone(), one.clone(), r3.clone(), &one + &r2];
        let p = SignedPermutation::new(vec![-3, 4, 1, -2]).unwrap();
        let t = Iet::new(lengths, p).unwrap();
        let g = Scalar::from_ratio(&basis, 1, 3);
        let lat = Lattice::with_generator(&t, g.clone());
        let mut c = lat.generator();
        let mut x = g;
        for _ in 0..200 {
            assert_eq!(lat.to_scalar(&c), x);
            let Some((next, _)) = lat.step(&c) else { break };
            c = next;
            x = t.evaluate(&x, Direction::Forward).unwrap().unwrap();
        }
        for j in 0..=4 {
            assert_eq!(lat.to_scalar(lat.breakpoint(j)), t.breakpoints()[j]);
            for side in [Side::Left, Side::Right] {
                assert_eq!(lat.limit(j, side).map(|c| lat.to_scalar(&c)), t.one_sided_limit(j, side).map(|w| w.value));
            }
        }
    }

    #[test]
    fn keys_are_exact() {
        let basis = Basis::new(vec![2]).unwrap();
        let r2 = Scalar::basis_element(&basis, &[2]).unwrap();
        let lengths = vec![r2.scale(&BigRational::new(1.into(), 3.into())), Scalar::from_ratio(&basis, 1, 2)];
        let t = Iet::new(lengths, SignedPermutation::new(vec![-2, 1]).unwrap()).unwrap();
        let lat = Lattice::new(&t);
        let c: Coords = vec![3, -2, 0].into();
        let x = lat.to_scalar(&c);
        assert_eq!(lat.scalar_key(&x).unwrap(), Some(lat.key(&c).unwrap()));
        assert_eq!(lat.scalar_key(&Scalar::from_ratio(&basis, 1, 7)).unwrap(), None);
        assert_ne!(lat.key(&[3, -1, 0]).unwrap(), lat.key(&c).unwrap());
    }

    #[test]
    fn dependent_lengths_compare_exactly() {
        let basis = Basis::rational();
        let lengths = vec![Scalar::from_integer(&basis, 1), Scalar::from_integer(&basis, 2)];
        let t = Iet::new(lengths, SignedPermutation::new(vec![2, 1]).unwrap()).unwrap();
        let lat = Lattice::new(&t);
        // 2·λ_1 = λ_2
        assert_eq!(lat.cmp(&[2, 0, 0], &[0, 1, 0]), Ordering::Equal);
        assert_eq!(lat.locate(&[2, 0, 0]), Location::Interior(1));
        assert_eq!(lat.locate(&[1, 0, 0]), Location::Breakpoint(1));
    }
}
