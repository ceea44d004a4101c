//! Exact arithmetic in multiquadratic fields `Q(√d₁, …, √d_m)`.
//!
//! A [`Scalar`] is stored in the field basis formed by all products of
//! subsets of the square roots `√d_i`; the empty product is `1`. Because
//! that basis is linearly independent over `Q`, equality and zero tests are
//! coefficient-wise and exact. Signs are decided by interval evaluation with
//! adaptively refined precision, so no comparison in the dynamical code ever
//! depends on a tolerance.
//!
//! Each scalar also carries an `f64` shadow value with a rigorous error
//! bound. It answers most sign queries without touching the big integers;
//! when the shadow cannot exclude zero the exact path takes over.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest number of radicands a basis may hold (the basis has `2^m` elements).
pub const MAX_RADICANDS: usize = 8;

const START_PRECISION_BITS: u64 = 64;
const SHADOW_REL: f64 = 1.0 / (1u64 << 48) as f64;
const SHADOW_ABS: f64 = 1e-280;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("scalars live over different bases")]
    BasisMismatch,
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("radicand subset {0:?} is not part of the basis")]
    UnknownRadicand(Vec<u64>),
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// The radicands generating a multiquadratic field.
///
/// Radicands are square-free integers `≥ 2`, sorted ascending, and no product
/// of a non-empty subset of them is a perfect square (so `{2, 3, 6}` is
/// rejected: `√2·√3 = √6`).
#[derive(Debug, Clone)]
pub struct Basis {
    radicands: Vec<u64>,
    products: Vec<BigUint>,
    sqrt_approx: Vec<f64>,
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.radicands == other.radicands
    }
}

impl Eq for Basis {}

impl Basis {
    pub fn new(mut radicands: Vec<u64>) -> Result<Arc<Basis>, ScalarError> {
        radicands.sort_unstable();
        if radicands.len() > MAX_RADICANDS {
            return Err(ScalarError::InvalidBasis(format!("at most {MAX_RADICANDS} radicands are supported")));
        }
        for w in radicands.windows(2) {
            if w[0] == w[1] {
                return Err(ScalarError::InvalidBasis(format!("radicand {} repeated", w[0])));
            }
        }
        let mut factorizations = Vec::with_capacity(radicands.len());
        for &d in &radicands {
            if d < 2 {
                return Err(ScalarError::InvalidBasis(format!("radicand {d} is below 2")));
            }
            let primes = square_free_primes(d)
                .ok_or_else(|| ScalarError::InvalidBasis(format!("radicand {d} is not square-free")))?;
            factorizations.push(primes);
        }
        if !independent_mod_squares(&factorizations) {
            return Err(ScalarError::InvalidBasis(format!(
                "radicands {radicands:?} are multiplicatively dependent modulo squares"
            )));
        }

        let dim = 1usize << radicands.len();
        let mut products = Vec::with_capacity(dim);
        let mut sqrt_approx = Vec::with_capacity(dim);
        for mask in 0..dim {
            let mut prod = BigUint::one();
            let mut approx = 1.0f64;
            for (bit, &d) in radicands.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    prod *= d;
                    approx *= (d as f64).sqrt();
                }
            }
            products.push(prod);
            sqrt_approx.push(approx);
        }
        Ok(Arc::new(Basis { radicands, products, sqrt_approx }))
    }

    /// The basis of `Q` itself.
    pub fn rational() -> Arc<Basis> {
        Basis::new(Vec::new()).expect("empty basis is valid")
    }

    pub fn radicands(&self) -> &[u64] {
        &self.radicands
    }

    /// Dimension of the field over `Q`.
    pub fn dim(&self) -> usize {
        1 << self.radicands.len()
    }

    /// Maps a radicand subset such as `[2, 3]` (meaning `√6`) to its index.
    pub fn mask_of(&self, subset: &[u64]) -> Result<usize, ScalarError> {
        let mut mask = 0usize;
        for &d in subset {
            let bit = self.radicands.binary_search(&d).map_err(|_| ScalarError::UnknownRadicand(subset.to_vec()))?;
            if mask & (1 << bit) != 0 {
                return Err(ScalarError::UnknownRadicand(subset.to_vec()));
            }
            mask |= 1 << bit;
        }
        Ok(mask)
    }

    pub fn subset_of(&self, mask: usize) -> Vec<u64> {
        self.radicands.iter().enumerate().filter(|(bit, _)| mask & (1 << bit) != 0).map(|(_, &d)| d).collect()
    }

    /// Integer `∏_{i∈S} d_i` for the subset encoded by `mask`.
    fn product(&self, mask: usize) -> &BigUint {
        &self.products[mask]
    }
}

fn square_free_primes(mut d: u64) -> Option<Vec<u64>> {
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= d {
        if d.is_multiple_of(p) {
            d /= p;
            if d.is_multiple_of(p) {
                return None;
            }
            primes.push(p);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if d > 1 {
        primes.push(d);
    }
    Some(primes)
}

/// GF(2) rank test on the prime-parity vectors of the radicands.
fn independent_mod_squares(factorizations: &[Vec<u64>]) -> bool {
    let mut primes: Vec<u64> = factorizations.iter().flatten().copied().collect();
    primes.sort_unstable();
    primes.dedup();
    let mut rows: Vec<Vec<bool>> =
        factorizations.iter().map(|f| primes.iter().map(|p| f.contains(p)).collect()).collect();
    let mut rank = 0;
    for col in 0..primes.len() {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] {
                let pivot_row = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot_row) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank == factorizations.len()
}

/// An exact element of a multiquadratic field.
#[derive(Clone)]
pub struct Scalar {
    basis: Arc<Basis>,
    coeffs: Box<[BigRational]>,
    approx: f64,
    err: f64,
}

impl Scalar {
    pub fn zero(basis: &Arc<Basis>) -> Scalar {
        Scalar {
            basis: basis.clone(),
            coeffs: vec![BigRational::zero(); basis.dim()].into_boxed_slice(),
            approx: 0.0,
            err: 0.0,
        }
    }

    pub fn from_rational(basis: &Arc<Basis>, q: BigRational) -> Scalar {
        let mut coeffs = vec![BigRational::zero(); basis.dim()];
        coeffs[0] = q;
        Scalar::from_parts(basis.clone(), coeffs.into_boxed_slice())
    }

    pub fn from_integer(basis: &Arc<Basis>, value: i64) -> Scalar {
        Scalar::from_rational(basis, BigRational::from_integer(value.into()))
    }

    pub fn from_ratio(basis: &Arc<Basis>, numer: i64, denom: i64) -> Scalar {
        Scalar::from_rational(basis, BigRational::new(numer.into(), denom.into()))
    }

    /// The basis element `√(d₁⋯d_k)` for the radicand subset `subset`.
    pub fn basis_element(basis: &Arc<Basis>, subset: &[u64]) -> Result<Scalar, ScalarError> {
        let mask = basis.mask_of(subset)?;
        let mut coeffs = vec![BigRational::zero(); basis.dim()];
        coeffs[mask] = BigRational::one();
        Ok(Scalar::from_parts(basis.clone(), coeffs.into_boxed_slice()))
    }

    /// Builds a scalar from `(radicand subset, coefficient)` pairs. Repeated
    /// subsets are summed.
    pub fn from_terms<I>(basis: &Arc<Basis>, terms: I) -> Result<Scalar, ScalarError>
    where
        I: IntoIterator<Item = (Vec<u64>, BigRational)>,
    {
        let mut coeffs = vec![BigRational::zero(); basis.dim()];
        for (subset, q) in terms {
            let mask = basis.mask_of(&subset)?;
            coeffs[mask] += q;
        }
        Ok(Scalar::from_parts(basis.clone(), coeffs.into_boxed_slice()))
    }

    /// Builds a scalar from its coefficients, indexed by radicand mask.
    pub fn from_coeffs(basis: &Arc<Basis>, coeffs: Vec<BigRational>) -> Scalar {
        assert_eq!(coeffs.len(), basis.dim(), "one coefficient per basis element");
        Scalar::from_parts(basis.clone(), coeffs.into_boxed_slice())
    }

    fn from_parts(basis: Arc<Basis>, coeffs: Box<[BigRational]>) -> Scalar {
        let (approx, err) = shadow_of(&basis, &coeffs);
        Scalar { basis, coeffs, approx, err }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    /// Coefficient of the basis element indexed by `mask`.
    pub fn coeff(&self, mask: usize) -> &BigRational {
        &self.coeffs[mask]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Non-zero `(radicand subset, coefficient)` pairs, rational part first.
    pub fn terms(&self) -> Vec<(Vec<u64>, BigRational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(mask, c)| (self.basis.subset_of(mask), c.clone()))
            .collect()
    }

    pub fn same_basis(&self, other: &Scalar) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis
    }

    fn check_basis(&self, other: &Scalar) -> Result<(), ScalarError> {
        if self.same_basis(other) {
            Ok(())
        } else {
            Err(ScalarError::BasisMismatch)
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_basis(other)?;
        let coeffs = self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| a + b).collect();
        let approx = self.approx + other.approx;
        Ok(Scalar {
            basis: self.basis.clone(),
            coeffs,
            approx,
            err: self.err + other.err + approx.abs() * SHADOW_REL + SHADOW_ABS,
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_basis(other)?;
        let coeffs = self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| a - b).collect();
        let approx = self.approx - other.approx;
        Ok(Scalar {
            basis: self.basis.clone(),
            coeffs,
            approx,
            err: self.err + other.err + approx.abs() * SHADOW_REL + SHADOW_ABS,
        })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_basis(other)?;
        let dim = self.basis.dim();
        let mut coeffs = vec![BigRational::zero(); dim];
        for (s, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (t, b) in other.coeffs.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                // √S·√T = (∏_{S∩T} d)·√(S △ T)
                let shared = self.basis.product(s & t);
                let term = a * b * BigRational::from_integer(BigInt::from(shared.clone()));
                coeffs[s ^ t] += term;
            }
        }
        let approx = self.approx * other.approx;
        Ok(Scalar {
            basis: self.basis.clone(),
            coeffs: coeffs.into_boxed_slice(),
            approx,
            err: (self.approx.abs() * other.err + other.approx.abs() * self.err + self.err * other.err)
                * (1.0 + SHADOW_REL)
                + approx.abs() * SHADOW_REL
                + SHADOW_ABS,
        })
    }

    /// Multiplies by an exact rational.
    pub fn scale(&self, q: &BigRational) -> Scalar {
        let coeffs = self.coeffs.iter().map(|c| c * q).collect();
        let qf = q.to_f64().unwrap_or(f64::INFINITY);
        let approx = self.approx * qf;
        let err = self.err * qf.abs() * (1.0 + SHADOW_REL) + (approx.abs() + SHADOW_ABS) * 2.0 * SHADOW_REL;
        if !approx.is_finite() || !err.is_finite() {
            return Scalar::from_parts(self.basis.clone(), coeffs);
        }
        Scalar { basis: self.basis.clone(), coeffs, approx, err }
    }

    /// Divides by a non-zero rational.
    pub fn div_rational(&self, q: &BigRational) -> Result<Scalar, ScalarError> {
        if q.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.scale(&q.recip()))
    }

    pub fn half(&self) -> Scalar {
        self.scale(&BigRational::new(1.into(), 2.into()))
    }

    /// Exact zero test.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// True iff every coefficient on a non-trivial basis element vanishes.
    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    /// The rational part, if the scalar is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then(|| &self.coeffs[0])
    }

    /// Sign of the scalar compared with zero, decided exactly.
    pub fn sign(&self) -> Ordering {
        if self.approx.is_finite() && self.err.is_finite() && self.approx.abs() > self.err {
            return if self.approx > 0.0 { Ordering::Greater } else { Ordering::Less };
        }
        exact_sign(&self.basis, &self.coeffs)
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    /// Exact comparison of two scalars over the same basis.
    ///
    /// Panics when the bases differ; use [`Scalar::try_cmp`] otherwise.
    pub fn cmp_exact(&self, other: &Scalar) -> Ordering {
        self.try_cmp(other).expect("comparison across bases")
    }

    pub fn try_cmp(&self, other: &Scalar) -> Result<Ordering, ScalarError> {
        self.check_basis(other)?;
        let lo_a = self.approx - self.err;
        let hi_a = self.approx + self.err;
        let lo_b = other.approx - other.err;
        let hi_b = other.approx + other.err;
        if hi_a.is_finite() && hi_b.is_finite() && lo_a.is_finite() && lo_b.is_finite() {
            if hi_a < lo_b {
                return Ok(Ordering::Less);
            }
            if hi_b < lo_a {
                return Ok(Ordering::Greater);
            }
        }
        if self.coeffs == other.coeffs {
            return Ok(Ordering::Equal);
        }
        Ok(self.try_sub(other)?.sign())
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other.cmp_exact(&self) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other.cmp_exact(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// A float `a` and a bound `e` with the exact value in `[a - e, a + e]`.
    pub fn enclosure(&self) -> (f64, f64) {
        if self.approx.is_finite() {
            (self.approx, self.err)
        } else {
            (0.0, f64::INFINITY)
        }
    }

    /// Floating-point approximation (for display and plotting only).
    pub fn to_f64(&self) -> f64 {
        if self.approx.is_finite() && self.err <= self.approx.abs() * 1e-9 {
            return self.approx;
        }
        shadow_of(&self.basis, &self.coeffs).0
    }

    pub fn to_repr(&self) -> ScalarRepr {
        ScalarRepr { coeffs: self.terms().into_iter().map(|(subset, q)| (subset, format_rational(&q))).collect() }
    }

    pub fn from_repr(basis: &Arc<Basis>, repr: &ScalarRepr) -> Result<Scalar, ScalarError> {
        let mut terms = Vec::with_capacity(repr.coeffs.len());
        for (subset, text) in &repr.coeffs {
            let mut subset = subset.clone();
            subset.sort_unstable();
            terms.push((subset, parse_rational(text)?));
        }
        Scalar::from_terms(basis, terms)
    }
}

/// JSON form of a scalar: `{"coeffs": [[[d1, d2], "p/q"], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarRepr {
    pub coeffs: Vec<(Vec<u64>, String)>,
}

fn shadow_of(basis: &Basis, coeffs: &[BigRational]) -> (f64, f64) {
    let mut approx = 0.0f64;
    let mut mag = 0.0f64;
    for (mask, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let Some(cf) = c.to_f64().filter(|v| v.is_finite()) else {
            return (0.0, f64::INFINITY);
        };
        let term = cf * basis.sqrt_approx[mask];
        approx += term;
        mag += term.abs();
    }
    // a few roundings per term, each bounded by a relative 2^-52
    (approx, mag * (coeffs.len() as f64 + 4.0) * SHADOW_REL + SHADOW_ABS)
}

/// Interval evaluation with doubling precision. For each basis element the
/// integer square root gives `s ≤ 2^k·√D < s + 1`, so the value scaled by
/// `L·2^k` (with `L` the common denominator) lies in an integer interval.
fn exact_sign(basis: &Basis, coeffs: &[BigRational]) -> Ordering {
    if coeffs.iter().all(Zero::is_zero) {
        return Ordering::Equal;
    }
    if coeffs.iter().skip(1).all(Zero::is_zero) {
        return coeffs[0].numer().sign().into_ordering();
    }
    let denom = coeffs.iter().filter(|c| !c.is_zero()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let numers: Vec<(usize, BigInt)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(mask, c)| (mask, c.numer() * (&denom / c.denom())))
        .collect();

    let mut bits = START_PRECISION_BITS;
    loop {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (mask, n) in &numers {
            let scaled = basis.product(*mask) << (2 * bits);
            let root = BigInt::from(scaled.sqrt());
            let exact = *mask == 0;
            let upper = if exact { root.clone() } else { &root + 1u32 };
            if n.is_positive() {
                lo += n * &root;
                hi += n * &upper;
            } else {
                lo += n * &upper;
                hi += n * &root;
            }
        }
        if lo.is_positive() {
            return Ordering::Greater;
        }
        if hi.is_negative() {
            return Ordering::Less;
        }
        bits *= 2;
    }
}

trait IntoOrdering {
    fn into_ordering(self) -> Ordering;
}

impl IntoOrdering for BigSign {
    fn into_ordering(self) -> Ordering {
        match self {
            BigSign::Minus => Ordering::Less,
            BigSign::NoSign => Ordering::Equal,
            BigSign::Plus => Ordering::Greater,
        }
    }
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `p/q` or a finite decimal such as `-0.001` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational, ScalarError> {
    let bad = || ScalarError::BadRational(text.to_string());
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int_val =
            if int_digits.is_empty() { BigInt::zero() } else { BigInt::from_str(int_digits).map_err(|_| bad())? };
        let frac_val = BigInt::from_str(frac_part).map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10u32), frac_part.len());
        let mut value = BigRational::new(int_val * &scale + frac_val, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    BigInt::from_str(t).map(BigRational::from_integer).map_err(|_| bad())
}

/// Whether the given scalars are linearly independent over `Q`.
///
/// Decided exactly: the basis elements are `Q`-independent, so this is the
/// rank of the rational coefficient matrix.
pub fn rationally_independent(values: &[Scalar]) -> Result<bool, ScalarError> {
    let Some(first) = values.first() else {
        return Ok(true);
    };
    for v in values {
        first.check_basis(v)?;
    }
    let dim = first.basis.dim();
    if values.len() > dim {
        return Ok(false);
    }
    let mut rows: Vec<Vec<BigRational>> = values.iter().map(|v| v.coeffs.to_vec()).collect();
    let mut rank = 0;
    for col in 0..dim {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
        rank += 1;
    }
    Ok(rank == values.len())
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_repr().serialize(serializer)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.same_basis(other) && self.coeffs == other.coeffs
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.basis.radicands.hash(state);
        self.coeffs.hash(state);
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other).ok()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (subset, q)) in terms.iter().enumerate() {
            let negative = q.is_negative();
            if idx == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let mag = q.abs();
            let root: u64 = subset.iter().product();
            if subset.is_empty() {
                f.write_str(&format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "√{root}")?;
            } else {
                write!(f, "{}√{root}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$inner(rhs).expect("arithmetic across bases")
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$inner(&rhs).expect("arithmetic across bases")
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$inner(rhs).expect("arithmetic across bases")
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$inner(&rhs).expect("arithmetic across bases")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            approx: -self.approx,
            err: self.err,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Sum of a non-empty slice of scalars over one basis.
pub fn sum(basis: &Arc<Basis>, values: &[Scalar]) -> Scalar {
    values.iter().fold(Scalar::zero(basis), |acc, v| acc + v)
}
