//! Signed permutations `p = (θ₁π₁, …, θ_nπ_n)`.
//!
//! Entries are stored exactly as written (1-based, signed). Accessors take
//! and return 0-based indices and slots; `π(i)` is the slot (position in the
//! image) of interval `i` and `θ_i = ±1` its orientation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("signed permutation {0:?} is not a permutation of 1..=n up to sign")]
    NotAPermutation(Vec<i64>),
    #[error("signed permutation must have at least one entry")]
    Empty,
    #[error("cannot parse signed permutation {0:?}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct SignedPermutation {
    entries: Vec<i64>,
}

impl SignedPermutation {
    pub fn new(entries: Vec<i64>) -> Result<Self, PermError> {
        let n = entries.len();
        if n == 0 {
            return Err(PermError::Empty);
        }
        let mut seen = vec![false; n];
        for &e in &entries {
            let a = e.unsigned_abs() as usize;
            if a == 0 || a > n || seen[a - 1] {
                return Err(PermError::NotAPermutation(entries));
            }
            seen[a - 1] = true;
        }
        Ok(SignedPermutation { entries })
    }

    /// Builds from an unsigned permutation (1-based) and a flip vector.
    pub fn from_parts(pi: &[usize], flipped: &[bool]) -> Result<Self, PermError> {
        let entries = pi.iter().zip(flipped).map(|(&v, &f)| if f { -(v as i64) } else { v as i64 }).collect();
        SignedPermutation::new(entries)
    }

    pub fn identity(n: usize) -> Self {
        SignedPermutation { entries: (1..=n as i64).collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// 0-based image slot of interval `i`.
    pub fn slot(&self, i: usize) -> usize {
        self.entries[i].unsigned_abs() as usize - 1
    }

    /// The unsigned permutation `π` as 1-based values.
    pub fn pi(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.unsigned_abs() as usize).collect()
    }

    pub fn is_flipped(&self, i: usize) -> bool {
        self.entries[i] < 0
    }

    /// `θ_i` as `±1`.
    pub fn theta(&self, i: usize) -> i64 {
        self.entries[i].signum()
    }

    /// Interval whose image occupies `slot` (0-based `π⁻¹`).
    pub fn interval_at_slot(&self, slot: usize) -> usize {
        self.entries.iter().position(|e| e.unsigned_abs() as usize == slot + 1).expect("valid permutation")
    }

    pub fn inverse_slots(&self) -> Vec<usize> {
        let mut inv = vec![0; self.len()];
        for i in 0..self.len() {
            inv[self.slot(i)] = i;
        }
        inv
    }

    pub fn has_flips(&self) -> bool {
        self.entries.iter().any(|&e| e < 0)
    }

    /// Membership in `𝒫*_n`: the last interval is not mapped to the last slot.
    pub fn in_p_star(&self) -> bool {
        self.slot(self.len() - 1) != self.len() - 1
    }

    /// No proper prefix `{1, …, k}` is mapped onto itself.
    pub fn is_irreducible(&self) -> bool {
        self.invariant_prefixes().next().is_none()
    }

    /// Lengths `k < n` with `π({1..k}) = {1..k}`, ascending.
    pub fn invariant_prefixes(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.len();
        let mut max_slot = 0usize;
        (0..n.saturating_sub(1)).filter_map(move |i| {
            max_slot = max_slot.max(self.slot(i));
            (max_slot == i).then_some(i + 1)
        })
    }

    /// All `2^n · n!` signed permutations of size `n`, in lexicographic
    /// order of `π` and then flip mask.
    pub fn all(n: usize) -> Vec<SignedPermutation> {
        let mut out = Vec::new();
        for pi in permutations(n) {
            for mask in 0..(1u32 << n) {
                let entries = pi
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| if mask & (1 << i) != 0 { -(v as i64) } else { v as i64 })
                    .collect();
                out.push(SignedPermutation { entries });
            }
        }
        out
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v + 1);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

impl TryFrom<Vec<i64>> for SignedPermutation {
    type Error = PermError;
    fn try_from(entries: Vec<i64>) -> Result<Self, PermError> {
        SignedPermutation::new(entries)
    }
}

impl From<SignedPermutation> for Vec<i64> {
    fn from(p: SignedPermutation) -> Vec<i64> {
        p.entries
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `(-7,6,5)` or `-7 6 5`.
impl FromStr for SignedPermutation {
    type Err = PermError;
    fn from_str(s: &str) -> Result<Self, PermError> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let entries = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().map_err(|_| PermError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        SignedPermutation::new(entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(v: &[i64]) -> SignedPermutation {
        SignedPermutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(SignedPermutation::new(vec![1, -1]).is_err());
        assert!(SignedPermutation::new(vec![0, 1]).is_err());
        assert!(SignedPermutation::new(vec![3, 1]).is_err());
        assert_eq!(SignedPermutation::new(vec![]), Err(PermError::Empty));
        let p = sp(&[-7, 6, 5, -3, -4, -1, -2]);
        assert_eq!(p.pi(), vec![7, 6, 5, 3, 4, 1, 2]);
        assert_eq!(p.theta(0), -1);
        assert_eq!(p.theta(1), 1);
        assert_eq!(p.interval_at_slot(6), 0);
        assert_eq!(p.inverse_slots()[0], 5);
    }

    #[test]
    fn irreducibility() {
        assert!(!sp(&[1, -2]).is_irreducible());
        assert!(sp(&[-7, 6, 5, -3, -4, -1, -2]).is_irreducible());
        assert!(!sp(&[2, 1, 4, 3, -5, -6, -7]).is_irreducible());
        assert_eq!(sp(&[2, 1, 4, 3, -5, -6, -7]).invariant_prefixes().collect::<Vec<_>>(), vec![2, 4, 5, 6]);
        assert!(sp(&[-1]).is_irreducible());
        assert!(sp(&[2, 1]).is_irreducible());
    }

    #[test]
    fn p_star() {
        assert!(sp(&[-2, 1]).in_p_star());
        assert!(!sp(&[1, -2]).in_p_star());
        assert!(!sp(&[-1]).in_p_star());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(SignedPermutation::all(1).len(), 2);
        assert_eq!(SignedPermutation::all(3).len(), 48);
        let all4 = SignedPermutation::all(4);
        assert_eq!(all4.len(), 384);
        let mut dedup = all4.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 384);
    }

    #[test]
    fn parse_and_display() {
        let p: SignedPermutation = "(-7,6,5,-3,-4,-1,-2)".parse().unwrap();
        assert_eq!(p.to_string(), "(-7,6,5,-3,-4,-1,-2)");
        let q: SignedPermutation = "2 -1".parse().unwrap();
        assert_eq!(q, sp(&[2, -1]));
        assert_eq!(serde_json::to_string(&q).unwrap(), "[2,-1]");
        assert!(serde_json::from_str::<SignedPermutation>("[2,2]").is_err());
    }
}
