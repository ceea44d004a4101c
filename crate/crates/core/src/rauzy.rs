//! Signed Rauzy induction.
//!
//! One step replaces `T_(λ,p)` by its first return map to `(0, ξ)`. Writing
//! `j = π⁻¹(n)`, the step is of type A when `λ_j < λ_n` and of type B when
//! `λ_j > λ_n`; in both cases `λ = M·λ'` for the 0/1 matrix of the step.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iet::{Iet, IetError};
use crate::matrix::IntMatrix;
use crate::perm::SignedPermutation;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RauzyError {
    #[error("{0} is not in P*: its last interval is already mapped last")]
    NotInPStar(SignedPermutation),
    #[error("tie λ_j = λ_n at induction step {step}")]
    TieEncountered { step: usize },
    #[error("no reducible permutation within {cap} induction steps")]
    CapExceeded { cap: usize },
    #[error("finite expansion needs at least one flip, got {0}")]
    NoFlips(SignedPermutation),
    #[error("word step {step} leaves P*")]
    WordInapplicable { step: usize },
    #[error(transparent)]
    Iet(#[from] IetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepKind {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl StepKind {
    pub fn letter(self) -> char {
        match self {
            StepKind::A => 'a',
            StepKind::B => 'b',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RauzyType {
    A,
    B,
    Tie,
}

/// Parses a word over `{a, b}` (case-insensitive).
pub fn parse_word(text: &str) -> Option<Vec<StepKind>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            'a' | 'A' => Some(StepKind::A),
            'b' | 'B' => Some(StepKind::B),
            _ => None,
        })
        .collect()
}

pub fn word_string(word: &[StepKind]) -> String {
    word.iter().map(|k| k.letter()).collect()
}

fn check_p_star(p: &SignedPermutation) -> Result<(), RauzyError> {
    if p.in_p_star() {
        Ok(())
    } else {
        Err(RauzyError::NotInPStar(p.clone()))
    }
}

pub fn rauzy_type(lengths: &[Scalar], p: &SignedPermutation) -> Result<RauzyType, RauzyError> {
    check_p_star(p)?;
    let n = p.len();
    if lengths.len() != n {
        return Err(IetError::DimensionMismatch { lengths: lengths.len(), perm: n }.into());
    }
    let j = p.interval_at_slot(n - 1);
    Ok(match lengths[j].cmp_exact(&lengths[n - 1]) {
        std::cmp::Ordering::Less => RauzyType::A,
        std::cmp::Ordering::Greater => RauzyType::B,
        std::cmp::Ordering::Equal => RauzyType::Tie,
    })
}

pub fn rauzy_matrix(p: &SignedPermutation, kind: StepKind) -> Result<IntMatrix, RauzyError> {
    check_p_star(p)?;
    let n = p.len();
    let j = p.interval_at_slot(n - 1);
    let mut m = IntMatrix::zeros(n);
    match kind {
        StepKind::A => {
            for i in 0..n {
                m.add_to(i, i, 1);
            }
            m.add_to(n - 1, j, 1);
        }
        StepKind::B => {
            for i in 0..=j {
                m.add_to(i, i, 1);
            }
            let s = if p.is_flipped(j) { j } else { j + 1 };
            m.add_to(n - 1, s, 1);
            for i in j..n - 1 {
                m.add_to(i, i + 1, 1);
            }
        }
    }
    Ok(m)
}

/// The Rauzy maps `a(p)` and `b(p)`.
pub fn rauzy_map(p: &SignedPermutation, kind: StepKind) -> Result<SignedPermutation, RauzyError> {
    check_p_star(p)?;
    let n = p.len();
    let e = p.entries();
    let pi_n = e[n - 1].abs();
    let theta_n = e[n - 1].signum();
    let out: Vec<i64> = match kind {
        StepKind::A => {
            let keep = if theta_n > 0 { pi_n } else { pi_n - 1 };
            e.iter()
                .map(|&v| {
                    let (pi, theta) = (v.abs(), v.signum());
                    if pi <= keep {
                        v
                    } else if pi == n as i64 {
                        if theta_n > 0 {
                            theta * (pi_n + 1)
                        } else {
                            -theta * pi_n
                        }
                    } else {
                        theta * (pi + 1)
                    }
                })
                .collect()
        }
        StepKind::B => {
            let j = p.interval_at_slot(n - 1);
            let mut out = Vec::with_capacity(n);
            if e[j] > 0 {
                out.extend_from_slice(&e[..=j]);
                out.push(theta_n * pi_n);
                out.extend_from_slice(&e[j + 1..n - 1]);
            } else {
                out.extend_from_slice(&e[..j]);
                out.push(-theta_n * pi_n);
                out.extend_from_slice(&e[j..n - 1]);
            }
            out
        }
    };
    Ok(SignedPermutation::new(out).expect("Rauzy maps preserve signed permutations"))
}

/// One induction step, without the matrix (see [`RauzyStepRecord::matrix`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RauzyStepRecord {
    #[serde(rename = "type")]
    pub kind: StepKind,
    pub p_before: SignedPermutation,
    pub p_after: SignedPermutation,
    /// Length of the inducing interval `(0, ξ)`, equal to `‖λ'‖`.
    pub xi: Scalar,
}

impl RauzyStepRecord {
    pub fn matrix(&self) -> IntMatrix {
        rauzy_matrix(&self.p_before, self.kind).expect("recorded steps start in P*")
    }
}

#[derive(Debug, Clone)]
pub struct RauzyStep {
    pub lengths: Vec<Scalar>,
    pub perm: SignedPermutation,
    pub record: RauzyStepRecord,
}

/// `(λ, p) ↦ (M⁻¹λ, c(p))`.
pub fn rauzy_step(lengths: &[Scalar], p: &SignedPermutation) -> Result<RauzyStep, RauzyError> {
    let kind = match rauzy_type(lengths, p)? {
        RauzyType::A => StepKind::A,
        RauzyType::B => StepKind::B,
        RauzyType::Tie => return Err(RauzyError::TieEncountered { step: 0 }),
    };
    let n = p.len();
    let j = p.interval_at_slot(n - 1);
    let norm = crate::scalar::sum(lengths[0].basis(), lengths);
    let (new_lengths, xi) = match kind {
        StepKind::A => {
            let mut out = lengths.to_vec();
            out[n - 1] = &lengths[n - 1] - &lengths[j];
            (out, &norm - &lengths[j])
        }
        StepKind::B => {
            let rest = &lengths[j] - &lengths[n - 1];
            let mut out = Vec::with_capacity(n);
            out.extend_from_slice(&lengths[..j]);
            if p.is_flipped(j) {
                out.push(lengths[n - 1].clone());
                out.push(rest);
            } else {
                out.push(rest);
                out.push(lengths[n - 1].clone());
            }
            out.extend_from_slice(&lengths[j + 1..n - 1]);
            (out, &norm - &lengths[n - 1])
        }
    };
    let perm = rauzy_map(p, kind)?;
    Ok(RauzyStep {
        lengths: new_lengths,
        perm: perm.clone(),
        record: RauzyStepRecord { kind, p_before: p.clone(), p_after: perm, xi },
    })
}

/// Applies one step to an IET, returning the induced IET on `(0, ξ)`.
pub fn induce(t: &Iet) -> Result<(Iet, RauzyStepRecord), RauzyError> {
    let step = rauzy_step(t.lengths(), t.perm())?;
    Ok((Iet::new(step.lengths, step.perm)?, step.record))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RauzyTrajectory {
    pub initial_lengths: Vec<Scalar>,
    pub initial_perm: SignedPermutation,
    pub records: Vec<RauzyStepRecord>,
    pub final_lengths: Vec<Scalar>,
    pub final_perm: SignedPermutation,
}

impl RauzyTrajectory {
    pub fn empty(lengths: &[Scalar], p: &SignedPermutation) -> RauzyTrajectory {
        RauzyTrajectory {
            initial_lengths: lengths.to_vec(),
            initial_perm: p.clone(),
            records: Vec::new(),
            final_lengths: lengths.to_vec(),
            final_perm: p.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn word(&self) -> Vec<StepKind> {
        self.records.iter().map(|r| r.kind).collect()
    }

    /// `M = M_{c_0}(q⁽⁰⁾) ⋯ M_{c_{K-1}}(q^{(K-1)})`, so `λ = M·λ^{(K)}`.
    pub fn cumulative_matrix(&self) -> IntMatrix {
        self.records.iter().fold(IntMatrix::identity(self.initial_perm.len()), |acc, r| acc.mul(&r.matrix()))
    }

    pub fn final_iet(&self) -> Result<Iet, IetError> {
        Iet::new(self.final_lengths.clone(), self.final_perm.clone())
    }

    fn push(&mut self, step: RauzyStep) {
        self.final_lengths = step.lengths;
        self.final_perm = step.perm;
        self.records.push(step.record);
    }
}

impl fmt::Display for RauzyTrajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} via {:?}", self.initial_perm, self.final_perm, word_string(&self.word()))
    }
}

/// Runs the induction until `p^(m)` is reducible and returns the least such
/// `m ≥ 0` together with the trajectory.
pub fn finite_expansion(
    lengths: &[Scalar],
    p: &SignedPermutation,
    cap: usize,
) -> Result<(usize, RauzyTrajectory), RauzyError> {
    if !p.has_flips() {
        return Err(RauzyError::NoFlips(p.clone()));
    }
    let mut traj = RauzyTrajectory::empty(lengths, p);
    while traj.final_perm.is_irreducible() {
        if traj.len() >= cap {
            return Err(RauzyError::CapExceeded { cap });
        }
        let step = rauzy_step(&traj.final_lengths, &traj.final_perm).map_err(|e| match e {
            RauzyError::TieEncountered { .. } => RauzyError::TieEncountered { step: traj.len() },
            other => other,
        })?;
        traj.push(step);
    }
    Ok((traj.len(), traj))
}

/// Runs exactly the given word, failing on a type mismatch or a tie.
pub fn follow_word(
    lengths: &[Scalar],
    p: &SignedPermutation,
    word: &[StepKind],
) -> Result<Option<RauzyTrajectory>, RauzyError> {
    let mut traj = RauzyTrajectory::empty(lengths, p);
    for (k, &kind) in word.iter().enumerate() {
        let step = rauzy_step(&traj.final_lengths, &traj.final_perm).map_err(|e| match e {
            RauzyError::TieEncountered { .. } => RauzyError::TieEncountered { step: k },
            other => other,
        })?;
        if step.record.kind != kind {
            return Ok(None);
        }
        traj.push(step);
    }
    Ok(Some(traj))
}

/// Permutations reachable by at most `depth` applications of `a` and `b`.
/// Members outside `P*` are kept but not expanded.
pub fn forward_set(p: &SignedPermutation, depth: usize) -> BTreeSet<SignedPermutation> {
    let mut seen = BTreeSet::from([p.clone()]);
    let mut queue = VecDeque::from([(p.clone(), 0usize)]);
    while let Some((q, d)) = queue.pop_front() {
        if d == depth || !q.in_p_star() {
            continue;
        }
        for kind in [StepKind::A, StepKind::B] {
            let next = rauzy_map(&q, kind).expect("checked P*");
            if seen.insert(next.clone()) {
                queue.push_back((next, d + 1));
            }
        }
    }
    seen
}
