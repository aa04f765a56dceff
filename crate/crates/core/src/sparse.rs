//! Sets of naturals too large to materialize, stored as sorted toggle points.
//!
//! A set is described by a strictly increasing list `t_0 < t_1 < ...`; a
//! position `u` is a member iff an odd number of toggles are `<= u`. Finite
//! unions of intervals, finite sets and cofinite sets all fit, and every
//! question the constructions ask is answered by integer arithmetic on the
//! toggles.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::prefix::Prefix;
use crate::process::{ApproxProcess, Horizon};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SparseSet {
    toggles: Vec<BigUint>,
}

impl SparseSet {
    pub fn empty() -> Self {
        SparseSet::default()
    }

    /// Normalizes an arbitrary multiset of toggles: equal toggles cancel in
    /// pairs.
    pub fn from_toggles(mut toggles: Vec<BigUint>) -> Self {
        toggles.sort_unstable();
        let mut out: Vec<BigUint> = Vec::with_capacity(toggles.len());
        for t in toggles {
            if out.last() == Some(&t) {
                out.pop();
            } else {
                out.push(t);
            }
        }
        SparseSet { toggles: out }
    }

    pub fn singleton(x: BigUint) -> Self {
        let next = &x + 1u32;
        SparseSet { toggles: vec![x, next] }
    }

    pub fn from_points<I: IntoIterator<Item = BigUint>>(points: I) -> Self {
        let mut toggles = Vec::new();
        for p in points {
            toggles.push(&p + 1u32);
            toggles.push(p);
        }
        Self::from_toggles(toggles)
    }

    /// `[lo, hi)`; empty when `hi <= lo`.
    pub fn interval(lo: BigUint, hi: BigUint) -> Self {
        if hi <= lo {
            return Self::empty();
        }
        SparseSet { toggles: vec![lo, hi] }
    }

    /// `ℕ` minus the given points.
    pub fn cofinite<I: IntoIterator<Item = BigUint>>(missing: I) -> Self {
        Self::from_points(missing).complement()
    }

    pub fn toggles(&self) -> &[BigUint] {
        &self.toggles
    }

    pub fn is_empty(&self) -> bool {
        self.toggles.is_empty()
    }

    /// True iff the set contains every sufficiently large number.
    pub fn is_cofinite(&self) -> bool {
        self.toggles.len() % 2 == 1
    }

    pub fn contains(&self, u: &BigUint) -> bool {
        self.toggles.partition_point(|t| t <= u) % 2 == 1
    }

    pub fn complement(&self) -> Self {
        let mut toggles = self.toggles.clone();
        toggles.push(BigUint::zero());
        Self::from_toggles(toggles)
    }

    pub fn symmetric_difference(&self, other: &SparseSet) -> Self {
        let mut toggles = self.toggles.clone();
        toggles.extend(other.toggles.iter().cloned());
        Self::from_toggles(toggles)
    }

    /// Union of sets whose members are known to be disjoint.
    pub fn disjoint_union(&self, other: &SparseSet) -> Self {
        self.symmetric_difference(other)
    }

    /// Members inside `[lo, hi)`.
    pub fn restrict(&self, lo: &BigUint, hi: &BigUint) -> Self {
        if hi <= lo {
            return Self::empty();
        }
        let mut toggles = Vec::new();
        if self.contains(lo) {
            toggles.push(lo.clone());
        }
        toggles.extend(self.toggles.iter().filter(|t| *t > lo && *t < hi).cloned());
        if toggles.len() % 2 == 1 {
            toggles.push(hi.clone());
        }
        SparseSet { toggles }
    }

    /// Image of `self ∩ [lo, hi]` under `u -> lo + hi - u`.
    pub fn reflect(&self, lo: &BigUint, hi: &BigUint) -> Self {
        let end = hi + 1u32;
        let inside = self.restrict(lo, &end);
        let pivot = lo + &end;
        let toggles = inside.toggles.iter().rev().map(|t| &pivot - t).collect();
        SparseSet { toggles }
    }

    /// Least member, if any.
    pub fn min(&self) -> Option<&BigUint> {
        self.toggles.first()
    }

    /// Number of members, when finite.
    pub fn count(&self) -> Option<BigUint> {
        if self.is_cofinite() {
            return None;
        }
        let mut total = BigUint::zero();
        for pair in self.toggles.chunks(2) {
            total += &pair[1] - &pair[0];
        }
        Some(total)
    }

    /// Members of a finite set, ascending. Refuses sets with more than
    /// `limit` members.
    pub fn members(&self, limit: usize) -> Result<Vec<BigUint>> {
        let count = self
            .count()
            .ok_or_else(|| Error::usage("members() on a cofinite sparse set"))?;
        if count > BigUint::from(limit) {
            return Err(Error::capacity(format!("sparse set has {count} members, limit {limit}")));
        }
        let mut out = Vec::new();
        for pair in self.toggles.chunks(2) {
            let mut u = pair[0].clone();
            while u < pair[1] {
                out.push(u.clone());
                u += 1u32;
            }
        }
        Ok(out)
    }

    /// Characteristic prefix on positions `0..bits`.
    pub fn to_dense(&self, bits: usize) -> Prefix {
        let mut p = Prefix::zeros(bits);
        let mut inside = false;
        let mut from = 0usize;
        for t in &self.toggles {
            let pos = t.to_usize().unwrap_or(usize::MAX).min(bits);
            if inside {
                for i in from..pos {
                    p.set(i, true);
                }
            }
            inside = !inside;
            from = pos;
            if pos >= bits {
                break;
            }
        }
        if inside {
            for i in from..bits {
                p.set(i, true);
            }
        }
        p
    }
}

/// Lexicographic comparison of characteristic sequences: the least member of
/// the symmetric difference decides.
pub fn sparse_lex_cmp(a: &SparseSet, b: &SparseSet) -> Ordering {
    match a.symmetric_difference(b).min() {
        None => Ordering::Equal,
        Some(m) if b.contains(m) => Ordering::Less,
        Some(_) => Ordering::Greater,
    }
}

/// A stage-indexed family of sparse sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseProcess {
    label: String,
    stages: Vec<SparseSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SparseReport {
    Ok,
    Violation { stage: usize, position: BigUint },
}

impl SparseReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, SparseReport::Ok)
    }
}

impl SparseProcess {
    pub fn new(label: impl Into<String>, stages: Vec<SparseSet>) -> Result<Self> {
        let label = label.into();
        if stages.is_empty() {
            return Err(Error::usage(format!("sparse process {label:?} has no stages")));
        }
        Ok(SparseProcess { label, stages })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn last_stage(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stage(&self, s: usize) -> &SparseSet {
        &self.stages[s]
    }

    pub fn stages(&self) -> &[SparseSet] {
        &self.stages
    }

    pub fn final_set(&self) -> &SparseSet {
        &self.stages[self.last_stage()]
    }

    pub fn contains(&self, s: usize, u: &BigUint) -> bool {
        self.stages[s].contains(u)
    }

    /// Lex-monotonicity over the full (unbounded) characteristic sequences.
    pub fn validate(&self) -> SparseReport {
        for (s, w) in self.stages.windows(2).enumerate() {
            if sparse_lex_cmp(&w[0], &w[1]) == Ordering::Greater {
                let position = w[0].symmetric_difference(&w[1]).min().cloned().unwrap_or_default();
                return SparseReport::Violation { stage: s, position };
            }
        }
        SparseReport::Ok
    }

    /// Dense view on the first `horizon.bits` positions, stage `s` reading
    /// the sparse stage `min(s, last)`.
    pub fn to_dense(&self, horizon: Horizon) -> ApproxProcess {
        let dense: Vec<Prefix> = self.stages.iter().map(|set| set.to_dense(horizon.bits)).collect();
        let last = dense.len() - 1;
        let stages = (0..horizon.stage_count()).map(|s| dense[s.min(last)].clone()).collect();
        ApproxProcess::from_stages(self.label.clone(), stages)
            .expect("dense view of a sparse process is well formed")
    }
}

/// `2^k` as a big integer.
pub fn pow2(k: usize) -> BigUint {
    BigUint::one() << k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn set(points: &[u64]) -> SparseSet {
        SparseSet::from_points(points.iter().map(|&x| b(x)))
    }

    #[test]
    fn points_and_membership() {
        let s = set(&[3, 4, 9]);
        assert_eq!(s.toggles(), &[b(3), b(5), b(9), b(10)]);
        assert!(s.contains(&b(4)) && !s.contains(&b(5)) && s.contains(&b(9)));
        assert_eq!(s.count(), Some(b(3)));
        assert_eq!(s.to_dense(12).members(), vec![3, 4, 9]);
    }

    #[test]
    fn complement_is_cofinite() {
        let c = set(&[0, 2]).complement();
        assert!(c.is_cofinite());
        assert_eq!(c.to_dense(5).to_bit_string(), "01011");
        assert_eq!(c.complement(), set(&[0, 2]));
    }

    #[test]
    fn lex_order_matches_dense() {
        let cases: [(&[u64], &[u64]); 4] =
            [(&[1], &[0]), (&[0, 5], &[0, 4]), (&[2], &[2]), (&[], &[7])];
        for (x, y) in cases {
            let (sx, sy) = (set(x), set(y));
            let dense = crate::prefix::lex_cmp(&sx.to_dense(10), &sy.to_dense(10)).unwrap();
            assert_eq!(sparse_lex_cmp(&sx, &sy), dense, "{x:?} vs {y:?}");
        }
    }

    #[test]
    fn restrict_and_reflect() {
        let s = SparseSet::interval(b(2), b(8));
        assert_eq!(s.restrict(&b(4), &b(20)), SparseSet::interval(b(4), b(8)));
        // [0, 10] reflected: 2..=7 maps to 3..=8
        assert_eq!(s.reflect(&b(0), &b(10)), SparseSet::interval(b(3), b(9)));
        let p = set(&[11]);
        assert_eq!(p.reflect(&b(10), &b(20)), set(&[19]));
    }

    #[test]
    fn huge_positions_stay_arithmetic() {
        let x = pow2(200);
        let s = SparseSet::cofinite([x.clone()]);
        assert!(!s.contains(&x));
        assert!(s.contains(&(&x + 1u32)));
        assert_eq!(s.to_dense(8).count_ones(), 8);
    }

    #[test]
    fn validate_reports_decrease() {
        let p = SparseProcess::new("p", vec![set(&[5]), set(&[4]), set(&[6])]).unwrap();
        assert_eq!(p.validate(), SparseReport::Violation { stage: 1, position: b(4) });
    }
}
