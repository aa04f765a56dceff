//! Minimal and maximal left-r.e. sets from an Ω-surrogate, plus the
//! constructions built around them.
//!
//! Intervals `I_1, I_2, ...` tile the naturals from 0, with
//! `|I_n| = 2^{2^{n+1}} + 1`. Inside `I_n` the pairing
//! `⟨n, x, y⟩ = min(I_n) + x·2^{2^n} + y` never reaches `max(I_n)`, which
//! stays a spare slot. `A` holds one pairing value `a_n` per interval and
//! `B` misses exactly its reflection `b_n = g(a_n)`. Membership is always
//! decided arithmetically; nothing here materializes an interval.

mod gadgets;
mod lowerfarm;
mod maxsep;
mod split;

pub use gadgets::{max_join_gadget, tilde_a, tilde_a_subset};
pub use lowerfarm::lowerfarm_witness;
pub use maxsep::maxsep_superset;
pub use split::{split_complement, split_left_re};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::prefix::Prefix;
use crate::schedule::{Schedule, ScheduleKind};
use crate::sparse::{pow2, SparseProcess, SparseSet};

/// Default number of intervals carried by the construction.
pub const DEFAULT_INTERVALS: usize = 5;

/// Positions of `I_1, ..., I_{n_max}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    n_max: usize,
    /// `offsets[k] = min(I_{k+1})`, one extra entry for the end of the last
    /// interval.
    offsets: Vec<BigUint>,
}

impl BlockLayout {
    pub fn new(n_max: usize) -> Result<Self> {
        if !(1..=8).contains(&n_max) {
            return Err(Error::usage(format!("interval count must be in 1..=8, got {n_max}")));
        }
        let mut offsets = vec![BigUint::zero()];
        for n in 1..=n_max {
            let next = offsets.last().unwrap() + Self::size(n);
            offsets.push(next);
        }
        Ok(BlockLayout { n_max, offsets })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `2^{2^n}`.
    pub fn base(n: usize) -> BigUint {
        pow2(1 << n)
    }

    /// `|I_n| = 2^{2^{n+1}} + 1`.
    pub fn size(n: usize) -> BigUint {
        pow2(1 << (n + 1)) + 1u32
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.n_max {
            return Err(Error::usage(format!("interval I_{n} is outside 1..={}", self.n_max)));
        }
        Ok(())
    }

    /// `min(I_n)`.
    pub fn offset(&self, n: usize) -> Result<&BigUint> {
        self.check(n)?;
        Ok(&self.offsets[n - 1])
    }

    /// `max(I_n)`.
    pub fn max(&self, n: usize) -> Result<BigUint> {
        self.check(n)?;
        Ok(&self.offsets[n] - 1u32)
    }

    /// First position past every interval up to `I_n`.
    pub fn end(&self, n: usize) -> &BigUint {
        &self.offsets[n.min(self.n_max)]
    }

    /// `⟨n, x, y⟩`.
    pub fn pair(&self, n: usize, x: &BigUint, y: &BigUint) -> Result<BigUint> {
        Ok(self.offset(n)? + x * Self::base(n) + y)
    }

    /// `ind(u)`: the `n` with `u ∈ I_n`.
    pub fn ind(&self, u: &BigUint) -> Option<usize> {
        let k = self.offsets.partition_point(|o| o <= u);
        (1..=self.n_max).contains(&k).then_some(k)
    }

    /// `g(u) = max(I_n) + min(I_n) - u` on `I_n`.
    pub fn reflect(&self, n: usize, u: &BigUint) -> Result<BigUint> {
        let (lo, hi) = (self.offset(n)?, self.max(n)?);
        if u < lo || u > &hi {
            return Err(Error::usage(format!("{u} is not in I_{n}")));
        }
        Ok(lo + &hi - u)
    }
}

/// One row of the per-stage marker table; decimal strings keep traces
/// bit-exact at any size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkerRow {
    pub n: usize,
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
}

/// The Ω-surrogate history and everything derived from it.
#[derive(Debug, Clone)]
pub struct ZuluState {
    layout: BlockLayout,
    stages: usize,
    omega: Vec<Prefix>,
}

impl ZuluState {
    /// Reads `Ω_s` on its first `2^{n_max}` bits for stages `0..=stages`.
    /// Requires a lex-monotone schedule with `Ω(0) = 0` throughout, since
    /// `c_n <= 2^{2^n}` depends on it.
    pub fn new(omega: &Schedule, layout: BlockLayout, stages: usize) -> Result<Self> {
        if omega.kind != ScheduleKind::OmegaBits {
            return Err(Error::usage(format!("zulu needs an omega-bits schedule, got {:?}", omega.kind)));
        }
        let width = 1 << layout.n_max;
        omega.validate_omega(width)?;
        let omega = (0..=stages).map(|s| omega.omega_prefix(s, width)).collect::<Result<Vec<_>>>()?;
        if let Some(s) = omega.iter().position(|p| p.get(0)) {
            return Err(Error::input(format!(
                "Ω(0) = 1 at stage {s}; the bound c_n <= 2^(2^n) needs Ω(0) = 0"
            )));
        }
        Ok(ZuluState { layout, stages, omega })
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    /// First stage the construction runs from; `Ω(0)` never changes.
    pub fn s0(&self) -> usize {
        0
    }

    pub fn omega(&self, s: usize) -> &Prefix {
        &self.omega[s.min(self.stages)]
    }

    /// Intervals carrying a marker at stage `s`.
    pub fn covered(&self, s: usize) -> usize {
        s.min(self.layout.n_max)
    }

    /// `c_{n,s} = Σ_{m < 2^n} 2^{2^n - m} Ω_s(m)`.
    pub fn c(&self, n: usize, s: usize) -> Result<BigUint> {
        if n > self.layout.n_max {
            return Err(Error::usage(format!("c_{n} needs Ω bits past 2^{}", self.layout.n_max)));
        }
        let top = 1usize << n;
        let omega = self.omega(s);
        Ok((0..top).filter(|&m| omega.get(m)).map(|m| pow2(top - m)).sum())
    }

    /// `d_{n,s} = c_{n,s} - 2^{2^{n-1}} c_{n-1,s}`.
    pub fn d(&self, n: usize, s: usize) -> Result<BigUint> {
        if n == 0 {
            return Err(Error::usage("d_n is defined for n >= 1"));
        }
        let low = BlockLayout::base(n - 1) * self.c(n - 1, s)?;
        let c = self.c(n, s)?;
        if c < low {
            return Err(Error::invariant(format!("c_{n} < 2^(2^{}) c_{} at stage {s}", n - 1, n - 1)));
        }
        Ok(c - low)
    }

    /// `(a_{n,s}, b_{n,s})` with `a_n = ⟨n, c_{n-1}, 2^{2^n} - 1 - d_n⟩` and
    /// `b_n = g(a_n)`.
    pub fn markers(&self, n: usize, s: usize) -> Result<(BigUint, BigUint)> {
        self.layout.check(n)?;
        let top = BlockLayout::base(n) - 1u32;
        let d = self.d(n, s)?;
        if d > top {
            return Err(Error::invariant(format!("d_{{{n},{s}}} = {d} exceeds 2^(2^{n}) - 1")));
        }
        let a = self.layout.pair(n, &self.c(n - 1, s)?, &(top - d))?;
        let b = self.layout.reflect(n, &a)?;
        Ok((a, b))
    }

    pub fn marker_rows(&self, s: usize) -> Result<Vec<MarkerRow>> {
        (1..=self.covered(s))
            .map(|n| {
                let (a, b) = self.markers(n, s)?;
                Ok(MarkerRow {
                    n,
                    a: a.to_string(),
                    b: b.to_string(),
                    c: self.c(n, s)?.to_string(),
                    d: self.d(n, s)?.to_string(),
                })
            })
            .collect()
    }

    /// `A_s = {a_{n,s} : 1 <= n <= s}`.
    pub fn minimal_at(&self, s: usize) -> Result<SparseSet> {
        let points = (1..=self.covered(s)).map(|n| self.markers(n, s).map(|(a, _)| a)).collect::<Result<Vec<_>>>()?;
        Ok(SparseSet::from_points(points))
    }

    /// `B_s = ⋃_{1 <= n <= s} (I_n - {b_{n,s}})`.
    pub fn maximal_at(&self, s: usize) -> Result<SparseSet> {
        let k = self.covered(s);
        let points = (1..=k).map(|n| self.markers(n, s).map(|(_, b)| b)).collect::<Result<Vec<_>>>()?;
        let span = SparseSet::interval(BigUint::zero(), self.layout.end(k).clone());
        Ok(span.symmetric_difference(&SparseSet::from_points(points)))
    }

    pub fn build_minimal(&self) -> Result<SparseProcess> {
        let stages = (0..=self.stages).map(|s| self.minimal_at(s)).collect::<Result<Vec<_>>>()?;
        SparseProcess::new("zulu-A", stages)
    }

    pub fn build_maximal(&self) -> Result<SparseProcess> {
        let stages = (0..=self.stages).map(|s| self.maximal_at(s)).collect::<Result<Vec<_>>>()?;
        SparseProcess::new("zulu-B", stages)
    }
}

pub fn build_minimal(omega: &Schedule, layout: BlockLayout, stages: usize) -> Result<SparseProcess> {
    ZuluState::new(omega, layout, stages)?.build_minimal()
}

pub fn build_maximal(omega: &Schedule, layout: BlockLayout, stages: usize) -> Result<SparseProcess> {
    ZuluState::new(omega, layout, stages)?.build_maximal()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BttFailure {
    pub stage: usize,
    pub interval: usize,
    /// A position `u` with `u ∈ A` disagreeing with `g(u) ∉ B`.
    pub u: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BttReport {
    /// Number of `(stage, interval)` pairs checked.
    pub checked: usize,
    pub failure: Option<BttFailure>,
}

impl BttReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks `u ∈ A_s ⇔ g(u) ∉ B_s` for every `u` of every interval touched by
/// `A_s ∪ B_s`, at every stage, by comparing `A_s ∩ I_n` with the
/// reflection of `I_n - B_s`.
pub fn btt_check(a: &SparseProcess, b: &SparseProcess, layout: &BlockLayout) -> Result<BttReport> {
    if a.last_stage() != b.last_stage() {
        return Err(Error::usage("A and B have different stage counts"));
    }
    let mut checked = 0;
    for s in 0..=a.last_stage() {
        for n in 1..=layout.n_max() {
            let lo = layout.offset(n)?;
            let end = layout.end(n);
            let hi = layout.max(n)?;
            let a_part = a.stage(s).restrict(lo, end);
            let b_part = b.stage(s).restrict(lo, end);
            if a_part.is_empty() && b_part.is_empty() {
                continue;
            }
            checked += 1;
            let missing = SparseSet::interval(lo.clone(), end.clone()).symmetric_difference(&b_part);
            let image = missing.reflect(lo, &hi);
            if let Some(u) = a_part.symmetric_difference(&image).min() {
                return Ok(BttReport {
                    checked,
                    failure: Some(BttFailure { stage: s, interval: n, u: u.to_string() }),
                });
            }
        }
    }
    Ok(BttReport { checked, failure: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega(entries: &[(u64, usize)]) -> Schedule {
        Schedule::new(ScheduleKind::OmegaBits, entries.to_vec())
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn layout_shape() {
        let l = BlockLayout::new(3).unwrap();
        assert_eq!(l.offset(1).unwrap(), &big(0));
        assert_eq!(l.max(1).unwrap(), big(16));
        assert_eq!(l.offset(2).unwrap(), &big(17));
        assert_eq!(l.offset(3).unwrap(), &big(17 + 257));
        assert_eq!(l.ind(&big(16)), Some(1));
        assert_eq!(l.ind(&big(17)), Some(2));
        let top = BlockLayout::base(2) - 1u32;
        assert!(l.pair(2, &top, &top).unwrap() < l.max(2).unwrap());
    }

    #[test]
    fn worked_example_0100() {
        let state = ZuluState::new(&omega(&[(1, 0)]), BlockLayout::new(2).unwrap(), 4).unwrap();
        assert_eq!(state.c(1, 2).unwrap(), big(2));
        assert_eq!(state.c(2, 2).unwrap(), big(8));
        assert_eq!(state.markers(1, 2).unwrap(), (big(1), big(15)));
        assert_eq!(state.markers(2, 2).unwrap().0, big(17 + 32 + 15));
    }

    #[test]
    fn zero_omega_is_static() {
        let state = ZuluState::new(&Schedule::empty(ScheduleKind::OmegaBits), BlockLayout::new(3).unwrap(), 6).unwrap();
        for n in 1..=3 {
            let (a, _) = state.markers(n, 6).unwrap();
            let top = BlockLayout::base(n) - 1u32;
            assert_eq!(a, state.layout().pair(n, &BigUint::zero(), &top).unwrap());
        }
        let a = state.build_minimal().unwrap();
        assert!(a.validate().is_ok());
        assert_eq!(a.stage(5), a.stage(6));
    }

    #[test]
    fn omega_zero_bit_is_rejected() {
        let r = ZuluState::new(&omega(&[(0, 2)]), BlockLayout::new(2).unwrap(), 4);
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn btt_holds_and_mismatch_is_caught() {
        let layout = BlockLayout::new(3).unwrap();
        let w1 = omega(&[(3, 1), (2, 3), (5, 4)]);
        let s1 = ZuluState::new(&w1, layout.clone(), 6).unwrap();
        let (a, b) = (s1.build_minimal().unwrap(), s1.build_maximal().unwrap());
        assert!(a.validate().is_ok() && b.validate().is_ok());
        assert!(btt_check(&a, &b, &layout).unwrap().passed());
        let s2 = ZuluState::new(&omega(&[(1, 1)]), layout.clone(), 6).unwrap();
        let report = btt_check(&a, &s2.build_maximal().unwrap(), &layout).unwrap();
        assert!(!report.passed());
    }
}
