//! Movable markers: a co-r.e. retraceable set `I = {i_0 < i_1 < ...}` whose
//! markers end up above a limit-computable function.

use crate::error::{Error, Result};
use crate::prefix::Prefix;
use crate::process::{ApproxProcess, Horizon};
use crate::schedule::{LimitFunctionApprox, Schedule, ScheduleKind};

/// The result of [`build_retraceable`]: for every position, the stage it
/// left `I` (if it did), plus the per-stage move events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerSystem {
    horizon: Horizon,
    removed_at: Vec<Option<usize>>,
    /// `(stage, least moved marker)` for every stage that removed something.
    moves: Vec<(usize, usize)>,
    f: LimitFunctionApprox,
}

/// Runs the marker construction against `f` on `horizon`.
///
/// At stage `s + 1`, with `n` the least argument where `f_s` and `f_{s+1}`
/// differ, the positions of `I_s` inside `[i_{n,s}, s + 1)` are removed, so
/// markers `k >= n` move to positions `>= s + 1` and smaller markers stay.
pub fn build_retraceable(f: &LimitFunctionApprox, horizon: Horizon) -> Result<MarkerSystem> {
    f.validate_bounded()?;
    let bits = horizon.bits;
    let mut removed_at = vec![None; bits];
    let mut present: Vec<usize> = (0..bits).collect();
    let mut moves = Vec::new();
    for s in 0..horizon.stages {
        let Some(n) = f.least_change(s + 1) else { continue };
        let Some(&start) = present.get(n) else { continue };
        let end = (s + 1).min(bits);
        if start >= end {
            continue;
        }
        for &p in present.iter().skip(n).take_while(|&&p| p < end) {
            removed_at[p] = Some(s + 1);
        }
        present.retain(|&p| removed_at[p].is_none());
        moves.push((s + 1, n));
    }
    Ok(MarkerSystem { horizon, removed_at, moves, f: f.clone() })
}

/// `I` with nothing ever removed: `i_n = n`.
pub fn trivial_marker_system(horizon: Horizon) -> MarkerSystem {
    MarkerSystem {
        horizon,
        removed_at: vec![None; horizon.bits],
        moves: Vec::new(),
        f: LimitFunctionApprox::new(Vec::new(), Vec::new()),
    }
}

impl MarkerSystem {
    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn limit_function(&self) -> &LimitFunctionApprox {
        &self.f
    }

    pub fn moves(&self) -> &[(usize, usize)] {
        &self.moves
    }

    /// Stage at which `pos` left `I`, if ever.
    pub fn removed_at(&self, pos: usize) -> Option<usize> {
        self.removed_at[pos]
    }

    /// `pos ∈ I_s`.
    pub fn present(&self, pos: usize, s: usize) -> bool {
        self.removed_at[pos].is_none_or(|r| s < r)
    }

    /// `pos` has been removed at some stage `<= s`.
    pub fn removed(&self, pos: usize, s: usize) -> bool {
        !self.present(pos, s)
    }

    /// Members of `I_s` on the horizon, ascending.
    pub fn members_at(&self, s: usize) -> Vec<usize> {
        (0..self.horizon.bits).filter(|&p| self.present(p, s)).collect()
    }

    pub fn final_members(&self) -> Vec<usize> {
        self.members_at(self.horizon.stages)
    }

    /// `i_{k,s}`, if at least `k + 1` positions of the horizon are still in
    /// `I_s`.
    pub fn marker(&self, k: usize, s: usize) -> Option<usize> {
        (0..self.horizon.bits).filter(|&p| self.present(p, s)).nth(k)
    }

    /// Final markers.
    pub fn final_markers(&self) -> Vec<usize> {
        self.final_members()
    }

    /// Final markers `i_n` whose position no longer depends on changes of
    /// `f` past the horizon and whose snapshot `I_{i_n + 1}` exists.
    pub fn settled_markers(&self) -> Vec<usize> {
        let stages = self.horizon.stages;
        let mut out = Vec::new();
        for (n, i) in self.final_markers().into_iter().enumerate() {
            let late = self.f.changes.iter().any(|&(t, m, _)| m <= n && t > stages);
            if late || i + 1 > stages {
                break;
            }
            out.push(i);
        }
        out
    }

    fn snapshot_stage(&self, x: usize) -> Result<usize> {
        if x >= self.horizon.bits || x + 1 > self.horizon.stages {
            return Err(Error::capacity(format!(
                "snapshot I_{} is outside the horizon ({} stages x {} bits)",
                x + 1,
                self.horizon.stages,
                self.horizon.bits
            )));
        }
        Ok(x + 1)
    }

    /// The retrace function: `i_0` if `x <= i_1`, otherwise the greatest
    /// member of `I_{x+1}` below `x`.
    pub fn retrace(&self, x: usize) -> Result<usize> {
        let s = self.snapshot_stage(x)?;
        let markers = self.final_markers();
        let (Some(&i0), Some(&i1)) = (markers.first(), markers.get(1)) else {
            return Err(Error::capacity("fewer than two final markers on the horizon"));
        };
        if x <= i1 {
            return Ok(i0);
        }
        Ok((0..x).rev().find(|&p| self.present(p, s)).unwrap_or(i0))
    }

    /// `|I_{x+1} ∩ [0, x]| - 1`, so that `count_h(i_n) = n`.
    pub fn count_h(&self, x: usize) -> Result<usize> {
        let s = self.snapshot_stage(x)?;
        Ok((0..=x).filter(|&p| self.present(p, s)).count().saturating_sub(1))
    }

    /// Characteristic process of `I` itself. Co-r.e.: bits only go 1 -> 0.
    pub fn set_process(&self) -> ApproxProcess {
        ApproxProcess::from_fn("I", self.horizon, |s, n| self.present(n, s))
    }

    /// Characteristic process of the complement of `I`; left-r.e.
    pub fn complement_process(&self) -> ApproxProcess {
        ApproxProcess::from_fn("co-I", self.horizon, |s, n| self.removed(n, s))
    }

    /// The complement of `I` as an r.e. schedule of removals.
    pub fn complement_schedule(&self) -> Schedule {
        let entries = self
            .removed_at
            .iter()
            .enumerate()
            .filter_map(|(p, r)| r.map(|s| (p as u64, s)))
            .collect();
        Schedule::new(ScheduleKind::ReSet, entries)
    }

    /// Final characteristic prefix of `I`.
    pub fn final_prefix(&self) -> Prefix {
        Prefix::from_members(self.horizon.bits, self.final_members())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h() -> Horizon {
        Horizon::new(64, 48).unwrap()
    }

    #[test]
    fn zero_function_keeps_everything() {
        let m = build_retraceable(&LimitFunctionApprox::new(vec![], vec![]), h()).unwrap();
        assert_eq!(m.final_markers(), (0..48).collect::<Vec<_>>());
        assert_eq!(m.retrace(5).unwrap(), 4);
        assert_eq!(m.count_h(7).unwrap(), 7);
    }

    #[test]
    fn change_moves_markers_from_least_changed_argument() {
        // f(1) becomes 3 at stage 4: positions [1, 4) leave I.
        let f = LimitFunctionApprox::new(vec![], vec![(4, 1, 3)]);
        let m = build_retraceable(&f, h()).unwrap();
        assert_eq!(m.marker(1, 3), Some(1));
        assert_eq!(m.marker(1, 4), Some(4));
        assert_eq!(m.marker(0, 4), Some(0));
        assert_eq!(m.removed_at(2), Some(4));
        assert_eq!(m.final_markers()[..3], [0, 4, 5]);
    }

    #[test]
    fn unbounded_approximation_is_rejected() {
        let f = LimitFunctionApprox::new(vec![], vec![(2, 0, 5)]);
        assert!(matches!(build_retraceable(&f, h()), Err(Error::Input(_))));
    }

    #[test]
    fn off_horizon_snapshot_is_a_capacity_error() {
        let m = trivial_marker_system(Horizon::new(4, 10).unwrap());
        assert!(matches!(m.retrace(5), Err(Error::Capacity(_))));
    }
}
