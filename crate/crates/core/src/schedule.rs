//! Finite enumeration histories: r.e. sets (including the toy halting set),
//! the Ω-surrogate bit history, and limit-function approximations.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prefix::{lex_cmp, Prefix};
use crate::process::{ApproxProcess, Horizon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    ReSet,
    OmegaBits,
    KSet,
}

/// A finite list of `(element, entry stage)` pairs.
///
/// For `re-set` and `k-set` schedules an element is a member from its entry
/// stage on. For `omega-bits` an entry `(m, t)` means that at stage `t` bit
/// `m` is set and every bit after `m` is cleared; entries sharing a stage are
/// applied in list order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub entries: Vec<(u64, usize)>,
}

impl Schedule {
    pub fn new(kind: ScheduleKind, entries: Vec<(u64, usize)>) -> Self {
        Schedule { kind, entries }
    }

    pub fn empty(kind: ScheduleKind) -> Self {
        Schedule { kind, entries: Vec::new() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedules always serialize")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn last_stage(&self) -> usize {
        self.entries.iter().map(|&(_, s)| s).max().unwrap_or(0)
    }

    fn require_enumeration(&self, op: &str) -> Result<()> {
        match self.kind {
            ScheduleKind::ReSet | ScheduleKind::KSet => Ok(()),
            ScheduleKind::OmegaBits => {
                Err(Error::usage(format!("{op} needs an r.e. schedule, got omega-bits")))
            }
        }
    }

    /// Entry stage of `x`, if it ever enters.
    pub fn entry_stage(&self, x: u64) -> Result<Option<usize>> {
        self.require_enumeration("entry_stage")?;
        Ok(self.entries.iter().filter(|&&(e, _)| e == x).map(|&(_, s)| s).min())
    }

    /// Members by stage `s`.
    pub fn members_at(&self, s: usize) -> Result<BTreeSet<u64>> {
        self.require_enumeration("members_at")?;
        Ok(self.entries.iter().filter(|&&(_, t)| t <= s).map(|&(e, _)| e).collect())
    }

    /// Every element that ever enters.
    pub fn final_members(&self) -> Result<BTreeSet<u64>> {
        self.members_at(usize::MAX)
    }

    /// Characteristic process of an r.e. schedule, `W_s(n)` for `n < bits`.
    pub fn to_process(&self, label: &str, horizon: Horizon) -> Result<ApproxProcess> {
        self.require_enumeration("to_process")?;
        let mut entry = vec![usize::MAX; horizon.bits];
        for &(e, s) in &self.entries {
            if let Ok(i) = usize::try_from(e) {
                if i < horizon.bits {
                    entry[i] = entry[i].min(s);
                }
            }
        }
        Ok(ApproxProcess::from_fn(label, horizon, |s, n| entry[n] <= s))
    }

    /// `Ω_s` restricted to its first `bits` positions.
    pub fn omega_prefix(&self, s: usize, bits: usize) -> Result<Prefix> {
        if self.kind != ScheduleKind::OmegaBits {
            return Err(Error::usage(format!("omega_prefix on a {:?} schedule", self.kind)));
        }
        let mut ordered: Vec<(usize, usize, u64)> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, &(_, t))| t <= s)
            .map(|(i, &(m, t))| (t, i, m))
            .collect();
        ordered.sort_unstable();
        let mut p = Prefix::zeros(bits);
        for (_, _, m) in ordered {
            let Ok(m) = usize::try_from(m) else { continue };
            if m < bits {
                p.set(m, true);
                for later in m + 1..bits {
                    p.set(later, false);
                }
            }
        }
        Ok(p)
    }

    /// The Ω-surrogate as a dense process.
    pub fn omega_process(&self, label: &str, horizon: Horizon) -> Result<ApproxProcess> {
        let stages = (0..horizon.stage_count())
            .map(|s| self.omega_prefix(s, horizon.bits))
            .collect::<Result<Vec<_>>>()?;
        ApproxProcess::from_stages(label, stages)
    }

    /// Checks that the induced `Ω_s` never decreases lexicographically on
    /// the first `bits` positions over stages `0..=last entry stage`.
    pub fn validate_omega(&self, bits: usize) -> Result<()> {
        let mut prev = self.omega_prefix(0, bits)?;
        for s in 1..=self.last_stage() {
            let cur = self.omega_prefix(s, bits)?;
            if lex_cmp(&prev, &cur)? == std::cmp::Ordering::Greater {
                return Err(Error::input(format!(
                    "omega schedule decreases lexicographically at stage {s}"
                )));
            }
            prev = cur;
        }
        Ok(())
    }
}

/// `W_s(x)`: 1 iff `x` entered by stage `s`.
pub fn schedule_member(w: &Schedule, x: u64, s: usize) -> Result<bool> {
    Ok(w.entry_stage(x)?.is_some_and(|t| t <= s))
}

/// A stage-wise approximation `f_s(n)` to a limit-computable function.
///
/// `f_0(n) = initial[n]` (0 past the end of `initial`); a change
/// `(t, n, v)` sets `f_t(n) = v` and later stages inherit it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitFunctionApprox {
    #[serde(default)]
    pub initial: Vec<u64>,
    pub changes: Vec<(usize, usize, u64)>,
}

impl LimitFunctionApprox {
    pub fn new(initial: Vec<u64>, mut changes: Vec<(usize, usize, u64)>) -> Self {
        changes.sort_by_key(|&(t, n, _)| (t, n));
        LimitFunctionApprox { initial, changes }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: LimitFunctionApprox = serde_json::from_str(text)?;
        Ok(Self::new(raw.initial, raw.changes))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("limit approximations always serialize")
    }

    /// Number of arguments the approximation talks about.
    pub fn arg_count(&self) -> usize {
        let by_change = self.changes.iter().map(|&(_, n, _)| n + 1).max().unwrap_or(0);
        self.initial.len().max(by_change)
    }

    pub fn eval(&self, s: usize, n: usize) -> u64 {
        self.changes
            .iter()
            .rev()
            .find(|&&(t, m, _)| m == n && t <= s)
            .map(|&(_, _, v)| v)
            .unwrap_or_else(|| self.initial.get(n).copied().unwrap_or(0))
    }

    /// Last stage at which argument `n` changed value, if any.
    pub fn settled_by(&self, n: usize) -> Option<usize> {
        let mut last = None;
        let mut cur = self.initial.get(n).copied().unwrap_or(0);
        for &(t, m, v) in &self.changes {
            if m == n && v != cur {
                last = Some(t);
                cur = v;
            }
        }
        last
    }

    /// Value after every change has been applied.
    pub fn final_value(&self, n: usize) -> u64 {
        self.eval(usize::MAX, n)
    }

    /// Checks `max f_s < s` for every stage `s >= 1` up to the last change
    /// and every argument in range; later stages only inherit values.
    pub fn validate_bounded(&self) -> Result<()> {
        let last = self.changes.iter().map(|&(t, _, _)| t).max().unwrap_or(0).max(1);
        for s in 1..=last {
            for n in 0..self.arg_count() {
                let v = self.eval(s, n);
                if v >= s as u64 {
                    return Err(Error::input(format!(
                        "approximation violates max f_s < s: f_{s}({n}) = {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// True iff `f_s(n)` differs from `f_{s-1}(n)` for some argument; returns
    /// the least such argument.
    pub fn least_change(&self, s: usize) -> Option<usize> {
        if s == 0 {
            return None;
        }
        self.changes
            .iter()
            .filter(|&&(t, _, _)| t == s)
            .map(|&(_, n, _)| n)
            .filter(|&n| self.eval(s, n) != self.eval(s - 1, n))
            .min()
    }
}
