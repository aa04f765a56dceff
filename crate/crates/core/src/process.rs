//! Left-r.e. approximation processes on a finite horizon.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prefix::{lex_cmp, Prefix};

/// Number of trailing stages over which a limit estimate must be unchanged
/// to count as stable.
pub const DEFAULT_STABILITY_WINDOW: usize = 8;

/// The finite window every claim is evaluated in: stages `0..=stages` and
/// positions `0..bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Horizon {
    pub stages: usize,
    pub bits: usize,
}

impl Horizon {
    pub fn new(stages: usize, bits: usize) -> Result<Self> {
        if stages == 0 || bits == 0 {
            return Err(Error::usage(format!(
                "horizon must be positive, got {stages} stages x {bits} bits"
            )));
        }
        Ok(Horizon { stages, bits })
    }

    /// Number of stage snapshots, `stages + 1`.
    pub fn stage_count(&self) -> usize {
        self.stages + 1
    }
}

impl Default for Horizon {
    fn default() -> Self {
        Horizon { stages: 256, bits: 512 }
    }
}

/// A stage-indexed family of prefixes `A_0, A_1, ..., A_S`, each `bits` long.
///
/// Construction does not check lex-monotonicity; that is what
/// [`validate_left_re`] is for. Clones share the stage table.
#[derive(Clone, PartialEq, Eq)]
pub struct ApproxProcess {
    label: String,
    horizon: Horizon,
    stages: Arc<Vec<Prefix>>,
}

impl std::fmt::Debug for ApproxProcess {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ApproxProcess")
            .field("label", &self.label)
            .field("horizon", &self.horizon)
            .field("final", &self.final_prefix())
            .finish()
    }
}

impl ApproxProcess {
    /// Tabulates `eval(stage, position)` over the whole horizon.
    pub fn from_fn(
        label: impl Into<String>,
        horizon: Horizon,
        mut eval: impl FnMut(usize, usize) -> bool,
    ) -> Self {
        let stages = (0..horizon.stage_count())
            .map(|s| Prefix::from_bits((0..horizon.bits).map(|n| eval(s, n))))
            .collect();
        ApproxProcess { label: label.into(), horizon, stages: Arc::new(stages) }
    }

    /// Builds a process from one prefix per stage.
    pub fn from_stages(label: impl Into<String>, stages: Vec<Prefix>) -> Result<Self> {
        let label = label.into();
        let Some(first) = stages.first() else {
            return Err(Error::usage(format!("process {label:?} has no stages")));
        };
        let bits = first.len();
        if let Some((s, p)) = stages.iter().enumerate().find(|(_, p)| p.len() != bits) {
            return Err(Error::usage(format!(
                "process {label:?}: stage {s} has {} bits, expected {bits}",
                p.len()
            )));
        }
        if bits == 0 {
            return Err(Error::usage(format!("process {label:?} has zero-length prefixes")));
        }
        // A single stage is a legitimate (static) process.
        let horizon = Horizon { stages: stages.len() - 1, bits };
        Ok(ApproxProcess { label, horizon, stages: Arc::new(stages) })
    }

    /// The same prefix at every stage.
    pub fn constant(label: impl Into<String>, horizon: Horizon, prefix: &Prefix) -> Self {
        let p = prefix.resized(horizon.bits);
        ApproxProcess {
            label: label.into(),
            horizon,
            stages: Arc::new(vec![p; horizon.stage_count()]),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn bit(&self, stage: usize, pos: usize) -> bool {
        self.stages[stage].get(pos)
    }

    pub fn prefix(&self, stage: usize) -> &Prefix {
        &self.stages[stage]
    }

    pub fn final_prefix(&self) -> &Prefix {
        &self.stages[self.horizon.stages]
    }

    pub fn stages(&self) -> &[Prefix] {
        &self.stages
    }

    /// Stages at which the prefix differs from the previous stage.
    pub fn change_stages(&self) -> Vec<usize> {
        (1..self.stages.len()).filter(|&s| self.stages[s] != self.stages[s - 1]).collect()
    }
}

/// Outcome of [`validate_left_re`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ValidationReport {
    Ok,
    /// `prefix(stage) >lex prefix(stage + 1)`, first differing at `position`.
    Violation { stage: usize, position: usize },
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, ValidationReport::Ok)
    }
}

/// Checks `A_s <=lex A_{s+1}` for every consecutive stage pair and reports
/// the earliest violation.
pub fn validate_left_re(p: &ApproxProcess) -> ValidationReport {
    for s in 0..p.horizon.stages {
        let (a, b) = (&p.stages[s], &p.stages[s + 1]);
        if a.cmp_words(b) == Ordering::Greater {
            let position = a.first_difference(b).expect("unequal prefixes differ somewhere");
            return ValidationReport::Violation { stage: s, position };
        }
    }
    ValidationReport::Ok
}

/// `E ⊕ F`: position `2x` carries `e(x)` and position `2y+1` carries `f(y)`,
/// stage by stage. The output keeps the shared horizon, so only the first
/// `bits / 2` positions of each input are visible.
pub fn join(e: &ApproxProcess, f: &ApproxProcess) -> Result<ApproxProcess> {
    if e.horizon != f.horizon {
        return Err(Error::usage(format!(
            "join of processes on different horizons ({:?} vs {:?})",
            e.horizon, f.horizon
        )));
    }
    let label = format!("{}+{}", e.label, f.label);
    Ok(ApproxProcess::from_fn(label, e.horizon, |s, n| {
        if n % 2 == 0 {
            e.bit(s, n / 2)
        } else {
            f.bit(s, n / 2)
        }
    }))
}

/// Final-stage prefix plus whether it was unchanged over the last `window`
/// stage transitions.
pub fn limit_estimate_with_window(p: &ApproxProcess, window: usize) -> (Prefix, bool) {
    let last = p.horizon.stages;
    let from = last.saturating_sub(window);
    let fin = p.final_prefix();
    let stable = (from..last).all(|s| &p.stages[s] == fin);
    (fin.clone(), stable)
}

pub fn limit_estimate(p: &ApproxProcess) -> (Prefix, bool) {
    limit_estimate_with_window(p, DEFAULT_STABILITY_WINDOW)
}

impl Prefix {
    /// Lex order on the packed words; callers guarantee equal lengths.
    pub(crate) fn cmp_words(&self, other: &Prefix) -> Ordering {
        debug_assert_eq!(self.len(), other.len());
        lex_cmp(self, other).unwrap_or(Ordering::Equal)
    }
}
