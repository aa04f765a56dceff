//! Finite numberings `e -> α_e`, index sets, and their JSON file format.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prefix::Prefix;
use crate::process::{limit_estimate, ApproxProcess, Horizon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    InjectedCatalog,
    DerivedByConstruction,
}

/// An indexed family of processes sharing one horizon.
#[derive(Debug, Clone)]
pub struct Numbering {
    provenance: Provenance,
    horizon: Horizon,
    processes: Vec<ApproxProcess>,
}

impl Numbering {
    pub fn new(
        provenance: Provenance,
        horizon: Horizon,
        processes: Vec<ApproxProcess>,
    ) -> Result<Self> {
        if let Some((e, p)) = processes.iter().enumerate().find(|(_, p)| p.horizon() != horizon) {
            return Err(Error::usage(format!(
                "index {e} ({}) has horizon {:?}, numbering uses {horizon:?}",
                p.label(),
                p.horizon()
            )));
        }
        Ok(Numbering { provenance, horizon, processes })
    }

    pub fn catalog(horizon: Horizon, processes: Vec<ApproxProcess>) -> Result<Self> {
        Self::new(Provenance::InjectedCatalog, horizon, processes)
    }

    pub fn derived(horizon: Horizon, processes: Vec<ApproxProcess>) -> Result<Self> {
        Self::new(Provenance::DerivedByConstruction, horizon, processes)
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.processes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.processes.is_empty()
    }

    pub fn at(&self, e: usize) -> &ApproxProcess {
        &self.processes[e]
    }

    pub fn get(&self, e: usize) -> Option<&ApproxProcess> {
        self.processes.get(e)
    }

    pub fn processes(&self) -> &[ApproxProcess] {
        &self.processes
    }

    /// Final-stage prefixes, one per index.
    pub fn limits(&self) -> Vec<Prefix> {
        self.processes.iter().map(|p| p.final_prefix().clone()).collect()
    }

    pub fn push(&mut self, p: ApproxProcess) -> Result<()> {
        if p.horizon() != self.horizon {
            return Err(Error::usage("pushed process has a different horizon"));
        }
        self.processes.push(p);
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
        NumberingFile::from_json(&text)?.into_numbering()
    }
}

/// A decidable surrogate for a class of sets, evaluated on a process's
/// finite-horizon behavior.
#[derive(Clone)]
pub struct HorizonPredicate {
    name: String,
    decide: Arc<dyn Fn(&ApproxProcess) -> bool + Send + Sync>,
}

impl std::fmt::Debug for HorizonPredicate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HorizonPredicate({})", self.name)
    }
}

impl HorizonPredicate {
    pub fn new(
        name: impl Into<String>,
        decide: impl Fn(&ApproxProcess) -> bool + Send + Sync + 'static,
    ) -> Self {
        HorizonPredicate { name: name.into(), decide: Arc::new(decide) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn decide(&self, p: &ApproxProcess) -> bool {
        (self.decide)(p)
    }

    pub fn always() -> Self {
        Self::new("always", |_| true)
    }

    pub fn limit_nonempty() -> Self {
        Self::new("limit-nonempty", |p| limit_estimate(p).0.count_ones() > 0)
    }

    /// Limit estimate equals `target` (compared on the process's bits).
    pub fn limit_equals(target: Prefix) -> Self {
        Self::new(format!("limit-equals-{target}"), move |p| {
            p.final_prefix() == &target.resized(p.horizon().bits)
        })
    }

    /// Limit estimate has a 1 at or beyond `checkpoint`.
    pub fn one_beyond(checkpoint: usize) -> Self {
        Self::new(format!("one-at-or-beyond-{checkpoint}"), move |p| {
            p.final_prefix().members().last().is_some_and(|&m| m >= checkpoint)
        })
    }

    /// The approximation only ever adds elements, the finite-horizon shadow
    /// of being r.e.
    pub fn set_monotone() -> Self {
        Self::new("set-monotone", |p| {
            p.stages().windows(2).all(|w| w[0].is_subset_of(&w[1]))
        })
    }
}

/// `{e : pred(nu_e)}`.
pub fn index_set_estimate(nu: &Numbering, pred: &HorizonPredicate) -> BTreeSet<usize> {
    nu.processes.iter().enumerate().filter(|(_, p)| pred.decide(p)).map(|(e, _)| e).collect()
}

/// On-disk form of a process: the prefix at each stage where it changes.
/// The first snapshot must be at stage 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessFile {
    pub label: String,
    pub snapshots: Vec<(usize, String)>,
}

impl ProcessFile {
    pub fn from_process(p: &ApproxProcess) -> Self {
        let mut snapshots = vec![(0, p.prefix(0).to_bit_string())];
        for s in p.change_stages() {
            snapshots.push((s, p.prefix(s).to_bit_string()));
        }
        ProcessFile { label: p.label().to_string(), snapshots }
    }

    pub fn into_process(self, horizon: Horizon) -> Result<ApproxProcess> {
        let label = self.label;
        match self.snapshots.first() {
            Some((0, _)) => {}
            _ => return Err(Error::Parse(format!("process {label:?}: first snapshot must be stage 0"))),
        }
        let mut parsed: Vec<(usize, Prefix)> = Vec::with_capacity(self.snapshots.len());
        for (i, (s, bits)) in self.snapshots.into_iter().enumerate() {
            let p: Prefix = bits
                .parse()
                .map_err(|e| Error::Parse(format!("process {label:?} snapshot {i}: {e}")))?;
            if p.len() != horizon.bits {
                return Err(Error::Parse(format!(
                    "process {label:?} snapshot {i}: {} bits, horizon has {}",
                    p.len(),
                    horizon.bits
                )));
            }
            if parsed.last().is_some_and(|&(prev, _)| prev >= s) || s > horizon.stages {
                return Err(Error::Parse(format!(
                    "process {label:?} snapshot {i}: stage {s} out of order or past the horizon"
                )));
            }
            parsed.push((s, p));
        }
        let mut stages = Vec::with_capacity(horizon.stage_count());
        let mut k = 0;
        for s in 0..horizon.stage_count() {
            while k + 1 < parsed.len() && parsed[k + 1].0 <= s {
                k += 1;
            }
            stages.push(parsed[k].1.clone());
        }
        ApproxProcess::from_stages(label, stages)
    }
}

/// `{"horizon": {"stages": S, "bits": N}, "processes": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberingFile {
    pub horizon: Horizon,
    pub processes: Vec<ProcessFile>,
}

impl NumberingFile {
    pub fn from_numbering(nu: &Numbering) -> Self {
        NumberingFile {
            horizon: nu.horizon,
            processes: nu.processes.iter().map(ProcessFile::from_process).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("numbering files always serialize")
    }

    pub fn into_numbering(self) -> Result<Numbering> {
        let horizon = Horizon::new(self.horizon.stages, self.horizon.bits)?;
        let processes = self
            .processes
            .into_iter()
            .map(|p| p.into_process(horizon))
            .collect::<Result<Vec<_>>>()?;
        Numbering::catalog(horizon, processes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> Numbering {
        let h = Horizon::new(4, 6).unwrap();
        let procs = vec![
            ApproxProcess::constant("empty", h, &Prefix::zeros(6)),
            ApproxProcess::constant("one", h, &Prefix::from_members(6, [1])),
            ApproxProcess::from_fn("late", h, |s, n| s >= 3 && n == 5),
        ];
        Numbering::catalog(h, procs).unwrap()
    }

    #[test]
    fn index_set_examples() {
        let nu = catalog();
        assert_eq!(index_set_estimate(&nu, &HorizonPredicate::always()), BTreeSet::from([0, 1, 2]));
        assert_eq!(
            index_set_estimate(&nu, &HorizonPredicate::limit_nonempty()),
            BTreeSet::from([1, 2])
        );
        assert_eq!(index_set_estimate(&nu, &HorizonPredicate::one_beyond(4)), BTreeSet::from([2]));
    }

    #[test]
    fn file_round_trip_preserves_processes() {
        let nu = catalog();
        let text = NumberingFile::from_numbering(&nu).to_json();
        let back = NumberingFile::from_json(&text).unwrap().into_numbering().unwrap();
        assert_eq!(back.processes(), nu.processes());
    }

    #[test]
    fn file_errors_are_located() {
        let bad = r#"{"horizon":{"stages":2,"bits":3},"processes":[{"label":"x","snapshots":[[0,"01"]]}]}"#;
        let err = NumberingFile::from_json(bad).unwrap().into_numbering().unwrap_err();
        assert!(err.to_string().contains("snapshot 0"), "{err}");
        let truncated = r#"{"horizon":{"stages":2,"#;
        assert!(matches!(NumberingFile::from_json(truncated), Err(Error::Parse(_))));
    }

    #[test]
    fn empty_numbering_file_is_fine() {
        let nu = NumberingFile::from_json(r#"{"horizon":{"stages":2,"bits":3},"processes":[]}"#)
            .unwrap()
            .into_numbering()
            .unwrap();
        assert!(nu.is_empty());
    }
}
