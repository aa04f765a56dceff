//! Inclusion and lexicographic relations over numberings.

mod gazebo;
mod inclusion;

pub use gazebo::{gazebo_lex_emissions, gazebo_run, GazeboEvent, GazeboState};
pub use inclusion::{b_from_k, decide_k_below, decode_with_bruteforce, k_decoding_numbering, KDecodeOutcome};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numbering::Numbering;
use crate::prefix::{lex_cmp, Prefix};
use crate::process::limit_estimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationMode {
    Inclusion,
    Lex,
}

/// A set of index pairs, each with the stage it was emitted at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationOracle {
    pub mode: RelationMode,
    pub pairs: BTreeMap<(usize, usize), usize>,
}

impl RelationOracle {
    pub fn new(mode: RelationMode) -> Self {
        RelationOracle { mode, pairs: BTreeMap::new() }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.contains_key(&(i, j))
    }

    /// `(i, j)` has been emitted by stage `s`.
    pub fn emitted_by(&self, i: usize, j: usize, s: usize) -> bool {
        self.pairs.get(&(i, j)).is_some_and(|&t| t <= s)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs in `(stage, i, j)` order, the order they are revealed in.
    pub fn revealed(&self) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<_> = self.pairs.iter().map(|(&(i, j), &s)| (s, i, j)).collect();
        out.sort_unstable();
        out
    }

    /// CSV dump, `i,j,stage` per line, sorted by pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,stage\n");
        for (&(i, j), &s) in &self.pairs {
            out.push_str(&format!("{i},{j},{s}\n"));
        }
        out
    }
}

fn holds(mode: RelationMode, a: &Prefix, b: &Prefix) -> bool {
    match mode {
        RelationMode::Inclusion => a.is_subset_of(b),
        RelationMode::Lex => lex_cmp(a, b).is_ok_and(|o| o != std::cmp::Ordering::Greater),
    }
}

/// Pairs whose relation holds between the final prefixes, each stamped with
/// the first stage from which it holds through the end of the horizon.
fn bruteforce(nu: &Numbering, mode: RelationMode) -> RelationOracle {
    let last = nu.horizon().stages;
    let mut oracle = RelationOracle::new(mode);
    for (i, p) in nu.processes().iter().enumerate() {
        for (j, q) in nu.processes().iter().enumerate() {
            if !holds(mode, p.final_prefix(), q.final_prefix()) {
                continue;
            }
            let mut from = last;
            while from > 0 && holds(mode, p.prefix(from - 1), q.prefix(from - 1)) {
                from -= 1;
            }
            oracle.pairs.insert((i, j), from);
        }
    }
    oracle
}

/// `{(i, j) : ν_i ⊆ ν_j}` on limit estimates. Refuses numberings with an
/// unstable limit estimate.
pub fn inc_oracle_bruteforce(nu: &Numbering) -> Result<RelationOracle> {
    if let Some((i, p)) = nu.processes().iter().enumerate().find(|(_, p)| !limit_estimate(p).1) {
        return Err(Error::input(format!(
            "index {i} ({}) has an unstable limit estimate; the inclusion oracle needs settled sets",
            p.label()
        )));
    }
    Ok(bruteforce(nu, RelationMode::Inclusion))
}

/// `{(i, j) : ν_i <=lex ν_j}` on final prefixes.
pub fn lex_oracle_bruteforce(nu: &Numbering) -> RelationOracle {
    bruteforce(nu, RelationMode::Lex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{ApproxProcess, Horizon};

    fn catalog(finals: &[&str]) -> Numbering {
        let h = Horizon::new(10, 4).unwrap();
        let procs = finals
            .iter()
            .map(|f| ApproxProcess::constant("c", h, &f.parse().unwrap()))
            .collect();
        Numbering::catalog(h, procs).unwrap()
    }

    #[test]
    fn inclusion_basics() {
        let nu = catalog(&["0000", "0110", "0100", "1001"]);
        let inc = inc_oracle_bruteforce(&nu).unwrap();
        for i in 0..4 {
            assert!(inc.contains(i, i));
            assert!(inc.contains(0, i));
        }
        assert!(inc.contains(2, 1) && !inc.contains(1, 2) && !inc.contains(1, 3));
        assert_eq!(inc.pairs[&(2, 1)], 0);
    }

    #[test]
    fn unstable_numbering_is_refused() {
        let h = Horizon::new(10, 4).unwrap();
        let p = ApproxProcess::from_fn("late", h, |s, n| s == 10 && n == 0);
        let nu = Numbering::catalog(h, vec![p]).unwrap();
        assert!(matches!(inc_oracle_bruteforce(&nu), Err(Error::Input(_))));
    }

    #[test]
    fn emission_stage_is_when_the_relation_settles() {
        let h = Horizon::new(10, 4).unwrap();
        let a = ApproxProcess::from_fn("a", h, |s, n| n == 3 || (s < 2 && n == 0));
        let b = ApproxProcess::constant("b", h, &"0011".parse().unwrap());
        let nu = Numbering::catalog(h, vec![a, b]).unwrap();
        assert_eq!(inc_oracle_bruteforce(&nu).unwrap().pairs[&(0, 1)], 2);
        assert_eq!(lex_oracle_bruteforce(&nu).pairs[&(0, 1)], 2);
    }

    #[test]
    fn csv_format() {
        let inc = inc_oracle_bruteforce(&catalog(&["0000", "1000"])).unwrap();
        assert_eq!(inc.to_csv(), "i,j,stage\n0,0,0\n0,1,0\n1,1,0\n");
    }
}
