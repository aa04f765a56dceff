use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{RelationMode, RelationOracle};
use crate::error::{Error, Result};
use crate::numbering::Numbering;
use crate::prefix::{lex_cmp, Prefix};
use crate::process::ApproxProcess;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum GazeboEvent {
    /// `β_passer` went from `<=lex β_passed` to `>lex β_passed`.
    Crossing { stage: usize, passer: usize, passed: usize },
    Obliterated { stage: usize, alpha: usize },
    Follower { stage: usize, beta: usize, alpha: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Follows { beta: usize, from: usize },
    /// Followed `beta` from `from`, all ones from `at`.
    Obliterated { beta: usize, from: usize, at: usize },
}

/// The whole run: who followed whom, when indices were obliterated, and
/// every emitted lex pair.
#[derive(Debug, Clone)]
pub struct GazeboState {
    slots: Vec<Slot>,
    /// Current follower per β-index, by stage.
    follower_table: Vec<BTreeMap<usize, usize>>,
    pub events: Vec<GazeboEvent>,
    pub emissions: BTreeMap<(usize, usize), usize>,
}

impl GazeboState {
    pub fn alpha_count(&self) -> usize {
        self.slots.len()
    }

    pub fn followers_at(&self, s: usize) -> &BTreeMap<usize, usize> {
        &self.follower_table[s]
    }

    /// Stage at which α-index `a` was obliterated, if it was.
    pub fn obliterated_at(&self, a: usize) -> Option<usize> {
        match self.slots[a] {
            Slot::Obliterated { at, .. } => Some(at),
            Slot::Follows { .. } => None,
        }
    }

    /// Stage at which α-index `a` was first defined.
    pub fn defined_at(&self, a: usize) -> usize {
        match self.slots[a] {
            Slot::Follows { from, .. } | Slot::Obliterated { from, .. } => from,
        }
    }

    pub fn obliterations(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Obliterated { .. })).count()
    }
}

/// Runs the follower/obliteration construction over `β`.
///
/// A follower for `β_s` is established at stage `s`. Whenever some `β_i`
/// passes `β_j`, the follower of `β_j` and every larger α-index is
/// obliterated, and so is every index `b` with an emitted pair `(a, b)` from
/// an obliterated `a`. Each affected β-index then gets a fresh follower, in
/// ascending β order. Pairs are emitted at every stage by the rule of
/// [`emit`].
pub fn gazebo_run(beta: &Numbering) -> Result<(Numbering, GazeboState)> {
    let h = beta.horizon();
    let ones = Prefix::ones(h.bits);
    if let Some(i) = beta.processes().iter().position(|p| p.final_prefix() == &ones) {
        return Err(Error::input(format!("β_{i} is the all-ones set, which obliteration reserves")));
    }
    let mut slots: Vec<Slot> = Vec::new();
    let mut follower: BTreeMap<usize, usize> = BTreeMap::new();
    let mut events = Vec::new();
    let mut emissions: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut table = Vec::with_capacity(h.stage_count());
    let leq = |i: usize, j: usize, s: usize| {
        lex_cmp(beta.at(i).prefix(s), beta.at(j).prefix(s)) != Ok(std::cmp::Ordering::Greater)
    };

    for s in 0..h.stage_count() {
        let mut doomed: BTreeSet<usize> = BTreeSet::new();
        if s > 0 {
            for &i in follower.keys() {
                for &j in follower.keys() {
                    if i != j && leq(i, j, s - 1) && !leq(i, j, s) {
                        events.push(GazeboEvent::Crossing { stage: s, passer: i, passed: j });
                        let a = follower[&j];
                        doomed.extend(a..slots.len());
                    }
                }
            }
        }
        let mut queue: Vec<usize> = doomed.iter().copied().collect();
        while let Some(a) = queue.pop() {
            for (&(x, y), _) in emissions.range((a, 0)..=(a, usize::MAX)) {
                debug_assert_eq!(x, a);
                if doomed.insert(y) {
                    queue.push(y);
                }
            }
        }
        let mut affected = Vec::new();
        for &a in &doomed {
            if let Slot::Follows { beta: i, from } = slots[a] {
                slots[a] = Slot::Obliterated { beta: i, from, at: s };
                events.push(GazeboEvent::Obliterated { stage: s, alpha: a });
                if follower.get(&i) == Some(&a) {
                    follower.remove(&i);
                    affected.push(i);
                }
            }
        }
        affected.sort_unstable();
        if s < beta.len() {
            affected.push(s);
        }
        for i in affected {
            let a = slots.len();
            slots.push(Slot::Follows { beta: i, from: s });
            follower.insert(i, a);
            events.push(GazeboEvent::Follower { stage: s, beta: i, alpha: a });
        }
        emit(&slots, beta, s, &mut emissions);
        table.push(follower.clone());
    }

    // Indices whose β never got a follower stay undefined; every slot so
    // far is materialized as a process.
    let procs = slots
        .iter()
        .enumerate()
        .map(|(a, slot)| {
            let (i, from, at) = match *slot {
                Slot::Follows { beta, from } => (beta, from, usize::MAX),
                Slot::Obliterated { beta, from, at } => (beta, from, at),
            };
            let stages = (0..h.stage_count())
                .map(|t| {
                    if t < from {
                        Prefix::zeros(h.bits)
                    } else if t >= at {
                        ones.clone()
                    } else {
                        beta.at(i).prefix(t).clone()
                    }
                })
                .collect();
            ApproxProcess::from_stages(format!("alpha{a}"), stages)
        })
        .collect::<Result<Vec<_>>>()?;
    let alpha = Numbering::derived(h, procs)?;
    Ok((alpha, GazeboState { slots, follower_table: table, events, emissions }))
}

/// Emits `(a, b)` when `b` is obliterated, `a = b`, or both follow β-indices
/// `i`, `j` with `β_{i,s} <=lex β_{j,s}`.
fn emit(slots: &[Slot], beta: &Numbering, s: usize, emissions: &mut BTreeMap<(usize, usize), usize>) {
    for (a, sa) in slots.iter().enumerate() {
        for (b, sb) in slots.iter().enumerate() {
            if emissions.contains_key(&(a, b)) {
                continue;
            }
            let ok = match (sa, sb) {
                _ if a == b => true,
                (_, Slot::Obliterated { .. }) => true,
                (Slot::Follows { beta: i, .. }, Slot::Follows { beta: j, .. }) => {
                    lex_cmp(beta.at(*i).prefix(s), beta.at(*j).prefix(s)) != Ok(std::cmp::Ordering::Greater)
                }
                _ => false,
            };
            if ok {
                emissions.insert((a, b), s);
            }
        }
    }
}

/// The emitted pairs as a lex relation oracle.
pub fn gazebo_lex_emissions(state: &GazeboState, alpha: &Numbering) -> RelationOracle {
    debug_assert_eq!(state.alpha_count(), alpha.len());
    RelationOracle { mode: RelationMode::Lex, pairs: state.emissions.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{validate_left_re, Horizon};
    use crate::relations::lex_oracle_bruteforce;

    fn h() -> Horizon {
        Horizon::new(12, 6).unwrap()
    }

    #[test]
    fn sorted_static_catalog_never_obliterates() {
        let finals = ["000001", "000100", "010000"];
        let procs = finals
            .iter()
            .map(|f| ApproxProcess::constant("b", h(), &f.parse().unwrap()))
            .collect();
        let beta = Numbering::catalog(h(), procs).unwrap();
        let (alpha, state) = gazebo_run(&beta).unwrap();
        assert_eq!(state.obliterations(), 0);
        assert_eq!(alpha.len(), 3);
        for (a, b) in alpha.processes().iter().zip(beta.processes()) {
            assert_eq!(a.final_prefix(), b.final_prefix());
        }
    }

    #[test]
    fn overtaking_obliterates_the_passed_follower() {
        let b0 = ApproxProcess::from_fn("b0", h(), |s, n| if s < 5 { n == 5 } else { n == 1 });
        let b1 = ApproxProcess::constant("b1", h(), &"001000".parse().unwrap());
        let beta = Numbering::catalog(h(), vec![b0, b1]).unwrap();
        let (alpha, state) = gazebo_run(&beta).unwrap();
        assert_eq!(state.obliterated_at(1), Some(5));
        assert_eq!(state.followers_at(5)[&1], 2);
        assert!(alpha.processes().iter().all(|p| validate_left_re(p).is_ok()));
        assert_eq!(alpha.at(1).prefix(5), &Prefix::ones(6));
        let emitted = gazebo_lex_emissions(&state, &alpha);
        let oracle = lex_oracle_bruteforce(&alpha);
        assert_eq!(emitted.pairs.keys().collect::<Vec<_>>(), oracle.pairs.keys().collect::<Vec<_>>());
    }

    #[test]
    fn all_ones_catalog_is_rejected() {
        let beta = Numbering::catalog(h(), vec![ApproxProcess::constant("x", h(), &Prefix::ones(6))]).unwrap();
        assert!(matches!(gazebo_run(&beta), Err(Error::Input(_))));
    }
}
