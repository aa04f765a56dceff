use std::collections::BTreeSet;

use serde::Serialize;

use super::{inc_oracle_bruteforce, RelationOracle};
use crate::error::{Error, Result};
use crate::numbering::Numbering;
use crate::prefix::Prefix;
use crate::process::{ApproxProcess, Horizon};
use crate::schedule::{Schedule, ScheduleKind};

/// `B = {2x : x ∈ K} ∪ {2x+1 : x ∉ K}`: positions `2x, 2x+1` read `01`
/// until `x` enters `K` and `10` afterwards.
pub fn b_from_k(k: &Schedule, horizon: Horizon) -> Result<ApproxProcess> {
    if k.kind == ScheduleKind::OmegaBits {
        return Err(Error::usage("b_from_k needs an r.e. schedule"));
    }
    let entry: Vec<Option<usize>> =
        (0..horizon.bits.div_ceil(2)).map(|x| k.entry_stage(x as u64)).collect::<Result<_>>()?;
    Ok(ApproxProcess::from_fn("B", horizon, |s, n| {
        let in_k = entry[n / 2].is_some_and(|t| t <= s);
        (n % 2 == 0) == in_k
    }))
}

/// The numbering the decoder searches: index 0 is the odd numbers, index 1
/// is `b_from_k`, then finite candidate sets `{2y+1 : y < x', y ∉ K_t}` for
/// every distinct stage view `K_t` and every `x' <= x`, with a few
/// distractors mixed in.
pub fn k_decoding_numbering(k: &Schedule, x: usize, horizon: Horizon) -> Result<Numbering> {
    if 2 * x + 1 >= horizon.bits {
        return Err(Error::capacity(format!("x = {x} needs more than {} bits", horizon.bits)));
    }
    let odds = ApproxProcess::from_fn("odds", horizon, |_, n| n % 2 == 1);
    let b = b_from_k(k, horizon)?;
    let mut procs = vec![odds, b];
    let mut seen = BTreeSet::new();
    let mut views: Vec<usize> = vec![0];
    views.extend(k.entries.iter().map(|&(_, s)| s).filter(|&s| s <= horizon.stages));
    views.sort_unstable();
    views.dedup();
    for t in views {
        let members = k.members_at(t)?;
        for xp in 0..=x {
            let set = Prefix::from_members(
                horizon.bits,
                (0..xp).filter(|&y| !members.contains(&(y as u64))).map(|y| 2 * y + 1),
            );
            if seen.insert(set.to_bit_string()) {
                procs.push(ApproxProcess::constant(format!("E-t{t}-x{xp}"), horizon, &set));
            }
            // Distractor: the same set plus an even number, never inside
            // the odds.
            let mut bad = set;
            bad.set(2 * xp, true);
            if seen.insert(bad.to_bit_string()) {
                procs.push(ApproxProcess::constant(format!("D-t{t}-x{xp}"), horizon, &bad));
            }
        }
    }
    Numbering::derived(horizon, procs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KDecodeOutcome {
    pub x: usize,
    /// `{y < x : 2y+1 ∉ E}`.
    pub decoded: BTreeSet<u64>,
    pub candidate: usize,
    pub stage: usize,
}

/// Searches stages `s` upward and candidates `E` in index order for one with
/// `(E, odds)` and `(E, B)` emitted by `s` and, for every `y < x`, exactly
/// one of `y ∈ K_s`, `2y+1 ∈ E`. Returns `{y < x : 2y+1 ∉ E}` after auditing
/// it against the final content of `K`.
pub fn decide_k_below(oracle: &RelationOracle, nu: &Numbering, x: usize, k: &Schedule) -> Result<KDecodeOutcome> {
    let last = nu.horizon().stages;
    for s in 0..=last {
        let ks = k.members_at(s)?;
        for j in 2..nu.len() {
            if !(oracle.emitted_by(j, 0, s) && oracle.emitted_by(j, 1, s)) {
                continue;
            }
            let e = nu.at(j).final_prefix();
            let ok = (0..x).all(|y| ks.contains(&(y as u64)) != e.get(2 * y + 1));
            if !ok {
                continue;
            }
            let decoded: BTreeSet<u64> = (0..x as u64).filter(|&y| !e.get(2 * y as usize + 1)).collect();
            let truth: BTreeSet<u64> = k.final_members()?.into_iter().filter(|&y| y < x as u64).collect();
            if decoded != truth {
                return Err(Error::invariant(format!(
                    "decoded {decoded:?} below {x} but K holds {truth:?}"
                )));
            }
            return Ok(KDecodeOutcome { x, decoded, candidate: j, stage: s });
        }
    }
    Err(Error::capacity(format!("no candidate decides K below {x} within {last} stages")))
}

/// Builds the numbering and brute-force oracle, then decodes.
pub fn decode_with_bruteforce(k: &Schedule, x: usize, horizon: Horizon) -> Result<KDecodeOutcome> {
    let nu = k_decoding_numbering(k, x, horizon)?;
    let oracle = inc_oracle_bruteforce(&nu)?;
    decide_k_below(&oracle, &nu, x, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::validate_left_re;

    fn h() -> Horizon {
        Horizon::new(30, 40).unwrap()
    }

    #[test]
    fn b_from_empty_k_is_odds() {
        let b = b_from_k(&Schedule::empty(ScheduleKind::KSet), h()).unwrap();
        assert!(b.final_prefix().members().iter().all(|m| m % 2 == 1));
    }

    #[test]
    fn b_switches_at_entry() {
        let k = Schedule::new(ScheduleKind::KSet, vec![(0, 3)]);
        let b = b_from_k(&k, h()).unwrap();
        assert_eq!(b.prefix(2).resized(2).to_bit_string(), "01");
        assert_eq!(b.prefix(3).resized(2).to_bit_string(), "10");
        assert!(validate_left_re(&b).is_ok());
    }

    #[test]
    fn decode_examples() {
        let empty = Schedule::empty(ScheduleKind::KSet);
        let out = decode_with_bruteforce(&empty, 4, h()).unwrap();
        assert!(out.decoded.is_empty());
        let k = Schedule::new(ScheduleKind::KSet, vec![(0, 3), (2, 5)]);
        let out = decode_with_bruteforce(&k, 3, h()).unwrap();
        assert_eq!(out.decoded, BTreeSet::from([0, 2]));
        assert!(decode_with_bruteforce(&k, 0, h()).unwrap().decoded.is_empty());
    }
}
