//! Seeded generators for schedules, processes and catalogs. Same seed, same
//! output.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::genericity::RequirementList;
use crate::numbering::Numbering;
use crate::prefix::Prefix;
use crate::process::{ApproxProcess, Horizon};
use crate::schedule::{LimitFunctionApprox, Schedule, ScheduleKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ω-surrogate entries on positions `1..=width`, at most one per stage in
/// `1..=stages`. Each entry sets a bit that is currently 0, so the induced
/// prefixes only rise. `Ω(0)` stays 0.
pub fn random_omega(rng: &mut impl Rng, width: usize, stages: usize, changes: usize) -> Schedule {
    let mut cur = vec![false; width + 1];
    let mut when: Vec<usize> = (1..=stages).collect();
    when.shuffle(rng);
    when.truncate(changes);
    when.sort_unstable();
    let mut entries = Vec::new();
    for s in when {
        let zeros: Vec<usize> = (1..=width).filter(|&m| !cur[m]).collect();
        let Some(&m) = zeros.choose(rng) else { break };
        cur[m] = true;
        cur[m + 1..].iter_mut().for_each(|b| *b = false);
        entries.push((m as u64, s));
    }
    Schedule::new(ScheduleKind::OmegaBits, entries)
}

/// Distinct elements below `universe`, one entering at each stage
/// `0..count`.
pub fn one_per_stage(rng: &mut impl Rng, universe: u64, count: usize) -> Result<Schedule> {
    if count as u64 > universe {
        return Err(Error::usage(format!("cannot pick {count} distinct elements below {universe}")));
    }
    let picked = rand::seq::index::sample(rng, universe as usize, count);
    let entries = picked.into_iter().enumerate().map(|(s, x)| (x as u64, s)).collect();
    Ok(Schedule::new(ScheduleKind::ReSet, entries))
}

/// A random subset of `0..universe` entering at random stages `<= stages`.
pub fn random_k(rng: &mut impl Rng, universe: u64, stages: usize) -> Schedule {
    Schedule { kind: ScheduleKind::KSet, ..random_re(rng, universe, stages, 0.4) }
}

/// An r.e. schedule over `0..universe` with random entry stages.
pub fn random_re(rng: &mut impl Rng, universe: u64, stages: usize, density: f64) -> Schedule {
    let mut entries = Vec::new();
    for x in 0..universe {
        if rng.gen_bool(density) {
            entries.push((x, rng.gen_range(0..=stages)));
        }
    }
    Schedule::new(ScheduleKind::ReSet, entries)
}

/// An r.e. schedule over the numbers `2^e·3^d`, `d < 35`, which is where
/// the diagonal construction places its non-members.
pub fn diagonal_w(rng: &mut impl Rng, e: usize, stages: usize, density: f64) -> Schedule {
    let entries = (0..35u32)
        .filter_map(|d| {
            let x = (1u64 << e).checked_mul(3u64.checked_pow(d)?)?;
            rng.gen_bool(density).then(|| (x, rng.gen_range(0..=stages)))
        })
        .collect();
    Schedule::new(ScheduleKind::ReSet, entries)
}

/// A lex-increasing process: a random start, then `moves` jumps at random
/// stages, each setting a current 0 and re-randomizing everything after it.
pub fn random_process(rng: &mut impl Rng, label: impl Into<String>, horizon: Horizon, moves: usize) -> ApproxProcess {
    let bits = horizon.bits;
    let mut cur = Prefix::from_bits((0..bits).map(|_| rng.gen_bool(0.3)));
    let mut when: Vec<usize> = (1..=horizon.stages).collect();
    when.shuffle(rng);
    when.truncate(moves);
    when.sort_unstable();
    let mut stages = Vec::with_capacity(horizon.stage_count());
    let mut next = when.into_iter().peekable();
    for s in 0..horizon.stage_count() {
        if next.peek() == Some(&s) {
            next.next();
            let zeros = cur.non_members();
            if let Some(&z) = zeros.choose(rng) {
                cur.set(z, true);
                for n in z + 1..bits {
                    cur.set(n, rng.gen_bool(0.3));
                }
            }
        }
        stages.push(cur.clone());
    }
    ApproxProcess::from_stages(label, stages).expect("stages cover the horizon")
}

/// `p` stretched onto the odd positions of a horizon twice as wide.
pub fn spread_odd(p: &ApproxProcess) -> ApproxProcess {
    let h = p.horizon();
    let wide = Horizon { stages: h.stages, bits: 2 * h.bits };
    ApproxProcess::from_fn(format!("{}-odd", p.label()), wide, |s, n| n % 2 == 1 && p.bit(s, n / 2))
}

/// `count` random processes with pairwise distinct limits, none all ones,
/// each accepted by `keep`.
pub fn random_catalog(
    rng: &mut impl Rng,
    horizon: Horizon,
    count: usize,
    moves: usize,
    keep: impl Fn(&ApproxProcess) -> bool,
) -> Result<Numbering> {
    let ones = Prefix::ones(horizon.bits);
    let mut seen = BTreeSet::new();
    let mut procs = Vec::with_capacity(count);
    let mut tries = 0;
    while procs.len() < count {
        tries += 1;
        if tries > 100 * (count + 1) {
            return Err(Error::capacity(format!("could not draw {count} distinct processes on {horizon:?}")));
        }
        let p = random_process(rng, format!("alpha{}", procs.len()), horizon, moves);
        let fin = p.final_prefix();
        if fin == &ones || !keep(&p) || !seen.insert(fin.to_bit_string()) {
            continue;
        }
        procs.push(p);
    }
    Numbering::catalog(horizon, procs)
}

/// `f(n)` starts at 0, moves to `n + 2` at stage `n + 3` and settles at
/// `n + 5` from stage `n + 6`.
pub fn n_plus_five(args: usize) -> LimitFunctionApprox {
    let mut changes = Vec::new();
    for n in 0..args {
        changes.push((n + 3, n, n as u64 + 2));
        changes.push((n + 6, n, n as u64 + 5));
    }
    LimitFunctionApprox::new(Vec::new(), changes)
}

/// Four fixed requirement sets `W_0, ..., W_3`.
pub fn requirement_fixture() -> RequirementList {
    RequirementList::from_strings(&[
        &["01", "0010110"],
        &["1101", "000"],
        &["0110", "00101101"],
        &["1", "0011"],
    ])
}

/// The all-odd fixture: a random process spread onto the odd positions of
/// `2 * half_bits` bits.
pub fn all_odd_process(rng: &mut impl Rng, horizon: Horizon, moves: usize) -> Result<ApproxProcess> {
    if !horizon.bits.is_multiple_of(2) {
        return Err(Error::usage("the all-odd fixture needs an even bit count"));
    }
    let half = Horizon::new(horizon.stages, horizon.bits / 2)?;
    Ok(spread_odd(&random_process(rng, "A", half, moves)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::validate_left_re;

    #[test]
    fn same_seed_same_fixture() {
        let h = Horizon::new(20, 16).unwrap();
        let a = random_process(&mut rng(7), "p", h, 5);
        let b = random_process(&mut rng(7), "p", h, 5);
        assert_eq!(a, b);
        assert!(validate_left_re(&a).is_ok());
    }

    #[test]
    fn omega_is_monotone_with_zero_first_bit() {
        for seed in 0..20 {
            let w = random_omega(&mut rng(seed), 5, 30, 8);
            w.validate_omega(6).unwrap();
            assert!(!w.omega_prefix(30, 6).unwrap().get(0));
        }
    }

    #[test]
    fn n_plus_five_is_bounded() {
        let f = n_plus_five(20);
        f.validate_bounded().unwrap();
        assert_eq!(f.final_value(7), 12);
    }

    #[test]
    fn odd_fixture_is_odd() {
        let h = Horizon::new(12, 20).unwrap();
        let p = all_odd_process(&mut rng(3), h, 4).unwrap();
        assert!(p.stages().iter().all(|s| s.members().iter().all(|m| m % 2 == 1)));
        assert!(validate_left_re(&p).is_ok());
    }

    #[test]
    fn catalogs_are_distinct() {
        let h = Horizon::new(10, 12).unwrap();
        let nu = random_catalog(&mut rng(1), h, 8, 3, |_| true).unwrap();
        let limits: BTreeSet<String> = nu.limits().iter().map(Prefix::to_bit_string).collect();
        assert_eq!(limits.len(), 8);
    }
}
