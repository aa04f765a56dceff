//! Desk-scale genericity: forcing a prefix against finitely many r.e. sets
//! of strings, the interval function built from it, and an exhaustive check
//! that flipping bits inside a marker set keeps every requirement met.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::markers::{build_retraceable, MarkerSystem};
use crate::prefix::Prefix;
use crate::process::Horizon;
use crate::schedule::{LimitFunctionApprox, Schedule};

/// Default bound on `|I ∩ horizon|` for exhaustive variant enumeration.
pub const DEFAULT_VARIANT_CAP: usize = 12;

/// Binary string with code `c`: `c + 1` in binary with its leading 1 removed,
/// so codes enumerate strings in length-lexicographic order.
pub fn decode_string(code: u64) -> Vec<bool> {
    let v = code + 1;
    let width = 64 - v.leading_zeros() as usize;
    (0..width - 1).rev().map(|i| v >> i & 1 == 1).collect()
}

pub fn encode_string(bits: &[bool]) -> Result<u64> {
    if bits.len() >= 64 {
        return Err(Error::capacity(format!("string of length {} has no u64 code", bits.len())));
    }
    let v = bits.iter().fold(1u64, |acc, &b| acc << 1 | b as u64);
    Ok(v - 1)
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// `W_{e,s}` as a set of strings, indexed for prefix and extension queries.
#[derive(Debug, Clone, Default)]
pub struct StringSet {
    members: BTreeSet<Vec<bool>>,
    /// Proper prefix of some member -> length of the shortest member
    /// extending it.
    shortest_extension: HashMap<Vec<bool>, usize>,
    max_len: usize,
}

impl StringSet {
    pub fn new<I: IntoIterator<Item = Vec<bool>>>(strings: I) -> Self {
        let mut set = StringSet::default();
        for s in strings {
            for cut in 0..s.len() {
                let slot = set.shortest_extension.entry(s[..cut].to_vec()).or_insert(usize::MAX);
                *slot = (*slot).min(s.len());
            }
            set.max_len = set.max_len.max(s.len());
            set.members.insert(s);
        }
        set
    }

    /// Strings whose codes entered `w` by stage `s`.
    pub fn from_schedule(w: &Schedule, s: usize) -> Result<Self> {
        Ok(Self::new(w.members_at(s)?.into_iter().map(decode_string)))
    }

    pub fn contains(&self, s: &[bool]) -> bool {
        self.members.contains(s)
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn members(&self) -> impl Iterator<Item = &Vec<bool>> {
        self.members.iter()
    }

    pub fn has_prefix_of(&self, rho: &[bool]) -> bool {
        (0..=rho.len()).any(|k| self.members.contains(&rho[..k]))
    }

    /// Some member properly extends `rho` with length at most `max_len`.
    pub fn has_extension_of(&self, rho: &[bool], max_len: usize) -> bool {
        self.shortest_extension.get(rho).is_some_and(|&l| l <= max_len)
    }

    /// Either some prefix of `rho` is a member, or no member of length at
    /// most `ext_bound` properly extends `rho`.
    pub fn satisfied_by(&self, rho: &[bool], ext_bound: usize) -> bool {
        self.has_prefix_of(rho) || !self.has_extension_of(rho, ext_bound)
    }

    /// Length-lexicographically least member properly extending `rho`.
    pub fn least_extension(&self, rho: &[bool]) -> Option<&Vec<bool>> {
        self.members
            .iter()
            .filter(|m| m.len() > rho.len() && m.starts_with(rho))
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
    }
}

/// `R_e` for `rho` against `W_{e,s}`, with extensions searched among strings
/// of length at most `n`.
pub fn requirement_satisfied(rho: &Prefix, w: &Schedule, s: usize, n: usize) -> Result<bool> {
    let set = StringSet::from_schedule(w, s)?;
    let bits: Vec<bool> = rho.iter().collect();
    Ok(set.satisfied_by(&bits, n))
}

/// A finite list of requirement schedules `W_0, ..., W_{E-1}`, read at their
/// final content.
#[derive(Debug, Clone)]
pub struct RequirementList {
    schedules: Vec<Schedule>,
    sets: Vec<StringSet>,
}

impl RequirementList {
    pub fn new(schedules: Vec<Schedule>) -> Result<Self> {
        let sets = schedules
            .iter()
            .map(|w| StringSet::from_schedule(w, usize::MAX))
            .collect::<Result<Vec<_>>>()?;
        Ok(RequirementList { schedules, sets })
    }

    pub fn from_strings(reqs: &[&[&str]]) -> Self {
        let sets: Vec<StringSet> = reqs
            .iter()
            .map(|strings| StringSet::new(strings.iter().map(|s| s.chars().map(|c| c == '1').collect())))
            .collect();
        let schedules = sets
            .iter()
            .map(|set| {
                let entries = set
                    .members()
                    .map(|m| (encode_string(m).expect("short strings"), 0))
                    .collect();
                Schedule::new(crate::schedule::ScheduleKind::ReSet, entries)
            })
            .collect();
        RequirementList { schedules, sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn schedules(&self) -> &[Schedule] {
        &self.schedules
    }

    pub fn set(&self, e: usize) -> &StringSet {
        &self.sets[e]
    }
}

/// Forces every requirement in turn: a requirement not yet met is met by
/// jumping to the length-lexicographically least member of `W_e` extending
/// the current string. The result is padded with zeros to length `n`.
pub fn force_generic_prefix(ws: &RequirementList, n: usize) -> Result<Prefix> {
    let mut rho: Vec<bool> = Vec::new();
    for (e, set) in ws.sets.iter().enumerate() {
        if set.satisfied_by(&rho, usize::MAX) {
            continue;
        }
        let ext = set.least_extension(&rho).expect("unsatisfied requirement has an extension");
        if ext.len() > n {
            return Err(Error::capacity(format!(
                "requirement {e} needs a prefix of length {}, horizon is {n}",
                ext.len()
            )));
        }
        rho = ext.clone();
    }
    rho.resize(n, false);
    Ok(Prefix::from_bits(rho))
}

/// `c_{σ,e}`: least `c >= |σ|` such that `σ · A[|σ|..c]` meets `R_e`.
pub fn segment_end(a: &Prefix, sigma: &[bool], set: &StringSet) -> Result<usize> {
    let mut tau = sigma.to_vec();
    loop {
        if set.satisfied_by(&tau, usize::MAX) {
            return Ok(tau.len());
        }
        if tau.len() >= a.len() {
            return Err(Error::capacity(format!(
                "no segment end for σ = {} within {} bits",
                bits_to_string(sigma),
                a.len()
            )));
        }
        tau.push(a.get(tau.len()));
    }
}

/// Every binary string of length exactly `len`.
fn strings_of_len(len: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << len).map(move |v| (0..len).rev().map(|i| v >> i & 1 == 1).collect())
}

/// `f(0) = 0`, `f(n+1) = max(f(n) + 1, max{c_{σ,e} : |σ| <= f(n) + 1, e <= f(n)})`,
/// for as long as the values fit in `A`. Strings at least as long as every
/// member of `W_e` meet `R_e` outright, so only shorter `σ` are enumerated.
pub fn interval_values(a: &Prefix, ws: &RequirementList) -> Result<Vec<usize>> {
    let mut f = vec![0usize];
    loop {
        let cur = *f.last().unwrap();
        match next_interval_value(a, ws, cur) {
            Ok(next) if next <= a.len() => f.push(next),
            Ok(_) => return Ok(f),
            Err(e) if f.len() == 1 => return Err(e),
            Err(_) => return Ok(f),
        }
    }
}

fn next_interval_value(a: &Prefix, ws: &RequirementList, cur: usize) -> Result<usize> {
    let mut next = cur + 1;
    for e in 0..ws.len().min(cur + 1) {
        let set = ws.set(e);
        let longest = (cur + 1).min(set.max_len().saturating_sub(1));
        for len in 0..=longest {
            for sigma in strings_of_len(len) {
                next = next.max(segment_end(a, &sigma, set)?);
            }
        }
    }
    Ok(next)
}

/// The interval function as a limit approximation: `f(n)` takes its value at
/// stage `f(n) + 1`, which keeps `max f_s < s`.
pub fn build_interval_function(a: &Prefix, ws: &RequirementList) -> Result<LimitFunctionApprox> {
    let values = interval_values(a, ws)?;
    let changes = values
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &v)| (v + 1, n, v as u64))
        .collect();
    Ok(LimitFunctionApprox::new(Vec::new(), changes))
}

/// `J_k = {f(k) + 1, ..., f(k + 1)}` as inclusive bounds.
pub fn intervals(f: &[usize]) -> Vec<(usize, usize)> {
    f.windows(2).map(|w| (w[0] + 1, w[1])).collect()
}

/// Marker input for the pipeline: `g(n) = f(2n) + 1`, adopted at stage
/// `g(n) + 1`, so the resulting markers satisfy `i_n > f(2n)` for every `n`.
pub fn doubled_marker_function(f: &[usize]) -> LimitFunctionApprox {
    let changes = f
        .iter()
        .step_by(2)
        .enumerate()
        .map(|(n, &v)| (v + 2, n, v as u64 + 1))
        .collect();
    LimitFunctionApprox::new(Vec::new(), changes)
}

/// Everything the indifference check needs, built in one go.
#[derive(Debug, Clone)]
pub struct GenericPlan {
    pub a: Prefix,
    pub f_values: Vec<usize>,
    pub f: LimitFunctionApprox,
    pub j: Vec<(usize, usize)>,
    pub i: MarkerSystem,
}

/// Force a prefix of `n` bits, build `f` and the intervals, and run the
/// markers against `g(n) = f(2n) + 1` on `stages` stages.
pub fn generic_pipeline(ws: &RequirementList, n: usize, stages: usize) -> Result<GenericPlan> {
    let a = force_generic_prefix(ws, n)?;
    let f_values = interval_values(&a, ws)?;
    let f = build_interval_function(&a, ws)?;
    let j = intervals(&f_values);
    let i = build_retraceable(&doubled_marker_function(&f_values), Horizon::new(stages, n)?)?;
    Ok(GenericPlan { a, f_values, f, j, i })
}

/// For every `n` with `f(2n)` known: how many of `J_0, ..., J_{2n-1}` contain
/// no final marker. The pigeonhole bound says at least `n`.
pub fn marker_free_intervals(plan: &GenericPlan) -> Vec<(usize, usize)> {
    let members: BTreeSet<usize> = plan.i.final_members().into_iter().collect();
    let mut out = Vec::new();
    let mut n = 0;
    while 2 * n < plan.f_values.len() {
        let free = plan.j[..2 * n]
            .iter()
            .filter(|&&(lo, hi)| members.range(lo..=hi).next().is_none())
            .count();
        out.push((n, free));
        n += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariantFailure {
    /// Positions where the variant differs from `A`.
    pub flipped: Vec<usize>,
    pub requirement: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndifferenceReport {
    pub positions: Vec<usize>,
    pub variants: u64,
    pub failures: Vec<VariantFailure>,
}

impl IndifferenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every `X` with `X △ A ⊆ I ∩ [0, |A|)` against `R_0, ..., R_{e_bound}`.
/// A variant meets `R_e` when its full prefix has a member of `W_e` as a
/// prefix or has no extension in `W_e` at all.
pub fn verify_indifference(
    a: &Prefix,
    i_members: &[usize],
    ws: &RequirementList,
    e_bound: usize,
    cap: usize,
) -> Result<IndifferenceReport> {
    let positions: Vec<usize> = i_members.iter().copied().filter(|&p| p < a.len()).collect();
    if positions.len() > cap {
        return Err(Error::capacity(format!(
            "{} positions of I on the horizon exceed the variant cap {cap}; \
             shrink the horizon or sample variants",
            positions.len()
        )));
    }
    let base: Vec<bool> = a.iter().collect();
    let top = ws.len().min(e_bound.saturating_add(1));
    let mut failures = Vec::new();
    for mask in 0u64..1 << positions.len() {
        let mut x = base.clone();
        let mut flipped = Vec::new();
        for (k, &p) in positions.iter().enumerate() {
            if mask >> k & 1 == 1 {
                x[p] = !x[p];
                flipped.push(p);
            }
        }
        if let Some(e) = (0..top).find(|&e| !ws.set(e).satisfied_by(&x, usize::MAX)) {
            failures.push(VariantFailure { flipped, requirement: e });
        }
    }
    let variants = 1u64 << positions.len();
    Ok(IndifferenceReport { positions, variants, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Prefix {
        s.parse().unwrap()
    }

    fn schedule_of(strings: &[&str]) -> Schedule {
        RequirementList::from_strings(&[strings]).schedules()[0].clone()
    }

    #[test]
    fn codes_round_trip() {
        assert_eq!(decode_string(0), Vec::<bool>::new());
        assert_eq!(decode_string(1), vec![false]);
        assert_eq!(decode_string(2), vec![true]);
        assert_eq!(decode_string(3), vec![false, false]);
        for c in 0..200 {
            assert_eq!(encode_string(&decode_string(c)).unwrap(), c);
        }
    }

    #[test]
    fn requirement_examples() {
        let empty = Schedule::empty(crate::schedule::ScheduleKind::ReSet);
        assert!(requirement_satisfied(&p("0101"), &empty, 10, 8).unwrap());
        assert!(requirement_satisfied(&p("011"), &schedule_of(&["01"]), 0, 8).unwrap());
        assert!(!requirement_satisfied(&p("011"), &schedule_of(&["0110"]), 0, 8).unwrap());
        // An extension longer than the search bound does not count.
        assert!(requirement_satisfied(&p("011"), &schedule_of(&["0110"]), 0, 3).unwrap());
    }

    #[test]
    fn forcing_examples() {
        let none = RequirementList::from_strings(&[]);
        assert_eq!(force_generic_prefix(&none, 5).unwrap(), p("00000"));
        let ends_in_one = RequirementList::from_strings(&[&["1", "01", "11", "001", "011", "101", "111"]]);
        assert_eq!(force_generic_prefix(&ends_in_one, 6).unwrap(), p("100000"));
        let long = RequirementList::from_strings(&[&["0000000001"]]);
        assert!(matches!(force_generic_prefix(&long, 4), Err(Error::Capacity(_))));
    }

    #[test]
    fn forcing_leaves_satisfied_prefixes_alone() {
        let ws = RequirementList::from_strings(&[&["0"], &["1"]]);
        // R_1 is already met by avoidance once the prefix starts with 0.
        assert_eq!(force_generic_prefix(&ws, 3).unwrap(), p("000"));
    }

    #[test]
    fn empty_requirements_grow_by_one() {
        let ws = RequirementList::from_strings(&[]);
        assert_eq!(interval_values(&Prefix::zeros(6), &ws).unwrap(), vec![0, 1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn single_requirement_met_at_seven() {
        let ws = RequirementList::from_strings(&[&["0010110"]]);
        let a = p("0010110000000");
        assert_eq!(interval_values(&a, &ws).unwrap()[1], 7);
    }
}
