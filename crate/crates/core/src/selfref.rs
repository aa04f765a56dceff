//! Numbering transformations that put a chosen set into the index set of a
//! class: the marker-driven `β` numbering, the singleton numberings, the
//! singleton witness, the infinite-index-set gadget and excision.

use crate::error::{Error, Result};
use crate::markers::MarkerSystem;
use crate::numbering::{HorizonPredicate, Numbering};
use crate::prefix::{lex_cmp, Prefix};
use crate::process::{ApproxProcess, Horizon};
use crate::schedule::{Schedule, ScheduleKind};

/// The cheapest string strictly lex-above `p`: `p` up to its first 0, with
/// that bit set. `None` when `p` is all ones.
pub fn switch_string(p: &Prefix) -> Option<Prefix> {
    let z = p.non_members().first().copied()?;
    let mut s = p.resized(z + 1);
    s.set(z, true);
    Some(s)
}

/// Empty at every stage except the last, where it is `{p}`.
pub fn boundary_process(horizon: Horizon, p: usize) -> ApproxProcess {
    ApproxProcess::from_fn("X", horizon, move |s, n| s == horizon.stages && n == p)
}

/// `max({0} ∪ {s <= t : A_s(e) = 1})`: the last stage up to `t` at which the
/// approximation showed `e` as a member.
pub fn tail_pointer(a: &ApproxProcess, e: usize, t: usize) -> usize {
    (0..=t).rev().find(|&s| a.bit(s, e)).unwrap_or(0)
}

/// `tail_pointer(a, e, t)` for every stage `t`.
fn tail_pointers(a: &ApproxProcess, e: usize) -> Vec<usize> {
    let mut u = 0;
    (0..a.horizon().stage_count())
        .map(|t| {
            if a.bit(t, e) {
                u = t;
            }
            u
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SelfRefPlan {
    pub base: Numbering,
    pub a: ApproxProcess,
    pub i: MarkerSystem,
    pub x: ApproxProcess,
    pub class_c: HorizonPredicate,
}

/// `β` plus the switch strings chosen for the indices that left `I`.
#[derive(Debug, Clone)]
pub struct SelfRefOutcome {
    pub beta: Numbering,
    /// `(e, removal stage, h(e), σ_e)`.
    pub sigma: Vec<(usize, usize, usize, Prefix)>,
}

impl SelfRefPlan {
    fn check_shapes(&self) -> Result<Horizon> {
        let h = self.base.horizon();
        for (what, other) in [("A", self.a.horizon()), ("X", self.x.horizon()), ("I", self.i.horizon())] {
            if other != h {
                return Err(Error::usage(format!(
                    "{what} has horizon {other:?}, the base numbering uses {h:?}"
                )));
            }
        }
        Ok(h)
    }

    /// `h(e)` as an index into the base numbering.
    pub fn h(&self, e: usize) -> Result<usize> {
        let k = self.i.count_h(e)?;
        if k >= self.base.len() {
            return Err(Error::capacity(format!(
                "h({e}) = {k} but the base numbering has {} indices",
                self.base.len()
            )));
        }
        Ok(k)
    }
}

/// Builds `β`: while `e ∈ I_t`, `β_{e,t} = α_{h(e),t}`; once `e` leaves `I`
/// at stage `r`, `β_{e,t} = σ_e · X_{u(e,t)}` where `σ_e` is the switch
/// string of `α_{h(e),r}` and `u` is the tail pointer of `A` at `e`. The tail
/// only advances while `A`'s approximation shows `e`, so `β_e` lands in the
/// class exactly when `e ∈ A`.
pub fn make_into_itself(plan: &SelfRefPlan) -> Result<SelfRefOutcome> {
    let h = plan.check_shapes()?;
    let last = h.stages;
    let tails: Vec<Prefix> = {
        let mut seen: Vec<Prefix> = Vec::new();
        for s in 0..last {
            let p = plan.x.prefix(s);
            if !seen.contains(p) {
                seen.push(p.clone());
            }
        }
        seen
    };
    let mut processes = Vec::with_capacity(h.bits);
    let mut sigma = Vec::new();
    for e in 0..h.bits {
        let k = plan.h(e)?;
        let alpha = plan.base.at(k);
        let label = format!("beta{e}");
        let Some(r) = plan.i.removed_at(e) else {
            processes.push(alpha.clone().with_label(label));
            continue;
        };
        let sig = switch_string(alpha.prefix(r)).ok_or_else(|| {
            Error::capacity(format!("α_{k} is all ones at stage {r}; no switch string for index {e}"))
        })?;
        for tail in &tails {
            let frozen = sig.concat_truncated(tail, h.bits);
            if plan.class_c.decide(&ApproxProcess::constant("frozen", h, &frozen)) {
                return Err(Error::input(format!(
                    "frozen tail σ_{e}·X = {frozen} already satisfies {}",
                    plan.class_c.name()
                )));
            }
        }
        let full = sig.concat_truncated(plan.x.final_prefix(), h.bits);
        if !plan.class_c.decide(&ApproxProcess::constant("full", h, &full)) {
            return Err(Error::input(format!(
                "σ_{e}·X = {full} does not satisfy {}",
                plan.class_c.name()
            )));
        }
        let u = tail_pointers(&plan.a, e);
        let stages = (0..h.stage_count())
            .map(|t| {
                if t < r {
                    alpha.prefix(t).clone()
                } else {
                    sig.concat_truncated(plan.x.prefix(u[t]), h.bits)
                }
            })
            .collect();
        processes.push(ApproxProcess::from_stages(label, stages)?);
        sigma.push((e, r, k, sig));
    }
    Ok(SelfRefOutcome { beta: Numbering::derived(h, processes)?, sigma })
}

/// Hardwires a finite nonempty `A` with maximum `m`: `γ_e = A` for `e ∈ A`,
/// `∅` for the other `e <= m`, and `base_{e-m-1}` above `m`.
pub fn singleton_numbering_finite(a: &Prefix, base: &Numbering) -> Result<Numbering> {
    let h = base.horizon();
    let a = a.resized(h.bits);
    let members = a.members();
    let Some(&m) = members.last() else {
        return Err(Error::input("the hardwired set must be nonempty"));
    };
    if let Some(j) = base.processes().iter().position(|p| p.final_prefix() == &a) {
        return Err(Error::input(format!("base index {j} already equals the hardwired set")));
    }
    let empty = Prefix::zeros(h.bits);
    let mut procs = Vec::with_capacity(m + 1 + base.len());
    for e in 0..=m {
        let (label, p) = if a.get(e) { ("A", &a) } else { ("empty", &empty) };
        procs.push(ApproxProcess::constant(format!("gamma{e}-{label}"), h, p));
    }
    procs.extend(base.processes().iter().cloned());
    Numbering::derived(h, procs)
}

/// Singleton numbering for an infinite left-r.e. `A` whose approximations all
/// differ from its limit: indices in `R = {b_0 < b_1 < ...}` carry the base
/// numbering, every other `e` follows `A` through the tail pointer, so its
/// limit is `A` exactly when `e ∈ A`.
pub fn singleton_numbering_infinite(a: &ApproxProcess, r: &[usize], base: &Numbering) -> Result<Numbering> {
    let h = base.horizon();
    if a.horizon() != h {
        return Err(Error::usage("A and the base numbering use different horizons"));
    }
    let fin = a.final_prefix();
    if let Some(s) = (0..h.stages).find(|&s| a.prefix(s) == fin) {
        return Err(Error::input(format!("A's stage-{s} approximation already equals its limit")));
    }
    if let Some(&b) = r.iter().find(|&&b| b < h.bits && fin.get(b)) {
        return Err(Error::input(format!("R meets A at {b}")));
    }
    if let Some(j) = base.processes().iter().position(|p| p.final_prefix() == fin) {
        return Err(Error::input(format!("base index {j} has the same limit as A")));
    }
    let mut procs = Vec::with_capacity(h.bits);
    for e in 0..h.bits {
        if let Some(d) = r.iter().position(|&b| b == e) {
            let p = base.get(d).ok_or_else(|| {
                Error::capacity(format!("R element {e} is b_{d} but the base has {} indices", base.len()))
            })?;
            procs.push(p.clone().with_label(format!("gamma{e}-base{d}")));
        } else {
            let stages = tail_pointers(a, e).into_iter().map(|u| a.prefix(u).clone()).collect();
            procs.push(ApproxProcess::from_stages(format!("gamma{e}"), stages)?);
        }
    }
    Numbering::derived(h, procs)
}

/// `B = {e : some α_{e,s} >lex r}` with entry stages, where `r` is padded
/// with zeros to the horizon.
pub fn singleton_witness(alpha: &Numbering, a: &ApproxProcess, r: &Prefix) -> Result<Schedule> {
    let bits = alpha.horizon().bits;
    let r = r.resized(bits);
    let fin = a.final_prefix().resized(bits);
    if lex_cmp(&fin, &r)? != std::cmp::Ordering::Less || r == Prefix::ones(bits) {
        return Err(Error::input(format!("r = {r} is not strictly between A's limit and all ones")));
    }
    let mut entries = Vec::new();
    for (e, p) in alpha.processes().iter().enumerate() {
        let above = p.stages().iter().position(|q| lex_cmp(q, &r) == Ok(std::cmp::Ordering::Greater));
        if let Some(s) = above {
            entries.push((e as u64, s));
        }
    }
    Ok(Schedule::new(ScheduleKind::ReSet, entries))
}

/// `B ∩ {x : some y ∈ W_s has x < y}` stage by stage.
pub fn infinite_indexset_gadget(b: &ApproxProcess, w: &Schedule) -> Result<ApproxProcess> {
    let h = b.horizon();
    let cut: Vec<u64> = (0..h.stage_count())
        .map(|s| Ok(w.members_at(s)?.last().copied().unwrap_or(0)))
        .collect::<Result<_>>()?;
    Ok(ApproxProcess::from_fn(format!("{}-below-W", b.label()), h, |s, n| {
        (n as u64) < cut[s] && b.bit(s, n)
    }))
}

/// `β_e = α_e` until `e` enters `R` at stage `s`; from then on
/// `β_{e,t} = σ · X_t` with `σ` the switch string of `α_{e,s}`.
pub fn excise(alpha: &Numbering, r: &Schedule, x: &ApproxProcess) -> Result<Numbering> {
    let h = alpha.horizon();
    if x.horizon() != h {
        return Err(Error::usage("X and the numbering use different horizons"));
    }
    let mut procs = Vec::with_capacity(alpha.len());
    for (e, p) in alpha.processes().iter().enumerate() {
        let Some(s) = r.entry_stage(e as u64)?.filter(|&s| s <= h.stages) else {
            procs.push(p.clone());
            continue;
        };
        let sig = switch_string(p.prefix(s))
            .ok_or_else(|| Error::capacity(format!("α_{e} is all ones at stage {s}; cannot excise")))?;
        let stages = (0..h.stage_count())
            .map(|t| if t < s { p.prefix(t).clone() } else { sig.concat_truncated(x.prefix(t), h.bits) })
            .collect();
        procs.push(ApproxProcess::from_stages(format!("{}-excised", p.label()), stages)?);
    }
    Numbering::derived(h, procs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markers::trivial_marker_system;
    use crate::numbering::index_set_estimate;
    use crate::process::validate_left_re;

    fn h() -> Horizon {
        Horizon::new(12, 8).unwrap()
    }

    fn catalog(h: Horizon, finals: &[&str]) -> Numbering {
        let procs = finals
            .iter()
            .enumerate()
            .map(|(i, f)| ApproxProcess::constant(format!("c{i}"), h, &f.parse().unwrap()))
            .collect();
        Numbering::catalog(h, procs).unwrap()
    }

    #[test]
    fn switch_string_is_strictly_above() {
        let s = switch_string(&"1101".parse().unwrap()).unwrap();
        assert_eq!(s.to_bit_string(), "111");
        assert!(switch_string(&Prefix::ones(5)).is_none());
    }

    #[test]
    fn full_marker_set_copies_base() {
        let h = h();
        let base = catalog(h, &["00000000"; 8]);
        let plan = SelfRefPlan {
            base: base.clone(),
            a: ApproxProcess::constant("A", h, &Prefix::zeros(8)),
            i: trivial_marker_system(h),
            x: boundary_process(h, 6),
            class_c: HorizonPredicate::one_beyond(6),
        };
        let out = make_into_itself(&plan).unwrap();
        for (b, a) in out.beta.processes().iter().zip(base.processes()) {
            assert_eq!(b.stages(), a.stages());
        }
        assert!(out.sigma.is_empty());
    }

    #[test]
    fn finite_singleton_examples() {
        let h = h();
        let base = catalog(h, &["00000001", "11000000"]);
        let g = singleton_numbering_finite(&"1".parse().unwrap(), &base).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.at(1), base.at(0));
        let a: Prefix = "0101".parse().unwrap();
        let g = singleton_numbering_finite(&a, &base).unwrap();
        let target = HorizonPredicate::limit_equals(a);
        assert_eq!(index_set_estimate(&g, &target).into_iter().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(g.at(0).final_prefix().count_ones(), 0);
        let clash = catalog(h, &["01010000"]);
        assert!(matches!(
            singleton_numbering_finite(&"0101".parse().unwrap(), &clash),
            Err(Error::Input(_))
        ));
        assert!(matches!(singleton_numbering_finite(&Prefix::zeros(3), &base), Err(Error::Input(_))));
    }

    #[test]
    fn witness_examples() {
        let h = h();
        let alpha = catalog(h, &["01000000", "11000000", "00000000"]);
        let a = ApproxProcess::constant("A", h, &Prefix::zeros(8));
        let w = singleton_witness(&alpha, &a, &"1".parse().unwrap()).unwrap();
        assert_eq!(w.final_members().unwrap().into_iter().collect::<Vec<_>>(), vec![1]);
        let zeros = catalog(h, &["00000000"; 3]);
        assert!(singleton_witness(&zeros, &a, &"1".parse().unwrap()).unwrap().entries.is_empty());
        assert!(singleton_witness(&alpha, &a, &Prefix::zeros(8)).is_err());
    }

    #[test]
    fn gadget_examples() {
        let h = h();
        let b = ApproxProcess::constant("B", h, &"11011011".parse().unwrap());
        let none = infinite_indexset_gadget(&b, &Schedule::empty(ScheduleKind::ReSet)).unwrap();
        assert_eq!(none.final_prefix().count_ones(), 0);
        let w = Schedule::new(ScheduleKind::ReSet, vec![(4, 2)]);
        let cut = infinite_indexset_gadget(&b, &w).unwrap();
        assert_eq!(cut.final_prefix().to_bit_string(), "11010000");
        assert_eq!(cut.prefix(1).count_ones(), 0);
        assert!(validate_left_re(&cut).is_ok());
    }

    #[test]
    fn excise_examples() {
        let h = h();
        let alpha = catalog(h, &["00100000", "01000000"]);
        let x = boundary_process(h, 3);
        let same = excise(&alpha, &Schedule::empty(ScheduleKind::ReSet), &x).unwrap();
        assert_eq!(same.processes(), alpha.processes());
        let all = Schedule::new(ScheduleKind::ReSet, vec![(0, 0), (1, 0)]);
        let out = excise(&alpha, &all, &x).unwrap();
        assert_eq!(out.at(0).prefix(0).to_bit_string(), "10000000");
        assert_eq!(out.at(0).final_prefix().to_bit_string(), "10001000");
        assert!(out.processes().iter().all(|p| validate_left_re(p).is_ok()));
    }
}
