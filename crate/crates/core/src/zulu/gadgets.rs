use num_bigint::BigUint;

use super::BlockLayout;
use crate::error::{Error, Result};
use crate::process::{join, ApproxProcess};
use crate::schedule::Schedule;
use crate::sparse::{SparseProcess, SparseSet};

/// Members of `A_s` with their interval index, checking one member per
/// interval.
fn indexed_members(a: &SparseSet, layout: &BlockLayout, s: usize) -> Result<Vec<(BigUint, usize)>> {
    let members = a.members(layout.n_max())?;
    let mut out = Vec::with_capacity(members.len());
    for x in members {
        let n = layout
            .ind(&x)
            .ok_or_else(|| Error::input(format!("A_{s} member {x} lies outside every interval")))?;
        if out.last().is_some_and(|&(_, m)| m == n) {
            return Err(Error::input(format!("A_{s} has two members in I_{n}")));
        }
        out.push((x, n));
    }
    Ok(out)
}

fn build(
    a: &SparseProcess,
    w: &Schedule,
    layout: &BlockLayout,
    label: &str,
    offsets: (&[u32], &[u32]),
) -> Result<SparseProcess> {
    let mut stages = Vec::with_capacity(a.last_stage() + 1);
    for s in 0..=a.last_stage() {
        let mut points = Vec::new();
        for (x, n) in indexed_members(a.stage(s), layout, s)? {
            let hit = crate::schedule::schedule_member(w, n as u64, s)?;
            let base = &x * 3u32;
            for &k in if hit { offsets.0 } else { offsets.1 } {
                points.push(&base + k);
            }
        }
        stages.push(SparseSet::from_points(points));
    }
    SparseProcess::new(label, stages)
}

/// `{3x : x ∈ A, ind(x) ∈ W} ∪ {3x+1, 3x+2 : x ∈ A, ind(x) ∉ W}`, stage by
/// stage from the approximations of `A` and `W`.
pub fn tilde_a(a: &SparseProcess, w: &Schedule, layout: &BlockLayout) -> Result<SparseProcess> {
    build(a, w, layout, "tilde-A", (&[0], &[1, 2]))
}

/// The subset `{3x : ind(x) ∈ W} ∪ {3x+1 : ind(x) ∉ W}` of [`tilde_a`].
pub fn tilde_a_subset(a: &SparseProcess, w: &Schedule, layout: &BlockLayout) -> Result<SparseProcess> {
    build(a, w, layout, "tilde-A-subset", (&[0], &[1]))
}

/// `B ⊕ W`.
pub fn max_join_gadget(b: &ApproxProcess, w: &Schedule) -> Result<ApproxProcess> {
    join(b, &w.to_process("W", b.horizon())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prefix::Prefix;
    use crate::process::Horizon;
    use crate::schedule::ScheduleKind;
    use crate::zulu::ZuluState;

    fn zulu_a() -> (SparseProcess, BlockLayout) {
        let layout = BlockLayout::new(3).unwrap();
        let omega = Schedule::new(ScheduleKind::OmegaBits, vec![(2, 2), (1, 4)]);
        let a = ZuluState::new(&omega, layout.clone(), 6).unwrap().build_minimal().unwrap();
        (a, layout)
    }

    #[test]
    fn all_of_w_gives_multiples_of_three() {
        let (a, layout) = zulu_a();
        let w = Schedule::new(ScheduleKind::ReSet, (1..=3).map(|n| (n, 0)).collect());
        let t = tilde_a(&a, &w, &layout).unwrap();
        let expected: Vec<BigUint> = a.final_set().members(8).unwrap().iter().map(|x| x * 3u32).collect();
        assert_eq!(t.final_set().members(8).unwrap(), expected);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn empty_w_gives_the_pairs() {
        let (a, layout) = zulu_a();
        let t = tilde_a(&a, &Schedule::empty(ScheduleKind::ReSet), &layout).unwrap();
        assert_eq!(t.final_set().count().unwrap(), BigUint::from(6u32));
        let sub = tilde_a_subset(&a, &Schedule::empty(ScheduleKind::ReSet), &layout).unwrap();
        let both = t.final_set().symmetric_difference(sub.final_set());
        assert_eq!(both.count().unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn join_with_empty_w() {
        let h = Horizon::new(2, 8).unwrap();
        let b = ApproxProcess::constant("B", h, &Prefix::from_members(8, [0, 1]));
        let j = max_join_gadget(&b, &Schedule::empty(ScheduleKind::ReSet)).unwrap();
        assert_eq!(j.final_prefix().members(), vec![0, 2]);
    }
}
