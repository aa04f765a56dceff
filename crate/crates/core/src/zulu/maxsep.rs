use crate::error::{Error, Result};
use crate::prefix::Prefix;
use crate::process::{ApproxProcess, Horizon};
use crate::schedule::Schedule;

/// `E_s = A_s ∪ {x_1, x_3, x_5, ...}` where `x_0 < x_1 < ...` lists the
/// complement of `A_s`. `A` must enumerate exactly one new element at each
/// stage `1..=` its last entry stage (stage 0 may hold at most one).
pub fn maxsep_superset(a: &Schedule, horizon: Horizon) -> Result<ApproxProcess> {
    let last = a.last_stage();
    let mut seen = std::collections::BTreeSet::new();
    let mut per_stage = vec![0usize; last + 1];
    for &(x, s) in &a.entries {
        if seen.insert(x) {
            per_stage[s] += 1;
        }
    }
    if per_stage[0] > 1 {
        return Err(Error::input(format!("{} elements enter at stage 0", per_stage[0])));
    }
    if let Some(s) = (1..=last).find(|&s| per_stage[s] != 1) {
        return Err(Error::input(format!(
            "stage {s} enumerates {} elements; exactly one is required",
            per_stage[s]
        )));
    }
    let members = a.to_process("A", horizon)?;
    let stages = members
        .stages()
        .iter()
        .map(|p| {
            let mut holes = 0usize;
            Prefix::from_bits(p.iter().map(|bit| {
                if bit {
                    return true;
                }
                holes += 1;
                holes.is_multiple_of(2)
            }))
        })
        .collect();
    ApproxProcess::from_stages("maxsep-E", stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::validate_left_re;
    use crate::schedule::ScheduleKind;

    #[test]
    fn singleton_zero() {
        let a = Schedule::new(ScheduleKind::ReSet, vec![(0, 0)]);
        let e = maxsep_superset(&a, Horizon::new(3, 9).unwrap()).unwrap();
        assert_eq!(e.final_prefix().members(), vec![0, 2, 4, 6, 8]);
    }

    #[test]
    fn empty_gives_odds() {
        let a = Schedule::empty(ScheduleKind::ReSet);
        let e = maxsep_superset(&a, Horizon::new(3, 8).unwrap()).unwrap();
        assert_eq!(e.final_prefix().members(), vec![1, 3, 5, 7]);
    }

    #[test]
    fn evens_one_per_stage() {
        let a = Schedule::new(ScheduleKind::ReSet, (0..10).map(|k| (2 * k, k as usize + 1)).collect());
        let e = maxsep_superset(&a, Horizon::new(12, 40).unwrap()).unwrap();
        assert!(validate_left_re(&e).is_ok());
    }

    #[test]
    fn two_per_stage_is_rejected() {
        let a = Schedule::new(ScheduleKind::ReSet, vec![(3, 1), (5, 1)]);
        assert!(matches!(maxsep_superset(&a, Horizon::new(3, 8).unwrap()), Err(Error::Input(_))));
    }
}
