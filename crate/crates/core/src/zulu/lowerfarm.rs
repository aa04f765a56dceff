use crate::error::{Error, Result};
use crate::prefix::Prefix;
use crate::process::ApproxProcess;

/// `E_t = (B_{s_t} ∩ [0, t]) ∪ R` where `s_t` is the least stage `>= s_{t-1}`
/// at which `B_{s_t} ∩ [0, t]` misses `R`. `R` must avoid `B`'s final prefix
/// and `B ∪ R` must leave some position of the horizon uncovered.
pub fn lowerfarm_witness(b: &ApproxProcess, r: &[usize]) -> Result<ApproxProcess> {
    let h = b.horizon();
    let fin = b.final_prefix();
    if let Some(&x) = r.iter().find(|&&x| x >= h.bits) {
        return Err(Error::usage(format!("R element {x} is outside the {} bit horizon", h.bits)));
    }
    if let Some(&x) = r.iter().find(|&&x| fin.get(x)) {
        return Err(Error::input(format!("R element {x} lies in B's final prefix")));
    }
    let r_set = Prefix::from_members(h.bits, r.iter().copied());
    if (0..h.bits).all(|n| fin.get(n) || r_set.get(n)) {
        return Err(Error::input("B ∪ R covers the whole horizon"));
    }
    let mut s_prev = 0;
    let mut stages = Vec::with_capacity(h.stage_count());
    for t in 0..h.stage_count() {
        let clear = |s: usize| r.iter().all(|&x| x > t || !b.bit(s, x));
        let s_t = (s_prev..h.stage_count()).find(|&s| clear(s)).ok_or_else(|| {
            Error::capacity(format!("no stage >= {s_prev} has B ∩ [0, {t}] disjoint from R"))
        })?;
        s_prev = s_t;
        let p = Prefix::from_bits((0..h.bits).map(|n| r_set.get(n) || (n <= t && b.bit(s_t, n))));
        stages.push(p);
    }
    ApproxProcess::from_stages(format!("{}-lowerfarm", b.label()), stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{validate_left_re, Horizon};

    #[test]
    fn disjoint_b_is_copied() {
        let h = Horizon::new(10, 8).unwrap();
        let b = ApproxProcess::constant("B", h, &Prefix::from_members(8, [0, 2]));
        let e = lowerfarm_witness(&b, &[5]).unwrap();
        assert_eq!(e.final_prefix().members(), vec![0, 2, 5]);
        assert_eq!(e.prefix(1).members(), vec![0, 5]);
        assert!(validate_left_re(&e).is_ok());
    }

    #[test]
    fn empty_r_restricts_b() {
        let h = Horizon::new(10, 8).unwrap();
        let b = ApproxProcess::constant("B", h, &Prefix::from_members(8, [3, 7]));
        let e = lowerfarm_witness(&b, &[]).unwrap();
        assert_eq!(e.final_prefix(), b.final_prefix());
    }

    #[test]
    fn waits_for_b_to_leave_r() {
        let h = Horizon::new(10, 8).unwrap();
        // B holds 4 until stage 6, then moves it to 3 (a lex increase).
        let b = ApproxProcess::from_fn("B", h, |s, n| if s < 6 { n == 4 } else { n == 3 });
        let e = lowerfarm_witness(&b, &[4]).unwrap();
        assert!(validate_left_re(&e).is_ok());
        assert_eq!(e.final_prefix().members(), vec![3, 4]);
    }
}
