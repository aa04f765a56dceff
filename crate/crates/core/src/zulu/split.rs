use crate::error::{Error, Result};
use crate::prefix::Prefix;
use crate::process::ApproxProcess;

fn even_horizon(p: &ApproxProcess) -> Result<()> {
    if !p.horizon().bits.is_multiple_of(2) {
        return Err(Error::usage(format!(
            "splitting needs an even number of bits, got {}",
            p.horizon().bits
        )));
    }
    Ok(())
}

/// `{l_{2k}, l_{2k+1} - 1 : k}` for an ascending list of odd numbers.
fn pair_down(list: &[usize], bits: usize) -> Prefix {
    let mut p = Prefix::zeros(bits);
    for (i, &x) in list.iter().enumerate() {
        p.set(if i % 2 == 0 { x } else { x - 1 }, true);
    }
    p
}

/// `E = {a_{2k}, a_{2k+1} - 1}` from the ascending members of each `A_s`.
/// Every member must be odd at every stage.
pub fn split_left_re(a: &ApproxProcess) -> Result<ApproxProcess> {
    even_horizon(a)?;
    let bits = a.horizon().bits;
    let mut stages = Vec::with_capacity(a.horizon().stage_count());
    for (s, p) in a.stages().iter().enumerate() {
        let members = p.members();
        if let Some(x) = members.iter().find(|&&x| x % 2 == 0) {
            return Err(Error::input(format!("A_{s} has the even member {x}")));
        }
        stages.push(pair_down(&members, bits));
    }
    ApproxProcess::from_stages(format!("{}-split-E", a.label()), stages)
}

/// The complementary half: with `b_0 < b_1 < ...` the non-members of `B`
/// (all odd), `F` is the complement of `{b_{2k}, b_{2k+1} - 1}`.
pub fn split_complement(b: &ApproxProcess) -> Result<ApproxProcess> {
    even_horizon(b)?;
    let bits = b.horizon().bits;
    let mut stages = Vec::with_capacity(b.horizon().stage_count());
    for (s, p) in b.stages().iter().enumerate() {
        let holes = p.non_members();
        if let Some(x) = holes.iter().find(|&&x| x % 2 == 0) {
            return Err(Error::input(format!("B_{s} misses the even number {x}")));
        }
        let out = pair_down(&holes, bits);
        stages.push(Prefix::from_bits(out.iter().map(|bit| !bit)));
    }
    ApproxProcess::from_stages(format!("{}-split-F", b.label()), stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{validate_left_re, Horizon};

    #[test]
    fn static_one_three() {
        let h = Horizon::new(2, 8).unwrap();
        let a = ApproxProcess::constant("A", h, &Prefix::from_members(8, [1, 3]));
        let e = split_left_re(&a).unwrap();
        assert_eq!(e.final_prefix().members(), vec![1, 2]);
    }

    #[test]
    fn empty_stays_empty() {
        let h = Horizon::new(2, 8).unwrap();
        let e = split_left_re(&ApproxProcess::constant("A", h, &Prefix::zeros(8))).unwrap();
        assert_eq!(e.final_prefix().count_ones(), 0);
    }

    #[test]
    fn even_member_is_rejected() {
        let h = Horizon::new(2, 8).unwrap();
        let a = ApproxProcess::constant("A", h, &Prefix::from_members(8, [2]));
        assert!(matches!(split_left_re(&a), Err(Error::Input(_))));
    }

    #[test]
    fn complement_half_is_left_re() {
        let h = Horizon::new(3, 8).unwrap();
        // Non-members {1, 3, 5, 7} then {1, 5, 7}: B gains 3.
        let b = ApproxProcess::from_fn("B", h, |s, n| n % 2 == 0 || (s >= 2 && n == 3));
        let f = split_complement(&b).unwrap();
        assert!(validate_left_re(&f).is_ok());
        assert_eq!(f.prefix(0).non_members(), vec![1, 2, 5, 6]);
    }
}
