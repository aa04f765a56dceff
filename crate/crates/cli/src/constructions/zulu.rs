use num_bigint::BigUint;
use rand::seq::IteratorRandom;
use serde_json::json;

use super::{bits, Ctx};
use leftre::fixtures;
use leftre::zulu::{
    btt_check, lowerfarm_witness, max_join_gadget, maxsep_superset, split_complement, split_left_re, tilde_a as tilde,
    tilde_a_subset, BlockLayout, ZuluState, DEFAULT_INTERVALS,
};
use leftre::{ApproxProcess, Prefix, SparseProcess};

fn zulu_state(ctx: &mut Ctx, n_default: usize, stages: usize) -> anyhow::Result<ZuluState> {
    let n_max = ctx.cfg.params.n_max.unwrap_or(n_default);
    let omega = match ctx.schedule("omega")? {
        Some(w) => w,
        None => fixtures::random_omega(&mut ctx.rng, 1 << n_max, stages, stages / 2),
    };
    Ok(ZuluState::new(&omega, BlockLayout::new(n_max)?, stages)?)
}

/// Exactly one member of `A_s` and one non-member of `B_s` in every covered
/// interval, at every stage.
fn interval_counts(z: &ZuluState, a: &SparseProcess, b: &SparseProcess) -> anyhow::Result<Vec<String>> {
    let layout = z.layout();
    let mut bad = Vec::new();
    for s in 0..=z.stages() {
        for n in 1..=z.covered(s) {
            let lo = layout.offset(n)?;
            let end = layout.end(n);
            if a.stage(s).restrict(lo, end).count() != Some(BigUint::from(1u32)) {
                bad.push(format!("A_{s} in I_{n}"));
            }
            if b.stage(s).restrict(lo, end).count().map(|c| c + 1u32) != Some(BlockLayout::size(n)) {
                bad.push(format!("B_{s} in I_{n}"));
            }
        }
    }
    Ok(bad)
}

pub(super) fn zulu(ctx: &mut Ctx, maximal: bool) -> anyhow::Result<()> {
    let h = ctx.horizon(12, 512)?;
    let z = zulu_state(ctx, DEFAULT_INTERVALS, h.stages)?;
    for s in 0..=h.stages {
        ctx.out.line(json!({"stage": s, "omega": bits(z.omega(s)), "markers": z.marker_rows(s)?}));
    }
    let a = z.build_minimal()?;
    let b = z.build_maximal()?;
    let bad = interval_counts(&z, &a, &b)?;
    ctx.out.check("one-per-interval", bad.is_empty(), format!("violations: {bad:?}"));
    let btt = btt_check(&a, &b, z.layout())?;
    ctx.out.check("btt-link", btt.passed(), format!("{} (stage, interval) pairs, failure {:?}", btt.checked, btt.failure));
    let (main, other) = if maximal { (b, a) } else { (a, b) };
    ctx.out.dense.push(main.to_dense(h));
    ctx.out.sparse.push(main);
    ctx.out.sparse.push(other);
    Ok(())
}

pub(super) fn maxsep(ctx: &mut Ctx) -> anyhow::Result<()> {
    let h = ctx.horizon(40, 96)?;
    let a = match ctx.schedule("schedule")? {
        Some(a) => a,
        None => fixtures::one_per_stage(&mut ctx.rng, h.bits as u64 / 2, h.stages.min(h.bits / 2))?,
    };
    let e = maxsep_superset(&a, h)?;
    let a_proc = a.to_process("A", h)?;
    let (af, ef) = (a_proc.final_prefix(), e.final_prefix());
    ctx.out.line(json!({"A": af.members(), "E": ef.members()}));
    let strict = af.is_subset_of(ef) && af != ef;
    ctx.out.check("strict-superset", strict, format!("|A| = {}, |E| = {}", af.count_ones(), ef.count_ones()));
    let holes = af.non_members();
    let wrong: Vec<usize> = holes.iter().enumerate().filter(|&(k, &x)| ef.get(x) != (k % 2 == 1)).map(|(_, &x)| x).collect();
    ctx.out.check("every-second-hole", wrong.is_empty(), format!("{} holes, wrong at {wrong:?}", holes.len()));
    ctx.out.dense.push(e);
    ctx.out.dense.push(a_proc);
    Ok(())
}

pub(super) fn split(ctx: &mut Ctx) -> anyhow::Result<()> {
    let h = ctx.horizon(20, 64)?;
    let a = match ctx.catalog("catalog")? {
        Some(nu) if !nu.is_empty() => nu.at(0).clone(),
        Some(_) => anyhow::bail!("the split catalog is empty"),
        None => fixtures::all_odd_process(&mut ctx.rng, h, 5)?,
    };
    let h = a.horizon();
    let e = split_left_re(&a)?;
    let members = a.final_prefix().members();
    let ef = e.final_prefix();
    ctx.out.line(json!({"A": members, "E": ef.members()}));
    let wrong: Vec<usize> = members.iter().enumerate().filter(|&(k, &x)| ef.get(x) != (k % 2 == 0)).map(|(_, &x)| x).collect();
    ctx.out.check("alternation", wrong.is_empty(), format!("{} members, wrong at {wrong:?}", members.len()));

    // The complementary half on B = evens ∪ (an odd process).
    let odd = fixtures::all_odd_process(&mut ctx.rng, h, 5)?;
    let b = ApproxProcess::from_fn("B", h, |s, n| n % 2 == 0 || odd.bit(s, n));
    let f = split_complement(&b)?;
    let holes = b.final_prefix().non_members();
    let ff = f.final_prefix();
    let wrong: Vec<usize> = holes.iter().enumerate().filter(|&(k, &x)| ff.get(x) == (k % 2 == 0)).map(|(_, &x)| x).collect();
    ctx.out.check("complement-alternation", wrong.is_empty(), format!("{} holes, wrong at {wrong:?}", holes.len()));
    ctx.out.dense.extend([a, e, b, f]);
    Ok(())
}

pub(super) fn lowerfarm(ctx: &mut Ctx) -> anyhow::Result<()> {
    let h = ctx.horizon(40, 48)?;
    let b = match ctx.catalog("catalog")? {
        Some(nu) if !nu.is_empty() => nu.at(0).clone(),
        Some(_) => anyhow::bail!("the lowerfarm catalog is empty"),
        None => fixtures::random_process(&mut ctx.rng, "B", h, 6),
    };
    let h = b.horizon();
    let holes = b.final_prefix().non_members();
    let mut r = holes.iter().copied().choose_multiple(&mut ctx.rng, holes.len().saturating_sub(1).min(3));
    r.sort_unstable();
    let e = lowerfarm_witness(&b, &r)?;
    ctx.out.line(json!({"R": r, "B": b.final_prefix().members(), "E": e.final_prefix().members()}));
    let missing: Vec<usize> = r.iter().filter(|&&x| !e.final_prefix().get(x)).copied().collect();
    ctx.out.check("contains-R", missing.is_empty(), format!("missing {missing:?}"));
    let r_set = Prefix::from_members(h.bits, r.iter().copied());
    let stray: Vec<usize> = (0..h.stage_count())
        .filter(|&t| {
            let p = e.prefix(t);
            (0..h.bits).any(|n| p.get(n) && !r_set.get(n) && (n > t || !(0..=h.stages).any(|s| b.bit(s, n))))
        })
        .collect();
    ctx.out.check("bounded-by-B", stray.is_empty(), format!("stages with foreign members {stray:?}"));
    ctx.out.dense.extend([b, e]);
    Ok(())
}

pub(super) fn tilde_a(ctx: &mut Ctx) -> anyhow::Result<()> {
    let h = ctx.horizon(12, 512)?;
    let z = zulu_state(ctx, 3, h.stages)?;
    let n_max = z.layout().n_max();
    let w = match ctx.schedule("w")? {
        Some(w) => w,
        None => fixtures::random_re(&mut ctx.rng, n_max as u64 + 1, h.stages, 0.5),
    };
    let a = z.build_minimal()?;
    let t = tilde(&a, &w, z.layout())?;
    let sub = tilde_a_subset(&a, &w, z.layout())?;
    let limit = 2 * n_max + 2;
    let mut not_sub = Vec::new();
    for s in 0..=h.stages {
        let big = t.stage(s).members(limit)?;
        let small = sub.stage(s).members(limit)?;
        ctx.out.line(json!({
            "stage": s,
            "tilde": big.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "subset": small.iter().map(ToString::to_string).collect::<Vec<_>>(),
        }));
        if !small.iter().all(|x| big.contains(x)) {
            not_sub.push(s);
        }
    }
    ctx.out.check("subset", not_sub.is_empty(), format!("not a subset at stages {not_sub:?}"));
    let fin_w = w.final_members()?;
    let expected: usize = (1..=z.covered(h.stages)).map(|n| if fin_w.contains(&(n as u64)) { 1 } else { 2 }).sum();
    let count = t.final_set().count();
    ctx.out.check(
        "tilde-size",
        count == Some(BigUint::from(expected)),
        format!("{count:?} members, expected {expected}"),
    );
    let b_dense = z.build_maximal()?.to_dense(h);
    let joined = max_join_gadget(&b_dense, &w)?;
    ctx.out.dense.extend([b_dense, joined, a.to_dense(h)]);
    ctx.out.sparse.extend([t, sub]);
    Ok(())
}
