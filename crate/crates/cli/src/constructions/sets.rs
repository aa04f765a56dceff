use std::collections::BTreeSet;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;
use serde_json::json;

use super::{bits, Ctx};
use leftre::fixtures;
use leftre::genericity::{
    generic_pipeline, marker_free_intervals, verify_indifference, RequirementList, DEFAULT_VARIANT_CAP,
};
use leftre::markers::build_retraceable;
use leftre::selfref::{
    boundary_process, excise as excise_numbering, make_into_itself, singleton_numbering_finite,
    singleton_numbering_infinite, singleton_witness, switch_string, SelfRefPlan,
};
use leftre::{
    index_set_estimate, lex_cmp, ApproxProcess, Horizon, HorizonPredicate, LimitFunctionApprox, Numbering, Prefix,
    Schedule, ScheduleKind,
};

fn limit_function(ctx: &Ctx, default_args: usize) -> anyhow::Result<LimitFunctionApprox> {
    match ctx.cfg.input("limit") {
        Some(p) => Ok(LimitFunctionApprox::from_json(&std::fs::read_to_string(&p)?)?),
        None => Ok(fixtures::n_plus_five(default_args)),
    }
}

pub(super) fn markers(ctx: &mut Ctx) -> anyhow::Result<()> {
    let h = ctx.horizon(64, 64)?;
    let f = limit_function(ctx, 20)?;
    let m = build_retraceable(&f, h)?;
    let moves: std::collections::BTreeMap<usize, usize> = m.moves().iter().copied().collect();
    for s in 0..=h.stages {
        let markers: Vec<usize> = (0..).map_while(|k| m.marker(k, s)).take(24).collect();
        ctx.out.line(json!({"stage": s, "moved_from": moves.get(&s), "markers": markers}));
    }
    let settled = m.settled_markers();
    let above: Vec<usize> = (0..settled.len()).filter(|&n| settled[n] as u64 <= f.final_value(n)).collect();
    ctx.out.check(
        "markers-above-f",
        above.is_empty(),
        format!("{} settled markers, i_n <= f(n) at {above:?}", settled.len()),
    );
    let mut retrace_bad = Vec::new();
    let mut count_bad = Vec::new();
    for n in 0..settled.len() {
        if n + 1 < settled.len() && m.retrace(settled[n + 1])? != settled[n] {
            retrace_bad.push(n + 1);
        }
        if m.count_h(settled[n])? != n {
            count_bad.push(n);
        }
    }
    ctx.out.check("retrace", retrace_bad.is_empty(), format!("mismatches at {retrace_bad:?}"));
    ctx.out.check("count-h", count_bad.is_empty(), format!("mismatches at {count_bad:?}"));
    let co = m.complement_schedule().to_process("co-I", h)?;
    let grows = co.stages().windows(2).all(|w| w[0].is_subset_of(&w[1]));
    ctx.out.check("complement-re", grows, format!("{} positions leave I", co.final_prefix().count_ones()));
    ctx.out.dense.push(m.complement_process());
    Ok(())
}

pub(super) fn generic(ctx: &mut Ctx) -> anyhow::Result<()> {
    let h = ctx.horizon(80, 24)?;
    let ws = match ctx.schedules("requirements")? {
        Some(list) => RequirementList::new(list)?,
        None => fixtures::requirement_fixture(),
    };
    let plan = generic_pipeline(&ws, h.bits, h.stages)?;
    let a: Vec<bool> = plan.a.iter().collect();
    ctx.out.line(json!({"forced": bits(&plan.a)}));
    for (n, f) in plan.f_values.iter().enumerate() {
        ctx.out.line(json!({"n": n, "f": f, "J": plan.j.get(n)}));
    }
    let unmet: Vec<usize> = (0..ws.len()).filter(|&e| !ws.set(e).satisfied_by(&a, usize::MAX)).collect();
    ctx.out.check("forced-prefix", unmet.is_empty(), format!("unmet requirements {unmet:?}"));

    let settled = plan.i.settled_markers();
    let low: Vec<usize> = (0..settled.len())
        .filter(|&n| 2 * n < plan.f_values.len() && settled[n] <= plan.f_values[2 * n])
        .collect();
    ctx.out.check("markers-above-f2n", low.is_empty(), format!("i_n <= f(2n) at {low:?}"));
    let free = marker_free_intervals(&plan);
    let short: Vec<_> = free.iter().filter(|&&(n, k)| k < n).collect();
    ctx.out.check("marker-free-intervals", short.is_empty(), format!("{} values of n checked, short at {short:?}", free.len()));

    let members = plan.i.final_members();
    ctx.out.line(json!({"I": members}));
    let cap = ctx.cfg.params.variant_cap.unwrap_or(DEFAULT_VARIANT_CAP);
    let report = verify_indifference(&plan.a, &members, &ws, usize::MAX, cap)?;
    ctx.out.line(json!({"indifference": report}));
    ctx.out.check(
        "indifference",
        report.passed(),
        format!("{} variants over positions {:?}", report.variants, report.positions),
    );
    ctx.out.dense.push(plan.i.complement_process());
    ctx.out.dense.push(ApproxProcess::constant("A", h, &plan.a));
    Ok(())
}

pub(super) fn selfref(ctx: &mut Ctx) -> anyhow::Result<()> {
    let h = ctx.horizon(80, 64)?;
    let checkpoint = ctx.cfg.params.checkpoint.unwrap_or(h.bits / 2);
    let base = match ctx.catalog("catalog")? {
        Some(nu) => nu,
        None => {
            // Every stage needs an early 0 so that the switch string stays
            // short of the checkpoint.
            let room = checkpoint.min(h.bits.saturating_sub(checkpoint + 1));
            let early_zero = move |p: &ApproxProcess| p.stages().iter().all(|s| (0..room).any(|n| !s.get(n)));
            fixtures::random_catalog(&mut ctx.rng, h, h.bits, 4, early_zero)?
        }
    };
    let h = base.horizon();
    let a = fixtures::random_process(&mut ctx.rng, "A", h, 6);
    let f = limit_function(ctx, h.bits)?;
    let i = build_retraceable(&f, h)?;
    let plan = SelfRefPlan {
        base,
        a: a.clone(),
        i: i.clone(),
        x: boundary_process(h, checkpoint),
        class_c: HorizonPredicate::one_beyond(checkpoint),
    };
    let out = make_into_itself(&plan)?;
    let index_set = index_set_estimate(&out.beta, &plan.class_c);
    let a_final: BTreeSet<usize> = a.final_prefix().members().into_iter().collect();
    let i_final: BTreeSet<usize> = i.final_members().into_iter().collect();
    for e in 0..h.bits {
        let sigma = out.sigma.iter().find(|t| t.0 == e);
        ctx.out.line(json!({
            "e": e,
            "in_I": i_final.contains(&e),
            "removed_at": i.removed_at(e),
            "h": plan.h(e)?,
            "sigma": sigma.map(|t| bits(&t.3)),
            "in_class": index_set.contains(&e),
            "in_A": a_final.contains(&e),
        }));
    }
    let stray: Vec<usize> = index_set.symmetric_difference(&a_final).filter(|e| !i_final.contains(e)).copied().collect();
    ctx.out.check("difference-inside-I", stray.is_empty(), format!("outside I: {stray:?}"));
    let outside: Vec<usize> = (0..h.bits).filter(|e| !i_final.contains(e)).collect();
    let wrong: Vec<usize> =
        outside.iter().filter(|e| index_set.contains(e) != a_final.contains(e)).copied().collect();
    ctx.out.check(
        "outside-I-follows-A",
        wrong.is_empty(),
        format!("{} indices outside I, mismatches {wrong:?}", outside.len()),
    );
    ctx.out.dense.extend(out.beta.processes().iter().cloned());
    ctx.out.dense.push(a);
    Ok(())
}

/// A random process whose last stage jumps, so no earlier stage equals the
/// limit.
fn late_jumping(rng: &mut impl Rng, h: Horizon) -> anyhow::Result<ApproxProcess> {
    let early = Horizon::new(h.stages - 1, h.bits)?;
    let q = fixtures::random_process(rng, "A", early, 4);
    let mut last = q.final_prefix().clone();
    let z = *last.non_members().choose(rng).ok_or_else(|| anyhow::anyhow!("A is all ones"))?;
    last.set(z, true);
    for n in z + 1..h.bits {
        last.set(n, rng.gen_bool(0.3));
    }
    let mut stages = q.stages().to_vec();
    stages.push(last);
    Ok(ApproxProcess::from_stages("A", stages)?)
}

fn witness_checks(ctx: &mut Ctx, tag: &str, gamma: &Numbering, a: &ApproxProcess) -> anyhow::Result<()> {
    let fin = a.final_prefix();
    let r = switch_string(fin).ok_or_else(|| anyhow::anyhow!("A is all ones"))?;
    let w = singleton_witness(gamma, a, &r)?;
    let members = w.final_members()?;
    ctx.out.line(json!({"witness": tag, "r": bits(&r), "entries": w.entries}));
    ctx.out.check(&format!("{tag}-witness-nonempty"), !members.is_empty(), format!("{} indices", members.len()));
    let clash: Vec<u64> =
        members.iter().filter(|&&e| gamma.at(e as usize).final_prefix() == fin).copied().collect();
    ctx.out.check(&format!("{tag}-witness-avoids-A"), clash.is_empty(), format!("A-indices in B: {clash:?}"));
    let mut prev = BTreeSet::new();
    let mut shrank = Vec::new();
    for k in 1..=gamma.len() {
        let part = Numbering::catalog(gamma.horizon(), gamma.processes()[..k].to_vec())?;
        let cur = singleton_witness(&part, a, &r)?.final_members()?;
        if !prev.is_subset(&cur) {
            shrank.push(k);
        }
        prev = cur;
    }
    ctx.out.check(&format!("{tag}-witness-monotone"), shrank.is_empty(), format!("shrinks at sizes {shrank:?}"));
    Ok(())
}

pub(super) fn bambam(ctx: &mut Ctx) -> anyhow::Result<()> {
    let h = ctx.horizon(60, 48)?;
    let size = ctx.cfg.params.catalog_size.unwrap_or(12);
    let base = match ctx.catalog("catalog")? {
        Some(nu) => nu,
        None => fixtures::random_catalog(&mut ctx.rng, h, size, 4, |_| true)?,
    };
    let h = base.horizon();

    let mut finite = Prefix::from_bits((0..h.bits.min(16)).map(|_| ctx.rng.gen_bool(0.4)));
    if finite.count_ones() == 0 {
        finite.set(0, true);
    }
    let gamma = singleton_numbering_finite(&finite, &base)?;
    let target = finite.resized(h.bits);
    let got = index_set_estimate(&gamma, &HorizonPredicate::limit_equals(target.clone()));
    let want: BTreeSet<usize> = target.members().into_iter().collect();
    ctx.out.line(json!({"finite": bits(&finite), "index_set": got}));
    ctx.out.check("finite-index-set", got == want, format!("{got:?} vs {want:?}"));
    let a_const = ApproxProcess::constant("A", h, &target);
    witness_checks(ctx, "finite", &gamma, &a_const)?;
    ctx.out.dense.extend(gamma.processes().iter().cloned());

    let a = late_jumping(&mut ctx.rng, h)?;
    let fin = a.final_prefix().clone();
    let r: Vec<usize> = {
        let mut r = fin.non_members().into_iter().choose_multiple(&mut ctx.rng, base.len().min(6));
        r.sort_unstable();
        r
    };
    // Base processes that can rise above A's switch string come first, so
    // the witness has something to find.
    let cut = switch_string(&fin).map(|s| s.resized(h.bits));
    let mut order: Vec<ApproxProcess> = base.processes().to_vec();
    order.sort_by_key(|p| {
        !cut.as_ref().is_some_and(|c| p.stages().iter().any(|q| lex_cmp(q, c) == Ok(std::cmp::Ordering::Greater)))
    });
    let base = Numbering::catalog(h, order)?;
    let gamma = singleton_numbering_infinite(&a, &r, &base)?;
    let got = index_set_estimate(&gamma, &HorizonPredicate::limit_equals(fin.clone()));
    let want: BTreeSet<usize> = fin.members().into_iter().collect();
    ctx.out.line(json!({"infinite": bits(&fin), "R": r, "index_set": got}));
    ctx.out.check("infinite-index-set", got == want, format!("{} indices, expected {}", got.len(), want.len()));
    witness_checks(ctx, "infinite", &gamma, &a)?;
    ctx.out.dense.extend(gamma.processes().iter().cloned());
    ctx.out.dense.push(a);
    Ok(())
}

pub(super) fn excise(ctx: &mut Ctx) -> anyhow::Result<()> {
    let h = ctx.horizon(30, 32)?;
    let size = ctx.cfg.params.catalog_size.unwrap_or(8);
    let alpha = match ctx.catalog("catalog")? {
        Some(nu) => nu,
        None => {
            let nu = fixtures::random_catalog(&mut ctx.rng, h, size, 3, |_| true)?;
            // Freeze every other index so some sets pass the r.e. surrogate.
            let procs = nu
                .processes()
                .iter()
                .enumerate()
                .map(|(e, p)| if e % 2 == 0 { ApproxProcess::constant(p.label(), h, p.final_prefix()) } else { p.clone() })
                .collect();
            Numbering::catalog(h, procs)?
        }
    };
    let h = alpha.horizon();
    let r = match ctx.schedule("schedule")? {
        Some(r) => r,
        None => {
            let re_like = index_set_estimate(&alpha, &HorizonPredicate::set_monotone());
            let entries = re_like.into_iter().map(|e| (e as u64, ctx.rng.gen_range(0..=h.stages / 2))).collect();
            Schedule::new(ScheduleKind::ReSet, entries)
        }
    };
    let x = boundary_process(h, h.bits / 2);
    let beta = excise_numbering(&alpha, &r, &x)?;
    ctx.out.line(json!({"R": r.entries}));
    let excised: BTreeSet<usize> =
        (0..alpha.len()).filter(|&e| r.entry_stage(e as u64).ok().flatten().is_some_and(|s| s <= h.stages)).collect();
    let mut copied_bad = Vec::new();
    for e in 0..alpha.len() {
        let (a, b) = (alpha.at(e), beta.at(e));
        ctx.out.line(json!({"e": e, "excised": excised.contains(&e), "alpha": bits(a.final_prefix()), "beta": bits(b.final_prefix())}));
        if !excised.contains(&e) && a.stages() != b.stages() {
            copied_bad.push(e);
        }
    }
    ctx.out.check("untouched-copied", copied_bad.is_empty(), format!("differ at {copied_bad:?}"));
    let hits: Vec<(usize, usize)> = excised
        .iter()
        .flat_map(|&e| (0..beta.len()).map(move |j| (e, j)))
        .filter(|&(e, j)| beta.at(j).final_prefix() == alpha.at(e).final_prefix())
        .collect();
    ctx.out.check("range-avoids-excised", hits.is_empty(), format!("{} excised, collisions {hits:?}", excised.len()));
    ctx.out.dense.extend(beta.processes().iter().cloned());
    Ok(())
}
