use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde_json::json;

use super::Ctx;
use leftre::diagonal::{build_diagonal, catalog_disagreements, check_disagreements, DiagonalConfig, DEFAULT_D_MAX, DEFAULT_E_MAX};
use leftre::relations::{
    b_from_k, decide_k_below, gazebo_lex_emissions, gazebo_run, inc_oracle_bruteforce, k_decoding_numbering,
    lex_oracle_bruteforce, GazeboEvent,
};
use leftre::{fixtures, lex_cmp, Error};

pub(super) fn inc_decode(ctx: &mut Ctx) -> anyhow::Result<()> {
    let h = ctx.horizon(40, 40)?;
    let x_max = ctx.cfg.params.x.unwrap_or(16);
    let k = match ctx.schedule("k")? {
        Some(k) => k,
        None => fixtures::random_k(&mut ctx.rng, x_max as u64 + 1, h.stages / 2),
    };
    let nu = k_decoding_numbering(&k, x_max, h)?;
    let oracle = inc_oracle_bruteforce(&nu)?;
    let fin = k.final_members()?;
    let mut wrong = Vec::new();
    for x in 0..=x_max {
        let truth: BTreeSet<u64> = fin.iter().copied().filter(|&y| y < x as u64).collect();
        match decide_k_below(&oracle, &nu, x, &k) {
            Ok(o) => {
                ctx.out.line(json!({
                    "x": x, "decoded": o.decoded, "candidate": nu.at(o.candidate).label(), "stage": o.stage,
                }));
                if o.decoded != truth {
                    wrong.push(x);
                }
            }
            Err(Error::Invariant(msg)) => {
                ctx.out.line(json!({"x": x, "error": msg}));
                wrong.push(x);
            }
            Err(e) => return Err(e.into()),
        }
    }
    ctx.out.check(
        "decodes-k",
        wrong.is_empty(),
        format!("{} candidates, {} INC pairs, wrong below {wrong:?}", nu.len(), oracle.len()),
    );
    ctx.out.dense.push(b_from_k(&k, h)?);
    ctx.out.dense.extend(nu.processes()[..2].iter().cloned());
    Ok(())
}

pub(super) fn gazebo(ctx: &mut Ctx) -> anyhow::Result<()> {
    let beta = match ctx.catalog("catalog")? {
        Some(nu) => nu,
        None => {
            let h = ctx.horizon(32, 12)?;
            let count = ctx.cfg.params.catalog_size.unwrap_or(6);
            fixtures::random_catalog(&mut ctx.rng, h, count, 6, |_| true)?
        }
    };
    let h = beta.horizon();
    let (alpha, state) = gazebo_run(&beta)?;
    for s in 0..=h.stages {
        let events: Vec<&GazeboEvent> = state.events.iter().filter(|ev| event_stage(ev) == s).collect();
        let followers: Vec<(usize, usize)> = state.followers_at(s).iter().map(|(&b, &a)| (b, a)).collect();
        ctx.out.line(json!({"stage": s, "followers": followers, "events": events}));
    }
    let emitted = gazebo_lex_emissions(&state, &alpha);

    let mut broken = Vec::new();
    for (&(a, b), &s) in &emitted.pairs {
        if (s..=h.stages).any(|t| lex_cmp(alpha.at(a).prefix(t), alpha.at(b).prefix(t)).ok() == Some(Ordering::Greater)) {
            broken.push((a, b));
        }
    }
    ctx.out.check("persistence", broken.is_empty(), format!("{} emitted pairs, broken {broken:?}", emitted.len()));

    let brute = lex_oracle_bruteforce(&alpha);
    let ours: BTreeSet<_> = emitted.pairs.keys().collect();
    let theirs: BTreeSet<_> = brute.pairs.keys().collect();
    let missing: Vec<_> = theirs.difference(&ours).collect();
    let extra: Vec<_> = ours.difference(&theirs).collect();
    ctx.out.check(
        "equals-bruteforce",
        missing.is_empty() && extra.is_empty(),
        format!("missing {missing:?}, extra {extra:?}"),
    );

    let not_ones: Vec<usize> = (0..state.alpha_count())
        .filter(|&a| {
            state.obliterated_at(a).is_some_and(|t| (t..=h.stages).any(|s| alpha.at(a).prefix(s).count_ones() != h.bits))
        })
        .collect();
    ctx.out.check(
        "obliterated-all-ones",
        not_ones.is_empty(),
        format!("{} of {} indices obliterated, not all ones: {not_ones:?}", state.obliterations(), state.alpha_count()),
    );
    ctx.out.dense.extend(alpha.processes().iter().cloned());
    Ok(())
}

fn event_stage(ev: &GazeboEvent) -> usize {
    match *ev {
        GazeboEvent::Crossing { stage, .. } | GazeboEvent::Obliterated { stage, .. } | GazeboEvent::Follower { stage, .. } => {
            stage
        }
    }
}

pub(super) fn diagonal(ctx: &mut Ctx) -> anyhow::Result<()> {
    let cfg = DiagonalConfig {
        e_max: ctx.cfg.params.e_max.unwrap_or(DEFAULT_E_MAX),
        d_max: ctx.cfg.params.d_max.unwrap_or(DEFAULT_D_MAX),
    };
    let zeros = cfg.e_max + 1;
    let nu = match ctx.catalog("catalog")? {
        Some(nu) => nu,
        None => {
            let h = ctx.horizon(24, 64)?;
            let count = ctx.cfg.params.catalog_size.unwrap_or(6);
            fixtures::random_catalog(&mut ctx.rng, h, count, 4, |p| {
                p.stages().iter().all(|s| s.len() - s.count_ones() >= zeros)
            })?
        }
    };
    let stages = nu.horizon().stages;
    let ws = match ctx.schedules("requirements")? {
        Some(ws) => ws,
        None => (0..zeros).map(|e| fixtures::diagonal_w(&mut ctx.rng, e, stages, 0.5)).collect(),
    };
    let run = build_diagonal(&nu, &ws, cfg)?;
    for row in &run.rows {
        ctx.out.line(serde_json::to_value(row)?);
    }

    let diffs = catalog_disagreements(&run, &nu);
    let same: Vec<usize> = diffs.iter().enumerate().filter(|(_, d)| d.is_none()).map(|(i, _)| i).collect();
    ctx.out.check("differs-from-catalog", same.is_empty(), format!("first differences {diffs:?}"));

    match check_disagreements(&run, &ws) {
        Ok(checked) => ctx.out.check("disagreement", true, format!("checked e in {checked:?}")),
        Err(Error::Invariant(msg)) => ctx.out.check("disagreement", false, msg),
        Err(e) => return Err(e.into()),
    }

    // Between consecutive changes of F(e) the trigger fires at most once.
    let mut crowded = Vec::new();
    for e in 0..zeros {
        let mut bounds = vec![0];
        bounds.extend(&run.f_changes[e]);
        bounds.push(usize::MAX);
        for w in bounds.windows(2) {
            if run.triggers[e].iter().filter(|&&t| t >= w[0] && t < w[1]).count() > 1 {
                crowded.push(e);
                break;
            }
        }
    }
    ctx.out.check("one-trigger-per-epoch", crowded.is_empty(), format!("repeated triggers for e in {crowded:?}"));
    ctx.out.line(json!({"d": run.d, "bumped": run.bumped}));
    ctx.out.sparse.push(run.b);
    Ok(())
}
