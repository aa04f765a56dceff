//! A left-r.e. set whose complement is `{x_e = 2^e·3^{d(e)}}`, built to avoid
//! a finite catalog and to escape each of a list of r.e. sets.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numbering::Numbering;
use crate::prefix::Prefix;
use crate::schedule::{schedule_member, Schedule};
use crate::sparse::{pow2, SparseProcess, SparseSet};

pub const DEFAULT_E_MAX: usize = 8;
pub const DEFAULT_D_MAX: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalConfig {
    pub e_max: usize,
    pub d_max: u32,
}

impl Default for DiagonalConfig {
    fn default() -> Self {
        DiagonalConfig { e_max: DEFAULT_E_MAX, d_max: DEFAULT_D_MAX }
    }
}

pub fn x_value(e: usize, d: u32) -> BigUint {
    pow2(e) * BigUint::from(3u32).pow(d)
}

/// Position of the `(k+1)`-st zero of `p`.
fn nth_zero(p: &Prefix, k: usize) -> Option<usize> {
    (0..p.len()).filter(|&n| !p.get(n)).nth(k)
}

/// The largest position of an `(e+1)`-st zero among `α_{0,s}, …, α_{e,s}`
/// (indices past the catalog end are skipped).
pub fn compute_f(nu: &Numbering, e: usize, s: usize) -> Result<usize> {
    if nu.is_empty() {
        return Err(Error::usage("the diagonal needs a nonempty catalog"));
    }
    let mut best = 0;
    for i in 0..=e.min(nu.len() - 1) {
        let z = nth_zero(nu.at(i).prefix(s), e).ok_or_else(|| {
            Error::capacity(format!(
                "α_{i} has fewer than {} zeros at stage {s} within {} bits",
                e + 1,
                nu.horizon().bits
            ))
        })?;
        best = best.max(z);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagonalRow {
    pub stage: usize,
    pub e: usize,
    #[serde(rename = "F")]
    pub f: usize,
    pub d: u32,
    pub x: String,
    pub triggered: bool,
}

#[derive(Debug, Clone)]
pub struct DiagonalRun {
    pub b: SparseProcess,
    pub rows: Vec<DiagonalRow>,
    /// Final `d(e)`.
    pub d: Vec<u32>,
    /// Whether the trigger fired after the last change of `F(e)`.
    pub bumped: Vec<bool>,
    /// Trigger firings per `e`, as stages.
    pub triggers: Vec<Vec<usize>>,
    /// Stages at which `F(e)` changed.
    pub f_changes: Vec<Vec<usize>>,
}

impl DiagonalRun {
    pub fn x(&self, e: usize) -> BigUint {
        x_value(e, self.d[e])
    }
}

fn w_member(w: Option<&Schedule>, x: &BigUint, s: usize) -> Result<bool> {
    match (w, x.to_u64()) {
        (Some(w), Some(x)) => schedule_member(w, x, s),
        _ => Ok(false),
    }
}

/// Runs the construction for `e <= e_max` over all stages of the catalog's
/// horizon. `ws[e]` is `W_e`; missing entries are empty.
pub fn build_diagonal(nu: &Numbering, ws: &[Schedule], cfg: DiagonalConfig) -> Result<DiagonalRun> {
    let h = nu.horizon();
    let m = cfg.e_max + 1;
    let mut d = vec![0u32; m];
    let mut f_prev: Vec<Option<usize>> = vec![None; m];
    let mut bumped = vec![false; m];
    let mut triggers = vec![Vec::new(); m];
    let mut f_changes = vec![Vec::new(); m];
    let mut rows = Vec::with_capacity(m * h.stage_count());
    let mut stages = Vec::with_capacity(h.stage_count());
    for s in 0..h.stage_count() {
        for e in 0..m {
            let f = compute_f(nu, e, s)?;
            if f_prev[e] != Some(f) {
                if f_prev[e].is_some() {
                    f_changes[e].push(s);
                }
                f_prev[e] = Some(f);
                bumped[e] = false;
            }
            let floor = u32::try_from(f).unwrap_or(u32::MAX);
            d[e] = d[e].max(floor);
            let mut fired = false;
            if !bumped[e] {
                let x = x_value(e, d[e]);
                let w = ws.get(e);
                if !w_member(w, &x, s)? && w_member(w, &(&x * 3u32), s)? {
                    d[e] += 1;
                    bumped[e] = true;
                    fired = true;
                    triggers[e].push(s);
                }
            }
            if d[e] > cfg.d_max {
                return Err(Error::capacity(format!("d({e}) = {} exceeds d_max = {} at stage {s}", d[e], cfg.d_max)));
            }
            rows.push(DiagonalRow { stage: s, e, f, d: d[e], x: x_value(e, d[e]).to_string(), triggered: fired });
        }
        stages.push(SparseSet::cofinite((0..m).map(|e| x_value(e, d[e]))));
    }
    let b = SparseProcess::new("B", stages)?;
    Ok(DiagonalRun { b, rows, d, bumped, triggers, f_changes })
}

/// For every `e` whose trigger fired after the last change of `F(e)`, checks
/// `W_e(x_e) != B(x_e) or W_e(3x_e) != B(3x_e)` on final contents. Returns
/// the `e` that were checked, or the first failure.
pub fn check_disagreements(run: &DiagonalRun, ws: &[Schedule]) -> Result<Vec<usize>> {
    let b = run.b.final_set();
    let mut checked = Vec::new();
    for e in 0..run.d.len() {
        if !run.bumped[e] {
            continue;
        }
        let x = run.x(e);
        let x3 = &x * 3u32;
        let w = ws.get(e);
        let last = w.map_or(0, Schedule::last_stage).max(run.b.last_stage());
        let agree_x = w_member(w, &x, last)? == b.contains(&x);
        let agree_3x = w_member(w, &x3, last)? == b.contains(&x3);
        if agree_x && agree_3x {
            return Err(Error::invariant(format!("W_{e} agrees with B at both {x} and {x3}")));
        }
        checked.push(e);
    }
    Ok(checked)
}

/// Least position `< bits` where final `B` differs from each catalog member's
/// final prefix.
pub fn catalog_disagreements(run: &DiagonalRun, nu: &Numbering) -> Vec<Option<usize>> {
    let b = run.b.final_set();
    nu.processes()
        .iter()
        .map(|p| {
            let a = p.final_prefix();
            (0..a.len()).find(|&n| a.get(n) != b.contains(&BigUint::from(n)))
        })
        .collect()
}
