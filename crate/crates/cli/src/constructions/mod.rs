mod relations;
mod sets;
mod zulu;

use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use rand_chacha::ChaCha8Rng;

use crate::{load_numbering, Construction, Outcome, RunConfig};
use leftre::fixtures;
use leftre::{Horizon, Numbering, Prefix, Schedule};

pub(crate) fn dispatch(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let mut ctx = Ctx { cfg, rng: fixtures::rng(cfg.seed), out: Outcome::default() };
    match cfg.construction {
        Construction::Markers => sets::markers(&mut ctx)?,
        Construction::Generic => sets::generic(&mut ctx)?,
        Construction::Selfref => sets::selfref(&mut ctx)?,
        Construction::Bambam => sets::bambam(&mut ctx)?,
        Construction::Excise => sets::excise(&mut ctx)?,
        Construction::ZuluMin => zulu::zulu(&mut ctx, false)?,
        Construction::ZuluMax => zulu::zulu(&mut ctx, true)?,
        Construction::Maxsep => zulu::maxsep(&mut ctx)?,
        Construction::Split => zulu::split(&mut ctx)?,
        Construction::Lowerfarm => zulu::lowerfarm(&mut ctx)?,
        Construction::TildeA => zulu::tilde_a(&mut ctx)?,
        Construction::IncDecode => relations::inc_decode(&mut ctx)?,
        Construction::Gazebo => relations::gazebo(&mut ctx)?,
        Construction::Diagonal => relations::diagonal(&mut ctx)?,
    }
    Ok(ctx.out)
}

pub(crate) struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub rng: ChaCha8Rng,
    pub out: Outcome,
}

impl Ctx<'_> {
    /// The configured horizon, falling back to the given defaults, recorded
    /// in the outcome.
    fn horizon(&mut self, stages: usize, bits: usize) -> anyhow::Result<Horizon> {
        let h = self.cfg.horizon(stages, bits)?;
        self.out.horizon = Some(h);
        Ok(h)
    }

    /// A numbering input, whose horizon must agree with any explicit
    /// `--stages` / `--bits`.
    fn catalog(&mut self, name: &str) -> anyhow::Result<Option<Numbering>> {
        let Some(path) = self.cfg.input(name) else { return Ok(None) };
        let nu = load_numbering(&path)?;
        let h = nu.horizon();
        if self.cfg.stages.is_some_and(|s| s != h.stages) || self.cfg.bits.is_some_and(|b| b != h.bits) {
            bail!("{} has horizon {}x{}, which conflicts with the requested one", path.display(), h.stages, h.bits);
        }
        self.out.horizon = Some(h);
        Ok(Some(nu))
    }

    fn schedule(&self, name: &str) -> anyhow::Result<Option<Schedule>> {
        self.cfg
            .input(name)
            .map(|p| Schedule::load(&p).with_context(|| format!("loading {name} schedule {}", p.display())))
            .transpose()
    }

    fn schedules(&self, name: &str) -> anyhow::Result<Option<Vec<Schedule>>> {
        let Some(path) = self.cfg.input(name) else { return Ok(None) };
        Ok(Some(read_json(&path)?))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("{}: line {} column {}: {e}", path.display(), e.line(), e.column()))
}

fn bits(p: &Prefix) -> String {
    p.to_bit_string()
}
