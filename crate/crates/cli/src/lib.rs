//! Batch driver: load a config, run one construction on a finite horizon,
//! check its invariants, and write a JSON-lines trace plus a verdict.

mod constructions;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use leftre::relations::{inc_oracle_bruteforce, lex_oracle_bruteforce, RelationOracle};
use leftre::{validate_left_re, ApproxProcess, Horizon, Numbering, NumberingFile, SparseProcess, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Markers,
    Generic,
    Selfref,
    Bambam,
    ZuluMin,
    ZuluMax,
    Maxsep,
    Split,
    Lowerfarm,
    TildeA,
    IncDecode,
    Gazebo,
    Diagonal,
    Excise,
}

impl Construction {
    pub const ALL: [Construction; 14] = [
        Construction::Markers,
        Construction::Generic,
        Construction::Selfref,
        Construction::Bambam,
        Construction::ZuluMin,
        Construction::ZuluMax,
        Construction::Maxsep,
        Construction::Split,
        Construction::Lowerfarm,
        Construction::TildeA,
        Construction::IncDecode,
        Construction::Gazebo,
        Construction::Diagonal,
        Construction::Excise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Construction::Markers => "markers",
            Construction::Generic => "generic",
            Construction::Selfref => "selfref",
            Construction::Bambam => "bambam",
            Construction::ZuluMin => "zulu-min",
            Construction::ZuluMax => "zulu-max",
            Construction::Maxsep => "maxsep",
            Construction::Split => "split",
            Construction::Lowerfarm => "lowerfarm",
            Construction::TildeA => "tilde-a",
            Construction::IncDecode => "inc-decode",
            Construction::Gazebo => "gazebo",
            Construction::Diagonal => "diagonal",
            Construction::Excise => "excise",
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Construction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .with_context(|| format!("unknown construction {s:?}"))
    }
}

/// Per-construction knobs. Anything left unset takes the construction's
/// default.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub n_max: Option<usize>,
    pub x: Option<usize>,
    pub checkpoint: Option<usize>,
    pub catalog_size: Option<usize>,
    pub e_max: Option<usize>,
    pub d_max: Option<u32>,
    pub variant_cap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub construction: Construction,
    #[serde(default)]
    pub stages: Option<usize>,
    #[serde(default)]
    pub bits: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Named input files. Relative paths resolve against `base_dir`.
    #[serde(default)]
    pub inputs: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub params: Params,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn new(construction: Construction) -> Self {
        RunConfig {
            construction,
            stages: None,
            bits: None,
            seed: 0,
            inputs: BTreeMap::new(),
            params: Params::default(),
            base_dir: PathBuf::new(),
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| {
            anyhow::anyhow!("config {}: line {} column {}: {e}", path.display(), e.line(), e.column())
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_horizon(mut self, stages: usize, bits: usize) -> Self {
        self.stages = Some(stages);
        self.bits = Some(bits);
        self
    }

    pub fn with_input(mut self, name: &str, path: impl Into<PathBuf>) -> Self {
        self.inputs.insert(name.to_string(), path.into());
        self
    }

    pub(crate) fn input(&self, name: &str) -> Option<PathBuf> {
        self.inputs.get(name).map(|p| if p.is_absolute() { p.clone() } else { self.base_dir.join(p) })
    }

    pub(crate) fn horizon(&self, stages: usize, bits: usize) -> anyhow::Result<Horizon> {
        Ok(Horizon::new(self.stages.unwrap_or(stages), self.bits.unwrap_or(bits))?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything a construction produced: trace lines, checks, and the
/// processes the universal validator must see.
#[derive(Debug, Default)]
pub struct Outcome {
    pub horizon: Option<Horizon>,
    pub trace: Vec<Value>,
    pub checks: Vec<Check>,
    pub dense: Vec<ApproxProcess>,
    pub sparse: Vec<SparseProcess>,
}

impl Outcome {
    pub(crate) fn line(&mut self, v: Value) {
        self.trace.push(v);
    }

    pub(crate) fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
    }

    /// Runs `validate_left_re` (or its sparse twin) over every recorded
    /// process.
    fn validate_all(&mut self) {
        let mut bad = Vec::new();
        for p in &self.dense {
            if let ValidationReport::Violation { stage, position } = validate_left_re(p) {
                bad.push(format!("{} at stage {stage} position {position}", p.label()));
            }
        }
        for p in &self.sparse {
            if let leftre::SparseReport::Violation { stage, position } = p.validate() {
                bad.push(format!("{} at stage {stage} position {position}", p.label()));
            }
        }
        let n = self.dense.len() + self.sparse.len();
        let detail = if bad.is_empty() { format!("{n} processes, no violations") } else { bad.join("; ") };
        self.check("left-re", bad.is_empty(), detail);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub construction: Construction,
    pub seed: u64,
    pub horizon: Option<Horizon>,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug)]
pub struct RunReport {
    pub verdict: Verdict,
    pub outcome: Outcome,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed
    }

    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for line in &self.outcome.trace {
            out.push_str(&serde_json::to_string(line).expect("trace values serialize"));
            out.push('\n');
        }
        out
    }

    pub fn verdict_json(&self) -> String {
        serde_json::to_string_pretty(&self.verdict).expect("verdicts serialize") + "\n"
    }

    /// Writes `trace.jsonl` and `verdict.json` into `dir`.
    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        fs::write(dir.join("trace.jsonl"), self.trace_jsonl())?;
        fs::write(dir.join("verdict.json"), self.verdict_json())?;
        Ok(())
    }
}

/// Runs one construction. Errors are malformed inputs or a horizon too
/// small for the construction; failed invariants show up in the verdict.
pub fn run(cfg: &RunConfig) -> anyhow::Result<RunReport> {
    let mut outcome = constructions::dispatch(cfg)
        .with_context(|| format!("{} (seed {})", cfg.construction, cfg.seed))?;
    outcome.validate_all();
    let horizon = outcome.horizon;
    let passed = outcome.checks.iter().all(|c| c.passed);
    let verdict = Verdict { construction: cfg.construction, seed: cfg.seed, horizon, passed, checks: outcome.checks.clone() };
    Ok(RunReport { verdict, outcome })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexVerdict {
    pub index: usize,
    pub label: String,
    #[serde(flatten)]
    pub report: ValidationReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidateReport {
    pub indices: usize,
    pub ok: bool,
    pub verdicts: Vec<IndexVerdict>,
}

pub fn load_numbering(path: &Path) -> anyhow::Result<Numbering> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    NumberingFile::from_json(&text)
        .and_then(NumberingFile::into_numbering)
        .with_context(|| format!("parsing {}", path.display()))
}

/// Validates every process of a numbering file.
pub fn validate(path: &Path) -> anyhow::Result<ValidateReport> {
    let nu = load_numbering(path)?;
    let verdicts: Vec<IndexVerdict> = nu
        .processes()
        .iter()
        .enumerate()
        .map(|(index, p)| IndexVerdict { index, label: p.label().to_string(), report: validate_left_re(p) })
        .collect();
    Ok(ValidateReport { indices: verdicts.len(), ok: verdicts.iter().all(|v| v.report.is_ok()), verdicts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    Inc,
    Lex,
}

impl FromStr for OracleMode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "inc" => Ok(OracleMode::Inc),
            "lex" => Ok(OracleMode::Lex),
            _ => bail!("oracle mode must be inc or lex, got {s:?}"),
        }
    }
}

/// Brute-force INC or LEX dump of a numbering file.
pub fn oracle(path: &Path, mode: OracleMode) -> anyhow::Result<RelationOracle> {
    let nu = load_numbering(path)?;
    Ok(match mode {
        OracleMode::Inc => inc_oracle_bruteforce(&nu)?,
        OracleMode::Lex => lex_oracle_bruteforce(&nu),
    })
}
