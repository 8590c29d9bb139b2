//! Run configuration: a JSON file merged with command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use shiftlab_core::analyze::AlphaFunction;
use shiftlab_core::measure::{FiniteMeasure, Segment};
use shiftlab_core::models::{BetaModel, BetaValue, ShiftModel, SoficModel, TransitionSystem};
use shiftlab_core::num::{parse_rat, Int, Rat};
use shiftlab_core::symbolic::{Side, SymbolStream, Word};
use shiftlab_construct::schedule::KSet;

use crate::error::{CliError, CliResult};

pub const DEFAULT_PRECISION: usize = 64;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    Full { n: usize },
    GoldenMean,
    Sft { matrix: Vec<Vec<u8>> },
    /// Labeled graph: (from, to, symbol) triples.
    Sofic { alphabet: usize, edges: Vec<(usize, usize, u8)> },
    Beta { beta: String },
    /// β-shift given by a purely periodic expansion of 1.
    BetaPeriodic { cycle: String },
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Full { n: 2 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum MeasureSpec {
    Periodic(String),
    Convex(Vec<(String, MeasureSpec)>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum KSpec {
    Point(MeasureSpec),
    Segment { from: MeasureSpec, to: MeasureSpec, mu: String },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DistalSeedSpec {
    pub w1: String,
    pub w2: Option<String>,
    pub theta: Option<String>,
}

/// Either an eventually periodic word pair or an RLE stream file.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct StreamSpec {
    pub prefix: String,
    pub cycle: Option<String>,
    pub two_sided: bool,
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CheckSpec {
    pub n: String,
    pub bound: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct PairSpec {
    pub x: StreamSpec,
    pub y: StreamSpec,
    /// "geometric" (default) or "polynomial".
    pub metric: Option<String>,
    pub t0: Option<String>,
    pub separation: Vec<CheckSpec>,
    pub closeness: Vec<CheckSpec>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub distal_seed: Option<DistalSeedSpec>,
    pub kset: Option<KSpec>,
    pub eps: Option<String>,
    pub delta1: Option<String>,
    pub stages: Option<usize>,
    pub horizon: Option<String>,
    pub alpha: Option<String>,
    pub precision: Option<usize>,
    pub rng_seed: Option<u64>,
    /// ξ labels over {1, 2}.
    pub members: Vec<String>,
    pub target: Option<String>,
    pub recurrence: bool,
    pub weak_k: Option<usize>,
    pub phi: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub tolerance: Option<String>,
    pub pair: Option<PairSpec>,
    pub t_grid: Vec<String>,
    pub value: Option<String>,
    pub depth: Option<usize>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(p) = path else { return Ok(RunConfig::default()) };
        let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.stages == Some(0) {
            return Err(CliError::Config("stages must be positive".into()));
        }
        if self.precision == Some(0) {
            return Err(CliError::Config("precision must be positive".into()));
        }
        if let Some(h) = self.horizon_int()? {
            if h <= Int::from(0) {
                return Err(CliError::Config("horizon must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn precision(&self) -> usize {
        self.precision.unwrap_or(DEFAULT_PRECISION)
    }

    pub fn horizon_int(&self) -> CliResult<Option<Int>> {
        self.horizon
            .as_ref()
            .map(|h| h.trim().parse::<Int>().map_err(|_| CliError::Config(format!("horizon {h:?} is not an integer"))))
            .transpose()
    }

    pub fn model(&self) -> CliResult<ShiftModel> {
        Ok(match &self.model {
            ModelSpec::Full { n } => ShiftModel::full(*n)?,
            ModelSpec::GoldenMean => ShiftModel::Sft(TransitionSystem::golden_mean()),
            ModelSpec::Sft { matrix } => ShiftModel::Sft(TransitionSystem::new(matrix.clone())?),
            ModelSpec::Sofic { alphabet, edges } => ShiftModel::Sofic(SoficModel::new(*alphabet, edges.clone())?),
            ModelSpec::Beta { beta } => ShiftModel::Beta(BetaModel::new(BetaValue::parse(beta)?, self.precision())?),
            ModelSpec::BetaPeriodic { cycle } => {
                ShiftModel::Beta(BetaModel::from_periodic_expansion(Word::parse(cycle, 10)?.0)?)
            }
        })
    }

    pub fn transition_system(&self) -> CliResult<TransitionSystem> {
        match self.model()? {
            ShiftModel::Sft(t) => Ok(t),
            _ => Err(CliError::Config("this command needs a transition-matrix model".into())),
        }
    }

    pub fn alpha(&self) -> CliResult<Option<AlphaFunction>> {
        self.alpha.as_deref().map(parse_alpha).transpose()
    }

    pub fn rat(field: &str, v: &Option<String>, default: Rat) -> CliResult<Rat> {
        match v {
            None => Ok(default),
            Some(s) => parse_rat(s).map_err(|e| CliError::Config(format!("{field}: {e}"))),
        }
    }
}

/// A named weight, or a file of integers α(1), α(2), … separated by
/// whitespace or commas.
pub fn parse_alpha(s: &str) -> CliResult<AlphaFunction> {
    let p = Path::new(s);
    if p.is_file() {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read α table {s}: {e}")))?;
        let vals: Vec<Int> = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<Int>().map_err(|_| CliError::Config(format!("bad α table entry {t:?}"))))
            .collect::<CliResult<_>>()?;
        return Ok(AlphaFunction::table(vals)?);
    }
    Ok(AlphaFunction::parse(s)?)
}

pub fn measure(spec: &MeasureSpec, alphabet: usize) -> CliResult<FiniteMeasure> {
    Ok(match spec {
        MeasureSpec::Periodic(w) => FiniteMeasure::periodic(Word::parse(w, alphabet)?)?,
        MeasureSpec::Convex(terms) => {
            let t = terms.iter().map(|(c, m)| Ok((parse_rat(c)?, measure(m, alphabet)?))).collect::<CliResult<Vec<_>>>()?;
            FiniteMeasure::convex(t)?
        }
    })
}

pub fn kset(spec: &KSpec, alphabet: usize) -> CliResult<KSet> {
    Ok(match spec {
        KSpec::Point(m) => KSet::Point(measure(m, alphabet)?),
        KSpec::Segment { from, to, mu } => {
            KSet::Segment { seg: Segment::new(measure(from, alphabet)?, measure(to, alphabet)?), mu: parse_rat(mu)? }
        }
    })
}

pub fn stream(spec: &StreamSpec, alphabet: usize) -> CliResult<SymbolStream> {
    if let Some(f) = &spec.file {
        return crate::output::read_stream(f);
    }
    let cycle = spec.cycle.as_deref().ok_or_else(|| CliError::Config("stream needs a cycle or a file".into()))?;
    let (p, c) = (Word::parse(&spec.prefix, alphabet)?, Word::parse(cycle, alphabet)?);
    if spec.two_sided {
        if !p.is_empty() {
            return Err(CliError::Config("two-sided streams are purely periodic here".into()));
        }
        return Ok(SymbolStream::periodic(Side::TwoSided, &c)?);
    }
    Ok(SymbolStream::eventually_periodic(&p, &c)?)
}
