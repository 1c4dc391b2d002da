//! Experiment configuration: TOML schema, command-line overrides, and the
//! compact `--set` syntax.

use crate::CliError;
use gplab::sieve::{SetKind, SparseSetSpec, Weight};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u64 = 1;

fn default_t_max() -> f64 {
    100.0
}

fn is_default_t_max(v: &f64) -> bool {
    *v == default_t_max()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Count,
    Predict,
    Compare,
    Bias,
    VerifyLemma,
    Correlation,
    Balance,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Count => "count",
            Self::Predict => "predict",
            Self::Compare => "compare",
            Self::Bias => "bias",
            Self::VerifyLemma => "verify-lemma",
            Self::Correlation => "correlation",
            Self::Balance => "balance",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "count" => Some(Self::Count),
            "predict" => Some(Self::Predict),
            "compare" => Some(Self::Compare),
            "bias" => Some(Self::Bias),
            "verify-lemma" => Some(Self::VerifyLemma),
            "correlation" => Some(Self::Correlation),
            "balance" => Some(Self::Balance),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationParams {
    pub z1: [i64; 2],
    pub z2: [i64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalanceParams {
    pub u: [i64; 2],
    pub n: u64,
    pub w: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_index: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u64,
    /// Optional; when present it must agree with the invoked subcommand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Weight>,
    #[serde(default)]
    pub seed: u64,
    /// 0 means the default rayon pool; otherwise a dedicated pinned pool.
    #[serde(default)]
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros_path: Option<String>,
    /// Cap on |t| accepted from the zero file.
    #[serde(default = "default_t_max", skip_serializing_if = "is_default_t_max")]
    pub t_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strata_csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<SparseSetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation: Option<CorrelationParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balance: Option<BalanceParams>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: None,
            x: None,
            weight: None,
            seed: 0,
            workers: 0,
            output_path: None,
            zeros_path: None,
            t_max: default_t_max(),
            strata_csv: None,
            suite: None,
            set: None,
            correlation: None,
            balance: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = toml::from_str(&text)
            .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    /// Confirms the config's `command` key (when present) names the invoked
    /// subcommand and that the command's required fields are present.
    pub fn validate_for(&self, kind: CommandKind) -> Result<(), CliError> {
        if let Some(name) = &self.command {
            if CommandKind::parse(name) != Some(kind) {
                return Err(CliError::Schema(format!(
                    "config names command `{name}` but `{}` was invoked",
                    kind.name()
                )));
            }
        }
        let need = |ok: bool, what: &str| -> Result<(), CliError> {
            if ok {
                Ok(())
            } else {
                Err(CliError::Schema(format!(
                    "command `{}` requires {what}",
                    kind.name()
                )))
            }
        };
        match kind {
            CommandKind::Count | CommandKind::Predict | CommandKind::Compare => {
                need(self.x.is_some(), "`x`")?;
                need(self.set.is_some(), "a `[set]` table or --set")?;
            }
            CommandKind::Bias => {
                need(self.x.is_some(), "`x`")?;
                need(self.set.is_some(), "a `[set]` table or --set")?;
                need(self.zeros_path.is_some(), "`zeros_path`")?;
                if self.weight == Some(Weight::Unit) {
                    return Err(CliError::Schema(
                        "command `bias` is defined for the lambda weight".into(),
                    ));
                }
            }
            CommandKind::VerifyLemma => {
                need(self.suite.is_some(), "a suite name")?;
            }
            CommandKind::Correlation => {
                need(self.set.is_some(), "a `[set]` table or --set")?;
                need(self.correlation.is_some(), "a `[correlation]` table")?;
            }
            CommandKind::Balance => {
                need(self.balance.is_some(), "a `[balance]` table")?;
            }
        }
        Ok(())
    }
}

/// Compact set syntax for the command line:
/// `kind[:key=value,...]:lo..hi`, e.g. `all:1..100`,
/// `multiples:q=5:10..1000`, `random:delta=0.2,seed=7:1..10000`.
pub fn parse_set_dsl(s: &str) -> Result<SparseSetSpec, CliError> {
    let bad = |msg: String| CliError::Schema(format!("--set `{s}`: {msg}"));
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(bad("expected kind[:params]:lo..hi".into()));
    }
    let kind = match parts[0] {
        "all" => SetKind::All,
        "primes" => SetKind::Primes,
        "squares" => SetKind::Squares,
        "multiples" => SetKind::Multiples,
        "random" => SetKind::Random,
        "digit_missing" => SetKind::DigitMissing,
        "explicit" => SetKind::Explicit,
        other => return Err(bad(format!("unknown set kind `{other}`"))),
    };
    let (lo, hi) = parts[parts.len() - 1]
        .split_once("..")
        .ok_or_else(|| bad("interval must be lo..hi".into()))?;
    let lo: u64 = lo.trim().parse().map_err(|_| bad("bad interval lower end".into()))?;
    let hi: u64 = hi.trim().parse().map_err(|_| bad("bad interval upper end".into()))?;
    let mut spec = SparseSetSpec::new(kind, [lo, hi]);
    if parts.len() == 3 {
        for kv in parts[1].split(',') {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("param `{kv}` must be key=value")))?;
            let parse_u64 = || -> Result<u64, CliError> {
                value.parse().map_err(|_| bad(format!("bad value for `{key}`")))
            };
            match key {
                "q" => spec.q = Some(parse_u64()?),
                "seed" => spec.seed = Some(parse_u64()?),
                "base" => spec.base = Some(parse_u64()?),
                "digit" => spec.digit = Some(parse_u64()?),
                "delta" => {
                    spec.delta =
                        Some(value.parse().map_err(|_| bad("bad value for `delta`".into()))?)
                }
                "path" => spec.path = Some(value.to_string()),
                other => return Err(bad(format!("unknown param `{other}`"))),
            }
        }
    }
    Ok(spec)
}
