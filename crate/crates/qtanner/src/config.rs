//! Experiment configuration (a single JSON document).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qtanner_core::codes::LinearCode;
use qtanner_core::complex::{construct, FaceMode, GeneratorSets, TannerCode};
use qtanner_core::decode::DecoderConfig;
use qtanner_core::lead::{LeadConfig, PRESETS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::group_file::resolve_group;
use crate::qtc;

pub const BASELINES: [&str; 2] = ["bp-osd", "bp-lsd"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub code: CodeSource,
    pub decoder: DecoderSpec,
    pub p_grid: Vec<f64>,
    #[serde(default)]
    pub stopping: Stopping,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    /// `None` defers to `QTANNER_WORKERS`, then to the number of CPUs.
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_seed() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CodeSource {
    Construct(ConstructSpec),
    Import {
        path: PathBuf,
        #[serde(default)]
        name: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructSpec {
    /// `cyclic:<n>` or a path to a multiplication-table file.
    pub group: String,
    /// Required unless both `a_set` and `b_set` are given.
    #[serde(default)]
    pub delta: Option<usize>,
    pub ca: String,
    /// Defaults to the dual of `ca`.
    #[serde(default)]
    pub cb: Option<String>,
    #[serde(default)]
    pub mode: FaceMode,
    /// Seed for random generator sets.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub a_set: Option<Vec<usize>>,
    #[serde(default)]
    pub b_set: Option<Vec<usize>>,
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Stopping {
    pub max_trials: u64,
    /// Stop once this many word failures are seen (checked per batch).
    pub min_failures: Option<u64>,
    /// Trials per work unit. Fixed independently of the worker count so
    /// results do not depend on it.
    pub batch_size: u64,
}

impl Default for Stopping {
    fn default() -> Self {
        Self {
            max_trials: 10_000,
            min_failures: Some(100),
            batch_size: 250,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderSpec {
    /// `bp-osd`, `bp-lsd` or a LEAD preset such as `lead-bl-bo`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boost_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clamp_eps: Option<f64>,
    /// Replaces the preset's local decoder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local: Option<DecoderConfig>,
    /// Replaces the preset's global decoder, or the baseline decoder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global: Option<DecoderConfig>,
}

impl DecoderSpec {
    pub fn named(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            alpha: None,
            boost_floor: None,
            clamp_eps: None,
            local: None,
            global: None,
        }
    }

    pub fn resolve(&self) -> Result<DecoderChoice> {
        match self.kind.as_str() {
            "bp-osd" | "bp-lsd" => {
                if self.alpha.is_some() || self.boost_floor.is_some() || self.local.is_some() {
                    bail!("`{}` takes no LEAD parameters", self.kind);
                }
                let cfg = self.global.unwrap_or(if self.kind == "bp-osd" {
                    DecoderConfig::bp_osd(3)
                } else {
                    DecoderConfig::bp_lsd(3)
                });
                cfg.validate()?;
                Ok(DecoderChoice::Baseline {
                    label: self.kind.clone(),
                    cfg,
                })
            }
            kind if PRESETS.contains(&kind) => {
                let mut cfg = LeadConfig::preset(kind)?;
                if let Some(a) = self.alpha {
                    cfg.alpha = a;
                }
                if let Some(f) = self.boost_floor {
                    cfg.boost_floor = f;
                }
                if let Some(e) = self.clamp_eps {
                    cfg.clamp_eps = e;
                }
                if let Some(l) = self.local {
                    cfg.local = l;
                }
                if let Some(g) = self.global {
                    cfg.global = g;
                }
                cfg.validate()?;
                let label = if cfg.alpha == 1.0 {
                    kind.to_string()
                } else {
                    format!("{kind}@alpha={}", cfg.alpha)
                };
                Ok(DecoderChoice::Lead { label, cfg })
            }
            other => bail!(
                "unknown decoder `{other}` (expected one of {}, {})",
                BASELINES.join(", "),
                PRESETS.join(", ")
            ),
        }
    }
}

/// A decoder ready to run.
#[derive(Clone, Debug, PartialEq)]
pub enum DecoderChoice {
    Baseline { label: String, cfg: DecoderConfig },
    Lead { label: String, cfg: LeadConfig },
}

impl DecoderChoice {
    pub fn label(&self) -> &str {
        match self {
            DecoderChoice::Baseline { label, .. } | DecoderChoice::Lead { label, .. } => label,
        }
    }

    pub fn is_lead(&self) -> bool {
        matches!(self, DecoderChoice::Lead { .. })
    }
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut spec =
            Self::from_json(&text).with_context(|| format!("parsing config {}", path.display()))?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            spec.resolve_paths(dir);
        }
        Ok(spec)
    }

    /// Makes relative code and group-table paths relative to `dir`.
    pub fn resolve_paths(&mut self, dir: &Path) {
        match &mut self.code {
            CodeSource::Import { path, .. } => {
                if path.is_relative() {
                    *path = dir.join(&*path);
                }
            }
            CodeSource::Construct(c) => {
                if !c.group.starts_with("cyclic:") && Path::new(&c.group).is_relative() {
                    c.group = dir.join(&c.group).to_string_lossy().into_owned();
                }
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_grid.is_empty() {
            bail!("p_grid is empty");
        }
        if let Some(p) = self.p_grid.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            bail!("p_grid entry {p} outside (0, 1)");
        }
        if self.stopping.max_trials == 0 {
            bail!("max_trials must be at least 1");
        }
        if self.stopping.batch_size == 0 {
            bail!("batch_size must be at least 1");
        }
        if self.workers == Some(0) {
            bail!("workers must be at least 1");
        }
        self.decoder.resolve()?;
        Ok(())
    }
}

/// Builds a code from construction parameters.
pub fn build_code(spec: &ConstructSpec) -> Result<TannerCode> {
    let group = resolve_group(&spec.group)?;
    let gens = match (&spec.a_set, &spec.b_set) {
        (Some(a), Some(b)) => {
            if let Some(d) = spec.delta {
                if d != a.len() {
                    bail!("delta {d} does not match |A| = {}", a.len());
                }
            }
            GeneratorSets::new(&group, a.clone(), b.clone())?
        }
        (None, None) => {
            let delta = spec
                .delta
                .context("delta is required when generator sets are not given")?;
            GeneratorSets::random(&group, delta, &mut ChaCha8Rng::seed_from_u64(spec.seed))?
        }
        _ => bail!("give both a_set and b_set, or neither"),
    };
    let ca = LinearCode::parse(&spec.ca)?;
    let cb = match &spec.cb {
        Some(name) => LinearCode::parse(name)?,
        None => ca.dual(),
    };
    let mut code = construct(&group, &gens, spec.mode, &ca, &cb)?;
    code.meta.set("seed", spec.seed.to_string());
    if let Some(name) = &spec.name {
        code.meta.set("name", name.clone());
    }
    Ok(code)
}

/// Loads or builds the code named by `source`, returning it with any import
/// warnings.
pub fn load_code(source: &CodeSource) -> Result<(TannerCode, Vec<String>)> {
    match source {
        CodeSource::Construct(spec) => Ok((build_code(spec)?, Vec::new())),
        CodeSource::Import { path, name } => {
            let imported = qtc::import_code(path)?;
            let mut code = imported.code;
            if let Some(name) = name {
                code.meta.set("name", name.clone());
            }
            Ok((code, imported.warnings))
        }
    }
}
