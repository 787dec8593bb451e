//! Pipeline configuration: a TOML file of `key = value` entries, with
//! defaults for every key and strict rejection of unknown ones.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::alignment::AlignmentConfig;
use crate::error::{Error, Result};
use crate::eval::PosClassifierConfig;
use crate::sgns::{SgnsConfig, TrainingMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Whitespace-tokenized training text.
    pub corpus: PathBuf,
    pub outdir: PathBuf,
    pub seed: u64,
    pub min_count: u64,
    pub window: usize,
    pub subsample: f64,
    pub dim: usize,
    /// Negative-sample count `k` of the shifted PMI.
    pub shift_k: f64,
    pub svd_iters: usize,
    pub svd_tol: f64,
    pub rhg: RhgSection,
    pub align: AlignSection,
    pub sgns: SgnsSection,
    pub pos: PosSection,
    pub data: DataSection,
    pub figures: FigureSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RhgSection {
    /// Number of nodes; 0 means "one per vocabulary word".
    pub n: usize,
    pub kbar: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignSection {
    pub batch_size: usize,
    pub epochs: usize,
    pub step_size: f64,
    pub entropic_reg: f64,
    pub final_block: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgnsSection {
    pub negatives: usize,
    pub epochs: usize,
    pub step_size: f64,
    pub smoothing: f64,
    /// Lock-free multi-threaded training; results are not reproducible.
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PosSection {
    pub hidden_size: usize,
    pub step_size: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub brown_train_fraction: f64,
}

/// Benchmark files; an empty path means "not available".
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub ws353: PathBuf,
    pub men: PathBuf,
    pub mturk: PathBuf,
    pub conll_train: PathBuf,
    pub conll_test: PathBuf,
    pub brown: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FigureSection {
    pub bins: usize,
    pub rx_samples: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            corpus: PathBuf::from("text8"),
            outdir: PathBuf::from("out"),
            seed: 0,
            min_count: 5,
            window: 2,
            subsample: 1e-5,
            dim: 200,
            shift_k: 5.0,
            svd_iters: 100,
            svd_tol: 1e-4,
            rhg: RhgSection::default(),
            align: AlignSection::default(),
            sgns: SgnsSection::default(),
            pos: PosSection::default(),
            data: DataSection::default(),
            figures: FigureSection::default(),
        }
    }
}

impl Default for RhgSection {
    fn default() -> Self {
        Self { n: 0, kbar: 10.0, gamma: 2.5 }
    }
}

impl Default for AlignSection {
    fn default() -> Self {
        let a = AlignmentConfig::default();
        Self {
            batch_size: a.batch_size,
            epochs: a.epochs,
            step_size: a.step_size,
            entropic_reg: a.entropic_reg,
            final_block: a.final_block,
        }
    }
}

impl Default for SgnsSection {
    fn default() -> Self {
        let s = SgnsConfig::default();
        Self {
            negatives: s.negatives,
            epochs: s.epochs,
            step_size: s.step_size,
            smoothing: 0.75,
            parallel: false,
        }
    }
}

impl Default for PosSection {
    fn default() -> Self {
        let p = PosClassifierConfig::default();
        Self {
            hidden_size: p.hidden_size,
            step_size: p.step_size,
            epochs: p.epochs,
            batch_size: p.batch_size,
            brown_train_fraction: 0.8,
        }
    }
}

impl Default for FigureSection {
    fn default() -> Self {
        Self { bins: 100, rx_samples: 1_000_000 }
    }
}

fn cfg_err(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

impl PipelineConfig {
    /// Parses TOML text, applies `key=value` overrides (dotted keys reach
    /// into sections) and validates the result.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: PipelineConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; `None` gives the defaults (plus overrides).
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml_str(&text, overrides)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(cfg_err("window", "must be >= 1"));
        }
        if self.min_count == 0 {
            return Err(cfg_err("min_count", "must be >= 1"));
        }
        if !(self.subsample > 0.0) {
            return Err(cfg_err("subsample", "must be > 0"));
        }
        if self.dim == 0 {
            return Err(cfg_err("dim", "must be >= 1"));
        }
        if !(self.shift_k > 0.0) {
            return Err(cfg_err("shift_k", "must be > 0"));
        }
        if self.svd_iters == 0 || !(self.svd_tol > 0.0) {
            return Err(cfg_err("svd_iters/svd_tol", "must be positive"));
        }
        if self.rhg.n == 1 {
            return Err(cfg_err("rhg.n", "must be 0 (vocabulary size) or >= 2"));
        }
        if !(self.rhg.gamma > 2.0) {
            return Err(cfg_err("rhg.gamma", "must be > 2"));
        }
        if !(self.rhg.kbar > 0.0) {
            return Err(cfg_err("rhg.kbar", "must be > 0"));
        }
        self.alignment_config()
            .validate()
            .map_err(|e| cfg_err("align", e))?;
        self.sgns_config().validate().map_err(|e| cfg_err("sgns", e))?;
        if !(0.0..=1.0).contains(&self.sgns.smoothing) {
            return Err(cfg_err("sgns.smoothing", "must be in [0, 1]"));
        }
        self.pos_config().validate().map_err(|e| cfg_err("pos", e))?;
        if !(self.pos.brown_train_fraction > 0.0 && self.pos.brown_train_fraction < 1.0) {
            return Err(cfg_err("pos.brown_train_fraction", "must be in (0, 1)"));
        }
        if self.figures.bins < 2 || self.figures.rx_samples == 0 {
            return Err(cfg_err("figures", "bins must be >= 2 and rx_samples >= 1"));
        }
        Ok(())
    }

    pub fn alignment_config(&self) -> AlignmentConfig {
        AlignmentConfig {
            batch_size: self.align.batch_size,
            epochs: self.align.epochs,
            step_size: self.align.step_size,
            entropic_reg: self.align.entropic_reg,
            final_block: self.align.final_block,
            seed: crate::rng::substream_seed(self.seed, "align"),
        }
    }

    pub fn sgns_config(&self) -> SgnsConfig {
        SgnsConfig {
            dim: self.dim,
            negatives: self.sgns.negatives,
            window: self.window,
            epochs: self.sgns.epochs,
            step_size: self.sgns.step_size,
            seed: crate::rng::substream_seed(self.seed, "sgns"),
            mode: if self.sgns.parallel {
                TrainingMode::Parallel
            } else {
                TrainingMode::Deterministic
            },
        }
    }

    pub fn pos_config(&self) -> PosClassifierConfig {
        PosClassifierConfig {
            hidden_size: self.pos.hidden_size,
            step_size: self.pos.step_size,
            epochs: self.pos.epochs,
            batch_size: self.pos.batch_size,
            seed: crate::rng::substream_seed(self.seed, "pos"),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// `a.b=value`: the value is read as a TOML literal, or as a bare string if
/// it does not parse as one.
fn apply_override(table: &mut toml::Table, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {item:?} is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key {key:?}")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("{key}: {p} is not a section")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
