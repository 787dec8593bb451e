//! Skip-gram with negative sampling, trained by plain SGD on the per-pair
//! objective `log σ(⟨w,c⟩) + Σ_neg log σ(−⟨w,c'⟩)`.

use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::Array2;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use rayon::prelude::*;

use crate::corpus::UnigramDistribution;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::math::{log_sigmoid, sigmoid};
use crate::rng::{rng_from_seed, substream_seed, StageRng};

/// Alias-method sampler over a unigram distribution.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    alias: WeightedAliasIndex<f64>,
}

impl NegativeSampler {
    pub fn new(unigram: &UnigramDistribution) -> Result<Self> {
        let alias = WeightedAliasIndex::new(unigram.probs().to_vec())
            .map_err(|e| Error::InvalidArgument(format!("negative sampling table: {e}")))?;
        Ok(Self { alias })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.alias.sample(rng) as u32
    }
}

pub fn negative_sample<R: Rng + ?Sized>(sampler: &NegativeSampler, rng: &mut R) -> u32 {
    sampler.sample(rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrainingMode {
    /// One thread, bit-reproducible for a given seed.
    #[default]
    Deterministic,
    /// Lock-free updates from all worker threads; results vary run to run.
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsConfig {
    pub dim: usize,
    pub negatives: usize,
    pub window: usize,
    pub epochs: usize,
    pub step_size: f64,
    pub seed: u64,
    pub mode: TrainingMode,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        Self {
            dim: 200,
            negatives: 5,
            window: 2,
            epochs: 5,
            step_size: 0.025,
            seed: 0,
            mode: TrainingMode::Deterministic,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.negatives == 0 || self.window == 0 || self.epochs == 0 {
            return Err(Error::InvalidArgument(
                "sgns dim, negatives, window and epochs must all be >= 1".into(),
            ));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidArgument("sgns step_size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsModel {
    pub w: Array2<f64>,
    pub c: Array2<f64>,
    pub negatives: usize,
    /// Mean per-pair objective of each epoch.
    pub history: Vec<f64>,
}

impl SgnsModel {
    pub fn dim(&self) -> usize {
        self.w.ncols()
    }

    /// Word vectors `W` labelled by `tokens`.
    pub fn embeddings(&self, tokens: &[String]) -> Result<EmbeddingMatrix> {
        EmbeddingMatrix::new(tokens.to_vec(), self.w.clone())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-pair objective for center `w`, observed context `c` and sampled
/// negative contexts.
pub fn pair_objective(w: &[f64], c: &[f64], negs: &[&[f64]]) -> f64 {
    log_sigmoid(dot(w, c)) + negs.iter().map(|n| log_sigmoid(-dot(w, n))).sum::<f64>()
}

/// Gradient of [`pair_objective`] as `(∂w, ∂c, ∂negs)`.
pub fn pair_gradient(w: &[f64], c: &[f64], negs: &[&[f64]]) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let gp = 1.0 - sigmoid(dot(w, c));
    let mut gw: Vec<f64> = c.iter().map(|v| gp * v).collect();
    let gc = w.iter().map(|v| gp * v).collect();
    let mut gn = Vec::with_capacity(negs.len());
    for n in negs {
        let g = -sigmoid(dot(w, n));
        for (a, b) in gw.iter_mut().zip(n.iter()) {
            *a += g * b;
        }
        gn.push(w.iter().map(|v| g * v).collect());
    }
    (gw, gc, gn)
}

/// Parameter storage visited by the training kernel.
trait Params {
    fn read(&mut self, which: Side, row: usize, out: &mut [f64]);
    fn add(&mut self, which: Side, row: usize, delta: &[f64], scale: f64);
}

#[derive(Clone, Copy)]
enum Side {
    Word,
    Context,
}

struct DenseParams<'a> {
    w: &'a mut [f64],
    c: &'a mut [f64],
    d: usize,
}

impl Params for DenseParams<'_> {
    fn read(&mut self, which: Side, row: usize, out: &mut [f64]) {
        let m = match which {
            Side::Word => &*self.w,
            Side::Context => &*self.c,
        };
        out.copy_from_slice(&m[row * self.d..(row + 1) * self.d]);
    }

    fn add(&mut self, which: Side, row: usize, delta: &[f64], scale: f64) {
        let m = match which {
            Side::Word => &mut *self.w,
            Side::Context => &mut *self.c,
        };
        for (a, b) in m[row * self.d..(row + 1) * self.d].iter_mut().zip(delta) {
            *a += scale * b;
        }
    }
}

/// Shared storage for lock-free training; relaxed loads and stores of
/// `f64` bit patterns, so concurrent updates may be lost but never torn.
struct AtomicParams {
    w: Vec<AtomicU64>,
    c: Vec<AtomicU64>,
    d: usize,
}

impl Params for &AtomicParams {
    fn read(&mut self, which: Side, row: usize, out: &mut [f64]) {
        let m = match which {
            Side::Word => &self.w,
            Side::Context => &self.c,
        };
        for (o, a) in out.iter_mut().zip(&m[row * self.d..(row + 1) * self.d]) {
            *o = f64::from_bits(a.load(Ordering::Relaxed));
        }
    }

    fn add(&mut self, which: Side, row: usize, delta: &[f64], scale: f64) {
        let m = match which {
            Side::Word => &self.w,
            Side::Context => &self.c,
        };
        for (a, b) in m[row * self.d..(row + 1) * self.d].iter().zip(delta) {
            let v = f64::from_bits(a.load(Ordering::Relaxed)) + scale * b;
            a.store(v.to_bits(), Ordering::Relaxed);
        }
    }
}

struct Scratch {
    w: Vec<f64>,
    c: Vec<f64>,
    gw: Vec<f64>,
}

/// One SGD step on pair `(center, context)`; returns the pair objective.
#[allow(clippy::too_many_arguments)]
fn sgd_pair<P: Params>(
    params: &mut P,
    s: &mut Scratch,
    center: usize,
    context: usize,
    sampler: &NegativeSampler,
    k: usize,
    lr: f64,
    rng: &mut StageRng,
) -> f64 {
    params.read(Side::Word, center, &mut s.w);
    s.gw.iter_mut().for_each(|v| *v = 0.0);
    let mut obj = 0.0;
    for t in 0..=k {
        let (target, label) = if t == 0 {
            (context, 1.0)
        } else {
            (sampler.sample(rng) as usize, 0.0)
        };
        params.read(Side::Context, target, &mut s.c);
        let x = dot(&s.w, &s.c);
        obj += if label > 0.0 { log_sigmoid(x) } else { log_sigmoid(-x) };
        let g = label - sigmoid(x);
        for (a, b) in s.gw.iter_mut().zip(&s.c) {
            *a += g * b;
        }
        params.add(Side::Context, target, &s.w, lr * g);
    }
    params.add(Side::Word, center, &s.gw, lr);
    obj
}

/// Trains over `stream[range]` and returns `(objective sum, pair count)`.
#[allow(clippy::too_many_arguments)]
fn run_span<P: Params>(
    params: &mut P,
    stream: &[u32],
    range: std::ops::Range<usize>,
    cfg: &SgnsConfig,
    sampler: &NegativeSampler,
    schedule: &Schedule,
    progress_offset: usize,
    rng: &mut StageRng,
) -> (f64, u64) {
    let d = cfg.dim;
    let mut s = Scratch {
        w: vec![0.0; d],
        c: vec![0.0; d],
        gw: vec![0.0; d],
    };
    let mut sum = 0.0;
    let mut pairs = 0u64;
    let n = stream.len();
    for t in range.clone() {
        let lr = schedule.rate(progress_offset + (t - range.start));
        let center = stream[t] as usize;
        let lo = t.saturating_sub(cfg.window);
        let hi = (t + cfg.window).min(n - 1);
        for u in lo..=hi {
            if u == t {
                continue;
            }
            sum += sgd_pair(params, &mut s, center, stream[u] as usize, sampler, cfg.negatives, lr, rng);
            pairs += 1;
        }
    }
    (sum, pairs)
}

/// Linear decay from `step_size` to `1e-4 · step_size` over all tokens of
/// all epochs.
struct Schedule {
    start: f64,
    total: usize,
}

impl Schedule {
    fn rate(&self, done: usize) -> f64 {
        let frac = (done as f64 / self.total.max(1) as f64).min(1.0);
        let floor = 1e-4 * self.start;
        (self.start * (1.0 - frac)).max(floor)
    }
}

/// Trains on an id stream (already subsampled). Every id must be below
/// `unigram.len()`.
pub fn train_sgns(stream: &[u32], unigram: &UnigramDistribution, cfg: &SgnsConfig) -> Result<SgnsModel> {
    cfg.validate()?;
    let n = unigram.len();
    if stream.len() < 2 {
        return Err(Error::EmptyCorpus("sgns needs at least 2 tokens".into()));
    }
    if let Some(&bad) = stream.iter().find(|&&t| t as usize >= n) {
        return Err(Error::InvalidArgument(format!("token id {bad} outside vocabulary of {n}")));
    }
    let d = cfg.dim;
    let sampler = NegativeSampler::new(unigram)?;
    let mut init_rng = rng_from_seed(substream_seed(cfg.seed, "sgns.init"));
    let half = 0.5 / d as f64;
    let mut w: Vec<f64> = (0..n * d).map(|_| init_rng.random_range(-half..half)).collect();
    let mut c = vec![0.0; n * d];
    let per_epoch = stream.len();
    let schedule = Schedule {
        start: cfg.step_size,
        total: per_epoch * cfg.epochs,
    };
    let mut history = Vec::with_capacity(cfg.epochs);

    match cfg.mode {
        TrainingMode::Deterministic => {
            let mut rng = rng_from_seed(substream_seed(cfg.seed, "sgns.train"));
            let mut params = DenseParams { w: &mut w, c: &mut c, d };
            for epoch in 0..cfg.epochs {
                let (sum, pairs) = run_span(
                    &mut params,
                    stream,
                    0..per_epoch,
                    cfg,
                    &sampler,
                    &schedule,
                    epoch * per_epoch,
                    &mut rng,
                );
                history.push(check_epoch(sum, pairs, epoch)?);
            }
        }
        TrainingMode::Parallel => {
            let shared = AtomicParams {
                w: w.iter().map(|v| AtomicU64::new(v.to_bits())).collect(),
                c: c.iter().map(|v| AtomicU64::new(v.to_bits())).collect(),
                d,
            };
            let workers = rayon::current_num_threads().max(1);
            for epoch in 0..cfg.epochs {
                let parts: Vec<(f64, u64)> = (0..workers)
                    .into_par_iter()
                    .map(|k| {
                        let lo = k * per_epoch / workers;
                        let hi = (k + 1) * per_epoch / workers;
                        let mut rng = rng_from_seed(substream_seed(
                            cfg.seed,
                            &format!("sgns.train.{epoch}.{k}"),
                        ));
                        let mut handle = &shared;
                        run_span(
                            &mut handle,
                            stream,
                            lo..hi,
                            cfg,
                            &sampler,
                            &schedule,
                            epoch * per_epoch + lo,
                            &mut rng,
                        )
                    })
                    .collect();
                let (sum, pairs) = parts.iter().fold((0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
                history.push(check_epoch(sum, pairs, epoch)?);
            }
            w = shared.w.iter().map(|a| f64::from_bits(a.load(Ordering::Relaxed))).collect();
            c = shared.c.iter().map(|a| f64::from_bits(a.load(Ordering::Relaxed))).collect();
        }
    }

    let w = Array2::from_shape_vec((n, d), w).expect("shape");
    let c = Array2::from_shape_vec((n, d), c).expect("shape");
    if w.iter().chain(c.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Divergence("sgns parameters became non-finite".into()));
    }
    Ok(SgnsModel {
        w,
        c,
        negatives: cfg.negatives,
        history,
    })
}

fn check_epoch(sum: f64, pairs: u64, epoch: usize) -> Result<f64> {
    let mean = sum / pairs.max(1) as f64;
    if !mean.is_finite() {
        return Err(Error::Divergence(format!("sgns objective non-finite in epoch {}", epoch + 1)));
    }
    Ok(mean)
}
