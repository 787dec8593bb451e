//! File-based stages of the full experiment. Every stage reads its inputs
//! from `<outdir>/<upstream>/`, writes into `<outdir>/<stage>/`, and leaves a
//! manifest there; a stage whose manifest still matches is skipped.

mod config;
mod manifest;

pub use config::{AlignSection, DataSection, FigureSection, PipelineConfig, PosSection, RhgSection, SgnsSection};
pub use manifest::{hash_file, FileRecord, Manifest, MANIFEST_FILE};

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::alignment::{align, apply_alignment, random_baseline, AlignmentResult};
use crate::corpus::{count_cooccurrences, read_corpus, subsample, CooccurrenceCounts, UnigramDistribution, Vocabulary};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::eval::{
    evaluate_pos, evaluate_similarity, load_brown, load_conll2000, load_similarity_dataset, majority_baseline,
    split_sentences, train_pos_classifier, Method, Metric, ResultsTable, TaggedCorpus,
};
use crate::histogram::Histogram;
use crate::hyperbolic::{
    generate_rhg, graph_stats, r_minus_x_samples, read_points, write_points, ConnectionOperator,
    DistancePdf, RhgParams,
};
use crate::math::skewness;
use crate::pmi::{pmi_matrix, shift, sigma_spmi, SparseScoreMatrix};
use crate::rng::substream_seed;
use crate::sgns::train_sgns;
use crate::spectral::{embeddings_from_svd, truncated_svd, SvdOptions, SymmetricOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Vocab,
    Cooc,
    Pmi,
    SigmaSpmi,
    SvdA,
    Rhg,
    SvdB,
    Align,
    Sgns,
    EvalSim,
    EvalPos,
    FigPmi,
    FigRx,
    Table1,
}

impl Stage {
    /// Every stage in an order that respects dependencies.
    pub const ALL: [Stage; 14] = [
        Stage::Vocab,
        Stage::Cooc,
        Stage::Pmi,
        Stage::SigmaSpmi,
        Stage::SvdA,
        Stage::Rhg,
        Stage::SvdB,
        Stage::Align,
        Stage::Sgns,
        Stage::EvalSim,
        Stage::EvalPos,
        Stage::FigPmi,
        Stage::FigRx,
        Stage::Table1,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Stage::Vocab => "vocab",
            Stage::Cooc => "cooc",
            Stage::Pmi => "pmi",
            Stage::SigmaSpmi => "sigmaspmi",
            Stage::SvdA => "svd-a",
            Stage::Rhg => "rhg",
            Stage::SvdB => "svd-b",
            Stage::Align => "align",
            Stage::Sgns => "sgns",
            Stage::EvalSim => "eval-sim",
            Stage::EvalPos => "eval-pos",
            Stage::FigPmi => "fig-pmi",
            Stage::FigRx => "fig-rx",
            Stage::Table1 => "table1",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown stage {s:?}")))
    }
}

/// Outcome of [`run_stage`].
#[derive(Debug, Clone)]
pub struct StageReport {
    pub stage: Stage,
    /// True when an up-to-date manifest made the run a no-op.
    pub skipped: bool,
    pub manifest: Manifest,
}

/// Where an input lives: produced by an earlier stage, or supplied by the
/// user.
enum Input {
    Artifact(Stage, &'static str),
    External(PathBuf),
}

struct Plan {
    inputs: Vec<Input>,
    params: BTreeMap<String, String>,
    deterministic: bool,
}

struct Ctx<'a> {
    cfg: &'a PipelineConfig,
    dir: PathBuf,
    outputs: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn artifact(&self, stage: Stage, file: &str) -> PathBuf {
        self.cfg.outdir.join(stage.id()).join(file)
    }

    /// Creates an output file in the stage directory and records it.
    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        self.outputs.push(path.clone());
        Ok(BufWriter::new(File::create(path)?))
    }

    fn write_with(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let mut w = self.create(name)?;
        f(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingArtifact(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

fn load_vocab(path: &Path) -> Result<Vocabulary> {
    Vocabulary::read_tsv(open(path)?, &path.display().to_string())
}

fn load_scores(path: &Path) -> Result<SparseScoreMatrix> {
    SparseScoreMatrix::read_tsv(open(path)?, &path.display().to_string())
}

fn load_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    EmbeddingMatrix::read_text(open(path)?, &path.display().to_string())
}

fn param(map: &mut BTreeMap<String, String>, key: &str, value: impl fmt::Display) {
    map.insert(key.to_string(), value.to_string());
}

/// Embedding file produced for each evaluated method.
fn method_embeddings(m: Method) -> (Stage, &'static str) {
    match m {
        Method::Sgns => (Stage::Sgns, "sgns.txt"),
        Method::PmiSvd => (Stage::SvdA, "pmi-svd.txt"),
        Method::SigmaSpmiSvd => (Stage::SvdA, "sigmaspmi-svd.txt"),
        Method::RhgSvdAlign => (Stage::Align, "rhg-svd-align.txt"),
        Method::RandomAlign => (Stage::Align, "random-align.txt"),
    }
}

fn similarity_sets(cfg: &PipelineConfig) -> Vec<(Metric, &Path)> {
    [
        (Metric::Ws353, cfg.data.ws353.as_path()),
        (Metric::Men, cfg.data.men.as_path()),
        (Metric::MTurk, cfg.data.mturk.as_path()),
    ]
    .into_iter()
    .filter(|(_, p)| !p.as_os_str().is_empty())
    .collect()
}

fn plan(stage: Stage, cfg: &PipelineConfig) -> Plan {
    let mut params = BTreeMap::new();
    let mut deterministic = true;
    let corpus = || Input::External(cfg.corpus.clone());
    let vocab = || Input::Artifact(Stage::Vocab, "vocab.tsv");
    let inputs = match stage {
        Stage::Vocab => {
            param(&mut params, "min_count", cfg.min_count);
            vec![corpus()]
        }
        Stage::Cooc => {
            param(&mut params, "window", cfg.window);
            param(&mut params, "subsample", cfg.subsample);
            vec![corpus(), vocab()]
        }
        Stage::Pmi => vec![Input::Artifact(Stage::Cooc, "cooc.tsv")],
        Stage::SigmaSpmi => {
            param(&mut params, "shift_k", cfg.shift_k);
            vec![Input::Artifact(Stage::Pmi, "pmi.tsv")]
        }
        Stage::SvdA => {
            param(&mut params, "dim", cfg.dim);
            param(&mut params, "svd_iters", cfg.svd_iters);
            param(&mut params, "svd_tol", cfg.svd_tol);
            vec![
                vocab(),
                Input::Artifact(Stage::Pmi, "pmi.tsv"),
                Input::Artifact(Stage::SigmaSpmi, "sigmaspmi.tsv"),
            ]
        }
        Stage::Rhg => {
            param(&mut params, "n", cfg.rhg.n);
            param(&mut params, "kbar", cfg.rhg.kbar);
            param(&mut params, "gamma", cfg.rhg.gamma);
            if cfg.rhg.n == 0 {
                vec![vocab()]
            } else {
                vec![]
            }
        }
        Stage::SvdB => {
            param(&mut params, "dim", cfg.dim);
            param(&mut params, "svd_iters", cfg.svd_iters);
            param(&mut params, "svd_tol", cfg.svd_tol);
            vec![Input::Artifact(Stage::Rhg, "points.txt")]
        }
        Stage::Align => {
            let a = &cfg.align;
            param(&mut params, "batch_size", a.batch_size);
            param(&mut params, "epochs", a.epochs);
            param(&mut params, "step_size", a.step_size);
            param(&mut params, "entropic_reg", a.entropic_reg);
            param(&mut params, "final_block", a.final_block);
            vec![
                Input::Artifact(Stage::SvdA, "sigmaspmi-svd.txt"),
                Input::Artifact(Stage::SvdB, "rhg-svd.txt"),
            ]
        }
        Stage::Sgns => {
            let s = &cfg.sgns;
            param(&mut params, "dim", cfg.dim);
            param(&mut params, "window", cfg.window);
            param(&mut params, "subsample", cfg.subsample);
            param(&mut params, "negatives", s.negatives);
            param(&mut params, "epochs", s.epochs);
            param(&mut params, "step_size", s.step_size);
            param(&mut params, "smoothing", s.smoothing);
            param(&mut params, "parallel", s.parallel);
            deterministic = !s.parallel;
            vec![corpus(), vocab()]
        }
        Stage::EvalSim => {
            let mut v: Vec<Input> = Method::ALL
                .iter()
                .map(|&m| {
                    let (s, f) = method_embeddings(m);
                    Input::Artifact(s, f)
                })
                .collect();
            v.extend(similarity_sets(cfg).into_iter().map(|(_, p)| Input::External(p.to_path_buf())));
            v
        }
        Stage::EvalPos => {
            let p = &cfg.pos;
            param(&mut params, "hidden_size", p.hidden_size);
            param(&mut params, "step_size", p.step_size);
            param(&mut params, "epochs", p.epochs);
            param(&mut params, "batch_size", p.batch_size);
            param(&mut params, "brown_train_fraction", p.brown_train_fraction);
            let mut v: Vec<Input> = Method::ALL
                .iter()
                .map(|&m| {
                    let (s, f) = method_embeddings(m);
                    Input::Artifact(s, f)
                })
                .collect();
            for p in [&cfg.data.conll_train, &cfg.data.conll_test, &cfg.data.brown] {
                if !p.as_os_str().is_empty() {
                    v.push(Input::External(p.clone()));
                }
            }
            v
        }
        Stage::FigPmi => {
            param(&mut params, "bins", cfg.figures.bins);
            vec![Input::Artifact(Stage::Pmi, "pmi.tsv")]
        }
        Stage::FigRx => {
            param(&mut params, "bins", cfg.figures.bins);
            param(&mut params, "rx_samples", cfg.figures.rx_samples);
            vec![Input::Artifact(Stage::Rhg, "points.txt")]
        }
        Stage::Table1 => vec![
            Input::Artifact(Stage::EvalSim, "scores.csv"),
            Input::Artifact(Stage::EvalPos, "scores.csv"),
        ],
    };
    Plan { inputs, params, deterministic }
}

fn resolve(cfg: &PipelineConfig, input: &Input) -> (String, PathBuf) {
    match input {
        Input::Artifact(s, f) => (format!("{}/{f}", s.id()), cfg.outdir.join(s.id()).join(f)),
        Input::External(p) => (p.display().to_string(), p.clone()),
    }
}

fn hash_inputs(cfg: &PipelineConfig, inputs: &[Input]) -> Result<Vec<FileRecord>> {
    inputs
        .iter()
        .map(|i| {
            let (name, path) = resolve(cfg, i);
            if !path.is_file() {
                return Err(match i {
                    Input::Artifact(..) => Error::MissingArtifact(path),
                    Input::External(_) => Error::Config(format!("input file {} does not exist", path.display())),
                });
            }
            Ok(FileRecord { path: name, sha256: hash_file(&path)? })
        })
        .collect()
}

fn outputs_intact(cfg: &PipelineConfig, m: &Manifest) -> bool {
    m.outputs.iter().all(|r| {
        let p = cfg.outdir.join(&r.path);
        hash_file(&p).map(|h| h == r.sha256).unwrap_or(false)
    })
}

/// Runs one stage. Unless `force` is set, a stage whose recorded inputs,
/// parameters and outputs are unchanged is not run again.
pub fn run_stage(stage: Stage, cfg: &PipelineConfig, force: bool) -> Result<StageReport> {
    cfg.validate()?;
    let plan = plan(stage, cfg);
    let inputs = hash_inputs(cfg, &plan.inputs)?;
    let dir = cfg.outdir.join(stage.id());
    if !force {
        if let Ok(old) = Manifest::read(&dir) {
            if old.seed == cfg.seed
                && old.parameters == plan.params
                && old.inputs == inputs
                && old.deterministic == plan.deterministic
                && outputs_intact(cfg, &old)
            {
                return Ok(StageReport { stage, skipped: true, manifest: old });
            }
        }
    }
    std::fs::create_dir_all(&dir)?;
    let stale = dir.join(MANIFEST_FILE);
    if stale.exists() {
        std::fs::remove_file(stale)?;
    }
    let started = Instant::now();
    let mut ctx = Ctx { cfg, dir: dir.clone(), outputs: Vec::new() };
    execute(stage, &mut ctx)?;
    let outputs = ctx
        .outputs
        .iter()
        .map(|p| {
            let name = p.file_name().expect("file").to_string_lossy();
            Ok(FileRecord { path: format!("{}/{name}", stage.id()), sha256: hash_file(p)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        stage: stage.id().to_string(),
        seed: cfg.seed,
        deterministic: plan.deterministic,
        parameters: plan.params,
        inputs,
        outputs,
        wall_time_secs: started.elapsed().as_secs_f64(),
        hash: String::new(),
    }
    .seal();
    manifest.write(&dir)?;
    Ok(StageReport { stage, skipped: false, manifest })
}

/// Runs every stage in dependency order.
pub fn run_all(cfg: &PipelineConfig, force: bool) -> Result<Vec<StageReport>> {
    Stage::ALL.iter().map(|&s| run_stage(s, cfg, force)).collect()
}

fn execute(stage: Stage, ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    match stage {
        Stage::Vocab => {
            let text = read_corpus(&cfg.corpus)?;
            let vocab = Vocabulary::build(text.split_whitespace(), cfg.min_count)?;
            ctx.write_with("vocab.tsv", |w| vocab.write_tsv(w))
        }
        Stage::Cooc => {
            let vocab = load_vocab(&ctx.artifact(Stage::Vocab, "vocab.tsv"))?;
            let stream = vocab.encode(read_corpus(&cfg.corpus)?.split_whitespace());
            let kept = subsample(&stream, &vocab, cfg.subsample, substream_seed(cfg.seed, "cooc.subsample"))?;
            let counts = count_cooccurrences(&kept, &vocab, cfg.window)?;
            ctx.write_with("cooc.tsv", |w| counts.write_tsv(w))
        }
        Stage::Pmi => {
            let path = ctx.artifact(Stage::Cooc, "cooc.tsv");
            let counts = CooccurrenceCounts::read_tsv(open(&path)?, &path.display().to_string())?;
            let m = pmi_matrix(&counts)?;
            ctx.write_with("pmi.tsv", |w| m.write_tsv(w))
        }
        Stage::SigmaSpmi => {
            let m = sigma_spmi(shift(load_scores(&ctx.artifact(Stage::Pmi, "pmi.tsv"))?, cfg.shift_k)?)?;
            ctx.write_with("sigmaspmi.tsv", |w| m.write_tsv(w))
        }
        Stage::SvdA => {
            let vocab = load_vocab(&ctx.artifact(Stage::Vocab, "vocab.tsv"))?;
            for (file, out, name) in [
                ("pmi.tsv", "pmi-svd.txt", "svd-a.pmi"),
                ("sigmaspmi.tsv", "sigmaspmi-svd.txt", "svd-a.sigmaspmi"),
            ] {
                let stage = if file == "pmi.tsv" { Stage::Pmi } else { Stage::SigmaSpmi };
                let m = load_scores(&ctx.artifact(stage, file))?;
                if m.n() != vocab.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "{file} has {} rows, vocabulary has {}",
                        m.n(),
                        vocab.len()
                    )));
                }
                let emb = spectral_embedding(&m, cfg, name)?.relabel(vocab.tokens().to_vec())?;
                ctx.write_with(out, |w| emb.write_text(w))?;
            }
            Ok(())
        }
        Stage::Rhg => {
            let n = if cfg.rhg.n == 0 {
                load_vocab(&ctx.artifact(Stage::Vocab, "vocab.tsv"))?.len()
            } else {
                cfg.rhg.n
            };
            let params = RhgParams {
                n,
                kbar: cfg.rhg.kbar,
                gamma: cfg.rhg.gamma,
                seed: substream_seed(cfg.seed, "rhg"),
            };
            let g = generate_rhg(&params)?;
            ctx.write_with("points.txt", |w| write_points(w, &g.config, &g.points, params.seed))?;
            ctx.write_with("edges.txt", |w| g.write_edges(w))?;
            let stats = graph_stats(&g)?;
            ctx.write_with("stats.toml", |w| {
                writeln!(w, "n = {n}")?;
                writeln!(w, "radius = {}", g.config.radius)?;
                writeln!(w, "alpha = {}", g.config.alpha)?;
                writeln!(w, "edges = {}", g.edges.len())?;
                writeln!(w, "mean_degree = {}", stats.mean_degree)?;
                writeln!(w, "power_law_exponent = {}", toml_float(stats.power_law.exponent))?;
                writeln!(w, "power_law_kmin = {}", stats.power_law.kmin)?;
                writeln!(w, "mean_clustering = {}", toml_float(stats.mean_clustering))?;
                Ok(())
            })
        }
        Stage::SvdB => {
            let path = ctx.artifact(Stage::Rhg, "points.txt");
            let (config, points, _) = read_points(open(&path)?, &path.display().to_string())?;
            let op = ConnectionOperator::new(&points, config.radius)?;
            let emb = spectral_embedding(&op, cfg, "svd-b")?;
            ctx.write_with("rhg-svd.txt", |w| emb.write_text(w))
        }
        Stage::Align => {
            let wa = load_embeddings(&ctx.artifact(Stage::SvdA, "sigmaspmi-svd.txt"))?;
            let wb = load_embeddings(&ctx.artifact(Stage::SvdB, "rhg-svd.txt"))?;
            let random = random_baseline(wa.n(), wa.dim(), substream_seed(cfg.seed, "align.random"))?;
            let acfg = cfg.alignment_config();
            for (prefix, b) in [("rhg-svd", &wb), ("random", &random)] {
                let res = align(&wa, b, &acfg)?;
                write_alignment(ctx, prefix, &res)?;
                let aligned = apply_alignment(b, &res, wa.labels().to_vec())?;
                ctx.write_with(&format!("{prefix}-align.txt"), |w| aligned.write_text(w))?;
            }
            Ok(())
        }
        Stage::Sgns => {
            let vocab = load_vocab(&ctx.artifact(Stage::Vocab, "vocab.tsv"))?;
            let stream = vocab.encode(read_corpus(&cfg.corpus)?.split_whitespace());
            let kept = subsample(&stream, &vocab, cfg.subsample, substream_seed(cfg.seed, "sgns.subsample"))?;
            let unigram = UnigramDistribution::new(&vocab, cfg.sgns.smoothing)?;
            let model = train_sgns(&kept, &unigram, &cfg.sgns_config())?;
            let emb = model.embeddings(vocab.tokens())?;
            ctx.write_with("sgns.txt", |w| emb.write_text(w))?;
            ctx.write_with("history.csv", |w| {
                writeln!(w, "epoch,objective")?;
                for (e, v) in model.history.iter().enumerate() {
                    writeln!(w, "{},{v}", e + 1)?;
                }
                Ok(())
            })
        }
        Stage::EvalSim => {
            let sets = similarity_sets(cfg)
                .into_iter()
                .map(|(m, p)| Ok((m, load_similarity_dataset(p, m.id())?)))
                .collect::<Result<Vec<_>>>()?;
            let mut rows = Vec::new();
            for method in Method::ALL {
                let (s, f) = method_embeddings(method);
                let emb = load_embeddings(&ctx.artifact(s, f))?;
                for (metric, ds) in &sets {
                    let score = evaluate_similarity(&emb, ds)?;
                    rows.push(format!("{},{},{},{}", method.id(), metric.id(), score.spearman, score.coverage));
                }
            }
            ctx.write_with("scores.csv", |w| write_score_rows(w, &rows))
        }
        Stage::EvalPos => {
            let mut tasks: Vec<(Metric, TaggedCorpus, TaggedCorpus)> = Vec::new();
            let d = &cfg.data;
            if !d.conll_train.as_os_str().is_empty() || !d.conll_test.as_os_str().is_empty() {
                if d.conll_train.as_os_str().is_empty() || d.conll_test.as_os_str().is_empty() {
                    return Err(Error::Config("data.conll_train and data.conll_test must be set together".into()));
                }
                tasks.push((Metric::Conll2000, load_conll2000(&d.conll_train)?, load_conll2000(&d.conll_test)?));
            }
            if !d.brown.as_os_str().is_empty() {
                let all = load_brown(&d.brown)?;
                let (train, test) =
                    split_sentences(&all, cfg.pos.brown_train_fraction, substream_seed(cfg.seed, "brown.split"))?;
                tasks.push((Metric::Brown, train, test));
            }
            let pcfg = cfg.pos_config();
            let mut rows = Vec::new();
            for method in Method::ALL {
                let (s, f) = method_embeddings(method);
                let emb = load_embeddings(&ctx.artifact(s, f))?;
                for (metric, train, test) in &tasks {
                    let clf = train_pos_classifier(train, &emb, &pcfg)?;
                    let acc = evaluate_pos(&clf, &emb, test)?;
                    rows.push(format!("{},{},{},", method.id(), metric.id(), 100.0 * acc));
                }
            }
            for (metric, train, test) in &tasks {
                rows.push(format!("majority,{},{},", metric.id(), 100.0 * majority_baseline(train, test)));
            }
            ctx.write_with("scores.csv", |w| write_score_rows(w, &rows))
        }
        Stage::FigPmi => {
            let m = load_scores(&ctx.artifact(Stage::Pmi, "pmi.tsv"))?;
            // Each unordered pair once.
            let values: Vec<f64> = m.matrix().triples().filter(|t| t.0 <= t.1).map(|t| t.2).collect();
            write_figure(ctx, "pmi", &values)
        }
        Stage::FigRx => {
            let path = ctx.artifact(Stage::Rhg, "points.txt");
            let (config, _, _) = read_points(open(&path)?, &path.display().to_string())?;
            let values = r_minus_x_samples(&config, cfg.figures.rx_samples, substream_seed(cfg.seed, "fig-rx"));
            write_figure(ctx, "rx", &values)?;
            let pdf = DistancePdf::new(config);
            ctx.write_with("rx-density.csv", |w| {
                writeln!(w, "r_minus_x,density")?;
                for (x, f) in pdf.curve(400) {
                    writeln!(w, "{},{f}", config.radius - x)?;
                }
                Ok(())
            })
        }
        Stage::Table1 => {
            let mut table = ResultsTable::default();
            for path in [ctx.artifact(Stage::EvalSim, "scores.csv"), ctx.artifact(Stage::EvalPos, "scores.csv")] {
                read_score_rows(&path, &mut table)?;
            }
            ctx.write_with("table1.csv", |w| table.write_csv(w))
        }
    }
}

fn toml_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:?}")
    }
}

fn spectral_embedding<A: SymmetricOperator + ?Sized>(op: &A, cfg: &PipelineConfig, name: &str) -> Result<EmbeddingMatrix> {
    let opts = SvdOptions {
        max_iters: cfg.svd_iters,
        tol: cfg.svd_tol,
        ..SvdOptions::new(cfg.dim, substream_seed(cfg.seed, name))
    };
    embeddings_from_svd(&truncated_svd(op, &opts)?)
}

fn write_alignment(ctx: &mut Ctx<'_>, prefix: &str, res: &AlignmentResult) -> Result<()> {
    ctx.write_with(&format!("{prefix}-q.txt"), |w| res.write_q(w))?;
    ctx.write_with(&format!("{prefix}-perm.tsv"), |w| res.write_perm(w))?;
    ctx.write_with(&format!("{prefix}-history.csv"), |w| res.write_history(w))?;
    ctx.write_with(&format!("{prefix}-loss.txt"), |w| {
        writeln!(w, "{}", res.loss)?;
        Ok(())
    })
}

const SCORE_HEADER: &str = "method,metric,value,coverage";

fn write_score_rows<W: Write>(w: &mut W, rows: &[String]) -> Result<()> {
    writeln!(w, "{SCORE_HEADER}")?;
    for r in rows {
        writeln!(w, "{r}")?;
    }
    Ok(())
}

fn read_score_rows(path: &Path, table: &mut ResultsTable) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(|_| Error::MissingArtifact(path.to_path_buf()))?;
    let name = path.display().to_string();
    for (no, line) in text.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(Error::parse(&name, no + 1, "expected 4 fields"));
        }
        let Ok(method) = f[0].parse::<Method>() else {
            continue;
        };
        let metric: Metric = f[1].parse().map_err(|e: Error| Error::parse(&name, no + 1, e.to_string()))?;
        let value: f64 = f[2].parse().map_err(|_| Error::parse(&name, no + 1, "bad value"))?;
        table.set(method, metric, value);
    }
    Ok(())
}

fn write_figure(ctx: &mut Ctx<'_>, prefix: &str, values: &[f64]) -> Result<()> {
    let hist = Histogram::from_values(values, ctx.cfg.figures.bins)?;
    let (mode, unique) = hist.mode();
    let (lo, hi) = hist.edges(mode);
    let skew = skewness(values);
    ctx.write_with(&format!("{prefix}-hist.csv"), |w| hist.write_csv(w))?;
    ctx.write_with(&format!("{prefix}-summary.toml"), |w| {
        writeln!(w, "count = {}", values.len())?;
        writeln!(w, "bins = {}", hist.bins())?;
        writeln!(w, "mode_bin = {mode}")?;
        writeln!(w, "mode_left = {}", toml_float(lo))?;
        writeln!(w, "mode_right = {}", toml_float(hi))?;
        writeln!(w, "unique_mode = {unique}")?;
        writeln!(w, "skewness = {}", toml_float(skew))?;
        Ok(())
    })
}
