use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rhgvec::pipeline::{run_stage, PipelineConfig, Stage, StageReport};
use rhgvec::Result;

/// Word vectors from PMI matrices and random hyperbolic graphs.
#[derive(Parser)]
#[command(name = "rhgvec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML configuration file; every key is optional.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set rhg.gamma=2.2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Run even if the stage manifest says outputs are current.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the vocabulary from the corpus.
    Vocab(Common),
    /// Subsample the corpus and count co-occurrences.
    Cooc(Common),
    /// Sparse PMI matrix.
    Pmi(Common),
    /// Sigmoid of shifted PMI.
    #[command(name = "sigmaspmi")]
    SigmaSpmi(Common),
    /// Truncated SVD of the PMI and sigmaSPMI matrices.
    SvdA(Common),
    /// Calibrate and sample a random hyperbolic graph.
    Rhg(Common),
    /// Truncated SVD of the graph's connection-probability operator.
    SvdB(Common),
    /// Align graph and random embeddings to the sigmaSPMI embeddings.
    Align(Common),
    /// Train the skip-gram baseline.
    Sgns(Common),
    /// Word-similarity scores for every method.
    EvalSim(Common),
    /// POS-tagging accuracy for every method.
    EvalPos(Common),
    /// Histogram of PMI values.
    FigPmi(Common),
    /// Histogram of R - X for random point pairs.
    FigRx(Common),
    /// Collect all scores into the results table.
    Table1(Common),
    /// Run every stage in order.
    All(Common),
    /// Print the effective configuration.
    ShowConfig(Common),
}

fn report(r: &StageReport) {
    let m = &r.manifest;
    if r.skipped {
        eprintln!("{}: up to date ({})", r.stage, &m.hash[..12]);
    } else {
        eprintln!("{}: {} outputs in {:.2}s ({})", r.stage, m.outputs.len(), m.wall_time_secs, &m.hash[..12]);
    }
    if !m.deterministic {
        eprintln!("{}: note: parallel mode, outputs are not reproducible", r.stage);
    }
}

fn run(cli: Cli) -> Result<()> {
    let (stages, common): (Vec<Stage>, Common) = match cli.command {
        Command::Vocab(c) => (vec![Stage::Vocab], c),
        Command::Cooc(c) => (vec![Stage::Cooc], c),
        Command::Pmi(c) => (vec![Stage::Pmi], c),
        Command::SigmaSpmi(c) => (vec![Stage::SigmaSpmi], c),
        Command::SvdA(c) => (vec![Stage::SvdA], c),
        Command::Rhg(c) => (vec![Stage::Rhg], c),
        Command::SvdB(c) => (vec![Stage::SvdB], c),
        Command::Align(c) => (vec![Stage::Align], c),
        Command::Sgns(c) => (vec![Stage::Sgns], c),
        Command::EvalSim(c) => (vec![Stage::EvalSim], c),
        Command::EvalPos(c) => (vec![Stage::EvalPos], c),
        Command::FigPmi(c) => (vec![Stage::FigPmi], c),
        Command::FigRx(c) => (vec![Stage::FigRx], c),
        Command::Table1(c) => (vec![Stage::Table1], c),
        Command::All(c) => (Stage::ALL.to_vec(), c),
        Command::ShowConfig(c) => {
            let cfg = PipelineConfig::load(c.config.as_deref(), &c.set)?;
            print!("{}", cfg.to_toml());
            return Ok(());
        }
    };
    let cfg = PipelineConfig::load(common.config.as_deref(), &common.set)?;
    for stage in stages {
        report(&run_stage(stage, &cfg, common.force)?);
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
