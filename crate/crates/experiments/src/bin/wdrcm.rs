use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use wdrcm_experiments::{run, sample_model, ExperimentError, ExperimentKind, ExperimentResult, RunConfig};

#[derive(Parser)]
#[command(name = "wdrcm", version, about = "Simulate marked spatial random graphs and check their distance scaling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the master seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; defaults to `output.dir` of the config, then `.`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sample point sets and graphs and write them out.
    Generate,
    /// Degree tail and degree-versus-mark statistics.
    Degree,
    /// Hop distances along a ladder of Euclidean separations.
    Distances,
    /// Mean distance over a (gamma, delta) grid with regime labels.
    Sweep,
    /// Greedy layer-path construction against exact distances.
    Layerpath,
    /// Numerical checks of the integral bounds and recursions.
    Theory,
}

impl Command {
    fn kind(self) -> Option<ExperimentKind> {
        match self {
            Command::Generate => None,
            Command::Degree => Some(ExperimentKind::Degree),
            Command::Distances => Some(ExperimentKind::DistanceScaling),
            Command::Sweep => Some(ExperimentKind::PhaseSweep),
            Command::Layerpath => Some(ExperimentKind::LayerPath),
            Command::Theory => Some(ExperimentKind::TheoryChecks),
        }
    }
}

enum Failure {
    Config(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(m) => Failure::Config(m),
            other => Failure::Other(other.into()),
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, Failure> {
    let path = common.config.as_ref().ok_or_else(|| Failure::Config("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = common.seed {
        cfg.seeds.master_seed = s;
    }
    Ok(cfg)
}

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn generate(cfg: &RunConfig, dir: &Path) -> Result<(), Failure> {
    for trial in 0..cfg.trials {
        let seed = cfg.seeds.for_trial(trial);
        let (points, g) = sample_model(&cfg.model, &cfg.model.kernel, &seed)?;
        points.write_csv(create(dir, &format!("points_trial{trial}.csv"))?).context("writing points")?;
        g.write_edge_csv(create(dir, &format!("edges_trial{trial}.csv"))?).context("writing edges")?;
        let meta = serde_json::json!({
            "trial": trial,
            "vertices": g.n(),
            "edges": g.edge_count(),
            "provenance": g.provenance(),
        });
        serde_json::to_writer_pretty(create(dir, &format!("graph_trial{trial}.json"))?, &meta).context("writing metadata")?;
    }
    eprintln!("wrote {} trial(s) to {}", cfg.trials, dir.display());
    Ok(())
}

fn write_result(res: &ExperimentResult, dir: &Path, format: Format) -> anyhow::Result<()> {
    let name = res.experiment.name();
    match format {
        Format::Csv => {
            res.write_csv(create(dir, &format!("{name}.csv"))?)?;
            let meta = serde_json::json!({ "experiment": name, "config": res.config, "notes": res.notes });
            serde_json::to_writer_pretty(create(dir, &format!("{name}.meta.json"))?, &meta)?;
        }
        Format::Json => serde_json::to_writer_pretty(create(dir, &format!("{name}.json"))?, res)?,
    }
    if !res.theory.is_empty() {
        serde_json::to_writer_pretty(create(dir, "theory_report.json")?, &res.theory)?;
    }
    for (trial, rows) in &res.distance_rows {
        wdrcm_metrics::write_distance_csv(rows, create(dir, &format!("distances_trial{trial}.csv"))?)?;
    }
    Ok(())
}

fn main_inner(cli: &Cli) -> Result<ExitCode, Failure> {
    let cfg = load_config(&cli.common)?;
    if cli.common.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let dir = cli.common.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let Some(kind) = cli.command.kind() else {
        generate(&cfg, &dir)?;
        return Ok(ExitCode::SUCCESS);
    };
    let res = run(&cfg, kind)?;
    write_result(&res, &dir, cli.common.format)?;
    let failed = res.failed_checks();
    eprintln!("{}: {} records written to {}", kind.name(), res.records.len(), dir.display());
    if failed > 0 {
        eprintln!("{failed} theory check(s) failed");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(code) => code,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
