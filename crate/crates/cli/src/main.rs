use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adagibbs::harness::{emit_plot_data, run_experiment, Experiment, ExperimentConfig, RunManifest};
use adagibbs::samplers::Trajectory;
use adagibbs::variance::asymptotic_variance_estimate;
use clap::{Args, Parser, Subcommand};

/// Adaptive random scan Gibbs samplers: experiments and checks.
#[derive(Debug, Parser)]
#[command(name = "adagibbs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run any experiment described by a config file.
    Simulate(Common),
    /// Transience of the adaptive ladder sampler against a fixed-weight control.
    Counterexample(Common),
    /// Exact kernels against the Lipschitz, uniform-ergodicity and strong-uniform bounds.
    Bounds(Common),
    /// Per-coordinate autocorrelation times of trajectory files; without files,
    /// the lazy-chain variance identity check.
    Variance {
        #[command(flatten)]
        common: Common,
        /// Trajectory CSV files.
        traces: Vec<PathBuf>,
    },
    /// Adaptive Metropolis-within-Gibbs on a scaled product target.
    OptimalScan(Common),
    /// Vanishing proposal changes with non-vanishing kernel changes.
    GeometricGap(Common),
    /// Extract two columns of a CSV file for plotting.
    PlotData {
        input: PathBuf,
        #[arg(long, default_value = "step")]
        x: String,
        #[arg(long, default_value = "x_1")]
        y: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to the config's, then `out/<kind>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 1 if any check fails.
    #[arg(long)]
    check: bool,
}

enum Failure {
    Usage(String),
    Checks,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load_config(common: &Common, kind: Option<&str>) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match (&common.config, kind) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(kind)) => ExperimentConfig::new(0, Experiment::default_for(kind)?),
        (None, None) => return Err(Failure::Usage("--config is required".into())),
    };
    if let Some(kind) = kind {
        if cfg.experiment.kind() != kind {
            return Err(Failure::Usage(format!(
                "config is for {:?}, not {kind:?}",
                cfg.experiment.kind()
            )));
        }
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn out_dir(common: &Common, cfg: &ExperimentConfig) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| Path::new("out").join(cfg.experiment.kind()))
}

fn report(m: &RunManifest, dir: &Path, check: bool) -> Result<(), Failure> {
    println!("{} (seed {}, digest {}) -> {}", m.kind, m.seed, &m.config_digest[..12], dir.display());
    for c in &m.checks {
        println!("  {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if check && !m.passed() {
        return Err(Failure::Checks);
    }
    Ok(())
}

fn run(common: &Common, kind: Option<&str>) -> Result<(), Failure> {
    let cfg = load_config(common, kind)?;
    let dir = out_dir(common, &cfg);
    let m = run_experiment(&cfg, &dir)?;
    report(&m, &dir, common.check)
}

/// `file, coordinate, iact, variance, asymptotic_variance` for every
/// coordinate of every trace.
fn variance_table(traces: &[PathBuf], out: Option<&Path>) -> Result<(), Failure> {
    let sink: Box<dyn std::io::Write> = match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Box::new(std::fs::File::create(dir.join("variance.csv"))?)
        }
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["file", "coordinate", "iact", "variance", "asymptotic_variance"])?;
    for path in traces {
        let t = Trajectory::load(path).map_err(|e| format!("{}: {e}", path.display()))?;
        for i in 0..t.dim() {
            // the initial state is a fixed point, not a draw
            let x = t.coordinate_trace(i);
            let (tau, asvar) =
                asymptotic_variance_estimate(&x[1..]).map_err(|e| format!("{} x_{}: {e}", path.display(), i + 1))?;
            w.write_record([
                path.display().to_string(),
                (i + 1).to_string(),
                tau.to_string(),
                (asvar / tau).to_string(),
                asvar.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(c) => run(&c, None),
        Command::Counterexample(c) => run(&c, Some("counterexample")),
        Command::Bounds(c) => run(&c, Some("bounds")),
        Command::OptimalScan(c) => run(&c, Some("optimal-scan")),
        Command::GeometricGap(c) => run(&c, Some("geometric-gap")),
        Command::Variance { common, traces } if traces.is_empty() => run(&common, Some("lazy-variance")),
        Command::Variance { common, traces } => variance_table(&traces, common.out.as_deref()),
        Command::PlotData { input, x, y, out } => {
            let rows = emit_plot_data(&input, &x, &y, &out)?;
            println!("{rows} rows -> {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
