use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sparse_clifford::experiments::{
    run_ensemble, ExperimentKind, ExperimentOutput, ExperimentSpec, GeometrySelection, Records, ScalingObservable,
};
use sparse_clifford::diagnostics::FitModel;
use sparse_clifford::CircuitConfig;

const GIT_REVISION: &str = env!("SPARSE_CLIFFORD_GIT_REVISION");

#[derive(Parser, Debug)]
#[command(name = "sparse-clifford", version, about = "Ensemble experiments on sparse nonlocal Clifford circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropy of contiguous regions of every size, per timestep.
    EntropyScan(Opts),
    /// Tripartite mutual information of contiguous quarters, per timestep.
    Tripartite(Opts),
    /// Teleportation fidelity from one input site to every output site.
    Teleport(Opts),
    /// Crossing time of maximally separated fidelity curves across sizes.
    CriticalTime(Opts),
    /// Threshold time of an observable across sizes, with a scaling fit.
    Scaling(Opts),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

/// Every setting can also come from the `--config` TOML file, under the same
/// name as the flag; flags win.
#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct Opts {
    /// System size (a power of two, at least 4).
    #[arg(long)]
    n: Option<usize>,
    /// Interaction exponent.
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trajectories: Option<usize>,
    #[arg(long)]
    t_max: Option<usize>,
    /// linear, treelike or both.
    #[arg(long)]
    geometry: Option<String>,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Teleportation input site.
    #[arg(long)]
    input_site: Option<usize>,
    /// Comma-separated system sizes.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// t0 or t_vol.
    #[arg(long)]
    observable: Option<String>,
    /// linear, log, power or degree-<d>.
    #[arg(long)]
    model: Option<String>,
    /// TOML file with default values for the flags above.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

impl Opts {
    fn merged_with(self, file: Opts) -> Opts {
        Opts {
            n: self.n.or(file.n),
            s: self.s.or(file.s),
            seed: self.seed.or(file.seed),
            trajectories: self.trajectories.or(file.trajectories),
            t_max: self.t_max.or(file.t_max),
            geometry: self.geometry.or(file.geometry),
            out: self.out.or(file.out),
            threads: self.threads.or(file.threads),
            format: self.format.or(file.format),
            input_site: self.input_site.or(file.input_site),
            sizes: self.sizes.or(file.sizes),
            observable: self.observable.or(file.observable),
            model: self.model.or(file.model),
            config: self.config,
        }
    }

    fn resolve(self) -> Result<Opts> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
        let file: Opts = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        Ok(self.merged_with(file))
    }
}

fn build_spec(kind: ExperimentKind, o: &Opts) -> Result<ExperimentSpec> {
    let sized = matches!(kind, ExperimentKind::TeleportCritical | ExperimentKind::ScalingStudy);
    let n = match (o.n, &o.sizes) {
        (Some(n), _) => n,
        (None, Some(sizes)) if sized => sizes.first().copied().unwrap_or(0),
        _ => bail!("--n is required"),
    };
    let mut config = CircuitConfig::new(n, o.s.unwrap_or(0.0))
        .with_seed(o.seed.unwrap_or(0))
        .with_trajectories(o.trajectories.unwrap_or(100))
        .with_t_max(o.t_max.unwrap_or(10));
    if kind == ExperimentKind::ScalingStudy && o.t_max.is_none() {
        // Threshold runs stop at the crossing; the cap only bounds runaway cases.
        config.t_max = 100_000;
    }
    let mut spec = ExperimentSpec::new(kind, config);
    if let Some(g) = &o.geometry {
        spec.geometry = g.parse::<GeometrySelection>()?;
    }
    spec.output = o.out.clone();
    spec.input_site = o.input_site.unwrap_or(0);
    spec.sizes = o.sizes.clone().unwrap_or_default();
    if let Some(obs) = &o.observable {
        spec.observable = Some(obs.parse::<ScalingObservable>()?);
    }
    if let Some(m) = &o.model {
        spec.model = m.parse::<FitModel>()?;
    }
    spec.validate()?;
    Ok(spec)
}

fn write_csv<W: Write>(out: W, records: &Records) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match records {
        Records::EntropyScan(rows) => rows.iter().try_for_each(|r| w.serialize(r))?,
        Records::Tripartite(rows) => rows.iter().try_for_each(|r| w.serialize(r))?,
        Records::Teleport(rows) => rows.iter().try_for_each(|r| w.serialize(r))?,
        Records::Scaling(rows) => rows.iter().try_for_each(|r| w.serialize(r))?,
    }
    if records.is_empty() {
        w.write_record(records.header().split(','))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonMetadata<'a> {
    git_revision: &'a str,
    units: &'a str,
    gates_per_site_rate: Option<f64>,
    spec: &'a ExperimentSpec,
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    metadata: JsonMetadata<'a>,
    columns: Vec<&'a str>,
    rows: &'a Records,
}

fn write_json<W: Write>(mut out: W, output: &ExperimentOutput) -> Result<()> {
    let doc = JsonDocument {
        metadata: JsonMetadata {
            git_revision: GIT_REVISION,
            units: output.units,
            gates_per_site_rate: output.gates_per_site_rate,
            spec: &output.spec,
        },
        columns: output.records.header().split(',').collect(),
        rows: &output.records,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

fn emit<W: Write>(out: W, output: &ExperimentOutput, format: Format) -> Result<()> {
    match format {
        Format::Csv => write_csv(out, &output.records),
        Format::Json => write_json(out, output),
    }
}

fn write_file(path: &Path, output: &ExperimentOutput, format: Format) -> Result<()> {
    let result = File::create(path)
        .with_context(|| format!("creating {}", path.display()))
        .and_then(|f| {
            let mut w = BufWriter::new(f);
            emit(&mut w, output, format)?;
            w.flush().with_context(|| format!("writing {}", path.display()))
        });
    if result.is_err() {
        let _ = fs::remove_file(path);
    }
    result
}

fn run(cli: Cli) -> Result<()> {
    let (kind, opts) = match cli.command {
        Command::EntropyScan(o) => (ExperimentKind::EntropyScan, o),
        Command::Tripartite(o) => (ExperimentKind::Tripartite, o),
        Command::Teleport(o) => (ExperimentKind::TeleportLightcone, o),
        Command::CriticalTime(o) => (ExperimentKind::TeleportCritical, o),
        Command::Scaling(o) => (ExperimentKind::ScalingStudy, o),
    };
    let opts = opts.resolve()?;
    if let Some(threads) = opts.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("starting worker pool")?;
    }
    let spec = build_spec(kind, &opts)?;
    log::info!("running {:?} with {} trajectories", spec.kind, spec.config.trajectories);
    let output = run_ensemble(&spec)?;
    if let Some(rate) = output.gates_per_site_rate {
        log::info!("measured gate incidences per site per step: {rate:.4}");
    }
    let format = opts.format.unwrap_or(Format::Csv);
    match &opts.out {
        Some(path) => write_file(path, &output, format),
        None => emit(io::stdout().lock(), &output, format),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
