use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use loopwalk::error::Error;
use loopwalk::harness::output::{self, OutputFormat};
use loopwalk::harness::{
    presets, rows_from_records, run_experiment_with_engine, run_sweep, Engine, ExperimentConfig,
    ObservableFlags, SweepSpec,
};
use loopwalk::noise::{NoiseKind, NoiseSpec};
use loopwalk::walk::{CoinSpec, InitialStateSpec, LoopConfig};

/// Quantum walk transport on a ring with an absorbing sink.
#[derive(Parser)]
#[command(name = "loopwalk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one configuration and emit per-step records.
    Run(RunArgs),
    /// Run a parameter sweep described by a TOML config file.
    Sweep(SweepArgs),
    /// Write the data files for a built-in figure preset.
    Figure(FigureArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NoiseArg {
    None,
    Depolarizing,
    Dephasing,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoinArg {
    Symmetric,
    Rotation,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Density,
    Statevector,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Number of ring sites (n >= 3).
    #[arg(long)]
    sites: usize,
    /// Sink site index, 0-based.
    #[arg(long)]
    sink: usize,
    /// Sink strength r in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    strength: f64,
    /// Coin noise channel.
    #[arg(long, value_enum, default_value_t = NoiseArg::None)]
    noise: NoiseArg,
    /// Noise strength P in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    /// Dephasing angle in radians (dephasing noise only).
    #[arg(long, default_value_t = 0.0)]
    dephase_angle: f64,
    /// Coin operator.
    #[arg(long, value_enum, default_value_t = CoinArg::Symmetric)]
    coin: CoinArg,
    /// Rotation angle in radians; required by (and only valid with) --coin rotation.
    #[arg(long)]
    theta: Option<f64>,
    /// Initial coin mixing angle in radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    init_delta: f64,
    /// Initial coin relative phase in radians.
    #[arg(long, default_value_t = 0.0)]
    init_eta: f64,
    /// Number of steps to evolve.
    #[arg(long)]
    steps: usize,
    /// State representation to propagate.
    #[arg(long, value_enum, default_value_t = EngineArg::Density)]
    engine: EngineArg,
    /// Record MID (coin-position quantum correlations) each step.
    #[arg(long)]
    mid: bool,
    /// Record the per-site occupation; needs --out for the sibling file.
    #[arg(long)]
    distribution: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file with a [base] experiment and optional [[axes]] tables.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads for grid points.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    /// Output file (.json for JSON, anything else for CSV).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FigureArgs {
    /// Preset name, fig2 through fig13.
    #[arg(long)]
    name: String,
    /// Directory for the panel CSV files (created if missing).
    #[arg(long)]
    out: PathBuf,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn run_cmd(args: RunArgs) -> Result<(), Error> {
    let coin = match (args.coin, args.theta) {
        (CoinArg::Symmetric, None) => CoinSpec::SymmetricDft,
        (CoinArg::Symmetric, Some(_)) => {
            return Err(Error::Config("--theta only applies to --coin rotation".into()))
        }
        (CoinArg::Rotation, Some(theta)) => CoinSpec::Rotation { theta },
        (CoinArg::Rotation, None) => {
            return Err(Error::Config("--coin rotation needs --theta".into()))
        }
    };
    let noise = NoiseSpec {
        kind: match args.noise {
            NoiseArg::None => NoiseKind::None,
            NoiseArg::Depolarizing => NoiseKind::Depolarizing,
            NoiseArg::Dephasing => NoiseKind::Dephasing,
        },
        strength: args.p,
        dephase_angle: args.dephase_angle,
    };
    let engine = match args.engine {
        EngineArg::Density => Engine::Density,
        EngineArg::Statevector => Engine::Statevector,
    };
    if engine == Engine::Statevector && noise.kind != NoiseKind::None {
        return Err(Error::Config(
            "--engine statevector is only valid with --noise none".into(),
        ));
    }
    if args.distribution && args.out.is_none() {
        return Err(Error::Config(
            "--distribution writes a sibling file and therefore needs --out".into(),
        ));
    }
    let mut config = ExperimentConfig::new(
        LoopConfig {
            n: args.sites,
            sink_site: args.sink,
            sink_strength: args.strength,
            coin,
            initial: InitialStateSpec {
                delta_init: args.init_delta,
                eta: args.init_eta,
                start_site: 0,
            },
        },
        noise,
        args.steps,
    );
    config.observables = ObservableFlags {
        te: true,
        distribution: args.distribution,
        mid: args.mid,
    };
    let records = run_experiment_with_engine(&config, engine)?;
    let rows = rows_from_records(&config, records);
    match &args.out {
        Some(path) => {
            let report = output::write_rows_to_path(path, args.format.into(), &rows, None)?;
            report_written(&report);
        }
        None => {
            let stdout = std::io::stdout();
            let lock = stdout.lock();
            match args.format.into() {
                OutputFormat::Csv => output::write_rows_csv(lock, &rows, None)?,
                OutputFormat::Json => output::write_rows_json(lock, &rows)?,
            }
        }
    }
    Ok(())
}

fn sweep_cmd(args: SweepArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::io(format!("reading {}", args.config.display()), e))?;
    let spec: SweepSpec = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", args.config.display())))?;
    let rows = run_sweep(&spec, args.workers)?;
    let format = match args.out.extension().and_then(|e| e.to_str()) {
        Some("json") => OutputFormat::Json,
        _ => OutputFormat::Csv,
    };
    let report = output::write_rows_to_path(&args.out, format, &rows, None)?;
    report_written(&report);
    Ok(())
}

fn figure_cmd(args: FigureArgs) -> Result<(), Error> {
    let spec = presets::figure_preset(&args.name)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::io(format!("creating {}", args.out.display()), e))?;
    let panels = presets::run_figure(&spec, default_workers())?;
    for panel in &panels {
        let path = args.out.join(format!("{}.csv", panel.file_stem));
        let report =
            output::write_rows_to_path(&path, OutputFormat::Csv, &panel.rows, Some(&panel.comment))?;
        report_written(&report);
    }
    Ok(())
}

fn report_written(report: &output::WriteReport) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "wrote {}", report.main.display());
    if let Some(d) = &report.distribution {
        let _ = writeln!(err, "wrote {}", d.display());
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(args) => run_cmd(args),
        Command::Sweep(args) => sweep_cmd(args),
        Command::Figure(args) => figure_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code().clamp(1, 2) as u8)
        }
    }
}
