use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use adsmass::initial_data::registry;
use adsmass::report::{
    emit_csv, emit_report, exit_code_for, families_human, parse_config, run_pipelines, Format, Pipeline,
    RunConfig,
};
use adsmass::Error;

#[derive(Parser)]
#[command(name = "adsmass", version, about = "Energy-momentum and positivity checks for asymptotically AdS initial data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in families and their parameters.
    Families {
        #[arg(long, value_enum, default_value_t = OutFormat::Human)]
        format: OutFormat,
    },
    /// Run the identity and geometry pipelines.
    Verify(RunArgs),
    /// Compute E, P and the two mass matrices.
    Mass(RunArgs),
    /// Run every pipeline selected in the configuration.
    Report(ReportArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = OutFormat::Human)]
    format: OutFormat,
    /// Write the report here instead of stdout; the CSV goes next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the configured seed of the randomised pipelines.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ReportArgs {
    /// Defaults to hyperbolic space with κ = 1.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Human,
    Structured,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Human => Format::Human,
            OutFormat::Structured => Format::Structured,
        }
    }
}

const VERIFY: [Pipeline; 6] = [
    Pipeline::Clifford,
    Pipeline::Killing,
    Pipeline::Weitzenbock,
    Pipeline::Decay,
    Pipeline::EnergyConditions,
    Pipeline::Rigidity,
];
const MASS: [Pipeline; 2] = [Pipeline::Mass, Pipeline::QMatrices];

fn load(path: &Path) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Contract(format!("cannot write {}: {e}", path.display())))
}

fn execute(mut cfg: RunConfig, filter: Option<&[Pipeline]>, common: &Common) -> Result<i32, Error> {
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("--threads: {e}")))?;
    }
    let selected: Vec<Pipeline> = cfg
        .ordered_pipelines()
        .into_iter()
        .filter(|p| filter.is_none_or(|f| f.contains(p)))
        .collect();
    let report = run_pipelines(&cfg, &selected)?;
    let text = emit_report(&report, common.format.into())?;
    let out = common.out.clone().or_else(|| cfg.output.report.as_ref().map(PathBuf::from));
    match &out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    let csv_path = cfg
        .output
        .csv
        .as_ref()
        .map(PathBuf::from)
        .or_else(|| out.as_ref().map(|p| p.with_extension("csv")));
    if let (Some(path), Some(csv)) = (csv_path, emit_csv(&report)) {
        write(&path, &csv)?;
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Families { format } => {
            let fams = registry();
            let text = match format {
                OutFormat::Human => Ok(families_human(&fams)),
                OutFormat::Structured => serde_json::to_string_pretty(&fams)
                    .map(|s| s + "\n")
                    .map_err(|e| Error::Contract(e.to_string())),
            };
            text.map(|t| {
                print!("{t}");
                0
            })
        }
        Command::Verify(a) => load(&a.config).and_then(|c| execute(c, Some(&VERIFY), &a.common)),
        Command::Mass(a) => load(&a.config).and_then(|c| execute(c, Some(&MASS), &a.common)),
        Command::Report(a) => {
            let cfg = match &a.config {
                Some(p) => load(p),
                None => Ok(RunConfig::new("ads", 1.0)),
            };
            cfg.and_then(|c| execute(c, None, &a.common))
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("adsmass: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
