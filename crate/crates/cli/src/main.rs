use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use poisson_cli::commands::DEFAULT_SEED;
use poisson_cli::resolve::rational_arg;
use poisson_cli::{run, CliError, Command, Options, Workspace};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// Exact verification of Poisson structures, coupling data and leaf
/// invariants.
#[derive(Debug, Parser)]
#[command(name = "poisson", version)]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Seed for sampling and randomized suites.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    seed: u64,
    /// Sample points for numeric zero tests.
    #[arg(long, default_value_t = 64, global = true)]
    samples: usize,
    /// Tolerance for numeric zero tests.
    #[arg(long, default_value_t = 1e-9, global = true)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "on", global = true)]
    parallel: Switch,
    /// Extra definition file, searched before the built-in library.
    #[arg(long, global = true)]
    defs: Vec<String>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Jacobi identity of a bivector or weighted product.
    CheckJacobi { name: String },
    /// `check-casimir F on PI`
    CheckCasimir {
        casimir: String,
        #[arg(value_parser = ["on"], hide = true)]
        on: String,
        structure: String,
    },
    /// Factors, Casimirs and Jacobi identity of a weighted product.
    WeightedProduct { name: String },
    /// First approximation of a weighted product at its leaf.
    FirstApprox { name: String },
    /// The four integrability conditions of coupling data.
    CheckIntegrability { data: String },
    /// `decompose PI on CHART`
    Decompose {
        structure: String,
        #[arg(value_parser = ["on"], hide = true)]
        on: String,
        chart: String,
    },
    /// `verify-map PSI from A to B`
    VerifyMap {
        map: String,
        #[arg(value_parser = ["from"], hide = true)]
        from: String,
        source: String,
        #[arg(value_parser = ["to"], hide = true)]
        to: String,
        target: String,
    },
    /// Compare two leaf volume profiles.
    VolumeObstruction { first: String, second: String },
    /// Volume matching against the sphere class for T x so(3)*.
    Example3Certificate {
        /// Comma-separated positive radii, e.g. `1/10,1/2,1,2`.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Randomized bracket and connection identity suites.
    Identities {
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long, default_value_t = 20)]
        sections: usize,
    },
    /// Print the canonical form of a definition file (a `--defs` path or a
    /// built-in file name such as `ex1.def`).
    Print { file: String },
}

fn command(cmd: Cmd) -> Result<Command, CliError> {
    Ok(match cmd {
        Cmd::CheckJacobi { name } => Command::CheckJacobi { name },
        Cmd::CheckCasimir { casimir, structure, .. } => Command::CheckCasimir { casimir, structure },
        Cmd::WeightedProduct { name } => Command::WeightedProduct { name },
        Cmd::FirstApprox { name } => Command::FirstApprox { name },
        Cmd::CheckIntegrability { data } => Command::CheckIntegrability { data },
        Cmd::Decompose { structure, chart, .. } => Command::Decompose { structure, chart },
        Cmd::VerifyMap { map, source, target, .. } => Command::VerifyMap { map, source, target },
        Cmd::VolumeObstruction { first, second } => Command::VolumeObstruction { first, second },
        Cmd::Example3Certificate { grid } => {
            let grid = grid
                .map(|g| {
                    g.split(',')
                        .map(|r| rational_arg(r).ok_or_else(|| CliError::Usage(format!("`{r}` is not a rational number"))))
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?;
            Command::Example3Certificate { grid }
        }
        Cmd::Identities { instances, sections } => Command::Identities { instances, sections },
        Cmd::Print { .. } => unreachable!("handled before dispatch"),
    })
}

fn workspace(defs: &[String]) -> Result<Workspace, CliError> {
    let mut ws = Workspace::builtin()?;
    for path in defs {
        let src = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        ws = ws.with_user(path, &src)?;
    }
    Ok(ws)
}

fn main_inner(cli: Cli) -> Result<i32, CliError> {
    let ws = workspace(&cli.defs)?;
    if let Cmd::Print { file } = &cli.command {
        let loaded = ws
            .loaded(file)
            .ok_or_else(|| CliError::Usage(format!("no definition file `{file}` (pass it with --defs)")))?;
        print!("{}", loaded.ast);
        return Ok(0);
    }
    let opts = Options {
        seed: cli.seed,
        samples: cli.samples,
        epsilon: cli.epsilon,
        parallel: matches!(cli.parallel, Switch::On),
    };
    if cli.samples == 0 || cli.epsilon.is_nan() || cli.epsilon <= 0.0 {
        return Err(CliError::Usage("--samples and --epsilon must be positive".into()));
    }
    let report = run(&command(cli.command)?, &opts, &ws)?;
    match cli.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()),
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
