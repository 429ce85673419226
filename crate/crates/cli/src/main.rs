use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use resilife::verify::{self, catalog, run_config, write_csv_rows, Overall, Report, RunConfig, RunOptions};
use resilife::{parse_distribution, parse_mixing, Error, Grid, Quantity};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "resilife", version, about = "Residual-life mixtures: scenario runner and plot data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog scenarios.
    List,
    /// Run a catalog scenario, `all`, or a JSON configuration file.
    Run(RunArgs),
    /// Tabulate quantities of a baseline and its residual mixture.
    Grid(GridArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct GridFlags {
    #[arg(long)]
    grid_min: Option<f64>,
    #[arg(long)]
    grid_max: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
}

impl GridFlags {
    fn any(&self) -> bool {
        self.grid_min.is_some() || self.grid_max.is_some() || self.grid_points.is_some()
    }

    fn grid(&self) -> resilife::Result<Grid> {
        let d = Grid::default_check();
        Grid::uniform(
            self.grid_min.unwrap_or(d.lo),
            self.grid_max.unwrap_or(d.hi),
            self.grid_points.unwrap_or(d.points),
        )
    }
}

#[derive(Args)]
struct RunArgs {
    /// Scenario id, `all`, or path to a configuration file.
    target: String,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    /// Master seed; falls back to RESILIFE_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    grid: GridFlags,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    baseline: String,
    #[arg(long)]
    mixing: String,
    /// Comma-separated quantity names.
    #[arg(long, default_value = "sf")]
    quantities: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    grid: GridFlags,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numeric() { EXIT_INCONCLUSIVE } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

fn exit_code(overall: Overall) -> u8 {
    match overall {
        Overall::Pass => 0,
        Overall::Fail => EXIT_FAIL,
        Overall::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Fail beats inconclusive beats pass.
fn combined(reports: &[Report]) -> Overall {
    if reports.iter().any(|r| r.overall == Overall::Fail) {
        Overall::Fail
    } else if reports.iter().all(|r| r.overall == Overall::Pass) {
        Overall::Pass
    } else {
        Overall::Inconclusive
    }
}

fn master_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("RESILIFE_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("RESILIFE_SEED is not an unsigned integer: `{v}`"))),
        Err(_) => Ok(verify::DEFAULT_SEED),
    }
}

/// Writes to a sibling temporary file first, then renames over `path`.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::usage(format!("cannot write output: {e}"));
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(io)?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n").map_err(io)?;
            }
            Ok(())
        }
        Some(path) => {
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".partial");
            fs::write(&tmp, text).map_err(io)?;
            fs::rename(&tmp, path).map_err(io)
        }
    }
}

fn render(reports: &[Report], format: Format) -> resilife::Result<String> {
    Ok(match format {
        Format::Text => reports.iter().map(Report::to_text).collect::<Vec<_>>().join("\n"),
        Format::Json if reports.len() == 1 => reports[0].to_json()?,
        Format::Json => serde_json::to_string_pretty(reports).map_err(|e| Error::Io(e.to_string()))?,
        Format::Csv => write_csv_rows(&reports.iter().flat_map(Report::csv_rows).collect::<Vec<_>>())?,
    })
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::usage(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn parse_format(name: &str) -> Result<Format, Failure> {
    Format::from_str(name, true).map_err(|_| Failure::usage(format!("unknown format `{name}`")))
}

fn cmd_list() -> Result<u8, Failure> {
    let mut text = String::new();
    for s in catalog() {
        text.push_str(&format!("{:<16} {:<16} {}\n", s.id, s.expectation, s.title));
    }
    emit(None, &text)?;
    Ok(0)
}

fn cmd_run(args: RunArgs) -> Result<u8, Failure> {
    let mut opts = RunOptions { seed: master_seed(args.seed)?, ..RunOptions::default() };
    if let Some(tol) = args.tol {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Failure::usage(format!("--tol must be a nonnegative number, got {tol}")));
        }
        opts.tol = tol;
    }
    if args.grid.any() {
        opts.grid = Some(args.grid.grid()?);
    }
    let is_catalog = args.target == "all" || catalog().iter().any(|s| s.id == args.target);
    let (reports, config_format) = if args.target == "all" {
        (verify::run_all(&opts), None)
    } else if is_catalog {
        (vec![verify::run_scenario(&args.target, &opts)?], None)
    } else if Path::new(&args.target).is_file() {
        let mut cfg = load_config(Path::new(&args.target))?;
        if args.seed.is_some() {
            cfg.seed = args.seed;
        }
        if let Some(tol) = args.tol {
            cfg.tol = Some(tol);
        }
        if args.grid.any() {
            cfg.grid = None;
        }
        let format = cfg.format.as_deref().map(parse_format).transpose()?;
        (vec![run_config(&cfg, &opts)?], format)
    } else {
        return Err(Error::UnknownScenario(args.target).into());
    };
    let format = args.format.or(config_format).unwrap_or(Format::Text);
    emit(args.out.as_deref(), &render(&reports, format)?)?;
    Ok(exit_code(combined(&reports)))
}

fn cmd_grid(args: GridArgs) -> Result<u8, Failure> {
    let baseline = parse_distribution(&args.baseline)?;
    let mixing = parse_mixing(&args.mixing)?;
    let quantities = args
        .quantities
        .split(',')
        .filter(|q| !q.trim().is_empty())
        .map(str::parse)
        .collect::<resilife::Result<Vec<Quantity>>>()?;
    if quantities.is_empty() {
        return Err(Failure::usage("no quantities requested"));
    }
    let csv = verify::quantity_csv(&baseline, &mixing, &quantities, &args.grid.grid()?)?;
    emit(args.out.as_deref(), &csv)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::List => cmd_list(),
        Command::Run(args) => cmd_run(args),
        Command::Grid(args) => cmd_grid(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
