//! `rooted-forests`: identity checks, forest counts and censuses from the
//! command line.
//!
//! Exit codes: 0 when every verdict passes, 1 on any disagreement, 2 on
//! usage errors.

use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use rooted_forests::forest::DEFAULT_MAX_NODES;
use rooted_forests::report::{
    run_bench, run_census, run_compare, run_count, run_verify_identity, CensusOptions, Grid,
    IdentityMode, IdentityOptions, OracleOptions, Outcome, RunReport,
};
use rooted_forests::Error;

#[derive(Parser)]
#[command(
    name = "rooted-forests",
    version,
    about = "Exact checks of rooted-forest counting formulas"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Print the report as JSON
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Print one CSV row per instance
    #[arg(long, global = true)]
    csv: bool,
    /// Search-node budget for the filter oracle
    #[arg(long, global = true)]
    max_nodes: Option<u64>,
    /// TOML file with the same keys as the flags; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the partition identity over the (m, p) grid
    VerifyIdentity {
        #[arg(long)]
        max_m: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Seed for the rational points of numeric mode
        #[arg(long)]
        seed: Option<u64>,
        /// Points per m in numeric mode
        #[arg(long)]
        points: Option<usize>,
        /// Also check the inductive-step identities and the multinomial variant
        #[arg(long)]
        claims: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Count forests: closed form against both oracles
    Count {
        /// Comma-separated set sizes; repeat for several instances
        #[arg(long = "sizes", value_parser = parse_sizes)]
        sizes: Vec<Vec<usize>>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Weighted census polynomial with extra vertices
    Census {
        #[arg(long = "sizes", value_parser = parse_sizes)]
        sizes: Vec<Vec<usize>>,
        #[arg(long)]
        extras: Option<usize>,
        /// Forbid edges between vertices of different sets
        #[arg(long)]
        no_interset: bool,
        /// Also evaluate the nested expansion term by term
        #[arg(long)]
        literal: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run a preset equivalence grid
    Compare {
        #[arg(long, value_enum)]
        grid: Option<GridArg>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Time every route and check results do not depend on the worker count
    Bench {
        #[arg(long = "sizes", value_parser = parse_sizes)]
        sizes: Vec<Vec<usize>>,
        #[arg(long)]
        extras: Option<usize>,
        /// Comma-separated worker counts to compare
        #[arg(long, value_delimiter = ',')]
        workers: Vec<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Symbolic,
    Numeric,
}

#[derive(Clone, Copy, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum GridArg {
    Count,
    Census,
    Expansion,
    All,
}

/// Config file keys, named after the long flags.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct Config {
    json: Option<bool>,
    csv: Option<bool>,
    max_nodes: Option<u64>,
    workers: Option<WorkersValue>,
    max_m: Option<usize>,
    mode: Option<Mode>,
    seed: Option<u64>,
    points: Option<usize>,
    claims: Option<bool>,
    sizes: Option<Vec<SizesValue>>,
    extras: Option<usize>,
    no_interset: Option<bool>,
    literal: Option<bool>,
    grid: Option<GridArg>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SizesValue {
    List(Vec<usize>),
    Text(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WorkersValue {
    One(usize),
    Many(Vec<usize>),
}

impl WorkersValue {
    fn into_vec(self) -> Vec<usize> {
        match self {
            WorkersValue::One(w) => vec![w],
            WorkersValue::Many(ws) => ws,
        }
    }
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, String> {
    let sizes = text
        .split(',')
        .map(|s| match s.trim().parse::<usize>() {
            Ok(0) => Err("set sizes must be positive".to_string()),
            Ok(v) => Ok(v),
            Err(_) => Err(format!("`{s}` is not a positive integer")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if sizes.is_empty() {
        return Err("empty sizes list".into());
    }
    Ok(sizes)
}

struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, Usage> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Usage(format!("bad config {}: {e}", path.display())))
}

fn config_sizes(cfg: &mut Config) -> Result<Vec<Vec<usize>>, Usage> {
    cfg.sizes
        .take()
        .unwrap_or_default()
        .into_iter()
        .map(|v| match v {
            SizesValue::List(l) if l.is_empty() || l.contains(&0) => Err(Usage(
                "config sizes must be nonempty lists of positive integers".into(),
            )),
            SizesValue::List(l) => Ok(l),
            SizesValue::Text(t) => parse_sizes(&t).map_err(Usage),
        })
        .collect()
}

fn single_worker(cli: Option<usize>, cfg: Option<WorkersValue>) -> Result<usize, Usage> {
    match cli {
        Some(w) => Ok(w),
        None => match cfg.map(WorkersValue::into_vec).as_deref() {
            None => Ok(1),
            Some([w]) => Ok(*w),
            Some(_) => Err(Usage("only bench takes a list of worker counts".into())),
        },
    }
}

enum Format {
    Text,
    Json,
    Csv,
}

fn run(cli: Cli) -> Result<(RunReport, Format), Usage> {
    let mut cfg = load_config(cli.common.config.as_deref())?;
    let json = cli.common.json || cfg.json.unwrap_or(false);
    let csv = cli.common.csv || cfg.csv.unwrap_or(false);
    let format = match (json, csv) {
        (true, true) => return Err(Usage("choose one of --json and --csv".into())),
        (true, false) => Format::Json,
        (false, true) => Format::Csv,
        _ => Format::Text,
    };
    let max_nodes = cli
        .common
        .max_nodes
        .or(cfg.max_nodes)
        .unwrap_or(DEFAULT_MAX_NODES);
    let cfg_sizes = config_sizes(&mut cfg)?;
    let pick_sizes = |given: Vec<Vec<usize>>| {
        if given.is_empty() {
            cfg_sizes.clone()
        } else {
            given
        }
    };

    let report = match cli.command {
        Command::VerifyIdentity {
            max_m,
            mode,
            seed,
            points,
            claims,
            workers,
        } => {
            let defaults = IdentityOptions::default();
            let mode = match mode.or(cfg.mode) {
                Some(Mode::Numeric) => IdentityMode::Numeric,
                _ => IdentityMode::Symbolic,
            };
            run_verify_identity(IdentityOptions {
                max_m: max_m.or(cfg.max_m).unwrap_or(defaults.max_m),
                mode,
                seed: seed.or(cfg.seed).unwrap_or(defaults.seed),
                points: points.or(cfg.points).unwrap_or(defaults.points),
                claims: claims || cfg.claims.unwrap_or(false),
                workers: single_worker(workers, cfg.workers)?,
            })?
        }
        Command::Count { sizes, workers } => {
            let sizes = pick_sizes(sizes);
            if sizes.is_empty() {
                return Err(Usage("count needs at least one --sizes".into()));
            }
            let workers = single_worker(workers, cfg.workers)?;
            run_count(&sizes, OracleOptions { max_nodes, workers })?
        }
        Command::Census {
            sizes,
            extras,
            no_interset,
            literal,
            workers,
        } => {
            let sizes = pick_sizes(sizes);
            if sizes.is_empty() {
                return Err(Usage("census needs at least one --sizes".into()));
            }
            let n = extras.or(cfg.extras).unwrap_or(0);
            let cases: Vec<_> = sizes.into_iter().map(|s| (s, n)).collect();
            let copts = CensusOptions {
                forbid_interset: no_interset || cfg.no_interset.unwrap_or(false),
                literal_expansion: literal || cfg.literal.unwrap_or(false),
            };
            let workers = single_worker(workers, cfg.workers)?;
            run_census(&cases, copts, OracleOptions { max_nodes, workers })?
        }
        Command::Compare { grid, workers } => {
            let grid = match grid.or(cfg.grid).unwrap_or(GridArg::All) {
                GridArg::Count => Grid::Count,
                GridArg::Census => Grid::Census,
                GridArg::Expansion => Grid::Expansion,
                GridArg::All => Grid::All,
            };
            let workers = single_worker(workers, cfg.workers)?;
            run_compare(grid, OracleOptions { max_nodes, workers })?
        }
        Command::Bench {
            sizes,
            extras,
            workers,
        } => {
            let n = extras.or(cfg.extras).unwrap_or(0);
            let cases: Vec<_> = pick_sizes(sizes).into_iter().map(|s| (s, n)).collect();
            let workers = if workers.is_empty() {
                cfg.workers
                    .map(WorkersValue::into_vec)
                    .unwrap_or_else(|| vec![1, 4])
            } else {
                workers
            };
            run_bench(&cases, &workers, max_nodes)?
        }
    };
    Ok((report, format))
}

struct Style {
    color: bool,
}

impl Style {
    fn detect() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Style {
            color: !no_color && io::stdout().is_terminal(),
        }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

fn print_text(out: &mut impl Write, report: &RunReport) -> io::Result<()> {
    let style = Style::detect();
    writeln!(out, "{}", style.paint("1", &report.command))?;
    for inst in &report.instances {
        writeln!(out, "{}", inst.id)?;
        for (route, value) in &inst.values {
            writeln!(out, "  {route:<14} {value}")?;
        }
        for v in report.verdicts.iter().filter(|v| v.instance == inst.id) {
            let tag = match v.outcome {
                Outcome::Pass => style.paint("32", "pass"),
                Outcome::Fail => style.paint("31", "FAIL"),
                Outcome::Skipped => style.paint("33", "skip"),
            };
            match &v.detail {
                Some(d) => writeln!(out, "  {tag} {} ({d})", v.check)?,
                None => writeln!(out, "  {tag} {}", v.check)?,
            }
        }
    }
    let failed = report.failures().count();
    let skipped = report
        .verdicts
        .iter()
        .filter(|v| v.outcome == Outcome::Skipped)
        .count();
    writeln!(
        out,
        "{} verdicts, {} failed, {} skipped",
        report.verdicts.len(),
        failed,
        skipped
    )
}

fn print_csv(out: impl Write, report: &RunReport) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sizes", "n", "formula", "oracle", "agree"])?;
    for row in report.csv_rows() {
        w.write_record([
            row.sizes,
            row.n,
            row.formula,
            row.oracle,
            row.agree.to_string(),
        ])?;
    }
    w.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, format) = match run(cli) {
        Ok(r) => r,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let written = match format {
        Format::Json => writeln!(out, "{}", report.to_json()),
        Format::Csv => print_csv(&mut out, &report),
        Format::Text => print_text(&mut out, &report),
    };
    if let Err(e) = written {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
