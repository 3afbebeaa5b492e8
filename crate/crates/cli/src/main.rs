mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thermwit::systems::Graph;
use thermwit::verify::{self, VerifyOptions};

use crate::config::{
    parse_grid, DickeSection, DimerSection, FileConfig, GraphSection, GridSpec, RunSettings,
    ToySection,
};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    CrossCheck(String),
    VerifyFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::CrossCheck(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::CrossCheck(m) => write!(f, "cross-check mismatch: {m}"),
            CliError::VerifyFailed(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

impl From<thermwit::Error> for CliError {
    fn from(e: thermwit::Error) -> Self {
        use thermwit::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::BadGraph(_)
            | E::Parse { .. }
            | E::GraphTooLarge { .. }
            | E::BadExcitationCount { .. }
            | E::SeparableCase { .. }
            | E::OddN(_)
            | E::AlphaZero
            | E::AlphaOutOfRange(_)
            | E::RatioOutOfRange(_)
            | E::NegativeEntanglement(_)
            | E::NonpositiveEntanglement(_)
            | E::BadPartition(_)
            | E::EmptyGrid
            | E::DimensionTooLarge { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "thermwit", version, about = "Entanglement witnesses for thermal states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two-spin Heisenberg dimer in a field.
    Dimer(DimerArgs),
    /// Ground level plus a power-law excited band.
    Toy(ToyArgs),
    /// Half-filled (or general) Dicke ground state over a power-law band.
    Dicke(DickeArgs),
    /// Stabilizer Hamiltonian of a graph read from an edge list.
    Graph(GraphArgs),
    /// Run the built-in property checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Temperature grid lo:hi:count:log|lin (in units of T).
    #[arg(long, value_name = "SPEC")]
    grid: Option<String>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Boltzmann constant; energies are compared with kB·T.
    #[arg(long = "kB", value_name = "X")]
    kb: Option<f64>,
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Add exact entanglement oracles (concurrence, partial transpose, ALS).
    #[arg(long)]
    oracles: bool,
    /// Compare analytic spectra with explicit diagonalization.
    #[arg(long = "matrix-check")]
    matrix_check: bool,
    /// Print the merged configuration as TOML and exit.
    #[arg(long = "print-config")]
    print_config: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct DimerArgs {
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long = "J")]
    j: Option<f64>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct ToyArgs {
    #[arg(long = "E0")]
    e0: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "D")]
    d: Option<u64>,
    /// Relative entropy of entanglement of the ground state, in bits.
    #[arg(long = "eR")]
    e_r: Option<f64>,
    /// Take the ground state to be the half-filled Dicke state on n sites.
    #[arg(long)]
    n: Option<u64>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct DickeArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long = "E0")]
    e0: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "D")]
    d: Option<u64>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct GraphArgs {
    #[arg(long, value_name = "PATH")]
    edges: Option<PathBuf>,
    #[arg(long = "B")]
    b: Option<f64>,
    /// Ground-state relative entropy per site, in bits.
    #[arg(long = "eR-per-site")]
    e_r_per_site: Option<f64>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Scale the closed-form Dicke robustness (fault injection for testing the suite).
    #[arg(long = "dicke-scale", hide = true, default_value_t = 1.0)]
    dicke_scale: f64,
}

const DEFAULT_SEED: u64 = 7;

fn load(path: Option<&PathBuf>) -> Result<FileConfig, CliError> {
    path.map_or(Ok(FileConfig::default()), |p| FileConfig::load(p))
}

fn settings(args: &RunArgs, file: &FileConfig, default_grid: &str) -> Result<RunSettings, CliError> {
    let section = file.run();
    let grid: GridSpec = parse_grid(
        args.grid
            .as_deref()
            .or(section.grid.as_deref())
            .unwrap_or(default_grid),
    )?;
    let kb = args.kb.or(section.kb).unwrap_or(1.0);
    if !(kb > 0.0 && kb.is_finite()) {
        return Err(CliError::Config(format!("kB={kb} must be positive and finite")));
    }
    Ok(RunSettings {
        grid,
        seed: args.seed.or(section.seed).unwrap_or(DEFAULT_SEED),
        kb,
        out: args.out.clone().or(section.out),
        oracles: args.oracles || section.oracles.unwrap_or(false),
        matrix_check: args.matrix_check || section.matrix_check.unwrap_or(false),
    })
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(effective: FileConfig, run: &RunSettings, print_config: bool, report: impl FnOnce() -> Result<output::Report, CliError>) -> Result<(), CliError> {
    if print_config {
        print!("{}", effective.to_toml());
        return Ok(());
    }
    emit(&report()?.render(), run.out.as_ref())
}

fn run_dimer(a: DimerArgs) -> Result<(), CliError> {
    let file = load(a.run.config.as_ref())?;
    let sec = file.dimer.clone().unwrap_or_default();
    let run = settings(&a.run, &file, "0.1:10:100:lin")?;
    let b = a.b.or(sec.b).unwrap_or(0.0);
    let j = a.j.or(sec.j).unwrap_or(1.0);
    let effective = FileConfig {
        run: Some(run.to_section()),
        dimer: Some(DimerSection { b: Some(b), j: Some(j) }),
        ..FileConfig::default()
    };
    finish(effective, &run, a.run.print_config, || commands::dimer(b, j, &run))
}

fn run_toy(a: ToyArgs) -> Result<(), CliError> {
    let file = load(a.run.config.as_ref())?;
    let sec = file.toy.clone().unwrap_or_default();
    let run = settings(&a.run, &file, "0.01:100:120:log")?;
    let e0 = a.e0.or(sec.e0).unwrap_or(0.0);
    let delta = a.delta.or(sec.delta).unwrap_or(1.0);
    let alpha = a.alpha.or(sec.alpha).unwrap_or(0.0);
    let levels = a.d.or(sec.d).unwrap_or(4);
    let e_r_in = a.e_r.or(sec.e_r);
    let n = a.n.or(sec.n);
    let (e_r, bound, dicke_n) = match (e_r_in, n) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config("give either eR or n, not both".into()));
        }
        (Some(e_r), None) => {
            if !(e_r > 0.0 && e_r.is_finite()) {
                return Err(CliError::Config(format!("eR={e_r} must be positive")));
            }
            let bound = thermwit::entanglement::RobustnessBound::lower_bound(
                e_r.exp2(),
                thermwit::entanglement::BoundSource::RelativeEntropyInput,
            )?;
            (e_r, bound, None)
        }
        (None, Some(n)) => {
            let (e_r, bound) = commands::half_dicke_bound(n)?;
            (e_r, bound, Some(n))
        }
        (None, None) => return Err(CliError::Config("toy needs eR or n".into())),
    };
    let effective = FileConfig {
        run: Some(run.to_section()),
        toy: Some(ToySection {
            e0: Some(e0),
            delta: Some(delta),
            alpha: Some(alpha),
            d: Some(levels),
            e_r: e_r_in,
            n,
        }),
        ..FileConfig::default()
    };
    let input = commands::ToyInput {
        e0,
        delta,
        alpha,
        levels,
        e_r,
        bound,
        dicke_n,
    };
    finish(effective, &run, a.run.print_config, || commands::toy(&input, &run))
}

fn run_dicke(a: DickeArgs) -> Result<(), CliError> {
    let file = load(a.run.config.as_ref())?;
    let sec = file.dicke.clone().unwrap_or_default();
    let run = settings(&a.run, &file, "0.01:100:120:log")?;
    let n = a.n.or(sec.n).ok_or_else(|| CliError::Config("dicke needs n".into()))?;
    let k = a.k.or(sec.k).unwrap_or(n / 2);
    let levels = match a.d.or(sec.d) {
        Some(d) => d,
        None if n <= 20 => 1 << n,
        None => return Err(CliError::Config(format!("n={n} > 20: give D explicitly"))),
    };
    let input = commands::DickeInput {
        n,
        k,
        e0: a.e0.or(sec.e0).unwrap_or(0.0),
        delta: a.delta.or(sec.delta).unwrap_or(1.0),
        alpha: a.alpha.or(sec.alpha).unwrap_or(0.0),
        levels,
    };
    let effective = FileConfig {
        run: Some(run.to_section()),
        dicke: Some(DickeSection {
            n: Some(n),
            k: Some(k),
            e0: Some(input.e0),
            delta: Some(input.delta),
            alpha: Some(input.alpha),
            d: Some(levels),
        }),
        ..FileConfig::default()
    };
    finish(effective, &run, a.run.print_config, || commands::dicke(&input, &run))
}

fn run_graph(a: GraphArgs) -> Result<(), CliError> {
    let file = load(a.run.config.as_ref())?;
    let sec = file.graph.clone().unwrap_or_default();
    let run = settings(&a.run, &file, "0.1:10:100:lin")?;
    let edges = a
        .edges
        .or(sec.edges)
        .ok_or_else(|| CliError::Config("graph needs an edge-list file (--edges)".into()))?;
    let b = a.b.or(sec.b).unwrap_or(1.0);
    let e_r_per_site = a.e_r_per_site.or(sec.e_r_per_site).unwrap_or(0.5);
    let effective = FileConfig {
        run: Some(run.to_section()),
        graph: Some(GraphSection {
            edges: Some(edges.clone()),
            b: Some(b),
            e_r_per_site: Some(e_r_per_site),
        }),
        ..FileConfig::default()
    };
    finish(effective, &run, a.run.print_config, || {
        let text = std::fs::read_to_string(&edges)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", edges.display())))?;
        let g = Graph::parse_edge_list(&text)?;
        commands::graph(&g, b, e_r_per_site, &run)
    })
}

fn run_verify(a: VerifyArgs) -> Result<(), CliError> {
    let file = load(a.config.as_ref())?;
    let section = file.run();
    let opts = VerifyOptions {
        seed: a.seed.or(section.seed).unwrap_or(DEFAULT_SEED),
        dicke_scale: a.dicke_scale,
    };
    let report = verify::run(&opts);
    emit(&report.to_string(), a.out.as_ref().or(section.out.as_ref()))?;
    match report.failures().count() {
        0 => Ok(()),
        n => Err(CliError::VerifyFailed(n)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dimer(a) => run_dimer(a),
        Command::Toy(a) => run_toy(a),
        Command::Dicke(a) => run_dicke(a),
        Command::Graph(a) => run_graph(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("thermwit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
