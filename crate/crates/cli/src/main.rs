mod output;

use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pgm_hsp::metacyclic::MetacyclicSim;
use pgm_hsp::msum::{eta_statistics, MSumInstance, MSumSolver, Population, DEFAULT_ENUM_CAP, DEFAULT_POPULATION_CAP};
use pgm_hsp::pgm::{pgm_report, Caps};
use pgm_hsp::pipeline::{solve_hsp, CosetOracle, HiddenSpec, OracleFixture};
use pgm_hsp::states::DEFAULT_DIM_CAP;
use pgm_hsp::{Error, SemidirectGroup};

use output::{canonical_json, write_out};

#[derive(Parser)]
#[command(name = "pgm-hsp", version, about = "Pretty good measurement simulations for hidden subgroups of A x| Z_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one matrix sum instance read as JSON `{group, k, x, w}`.
    SolveMsum(SolveMsumArgs),
    /// Success probabilities, eta-tail bracket and optimality residuals of the PGM.
    PgmReport(PgmReportArgs),
    /// Histogram of eta over all (or sampled) instances, as CSV plus a JSON summary.
    EtaStats(EtaStatsArgs),
    /// Recover a hidden subgroup with the PGM, or run the stripped metacyclic algorithm.
    RunHsp(RunHspArgs),
}

#[derive(Args, Clone, Copy)]
struct CapArgs {
    /// Largest Hilbert space dimension built densely.
    #[arg(long, env = "PGM_HSP_DIM_CAP", default_value_t = DEFAULT_DIM_CAP, value_parser = parse_cap)]
    dim_cap: u128,
    /// Largest `p^k` enumerated by one brute-force solve.
    #[arg(long, env = "PGM_HSP_ENUM_CAP", default_value_t = DEFAULT_ENUM_CAP, value_parser = parse_cap)]
    enum_cap: u128,
    /// Largest instance population enumerated exhaustively.
    #[arg(long, env = "PGM_HSP_POP_CAP", default_value_t = DEFAULT_POPULATION_CAP, value_parser = parse_cap)]
    pop_cap: u128,
}

impl From<CapArgs> for Caps {
    fn from(c: CapArgs) -> Caps {
        Caps { dim: c.dim_cap, enumeration: c.enum_cap, population: c.pop_cap }
    }
}

/// Positive integer, optionally written as `1e7`.
fn parse_cap(s: &str) -> Result<u128, String> {
    let v = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let m: u128 = m.parse().map_err(|e| format!("{e}"))?;
            let e: u32 = e.parse().map_err(|e| format!("{e}"))?;
            10u128.checked_pow(e).and_then(|t| t.checked_mul(m)).ok_or("cap overflows")?
        }
        None => s.parse().map_err(|e| format!("{e}"))?,
    };
    if v == 0 {
        return Err("caps must be positive".into());
    }
    Ok(v)
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverChoice {
    Auto,
    BruteForce,
    MetacyclicDlog,
    HeisenbergClosedForm,
    Jordan,
}

#[derive(Args)]
struct SolveMsumArgs {
    /// Instance JSON file, `-` for stdin.
    #[arg(long, default_value = "-", conflicts_with = "instance")]
    input: PathBuf,
    /// Instance JSON given inline.
    #[arg(long)]
    instance: Option<String>,
    #[arg(long, value_enum, default_value_t = SolverChoice::Auto)]
    solver: SolverChoice,
    /// Re-check the solution set against brute force.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    caps: CapArgs,
}

#[derive(Args)]
struct PgmReportArgs {
    #[arg(long, value_parser = parse_group)]
    group: SemidirectGroup,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    caps: CapArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct EtaStatsArgs {
    #[arg(long, value_parser = parse_group)]
    group: SemidirectGroup,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    mode: Mode,
    /// Instances drawn in sampled mode.
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV histogram destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary destination; stderr when absent.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    caps: CapArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Pgm,
    Stripped,
}

#[derive(Args)]
struct RunHspArgs {
    #[arg(long, value_enum, default_value_t = Algo::Pgm)]
    algo: Algo,
    #[arg(long, value_parser = parse_group, required_unless_present = "fixture")]
    group: Option<SemidirectGroup>,
    /// Oracle fixture JSON `{group, hidden, labeling}`.
    #[arg(long, conflicts_with_all = ["group", "hidden"])]
    fixture: Option<PathBuf>,
    /// Hidden subgroup with `--group`: `trivial`, a JSON `{"d": ...}` or `{"generators": ...}`.
    #[arg(long)]
    hidden: Option<String>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Stripped algorithm only: aggregate every branch exactly instead of sampling.
    #[arg(long, conflicts_with = "transcript")]
    exact: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-trial transcript as JSON lines.
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[command(flatten)]
    caps: CapArgs,
}

fn parse_group(s: &str) -> Result<SemidirectGroup, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Lib(Error::CapExceeded { .. }) => 3,
            Failure::Lib(Error::Invariant(_) | Error::HypothesisFailed { .. }) => 4,
            Failure::Lib(_) => 2,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SolveMsum(a) => solve_msum(a),
        Command::PgmReport(a) => report(a),
        Command::EtaStats(a) => eta_stats(a),
        Command::RunHsp(a) => run_hsp(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Lib(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}

fn solve_msum(a: SolveMsumArgs) -> CmdResult {
    let json = match a.instance {
        Some(s) => s,
        None if a.input.as_os_str() == "-" => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
        None => fs::read_to_string(&a.input)?,
    };
    let inst = MSumInstance::from_json(&json)?;
    let solver = MSumSolver::new(&inst.group, a.caps.enum_cap);
    let (x, w) = (&inst.x, &inst.w);
    let solutions = match a.solver {
        SolverChoice::Auto => solver.auto(x, w)?.1,
        SolverChoice::BruteForce => solver.bruteforce(x, w)?,
        SolverChoice::MetacyclicDlog => solver.metacyclic(x, w)?,
        SolverChoice::HeisenbergClosedForm => solver.heisenberg(x, w)?,
        SolverChoice::Jordan => solver.jordan(x, w)?,
    };
    if a.verify {
        match solver.bruteforce(x, w) {
            Ok(brute) if brute == solutions => {}
            Ok(brute) => {
                return Err(Error::Invariant(format!(
                    "solver disagrees with brute force: {} vs {}",
                    solutions.to_json(),
                    brute.to_json()
                ))
                .into())
            }
            Err(Error::CapExceeded { .. }) => eprintln!("note: brute-force check skipped, instance over the cap"),
            Err(e) => return Err(e.into()),
        }
    }
    write_out(a.out.as_deref(), &(canonical_json(&solutions) + "\n"))?;
    Ok(())
}

fn report(a: PgmReportArgs) -> CmdResult {
    let r = pgm_report(&a.group, a.k, a.caps.into())?;
    write_out(a.out.as_deref(), &(canonical_json(&r) + "\n"))?;
    Ok(())
}

fn eta_stats(a: EtaStatsArgs) -> CmdResult {
    let mode = match (a.mode, a.seed) {
        (Mode::Exhaustive, _) => Population::Exhaustive,
        (Mode::Sampled, Some(seed)) => Population::Sampled { n: a.samples, seed },
        (Mode::Sampled, None) => return Err(Failure::Usage("--mode sampled needs --seed".into())),
    };
    let stats = eta_statistics(&a.group, a.k, mode, a.caps.pop_cap, a.caps.enum_cap)?;
    write_out(a.out.as_deref(), &stats.to_csv())?;
    let summary = canonical_json(&stats.summary_json()) + "\n";
    match a.summary {
        Some(path) => write_out(Some(&path), &summary)?,
        None => eprint!("{summary}"),
    }
    Ok(())
}

fn run_hsp(a: RunHspArgs) -> CmdResult {
    match a.algo {
        Algo::Pgm => run_pgm(a),
        Algo::Stripped => run_stripped(a),
    }
}

fn run_pgm(a: RunHspArgs) -> CmdResult {
    if a.exact {
        return Err(Failure::Usage("--exact applies to --algo stripped".into()));
    }
    let seed = a.seed.ok_or_else(|| Failure::Usage("--algo pgm samples outcomes and needs --seed".into()))?;
    let fixture = match (&a.fixture, a.group) {
        (Some(path), _) => OracleFixture::from_json(&fs::read_to_string(path)?)?,
        (None, Some(group)) => {
            let hidden = a.hidden.as_deref().ok_or_else(|| Failure::Usage("--group needs --hidden".into()))?;
            let hidden: HiddenSpec =
                serde_json::from_str(hidden).unwrap_or_else(|_| HiddenSpec::Trivial(hidden.to_string()));
            OracleFixture { group, hidden, labeling: "canonical-coset".into() }
        }
        (None, None) => return Err(Failure::Usage("--group or --fixture is required".into())),
    };
    let oracle = CosetOracle::from_fixture(&fixture)?;
    let solution = solve_hsp(&oracle, a.k, a.trials, seed, a.caps.into())?;
    if let Some(path) = &a.transcript {
        let lines: String =
            solution.run.iter().flat_map(|r| r.transcript.iter()).map(|rec| canonical_json(rec) + "\n").collect();
        write_out(Some(path), &lines)?;
    }
    let doc = serde_json::json!({ "result": solution.subgroup.to_string(), "solution": solution });
    write_out(a.out.as_deref(), &(canonical_json(&doc) + "\n"))?;
    Ok(())
}

fn run_stripped(a: RunHspArgs) -> CmdResult {
    let group = a.group.ok_or_else(|| Failure::Usage("--algo stripped needs --group".into()))?;
    let sim = MetacyclicSim::from_group(group)?;
    let summary = if a.exact {
        canonical_json(&sim.exact_aggregate()?)
    } else {
        let seed = a.seed.ok_or_else(|| Failure::Usage("sampled runs need --seed (or pass --exact)".into()))?;
        let trials = a.trials.unwrap_or(10_000);
        if let Some(path) = &a.transcript {
            let mut lines = String::new();
            for t in 0..trials {
                lines += &(canonical_json(&sim.trial(seed, t)?) + "\n");
            }
            write_out(Some(path), &lines)?;
        }
        canonical_json(&sim.estimate_success_rate(trials, seed)?)
    };
    write_out(a.out.as_deref(), &(summary + "\n"))?;
    Ok(())
}
