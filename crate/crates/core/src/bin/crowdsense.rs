use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crowdsense::aggregation::Aggregator;
use crowdsense::auction::{AuctionConfig, Mechanism, PricingMode};
use crowdsense::hardness::{self, Sat35Formula};
use crowdsense::io;
use crowdsense::model::{exact, social_welfare, Valuation};
use crowdsense::oracle::{self, Arithmetic};
use crowdsense::par::Execution;
use crowdsense::sim::{self, AccuracyScope, LabelMode, SettingSpec};
use crowdsense::{Error, Result};

#[derive(Parser)]
#[command(name = "crowdsense", version, about = "Crowdsensing double auctions and label aggregation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an auction on an instance file.
    Auction(AuctionArgs),
    /// Aggregate a label file.
    Aggregate(AggregateArgs),
    /// Run a seeded Monte-Carlo experiment and write a CSV summary.
    Experiment(ExperimentArgs),
    /// Solve the welfare program exhaustively.
    Oracle(OracleArgs),
    /// Build the reduced instance of a 3SAT(5) formula.
    Reduce(ReduceArgs),
    /// Check the satisfying-assignment solution of a reduced formula.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct AuctionArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "melon")]
    mechanism: Mechanism,
    /// Zero-seeded payment rule instead of critical values.
    #[arg(long)]
    strict_paper_pricing: bool,
    /// Also print the exact rational bid-welfare.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct AggregateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value = "weighted")]
    aggregator: Aggregator,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    /// Feasible-cover workers label every coverable task.
    Cover,
    /// Winners of the first listed mechanism label its won tasks.
    Winners,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value = "I")]
    setting: String,
    #[arg(long)]
    seed: u64,
    /// Repetitions per axis point.
    #[arg(long)]
    reps: Option<usize>,
    /// Use the full repetition count.
    #[arg(long, conflicts_with = "reps")]
    full: bool,
    /// Mechanisms, all by default.
    #[arg(long, value_delimiter = ',')]
    mechanism: Vec<Mechanism>,
    /// Aggregators, all by default.
    #[arg(long, value_delimiter = ',')]
    aggregator: Vec<Aggregator>,
    #[arg(long, value_enum, default_value = "cover")]
    scope: ScopeArg,
    /// Keep one instance per axis point and redraw labels only.
    #[arg(long)]
    labels_only: bool,
    #[arg(long)]
    strict_paper_pricing: bool,
    #[arg(long)]
    sequential: bool,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Compare welfares in exact rational arithmetic.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = oracle::DEFAULT_LIMIT)]
    limit: usize,
}

#[derive(Args)]
struct ReduceArgs {
    /// DIMACS CNF file.
    #[arg(long)]
    formula: PathBuf,
    /// Gap parameter in (0, 1], as `a/b` or a decimal.
    #[arg(long, default_value = "1/2")]
    epsilon: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    formula: PathBuf,
    #[arg(long, default_value = "1/2")]
    epsilon: String,
    /// Variable values as 0/1 digits; searched exhaustively when absent.
    #[arg(long)]
    assignment: Option<String>,
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn pricing(strict: bool) -> PricingMode {
    if strict {
        PricingMode::ZeroSeeded
    } else {
        PricingMode::Critical
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_formula(path: &PathBuf) -> Result<Sat35Formula> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Sat35Formula::parse_dimacs(&text)
}

fn auction(a: AuctionArgs) -> Result<()> {
    let inst = io::read_instance(&a.instance)?;
    let config = AuctionConfig {
        pricing: pricing(a.strict_paper_pricing),
        execution: execution(a.sequential),
    };
    let out = a.mechanism.run_with(&inst, &config);
    out.check_consistency()?;
    let welfare = social_welfare(&out, &inst, Valuation::Bids);
    print!("{}", io::format_outcome(&out, welfare));
    if a.exact {
        println!("welfare_exact {}", exact::social_welfare(&out, &inst, Valuation::Bids));
    }
    Ok(())
}

fn aggregate(a: AggregateArgs) -> Result<()> {
    let inst = io::read_instance(&a.instance)?;
    let text = std::fs::read_to_string(&a.labels).map_err(|e| Error::Io(format!("{}: {e}", a.labels.display())))?;
    let file = io::parse_labels(&text, &inst)?;
    let res = a
        .aggregator
        .aggregate(&file.labels, inst.reliability(), &file.winning_workers, &file.executed_tasks);
    print!("{}", io::format_aggregate(&res));
    Ok(())
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let mut spec = SettingSpec::by_name(&a.setting, a.seed)?;
    spec.reps = if a.full { sim::FULL_REPS } else { a.reps.unwrap_or(sim::DEFAULT_REPS) };
    let mechanisms = if a.mechanism.is_empty() { Mechanism::ALL.to_vec() } else { a.mechanism };
    let aggregators = if a.aggregator.is_empty() { Aggregator::ALL.to_vec() } else { a.aggregator };
    spec.scope = match a.scope {
        ScopeArg::Cover => AccuracyScope::FeasibleCover,
        ScopeArg::Winners => AccuracyScope::Winners(mechanisms[0]),
    };
    if a.labels_only {
        spec.label_mode = LabelMode::LabelsOnly;
    }
    let mode = pricing(a.strict_paper_pricing);
    let records = sim::run_experiment(&spec, &mechanisms, &aggregators, mode, execution(a.sequential))?;
    for r in &records {
        if let Some(m) = r.mechanisms.iter().find(|m| m.ir_violations > 0 || m.negative_welfare) {
            return Err(Error::Invariant(format!(
                "{} at {}={} rep {}: {} IR violations, welfare {}",
                m.mechanism.name(),
                spec.axis.name(),
                r.axis_value,
                r.rep,
                m.ir_violations,
                m.bid_welfare
            )));
        }
    }
    let rows = sim::summarize(&spec, &records);
    let meta = experiment_metadata(&spec, mode);
    match &a.out {
        Some(p) => io::emit_csv(p, &meta, &rows),
        None => io::write_summary_csv(std::io::stdout().lock(), &meta, &rows),
    }
}

fn experiment_metadata(spec: &SettingSpec, mode: PricingMode) -> Vec<(&'static str, String)> {
    vec![
        ("seed", spec.seed.to_string()),
        ("rng", sim::RNG_ID.to_string()),
        ("setting", spec.name.clone()),
        ("reps", spec.reps.to_string()),
        ("label_mode", format!("{:?}", spec.label_mode)),
        ("scope", format!("{:?}", spec.scope)),
        ("pricing", format!("{mode:?}")),
        ("version", concat!("crowdsense ", env!("CARGO_PKG_VERSION")).to_string()),
    ]
}

fn oracle_cmd(a: OracleArgs) -> Result<()> {
    let inst = io::read_instance(&a.instance)?;
    let arith = if a.exact { Arithmetic::Rational } else { Arithmetic::Float };
    let sol = oracle::solve_exact_with(&inst, a.limit, arith, Execution::Parallel)?;
    let list = |v: Vec<usize>| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    println!("workers {}", list(sol.workers()));
    println!("tasks {}", list(sol.tasks()));
    println!("welfare {}", sol.welfare);
    println!("enumerated {}", sol.enumerated);
    Ok(())
}

fn reduce_cmd(a: ReduceArgs) -> Result<()> {
    let formula = read_formula(&a.formula)?;
    let eps = hardness::parse_rational(&a.epsilon)?;
    let red = hardness::reduce(&formula, &eps)?;
    let text = format!(
        "# reduced from {} variables, {} clauses\n# epsilon={} X={} Y={} Z={}\n{}",
        formula.variables(),
        formula.clauses().len(),
        red.epsilon,
        red.x,
        red.y,
        red.z,
        io::write_instance(&red.instance)
    );
    emit(a.out.as_ref(), &text)
}

fn verify_cmd(a: VerifyArgs) -> Result<()> {
    let formula = read_formula(&a.formula)?;
    let eps = hardness::parse_rational(&a.epsilon)?;
    let assignment: Vec<bool> = match &a.assignment {
        Some(s) => s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Input(format!("assignment digit `{other}` is not 0 or 1"))),
            })
            .collect::<Result<_>>()?,
        None => formula
            .find_satisfying()?
            .ok_or_else(|| Error::Domain("formula is unsatisfiable".into()))?,
    };
    let red = hardness::reduce(&formula, &eps)?;
    let ok = hardness::verify_yes_instance(&red, &assignment)?;
    let x = red.yes_solution(&assignment)?;
    let report = hardness::check_observations(&red, &x)?;
    println!("X {}", red.x);
    println!("welfare {}", report.welfare);
    println!("yes_instance {ok}");
    println!("violations {}", report.violations(&red).len());
    if red.n_clauses() <= 7 {
        let (best, _) = hardness::pruned_optimum(&red)?;
        println!("pruned_optimum {best}");
        if best > red.x {
            return Err(Error::Invariant(format!("optimum {best} exceeds X")));
        }
    }
    if !ok {
        return Err(Error::Invariant("constructed solution does not reach X".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Auction(a) => auction(a),
        Command::Aggregate(a) => aggregate(a),
        Command::Experiment(a) => experiment(a),
        Command::Oracle(a) => oracle_cmd(a),
        Command::Reduce(a) => reduce_cmd(a),
        Command::Verify(a) => verify_cmd(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("crowdsense: {e}");
            ExitCode::from(if e.is_input() { 2 } else { 3 })
        }
    }
}
