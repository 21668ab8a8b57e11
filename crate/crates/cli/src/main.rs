use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use selfish_bins::audit::{
    audit_vs_opt, poa_audit_checks, poa_weight_audit, render_checks, ss_audit_checks, ss_weights,
    GroupCounts,
};
use selfish_bins::bounds::{
    lambda_limit, lambda_r, lambda_t, poa_lower, poa_upper, table_csv, BoundInterval,
};
use selfish_bins::game::{
    best_response_dynamics, first_fit, first_fit_decreasing, first_improving_move,
    is_strong_nash_direct, is_strong_nash_via_ss, ss_pack, Policy, SsTrace, StrongNashVerdict,
};
use selfish_bins::generators::{
    gen_graham, gen_parametric_ss, gen_poa_lower, parse_bundle, render_bundle,
    verify_poa_construction, Mode, Recurrence, INSTANCE_FILE, MANIFEST_FILE, NE_FILE, OPT_FILE,
};
use selfish_bins::model::{parse_instance, serialize_instance, validate_packing, PackingDocument};
use selfish_bins::rational::{parse_rational, to_decimal, to_pq};
use selfish_bins::solver::opt_pack;
use selfish_bins::{Instance, Packing, Rational, FORMAT_VERSION};

const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Parser)]
#[command(
    name = "selfish-bins",
    about = "Exact tools for the bin packing game",
    disable_version_flag = true
)]
struct Cli {
    /// Print the interchange format version.
    #[arg(long, short = 'V')]
    version: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Pack an instance.
    Pack(PackArgs),
    /// Check a packing for (strong) equilibrium.
    Check(CheckArgs),
    /// Generate an instance family.
    Gen(GenArgs),
    /// Audit packings against the weighting arguments.
    Audit(AuditArgs),
    /// Print closed-form bounds.
    Bounds(BoundsArgs),
    /// Run best-response dynamics.
    Dynamics(DynamicsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Ss,
    Ff,
    Ffd,
    Opt,
}

#[derive(Args)]
struct PackArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long = "in")]
    input: PathBuf,
    /// Packing output; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SS trace output (ss only).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Node budget of the exact search (opt only).
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Ne,
    SneDirect,
    SneSs,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    kind: CheckKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    packing: PathBuf,
    /// Largest coalition tried by sne-direct; all items when omitted.
    #[arg(long)]
    max_coalition: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Graham,
    Param,
    Poa,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Number of item classes (graham, param).
    #[arg(long)]
    r: Option<u32>,
    /// Copies per class (graham, param) or the construction size (poa).
    #[arg(long, visible_alias = "N")]
    n: Option<u64>,
    #[arg(long)]
    t: Option<u32>,
    /// Number of phases (poa).
    #[arg(long)]
    s: Option<u32>,
    #[arg(long, default_value = "exact")]
    mode: Mode,
    #[arg(long, default_value = "printed")]
    recurrence: Recurrence,
    /// Directory for the output files; graham and param print the instance
    /// to standard output when omitted.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AuditKind {
    Ss,
    Poa,
    Construction,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long, value_enum)]
    kind: AuditKind,
    /// Instance file (ss, poa).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// SS trace (ss); recomputed when omitted.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// NE packing (poa).
    #[arg(long)]
    packing: Option<PathBuf>,
    /// Optimal packing; solved exactly when omitted.
    #[arg(long)]
    opt: Option<PathBuf>,
    /// Size class for the parametric rule (ss) or the group thresholds (poa).
    #[arg(long)]
    t: Option<u32>,
    /// Bundle directory (construction).
    #[arg(long)]
    bundle: Option<PathBuf>,
    /// Report output; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Group counts as CSV (poa).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
#[command(group(ArgGroup::new("what").required(true).args(["table", "lambda", "lambda_limit", "lambda_t", "poa"])))]
struct BoundsArgs {
    /// The results table as CSV.
    #[arg(long)]
    table: bool,
    /// Optimum of the program with R items.
    #[arg(long, value_name = "R")]
    lambda: Option<u32>,
    /// Certified interval around the limit of the plain series.
    #[arg(long)]
    lambda_limit: bool,
    /// Certified interval around the parametric limit for size class T.
    #[arg(long, value_name = "T")]
    lambda_t: Option<u32>,
    /// Price-of-anarchy interval for size class T.
    #[arg(long, value_name = "T")]
    poa: Option<u32>,
    /// Interval width for the series.
    #[arg(long, default_value = "1/1000000000000", value_parser = parse_rational)]
    tol: Rational,
    /// Number of terms in the lower price-of-anarchy sum.
    #[arg(long, default_value_t = 50)]
    terms: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Start {
    Singletons,
    Ff,
    Given,
}

#[derive(Args)]
struct DynamicsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "singletons")]
    start: Start,
    /// Starting packing for `--start given`.
    #[arg(long)]
    packing: Option<PathBuf>,
    #[arg(long, default_value = "first")]
    policy: Policy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Move log output.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Final packing output; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Status {
    Ok,
    CheckFailed,
    /// A search ran out of budget before reaching a verdict.
    Budget,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> anyhow::Result<Arc<Instance>> {
    let text = read(path)?;
    Ok(Arc::new(
        parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?,
    ))
}

/// A packing that must be a valid partition of `instance`.
fn load_packing(path: &Path, instance: &Arc<Instance>) -> anyhow::Result<Packing> {
    let doc = PackingDocument::parse(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    let packing = doc.to_packing(Arc::clone(instance));
    let report = validate_packing(&packing);
    if let Some(v) = report.violations.first() {
        return Err(selfish_bins::Error::Mismatch(format!("{}: {v}", path.display())).into());
    }
    Ok(packing)
}

fn required<T>(value: Option<T>, flag: &str) -> anyhow::Result<T> {
    value.ok_or_else(|| anyhow!("{flag} is required here"))
}

fn pack(args: PackArgs) -> anyhow::Result<Status> {
    let instance = load_instance(&args.input)?;
    if args.trace.is_some() && !matches!(args.algo, Algo::Ss) {
        bail!("--trace only applies to --algo ss");
    }
    let packing = match args.algo {
        Algo::Ss => {
            let (packing, trace) = ss_pack(&instance);
            if let Some(path) = &args.trace {
                write_out(Some(path), &trace.render())?;
            }
            packing
        }
        Algo::Ff => first_fit(&instance),
        Algo::Ffd => first_fit_decreasing(&instance),
        Algo::Opt => opt_pack(&instance, args.budget)?,
    };
    write_out(
        args.out.as_deref(),
        &PackingDocument::from_packing(&packing).render(),
    )?;
    eprintln!("{} items in {} bins", instance.len(), packing.bin_count());
    Ok(Status::Ok)
}

fn check(args: CheckArgs) -> anyhow::Result<Status> {
    let instance = load_instance(&args.input)?;
    let packing = load_packing(&args.packing, &instance)?;
    let witness = match args.kind {
        CheckKind::Ne => first_improving_move(&packing).map(|m| format!("improving move: {m}")),
        CheckKind::SneDirect => {
            let cap = args.max_coalition.unwrap_or(instance.len());
            match is_strong_nash_direct(&packing, cap, args.budget) {
                StrongNashVerdict::Stable => None,
                StrongNashVerdict::Unstable(d) => Some(format!("deviating coalition: {d}")),
                StrongNashVerdict::Inconclusive {
                    max_coalition,
                    nodes,
                } => {
                    eprintln!(
                        "search stopped after {nodes} nodes at coalition cap {max_coalition}"
                    );
                    return Ok(Status::Budget);
                }
            }
        }
        CheckKind::SneSs => (!is_strong_nash_via_ss(&packing))
            .then(|| "bins differ from a subset-sum packing".to_string()),
    };
    match witness {
        None => {
            println!("pass");
            Ok(Status::Ok)
        }
        Some(w) => {
            println!("fail: {w}");
            Ok(Status::CheckFailed)
        }
    }
}

fn gen(args: GenArgs) -> anyhow::Result<Status> {
    let n = required(args.n, "--n")?;
    match args.family {
        Family::Graham | Family::Param => {
            let r = required(args.r, "--r")?;
            let n = u32::try_from(n).context("--n is too large")?;
            let instance = match args.family {
                Family::Graham => gen_graham(r, n)?,
                _ => gen_parametric_ss(required(args.t, "--t")?, r, n)?,
            };
            let text = serialize_instance(&instance);
            match &args.out_dir {
                Some(dir) => {
                    fs::create_dir_all(dir)
                        .with_context(|| format!("creating {}", dir.display()))?;
                    write_out(Some(&dir.join(INSTANCE_FILE)), &text)?;
                }
                None => write_out(None, &text)?,
            }
            eprintln!("{} items", instance.len());
        }
        Family::Poa => {
            let t = required(args.t, "--t")?;
            let s = required(args.s, "--s")?;
            let dir = required(args.out_dir, "--out-dir")?;
            let bundle = gen_poa_lower(t, s, n, args.mode, args.recurrence)?;
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, text) in render_bundle(&bundle) {
                write_out(Some(&dir.join(name)), &text)?;
            }
            for note in &bundle.notes {
                eprintln!("note: {note}");
            }
            eprintln!(
                "{} items, {} optimal bins, {} equilibrium bins",
                bundle.instance.len(),
                bundle.opt.bin_count(),
                bundle.ne.bin_count()
            );
        }
    }
    Ok(Status::Ok)
}

fn optimal(path: Option<&Path>, instance: &Arc<Instance>, budget: u64) -> anyhow::Result<Packing> {
    match path {
        Some(p) => load_packing(p, instance),
        None => Ok(opt_pack(instance, budget)?),
    }
}

fn verdict(passed: bool) -> Status {
    if passed {
        Status::Ok
    } else {
        Status::CheckFailed
    }
}

fn audit(args: AuditArgs) -> anyhow::Result<Status> {
    let (report, passed) = match args.kind {
        AuditKind::Ss => {
            let instance = load_instance(&required(args.input, "--in")?)?;
            let trace = match &args.trace {
                Some(p) => {
                    SsTrace::parse(&read(p)?).with_context(|| format!("parsing {}", p.display()))?
                }
                None => ss_pack(&instance).1,
            };
            let opt = optimal(args.opt.as_deref(), &instance, args.budget)?;
            let assignment = ss_weights(&instance, &trace, args.t)?;
            let checks = ss_audit_checks(&audit_vs_opt(&assignment, &opt)?);
            let passed = checks.iter().all(|c| c.passed);
            (render_checks("ss", &checks), passed)
        }
        AuditKind::Poa => {
            let input = required(args.input, "--in")?;
            let instance = load_instance(&input)?;
            let ne = load_packing(&required(args.packing, "--packing")?, &instance)?;
            let opt = optimal(args.opt.as_deref(), &instance, args.budget)?;
            let t = args.t.unwrap_or_else(|| instance.size_class());
            let checks = poa_audit_checks(&ne, &opt, t);
            if let Some(csv) = &args.csv {
                let counts = poa_weight_audit(&ne, &opt, t).map(|r| r.counts)?;
                let name = input
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                write_out(
                    Some(csv),
                    &format!(
                        "{}\n{}\n",
                        GroupCounts::CSV_HEADER,
                        counts.csv_row(&name, t)
                    ),
                )?;
            }
            let passed = checks.iter().all(|c| c.passed);
            (render_checks("poa", &checks), passed)
        }
        AuditKind::Construction => {
            let dir = required(args.bundle, "--bundle")?;
            let file = |name: &str| read(&dir.join(name));
            let bundle = parse_bundle(
                &file(INSTANCE_FILE)?,
                &file(OPT_FILE)?,
                &file(NE_FILE)?,
                &file(MANIFEST_FILE)?,
            )?;
            for note in &bundle.notes {
                eprintln!("note: {note}");
            }
            let report = verify_poa_construction(&bundle);
            (report.render(), report.passed())
        }
    };
    write_out(args.out.as_deref(), &report)?;
    eprintln!("audit {}", if passed { "passed" } else { "failed" });
    Ok(verdict(passed))
}

fn interval_lines(name: &str, interval: &BoundInterval) -> String {
    format!(
        "{name} lower {} {}\n{name} upper {} {}\n",
        to_pq(&interval.lower),
        to_decimal(&interval.lower, 6),
        to_pq(&interval.upper),
        to_decimal(&interval.upper, 6)
    )
}

fn bounds(args: BoundsArgs) -> anyhow::Result<Status> {
    let text = if args.table {
        table_csv()
    } else if let Some(r) = args.lambda {
        let value = lambda_r(r)?;
        format!("lambda_{r} {} {}\n", to_pq(&value), to_decimal(&value, 6))
    } else if args.lambda_limit {
        interval_lines("lambda", &lambda_limit(&args.tol)?)
    } else if let Some(t) = args.lambda_t {
        interval_lines(&format!("lambda^{t}"), &lambda_t(t, &args.tol)?)
    } else if let Some(t) = args.poa {
        let lower = poa_lower(t, args.terms)?;
        let upper = poa_upper(t)?;
        format!(
            "poa_{t} lower {} {}\npoa_{t} upper {} {}\n",
            to_pq(&lower),
            to_decimal(&lower, 6),
            to_pq(&upper),
            to_decimal(&upper, 6)
        )
    } else {
        unreachable!("clap requires one of the options")
    };
    print!("{text}");
    Ok(Status::Ok)
}

fn dynamics(args: DynamicsArgs) -> anyhow::Result<Status> {
    let instance = load_instance(&args.input)?;
    let start = match args.start {
        Start::Singletons => Packing::singletons(Arc::clone(&instance)),
        Start::Ff => first_fit(&instance),
        Start::Given => load_packing(&required(args.packing, "--packing")?, &instance)?,
    };
    let run = best_response_dynamics(&start, args.policy, args.seed);
    if let Some(path) = &args.log {
        write_out(Some(path), &run.render_log())?;
    }
    write_out(
        args.out.as_deref(),
        &PackingDocument::from_packing(&run.packing).render(),
    )?;
    eprintln!("{} bins after {} steps", run.packing.bin_count(), run.steps);
    Ok(Status::Ok)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<selfish_bins::Error>() {
        Some(selfish_bins::Error::BudgetExceeded { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.version {
        println!(
            "selfish-bins {} (format {FORMAT_VERSION})",
            env!("CARGO_PKG_VERSION")
        );
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("no subcommand given; see --help");
        return ExitCode::from(2);
    };
    let result = match command {
        Command::Pack(a) => pack(a),
        Command::Check(a) => check(a),
        Command::Gen(a) => gen(a),
        Command::Audit(a) => audit(a),
        Command::Bounds(a) => bounds(a),
        Command::Dynamics(a) => dynamics(a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Ok(Status::Budget) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
