use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use machmin::algo::Algo;
use machmin::config::AlgoConfig;
use machmin::engine::run_semi_online;
use machmin::harness::gen::{generate, Class, GenSpec};
use machmin::harness::render_gantt;
use machmin::harness::suite::{all_pass, run_suite, to_csv, to_json, Suite};
use machmin::model::text::{format_instance, format_schedule, parse_instance, parse_schedule};
use machmin::model::{verify_schedule, Instance};
use machmin::offline::{density_witness, optimal_schedule, optimum_machines};
use machmin::{build_policy, Rational};

#[derive(Parser)]
#[command(name = "machmin", version, about = "Online machine minimization with hard deadlines")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Offline optimum and density witness.
    Opt(OptArgs),
    /// Run an online algorithm and verify its schedule.
    Run(RunArgs),
    /// Run an experiment suite; exit code 0 iff every row passes.
    Suite(SuiteArgs),
    /// Render a schedule as SVG.
    Gantt(GanttArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    class: Class,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    horizon: i64,
    #[arg(long, default_value = "1/2", value_parser = parse_rat)]
    alpha: Rational,
    /// Best-effort optimum to aim for.
    #[arg(long)]
    target: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OptArgs {
    instance: PathBuf,
    /// Also write an optimal schedule.
    #[arg(long)]
    schedule: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    algo: Algo,
    /// The optimum handed to a semi-online policy.
    #[arg(long, conflicts_with = "auto", required_unless_present = "auto")]
    machines: Option<usize>,
    /// Compute the optimum offline and hand it to the policy.
    #[arg(long)]
    auto: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    instance: PathBuf,
    /// Write the schedule dump here.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Write an SVG chart here.
    #[arg(long)]
    gantt: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    config: PathBuf,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct GanttArgs {
    instance: PathBuf,
    schedule: PathBuf,
    #[arg(long, default_value_t = 0)]
    machines: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_rat(s: &str) -> Result<Rational, String> {
    machmin::config::parse_rational(s).ok_or_else(|| format!("not a rational: {s}"))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_gen(a: GenArgs) -> Result<ExitCode> {
    let spec = GenSpec { class: a.class, n: a.n, horizon: a.horizon, alpha: a.alpha, target: a.target, seed: a.seed };
    let inst = generate(&spec)?;
    emit(a.output.as_deref(), &format_instance(&inst))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_opt(a: OptArgs) -> Result<ExitCode> {
    let inst = load_instance(&a.instance)?;
    let m = optimum_machines(&inst);
    println!("m={m}");
    if let Some(w) = density_witness(&inst) {
        println!("{w}");
    }
    if let Some(path) = a.schedule {
        let sched = optimal_schedule(&inst, m)?;
        fs::write(&path, format_schedule(&sched)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(a: RunArgs) -> Result<ExitCode> {
    let inst = load_instance(&a.instance)?;
    let cfg = match &a.config {
        Some(p) => AlgoConfig::parse(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => AlgoConfig::default(),
    };
    let m_opt = optimum_machines(&inst);
    let m = match (a.machines, a.auto) {
        (Some(m), _) => m,
        (None, true) => m_opt,
        (None, false) => bail!("pass --machines or --auto"),
    };
    let mut policy = build_policy(a.algo, m.max(1), &cfg)?;
    let run = run_semi_online(&inst, &mut policy)?;
    let report = verify_schedule(&inst, &run.schedule, run.machines);
    println!("algorithm={}", a.algo);
    println!("policy={}", run.policy);
    println!("jobs={}", inst.len());
    println!("m_given={m}");
    println!("m_opt={m_opt}");
    println!("machines={}", run.machines);
    println!("peak={}", run.schedule.peak());
    println!("missed={}", run.missed.len());
    if !run.missed.is_empty() {
        let ids: Vec<String> = run.missed.iter().map(ToString::to_string).collect();
        println!("missed_jobs={}", ids.join(","));
    }
    println!("feasible={}", report.feasible());
    for (k, v) in &run.stats {
        println!("stat.{k}={v}");
    }
    for f in &run.failures {
        println!("failure: {f}");
    }
    for v in &report.violations {
        println!("violation: {} {:?} {}", v.kind.as_str(), v.subject, v.detail);
    }
    if let Some(path) = &a.dump {
        fs::write(path, format_schedule(&run.schedule)).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &a.gantt {
        let svg = render_gantt(&run.schedule, run.machines, Some(&run.labels), Some(&inst));
        fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if report.feasible() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_suite(a: SuiteArgs) -> Result<ExitCode> {
    let suite = Suite::parse(&read(&a.config)?).with_context(|| format!("parsing {}", a.config.display()))?;
    let rows = run_suite(&suite);
    emit(a.csv.as_deref(), &to_csv(&rows))?;
    if let Some(path) = &a.json {
        fs::write(path, to_json(&rows)).with_context(|| format!("writing {}", path.display()))?;
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    eprintln!("{passed}/{} rows pass", rows.len());
    Ok(if all_pass(&rows) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_gantt(a: GanttArgs) -> Result<ExitCode> {
    let inst = load_instance(&a.instance)?;
    let sched = parse_schedule(&read(&a.schedule)?).with_context(|| format!("parsing {}", a.schedule.display()))?;
    emit(a.output.as_deref(), &render_gantt(&sched, a.machines, None, Some(&inst)))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Opt(a) => cmd_opt(a),
        Cmd::Run(a) => cmd_run(a),
        Cmd::Suite(a) => cmd_suite(a),
        Cmd::Gantt(a) => cmd_gantt(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
