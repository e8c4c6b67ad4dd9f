use cgb_verify::scenarios::{self, Config, Scenario};
use cgb_verify::{list_scenarios, run_all};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cgb-verify",
    version,
    about = "Numerical certification of Chern–Gauss–Bonnet and Thom identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List scenarios with one-line descriptions.
    List {
        /// Only scenarios exercising this module.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Run scenarios (all of them when no names are given).
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    names: Vec<String>,
    /// Quadrature order overriding each scenario's default.
    #[arg(long)]
    quad_order: Option<usize>,
    /// Tolerance overriding each item's default.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Exit 0 if everything passes and 1 otherwise.
    #[arg(long)]
    check: bool,
    /// Only scenarios exercising this module.
    #[arg(long)]
    filter: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random test forms per identity.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Bundle rank for scenarios that take one.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, env = "CGB_VERIFY_JOBS", default_value_t = 1)]
    jobs: usize,
}

fn run(args: RunArgs) -> ExitCode {
    let mut list: Vec<Scenario> = Vec::new();
    if args.names.is_empty() {
        list = scenarios::registry();
    } else {
        for n in &args.names {
            match scenarios::find(n) {
                Some(s) => list.push(s),
                None => {
                    eprintln!("unknown scenario: {n}");
                    return ExitCode::from(2);
                }
            }
        }
    }
    if let Some(m) = &args.filter {
        list.retain(|s| s.exercises(m));
    }
    let cfg = Config {
        quad_order: args.quad_order,
        tol: args.tol,
        seed: args.seed,
        samples: args.samples,
        rank: args.rank,
    };
    let report = run_all(&list, &cfg, args.jobs);
    print!("{}", report.to_text());
    if let Some(path) = &args.json {
        if let Err(e) = report.write_json(path) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(4);
        }
    }
    if args.check {
        return ExitCode::from(if report.pass() { 0 } else { 1 });
    }
    if report.pass() {
        ExitCode::SUCCESS
    } else {
        for f in report.failures() {
            eprintln!("failed: {f}");
        }
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List { filter } => {
            let list = list_scenarios(filter.as_deref());
            let w = list.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
            for (name, desc) in list {
                println!("{name:<w$}  {desc}");
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => run(args),
    }
}
