use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nevcert::harness::report::{exit_code, render, Format};
use nevcert::harness::scenario::{GridSpec, Problem, Scenario};
use nevcert::harness::selftest::{run_selftest, selftest_csv};
use nevcert::harness::theorem::Mode;
use nevcert::harness::AnyProblem;
use nevcert::nochka::compute_weights;
use nevcert::valfield::ValuedField;
use nevcert::wronskian::{find_wronskian, index_s, kappa0, rank_f};
use nevcert::{with_problem, Error};

#[derive(Parser)]
#[command(name = "nevcert", version, about = "Exact checks of second-main-theorem inequalities over non-Archimedean fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Radius grid "a:b:step" in log r, overriding the scenario.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    degree_bound: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario and certify the inequalities.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
        /// Treat undetermined certificates as failures.
        #[arg(long)]
        strict: bool,
    },
    /// Run the seeded property suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        cases: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nochka weights of the scenario's hypersurfaces.
    Nochka {
        #[command(flatten)]
        common: Common,
    },
    /// Wronskian certificate of the scenario's map.
    Wronskian {
        #[command(flatten)]
        common: Common,
    },
    /// Table of the Hilbert function of the scenario's variety.
    Hilbert {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        max_degree: u64,
    },
}

fn load(common: &Common) -> Result<AnyProblem, Error> {
    let path = &common.scenario;
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut sc = Scenario::from_json(&text)?;
    if let Some(g) = &common.grid {
        sc.grid = Some(GridSpec::Range(g.clone()));
    }
    if common.seed.is_some() {
        sc.seed = common.seed;
    }
    if common.degree_bound.is_some() {
        sc.degree_bound = common.degree_bound;
    }
    AnyProblem::build(&sc)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Serialize)]
struct WronskianReport<'a, C: Serialize> {
    hilbert: usize,
    rank_f: usize,
    index_s: nevcert::wronskian::IndexS,
    kappa0: u64,
    certificate: &'a C,
}

fn nochka_json<F: ValuedField>(pb: &Problem<F>) -> Result<String, Error> {
    let classes = pb.variety.classes(&pb.lifted()?, pb.d)?;
    let w = compute_weights(&pb.field, &classes, pb.n_sub, pb.n())?;
    w.verify()?;
    json(&w)
}

fn wronskian_json<F: ValuedField>(pb: &Problem<F>) -> Result<String, Error> {
    let v = &pb.variety;
    let h = v.hilbert_function(pb.d)?.value;
    let k = rank_f(&pb.map);
    let s = index_s(&pb.map, v, pb.d)?;
    let kappa = kappa0(h, k, s, pb.field.characteristic())?;
    let cert = find_wronskian(&pb.map, v, pb.d, kappa, pb.seed)?;
    json(&WronskianReport { hilbert: h, rank_f: k, index_s: s, kappa0: kappa, certificate: &cert })
}

fn hilbert_csv<F: ValuedField>(pb: &Problem<F>, max_degree: u64) -> Result<String, Error> {
    let mut out = String::from("d,H\n");
    for d in 1..=max_degree {
        out.push_str(&format!("{d},{}\n", pb.variety.hilbert_function(d)?.value));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Check { common, format, strict } => {
            let pb = load(&common)?;
            let format = match format {
                OutFormat::Csv => Format::Csv,
                OutFormat::Json => Format::Json,
            };
            let rendered = render(&pb, Mode::Both, format)?;
            emit(common.out.as_deref(), &rendered.text)?;
            Ok(exit_code(rendered.status, strict))
        }
        Command::Selftest { seed, cases, out } => {
            let results = run_selftest(seed, cases)?;
            emit(out.as_deref(), &selftest_csv(&results)?)?;
            Ok(if results.iter().all(|r| r.passed()) { 0 } else { 1 })
        }
        Command::Nochka { common } => {
            let pb = load(&common)?;
            let text = with_problem!(&pb, p => nochka_json(p))?;
            emit(common.out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Wronskian { common } => {
            let pb = load(&common)?;
            let text = with_problem!(&pb, p => wronskian_json(p))?;
            emit(common.out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Hilbert { common, max_degree } => {
            let pb = load(&common)?;
            let text = with_problem!(&pb, p => hilbert_csv(p, max_degree))?;
            emit(common.out.as_deref(), &text)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
