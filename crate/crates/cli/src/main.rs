//! `hiveflow`: decide, count and render Littlewood-Richardson instances.
//!
//! Exit codes: 0 positive / success, 1 not positive (or a failed check), 2 invalid input,
//! 3 enumeration cap exceeded.

mod flowfile;
mod render;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hiveflow::enumerate::{count_p, DEFAULT_LIMIT};
use hiveflow::{checks, decide, lr_count, lr_positive, verify_certificate, Algorithm, Capacities, Error, Instance, Report};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "hiveflow", version, about = "Littlewood-Richardson positivity through hive flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Triple {
    /// Comma-separated weakly decreasing parts, e.g. 3,2,1
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    lambda: String,
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    mu: String,
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    nu: String,
}

impl Triple {
    fn instance(&self) -> Result<Instance, Failure> {
        Instance::parse(&self.lambda, &self.mu, &self.nu).map_err(Failure::invalid)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Plain,
    Scaling,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Tikz,
}

#[derive(Subcommand)]
enum Command {
    /// Decide positivity; prints the verdict and a maximal flow as JSON.
    Decide {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, value_enum, default_value = "scaling")]
        algorithm: AlgorithmArg,
        /// Check a flow file against the instance instead of solving.
        #[arg(long)]
        flow: Option<PathBuf>,
        /// Also compare the verdict with the tableau oracle.
        #[arg(long)]
        verify: bool,
    },
    /// Count the integral hives with the given boundary.
    Count {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        /// Cross-check against the tableau oracle.
        #[arg(long)]
        verify: bool,
    },
    /// Draw a solved instance or a flow file with its flatspaces.
    Render {
        #[command(flatten)]
        triple: Triple,
        #[arg(long)]
        flow: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "tikz")]
        format: Format,
    },
    /// Count LR tableaux directly.
    Oracle {
        #[command(flatten)]
        triple: Triple,
    },
    /// Run the invariant suites.
    Selftest {
        #[arg(long, env = "HIVEFLOW_SEED", default_value_t = 0)]
        seed: u64,
        /// Use the acceptance sizes instead of the quick ones.
        #[arg(long)]
        full: bool,
    },
}

/// A diagnostic for stderr and the exit code that goes with it.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Self {
        Failure { code: 2, message: e.to_string() }
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

#[derive(Serialize)]
struct DecideOutput {
    positive: bool,
    n: usize,
    target: i64,
    throughput: i64,
    augmentations: Vec<usize>,
    bfs_calls: usize,
    algorithm: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<bool>,
    flow: flowfile::FlowMap,
}

#[derive(Serialize)]
struct CheckOutput {
    valid: bool,
    positive: bool,
    n: usize,
    target: i64,
    throughput: i64,
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Failure::internal)?;
    println!("{text}");
    Ok(())
}

fn solve(inst: &Instance, algorithm: Algorithm) -> Result<Report, Failure> {
    decide::<i64>(inst, algorithm).map_err(|e| match e {
        Error::Overflow { .. } => Failure::invalid(e),
        e => Failure::internal(e),
    })
}

fn cmd_decide(triple: &Triple, algorithm: AlgorithmArg, flow: Option<&PathBuf>, verify: bool) -> Result<u8, Failure> {
    let inst = triple.instance()?;
    if let Some(path) = flow {
        let f = flowfile::read(path, Some(inst.n()))?;
        let caps = Capacities::new(f.grid(), &inst).map_err(Failure::invalid)?;
        let throughput = f.overall_throughput().map_err(Failure::invalid)?;
        let target = caps.target();
        let report = Report {
            positive: throughput == target,
            throughput,
            target,
            final_flow: f,
            phases: Vec::new(),
            bfs_calls: 0,
            algorithm: Algorithm::Scaling,
        };
        let valid = verify_certificate(&report, &caps);
        print_json(&CheckOutput { valid, positive: valid && report.positive, n: inst.n(), target, throughput })?;
        return Ok(if valid && report.positive { 0 } else { 1 });
    }
    let algorithm = match algorithm {
        AlgorithmArg::Plain => Algorithm::Plain,
        AlgorithmArg::Scaling => Algorithm::Scaling,
    };
    let r = solve(&inst, algorithm)?;
    let oracle = verify.then(|| lr_positive(&inst.lambda, &inst.mu, &inst.nu));
    print_json(&DecideOutput {
        positive: r.positive,
        n: inst.n(),
        target: r.target,
        throughput: r.throughput,
        augmentations: r.augmentations_per_phase(),
        bfs_calls: r.bfs_calls,
        algorithm: r.algorithm.name(),
        oracle,
        flow: flowfile::to_map(&r.final_flow),
    })?;
    if oracle.is_some_and(|o| o != r.positive) {
        return Err(Failure::internal("verdict disagrees with the tableau oracle"));
    }
    Ok(if r.positive { 0 } else { 1 })
}

#[derive(Serialize)]
#[serde(untagged)]
enum CountValue {
    Exact(usize),
    Status(&'static str),
}

#[derive(Serialize)]
struct CountOutput {
    count: CountValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    limit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<u64>,
}

fn cmd_count(triple: &Triple, limit: usize, verify: bool) -> Result<u8, Failure> {
    let inst = triple.instance()?;
    match count_p(&inst, limit) {
        Ok(c) => {
            let oracle = verify.then(|| lr_count(&inst.lambda, &inst.mu, &inst.nu));
            print_json(&CountOutput { count: CountValue::Exact(c), limit: None, oracle })?;
            if oracle.is_some_and(|o| o != c as u64) {
                return Err(Failure::internal("hive count disagrees with the tableau oracle"));
            }
            Ok(if c > 0 { 0 } else { 1 })
        }
        Err(Error::CapExceeded(limit)) => {
            print_json(&CountOutput { count: CountValue::Status("cap_exceeded"), limit: Some(limit), oracle: None })?;
            Ok(3)
        }
        Err(e) => Err(Failure::invalid(e)),
    }
}

fn cmd_render(triple: &Triple, flow: Option<&PathBuf>, format: Format) -> Result<u8, Failure> {
    let f = match flow {
        Some(path) => {
            let n = if triple.nu.is_empty() && triple.lambda.is_empty() && triple.mu.is_empty() {
                None
            } else {
                Some(triple.instance()?.n())
            };
            flowfile::read(path, n)?
        }
        None => solve(&triple.instance()?, Algorithm::Scaling)?.final_flow,
    };
    let doc = match format {
        Format::Dot => render::dot(&f),
        Format::Tikz => render::tikz(&f),
    };
    print!("{doc}");
    Ok(0)
}

#[derive(Serialize)]
struct OracleOutput {
    count: u64,
    positive: bool,
}

fn cmd_oracle(triple: &Triple) -> Result<u8, Failure> {
    let inst = triple.instance()?;
    let count = lr_count(&inst.lambda, &inst.mu, &inst.nu);
    print_json(&OracleOutput { count, positive: count > 0 })?;
    Ok(if count > 0 { 0 } else { 1 })
}

fn cmd_selftest(seed: u64, full: bool) -> Result<u8, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (pos_part, count_part, steps, per_n, triples) = if full { (4, 3, 10_000, 1000, 1000) } else { (3, 2, 1000, 100, 100) };
    eprintln!("seed {seed}");
    let exhaustive = checks::small_instances(3, pos_part);
    let counted = checks::small_instances(3, count_part);
    let (counting, counts) = checks::counting_oracle(&counted);
    let runs = checks::phase_counts(&exhaustive);
    let outcomes = vec![
        checks::positivity_oracle(&exhaustive),
        checks::plain_scaling_agreement(&exhaustive),
        counting,
        checks::worked_example(Duration::from_secs(1)),
        checks::phase_bound(&runs),
        checks::total_bound_corrected(&runs),
        checks::shortest_path_theorem(&mut rng, steps, 8),
        checks::connectedness(&counts),
        checks::fulton(&counts, &[2, 3]),
        checks::saturation(&mut rng, triples, &[2, 3, 4]),
        checks::hexagon_suite(&mut rng, per_n, &[2, 3, 4, 5]),
        checks::antipodal_suite(&mut rng, per_n, &[2, 3, 4, 5]),
        checks::ktt(&Instance::parse("2,1,0", "2,1,0", "3,2,1").expect("valid"), 4),
    ];
    for o in &outcomes {
        println!("{o}");
    }
    if full {
        let t = checks::timing(&mut rng, 100, 1_000_000, 1, Duration::from_secs(10));
        println!("{t}");
        if !t.passed() {
            return Ok(1);
        }
    }
    Ok(if outcomes.iter().all(|o| o.passed()) { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Decide { triple, algorithm, flow, verify } => cmd_decide(triple, *algorithm, flow.as_ref(), *verify),
        Command::Count { triple, limit, verify } => cmd_count(triple, *limit, *verify),
        Command::Render { triple, flow, format } => cmd_render(triple, flow.as_ref(), *format),
        Command::Oracle { triple } => cmd_oracle(triple),
        Command::Selftest { seed, full } => cmd_selftest(*seed, *full),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("hiveflow: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
