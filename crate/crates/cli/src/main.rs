use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mstream_core::io::{
    parse_instance, ratio_string, resolve_order, to_canonical_bytes, Algorithm, OrderMode, ParamArgs, RunParams,
    RunReport,
};
use mstream_core::kernel::{brute_force_kernel, find_kernel, OrderedMatroid};
use mstream_core::scalar::Scalar;
use mstream_core::{
    brute_force_intersection_opt, conjecture_probe, fixtures, run_exact, ElementSet, Error, ExactInstance,
    OracleBudget, Rational, StreamParams,
};

mod bench;

#[derive(Parser)]
#[command(name = "mstream", version, about = "Semi-streaming matroid intersection harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm over one instance and write a JSON report.
    Run(RunArgs),
    /// Brute-force optimum over common independent sets.
    Opt {
        #[arg(long)]
        instance: String,
    },
    /// Run the exact pass and check the extracted kernel.
    VerifyKernel {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value = "file")]
        order: OrderMode,
    },
    /// Search shuffled orders for stacks without a k-approximate subset.
    ProbeConjecture {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 100)]
        orders: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        params: StreamArgs,
    },
    /// Run every cell of a manifest, in parallel.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct StreamArgs {
    /// Default schedule: alpha = 1 + eps, y = min rank / eps^2.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Deletion ratio, or `inf`.
    #[arg(long)]
    y: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// Instance file, or `fixture:<name>` for a bundled one.
    #[arg(long)]
    instance: String,
    #[arg(long)]
    algo: Algorithm,
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long, default_value = "file")]
    order: OrderMode,
    /// Also compute the brute-force optimum and the achieved ratio.
    #[arg(long)]
    opt: bool,
    /// Record wall time in the report (makes reports non-reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Loads an instance file or a bundled fixture; returns it with its name.
pub(crate) fn load_instance(spec: &str, base: Option<&Path>) -> Result<(ExactInstance, String), Error> {
    if let Some(name) = spec.strip_prefix("fixture:") {
        let (_, text) = fixtures::BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Parameter(format!("no bundled fixture named {name:?}")))?;
        return Ok((parse_instance(text.as_bytes())?, name.to_string()));
    }
    let path = match base {
        Some(dir) => dir.join(spec),
        None => PathBuf::from(spec),
    };
    let bytes = fs::read(&path).map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok((parse_instance(&bytes)?, stem))
}

fn names(inst: &ExactInstance, set: &ElementSet) -> Value {
    Value::Array(set.iter().map(|&e| Value::String(inst.name(e).to_string())).collect())
}

fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| Error::Parameter(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{}", String::from_utf8_lossy(bytes));
            Ok(())
        }
    }
}

fn run(args: RunArgs) -> Result<(), Error> {
    let (inst, name) = load_instance(&args.instance, None)?;
    let params = ParamArgs {
        epsilon: args.stream.epsilon,
        alpha: args.stream.alpha,
        y: args.stream.y,
        q: args.q,
        delta: args.delta,
        seed: args.seed,
    }
    .resolve(&inst, args.algo)?;
    let start = Instant::now();
    let mut report = RunReport::execute(&inst, args.algo, args.order, params, &name)?;
    let elapsed = start.elapsed();
    if args.opt {
        report = report.with_opt(brute_force_intersection_opt(&inst, &OracleBudget::from_env()?)?);
    }
    if args.timing {
        report.wall_time = Some(elapsed);
    }
    emit(&mstream_core::io::emit_report(&report), args.out.as_deref())
}

fn opt(instance: &str) -> Result<(), Error> {
    let (inst, name) = load_instance(instance, None)?;
    let (set, weight) = brute_force_intersection_opt(&inst, &OracleBudget::from_env()?)?;
    let out = json!({
        "fixture": name,
        "solution": names(&inst, &set),
        "weight": ratio_string(&weight),
        "weight_approx": weight.approx_f64(),
    });
    emit(&to_canonical_bytes(&out), None)
}

fn verify_kernel(instance: &str, order: OrderMode) -> Result<(), Error> {
    let (inst, name) = load_instance(instance, None)?;
    let run = run_exact(&inst, &resolve_order(&inst, order))?;
    let state = &run.final_state;
    let om1 = OrderedMatroid::from_state(&inst.matroids[0], state, 0);
    let om2 = OrderedMatroid::from_state(&inst.matroids[1], state, 1);
    let ground = state.alive_ids();
    let kernel = find_kernel(&om1, &om2, &ground)?;
    let budget = OracleBudget::from_env()?;
    let enumerated = if ground.len() <= budget.max_elements {
        let all = brute_force_kernel(&om1, &om2, &ground)?;
        json!({"kernels_found": all.len(), "contains_result": all.contains(&kernel.kernel)})
    } else {
        Value::Null
    };
    let trace: Vec<Value> = kernel
        .rejected_trace
        .iter()
        .map(|(round, e)| json!([round, inst.name(*e)]))
        .collect();
    let out = json!({
        "fixture": name,
        "order": order.to_string(),
        "stack": Value::Array(ground.iter().map(|&e| Value::String(inst.name(e).to_string())).collect()),
        "kernel": names(&inst, &kernel.kernel),
        "rounds": kernel.rounds,
        "rejected_trace": trace,
        "is_kernel": true,
        "kernel_weight": ratio_string(&run.solution_weight),
        "g_alive": ratio_string(&run.g_alive),
        "enumeration": enumerated,
    });
    emit(&to_canonical_bytes(&out), None)
}

fn probe(instance: &str, orders: u64, seed: u64, params: StreamArgs) -> Result<(), Error> {
    let (inst, name) = load_instance(instance, None)?;
    let stream = if params.epsilon.is_none() && params.alpha.is_none() {
        if params.y.is_some() {
            return Err(Error::Parameter("--y needs --alpha or --epsilon".into()));
        }
        StreamParams::exact()
    } else {
        let args = ParamArgs {
            epsilon: params.epsilon,
            alpha: params.alpha,
            y: params.y,
            ..Default::default()
        };
        match args.resolve(&inst, Algorithm::StreamingK)? {
            RunParams::Stream(p) => p,
            _ => unreachable!("streaming parameters"),
        }
    };
    let order_list: Vec<_> = (0..orders)
        .map(|i| resolve_order(&inst, OrderMode::Shuffle(seed.wrapping_add(i))))
        .collect();
    let report = conjecture_probe(&inst, &order_list, &stream, &OracleBudget::from_env()?)?;
    let out = json!({
        "fixture": name,
        "k": report.k,
        "orders_run": report.orders_run,
        "seed": seed,
        "opt": ratio_string(&report.opt),
        "worst_ratio": report.worst_ratio.as_ref().map(ratio_string),
        "worst_ratio_approx": report.worst_ratio.as_ref().map(Rational::approx_f64),
        "worst_order_seed": report.worst_order.map(|o| seed.wrapping_add(o as u64)),
        "worst_subset": names(&inst, &report.worst_subset),
        "worst_subset_weight": ratio_string(&report.worst_subset_weight),
        "flagged": report.flagged(),
        "flagged_order_seeds": report.flagged_orders.iter().map(|&o| seed.wrapping_add(o as u64)).collect::<Vec<_>>(),
    });
    emit(&to_canonical_bytes(&out), None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Opt { instance } => opt(&instance),
        Command::VerifyKernel { instance, order } => verify_kernel(&instance, order),
        Command::ProbeConjecture {
            instance,
            orders,
            seed,
            params,
        } => probe(&instance, orders, seed, params),
        Command::Bench { manifest, jobs, out } => bench::run(&manifest, jobs, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
