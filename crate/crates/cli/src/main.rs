//! Command-line surface for solving, relaxing, comparing, generating, and
//! verifying exchange instances. Reports are JSON on standard output;
//! diagnostics go to standard error.
//!
//! Exit codes: 0 success, 2 usage error, 3 infeasible or limit reached,
//! 4 data error.

mod report;

use std::io::Read;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exchange_clear::formulations::{
    apply_failure_objective, decode_solution, BuildError, BuildOptions, Formulation, Solution,
};
use exchange_clear::harness::{compare_lprs, make_family, FamilyParams, HarnessError};
use exchange_clear::indexsets::PiefVariant;
use exchange_clear::instance::{
    generate_random, parse_instance, serialize_instance, Chain, Cycle, Instance, WeightMode,
};
use exchange_clear::pricing::{solve_picef_bnp, BnpConfig, PricingError};
use exchange_clear::solver::{
    routed_solve_lp, routed_solve_mip, select_backend, LpStatus, MipConfig, MipStatus, SolveError,
};
use report::{CompareReport, InstanceSummary, ModelStats, SolveReport, SolverStats, VerifyReport};

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 2;
const EXIT_INFEASIBLE_OR_LIMIT: i32 = 3;
const EXIT_DATA: i32 = 4;

#[derive(Parser)]
#[command(
    name = "exchange-clear",
    version,
    about = "Clearing engine for barter exchange markets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormulationArg {
    Cf,
    Pief,
    Piefr,
    Pief2,
    Picef,
    #[value(name = "picef-red")]
    PicefRed,
    Hpief,
    #[value(name = "picef-bnp")]
    PicefBnp,
}

impl FormulationArg {
    fn label(self) -> &'static str {
        match self {
            FormulationArg::Cf => "cf",
            FormulationArg::Pief => "pief",
            FormulationArg::Piefr => "piefr",
            FormulationArg::Pief2 => "pief2",
            FormulationArg::Picef => "picef",
            FormulationArg::PicefRed => "picef-red",
            FormulationArg::Hpief => "hpief",
            FormulationArg::PicefBnp => "picef-bnp",
        }
    }

    fn as_formulation(self) -> Option<Formulation> {
        match self {
            FormulationArg::Cf => Some(Formulation::Cf),
            FormulationArg::Pief => Some(Formulation::Pief(PiefVariant::Full)),
            FormulationArg::Piefr => Some(Formulation::Pief(PiefVariant::Reduced)),
            FormulationArg::Pief2 => Some(Formulation::Pief(PiefVariant::Reduced2)),
            FormulationArg::Picef => Some(Formulation::Picef { reduced: false }),
            FormulationArg::PicefRed => Some(Formulation::Picef { reduced: true }),
            FormulationArg::Hpief => Some(Formulation::Hpief(PiefVariant::Full)),
            FormulationArg::PicefBnp => None,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Formulation to compile and solve.
    #[arg(long, value_enum)]
    formulation: FormulationArg,
    /// Instance file; "-" reads standard input.
    #[arg(long, default_value = "-")]
    input: String,
    /// Override the instance's cycle cap.
    #[arg(long)]
    cycle_cap: Option<usize>,
    /// Override the instance's chain cap.
    #[arg(long)]
    chain_cap: Option<usize>,
    /// Uniform arc success probability in (0, 1]; switches the chain-edge
    /// formulations to the expected-weight objective.
    #[arg(long)]
    failure_prob: Option<f64>,
    /// Solve only the LP relaxation.
    #[arg(long)]
    relax: bool,
    /// Variable budget guarding against cycle blowup.
    #[arg(long, default_value_t = 5_000_000)]
    var_budget: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance to optimality (or its LP relaxation with --relax).
    Solve(SolveArgs),
    /// Solve the LP relaxation (alias for solve --relax).
    Relax(SolveArgs),
    /// Solve the LP relaxation of several formulations and report the values.
    Compare {
        #[arg(long, default_value = "-")]
        input: String,
        /// Comma-separated formulation labels; default picks every
        /// formulation applicable to the instance.
        #[arg(long)]
        formulations: Option<String>,
        #[arg(long)]
        cycle_cap: Option<usize>,
        #[arg(long)]
        chain_cap: Option<usize>,
    },
    /// Generate a random instance and print it as JSON.
    Generate {
        #[arg(long, default_value_t = 0)]
        ndds: usize,
        #[arg(long)]
        pairs: usize,
        /// Independent arc probability in [0, 1].
        #[arg(long)]
        density: f64,
        /// Arc weights: every arc 1, or integers drawn from [lo, hi].
        #[arg(long, value_enum, default_value_t = WeightArg::Unit)]
        weights: WeightArg,
        #[arg(long, default_value_t = 1)]
        lo: u32,
        #[arg(long, default_value_t = 10)]
        hi: u32,
        #[arg(long, default_value_t = 3)]
        cycle_cap: usize,
        #[arg(long, default_value_t = 3)]
        chain_cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit one of the built-in adversarial instance families as JSON.
    Family {
        #[arg(long, value_enum)]
        name: FamilyArg,
        #[arg(long = "K")]
        cycle_cap: Option<usize>,
        #[arg(long = "L")]
        chain_cap: Option<usize>,
    },
    /// Re-check a solve report against its instance.
    Verify {
        #[arg(long)]
        input: String,
        #[arg(long)]
        solution: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightArg {
    Unit,
    #[value(name = "uniform-int")]
    UniformInt,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    #[value(name = "two-arm")]
    TwoArm,
    Udders,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
    fn limit(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INFEASIBLE_OR_LIMIT,
            message: message.into(),
        }
    }
    fn data(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Ok(name) = std::env::var("EXCHANGE_CLEAR_BACKEND") {
        if !name.is_empty() {
            if let Err(e) = select_backend(&name) {
                eprintln!("error: {e}");
                std::process::exit(EXIT_USAGE);
            }
        }
    }
    match run(cli.command) {
        Ok(()) => std::process::exit(EXIT_OK),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            std::process::exit(failure.code);
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve(args) => solve_command(args, false),
        Command::Relax(args) => solve_command(args, true),
        Command::Compare {
            input,
            formulations,
            cycle_cap,
            chain_cap,
        } => compare_command(&input, formulations.as_deref(), cycle_cap, chain_cap),
        Command::Generate {
            ndds,
            pairs,
            density,
            weights,
            lo,
            hi,
            cycle_cap,
            chain_cap,
            seed,
        } => {
            if !(0.0..=1.0).contains(&density) {
                return Err(Failure::usage("--density must lie in [0, 1]"));
            }
            if weights == WeightArg::UniformInt && lo > hi {
                return Err(Failure::usage("--lo must not exceed --hi"));
            }
            let mode = match weights {
                WeightArg::Unit => WeightMode::Unit,
                WeightArg::UniformInt => WeightMode::UniformInt { lo, hi },
            };
            let inst: Instance<f64> =
                generate_random(ndds, pairs, density, mode, cycle_cap, chain_cap, seed);
            println!("{}", serialize_instance(&inst));
            Ok(())
        }
        Command::Family {
            name,
            cycle_cap,
            chain_cap,
        } => {
            let params = match name {
                FamilyArg::TwoArm => {
                    if cycle_cap.is_some_and(|k| k != 2) || chain_cap.is_some_and(|l| l != 4) {
                        return Err(Failure::usage("the two-arm family is fixed at K=2, L=4"));
                    }
                    FamilyParams::TwoArm
                }
                FamilyArg::Udders => {
                    let (Some(k), Some(l)) = (cycle_cap, chain_cap) else {
                        return Err(Failure::usage("udders requires --K and --L"));
                    };
                    FamilyParams::Udders {
                        cycle_cap: k,
                        chain_cap: l,
                    }
                }
            };
            let inst: Instance<f64> = make_family(params).map_err(map_harness_error)?;
            println!("{}", serialize_instance(&inst));
            Ok(())
        }
        Command::Verify { input, solution } => verify_command(&input, &solution),
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::data(format!("reading standard input: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::data(format!("reading {path}: {e}")))
    }
}

fn load_instance(
    path: &str,
    cycle_cap: Option<usize>,
    chain_cap: Option<usize>,
    failure_prob: Option<f64>,
) -> Result<Instance<f64>, Failure> {
    let text = read_input(path)?;
    let inst: Instance<f64> =
        parse_instance(&text).map_err(|e| Failure::data(format!("parsing {path}: {e}")))?;
    let k = cycle_cap.unwrap_or(inst.cycle_cap());
    let l = chain_cap.unwrap_or(inst.chain_cap());
    let p = failure_prob.or(inst.failure_prob());
    inst.with_params(k, l, p)
        .map_err(|e| Failure::data(e.to_string()))
}

fn map_build_error(e: BuildError) -> Failure {
    match e {
        BuildError::ModelTooLarge { .. } => Failure::limit(e.to_string()),
        BuildError::Unsupported(_) => Failure::usage(e.to_string()),
        _ => Failure::data(e.to_string()),
    }
}

fn map_solve_error(e: SolveError) -> Failure {
    match e {
        SolveError::LimitReached { .. } => Failure::limit(e.to_string()),
        other => Failure::limit(other.to_string()),
    }
}

fn map_harness_error(e: HarnessError) -> Failure {
    match e {
        HarnessError::BadFamilyParams(_) => Failure::usage(e.to_string()),
        HarnessError::TooLargeForOracle { .. } => Failure::limit(e.to_string()),
        HarnessError::Build(b) => map_build_error(b),
        HarnessError::Solve(s) => map_solve_error(s),
        HarnessError::NotAClosedWalk(_) => Failure::data(e.to_string()),
    }
}

fn solve_command(args: SolveArgs, force_relax: bool) -> Result<(), Failure> {
    let relax = force_relax || args.relax;
    let inst = load_instance(
        &args.input,
        args.cycle_cap,
        args.chain_cap,
        args.failure_prob,
    )?;
    let started = Instant::now();

    if args.formulation == FormulationArg::PicefBnp {
        return bnp_command(&inst, relax, started);
    }

    let formulation = args.formulation.as_formulation().expect("non-bnp");
    let options = BuildOptions {
        var_budget: args.var_budget,
    };
    let mut model = formulation
        .build_with(&inst, &options)
        .map_err(map_build_error)?;
    let failure_aware =
        inst.failure_prob().is_some() && matches!(formulation, Formulation::Picef { .. });
    if failure_aware {
        model = apply_failure_objective(model, &inst).map_err(map_build_error)?;
    }

    let mut report = SolveReport {
        instance: InstanceSummary::of(&inst),
        formulation: args.formulation.label().to_string(),
        relaxation: relax,
        objective: 0.0,
        expected_objective: None,
        cycles: vec![],
        chains: vec![],
        model: ModelStats {
            variables: model.num_vars(),
            constraints: model.num_constraints(),
        },
        solver: SolverStats {
            nodes: 0,
            lp_value: 0.0,
            columns_generated: None,
            pricing_calls: None,
        },
        wall_time_ms: 0,
    };

    if relax {
        let lp = routed_solve_lp(&model).map_err(map_solve_error)?;
        if lp.status != LpStatus::Optimal {
            return Err(Failure::limit(format!(
                "LP relaxation status {:?}",
                lp.status
            )));
        }
        report.objective = lp.value;
        report.solver.lp_value = lp.value;
    } else {
        let mip = routed_solve_mip(&model, &MipConfig::default()).map_err(map_solve_error)?;
        if mip.status != MipStatus::Optimal {
            return Err(Failure::limit("model is infeasible"));
        }
        let solution = decode_solution(&model, &mip.assignment, &inst)
            .map_err(|e| Failure::limit(format!("solver returned a bad assignment: {e}")))?;
        report.objective = mip.value;
        report.structures(&solution);
        report.solver.nodes = mip.nodes_explored;
        report.solver.lp_value = mip.root_lp_value;
    }
    report.wall_time_ms = started.elapsed().as_millis();
    print_json(&report)
}

fn bnp_command(inst: &Instance<f64>, relax: bool, started: Instant) -> Result<(), Failure> {
    let (solution, stats) = solve_picef_bnp(inst, &BnpConfig::default()).map_err(|e| match e {
        PricingError::LimitReached { .. } => Failure::limit(e.to_string()),
        other => Failure::limit(other.to_string()),
    })?;
    let mut report = SolveReport {
        instance: InstanceSummary::of(inst),
        formulation: "picef-bnp".to_string(),
        relaxation: relax,
        objective: if relax {
            stats.root_bound
        } else {
            solution.objective_value()
        },
        expected_objective: None,
        cycles: vec![],
        chains: vec![],
        model: ModelStats {
            variables: 0,
            constraints: 0,
        },
        solver: SolverStats {
            nodes: stats.nodes,
            lp_value: stats.root_bound,
            columns_generated: Some(stats.columns_generated),
            pricing_calls: Some(stats.pricing_calls),
        },
        wall_time_ms: 0,
    };
    if !relax {
        report.structures(&solution);
    }
    report.wall_time_ms = started.elapsed().as_millis();
    print_json(&report)
}

fn compare_command(
    input: &str,
    formulations: Option<&str>,
    cycle_cap: Option<usize>,
    chain_cap: Option<usize>,
) -> Result<(), Failure> {
    let inst = load_instance(input, cycle_cap, chain_cap, None)?;
    let started = Instant::now();
    let chosen: Vec<Formulation> = match formulations {
        Some(list) => {
            let mut out = Vec::new();
            for label in list.split(',') {
                let f = Formulation::ALL
                    .iter()
                    .find(|f| f.label() == label.trim())
                    .copied()
                    .ok_or_else(|| Failure::usage(format!("unknown formulation {label:?}")))?;
                out.push(f);
            }
            out
        }
        None => Formulation::ALL
            .iter()
            .filter(|f| f.applicable(&inst))
            .copied()
            .collect(),
    };
    let values = compare_lprs(&inst, &chosen).map_err(map_harness_error)?;
    let mut report = CompareReport {
        instance: InstanceSummary::of(&inst),
        lpr: values
            .iter()
            .map(|(f, v)| (f.label().to_string(), *v))
            .collect(),
        gaps: Default::default(),
        wall_time_ms: 0,
    };
    for (i, (fa, va)) in values.iter().enumerate() {
        for (fb, vb) in values.iter().skip(i + 1) {
            report
                .gaps
                .insert(format!("{}-{}", fa.label(), fb.label()), va - vb);
        }
    }
    report.wall_time_ms = started.elapsed().as_millis();
    print_json(&report)
}

fn verify_command(input: &str, solution_path: &str) -> Result<(), Failure> {
    let report_text = read_input(solution_path)?;
    let report: SolveReport = serde_json::from_str(&report_text)
        .map_err(|e| Failure::data(format!("parsing {solution_path}: {e}")))?;
    let inst = load_instance(
        input,
        Some(report.instance.cycle_cap),
        Some(report.instance.chain_cap),
        report.instance.failure_prob,
    )?;

    let check = rebuild_solution(&inst, &report);
    let verdict = match check {
        Ok(solution) => {
            let expected = if report.relaxation {
                report.objective
            } else {
                solution.objective_value()
            };
            if (expected - report.objective).abs() <= 1e-6 * (1.0 + report.objective.abs()) {
                VerifyReport {
                    feasible: true,
                    objective: solution.objective_value(),
                    expected_objective: solution.expected_weight,
                    detail: "solution is vertex-disjoint, within caps, and matches the reported objective".to_string(),
                }
            } else {
                VerifyReport {
                    feasible: false,
                    objective: solution.objective_value(),
                    expected_objective: solution.expected_weight,
                    detail: format!(
                        "structures are feasible but are worth {} while the report claims {}",
                        expected, report.objective
                    ),
                }
            }
        }
        Err(reason) => VerifyReport {
            feasible: false,
            objective: 0.0,
            expected_objective: None,
            detail: reason,
        },
    };
    let ok = verdict.feasible;
    print_json(&verdict)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::limit("verification failed"))
    }
}

fn rebuild_solution(inst: &Instance<f64>, report: &SolveReport) -> Result<Solution<f64>, String> {
    let mut cycles = Vec::new();
    for verts in &report.cycles {
        if verts.len() < 2 {
            return Err(format!("cycle {verts:?} has fewer than two vertices"));
        }
        cycles.push(Cycle::new(verts.clone()));
    }
    let mut chains = Vec::new();
    for verts in &report.chains {
        if verts.len() < 2 {
            return Err(format!("chain {verts:?} has fewer than two vertices"));
        }
        chains.push(Chain::new(verts.clone()));
    }
    Solution::build(inst, cycles, chains)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::data(format!("serializing report: {e}")))?;
    println!("{text}");
    Ok(())
}
