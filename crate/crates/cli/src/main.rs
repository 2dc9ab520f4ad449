//! Command line driver: scenario catalog, analysis, minimisation, level
//! estimates, verification and homographic baselines.
//!
//! Exit codes: 0 success, 1 refusal (non-coercive or degenerate constraint),
//! 2 i/o or parse errors.

use clap::{Args, Parser, Subcommand};
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use symloop_core::estimates::{self, homographic_baseline, CentralShape, DomainScan};
use symloop_core::lagrangian::{MassVector, PotentialSpec};
use symloop_core::loopspace::{read_loop, write_loop};
use symloop_core::minimizer::{minimize, random_equivariant_loop, MinimizeError};
use symloop_core::scenario::{build_scenario, catalog, write_scenario};
use symloop_core::symmetry::{degeneracy_report, fixed_config_subspace, GroupElement};
use symloop_core::verify::{report, ReportOptions};

#[derive(Parser)]
#[command(
    name = "symloop",
    version,
    about = "symmetric periodic orbits of the planar n-body problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the scenario catalog with expected verdicts.
    ListScenarios,
    /// Print the kernel diagnostics and fixed-subspace dimensions of a scenario.
    Analyze { scenario: String },
    /// Minimise the action over the equivariant loops of a scenario.
    Minimize(MinimizeArgs),
    /// Scan the level-estimate difference for domain membership.
    Estimate(EstimateArgs),
    /// Verify an orbit file: residual, periodicity, classification.
    Verify(VerifyArgs),
    /// Compute a rotating central-configuration baseline.
    Baseline(BaselineArgs),
    /// Write a scenario's config file to stdout.
    ShowConfig { scenario: String },
}

#[derive(Args)]
struct MinimizeArgs {
    scenario: String,
    /// RNG seed for the initial loop and the restarts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Strong-force epsilon added to the scenario potential.
    #[arg(long)]
    strong_force: Option<f64>,
    /// Output orbit file (columnar interchange format).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the lattice size.
    #[arg(long)]
    nodes: Option<usize>,
    /// Override the period.
    #[arg(long)]
    period: Option<f64>,
    /// Override the iteration budget.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Amplitude of the random seed loop noise.
    #[arg(long, default_value_t = 0.35)]
    amplitude: f64,
    /// Print a progress line every 1000 iterations.
    #[arg(long)]
    progress: bool,
}

#[derive(Args)]
struct EstimateArgs {
    /// Mass of the third body.
    #[arg(long, default_value_t = 2.0)]
    m: f64,
    /// Angle between the boundary lines (radians).
    #[arg(long, default_value_t = PI / 8.0)]
    theta: f64,
    /// Scan a grid `m0:m1:k,theta0:theta1:k` instead of a single point.
    #[arg(long)]
    grid: Option<String>,
    /// Upper bound of the geometry-parameter box.
    #[arg(long, default_value_t = 5.0)]
    ell_max: f64,
    /// Grid points per geometry axis.
    #[arg(long, default_value_t = 40)]
    resolution: usize,
}

#[derive(Args)]
struct VerifyArgs {
    orbit_file: PathBuf,
    /// Local error tolerance of the shooting integrator.
    #[arg(long, default_value_t = 1e-10)]
    shoot_tol: f64,
    /// Shape/choreography classification tolerance.
    #[arg(long, default_value_t = 1e-3)]
    class_tol: f64,
    /// Strong-force epsilon the orbit was computed with.
    #[arg(long, default_value_t = 0.0)]
    strong_force: f64,
    /// Descent iterations for the polish pass (0 = skip).
    #[arg(long, default_value_t = 0)]
    refine: usize,
}

#[derive(Args)]
struct BaselineArgs {
    /// One of: lagrange-triangle, euler-collinear, square, ngon:<n>, parallelogram.
    kind: String,
    /// Comma-separated masses.
    #[arg(long, default_value = "1,1,1")]
    masses: String,
    #[arg(long, default_value_t = 240)]
    nodes: usize,
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    period: f64,
    /// Angular velocity; defaults to one rotation per period.
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::ListScenarios => {
            println!("{:<28} {:>8} {:>12}  summary", "name", "coercive", "homographic");
            for entry in catalog() {
                println!(
                    "{:<28} {:>8} {:>12}  {}",
                    entry.name,
                    entry.expected_coercive,
                    if entry.homographic_possible { "possible" } else { "excluded" },
                    entry.summary
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze { scenario } => analyze(&scenario),
        Command::Minimize(args) => run_minimize(args),
        Command::Estimate(args) => run_estimate(args),
        Command::Verify(args) => run_verify(args),
        Command::Baseline(args) => run_baseline(args),
        Command::ShowConfig { scenario } => {
            let spec = build_scenario(&scenario).map_err(|e| e.to_string())?;
            print!("{}", write_scenario(&spec));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn analyze(scenario: &str) -> Result<ExitCode, String> {
    let spec = build_scenario(scenario).map_err(|e| e.to_string())?;
    let group = spec.build_group().map_err(|e| e.to_string())?;
    let rep = degeneracy_report(&group);
    println!("scenario = {}", spec.name);
    println!("group_order = {}", group.order());
    println!("time_actions = {}", group.time_image_order());
    println!("triple_kernel_trivial = {}", rep.triple_kernel_trivial);
    println!("ker_tau_ker_rho_trivial = {}", rep.ker_tau_ker_rho_trivial);
    println!("ker_tau_ker_sigma_trivial = {}", rep.ker_tau_ker_sigma_trivial);
    println!("ker_rho_ker_sigma_order = {}", rep.ker_rho_ker_sigma_order);
    println!("duplicate_traversal = {}", rep.duplicate_traversal);
    println!("fixed_time_space_in_collisions = {}", rep.fixed_time_space_in_collisions);
    println!("coercive = {}", rep.coercive);
    println!("admissible = {}", rep.is_admissible());
    for (k, g) in spec.generators.iter().enumerate() {
        let sub = vec![GroupElement::identity(spec.n_bodies()), g.to_element()];
        let dim = fixed_config_subspace(&sub, &spec.masses)
            .map(|b| b.len())
            .unwrap_or(0);
        println!("fixed_dim_generator_{} = {}", k + 1, dim);
    }
    let full = fixed_config_subspace(group.elements(), &spec.masses)
        .map(|b| b.len())
        .unwrap_or(0);
    println!("fixed_dim_group = {}", full);
    if let Some(expect) = spec.expected_coercive {
        println!("expected_coercive = {}", expect);
    }
    Ok(ExitCode::SUCCESS)
}

fn out_path(requested: Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    match requested {
        Some(p) => Some(p),
        None => std::env::var_os("SYMLOOP_OUT_DIR").map(|dir| Path::new(&dir).join(default_name)),
    }
}

fn run_minimize(args: MinimizeArgs) -> Result<ExitCode, String> {
    let mut spec = build_scenario(&args.scenario).map_err(|e| e.to_string())?;
    if let Some(n) = args.nodes {
        spec.n_lattice = n;
    }
    if let Some(t) = args.period {
        spec.period = t;
    }
    if let Some(i) = args.max_iter {
        spec.minimizer.max_iterations = i;
    }
    let mut potential = spec.potential;
    if let Some(eps) = args.strong_force {
        potential.strong_force_epsilon = eps;
    }
    let group = spec.build_group().map_err(|e| e.to_string())?;
    let rep = degeneracy_report(&group);
    if !rep.is_admissible() {
        eprintln!(
            "refusing `{}`: coercive = {}, admissible = false",
            spec.name, rep.coercive
        );
        return Ok(ExitCode::from(1));
    }
    let mut config = spec.minimizer.clone();
    config.rng_seed = args.seed;
    config.log_progress = args.progress;
    let seed_loop =
        random_equivariant_loop(&group, spec.n_lattice, spec.period, args.amplitude, args.seed)
            .map_err(|e| e.to_string())?;
    if let Some(order) = &spec.ordering {
        if !symloop_core::minimizer::ordering_constraint_filter(seed_loop.as_loop(), order) {
            eprintln!("note: seed loop violates the scenario ordering constraint");
        }
    }
    let outcome = minimize(&group, &potential, &config, Some(seed_loop.as_loop()));
    let result = match outcome {
        Ok(r) => r,
        Err(MinimizeError::NoConvergence(r)) => {
            eprintln!("note: iteration budget exhausted before the gradient tolerance");
            *r
        }
        Err(e @ MinimizeError::NotCoercive) => {
            eprintln!("refusing `{}`: {e}", spec.name);
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(e.to_string()),
    };
    let verification = report(
        result.orbit.as_loop(),
        group.masses(),
        &potential,
        &ReportOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    println!("scenario = {}", spec.name);
    println!("action = {}", result.action);
    println!("grad_norm = {:e}", result.grad_norm);
    println!("iterations = {}", result.iterations);
    println!("restarts = {}", result.restarts_used);
    println!("converged = {}", result.converged);
    println!("collision_free = {}", result.collision_free);
    println!("min_distance = {}", result.min_pairwise_distance);
    println!("classification = {}", verification.classification);
    if let Some(s) = verification.choreography_shift {
        println!("choreography_shift = {}", s);
    }
    println!("newton_residual = {:e}", verification.newton_residual_norm);
    if let Some(p) = verification.periodicity_residual {
        println!("periodicity_residual = {:e}", p);
    }
    if let Some(path) = out_path(args.out, &format!("{}.dat", spec.name.replace(':', "-"))) {
        let file = File::create(&path).map_err(|e| e.to_string())?;
        write_loop(BufWriter::new(file), result.orbit.as_loop(), group.masses())
            .map_err(|e| e.to_string())?;
        let plot_path = path.with_extension("gp");
        std::fs::write(&plot_path, plot_script(&path, spec.n_bodies()))
            .map_err(|e| e.to_string())?;
        println!("orbit_file = {}", path.display());
        println!("plot_script = {}", plot_path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn plot_script(data: &Path, n_bodies: usize) -> String {
    let name = data.file_name().unwrap_or_default().to_string_lossy();
    let parts: Vec<String> = (0..n_bodies)
        .map(|i| format!("'{}' using {}:{} with lines", name, 2 + 2 * i, 3 + 2 * i))
        .collect();
    format!(
        "set size ratio -1\nset key off\nplot {}\npause -1\n",
        parts.join(", \\\n     ")
    )
}

fn run_estimate(args: EstimateArgs) -> Result<ExitCode, String> {
    let scan = DomainScan {
        ell_max: args.ell_max,
        grid: args.resolution,
        ..DomainScan::default()
    };
    let points: Vec<(f64, f64)> = match &args.grid {
        None => vec![(args.m, args.theta)],
        Some(spec) => parse_grid(spec)?,
    };
    println!("# m theta inf_value member ell r0 c");
    let mut any_member = false;
    for (m, theta) in points {
        let (member, witness) = estimates::in_domain_d(m, theta, &scan);
        any_member |= member;
        match witness {
            Some(w) => {
                let value = estimates::difference(&w);
                println!("{m} {theta} {value} {member} {} {} {}", w.ell, w.r0, w.c);
            }
            None => println!("{m} {theta} nan {member} nan nan nan"),
        }
    }
    Ok(if any_member { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_grid(spec: &str) -> Result<Vec<(f64, f64)>, String> {
    let err = || format!("grid must be `m0:m1:k,theta0:theta1:k`, got `{spec}`");
    let (ms, ts) = spec.split_once(',').ok_or_else(err)?;
    let axis = |s: &str| -> Result<Vec<f64>, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(err());
        }
        let lo: f64 = parts[0].parse().map_err(|_| err())?;
        let hi: f64 = parts[1].parse().map_err(|_| err())?;
        let k: usize = parts[2].parse().map_err(|_| err())?;
        if k < 2 {
            return Ok(vec![lo]);
        }
        Ok((0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect())
    };
    let mut out = Vec::new();
    for m in axis(ms)? {
        for t in axis(ts)? {
            out.push((m, t));
        }
    }
    Ok(out)
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let file = File::open(&args.orbit_file).map_err(|e| e.to_string())?;
    let (lp, masses) = read_loop(BufReader::new(file)).map_err(|e| e.to_string())?;
    let spec = PotentialSpec {
        strong_force_epsilon: args.strong_force,
        ..PotentialSpec::newtonian()
    };
    let opts = ReportOptions {
        shoot_tolerance: Some(args.shoot_tol),
        classify_tolerance: args.class_tol,
        refine_iterations: args.refine,
    };
    let rep = report(&lp, &masses, &spec, &opts).map_err(|e| e.to_string())?;
    let periodicity = rep
        .periodicity_residual
        .map_or("null".to_string(), |p| format!("{p:e}"));
    println!(
        "{{\"residual\": {:e}, \"periodicity\": {}, \"classification\": \"{}\", \"min_distance\": {:e}}}",
        rep.newton_residual_norm, periodicity, rep.classification, rep.min_distance
    );
    Ok(ExitCode::SUCCESS)
}

fn run_baseline(args: BaselineArgs) -> Result<ExitCode, String> {
    let masses: Vec<f64> = args
        .masses
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let masses = MassVector::new(masses).map_err(|e| e.to_string())?;
    let shape = match args.kind.as_str() {
        "lagrange-triangle" => CentralShape::LagrangeTriangle,
        "euler-collinear" => CentralShape::EulerCollinear,
        "square" => CentralShape::Square,
        "parallelogram" => CentralShape::Parallelogram,
        other => match other.strip_prefix("ngon:").and_then(|n| n.parse::<usize>().ok()) {
            Some(n) => CentralShape::RegularNgon(n),
            None => return Err(format!("unknown baseline kind `{other}`")),
        },
    };
    let baseline = homographic_baseline(shape, &masses, args.nodes, args.period, args.omega)
        .map_err(|e| e.to_string())?;
    println!("kind = {}", args.kind);
    println!("omega = {}", baseline.omega);
    println!("action = {}", baseline.action);
    let radii: Vec<String> = baseline.positions.iter().map(|p| format!("{:.6}", p.norm())).collect();
    println!("radii = {}", radii.join(" "));
    if let Some(path) = out_path(args.out, &format!("baseline-{}.dat", args.kind.replace(':', "-")))
    {
        let file = File::create(&path).map_err(|e| e.to_string())?;
        write_loop(BufWriter::new(file), &baseline.orbit, &masses).map_err(|e| e.to_string())?;
        println!("orbit_file = {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
