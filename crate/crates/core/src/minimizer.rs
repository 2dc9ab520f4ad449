//! Projected gradient relaxation on the equivariant loop space.
//!
//! The iteration is `x <- symmetrize(x - eta grad A(x))` with backtracking on
//! `eta` (halve until the action strictly decreases, grow by 1.5 on success).
//! When the action stalls, a small random equivariant perturbation restarts
//! the descent; the best iterate seen is returned. Runs are deterministic for
//! a fixed seed.

use crate::lagrangian::{Configuration, MassVector, PotentialSpec};
use crate::loopspace::{
    action_gradient, discrete_action, gradient_norm, symmetrize, symmetrize_nodes, DiscreteLoop,
    EquivariantLoop, LoopError,
};
use crate::planar::Vec2;
use crate::symmetry::{is_coercive, SymmetryGroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MinimizeError {
    #[error(
        "the constrained action is not coercive (a nonzero configuration is fixed \
         by the whole group), so minimising sequences can escape to infinity"
    )]
    NotCoercive,
    #[error(
        "minimum pairwise distance {min_dist:.3e} fell below the collision \
         threshold at iteration {iteration}; retry with a strong-force epsilon"
    )]
    CollisionEncountered { min_dist: f64, iteration: usize },
    #[error("no convergence within the iteration budget (best action {action})", action = .0.action)]
    NoConvergence(Box<MinimizationResult>),
    #[error(transparent)]
    Loop(#[from] LoopError),
}

/// Tunables for [`minimize`]. Fields left `None` are derived from the lattice
/// and the seed loop: step `1e-3 T/N`, gradient tolerance `1e-8 N`, collision
/// distance `1e-4 diameter`, restart magnitude `5e-2 diameter`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerConfig {
    pub initial_step: Option<f64>,
    pub grad_tolerance: Option<f64>,
    pub max_iterations: usize,
    pub restart_magnitude: Option<f64>,
    pub max_restarts: usize,
    pub rng_seed: u64,
    pub collision_distance: Option<f64>,
    /// Iterations over which the stall test looks back.
    pub stall_window: usize,
    /// Relative action decrease below which the window counts as stalled.
    pub stall_threshold: f64,
    /// Emit one progress line per 1000 iterations to standard error.
    pub log_progress: bool,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        Self {
            initial_step: None,
            grad_tolerance: None,
            max_iterations: 200_000,
            restart_magnitude: None,
            max_restarts: 30,
            rng_seed: 0,
            collision_distance: None,
            stall_window: 200,
            stall_threshold: 1e-10,
            log_progress: false,
        }
    }
}

/// Outcome of a minimisation run.
#[derive(Debug, Clone)]
pub struct MinimizationResult {
    pub orbit: EquivariantLoop,
    pub action: f64,
    pub grad_norm: f64,
    pub collision_free: bool,
    pub min_pairwise_distance: f64,
    pub restarts_used: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Action after every accepted descent step (restarts append the
    /// post-perturbation value).
    pub action_trace: Vec<f64>,
    /// Indices into `action_trace` where a random restart was applied.
    pub restart_points: Vec<usize>,
}

fn step_along(x: &DiscreteLoop, g: &DiscreteLoop, eta: f64, masses: &MassVector) -> DiscreteLoop {
    let mut nodes: Vec<Configuration> = x.nodes().to_vec();
    for (node, gnode) in nodes.iter_mut().zip(g.nodes().iter()) {
        for (p, gp) in node.positions.iter_mut().zip(gnode.positions.iter()) {
            *p -= eta * gp;
        }
        node.project_center_of_mass(masses);
    }
    DiscreteLoop::new(nodes, x.period()).expect("same lattice")
}

/// Circularly smoothed noise: white noise per node run through a few passes
/// of a 1-2-1 filter, scaled to the requested amplitude.
fn smooth_noise(
    rng: &mut ChaCha8Rng,
    n_nodes: usize,
    n_bodies: usize,
    amplitude: f64,
) -> Vec<Vec<Vec2>> {
    let mut field: Vec<Vec<Vec2>> = (0..n_nodes)
        .map(|_| {
            (0..n_bodies)
                .map(|_| Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    for _ in 0..12 {
        let prev = field.clone();
        for j in 0..n_nodes {
            for i in 0..n_bodies {
                field[j][i] = 0.25 * prev[(j + n_nodes - 1) % n_nodes][i]
                    + 0.5 * prev[j][i]
                    + 0.25 * prev[(j + 1) % n_nodes][i];
            }
        }
    }
    let max = field
        .iter()
        .flat_map(|n| n.iter().map(|p| p.norm()))
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let scale = amplitude / max;
    for node in &mut field {
        for p in node {
            *p *= scale;
        }
    }
    field
}

fn perturb(
    lp: &DiscreteLoop,
    group: &SymmetryGroup,
    rng: &mut ChaCha8Rng,
    amplitude: f64,
) -> Result<DiscreteLoop, LoopError> {
    let noise = smooth_noise(rng, lp.n_nodes(), lp.n_bodies(), amplitude);
    let mut nodes: Vec<Configuration> = lp.nodes().to_vec();
    for (node, nnode) in nodes.iter_mut().zip(noise.iter()) {
        for (p, np) in node.positions.iter_mut().zip(nnode.iter()) {
            *p += np;
        }
    }
    let mut out = DiscreteLoop::new(nodes, lp.period())?;
    out.project_center_of_mass(group.masses());
    symmetrize_nodes(&out, group)
}

/// An equivariant loop seeded from a circular arrangement plus smoothed
/// random node noise of the given amplitude. Deterministic in `rng_seed`;
/// resamples the noise a bounded number of times if the projection produces
/// a close approach.
pub fn random_equivariant_loop(
    group: &SymmetryGroup,
    n_lattice: usize,
    period: f64,
    amplitude: f64,
    rng_seed: u64,
) -> Result<EquivariantLoop, LoopError> {
    let n_bodies = group.n_bodies();
    let base = DiscreteLoop::from_fn(n_lattice, period, |t| {
        Configuration::new(
            (0..n_bodies)
                .map(|i| {
                    let a = TAU * t / period + TAU * i as f64 / n_bodies as f64;
                    Vec2::new(a.cos(), a.sin())
                })
                .collect(),
        )
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut fallback: Option<DiscreteLoop> = None;
    for _ in 0..64 {
        let candidate = if amplitude == 0.0 {
            symmetrize_nodes(&base, group)?
        } else {
            perturb(&base, group, &mut rng, amplitude)?
        };
        let sep = candidate.min_pairwise_distance();
        let diam = candidate.diameter();
        if sep > 1e-2 * diam && diam > 1e-9 {
            return symmetrize(&rescale_to_diameter(candidate, 2.0), group);
        }
        if fallback.is_none() {
            fallback = Some(candidate);
        }
        if amplitude == 0.0 {
            break;
        }
    }
    // no collision-free draw found; hand back the first projection
    let fallback = fallback.expect("at least one draw");
    symmetrize(&rescale_to_diameter(fallback, 2.0), group)
}

/// Rigid rescale to a reference diameter; the projection can cancel most of
/// the base circle for some groups, and a collapsed seed puts the descent
/// uncomfortably close to the collision set.
fn rescale_to_diameter(mut lp: DiscreteLoop, target: f64) -> DiscreteLoop {
    let diam = lp.diameter();
    if diam > 1e-12 {
        let s = target / diam;
        for node in lp.nodes_mut() {
            for p in &mut node.positions {
                *p *= s;
            }
        }
    }
    lp
}

/// Collinear-ordering predicate on one node of a loop: project `body` onto
/// the line through the `pair` and ask whether it falls outside (or inside)
/// the segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderSpec {
    /// 1-based index of the body whose position is tested.
    pub body: usize,
    /// 1-based indices of the reference pair.
    pub pair: (usize, usize),
    /// Require the projection to fall outside the segment (else inside).
    pub outside: bool,
    /// Lattice index of the node to test (the first reflection fixes node 0
    /// in the catalog scenarios).
    pub node: usize,
}

/// Evaluate an [`OrderSpec`] on a loop; used to reject restart seeds, never
/// to constrain descent.
pub fn ordering_constraint_filter(lp: &DiscreteLoop, order: &OrderSpec) -> bool {
    let cfg = lp.node(order.node);
    let a = cfg.positions[order.pair.0 - 1];
    let b = cfg.positions[order.pair.1 - 1];
    let p = cfg.positions[order.body - 1];
    let ab = b - a;
    let denom = ab.norm_squared().max(1e-300);
    let t = (p - a).dot(&ab) / denom;
    let between = (0.0..=1.0).contains(&t);
    if order.outside {
        !between
    } else {
        between
    }
}

struct Resolved {
    eta0: f64,
    grad_tol: f64,
    delta: f64,
    restart_mag: f64,
}

fn resolve(config: &MinimizerConfig, lp: &DiscreteLoop) -> Resolved {
    let diam = lp.diameter().max(1e-12);
    let n = lp.n_nodes() as f64;
    Resolved {
        eta0: config.initial_step.unwrap_or(1e-3 * lp.period() / n),
        grad_tol: config.grad_tolerance.unwrap_or(1e-8 * n),
        delta: config.collision_distance.unwrap_or(1e-4 * diam),
        restart_mag: config.restart_magnitude.unwrap_or(5e-2 * diam),
    }
}

/// Minimise the discrete action over the equivariant loops of `group`.
///
/// Refuses non-coercive groups. With a plain (`epsilon = 0`) potential the
/// run aborts when an accepted iterate develops a close approach below the
/// collision distance; with a strong-force term the approach is recorded and
/// the descent continues (the action blows up near collisions, so descent
/// itself steers away). Returns the best iterate; `NoConvergence` carries the
/// partial result.
pub fn minimize(
    group: &SymmetryGroup,
    spec: &PotentialSpec,
    config: &MinimizerConfig,
    seed_loop: Option<&DiscreteLoop>,
) -> Result<MinimizationResult, MinimizeError> {
    if !is_coercive(group) {
        return Err(MinimizeError::NotCoercive);
    }
    let masses = group.masses().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed.wrapping_add(1));
    let mut x = match seed_loop {
        Some(seed) => symmetrize(seed, group)?.into_loop(),
        None => random_equivariant_loop(group, 240, TAU, 0.3, config.rng_seed)?.into_loop(),
    };
    let params = resolve(config, &x);
    let mut action = discrete_action(&x, &masses, spec)?;
    let mut eta = params.eta0;
    let mut best = (x.clone(), action);
    let mut trace = vec![action];
    let mut restart_points = Vec::new();
    let mut restarts = 0usize;
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0usize;
    let eta_floor = params.eta0 * 1e-14;

    while iterations < config.max_iterations {
        iterations += 1;
        let grad = symmetrize_nodes(&action_gradient(&x, &masses, spec)?, group)?;
        grad_norm = gradient_norm(&grad);
        if config.log_progress && iterations % 1000 == 0 {
            eprintln!(
                "iter {iterations} action {action:.12} grad {grad_norm:.3e} min_dist {:.3e}",
                x.min_pairwise_distance()
            );
        }
        if grad_norm < params.grad_tol {
            converged = true;
            break;
        }
        // backtracking line search on a strict decrease
        let mut stepped = false;
        let mut eta_try = eta;
        while eta_try > eta_floor {
            let candidate = step_along(&x, &grad, eta_try, &masses);
            match discrete_action(&candidate, &masses, spec) {
                Ok(a_new) if a_new < action => {
                    x = symmetrize_nodes(&candidate, group)?;
                    action = discrete_action(&x, &masses, spec)?;
                    eta = (eta_try * 1.5).min(params.eta0 * 1e6);
                    stepped = true;
                    break;
                }
                _ => eta_try *= 0.5,
            }
        }
        if stepped {
            trace.push(action);
            if action < best.1 {
                best = (x.clone(), action);
            }
            let min_dist = x.min_pairwise_distance();
            if min_dist < params.delta && spec.strong_force_epsilon == 0.0 {
                return Err(MinimizeError::CollisionEncountered {
                    min_dist,
                    iteration: iterations,
                });
            }
        }
        // stall detection over the trailing window
        let w = config.stall_window;
        let stalled = !stepped
            || (trace.len() > w && {
                let past = trace[trace.len() - 1 - w];
                (past - action) < config.stall_threshold * action.abs().max(1.0)
            });
        if stalled {
            if restarts < config.max_restarts {
                restarts += 1;
                x = perturb(&best.0, group, &mut rng, params.restart_mag)?;
                action = discrete_action(&x, &masses, spec)?;
                eta = params.eta0;
                restart_points.push(trace.len());
                trace.push(action);
            } else if !stepped {
                // restarts exhausted and the line search cannot move: the
                // action has hit its floating-point floor
                break;
            }
            // otherwise keep descending towards the gradient tolerance
        }
    }

    if !converged && action > best.1 {
        x = best.0.clone();
        action = best.1;
        grad_norm = gradient_norm(&symmetrize_nodes(&action_gradient(&x, &masses, spec)?, group)?);
    }
    let min_pairwise_distance = x.min_pairwise_distance();
    let result = MinimizationResult {
        orbit: EquivariantLoop::validate(x, group)?,
        action,
        grad_norm,
        collision_free: min_pairwise_distance >= params.delta,
        min_pairwise_distance,
        restarts_used: restarts,
        iterations,
        converged,
        action_trace: trace,
        restart_points,
    };
    if converged {
        Ok(result)
    } else {
        Err(MinimizeError::NoConvergence(Box::new(result)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::{
        generate_group, time_reflection_generator, Permutation, PlanarIsometry,
    };
    use std::f64::consts::PI;

    fn d3_group() -> SymmetryGroup {
        let p = |c: &[&[usize]]| Permutation::from_cycles(3, c).unwrap();
        generate_group(
            &[
                time_reflection_generator(0.0, PlanarIsometry::rotation(PI), p(&[&[1, 2]])),
                time_reflection_generator(PI / 3.0, PlanarIsometry::rotation(PI), p(&[&[2, 3]])),
            ],
            &MassVector::equal(3),
        )
        .unwrap()
    }

    fn non_coercive_group() -> SymmetryGroup {
        let p = |c: &[&[usize]]| Permutation::from_cycles(3, c).unwrap();
        generate_group(
            &[
                time_reflection_generator(0.0, PlanarIsometry::rotation(PI), p(&[&[1, 2]])),
                time_reflection_generator(PI / 4.0, PlanarIsometry::rotation(PI), p(&[&[1, 2]])),
            ],
            &MassVector::new(vec![1.0, 1.0, 2.0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn refuses_non_coercive_groups() {
        let g = non_coercive_group();
        let err = minimize(&g, &PotentialSpec::newtonian(), &MinimizerConfig::default(), None);
        assert!(matches!(err, Err(MinimizeError::NotCoercive)));
    }

    #[test]
    fn random_loop_is_deterministic_and_equivariant() {
        let g = d3_group();
        let a = random_equivariant_loop(&g, 24, TAU, 0.2, 7).unwrap();
        let b = random_equivariant_loop(&g, 24, TAU, 0.2, 7).unwrap();
        assert_eq!(a.as_loop().max_node_distance(b.as_loop()), 0.0);
        let c = random_equivariant_loop(&g, 24, TAU, 0.2, 8).unwrap();
        assert!(a.as_loop().max_node_distance(c.as_loop()) > 0.0);
    }

    #[test]
    fn zero_amplitude_seed_is_the_symmetrized_circle() {
        let g = d3_group();
        let a = random_equivariant_loop(&g, 24, TAU, 0.0, 1).unwrap();
        let b = random_equivariant_loop(&g, 24, TAU, 0.0, 999).unwrap();
        assert_eq!(a.as_loop().max_node_distance(b.as_loop()), 0.0);
    }

    #[test]
    fn short_descent_is_monotone_between_restarts() {
        let g = d3_group();
        let config = MinimizerConfig {
            max_iterations: 400,
            max_restarts: 2,
            rng_seed: 3,
            ..MinimizerConfig::default()
        };
        let seed = random_equivariant_loop(&g, 48, TAU, 0.2, 3).unwrap();
        let out = minimize(&g, &PotentialSpec::strong_force(1e-3), &config, Some(seed.as_loop()));
        let result = match out {
            Ok(r) => r,
            Err(MinimizeError::NoConvergence(r)) => *r,
            Err(e) => panic!("unexpected error {e}"),
        };
        for (idx, pair) in result.action_trace.windows(2).enumerate() {
            if !result.restart_points.contains(&(idx + 1)) {
                assert!(pair[1] <= pair[0] + 1e-12, "increase at step {idx}");
            }
        }
        assert!(result.action <= result.action_trace[0]);
    }

    #[test]
    fn descent_from_a_seed_never_exceeds_the_seed_action() {
        let g = d3_group();
        let seed = random_equivariant_loop(&g, 48, TAU, 0.1, 11).unwrap();
        let masses = MassVector::equal(3);
        let spec = PotentialSpec::strong_force(1e-3);
        let seed_action = discrete_action(seed.as_loop(), &masses, &spec).unwrap();
        let config = MinimizerConfig {
            max_iterations: 300,
            max_restarts: 0,
            rng_seed: 11,
            ..MinimizerConfig::default()
        };
        let out = minimize(&g, &spec, &config, Some(seed.as_loop()));
        let result = match out {
            Ok(r) => r,
            Err(MinimizeError::NoConvergence(r)) => *r,
            Err(e) => panic!("unexpected error {e}"),
        };
        assert!(result.action <= seed_action);
    }

    #[test]
    fn ordering_filter_basic_cases() {
        let masses = MassVector::equal(3);
        let mut cfg = Configuration::new(vec![
            Vec2::new(-1.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(3.0, 0.1),
        ]);
        cfg.project_center_of_mass(&masses);
        let lp = DiscreteLoop::constant(cfg, 4, TAU).unwrap();
        let spec = OrderSpec { body: 3, pair: (1, 2), outside: true, node: 0 };
        assert!(ordering_constraint_filter(&lp, &spec));
        let mut cfg2 = Configuration::new(vec![
            Vec2::new(-1.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 0.1),
        ]);
        cfg2.project_center_of_mass(&masses);
        let lp2 = DiscreteLoop::constant(cfg2, 4, TAU).unwrap();
        assert!(!ordering_constraint_filter(&lp2, &spec));
    }

    #[test]
    fn ordering_filter_accepts_outside_seed_family() {
        // collinear seeds with body 3 strictly beyond the 1-2 segment
        let masses = MassVector::equal(3);
        for gap in [0.5, 1.0, 2.0] {
            let mut cfg = Configuration::new(vec![
                Vec2::new(-1.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0 + gap, 0.0),
            ]);
            cfg.project_center_of_mass(&masses);
            let lp = DiscreteLoop::constant(cfg, 4, TAU).unwrap();
            let spec = OrderSpec { body: 3, pair: (1, 2), outside: true, node: 0 };
            assert!(ordering_constraint_filter(&lp, &spec));
        }
    }
}
