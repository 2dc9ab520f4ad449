//! Independent verification of candidate orbits.
//!
//! Three checks that do not share code paths with the minimiser:
//! - [`newton_residual`]: the second-difference stencil against the force,
//!   `m_i (x_{j+1} - 2 x_j + x_{j-1}) / dt^2 - force_i(x_j)`. This equals
//!   `-grad A / dt` node-wise, and decays at second order in `1/N` on smooth
//!   solutions.
//! - [`shoot_periodicity`]: integrate the exact equations of motion for one
//!   period with an adaptive embedded Runge-Kutta pair and measure the
//!   phase-space mismatch.
//! - [`classify`]: choreography (one curve, cyclic time offsets), homographic
//!   (constant shape up to rotation and scale) or nontrivial.

use crate::lagrangian::{
    force, moment_of_inertia, Configuration, LagrangianError, MassVector, PotentialSpec,
};
use crate::loopspace::{
    action_gradient, discrete_action, gradient_norm, symmetrize_nodes, DiscreteLoop, LoopError,
};
use crate::planar::Vec2;
use crate::symmetry::SymmetryGroup;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Collision(#[from] LagrangianError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error("integration reached a close approach ({min_dist:.3e}) at t = {t:.6}")]
    IntegrationBlowup { t: f64, min_dist: f64 },
    #[error("step size underflow in the adaptive integrator at t = {0:.6}")]
    StepUnderflow(f64),
}

/// Node-wise stencil residual and its mass-weighted RMS norm.
#[derive(Debug, Clone)]
pub struct ResidualField {
    pub per_node: Vec<Vec<Vec2>>,
    /// `sqrt( sum_{j,i} m_i |r_{j,i}|^2 / (N sum_i m_i) )`
    pub norm: f64,
}

/// Discrete Newton residual of a loop.
pub fn newton_residual(
    lp: &DiscreteLoop,
    masses: &MassVector,
    spec: &PotentialSpec,
) -> Result<ResidualField, VerifyError> {
    let n = lp.n_nodes();
    let dt = lp.dt();
    let mut per_node = Vec::with_capacity(n);
    let mut acc = 0.0;
    for j in 0..n {
        let prev = lp.node(j + n - 1);
        let here = lp.node(j);
        let next = lp.node(j + 1);
        let f = force(here, masses, spec)?;
        let mut row = Vec::with_capacity(lp.n_bodies());
        for i in 0..lp.n_bodies() {
            let m = masses.get(i);
            let stencil =
                (next.positions[i] - 2.0 * here.positions[i] + prev.positions[i]) / (dt * dt);
            let r = m * stencil - f[i];
            acc += m * r.norm_squared();
            row.push(r);
        }
        per_node.push(row);
    }
    let norm = (acc / (n as f64 * masses.total())).sqrt();
    Ok(ResidualField { per_node, norm })
}

// ---------------------------------------------------------------------------
// Shooting
// ---------------------------------------------------------------------------

/// Phase-space state: positions followed by velocities.
#[derive(Debug, Clone)]
pub struct State {
    pub positions: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
}

fn derivative(
    state: &State,
    masses: &MassVector,
    spec: &PotentialSpec,
) -> Result<State, LagrangianError> {
    let cfg = Configuration::new(state.positions.clone());
    let f = force(&cfg, masses, spec)?;
    Ok(State {
        positions: state.velocities.clone(),
        velocities: f
            .iter()
            .zip(masses.iter())
            .map(|(fi, m)| fi / m)
            .collect(),
    })
}

fn state_axpy(a: &State, pairs: &[(f64, &State)]) -> State {
    let mut out = a.clone();
    for (c, s) in pairs {
        for (p, q) in out.positions.iter_mut().zip(s.positions.iter()) {
            *p += *c * q;
        }
        for (p, q) in out.velocities.iter_mut().zip(s.velocities.iter()) {
            *p += *c * q;
        }
    }
    out
}

fn state_dist(a: &State, b: &State) -> f64 {
    let mut acc = 0.0;
    for (p, q) in a.positions.iter().zip(b.positions.iter()) {
        acc += (p - q).norm_squared();
    }
    for (p, q) in a.velocities.iter().zip(b.velocities.iter()) {
        acc += (p - q).norm_squared();
    }
    acc.sqrt()
}

// Dormand-Prince 5(4) coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate the exact equations of motion from `state` over `duration` with
/// local error control at `tol`, guarding against approaches below
/// `min_distance`.
pub fn integrate(
    state: &State,
    masses: &MassVector,
    spec: &PotentialSpec,
    duration: f64,
    tol: f64,
    min_distance: f64,
) -> Result<State, VerifyError> {
    let mut y = state.clone();
    let mut t = 0.0;
    let mut h = duration / 100.0;
    let scale = y
        .positions
        .iter()
        .map(|p| p.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    while t < duration {
        if h < 1e-14 * duration {
            return Err(VerifyError::StepUnderflow(t));
        }
        h = h.min(duration - t);
        let mut k: Vec<State> = Vec::with_capacity(7);
        k.push(derivative(&y, masses, spec).map_err(|e| blowup(e, t))?);
        for s in 1..7 {
            let pairs: Vec<(f64, &State)> = (0..s)
                .filter(|&j| A[s - 1][j] != 0.0)
                .map(|j| (h * A[s - 1][j], &k[j]))
                .collect();
            let ys = state_axpy(&y, &pairs);
            let _ = C; // stage times are implicit for an autonomous system
            k.push(derivative(&ys, masses, spec).map_err(|e| blowup(e, t))?);
        }
        let y5 = state_axpy(
            &y,
            &(0..7)
                .filter(|&j| B5[j] != 0.0)
                .map(|j| (h * B5[j], &k[j]))
                .collect::<Vec<_>>(),
        );
        let y4 = state_axpy(
            &y,
            &(0..7)
                .filter(|&j| B4[j] != 0.0)
                .map(|j| (h * B4[j], &k[j]))
                .collect::<Vec<_>>(),
        );
        let err = state_dist(&y5, &y4) / (tol * scale);
        if err <= 1.0 {
            t += h;
            y = y5;
            let cfg = Configuration::new(y.positions.clone());
            let d = cfg.min_pairwise_distance();
            if d < min_distance {
                return Err(VerifyError::IntegrationBlowup { t, min_dist: d });
            }
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }
    Ok(y)
}

fn blowup(e: LagrangianError, t: f64) -> VerifyError {
    match e {
        LagrangianError::CollisionSingularity { dist, .. } => {
            VerifyError::IntegrationBlowup { t, min_dist: dist }
        }
        other => VerifyError::Collision(other),
    }
}

/// Integrate from an explicit phase-space state for `period` and return the
/// start/end mismatch normalised by `diameter`.
pub fn shoot_from_state(
    state: &State,
    masses: &MassVector,
    spec: &PotentialSpec,
    period: f64,
    tol: f64,
    diameter: f64,
) -> Result<f64, VerifyError> {
    let min_distance = 1e-9 * diameter.max(1e-12);
    let end = integrate(state, masses, spec, period, tol, min_distance)?;
    Ok(state_dist(state, &end) / diameter.max(1e-12))
}

/// Shoot from node 0 of a loop, with the piecewise-linear velocity of the
/// first segment as the initial velocity.
///
/// The chord velocity differs from the true velocity of a smooth solution at
/// first order in `1/N`, so for sampled solutions this residual measures the
/// sampling, not the integrator; feed [`shoot_from_state`] exact velocities
/// to measure the integrator.
pub fn shoot_periodicity(
    lp: &DiscreteLoop,
    masses: &MassVector,
    spec: &PotentialSpec,
    tol: f64,
) -> Result<f64, VerifyError> {
    let dt = lp.dt();
    let state = State {
        positions: lp.node(0).positions.clone(),
        velocities: lp
            .node(1)
            .positions
            .iter()
            .zip(lp.node(0).positions.iter())
            .map(|(b, a)| (b - a) / dt)
            .collect(),
    };
    shoot_from_state(&state, masses, spec, lp.period(), tol, lp.diameter())
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Choreography,
    Homographic,
    Nontrivial,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Choreography => "choreography",
            Classification::Homographic => "homographic",
            Classification::Nontrivial => "nontrivial",
        };
        f.write_str(s)
    }
}

/// Default relative tolerance for [`classify`]; classification is a coarse
/// label on approximate minimisers, far looser than the descent tolerance.
pub const CLASSIFY_TOL: f64 = 1e-3;

fn choreography_shift(lp: &DiscreteLoop, tol_abs: f64) -> Option<usize> {
    let n_bodies = lp.n_bodies();
    let n = lp.n_nodes();
    if n_bodies < 2 || n % n_bodies != 0 {
        return None;
    }
    let s = n / n_bodies;
    // map each body i to the body tracing the same curve s steps later
    let mut image = vec![usize::MAX; n_bodies];
    for i in 0..n_bodies {
        'cand: for cand in 0..n_bodies {
            let mut worst: f64 = 0.0;
            for j in 0..n {
                let d = (lp.node(j + s).positions[cand] - lp.node(j).positions[i]).norm();
                worst = worst.max(d);
                if worst > tol_abs {
                    continue 'cand;
                }
            }
            image[i] = cand;
            break;
        }
        if image[i] == usize::MAX {
            return None;
        }
    }
    // must be a single n-cycle
    let mut seen = 1usize;
    let mut i = image[0];
    while i != 0 && seen <= n_bodies {
        i = image[i];
        seen += 1;
    }
    (seen == n_bodies).then_some(s)
}

/// Best rotation aligning `a` to `b` in the mass metric (planar Procrustes)
/// and the residual distance after alignment, both on inertia-normalised
/// configurations.
fn shape_distance(a: &Configuration, b: &Configuration, masses: &MassVector) -> f64 {
    let ia = moment_of_inertia(a, masses).sqrt().max(1e-300);
    let ib = moment_of_inertia(b, masses).sqrt().max(1e-300);
    // optimal rotation maximises sum_i m_i <R a_i, b_i>; in complex form
    // R = w / |w| with w = sum_i m_i conj(a_i) b_i
    let (mut wr, mut wi) = (0.0, 0.0);
    for ((pa, pb), m) in a.positions.iter().zip(b.positions.iter()).zip(masses.iter()) {
        let (ax, ay) = (pa.x / ia, pa.y / ia);
        let (bx, by) = (pb.x / ib, pb.y / ib);
        wr += m * (ax * bx + ay * by);
        wi += m * (ax * by - ay * bx);
    }
    let wn = (wr * wr + wi * wi).sqrt().max(1e-300);
    let (cr, ci) = (wr / wn, wi / wn);
    let mut acc = 0.0;
    for ((pa, pb), m) in a.positions.iter().zip(b.positions.iter()).zip(masses.iter()) {
        let (ax, ay) = (pa.x / ia, pa.y / ia);
        let rx = cr * ax - ci * ay;
        let ry = ci * ax + cr * ay;
        acc += m * ((rx - pb.x / ib).powi(2) + (ry - pb.y / ib).powi(2));
    }
    acc.sqrt()
}

/// Largest inertia-normalised, rotation-aligned shape distance of any node to
/// node 0.
pub fn max_shape_distance(lp: &DiscreteLoop, masses: &MassVector) -> f64 {
    let reference = lp.node(0);
    lp.nodes()
        .iter()
        .map(|node| shape_distance(reference, node, masses))
        .fold(0.0, f64::max)
}

/// Classify a loop as a choreography, a homographic motion, or neither,
/// together with the lattice shift of the choreography when one exists.
pub fn classify(
    lp: &DiscreteLoop,
    masses: &MassVector,
    tolerance: f64,
) -> (Classification, Option<usize>) {
    let equal_masses = masses
        .iter()
        .all(|m| (m - masses.get(0)).abs() < 1e-12 * masses.get(0));
    if equal_masses {
        if let Some(s) = choreography_shift(lp, tolerance * lp.diameter().max(1e-300)) {
            return (Classification::Choreography, Some(s));
        }
    }
    if max_shape_distance(lp, masses) < tolerance {
        return (Classification::Homographic, None);
    }
    (Classification::Nontrivial, None)
}

// ---------------------------------------------------------------------------
// Polishing and reports
// ---------------------------------------------------------------------------

/// Drive the discrete action gradient further down by plain backtracking
/// descent, optionally inside an equivariance class. Intended for polishing
/// minimiser outputs (descent cannot polish saddle-type solutions; rigid
/// rotations get their lattice-exact form from `estimates`).
pub fn refine(
    lp: &DiscreteLoop,
    group: Option<&SymmetryGroup>,
    masses: &MassVector,
    spec: &PotentialSpec,
    grad_tol: f64,
    max_iterations: usize,
) -> Result<(DiscreteLoop, f64), VerifyError> {
    let mut x = lp.clone();
    let mut action = discrete_action(&x, masses, spec)?;
    let mut eta = 1e-3 * x.period() / x.n_nodes() as f64;
    let mut gnorm = f64::INFINITY;
    for _ in 0..max_iterations {
        let mut grad = action_gradient(&x, masses, spec)?;
        if let Some(g) = group {
            grad = symmetrize_nodes(&grad, g)?;
        }
        gnorm = gradient_norm(&grad);
        if gnorm < grad_tol {
            break;
        }
        let mut eta_try = eta;
        let mut stepped = false;
        while eta_try > 1e-18 {
            let mut nodes = x.nodes().to_vec();
            for (node, gnode) in nodes.iter_mut().zip(grad.nodes().iter()) {
                for (p, gp) in node.positions.iter_mut().zip(gnode.positions.iter()) {
                    *p -= eta_try * gp;
                }
                node.project_center_of_mass(masses);
            }
            let candidate = DiscreteLoop::new(nodes, x.period())?;
            if let Ok(a_new) = discrete_action(&candidate, masses, spec) {
                if a_new < action {
                    x = candidate;
                    action = a_new;
                    eta = eta_try * 1.5;
                    stepped = true;
                    break;
                }
            }
            eta_try *= 0.5;
        }
        if !stepped {
            break;
        }
    }
    Ok((x, gnorm))
}

/// Summary report for one candidate orbit.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub newton_residual_norm: f64,
    /// Present only when a refinement pass was run.
    pub residual_after_refine: Option<f64>,
    pub periodicity_residual: Option<f64>,
    pub classification: Classification,
    pub choreography_shift: Option<usize>,
    pub min_distance: f64,
}

/// Options for [`report`].
#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub shoot_tolerance: Option<f64>,
    pub classify_tolerance: f64,
    pub refine_iterations: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { shoot_tolerance: Some(1e-10), classify_tolerance: CLASSIFY_TOL, refine_iterations: 0 }
    }
}

/// Run every verification check on a loop.
pub fn report(
    lp: &DiscreteLoop,
    masses: &MassVector,
    spec: &PotentialSpec,
    opts: &ReportOptions,
) -> Result<VerificationReport, VerifyError> {
    let residual = newton_residual(lp, masses, spec)?;
    let residual_after_refine = if opts.refine_iterations > 0 {
        let (polished, _) = refine(lp, None, masses, spec, 0.0, opts.refine_iterations)?;
        Some(newton_residual(&polished, masses, spec)?.norm)
    } else {
        None
    };
    let periodicity_residual = match opts.shoot_tolerance {
        Some(tol) => match shoot_periodicity(lp, masses, spec, tol) {
            Ok(r) => Some(r),
            Err(VerifyError::IntegrationBlowup { .. }) => None,
            Err(e) => return Err(e),
        },
        None => None,
    };
    let (classification, choreography_shift) = classify(lp, masses, opts.classify_tolerance);
    Ok(VerificationReport {
        newton_residual_norm: residual.norm,
        residual_after_refine,
        periodicity_residual,
        classification,
        choreography_shift,
        min_distance: lp.min_pairwise_distance(),
    })
}
