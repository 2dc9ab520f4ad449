//! Closed-form level estimates for the three-body family with two equal
//! masses, and numerically derived homographic baselines.
//!
//! The comparison path sends bodies 1 and 2 along
//! `l e^{i th t} ± (r0 + c t) e^{i (th - pi/2) t}` and body 3 along
//! `-(2l/m) e^{i th t}` for `t` in `[0, 1]`; its action is bounded above by
//! the sum of the closed-form kinetic terms and the potential-term upper
//! bounds ([`kinetic_terms`], [`potential_terms`]). Comparing the bound with
//! the collinear rotating-solution action [`euler_action`] certifies, when
//! the difference is negative, that the constrained minimiser is not
//! homographic; [`in_domain_d`] scans the parameter box for such a witness.
//!
//! Two evaluations of the difference are provided on purpose.
//! [`difference`] assembles the closed-form terms exactly as stated, and at
//! the reference point `(m, th, l, r0, c) = (2, pi/8, 1, 0.4, 0.3)` it
//! reproduces the reference witness value `-0.124390105`. [`difference_simplified`]
//! evaluates the algebraically simplified expression; the two differ by
//! exactly `2 l^2 th (1 - th) / m` because the per-body term [`kinetic_terms`]
//! returns for body 3 carries `th` where the simplified form carries `th^2`.
//! Direct quadrature of the sampled path sides with the simplified form (see
//! the tests), so the assembled value is kept as the reference evaluation and
//! the simplified one as the tighter analytic value. Both are negative on the
//! domain of interest, so membership verdicts agree.

mod homographic;

pub use homographic::{
    homographic_baseline, lattice_corrected_baseline, Baseline, CentralShape,
};

use crate::lagrangian::{Configuration, MassVector};
use crate::loopspace::BolzaPath;
use crate::planar::Vec2;
use crate::symmetry::{fixed_config_subspace, GroupElement, Permutation, PlanarIsometry, TimeAction};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatesError {
    #[error("invalid test path parameters: {0}")]
    BadParams(String),
    #[error("angle must lie in (0, pi/2), got {0}")]
    DomainError(f64),
    #[error("shape {shape:?} requires {requirement}, got masses {masses:?}")]
    ShapeMassMismatch { shape: CentralShape, requirement: &'static str, masses: Vec<f64> },
    #[error("rigid rotation by omega {omega} does not close over period {period}")]
    NonClosingRotation { omega: f64, period: f64 },
    #[error("central configuration solve failed: {0}")]
    CentralSolveFailed(String),
}

/// Parameters of the comparison path: mass of body 3, the angle between the
/// two boundary lines, and the geometry constants `l > r0 > 0`, `l > c > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestPathParams {
    pub m: f64,
    pub theta: f64,
    pub ell: f64,
    pub r0: f64,
    pub c: f64,
}

impl TestPathParams {
    pub fn new(m: f64, theta: f64, ell: f64, r0: f64, c: f64) -> Result<Self, EstimatesError> {
        let p = Self { m, theta, ell, r0, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), EstimatesError> {
        if !(self.m > 0.0) {
            return Err(EstimatesError::BadParams(format!("m = {} <= 0", self.m)));
        }
        if !(self.theta > 0.0 && self.theta < PI / 2.0) {
            return Err(EstimatesError::BadParams(format!(
                "theta = {} outside (0, pi/2)",
                self.theta
            )));
        }
        if !(self.ell > self.r0 && self.r0 > 0.0) {
            return Err(EstimatesError::BadParams(format!(
                "need ell > r0 > 0, got ell = {}, r0 = {}",
                self.ell, self.r0
            )));
        }
        if !(self.ell > self.c && self.c > 0.0) {
            return Err(EstimatesError::BadParams(format!(
                "need ell > c > 0, got ell = {}, c = {}",
                self.ell, self.c
            )));
        }
        Ok(())
    }
}

/// All level-estimate terms at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelEstimate {
    pub k12: f64,
    pub k3: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    /// `k12 + k3 + u1 + u2 + u3`
    pub a_d: f64,
    pub a_e: f64,
    /// `a_d - a_e`
    pub difference: f64,
}

/// Kinetic contributions `(K1 + K2, K3)` of the comparison path.
pub fn kinetic_terms(p: &TestPathParams) -> (f64, f64) {
    let (c, r0, th, l) = (p.c, p.r0, p.theta, p.ell);
    let k12 = c * c * PI * PI / 12.0
        + r0 * r0 * PI * PI / 4.0
        + r0 * th * th * c
        - c * r0 * th * PI
        + c * c
        + c * c * th * th / 3.0
        - r0 * r0 * th * PI
        + l * l * th * th
        - c * c * th * PI / 3.0
        + r0 * r0 * th * th
        + r0 * PI * PI * c / 4.0;
    let k3 = 2.0 * l * l * th / p.m;
    (k12, k3)
}

/// Potential contributions `(U1, U2, U3)`: the 2-3 and 1-3 interaction upper
/// bounds and the exact 1-2 integral.
pub fn potential_terms(p: &TestPathParams) -> (f64, f64, f64) {
    let (c, r0, l, m) = (p.c, p.r0, p.ell, p.m);
    let u1 = m * m / (m * (l - r0) + 2.0 * l);
    let u2 = m / ((r0 + c).powi(2) + l * l * (1.0 + 2.0 / m).powi(2)).sqrt();
    let u3 = 1.0 / (2.0 * c) * (1.0 + c / r0).ln();
    (u1, u2, u3)
}

/// Action of the collinear rotating solution with body 3 at the centre of
/// mass, `A_E = (3/2) [ (1/2 + 2m)^2 (pi/2 - th) ]^(1/3)`.
pub fn euler_action(m: f64, theta: f64) -> Result<f64, EstimatesError> {
    if !(theta < PI / 2.0) {
        return Err(EstimatesError::DomainError(theta));
    }
    if !(m > 0.0) {
        return Err(EstimatesError::BadParams(format!("m = {m} <= 0")));
    }
    Ok(1.5 * ((0.5 + 2.0 * m).powi(2) * (PI / 2.0 - theta)).cbrt())
}

/// Assemble every term of the estimate at `p`.
pub fn level_estimate(p: &TestPathParams) -> LevelEstimate {
    let (k12, k3) = kinetic_terms(p);
    let (u1, u2, u3) = potential_terms(p);
    let a_d = k12 + k3 + u1 + u2 + u3;
    let a_e = euler_action(p.m, p.theta).expect("params validated");
    LevelEstimate { k12, k3, u1, u2, u3, a_d, a_e, difference: a_d - a_e }
}

/// `A_D - A_E` assembled from the component terms. Negative values certify
/// `(m, theta)` membership in the domain of non-homographic minimisers.
pub fn difference(p: &TestPathParams) -> f64 {
    level_estimate(p).difference
}

/// The algebraically simplified form of the difference; see the module notes
/// for how it relates to [`difference`].
pub fn difference_simplified(p: &TestPathParams) -> f64 {
    let (m, th, l, r0, c) = (p.m, p.theta, p.ell, p.r0, p.c);
    l * l * th * th * (1.0 + 2.0 / m)
        + c * c
        + (3.0 * r0 * r0 + c * c + 3.0 * c * r0) * (PI - 2.0 * th).powi(2) / 12.0
        + m * m / (m * (l - r0) + 2.0 * l)
        + m / ((r0 + c).powi(2) + l * l * (1.0 + 2.0 / m).powi(2)).sqrt()
        + 1.0 / (2.0 * c) * (1.0 + c / r0).ln()
        - 1.5 * ((0.5 + 2.0 * m).powi(2) * (PI / 2.0 - th)).cbrt()
}

/// Grid-then-refine settings for [`in_domain_d`].
#[derive(Debug, Clone, Copy)]
pub struct DomainScan {
    pub ell_min: f64,
    pub ell_max: f64,
    /// Grid points per axis.
    pub grid: usize,
    /// Coordinate-descent refinement steps after the grid stage.
    pub refine_steps: usize,
}

impl Default for DomainScan {
    fn default() -> Self {
        Self { ell_min: 0.05, ell_max: 5.0, grid: 40, refine_steps: 200 }
    }
}

/// Search `(ell, r0, c)` for a negative difference at `(m, theta)`.
///
/// Returns the witness when one is found. A `false` answer means the scan
/// found nothing, not a proof of non-membership.
pub fn in_domain_d(m: f64, theta: f64, scan: &DomainScan) -> (bool, Option<TestPathParams>) {
    let mut best_val = f64::INFINITY;
    let mut best: Option<TestPathParams> = None;
    let g = scan.grid;
    for ie in 0..g {
        let ell = scan.ell_min + (scan.ell_max - scan.ell_min) * ie as f64 / (g - 1) as f64;
        for ir in 0..g {
            let r0 = ell * (ir + 1) as f64 / (g + 1) as f64;
            for ic in 0..g {
                let c = ell * (ic + 1) as f64 / (g + 1) as f64;
                if let Ok(p) = TestPathParams::new(m, theta, ell, r0, c) {
                    let v = difference(&p);
                    if v < best_val {
                        best_val = v;
                        best = Some(p);
                    }
                }
            }
        }
    }
    let Some(mut p) = best else {
        return (false, None);
    };
    // compass-style coordinate descent with shrinking steps
    let mut steps = [
        (scan.ell_max - scan.ell_min) / g as f64,
        p.ell / g as f64,
        p.ell / g as f64,
    ];
    for _ in 0..scan.refine_steps {
        let mut improved = false;
        for coord in 0..3 {
            for dir in [-1.0, 1.0] {
                let mut q = p;
                match coord {
                    0 => q.ell += dir * steps[0],
                    1 => q.r0 += dir * steps[1],
                    _ => q.c += dir * steps[2],
                }
                if q.validate().is_ok() {
                    let v = difference(&q);
                    if v < best_val {
                        best_val = v;
                        p = q;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            for s in &mut steps {
                *s *= 0.6;
            }
        }
    }
    if best_val < 0.0 {
        (true, Some(p))
    } else {
        (false, None)
    }
}

/// Sample the comparison path on `segments` segments.
///
/// The trajectories are traversed over the unit parameter interval and the
/// path is given the stated `duration`; the closed-form terms correspond to
/// `duration = 1`. Endpoint bases: at the start the three bodies are
/// collinear on the horizontal axis (reflection with trivial permutation),
/// at the end bodies 1 and 2 are exchanged by the reflection across the line
/// at angle `theta` (with body 3 on it).
pub fn test_path_loop(p: &TestPathParams, segments: usize, duration: f64) -> BolzaPath {
    let masses = MassVector::new(vec![1.0, 1.0, p.m]).expect("m > 0");
    let nodes: Vec<Configuration> = (0..=segments)
        .map(|s| {
            let t = s as f64 / segments as f64;
            let carrier = Vec2::new((p.theta * t).cos(), (p.theta * t).sin());
            let sep_angle = (p.theta - PI / 2.0) * t;
            let sep = (p.r0 + p.c * t) * Vec2::new(sep_angle.cos(), sep_angle.sin());
            let x3 = -(2.0 * p.ell / p.m) * carrier;
            let mut cfg = Configuration::new(vec![
                p.ell * carrier + sep,
                p.ell * carrier - sep,
                x3,
            ]);
            cfg.project_center_of_mass(&masses);
            cfg
        })
        .collect();
    let id = GroupElement::identity(3);
    let h1 = GroupElement::new(
        TimeAction::reflection(0.0),
        PlanarIsometry::reflection(0.0),
        Permutation::identity(3),
    );
    let h2 = GroupElement::new(
        TimeAction::reflection(0.0),
        PlanarIsometry::reflection(p.theta),
        Permutation::from_cycles(3, &[&[1, 2]]).expect("valid cycle"),
    );
    let basis_start = fixed_config_subspace(&[id.clone(), h1], &masses).expect("subgroup");
    let basis_end = fixed_config_subspace(&[id, h2], &masses).expect("subgroup");
    BolzaPath::new(nodes, duration, basis_start, basis_end)
}
