//! Rigidly rotating central-configuration solutions, used as independent
//! comparison baselines.
//!
//! A central configuration satisfies `force_i = -mu m_i x_i` for a common
//! `mu > 0`; scaled so that `mu = omega^2` it rotates rigidly at angular
//! velocity `omega` and solves the equations of motion exactly.

use super::EstimatesError;
use crate::lagrangian::{force, Configuration, MassVector, PotentialSpec};
use crate::loopspace::{discrete_action, DiscreteLoop};
use crate::planar::{perp, rotation, Vec2};
use std::f64::consts::TAU;

/// Supported central-configuration shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralShape {
    /// Equilateral triangle, any three masses.
    LagrangeTriangle,
    /// Three collinear bodies with body 3 between bodies 1 and 2.
    EulerCollinear,
    /// Four equal masses on a square.
    Square,
    /// `n >= 2` equal masses on a regular polygon.
    RegularNgon(usize),
    /// Masses `(a, a, b, b)` on a rhombus with the pairs on the diagonals.
    Parallelogram,
}

/// A rigidly rotating solution sampled on a lattice.
#[derive(Debug, Clone)]
pub struct Baseline {
    pub orbit: DiscreteLoop,
    /// Discrete action of the sampled loop.
    pub action: f64,
    pub omega: f64,
    /// Exact configuration at `t = 0`.
    pub positions: Vec<Vec2>,
    /// Exact velocities at `t = 0`.
    pub velocities: Vec<Vec2>,
}

const CENTRAL_TOL: f64 = 1e-12;

fn unit_shape(
    shape: CentralShape,
    masses: &MassVector,
) -> Result<Vec<Vec2>, EstimatesError> {
    let mut positions = raw_unit_shape(shape, masses)?;
    let mut com = Vec2::zeros();
    for (p, m) in positions.iter().zip(masses.iter()) {
        com += m * p;
    }
    com /= masses.total();
    for p in &mut positions {
        *p -= com;
    }
    Ok(positions)
}

fn raw_unit_shape(
    shape: CentralShape,
    masses: &MassVector,
) -> Result<Vec<Vec2>, EstimatesError> {
    let mismatch = |requirement: &'static str| EstimatesError::ShapeMassMismatch {
        shape,
        requirement,
        masses: masses.iter().collect(),
    };
    let n = masses.len();
    let all_equal = masses.iter().all(|m| (m - masses.get(0)).abs() < 1e-12);
    match shape {
        CentralShape::LagrangeTriangle => {
            if n != 3 {
                return Err(mismatch("exactly 3 bodies"));
            }
            Ok((0..3)
                .map(|k| {
                    let a = TAU * k as f64 / 3.0 + TAU / 4.0;
                    Vec2::new(a.cos(), a.sin())
                })
                .collect())
        }
        CentralShape::EulerCollinear => {
            if n != 3 {
                return Err(mismatch("exactly 3 bodies"));
            }
            euler_collinear_shape(masses)
        }
        CentralShape::Square => {
            if n != 4 || !all_equal {
                return Err(mismatch("4 equal masses"));
            }
            Ok((0..4)
                .map(|k| {
                    let a = TAU * k as f64 / 4.0;
                    Vec2::new(a.cos(), a.sin())
                })
                .collect())
        }
        CentralShape::RegularNgon(ngon) => {
            if n != ngon || n < 2 || !all_equal {
                return Err(mismatch("n equal masses"));
            }
            Ok((0..n)
                .map(|k| {
                    let a = TAU * k as f64 / n as f64;
                    Vec2::new(a.cos(), a.sin())
                })
                .collect())
        }
        CentralShape::Parallelogram => {
            if n != 4
                || (masses.get(0) - masses.get(1)).abs() > 1e-12
                || (masses.get(2) - masses.get(3)).abs() > 1e-12
            {
                return Err(mismatch("masses (a, a, b, b)"));
            }
            parallelogram_shape(masses)
        }
    }
}

/// Per-body ratio `-(F_i . x_i) / (m_i |x_i|^2)` for every body away from the
/// origin; equal across those bodies for a central configuration.
fn central_ratios(
    positions: &[Vec2],
    masses: &MassVector,
) -> Result<Vec<(usize, f64)>, EstimatesError> {
    let cfg = Configuration::new(positions.to_vec());
    let f = force(&cfg, masses, &PotentialSpec::newtonian())
        .map_err(|e| EstimatesError::CentralSolveFailed(e.to_string()))?;
    Ok(positions
        .iter()
        .zip(f.iter())
        .zip(masses.iter())
        .enumerate()
        .filter(|(_, ((x, _), _))| x.norm() > 1e-9)
        .map(|(i, ((x, fi), m))| (i, -fi.dot(x) / (m * x.norm_squared())))
        .collect())
}

/// Ratio difference between two specific bodies, the bisection objective for
/// the one-parameter shape families.
fn ratio_gap(
    positions: &[Vec2],
    masses: &MassVector,
    body_a: usize,
    body_b: usize,
) -> Result<f64, EstimatesError> {
    let ratios = central_ratios(positions, masses)?;
    let get = |body: usize| {
        ratios
            .iter()
            .find(|(i, _)| *i == body)
            .map(|(_, r)| *r)
            .ok_or_else(|| {
                EstimatesError::CentralSolveFailed(format!("body {body} sits at the origin"))
            })
    };
    Ok(get(body_a)? - get(body_b)?)
}

fn mean_mu(positions: &[Vec2], masses: &MassVector) -> Result<f64, EstimatesError> {
    let ratios: Vec<f64> = central_ratios(positions, masses)?
        .into_iter()
        .map(|(_, r)| r)
        .collect();
    let mu = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios
        .iter()
        .map(|r| (r - mu).abs())
        .fold(0.0f64, f64::max);
    if spread > 1e-10 * mu.abs().max(1.0) {
        return Err(EstimatesError::CentralSolveFailed(format!(
            "shape is not central: ratio spread {spread:.3e}"
        )));
    }
    Ok(mu)
}

/// Bisection for the collinear shape with body 3 in the middle: positions
/// `(-a, d2 - a, ...)` scaled so the two outer separations have ratio `s`.
fn euler_collinear_shape(masses: &MassVector) -> Result<Vec<Vec2>, EstimatesError> {
    // place body 1 at 0, body 3 at 1, body 2 at 1 + s, then centre
    let build = |s: f64| -> Vec<Vec2> {
        let raw = [0.0, 1.0 + s, 1.0];
        let total: f64 = masses.total();
        let com: f64 = raw
            .iter()
            .zip(masses.iter())
            .map(|(x, m)| m * x)
            .sum::<f64>()
            / total;
        raw.iter().map(|x| Vec2::new(x - com, 0.0)).collect()
    };
    // compare the two outer bodies; the middle ratio follows from the force
    // and centre-of-mass identities
    let gap = |s: f64| -> Result<f64, EstimatesError> { ratio_gap(&build(s), masses, 0, 1) };
    let (mut lo, mut hi) = (1e-6, 1e6);
    let (glo, ghi) = (gap(lo)?, gap(hi)?);
    if glo.signum() == ghi.signum() {
        return Err(EstimatesError::CentralSolveFailed(
            "no sign change for the collinear ratio".into(),
        ));
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let gm = gap(mid)?;
        if gm.signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) / mid < CENTRAL_TOL {
            break;
        }
    }
    Ok(build((lo * hi).sqrt()))
}

/// Bisection for the rhombus with pair (1,2) on the horizontal diagonal and
/// pair (3,4) on the vertical one.
fn parallelogram_shape(masses: &MassVector) -> Result<Vec<Vec2>, EstimatesError> {
    let build = |q: f64| -> Vec<Vec2> {
        vec![
            Vec2::new(1.0, 0.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, q),
            Vec2::new(0.0, -q),
        ]
    };
    let gap = |q: f64| -> Result<f64, EstimatesError> { ratio_gap(&build(q), masses, 0, 2) };
    let (mut lo, mut hi) = (1e-3, 1e3);
    let (glo, ghi) = (gap(lo)?, gap(hi)?);
    if glo.signum() == ghi.signum() {
        return Err(EstimatesError::CentralSolveFailed(
            "no sign change for the rhombus ratio".into(),
        ));
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let gm = gap(mid)?;
        if gm.signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) / mid < CENTRAL_TOL {
            break;
        }
    }
    Ok(build((lo * hi).sqrt()))
}

fn build_baseline(
    shape: CentralShape,
    masses: &MassVector,
    n_lattice: usize,
    period: f64,
    omega: Option<f64>,
    lattice_corrected: bool,
) -> Result<Baseline, EstimatesError> {
    let omega = omega.unwrap_or(TAU / period);
    let turns = omega * period / TAU;
    if (turns - turns.round()).abs() > 1e-9 || turns.round() == 0.0 {
        return Err(EstimatesError::NonClosingRotation { omega, period });
    }
    let unit = unit_shape(shape, masses)?;
    let mu_unit = mean_mu(&unit, masses)?;
    // scale s so that mu(s) = mu_unit / s^3 matches the rotation rate; the
    // lattice-corrected variant balances against the chord stencil instead,
    // making the sampled loop an exact critical point of the discrete action
    let target = if lattice_corrected {
        let dt = period / n_lattice as f64;
        (2.0 * (omega * dt / 2.0).sin() / dt).powi(2)
    } else {
        omega * omega
    };
    let scale = (mu_unit / target).cbrt();
    let positions: Vec<Vec2> = unit.iter().map(|p| scale * p).collect();
    let velocities: Vec<Vec2> = positions.iter().map(|p| omega * perp(*p)).collect();
    let dt = period / n_lattice as f64;
    let nodes = (0..n_lattice)
        .map(|j| {
            let rot = rotation(omega * dt * j as f64);
            Configuration::new(positions.iter().map(|p| rot * p).collect())
        })
        .collect();
    let orbit = DiscreteLoop::new(nodes, period)
        .map_err(|e| EstimatesError::CentralSolveFailed(e.to_string()))?;
    let action = discrete_action(&orbit, masses, &PotentialSpec::newtonian())
        .map_err(|e| EstimatesError::CentralSolveFailed(e.to_string()))?;
    Ok(Baseline { orbit, action, omega, positions, velocities })
}

/// Rotating central-configuration loop sampled on the lattice.
///
/// When `omega` is `None`, the single rotation per period is used; among the
/// closing rates it minimises the action.
pub fn homographic_baseline(
    shape: CentralShape,
    masses: &MassVector,
    n_lattice: usize,
    period: f64,
    omega: Option<f64>,
) -> Result<Baseline, EstimatesError> {
    build_baseline(shape, masses, n_lattice, period, omega, false)
}

/// Like [`homographic_baseline`] but scaled against the discrete chord
/// stencil, so the sampled loop solves the lattice equations to rounding.
pub fn lattice_corrected_baseline(
    shape: CentralShape,
    masses: &MassVector,
    n_lattice: usize,
    period: f64,
    omega: Option<f64>,
) -> Result<Baseline, EstimatesError> {
    build_baseline(shape, masses, n_lattice, period, omega, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::moment_of_inertia;

    #[test]
    fn two_body_circle_matches_the_kepler_closed_form() {
        // unit masses, omega = 1: separation d with omega^2 = 2 / d^3,
        // continuum action (3/2) T U = 3 pi / d
        let masses = MassVector::equal(2);
        let b = homographic_baseline(CentralShape::RegularNgon(2), &masses, 4096, TAU, None)
            .unwrap();
        let d = 2.0f64.cbrt();
        let sep = (b.positions[0] - b.positions[1]).norm();
        assert!((sep - d).abs() < 1e-10, "separation {sep} vs {d}");
        let exact = 3.0 * std::f64::consts::PI / d;
        assert!((b.action - exact).abs() < 1e-4 * exact);
    }

    #[test]
    fn lagrange_triangle_balance() {
        let masses = MassVector::equal(3);
        let b =
            homographic_baseline(CentralShape::LagrangeTriangle, &masses, 240, TAU, None).unwrap();
        // force on each vertex points at the origin with magnitude omega^2 m r
        let cfg = Configuration::new(b.positions.clone());
        let f = force(&cfg, &masses, &PotentialSpec::newtonian()).unwrap();
        for (fi, xi) in f.iter().zip(b.positions.iter()) {
            let residual = (fi + b.omega * b.omega * xi).norm();
            assert!(residual < 1e-10, "central residual {residual:.3e}");
        }
        // continuum action 3 pi 3^(2/3) at T = 2 pi, discrete slightly below
        let exact = 3.0 * std::f64::consts::PI * 3.0f64.powf(2.0 / 3.0);
        assert!((b.action - exact).abs() < 2e-3 * exact);
        assert!(b.action < exact);
    }

    #[test]
    fn lagrange_triangle_with_unequal_masses_is_still_central() {
        let masses = MassVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        let b =
            homographic_baseline(CentralShape::LagrangeTriangle, &masses, 120, TAU, None).unwrap();
        let cfg = Configuration::new(b.positions.clone());
        assert!(cfg.has_zero_center_of_mass(&masses));
        let f = force(&cfg, &masses, &PotentialSpec::newtonian()).unwrap();
        for ((fi, xi), m) in f.iter().zip(b.positions.iter()).zip(masses.iter()) {
            assert!((fi + m * b.omega * b.omega * xi).norm() < 1e-10);
        }
    }

    #[test]
    fn euler_collinear_is_central_for_unequal_masses() {
        let masses = MassVector::new(vec![1.0, 1.0, 2.0]).unwrap();
        let b =
            homographic_baseline(CentralShape::EulerCollinear, &masses, 120, TAU, None).unwrap();
        let cfg = Configuration::new(b.positions.clone());
        let f = force(&cfg, &masses, &PotentialSpec::newtonian()).unwrap();
        for ((fi, xi), m) in f.iter().zip(b.positions.iter()).zip(masses.iter()) {
            assert!((fi + m * b.omega * b.omega * xi).norm() < 1e-9);
        }
        // symmetric outer masses put body 3 at the origin
        assert!(b.positions[2].norm() < 1e-9);
    }

    #[test]
    fn parallelogram_reduces_to_the_square_for_equal_masses() {
        let masses = MassVector::equal(4);
        let b =
            homographic_baseline(CentralShape::Parallelogram, &masses, 120, TAU, None).unwrap();
        let p = (b.positions[0] - b.positions[1]).norm();
        let q = (b.positions[2] - b.positions[3]).norm();
        assert!((p - q).abs() < 1e-9);
    }

    #[test]
    fn ngon_action_is_invariant_under_node_rotation() {
        let masses = MassVector::equal(5);
        let b =
            homographic_baseline(CentralShape::RegularNgon(5), &masses, 60, TAU, None).unwrap();
        // rotating the node list is the same loop started later
        let mut nodes: Vec<_> = b.orbit.nodes().to_vec();
        nodes.rotate_left(7);
        let rotated = DiscreteLoop::new(nodes, TAU).unwrap();
        let a = discrete_action(&rotated, &masses, &PotentialSpec::newtonian()).unwrap();
        assert!((a - b.action).abs() < 1e-10 * b.action);
    }

    #[test]
    fn mass_pattern_mismatch_is_rejected() {
        let masses = MassVector::new(vec![1.0, 2.0, 1.0, 2.0]).unwrap();
        assert!(matches!(
            homographic_baseline(CentralShape::Square, &masses, 60, TAU, None),
            Err(EstimatesError::ShapeMassMismatch { .. })
        ));
    }

    #[test]
    fn virial_identity_for_the_sampled_triangle() {
        // for a central configuration rotating at omega: U = omega^2 I
        let masses = MassVector::equal(3);
        let b =
            homographic_baseline(CentralShape::LagrangeTriangle, &masses, 60, TAU, None).unwrap();
        let cfg = Configuration::new(b.positions.clone());
        let u = crate::lagrangian::potential(&cfg, &masses, &PotentialSpec::newtonian()).unwrap();
        let i = moment_of_inertia(&cfg, &masses);
        assert!((u - b.omega * b.omega * i).abs() < 1e-10 * u);
    }
}
