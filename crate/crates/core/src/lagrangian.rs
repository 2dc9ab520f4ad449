//! Potential, kinetic energy and moment of inertia on planar configurations.
//!
//! The potential is `U(x) = sum_{i<j} w_ij / r_ij^a + eps * sum_{i<j} w_ij / r_ij^2`
//! with `w_ij = m_i m_j` by default (an unweighted variant is available through
//! [`PotentialSpec::use_mass_products`]). The gravitational constant is 1. The
//! `eps / r^2` term is the classical strong-force deformation: with `eps > 0`
//! loops through a collision have infinite action.

use crate::planar::Vec2;
use thiserror::Error;

/// Two bodies closer than this are treated as an exact collision.
pub const COLLISION_FLOOR: f64 = 1e-14;

/// Relative tolerance for the centre-of-mass invariant of a [`Configuration`].
pub const COM_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LagrangianError {
    #[error("bodies {i} and {j} are separated by {dist:.3e}, below the collision floor")]
    CollisionSingularity { i: usize, j: usize, dist: f64 },
    #[error("invalid masses: {0}")]
    BadMasses(String),
    #[error("invalid potential parameters: {0}")]
    BadPotential(String),
}

/// Positive masses of the `n >= 2` bodies.
#[derive(Debug, Clone, PartialEq)]
pub struct MassVector {
    masses: Vec<f64>,
}

impl MassVector {
    pub fn new(masses: Vec<f64>) -> Result<Self, LagrangianError> {
        if masses.len() < 2 {
            return Err(LagrangianError::BadMasses(format!(
                "need at least 2 bodies, got {}",
                masses.len()
            )));
        }
        if let Some(m) = masses.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
            return Err(LagrangianError::BadMasses(format!("non-positive mass {m}")));
        }
        Ok(Self { masses })
    }

    /// `n` unit masses.
    pub fn equal(n: usize) -> Self {
        Self::new(vec![1.0; n]).expect("n >= 2")
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> f64 {
        self.masses[i]
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.masses.iter().copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.masses
    }
}

/// A planar configuration of `n` bodies with the centre of mass at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub positions: Vec<Vec2>,
}

impl Configuration {
    pub fn new(positions: Vec<Vec2>) -> Self {
        Self { positions }
    }

    pub fn zeros(n: usize) -> Self {
        Self { positions: vec![Vec2::zeros(); n] }
    }

    pub fn n_bodies(&self) -> usize {
        self.positions.len()
    }

    /// Mass-weighted mean position.
    pub fn center_of_mass(&self, masses: &MassVector) -> Vec2 {
        let mut c = Vec2::zeros();
        for (x, m) in self.positions.iter().zip(masses.iter()) {
            c += m * x;
        }
        c / masses.total()
    }

    /// Subtract the mass-weighted mean from every body.
    pub fn project_center_of_mass(&mut self, masses: &MassVector) {
        let c = self.center_of_mass(masses);
        for x in &mut self.positions {
            *x -= c;
        }
    }

    /// The centre-of-mass invariant holds within [`COM_TOL`], relative to the
    /// mass-weighted size of the configuration.
    pub fn has_zero_center_of_mass(&self, masses: &MassVector) -> bool {
        let scale: f64 = self
            .positions
            .iter()
            .zip(masses.iter())
            .map(|(x, m)| m * x.norm())
            .sum();
        let c = self.center_of_mass(masses) * masses.total();
        c.norm() <= COM_TOL * scale.max(1e-300)
    }

    /// Smallest pairwise distance; `inf` for a single body.
    pub fn min_pairwise_distance(&self) -> f64 {
        let n = self.positions.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                best = best.min((self.positions[i] - self.positions[j]).norm());
            }
        }
        best
    }

    /// Largest pairwise distance.
    pub fn max_pairwise_distance(&self) -> f64 {
        let n = self.positions.len();
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max((self.positions[i] - self.positions[j]).norm());
            }
        }
        best
    }
}

/// Mass inner product `<x, y> = sum_i m_i x_i . y_i` on configuration space.
pub fn mass_dot(a: &Configuration, b: &Configuration, masses: &MassVector) -> f64 {
    a.positions
        .iter()
        .zip(b.positions.iter())
        .zip(masses.iter())
        .map(|((x, y), m)| m * x.dot(y))
        .sum()
}

/// Choice of interaction law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    /// Power-law exponent `a >= 1`; the Newtonian case is `a = 1`.
    pub exponent: f64,
    /// Coefficient of the additive `1/r^2` strong-force term.
    pub strong_force_epsilon: f64,
    /// Weight pair interactions by `m_i m_j` (default) instead of 1.
    pub use_mass_products: bool,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self::newtonian()
    }
}

impl PotentialSpec {
    pub fn newtonian() -> Self {
        Self { exponent: 1.0, strong_force_epsilon: 0.0, use_mass_products: true }
    }

    pub fn strong_force(epsilon: f64) -> Self {
        Self { strong_force_epsilon: epsilon, ..Self::newtonian() }
    }

    pub fn power_law(exponent: f64) -> Self {
        Self { exponent, ..Self::newtonian() }
    }

    pub fn validate(&self) -> Result<(), LagrangianError> {
        if !(self.exponent >= 1.0) {
            return Err(LagrangianError::BadPotential(format!(
                "exponent {} < 1",
                self.exponent
            )));
        }
        if !(self.strong_force_epsilon >= 0.0) {
            return Err(LagrangianError::BadPotential(format!(
                "negative strong-force epsilon {}",
                self.strong_force_epsilon
            )));
        }
        Ok(())
    }

    fn weight(&self, masses: &MassVector, i: usize, j: usize) -> f64 {
        if self.use_mass_products {
            masses.get(i) * masses.get(j)
        } else {
            1.0
        }
    }
}

/// `U(x)`, strictly decreasing in every pairwise distance.
pub fn potential(
    config: &Configuration,
    masses: &MassVector,
    spec: &PotentialSpec,
) -> Result<f64, LagrangianError> {
    let n = config.n_bodies();
    let mut u = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = (config.positions[i] - config.positions[j]).norm();
            if r < COLLISION_FLOOR {
                return Err(LagrangianError::CollisionSingularity { i, j, dist: r });
            }
            let w = spec.weight(masses, i, j);
            u += w / r.powf(spec.exponent);
            if spec.strong_force_epsilon > 0.0 {
                u += spec.strong_force_epsilon * w / (r * r);
            }
        }
    }
    Ok(u)
}

/// Kinetic energy `sum_i m_i |v_i|^2 / 2`.
pub fn kinetic(velocities: &[Vec2], masses: &MassVector) -> f64 {
    velocities
        .iter()
        .zip(masses.iter())
        .map(|(v, m)| 0.5 * m * v.norm_squared())
        .sum()
}

/// Moment of inertia `I = sum_i m_i |x_i|^2` about the origin.
pub fn moment_of_inertia(config: &Configuration, masses: &MassVector) -> f64 {
    config
        .positions
        .iter()
        .zip(masses.iter())
        .map(|(x, m)| m * x.norm_squared())
        .sum()
}

/// Gradient of [`potential`] with respect to the positions.
///
/// For the attractive potential this points from each body towards the
/// others; the Newton equations read `m_i x_i'' = force_i`. The forces sum to
/// zero by translation invariance.
pub fn force(
    config: &Configuration,
    masses: &MassVector,
    spec: &PotentialSpec,
) -> Result<Vec<Vec2>, LagrangianError> {
    let n = config.n_bodies();
    let mut f = vec![Vec2::zeros(); n];
    let a = spec.exponent;
    for i in 0..n {
        for j in i + 1..n {
            let d = config.positions[i] - config.positions[j];
            let r = d.norm();
            if r < COLLISION_FLOOR {
                return Err(LagrangianError::CollisionSingularity { i, j, dist: r });
            }
            let w = spec.weight(masses, i, j);
            // d/dx_i of w r^-a is -a w r^-(a+2) (x_i - x_j)
            let mut coeff = -a * w / r.powf(a + 2.0);
            if spec.strong_force_epsilon > 0.0 {
                coeff -= 2.0 * spec.strong_force_epsilon * w / (r * r * r * r);
            }
            f[i] += coeff * d;
            f[j] -= coeff * d;
        }
    }
    Ok(f)
}
