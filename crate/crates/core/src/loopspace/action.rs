//! The discrete action functional and its analytic gradient.
//!
//! Quadrature: exact kinetic energy of the piecewise-linear interpolant
//! (constant velocity on each segment) plus the trapezoid rule for the
//! potential. Both are smooth in the node positions, so the gradient is
//! available in closed form.

use super::{DiscreteLoop, LoopError};
use crate::lagrangian::{force, potential, Configuration, MassVector, PotentialSpec};
use crate::planar::Vec2;

/// `A = sum_j [ sum_i m_i |x_{j+1,i} - x_{j,i}|^2 / (2 dt) + dt (U_j + U_{j+1}) / 2 ]`.
pub fn discrete_action(
    lp: &DiscreteLoop,
    masses: &MassVector,
    spec: &PotentialSpec,
) -> Result<f64, LoopError> {
    let n = lp.n_nodes();
    let dt = lp.dt();
    let mut kinetic = 0.0;
    let mut pot = 0.0;
    for j in 0..n {
        let a = lp.node(j);
        let b = lp.node(j + 1);
        for i in 0..lp.n_bodies() {
            kinetic += 0.5 * masses.get(i) * (b.positions[i] - a.positions[i]).norm_squared() / dt;
        }
        // periodic trapezoid: each node once with weight dt
        pot += dt * potential(a, masses, spec)?;
    }
    Ok(kinetic + pot)
}

/// Exact gradient of [`discrete_action`] with respect to every node position,
/// with the mass-weighted mean removed per node so that descent steps stay in
/// the zero centre-of-mass space.
///
/// The result is returned on the same lattice as the input loop.
pub fn action_gradient(
    lp: &DiscreteLoop,
    masses: &MassVector,
    spec: &PotentialSpec,
) -> Result<DiscreteLoop, LoopError> {
    let n = lp.n_nodes();
    let n_bodies = lp.n_bodies();
    let dt = lp.dt();
    let mut grad = vec![Configuration::zeros(n_bodies); n];
    for j in 0..n {
        let prev = lp.node(j + n - 1);
        let here = lp.node(j);
        let next = lp.node(j + 1);
        let f = force(here, masses, spec)?;
        let g = &mut grad[j];
        for i in 0..n_bodies {
            let stencil =
                2.0 * here.positions[i] - prev.positions[i] - next.positions[i];
            g.positions[i] = masses.get(i) / dt * stencil + dt * f[i];
        }
        // remove the mass-weighted mean; for node-wise centred loops the
        // unweighted sum of the entries above is already zero, so this only
        // strips the component normal to the constraint
        let mut mean = Vec2::zeros();
        for i in 0..n_bodies {
            mean += masses.get(i) * g.positions[i];
        }
        mean /= masses.total();
        for i in 0..n_bodies {
            g.positions[i] -= mean;
        }
    }
    DiscreteLoop::new(grad, lp.period())
}

/// Euclidean norm of a loop-shaped field.
pub fn gradient_norm(field: &DiscreteLoop) -> f64 {
    field
        .nodes()
        .iter()
        .map(|n| n.positions.iter().map(|p| p.norm_squared()).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::Configuration;
    use std::f64::consts::TAU;

    fn random_centered_loop(seed: u64, masses: &MassVector, n_nodes: usize) -> DiscreteLoop {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n_bodies = masses.len();
        let mut lp = DiscreteLoop::from_fn(n_nodes, TAU, |t| {
            Configuration::new(
                (0..n_bodies)
                    .map(|i| {
                        let a = t + TAU * i as f64 / n_bodies as f64;
                        Vec2::new(a.cos(), a.sin())
                    })
                    .collect(),
            )
        })
        .unwrap();
        for node in lp.nodes_mut() {
            for p in &mut node.positions {
                p.x += 0.15 * rng.gen_range(-1.0..1.0);
                p.y += 0.15 * rng.gen_range(-1.0..1.0);
            }
        }
        lp.project_center_of_mass(masses);
        lp
    }

    #[test]
    fn constant_loop_action_is_period_times_potential() {
        let masses = MassVector::equal(2);
        let spec = PotentialSpec::newtonian();
        let c = Configuration::new(vec![Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0)]);
        let lp = DiscreteLoop::constant(c.clone(), 10, TAU).unwrap();
        let a = discrete_action(&lp, &masses, &spec).unwrap();
        let u = potential(&c, &masses, &spec).unwrap();
        assert!((a - TAU * u).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences_equal_masses() {
        let masses = MassVector::equal(3);
        let spec = PotentialSpec::newtonian();
        let lp = random_centered_loop(42, &masses, 16);
        let grad = action_gradient(&lp, &masses, &spec).unwrap();
        let h = 1e-6;
        for j in [0usize, 5, 11] {
            for i in 0..3 {
                for axis in 0..2 {
                    let mut plus = lp.clone();
                    let mut minus = lp.clone();
                    plus.nodes_mut()[j].positions[i][axis] += h;
                    minus.nodes_mut()[j].positions[i][axis] -= h;
                    let fd = (discrete_action(&plus, &masses, &spec).unwrap()
                        - discrete_action(&minus, &masses, &spec).unwrap())
                        / (2.0 * h);
                    let g = grad.node(j).positions[i][axis];
                    assert!(
                        (fd - g).abs() / g.abs().max(1.0) < 1e-6,
                        "node {j} body {i} axis {axis}: fd {fd:.9} vs {g:.9}"
                    );
                }
            }
        }
    }

    #[test]
    fn gradient_matches_projected_finite_differences_unequal_masses() {
        let masses = MassVector::new(vec![1.0, 2.0, 0.5]).unwrap();
        let spec = PotentialSpec::newtonian();
        let lp = random_centered_loop(7, &masses, 12);
        let grad = action_gradient(&lp, &masses, &spec).unwrap();
        let h = 1e-6;
        let total = masses.total();
        for j in 0..12 {
            // raw finite differences of the node, then the same mean removal
            let mut fd = [Vec2::zeros(); 3];
            for i in 0..3 {
                for axis in 0..2 {
                    let mut plus = lp.clone();
                    let mut minus = lp.clone();
                    plus.nodes_mut()[j].positions[i][axis] += h;
                    minus.nodes_mut()[j].positions[i][axis] -= h;
                    fd[i][axis] = (discrete_action(&plus, &masses, &spec).unwrap()
                        - discrete_action(&minus, &masses, &spec).unwrap())
                        / (2.0 * h);
                }
            }
            let mut mean = Vec2::zeros();
            for i in 0..3 {
                mean += masses.get(i) * fd[i];
            }
            mean /= total;
            for i in 0..3 {
                let g = grad.node(j).positions[i];
                let d = fd[i] - mean;
                assert!((g - d).norm() / g.norm().max(1.0) < 1e-6);
            }
        }
    }

    #[test]
    fn gradient_shrinks_at_fourth_order_pair_of_lattices_for_kepler_circle() {
        // circular two-body solution: omega^2 = 2 / d^3 with unit masses;
        // the discrete gradient is pure discretisation error, O(1/N^2) per node
        let masses = MassVector::equal(2);
        let spec = PotentialSpec::newtonian();
        let d = 2.0f64.powf(1.0 / 3.0); // omega = 1, period 2 pi
        let mut norms = Vec::new();
        for n in [32usize, 64] {
            let lp = DiscreteLoop::from_fn(n, TAU, |t| {
                let p = 0.5 * d * Vec2::new(t.cos(), t.sin());
                Configuration::new(vec![p, -p])
            })
            .unwrap();
            let g = action_gradient(&lp, &masses, &spec).unwrap();
            norms.push(gradient_norm(&g));
        }
        // per-node error O(h^2) with h = T/N; the norm aggregates sqrt(N) nodes
        // and carries a factor dt, so doubling N divides the norm by ~ 2^2.5
        let ratio = norms[0] / norms[1];
        assert!(ratio > 4.0, "ratio {ratio}");
    }

    #[test]
    fn gradient_of_colliding_loop_errors() {
        let masses = MassVector::equal(2);
        let c = Configuration::new(vec![Vec2::zeros(), Vec2::zeros()]);
        let lp = DiscreteLoop::constant(c, 8, TAU).unwrap();
        assert!(action_gradient(&lp, &masses, &PotentialSpec::newtonian()).is_err());
    }
}
