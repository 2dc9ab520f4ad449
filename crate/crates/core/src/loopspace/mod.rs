//! Discretised loops and the group action on them.
//!
//! A loop is a closed piecewise-linear curve of configurations on the uniform
//! lattice `t_j = j T / N` (node `N` is node `0`). The group acts by
//! `(g . x)(t) = g . x(tau(g)^-1 t)`; averaging that action over the group is
//! an orthogonal projection onto the equivariant loops, and because the
//! discrete action is invariant under the action, its gradient at an
//! equivariant loop is itself equivariant (so critical points of the
//! restricted functional are critical points of the full one).

mod action;
mod bolza;
mod io;

pub use action::{action_gradient, discrete_action, gradient_norm};
pub use bolza::{bolza_action, fold_to_bolza, unfold_from_bolza, BolzaPath};
pub use io::{read_loop, write_loop};

use crate::lagrangian::{Configuration, LagrangianError, MassVector};
use crate::symmetry::{GroupElement, SymmetryError, SymmetryGroup};
use thiserror::Error;

/// Equivariance tolerance for [`EquivariantLoop`].
pub const EQUIVARIANCE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum LoopError {
    #[error("lattice must have at least 4 nodes, got {0}")]
    LatticeTooSmall(usize),
    #[error("period must be positive, got {0}")]
    BadPeriod(f64),
    #[error("node {0} has {1} bodies, node 0 has {2}")]
    InconsistentNodes(usize, usize, usize),
    #[error(transparent)]
    Lattice(#[from] SymmetryError),
    #[error(transparent)]
    Collision(#[from] LagrangianError),
    #[error("loop deviates from equivariance by {0:.3e}")]
    NotEquivariant(f64),
    #[error("path endpoint deviates from its constraint subspace by {0:.3e}")]
    EndpointViolation(f64),
    #[error("fixed times of the two reflections do not bound a fundamental arc")]
    NotAFundamentalDomain,
    #[error("loop i/o: {0}")]
    Io(String),
}

/// Closed loop of configurations on a uniform time lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLoop {
    nodes: Vec<Configuration>,
    period: f64,
}

impl DiscreteLoop {
    pub fn new(nodes: Vec<Configuration>, period: f64) -> Result<Self, LoopError> {
        if nodes.len() < 4 {
            return Err(LoopError::LatticeTooSmall(nodes.len()));
        }
        if !(period > 0.0) {
            return Err(LoopError::BadPeriod(period));
        }
        let n0 = nodes[0].n_bodies();
        for (j, node) in nodes.iter().enumerate() {
            if node.n_bodies() != n0 {
                return Err(LoopError::InconsistentNodes(j, node.n_bodies(), n0));
            }
        }
        Ok(Self { nodes, period })
    }

    /// Sample a curve `t -> configuration` on an `n_nodes` lattice.
    pub fn from_fn(
        n_nodes: usize,
        period: f64,
        f: impl Fn(f64) -> Configuration,
    ) -> Result<Self, LoopError> {
        let dt = period / n_nodes as f64;
        Self::new((0..n_nodes).map(|j| f(j as f64 * dt)).collect(), period)
    }

    pub fn constant(config: Configuration, n_nodes: usize, period: f64) -> Result<Self, LoopError> {
        Self::new(vec![config; n_nodes], period)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_bodies(&self) -> usize {
        self.nodes[0].n_bodies()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dt(&self) -> f64 {
        self.period / self.nodes.len() as f64
    }

    pub fn node(&self, j: usize) -> &Configuration {
        &self.nodes[j % self.nodes.len()]
    }

    pub fn nodes(&self) -> &[Configuration] {
        &self.nodes
    }

    pub fn nodes_mut(&mut self) -> &mut [Configuration] {
        &mut self.nodes
    }

    /// Largest pairwise distance over all nodes.
    pub fn diameter(&self) -> f64 {
        self.nodes
            .iter()
            .map(Configuration::max_pairwise_distance)
            .fold(0.0, f64::max)
    }

    /// Smallest pairwise distance over all nodes.
    pub fn min_pairwise_distance(&self) -> f64 {
        self.nodes
            .iter()
            .map(Configuration::min_pairwise_distance)
            .fold(f64::INFINITY, f64::min)
    }

    /// Subtract the mass-weighted mean from every node.
    pub fn project_center_of_mass(&mut self, masses: &MassVector) {
        for node in &mut self.nodes {
            node.project_center_of_mass(masses);
        }
    }

    /// Maximum node-wise distance to another loop on the same lattice.
    pub fn max_node_distance(&self, other: &DiscreteLoop) -> f64 {
        self.nodes
            .iter()
            .zip(other.nodes.iter())
            .map(|(a, b)| {
                a.positions
                    .iter()
                    .zip(b.positions.iter())
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Apply a group element to a loop: node `j` of the result has body `i` equal
/// to `rho(g)` applied to body `sigma(g)^-1(i)` of node `tau(g)^-1(j)`.
pub fn act_on_loop(g: &GroupElement, lp: &DiscreteLoop) -> Result<DiscreteLoop, LoopError> {
    let n = lp.n_nodes();
    let map = g.time.lattice_map(n)?;
    let nodes = (0..n)
        .map(|j| g.apply_config(lp.node(map.inverse_apply(j, n))))
        .collect();
    DiscreteLoop::new(nodes, lp.period())
}

/// Group average of [`act_on_loop`]: the orthogonal projection of loop-shaped
/// data onto the equivariant subspace, with the centre of mass re-projected.
pub fn symmetrize_nodes(lp: &DiscreteLoop, group: &SymmetryGroup) -> Result<DiscreteLoop, LoopError> {
    let n = lp.n_nodes();
    let n_bodies = lp.n_bodies();
    let mut acc = vec![Configuration::zeros(n_bodies); n];
    for g in group.elements() {
        let map = g.time.lattice_map(n)?;
        let inv_perm = g.perm.inverse();
        for (j, out) in acc.iter_mut().enumerate() {
            let src = lp.node(map.inverse_apply(j, n));
            for i in 0..n_bodies {
                out.positions[i] += g.space.apply(src.positions[inv_perm.apply(i)]);
            }
        }
    }
    let scale = 1.0 / group.order() as f64;
    for node in &mut acc {
        for p in &mut node.positions {
            *p *= scale;
        }
        node.project_center_of_mass(group.masses());
    }
    DiscreteLoop::new(acc, lp.period())
}

/// A loop fixed by the whole group action.
#[derive(Debug, Clone)]
pub struct EquivariantLoop {
    inner: DiscreteLoop,
    group: SymmetryGroup,
}

impl EquivariantLoop {
    /// Wrap a loop after checking equivariance within [`EQUIVARIANCE_TOL`]
    /// (scaled by the loop diameter).
    pub fn validate(lp: DiscreteLoop, group: &SymmetryGroup) -> Result<Self, LoopError> {
        let dev = equivariance_deviation(&lp, group)?;
        let scale = lp.diameter().max(1.0);
        if dev > EQUIVARIANCE_TOL * scale {
            return Err(LoopError::NotEquivariant(dev));
        }
        Ok(Self { inner: lp, group: group.clone() })
    }

    pub fn as_loop(&self) -> &DiscreteLoop {
        &self.inner
    }

    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    pub fn into_loop(self) -> DiscreteLoop {
        self.inner
    }

    /// Resample onto a finer (or coarser) compatible lattice.
    pub fn resample(&self, n_new: usize) -> Result<Self, LoopError> {
        let lp = resample(&self.inner, n_new)?;
        let projected = symmetrize_nodes(&lp, &self.group)?;
        EquivariantLoop::validate(projected, &self.group)
    }
}

/// Worst node-wise deviation between the loop and its image under each group
/// element.
pub fn equivariance_deviation(lp: &DiscreteLoop, group: &SymmetryGroup) -> Result<f64, LoopError> {
    let mut worst: f64 = 0.0;
    for g in group.elements() {
        let moved = act_on_loop(g, lp)?;
        worst = worst.max(lp.max_node_distance(&moved));
    }
    Ok(worst)
}

/// Project a loop onto the equivariant subspace.
pub fn symmetrize(lp: &DiscreteLoop, group: &SymmetryGroup) -> Result<EquivariantLoop, LoopError> {
    let projected = symmetrize_nodes(lp, group)?;
    EquivariantLoop::validate(projected, group)
}

/// Linear interpolation onto a new lattice, centre of mass untouched (nodes
/// of a valid loop already satisfy it; interpolation preserves it).
pub fn resample(lp: &DiscreteLoop, n_new: usize) -> Result<DiscreteLoop, LoopError> {
    if n_new < 4 {
        return Err(LoopError::LatticeTooSmall(n_new));
    }
    let n_old = lp.n_nodes();
    if n_new == n_old {
        return Ok(lp.clone());
    }
    let nodes = (0..n_new)
        .map(|j| {
            let s = j as f64 * n_old as f64 / n_new as f64;
            let i0 = s.floor() as usize % n_old;
            let frac = s - s.floor();
            let a = lp.node(i0);
            let b = lp.node(i0 + 1);
            Configuration::new(
                a.positions
                    .iter()
                    .zip(b.positions.iter())
                    .map(|(x, y)| x * (1.0 - frac) + y * frac)
                    .collect(),
            )
        })
        .collect();
    DiscreteLoop::new(nodes, lp.period())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::PotentialSpec;
    use crate::planar::Vec2;
    use crate::symmetry::{
        generate_group, time_reflection_generator, Permutation, PlanarIsometry, TimeAction,
    };
    use std::f64::consts::{PI, TAU};

    fn two_body_circle(n: usize, period: f64) -> DiscreteLoop {
        DiscreteLoop::from_fn(n, period, |t| {
            let a = TAU * t / period;
            let p = 0.5 * Vec2::new(a.cos(), a.sin());
            Configuration::new(vec![p, -p])
        })
        .unwrap()
    }

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

    fn random_loop(seed: u64, n_bodies: usize, n_nodes: usize) -> DiscreteLoop {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let masses = MassVector::equal(n_bodies);
        let mut lp = DiscreteLoop::from_fn(n_nodes, TAU, |t| {
            Configuration::new(
                (0..n_bodies)
                    .map(|i| {
                        let a = TAU * t / TAU + TAU * i as f64 / n_bodies as f64;
                        Vec2::new(a.cos(), a.sin())
                    })
                    .collect(),
            )
        })
        .unwrap();
        for node in lp.nodes_mut() {
            for p in &mut node.positions {
                p.x += 0.1 * rng.gen_range(-1.0..1.0);
                p.y += 0.1 * rng.gen_range(-1.0..1.0);
            }
        }
        lp.project_center_of_mass(&masses);
        lp
    }

    #[test]
    fn identity_acts_trivially() {
        let lp = two_body_circle(12, TAU);
        let id = GroupElement::identity(2);
        let moved = act_on_loop(&id, &lp).unwrap();
        assert!(lp.max_node_distance(&moved) < 1e-15);
    }

    #[test]
    fn half_period_rotation_shifts_nodes() {
        let lp = random_loop(3, 2, 12);
        let g = GroupElement::new(
            TimeAction::rotation(PI),
            PlanarIsometry::identity(),
            Permutation::identity(2),
        );
        let moved = act_on_loop(&g, &lp).unwrap();
        for j in 0..12 {
            let a = &moved.node(j).positions;
            let b = &lp.node(j + 6).positions;
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn incompatible_time_rotation_is_rejected() {
        let lp = two_body_circle(12, TAU);
        let g = GroupElement::new(
            TimeAction::rotation(1.0),
            PlanarIsometry::identity(),
            Permutation::identity(2),
        );
        assert!(matches!(act_on_loop(&g, &lp), Err(LoopError::Lattice(_))));
    }

    #[test]
    fn symmetrize_is_idempotent_and_fixes_equivariant_loops() {
        let group = d3_group();
        let lp = random_loop(17, 3, 24);
        let once = symmetrize_nodes(&lp, &group).unwrap();
        let twice = symmetrize_nodes(&once, &group).unwrap();
        assert!(once.max_node_distance(&twice) < 1e-12);
        for g in group.elements() {
            let moved = act_on_loop(g, &once).unwrap();
            assert!(once.max_node_distance(&moved) < 1e-9);
        }
        let eq = EquivariantLoop::validate(once.clone(), &group).unwrap();
        let again = symmetrize_nodes(eq.as_loop(), &group).unwrap();
        assert!(once.max_node_distance(&again) < 1e-12);
    }

    #[test]
    fn symmetrized_d3_loop_pins_body_three_at_the_reflection_time() {
        // the time reflection about axis 0 with half-turn and (1 2):
        // at its fixed node, x3 = -x3 = 0
        let group = d3_group();
        let lp = random_loop(5, 3, 24);
        let sym = symmetrize_nodes(&lp, &group).unwrap();
        assert!(sym.node(0).positions[2].norm() < 1e-12);
        assert!((sym.node(0).positions[0] + sym.node(0).positions[1]).norm() < 1e-12);
    }

    #[test]
    fn action_is_group_invariant() {
        let group = d3_group();
        let masses = MassVector::equal(3);
        let spec = PotentialSpec::newtonian();
        let lp = symmetrize_nodes(&random_loop(11, 3, 24), &group).unwrap();
        let a0 = discrete_action(&lp, &masses, &spec).unwrap();
        for g in group.elements() {
            let moved = act_on_loop(g, &lp).unwrap();
            let a1 = discrete_action(&moved, &masses, &spec).unwrap();
            assert!((a0 - a1).abs() < 1e-10 * a0.abs().max(1.0));
        }
    }

    #[test]
    fn resample_identity_and_constant() {
        let lp = two_body_circle(16, TAU);
        assert!(resample(&lp, 16).unwrap().max_node_distance(&lp) < 1e-15);
        let c = Configuration::new(vec![Vec2::new(0.5, 0.0), Vec2::new(-0.5, 0.0)]);
        let constant = DiscreteLoop::constant(c.clone(), 8, TAU).unwrap();
        let re = resample(&constant, 20).unwrap();
        for node in re.nodes() {
            assert!((node.positions[0] - c.positions[0]).norm() < 1e-15);
        }
    }

    #[test]
    fn resampled_action_converges_monotonically_for_the_circle() {
        // two unit masses on an antipodal circle of radius 1/2:
        // the exact action over one period is pi^2 / T + T
        let masses = MassVector::equal(2);
        let spec = PotentialSpec::newtonian();
        let exact = PI * PI / TAU + TAU;
        let mut prev_gap = f64::INFINITY;
        for n in [8usize, 16, 32, 64, 128] {
            let lp = two_body_circle(n, TAU);
            let a = discrete_action(&lp, &masses, &spec).unwrap();
            let gap = (a - exact).abs();
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-3);
    }
}
