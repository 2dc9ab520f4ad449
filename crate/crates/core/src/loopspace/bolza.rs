//! Folding equivariant loops to boundary-constrained paths and back.
//!
//! For a group whose time actions form a dihedral group of order `2l`, an
//! equivariant loop is determined by its restriction to a fundamental arc of
//! length `T / (2l)` between a fixed time of one reflection and a fixed time
//! of another. The restricted path has its endpoints in the configuration
//! subspaces fixed by the two reflections, and `2l * A_P = A^G` relates the
//! path action to the loop action.

use super::{DiscreteLoop, EquivariantLoop, LoopError, EQUIVARIANCE_TOL};
use crate::lagrangian::{
    mass_dot, potential, Configuration, MassVector, PotentialSpec,
};
use crate::symmetry::{fixed_config_subspace, fixed_times, GroupElement, SymmetryGroup};

/// A discrete path with endpoints constrained to two linear subspaces.
#[derive(Debug, Clone)]
pub struct BolzaPath {
    nodes: Vec<Configuration>,
    duration: f64,
    basis_start: Vec<Configuration>,
    basis_end: Vec<Configuration>,
}

impl BolzaPath {
    pub fn new(
        nodes: Vec<Configuration>,
        duration: f64,
        basis_start: Vec<Configuration>,
        basis_end: Vec<Configuration>,
    ) -> Self {
        Self { nodes, duration, basis_start, basis_end }
    }

    pub fn n_segments(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[Configuration] {
        &self.nodes
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn basis_start(&self) -> &[Configuration] {
        &self.basis_start
    }

    pub fn basis_end(&self) -> &[Configuration] {
        &self.basis_end
    }

    /// Distance from each endpoint to the span of its constraint basis.
    pub fn endpoint_deviations(&self, masses: &MassVector) -> (f64, f64) {
        (
            distance_to_span(&self.nodes[0], &self.basis_start, masses),
            distance_to_span(&self.nodes[self.nodes.len() - 1], &self.basis_end, masses),
        )
    }
}

fn distance_to_span(c: &Configuration, basis: &[Configuration], masses: &MassVector) -> f64 {
    let mut residual = c.clone();
    for b in basis {
        let coeff = mass_dot(&residual, b, masses);
        for (r, v) in residual.positions.iter_mut().zip(b.positions.iter()) {
            *r -= coeff * v;
        }
    }
    mass_dot(&residual, &residual, masses).sqrt()
}

/// Segment-wise action of the path (piecewise-linear kinetic part plus the
/// trapezoid rule for the potential, endpoints at half weight).
pub fn bolza_action(
    path: &BolzaPath,
    masses: &MassVector,
    spec: &PotentialSpec,
) -> Result<f64, LoopError> {
    let m = path.n_segments();
    let dt = path.duration / m as f64;
    let mut total = 0.0;
    for s in 0..m {
        let a = &path.nodes[s];
        let b = &path.nodes[s + 1];
        for i in 0..a.n_bodies() {
            total += 0.5 * masses.get(i) * (b.positions[i] - a.positions[i]).norm_squared() / dt;
        }
        total += 0.5 * dt * (potential(a, masses, spec)? + potential(b, masses, spec)?);
    }
    Ok(total)
}

/// Locate the fundamental arc bounded by fixed times of `h1` and `h2`.
fn fundamental_arc(
    group: &SymmetryGroup,
    h1: &GroupElement,
    h2: &GroupElement,
    n: usize,
) -> Result<(usize, usize, usize), LoopError> {
    let two_l = group.time_image_order();
    if n % two_l != 0 {
        return Err(LoopError::Lattice(crate::symmetry::SymmetryError::LatticeIncompatible(n)));
    }
    let arc = n / two_l;
    let f1 = fixed_times(h1, n)?;
    let f2 = fixed_times(h2, n)?;
    for a in [f1.0, f1.1] {
        for b in [f2.0, f2.1] {
            if (b + n - a) % n == arc {
                return Ok((a, b, arc));
            }
        }
    }
    Err(LoopError::NotAFundamentalDomain)
}

/// Restrict an equivariant loop to the fundamental arc between the fixed
/// times of the two reflections.
pub fn fold_to_bolza(
    eq: &EquivariantLoop,
    h1: &GroupElement,
    h2: &GroupElement,
) -> Result<BolzaPath, LoopError> {
    let lp = eq.as_loop();
    let group = eq.group();
    let n = lp.n_nodes();
    let (start, _, arc) = fundamental_arc(group, h1, h2, n)?;
    let nodes: Vec<Configuration> = (0..=arc).map(|s| lp.node(start + s).clone()).collect();
    let masses = group.masses();
    let basis_start = fixed_config_subspace(&[GroupElement::identity(group.n_bodies()), h1.clone()], masses)?;
    let basis_end = fixed_config_subspace(&[GroupElement::identity(group.n_bodies()), h2.clone()], masses)?;
    let duration = lp.period() / group.time_image_order() as f64;
    let path = BolzaPath::new(nodes, duration, basis_start, basis_end);
    let (d0, d1) = path.endpoint_deviations(masses);
    let scale = lp.diameter().max(1.0);
    if d0 > EQUIVARIANCE_TOL * scale || d1 > EQUIVARIANCE_TOL * scale {
        return Err(LoopError::EndpointViolation(d0.max(d1)));
    }
    Ok(path)
}

/// Rebuild the unique equivariant loop restricting to `path` on the
/// fundamental arc of `h1`, `h2`.
pub fn unfold_from_bolza(
    path: &BolzaPath,
    group: &SymmetryGroup,
    h1: &GroupElement,
    h2: &GroupElement,
) -> Result<EquivariantLoop, LoopError> {
    let masses = group.masses();
    let (d0, d1) = path.endpoint_deviations(masses);
    let scale = path
        .nodes
        .iter()
        .map(Configuration::max_pairwise_distance)
        .fold(1.0f64, f64::max);
    if d0 > EQUIVARIANCE_TOL * scale || d1 > EQUIVARIANCE_TOL * scale {
        return Err(LoopError::EndpointViolation(d0.max(d1)));
    }
    let arc = path.n_segments();
    let two_l = group.time_image_order();
    let n = arc * two_l;
    let (start, _, _) = fundamental_arc(group, h1, h2, n)?;
    let mut nodes: Vec<Option<Configuration>> = vec![None; n];
    for g in group.elements() {
        let map = g.time.lattice_map(n)?;
        for (s, p) in path.nodes.iter().enumerate() {
            let j = map.apply((start + s) % n, n);
            if nodes[j].is_none() {
                nodes[j] = Some(g.apply_config(p));
            }
        }
    }
    let nodes: Vec<Configuration> = nodes
        .into_iter()
        .collect::<Option<_>>()
        .ok_or(LoopError::NotAFundamentalDomain)?;
    let period = path.duration * two_l as f64;
    let lp = DiscreteLoop::new(nodes, period)?;
    EquivariantLoop::validate(lp, group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loopspace::{discrete_action, symmetrize};
    use crate::planar::Vec2;
    use crate::symmetry::{
        generate_group, time_reflection_generator, Permutation, PlanarIsometry,
    };
    use std::f64::consts::{PI, TAU};

    fn d3_setup() -> (SymmetryGroup, GroupElement, GroupElement) {
        let p = |c: &[&[usize]]| Permutation::from_cycles(3, c).unwrap();
        let h1 = time_reflection_generator(0.0, PlanarIsometry::rotation(PI), p(&[&[1, 2]]));
        let h2 = time_reflection_generator(PI / 3.0, PlanarIsometry::rotation(PI), p(&[&[2, 3]]));
        let g = generate_group(&[h1.clone(), h2.clone()], &MassVector::equal(3)).unwrap();
        (g, h1, h2)
    }

    fn seeded_equivariant(group: &SymmetryGroup, n: usize, seed: u64) -> EquivariantLoop {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let masses = group.masses().clone();
        let mut lp = DiscreteLoop::from_fn(n, TAU, |t| {
            Configuration::new(
                (0..group.n_bodies())
                    .map(|i| {
                        let a = t + TAU * i as f64 / group.n_bodies() as f64;
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
        symmetrize(&lp, group).unwrap()
    }

    #[test]
    fn d3_fold_produces_two_segments_at_n_twelve() {
        let (group, h1, h2) = d3_setup();
        let eq = seeded_equivariant(&group, 12, 1);
        let path = fold_to_bolza(&eq, &h1, &h2).unwrap();
        assert_eq!(path.n_segments(), 2);
        assert!((path.duration() - TAU / 6.0).abs() < 1e-14);
    }

    #[test]
    fn fold_unfold_round_trip() {
        let (group, h1, h2) = d3_setup();
        let eq = seeded_equivariant(&group, 24, 2);
        let path = fold_to_bolza(&eq, &h1, &h2).unwrap();
        let back = unfold_from_bolza(&path, &group, &h1, &h2).unwrap();
        assert!(eq.as_loop().max_node_distance(back.as_loop()) < 1e-12);
    }

    #[test]
    fn bolza_action_relation() {
        let (group, h1, h2) = d3_setup();
        let masses = MassVector::equal(3);
        let spec = PotentialSpec::newtonian();
        let eq = seeded_equivariant(&group, 24, 3);
        let path = fold_to_bolza(&eq, &h1, &h2).unwrap();
        let a_loop = discrete_action(eq.as_loop(), &masses, &spec).unwrap();
        let a_path = bolza_action(&path, &masses, &spec).unwrap();
        let two_l = group.time_image_order() as f64;
        assert!(
            (two_l * a_path - a_loop).abs() < 1e-10 * a_loop.abs(),
            "2l A_P = {} vs A = {}",
            two_l * a_path,
            a_loop
        );
    }

    #[test]
    fn endpoint_violation_is_detected() {
        let (group, h1, h2) = d3_setup();
        let eq = seeded_equivariant(&group, 12, 4);
        let mut path = fold_to_bolza(&eq, &h1, &h2).unwrap();
        // push the first endpoint out of its subspace
        path.nodes[0].positions[2] += Vec2::new(0.3, 0.0);
        assert!(matches!(
            unfold_from_bolza(&path, &group, &h1, &h2),
            Err(LoopError::EndpointViolation(_))
        ));
    }
}
