//! Property tests for the structural invariants that hold on arbitrary
//! inputs, not just on the catalog scenarios.

use proptest::prelude::*;
use std::f64::consts::{PI, TAU};
use symloop_core::lagrangian::{
    force, kinetic, mass_dot, potential, Configuration, MassVector, PotentialSpec,
};
use symloop_core::loopspace::{read_loop, symmetrize_nodes, write_loop, DiscreteLoop};
use symloop_core::planar::{rotation, Vec2};
use symloop_core::symmetry::{
    generate_group, time_reflection_generator, Permutation, PlanarIsometry,
};

fn masses_strategy(n: usize) -> impl Strategy<Value = MassVector> {
    proptest::collection::vec(0.2f64..5.0, n).prop_map(|m| MassVector::new(m).unwrap())
}

fn config_strategy(n: usize) -> impl Strategy<Value = Vec<Vec2>> {
    proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n)
        .prop_map(|pts| pts.into_iter().map(|(x, y)| Vec2::new(x, y)).collect())
}

fn separated(points: &[Vec2], min: f64) -> bool {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i] - points[j]).norm() < min {
                return false;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn potential_is_rotation_invariant(
        pts in config_strategy(4),
        masses in masses_strategy(4),
        angle in 0.0f64..TAU,
    ) {
        prop_assume!(separated(&pts, 0.05));
        let mut cfg = Configuration::new(pts);
        cfg.project_center_of_mass(&masses);
        prop_assume!(cfg.min_pairwise_distance() > 0.05);
        let spec = PotentialSpec::newtonian();
        let u = potential(&cfg, &masses, &spec).unwrap();
        let rot = rotation(angle);
        let turned = Configuration::new(cfg.positions.iter().map(|p| rot * p).collect());
        let v = potential(&turned, &masses, &spec).unwrap();
        prop_assert!((u - v).abs() <= 1e-12 * u.max(1.0));
    }

    #[test]
    fn forces_sum_to_zero(
        pts in config_strategy(4),
        masses in masses_strategy(4),
        eps in 0.0f64..0.2,
    ) {
        prop_assume!(separated(&pts, 0.05));
        let cfg = Configuration::new(pts);
        let spec = PotentialSpec { strong_force_epsilon: eps, ..PotentialSpec::newtonian() };
        let f = force(&cfg, &masses, &spec).unwrap();
        let total: Vec2 = f.iter().sum();
        prop_assert!(total.norm() < 1e-11);
    }

    #[test]
    fn kinetic_is_quadratic(
        vels in config_strategy(3),
        masses in masses_strategy(3),
        scale in 0.1f64..4.0,
    ) {
        let k = kinetic(&vels, &masses);
        let scaled: Vec<Vec2> = vels.iter().map(|v| scale * v).collect();
        let ks = kinetic(&scaled, &masses);
        prop_assert!((ks - scale * scale * k).abs() <= 1e-12 * ks.max(1.0));
    }

    #[test]
    fn loop_io_round_trips(
        rows in proptest::collection::vec(config_strategy(3), 4..20),
        period in 0.5f64..20.0,
        masses in masses_strategy(3),
    ) {
        let nodes: Vec<Configuration> = rows.into_iter().map(Configuration::new).collect();
        let lp = DiscreteLoop::new(nodes, period).unwrap();
        let mut buf = Vec::new();
        write_loop(&mut buf, &lp, &masses).unwrap();
        let (back, masses_back) = read_loop(buf.as_slice()).unwrap();
        prop_assert_eq!(back, lp);
        prop_assert_eq!(masses_back, masses);
    }

    #[test]
    fn symmetrization_is_an_orthogonal_projection(
        rows in proptest::collection::vec(config_strategy(3), 1..4),
        seed_phase in 0.0f64..TAU,
    ) {
        // D3 three-body group on a 12-node lattice
        let p = |c: &[&[usize]]| Permutation::from_cycles(3, c).unwrap();
        let masses = MassVector::equal(3);
        let group = generate_group(
            &[
                time_reflection_generator(0.0, PlanarIsometry::rotation(PI), p(&[&[1, 2]])),
                time_reflection_generator(PI / 3.0, PlanarIsometry::rotation(PI), p(&[&[2, 3]])),
            ],
            &masses,
        )
        .unwrap();
        let base = rows[0].clone();
        let mut lp = DiscreteLoop::from_fn(12, TAU, |t| {
            let rot = rotation(t + seed_phase);
            Configuration::new(base.iter().map(|p| rot * p).collect())
        })
        .unwrap();
        lp.project_center_of_mass(&masses);
        let once = symmetrize_nodes(&lp, &group).unwrap();
        let twice = symmetrize_nodes(&once, &group).unwrap();
        prop_assert!(once.max_node_distance(&twice) < 1e-12);
        // projections are contractions in the mass norm, node by node
        for (a, b) in lp.nodes().iter().zip(once.nodes().iter()) {
            let na = mass_dot(a, a, &masses);
            let nb = mass_dot(b, b, &masses);
            prop_assert!(nb <= na + 1e-9);
        }
    }
}
