//! Shared fixtures for the criterion benchmarks; see `benches/kernels.rs`.

use std::f64::consts::{PI, TAU};
use symloop_core::lagrangian::{Configuration, MassVector};
use symloop_core::loopspace::DiscreteLoop;
use symloop_core::planar::Vec2;
use symloop_core::symmetry::{
    generate_group, time_reflection_generator, Permutation, PlanarIsometry, SymmetryGroup,
};

/// The order-12 three-body group of the figure-eight class.
pub fn eight_group() -> SymmetryGroup {
    let p = |c: &[&[usize]]| Permutation::from_cycles(3, c).unwrap();
    generate_group(
        &[
            time_reflection_generator(0.0, PlanarIsometry::reflection(0.0), p(&[&[1, 2]])),
            time_reflection_generator(PI / 6.0, PlanarIsometry::rotation(PI), p(&[&[2, 3]])),
        ],
        &MassVector::equal(3),
    )
    .unwrap()
}

/// A collision-free three-body loop on `n` nodes.
pub fn test_loop(n: usize) -> DiscreteLoop {
    let masses = MassVector::equal(3);
    let mut lp = DiscreteLoop::from_fn(n, TAU, |t| {
        Configuration::new(
            (0..3)
                .map(|i| {
                    let a = t + TAU * i as f64 / 3.0;
                    Vec2::new(a.cos() + 0.1 * (2.0 * t).sin(), a.sin())
                })
                .collect(),
        )
    })
    .unwrap();
    lp.project_center_of_mass(&masses);
    lp
}
