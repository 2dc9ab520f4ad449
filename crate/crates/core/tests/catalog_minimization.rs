//! Strong-force minimisation across every coercive catalog scenario: each
//! converged run must end collision-free, the desk-scale check of the
//! collision-free-minima assumption.

use symloop_core::lagrangian::PotentialSpec;
use symloop_core::minimizer::{minimize, random_equivariant_loop, MinimizeError, MinimizerConfig};
use symloop_core::scenario::{build_scenario, catalog};

#[test]
fn strong_force_minima_are_collision_free_across_the_catalog() {
    let mut converged = 0usize;
    let mut attempted = 0usize;
    for entry in catalog() {
        if !entry.expected_coercive {
            continue;
        }
        attempted += 1;
        let spec = build_scenario(entry.name).unwrap();
        let group = spec.build_group().unwrap();
        let pot = PotentialSpec::strong_force(1e-3);
        // a loose tolerance keeps the sweep fast; the converged flag is what
        // gates the collision check
        let base_tol = spec
            .minimizer
            .grad_tolerance
            .unwrap_or(1e-8 * spec.n_lattice as f64);
        let config = MinimizerConfig {
            rng_seed: 1,
            grad_tolerance: Some(10.0 * base_tol),
            max_iterations: 60_000,
            ..spec.minimizer.clone()
        };
        let seed =
            random_equivariant_loop(&group, spec.n_lattice, spec.period, 0.35, 1).unwrap();
        match minimize(&group, &pot, &config, Some(seed.as_loop())) {
            Ok(result) => {
                converged += 1;
                assert!(
                    result.collision_free,
                    "{}: converged with min distance {:.3e}",
                    entry.name, result.min_pairwise_distance
                );
                println!(
                    "{:<28} action {:>12.6} min_dist {:.4} iters {:>6}",
                    entry.name, result.action, result.min_pairwise_distance, result.iterations
                );
            }
            Err(MinimizeError::NoConvergence(r)) => {
                println!(
                    "{:<28} no convergence (grad {:.2e} after {} iters)",
                    entry.name, r.grad_norm, r.iterations
                );
            }
            Err(e) => panic!("{}: {e}", entry.name),
        }
    }
    assert!(
        converged * 4 >= attempted * 3,
        "only {converged}/{attempted} coercive scenarios converged"
    );
    println!("converged {converged}/{attempted} coercive scenarios, all collision-free");
}
