//! Symmetric periodic orbits of the planar n-body problem.
//!
//! The crate searches for periodic solutions by minimising a piecewise-linear
//! discretisation of the Lagrangian action over loops constrained to the
//! fixed-point set of a finite group acting simultaneously on the time
//! circle, the plane and the body labels. It also carries the closed-form
//! level estimates that certify when such a minimiser cannot be homographic,
//! and independent verification tools (Newton residuals, shooting, orbit
//! classification).
//!
//! Modules:
//! - [`symmetry`]: finite group actions, kernels, fixed subspaces, coercivity.
//! - [`lagrangian`]: masses, configurations, potential/kinetic/inertia, forces.
//! - [`loopspace`]: discrete loops, the group action on loops, equivariant
//!   projection, the discrete action and its gradient, Bolza folding, i/o.
//! - [`minimizer`]: projected gradient relaxation with random restarts.
//! - [`estimates`]: comparison-path level estimates and homographic baselines.
//! - [`verify`]: residuals, shooting, choreography/homographic classification.
//! - [`scenario`]: the named scenario catalog and its config file format.

// the numeric kernels index several arrays in lockstep, and the
// `!(x > 0.0)` validation forms deliberately reject NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::manual_is_multiple_of, clippy::type_complexity)]

pub mod estimates;
pub mod lagrangian;
pub mod loopspace;
pub mod minimizer;
pub mod planar;
pub mod scenario;
pub mod symmetry;
pub mod verify;

pub use lagrangian::{Configuration, MassVector, PotentialSpec};
pub use loopspace::{BolzaPath, DiscreteLoop, EquivariantLoop};
pub use minimizer::{MinimizationResult, MinimizerConfig};
pub use planar::{Mat2, Vec2};
pub use scenario::ScenarioSpec;
pub use symmetry::{GroupElement, Permutation, SymmetryGroup};
