//! Small helpers for planar vectors and 2x2 orthogonal matrices.

use nalgebra::{Matrix2, Vector2};

pub type Vec2 = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;

/// Tolerance for the orthogonality invariant `M Mᵀ = I`.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// Rotation by `angle` radians (counter-clockwise).
pub fn rotation(angle: f64) -> Mat2 {
    let (s, c) = angle.sin_cos();
    Mat2::new(c, -s, s, c)
}

/// Reflection across the line through the origin at `axis_angle` radians.
pub fn reflection(axis_angle: f64) -> Mat2 {
    let (s, c) = (2.0 * axis_angle).sin_cos();
    Mat2::new(c, s, s, -c)
}

/// `m` is orthogonal with determinant in `{+1, -1}` within [`ORTHOGONALITY_TOL`].
pub fn is_orthogonal(m: &Mat2) -> bool {
    let gram = m * m.transpose();
    let dev = (gram - Mat2::identity()).abs().max();
    dev <= ORTHOGONALITY_TOL && (m.determinant().abs() - 1.0).abs() <= ORTHOGONALITY_TOL
}

/// Entrywise comparison with absolute tolerance.
pub fn mat_approx_eq(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    (a - b).abs().max() <= tol
}

/// Rotation angle in `(-pi, pi]` of a determinant `+1` orthogonal matrix.
pub fn rotation_angle(m: &Mat2) -> f64 {
    m[(1, 0)].atan2(m[(0, 0)])
}

/// Axis angle in `(-pi/2, pi/2]` of a determinant `-1` orthogonal matrix.
pub fn reflection_axis(m: &Mat2) -> f64 {
    0.5 * m[(0, 1)].atan2(m[(0, 0)])
}

/// The vector `v` rotated by a quarter turn counter-clockwise.
pub fn perp(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}
