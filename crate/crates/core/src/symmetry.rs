//! Finite groups acting on the time circle, the plane and the body indices.
//!
//! A group element is a triple (time action, planar isometry, permutation).
//! The group acts on a configuration `x` by `(g . x)_i = rho(g) x_{sigma(g)^-1(i)}`
//! and on a loop by `(g . x)(t) = g . x(tau(g)^-1 t)`. Everything downstream
//! (equivariant projection, coercivity, Bolza folding) is driven by the
//! fixed-point structure of these actions.

use crate::lagrangian::{mass_dot, Configuration, MassVector};
use crate::planar::{
    is_orthogonal, mat_approx_eq, reflection_axis, rotation_angle, Mat2, Vec2,
};
use std::f64::consts::TAU;
use thiserror::Error;

/// Entrywise tolerance when deciding whether two group elements coincide.
pub const ELEMENT_MATCH_TOL: f64 = 1e-9;

/// Rank tolerance for fixed-subspace bases.
pub const RANK_TOL: f64 = 1e-10;

/// Largest group order `generate_group` will accept before assuming the
/// generators do not close.
pub const DEFAULT_MAX_ORDER: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("matrix is not orthogonal within tolerance")]
    NotOrthogonal,
    #[error("permutation images {0:?} are not a bijection")]
    NotABijection(Vec<usize>),
    #[error("group closure exceeded {0} elements; generators do not close")]
    ClosureOverflow(usize),
    #[error("permutation pairs bodies {i} and {j} with unequal masses {mi} != {mj}")]
    MassIncompatible { i: usize, j: usize, mi: f64, mj: f64 },
    #[error("element set is not closed under composition")]
    NotASubgroup,
    #[error("time action is not a reflection")]
    NotAReflection,
    #[error("time action does not map the {0}-point lattice to itself")]
    LatticeIncompatible(usize),
    #[error("generator acts on {found} bodies, expected {expected}")]
    BodyCountMismatch { expected: usize, found: usize },
}

// ---------------------------------------------------------------------------
// Elementary actions
// ---------------------------------------------------------------------------

/// Orthogonal action on the plane of motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarIsometry {
    matrix: Mat2,
}

impl PlanarIsometry {
    pub fn new(matrix: Mat2) -> Result<Self, SymmetryError> {
        if !is_orthogonal(&matrix) {
            return Err(SymmetryError::NotOrthogonal);
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self { matrix: Mat2::identity() }
    }

    pub fn rotation(angle: f64) -> Self {
        Self { matrix: crate::planar::rotation(angle) }
    }

    pub fn reflection(axis_angle: f64) -> Self {
        Self { matrix: crate::planar::reflection(axis_angle) }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn is_identity(&self) -> bool {
        mat_approx_eq(&self.matrix, &Mat2::identity(), ELEMENT_MATCH_TOL)
    }

    pub fn is_reflection(&self) -> bool {
        self.matrix.determinant() < 0.0
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { matrix: self.matrix * other.matrix }
    }

    pub fn inverse(&self) -> Self {
        Self { matrix: self.matrix.transpose() }
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        self.matrix * v
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        mat_approx_eq(&self.matrix, &other.matrix, ELEMENT_MATCH_TOL)
    }
}

/// Orthogonal action on the time circle.
///
/// On an `N`-point lattice a compatible rotation acts as an index shift and a
/// compatible reflection as `j -> k - j`; see [`TimeAction::lattice_map`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeAction {
    matrix: Mat2,
}

/// Action of a [`TimeAction`] on the index lattice `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeMap {
    /// `j -> j + shift (mod N)`
    Shift(usize),
    /// `j -> pivot - j (mod N)`
    Reflect(usize),
}

impl LatticeMap {
    pub fn apply(&self, j: usize, n: usize) -> usize {
        match *self {
            LatticeMap::Shift(k) => (j + k) % n,
            LatticeMap::Reflect(k) => (k + n - j % n) % n,
        }
    }

    pub fn inverse_apply(&self, j: usize, n: usize) -> usize {
        match *self {
            LatticeMap::Shift(k) => (j + n - k % n) % n,
            LatticeMap::Reflect(_) => self.apply(j, n),
        }
    }
}

impl TimeAction {
    pub fn new(matrix: Mat2) -> Result<Self, SymmetryError> {
        if !is_orthogonal(&matrix) {
            return Err(SymmetryError::NotOrthogonal);
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self { matrix: Mat2::identity() }
    }

    pub fn rotation(angle: f64) -> Self {
        Self { matrix: crate::planar::rotation(angle) }
    }

    /// Time reflection fixing the circle points at `axis_angle` and
    /// `axis_angle + pi`.
    pub fn reflection(axis_angle: f64) -> Self {
        Self { matrix: crate::planar::reflection(axis_angle) }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn is_identity(&self) -> bool {
        mat_approx_eq(&self.matrix, &Mat2::identity(), ELEMENT_MATCH_TOL)
    }

    pub fn is_reflection(&self) -> bool {
        self.matrix.determinant() < 0.0
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { matrix: self.matrix * other.matrix }
    }

    pub fn inverse(&self) -> Self {
        Self { matrix: self.matrix.transpose() }
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        mat_approx_eq(&self.matrix, &other.matrix, ELEMENT_MATCH_TOL)
    }

    /// Resolve the action on the `n`-point lattice `t_j = j T / N`.
    ///
    /// A rotation must be by a multiple of `2 pi / N`, a reflection must send
    /// lattice points to lattice points. Angle mismatch up to
    /// [`ELEMENT_MATCH_TOL`] is snapped.
    pub fn lattice_map(&self, n: usize) -> Result<LatticeMap, SymmetryError> {
        let step = TAU / n as f64;
        if self.matrix.determinant() > 0.0 {
            let angle = rotation_angle(&self.matrix);
            let k = (angle / step).round();
            if (angle - k * step).abs() > ELEMENT_MATCH_TOL {
                return Err(SymmetryError::LatticeIncompatible(n));
            }
            Ok(LatticeMap::Shift((k as i64).rem_euclid(n as i64) as usize))
        } else {
            // theta -> 2 phi - theta maps the lattice to itself iff
            // 2 phi is a multiple of 2 pi / N.
            let two_phi = 2.0 * reflection_axis(&self.matrix);
            let k = (two_phi / step).round();
            if (two_phi - k * step).abs() > ELEMENT_MATCH_TOL {
                return Err(SymmetryError::LatticeIncompatible(n));
            }
            Ok(LatticeMap::Reflect((k as i64).rem_euclid(n as i64) as usize))
        }
    }
}

/// Bijection of the body indices, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, SymmetryError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(SymmetryError::NotABijection(images.clone()));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    /// Build from disjoint cycles in 1-based indices, e.g. `&[&[1, 2], &[3, 4]]`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, SymmetryError> {
        let mut images: Vec<usize> = (0..n).collect();
        for cycle in cycles {
            for w in 0..cycle.len() {
                let from = cycle[w];
                let to = cycle[(w + 1) % cycle.len()];
                if from == 0 || from > n || to == 0 || to > n {
                    return Err(SymmetryError::NotABijection(vec![from, to]));
                }
                images[from - 1] = to - 1;
            }
        }
        Permutation::new(images)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Functional composition: `(self . other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Self { images: inv }
    }

    /// Cycle notation with 1-based indices; `()` for the identity.
    pub fn cycle_notation(&self) -> String {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&(i + 1).to_string());
                first = false;
                i = self.images[i];
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// One symmetry: how it moves time, the plane and the body labels.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub time: TimeAction,
    pub space: PlanarIsometry,
    pub perm: Permutation,
}

impl GroupElement {
    pub fn new(time: TimeAction, space: PlanarIsometry, perm: Permutation) -> Self {
        Self { time, space, perm }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            time: TimeAction::identity(),
            space: PlanarIsometry::identity(),
            perm: Permutation::identity(n),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.time.is_identity() && self.space.is_identity() && self.perm.is_identity()
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            time: self.time.compose(&other.time),
            space: self.space.compose(&other.space),
            perm: self.perm.compose(&other.perm),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            time: self.time.inverse(),
            space: self.space.inverse(),
            perm: self.perm.inverse(),
        }
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.perm == other.perm
            && self.time.approx_eq(&other.time)
            && self.space.approx_eq(&other.space)
    }

    /// Configuration action `(g . x)_i = rho(g) x_{sigma(g)^-1(i)}`.
    pub fn apply_config(&self, config: &Configuration) -> Configuration {
        let inv = self.perm.inverse();
        let positions = (0..config.n_bodies())
            .map(|i| self.space.apply(config.positions[inv.apply(i)]))
            .collect();
        Configuration::new(positions)
    }
}

// ---------------------------------------------------------------------------
// Groups
// ---------------------------------------------------------------------------

/// Which component's kernel to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Time,
    Space,
    Permutation,
}

/// A finite symmetry group together with the masses it must respect.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    elements: Vec<GroupElement>,
    masses: MassVector,
    n: usize,
}

fn check_mass_compatibility(perm: &Permutation, masses: &MassVector) -> Result<(), SymmetryError> {
    for i in 0..perm.len() {
        let j = perm.apply(i);
        let (mi, mj) = (masses.get(i), masses.get(j));
        if (mi - mj).abs() > 1e-12 * mi.max(mj) {
            return Err(SymmetryError::MassIncompatible { i: i + 1, j: j + 1, mi, mj });
        }
    }
    Ok(())
}

/// Closure of the generators, with the identity adjoined.
pub fn generate_group(
    generators: &[GroupElement],
    masses: &MassVector,
) -> Result<SymmetryGroup, SymmetryError> {
    generate_group_bounded(generators, masses, DEFAULT_MAX_ORDER)
}

/// Like [`generate_group`] with an explicit order bound.
pub fn generate_group_bounded(
    generators: &[GroupElement],
    masses: &MassVector,
    max_order: usize,
) -> Result<SymmetryGroup, SymmetryError> {
    let n = masses.len();
    for g in generators {
        if g.perm.len() != n {
            return Err(SymmetryError::BodyCountMismatch { expected: n, found: g.perm.len() });
        }
        check_mass_compatibility(&g.perm, masses)?;
    }
    let mut elements = vec![GroupElement::identity(n)];
    let mut frontier: Vec<usize> = vec![0];
    while let Some(idx) = frontier.pop() {
        let base = elements[idx].clone();
        for g in generators {
            let prod = g.compose(&base);
            if !elements.iter().any(|e| e.approx_eq(&prod)) {
                check_mass_compatibility(&prod.perm, masses)?;
                elements.push(prod);
                frontier.push(elements.len() - 1);
                if elements.len() > max_order {
                    return Err(SymmetryError::ClosureOverflow(max_order));
                }
            }
        }
    }
    Ok(SymmetryGroup { elements, masses: masses.clone(), n })
}

impl SymmetryGroup {
    /// The trivial group on `n` bodies.
    pub fn trivial(masses: &MassVector) -> Self {
        Self {
            elements: vec![GroupElement::identity(masses.len())],
            masses: masses.clone(),
            n: masses.len(),
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn n_bodies(&self) -> usize {
        self.n
    }

    pub fn masses(&self) -> &MassVector {
        &self.masses
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.iter().any(|e| e.approx_eq(g))
    }

    /// Number of distinct time actions (the order of the image of `tau`).
    pub fn time_image_order(&self) -> usize {
        let mut distinct: Vec<&TimeAction> = Vec::new();
        for e in &self.elements {
            if !distinct.iter().any(|t| t.approx_eq(&e.time)) {
                distinct.push(&e.time);
            }
        }
        distinct.len()
    }

    /// Subgroup whose selected component acts trivially.
    pub fn kernel(&self, which: KernelKind) -> SymmetryGroup {
        let elements = self
            .elements
            .iter()
            .filter(|e| match which {
                KernelKind::Time => e.time.is_identity(),
                KernelKind::Space => e.space.is_identity(),
                KernelKind::Permutation => e.perm.is_identity(),
            })
            .cloned()
            .collect();
        SymmetryGroup { elements, masses: self.masses.clone(), n: self.n }
    }

    /// Elements lying in both groups (assumed subgroups of a common group).
    pub fn intersect(&self, other: &SymmetryGroup) -> SymmetryGroup {
        let elements = self
            .elements
            .iter()
            .filter(|e| other.contains(e))
            .cloned()
            .collect();
        SymmetryGroup { elements, masses: self.masses.clone(), n: self.n }
    }

    fn is_closed(&self) -> bool {
        for a in &self.elements {
            for b in &self.elements {
                if !self.contains(&a.compose(b)) {
                    return false;
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Fixed subspaces, coercivity, degeneracy
// ---------------------------------------------------------------------------

fn scale_config(c: &Configuration, s: f64) -> Configuration {
    Configuration::new(c.positions.iter().map(|x| s * x).collect())
}

fn add_config(a: &Configuration, b: &Configuration, s: f64) -> Configuration {
    Configuration::new(
        a.positions
            .iter()
            .zip(b.positions.iter())
            .map(|(x, y)| x + s * y)
            .collect(),
    )
}

/// Average of the configuration actions of `elements`.
pub fn average_config_action(elements: &[GroupElement], config: &Configuration) -> Configuration {
    let mut acc = Configuration::zeros(config.n_bodies());
    for g in elements {
        acc = add_config(&acc, &g.apply_config(config), 1.0);
    }
    scale_config(&acc, 1.0 / elements.len() as f64)
}

/// Mass-orthonormal basis of the zero-centre-of-mass configuration space.
fn com_space_basis(n: usize, masses: &MassVector) -> Vec<Configuration> {
    let mut raw = Vec::with_capacity(2 * n);
    for i in 0..n {
        for axis in 0..2 {
            let mut c = Configuration::zeros(n);
            c.positions[i][axis] = 1.0;
            c.project_center_of_mass(masses);
            raw.push(c);
        }
    }
    gram_schmidt(raw, masses)
}

/// Modified Gram-Schmidt in the mass inner product with rank tolerance
/// [`RANK_TOL`].
fn gram_schmidt(vectors: Vec<Configuration>, masses: &MassVector) -> Vec<Configuration> {
    let mut basis: Vec<Configuration> = Vec::new();
    for mut v in vectors {
        for _ in 0..2 {
            for b in &basis {
                let coeff = mass_dot(&v, b, masses);
                v = add_config(&v, b, -coeff);
            }
        }
        let norm = mass_dot(&v, &v, masses).sqrt();
        if norm > RANK_TOL {
            basis.push(scale_config(&v, 1.0 / norm));
        }
    }
    basis
}

/// Mass-orthonormal basis of the configurations fixed by every element of the
/// given subgroup (time components are ignored), inside the zero
/// centre-of-mass space.
pub fn fixed_config_subspace(
    elements: &[GroupElement],
    masses: &MassVector,
) -> Result<Vec<Configuration>, SymmetryError> {
    if elements.is_empty() {
        return Err(SymmetryError::NotASubgroup);
    }
    let n = elements[0].perm.len();
    let sub = SymmetryGroup {
        elements: elements.to_vec(),
        masses: masses.clone(),
        n,
    };
    if !sub.is_closed() {
        return Err(SymmetryError::NotASubgroup);
    }
    let projected: Vec<Configuration> = com_space_basis(n, masses)
        .iter()
        .map(|b| average_config_action(elements, b))
        .collect();
    Ok(gram_schmidt(projected, masses))
}

/// Dimension of the fixed configuration subspace of the whole group.
pub fn fixed_subspace_dimension(group: &SymmetryGroup) -> usize {
    fixed_config_subspace(group.elements(), group.masses())
        .expect("a group is closed")
        .len()
}

/// The equivariant action functional is coercive iff no nonzero configuration
/// is fixed by the whole group.
pub fn is_coercive(group: &SymmetryGroup) -> bool {
    fixed_subspace_dimension(group) == 0
}

/// Kernel-level diagnostics for a symmetry constraint.
///
/// A constraint that fails one of these is degenerate: it forces collisions,
/// confines the bodies, retraces loops or leaves room for escape to infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    /// `ker tau ∩ ker rho ∩ ker sigma = 1`.
    pub triple_kernel_trivial: bool,
    /// `ker tau ∩ ker rho = 1`; a nontrivial element here forces the loop
    /// through permanent collisions.
    pub ker_tau_ker_rho_trivial: bool,
    /// `ker tau ∩ ker sigma = 1`; a nontrivial element here confines the
    /// bodies to a proper linear subspace of the plane.
    pub ker_tau_ker_sigma_trivial: bool,
    /// Order of `ker rho ∩ ker sigma`; at most 2 for an admissible action,
    /// with the nontrivial element acting as a time reflection.
    pub ker_rho_ker_sigma_order: usize,
    /// Some element of `ker rho ∩ ker sigma` acts as a nontrivial time
    /// rotation, so every equivariant loop retraces a shorter loop.
    pub duplicate_traversal: bool,
    /// The subspace fixed by `ker tau` consists of collision configurations
    /// (two bodies coincide identically, or the subspace is zero).
    pub fixed_time_space_in_collisions: bool,
    pub coercive: bool,
}

impl DegeneracyReport {
    /// All kernel conditions hold and the functional is coercive.
    pub fn is_admissible(&self) -> bool {
        self.triple_kernel_trivial
            && self.ker_tau_ker_rho_trivial
            && self.ker_tau_ker_sigma_trivial
            && self.ker_rho_ker_sigma_order <= 2
            && !self.duplicate_traversal
            && !self.fixed_time_space_in_collisions
            && self.coercive
    }
}

/// Whether the span of `basis` forces two bodies to coincide identically.
fn forces_coincidence(basis: &[Configuration], n: usize) -> bool {
    if basis.is_empty() {
        // only the zero configuration: total collision
        return true;
    }
    for i in 0..n {
        for j in i + 1..n {
            let max_gap = basis
                .iter()
                .map(|b| (b.positions[i] - b.positions[j]).norm())
                .fold(0.0f64, f64::max);
            if max_gap < RANK_TOL {
                return true;
            }
        }
    }
    false
}

/// Evaluate the kernel conditions and coercivity for `group`.
pub fn degeneracy_report(group: &SymmetryGroup) -> DegeneracyReport {
    let kt = group.kernel(KernelKind::Time);
    let kr = group.kernel(KernelKind::Space);
    let ks = group.kernel(KernelKind::Permutation);
    let kt_kr = kt.intersect(&kr);
    let kt_ks = kt.intersect(&ks);
    let kr_ks = kr.intersect(&ks);
    let triple = kt_kr.intersect(&ks);
    let duplicate_traversal = kr_ks
        .elements()
        .iter()
        .any(|e| !e.time.is_identity() && !e.time.is_reflection());
    let fixed_by_kt = fixed_config_subspace(kt.elements(), group.masses())
        .expect("kernel is a subgroup");
    DegeneracyReport {
        triple_kernel_trivial: triple.order() == 1,
        ker_tau_ker_rho_trivial: kt_kr.order() == 1,
        ker_tau_ker_sigma_trivial: kt_ks.order() == 1,
        ker_rho_ker_sigma_order: kr_ks.order(),
        duplicate_traversal,
        fixed_time_space_in_collisions: forces_coincidence(&fixed_by_kt, group.n_bodies()),
        coercive: is_coercive(group),
    }
}

/// The two antipodal lattice indices fixed by a time reflection.
pub fn fixed_times(element: &GroupElement, n_lattice: usize) -> Result<(usize, usize), SymmetryError> {
    if !element.time.is_reflection() {
        return Err(SymmetryError::NotAReflection);
    }
    let map = element.time.lattice_map(n_lattice)?;
    let k = match map {
        LatticeMap::Reflect(k) => k,
        LatticeMap::Shift(_) => return Err(SymmetryError::NotAReflection),
    };
    // fixed indices solve 2 j = k (mod N)
    if k % 2 != 0 || n_lattice % 2 != 0 {
        return Err(SymmetryError::LatticeIncompatible(n_lattice));
    }
    let j0 = k / 2;
    Ok((j0, (j0 + n_lattice / 2) % n_lattice))
}

/// Convenience constructor for the dihedral-style generators used throughout:
/// a time reflection about `axis_angle` paired with a planar action and a
/// permutation.
pub fn time_reflection_generator(
    axis_angle: f64,
    space: PlanarIsometry,
    perm: Permutation,
) -> GroupElement {
    GroupElement::new(TimeAction::reflection(axis_angle), space, perm)
}
