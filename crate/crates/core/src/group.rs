//! Rigid motions of R^3 and finitely supported probability measures on them.
//!
//! An isometry is stored as the pair `(v, θ)` acting by `x ↦ v + θx`, with
//! product `(v1, θ1)(v2, θ2) = (v1 + θ1 v2, θ1 θ2)`. Measures are weighted atom
//! lists; near-duplicate atoms are merged so that convolution chains stay
//! compact.

use nalgebra::{Matrix3, UnitQuaternion, Vector3, SVD};
use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on `‖RᵀR − I‖_max` and `|det R − 1|`.
pub const ORTHO_TOL: f64 = 1e-12;
/// Atoms closer than this in `‖R_g − R_h‖_max + |v_g − v_h|` are merged.
pub const MERGE_TOL: f64 = 1e-10;
/// Default cap on the number of atom pairs formed by a convolution.
pub const DEFAULT_ATOM_CAP: usize = 1_000_000;

fn orthogonality_defect(r: &Matrix3<f64>) -> f64 {
    let gram = (r.transpose() * r - Matrix3::identity()).amax();
    gram.max((r.determinant() - 1.0).abs())
}

/// Nearest rotation in Frobenius norm (polar factor).
fn polar_projection(r: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = SVD::new(*r, true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut q = u * vt;
    if q.determinant() < 0.0 {
        let mut u = u;
        u.set_column(2, &(-u.column(2)));
        q = u * vt;
    }
    q
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Isometry {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Isometry {
    /// Strict constructor: the rotation must already be orthogonal with
    /// determinant one to within [`ORTHO_TOL`].
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        if !rotation.iter().chain(translation.iter()).all(|x| x.is_finite()) {
            return Err(Error::InvalidIsometry("non-finite entry".into()));
        }
        let defect = orthogonality_defect(&rotation);
        if defect > ORTHO_TOL {
            return Err(Error::InvalidIsometry(format!(
                "rotation defect {defect:.3e} exceeds {ORTHO_TOL:.0e}"
            )));
        }
        Ok(Self { rotation, translation })
    }

    /// Accepts a rotation within `tol` of SO(3) and projects it onto SO(3).
    pub fn from_approx_matrix(
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        tol: f64,
    ) -> Result<Self> {
        if !rotation.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidIsometry("non-finite entry".into()));
        }
        let defect = orthogonality_defect(&rotation);
        if defect > tol {
            return Err(Error::InvalidIsometry(format!(
                "rotation defect {defect:.3e} exceeds {tol:.0e}"
            )));
        }
        let rotation = if defect > ORTHO_TOL { polar_projection(&rotation) } else { rotation };
        Self::new(rotation, translation)
    }

    pub fn identity() -> Self {
        Self { rotation: Matrix3::identity(), translation: Vector3::zeros() }
    }

    pub fn translation_only(v: Vector3<f64>) -> Self {
        Self { rotation: Matrix3::identity(), translation: v }
    }

    pub fn rotation_only(r: Matrix3<f64>) -> Result<Self> {
        Self::new(r, Vector3::zeros())
    }

    /// Rotation by `angle` radians about `axis`, followed by translation `v`.
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64, v: Vector3<f64>) -> Result<Self> {
        let n = axis.norm();
        if !(n > 0.0) || !angle.is_finite() {
            return Err(Error::InvalidIsometry("degenerate axis".into()));
        }
        let q = UnitQuaternion::from_axis_angle(&nalgebra::Unit::new_unchecked(axis / n), angle);
        Self::new(q.to_rotation_matrix().into_inner(), v)
    }

    /// Rotation given by the quaternion `w + xi + yj + zk` (normalized here).
    pub fn from_quaternion(wxyz: [f64; 4], v: Vector3<f64>) -> Result<Self> {
        let q = nalgebra::Quaternion::new(wxyz[0], wxyz[1], wxyz[2], wxyz[3]);
        if !(q.norm() > 0.0) {
            return Err(Error::InvalidIsometry("zero quaternion".into()));
        }
        let q = UnitQuaternion::from_quaternion(q);
        Self::new(q.to_rotation_matrix().into_inner(), v)
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    /// `g ∘ h`.
    pub fn compose(&self, h: &Isometry) -> Isometry {
        let mut rotation = self.rotation * h.rotation;
        if orthogonality_defect(&rotation) > ORTHO_TOL {
            rotation = polar_projection(&rotation);
        }
        Isometry { rotation, translation: self.translation + self.rotation * h.translation }
    }

    pub fn inverse(&self) -> Isometry {
        let rt = self.rotation.transpose();
        Isometry { rotation: rt, translation: -(rt * self.translation) }
    }

    pub fn apply(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.translation + self.rotation * x
    }

    /// Merge metric `‖R_g − R_h‖_max + |v_g − v_h|`.
    pub fn distance(&self, other: &Isometry) -> f64 {
        (self.rotation - other.rotation).amax() + (self.translation - other.translation).norm()
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Scalar used to sort atoms so that near-duplicates are adjacent.
    /// Changes by at most `12 · distance` between two isometries.
    fn sort_key(&self) -> f64 {
        const C: [f64; 12] = [
            0.913, -0.557, 0.331, 0.781, -0.229, 0.647, -0.871, 0.419, 0.163, 0.971, -0.733, 0.287,
        ];
        let r = self.rotation.as_slice();
        let v = self.translation.as_slice();
        r.iter().chain(v.iter()).zip(C.iter()).map(|(x, c)| x * c).sum()
    }
}

/// Moments of the translation and rotation parts of a measure.
#[derive(Debug, Clone, Serialize)]
pub struct MomentSummary {
    /// `Σ w_g |v(g)|²`.
    pub c: f64,
    pub mean_translation: Vector3<f64>,
    pub mean_rotation: Matrix3<f64>,
    pub max_radius: f64,
}

/// Finitely supported probability measure on Isom(R^3).
#[derive(Debug, Clone, Serialize)]
pub struct AtomicMeasure {
    atoms: Vec<(Isometry, f64)>,
    label: String,
}

impl AtomicMeasure {
    /// Builds a measure from weighted atoms. Weights must be positive and sum
    /// to one within 1e-12; duplicate atoms are merged.
    pub fn new(atoms: Vec<(Isometry, f64)>, label: impl Into<String>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        if let Some((_, w)) = atoms.iter().find(|(_, w)| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidMeasure(format!("non-positive weight {w}")));
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        Ok(Self { atoms: merge_atoms(atoms), label: label.into() })
    }

    /// Like [`AtomicMeasure::new`] but rescales positive weights to sum to one.
    pub fn normalized(atoms: Vec<(Isometry, f64)>, label: impl Into<String>) -> Result<Self> {
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidMeasure("total weight is not positive".into()));
        }
        if let Some((_, w)) = atoms.iter().find(|(_, w)| !(*w > 0.0)) {
            return Err(Error::InvalidMeasure(format!("non-positive weight {w}")));
        }
        let atoms = atoms.into_iter().map(|(g, w)| (g, w / total)).collect::<Vec<_>>();
        let s: f64 = atoms.iter().map(|(_, w)| w).sum();
        let atoms = atoms.into_iter().map(|(g, w)| (g, w / s)).collect();
        Self::new(atoms, label)
    }

    pub fn dirac(g: Isometry, label: impl Into<String>) -> Self {
        Self { atoms: vec![(g, 1.0)], label: label.into() }
    }

    /// Uniform measure on the given isometries.
    pub fn uniform(gs: &[Isometry], label: impl Into<String>) -> Result<Self> {
        let w = 1.0 / gs.len() as f64;
        Self::normalized(gs.iter().map(|g| (*g, w)).collect(), label)
    }

    pub fn atoms(&self) -> &[(Isometry, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn moments(&self) -> MomentSummary {
        let mut c = 0.0;
        let mut mean_translation = Vector3::zeros();
        let mut mean_rotation = Matrix3::zeros();
        let mut max_radius: f64 = 0.0;
        for (g, w) in &self.atoms {
            let v = g.translation();
            c += w * v.norm_squared();
            mean_translation += *w * v;
            mean_rotation += *w * g.rotation();
            max_radius = max_radius.max(v.norm());
        }
        MomentSummary { c, mean_translation, mean_rotation, max_radius }
    }

    /// The pushforward under inversion, μ̌.
    pub fn reverse(&self) -> AtomicMeasure {
        AtomicMeasure {
            atoms: merge_atoms(self.atoms.iter().map(|(g, w)| (g.inverse(), *w)).collect()),
            label: format!("{}^-1", self.label),
        }
    }

    /// Equality of measures up to the merge tolerance on atoms and `weight_tol`
    /// on weights.
    pub fn approx_eq(&self, other: &AtomicMeasure, weight_tol: f64) -> bool {
        if self.atoms.len() != other.atoms.len() {
            return false;
        }
        let mut used = vec![false; other.atoms.len()];
        self.atoms.iter().all(|(g, w)| {
            let hit = other.atoms.iter().enumerate().find(|(j, (h, u))| {
                !used[*j] && g.approx_eq(h, MERGE_TOL) && (w - u).abs() <= weight_tol
            });
            match hit {
                Some((j, _)) => {
                    used[j] = true;
                    true
                }
                None => false,
            }
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.approx_eq(&self.reverse(), 1e-12)
    }

    /// Mass of atoms moving `x`.
    pub fn mass_moving(&self, x: &Vector3<f64>, tol: f64) -> f64 {
        self.atoms.iter().filter(|(g, _)| (g.apply(x) - x).norm() > tol).fold(0.0, |acc, (_, w)| acc + w)
    }
}

/// Sorts atoms by a 1-D projection and merges neighbours within [`MERGE_TOL`].
fn merge_atoms(mut atoms: Vec<(Isometry, f64)>) -> Vec<(Isometry, f64)> {
    if atoms.len() < 2 {
        return atoms;
    }
    let mut keyed: Vec<(f64, usize)> =
        atoms.iter().enumerate().map(|(i, (g, _))| (g.sort_key(), i)).collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let window = 12.0 * MERGE_TOL;
    let mut absorbed = vec![false; atoms.len()];
    let mut out = Vec::with_capacity(atoms.len());
    for a in 0..keyed.len() {
        let (ka, ia) = keyed[a];
        if absorbed[ia] {
            continue;
        }
        let mut weight = atoms[ia].1;
        for &(kb, ib) in keyed[a + 1..].iter() {
            if kb - ka > window {
                break;
            }
            if !absorbed[ib] && atoms[ia].0.approx_eq(&atoms[ib].0, MERGE_TOL) {
                absorbed[ib] = true;
                weight += atoms[ib].1;
            }
        }
        out.push((atoms[ia].0, weight));
    }
    atoms.clear();
    out
}

/// `μ * ν`: the law of `gh` with `g ~ μ`, `h ~ ν` independent.
pub fn convolve(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<AtomicMeasure> {
    convolve_capped(mu, nu, DEFAULT_ATOM_CAP)
}

pub fn convolve_capped(mu: &AtomicMeasure, nu: &AtomicMeasure, cap: usize) -> Result<AtomicMeasure> {
    let pairs = mu.len().saturating_mul(nu.len());
    if pairs > cap {
        return Err(Error::SupportBlowup { atoms: pairs, cap });
    }
    let mut atoms = Vec::with_capacity(pairs);
    for (g, wg) in &mu.atoms {
        for (h, wh) in &nu.atoms {
            atoms.push((g.compose(h), wg * wh));
        }
    }
    Ok(AtomicMeasure {
        atoms: merge_atoms(atoms),
        label: format!("({})*({})", mu.label, nu.label),
    })
}

/// `½(μ + μ̌)`.
pub fn symmetrize(mu: &AtomicMeasure) -> AtomicMeasure {
    let mut atoms: Vec<(Isometry, f64)> = Vec::with_capacity(2 * mu.len());
    for (g, w) in &mu.atoms {
        atoms.push((*g, 0.5 * w));
        atoms.push((g.inverse(), 0.5 * w));
    }
    AtomicMeasure { atoms: merge_atoms(atoms), label: format!("sym({})", mu.label) }
}

/// Renormalized restriction of `μ` to `{g : |v(g)| ≤ s}`, together with the
/// discarded mass `β = μ(G ∖ K_s)`.
pub fn truncate_restrict(mu: &AtomicMeasure, s: f64) -> Result<(AtomicMeasure, f64)> {
    let kept: Vec<(Isometry, f64)> =
        mu.atoms.iter().filter(|(g, _)| g.translation().norm() <= s).cloned().collect();
    if kept.is_empty() {
        return Err(Error::EmptyTruncation(s));
    }
    let mass: f64 = kept.iter().map(|(_, w)| w).sum();
    let beta = mu.atoms.iter().filter(|(g, _)| g.translation().norm() > s).fold(0.0, |acc, (_, w)| acc + w);
    let atoms = kept.into_iter().map(|(g, w)| (g, w / mass)).collect();
    Ok((AtomicMeasure { atoms, label: format!("{}|s={s}", mu.label) }, beta))
}

/// Condition-number threshold above which `I − Σ w θ(g)` counts as singular.
pub const FIXED_POINT_COND_MAX: f64 = 1e8;

/// The unique `a` with `Σ w_g g(a) = a`, i.e. `(I − Σ w θ) a = Σ w v`.
pub fn fixed_point(mu: &AtomicMeasure) -> Result<Vector3<f64>> {
    let m = mu.moments();
    let system = Matrix3::identity() - m.mean_rotation;
    let svd = SVD::new(system, true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond <= FIXED_POINT_COND_MAX) {
        return Err(Error::NoUniqueFixedPoint(cond));
    }
    let a = svd
        .solve(&m.mean_translation, 0.0)
        .map_err(|_| Error::NoUniqueFixedPoint(cond))?;
    // one step of iterative refinement
    let r = m.mean_translation - system * a;
    let a = a + svd.solve(&r, 0.0).unwrap_or_else(|_| Vector3::zeros());
    Ok(a)
}

/// `δ̌_τ * μ * δ_τ` with `τ = (a, I)` and `a` the fixed point of `μ`; the
/// result has zero mean translation.
pub fn center(mu: &AtomicMeasure) -> Result<(AtomicMeasure, Vector3<f64>)> {
    let a = fixed_point(mu)?;
    let tau = Isometry::translation_only(a);
    let tau_inv = tau.inverse();
    let atoms = mu.atoms.iter().map(|(g, w)| (tau_inv.compose(&g.compose(&tau)), *w)).collect();
    Ok((
        AtomicMeasure { atoms: merge_atoms(atoms), label: format!("center({})", mu.label) },
        a,
    ))
}

/// `μ^{*(ℓ)}` by repeated squaring.
pub fn convolution_power(mu: &AtomicMeasure, ell: usize) -> Result<AtomicMeasure> {
    convolution_power_capped(mu, ell, DEFAULT_ATOM_CAP)
}

pub fn convolution_power_capped(mu: &AtomicMeasure, ell: usize, cap: usize) -> Result<AtomicMeasure> {
    if ell == 0 {
        return Err(Error::InvalidArgument("convolution power must be >= 1".into()));
    }
    // Left-to-right powers keep the word order g1 g2 ... gℓ.
    let mut acc = mu.clone();
    for _ in 1..ell {
        acc = convolve_capped(&acc, mu, cap)?;
    }
    acc.label = format!("({})^*{ell}", mu.label);
    Ok(acc)
}

/// Common fixed point of the support, if one exists: a least-squares solution
/// of the stacked system `(I − θ(g)) x = v(g)` with relative residual at most
/// `1e-8`.
pub fn common_fixed_point(mu: &AtomicMeasure) -> Option<Vector3<f64>> {
    let n = mu.len();
    let mut a = nalgebra::DMatrix::<f64>::zeros(3 * n, 3);
    let mut b = nalgebra::DVector::<f64>::zeros(3 * n);
    for (k, (g, _)) in mu.atoms.iter().enumerate() {
        let block = Matrix3::identity() - g.rotation();
        for i in 0..3 {
            for j in 0..3 {
                a[(3 * k + i, j)] = block[(i, j)];
            }
            b[3 * k + i] = g.translation()[i];
        }
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let x = svd.solve(&b, 1e-10 * smax.max(1e-300)).ok()?;
    let residual = (&a * &x - &b).norm();
    let scale = 1.0 + mu.moments().max_radius;
    if residual <= 1e-8 * scale {
        Some(Vector3::new(x[0], x[1], x[2]))
    } else {
        None
    }
}
