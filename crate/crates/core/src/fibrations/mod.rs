//! The Hopf submersions `S^{2n+1} → CP^n`, `S^{4n+3} → HP^n` and `S^15 → S^8(1/2)`,
//! with O'Neill tensors by projected finite differences, horizontal lifts and holonomy.
//!
//! Total-space points are unit vectors in `R^N`: complex coordinates are stored as
//! `(re, im)` pairs and quaternionic ones as `(1, i, j, k)` blocks. Base points of the
//! projective fibrations are realified projectors onto the fiber span; the octonionic
//! base point is `h(x, y) = (2xȳ, |x|² − |y|²) ∈ S^8`, with distances halved.

pub mod octonion;

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{random_unit_vector, unit_angle};
use octonion::Octonion;

/// Step of the central differences used for the O'Neill tensors.
pub const FD_STEP: f64 = 1e-5;
/// Singular values of the projection Jacobian below this count as kernel.
pub const KERNEL_TOL: f64 = 1e-8;
/// Tolerance on unit length, tangency and subbundle membership of tensor arguments.
pub const ARG_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "n")]
pub enum Fibration {
    /// `S^{2n+1} → CP^n`.
    Complex(usize),
    /// `S^{4n+3} → HP^n`.
    Quaternionic(usize),
    /// `S^15 → S^8(1/2)`.
    Octonionic,
}

impl std::fmt::Display for Fibration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Complex(n) => write!(f, "complex-{n}"),
            Self::Quaternionic(n) => write!(f, "quaternionic-{n}"),
            Self::Octonionic => f.write_str("octonionic"),
        }
    }
}

impl std::str::FromStr for Fibration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "octonionic" {
            return Ok(Self::Octonionic);
        }
        let parse = |rest: &str| {
            rest.parse::<usize>()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| invalid(format!("bad fibration dimension in {s:?}")))
        };
        if let Some(rest) = s.strip_prefix("complex-") {
            return Ok(Self::Complex(parse(rest)?));
        }
        if let Some(rest) = s.strip_prefix("quaternionic-") {
            return Ok(Self::Quaternionic(parse(rest)?));
        }
        Err(invalid(format!("unknown fibration {s:?}")))
    }
}

impl Fibration {
    /// Real dimension `N` of the ambient space of the total sphere `S^{N-1}`.
    pub fn total_dim(&self) -> usize {
        match *self {
            Self::Complex(n) => 2 * (n + 1),
            Self::Quaternionic(n) => 4 * (n + 1),
            Self::Octonionic => 16,
        }
    }

    pub fn fiber_dim(&self) -> usize {
        match self {
            Self::Complex(_) => 1,
            Self::Quaternionic(_) => 3,
            Self::Octonionic => 7,
        }
    }

    pub fn base_dim(&self) -> usize {
        self.total_dim() - 1 - self.fiber_dim()
    }

    /// Whether the base is a round sphere (`CP^1`, `HP^1`, `S^8`).
    pub fn base_is_sphere(&self) -> bool {
        matches!(self, Self::Complex(1) | Self::Quaternionic(1) | Self::Octonionic)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Complex(0) | Self::Quaternionic(0) => Err(invalid("fibration dimension must be >= 1")),
            _ => Ok(()),
        }
    }

    /// Matrices `R_a` whose images `R_a z` span the fiber direction space, `R_0 = I` first:
    /// multiplication by `i` (complex) or right multiplication by `i, j, k` (quaternionic).
    /// Empty for the octonionic fibration.
    pub fn fiber_maps(&self) -> Vec<DMatrix<f64>> {
        let n = self.total_dim();
        match self {
            Self::Complex(_) => {
                let mut i = DMatrix::zeros(n, n);
                for b in 0..n / 2 {
                    i[(2 * b + 1, 2 * b)] = 1.0;
                    i[(2 * b, 2 * b + 1)] = -1.0;
                }
                vec![DMatrix::identity(n, n), i]
            }
            Self::Quaternionic(_) => {
                // right multiplication q ↦ q·i, q·j, q·k on each (a, b, c, d) block
                let blocks: [[(usize, f64); 4]; 3] = [
                    [(1, -1.0), (0, 1.0), (3, 1.0), (2, -1.0)],
                    [(2, -1.0), (3, -1.0), (0, 1.0), (1, 1.0)],
                    [(3, -1.0), (2, 1.0), (1, -1.0), (0, 1.0)],
                ];
                let mut out = vec![DMatrix::identity(n, n)];
                for rule in blocks {
                    let mut m = DMatrix::zeros(n, n);
                    for b in 0..n / 4 {
                        for (row, &(src, sign)) in rule.iter().enumerate() {
                            m[(4 * b + row, 4 * b + src)] = sign;
                        }
                    }
                    out.push(m);
                }
                out
            }
            Self::Octonionic => Vec::new(),
        }
    }

    fn check_point(&self, z: &DVector<f64>) -> Result<()> {
        self.validate()?;
        if z.len() != self.total_dim() {
            return Err(invalid(format!("{self} needs points in R^{}", self.total_dim())));
        }
        if (z.norm() - 1.0).abs() > 1e-10 {
            return Err(invalid("total-space points must be unit vectors"));
        }
        Ok(())
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        random_unit_vector(self.total_dim(), rng)
    }
}

/// A point of the base, in the embedding described in the module docs.
#[derive(Clone, Debug, PartialEq)]
pub struct BasePoint {
    pub coords: DVector<f64>,
}

fn split_octonions(z: &DVector<f64>) -> (Octonion, Octonion) {
    (
        Octonion::from_slice(&z.as_slice()[..8]),
        Octonion::from_slice(&z.as_slice()[8..]),
    )
}

fn projector(f: &Fibration, z: &DVector<f64>) -> DMatrix<f64> {
    let n = f.total_dim();
    let mut p = DMatrix::zeros(n, n);
    for r in f.fiber_maps() {
        let v = &r * z;
        p += &v * v.transpose();
    }
    p
}

fn project_raw(f: &Fibration, z: &DVector<f64>) -> DVector<f64> {
    match f {
        Fibration::Octonionic => {
            let (x, y) = split_octonions(z);
            let c = (x * y.conj()).scale(2.0);
            let mut out = DVector::zeros(9);
            out.as_mut_slice()[..8].copy_from_slice(&c.0);
            out[8] = x.norm_sqr() - y.norm_sqr();
            out
        }
        _ => {
            let p = projector(f, z);
            DVector::from_column_slice(p.as_slice())
        }
    }
}

/// The submersion itself.
pub fn project(f: &Fibration, z: &DVector<f64>) -> Result<BasePoint> {
    f.check_point(z)?;
    Ok(BasePoint {
        coords: project_raw(f, z),
    })
}

/// Jacobian of the projection (as a map of the ambient space) at `z`.
pub fn jacobian(f: &Fibration, z: &DVector<f64>) -> DMatrix<f64> {
    let n = f.total_dim();
    match f {
        Fibration::Octonionic => {
            let (x, y) = split_octonions(z);
            let mut j = DMatrix::zeros(9, 16);
            for k in 0..8 {
                let e = Octonion::basis(k);
                let dx = (e * y.conj()).scale(2.0);
                let dy = (x * e.conj()).scale(2.0);
                for r in 0..8 {
                    j[(r, k)] = dx.0[r];
                    j[(r, 8 + k)] = dy.0[r];
                }
                j[(8, k)] = 2.0 * x.0[k];
                j[(8, 8 + k)] = -2.0 * y.0[k];
            }
            j
        }
        _ => {
            let maps = f.fiber_maps();
            let images: Vec<DVector<f64>> = maps.iter().map(|r| r * z).collect();
            let mut j = DMatrix::zeros(n * n, n);
            for k in 0..n {
                let mut d = DMatrix::zeros(n, n);
                for (r, rz) in maps.iter().zip(&images) {
                    let rv = r.column(k);
                    d += rv * rz.transpose() + rz * rv.transpose();
                }
                j.set_column(k, &DVector::from_column_slice(d.as_slice()));
            }
            j
        }
    }
}

/// Base distance, normalized so that unit-speed horizontal geodesics project to
/// unit-speed geodesics.
pub fn base_distance(f: &Fibration, x: &BasePoint, y: &BasePoint) -> f64 {
    match f {
        Fibration::Octonionic => 0.5 * unit_angle(&x.coords, &y.coords),
        _ => {
            let k = f.fiber_maps().len() as f64;
            let cos2 = (x.coords.dot(&y.coords) / k).clamp(0.0, 1.0);
            let sin = (&x.coords - &y.coords).norm() / (2.0 * k).sqrt();
            sin.min(1.0).atan2(cos2.sqrt())
        }
    }
}

/// Some point of the fiber over `x`.
pub fn fiber_point(f: &Fibration, x: &BasePoint) -> Result<DVector<f64>> {
    f.validate()?;
    let z = match f {
        Fibration::Octonionic => {
            if x.coords.len() != 9 {
                return Err(invalid("octonionic base points live in R^9"));
            }
            let c = Octonion::from_slice(&x.coords.as_slice()[..8]);
            let s = x.coords[8];
            let r = ((1.0 - s) / 2.0).max(0.0).sqrt();
            let rho = ((1.0 + s) / 2.0).max(0.0).sqrt();
            let (a, b) = if r >= rho {
                (c.scale(0.5 / r), Octonion::basis(0).scale(r))
            } else {
                (Octonion::basis(0).scale(rho), c.conj().scale(0.5 / rho))
            };
            let mut z = DVector::zeros(16);
            z.as_mut_slice()[..8].copy_from_slice(&a.0);
            z.as_mut_slice()[8..].copy_from_slice(&b.0);
            z
        }
        _ => {
            let n = f.total_dim();
            if x.coords.len() != n * n {
                return Err(invalid("projector base point has the wrong size"));
            }
            let p = DMatrix::from_column_slice(n, n, x.coords.as_slice());
            let k = (0..n)
                .max_by(|&a, &b| p[(a, a)].total_cmp(&p[(b, b)]))
                .expect("nonempty");
            p.column(k).into_owned()
        }
    };
    let norm = z.norm();
    if !(norm > 0.1) {
        return Err(Error::GeometryError("base point is not in the image".into()));
    }
    let z = z / norm;
    let back = project(f, &z)?;
    if base_distance(f, &back, x) > 1e-8 {
        return Err(Error::GeometryError("base point is not in the image".into()));
    }
    Ok(z)
}

/// Orthonormal bases of the vertical and horizontal spaces at `z`.
#[derive(Clone, Debug)]
pub struct FrameSplit {
    pub point: DVector<f64>,
    pub vertical: DMatrix<f64>,
    pub horizontal: DMatrix<f64>,
}

impl FrameSplit {
    pub fn vertical_projector(&self) -> DMatrix<f64> {
        &self.vertical * self.vertical.transpose()
    }

    pub fn horizontal_projector(&self) -> DMatrix<f64> {
        &self.horizontal * self.horizontal.transpose()
    }

    pub fn vertical_vector(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        &self.vertical * coeffs
    }

    pub fn horizontal_vector(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        &self.horizontal * coeffs
    }

    pub fn random_vertical<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        self.vertical_vector(&random_unit_vector(self.vertical.ncols(), rng))
    }

    pub fn random_horizontal<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        self.horizontal_vector(&random_unit_vector(self.horizontal.ncols(), rng))
    }
}

/// Vertical space from the kernel of the Jacobian, horizontal space as its complement in
/// the tangent space.
pub fn split(f: &Fibration, z: &DVector<f64>) -> Result<FrameSplit> {
    f.check_point(z)?;
    let n = f.total_dim();
    let j = jacobian(f, z);
    let square = if j.nrows() < n {
        let mut s = DMatrix::zeros(n, n);
        s.view_mut((0, 0), j.shape()).copy_from(&j);
        s
    } else {
        j.clone()
    };
    let svd = square.svd(false, true);
    let vt = svd
        .v_t
        .ok_or_else(|| Error::GeometryError("singular value decomposition failed".into()))?;
    let kernel: Vec<DVector<f64>> = (0..n)
        .filter(|&i| svd.singular_values[i] < KERNEL_TOL)
        .map(|i| vt.row(i).transpose())
        .collect();
    if kernel.len() != f.fiber_dim() {
        return Err(Error::GeometryError(format!(
            "kernel dimension {} differs from fiber dimension {}",
            kernel.len(),
            f.fiber_dim()
        )));
    }
    let vertical = crate::numerics::gram_schmidt(&kernel, std::slice::from_ref(z), 0.5)
        .ok_or_else(|| Error::GeometryError("kernel is not tangent".into()))?;
    for v in &vertical {
        if (&j * v).norm() > 1e-7 {
            return Err(Error::GeometryError("kernel vector is not annihilated".into()));
        }
    }
    let mut against = vec![z.clone()];
    against.extend(vertical.iter().cloned());
    let unit: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e
        })
        .collect();
    let horizontal = complete_orthonormal(&unit, &against, &[]);
    if horizontal.len() != f.base_dim() {
        return Err(Error::GeometryError(
            "horizontal complement has the wrong dimension".into(),
        ));
    }
    Ok(FrameSplit {
        point: z.clone(),
        vertical: DMatrix::from_columns(&vertical),
        horizontal: DMatrix::from_columns(&horizontal),
    })
}

// (P_v, P_h) at a point, from the split.
fn projectors(f: &Fibration, z: &DVector<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let s = split(f, z)?;
    let pv = s.vertical_projector();
    let ph = s.horizontal_projector();
    Ok((pv, ph))
}

/// Derivatives of the projector fields along the great circle through `z` in direction `dir`.
#[derive(Clone, Debug)]
pub struct ProjectorDerivative {
    pub pv: DMatrix<f64>,
    pub ph: DMatrix<f64>,
    pub dpv: DMatrix<f64>,
    pub dph: DMatrix<f64>,
}

impl ProjectorDerivative {
    pub fn new(f: &Fibration, z: &DVector<f64>, dir: &DVector<f64>, h: f64) -> Result<Self> {
        let (pv, ph) = projectors(f, z)?;
        let plus = z * h.cos() + dir * h.sin();
        let minus = z * h.cos() - dir * h.sin();
        let (pv_p, ph_p) = projectors(f, &plus.normalize())?;
        let (pv_m, ph_m) = projectors(f, &minus.normalize())?;
        Ok(Self {
            pv,
            ph,
            dpv: (pv_p - pv_m) / (2.0 * h),
            dph: (ph_p - ph_m) / (2.0 * h),
        })
    }

    /// `E ↦ A_X E` for the direction `X` this was built along.
    pub fn a_matrix(&self) -> DMatrix<f64> {
        &self.pv * &self.dph * &self.ph + &self.ph * &self.dpv * &self.pv
    }

    /// `E ↦ T_V E` for the direction `V` this was built along.
    pub fn t_matrix(&self) -> DMatrix<f64> {
        &self.ph * &self.dpv * &self.pv + &self.pv * &self.dph * &self.ph
    }
}

fn check_unit(v: &DVector<f64>, what: &str) -> Result<()> {
    if (v.norm() - 1.0).abs() > ARG_TOL {
        return Err(invalid(format!("{what} must be a unit vector")));
    }
    Ok(())
}

fn check_tangent(z: &DVector<f64>, v: &DVector<f64>, what: &str) -> Result<()> {
    if v.len() != z.len() || z.dot(v).abs() > ARG_TOL * v.norm().max(1.0) {
        return Err(invalid(format!("{what} must be tangent at the base point")));
    }
    Ok(())
}

/// Matrix of `E ↦ A_X E` at `z` for a unit horizontal `X`.
pub fn a_operator(f: &Fibration, z: &DVector<f64>, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    a_operator_with_step(f, z, x, FD_STEP)
}

pub fn a_operator_with_step(f: &Fibration, z: &DVector<f64>, x: &DVector<f64>, h: f64) -> Result<DMatrix<f64>> {
    f.check_point(z)?;
    check_unit(x, "X")?;
    check_tangent(z, x, "X")?;
    let d = ProjectorDerivative::new(f, z, x, h)?;
    if (&d.pv * x).norm() > ARG_TOL {
        return Err(invalid("X must be horizontal"));
    }
    Ok(d.a_matrix())
}

/// Matrix of `E ↦ T_V E` at `z` for a unit vertical `V`.
pub fn t_operator(f: &Fibration, z: &DVector<f64>, v: &DVector<f64>) -> Result<DMatrix<f64>> {
    f.check_point(z)?;
    check_unit(v, "V")?;
    check_tangent(z, v, "V")?;
    let d = ProjectorDerivative::new(f, z, v, FD_STEP)?;
    if (&d.ph * v).norm() > ARG_TOL {
        return Err(invalid("V must be vertical"));
    }
    Ok(d.t_matrix())
}

/// `A_X E` for unit horizontal `X` and tangent `E`.
pub fn a_tensor(f: &Fibration, z: &DVector<f64>, x: &DVector<f64>, e: &DVector<f64>) -> Result<DVector<f64>> {
    check_tangent(z, e, "E")?;
    Ok(a_operator(f, z, x)? * e)
}

/// `T_V E` for unit vertical `V` and tangent `E`.
pub fn t_tensor(f: &Fibration, z: &DVector<f64>, v: &DVector<f64>, e: &DVector<f64>) -> Result<DVector<f64>> {
    check_tangent(z, e, "E")?;
    Ok(t_operator(f, z, v)? * e)
}

fn check_horizontal_pair(f: &Fibration, z: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> Result<()> {
    check_unit(y, "Y")?;
    check_tangent(z, y, "Y")?;
    if x.dot(y).abs() > ARG_TOL {
        return Err(invalid("X and Y must be orthonormal"));
    }
    let (pv, _) = projectors(f, z)?;
    if (&pv * y).norm() > ARG_TOL {
        return Err(invalid("Y must be horizontal"));
    }
    Ok(())
}

/// Base sectional curvature of `dπX ∧ dπY` from the horizontal curvature equation:
/// `1 + 3‖A_X Y‖²`.
pub fn oneill_base_curvature(f: &Fibration, z: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    let a = a_operator(f, z, x)?;
    check_horizontal_pair(f, z, x, y)?;
    Ok(1.0 + 3.0 * (a * y).norm_squared())
}

/// `|1 − ‖A_X V‖²|`: the vertizontal curvature equation with `T ≡ 0` at sectional
/// curvature 1.
pub fn vertizontal_check(f: &Fibration, z: &DVector<f64>, x: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    let a = a_operator(f, z, x)?;
    check_unit(v, "V")?;
    check_tangent(z, v, "V")?;
    let (_, ph) = projectors(f, z)?;
    if (&ph * v).norm() > ARG_TOL {
        return Err(invalid("V must be vertical"));
    }
    Ok((1.0 - (a * v).norm_squared()).abs())
}

/// Smallest and largest singular value of `v ↦ A_X v` on the vertical space.
pub fn bijectivity_check(f: &Fibration, z: &DVector<f64>, x: &DVector<f64>) -> Result<(f64, f64)> {
    let a = a_operator(f, z, x)?;
    let s = split(f, z)?;
    let m = a * &s.vertical;
    let sv = m.singular_values();
    Ok((sv.min(), sv.max()))
}

/// Results of the adapted-basis construction for `A_X` at a point.
#[derive(Clone, Debug, Serialize)]
pub struct AppendixReport {
    /// Singular values `λ_i` of `A_X*` on the vertical space, descending.
    pub lambdas: Vec<f64>,
    /// The same values from the greedy maximization.
    pub greedy_lambdas: Vec<f64>,
    /// `max |⟨A_X e, w⟩ + ⟨e, A_X w⟩|` over tangent basis pairs.
    pub skew_residual: f64,
    /// `max_i ‖A_X y_i + λ_i u_i‖`.
    pub pairing_residual: f64,
    /// `max_{i≠j} |⟨A_X u_i, A_X u_j⟩|`.
    pub orthogonality_residual: f64,
    /// Spread of `Σ_j ‖A_X V_j‖²` over random orthonormal vertical bases.
    pub basis_spread: f64,
    /// `Σ_i ‖A_X u_i‖²`.
    pub vertical_sum: f64,
    /// `|Σ_i ‖A_X Ẽ_i‖² − Σ_i ‖A_X y_i‖²|` for a horizontal basis `Ẽ_i` of `X^⊥`.
    pub horizontal_identity_residual: f64,
}

/// Builds the adapted vertical basis `u_i` with partners `y_i` and checks the pairing
/// identities and the basis independence of `Σ‖A_X ·‖²`.
pub fn appendix_structure_check<R: Rng + ?Sized>(
    f: &Fibration,
    z: &DVector<f64>,
    x: &DVector<f64>,
    bases: usize,
    rng: &mut R,
) -> Result<AppendixReport> {
    let a = a_operator(f, z, x)?;
    let s = split(f, z)?;
    let vert = &s.vertical;
    let k = vert.ncols();
    let astar = &a * vert;

    let svd = astar.clone().svd(true, true);
    let (u_h, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let lambdas: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();

    let greedy_lambdas = greedy_singular_values(&astar, rng);

    let mut tangent: Vec<DVector<f64>> = (0..k).map(|i| vert.column(i).into_owned()).collect();
    tangent.extend((0..s.horizontal.ncols()).map(|i| s.horizontal.column(i).into_owned()));
    let mut skew_residual: f64 = 0.0;
    for e in &tangent {
        let ae = &a * e;
        for w in &tangent {
            skew_residual = skew_residual.max((ae.dot(w) + e.dot(&(&a * w))).abs());
        }
    }

    let mut pairing_residual: f64 = 0.0;
    let mut us = Vec::new();
    for &i in &order {
        let lambda = svd.singular_values[i];
        let u = vert * vt.row(i).transpose();
        if lambda > 1e-6 {
            let y = u_h.column(i).into_owned();
            pairing_residual = pairing_residual.max((&a * &y + &u * lambda).norm());
        }
        us.push(u);
    }
    let mut orthogonality_residual: f64 = 0.0;
    for i in 0..us.len() {
        for j in 0..i {
            orthogonality_residual = orthogonality_residual.max((&a * &us[i]).dot(&(&a * &us[j])).abs());
        }
    }
    let vertical_sum: f64 = us.iter().map(|u| (&a * u).norm_squared()).sum();

    let mut sums = Vec::with_capacity(bases);
    for _ in 0..bases.max(1) {
        let q = crate::numerics::random_orthogonal(k, rng);
        let basis = vert * q;
        sums.push((0..k).map(|j| (&a * basis.column(j)).norm_squared()).sum::<f64>());
    }
    let basis_spread =
        sums.iter().copied().fold(f64::NEG_INFINITY, f64::max) - sums.iter().copied().fold(f64::INFINITY, f64::min);

    let hcols = columns(&s.horizontal);
    let e_sum: f64 = complete_orthonormal(&hcols, std::slice::from_ref(x), &[])
        .iter()
        .map(|e| (&a * e).norm_squared())
        .sum();
    let ys: Vec<DVector<f64>> = order
        .iter()
        .filter(|&&i| svd.singular_values[i] > 1e-6)
        .map(|&i| u_h.column(i).into_owned())
        .collect();
    let ys = complete_orthonormal(&hcols, std::slice::from_ref(x), &ys);
    let y_sum: f64 = ys.iter().map(|y| (&a * y).norm_squared()).sum();

    Ok(AppendixReport {
        lambdas,
        greedy_lambdas,
        skew_residual,
        pairing_residual,
        orthogonality_residual,
        basis_spread,
        vertical_sum,
        horizontal_identity_residual: (e_sum - y_sum).abs(),
    })
}

fn columns(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    (0..m.ncols()).map(|i| m.column(i).into_owned()).collect()
}

// extends the orthonormal `start` by candidates orthogonal to `against`, skipping
// candidates that are (nearly) dependent
fn complete_orthonormal(
    candidates: &[DVector<f64>],
    against: &[DVector<f64>],
    start: &[DVector<f64>],
) -> Vec<DVector<f64>> {
    let mut out = start.to_vec();
    for v in candidates {
        let mut all = against.to_vec();
        all.extend(out.iter().cloned());
        if let Some(w) = crate::numerics::gram_schmidt(std::slice::from_ref(v), &all, 0.1) {
            out.extend(w);
        }
    }
    out
}

/// Successively maximizes `‖M w‖` over unit `w` orthogonal to the earlier maximizers,
/// by power iteration on `MᵀM`.
fn greedy_singular_values<R: Rng + ?Sized>(m: &DMatrix<f64>, rng: &mut R) -> Vec<f64> {
    let k = m.ncols();
    let gram = m.transpose() * m;
    let mut found: Vec<DVector<f64>> = Vec::new();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut w = random_unit_vector(k, rng);
        for _ in 0..2000 {
            for b in &found {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
            let next = &gram * &w;
            let mut next = next;
            for b in &found {
                let c = b.dot(&next);
                next.axpy(-c, b, 1.0);
            }
            let norm = next.norm();
            if norm < 1e-300 {
                break;
            }
            let next = next / norm;
            let done = (&next - &w).norm() < 1e-14;
            w = next;
            if done {
                break;
            }
        }
        for b in &found {
            let c = b.dot(&w);
            w.axpy(-c, b, 1.0);
        }
        w.normalize_mut();
        out.push((m * &w).norm());
        found.push(w);
    }
    out
}

/// A base geodesic, described by one horizontal great circle `t ↦ cos t·z + sin t·u`.
#[derive(Clone, Debug)]
pub struct BaseGeodesic {
    pub fibration: Fibration,
    pub z: DVector<f64>,
    pub u: DVector<f64>,
}

impl BaseGeodesic {
    pub fn new(f: Fibration, z: DVector<f64>, u: DVector<f64>) -> Result<Self> {
        f.check_point(&z)?;
        check_unit(&u, "initial velocity")?;
        check_tangent(&z, &u, "initial velocity")?;
        let (pv, _) = projectors(&f, &z)?;
        if (&pv * &u).norm() > ARG_TOL {
            return Err(invalid("initial velocity must be horizontal"));
        }
        Ok(Self { fibration: f, z, u })
    }

    /// Random base geodesic through a random point.
    pub fn random<R: Rng + ?Sized>(f: Fibration, rng: &mut R) -> Result<Self> {
        let z = f.random_point(rng);
        let u = split(&f, &z)?.random_horizontal(rng);
        Self::new(f, z, u)
    }

    fn reference(&self, t: f64) -> (DVector<f64>, DVector<f64>) {
        let (s, c) = t.sin_cos();
        (&self.z * c + &self.u * s, &self.u * c - &self.z * s)
    }

    pub fn point(&self, t: f64) -> BasePoint {
        BasePoint {
            coords: project_raw(&self.fibration, &self.reference(t).0),
        }
    }

    /// Velocity in the base embedding.
    pub fn velocity(&self, t: f64) -> DVector<f64> {
        let (q, dq) = self.reference(t);
        jacobian(&self.fibration, &q) * dq
    }
}

/// The horizontal lift of a base geodesic through a given fiber point at time `s`.
#[derive(Clone, Debug)]
pub struct HorizontalLift {
    pub s: f64,
    pub z: DVector<f64>,
    pub u: DVector<f64>,
}

impl HorizontalLift {
    pub fn at(&self, t: f64) -> DVector<f64> {
        let (sn, c) = (t - self.s).sin_cos();
        &self.z * c + &self.u * sn
    }

    pub fn velocity(&self, t: f64) -> DVector<f64> {
        let (sn, c) = (t - self.s).sin_cos();
        &self.u * c - &self.z * sn
    }
}

// least-squares horizontal preimage; `strict` requires `w` to lie in the image
fn horizontal_solve(f: &Fibration, z: &DVector<f64>, w: &DVector<f64>, strict: bool) -> Result<DVector<f64>> {
    let j = jacobian(f, z);
    let pinv = j
        .clone()
        .pseudo_inverse(KERNEL_TOL)
        .map_err(|e| Error::GeometryError(e.to_string()))?;
    let u = pinv * w;
    if strict && (&j * &u - w).norm() > 1e-8 * w.norm().max(1.0) {
        return Err(Error::GeometryError(
            "velocity is not in the image of the differential".into(),
        ));
    }
    Ok(u)
}

/// Lift of `γ` starting at `z` over `γ(s)`: the great circle with horizontal initial
/// velocity `u`, `dπ(u) = γ̇(s)`.
pub fn horizontal_lift(f: &Fibration, gamma: &BaseGeodesic, s: f64, z: &DVector<f64>) -> Result<HorizontalLift> {
    if gamma.fibration != *f {
        return Err(invalid("geodesic belongs to another fibration"));
    }
    let here = project(f, z)?;
    if base_distance(f, &here, &gamma.point(s)) > 1e-8 {
        return Err(invalid("start point does not lie over γ(s)"));
    }
    let u = horizontal_solve(f, z, &gamma.velocity(s), true)?;
    if (u.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::GeometryError("lifted velocity is not unit length".into()));
    }
    Ok(HorizontalLift { s, z: z.clone(), u })
}

/// Lift by RK4 integration of `ż = dπ_z⁺ γ̇(t)` from `s` to `t`, renormalizing each step.
pub fn ode_lift(
    f: &Fibration,
    gamma: &BaseGeodesic,
    s: f64,
    z: &DVector<f64>,
    t: f64,
    steps: usize,
) -> Result<DVector<f64>> {
    if steps == 0 {
        return Err(invalid("at least one step is required"));
    }
    let h = (t - s) / steps as f64;
    let rhs = |time: f64, q: &DVector<f64>| horizontal_solve(f, q, &gamma.velocity(time), false);
    let mut q = z.clone();
    for i in 0..steps {
        let t0 = s + h * i as f64;
        let k1 = rhs(t0, &q)?;
        let k2 = rhs(t0 + 0.5 * h, &(&q + &k1 * (0.5 * h)).normalize())?;
        let k3 = rhs(t0 + 0.5 * h, &(&q + &k2 * (0.5 * h)).normalize())?;
        let k4 = rhs(t0 + h, &(&q + &k3 * h).normalize())?;
        q += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        q.normalize_mut();
    }
    Ok(q)
}

/// Holonomy displacement `ψ_{s,t}(z)`.
pub fn holonomy(f: &Fibration, gamma: &BaseGeodesic, s: f64, t: f64, z: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(horizontal_lift(f, gamma, s, z)?.at(t))
}

/// The point `a(x)` at distance `π/2` from `x` on a round base sphere: the common endpoint
/// of all horizontal geodesics of length `π/2` leaving the fiber over `x`.
pub fn dual_point(f: &Fibration, x: &BasePoint) -> Result<BasePoint> {
    if !f.base_is_sphere() {
        return Err(Error::NotApplicable(format!("{f} has no unique dual point")));
    }
    let z = fiber_point(f, x)?;
    let s = split(f, &z)?;
    let u = s.horizontal.column(0).into_owned();
    let a = project(f, &u)?;
    let d = base_distance(f, x, &a);
    if (d - FRAC_PI_2).abs() > 1e-6 {
        return Err(Error::GeometryError(format!("dual point at distance {d}")));
    }
    Ok(a)
}

/// Random point of the fiber over `x`.
pub fn random_fiber_point<R: Rng + ?Sized>(f: &Fibration, x: &BasePoint, rng: &mut R) -> Result<DVector<f64>> {
    let z = fiber_point(f, x)?;
    let s = split(f, &z)?;
    let c = random_unit_vector(f.fiber_dim() + 1, rng);
    let mut p = &z * c[0];
    for i in 0..f.fiber_dim() {
        p += s.vertical.column(i) * c[i + 1];
    }
    Ok(p.normalize())
}

/// Largest `‖T_V W‖` over `samples` random fiber points and unit vertical pairs over `x`.
pub fn max_fiber_t_norm<R: Rng + ?Sized>(f: &Fibration, x: &BasePoint, samples: usize, rng: &mut R) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let z = random_fiber_point(f, x, rng)?;
        let s = split(f, &z)?;
        let v = s.random_vertical(rng);
        let w = s.random_vertical(rng);
        worst = worst.max((t_operator(f, &z, &v)? * w).norm());
    }
    Ok(worst)
}

/// A base point is good when its fiber is totally geodesic, i.e. `T` vanishes on it.
pub fn is_good_point<R: Rng + ?Sized>(f: &Fibration, x: &BasePoint, rng: &mut R) -> Result<bool> {
    Ok(max_fiber_t_norm(f, x, 64, rng)? <= 1e-5)
}

/// Frames transported along a horizontal lift on a uniform grid.
#[derive(Clone, Debug)]
pub struct LiftFrames {
    pub t0: f64,
    pub dt: f64,
    pub points: Vec<DVector<f64>>,
    pub velocities: Vec<DVector<f64>>,
    /// Horizontal lifts of a parallel orthonormal normal frame of `γ`.
    pub horizontal: Vec<DMatrix<f64>>,
    /// Vertical frames with `(∇_{γ̇} V)^v = 0`.
    pub vertical: Vec<DMatrix<f64>>,
}

fn projector_derivative_along(f: &Fibration, lift: &HorizontalLift, t: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eps = 1e-5;
    let (pv_p, ph_p) = projectors(f, &lift.at(t + eps))?;
    let (pv_m, ph_m) = projectors(f, &lift.at(t - eps))?;
    Ok(((pv_p - pv_m) / (2.0 * eps), (ph_p - ph_m) / (2.0 * eps)))
}

fn orthonormalize_in(proj: &DMatrix<f64>, frame: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = proj * frame;
    let gram = m.transpose() * &m;
    if gram.determinant() < 1e-6 {
        return Err(Error::FrameError("frame degenerated".into()));
    }
    let cols: Vec<DVector<f64>> = (0..m.ncols()).map(|i| m.column(i).into_owned()).collect();
    let q =
        crate::numerics::gram_schmidt(&cols, &[], 1e-3).ok_or_else(|| Error::FrameError("frame degenerated".into()))?;
    Ok(DMatrix::from_columns(&q))
}

/// Transports frames along the lift over `[t0, t0 + steps·dt]` by RK4 on
/// `E′ = P_h′ E` and `V′ = P_v′ V`, re-orthonormalizing each step.
pub fn lift_frames(f: &Fibration, lift: &HorizontalLift, t0: f64, dt: f64, steps: usize) -> Result<LiftFrames> {
    let z0 = lift.at(t0);
    let x0 = lift.velocity(t0);
    let s0 = split(f, &z0)?;
    let e_cols = complete_orthonormal(&columns(&s0.horizontal), std::slice::from_ref(&x0), &[]);
    if e_cols.len() != f.base_dim() - 1 {
        return Err(Error::FrameError("could not complete the normal frame".into()));
    }
    let mut e = DMatrix::from_columns(&e_cols);
    let mut v = s0.vertical.clone();

    let mut out = LiftFrames {
        t0,
        dt,
        points: Vec::with_capacity(steps + 1),
        velocities: Vec::with_capacity(steps + 1),
        horizontal: Vec::with_capacity(steps + 1),
        vertical: Vec::with_capacity(steps + 1),
    };
    let push = |out: &mut LiftFrames, t: f64, e: &DMatrix<f64>, v: &DMatrix<f64>| {
        out.points.push(lift.at(t));
        out.velocities.push(lift.velocity(t));
        out.horizontal.push(e.clone());
        out.vertical.push(v.clone());
    };
    push(&mut out, t0, &e, &v);
    for i in 0..steps {
        let t = t0 + dt * i as f64;
        let (dv0, dh0) = projector_derivative_along(f, lift, t)?;
        let (dv1, dh1) = projector_derivative_along(f, lift, t + 0.5 * dt)?;
        let (dv2, dh2) = projector_derivative_along(f, lift, t + dt)?;
        let rk4 = |m: &DMatrix<f64>, d0: &DMatrix<f64>, d1: &DMatrix<f64>, d2: &DMatrix<f64>| {
            let k1 = d0 * m;
            let k2 = d1 * (m + &k1 * (0.5 * dt));
            let k3 = d1 * (m + &k2 * (0.5 * dt));
            let k4 = d2 * (m + &k3 * dt);
            m + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
        };
        let e_next = rk4(&e, &dh0, &dh1, &dh2);
        let v_next = rk4(&v, &dv0, &dv1, &dv2);
        let (pv, ph) = projectors(f, &lift.at(t + dt))?;
        e = orthonormalize_in(&ph, &e_next)?;
        v = orthonormalize_in(&pv, &v_next)?;
        push(&mut out, t + dt, &e, &v);
    }
    Ok(out)
}

/// Max of `‖(∇_{γ̇} V_i)^v‖` along the frames, by a four-point stencil on the grid.
pub fn vertical_transport_residual(f: &Fibration, frames: &LiftFrames) -> Result<f64> {
    let n = frames.points.len();
    let h = frames.dt;
    let mut worst: f64 = 0.0;
    for i in 2..n.saturating_sub(2) {
        let d = (&frames.vertical[i - 2] - &frames.vertical[i - 1] * 8.0 + &frames.vertical[i + 1] * 8.0
            - &frames.vertical[i + 2])
            / (12.0 * h);
        let (pv, _) = projectors(f, &frames.points[i])?;
        worst = worst.max((pv * d).amax());
    }
    Ok(worst)
}

/// Period of base geodesics on the model fibrations.
pub const BASE_GEODESIC_PERIOD: f64 = PI;
