//! Shared numerical kernels: sphere points, geodesics, nets, tolerant rank and quadrature.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default relative threshold for [`rank_tol`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Deterministic generator used everywhere a seed is accepted.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point of the unit sphere `S^n ⊂ R^{n+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint(DVector<f64>);

impl SpherePoint {
    /// Normalizes `coords` onto the sphere.
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite sphere coordinates"));
        }
        let norm = coords.norm();
        if norm < 1e-300 {
            return Err(invalid("zero vector cannot be normalized"));
        }
        Ok(Self(coords / norm))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    /// Unit basis vector `e_i` in `R^len`.
    pub fn basis(len: usize, i: usize) -> Self {
        let mut v = DVector::zeros(len);
        v[i] = 1.0;
        Self(v)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self(random_unit_vector(len, rng))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    /// Length of the coordinate vector (`n + 1` for `S^n`).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn antipode(&self) -> Self {
        Self(-&self.0)
    }

    pub fn angle_to(&self, other: &SpherePoint) -> f64 {
        unit_angle(&self.0, &other.0)
    }
}

/// A tangent vector of the sphere, `⟨base, dir⟩ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: SpherePoint,
    dir: DVector<f64>,
}

impl TangentVector {
    pub fn new(base: SpherePoint, dir: DVector<f64>) -> Result<Self> {
        if dir.len() != base.len() {
            return Err(invalid("tangent vector length differs from base point"));
        }
        if dir.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite tangent vector"));
        }
        if base.coords().dot(&dir).abs() > 1e-10 * dir.norm().max(1.0) {
            return Err(invalid("vector is not tangent at its base point"));
        }
        Ok(Self { base, dir })
    }

    /// Orthogonal projection of an arbitrary ambient vector onto `T_base S^n`.
    pub fn project(base: SpherePoint, v: &DVector<f64>) -> Self {
        let dir = v - base.coords() * base.coords().dot(v);
        Self { base, dir }
    }

    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn dir(&self) -> &DVector<f64> {
        &self.dir
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.dir.norm();
        if n < 1e-300 {
            return Err(invalid("zero tangent vector"));
        }
        Ok(Self {
            base: self.base.clone(),
            dir: &self.dir / n,
        })
    }
}

/// Angle between two unit vectors, accurate near `0` and `π`.
pub fn unit_angle(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    2.0 * (a - b).norm().atan2((a + b).norm())
}

/// `arccos` with its argument clamped into `[-1, 1]`.
pub fn clamped_acos(c: f64) -> f64 {
    c.clamp(-1.0, 1.0).acos()
}

pub fn random_unit_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(len, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Haar-random orthogonal matrix (QR of a Gaussian matrix with sign correction).
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col *= -1.0;
        }
    }
    q
}

/// Orthonormalizes `vectors` against `against` (assumed orthonormal) and each other.
///
/// Returns `None` when a vector loses more than `1 - min_ratio` of its norm.
pub fn gram_schmidt(vectors: &[DVector<f64>], against: &[DVector<f64>], min_ratio: f64) -> Option<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let n0 = v.norm();
        let mut w = v.clone();
        // two passes for stability
        for _ in 0..2 {
            for b in against.iter().chain(out.iter()) {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        let n = w.norm();
        if n0 == 0.0 || n < min_ratio * n0 {
            return None;
        }
        out.push(w / n);
    }
    Some(out)
}

/// Number of singular values above `tol × σ_max`.
pub fn rank_tol(matrix: &DMatrix<f64>, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(invalid("rank tolerance must be positive"));
    }
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(invalid("matrix has non-finite entries"));
    }
    if matrix.is_empty() {
        return Ok(0);
    }
    let sv = matrix.singular_values();
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * smax).count())
}

/// Unit-speed great circle `cos(t) p + sin(t) v`.
pub fn geodesic(p: &SpherePoint, v: &TangentVector, t: f64) -> Result<SpherePoint> {
    if v.base().len() != p.len() || (v.base().coords() - p.coords()).norm() > 1e-12 {
        return Err(invalid("tangent vector is not based at the start point"));
    }
    if (v.dir().norm() - 1.0).abs() > 1e-10 {
        return Err(invalid("geodesic direction must be a unit vector"));
    }
    SpherePoint::new(p.coords() * t.cos() + v.dir() * t.sin())
}

/// Composite Simpson rule on `n` subintervals.
pub fn quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Result<f64> {
    if n < 16 || !n.is_multiple_of(2) {
        return Err(invalid("Simpson rule needs an even n >= 16"));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(invalid("non-finite integration bounds"));
    }
    let h = (b - a) / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let t = a + h * i as f64;
        let y = f(t);
        if !y.is_finite() {
            return Err(invalid(format!("integrand is not finite at t = {t}")));
        }
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * y;
    }
    Ok(acc * h / 3.0)
}

/// Simpson rule over values already sampled on a uniform grid.
pub fn simpson_samples(values: &[f64], h: f64) -> Result<f64> {
    let n = values.len().saturating_sub(1);
    if n < 16 || !n.is_multiple_of(2) {
        return Err(invalid("Simpson rule needs an even number (>= 16) of intervals"));
    }
    let mut acc = values[0] + values[n];
    for (i, y) in values.iter().enumerate().take(n).skip(1) {
        acc += if i % 2 == 1 { 4.0 * y } else { 2.0 * y };
    }
    Ok(acc * h / 3.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalMethod {
    Net,
    Witness,
    Sample,
}

impl std::fmt::Display for IntervalMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Net => "net",
            Self::Witness => "witness",
            Self::Sample => "sample",
        };
        f.write_str(s)
    }
}

/// Two-sided bound on a min-max quantity together with how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedInterval {
    pub lower: f64,
    pub upper: f64,
    pub certified: bool,
    pub method: IntervalMethod,
}

impl CertifiedInterval {
    pub fn new(lower: f64, upper: f64, method: IntervalMethod) -> Result<Self> {
        Self::build(lower, upper, method != IntervalMethod::Sample, method)
    }

    pub fn sampled(lower: f64, upper: f64) -> Result<Self> {
        Self::build(lower, upper, false, IntervalMethod::Sample)
    }

    fn build(lower: f64, upper: f64, certified: bool, method: IntervalMethod) -> Result<Self> {
        if !(lower <= upper) {
            return Err(invalid(format!("interval bounds out of order: [{lower}, {upper}]")));
        }
        Ok(Self {
            lower,
            upper,
            certified,
            method,
        })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// A finite point set with a covering radius bound on `S^dim`.
#[derive(Clone, Debug)]
pub struct SphericalNet {
    pub dim: usize,
    pub points: Vec<SpherePoint>,
    pub covering_radius: f64,
    pub certified: bool,
}

impl SphericalNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Largest supported sphere dimension for certified nets.
pub const MAX_CERTIFIED_DIM: usize = 4;

fn hav(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    s * s
}

fn inv_hav(h: f64) -> f64 {
    2.0 * h.clamp(0.0, 1.0).sqrt().asin()
}

// Returns raw coordinates and the proven covering radius.
fn band_net(dim: usize, delta: f64) -> (Vec<Vec<f64>>, f64) {
    if dim == 1 {
        let m = ((2.0 * PI / delta).ceil() as usize).max(1);
        let pts = (0..m)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / m as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        return (pts, PI / m as f64);
    }
    if delta >= PI {
        let mut p = vec![0.0; dim + 1];
        p[dim] = 1.0;
        return (vec![p], PI);
    }
    let m = ((PI / (1.2 * delta)).ceil() as usize).max(1);
    let half = PI / (2.0 * m as f64);
    let mut points = Vec::new();
    let mut covering: f64 = 0.0;
    for j in 0..m {
        let phi = -PI / 2.0 + (2 * j + 1) as f64 * half;
        let cos_max = (phi.abs() - half).max(0.0).cos();
        let c = phi.cos() * cos_max;
        let budget = hav(delta) - hav(half);
        let target = if c <= 1e-300 {
            PI
        } else {
            inv_hav((budget / c).min(1.0)).max(1e-3)
        };
        let (sub, sub_cov) = band_net(dim - 1, target);
        covering = covering.max(inv_hav(hav(half) + c * hav(sub_cov)));
        for w in sub {
            let mut p: Vec<f64> = w.iter().map(|x| x * phi.cos()).collect();
            p.push(phi.sin());
            points.push(p);
        }
    }
    (points, covering)
}

/// Certified net on `S^dim` by recursive latitude bands.
pub fn build_net(dim: usize, delta: f64) -> Result<SphericalNet> {
    if dim == 0 {
        return Err(invalid("nets are built for dim >= 1"));
    }
    if dim > MAX_CERTIFIED_DIM {
        return Err(Error::Unsupported(format!(
            "certified nets are limited to dim <= {MAX_CERTIFIED_DIM}; use sample_net"
        )));
    }
    if !(delta >= 0.01) || !delta.is_finite() {
        return Err(invalid("net resolution must be at least 0.01"));
    }
    let (raw, covering) = band_net(dim, delta);
    let points = raw
        .into_iter()
        .map(|p| SpherePoint::from_slice(&p))
        .collect::<Result<Vec<_>>>()?;
    Ok(SphericalNet {
        dim,
        points,
        covering_radius: covering,
        certified: true,
    })
}

/// Uncertified net of `count` uniform random points.
pub fn sample_net<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> SphericalNet {
    let points = (0..count).map(|_| SpherePoint::random(dim + 1, rng)).collect();
    SphericalNet {
        dim,
        points,
        covering_radius: f64::NAN,
        certified: false,
    }
}

/// Largest observed gap from random probes to the nearest net point.
pub fn audit_net<R: Rng + ?Sized>(net: &SphericalNet, probes: usize, rng: &mut R) -> f64 {
    let pts = DMatrix::from_fn(net.len(), net.dim + 1, |i, j| net.points[i].coords()[j]);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let y = random_unit_vector(net.dim + 1, rng);
        let best = (&pts * &y).max();
        worst = worst.max(clamped_acos(best));
    }
    worst
}

/// A cell of the cube-sphere subdivision of `S^n` (`n <= 4`): a dyadic box on one face of
/// `[-1, 1]^{n+1}`, radially projected onto the sphere.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SphereCell {
    dim: u8,
    axis: u8,
    negative: bool,
    level: u8,
    idx: [u32; MAX_CERTIFIED_DIM],
}

impl SphereCell {
    /// The `2(n+1)` faces.
    pub(crate) fn roots(dim: usize) -> Vec<SphereCell> {
        let mut out = Self::half_roots(dim);
        let neg: Vec<SphereCell> = out.iter().map(|c| SphereCell { negative: true, ..*c }).collect();
        out.extend(neg);
        out
    }

    /// The `n+1` positive faces; together with their antipodes they cover the sphere.
    pub(crate) fn half_roots(dim: usize) -> Vec<SphereCell> {
        assert!((1..=MAX_CERTIFIED_DIM).contains(&dim));
        (0..=dim)
            .map(|axis| SphereCell {
                dim: dim as u8,
                axis: axis as u8,
                negative: false,
                level: 0,
                idx: [0; MAX_CERTIFIED_DIM],
            })
            .collect()
    }

    pub(crate) fn level(&self) -> u8 {
        self.level
    }

    fn lift(&self, u: &[f64]) -> [f64; MAX_CERTIFIED_DIM + 1] {
        let n = self.dim as usize + 1;
        let mut v = [0.0; MAX_CERTIFIED_DIM + 1];
        let mut k = 0;
        for (i, vi) in v.iter_mut().enumerate().take(n) {
            if i == self.axis as usize {
                *vi = if self.negative { -1.0 } else { 1.0 };
            } else {
                *vi = u[k];
                k += 1;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        v
    }

    fn bounds(&self, k: usize) -> (f64, f64) {
        let w = 2.0 / f64::from(1u32 << self.level);
        let lo = -1.0 + w * f64::from(self.idx[k]);
        (lo, lo + w)
    }

    pub(crate) fn center(&self) -> DVector<f64> {
        let n = self.dim as usize;
        let mut mid = [0.0; MAX_CERTIFIED_DIM];
        for (k, m) in mid.iter_mut().enumerate().take(n) {
            let (lo, hi) = self.bounds(k);
            *m = 0.5 * (lo + hi);
        }
        let v = self.lift(&mid[..n]);
        DVector::from_column_slice(&v[..n + 1])
    }

    /// Exact angular radius about the center: the angle to a fixed point is quasi-convex
    /// on the face plane, so the maximum over the box sits at a corner.
    pub(crate) fn radius(&self, center: &DVector<f64>) -> f64 {
        let n = self.dim as usize;
        let mut worst: f64 = 0.0;
        let mut u = [0.0; MAX_CERTIFIED_DIM];
        for mask in 0..(1usize << n) {
            for (k, uk) in u.iter_mut().enumerate().take(n) {
                let (lo, hi) = self.bounds(k);
                *uk = if mask & (1 << k) == 0 { lo } else { hi };
            }
            let v = self.lift(&u[..n]);
            let (mut d2, mut s2) = (0.0, 0.0);
            for i in 0..=n {
                d2 += (v[i] - center[i]).powi(2);
                s2 += (v[i] + center[i]).powi(2);
            }
            worst = worst.max(2.0 * d2.sqrt().atan2(s2.sqrt()));
        }
        worst
    }

    pub(crate) fn split(&self) -> Vec<SphereCell> {
        let n = self.dim as usize;
        (0..(1usize << n))
            .map(|mask| {
                let mut c = *self;
                c.level += 1;
                for k in 0..n {
                    c.idx[k] = 2 * self.idx[k] + u32::from(mask & (1 << k) != 0);
                }
                c
            })
            .collect()
    }
}
