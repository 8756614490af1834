//! Metric geometry of sphere quotients `S^n/Γ` and of the `CP^{2d-1}` involution quotient.
//!
//! The eccentricity of `x` in `S^n/Γ` is the covering radius of the orbit `Γx` on `S^n`.
//! It is computed exactly from the convex hull of the orbit when the facet enumeration
//! is small enough, and otherwise by Lipschitz branch and bound over the sphere.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::groups::Complex64;
use crate::numerics::{
    build_net, clamped_acos, random_unit_vector, rank_tol, seeded_rng, unit_angle, CertifiedInterval, IntervalMethod,
    SphereCell, SpherePoint, DEFAULT_RANK_TOL, MAX_CERTIFIED_DIM,
};
use crate::reps::Representation;

/// Largest number of candidate facets the exact hull kernel will enumerate.
pub const MAX_FACET_CANDIDATES: u64 = 1_000_000;
/// Deepest subdivision level in branch and bound.
pub const MAX_CELL_LEVEL: u8 = 20;
/// Random restarts used by the max-margin search.
pub const WITNESS_RESTARTS: usize = 50;
/// Iterations per restart of the max-margin search.
pub const WITNESS_ITERATIONS: usize = 500;
/// A witness `y` must satisfy `⟨p, y⟩ <= WITNESS_TOL` for every point.
pub const WITNESS_TOL: f64 = 1e-9;

const SAMPLED_POINTS: usize = 4096;
const SAMPLED_SEED: u64 = 0x5f0c_2a11;

/// `S^n/ρ(Γ)` for a fixed point free orthogonal representation `ρ`.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    rep: Representation,
    // rows are the representation matrices stacked, for batched orbit evaluation
    stacked: DMatrix<f64>,
}

impl QuotientSpace {
    pub fn new(rep: Representation) -> Result<Self> {
        if rep.degree() < 2 {
            return Err(invalid("quotients need degree >= 2"));
        }
        if !rep.is_fixed_point_free() {
            return Err(invalid("representation is not fixed point free"));
        }
        let n = rep.degree();
        let mut stacked = DMatrix::zeros(n * rep.matrices().len(), n);
        for (i, m) in rep.matrices().iter().enumerate() {
            stacked.view_mut((i * n, 0), (n, n)).copy_from(m);
        }
        Ok(Self { rep, stacked })
    }

    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    /// Sphere dimension `n` of `S^n`.
    pub fn dim(&self) -> usize {
        self.rep.degree() - 1
    }

    pub fn order(&self) -> usize {
        self.rep.matrices().len()
    }

    /// Orbit points as the columns of a matrix.
    pub fn orbit_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.rep.degree();
        let flat = &self.stacked * x;
        DMatrix::from_column_slice(n, self.order(), flat.as_slice())
    }

    fn check_point(&self, x: &SpherePoint) -> Result<()> {
        if x.len() != self.rep.degree() {
            return Err(invalid("point has the wrong dimension"));
        }
        Ok(())
    }
}

/// `min_g angle(x, ρ(g) y)`.
pub fn quotient_distance(q: &QuotientSpace, x: &SpherePoint, y: &SpherePoint) -> f64 {
    let orbit = q.orbit_matrix(y.coords());
    let dots = orbit.tr_mul(x.coords());
    let best = dots.imax();
    unit_angle(x.coords(), &orbit.column(best).into_owned())
}

/// `min_p angle(p, y)` over the columns `p` of `points`.
pub fn distance_to_points(points: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    clamped_acos(points.tr_mul(y).max())
}

/// Exact covering radius of a finite point set that is invariant under a finite group
/// (so that its centroid is the point of its hull nearest the origin). `None` when the
/// facet enumeration would exceed [`MAX_FACET_CANDIDATES`].
pub fn orbit_covering_radius(points: &DMatrix<f64>) -> Option<f64> {
    let centroid = points.column_mean();
    let c = centroid.norm();
    if c > 1e-12 {
        // every orbit point makes the same angle with the centroid
        let p = points.column(0).into_owned();
        return Some(PI - unit_angle(&p, &(centroid / c)));
    }
    orbit_min_support(points).map(clamped_acos)
}

// min over unit y of max_p ⟨p, y⟩
fn orbit_min_support(points: &DMatrix<f64>) -> Option<f64> {
    let (n, k) = points.shape();
    let centroid = points.column_mean();
    let c = centroid.norm();
    if c > 1e-12 {
        return Some(-c);
    }
    if k < n || rank_tol(points, DEFAULT_RANK_TOL).ok()? < n {
        return Some(0.0);
    }
    if binomial(k as u64, n as u64) > MAX_FACET_CANDIDATES {
        return None;
    }
    let rows = points.transpose();
    let ones = DVector::from_element(n, 1.0);
    let mut best = f64::INFINITY;
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let a = DMatrix::from_fn(n, n, |i, j| rows[(subset[i], j)]);
        if let Some(nu) = a.lu().solve(&ones) {
            let norm = nu.norm();
            if norm.is_finite() && norm < 1e12 {
                let support = (&rows * &nu).max();
                if support <= 1.0 + 1e-9 {
                    best = best.min(1.0 / norm);
                }
            }
        }
        if !next_subset(&mut subset, k) {
            break;
        }
    }
    best.is_finite().then_some(best)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn next_subset(s: &mut [usize], k: usize) -> bool {
    let r = s.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if s[i] < k - r + i {
            s[i] += 1;
            for j in i + 1..r {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Projected subgradient descent of `max_p ⟨p, y⟩` on the unit sphere.
fn descend_support(points: &DMatrix<f64>, mut y: DVector<f64>, iterations: usize) -> (DVector<f64>, f64) {
    let mut value = points.tr_mul(&y).max();
    let mut step = 0.1;
    for _ in 0..iterations {
        let dots = points.tr_mul(&y);
        let p = points.column(dots.imax());
        let trial = (&y - p * step).normalize();
        let tv = points.tr_mul(&trial).max();
        if tv < value {
            y = trial;
            value = tv;
        } else {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    (y, value)
}

/// Lipschitz branch and bound for `max_y min_p angle(p, y)` on `S^n`, `n <= 4`.
fn covering_radius_bnb(points: &DMatrix<f64>, delta: f64) -> (f64, f64) {
    let dim = points.nrows() - 1;
    let mut cells = SphereCell::roots(dim);
    let mut best: f64 = 0.0;
    let mut upper: f64 = 0.0;
    while !cells.is_empty() {
        let evals: Vec<(f64, f64)> = cells
            .iter()
            .map(|c| {
                let ctr = c.center();
                (distance_to_points(points, &ctr), c.radius(&ctr))
            })
            .collect();
        best = evals.iter().map(|e| e.0).fold(best, f64::max);
        let mut next = Vec::new();
        for (cell, (f, r)) in cells.iter().zip(&evals) {
            let ub = (f + r).min(PI);
            if ub <= best + delta || cell.level() >= MAX_CELL_LEVEL {
                upper = upper.max(ub);
            } else {
                next.extend(cell.split());
            }
        }
        cells = next;
    }
    (best, upper.max(best))
}

/// Eccentricity of `x`: `max_y dist(x, y)`, the covering radius of the orbit of `x`.
///
/// Certified by branch and bound (width at most `delta`) for `n <= 4`; above that, an
/// uncertified estimate whose upper end is the exact hull value when that is available.
pub fn eccentricity(q: &QuotientSpace, x: &SpherePoint, delta: f64) -> Result<CertifiedInterval> {
    q.check_point(x)?;
    if !(delta >= 0.01) {
        return Err(invalid("delta must be at least 0.01"));
    }
    let points = q.orbit_matrix(x.coords());
    if q.dim() <= MAX_CERTIFIED_DIM {
        let (lo, hi) = covering_radius_bnb(&points, delta);
        return CertifiedInterval::new(lo, hi, IntervalMethod::Net);
    }
    let lo = sampled_covering_radius(&points);
    let hi = orbit_covering_radius(&points).map_or(lo, |v| v.max(lo));
    CertifiedInterval::sampled(lo, hi)
}

fn sampled_covering_radius(points: &DMatrix<f64>) -> f64 {
    let n = points.nrows();
    let mut rng = seeded_rng(SAMPLED_SEED);
    let mut starts: Vec<(f64, DVector<f64>)> = (0..SAMPLED_POINTS)
        .map(|_| {
            let y = random_unit_vector(n, &mut rng);
            (points.tr_mul(&y).max(), y)
        })
        .collect();
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let best = starts
        .into_iter()
        .take(16)
        .map(|(_, y)| descend_support(points, y, 500).1)
        .fold(f64::INFINITY, f64::min);
    clamped_acos(best)
}

// Bounds (lo, hi) on the eccentricity at x.
fn eccentricity_bounds(q: &QuotientSpace, x: &DVector<f64>, delta: f64) -> (f64, f64) {
    let points = q.orbit_matrix(x);
    match orbit_covering_radius(&points) {
        Some(v) => (v, v),
        None => covering_radius_bnb(&points, delta),
    }
}

/// `rad = min_x max_y dist(x, y)`.
pub fn radius(q: &QuotientSpace, delta: f64) -> Result<CertifiedInterval> {
    extremal_eccentricity(q, delta, true)
}

/// `diam = max_x max_y dist(x, y)`.
pub fn diameter(q: &QuotientSpace, delta: f64) -> Result<CertifiedInterval> {
    extremal_eccentricity(q, delta, false)
}

fn extremal_eccentricity(q: &QuotientSpace, delta: f64, minimize: bool) -> Result<CertifiedInterval> {
    if !(delta >= 0.01) {
        return Err(invalid("delta must be at least 0.01"));
    }
    if q.dim() > MAX_CERTIFIED_DIM {
        return sampled_extremal(q, minimize);
    }
    let inner = 0.25 * delta;
    // eccentricity is even and Γ-invariant, so the positive faces suffice
    let mut cells = SphereCell::half_roots(q.dim());
    let mut incumbent = if minimize { PI } else { 0.0 };
    let mut bound = if minimize { PI } else { 0.0 };
    while !cells.is_empty() {
        let evals: Vec<(f64, f64, f64)> = cells
            .par_iter()
            .map(|c| {
                let ctr = c.center();
                let (lo, hi) = eccentricity_bounds(q, &ctr, inner);
                (lo, hi, c.radius(&ctr))
            })
            .collect();
        for e in &evals {
            incumbent = if minimize {
                incumbent.min(e.1)
            } else {
                incumbent.max(e.0)
            };
        }
        let mut next = Vec::new();
        for (cell, &(lo, hi, r)) in cells.iter().zip(&evals) {
            let done = cell.level() >= MAX_CELL_LEVEL;
            if minimize {
                let lb = (lo - r).max(0.0);
                if lb >= incumbent - delta || done {
                    bound = bound.min(lb);
                } else {
                    next.extend(cell.split());
                }
            } else {
                let ub = (hi + r).min(PI);
                if ub <= incumbent + delta || done {
                    bound = bound.max(ub);
                } else {
                    next.extend(cell.split());
                }
            }
        }
        cells = next;
    }
    if minimize {
        CertifiedInterval::new(bound.min(incumbent), incumbent, IntervalMethod::Net)
    } else {
        CertifiedInterval::new(incumbent, bound.max(incumbent), IntervalMethod::Net)
    }
}

fn sampled_extremal(q: &QuotientSpace, minimize: bool) -> Result<CertifiedInterval> {
    let mut rng = seeded_rng(SAMPLED_SEED);
    let xs: Vec<DVector<f64>> = (0..256).map(|_| random_unit_vector(q.rep.degree(), &mut rng)).collect();
    let values: Vec<f64> = xs
        .par_iter()
        .map(|x| {
            let points = q.orbit_matrix(x);
            orbit_covering_radius(&points).unwrap_or_else(|| sampled_covering_radius(&points))
        })
        .collect();
    let v = if minimize {
        values.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        values.iter().copied().fold(0.0, f64::max)
    };
    CertifiedInterval::sampled(v, v)
}

/// A unit `y` with `⟨p, y⟩ <= 1e-9` for every point, if the search finds one.
///
/// Rank-deficient sets get an exact orthogonal-complement witness; otherwise the margin
/// `min_p −⟨p, y⟩` is maximized on the sphere by restarted subgradient ascent. Returned
/// witnesses are always verified.
pub fn halfspace_witness<R: Rng + ?Sized>(points: &[SpherePoint], rng: &mut R) -> Option<DVector<f64>> {
    let first = points.first()?;
    let n = first.len();
    let cols: Vec<DVector<f64>> = points.iter().map(|p| p.coords().clone()).collect();
    let p = DMatrix::from_columns(&cols);
    let verify = |y: &DVector<f64>| p.tr_mul(y).max() <= WITNESS_TOL;

    if rank_tol(&p, DEFAULT_RANK_TOL).ok()? < n {
        let mut padded = DMatrix::zeros(n, n.max(p.ncols()));
        padded.view_mut((0, 0), (n, p.ncols())).copy_from(&p);
        let svd = padded.svd(true, false);
        let u = svd.u?;
        let smallest = svd.singular_values.imin();
        let mut y = u.column(smallest).into_owned();
        y -= &p * (p.clone().pseudo_inverse(1e-12).ok()? * &y);
        if y.norm() > 1e-6 {
            let y = y.normalize();
            if verify(&y) {
                return Some(y);
            }
        }
    }
    for _ in 0..WITNESS_RESTARTS {
        let (y, value) = descend_support(&p, random_unit_vector(n, rng), WITNESS_ITERATIONS);
        if verify(&y) {
            return Some(y);
        }
        if value > 1e-3 {
            continue;
        }
        // polish: drop the component along the nearly active points
        let dots = p.tr_mul(&y);
        let active: Vec<DVector<f64>> = (0..p.ncols())
            .filter(|&i| dots[i] > value - 1e-3)
            .map(|i| p.column(i).into_owned())
            .collect();
        let a = DMatrix::from_columns(&active);
        let mut z = &y - &a * (a.clone().pseudo_inverse(1e-10).ok()? * &y);
        if z.norm() > 1e-6 {
            z.normalize_mut();
            if verify(&z) {
                return Some(z);
            }
        }
    }
    None
}

/// True iff some random unit vector has an orbit spanning the whole space.
pub fn has_cyclic_vector<R: Rng + ?Sized>(rep: &Representation, trials: usize, rng: &mut R) -> Result<bool> {
    if trials < 8 {
        return Err(invalid("at least 8 trials are required"));
    }
    let n = rep.degree();
    if rep.matrices().len() < n {
        return Ok(false);
    }
    for _ in 0..trials {
        let x = random_unit_vector(n, rng);
        if rank_tol(&rep.orbit_matrix(&x), DEFAULT_RANK_TOL)? == n {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether `rad S^n/Γ = π/2`, decided by the absence of a cyclic vector. Relies on
/// `rad <= π/2` for nontrivial `Γ`, which is cross-checked numerically rather than proven.
pub fn decide_radius_half_pi<R: Rng + ?Sized>(q: &QuotientSpace, rng: &mut R) -> Result<bool> {
    if q.order() == 1 {
        return Err(Error::NotApplicable("trivial group: the radius is π".into()));
    }
    Ok(!has_cyclic_vector(&q.rep, 16, rng)?)
}

/// Sample points of a dual set `B′ = {x : dist(x, B) = π/2}`, kept at band tolerance.
#[derive(Clone, Debug)]
pub struct DualSetEstimate {
    pub samples: Vec<SpherePoint>,
    pub tolerance: f64,
}

impl DualSetEstimate {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Net points whose distance to `B` is within `delta` of `π/2`, using a net of
/// resolution `delta`.
pub fn dual_set(q: &QuotientSpace, b: &[SpherePoint], delta: f64) -> Result<DualSetEstimate> {
    dual_set_with(q, b, delta, delta)
}

/// As [`dual_set`] with a separate band tolerance.
pub fn dual_set_with(q: &QuotientSpace, b: &[SpherePoint], net_delta: f64, tolerance: f64) -> Result<DualSetEstimate> {
    if b.is_empty() {
        return Err(invalid("dual sets need a nonempty B"));
    }
    for p in b {
        q.check_point(p)?;
    }
    let net = build_net(q.dim(), net_delta)?;
    let targets = orbit_rows(q, b);
    let keep = in_half_pi_band(&targets, &net.points, tolerance);
    let samples = net
        .points
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(p, _)| p)
        .collect();
    Ok(DualSetEstimate { samples, tolerance })
}

// |dist(x, rows) − π/2| <= tol, i.e. max_r ⟨r, x⟩ ∈ [−sin tol, sin tol]; scanning stops at
// the first row above the band
fn in_half_pi_band(rows: &DMatrix<f64>, points: &[SpherePoint], tol: f64) -> Vec<bool> {
    let n = rows.ncols();
    let flat: Vec<f64> = rows.transpose().as_slice().to_vec();
    let (lo, hi) = ((FRAC_PI_2 + tol).cos(), (FRAC_PI_2 - tol).cos());
    points
        .par_iter()
        .map(|p| {
            let x = p.coords().as_slice();
            let mut best = f64::NEG_INFINITY;
            for r in flat.chunks_exact(n) {
                let d: f64 = r.iter().zip(x).map(|(a, b)| a * b).sum();
                if d > hi {
                    return false;
                }
                best = best.max(d);
            }
            best >= lo
        })
        .collect()
}

// every orbit point of every element of `set`, as rows
fn orbit_rows(q: &QuotientSpace, set: &[SpherePoint]) -> DMatrix<f64> {
    let n = q.rep.degree();
    let k = q.order();
    let mut rows = DMatrix::zeros(set.len() * k, n);
    for (i, p) in set.iter().enumerate() {
        let orbit = q.orbit_matrix(p.coords());
        rows.view_mut((i * k, 0), (k, n)).copy_from(&orbit.transpose());
    }
    rows
}

fn distances_to_rows(rows: &DMatrix<f64>, points: &[SpherePoint]) -> Vec<f64> {
    const CHUNK: usize = 512;
    points
        .par_chunks(CHUNK)
        .flat_map_iter(|chunk| {
            let cols: Vec<DVector<f64>> = chunk.iter().map(|p| p.coords().clone()).collect();
            let m = DMatrix::from_columns(&cols);
            let dots = rows * m;
            (0..chunk.len())
                .map(|j| clamped_acos(dots.column(j).max()))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Audit of the dual-set properties `B ⊂ B″` and `B′ = B‴` on sampled dual sets.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DualSetReport {
    /// `max_b |dist(b, B′) − π/2|`; `B ⊂ B″` holds at tolerance when this is `<= 2·delta`.
    pub b_band_excess: f64,
    /// Hausdorff distance between the samples of `B′` and `B‴`.
    pub hausdorff: f64,
    pub sizes: [usize; 3],
}

/// Builds `B′` at band `delta` and the iterated duals `B″`, `B‴` at band `2·delta`.
pub fn dual_set_report(q: &QuotientSpace, b: &[SpherePoint], delta: f64) -> Result<DualSetReport> {
    let b1 = dual_set(q, b, delta)?;
    if b1.is_empty() {
        return Err(Error::GeometryError("B′ has no samples".into()));
    }
    let b2 = dual_set_with(q, &b1.samples, delta, 2.0 * delta)?;
    if b2.is_empty() {
        return Err(Error::GeometryError("B″ has no samples".into()));
    }
    let b3 = dual_set_with(q, &b2.samples, delta, 2.0 * delta)?;
    let rows = orbit_rows(q, &b1.samples);
    let b_band_excess = distances_to_rows(&rows, b)
        .into_iter()
        .map(|d| (d - FRAC_PI_2).abs())
        .fold(0.0, f64::max);
    Ok(DualSetReport {
        b_band_excess,
        hausdorff: hausdorff(q, &b1.samples, &b3.samples),
        sizes: [b1.len(), b2.len(), b3.len()],
    })
}

/// `size` random quotient points at pairwise distance at least `min_sep`, by rejection.
pub fn random_separated_set<R: Rng + ?Sized>(
    q: &QuotientSpace,
    size: usize,
    min_sep: f64,
    rng: &mut R,
) -> Result<Vec<SpherePoint>> {
    let mut out: Vec<SpherePoint> = Vec::with_capacity(size);
    for _ in 0..10_000 {
        if out.len() == size {
            break;
        }
        let p = SpherePoint::random(q.rep.degree(), rng);
        if out.iter().all(|o| quotient_distance(q, o, &p) >= min_sep) {
            out.push(p);
        }
    }
    if out.len() < size {
        return Err(Error::GeometryError(format!(
            "no {size} points at separation {min_sep}"
        )));
    }
    Ok(out)
}

/// `dist(x, B)` in the quotient.
pub fn distance_to_set(q: &QuotientSpace, x: &SpherePoint, set: &[SpherePoint]) -> f64 {
    if set.is_empty() {
        return f64::INFINITY;
    }
    distances_to_rows(&orbit_rows(q, set), std::slice::from_ref(x))[0]
}

/// Hausdorff distance between two finite sets of quotient points.
pub fn hausdorff(q: &QuotientSpace, a: &[SpherePoint], b: &[SpherePoint]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    directed_hausdorff(&orbit_rows(q, b), a).max(directed_hausdorff(&orbit_rows(q, a), b))
}

// max_x min_r dist(x, r); a point stops scanning once some row is closer than the
// running maximum, since it can no longer raise it
fn directed_hausdorff(rows: &DMatrix<f64>, points: &[SpherePoint]) -> f64 {
    let n = rows.ncols();
    let flat: Vec<f64> = rows.transpose().as_slice().to_vec();
    let mut worst_cos = f64::INFINITY;
    for p in points {
        let x = p.coords().as_slice();
        let mut best = f64::NEG_INFINITY;
        for r in flat.chunks_exact(n) {
            let d: f64 = r.iter().zip(x).map(|(a, b)| a * b).sum();
            best = best.max(d);
            if best >= worst_cos {
                break;
            }
        }
        worst_cos = worst_cos.min(best);
    }
    clamped_acos(worst_cos)
}

/// `CP^{2d-1}` modulo the fixed point free involution
/// `σ[z₁..z_{2d}] = [z̄_{d+1}, …, z̄_{2d}, −z̄₁, …, −z̄_d]`, with the Fubini–Study distance
/// `arccos |⟨z, w⟩|`.
#[derive(Clone, Copy, Debug)]
pub struct ProjectiveInvolutionQuotient {
    d: usize,
}

impl ProjectiveInvolutionQuotient {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParams("the involution quotient needs d >= 2".into()));
        }
        Ok(Self { d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Complex dimension `2d` of the homogeneous coordinates.
    pub fn ambient(&self) -> usize {
        2 * self.d
    }

    fn check(&self, z: &DVector<Complex64>) -> Result<()> {
        if z.len() != self.ambient() {
            return Err(invalid("point has the wrong dimension"));
        }
        if (z.norm() - 1.0).abs() > 1e-10 {
            return Err(invalid("homogeneous coordinates must be a unit vector"));
        }
        Ok(())
    }

    /// Uniform random unit vector in `C^{2d}`.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<Complex64> {
        let v = random_unit_vector(2 * self.ambient(), rng);
        DVector::from_fn(self.ambient(), |i, _| Complex64::new(v[2 * i], v[2 * i + 1]))
    }
}

/// The involution on homogeneous coordinates.
pub fn cp_involution(p: &ProjectiveInvolutionQuotient, z: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    p.check(z)?;
    let d = p.d;
    Ok(DVector::from_fn(2 * d, |i, _| {
        if i < d {
            z[i + d].conj()
        } else {
            -z[i - d].conj()
        }
    }))
}

/// Fubini–Study distance `arccos |⟨z, w⟩|`.
pub fn fubini_study_distance(z: &DVector<Complex64>, w: &DVector<Complex64>) -> f64 {
    clamped_acos(z.dotc(w).norm())
}

/// `min(d([z], [w]), d([z], [σw]))`.
pub fn cp_quotient_distance(
    p: &ProjectiveInvolutionQuotient,
    z: &DVector<Complex64>,
    w: &DVector<Complex64>,
) -> Result<f64> {
    p.check(z)?;
    let sw = cp_involution(p, w)?;
    Ok(fubini_study_distance(z, w).min(fubini_study_distance(z, &sw)))
}

/// Representative with the largest-modulus coordinate made real and positive.
pub fn gauge_fixed(z: &DVector<Complex64>) -> DVector<Complex64> {
    let k = (0..z.len())
        .max_by(|&a, &b| z[a].norm().total_cmp(&z[b].norm()))
        .unwrap_or(0);
    if z.is_empty() || z[k].norm() == 0.0 {
        return z.clone();
    }
    let phase = z[k].conj() / z[k].norm();
    z.map(|c| c * phase)
}

/// Lower bound on the eccentricity of `[z]` found by descending
/// `|⟨z, w⟩|² + |⟨σz, w⟩|²` from a random start; returns the bound and the witness `w`.
pub fn cp_eccentricity_lower<R: Rng + ?Sized>(
    p: &ProjectiveInvolutionQuotient,
    z: &DVector<Complex64>,
    rng: &mut R,
) -> Result<(f64, DVector<Complex64>)> {
    let sz = cp_involution(p, z)?;
    let mut w = p.random_point(rng);
    for _ in 0..200 {
        let grad = z * z.dotc(&w) + &sz * sz.dotc(&w);
        let next = &w - grad;
        let norm = next.norm();
        if norm < 1e-300 {
            break;
        }
        w = next / Complex64::new(norm, 0.0);
        if z.dotc(&w).norm() + sz.dotc(&w).norm() < 1e-15 {
            break;
        }
    }
    let value = cp_quotient_distance(p, z, &w)?;
    Ok((value, gauge_fixed(&w)))
}

/// Largest quotient distance over `pairs` random pairs, each refined by the witness descent.
pub fn cp_sampled_diameter<R: Rng + ?Sized>(
    p: &ProjectiveInvolutionQuotient,
    pairs: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut best: f64 = 0.0;
    for _ in 0..pairs {
        let z = p.random_point(rng);
        let w = p.random_point(rng);
        best = best.max(cp_quotient_distance(p, &z, &w)?);
        best = best.max(cp_eccentricity_lower(p, &z, rng)?.0);
    }
    Ok(best)
}
