//! Index forms of scalar-amplitude normal fields and averaged curvature integrals along
//! base geodesics of the Hopf fibrations.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fibrations::{self, BaseGeodesic, Fibration};
use crate::numerics::{quadrature, simpson_samples};

/// Default step of the frame sweep along a lift.
pub const SWEEP_STEP: f64 = PI / 512.0;
/// Sweeps cover `[0, 5π/4]`, enough for all four averaging windows.
pub const SWEEP_END: f64 = 5.0 * FRAC_PI_4;
/// Smallest admissible number of quadrature steps for an index form.
pub const MIN_INDEX_STEPS: usize = 64;

const BOUNDARY_TOL: f64 = 1e-12;
const WINDOW_STEPS: usize = 1024;

/// Sectional curvature `K(γ̇, E)` as a function of `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum CurvatureProfile {
    Constant {
        k: f64,
    },
    /// Samples `values[i] = K(t0 + i·dt)`, linearly interpolated.
    Tabulated {
        t0: f64,
        dt: f64,
        values: Vec<f64>,
    },
}

impl CurvatureProfile {
    pub fn constant(k: f64) -> Self {
        Self::Constant { k }
    }

    pub fn tabulated(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || values.len() < 2 {
            return Err(invalid("a tabulated profile needs dt > 0 and two samples"));
        }
        if values.iter().any(|v| !v.is_finite()) || !t0.is_finite() {
            return Err(invalid("profile values must be finite"));
        }
        Ok(Self::Tabulated { t0, dt, values })
    }

    /// Sweep resolution, if the profile was sampled.
    pub fn resolution(&self) -> Option<f64> {
        match self {
            Self::Constant { .. } => None,
            Self::Tabulated { dt, .. } => Some(*dt),
        }
    }

    /// Interval of definition.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::Constant { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Tabulated { t0, dt, values } => (*t0, t0 + dt * (values.len() - 1) as f64),
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            Self::Constant { k } => *k,
            Self::Tabulated { t0, dt, values } => {
                let x = ((t - t0) / dt).clamp(0.0, (values.len() - 1) as f64);
                let i = (x.floor() as usize).min(values.len() - 2);
                let s = x - i as f64;
                values[i] * (1.0 - s) + values[i + 1] * s
            }
        }
    }

    fn check_covers(&self, a: f64, b: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        let slack = self.resolution().unwrap_or(0.0) * 1e-9;
        if a < lo - slack || b > hi + slack {
            return Err(invalid(format!("profile defined on [{lo}, {hi}], not on [{a}, {b}]")));
        }
        Ok(())
    }
}

/// A normal field `w(t)·E(t)` with `E` parallel and unit, given by its amplitude and
/// the amplitude's derivative.
#[derive(Clone, Copy)]
pub struct Amplitude<'a> {
    pub w: &'a dyn Fn(f64) -> f64,
    pub dw: &'a dyn Fn(f64) -> f64,
}

/// `I(W, W) = ∫ₐᵇ w′² − K w² dt` by composite Simpson with at least 64 steps.
pub fn index_form(k: &CurvatureProfile, field: Amplitude<'_>, a: f64, b: f64, steps: usize) -> Result<f64> {
    if steps < MIN_INDEX_STEPS {
        return Err(invalid(format!("index forms need at least {MIN_INDEX_STEPS} steps")));
    }
    if !(b > a) {
        return Err(invalid("empty interval"));
    }
    if (field.w)(a).abs() > BOUNDARY_TOL || (field.w)(b).abs() > BOUNDARY_TOL {
        return Err(invalid("the field must vanish at both ends"));
    }
    k.check_covers(a, b)?;
    let steps = steps + steps % 2;
    quadrature(
        |t| {
            let w = (field.w)(t);
            let dw = (field.dw)(t);
            dw * dw - k.at(t) * w * w
        },
        a,
        b,
        steps,
    )
}

/// `I` for `w = sin(π(t − a)/l)` on `[a, a + l]`.
pub fn sine_index_form(k: &CurvatureProfile, a: f64, l: f64, steps: usize) -> Result<f64> {
    let freq = PI / l;
    let w = move |t: f64| {
        // exact zeros at the ends
        if t == a || t == a + l {
            0.0
        } else {
            (freq * (t - a)).sin()
        }
    };
    let dw = move |t: f64| freq * (freq * (t - a)).cos();
    index_form(k, Amplitude { w: &w, dw: &dw }, a, a + l, steps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    Sin2,
    Cos2,
}

impl Weight {
    pub fn at(self, t: f64) -> f64 {
        match self {
            Self::Sin2 => (2.0 * t).sin().powi(2),
            Self::Cos2 => (2.0 * t).cos().powi(2),
        }
    }
}

/// The averaging windows: `sin²2t` on `[0, π/2]` and `[π/2, π]`, `cos²2t` on
/// `[π/4, 3π/4]` and `[3π/4, 5π/4]`.
pub const WINDOWS: [(Weight, f64, f64); 4] = [
    (Weight::Sin2, 0.0, FRAC_PI_2),
    (Weight::Cos2, FRAC_PI_4, 3.0 * FRAC_PI_4),
    (Weight::Sin2, FRAC_PI_2, PI),
    (Weight::Cos2, 3.0 * FRAC_PI_4, 5.0 * FRAC_PI_4),
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowCheck {
    pub weight: Weight,
    pub a: f64,
    pub b: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `∫ K·weight ≤ 4 ∫ weight` over one of the four windows.
pub fn weighted_average_check(k: &CurvatureProfile, weight: Weight, a: f64, b: f64) -> Result<WindowCheck> {
    let known = WINDOWS
        .iter()
        .any(|&(w, lo, hi)| w == weight && (lo - a).abs() < 1e-12 && (hi - b).abs() < 1e-12);
    if !known {
        return Err(invalid(format!(
            "[{a}, {b}] with {weight:?} is not an averaging window"
        )));
    }
    k.check_covers(a, b)?;
    let lhs = quadrature(|t| k.at(t) * weight.at(t), a, b, WINDOW_STEPS)?;
    let rhs = 4.0 * quadrature(|t| weight.at(t), a, b, WINDOW_STEPS)?;
    Ok(WindowCheck {
        weight,
        a,
        b,
        lhs,
        rhs,
        pass: lhs <= rhs + 1e-6,
    })
}

/// All four window checks.
pub fn window_checks(k: &CurvatureProfile) -> Result<Vec<WindowCheck>> {
    WINDOWS
        .iter()
        .map(|&(w, a, b)| weighted_average_check(k, w, a, b))
        .collect()
}

/// Curvature and O'Neill data sampled along the horizontal lift of a base geodesic.
#[derive(Clone, Debug, Serialize)]
pub struct GeodesicSweep {
    pub fibration: Fibration,
    pub dt: f64,
    /// `curvatures[i][s] = K(γ̇, E_i)` at `t = s·dt`.
    pub curvatures: Vec<Vec<f64>>,
    /// `Σ_i ‖A_{γ̇̃} Ẽ_i‖²` over the parallel horizontal frame.
    pub horizontal_a: Vec<f64>,
    /// `Σ_j ‖A_{γ̇̃} V_j‖²` over the transported vertical frame.
    pub vertical_a: Vec<f64>,
    /// `Σ_i ‖A_{γ̇̃} y_i‖²` over the adapted basis.
    pub adapted_a: Vec<f64>,
    /// Max `‖(∇_{γ̇̃} V_j)^v‖` along the sweep.
    pub vertical_residual: f64,
}

impl GeodesicSweep {
    pub fn profile(&self, i: usize) -> Result<CurvatureProfile> {
        let values = self
            .curvatures
            .get(i)
            .ok_or_else(|| invalid(format!("no frame direction {i}")))?;
        CurvatureProfile::tabulated(0.0, self.dt, values.clone())
    }

    pub fn profiles(&self) -> Result<Vec<CurvatureProfile>> {
        (0..self.curvatures.len()).map(|i| self.profile(i)).collect()
    }

    /// `Ric(γ̇, γ̇)` along the sweep.
    pub fn ricci(&self) -> Vec<f64> {
        let n = self.horizontal_a.len();
        (0..n).map(|s| self.curvatures.iter().map(|k| k[s]).sum()).collect()
    }

    fn integrate(&self, values: &[f64], end: f64) -> Result<f64> {
        let steps = (end / self.dt).round() as usize;
        if steps >= values.len() || ((steps as f64) * self.dt - end).abs() > 1e-9 {
            return Err(invalid(format!("sweep does not reach t = {end} on its grid")));
        }
        simpson_samples(&values[..=steps], self.dt)
    }

    /// `∫₀^π Ric(γ̇, γ̇)`.
    pub fn ricci_integral(&self) -> Result<f64> {
        self.integrate(&self.ricci(), PI)
    }

    /// `(∫₀^π Σ‖A Ẽ_i‖², ∫₀^π Σ‖A V_j‖²)`.
    pub fn a_integrals(&self) -> Result<(f64, f64)> {
        Ok((
            self.integrate(&self.horizontal_a, PI)?,
            self.integrate(&self.vertical_a, PI)?,
        ))
    }

    /// Max pointwise `|Σ‖A Ẽ_i‖² − Σ‖A y_i‖²|`.
    pub fn adapted_residual(&self) -> f64 {
        self.horizontal_a
            .iter()
            .zip(&self.adapted_a)
            .map(|(h, y)| (h - y).abs())
            .fold(0.0, f64::max)
    }
}

fn columns(m: &DMatrix<f64>) -> impl Iterator<Item = DVector<f64>> + '_ {
    (0..m.ncols()).map(|i| m.column(i).into_owned())
}

// Σ‖A y_i‖² over y_i = A u_i / λ_i for the singular pairs of A on the vertical space,
// completed by an orthonormal basis of the rest of X^⊥ in the horizontal space
fn adapted_sum(a: &DMatrix<f64>, vertical: &DMatrix<f64>, horizontal: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    let astar = a * vertical;
    let svd = astar.svd(true, false);
    let u_h = svd.u.expect("requested");
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for (i, &l) in svd.singular_values.iter().enumerate() {
        if l > 1e-6 {
            basis.push(u_h.column(i).into_owned());
        }
    }
    for v in columns(horizontal) {
        let mut against = vec![x.clone()];
        against.extend(basis.iter().cloned());
        if let Some(w) = crate::numerics::gram_schmidt(std::slice::from_ref(&v), &against, 0.1) {
            basis.extend(w);
        }
    }
    basis.iter().map(|y| (a * y).norm_squared()).sum()
}

/// Sweeps `[0, end]` at step `dt` along the lift of `gamma` through `gamma.z`.
pub fn sweep_with(f: &Fibration, gamma: &BaseGeodesic, dt: f64, end: f64) -> Result<GeodesicSweep> {
    if !(dt > 0.0) || !(end > 0.0) {
        return Err(invalid("sweep step and length must be positive"));
    }
    let steps = (end / dt).round() as usize;
    let lift = fibrations::horizontal_lift(f, gamma, 0.0, &gamma.z)?;
    let frames = fibrations::lift_frames(f, &lift, 0.0, dt, steps)?;
    let normals = f.base_dim() - 1;
    let mut out = GeodesicSweep {
        fibration: *f,
        dt,
        curvatures: vec![Vec::with_capacity(steps + 1); normals],
        horizontal_a: Vec::with_capacity(steps + 1),
        vertical_a: Vec::with_capacity(steps + 1),
        adapted_a: Vec::with_capacity(steps + 1),
        vertical_residual: fibrations::vertical_transport_residual(f, &frames)?,
    };
    for s in 0..=steps {
        let z = &frames.points[s];
        let x = &frames.velocities[s];
        let a = fibrations::a_operator(f, z, x)?;
        let e = &frames.horizontal[s];
        let v = &frames.vertical[s];
        let ae = &a * e;
        let mut hsum = 0.0;
        for (i, col) in columns(&ae).enumerate() {
            let n2 = col.norm_squared();
            out.curvatures[i].push(1.0 + 3.0 * n2);
            hsum += n2;
        }
        out.horizontal_a.push(hsum);
        out.vertical_a.push((&a * v).norm_squared());
        let split = fibrations::split(f, z)?;
        out.adapted_a
            .push(adapted_sum(&a, &split.vertical, &split.horizontal, x));
    }
    if out.vertical_residual > 1e-5 {
        return Err(Error::FrameError(format!(
            "vertical transport residual {} exceeds 1e-5",
            out.vertical_residual
        )));
    }
    Ok(out)
}

/// Default sweep: step `π/512` over `[0, 5π/4]`.
pub fn sweep(f: &Fibration, gamma: &BaseGeodesic) -> Result<GeodesicSweep> {
    sweep_with(f, gamma, SWEEP_STEP, SWEEP_END)
}

/// `∫₀^π Ric(γ̇, γ̇) dt` along `gamma`.
pub fn ricci_average(f: &Fibration, gamma: &BaseGeodesic) -> Result<f64> {
    sweep_with(f, gamma, SWEEP_STEP, PI)?.ricci_integral()
}

/// The Ricci bound `4(d − 1)π` for a base of dimension `d` (`28π` for `S^8`).
pub fn ricci_bound(f: &Fibration) -> f64 {
    4.0 * (f.base_dim() - 1) as f64 * PI
}

/// `(∫₀^π Σᵢ ‖A Ẽᵢ‖², ∫₀^π Σⱼ ‖A Vⱼ‖²)` along the lift of `gamma`.
pub fn a_tensor_averages(f: &Fibration, gamma: &BaseGeodesic) -> Result<(f64, f64)> {
    sweep_with(f, gamma, SWEEP_STEP, PI)?.a_integrals()
}
