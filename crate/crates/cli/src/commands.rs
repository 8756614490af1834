//! One function per command. Each returns a [`Report`]; nothing here touches the filesystem.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use sphereform::fibrations::{self, BaseGeodesic, Fibration};
use sphereform::groups::Complex64;
use sphereform::numerics::seeded_rng;
use sphereform::quotients::{self, ProjectiveInvolutionQuotient, QuotientSpace};
use sphereform::reps::{self, Representation};
use sphereform::variational::{self, CurvatureProfile};

use nalgebra::DVector;

use crate::report::{Report, Row};
use crate::CliError;

/// Seed of the `tag`-th independent stream derived from `seed`.
pub fn sub_seed(seed: u64, tag: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(tag)
}

fn fmt(x: f64) -> String {
    format!("{x:.9}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extent {
    Radius,
    Diameter,
}

/// Radius or diameter with the half-π consistency gate.
pub fn extent(rep: Representation, which: Extent, delta: f64, seed: u64) -> Result<Report, CliError> {
    let q = QuotientSpace::new(rep)?;
    let (name, iv) = match which {
        Extent::Radius => ("radius", quotients::radius(&q, delta)?),
        Extent::Diameter => ("diameter", quotients::diameter(&q, delta)?),
    };
    let mut r = Report::default();
    r.row(Row::interval(name, &iv, delta, seed));
    r.say(format!(
        "{name} in [{}, {}] ({}, {})",
        fmt(iv.lower),
        fmt(iv.upper),
        if iv.certified { "certified" } else { "uncertified" },
        iv.method
    ));
    if q.order() > 1 {
        let half = quotients::decide_radius_half_pi(&q, &mut seeded_rng(seed))?;
        r.row(Row::flag("decide_radius_half_pi", half, seed));
        r.say(format!("decide_radius_half_pi = {half}"));
        if iv.certified {
            // radius = π/2 forces both extents to reach π/2; radius < π/2 cannot have a lower
            // bound at π/2
            let consistent = match (half, which) {
                (true, _) => iv.upper >= FRAC_PI_2 - 1e-9,
                (false, Extent::Radius) => iv.lower < FRAC_PI_2 - 1e-12,
                (false, Extent::Diameter) => true,
            };
            r.check(
                "half_pi_consistency",
                consistent,
                format!("decision {half} against [{}, {}]", fmt(iv.lower), fmt(iv.upper)),
            );
        }
    }
    Ok(r)
}

pub fn cyclic(rep: &Representation, trials: usize, seed: u64) -> Result<Report, CliError> {
    let found = quotients::has_cyclic_vector(rep, trials, &mut seeded_rng(seed))?;
    let mut r = Report::default();
    r.row(Row::flag("cyclic_vector", found, seed));
    r.say(if found {
        "cyclic vector found; radius < π/2"
    } else {
        "no cyclic vector found; radius = π/2"
    });
    Ok(r)
}

pub fn decompose(rep: &Representation, seed: u64) -> Result<Report, CliError> {
    let mut rng = seeded_rng(seed);
    let blocks = reps::decompose(rep, &mut rng)?;
    let profile = reps::multiplicity_profile(rep, &mut rng)?;
    let mut r = Report::default();
    let mut total = 0;
    let mut worst: f64 = 0.0;
    for (i, b) in blocks.iter().enumerate() {
        let defect = reps::invariance_defect(rep, &b.basis);
        total += b.dim();
        worst = worst.max(defect);
        r.row(Row::value(format!("block_{i}.dim"), b.dim() as f64, seed));
        r.row(Row::value(format!("block_{i}.invariance_defect"), defect, seed));
        r.say(format!("block {i}: dim {}, irreducible {}", b.dim(), b.irreducible));
    }
    for (id, mult, dim) in &profile.classes {
        r.row(Row::value(format!("class_{id}.multiplicity"), *mult as f64, seed));
        r.say(format!("class {id}: dimension {dim}, multiplicity {mult}"));
    }
    r.check(
        "dimensions_add_up",
        total == rep.degree(),
        format!("{total} of {}", rep.degree()),
    );
    r.check("blocks_invariant", worst <= 1e-8, format!("max defect {worst:.3e}"));
    Ok(r)
}

pub fn equivalence(a: &Representation, b: &Representation, seed: u64) -> Result<Report, CliError> {
    let eq = reps::are_equivalent(a, b, &mut seeded_rng(seed));
    let mut r = Report::default();
    r.row(Row::flag("equivalent", eq, seed));
    r.say(if eq { "equivalent" } else { "not equivalent" });
    Ok(r)
}

/// Dual-set audit for `sets` random seed sets of sizes cycling through `1..dim`.
pub fn dual_sets(rep: Representation, delta: f64, sets: usize, seed: u64) -> Result<Report, CliError> {
    let q = QuotientSpace::new(rep)?;
    let mut rng = seeded_rng(seed);
    let max_size = q.dim().saturating_sub(1).max(1);
    let mut r = Report::default();
    for i in 0..sets {
        let size = 1 + i % max_size;
        let b = quotients::random_separated_set(&q, size, PI / 3.0, &mut rng)?;
        let d = quotients::dual_set_report(&q, &b, delta)?;
        let name = format!("set_{i}");
        let mut row = Row::value(format!("{name}.b_band_excess"), d.b_band_excess, seed);
        row.net_delta = Some(delta);
        r.row(row);
        let mut row = Row::value(format!("{name}.hausdorff_b1_b3"), d.hausdorff, seed);
        row.net_delta = Some(delta);
        r.row(row);
        r.check(
            format!("{name}.b_in_b2"),
            d.b_band_excess <= 2.0 * delta,
            format!("|B| = {size}, band excess {}", fmt(d.b_band_excess)),
        );
        r.check(
            format!("{name}.b1_eq_b3"),
            d.hausdorff <= 2.0 * delta,
            format!("Hausdorff {} with |B′|, |B″|, |B‴| = {:?}", fmt(d.hausdorff), d.sizes),
        );
    }
    Ok(r)
}

fn orthonormal_to(v: DVector<f64>, against: &[DVector<f64>]) -> Option<DVector<f64>> {
    sphereform::numerics::gram_schmidt(std::slice::from_ref(&v), against, 1e-3).map(|mut w| w.remove(0))
}

/// Tensor and curvature checks at `samples` random points of one fibration.
pub fn fibration_check(f: Fibration, samples: usize, seed: u64) -> Result<Report, CliError> {
    let mut rng = seeded_rng(seed);
    let maps = f.fiber_maps();
    let (mut t_max, mut a_dev, mut antipodal): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let (mut k_min, mut k_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut holo_dev, mut real_dev): (Option<f64>, Option<f64>) = (None, None);
    let mut spread: Option<f64> = None;
    for _ in 0..samples {
        let z = f.random_point(&mut rng);
        let s = fibrations::split(&f, &z)?;
        let x = s.random_horizontal(&mut rng);
        let y = orthonormal_to(s.random_horizontal(&mut rng), std::slice::from_ref(&x))
            .ok_or_else(|| CliError::Numeric("degenerate horizontal sample".into()))?;
        let v = s.random_vertical(&mut rng);
        let w = s.random_vertical(&mut rng);
        let t = fibrations::t_operator(&f, &z, &v)?;
        t_max = t_max.max((&t * &w).norm()).max((&t * &x).norm());
        let a = fibrations::a_operator(&f, &z, &x)?;
        a_dev = a_dev.max(((&a * &v).norm() - 1.0).abs());
        let k = fibrations::oneill_base_curvature(&f, &z, &x, &y)?;
        k_min = k_min.min(k);
        k_max = k_max.max(k);
        if maps.len() > 1 {
            let holo = &maps[1] * &x;
            let kh = fibrations::oneill_base_curvature(&f, &z, &x, &holo)?;
            holo_dev = Some(holo_dev.unwrap_or(0.0).max((kh - 4.0).abs()));
            if f.base_dim() > maps.len() {
                let mut against = vec![x.clone()];
                against.extend(maps.iter().skip(1).map(|m| m * &x));
                let real = orthonormal_to(s.random_horizontal(&mut rng), &against)
                    .ok_or_else(|| CliError::Numeric("degenerate horizontal sample".into()))?;
                let kr = fibrations::oneill_base_curvature(&f, &z, &x, &real)?;
                real_dev = Some(real_dev.unwrap_or(0.0).max((kr - 1.0).abs()));
            }
        }
        let base = fibrations::project(&f, &z)?;
        let anti = fibrations::project(&f, &(-&z))?;
        antipodal = antipodal.max(fibrations::base_distance(&f, &base, &anti));
        if f.base_is_sphere() {
            let dual = fibrations::dual_point(&f, &base)?;
            let mut worst: f64 = 0.0;
            for _ in 0..4 {
                let p = fibrations::random_fiber_point(&f, &base, &mut rng)?;
                let u = fibrations::split(&f, &p)?.random_horizontal(&mut rng);
                let end = fibrations::project(&f, &u)?;
                worst = worst.max(fibrations::base_distance(&f, &end, &dual));
            }
            spread = Some(spread.unwrap_or(0.0).max(worst));
        }
    }
    let mut r = Report::default();
    r.row(Row::value("max_t_norm", t_max, seed));
    r.row(Row::value("max_a_unit_deviation", a_dev, seed));
    r.row(Row::range("base_curvature", k_min, k_max, seed));
    r.row(Row::value("max_antipodal_distance", antipodal, seed));
    r.check("t_vanishes", t_max <= 1e-6, format!("max ‖T‖ = {t_max:.3e}"));
    r.check(
        "a_unit_on_vertical",
        a_dev <= 1e-5,
        format!("max |‖A_X V‖ − 1| = {a_dev:.3e}"),
    );
    if f.base_is_sphere() {
        let dev = (k_min - 4.0).abs().max((k_max - 4.0).abs());
        r.check(
            "curvature_four",
            dev <= 1e-5,
            format!("K in [{}, {}]", fmt(k_min), fmt(k_max)),
        );
    } else {
        r.check(
            "curvature_pinched",
            k_min >= 1.0 - 1e-5 && k_max <= 4.0 + 1e-5,
            format!("K in [{}, {}]", fmt(k_min), fmt(k_max)),
        );
    }
    if let Some(d) = holo_dev {
        r.row(Row::value("max_fiber_plane_deviation", d, seed));
        r.check(
            "fiber_plane_curvature_four",
            d <= 1e-5,
            format!("max |K − 4| = {d:.3e}"),
        );
    }
    if let Some(d) = real_dev {
        r.row(Row::value("max_totally_real_deviation", d, seed));
        r.check(
            "totally_real_curvature_one",
            d <= 1e-5,
            format!("max |K − 1| = {d:.3e}"),
        );
    }
    if let Some(d) = spread {
        r.row(Row::value("wiedersehen_spread", d, seed));
        r.check("wiedersehen", d <= 1e-6, format!("endpoint spread {d:.3e}"));
    }
    r.check(
        "antipodal_fiber_invariance",
        antipodal <= 1e-9,
        format!("max distance {antipodal:.3e}"),
    );
    let good = {
        let x = fibrations::project(&f, &f.random_point(&mut rng))?;
        fibrations::is_good_point(&f, &x, &mut rng)?
    };
    r.row(Row::flag("good_point", good, seed));
    r.check("good_point", good, "fiber is totally geodesic");
    Ok(r)
}

/// The model fibrations checked when none is named.
pub const DEFAULT_FIBRATIONS: [Fibration; 5] = [
    Fibration::Complex(1),
    Fibration::Complex(2),
    Fibration::Quaternionic(1),
    Fibration::Quaternionic(2),
    Fibration::Octonionic,
];

pub fn fibration_checks(fs: &[Fibration], samples: usize, seed: u64) -> Result<Report, CliError> {
    let mut r = Report::default();
    for (i, f) in fs.iter().enumerate() {
        r.absorb(&f.to_string(), fibration_check(*f, samples, sub_seed(seed, i as u64))?);
    }
    Ok(r)
}

/// Appendix structure at `samples` random points.
pub fn appendix(f: Fibration, samples: usize, seed: u64) -> Result<Report, CliError> {
    let mut rng = seeded_rng(seed);
    let (mut pairing, mut spread, mut eq54): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut greedy: f64 = 0.0;
    for _ in 0..samples {
        let z = f.random_point(&mut rng);
        let x = fibrations::split(&f, &z)?.random_horizontal(&mut rng);
        let a = fibrations::appendix_structure_check(&f, &z, &x, 8, &mut rng)?;
        pairing = pairing.max(a.pairing_residual);
        spread = spread.max(a.basis_spread);
        eq54 = eq54.max(a.horizontal_identity_residual);
        for (l, g) in a.lambdas.iter().zip(&a.greedy_lambdas) {
            greedy = greedy.max((l - g).abs());
        }
    }
    let mut r = Report::default();
    r.row(Row::value("pairing_residual", pairing, seed));
    r.row(Row::value("basis_spread", spread, seed));
    r.row(Row::value("horizontal_identity_residual", eq54, seed));
    r.row(Row::value("greedy_svd_gap", greedy, seed));
    r.check("pairing", pairing <= 1e-5, format!("max ‖A y + λ u‖ = {pairing:.3e}"));
    r.check(
        "basis_independence",
        spread <= 1e-8,
        format!("spread {spread:.3e} over 8 bases"),
    );
    r.check("horizontal_identity", eq54 <= 1e-6, format!("max residual {eq54:.3e}"));
    r.check("greedy_matches_svd", greedy <= 1e-6, format!("max gap {greedy:.3e}"));
    Ok(r)
}

/// Averaged curvature integrals along `geodesics` random base geodesics.
pub fn averages(f: Fibration, geodesics: usize, seed: u64) -> Result<Report, CliError> {
    let mut rng = seeded_rng(seed);
    let gammas = (0..geodesics)
        .map(|_| BaseGeodesic::random(f, &mut rng))
        .collect::<Result<Vec<_>, _>>()?;
    let sweeps = gammas
        .par_iter()
        .map(|g| variational::sweep(&f, g))
        .collect::<Result<Vec<_>, _>>()?;
    let normals = (f.base_dim() - 1) as f64;
    let bound = variational::ricci_bound(&f);
    let mut r = Report::default();
    for (i, s) in sweeps.iter().enumerate() {
        let p = format!("geodesic_{i}");
        let ric = s.ricci_integral()?;
        let (h, v) = s.a_integrals()?;
        r.row(Row::range(format!("{p}.ricci_integral"), ric, bound, seed));
        r.row(Row::range(format!("{p}.horizontal_a_integral"), h, normals * PI, seed));
        r.row(Row::range(format!("{p}.vertical_a_integral"), v, normals * PI, seed));
        r.row(Row::value(format!("{p}.adapted_residual"), s.adapted_residual(), seed));
        r.row(Row::value(format!("{p}.vertical_residual"), s.vertical_residual, seed));
        r.check(
            format!("{p}.ricci_bound"),
            ric <= bound * (1.0 + 1e-3),
            format!("∫Ric = {} against {}", fmt(ric), fmt(bound)),
        );
        if f == Fibration::Octonionic {
            r.check(
                format!("{p}.ricci_equality"),
                (ric / bound - 1.0).abs() <= 1e-3,
                format!("∫Ric / 28π = {}", fmt(ric / bound)),
            );
            r.check(
                format!("{p}.a_equality"),
                (h / (7.0 * PI) - 1.0).abs() <= 1e-3 && (v / (7.0 * PI) - 1.0).abs() <= 1e-3,
                format!("horizontal {}, vertical {} against 7π", fmt(h), fmt(v)),
            );
        }
        r.check(
            format!("{p}.adapted_basis"),
            s.adapted_residual() <= 1e-6,
            format!("max residual {:.3e}", s.adapted_residual()),
        );
        let mut all_pass = true;
        let mut worst_gap: f64 = f64::NEG_INFINITY;
        for (j, prof) in s.profiles()?.iter().enumerate() {
            for (w, c) in variational::window_checks(prof)?.iter().enumerate() {
                all_pass &= c.pass;
                worst_gap = worst_gap.max(c.lhs - c.rhs);
                r.row(Row::range(format!("{p}.e{j}.window_{w}"), c.lhs, c.rhs, seed));
            }
        }
        r.check(
            format!("{p}.windows"),
            all_pass,
            format!("max lhs − rhs = {worst_gap:.3e}"),
        );
    }
    Ok(r)
}

/// Index forms: either one `(K, l)` pair or the standard battery.
pub fn index(case: Option<(f64, f64)>, seed: u64) -> Result<Report, CliError> {
    let mut r = Report::default();
    if let Some((k, l)) = case {
        let v = variational::sine_index_form(&CurvatureProfile::constant(k), 0.0, l, 1024)?;
        r.row(Row::value("index", v, seed));
        r.say(format!("I = {} for K ≡ {k}, l = {l}", fmt(v)));
        return Ok(r);
    }
    let cases = [
        ("k4_half_pi", 4.0, FRAC_PI_2, Some(0.0)),
        ("k1_pi", 1.0, PI, Some(0.0)),
        ("k4_quarter_pi", 4.0, PI / 4.0, Some(1.5 * PI)),
        ("k4_0.6pi", 4.0, 0.6 * PI, None),
    ];
    for (name, k, l, expected) in cases {
        let v = variational::sine_index_form(&CurvatureProfile::constant(k), 0.0, l, 1024)?;
        r.row(Row::value(name, v, seed));
        match expected {
            Some(e) => r.check(
                name,
                (v - e).abs() <= 1e-6,
                format!("I = {} against {}", fmt(v), fmt(e)),
            ),
            None => r.check(name, v < 0.0, format!("I = {} must be negative", fmt(v))),
        }
    }
    Ok(r)
}

// ‖σ²z − e^{iθ}z‖ minimized over θ
fn projective_residual(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    let c = b.dotc(a);
    let phase = if c.norm() > 0.0 {
        c / c.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    (a - b * phase).norm()
}

/// The involution quotient of `CP^{2d−1}`.
pub fn cp_quotient(d: usize, samples: usize, points: usize, seed: u64) -> Result<Report, CliError> {
    let p = ProjectiveInvolutionQuotient::new(d)?;
    let mut rng = seeded_rng(seed);
    let (mut square, mut fixed) = (0.0f64, f64::INFINITY);
    for _ in 0..samples {
        let z = p.random_point(&mut rng);
        let s = quotients::cp_involution(&p, &z)?;
        let ss = quotients::cp_involution(&p, &s)?;
        square = square.max(projective_residual(&ss, &z));
        fixed = fixed.min(quotients::fubini_study_distance(&z, &s));
    }
    let mut ecc = f64::INFINITY;
    for _ in 0..points {
        let z = p.random_point(&mut rng);
        ecc = ecc.min(quotients::cp_eccentricity_lower(&p, &z, &mut rng)?.0);
    }
    let diam = quotients::cp_sampled_diameter(&p, points, &mut rng)?;
    let mut r = Report::default();
    r.row(Row::value("involution_square_residual", square, seed));
    r.row(Row::value("min_fixed_point_distance", fixed, seed));
    r.row(Row::range("eccentricity_lower", ecc, FRAC_PI_2, seed));
    r.row(Row::range("diameter_sampled", diam, FRAC_PI_2, seed));
    r.check(
        "involution_square",
        square <= 1e-12,
        format!("max residual {square:.3e}"),
    );
    r.check("no_fixed_points", fixed > 0.01, format!("min distance {}", fmt(fixed)));
    r.check(
        "eccentricity_half_pi",
        ecc >= FRAC_PI_2 - 1e-3,
        format!("min lower bound {} over {points} points", fmt(ecc)),
    );
    r.check(
        "diameter_half_pi",
        diam <= FRAC_PI_2 + 1e-3,
        format!("sampled {}", fmt(diam)),
    );
    Ok(r)
}
