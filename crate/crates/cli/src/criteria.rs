//! The acceptance battery, one function per criterion. `suite` runs 1 through 10;
//! criterion 11 (byte-identical reruns) compares two suite runs and lives in the
//! acceptance test.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use sphereform::fibrations::Fibration;
use sphereform::numerics::{rank_tol, seeded_rng, SpherePoint, DEFAULT_RANK_TOL};
use sphereform::quotients::{self, QuotientSpace};

use crate::commands::{self, sub_seed, Extent};
use crate::report::{Report, Row};
use crate::specs::build_rep;
use crate::CliError;

pub const TITLES: [&str; 11] = [
    "round sphere and projective space radii",
    "lens space Z5: doubled versus distinct rotations",
    "quaternion group Q8 doubled: cyclic vector and eccentricity below π/2",
    "direct sums with a radius π/2 summand decide π/2",
    "Hopf fibration tensors and curvatures",
    "averaged curvature integrals on octonionic geodesics",
    "adapted basis structure of A_X",
    "index forms",
    "involution quotient of CP^3",
    "dual sets on RP^2 and RP^3",
    "reproducible suite output",
];

fn timed(
    r: &mut Report,
    name: &str,
    limit_s: f64,
    f: impl FnOnce() -> Result<Report, CliError>,
) -> Result<Report, CliError> {
    let start = Instant::now();
    let out = f()?;
    let secs = start.elapsed().as_secs_f64();
    r.check(
        format!("{name}.runtime"),
        secs < limit_s,
        format!("{secs:.1} s against {limit_s} s"),
    );
    Ok(out)
}

fn near_interval(lower: f64, upper: f64, target: f64, tol: f64) -> bool {
    (lower - target).abs() <= tol && (upper - target).abs() <= tol
}

fn criterion_1(seed: u64) -> Result<Report, CliError> {
    let delta = 0.02;
    let mut r = Report::default();
    let t = timed(&mut r, "trivial_s2", 60.0, || {
        commands::extent(build_rep("trivial", "d", 2)?, Extent::Radius, delta, seed)
    })?;
    let iv = &t.rows[0];
    r.check(
        "trivial_s2.radius_pi",
        iv.certified && near_interval(iv.lower, iv.upper, PI, delta),
        format!("[{:.9}, {:.9}]", iv.lower, iv.upper),
    );
    r.absorb("trivial_s2", t);
    for dim in [2, 3] {
        for which in [Extent::Radius, Extent::Diameter] {
            let name = format!(
                "rp{dim}.{}",
                if which == Extent::Radius { "radius" } else { "diameter" }
            );
            let sub = timed(&mut r, &name, 60.0, || {
                commands::extent(build_rep("antipodal", "d", dim)?, which, delta, seed)
            })?;
            let iv = &sub.rows[0];
            r.check(
                format!("{name}.half_pi"),
                iv.certified && near_interval(iv.lower, iv.upper, FRAC_PI_2, delta),
                format!("[{:.9}, {:.9}]", iv.lower, iv.upper),
            );
            r.absorb(&name, sub);
        }
    }
    Ok(r)
}

fn criterion_2(seed: u64) -> Result<Report, CliError> {
    let mut r = Report::default();
    let doubled = commands::extent(build_rep("z5", "r1+r1", 0)?, Extent::Radius, 0.04, seed)?;
    let iv = doubled.rows[0].clone();
    let half = doubled
        .rows
        .iter()
        .any(|row| row.quantity == "decide_radius_half_pi" && row.lower == 1.0);
    r.check("r1+r1.decides_half_pi", half, "decide_radius_half_pi");
    r.check(
        "r1+r1.interval_pins_half_pi",
        iv.certified && iv.lower <= FRAC_PI_2 + 1e-12 && FRAC_PI_2 <= iv.upper + 1e-12 && iv.upper - iv.lower <= 0.05,
        format!("[{:.9}, {:.9}]", iv.lower, iv.upper),
    );
    r.absorb("r1+r1", doubled);

    let lens_rep = build_rep("z5", "r1+r2", 0)?;
    let cyc = commands::cyclic(&lens_rep, 8, seed)?;
    r.check(
        "r1+r2.cyclic_vector",
        cyc.rows[0].lower == 1.0,
        "cyclic vector in 8 trials",
    );
    r.absorb("r1+r2", cyc);
    let lens = commands::extent(lens_rep, Extent::Radius, 0.02, seed)?;
    let iv = lens.rows[0].clone();
    r.check(
        "r1+r2.radius_margin",
        iv.certified && iv.upper < FRAC_PI_2 - 0.05,
        format!("upper {:.9} against {:.9}", iv.upper, FRAC_PI_2 - 0.05),
    );
    r.absorb("r1+r2", lens);
    Ok(r)
}

fn criterion_3(seed: u64) -> Result<Report, CliError> {
    let mut r = Report::default();
    let rep = build_rep("q8", "d+d", 0)?;
    let cyc = commands::cyclic(&rep, 8, seed)?;
    let found = cyc.rows[0].lower == 1.0;
    r.absorb("q8_doubled", cyc);
    let mut rng = seeded_rng(seed);
    let mut span = 0;
    for _ in 0..64 {
        let x = sphereform::numerics::random_unit_vector(8, &mut rng);
        span = span.max(rank_tol(&rep.orbit_matrix(&x), DEFAULT_RANK_TOL)?);
    }
    r.row(Row::value("q8_doubled.max_orbit_span", span as f64, seed));
    r.check(
        "q8_doubled.cyclic_vector",
        found,
        format!("orbits span at most {span} of 8 dimensions"),
    );
    let q = QuotientSpace::new(rep)?;
    let mut best = f64::INFINITY;
    for _ in 0..16 {
        let x = SpherePoint::random(8, &mut rng);
        best = best.min(quotients::eccentricity(&q, &x, 0.05)?.upper);
    }
    r.row(Row::value("q8_doubled.min_sampled_eccentricity_upper", best, seed));
    r.check(
        "q8_doubled.eccentricity_below_half_pi",
        best < FRAC_PI_2 - 1e-12,
        format!("min sampled upper bound {best:.9} (uncertified)"),
    );
    Ok(r)
}

fn criterion_4(seed: u64) -> Result<Report, CliError> {
    let mut r = Report::default();
    // (group, dim, ρ with radius π/2, summands σ)
    let families: [(&str, usize, &str, &[&str]); 5] = [
        ("z5", 0, "r1+r1", &["r1", "r2", "r1+r2"]),
        ("z5", 0, "r2+r2", &["r1", "r1+r2"]),
        ("z3", 0, "r1+r1", &["r1"]),
        ("q8", 0, "d+d", &["d"]),
        ("antipodal", 2, "d", &["d"]),
    ];
    let mut tag = 0;
    let mut decide = |group: &str, dim: usize, rep: &str| -> Result<bool, CliError> {
        tag += 1;
        let q = QuotientSpace::new(build_rep(group, rep, dim)?)?;
        Ok(quotients::decide_radius_half_pi(
            &q,
            &mut seeded_rng(sub_seed(seed, tag)),
        )?)
    };
    for (group, dim, rho, sigmas) in families {
        let base = decide(group, dim, rho)?;
        r.check(format!("{group}.{rho}.half_pi"), base, "summand fixture has radius π/2");
        for sigma in sigmas {
            let sum = format!("{rho}+{sigma}");
            let d = decide(group, dim, &sum)?;
            r.row(Row::flag(format!("{group}.{sum}"), d, seed));
            r.check(format!("{group}.{sum}.half_pi"), d, "ρ ⊕ σ decides π/2");
        }
    }
    // |Γ| < degree
    let small: [(&str, usize, &str); 5] = [
        ("z5", 0, "r1+r2+r1"),
        ("z3", 0, "r1+r1"),
        ("antipodal", 2, "d"),
        ("q8", 0, "3d"),
        ("type1:3,4,2,1,1,2", 0, "7d"),
    ];
    for (group, dim, rep) in small {
        let built = build_rep(group, rep, dim)?;
        let (order, degree) = (built.group().order(), built.degree());
        let d = decide(group, dim, rep)?;
        r.row(Row::flag(format!("{group}.{rep}"), d, seed));
        r.check(
            format!("{group}.{rep}.small_group"),
            order < degree && d,
            format!("|Γ| = {order}, degree {degree}"),
        );
    }
    Ok(r)
}

fn criterion_5(seed: u64) -> Result<Report, CliError> {
    let mut r = Report::default();
    let sub = timed(&mut r, "fibrations", 300.0, || {
        commands::fibration_checks(&commands::DEFAULT_FIBRATIONS, 32, seed)
    })?;
    r.absorb("fibrations", sub);
    Ok(r)
}

fn criterion_6(seed: u64) -> Result<Report, CliError> {
    let mut r = Report::default();
    r.absorb("octonionic", commands::averages(Fibration::Octonionic, 8, seed)?);
    Ok(r)
}

fn criterion_7(seed: u64) -> Result<Report, CliError> {
    let mut r = Report::default();
    for (i, f) in [Fibration::Octonionic, Fibration::Quaternionic(2), Fibration::Complex(2)]
        .into_iter()
        .enumerate()
    {
        r.absorb(&f.to_string(), commands::appendix(f, 8, sub_seed(seed, i as u64))?);
    }
    Ok(r)
}

fn criterion_8(seed: u64) -> Result<Report, CliError> {
    commands::index(None, seed)
}

fn criterion_9(seed: u64) -> Result<Report, CliError> {
    let mut r = Report::default();
    r.absorb("cp3", commands::cp_quotient(2, 10_000, 100, seed)?);
    Ok(r)
}

fn criterion_10(seed: u64) -> Result<Report, CliError> {
    let mut r = Report::default();
    for dim in [2, 3] {
        let rep = build_rep("antipodal", "d", dim)?;
        r.absorb(
            &format!("rp{dim}"),
            commands::dual_sets(rep, 0.05, 5, sub_seed(seed, dim as u64))?,
        );
    }
    Ok(r)
}

/// Runs criterion `id` (1 to 10).
pub fn run(id: usize, seed: u64) -> Result<Report, CliError> {
    let seed = sub_seed(seed, id as u64);
    match id {
        1 => criterion_1(seed),
        2 => criterion_2(seed),
        3 => criterion_3(seed),
        4 => criterion_4(seed),
        5 => criterion_5(seed),
        6 => criterion_6(seed),
        7 => criterion_7(seed),
        8 => criterion_8(seed),
        9 => criterion_9(seed),
        10 => criterion_10(seed),
        _ => Err(CliError::Usage(format!("no criterion {id} runs inside the suite"))),
    }
}

/// Criteria 1 to 10, each under the prefix `c<id>`.
pub fn suite(seed: u64) -> Result<Report, CliError> {
    let mut r = Report::default();
    for id in 1..=10 {
        let sub = run(id, seed)?;
        let pass = sub.pass();
        r.say(format!(
            "criterion {id} ({}): {}",
            TITLES[id - 1],
            if pass { "PASS" } else { "FAIL" }
        ));
        r.absorb(&format!("c{id}"), sub);
    }
    Ok(r)
}
