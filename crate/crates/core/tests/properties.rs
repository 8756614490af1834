use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use sphereform::groups::{
    antipodal_group, close_group, cyclic_group, quaternion_group, realify, rotation2, type1_generators, Complex64,
    FiniteMatrixGroup, OrthogonalMatrix, Type1Params,
};
use sphereform::numerics::{geodesic, rank_tol, seeded_rng, SpherePoint, TangentVector};
use sphereform::quotients::{
    decide_radius_half_pi, eccentricity, has_cyclic_vector, quotient_distance, radius, QuotientSpace,
};
use sphereform::reps::{decompose, direct_sum, multiplicity_profile, Representation};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn rotation_rep(g: &Arc<FiniteMatrixGroup>, n: usize, k: usize) -> Representation {
    Representation::from_generator_images(Arc::clone(g), vec![rotation2(2.0 * PI * k as f64 / n as f64)]).unwrap()
}

fn lens(n: usize, ks: &[usize]) -> QuotientSpace {
    let g = Arc::new(cyclic_group(n).unwrap());
    let mut rep = rotation_rep(&g, n, ks[0]);
    for &k in &ks[1..] {
        rep = direct_sum(&rep, &rotation_rep(&g, n, k)).unwrap();
    }
    QuotientSpace::new(rep).unwrap()
}

fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = seeded_rng(seed);
    let cols: Vec<DVector<f64>> = (0..n).map(|_| SpherePoint::random(n, &mut rng).into_inner()).collect();
    DMatrix::from_columns(&cols).qr().q()
}

#[test]
fn lens_space_radius_matches_fixture() {
    let fixture: serde_json::Value = serde_json::from_str(include_str!("fixtures/lens_5_2.json")).unwrap();
    let oracle = fixture["radius"].as_f64().unwrap();
    let tol = fixture["radius_tolerance"].as_f64().unwrap();
    let iv = radius(&lens(5, &[1, 2]), 0.04).unwrap();
    assert!(iv.certified);
    assert!(
        iv.lower - tol <= oracle && oracle <= iv.upper + tol,
        "{iv:?} vs {oracle}"
    );
    assert!(iv.upper < PI / 2.0);
}

#[test]
fn quotient_distance_is_a_metric() {
    let q = lens(5, &[1, 2]);
    let mut rng = seeded_rng(11);
    for _ in 0..1000 {
        let [x, y, z] = [(); 3].map(|_| SpherePoint::random(4, &mut rng));
        let (dxy, dyx) = (quotient_distance(&q, &x, &y), quotient_distance(&q, &y, &x));
        assert!((dxy - dyx).abs() <= 1e-12);
        assert!(dxy <= quotient_distance(&q, &x, &z) + quotient_distance(&q, &z, &y) + 1e-12);
        assert!(quotient_distance(&q, &x, &x) <= 1e-7);
    }
}

#[test]
fn closure_under_direct_sum_for_quaternion_reps() {
    // the doubled defining rep of Q8 has no cyclic vector; adding anything keeps it that way
    let g = Arc::new(quaternion_group().unwrap());
    let d = Representation::defining(Arc::clone(&g));
    let dd = direct_sum(&d, &d).unwrap();
    let mut rng = seeded_rng(3);
    assert!(decide_radius_half_pi(&QuotientSpace::new(dd.clone()).unwrap(), &mut rng).unwrap());
    let ddd = direct_sum(&dd, &d).unwrap();
    assert!(decide_radius_half_pi(&QuotientSpace::new(ddd).unwrap(), &mut rng).unwrap());
}

#[test]
fn doubled_type_one_irreducible_has_a_cyclic_vector() {
    let p = Type1Params {
        m: 3,
        n_prime: 4,
        r: 2,
        k: 1,
        l: 1,
        d: 2,
    };
    let (a, b) = type1_generators(&p).unwrap();
    let g = Arc::new(close_group(&[a, b], 1024).unwrap());
    assert_eq!(g.order(), 24);
    let rho = Representation::defining(g);
    let mut rng = seeded_rng(5);
    assert_eq!(decompose(&rho, &mut rng).unwrap().len(), 1);
    let doubled = direct_sum(&rho, &rho).unwrap();
    assert!(has_cyclic_vector(&doubled, 8, &mut rng).unwrap());
    assert!(!decide_radius_half_pi(&QuotientSpace::new(doubled).unwrap(), &mut rng).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn eccentricity_is_lipschitz(seed in any::<u64>(), step in 0.01f64..0.5) {
        let q = lens(5, &[1, 2]);
        let mut rng = seeded_rng(seed);
        let x = SpherePoint::random(4, &mut rng);
        let v = TangentVector::project(x.clone(), SpherePoint::random(4, &mut rng).coords());
        prop_assume!(v.dir().norm() > 1e-3);
        let unit = TangentVector::new(x.clone(), v.dir().normalize()).unwrap();
        let y = geodesic(&x, &unit, step).unwrap();
        let delta = 0.05;
        let ex = eccentricity(&q, &x, delta).unwrap();
        let ey = eccentricity(&q, &y, delta).unwrap();
        let width = (ex.upper - ex.lower).max(ey.upper - ey.lower);
        let gap = (ex.lower - ey.upper).max(ey.lower - ex.upper).max(0.0);
        prop_assert!(gap <= x.angle_to(&y) + 2.0 * width + 1e-9);
    }

    #[test]
    fn no_cyclic_vector_survives_direct_sums(n in 3usize..9, a in 1usize..9, b in 1usize..9) {
        prop_assume!(gcd(a % n, n) == 1 && gcd(b % n, n) == 1);
        let g = Arc::new(cyclic_group(n).unwrap());
        let rho = direct_sum(&rotation_rep(&g, n, a), &rotation_rep(&g, n, a)).unwrap();
        let sigma = rotation_rep(&g, n, b);
        prop_assert!(sigma.is_fixed_point_free());
        let mut rng = seeded_rng((n * 100 + a * 10 + b) as u64);
        prop_assert!(decide_radius_half_pi(&QuotientSpace::new(rho.clone()).unwrap(), &mut rng).unwrap());
        let sum = direct_sum(&rho, &sigma).unwrap();
        prop_assert!(decide_radius_half_pi(&QuotientSpace::new(sum).unwrap(), &mut rng).unwrap());
    }

    #[test]
    fn free_reps_have_equal_block_dimensions(n in 3usize..8, ks in proptest::collection::vec(1usize..8, 1..4), seed in any::<u64>()) {
        let ks: Vec<usize> = ks.into_iter().filter(|&k| gcd(k % n, n) == 1).collect();
        prop_assume!(!ks.is_empty());
        let q = lens(n, &ks);
        prop_assert!(q.rep().is_fixed_point_free());
        let mut rng = seeded_rng(seed);
        let profile = multiplicity_profile(q.rep(), &mut rng).unwrap();
        prop_assert!(profile.equal_block_dimensions());
        let blocks = decompose(q.rep(), &mut rng).unwrap();
        prop_assert_eq!(blocks.iter().map(|b| b.dim()).sum::<usize>(), 2 * ks.len());
        let total = blocks.iter().fold(DMatrix::zeros(2 * ks.len(), 2 * ks.len()), |acc, b| acc + b.projector());
        prop_assert!((total - DMatrix::identity(2 * ks.len(), 2 * ks.len())).norm() <= 1e-8);
    }

    #[test]
    fn geodesics_have_period_two_pi(seed in any::<u64>(), t in -10.0f64..10.0, n in 2usize..7) {
        let mut rng = seeded_rng(seed);
        let p = SpherePoint::random(n, &mut rng);
        let v = TangentVector::project(p.clone(), SpherePoint::random(n, &mut rng).coords());
        prop_assume!(v.dir().norm() > 1e-3);
        let v = TangentVector::new(p.clone(), v.dir().normalize()).unwrap();
        let a = geodesic(&p, &v, t).unwrap();
        let b = geodesic(&p, &v, t + 2.0 * PI).unwrap();
        prop_assert!((a.coords() - b.coords()).norm() <= 1e-10);
    }

    #[test]
    fn rank_ignores_orthogonal_mixing(seed in any::<u64>(), rows in 2usize..7, cols in 2usize..7, r in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let r = r.min(rows).min(cols);
        let left = DMatrix::from_fn(rows, r, |_, _| rng.gen_range(-1.0..1.0));
        let right = DMatrix::from_fn(r, cols, |_, _| rng.gen_range(-1.0..1.0));
        let m = left * right;
        let q = random_orthogonal(cols, seed ^ 0x5eed);
        prop_assert_eq!(rank_tol(&m, 1e-8).unwrap(), rank_tol(&(&m * q), 1e-8).unwrap());
    }

    #[test]
    fn realification_is_multiplicative(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = seeded_rng(seed);
        let mut random = || DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let (x, y) = (random(), random());
        prop_assert!((realify(&(&x * &y)) - realify(&x) * realify(&y)).norm() <= 1e-10);
    }

    #[test]
    fn left_multiplication_permutes_elements(n in 2usize..12, dim in 1usize..4) {
        let groups = [cyclic_group(n).unwrap(), antipodal_group(dim).unwrap(), quaternion_group().unwrap()];
        for g in &groups {
            for row in g.mul_table() {
                let mut seen = row.clone();
                seen.sort_unstable();
                prop_assert_eq!(seen, (0..g.order()).collect::<Vec<_>>());
            }
        }
    }
}

#[test]
fn closing_a_rotation_gives_its_order() {
    let g = close_group(&[OrthogonalMatrix::new(rotation2(2.0 * PI / 7.0)).unwrap()], 1024).unwrap();
    assert_eq!(g.order(), 7);
}
