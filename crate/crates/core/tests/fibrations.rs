use proptest::prelude::*;
use sphereform::fibrations::{
    a_operator, holonomy, oneill_base_curvature, random_fiber_point, split, t_operator, BaseGeodesic, Fibration,
};
use sphereform::numerics::seeded_rng;

const KINDS: [Fibration; 4] = [
    Fibration::Complex(1),
    Fibration::Complex(2),
    Fibration::Quaternionic(1),
    Fibration::Octonionic,
];

fn angle(a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn a_alternates_and_t_vanishes(seed in any::<u64>(), kind in 0usize..4) {
        let f = KINDS[kind];
        let mut rng = seeded_rng(seed);
        let z = f.random_point(&mut rng);
        let s = split(&f, &z).unwrap();
        let x = s.random_horizontal(&mut rng);
        let y = s.random_horizontal(&mut rng);
        let v = s.random_vertical(&mut rng);
        let a = a_operator(&f, &z, &x).unwrap();
        prop_assert!(((&a * &y).dot(&v) + y.dot(&(&a * &v))).abs() <= 1e-6);
        prop_assert!((&a * &x).norm() <= 1e-6);
        prop_assert!((t_operator(&f, &z, &v).unwrap() * &x).norm() <= 1e-6);
    }

    #[test]
    fn base_curvature_is_pinched(seed in any::<u64>(), kind in 0usize..4) {
        let f = KINDS[kind];
        let mut rng = seeded_rng(seed);
        let z = f.random_point(&mut rng);
        let s = split(&f, &z).unwrap();
        let x = s.random_horizontal(&mut rng);
        let y = s.random_horizontal(&mut rng);
        prop_assume!((&y - &x * x.dot(&y)).norm() > 1e-3);
        let y = (&y - &x * x.dot(&y)).normalize();
        let k = oneill_base_curvature(&f, &z, &x, &y).unwrap();
        prop_assert!((1.0 - 1e-6..=4.0 + 1e-6).contains(&k), "{f}: {k}");
        if f.base_is_sphere() {
            prop_assert!((k - 4.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn holonomy_is_an_isometry_of_fibers(seed in any::<u64>(), kind in 0usize..4, t in 0.1f64..3.0) {
        let f = KINDS[kind];
        let mut rng = seeded_rng(seed);
        let gamma = BaseGeodesic::random(f, &mut rng).unwrap();
        let x = gamma.point(0.0);
        let z1 = random_fiber_point(&f, &x, &mut rng).unwrap();
        let z2 = random_fiber_point(&f, &x, &mut rng).unwrap();
        let p1 = holonomy(&f, &gamma, 0.0, t, &z1).unwrap();
        let p2 = holonomy(&f, &gamma, 0.0, t, &z2).unwrap();
        prop_assert!((angle(&p1, &p2) - angle(&z1, &z2)).abs() <= 1e-6);
    }
}
