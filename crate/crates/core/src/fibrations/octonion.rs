//! Octonions as the Cayley–Dickson double of the quaternions, basis `e0..e7` with
//! `e4..e7 = (0, 1), (0, i), (0, j), (0, k)`.

use std::ops::{Add, Mul, Neg, Sub};

/// `e_a e_b = sign · e_c` stored as `(sign, c)`.
pub const MULT_TABLE: [[(i8, u8); 8]; 8] = [
    [(1, 0), (1, 1), (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7)],
    [(1, 1), (-1, 0), (1, 3), (-1, 2), (1, 5), (-1, 4), (-1, 7), (1, 6)],
    [(1, 2), (-1, 3), (-1, 0), (1, 1), (1, 6), (1, 7), (-1, 4), (-1, 5)],
    [(1, 3), (1, 2), (-1, 1), (-1, 0), (1, 7), (-1, 6), (1, 5), (-1, 4)],
    [(1, 4), (-1, 5), (-1, 6), (-1, 7), (-1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 5), (1, 4), (-1, 7), (1, 6), (-1, 1), (-1, 0), (-1, 3), (1, 2)],
    [(1, 6), (1, 7), (1, 4), (-1, 5), (-1, 2), (1, 3), (-1, 0), (-1, 1)],
    [(1, 7), (-1, 6), (1, 5), (1, 4), (-1, 3), (-1, 2), (1, 1), (-1, 0)],
];

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub fn from_slice(s: &[f64]) -> Self {
        let mut c = [0.0; 8];
        c.copy_from_slice(&s[..8]);
        Self(c)
    }

    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 8];
        c[i] = 1.0;
        Self(c)
    }

    pub fn conj(self) -> Self {
        let mut c = self.0;
        c.iter_mut().skip(1).for_each(|x| *x = -*x);
        Self(c)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }
}

impl Add for Octonion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.0;
        c.iter_mut().zip(o.0).for_each(|(a, b)| *a += b);
        Self(c)
    }
}

impl Sub for Octonion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Octonion {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|x| -x))
    }
}

impl Mul for Octonion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [0.0; 8];
        for (a, &x) in self.0.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (b, &y) in o.0.iter().enumerate() {
                let (s, k) = MULT_TABLE[a][b];
                c[k as usize] += f64::from(s) * x * y;
            }
        }
        Self(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{random_unit_vector, seeded_rng};

    // quaternion product (1, i, j, k) from Hamilton's rules
    fn qmul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
        [
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
        ]
    }

    fn qconj(a: [f64; 4]) -> [f64; 4] {
        [a[0], -a[1], -a[2], -a[3]]
    }

    // (a, b)(c, d) = (ac − d̄b, da + bc̄)
    fn doubled(x: &Octonion, y: &Octonion) -> Octonion {
        let q = |s: &[f64]| [s[0], s[1], s[2], s[3]];
        let (a, b) = (q(&x.0[..4]), q(&x.0[4..]));
        let (c, d) = (q(&y.0[..4]), q(&y.0[4..]));
        let l = qmul(a, c);
        let l2 = qmul(qconj(d), b);
        let r = qmul(d, a);
        let r2 = qmul(b, qconj(c));
        let mut out = [0.0; 8];
        for i in 0..4 {
            out[i] = l[i] - l2[i];
            out[4 + i] = r[i] + r2[i];
        }
        Octonion(out)
    }

    fn random(rng: &mut impl rand::Rng) -> Octonion {
        Octonion::from_slice(random_unit_vector(8, rng).as_slice()).scale(1.7)
    }

    #[test]
    fn table_is_the_cayley_dickson_double() {
        for a in 0..8 {
            for b in 0..8 {
                let p = doubled(&Octonion::basis(a), &Octonion::basis(b));
                assert_eq!(p, Octonion::basis(a) * Octonion::basis(b), "e{a} e{b}");
            }
        }
    }

    #[test]
    fn norm_is_multiplicative_and_algebra_is_alternative() {
        let mut rng = seeded_rng(11);
        for _ in 0..200 {
            let (x, y) = (random(&mut rng), random(&mut rng));
            assert!(((x * y).norm() - x.norm() * y.norm()).abs() < 1e-12);
            let l = (x * x) * y - x * (x * y);
            let r = (y * x) * x - y * (x * x);
            assert!(l.norm() < 1e-12 && r.norm() < 1e-12);
            let c = (x * y).conj() - y.conj() * x.conj();
            assert!(c.norm() < 1e-12);
        }
    }

    #[test]
    fn multiplication_is_not_associative() {
        let (a, b, c) = (Octonion::basis(1), Octonion::basis(2), Octonion::basis(4));
        assert!(((a * b) * c - a * (b * c)).norm() > 1.0);
    }
}
