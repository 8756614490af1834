//! Finite subgroups of `O(n+1)` given by generators.
//!
//! A group is stored as its list of matrices (identity first) together with the full
//! multiplication table. Group identity is matrix identity: two words that evaluate to the
//! same matrix (within [`DEDUP_TOL`]) are the same element.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Frobenius distance under which two matrices are the same group element.
pub const DEDUP_TOL: f64 = 1e-8;
/// Default cap on closure size.
pub const DEFAULT_MAX_ORDER: usize = 1024;
/// Orthogonality tolerance for generators.
pub const ORTHO_TOL: f64 = 1e-10;
/// An eigenvalue within this distance of `+1` counts as a fixed direction.
pub const FIXED_POINT_TOL: f64 = 1e-8;

pub type Complex64 = Complex<f64>;

/// A real matrix with `QᵀQ = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix(DMatrix<f64>);

impl OrthogonalMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(invalid("orthogonal matrix must be square"));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        let n = m.nrows();
        let defect = (m.transpose() * &m - DMatrix::identity(n, n)).amax();
        if defect > ORTHO_TOL {
            return Err(invalid(format!("matrix is not orthogonal (defect {defect:.3e})")));
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// Closed finite matrix group with multiplication table.
#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    elements: Vec<DMatrix<f64>>,
    mul_table: Vec<Vec<usize>>,
    generator_indices: Vec<usize>,
    // breadth-first spanning tree: element = parent · generator
    tree: Vec<Option<(usize, usize)>>,
}

fn key(m: &DMatrix<f64>) -> Vec<i64> {
    m.iter().map(|x| (x * 1e6).round() as i64).collect()
}

struct ElementIndex {
    map: HashMap<Vec<i64>, usize>,
}

impl ElementIndex {
    fn find(&self, elements: &[DMatrix<f64>], m: &DMatrix<f64>) -> Option<usize> {
        if let Some(&i) = self.map.get(&key(m)) {
            if (&elements[i] - m).norm() < DEDUP_TOL {
                return Some(i);
            }
        }
        elements.iter().position(|e| (e - m).norm() < DEDUP_TOL)
    }
}

/// Breadth-first closure of `generators` under multiplication.
pub fn close_group(generators: &[OrthogonalMatrix], max_order: usize) -> Result<FiniteMatrixGroup> {
    if max_order == 0 {
        return Err(invalid("max_order must be at least 1"));
    }
    let Some(first) = generators.first() else {
        return Err(invalid("at least one generator is required"));
    };
    let n = first.dim();
    if generators.iter().any(|g| g.dim() != n) {
        return Err(invalid("generators have different sizes"));
    }
    let gens: Vec<&DMatrix<f64>> = generators.iter().map(|g| g.as_matrix()).collect();

    let mut elements = vec![DMatrix::identity(n, n)];
    let mut tree = vec![None];
    let mut index = ElementIndex { map: HashMap::new() };
    index.map.insert(key(&elements[0]), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (gi, g) in gens.iter().enumerate() {
            let prod = &elements[i] * *g;
            if index.find(&elements, &prod).is_none() {
                if elements.len() >= max_order {
                    return Err(Error::GroupTooLarge { limit: max_order });
                }
                index.map.insert(key(&prod), elements.len());
                elements.push(prod);
                tree.push(Some((i, gi)));
                queue.push_back(elements.len() - 1);
            }
        }
    }

    let order = elements.len();
    let mut mul_table = vec![vec![0usize; order]; order];
    for i in 0..order {
        for j in 0..order {
            let prod = &elements[i] * &elements[j];
            mul_table[i][j] = index
                .find(&elements, &prod)
                .ok_or_else(|| Error::GeometryError("product left the closed element set".into()))?;
        }
    }
    let generator_indices = gens
        .iter()
        .map(|g| index.find(&elements, g).expect("generator is an element"))
        .collect();
    Ok(FiniteMatrixGroup {
        elements,
        mul_table,
        generator_indices,
        tree,
    })
}

impl FiniteMatrixGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Size of the matrices.
    pub fn degree(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn elements(&self) -> &[DMatrix<f64>] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &DMatrix<f64> {
        &self.elements[i]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul_table[i][j]
    }

    pub fn mul_table(&self) -> &[Vec<usize>] {
        &self.mul_table
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_indices
    }

    pub fn generators(&self) -> Vec<&DMatrix<f64>> {
        self.generator_indices.iter().map(|&i| &self.elements[i]).collect()
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.mul_table[i]
            .iter()
            .position(|&k| k == 0)
            .expect("every element of a finite group has an inverse")
    }

    /// Generator word (left to right) that evaluates to element `i`.
    pub fn word(&self, mut i: usize) -> Vec<usize> {
        let mut w = Vec::new();
        while let Some((parent, g)) = self.tree[i] {
            w.push(g);
            i = parent;
        }
        w.reverse();
        w
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|i| (0..i).all(|j| self.mul_table[i][j] == self.mul_table[j][i]))
    }

    /// Serializes generators and elements, row-major, at 17 significant digits.
    pub fn to_json(&self) -> String {
        let mat = |m: &DMatrix<f64>| {
            let mut entries = Vec::with_capacity(m.len());
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    entries.push(fmt17(m[(r, c)]));
                }
            }
            format!("[{}]", entries.join(", "))
        };
        let gens: Vec<String> = self.generators().into_iter().map(mat).collect();
        let elems: Vec<String> = self.elements.iter().map(mat).collect();
        format!(
            "{{\n  \"degree\": {},\n  \"order\": {},\n  \"generators\": [\n    {}\n  ],\n  \"elements\": [\n    {}\n  ]\n}}\n",
            self.degree(),
            self.order(),
            gens.join(",\n    "),
            elems.join(",\n    ")
        )
    }

    /// Rebuilds a group from the `generators` of a JSON group file.
    pub fn from_json(text: &str, max_order: usize) -> Result<Self> {
        let file: GroupFile = serde_json::from_str(text).map_err(|e| invalid(format!("bad group file: {e}")))?;
        let n = file.degree;
        let gens = file
            .generators
            .into_iter()
            .map(|entries| {
                if entries.len() != n * n {
                    return Err(invalid("generator has wrong number of entries"));
                }
                OrthogonalMatrix::new(DMatrix::from_row_slice(n, n, &entries))
            })
            .collect::<Result<Vec<_>>>()?;
        close_group(&gens, max_order)
    }
}

#[derive(Deserialize)]
struct GroupFile {
    degree: usize,
    generators: Vec<Vec<f64>>,
}

/// Float formatting used in every report: 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// True iff no non-identity element has `+1` as an eigenvalue.
pub fn is_fixed_point_free(g: &FiniteMatrixGroup) -> bool {
    matrices_fixed_point_free(g.elements().iter().skip(1))
}

pub(crate) fn matrices_fixed_point_free<'a>(mats: impl Iterator<Item = &'a DMatrix<f64>>) -> bool {
    mats.into_iter().all(|m| {
        let n = m.nrows();
        let shifted = m - DMatrix::<f64>::identity(n, n);
        // g is normal, so the singular values of g - I are |λ - 1|
        shifted.singular_values().min() > FIXED_POINT_TOL
    })
}

/// Block-diagonal sum of square matrices.
pub fn block_diag(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((off, off), (k, k)).copy_from(b);
        off += k;
    }
    out
}

pub fn rotation2(angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// `{±I}` acting on `R^{dim+1}`.
pub fn antipodal_group(dim: usize) -> Result<FiniteMatrixGroup> {
    let n = dim + 1;
    close_group(&[OrthogonalMatrix::new(-DMatrix::identity(n, n))?], 2)
}

/// The trivial group acting on `R^{dim+1}`.
pub fn trivial_group(dim: usize) -> Result<FiniteMatrixGroup> {
    close_group(&[OrthogonalMatrix::identity(dim + 1)], 1)
}

/// `Z_n` realized by the rotation through `2π/n` on `R^2`.
pub fn cyclic_group(n: usize) -> Result<FiniteMatrixGroup> {
    if n == 0 {
        return Err(invalid("cyclic group order must be positive"));
    }
    close_group(&[OrthogonalMatrix::new(rotation2(2.0 * PI / n as f64))?], n)
}

/// Left multiplication by `i` on `H = R^4` (basis 1, i, j, k).
pub fn quaternion_left_i() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, -1.0, 0.0, 0.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, -1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
}

/// Left multiplication by `j` on `H = R^4` (basis 1, i, j, k).
pub fn quaternion_left_j() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, -1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, -1.0, 0.0, 0.0,
        ],
    )
}

/// The quaternion group `Q_8` acting on `H` by left multiplication.
pub fn quaternion_group() -> Result<FiniteMatrixGroup> {
    close_group(
        &[
            OrthogonalMatrix::new(quaternion_left_i())?,
            OrthogonalMatrix::new(quaternion_left_j())?,
        ],
        8,
    )
}

/// Replaces each complex entry `a + bi` by the block `[[a, -b], [b, a]]`.
pub fn realify(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

/// Complex vector to `(re_0, im_0, re_1, im_1, ...)`.
pub fn realify_vector(v: &DVector<Complex64>) -> DVector<f64> {
    DVector::from_fn(2 * v.len(), |i, _| {
        let z = v[i / 2];
        if i % 2 == 0 {
            z.re
        } else {
            z.im
        }
    })
}

/// Parameters of the metacyclic "type 1" generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Type1Params {
    pub m: u64,
    pub n_prime: u64,
    pub r: u64,
    pub k: u64,
    pub l: u64,
    pub d: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Multiplicative order of `r` modulo `m`, if `r` is a unit.
pub fn multiplicative_order(r: u64, m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    if m == 1 {
        return Some(1);
    }
    if gcd(r % m, m) != 1 {
        return None;
    }
    let mut x = r % m;
    for t in 1..=m {
        if x == 1 {
            return Some(t);
        }
        x = x * (r % m) % m;
    }
    None
}

impl Type1Params {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n_prime == 0 || self.k == 0 || self.d == 0 {
            return Err(Error::InvalidParams("type-1 parameters must be positive".into()));
        }
        if self.d < 2 {
            return Err(Error::InvalidParams("type-1 generators need d >= 2".into()));
        }
        match multiplicative_order(self.r, self.m) {
            Some(ord) if ord == self.d => Ok(()),
            Some(ord) => Err(Error::InvalidParams(format!(
                "d = {} but the order of {} mod {} is {ord}",
                self.d, self.r, self.m
            ))),
            None => Err(Error::InvalidParams(format!("{} is not a unit mod {}", self.r, self.m))),
        }
    }

    /// Complex `d × d` generators `A` (diagonal) and `B` (shift with a root-of-unity corner).
    pub fn complex_generators(&self) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
        self.validate()?;
        let d = self.d as usize;
        let mut a = DMatrix::<Complex64>::zeros(d, d);
        let mut power = 1u64; // r^j mod m
        for j in 0..d {
            let exponent = (self.k % self.m) * power % self.m;
            a[(j, j)] = Complex64::from_polar(1.0, 2.0 * PI * exponent as f64 / self.m as f64);
            power = power * (self.r % self.m) % self.m;
        }
        let mut b = DMatrix::<Complex64>::zeros(d, d);
        for j in 0..d - 1 {
            b[(j, j + 1)] = Complex64::new(1.0, 0.0);
        }
        b[(d - 1, 0)] = Complex64::from_polar(1.0, 2.0 * PI * (self.l % self.n_prime) as f64 / self.n_prime as f64);
        Ok((a, b))
    }
}

/// Realified type-1 generators in `O(2d)`.
pub fn type1_generators(p: &Type1Params) -> Result<(OrthogonalMatrix, OrthogonalMatrix)> {
    let (a, b) = p.complex_generators()?;
    Ok((OrthogonalMatrix::new(realify(&a))?, OrthogonalMatrix::new(realify(&b))?))
}

/// Outcome of the empirical validity audit of a type-1 parameter set.
#[derive(Clone, Debug)]
pub struct Type1Audit {
    pub group: FiniteMatrixGroup,
    pub fixed_point_free: bool,
}

impl Type1Audit {
    pub fn is_valid(&self) -> bool {
        self.fixed_point_free
    }
}

/// Closes `⟨A, B⟩` and checks freeness of the action.
pub fn audit_type1(p: &Type1Params, max_order: usize) -> Result<Type1Audit> {
    let (a, b) = type1_generators(p)?;
    let group = close_group(&[a, b], max_order)?;
    let fixed_point_free = is_fixed_point_free(&group);
    Ok(Type1Audit {
        group,
        fixed_point_free,
    })
}

/// Vectors `u, v` and words `g_1 = Id, g_2 = A, g_3 = BA, g_4 = ABA, …, g_{d+1} = (BA)^{d/2}`.
#[derive(Clone, Debug)]
pub struct WitnessVectors {
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    pub words: Vec<DMatrix<f64>>,
}

impl WitnessVectors {
    /// Columns `(g_i u, g_i v) / √2` in `R^{4d}`.
    pub fn stacked(&self, count: usize) -> DMatrix<f64> {
        let n = self.u.len();
        let cols: Vec<DVector<f64>> = self
            .words
            .iter()
            .take(count)
            .map(|g| {
                let mut c = DVector::zeros(2 * n);
                c.rows_mut(0, n).copy_from(&(g * &self.u));
                c.rows_mut(n, n).copy_from(&(g * &self.v));
                c / 2f64.sqrt()
            })
            .collect();
        DMatrix::from_columns(&cols)
    }
}

pub fn witness_vectors(p: &Type1Params) -> Result<WitnessVectors> {
    if !p.d.is_multiple_of(2) {
        return Err(Error::InvalidParams("witness construction needs even d".into()));
    }
    let (a, b) = type1_generators(p)?;
    let (a, b) = (a.into_inner(), b.into_inner());
    let n = 2 * p.d as usize;
    let mut u = DVector::zeros(n);
    u[0] = 1.0;
    let mut v = DVector::zeros(n);
    v[2] = 1.0;
    let mut words = vec![DMatrix::identity(n, n)];
    for i in 0..p.d as usize {
        let left = if i % 2 == 0 { &a } else { &b };
        let next = left * words.last().expect("non-empty");
        words.push(next);
    }
    Ok(WitnessVectors { u, v, words })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rank_tol, seeded_rng, DEFAULT_RANK_TOL};
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn z5(k1: usize, k2: usize) -> FiniteMatrixGroup {
        let g = block_diag(&[
            &rotation2(2.0 * PI * k1 as f64 / 5.0),
            &rotation2(2.0 * PI * k2 as f64 / 5.0),
        ]);
        close_group(&[OrthogonalMatrix::new(g).unwrap()], 64).unwrap()
    }

    const TYPE1_24: Type1Params = Type1Params {
        m: 3,
        n_prime: 4,
        r: 2,
        k: 1,
        l: 1,
        d: 2,
    };

    #[test]
    fn minus_identity_has_order_two() {
        let g = antipodal_group(2).unwrap();
        assert_eq!(g.order(), 2);
        assert!(is_fixed_point_free(&g));
    }

    #[test]
    fn double_rotation_has_order_five() {
        assert_eq!(z5(1, 1).order(), 5);
        assert_eq!(z5(1, 2).order(), 5);
    }

    #[test]
    fn reflection_is_not_fixed_point_free() {
        let mut m = DMatrix::identity(3, 3);
        m[(2, 2)] = -1.0;
        let g = close_group(&[OrthogonalMatrix::new(m).unwrap()], 4).unwrap();
        assert_eq!(g.order(), 2);
        assert!(!is_fixed_point_free(&g));
    }

    #[test]
    fn lens_action_is_fixed_point_free() {
        assert!(is_fixed_point_free(&z5(1, 2)));
        assert!(is_fixed_point_free(&z5(1, 1)));
    }

    #[test]
    fn closure_cap_is_enforced() {
        let g = OrthogonalMatrix::new(rotation2(2.0 * PI / 7.0)).unwrap();
        assert_eq!(close_group(&[g], 5).unwrap_err(), Error::GroupTooLarge { limit: 5 });
    }

    #[test]
    fn non_orthogonal_generator_is_rejected() {
        assert!(OrthogonalMatrix::new(DMatrix::from_element(2, 2, 1.0)).is_err());
    }

    #[test]
    fn quaternion_group_is_nonabelian_order_eight() {
        let q = quaternion_group().unwrap();
        assert_eq!(q.order(), 8);
        assert!(!q.is_abelian());
        assert!(is_fixed_point_free(&q));
    }

    #[test]
    fn multiplication_table_is_a_latin_square() {
        let q = quaternion_group().unwrap();
        for row in q.mul_table() {
            let mut seen = row.clone();
            seen.sort_unstable();
            assert_eq!(seen, (0..q.order()).collect::<Vec<_>>());
        }
        assert_eq!(q.mul(0, 3), 3);
        for i in 0..q.order() {
            assert_eq!(q.mul(i, q.inverse(i)), 0);
        }
    }

    #[test]
    fn table_is_associative_on_sampled_triples() {
        let audit = audit_type1(&TYPE1_24, 256).unwrap();
        let g = &audit.group;
        let mut rng = seeded_rng(3);
        for _ in 0..500 {
            let (a, b, c) = (
                rng.gen_range(0..g.order()),
                rng.gen_range(0..g.order()),
                rng.gen_range(0..g.order()),
            );
            assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
        }
    }

    #[test]
    fn words_evaluate_to_their_elements() {
        let g = quaternion_group().unwrap();
        let gens = g.generators();
        for i in 0..g.order() {
            let mut m = DMatrix::identity(4, 4);
            for &w in &g.word(i) {
                m *= gens[w];
            }
            assert!((m - g.element(i)).norm() < 1e-12);
        }
    }

    #[test]
    fn type1_a_is_block_diagonal_and_orthogonal() {
        let (a, b) = type1_generators(&TYPE1_24).unwrap();
        let a = a.into_inner();
        for i in 0..4 {
            for j in 0..4 {
                if i / 2 != j / 2 {
                    assert_eq!(a[(i, j)], 0.0);
                }
            }
        }
        assert!((b.as_matrix().transpose() * b.as_matrix() - DMatrix::identity(4, 4)).amax() < 1e-14);
    }

    #[test]
    fn b_to_the_d_is_scalar_root_of_unity() {
        for p in [
            TYPE1_24,
            Type1Params {
                m: 5,
                n_prime: 2,
                r: 2,
                k: 1,
                l: 1,
                d: 4,
            },
        ] {
            let (_, b) = p.complex_generators().unwrap();
            let mut bd = DMatrix::<Complex64>::identity(p.d as usize, p.d as usize);
            for _ in 0..p.d {
                bd *= &b;
            }
            let w = Complex64::from_polar(1.0, 2.0 * PI * p.l as f64 / p.n_prime as f64);
            for i in 0..p.d as usize {
                for j in 0..p.d as usize {
                    let expect = if i == j { w } else { Complex64::new(0.0, 0.0) };
                    assert!((bd[(i, j)] - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn type1_rejects_wrong_d() {
        let bad = Type1Params { d: 3, ..TYPE1_24 };
        assert!(matches!(type1_generators(&bad), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn valid_type1_sets_pass_the_audit() {
        for (p, order) in [
            (TYPE1_24, 24),
            (
                Type1Params {
                    m: 5,
                    n_prime: 2,
                    r: 4,
                    k: 1,
                    l: 1,
                    d: 2,
                },
                20,
            ),
            (
                Type1Params {
                    m: 5,
                    n_prime: 2,
                    r: 2,
                    k: 1,
                    l: 1,
                    d: 4,
                },
                40,
            ),
        ] {
            let audit = audit_type1(&p, 512).unwrap();
            assert_eq!(audit.group.order(), order, "{p:?}");
            assert!(audit.is_valid(), "{p:?}");
            assert!(!audit.group.is_abelian());
        }
    }

    #[test]
    fn type1_order_survives_reclosing_from_random_words() {
        let audit = audit_type1(&TYPE1_24, 256).unwrap();
        let g = &audit.group;
        let mut rng = seeded_rng(17);
        // a random pair of elements that still generates: reclose and compare orders
        let mut best = 0;
        for _ in 0..20 {
            let a = g.element(rng.gen_range(0..g.order())).clone();
            let b = g.element(rng.gen_range(0..g.order())).clone();
            let h = close_group(
                &[OrthogonalMatrix::new(a).unwrap(), OrthogonalMatrix::new(b).unwrap()],
                256,
            )
            .unwrap();
            assert_eq!(g.order() % h.order(), 0);
            best = best.max(h.order());
        }
        assert_eq!(best, g.order());
    }

    #[test]
    fn realification_is_multiplicative() {
        let mut rng = seeded_rng(5);
        let mut rand_c = |r: usize, c: usize| {
            DMatrix::from_fn(r, c, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
        };
        for _ in 0..10 {
            let x = rand_c(3, 3);
            let y = rand_c(3, 3);
            assert!((realify(&(&x * &y)) - realify(&x) * realify(&y)).amax() < 1e-10);
        }
    }

    #[test]
    fn witness_vectors_are_independent() {
        let w = witness_vectors(&TYPE1_24).unwrap();
        assert_abs_diff_eq!((&w.words[0] * &w.u - &w.u).norm(), 0.0);
        let d = TYPE1_24.d as usize;
        assert_eq!(rank_tol(&w.stacked(d + 1), DEFAULT_RANK_TOL).unwrap(), d + 1);
        assert_eq!(rank_tol(&w.stacked(d), DEFAULT_RANK_TOL).unwrap(), d);

        let p4 = Type1Params {
            m: 5,
            n_prime: 2,
            r: 2,
            k: 1,
            l: 1,
            d: 4,
        };
        let w = witness_vectors(&p4).unwrap();
        assert_eq!(rank_tol(&w.stacked(5), DEFAULT_RANK_TOL).unwrap(), 5);
        assert_eq!(rank_tol(&w.stacked(4), DEFAULT_RANK_TOL).unwrap(), 4);
    }

    #[test]
    fn witness_vectors_need_even_d() {
        let odd = Type1Params {
            m: 7,
            n_prime: 3,
            r: 2,
            k: 1,
            l: 1,
            d: 3,
        };
        assert!(matches!(witness_vectors(&odd), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn json_round_trip_preserves_the_group() {
        let g = quaternion_group().unwrap();
        let text = g.to_json();
        assert!(text.contains("\"order\": 8"));
        let h = FiniteMatrixGroup::from_json(&text, 64).unwrap();
        assert_eq!(h.order(), 8);
        for e in h.elements() {
            assert!(g.elements().iter().any(|f| (e - f).norm() < 1e-14));
        }
    }

    #[test]
    fn fmt17_has_seventeen_significant_digits() {
        assert_eq!(fmt17(PI), "3.1415926535897931e0");
        assert_eq!(fmt17(-0.25), "-2.5000000000000000e-1");
    }
}
