//! Orthogonal representations of finite matrix groups: decomposition into irreducible
//! invariant subspaces and equivalence testing, both by group averaging.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::groups::{matrices_fixed_point_free, FiniteMatrixGroup};
use crate::numerics::{rank_tol, DEFAULT_RANK_TOL};

/// Homomorphism tolerance checked on every table entry.
pub const HOM_TOL: f64 = 1e-9;
/// Symmetric averages this close to scalar count as scalar.
pub const SCALAR_TOL: f64 = 1e-8;
/// Consecutive scalar averages required before a block is declared irreducible.
pub const IRREDUCIBILITY_TRIALS: usize = 32;
/// Attempts with ambiguous eigenvalue spacing before giving up.
pub const SPLIT_ATTEMPTS: usize = 8;
/// Random intertwiner averages tried by [`are_equivalent`].
pub const EQUIVALENCE_TRIALS: usize = 16;

// eigenvalue gaps (relative to ‖M‖) below SAME_GAP merge, above SPLIT_GAP separate
const SAME_GAP: f64 = 1e-9;
const SPLIT_GAP: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Representation {
    group: Arc<FiniteMatrixGroup>,
    matrices: Vec<DMatrix<f64>>,
}

impl Representation {
    /// The group acting by its own matrices.
    pub fn defining(group: Arc<FiniteMatrixGroup>) -> Self {
        let matrices = group.elements().to_vec();
        Self { group, matrices }
    }

    /// Degree-`degree` trivial representation.
    pub fn trivial(group: Arc<FiniteMatrixGroup>, degree: usize) -> Self {
        let matrices = vec![DMatrix::identity(degree, degree); group.order()];
        Self { group, matrices }
    }

    /// Extends images of the group's generators along generator words, then checks that the
    /// result is an orthogonal homomorphism.
    pub fn from_generator_images(group: Arc<FiniteMatrixGroup>, images: Vec<DMatrix<f64>>) -> Result<Self> {
        if images.len() != group.generator_indices().len() {
            return Err(invalid("one image per generator is required"));
        }
        let deg = images[0].nrows();
        if images.iter().any(|m| m.shape() != (deg, deg)) {
            return Err(invalid("generator images must be square of equal size"));
        }
        let matrices = (0..group.order())
            .map(|i| {
                group
                    .word(i)
                    .iter()
                    .fold(DMatrix::identity(deg, deg), |acc, &g| acc * &images[g])
            })
            .collect();
        let rep = Self { group, matrices };
        rep.validate()?;
        Ok(rep)
    }

    fn validate(&self) -> Result<()> {
        let g = &self.group;
        let deg = self.degree();
        if (&self.matrices[0] - DMatrix::<f64>::identity(deg, deg)).amax() > HOM_TOL {
            return Err(invalid("identity is not represented by I"));
        }
        for m in &self.matrices {
            if (m.transpose() * m - DMatrix::<f64>::identity(deg, deg)).amax() > HOM_TOL {
                return Err(invalid("representation matrix is not orthogonal"));
            }
        }
        for i in 0..g.order() {
            for j in 0..g.order() {
                let lhs = &self.matrices[g.mul(i, j)];
                let rhs = &self.matrices[i] * &self.matrices[j];
                if (lhs - rhs).amax() > HOM_TOL {
                    return Err(invalid(format!("not a homomorphism at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteMatrixGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    pub fn matrix(&self, element: usize) -> &DMatrix<f64> {
        &self.matrices[element]
    }

    pub fn generator_matrices(&self) -> Vec<&DMatrix<f64>> {
        self.group
            .generator_indices()
            .iter()
            .map(|&i| &self.matrices[i])
            .collect()
    }

    pub fn same_group(&self, other: &Representation) -> bool {
        Arc::ptr_eq(&self.group, &other.group)
    }

    /// No non-identity element has a fixed direction.
    pub fn is_fixed_point_free(&self) -> bool {
        matrices_fixed_point_free(self.matrices.iter().skip(1))
    }

    /// Images `ρ(g) x` for every element, in element order.
    pub fn orbit(&self, x: &DVector<f64>) -> Vec<DVector<f64>> {
        self.matrices.iter().map(|m| m * x).collect()
    }

    /// The orbit as the columns of a `degree × |Γ|` matrix.
    pub fn orbit_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_columns(&self.orbit(x))
    }

    /// Restriction to the span of the orthonormal columns of `basis`.
    pub fn restrict(&self, basis: &DMatrix<f64>) -> Result<Representation> {
        if basis.nrows() != self.degree() {
            return Err(invalid("basis has the wrong ambient dimension"));
        }
        let k = basis.ncols();
        if (basis.transpose() * basis - DMatrix::<f64>::identity(k, k)).amax() > 1e-10 {
            return Err(invalid("basis is not orthonormal"));
        }
        if invariance_defect(self, basis) > 1e-8 {
            return Err(invalid("subspace is not invariant"));
        }
        let matrices = self.matrices.iter().map(|m| basis.transpose() * m * basis).collect();
        Ok(Self {
            group: Arc::clone(&self.group),
            matrices,
        })
    }
}

/// Block-diagonal sum `a ⊕ b`.
pub fn direct_sum(a: &Representation, b: &Representation) -> Result<Representation> {
    if !a.same_group(b) {
        return Err(invalid("direct sum needs representations of the same group"));
    }
    let (da, db) = (a.degree(), b.degree());
    let matrices = a
        .matrices
        .iter()
        .zip(&b.matrices)
        .map(|(x, y)| {
            let mut m = DMatrix::zeros(da + db, da + db);
            m.view_mut((0, 0), (da, da)).copy_from(x);
            m.view_mut((da, da), (db, db)).copy_from(y);
            m
        })
        .collect();
    Ok(Representation {
        group: Arc::clone(&a.group),
        matrices,
    })
}

/// An invariant subspace given by orthonormal columns in the representation space.
#[derive(Clone, Debug)]
pub struct InvariantSubspace {
    pub basis: DMatrix<f64>,
    pub irreducible: bool,
}

impl InvariantSubspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }
}

/// `max_g ‖(I − BBᵀ) ρ(g) B‖`.
pub fn invariance_defect(rep: &Representation, basis: &DMatrix<f64>) -> f64 {
    let proj = basis * basis.transpose();
    rep.matrices
        .iter()
        .map(|m| {
            let image = m * basis;
            (&image - &proj * &image).amax()
        })
        .fold(0.0, f64::max)
}

fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// `(1/|Γ|) Σ_g ρ_b(g) M ρ_a(g)ᵀ`, summed in element order.
fn average(a: &[DMatrix<f64>], b: &[DMatrix<f64>], m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut acc = DMatrix::zeros(m.nrows(), m.ncols());
    for (ga, gb) in a.iter().zip(b) {
        acc += gb * m * ga.transpose();
    }
    acc / a.len() as f64
}

/// Splits the representation space into irreducible invariant subspaces.
pub fn decompose<R: Rng + ?Sized>(rep: &Representation, rng: &mut R) -> Result<Vec<InvariantSubspace>> {
    let n = rep.degree();
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    let mut stack = vec![DMatrix::<f64>::identity(n, n)];
    while let Some(basis) = stack.pop() {
        match split_once(rep, &basis, rng)? {
            None => out.push(InvariantSubspace {
                basis,
                irreducible: true,
            }),
            Some(parts) => {
                // reversed so blocks come out in eigenvalue order
                stack.extend(parts.into_iter().rev());
            }
        }
    }
    Ok(out)
}

// None when the block is irreducible; otherwise its eigenspace splitting.
fn split_once<R: Rng + ?Sized>(
    rep: &Representation,
    basis: &DMatrix<f64>,
    rng: &mut R,
) -> Result<Option<Vec<DMatrix<f64>>>> {
    let k = basis.ncols();
    if k == 1 {
        return Ok(None);
    }
    let local: Vec<DMatrix<f64>> = rep.matrices.iter().map(|m| basis.transpose() * m * basis).collect();
    let mut scalar_hits = 0;
    let mut ambiguous = 0;
    loop {
        let g = random_matrix(k, k, rng);
        let sym = (&g + g.transpose()) * 0.5;
        let scale = sym.norm();
        let s = average(&local, &local, &sym);
        let s = (&s + s.transpose()) * 0.5;
        let mean = s.trace() / k as f64;
        let off_scalar = (&s - DMatrix::<f64>::identity(k, k) * mean).norm();
        if off_scalar <= SCALAR_TOL * scale {
            scalar_hits += 1;
            if scalar_hits >= IRREDUCIBILITY_TRIALS {
                return Ok(None);
            }
            continue;
        }
        let eig = s.clone().symmetric_eigen();
        // the implicit QR iteration occasionally returns wrong vectors on degenerate spectra
        let residual = (&s * &eig.eigenvectors - &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues)).amax();
        if residual > 1e-10 * scale {
            ambiguous += 1;
            if ambiguous >= SPLIT_ATTEMPTS {
                return Err(Error::DecompositionUnstable { attempts: ambiguous });
            }
            continue;
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let mut clusters: Vec<Vec<usize>> = vec![vec![order[0]]];
        let mut unstable = false;
        for w in order.windows(2) {
            let gap = (eig.eigenvalues[w[1]] - eig.eigenvalues[w[0]]) / scale;
            if gap <= SAME_GAP {
                clusters.last_mut().expect("non-empty").push(w[1]);
            } else if gap < SPLIT_GAP {
                unstable = true;
                break;
            } else {
                clusters.push(vec![w[1]]);
            }
        }
        if unstable {
            ambiguous += 1;
            if ambiguous >= SPLIT_ATTEMPTS {
                return Err(Error::DecompositionUnstable { attempts: ambiguous });
            }
            continue;
        }
        let parts = clusters
            .into_iter()
            .map(|idx| {
                let cols: Vec<DVector<f64>> = idx.iter().map(|&i| basis * eig.eigenvectors.column(i)).collect();
                reorthonormalize(DMatrix::from_columns(&cols))
            })
            .collect();
        return Ok(Some(parts));
    }
}

fn reorthonormalize(m: DMatrix<f64>) -> DMatrix<f64> {
    let k = m.ncols();
    let q = m.qr().q();
    q.columns(0, k).into_owned()
}

/// True iff some averaged intertwiner `T: a → b` is invertible and passes the
/// intertwining residual check on the generators.
pub fn are_equivalent<R: Rng + ?Sized>(a: &Representation, b: &Representation, rng: &mut R) -> bool {
    if !a.same_group(b) || a.degree() != b.degree() {
        return false;
    }
    let n = a.degree();
    if n == 0 {
        return true;
    }
    for _ in 0..EQUIVALENCE_TRIALS {
        let m = random_matrix(n, n, rng);
        let t = average(&a.matrices, &b.matrices, &m);
        let tn = t.norm();
        if tn <= 1e-6 * m.norm() {
            continue;
        }
        if rank_tol(&t, DEFAULT_RANK_TOL).unwrap_or(0) < n {
            continue;
        }
        let residual = a
            .group
            .generator_indices()
            .iter()
            .map(|&g| (&t * &a.matrices[g] - &b.matrices[g] * &t).amax())
            .fold(0.0, f64::max);
        if residual <= 1e-8 * tn.max(1.0) {
            return true;
        }
    }
    false
}

/// Irreducible summands grouped into equivalence classes.
#[derive(Clone, Debug)]
pub struct MultiplicityProfile {
    pub blocks: Vec<InvariantSubspace>,
    /// Class id of every block, in block order.
    pub block_class: Vec<usize>,
    /// `(class id, multiplicity, block dimension)` per class.
    pub classes: Vec<(usize, usize, usize)>,
}

impl MultiplicityProfile {
    pub fn has_repeated_class(&self) -> bool {
        self.classes.iter().any(|&(_, mult, _)| mult >= 2)
    }

    /// All irreducible blocks share one dimension (expected for free actions).
    pub fn equal_block_dimensions(&self) -> bool {
        self.blocks.windows(2).all(|w| w[0].dim() == w[1].dim())
    }
}

pub fn multiplicity_profile<R: Rng + ?Sized>(rep: &Representation, rng: &mut R) -> Result<MultiplicityProfile> {
    let blocks = decompose(rep, rng)?;
    let restricted = blocks
        .iter()
        .map(|b| rep.restrict(&b.basis))
        .collect::<Result<Vec<_>>>()?;
    let mut reps_of_class: Vec<usize> = Vec::new();
    let mut block_class = Vec::with_capacity(blocks.len());
    for (i, r) in restricted.iter().enumerate() {
        let found = reps_of_class
            .iter()
            .position(|&j| are_equivalent(&restricted[j], r, rng));
        match found {
            Some(c) => block_class.push(c),
            None => {
                reps_of_class.push(i);
                block_class.push(reps_of_class.len() - 1);
            }
        }
    }
    let classes = reps_of_class
        .iter()
        .enumerate()
        .map(|(c, &first)| {
            let mult = block_class.iter().filter(|&&x| x == c).count();
            (c, mult, blocks[first].dim())
        })
        .collect();
    Ok(MultiplicityProfile {
        blocks,
        block_class,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{cyclic_group, quaternion_group, rotation2, trivial_group};
    use crate::numerics::seeded_rng;
    use std::f64::consts::PI;

    fn z5_rep(k: usize) -> (Arc<FiniteMatrixGroup>, Representation) {
        let g = Arc::new(cyclic_group(5).unwrap());
        let r =
            Representation::from_generator_images(Arc::clone(&g), vec![rotation2(2.0 * PI * k as f64 / 5.0)]).unwrap();
        (g, r)
    }

    fn check_decomposition(rep: &Representation, blocks: &[InvariantSubspace]) {
        let n = rep.degree();
        assert_eq!(blocks.iter().map(|b| b.dim()).sum::<usize>(), n);
        let total = blocks.iter().fold(DMatrix::zeros(n, n), |acc, b| acc + b.projector());
        assert!((total - DMatrix::<f64>::identity(n, n)).amax() < 1e-8);
        for b in blocks {
            assert!(invariance_defect(rep, &b.basis) < 1e-8);
            assert!(b.irreducible);
        }
    }

    #[test]
    fn trivial_group_splits_into_lines() {
        let g = Arc::new(trivial_group(1).unwrap());
        let rep = Representation::defining(g);
        let blocks = decompose(&rep, &mut seeded_rng(1)).unwrap();
        assert_eq!(blocks.len(), 2);
        check_decomposition(&rep, &blocks);
    }

    #[test]
    fn lens_representation_splits_into_two_planes() {
        let (g, r1) = z5_rep(1);
        let r2 = Representation::from_generator_images(g, vec![rotation2(4.0 * PI / 5.0)]).unwrap();
        let rep = direct_sum(&r1, &r2).unwrap();
        assert_eq!(rep.degree(), 4);
        let blocks = decompose(&rep, &mut seeded_rng(2)).unwrap();
        assert_eq!(blocks.iter().map(|b| b.dim()).collect::<Vec<_>>(), vec![2, 2]);
        check_decomposition(&rep, &blocks);
    }

    #[test]
    fn quaternion_irrep_is_a_single_block() {
        let rep = Representation::defining(Arc::new(quaternion_group().unwrap()));
        let blocks = decompose(&rep, &mut seeded_rng(3)).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].dim(), 4);
        // commutant audit: quaternionic type, so the full commutant is 4-dimensional but its
        // symmetric part is only the scalars
        let mut rng = seeded_rng(4);
        let m = random_matrix(4, 4, &mut rng);
        let t = average(rep.matrices(), rep.matrices(), &m);
        let sym = (&t + t.transpose()) * 0.5;
        assert!((&sym - DMatrix::<f64>::identity(4, 4) * (sym.trace() / 4.0)).amax() < 1e-12);
    }

    #[test]
    fn rotations_by_different_angles_are_inequivalent() {
        let (g, r1) = z5_rep(1);
        let r2 = Representation::from_generator_images(Arc::clone(&g), vec![rotation2(4.0 * PI / 5.0)]).unwrap();
        // character oracle: traces of the generator differ
        let gen = g.generator_indices()[0];
        assert!((r1.matrix(gen).trace() - r2.matrix(gen).trace()).abs() > 1.0);
        let mut rng = seeded_rng(5);
        assert!(!are_equivalent(&r1, &r2, &mut rng));
        assert!(are_equivalent(&r1, &r1, &mut rng));
        assert!(are_equivalent(&r2, &r2, &mut rng));
    }

    #[test]
    fn rotation_is_equivalent_to_its_inverse_over_the_reals() {
        // r1 and r4 = r1 conjugated by a reflection
        let (g, r1) = z5_rep(1);
        let r4 = Representation::from_generator_images(g, vec![rotation2(8.0 * PI / 5.0)]).unwrap();
        assert!(are_equivalent(&r1, &r4, &mut seeded_rng(6)));
    }

    #[test]
    fn degree_mismatch_is_inequivalent() {
        let (g, r1) = z5_rep(1);
        let t = Representation::trivial(g, 1);
        assert!(!are_equivalent(&r1, &t, &mut seeded_rng(7)));
    }

    #[test]
    fn direct_sum_with_degree_zero_is_identity() {
        let (g, r1) = z5_rep(1);
        let z = Representation::trivial(g, 0);
        let s = direct_sum(&r1, &z).unwrap();
        assert_eq!(s.degree(), 2);
        for (a, b) in s.matrices().iter().zip(r1.matrices()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn direct_sum_needs_one_group() {
        let (_, r1) = z5_rep(1);
        let (_, other) = z5_rep(1);
        assert!(matches!(direct_sum(&r1, &other), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn doubled_representation_has_equivalent_blocks() {
        let (_, r1) = z5_rep(1);
        let rep = direct_sum(&r1, &r1).unwrap();
        let mut rng = seeded_rng(8);
        let blocks = decompose(&rep, &mut rng).unwrap();
        assert!(blocks.len() >= 2);
        check_decomposition(&rep, &blocks);
        let a = rep.restrict(&blocks[0].basis).unwrap();
        let b = rep.restrict(&blocks[1].basis).unwrap();
        assert!(are_equivalent(&a, &b, &mut rng));
    }

    #[test]
    fn multiplicity_profiles() {
        let (g, r1) = z5_rep(1);
        let r2 = Representation::from_generator_images(g, vec![rotation2(4.0 * PI / 5.0)]).unwrap();
        let mut rng = seeded_rng(9);

        let doubled = multiplicity_profile(&direct_sum(&r1, &r1).unwrap(), &mut rng).unwrap();
        assert_eq!(doubled.classes.iter().map(|c| c.1).collect::<Vec<_>>(), vec![2]);

        let lens = multiplicity_profile(&direct_sum(&r1, &r2).unwrap(), &mut rng).unwrap();
        assert_eq!(lens.classes.iter().map(|c| c.1).collect::<Vec<_>>(), vec![1, 1]);
        assert!(lens.equal_block_dimensions());

        let q = Representation::defining(Arc::new(quaternion_group().unwrap()));
        let qq = multiplicity_profile(&direct_sum(&q, &q).unwrap(), &mut rng).unwrap();
        assert_eq!(qq.classes.len(), 1);
        assert_eq!(qq.classes[0].1, 2);
        assert_eq!(qq.classes[0].2, 4);
    }

    #[test]
    fn equivalence_is_an_equivalence_relation_on_blocks() {
        let (g, r1) = z5_rep(1);
        let r2 = Representation::from_generator_images(g, vec![rotation2(4.0 * PI / 5.0)]).unwrap();
        let big = direct_sum(&direct_sum(&r1, &r2).unwrap(), &r1).unwrap();
        let mut rng = seeded_rng(10);
        let blocks: Vec<Representation> = decompose(&big, &mut rng)
            .unwrap()
            .iter()
            .map(|b| big.restrict(&b.basis).unwrap())
            .collect();
        assert_eq!(blocks.len(), 3);
        let eq: Vec<Vec<bool>> = blocks
            .iter()
            .map(|a| blocks.iter().map(|b| are_equivalent(a, b, &mut rng)).collect())
            .collect();
        for i in 0..3 {
            assert!(eq[i][i]);
            for j in 0..3 {
                assert_eq!(eq[i][j], eq[j][i]);
                for k in 0..3 {
                    if eq[i][j] && eq[j][k] {
                        assert!(eq[i][k]);
                    }
                }
            }
        }
        assert_eq!(eq.iter().flatten().filter(|&&x| x).count(), 5);
    }

    #[test]
    fn non_homomorphism_is_rejected() {
        let g = Arc::new(cyclic_group(5).unwrap());
        // a rotation of order 7 cannot represent Z5
        let bad = Representation::from_generator_images(g, vec![rotation2(2.0 * PI / 7.0)]);
        assert!(bad.is_err());
    }

    #[test]
    fn restriction_requires_invariance() {
        let (g, r1) = z5_rep(1);
        let r2 = Representation::from_generator_images(g, vec![rotation2(4.0 * PI / 5.0)]).unwrap();
        let rep = direct_sum(&r1, &r2).unwrap();
        let mut b = DMatrix::zeros(4, 2);
        b[(0, 0)] = 1.0;
        b[(2, 1)] = 1.0;
        assert!(rep.restrict(&b).is_err());
    }

    #[test]
    fn doubled_quaternion_blocks_are_invariant_for_many_seeds() {
        let q = Representation::defining(Arc::new(quaternion_group().unwrap()));
        let qq = direct_sum(&q, &q).unwrap();
        for seed in 0..400 {
            let blocks = decompose(&qq, &mut seeded_rng(seed)).unwrap();
            assert_eq!(blocks.len(), 2, "seed {seed}");
            check_decomposition(&qq, &blocks);
        }
    }
}
