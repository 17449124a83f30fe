//! Matrix realizations of real semisimple Lie algebras, restricted-root
//! decompositions, parabolic gradings and the ray geometries they carry.
//!
//! Complex and quaternionic forms are realified: each complex entry becomes
//! a 2x2 real block, so a single scalar domain (exact rationals) covers the
//! whole catalog. Restricted roots are obtained as simultaneous rational
//! eigenvalue functionals of `ad(H)` over the split Cartan, the positive
//! system is fixed by lexicographic order on Cartan coordinates, and a
//! subset `Sigma` of simple roots selects the parabolic grading: the grade
//! of a root is the sum of its coefficients over the simple roots *not* in
//! `Sigma` (so `Sigma = {}` is the Borel case and `Sigma` spans the Levi).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::lie::GradedNilpotentAlgebra;
use crate::linalg::{self, minimal_polynomial, poly_deflate, poly_eval, Matrix, Subspace, Vector};
use crate::nilaffine::RayGeometry;
use crate::report::{Check, Report};
use crate::scalar::{Scalar, ScalarMode};
use crate::{Error, Result};

const EXACT: ScalarMode = ScalarMode::Exact;

/// Inline description of a matrix Lie algebra: a list of square rational
/// matrices closed under the commutator, plus the indices (1-based) of a
/// maximal split abelian subfamily.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixAlgebraSpec {
    pub matrix_size: usize,
    pub basis: Vec<Vec<Vec<Scalar>>>,
    pub cartan: Vec<usize>,
}

/// A real semisimple Lie algebra presented by matrices.
#[derive(Debug)]
pub struct MatrixLieAlgebra {
    name: String,
    matrix_size: usize,
    basis: Vec<Matrix>,
    split_cartan: Vec<usize>,
    /// ad matrices in basis coordinates, one per basis element.
    ad: Vec<Matrix>,
    /// Killing form Gram matrix `B(b_i, b_j) = tr(ad_i ad_j)`.
    killing: Matrix,
    /// Rows of the flattened basis matrix that pin coordinates uniquely.
    pivot_rows: Vec<usize>,
    /// Inverse of the pivot-row square system, for fast `express`.
    pivot_inverse: Matrix,
}

impl MatrixLieAlgebra {
    /// Build from explicit matrices, verifying closure and the Cartan
    /// conditions.
    pub fn new(name: impl Into<String>, basis: Vec<Matrix>, split_cartan: Vec<usize>) -> Result<Self> {
        let name = name.into();
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::InvalidInput("empty basis".into()));
        }
        let m = basis[0].rows;
        for b in &basis {
            if b.rows != m || b.cols != m {
                return Err(Error::DimensionMismatch { expected: m, got: b.rows });
            }
        }
        for &c in &split_cartan {
            if c >= dim {
                return Err(Error::BadCartan(format!("cartan index {c} out of range")));
            }
        }

        // Independent pivot rows of the flattened basis, for coordinates.
        let flat = Matrix::from_fn(m * m, dim, |r, j| basis[j].flatten()[r].clone());
        let mut probe = flat.transpose();
        let pivot_rows = {
            let piv = probe.rref();
            if piv.len() != dim {
                return Err(Error::InvalidInput("basis matrices are linearly dependent".into()));
            }
            piv
        };
        let square = Matrix::from_fn(dim, dim, |r, j| flat[(pivot_rows[r], j)].clone());
        let pivot_inverse = square.inverse().map_err(|_| {
            Error::InvalidInput("basis matrices are linearly dependent".into())
        })?;

        let mut alg = MatrixLieAlgebra {
            name,
            matrix_size: m,
            basis,
            split_cartan,
            ad: Vec::new(),
            killing: Matrix::zeros(dim, dim, EXACT),
            pivot_rows,
            pivot_inverse,
        };

        // Closure check and ad matrices in one pass.
        let mut ad = vec![Matrix::zeros(dim, dim, EXACT); dim];
        for i in 0..dim {
            for j in 0..dim {
                if i == j {
                    continue;
                }
                let comm = alg.basis[i].commutator(&alg.basis[j]);
                let coords = alg
                    .express_matrix(&comm)
                    .ok_or(Error::NotClosed { i: i + 1, j: j + 1 })?;
                for k in 0..dim {
                    ad[i][(k, j)] = coords[k].clone();
                }
            }
        }
        alg.ad = ad;

        // Split Cartan: pairwise commuting, exactly.
        for (a, &ca) in alg.split_cartan.iter().enumerate() {
            for &cb in alg.split_cartan.iter().skip(a + 1) {
                if !alg.basis[ca].commutator(&alg.basis[cb]).is_zero(0.0) {
                    return Err(Error::BadCartan(format!(
                        "cartan elements {ca} and {cb} do not commute"
                    )));
                }
            }
        }

        alg.killing = Matrix::from_fn(dim, dim, |i, j| {
            let mut acc = Scalar::zero(EXACT);
            for p in 0..dim {
                for q in 0..dim {
                    if !alg.ad[i][(p, q)].is_zero() && !alg.ad[j][(q, p)].is_zero() {
                        acc = &acc + &(&alg.ad[i][(p, q)] * &alg.ad[j][(q, p)]);
                    }
                }
            }
            acc
        });

        Ok(alg)
    }

    pub fn from_spec(name: impl Into<String>, spec: &MatrixAlgebraSpec) -> Result<Self> {
        let basis: Vec<Matrix> = spec
            .basis
            .iter()
            .map(|rows| {
                Matrix::from_rows(
                    rows.iter()
                        .map(|r| r.iter().map(|s| s.clone().into_mode(EXACT)).collect())
                        .collect(),
                )
            })
            .collect();
        for b in &basis {
            if b.rows != spec.matrix_size || b.cols != spec.matrix_size {
                return Err(Error::DimensionMismatch { expected: spec.matrix_size, got: b.rows });
            }
        }
        let cartan = spec
            .cartan
            .iter()
            .map(|&c| {
                if c == 0 || c > basis.len() {
                    Err(Error::BadCartan(format!("cartan index {c} out of range")))
                } else {
                    Ok(c - 1)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, basis, cartan)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn split_cartan(&self) -> &[usize] {
        &self.split_cartan
    }

    pub fn real_rank(&self) -> usize {
        self.split_cartan.len()
    }

    pub fn killing(&self) -> &Matrix {
        &self.killing
    }

    /// The matrix represented by a coordinate vector.
    pub fn matrix_of(&self, coords: &[Scalar]) -> Matrix {
        let mut out = Matrix::zeros(self.matrix_size, self.matrix_size, EXACT);
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                out = out.add(&b.scale(c));
            }
        }
        out
    }

    /// Coordinates of a matrix in the basis, or `None` if it lies outside
    /// the span.
    pub fn express_matrix(&self, mat: &Matrix) -> Option<Vector> {
        let flat = mat.flatten();
        let rhs: Vector = self.pivot_rows.iter().map(|&r| flat[r].clone()).collect();
        let coords = self.pivot_inverse.apply(&rhs);
        // Verify: candidate coordinates must reproduce the matrix exactly.
        if self.matrix_of(&coords) == *mat {
            Some(coords)
        } else {
            None
        }
    }

    /// `ad` of an arbitrary element, in basis coordinates.
    pub fn ad_of(&self, coords: &[Scalar]) -> Matrix {
        let dim = self.dim();
        let mut out = Matrix::zeros(dim, dim, EXACT);
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.ad[i].scale(c));
            }
        }
        out
    }

    /// Killing form of two coordinate vectors.
    pub fn killing_form(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        linalg::dot(x, &self.killing.apply(y))
    }

    /// Bracket in coordinates.
    pub fn bracket_coords(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        self.ad_of(x).apply(y)
    }

    /// The compact-fixed subspace of the Cartan involution `X -> -X^T`,
    /// i.e. the antisymmetric part of the algebra.
    pub fn theta_fixed(&self) -> Subspace {
        let dim = self.dim();
        let m = self.matrix_size;
        let mut rows = Vec::new();
        for p in 0..m {
            for q in p..m {
                let row: Vector = (0..dim)
                    .map(|i| &self.basis[i][(p, q)] + &self.basis[i][(q, p)])
                    .collect();
                rows.push(row);
            }
        }
        let constraint = Matrix::from_rows(rows);
        Subspace::from_generators(&constraint.kernel(), dim, EXACT)
    }

    /// True iff the Killing form restricted to the subalgebra is negative
    /// definite. Errors if the subspace is not bracket-closed.
    pub fn check_compact_type(&self, sub: &Subspace) -> Result<bool> {
        let basis = sub.basis();
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate().skip(i + 1) {
                let br = self.bracket_coords(x, y);
                if !sub.contains(&br, 0.0) {
                    return Err(Error::NotSubalgebra { i: i + 1, j: j + 1 });
                }
            }
        }
        if sub.is_zero() {
            return Ok(true);
        }
        let k = basis.len();
        let gram = Matrix::from_fn(k, k, |i, j| self.killing_form(&basis[i], &basis[j]));
        // Sylvester: -G positive definite iff all leading minors positive.
        for lead in 1..=k {
            let minor = Matrix::from_fn(lead, lead, |i, j| -&gram[(i, j)]);
            let det = minor.det();
            if !matches!(det, Scalar::Exact(ref r) if r.is_positive()) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// One restricted root: its functional in split-Cartan coordinates and the
/// root space, in basis coordinates of the ambient algebra.
#[derive(Debug, Clone)]
pub struct Root {
    /// Values `(alpha(H_1), ..., alpha(H_r))`, exact.
    pub coords: Vector,
    pub space: Subspace,
}

impl Root {
    pub fn multiplicity(&self) -> usize {
        self.space.dim()
    }

    pub fn is_positive(&self) -> bool {
        for c in &self.coords {
            if !c.is_zero() {
                return matches!(c, Scalar::Exact(r) if r.is_positive());
            }
        }
        false
    }
}

/// Restricted-root decomposition of a matrix Lie algebra.
#[derive(Debug)]
pub struct RestrictedRootSystem {
    pub algebra: Arc<MatrixLieAlgebra>,
    /// All nonzero roots, positive and negative.
    pub roots: Vec<Root>,
    /// Centralizer of the split Cartan (`g_0`).
    pub zero_space: Subspace,
    /// Indices into `roots` of the simple system, ordered along the
    /// Dynkin-type path starting from the lexicographically largest end.
    pub simple: Vec<usize>,
    /// For each root, its integer coefficients over the simple system.
    pub simple_coefficients: Vec<Vec<i64>>,
}

fn lex_cmp(a: &[Scalar], b: &[Scalar]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        if !d.is_zero() {
            return if matches!(d, Scalar::Exact(ref r) if r.is_positive()) {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Less
            };
        }
    }
    std::cmp::Ordering::Equal
}

/// Simultaneous eigenspace decomposition of `ad(H)`, `H` in the split
/// Cartan, with exact rational eigenvalues.
pub fn restricted_roots(algebra: &Arc<MatrixLieAlgebra>) -> Result<RestrictedRootSystem> {
    let dim = algebra.dim();
    let r = algebra.real_rank();
    let cartan_ads: Vec<Matrix> = algebra
        .split_cartan()
        .iter()
        .map(|&c| algebra.ad[c].clone())
        .collect();

    // A generic combination separates the roots; retry with growing weights
    // until every eigenspace is simultaneously diagonal.
    'weights: for w in 1..=16i64 {
        let mut probe = Matrix::zeros(dim, dim, EXACT);
        let mut weight = Scalar::one(EXACT);
        for ad_h in &cartan_ads {
            probe = probe.add(&ad_h.scale(&weight));
            weight = &weight * &Scalar::from_i64(w, EXACT);
        }

        let eigenvalues = match rational_eigenvalues(&probe) {
            Ok(vals) => vals,
            Err(e) => return Err(e),
        };

        let mut roots = Vec::new();
        let mut zero_space = Subspace::zero(dim, EXACT);
        let mut covered = 0usize;
        for lambda in &eigenvalues {
            let shifted = probe.sub(&Matrix::identity(dim, EXACT).scale(lambda));
            let kernel = Subspace::from_generators(&shifted.kernel(), dim, EXACT);
            covered += kernel.dim();
            if lambda.is_zero() {
                zero_space = kernel;
                continue;
            }
            // Read the root functional off the eigenspace; every Cartan
            // element must act as a scalar there, otherwise the probe
            // weight was not generic.
            let mut coords = Vec::with_capacity(r);
            for ad_h in &cartan_ads {
                let v = &kernel.basis()[0];
                let image = ad_h.apply(v);
                let lead = v.iter().position(|s| !s.is_zero()).expect("nonzero basis vector");
                let alpha = &image[lead] / &v[lead];
                for b in kernel.basis() {
                    let lhs = ad_h.apply(b);
                    let rhs = linalg::vec_scale(&alpha, b);
                    if lhs != rhs {
                        continue 'weights;
                    }
                }
                coords.push(alpha);
            }
            roots.push(Root { coords, space: kernel });
        }
        if covered != dim {
            return Err(Error::NonSemisimpleResidue(format!(
                "eigenspaces cover {covered} of {dim} dimensions"
            )));
        }

        // Positive system by lexicographic order, simple roots as the
        // indecomposable positive ones.
        let positive: Vec<usize> =
            (0..roots.len()).filter(|&i| roots[i].is_positive()).collect();
        let mut simple = Vec::new();
        for &i in &positive {
            let decomposable = positive.iter().any(|&a| {
                positive.iter().any(|&b| {
                    let sum = linalg::vec_add(&roots[a].coords, &roots[b].coords);
                    linalg::vec_is_zero(&linalg::vec_sub(&sum, &roots[i].coords), 0.0)
                })
            });
            if !decomposable {
                simple.push(i);
            }
        }
        order_simple_along_path(&roots, &mut simple);

        // Integer coefficients of every root over the simple system.
        let simple_matrix = Matrix::from_rows(
            simple.iter().map(|&i| roots[i].coords.clone()).collect(),
        )
        .transpose();
        let mut simple_coefficients = Vec::with_capacity(roots.len());
        for root in &roots {
            let coeffs = simple_matrix.solve(&root.coords).ok_or_else(|| {
                Error::NonSemisimpleResidue(
                    "a root is not a combination of the simple system".into(),
                )
            })?;
            let ints = coeffs
                .iter()
                .map(|c| {
                    let f = c.to_f64();
                    if f.fract() != 0.0 {
                        Err(Error::NonSemisimpleResidue(format!(
                            "non-integral simple coefficient {c}"
                        )))
                    } else {
                        Ok(f as i64)
                    }
                })
                .collect::<Result<Vec<i64>>>()?;
            simple_coefficients.push(ints);
        }

        return Ok(RestrictedRootSystem {
            algebra: algebra.clone(),
            roots,
            zero_space,
            simple,
            simple_coefficients,
        });
    }
    Err(Error::NonSemisimpleResidue(
        "no generic Cartan combination separated the roots".into(),
    ))
}

/// Order the simple system along its adjacency path (two simple roots are
/// adjacent when their sum is a root), starting from the lexicographically
/// largest endpoint. Non-path systems fall back to lexicographic order.
fn order_simple_along_path(roots: &[Root], simple: &mut Vec<usize>) {
    simple.sort_by(|&a, &b| lex_cmp(&roots[b].coords, &roots[a].coords));
    let k = simple.len();
    if k <= 2 {
        return;
    }
    let is_root = |v: &Vector| roots.iter().any(|r| {
        linalg::vec_is_zero(&linalg::vec_sub(&r.coords, v), 0.0)
    });
    let adjacent = |a: usize, b: usize| is_root(&linalg::vec_add(&roots[a].coords, &roots[b].coords));
    let degree = |i: usize, set: &[usize]| set.iter().filter(|&&j| j != i && adjacent(i, j)).count();
    let endpoints: Vec<usize> = simple.iter().copied().filter(|&i| degree(i, simple) == 1).collect();
    if endpoints.is_empty() {
        return;
    }
    let start = endpoints
        .iter()
        .copied()
        .max_by(|&a, &b| lex_cmp(&roots[a].coords, &roots[b].coords))
        .unwrap();
    let mut path = vec![start];
    let mut remaining: Vec<usize> = simple.iter().copied().filter(|&i| i != start).collect();
    while let Some(pos) = remaining.iter().position(|&i| adjacent(i, *path.last().unwrap())) {
        path.push(remaining.remove(pos));
    }
    if path.len() == k {
        *simple = path;
    }
}

/// Exact rational eigenvalues of a matrix, through its minimal polynomial.
/// The minimal polynomial must split into distinct linear factors over the
/// rationals (the matrix is then semisimple with rational spectrum).
fn rational_eigenvalues(a: &Matrix) -> Result<Vec<Scalar>> {
    let mut poly = minimal_polynomial(a);
    // Gershgorin bound on the spectrum.
    let mut bound = 0.0f64;
    for i in 0..a.rows {
        let s: f64 = (0..a.cols).map(|j| a[(i, j)].to_f64().abs()).sum();
        bound = bound.max(s);
    }
    let bound = bound.ceil() as i64;
    let mut values = Vec::new();
    // Integer candidates first (the catalog stays integral), then denominators
    // of modest size for inline configurations.
    'outer: for den in 1..=12i64 {
        for num in -(bound * den)..=(bound * den) {
            if num.rem_euclid(den) == 0 && den > 1 {
                continue; // already covered by a smaller denominator
            }
            let candidate = Scalar::ratio(num, den);
            while poly.len() > 1 && poly_eval(&poly, &candidate).is_zero() {
                if values.contains(&candidate) {
                    return Err(Error::NonSemisimpleResidue(format!(
                        "repeated eigenvalue {candidate}"
                    )));
                }
                values.push(candidate.clone());
                poly = poly_deflate(&poly, &candidate);
                if poly.len() == 1 {
                    break 'outer;
                }
            }
        }
    }
    if poly.len() > 1 {
        return Err(Error::NonSemisimpleResidue(format!(
            "minimal polynomial keeps an irrational factor of degree {}",
            poly.len() - 1
        )));
    }
    Ok(values)
}

impl RestrictedRootSystem {
    pub fn positive_roots(&self) -> Vec<usize> {
        (0..self.roots.len()).filter(|&i| self.roots[i].is_positive()).collect()
    }

    pub fn simple_roots(&self) -> Vec<&Root> {
        self.simple.iter().map(|&i| &self.roots[i]).collect()
    }

    /// Dimension bookkeeping: `dim g = dim g_0 + sum of multiplicities`.
    pub fn dimension_check(&self) -> bool {
        let total: usize = self.roots.iter().map(Root::multiplicity).sum();
        total + self.zero_space.dim() == self.algebra.dim()
    }

    /// Bracket grading `[g_alpha, g_beta] c g_{alpha+beta}` over all pairs
    /// (the target is `g_0` when the sum vanishes, zero when it is not a
    /// root).
    pub fn bracket_grading_check(&self) -> bool {
        let dim = self.algebra.dim();
        for a in &self.roots {
            for b in &self.roots {
                let sum = linalg::vec_add(&a.coords, &b.coords);
                let target = if linalg::vec_is_zero(&sum, 0.0) {
                    self.zero_space.clone()
                } else if let Some(c) = self
                    .roots
                    .iter()
                    .find(|r| linalg::vec_is_zero(&linalg::vec_sub(&r.coords, &sum), 0.0))
                {
                    c.space.clone()
                } else {
                    Subspace::zero(dim, EXACT)
                };
                for x in a.space.basis() {
                    for y in b.space.basis() {
                        let br = self.algebra.bracket_coords(x, y);
                        if !linalg::vec_is_zero(&br, 0.0) && !target.contains(&br, 0.0) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Parabolic data for a choice of simple roots spanning the Levi.
#[derive(Debug)]
pub struct ParabolicData {
    pub algebra: Arc<MatrixLieAlgebra>,
    /// Indices into the ordered simple system.
    pub sigma: Vec<usize>,
    /// Grade -> subspace of the ambient algebra.
    pub grading: BTreeMap<i64, Subspace>,
    pub p: Subspace,
    pub q: Subspace,
    pub levi: Subspace,
    pub n_plus: Subspace,
    pub n_minus: Subspace,
    pub nil_order: usize,
    /// Structure constants of `n_Sigma` on its graded basis.
    pub nil_algebra: Arc<GradedNilpotentAlgebra>,
    /// The graded basis of `n_Sigma` in ambient coordinates.
    pub nil_basis: Vec<Vector>,
    /// Restricted-root functional of each nil basis vector, in split-Cartan
    /// coordinates.
    pub nil_weights: Vec<Vector>,
}

/// Assemble the parabolic grading for `sigma` (indices into the simple
/// system): the grade of a root is the sum of its coefficients over the
/// simple roots outside `sigma`.
pub fn parabolic(rs: &RestrictedRootSystem, sigma: &[usize]) -> Result<ParabolicData> {
    let k = rs.simple.len();
    for &s in sigma {
        if s >= k {
            return Err(Error::SigmaNotSimple);
        }
    }
    let mut sigma: Vec<usize> = sigma.to_vec();
    sigma.sort_unstable();
    sigma.dedup();
    if sigma.len() == k {
        return Err(Error::EmptyNilradical);
    }
    let dim = rs.algebra.dim();

    let grade_of = |root_idx: usize| -> i64 {
        rs.simple_coefficients[root_idx]
            .iter()
            .enumerate()
            .filter(|(pos, _)| !sigma.contains(pos))
            .map(|(_, &c)| c)
            .sum()
    };

    let mut grading: BTreeMap<i64, Vec<Vector>> = BTreeMap::new();
    grading.entry(0).or_default().extend(rs.zero_space.basis().to_vec());
    for (i, root) in rs.roots.iter().enumerate() {
        grading.entry(grade_of(i)).or_default().extend(root.space.basis().to_vec());
    }
    let grading: BTreeMap<i64, Subspace> = grading
        .into_iter()
        .map(|(g, gens)| (g, Subspace::from_generators(&gens, dim, EXACT)))
        .collect();

    let collect = |pred: &dyn Fn(i64) -> bool| -> Subspace {
        let mut gens = Vec::new();
        for (&g, space) in &grading {
            if pred(g) {
                gens.extend(space.basis().to_vec());
            }
        }
        Subspace::from_generators(&gens, dim, EXACT)
    };
    let p = collect(&|g| g >= 0);
    let q = collect(&|g| g <= 0);
    let levi = grading[&0].clone();
    let n_plus = collect(&|g| g > 0);
    let n_minus = collect(&|g| g < 0);
    let nil_order = grading.keys().copied().max().unwrap_or(0);
    if nil_order <= 0 {
        return Err(Error::EmptyNilradical);
    }
    let nil_order = nil_order as usize;

    // Graded basis of n_Sigma: grades ascending, roots lex-descending
    // within a grade, echelon vectors within a root space.
    let mut positive_by_grade: Vec<(i64, usize)> = rs
        .positive_roots()
        .into_iter()
        .map(|i| (grade_of(i), i))
        .filter(|&(g, _)| g > 0)
        .collect();
    positive_by_grade.sort_by(|&(ga, a), &(gb, b)| {
        ga.cmp(&gb).then_with(|| lex_cmp(&rs.roots[b].coords, &rs.roots[a].coords))
    });
    let mut nil_basis = Vec::new();
    let mut nil_weights = Vec::new();
    let mut degrees = Vec::new();
    let mut names = Vec::new();
    for &(g, i) in &positive_by_grade {
        for v in rs.roots[i].space.basis() {
            nil_basis.push(v.clone());
            nil_weights.push(rs.roots[i].coords.clone());
            degrees.push(g as usize);
            names.push(format!("e{}", nil_basis.len()));
        }
    }

    // Structure constants of the nilpotent algebra on that basis.
    let nil_dim = nil_basis.len();
    let nil_span = Subspace::from_generators(&nil_basis, dim, EXACT);
    let basis_matrix = Matrix::from_rows(nil_basis.clone()).transpose();
    let mut brackets = Vec::new();
    for a in 0..nil_dim {
        for b in a + 1..nil_dim {
            let br = rs.algebra.bracket_coords(&nil_basis[a], &nil_basis[b]);
            if linalg::vec_is_zero(&br, 0.0) {
                continue;
            }
            if !nil_span.contains(&br, 0.0) {
                return Err(Error::NonSemisimpleResidue(
                    "nilradical is not bracket-closed".into(),
                ));
            }
            let coords = basis_matrix.solve(&br).expect("bracket inside the span");
            for (kk, c) in coords.iter().enumerate() {
                if !c.is_zero() {
                    brackets.push((a, b, kk, c.clone()));
                }
            }
        }
    }
    let nil_algebra = GradedNilpotentAlgebra::new(EXACT, names, degrees, brackets)
        .map_err(|e| Error::InvalidAlgebra(format!("derived nilradical: {e}")))?;
    if nil_algebra.order() != nil_order {
        return Err(Error::InvalidAlgebra(format!(
            "grading order {} disagrees with nilpotency order {nil_order}",
            nil_algebra.order()
        )));
    }

    Ok(ParabolicData {
        algebra: rs.algebra.clone(),
        sigma,
        grading,
        p,
        q,
        levi,
        n_plus,
        n_minus,
        nil_order,
        nil_algebra: Arc::new(nil_algebra),
        nil_basis,
        nil_weights,
    })
}

impl ParabolicData {
    /// Matrix of `ad(h)` restricted to `n_Sigma` in its graded basis;
    /// errors when `h` is outside the Levi factor.
    pub fn adjoint_action(&self, h: &[Scalar]) -> Result<Matrix> {
        if h.len() != self.algebra.dim() {
            return Err(Error::DimensionMismatch { expected: self.algebra.dim(), got: h.len() });
        }
        if !self.levi.contains(h, 0.0) {
            return Err(Error::NotInLevi);
        }
        self.restrict_to_nil(&self.algebra.ad_of(h))
            .ok_or(Error::NotInLevi)
    }

    /// Restrict an ambient-coordinates operator to the nil basis; `None`
    /// if it does not preserve the nilradical.
    fn restrict_to_nil(&self, op: &Matrix) -> Option<Matrix> {
        let nil_dim = self.nil_basis.len();
        let basis_matrix = Matrix::from_rows(self.nil_basis.clone()).transpose();
        let mut out = Matrix::zeros(nil_dim, nil_dim, EXACT);
        for (j, v) in self.nil_basis.iter().enumerate() {
            let image = op.apply(v);
            let coords = basis_matrix.solve(&image)?;
            let residual = linalg::vec_sub(&image, &basis_matrix.apply(&coords));
            if !linalg::vec_is_zero(&residual, 0.0) {
                return None;
            }
            for i in 0..nil_dim {
                out[(i, j)] = coords[i].clone();
            }
        }
        Some(out)
    }

    /// The invariant positive-definite product `-B(x, theta y)` on the nil
    /// basis, with `theta(X) = -X^T` the Cartan involution.
    pub fn nil_inner_product(&self) -> Matrix {
        let nil_dim = self.nil_basis.len();
        Matrix::from_fn(nil_dim, nil_dim, |i, j| {
            let mat_j = self.algebra.matrix_of(&self.nil_basis[j]);
            let theta = mat_j.transpose().scale(&Scalar::from_i64(-1, EXACT));
            let theta_coords = self
                .algebra
                .express_matrix(&theta)
                .expect("theta preserves the algebra");
            -&self.algebra.killing_form(&self.nil_basis[i], &theta_coords)
        })
    }

    /// The two ray geometries of the Levi subgeometry: the Borel isotropy
    /// `M_B A_B` (rank = real rank) and `(K cap M_Sigma) A_Sigma`
    /// (rank = real rank - |Sigma|).
    pub fn levi_ray_geometries(&self, rs: &RestrictedRootSystem) -> Result<(RayGeometry, RayGeometry)> {
        let alg = &self.algebra;
        let dim = alg.dim();
        let r = alg.real_rank();
        let nil_dim = self.nil_basis.len();
        let inner = self.nil_inner_product();

        // Full split torus: degree row per Cartan element.
        let full_degrees = Matrix::from_fn(r, nil_dim, |i, q| self.nil_weights[q][i].clone());

        // Cartan subspace in ambient coordinates.
        let cartan_vectors: Vec<Vector> = alg
            .split_cartan()
            .iter()
            .map(|&c| {
                let mut v = linalg::zero_vector(dim, EXACT);
                v[c] = Scalar::one(EXACT);
                v
            })
            .collect();
        let cartan_space = Subspace::from_generators(&cartan_vectors, dim, EXACT);

        let theta_fixed = alg.theta_fixed();

        // m_B: Killing-orthogonal complement of the Cartan inside g_0.
        let m_b = rs
            .zero_space
            .orthogonal_complement_within(&cartan_space, alg.killing());
        let k_m_b = m_b.intersect(&theta_fixed);
        let first_k = self.rotation_generators(&k_m_b, &inner)?;
        let first = RayGeometry::new(
            self.nil_algebra.clone(),
            full_degrees,
            first_k,
            Some(inner.clone()),
        )?;

        // a_Sigma: Cartan directions annihilated by every root in Sigma.
        let mut constraint_rows = Vec::new();
        for &s in &self.sigma {
            let root = &rs.roots[rs.simple[s]];
            constraint_rows.push(root.coords.clone());
        }
        let a_sigma_coeffs = if constraint_rows.is_empty() {
            Matrix::identity(r, EXACT).rows_vec()
        } else {
            Matrix::from_rows(constraint_rows).kernel()
        };
        let second_degrees = Matrix::from_fn(a_sigma_coeffs.len(), nil_dim, |i, q| {
            linalg::dot(&a_sigma_coeffs[i], &self.nil_weights[q])
        });
        let a_sigma_vectors: Vec<Vector> = a_sigma_coeffs
            .iter()
            .map(|coeffs| {
                let mut v = linalg::zero_vector(dim, EXACT);
                for (c, h) in coeffs.iter().zip(&cartan_vectors) {
                    v = linalg::vec_add(&v, &linalg::vec_scale(c, h));
                }
                v
            })
            .collect();
        let a_sigma_space = Subspace::from_generators(&a_sigma_vectors, dim, EXACT);

        // m_Sigma: complement of a_Sigma in the Levi; its compact part
        // gives the K generators.
        let m_sigma = self
            .levi
            .orthogonal_complement_within(&a_sigma_space, alg.killing());
        let k_m_sigma = m_sigma.intersect(&theta_fixed);
        let second_k = self.rotation_generators(&k_m_sigma, &inner)?;
        let second = RayGeometry::new(
            self.nil_algebra.clone(),
            second_degrees,
            second_k,
            Some(inner),
        )?;

        Ok((first, second))
    }

    /// Exact rational points of `exp(theta ad(m)|_n)` for each compact
    /// generator `m`. The action of a compact generator on the nilradical
    /// decomposes into rotation planes with integer frequencies; evaluating
    /// the one-parameter group at the Pythagorean angle `cos t = 3/5`
    /// yields rational matrices that are genuine automorphisms.
    fn rotation_generators(&self, compact: &Subspace, inner: &Matrix) -> Result<Vec<Matrix>> {
        let mut gens = Vec::new();
        for m in compact.basis() {
            let action = match self.restrict_to_nil(&self.algebra.ad_of(m)) {
                Some(a) => a,
                None => continue,
            };
            if action.is_zero(0.0) {
                continue;
            }
            if let Some(g) = rational_rotation_exp(&action) {
                // Accept only certified generators: orthogonal for the
                // invariant product and automorphisms of the nilradical.
                let orth = g.transpose().mul(inner).mul(&g) == *inner;
                let auto = crate::nilaffine::is_automorphism(&g, &self.nil_algebra);
                if orth && auto {
                    gens.push(g);
                }
            }
        }
        Ok(gens)
    }
}

/// Exact `exp(t A)` at the angle with `cos t = 3/5, sin t = 4/5`, for a
/// semisimple `A` whose nonzero eigenvalues are `+- i k` with integer `k`.
/// Returns `None` when `A` is not of that form.
fn rational_rotation_exp(a: &Matrix) -> Option<Matrix> {
    let n = a.rows;
    let mut poly = minimal_polynomial(a);
    // Strip at most one zero root: lambda | poly.
    let zero = Scalar::zero(EXACT);
    if poly_eval(&poly, &zero).is_zero() {
        poly = poly_deflate(&poly, &zero);
        if poly_eval(&poly, &zero).is_zero() {
            return None; // repeated zero eigenvalue: not semisimple
        }
    }
    if (poly.len() - 1) % 2 != 0 {
        return None;
    }
    // The rest must be a polynomial in lambda^2.
    for (idx, c) in poly.iter().enumerate() {
        if idx % 2 == 1 && !c.is_zero() {
            return None;
        }
    }
    let mut even: Vec<Scalar> = poly.iter().step_by(2).cloned().collect();
    // Roots of even(t) must be t = -k^2 with integer k.
    let mut freqs: Vec<i64> = Vec::new();
    let bound = (a.sup_norm_f64() * n as f64).ceil() as i64 + 1;
    for k in 1..=bound {
        let candidate = Scalar::from_i64(-k * k, EXACT);
        while even.len() > 1 && poly_eval(&even, &candidate).is_zero() {
            if freqs.contains(&k) {
                return None; // repeated frequency: not semisimple
            }
            freqs.push(k);
            even = poly_deflate(&even, &candidate);
        }
    }
    if even.len() > 1 {
        return None;
    }
    // Spectral projector onto each frequency plane, as a polynomial in A^2.
    let a2 = a.mul(a);
    let mut spectrum: Vec<Scalar> = freqs.iter().map(|&k| Scalar::from_i64(-k * k, EXACT)).collect();
    if poly_eval_matrix_has_kernel(a) {
        spectrum.push(Scalar::zero(EXACT));
    }
    let mut result = Matrix::zeros(n, n, EXACT);
    // Chebyshev-style recurrences for cos(k t), sin(k t) at the chosen angle.
    let (cos1, sin1) = (Scalar::ratio(3, 5), Scalar::ratio(4, 5));
    let mut cos_prev = Scalar::one(EXACT);
    let mut sin_prev = Scalar::zero(EXACT);
    let mut cos_k = cos1.clone();
    let mut sin_k = sin1.clone();
    let mut table: BTreeMap<i64, (Scalar, Scalar)> = BTreeMap::new();
    let kmax = freqs.iter().copied().max().unwrap_or(0);
    for k in 1..=kmax {
        table.insert(k, (cos_k.clone(), sin_k.clone()));
        let two_cos = &cos1 + &cos1;
        let cos_next = &(&two_cos * &cos_k) - &cos_prev;
        let sin_next = &(&two_cos * &sin_k) - &sin_prev;
        cos_prev = cos_k;
        sin_prev = sin_k;
        cos_k = cos_next;
        sin_k = sin_next;
    }
    for &k in &freqs {
        let eigen = Scalar::from_i64(-k * k, EXACT);
        // P_k = prod over other spectral values mu of (A^2 - mu) / (eigen - mu)
        let mut proj = Matrix::identity(n, EXACT);
        for mu in &spectrum {
            if *mu == eigen {
                continue;
            }
            let factor = a2.sub(&Matrix::identity(n, EXACT).scale(mu));
            let denom = &eigen - mu;
            proj = proj.mul(&factor).scale(&denom.recip());
        }
        let (cos_kt, sin_kt) = table[&k].clone();
        let inv_k = Scalar::ratio(1, k);
        let rotated = proj
            .scale(&cos_kt)
            .add(&a.mul(&proj).scale(&(&sin_kt * &inv_k)));
        result = result.add(&rotated);
    }
    // Add the identity on the kernel of A.
    if spectrum.iter().any(|s| s.is_zero()) {
        let mut proj0 = Matrix::identity(n, EXACT);
        for mu in &spectrum {
            if mu.is_zero() {
                continue;
            }
            let factor = a2.sub(&Matrix::identity(n, EXACT).scale(mu));
            proj0 = proj0.mul(&factor).scale(&(-mu).recip());
        }
        result = result.add(&proj0);
    }
    Some(result)
}

fn poly_eval_matrix_has_kernel(a: &Matrix) -> bool {
    a.rank() < a.rows
}

// ---------------------------------------------------------------------------
// Catalog of matrix realizations
// ---------------------------------------------------------------------------

/// Keys of the built-in semisimple algebras.
pub const CATALOG: &[&str] = &["sl3R", "sl4R", "su21", "su31", "su22", "sustar4"];

/// Variable layout for a complex n x n matrix: real and imaginary part of
/// every entry.
fn cvar(n: usize, i: usize, j: usize, part: usize) -> usize {
    2 * (i * n + j) + part
}

/// Realify a coordinate vector of complex-entry variables into a 2n x 2n
/// rational matrix: `u + iv` becomes the block `[[u, -v], [v, u]]`.
fn realify(n: usize, coords: &[Scalar]) -> Matrix {
    let mut out = Matrix::zeros(2 * n, 2 * n, EXACT);
    for i in 0..n {
        for j in 0..n {
            let u = coords[cvar(n, i, j, 0)].clone();
            let v = coords[cvar(n, i, j, 1)].clone();
            out[(2 * i, 2 * j)] = u.clone();
            out[(2 * i + 1, 2 * j + 1)] = u;
            out[(2 * i, 2 * j + 1)] = -&v;
            out[(2 * i + 1, 2 * j)] = v;
        }
    }
    out
}

/// Solve a real-linear constraint system and assemble the algebra with the
/// split Cartan (real diagonal solutions) listed first in the basis.
fn assemble_algebra(
    name: &str,
    var_count: usize,
    constraints: Vec<Vector>,
    diag_vars: &[usize],
    to_matrix: &dyn Fn(&[Scalar]) -> Matrix,
) -> Result<MatrixLieAlgebra> {
    let solution = if constraints.is_empty() {
        Subspace::full(var_count, EXACT)
    } else {
        Subspace::from_generators(&Matrix::from_rows(constraints).kernel(), var_count, EXACT)
    };
    let cartan = solution.intersect(&Subspace::coordinate(diag_vars, var_count, EXACT));
    let mut coords: Vec<Vector> = cartan.basis().to_vec();
    let mut rest = Vec::new();
    for v in solution.basis() {
        let reduced = cartan.reduce(v);
        if !linalg::vec_is_zero(&reduced, 0.0) {
            rest.push(reduced);
        }
    }
    let rest = Subspace::from_generators(&rest, var_count, EXACT);
    coords.extend(rest.basis().to_vec());
    let matrices: Vec<Matrix> = coords.iter().map(|v| to_matrix(v)).collect();
    let cartan_indices: Vec<usize> = (0..cartan.dim()).collect();
    MatrixLieAlgebra::new(name, matrices, cartan_indices)
}

/// `su(J)` for a real symmetric form `J` on `C^n`, realified.
fn special_unitary(name: &str, j_form: &Matrix) -> Result<MatrixLieAlgebra> {
    let n = j_form.rows;
    let vars = 2 * n * n;
    let mut constraints = Vec::new();
    // X* J + J X = 0, split into real and imaginary parts.
    for i in 0..n {
        for jj in 0..n {
            let mut re_row = linalg::zero_vector(vars, EXACT);
            let mut im_row = linalg::zero_vector(vars, EXACT);
            for k in 0..n {
                // (X* J)_{i jj} = sum_k conj(X_{k i}) J_{k jj}
                re_row[cvar(n, k, i, 0)] = &re_row[cvar(n, k, i, 0)] + &j_form[(k, jj)];
                im_row[cvar(n, k, i, 1)] = &im_row[cvar(n, k, i, 1)] - &j_form[(k, jj)];
                // (J X)_{i jj} = sum_k J_{i k} X_{k jj}
                re_row[cvar(n, k, jj, 0)] = &re_row[cvar(n, k, jj, 0)] + &j_form[(i, k)];
                im_row[cvar(n, k, jj, 1)] = &im_row[cvar(n, k, jj, 1)] + &j_form[(i, k)];
            }
            constraints.push(re_row);
            constraints.push(im_row);
        }
    }
    // Vanishing trace (the real part is already implied by the form).
    let mut re_tr = linalg::zero_vector(vars, EXACT);
    let mut im_tr = linalg::zero_vector(vars, EXACT);
    for i in 0..n {
        re_tr[cvar(n, i, i, 0)] = Scalar::one(EXACT);
        im_tr[cvar(n, i, i, 1)] = Scalar::one(EXACT);
    }
    constraints.push(re_tr);
    constraints.push(im_tr);
    let diag_vars: Vec<usize> = (0..n).map(|i| cvar(n, i, i, 0)).collect();
    assemble_algebra(name, vars, constraints, &diag_vars, &|coords| realify(n, coords))
}

/// `sl(n, R)` with the traceless diagonal as split Cartan.
fn special_linear(name: &str, n: usize) -> Result<MatrixLieAlgebra> {
    let vars = n * n;
    let mut trace = linalg::zero_vector(vars, EXACT);
    for i in 0..n {
        trace[i * n + i] = Scalar::one(EXACT);
    }
    let diag_vars: Vec<usize> = (0..n).map(|i| i * n + i).collect();
    assemble_algebra(name, vars, vec![trace], &diag_vars, &|coords| {
        Matrix::from_fn(n, n, |i, j| coords[i * n + j].clone())
    })
}

/// `su*(4)`: quaternionic 2x2 matrices inside `gl(4, C)`, realified to 8x8.
fn special_unitary_star4(name: &str) -> Result<MatrixLieAlgebra> {
    let n = 4;
    let h = 2;
    let vars = 2 * n * n;
    let mut constraints = Vec::new();
    for i in 0..h {
        for j in 0..h {
            // A-bar block: X[h+i][h+j] = conj(X[i][j])
            let mut row = linalg::zero_vector(vars, EXACT);
            row[cvar(n, h + i, h + j, 0)] = Scalar::one(EXACT);
            row[cvar(n, i, j, 0)] = Scalar::from_i64(-1, EXACT);
            constraints.push(row);
            let mut row = linalg::zero_vector(vars, EXACT);
            row[cvar(n, h + i, h + j, 1)] = Scalar::one(EXACT);
            row[cvar(n, i, j, 1)] = Scalar::one(EXACT);
            constraints.push(row);
            // -B-bar block: X[h+i][j] = -conj(X[i][h+j])
            let mut row = linalg::zero_vector(vars, EXACT);
            row[cvar(n, h + i, j, 0)] = Scalar::one(EXACT);
            row[cvar(n, i, h + j, 0)] = Scalar::one(EXACT);
            constraints.push(row);
            let mut row = linalg::zero_vector(vars, EXACT);
            row[cvar(n, h + i, j, 1)] = Scalar::one(EXACT);
            row[cvar(n, i, h + j, 1)] = Scalar::from_i64(-1, EXACT);
            constraints.push(row);
        }
    }
    let mut re_tr = linalg::zero_vector(vars, EXACT);
    for i in 0..n {
        re_tr[cvar(n, i, i, 0)] = Scalar::one(EXACT);
    }
    constraints.push(re_tr);
    let diag_vars: Vec<usize> = (0..n).map(|i| cvar(n, i, i, 0)).collect();
    assemble_algebra(name, vars, constraints, &diag_vars, &|coords| realify(n, coords))
}

fn antidiagonal_form(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| {
        if i + j == n - 1 {
            Scalar::one(EXACT)
        } else {
            Scalar::zero(EXACT)
        }
    })
}

/// Hermitian form of signature (3, 1): antidiagonal on the outer pair,
/// identity on the middle block.
fn signature31_form() -> Matrix {
    Matrix::from_fn(4, 4, |i, j| {
        let hit = (i == 0 && j == 3) || (i == 3 && j == 0) || (i == j && (i == 1 || i == 2));
        if hit {
            Scalar::one(EXACT)
        } else {
            Scalar::zero(EXACT)
        }
    })
}

/// Load a catalog algebra by key.
pub fn load_algebra(key: &str) -> Result<Arc<MatrixLieAlgebra>> {
    let alg = match key {
        "sl3R" => special_linear("sl3R", 3)?,
        "sl4R" => special_linear("sl4R", 4)?,
        "su21" => special_unitary("su21", &antidiagonal_form(3))?,
        "su22" => special_unitary("su22", &antidiagonal_form(4))?,
        "su31" => special_unitary("su31", &signature31_form())?,
        "sustar4" => special_unitary_star4("sustar4")?,
        _ => return Err(Error::UnknownKey(key.to_string())),
    };
    Ok(Arc::new(alg))
}

/// Load either a catalog key or an inline configuration.
pub fn load_algebra_or_config(key: &str, spec: Option<&MatrixAlgebraSpec>) -> Result<Arc<MatrixLieAlgebra>> {
    match spec {
        Some(spec) => Ok(Arc::new(MatrixLieAlgebra::from_spec(key, spec)?)),
        None => load_algebra(key),
    }
}

// ---------------------------------------------------------------------------
// Table of parabolic geometries
// ---------------------------------------------------------------------------

/// One row of the catalog table, computed against the published values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Table1Row {
    pub group: String,
    pub key: String,
    pub real_rank: usize,
    pub sigma: Vec<usize>,
    pub sigma_label: String,
    pub expected_dim: usize,
    pub expected_order: usize,
    pub computed_dim: usize,
    pub computed_order: usize,
    pub pass: bool,
}

/// Published rows: (key, display, real rank, sigma, label, dim, nil-order).
pub const TABLE1_EXPECTED: &[(&str, &str, usize, &[usize], &str, usize, usize)] = &[
    ("sl3R", "SL(3,R)", 2, &[], "empty", 3, 2),
    ("sl3R", "SL(3,R)", 2, &[0], "{phi_1}", 2, 1),
    ("su21", "SU(2,1)", 1, &[], "empty", 3, 2),
    ("sl4R", "SL(4,R)", 3, &[], "empty", 6, 3),
    ("sl4R", "SL(4,R)", 3, &[0], "{phi_1}", 5, 2),
    ("sl4R", "SL(4,R)", 3, &[0, 1], "{phi_1,phi_2}", 4, 2),
    ("su31", "SU(3,1)", 1, &[], "empty", 5, 2),
    ("sustar4", "SU*(4)", 1, &[], "empty", 4, 1),
    ("su22", "SU(2,2)", 2, &[], "empty", 6, 3),
    ("su22", "SU(2,2)", 2, &[1], "{phi_2}", 5, 2),
    ("su22", "SU(2,2)", 2, &[0], "{phi_1}", 4, 1),
];

/// Compute every table row from the matrix realizations and compare with
/// the embedded expected values; mismatches are reported, never adjusted.
pub fn table1(filter: Option<&str>) -> Result<(Vec<Table1Row>, Report)> {
    let mut rows = Vec::new();
    let mut report = Report::new();
    let mut cache: BTreeMap<&str, (Arc<MatrixLieAlgebra>, RestrictedRootSystem)> = BTreeMap::new();
    for &(key, group, rank, sigma, label, dim, order) in TABLE1_EXPECTED {
        if let Some(f) = filter {
            if f != key {
                continue;
            }
        }
        if !cache.contains_key(key) {
            let algebra = load_algebra(key)?;
            let roots = restricted_roots(&algebra)?;
            cache.insert(key, (algebra, roots));
        }
        let (algebra, roots) = &cache[key];
        let pd = parabolic(roots, sigma)?;
        let computed_dim = pd.nil_algebra.dim();
        let computed_order = pd.nil_order;
        let rank_ok = algebra.real_rank() == rank;
        let pass = computed_dim == dim && computed_order == order && rank_ok;
        report.push(
            Check::exact(format!("{group} sigma={label}"), pass).detail(format!(
                "expected dim {dim} order {order}, computed dim {computed_dim} order {computed_order}, real rank {} (expected {rank})",
                algebra.real_rank()
            )),
        );
        rows.push(Table1Row {
            group: group.to_string(),
            key: key.to_string(),
            real_rank: algebra.real_rank(),
            sigma: sigma.to_vec(),
            sigma_label: label.to_string(),
            expected_dim: dim,
            expected_order: order,
            computed_dim,
            computed_order,
            pass,
        });
    }
    if rows.is_empty() {
        return Err(Error::UnknownKey(filter.unwrap_or("").to_string()));
    }
    Ok((rows, report))
}
