//! Nil-affine transformations and ray geometries.
//!
//! A nil-affine map is a pair `(c, f)` acting by `T(x) = c + f(x)`, where
//! `+` is the group law of `N`, `c` is a left translation and `f` is an
//! automorphism of the graded algebra. A ray geometry equips `N` with an
//! isotropy `KA`: `A` acts diagonally with exponents read off a rational
//! degree matrix, and `K` is presented by finitely many generator matrices
//! together with an invariant inner product certifying compactness.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::lie::{AlgebraSpec, GradedNilpotentAlgebra, GroupElement};
use crate::linalg::{self, Matrix, Subspace, Vector, FLOAT_PIVOT_TOL};
use crate::report::{Check, Report};
use crate::scalar::{Scalar, ScalarMode};
use crate::{Error, Result};

/// Residual accepted for automorphism and orthogonality checks in float
/// mode; rational mode is exact.
pub const AUTOMORPHISM_TOL: f64 = 1e-12;

/// Largest violation of `f([e_i, e_j]) = [f e_i, f e_j]` over basis pairs.
pub fn automorphism_residual(f: &Matrix, alg: &GradedNilpotentAlgebra) -> f64 {
    let n = alg.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let lhs = f.apply(&alg.bracket(&alg.basis_vector(i), &alg.basis_vector(j)).unwrap());
            let rhs = alg.bracket(&f.col(i), &f.col(j)).unwrap();
            let res = linalg::vec_sup_norm_f64(&linalg::vec_sub(&lhs, &rhs));
            worst = worst.max(res);
        }
    }
    worst
}

/// True iff `f` preserves the bracket on all basis pairs, exactly in
/// rational mode and within [`AUTOMORPHISM_TOL`] in float mode.
pub fn is_automorphism(f: &Matrix, alg: &GradedNilpotentAlgebra) -> bool {
    if f.rows != alg.dim() || f.cols != alg.dim() {
        return false;
    }
    match alg.mode() {
        ScalarMode::Exact => {
            let n = alg.dim();
            for i in 0..n {
                for j in i + 1..n {
                    let bij = alg.bracket(&alg.basis_vector(i), &alg.basis_vector(j)).unwrap();
                    let lhs = f.apply(&bij);
                    let rhs = alg.bracket(&f.col(i), &f.col(j)).unwrap();
                    if linalg::vec_sub(&lhs, &rhs).iter().any(|s| !s.is_zero()) {
                        return false;
                    }
                }
            }
            true
        }
        ScalarMode::Float => automorphism_residual(f, alg) <= AUTOMORPHISM_TOL,
    }
}

/// Serialized form of a nil-affine map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapSpec {
    pub c: Vec<Scalar>,
    pub f: Vec<Vec<Scalar>>,
}

/// The transformation `x -> c + f(x)`, stored with base point at the
/// identity. Rebasing is a view computation and never mutates.
#[derive(Debug, Clone)]
pub struct NilAffineMap {
    algebra: Arc<GradedNilpotentAlgebra>,
    translation: GroupElement,
    linear: Matrix,
}

impl NilAffineMap {
    pub fn new(
        algebra: Arc<GradedNilpotentAlgebra>,
        translation: GroupElement,
        linear: Matrix,
    ) -> Result<Self> {
        algebra.check_vector(&translation.log)?;
        if linear.rows != algebra.dim() || linear.cols != algebra.dim() {
            return Err(Error::DimensionMismatch { expected: algebra.dim(), got: linear.rows });
        }
        linear.inverse().map_err(|_| Error::SingularMatrix)?;
        if !is_automorphism(&linear, &algebra) {
            let residual = automorphism_residual(&linear, &algebra);
            return Err(Error::NotAutomorphism { i: 0, j: 0, residual });
        }
        Ok(NilAffineMap { algebra, translation, linear })
    }

    pub fn identity(algebra: Arc<GradedNilpotentAlgebra>) -> Self {
        let translation = algebra.identity();
        let linear = Matrix::identity(algebra.dim(), algebra.mode());
        NilAffineMap { algebra, translation, linear }
    }

    pub fn from_translation(algebra: Arc<GradedNilpotentAlgebra>, c: GroupElement) -> Result<Self> {
        let linear = Matrix::identity(algebra.dim(), algebra.mode());
        Self::new(algebra, c, linear)
    }

    pub fn from_linear(algebra: Arc<GradedNilpotentAlgebra>, f: Matrix) -> Result<Self> {
        let c = algebra.identity();
        Self::new(algebra, c, f)
    }

    pub fn from_spec(algebra: Arc<GradedNilpotentAlgebra>, spec: &MapSpec) -> Result<Self> {
        let mode = algebra.mode();
        let c = GroupElement::new(spec.c.iter().map(|s| s.clone().into_mode(mode)).collect());
        let rows: Vec<Vector> = spec
            .f
            .iter()
            .map(|row| row.iter().map(|s| s.clone().into_mode(mode)).collect())
            .collect();
        Self::new(algebra, c, Matrix::from_rows(rows))
    }

    pub fn to_spec(&self) -> MapSpec {
        MapSpec { c: self.translation.log.clone(), f: self.linear.rows_vec() }
    }

    pub fn algebra(&self) -> &Arc<GradedNilpotentAlgebra> {
        &self.algebra
    }

    pub fn translation(&self) -> &GroupElement {
        &self.translation
    }

    pub fn linear(&self) -> &Matrix {
        &self.linear
    }

    fn check_compatible(&self, other: &NilAffineMap) -> Result<()> {
        if self.algebra.dim() != other.algebra.dim() || self.algebra.mode() != other.algebra.mode() {
            return Err(Error::DimensionMismatch {
                expected: self.algebra.dim(),
                got: other.algebra.dim(),
            });
        }
        Ok(())
    }

    /// `T(x) = c + f(x)`.
    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        self.algebra.check_vector(&x.log)?;
        let fx = GroupElement::new(self.linear.apply(&x.log));
        self.algebra.bch(&self.translation, &fx)
    }

    /// Composition `T1 . T2`, i.e. apply `T2` first.
    pub fn compose(&self, other: &NilAffineMap) -> Result<NilAffineMap> {
        self.check_compatible(other)?;
        let f = self.linear.mul(&other.linear);
        let c = self.apply(&other.translation)?;
        Ok(NilAffineMap { algebra: self.algebra.clone(), translation: c, linear: f })
    }

    pub fn invert(&self) -> Result<NilAffineMap> {
        let f_inv = self.linear.inverse()?;
        let c = GroupElement::new(linalg::vec_neg(&f_inv.apply(&self.translation.log)));
        Ok(NilAffineMap { algebra: self.algebra.clone(), translation: c, linear: f_inv })
    }

    /// The `(c', f)` expression of the same transformation with respect to
    /// the base point `y`: `c' = c + f(y)`, `f` unchanged. For every `u`,
    /// `apply(rebase(T, y), u) = T(y + u)`.
    pub fn rebase(&self, y: &GroupElement) -> Result<NilAffineMap> {
        let fy = GroupElement::new(self.linear.apply(&y.log));
        let c = self.algebra.bch(&self.translation, &fy)?;
        Ok(NilAffineMap { algebra: self.algebra.clone(), translation: c, linear: self.linear.clone() })
    }

    pub fn pow(&self, n: i64) -> Result<NilAffineMap> {
        let base = if n >= 0 { self.clone() } else { self.invert()? };
        let mut out = NilAffineMap::identity(self.algebra.clone());
        for _ in 0..n.unsigned_abs() {
            out = out.compose(&base)?;
        }
        Ok(out)
    }

    /// Sup-norm of `(ln c, f, f^{-1})`, the escape measure used by the
    /// properness probe.
    pub fn parameter_norm(&self) -> f64 {
        let c = linalg::vec_sup_norm_f64(&self.translation.log);
        let f = self.linear.sup_norm_f64();
        let finv = self.linear.inverse().map(|m| m.sup_norm_f64()).unwrap_or(f64::INFINITY);
        c.max(f).max(finv)
    }
}

/// Reference to an algebra: a catalog key or an inline definition.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Key(String),
    Inline(AlgebraSpec),
}

/// Serialized ray geometry. `inner_product` defaults to the identity in the
/// graded basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RayGeometrySpec {
    pub algebra: AlgebraRef,
    pub rank: usize,
    pub degrees: Vec<Vec<Scalar>>,
    #[serde(default)]
    pub k_generators: Vec<Vec<Vec<Scalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_product: Option<Vec<Vec<Scalar>>>,
}

/// Ray geometry data: the diagonal group `A` given by a rank x dim degree
/// matrix, plus generators of the compact factor `K`.
#[derive(Debug, Clone)]
pub struct RayGeometry {
    algebra: Arc<GradedNilpotentAlgebra>,
    rank: usize,
    degree_matrix: Matrix,
    k_generators: Vec<Matrix>,
    inner_product: Matrix,
}

impl RayGeometry {
    pub fn new(
        algebra: Arc<GradedNilpotentAlgebra>,
        degree_matrix: Matrix,
        k_generators: Vec<Matrix>,
        inner_product: Option<Matrix>,
    ) -> Result<Self> {
        let n = algebra.dim();
        if degree_matrix.cols != n {
            return Err(Error::DimensionMismatch { expected: n, got: degree_matrix.cols });
        }
        let inner_product =
            inner_product.unwrap_or_else(|| Matrix::identity(n, algebra.mode()));
        if inner_product.rows != n || inner_product.cols != n {
            return Err(Error::DimensionMismatch { expected: n, got: inner_product.rows });
        }
        for k in &k_generators {
            if k.rows != n || k.cols != n {
                return Err(Error::DimensionMismatch { expected: n, got: k.rows });
            }
        }
        let rank = degree_matrix.rows;
        Ok(RayGeometry { algebra, rank, degree_matrix, k_generators, inner_product })
    }

    pub fn from_spec(
        spec: &RayGeometrySpec,
        resolve: &dyn Fn(&str) -> Result<Arc<GradedNilpotentAlgebra>>,
    ) -> Result<Self> {
        let algebra = match &spec.algebra {
            AlgebraRef::Key(key) => resolve(key)?,
            AlgebraRef::Inline(inline) => Arc::new(GradedNilpotentAlgebra::from_spec(inline)?),
        };
        let mode = algebra.mode();
        let to_matrix = |rows: &Vec<Vec<Scalar>>| -> Matrix {
            Matrix::from_rows(
                rows.iter()
                    .map(|r| r.iter().map(|s| s.clone().into_mode(mode)).collect())
                    .collect(),
            )
        };
        let degree_matrix = to_matrix(&spec.degrees);
        if degree_matrix.rows != spec.rank {
            return Err(Error::DimensionMismatch { expected: spec.rank, got: degree_matrix.rows });
        }
        let k_generators = spec.k_generators.iter().map(|g| to_matrix(g)).collect();
        let inner_product = spec.inner_product.as_ref().map(|g| to_matrix(g));
        Self::new(algebra, degree_matrix, k_generators, inner_product)
    }

    pub fn to_spec(&self) -> RayGeometrySpec {
        RayGeometrySpec {
            algebra: AlgebraRef::Inline(self.algebra.to_spec()),
            rank: self.rank,
            degrees: self.degree_matrix.rows_vec(),
            k_generators: self.k_generators.iter().map(Matrix::rows_vec).collect(),
            inner_product: Some(self.inner_product.rows_vec()),
        }
    }

    pub fn algebra(&self) -> &Arc<GradedNilpotentAlgebra> {
        &self.algebra
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree_matrix(&self) -> &Matrix {
        &self.degree_matrix
    }

    pub fn k_generators(&self) -> &[Matrix] {
        &self.k_generators
    }

    pub fn inner_product(&self) -> &Matrix {
        &self.inner_product
    }

    /// Degree column of basis vector `q` as exact values.
    pub fn degree_column(&self, q: usize) -> Vector {
        self.degree_matrix.col(q)
    }

    /// For rank one, the scalar degree of basis vector `q` as f64.
    pub fn scalar_degree(&self, q: usize) -> f64 {
        self.degree_matrix[(0, q)].to_f64()
    }

    /// Diagonal matrix of `A` for torus coordinates `a`:
    /// entry `q` is `prod_i exp(a_i)^{d_{i,q}}`.
    pub fn a_element(&self, a_coords: &[f64]) -> Matrix {
        assert_eq!(a_coords.len(), self.rank, "a-coordinate count must equal the rank");
        let n = self.algebra.dim();
        let diag: Vec<Scalar> = (0..n)
            .map(|q| {
                let exponent: f64 = (0..self.rank)
                    .map(|i| a_coords[i] * self.degree_matrix[(i, q)].to_f64())
                    .sum();
                Scalar::Float(exponent.exp())
            })
            .collect();
        Matrix::diagonal(&diag)
    }

    /// Same element parameterized by `lambda_i = exp(a_i)`; exact in
    /// rational mode when every degree is an integer.
    pub fn a_element_lambda(&self, lambdas: &[Scalar]) -> Result<Matrix> {
        if lambdas.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, got: lambdas.len() });
        }
        let n = self.algebra.dim();
        let mode = self.algebra.mode();
        let mut diag = Vec::with_capacity(n);
        for q in 0..n {
            let mut entry = Scalar::one(mode);
            for i in 0..self.rank {
                let d = &self.degree_matrix[(i, q)];
                let exponent = d.to_f64();
                if exponent.fract() == 0.0 && exponent.abs() < 62.0 {
                    entry = &entry * &lambdas[i].powi(exponent as i64);
                } else {
                    match (&lambdas[i], mode) {
                        (Scalar::Float(l), ScalarMode::Float) => {
                            entry = &entry * &Scalar::Float(l.powf(exponent));
                        }
                        _ => {
                            return Err(Error::InvalidInput(format!(
                                "degree {d} is not an integer; exact lambda powers are unavailable"
                            )))
                        }
                    }
                }
            }
            diag.push(entry);
        }
        Ok(Matrix::diagonal(&diag))
    }

    /// Group the basis indices by equal degree columns; `K` and `A` both
    /// preserve these blocks.
    pub fn degree_blocks(&self) -> Vec<(Vector, Vec<usize>)> {
        let n = self.algebra.dim();
        let mut blocks: Vec<(Vector, Vec<usize>)> = Vec::new();
        for q in 0..n {
            let col = self.degree_column(q);
            if let Some((_, idxs)) = blocks.iter_mut().find(|(c, _)| {
                linalg::vec_is_zero(&linalg::vec_sub(c, &col), FLOAT_PIVOT_TOL)
            }) {
                idxs.push(q);
            } else {
                blocks.push((col, vec![q]));
            }
        }
        blocks
    }

    /// Run the five ray-geometry conditions and report each one.
    pub fn validate(&self) -> Report {
        let mut report = Report::new();

        // A acts by automorphisms for every torus value iff the degree
        // columns add along nonzero structure constants; this is the exact
        // form of the check, free of floating exponentials.
        let mut viol = Vec::new();
        for (i, j, k, _) in self.algebra.bracket_entries() {
            let ci = self.degree_column(*i);
            let cj = self.degree_column(*j);
            let ck = self.degree_column(*k);
            let sum = linalg::vec_add(&ci, &cj);
            if !linalg::vec_is_zero(&linalg::vec_sub(&sum, &ck), FLOAT_PIVOT_TOL) {
                viol.push(format!(
                    "degree({}) + degree({}) != degree({})",
                    self.algebra.names()[*i],
                    self.algebra.names()[*j],
                    self.algebra.names()[*k]
                ));
            }
        }
        let mut check = Check::exact("a_automorphism", viol.is_empty());
        if !viol.is_empty() {
            check = check.detail(viol.join("; "));
        }
        report.push(check);

        // K-orthogonality: K^T G K = G.
        let mut worst = 0.0f64;
        let mut ok = true;
        for k in &self.k_generators {
            let lhs = k.transpose().mul(&self.inner_product).mul(k);
            let diff = lhs.sub(&self.inner_product);
            let res = diff.sup_norm_f64();
            worst = worst.max(res);
            ok &= diff.is_zero(AUTOMORPHISM_TOL);
        }
        report.push(Check::with_residual("k_orthogonal", ok, worst));

        // K-automorphy.
        let mut worst = 0.0f64;
        let mut ok = true;
        for k in &self.k_generators {
            let res = automorphism_residual(k, &self.algebra);
            worst = worst.max(res);
            ok &= is_automorphism(k, &self.algebra);
        }
        report.push(Check::with_residual("k_automorphism", ok, worst));

        // K commutes with every A element iff K preserves degree blocks.
        let mut viol = Vec::new();
        for (g, k) in self.k_generators.iter().enumerate() {
            for p in 0..k.rows {
                for q in 0..k.cols {
                    if !k[(p, q)].is_zero_within(AUTOMORPHISM_TOL) {
                        let dp = self.degree_column(p);
                        let dq = self.degree_column(q);
                        if !linalg::vec_is_zero(&linalg::vec_sub(&dp, &dq), FLOAT_PIVOT_TOL) {
                            viol.push(format!("generator {g} mixes degree blocks at ({p}, {q})"));
                        }
                    }
                }
            }
        }
        let mut check = Check::exact("k_commutes_with_a", viol.is_empty());
        if !viol.is_empty() {
            check = check.detail(viol.join("; "));
        }
        report.push(check);

        // Basis-layer purity is structural for this algebra representation.
        report.push(Check::exact("basis_layer_purity", true));

        report
    }
}

/// Left translation of the exponential of a linear subspace.
#[derive(Debug, Clone)]
pub struct NilAffineSubspace {
    pub base: GroupElement,
    pub direction: Subspace,
}

impl NilAffineSubspace {
    pub fn new(base: GroupElement, direction: Subspace) -> Self {
        NilAffineSubspace { base, direction }
    }

    /// `y` belongs to `L_base exp(direction)` iff `ln(base^{-1} y)` lies in
    /// the direction subspace.
    pub fn contains(&self, alg: &GradedNilpotentAlgebra, y: &GroupElement) -> Result<bool> {
        let shifted = alg.bch(&alg.inverse(&self.base), y)?;
        Ok(self.direction.contains(&shifted.log, AUTOMORPHISM_TOL))
    }
}

/// Built-in ray geometries on the Heisenberg group.
pub const BUILTIN_RAY_GEOMETRIES: &[&str] = &["heis3_similarity", "heis3_volume", "heis3_rank2"];

/// Construct a built-in ray geometry by key.
pub fn builtin_ray_geometry(key: &str, mode: ScalarMode) -> Result<RayGeometry> {
    let alg = Arc::new(crate::lie::heisenberg3(mode));
    let row = |vals: &[i64]| -> Vec<Scalar> {
        vals.iter().map(|&v| Scalar::from_i64(v, mode)).collect()
    };
    match key {
        // beta, beta, beta^2: the similarity geometry (rank one).
        "heis3_similarity" => {
            let degrees = Matrix::from_rows(vec![row(&[1, 1, 2])]);
            // Quarter turn in the (X, Y) plane, fixing Z.
            let mut k = Matrix::zeros(3, 3, mode);
            k[(0, 1)] = Scalar::from_i64(-1, mode);
            k[(1, 0)] = Scalar::one(mode);
            k[(2, 2)] = Scalar::one(mode);
            RayGeometry::new(alg, degrees, vec![k], None)
        }
        // beta, beta^{-1}, 1: the volume-preserving geometry (rank one).
        "heis3_volume" => {
            let degrees = Matrix::from_rows(vec![row(&[1, -1, 0])]);
            RayGeometry::new(alg, degrees, Vec::new(), None)
        }
        // The maximal diagonal group beta_1, beta_2, beta_1 beta_2.
        "heis3_rank2" => {
            let degrees = Matrix::from_rows(vec![row(&[1, 0, 1]), row(&[0, 1, 1])]);
            RayGeometry::new(alg, degrees, Vec::new(), None)
        }
        _ => Err(Error::UnknownKey(key.to_string())),
    }
}
