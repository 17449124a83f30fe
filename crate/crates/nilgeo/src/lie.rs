//! Exact calculus on graded nilpotent Lie algebras and their simply
//! connected groups, for nilpotency order at most three.
//!
//! A graded algebra `n = n_1 + ... + n_k` with `[n_i, n_j] c n_{i+j}` is
//! described by structure constants on a basis in which every vector lies in
//! a single layer. Group elements are stored in exponential coordinates of
//! the first kind, so the product is the Baker-Campbell-Hausdorff polynomial
//!
//! ```text
//! exp(x) exp(y) = exp(x + y + 1/2 [x,y] + 1/12 ([x,[x,y]] - [y,[x,y]]))
//! ```
//!
//! which terminates exactly: all four-fold brackets vanish in order <= 3, so
//! the truncation is the full group law and associativity holds with no
//! error term at all in rational mode.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::linalg::{self, Matrix, Subspace, Vector, FLOAT_PIVOT_TOL};
use crate::report::{Check, Report};
use crate::scalar::{Scalar, ScalarMode};
use crate::{Error, Result};

/// Largest nilpotency order with a closed-form group law here.
pub const MAX_ORDER: usize = 3;

/// Serialized form of an algebra.
///
/// Indices are 1-based; brackets omitted from the list are zero, and for
/// every listed `[i, j, k, c]` the mirrored constant `c_{ji}^k = -c` is
/// implied unless it is listed explicitly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub dim: usize,
    pub names: Vec<String>,
    pub degrees: Vec<usize>,
    #[serde(default)]
    pub brackets: Vec<(usize, usize, usize, Scalar)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ScalarMode>,
}

/// A graded nilpotent Lie algebra with a fixed scalar mode.
#[derive(Debug, Clone)]
pub struct GradedNilpotentAlgebra {
    dim: usize,
    mode: ScalarMode,
    names: Vec<String>,
    degrees: Vec<usize>,
    /// Raw constants exactly as supplied (0-based keys), kept for validation.
    raw: BTreeMap<(usize, usize, usize), Scalar>,
    /// Effective constants with antisymmetry filled in, keyed by i < j.
    entries: Vec<(usize, usize, usize, Scalar)>,
    order: usize,
}

/// A point of the simply connected group, in log (first-kind) coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub log: Vector,
}

impl GroupElement {
    pub fn new(log: Vector) -> Self {
        GroupElement { log }
    }

    pub fn dim(&self) -> usize {
        self.log.len()
    }
}

impl GradedNilpotentAlgebra {
    /// Build without validating; [`validate`](Self::validate) reports issues.
    pub fn new_unchecked(
        mode: ScalarMode,
        names: Vec<String>,
        degrees: Vec<usize>,
        brackets: Vec<(usize, usize, usize, Scalar)>,
    ) -> Self {
        let dim = degrees.len();
        let mut raw: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
        for (i, j, k, c) in brackets {
            let c = c.into_mode(mode);
            raw.entry((i, j, k))
                .and_modify(|acc| *acc = &*acc + &c)
                .or_insert(c);
        }
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                for k in 0..dim {
                    let c = Self::effective_raw(&raw, i, j, k, mode);
                    if !c.is_zero() {
                        entries.push((i, j, k, c));
                    }
                }
            }
        }
        let order = degrees.iter().copied().max().unwrap_or(1);
        GradedNilpotentAlgebra { dim, mode, names, degrees, raw, entries, order }
    }

    /// Build and reject anything that fails the grading invariants.
    pub fn new(
        mode: ScalarMode,
        names: Vec<String>,
        degrees: Vec<usize>,
        brackets: Vec<(usize, usize, usize, Scalar)>,
    ) -> Result<Self> {
        let alg = Self::new_unchecked(mode, names, degrees, brackets);
        let report = alg.validate();
        if !report.pass() {
            let msg = report
                .failures()
                .map(|c| c.detail.clone().unwrap_or_else(|| c.name.clone()))
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Error::InvalidAlgebra(msg));
        }
        Ok(alg)
    }

    fn effective_raw(
        raw: &BTreeMap<(usize, usize, usize), Scalar>,
        i: usize,
        j: usize,
        k: usize,
        mode: ScalarMode,
    ) -> Scalar {
        if let Some(c) = raw.get(&(i, j, k)) {
            c.clone()
        } else if let Some(c) = raw.get(&(j, i, k)) {
            -c
        } else {
            Scalar::zero(mode)
        }
    }

    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self> {
        let mode = spec.mode.unwrap_or(ScalarMode::Exact);
        if spec.names.len() != spec.dim || spec.degrees.len() != spec.dim {
            return Err(Error::InvalidAlgebra(format!(
                "names/degrees length must equal dim = {}",
                spec.dim
            )));
        }
        let brackets = spec
            .brackets
            .iter()
            .map(|(i, j, k, c)| {
                for &idx in &[*i, *j, *k] {
                    if idx == 0 || idx > spec.dim {
                        return Err(Error::InvalidAlgebra(format!(
                            "bracket index {idx} out of range 1..={}",
                            spec.dim
                        )));
                    }
                }
                Ok((i - 1, j - 1, k - 1, c.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mode, spec.names.clone(), spec.degrees.clone(), brackets)
    }

    pub fn to_spec(&self) -> AlgebraSpec {
        AlgebraSpec {
            dim: self.dim,
            names: self.names.clone(),
            degrees: self.degrees.clone(),
            brackets: self
                .entries
                .iter()
                .map(|(i, j, k, c)| (i + 1, j + 1, k + 1, c.clone()))
                .collect(),
            mode: Some(self.mode),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Nilpotency order, i.e. the highest nonempty layer.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Nonzero structure constants with `i < j`, 0-based.
    pub fn bracket_entries(&self) -> &[(usize, usize, usize, Scalar)] {
        &self.entries
    }

    pub fn zero_vector(&self) -> Vector {
        linalg::zero_vector(self.dim, self.mode)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(self.zero_vector())
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = self.zero_vector();
        v[i] = Scalar::one(self.mode);
        v
    }

    /// Convert the whole algebra to another scalar mode.
    pub fn into_mode(&self, mode: ScalarMode) -> GradedNilpotentAlgebra {
        GradedNilpotentAlgebra::new_unchecked(
            mode,
            self.names.clone(),
            self.degrees.clone(),
            self.entries.clone(),
        )
    }

    pub fn check_vector(&self, v: &[Scalar]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        if v.iter().any(|s| s.mode() != self.mode) {
            return Err(Error::ModeMismatch);
        }
        Ok(())
    }

    fn check_order(&self) -> Result<()> {
        if self.order > MAX_ORDER {
            return Err(Error::UnsupportedOrder { order: self.order });
        }
        Ok(())
    }

    /// Lie bracket by bilinear extension of the structure constants.
    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vector> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        let mut out = self.zero_vector();
        for (i, j, k, c) in &self.entries {
            let coeff = &(&x[*i] * &y[*j]) - &(&x[*j] * &y[*i]);
            if !coeff.is_zero() {
                out[*k] = &out[*k] + &(&coeff * c);
            }
        }
        Ok(out)
    }

    /// Matrix of `y -> [x, y]` in the algebra basis.
    pub fn ad_matrix(&self, x: &[Scalar]) -> Result<Matrix> {
        self.check_vector(x)?;
        let mut m = Matrix::zeros(self.dim, self.dim, self.mode);
        for (i, j, k, c) in &self.entries {
            // column j gets c * x_i, column i gets -c * x_j
            let a = &x[*i] * c;
            let b = &x[*j] * c;
            m[(*k, *j)] = &m[(*k, *j)] + &a;
            m[(*k, *i)] = &m[(*k, *i)] - &b;
        }
        Ok(m)
    }

    /// Group law in log coordinates via the closed-form BCH polynomial.
    pub fn bch(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check_order()?;
        self.check_vector(&x.log)?;
        self.check_vector(&y.log)?;
        let mut z = linalg::vec_add(&x.log, &y.log);
        if self.order >= 2 {
            let xy = self.bracket(&x.log, &y.log)?;
            let half = match self.mode {
                ScalarMode::Exact => Scalar::ratio(1, 2),
                ScalarMode::Float => Scalar::Float(0.5),
            };
            z = linalg::vec_add(&z, &linalg::vec_scale(&half, &xy));
            if self.order >= 3 {
                let xxy = self.bracket(&x.log, &xy)?;
                let yxy = self.bracket(&y.log, &xy)?;
                let twelfth = match self.mode {
                    ScalarMode::Exact => Scalar::ratio(1, 12),
                    ScalarMode::Float => Scalar::Float(1.0 / 12.0),
                };
                z = linalg::vec_add(
                    &z,
                    &linalg::vec_scale(&twelfth, &linalg::vec_sub(&xxy, &yxy)),
                );
            }
        }
        Ok(GroupElement::new(z))
    }

    /// `exp(x)^{-1} = exp(-x)`, in every nilpotency order.
    pub fn inverse(&self, x: &GroupElement) -> GroupElement {
        GroupElement::new(linalg::vec_neg(&x.log))
    }

    /// `exp(x) exp(y) exp(x)^{-1}` through `Ad_{exp(x)} = exp(ad_x)`.
    pub fn conjugate(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check_order()?;
        self.check_vector(&x.log)?;
        self.check_vector(&y.log)?;
        let mut term = y.log.clone();
        let mut sum = y.log.clone();
        for n in 1..=self.order {
            term = self.bracket(&x.log, &term)?;
            if linalg::vec_is_zero(&term, 0.0) {
                break;
            }
            let factorial: i64 = (1..=n as i64).product();
            let coeff = match self.mode {
                ScalarMode::Exact => Scalar::ratio(1, factorial),
                ScalarMode::Float => Scalar::Float(1.0 / factorial as f64),
            };
            sum = linalg::vec_add(&sum, &linalg::vec_scale(&coeff, &term));
        }
        Ok(GroupElement::new(sum))
    }

    /// One-parameter powers `t x = exp(t ln x)`.
    pub fn scalar_power(&self, x: &GroupElement, t: &Scalar) -> GroupElement {
        GroupElement::new(linalg::vec_scale(t, &x.log))
    }

    /// Point of the geodesic through `p` with direction `v` at time `t`.
    pub fn geodesic_point(&self, p: &GroupElement, v: &[Scalar], t: &Scalar) -> Result<GroupElement> {
        self.check_vector(v)?;
        let step = GroupElement::new(linalg::vec_scale(t, v));
        self.bch(p, &step)
    }

    /// Subspace spanned by the basis vectors of one graded layer.
    pub fn layer(&self, grade: usize) -> Subspace {
        let idx: Vec<usize> = (0..self.dim).filter(|&i| self.degrees[i] == grade).collect();
        Subspace::coordinate(&idx, self.dim, self.mode)
    }

    /// Zero out every coordinate whose basis vector is not in layer `grade`.
    pub fn layer_component(&self, v: &[Scalar], grade: usize) -> Vector {
        (0..self.dim)
            .map(|i| if self.degrees[i] == grade { v[i].clone() } else { Scalar::zero(self.mode) })
            .collect()
    }

    /// Unique decomposition `x = exp(x1) exp(x2)` with `ln x1 in L1` and
    /// `ln x2 in L2`, solved layer by layer from grade 1 upward.
    pub fn split_decompose(
        &self,
        x: &GroupElement,
        l1: &Subspace,
        l2: &Subspace,
    ) -> Result<(GroupElement, GroupElement)> {
        self.check_order()?;
        self.check_vector(&x.log)?;
        if l1.dim() + l2.dim() != self.dim || l1.sum(l2).dim() != self.dim {
            return Err(Error::IncompatibleSplit(format!(
                "L1 (dim {}) and L2 (dim {}) do not form a direct sum of the algebra (dim {})",
                l1.dim(),
                l2.dim(),
                self.dim
            )));
        }
        // Per-layer compatibility: n_g = (n_g ∩ L1) + (n_g ∩ L2) for each grade.
        let mut layer_bases: Vec<(usize, Vec<Vector>, Vec<Vector>)> = Vec::new();
        for g in 1..=self.order {
            let layer = self.layer(g);
            let a = layer.intersect(l1);
            let b = layer.intersect(l2);
            if a.dim() + b.dim() != layer.dim() {
                return Err(Error::IncompatibleSplit(format!(
                    "layer {g} splits as {} + {} but has dimension {}",
                    a.dim(),
                    b.dim(),
                    layer.dim()
                )));
            }
            layer_bases.push((g, a.basis().to_vec(), b.basis().to_vec()));
        }
        let mut a = self.identity();
        let mut b = self.identity();
        for (g, basis1, basis2) in &layer_bases {
            let current = self.bch(&a, &b)?;
            let residual = linalg::vec_sub(&x.log, &current.log);
            let delta = self.layer_component(&residual, *g);
            if linalg::vec_is_zero(&delta, 0.0) {
                continue;
            }
            let mut cols: Vec<Vector> = basis1.clone();
            cols.extend(basis2.clone());
            let system = Matrix::from_rows(cols.clone()).transpose();
            let coeffs = system.solve(&delta).ok_or_else(|| {
                Error::IncompatibleSplit(format!("grade-{g} component not reachable from the split"))
            })?;
            for (idx, c) in coeffs.iter().enumerate() {
                let target = if idx < basis1.len() { &mut a } else { &mut b };
                let basis_vec = &cols[idx];
                for (t, e) in target.log.iter_mut().zip(basis_vec) {
                    *t = &*t + &(c * e);
                }
            }
        }
        // The layer recursion is exact; keep a final consistency check for
        // float mode where pivoting may have snapped small entries.
        let recomposed = self.bch(&a, &b)?;
        let err = linalg::vec_sup_norm_f64(&linalg::vec_sub(&recomposed.log, &x.log));
        if err > 1e-9 {
            return Err(Error::IncompatibleSplit(format!("recomposition residual {err:.3e}")));
        }
        Ok((a, b))
    }

    /// Check the four structural invariants, reporting every violation.
    pub fn validate(&self) -> Report {
        let mut report = Report::new();

        let mut anti_viol = Vec::new();
        for (&(i, j, k), c) in &self.raw {
            if i == j {
                if !c.is_zero() {
                    anti_viol.push(format!("c[{},{}]^{} = {} must vanish", i + 1, j + 1, k + 1, c));
                }
                continue;
            }
            if let Some(opposite) = self.raw.get(&(j, i, k)) {
                if !(&(c + opposite)).is_zero_within(FLOAT_PIVOT_TOL) {
                    anti_viol.push(format!(
                        "c[{},{}]^{} = {} vs c[{},{}]^{} = {}",
                        i + 1,
                        j + 1,
                        k + 1,
                        c,
                        j + 1,
                        i + 1,
                        k + 1,
                        opposite
                    ));
                }
            }
        }
        let mut check = Check::exact("antisymmetry", anti_viol.is_empty());
        if !anti_viol.is_empty() {
            check = check.detail(anti_viol.join("; "));
        }
        report.push(check);

        let mut grading_viol = Vec::new();
        for (i, j, k, c) in &self.entries {
            if self.degrees[*k] != self.degrees[*i] + self.degrees[*j] {
                grading_viol.push(format!(
                    "[{}, {}] = {}*{} lands in layer {} but should be {}",
                    self.names[*i],
                    self.names[*j],
                    c,
                    self.names[*k],
                    self.degrees[*k],
                    self.degrees[*i] + self.degrees[*j]
                ));
            }
        }
        let mut check = Check::exact("grading_compatibility", grading_viol.is_empty());
        if !grading_viol.is_empty() {
            check = check.detail(grading_viol.join("; "));
        }
        report.push(check);

        let mut jacobi_viol = Vec::new();
        let mut max_res = 0.0f64;
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in j + 1..self.dim {
                    let ei = self.basis_vector(i);
                    let ej = self.basis_vector(j);
                    let ek = self.basis_vector(k);
                    let t1 = self.bracket(&self.bracket(&ei, &ej).unwrap(), &ek).unwrap();
                    let t2 = self.bracket(&self.bracket(&ej, &ek).unwrap(), &ei).unwrap();
                    let t3 = self.bracket(&self.bracket(&ek, &ei).unwrap(), &ej).unwrap();
                    let sum = linalg::vec_add(&linalg::vec_add(&t1, &t2), &t3);
                    if !linalg::vec_is_zero(&sum, FLOAT_PIVOT_TOL) {
                        max_res = max_res.max(linalg::vec_sup_norm_f64(&sum));
                        jacobi_viol.push(format!(
                            "triple ({}, {}, {})",
                            self.names[i], self.names[j], self.names[k]
                        ));
                    }
                }
            }
        }
        let mut check = Check::with_residual("jacobi", jacobi_viol.is_empty(), max_res);
        if !jacobi_viol.is_empty() {
            check = check.detail(jacobi_viol.join("; "));
        }
        report.push(check);

        let order_ok = self.order <= MAX_ORDER && self.degrees.iter().all(|&d| d >= 1);
        let mut check = Check::exact("order_bound", order_ok);
        if !order_ok {
            check = check.detail(format!("order {} exceeds {MAX_ORDER} or a degree is zero", self.order));
        }
        report.push(check);

        report
    }
}

/// Keys of algebras shipped with the crate.
pub const BUILTIN_ALGEBRAS: &[&str] = &["heis3", "abelian3"];

/// Load a built-in algebra by key.
pub fn builtin_algebra(key: &str) -> Result<Arc<GradedNilpotentAlgebra>> {
    let alg = match key {
        "heis3" => heisenberg3(ScalarMode::Exact),
        "abelian3" => abelian(3, ScalarMode::Exact),
        _ => return Err(Error::UnknownKey(key.to_string())),
    };
    Ok(Arc::new(alg))
}

/// Three-dimensional Heisenberg algebra, `[X, Y] = Z`, grading (1, 1, 2).
pub fn heisenberg3(mode: ScalarMode) -> GradedNilpotentAlgebra {
    GradedNilpotentAlgebra::new(
        mode,
        vec!["X".into(), "Y".into(), "Z".into()],
        vec![1, 1, 2],
        vec![(0, 1, 2, Scalar::one(mode))],
    )
    .expect("heis3 is valid")
}

/// Abelian algebra of the given dimension, all generators in layer one.
pub fn abelian(dim: usize, mode: ScalarMode) -> GradedNilpotentAlgebra {
    GradedNilpotentAlgebra::new(
        mode,
        (0..dim).map(|i| format!("e{}", i + 1)).collect(),
        vec![1; dim],
        Vec::new(),
    )
    .expect("abelian algebra is valid")
}
