//! Small dense linear algebra over [`Scalar`].
//!
//! Everything here works uniformly in exact and float mode. In exact mode the
//! eliminations are literal Gauss-Jordan over the rationals, so row-reduced
//! bases are canonical: two subspaces are equal iff their stored bases are
//! equal. Float mode uses partial pivoting and a zero threshold.

use crate::scalar::{Scalar, ScalarMode};
use crate::{Error, Result};

/// Pivot threshold used to classify float entries as zero during elimination.
pub const FLOAT_PIVOT_TOL: f64 = 1e-12;

pub type Vector = Vec<Scalar>;

pub fn zero_vector(n: usize, mode: ScalarMode) -> Vector {
    vec![Scalar::zero(mode); n]
}

pub fn vec_add(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(c: &Scalar, a: &[Scalar]) -> Vector {
    a.iter().map(|x| c * x).collect()
}

pub fn vec_neg(a: &[Scalar]) -> Vector {
    a.iter().map(|x| -x).collect()
}

pub fn vec_is_zero(a: &[Scalar], tol: f64) -> bool {
    a.iter().all(|x| x.is_zero_within(tol))
}

/// Euclidean norm, always as f64 (used for residuals and normalization).
pub fn vec_norm_f64(a: &[Scalar]) -> f64 {
    a.iter().map(|x| x.to_f64() * x.to_f64()).sum::<f64>().sqrt()
}

pub fn vec_sup_norm_f64(a: &[Scalar]) -> f64 {
    a.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mode = a.first().map(Scalar::mode).unwrap_or(ScalarMode::Exact);
    let mut acc = Scalar::zero(mode);
    for (x, y) in a.iter().zip(b) {
        acc = &acc + &(x * y);
    }
    acc
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, mode: ScalarMode) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(mode); rows * cols] }
    }

    pub fn identity(n: usize, mode: ScalarMode) -> Self {
        let mut m = Matrix::zeros(n, n, mode);
        for i in 0..n {
            m[(i, i)] = Scalar::one(mode);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Self {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn diagonal(diag: &[Scalar]) -> Self {
        let n = diag.len();
        let mode = diag.first().map(Scalar::mode).unwrap_or(ScalarMode::Exact);
        let mut m = Matrix::zeros(n, n, mode);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn mode(&self) -> ScalarMode {
        self.data.first().map(Scalar::mode).unwrap_or(ScalarMode::Exact)
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &other[(i, j)])
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &other[(i, j)])
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| c * &self[(i, j)])
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mode = self.mode();
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Scalar::zero(mode);
            for k in 0..self.cols {
                if !self[(i, k)].is_zero() && !other[(k, j)].is_zero() {
                    acc = &acc + &(&self[(i, k)] * &other[(k, j)]);
                }
            }
            acc
        })
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        let mode = self.mode();
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero(mode);
                for k in 0..self.cols {
                    if !self[(i, k)].is_zero() && !v[k].is_zero() {
                        acc = &acc + &(&self[(i, k)] * &v[k]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_zero_within(tol))
    }

    pub fn sup_norm_f64(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Flatten row-major into a vector (used to treat matrices as vectors).
    pub fn flatten(&self) -> Vector {
        self.data.clone()
    }

    pub fn into_mode(self, mode: ScalarMode) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.into_iter().map(|s| s.into_mode(mode)).collect(),
        }
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Scalar::to_f64).collect())
            .collect()
    }

    /// In-place Gauss-Jordan. Returns pivot column per pivot row.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // Pivot selection: exact mode takes the first nonzero entry,
            // float mode the entry of largest magnitude.
            let mut pivot = None;
            match self.mode() {
                ScalarMode::Exact => {
                    for i in r..self.rows {
                        if !self[(i, c)].is_zero() {
                            pivot = Some(i);
                            break;
                        }
                    }
                }
                ScalarMode::Float => {
                    let mut best = FLOAT_PIVOT_TOL;
                    for i in r..self.rows {
                        let a = self[(i, c)].to_f64().abs();
                        if a > best {
                            best = a;
                            pivot = Some(i);
                        }
                    }
                }
            }
            let Some(p) = pivot else { continue };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                self[(r, j)] = &self[(r, j)] * &inv;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero_within(FLOAT_PIVOT_TOL) {
                    let factor = self[(i, c)].clone();
                    for j in c..self.cols {
                        let delta = &factor * &self[(r, j)];
                        self[(i, j)] = &self[(i, j)] - &delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        // Snap float roundoff in cleared columns to exact zero so echelon
        // bases compare cleanly.
        if self.mode() == ScalarMode::Float {
            for x in &mut self.data {
                if x.is_zero_within(FLOAT_PIVOT_TOL) {
                    *x = Scalar::Float(0.0);
                }
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Canonical basis of the kernel (right null space).
    pub fn kernel(&self) -> Vec<Vector> {
        let mode = self.mode();
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::new();
        for &f in &free {
            let mut v = zero_vector(self.cols, mode);
            v[f] = Scalar::one(mode);
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -&m[(r, f)];
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `self * x = b`; `None` when inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vector> {
        assert_eq!(self.rows, b.len());
        let mode = self.mode();
        let mut aug = Matrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None; // pivot in the constant column
        }
        let mut x = zero_vector(self.cols, mode);
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Scalar::one(self.mode())
            } else {
                Scalar::zero(self.mode())
            }
        });
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(r, &p)| p != r) {
            return Err(Error::SingularMatrix);
        }
        Ok(Matrix::from_fn(n, n, |i, j| aug[(i, j + n)].clone()))
    }

    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mode = self.mode();
        let mut m = self.clone();
        let mut det = Scalar::one(mode);
        for c in 0..n {
            let mut pivot = None;
            match mode {
                ScalarMode::Exact => {
                    for i in c..n {
                        if !m[(i, c)].is_zero() {
                            pivot = Some(i);
                            break;
                        }
                    }
                }
                ScalarMode::Float => {
                    let mut best = 0.0;
                    for i in c..n {
                        let a = m[(i, c)].to_f64().abs();
                        if a > best {
                            best = a;
                            pivot = Some(i);
                        }
                    }
                }
            }
            let Some(p) = pivot else { return Scalar::zero(mode) };
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            det = &det * &m[(c, c)];
            let inv = m[(c, c)].recip();
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let factor = &m[(i, c)] * &inv;
                    for j in c..n {
                        let delta = &factor * &m[(c, j)];
                        m[(i, j)] = &m[(i, j)] - &delta;
                    }
                }
            }
        }
        det
    }

    pub fn pow(&self, mut n: u64) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut result = Matrix::identity(self.rows, self.mode());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        result
    }

    /// Float matrix exponential by scaling and squaring on the Taylor series.
    pub fn exp_f64(&self) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let a = self.clone().into_mode(ScalarMode::Float);
        let norm = a.sup_norm_f64() * self.rows as f64;
        let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let scaled = a.scale(&Scalar::Float(0.5f64.powi(s as i32)));
        let mut term = Matrix::identity(self.rows, ScalarMode::Float);
        let mut sum = term.clone();
        for k in 1..40 {
            term = term.mul(&scaled).scale(&Scalar::Float(1.0 / k as f64));
            sum = sum.add(&term);
            if term.sup_norm_f64() < 1e-19 {
                break;
            }
        }
        let mut out = sum;
        for _ in 0..s {
            out = out.mul(&out);
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

/// Linear subspace stored as a reduced row echelon basis.
///
/// The reduced form is unique for a given span, so equality of spans is
/// equality of representations.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    mode: ScalarMode,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn from_generators(generators: &[Vector], ambient_dim: usize, mode: ScalarMode) -> Self {
        for g in generators {
            assert_eq!(g.len(), ambient_dim, "generator has wrong length");
        }
        if generators.is_empty() {
            return Subspace { ambient_dim, mode, basis: Vec::new() };
        }
        let mut m = Matrix::from_rows(generators.to_vec());
        let pivots = m.rref();
        let basis = (0..pivots.len()).map(|i| m.row(i).to_vec()).collect();
        Subspace { ambient_dim, mode, basis }
    }

    pub fn zero(ambient_dim: usize, mode: ScalarMode) -> Self {
        Subspace { ambient_dim, mode, basis: Vec::new() }
    }

    pub fn full(ambient_dim: usize, mode: ScalarMode) -> Self {
        let rows = (0..ambient_dim)
            .map(|i| {
                let mut v = zero_vector(ambient_dim, mode);
                v[i] = Scalar::one(mode);
                v
            })
            .collect();
        Subspace { ambient_dim, mode, basis: rows }
    }

    /// Span of a set of coordinate axes.
    pub fn coordinate(indices: &[usize], ambient_dim: usize, mode: ScalarMode) -> Self {
        let rows: Vec<Vector> = indices
            .iter()
            .map(|&i| {
                let mut v = zero_vector(ambient_dim, mode);
                v[i] = Scalar::one(mode);
                v
            })
            .collect();
        Subspace::from_generators(&rows, ambient_dim, mode)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Reduce `v` against the echelon basis; the remainder is the component
    /// outside the subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut r = v.to_vec();
        for row in &self.basis {
            let lead = row.iter().position(|x| !x.is_zero_within(FLOAT_PIVOT_TOL));
            if let Some(c) = lead {
                if !r[c].is_zero_within(FLOAT_PIVOT_TOL) {
                    let factor = &r[c] / &row[c];
                    for j in 0..r.len() {
                        let delta = &factor * &row[j];
                        r[j] = &r[j] - &delta;
                    }
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Scalar], tol: f64) -> bool {
        vec_is_zero(&self.reduce(v), tol)
    }

    pub fn contains_subspace(&self, other: &Subspace, tol: f64) -> bool {
        other.basis.iter().all(|v| self.contains(v, tol))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut gens = self.basis.clone();
        gens.extend(other.basis.clone());
        Subspace::from_generators(&gens, self.ambient_dim, self.mode)
    }

    /// Intersection by the Zassenhaus block elimination.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let n = self.ambient_dim;
        let mode = self.mode;
        let mut rows = Vec::new();
        for u in &self.basis {
            let mut row = u.clone();
            row.extend(u.clone());
            rows.push(row);
        }
        for w in &other.basis {
            let mut row = w.clone();
            row.extend(zero_vector(n, mode));
            rows.push(row);
        }
        if rows.is_empty() {
            return Subspace::zero(n, mode);
        }
        let mut m = Matrix::from_rows(rows);
        m.rref();
        let mut gens = Vec::new();
        for i in 0..m.rows {
            let left = &m.row(i)[..n];
            let right = &m.row(i)[n..];
            if vec_is_zero(left, FLOAT_PIVOT_TOL) && !vec_is_zero(right, FLOAT_PIVOT_TOL) {
                gens.push(right.to_vec());
            }
        }
        Subspace::from_generators(&gens, n, mode)
    }

    /// Image under a linear map.
    pub fn map(&self, f: &Matrix) -> Subspace {
        let gens: Vec<Vector> = self.basis.iter().map(|v| f.apply(v)).collect();
        Subspace::from_generators(&gens, f.rows, self.mode)
    }

    /// `{ x in self : <x, s>_gram = 0 for all s in sub }`.
    pub fn orthogonal_complement_within(&self, sub: &Subspace, gram: &Matrix) -> Subspace {
        if sub.is_zero() {
            return self.clone();
        }
        // Constraints on coefficients c of x = c^T * basis(self).
        let mut constraint = Matrix::zeros(sub.dim(), self.dim(), self.mode);
        for (i, s) in sub.basis.iter().enumerate() {
            let gs = gram.apply(s);
            for (j, b) in self.basis.iter().enumerate() {
                constraint[(i, j)] = dot(b, &gs);
            }
        }
        let coeff_basis = constraint.kernel();
        let gens: Vec<Vector> = coeff_basis
            .iter()
            .map(|c| {
                let mut v = zero_vector(self.ambient_dim, self.mode);
                for (cj, b) in c.iter().zip(&self.basis) {
                    for (vk, bk) in v.iter_mut().zip(b) {
                        *vk = &*vk + &(cj * bk);
                    }
                }
                v
            })
            .collect();
        Subspace::from_generators(&gens, self.ambient_dim, self.mode)
    }

    pub fn into_mode(self, mode: ScalarMode) -> Subspace {
        let basis = self
            .basis
            .into_iter()
            .map(|v| v.into_iter().map(|s| s.into_mode(mode)).collect())
            .collect();
        Subspace { ambient_dim: self.ambient_dim, mode, basis }
    }
}

/// Minimal polynomial of a square matrix, exact mode only.
///
/// Returned as monic coefficients `c_0 + c_1 x + ... + x^d` (the leading 1 is
/// included). Found as the first linear dependency among flattened powers.
pub fn minimal_polynomial(a: &Matrix) -> Vec<Scalar> {
    assert_eq!(a.mode(), ScalarMode::Exact, "minimal polynomial requires exact mode");
    let n = a.rows;
    let mut powers: Vec<Matrix> = vec![Matrix::identity(n, ScalarMode::Exact)];
    loop {
        let d = powers.len();
        let next = powers.last().unwrap().mul(a);
        // Try to express `next` in the span of the previous powers.
        let system = Matrix::from_fn(n * n, d, |i, j| powers[j].flatten()[i].clone());
        if let Some(coeffs) = system.solve(&next.flatten()) {
            let mut poly: Vec<Scalar> = coeffs.iter().map(|c| -c).collect();
            poly.push(Scalar::one(ScalarMode::Exact));
            return poly;
        }
        powers.push(next);
        assert!(powers.len() <= n + 1, "minimal polynomial search exceeded dimension");
    }
}

/// Evaluate a polynomial given by coefficients `c_0 + c_1 x + ...` at `x`.
pub fn poly_eval(coeffs: &[Scalar], x: &Scalar) -> Scalar {
    let mode = x.mode();
    let mut acc = Scalar::zero(mode);
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Divide a polynomial by `(x - root)`, assuming the root is exact.
pub fn poly_deflate(coeffs: &[Scalar], root: &Scalar) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(root.mode()); coeffs.len() - 1];
    let mut carry = Scalar::zero(root.mode());
    for i in (0..coeffs.len() - 1).rev() {
        carry = &coeffs[i + 1] + &(root * &carry);
        out[i] = carry.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(vals: &[&[i64]]) -> Matrix {
        Matrix::from_fn(vals.len(), vals[0].len(), |i, j| {
            Scalar::from_i64(vals[i][j], ScalarMode::Exact)
        })
    }

    #[test]
    fn rref_and_kernel() {
        let m = exact(&[&[1, 2, 3], &[2, 4, 6], &[1, 1, 1]]);
        assert_eq!(m.rank(), 2);
        let ker = m.kernel();
        assert_eq!(ker.len(), 1);
        for v in &ker {
            assert!(vec_is_zero(&m.apply(v), 0.0));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = exact(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2, ScalarMode::Exact));
        assert_eq!(m.det(), Scalar::from_i64(1, ScalarMode::Exact));
    }

    #[test]
    fn singular_inverse_fails() {
        let m = exact(&[&[1, 2], &[2, 4]]);
        assert!(matches!(m.inverse(), Err(Error::SingularMatrix)));
        assert!(m.det().is_zero());
    }

    #[test]
    fn subspace_canonical_equality() {
        let mode = ScalarMode::Exact;
        let a = Subspace::from_generators(
            &[
                vec![Scalar::from_i64(1, mode), Scalar::from_i64(1, mode), Scalar::zero(mode)],
                vec![Scalar::from_i64(0, mode), Scalar::from_i64(2, mode), Scalar::zero(mode)],
            ],
            3,
            mode,
        );
        let b = Subspace::coordinate(&[0, 1], 3, mode);
        assert_eq!(a, b);
        assert!(a.contains(&[Scalar::ratio(3, 7), Scalar::ratio(-1, 2), Scalar::zero(mode)], 0.0));
        assert!(!a.contains(&[Scalar::zero(mode), Scalar::zero(mode), Scalar::one(mode)], 0.0));
    }

    #[test]
    fn zassenhaus_intersection() {
        let mode = ScalarMode::Exact;
        let xy = Subspace::coordinate(&[0, 1], 3, mode);
        let mut diag = zero_vector(3, mode);
        diag[1] = Scalar::one(mode);
        diag[2] = Scalar::one(mode);
        let yz_diag = Subspace::from_generators(
            &[diag, Subspace::coordinate(&[2], 3, mode).basis()[0].clone()],
            3,
            mode,
        );
        let inter = xy.intersect(&yz_diag);
        assert_eq!(inter, Subspace::coordinate(&[1], 3, mode));
    }

    #[test]
    fn minimal_polynomial_of_nilpotent() {
        // Strictly upper triangular 3x3 with one-step shifts: x^3 minimal.
        let mut m = Matrix::zeros(3, 3, ScalarMode::Exact);
        m[(0, 1)] = Scalar::one(ScalarMode::Exact);
        m[(1, 2)] = Scalar::one(ScalarMode::Exact);
        let p = minimal_polynomial(&m);
        assert_eq!(p.len(), 4);
        assert!(p[0].is_zero() && p[1].is_zero() && p[2].is_zero());
    }

    #[test]
    fn float_exp_of_rotation_generator() {
        let mut j = Matrix::zeros(2, 2, ScalarMode::Float);
        j[(0, 1)] = Scalar::Float(-1.0);
        j[(1, 0)] = Scalar::Float(1.0);
        let r = j.scale(&Scalar::Float(std::f64::consts::FRAC_PI_2)).exp_f64();
        // Quarter turn.
        assert!((r[(0, 0)].to_f64()).abs() < 1e-14);
        assert!((r[(0, 1)].to_f64() + 1.0).abs() < 1e-14);
        assert!((r[(1, 0)].to_f64() - 1.0).abs() < 1e-14);
    }
}
