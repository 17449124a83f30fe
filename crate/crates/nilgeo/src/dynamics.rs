//! Cocycle dynamics on a ray geometry.
//!
//! The objects here simulate the contraction data extracted from a
//! recurrent incomplete geodesic: a cocycle of nil-affine maps `T_{ji}`,
//! the limit tags `omega_q in {0, 1, oo}` of the diagonal factors, the
//! induced splitting `E + P + F` of the algebra, fixed points on `exp(F)`,
//! the invisible subalgebra `I` with its invariant complement `V`, and the
//! radial flow scaling the `V`-part, whose volume expansion rate `e^{t dim V}`
//! is checked numerically. A properness probe searches for explicit
//! witnesses of non-proper behavior; absence of a witness is reported as
//! inconclusive, never as a proof.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::lie::{GradedNilpotentAlgebra, GroupElement};
use crate::linalg::{self, Matrix, Subspace, Vector};
use crate::nilaffine::{NilAffineMap, RayGeometry};
use crate::report::{Check, Report};
use crate::sampling::Sampler;
use crate::scalar::{Scalar, ScalarMode};
use crate::{Error, Result};

/// Residual accepted on cocycle relations and K/A factorizations.
pub const COCYCLE_TOL: f64 = 1e-10;
/// Slope threshold separating genuine growth or decay of the diagonal
/// factors from a constant sequence.
pub const TREND_SLOPE_TOL: f64 = 1e-6;
/// Maximal deviation from a constant accepted for an omega = 1 tag.
pub const TREND_CONST_TOL: f64 = 1e-9;

/// Whether a family contracts or expands as the index grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Contracting,
    Expanding,
}

/// A cocycle of nil-affine maps over a ray geometry, either generated by
/// powers of a single map or given as an explicit table.
#[derive(Debug, Clone)]
pub enum Family {
    /// `T_{ji} = g^{j-i}`.
    Power { generator: NilAffineMap },
    /// Explicit maps for `0 <= i < j <= size`.
    Table { size: usize, maps: BTreeMap<(usize, usize), NilAffineMap> },
}

#[derive(Debug, Clone)]
pub struct Cocycle {
    pub geometry: RayGeometry,
    pub family: Family,
}

impl Cocycle {
    pub fn power(geometry: RayGeometry, generator: NilAffineMap) -> Self {
        Cocycle { geometry, family: Family::Power { generator } }
    }

    pub fn table(geometry: RayGeometry, size: usize, maps: BTreeMap<(usize, usize), NilAffineMap>) -> Self {
        Cocycle { geometry, family: Family::Table { size, maps } }
    }

    pub fn algebra(&self) -> &std::sync::Arc<GradedNilpotentAlgebra> {
        self.geometry.algebra()
    }

    /// Largest index available for checks.
    pub fn max_index(&self) -> usize {
        match &self.family {
            Family::Power { .. } => 8,
            Family::Table { size, .. } => *size,
        }
    }

    /// The map `T_{ji}` for `j >= i`.
    pub fn map(&self, j: usize, i: usize) -> Result<NilAffineMap> {
        if j < i {
            return Err(Error::InvalidInput(format!("cocycle index ({j}, {i}) needs j >= i")));
        }
        match &self.family {
            Family::Power { generator } => generator.pow((j - i) as i64),
            Family::Table { maps, .. } => {
                if j == i {
                    return Ok(NilAffineMap::identity(self.algebra().clone()));
                }
                maps.get(&(j, i))
                    .cloned()
                    .ok_or_else(|| Error::InvalidInput(format!("cocycle table has no entry ({j}, {i})")))
            }
        }
    }

    /// Replace the family by its inverse (used to bring an expanding family
    /// into the contracting orientation the splitting machinery assumes).
    pub fn inverted(&self) -> Result<Cocycle> {
        let family = match &self.family {
            Family::Power { generator } => Family::Power { generator: generator.invert()? },
            Family::Table { size, maps } => {
                let mut inv = BTreeMap::new();
                for (&key, map) in maps {
                    inv.insert(key, map.invert()?);
                }
                Family::Table { size: *size, maps: inv }
            }
        };
        Ok(Cocycle { geometry: self.geometry.clone(), family })
    }
}

/// Factor a linear part as `f = f_K f_A` by per-degree-block polar
/// decomposition: within each block of equal degree column, `f_A` is the
/// scalar `beta` with `f^T G f = beta^2 G`, and `f_K = f / beta`.
/// Returns the K factor, the diagonal of the A factor per basis vector,
/// and the factorization residual.
pub fn ka_factor(geometry: &RayGeometry, f: &Matrix) -> Result<(Matrix, Vec<f64>, f64)> {
    let n = f.rows;
    let gram = geometry.inner_product();
    let blocks = geometry.degree_blocks();
    let mut residual = 0.0f64;
    // off-block entries must vanish: KA preserves the degree blocks
    for (bi, (_, idx)) in blocks.iter().enumerate() {
        for (bj, (_, jdx)) in blocks.iter().enumerate() {
            if bi == bj {
                continue;
            }
            for &p in idx {
                for &q in jdx {
                    residual = residual.max(f[(p, q)].to_f64().abs());
                }
            }
        }
    }
    let mut betas = vec![0.0f64; n];
    let mut k = Matrix::zeros(n, n, ScalarMode::Float);
    for (_, idx) in &blocks {
        // beta^2 from the Gram ratio on the block, then consistency check.
        let m = idx.len();
        let sub_f = Matrix::from_fn(m, m, |a, b| Scalar::Float(f[(idx[a], idx[b])].to_f64()));
        let sub_g = Matrix::from_fn(m, m, |a, b| Scalar::Float(gram[(idx[a], idx[b])].to_f64()));
        let ftgf = sub_f.transpose().mul(&sub_g).mul(&sub_f);
        let mut beta2 = 0.0f64;
        let mut weight = 0.0f64;
        for a in 0..m {
            let g_aa = sub_g[(a, a)].to_f64();
            beta2 += ftgf[(a, a)].to_f64();
            weight += g_aa;
        }
        let beta2 = beta2 / weight;
        if beta2 <= 0.0 {
            return Err(Error::InvalidInput("linear part is singular on a degree block".into()));
        }
        let check = ftgf.sub(&sub_g.scale(&Scalar::Float(beta2)));
        residual = residual.max(check.sup_norm_f64() / beta2.max(1.0));
        let beta = beta2.sqrt();
        for (a, &p) in idx.iter().enumerate() {
            betas[p] = beta;
            for (b, &q) in idx.iter().enumerate() {
                k[(p, q)] = Scalar::Float(sub_f[(a, b)].to_f64() / beta);
            }
        }
    }
    Ok((k, betas, residual))
}

/// Verify the cocycle relation on all available triples and on the K and A
/// factors separately.
pub fn cocycle_check(cocycle: &Cocycle) -> Result<Report> {
    let mut report = Report::new();
    let m = cocycle.max_index();
    let mut worst = 0.0f64;
    let mut worst_triple = None;
    let mut worst_k = 0.0f64;
    let mut worst_a = 0.0f64;
    let mut worst_factor = 0.0f64;
    for i in 0..m {
        for j in i + 1..=m {
            for k in j + 1..=m {
                let t_ki = cocycle.map(k, i)?;
                let t_kj = cocycle.map(k, j)?;
                let t_ji = cocycle.map(j, i)?;
                let composed = t_kj.compose(&t_ji)?;
                let c_res = linalg::vec_sup_norm_f64(&linalg::vec_sub(
                    &t_ki.translation().log,
                    &composed.translation().log,
                ));
                let f_res = t_ki.linear().sub(composed.linear()).sup_norm_f64();
                let res = c_res.max(f_res);
                if res > worst {
                    worst = res;
                    worst_triple = Some((k, j, i));
                }
                // factor cocycles
                let (k_ki, a_ki, r1) = ka_factor(&cocycle.geometry, t_ki.linear())?;
                let (k_kj, a_kj, r2) = ka_factor(&cocycle.geometry, t_kj.linear())?;
                let (k_ji, a_ji, r3) = ka_factor(&cocycle.geometry, t_ji.linear())?;
                worst_factor = worst_factor.max(r1).max(r2).max(r3);
                let k_prod = k_kj.mul(&k_ji);
                worst_k = worst_k.max(k_ki.sub(&k_prod).sup_norm_f64());
                for q in 0..a_ki.len() {
                    let rel = (a_ki[q] - a_kj[q] * a_ji[q]).abs() / a_ki[q].abs().max(1.0);
                    worst_a = worst_a.max(rel);
                }
            }
        }
    }
    let mut check = Check::with_residual("cocycle_relation", worst <= COCYCLE_TOL, worst);
    if let Some((k, j, i)) = worst_triple {
        if worst > COCYCLE_TOL {
            check = check.detail(format!("worst triple T_({k},{i}) vs T_({k},{j}) T_({j},{i})"));
        }
    }
    report.push(check);
    report.push(Check::with_residual("ka_factorization", worst_factor <= COCYCLE_TOL, worst_factor));
    report.push(Check::with_residual("k_factor_cocycle", worst_k <= COCYCLE_TOL, worst_k));
    report.push(Check::with_residual("a_factor_cocycle", worst_a <= COCYCLE_TOL, worst_a));
    Ok(report)
}

/// Limit tag of a diagonal factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Omega {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "oo")]
    Infinity,
}

/// The linear decomposition `E + P + F` induced by the omega tags.
#[derive(Debug, Clone)]
pub struct FriedSplitting {
    pub omega: Vec<Omega>,
    pub e: Subspace,
    pub p: Subspace,
    pub f: Subspace,
}

impl FriedSplitting {
    fn from_tags(alg: &GradedNilpotentAlgebra, omega: Vec<Omega>) -> Result<Self> {
        let dim = alg.dim();
        let mode = alg.mode();
        let idx = |tag: Omega| -> Vec<usize> {
            (0..dim).filter(|&q| omega[q] == tag).collect()
        };
        let split = FriedSplitting {
            e: Subspace::coordinate(&idx(Omega::Zero), dim, mode),
            p: Subspace::coordinate(&idx(Omega::One), dim, mode),
            f: Subspace::coordinate(&idx(Omega::Infinity), dim, mode),
            omega,
        };
        // [F, F] c F and [F + P, F + P] c F + P, via structure constants.
        for (i, j, k, c) in alg.bracket_entries() {
            if c.is_zero() {
                continue;
            }
            let in_f = |q: usize| split.omega[q] == Omega::Infinity;
            let in_fp = |q: usize| split.omega[q] != Omega::Zero;
            if in_f(*i) && in_f(*j) && !in_f(*k) {
                return Err(Error::NotGraded);
            }
            if in_fp(*i) && in_fp(*j) && !in_fp(*k) {
                return Err(Error::NotGraded);
            }
        }
        Ok(split)
    }

    pub fn dim_e(&self) -> usize {
        self.e.dim()
    }
}

/// Closed-form omega tags for a rank-one geometry from the signs of the
/// degrees: a contracting family sends positive degrees to 0 and negative
/// ones to infinity; an expanding family mirrors the rule.
pub fn omega_closed_form(geometry: &RayGeometry, direction: Direction) -> Result<FriedSplitting> {
    if geometry.rank() != 1 {
        return Err(Error::RankNotOne { rank: geometry.rank() });
    }
    let alg = geometry.algebra();
    let omega = (0..alg.dim())
        .map(|q| {
            let d = geometry.scalar_degree(q);
            let sign = if d > 0.0 { 1 } else if d < 0.0 { -1 } else { 0 };
            match (direction, sign) {
                (_, 0) => Omega::One,
                (Direction::Contracting, 1) | (Direction::Expanding, -1) => Omega::Zero,
                _ => Omega::Infinity,
            }
        })
        .collect();
    FriedSplitting::from_tags(alg, omega)
}

/// Numeric omega tags from the trend of the diagonal factors
/// `beta_{j0,q}` over `j = 1..j_max`: a log-slope beyond the threshold
/// gives 0 or infinity by sign, a near-constant sequence gives 1, anything
/// else is ambiguous.
pub fn omega_numeric(cocycle: &Cocycle, j_max: usize) -> Result<FriedSplitting> {
    let alg = cocycle.algebra();
    let n = alg.dim();
    let mut log_beta: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut beta: Vec<Vec<f64>> = vec![Vec::new(); n];
    for j in 1..=j_max {
        let t = cocycle.map(j, 0)?;
        let (_, betas, _) = ka_factor(&cocycle.geometry, t.linear())?;
        for q in 0..n {
            log_beta[q].push(betas[q].ln());
            beta[q].push(betas[q]);
        }
    }
    let mut omega = Vec::with_capacity(n);
    for q in 0..n {
        let m = log_beta[q].len() as f64;
        let mean_x = (m + 1.0) / 2.0;
        let mean_y: f64 = log_beta[q].iter().sum::<f64>() / m;
        let mut num = 0.0;
        let mut den = 0.0;
        for (idx, y) in log_beta[q].iter().enumerate() {
            let x = (idx + 1) as f64;
            num += (x - mean_x) * (y - mean_y);
            den += (x - mean_x) * (x - mean_x);
        }
        let slope = if den > 0.0 { num / den } else { 0.0 };
        if slope < -TREND_SLOPE_TOL {
            omega.push(Omega::Zero);
        } else if slope > TREND_SLOPE_TOL {
            omega.push(Omega::Infinity);
        } else {
            let mean_b: f64 = beta[q].iter().sum::<f64>() / m;
            let dev = beta[q].iter().map(|b| (b - mean_b).abs()).fold(0.0, f64::max);
            if dev < TREND_CONST_TOL {
                omega.push(Omega::One);
            } else {
                return Err(Error::AmbiguousTrend { index: q, slope });
            }
        }
    }
    FriedSplitting::from_tags(alg, omega)
}

/// Omega tags of a cocycle: closed form for rank one (the source of
/// truth), the numeric trend estimator otherwise.
pub fn omega_degrees(cocycle: &Cocycle, direction: Direction) -> Result<FriedSplitting> {
    if cocycle.geometry.rank() == 1 {
        omega_closed_form(&cocycle.geometry, direction)
    } else {
        omega_numeric(cocycle, 24)
    }
}

/// The decomposition `L1 + L2 + L3` of a rank-one geometry by degree sign:
/// every Fried splitting has `P = L3` and `{E, F} = {L1, L2}`.
pub fn rank_one_structure(geometry: &RayGeometry) -> Result<(Subspace, Subspace, Subspace)> {
    if geometry.rank() != 1 {
        return Err(Error::RankNotOne { rank: geometry.rank() });
    }
    let alg = geometry.algebra();
    let dim = alg.dim();
    let mode = alg.mode();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut zero = Vec::new();
    for q in 0..dim {
        let d = geometry.scalar_degree(q);
        if d > 0.0 {
            pos.push(q);
        } else if d < 0.0 {
            neg.push(q);
        } else {
            zero.push(q);
        }
    }
    Ok((
        Subspace::coordinate(&pos, dim, mode),
        Subspace::coordinate(&neg, dim, mode),
        Subspace::coordinate(&zero, dim, mode),
    ))
}

/// Fixed point of `Q(x) = c_F + f(x)` on `exp(F)`, solved layer by layer
/// through the grading and cross-checked by contraction iteration of the
/// inverse in float mode.
pub fn q_fixed_point(map: &NilAffineMap, f_space: &Subspace) -> Result<GroupElement> {
    let alg = map.algebra().clone();
    let mode = alg.mode();
    if !f_space.contains(&map.translation().log, crate::nilaffine::AUTOMORPHISM_TOL) {
        return Err(Error::TranslationNotInF);
    }
    let f = map.linear();
    // f must preserve F.
    if !f_space.map(f).basis().iter().all(|v| f_space.contains(v, COCYCLE_TOL)) {
        return Err(Error::InvalidInput("linear part does not preserve F".into()));
    }
    // strict expansion on F: the inverse must contract a probe vector
    if !f_space.is_zero() {
        let f_inv = f.inverse()?;
        let mut probe: Vector = f_space
            .basis()
            .iter()
            .fold(linalg::zero_vector(alg.dim(), mode), |acc, v| linalg::vec_add(&acc, v));
        let start = linalg::vec_norm_f64(&probe);
        for _ in 0..64 {
            probe = f_inv.apply(&probe);
        }
        if linalg::vec_norm_f64(&probe) >= start {
            return Err(Error::NotExpanding);
        }
    }

    // Layer-by-layer solve of u = BCH(ln c, f u) restricted to F.
    let mut u = alg.identity();
    for grade in 1..=alg.order() {
        let layer = alg.layer(grade);
        let f_layer = layer.intersect(f_space);
        if f_layer.is_zero() {
            continue;
        }
        let fu = GroupElement::new(f.apply(&u.log));
        let rhs_full = alg.bch(map.translation(), &fu)?;
        let rhs = alg.layer_component(&rhs_full.log, grade);
        // solve (I - f_gg) u_g = rhs in coordinates of the layer basis
        let basis = f_layer.basis();
        let k = basis.len();
        let embed = Matrix::from_rows(basis.to_vec()).transpose();
        // matrix of the projected action of f on the layer basis
        let mut f_gg = Matrix::zeros(k, k, mode);
        for (b, v) in basis.iter().enumerate() {
            let image = alg.layer_component(&f.apply(v), grade);
            let coords = embed.solve(&image).ok_or(Error::NotExpanding)?;
            for a in 0..k {
                f_gg[(a, b)] = coords[a].clone();
            }
        }
        let lhs = Matrix::identity(k, mode).sub(&f_gg);
        let rhs_coords = embed.solve(&rhs).ok_or(Error::TranslationNotInF)?;
        let sol = lhs.inverse().map_err(|_| Error::NotExpanding)?.apply(&rhs_coords);
        let delta = embed.apply(&sol);
        u = GroupElement::new(linalg::vec_add(&u.log, &delta));
    }
    // Verify the fixed-point equation.
    let image = map.apply(&u)?;
    let res = linalg::vec_sup_norm_f64(&linalg::vec_sub(&image.log, &u.log));
    let tol = if mode == ScalarMode::Exact { 0.0 } else { COCYCLE_TOL };
    if res > tol {
        return Err(Error::NotExpanding);
    }
    Ok(u)
}

/// Split the translation of `T(x) = c + f(x)` as `c = c_L + c_F` with
/// `c_L in exp(E + P)` and `c_F in exp(F)`, and return the asymptotic part
/// `Q(x) = c_F + f(x)` together with `c_L`.
pub fn q_map(map: &NilAffineMap, split: &FriedSplitting) -> Result<(NilAffineMap, GroupElement)> {
    let alg = map.algebra();
    let l_space = split.e.sum(&split.p);
    let (c_l, c_f) = alg.split_decompose(map.translation(), &l_space, &split.f)?;
    let q = NilAffineMap::new(alg.clone(), c_f, map.linear().clone())?;
    Ok((q, c_l))
}

/// Iteration oracle for the fixed point: contract with `Q^{-1}` from the
/// identity, in float mode.
pub fn q_fixed_point_iterate(map: &NilAffineMap, max_iter: usize) -> Result<GroupElement> {
    let alg = map.algebra().into_mode(ScalarMode::Float);
    let alg = std::sync::Arc::new(alg);
    let float_map = NilAffineMap::new(
        alg.clone(),
        GroupElement::new(
            map.translation().log.iter().map(|s| s.clone().into_mode(ScalarMode::Float)).collect(),
        ),
        map.linear().clone().into_mode(ScalarMode::Float),
    )?;
    let inv = float_map.invert()?;
    let mut x = alg.identity();
    for _ in 0..max_iter {
        let next = inv.apply(&x)?;
        let dist = linalg::vec_sup_norm_f64(&linalg::vec_sub(&next.log, &x.log));
        x = next;
        if dist < 1e-15 {
            break;
        }
        if linalg::vec_sup_norm_f64(&x.log) > 1e12 {
            return Err(Error::NotExpanding);
        }
    }
    Ok(x)
}

/// A convex body in log coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConvexBody {
    Ball { center: Vec<Scalar>, radius: Scalar },
    Polytope { vertices: Vec<Vec<Scalar>> },
}

impl ConvexBody {
    /// Deterministic sample points: center and axis points for a ball,
    /// vertices for a polytope.
    pub fn sample_points(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            ConvexBody::Ball { center, radius } => {
                if center.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: center.len() });
                }
                let r = radius.to_f64();
                if !(r > 0.0) {
                    return Err(Error::InvalidInput("ball radius must be positive".into()));
                }
                let c: Vec<f64> = center.iter().map(Scalar::to_f64).collect();
                let mut points = vec![c.clone()];
                for a in 0..dim {
                    for sign in [1.0, -1.0] {
                        let mut p = c.clone();
                        p[a] += sign * r;
                        points.push(p);
                    }
                }
                // diagonal points keep the hull honest for rotated images
                let diag = r / (dim as f64).sqrt();
                for mask in 0..(1usize << dim.min(4)) {
                    let mut p = c.clone();
                    for a in 0..dim.min(4) {
                        p[a] += if mask & (1 << a) != 0 { diag } else { -diag };
                    }
                    points.push(p);
                }
                Ok(points)
            }
            ConvexBody::Polytope { vertices } => {
                if vertices.is_empty() {
                    return Err(Error::InvalidInput("polytope needs at least one vertex".into()));
                }
                for v in vertices {
                    if v.len() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
                    }
                }
                Ok(vertices.iter().map(|v| v.iter().map(Scalar::to_f64).collect()).collect())
            }
        }
    }
}

/// Per-coordinate behavior of the image hulls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordTrend {
    Collapsed,
    Bounded,
    Expanding,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitVerdict {
    Converged,
    Degenerate,
    Diverged,
    Inconclusive,
}

/// Interval-hull estimate of the limit set of `T_{j,0}(body)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitSetEstimate {
    pub verdict: LimitVerdict,
    /// Final per-coordinate interval hull.
    pub hull: Vec<(f64, f64)>,
    pub coord_trends: Vec<CoordTrend>,
    pub iterations: usize,
}

/// Push sampled points of the body through the cocycle and watch the
/// per-coordinate interval hulls: convergence is declared when successive
/// Hausdorff distances drop below 1e-8, divergence when a coordinate
/// escapes; a mix of collapsing and expanding coordinates is reported as a
/// degenerate limit (the hull collapses onto a leaf).
pub fn limit_set_estimate(cocycle: &Cocycle, body: &ConvexBody, j_max: usize) -> Result<LimitSetEstimate> {
    let alg = cocycle.algebra();
    let float_alg = std::sync::Arc::new(alg.into_mode(ScalarMode::Float));
    let n = alg.dim();
    let points = body.sample_points(n)?;
    let mut prev_hull: Option<Vec<(f64, f64)>> = None;
    let mut first_hull: Option<Vec<(f64, f64)>> = None;
    let mut hull = vec![(0.0, 0.0); n];
    let mut iterations = 0;
    for j in 1..=j_max {
        let t = cocycle.map(j, 0)?;
        // Apply `c + f(x)` directly; the iterated linear parts may be far
        // too contracted for a validated map object in float mode.
        let c = GroupElement::new(
            t.translation().log.iter().map(|s| s.clone().into_mode(ScalarMode::Float)).collect(),
        );
        let f = t.linear().clone().into_mode(ScalarMode::Float);
        let mut current = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
        for p in &points {
            let x: Vector = p.iter().map(|&v| Scalar::Float(v)).collect();
            let image = float_alg.bch(&c, &GroupElement::new(f.apply(&x)))?;
            for (a, s) in image.log.iter().enumerate() {
                let v = s.to_f64();
                current[a].0 = current[a].0.min(v);
                current[a].1 = current[a].1.max(v);
            }
        }
        iterations = j;
        if first_hull.is_none() {
            first_hull = Some(current.clone());
        }
        if let Some(prev) = &prev_hull {
            let dist = current
                .iter()
                .zip(prev)
                .map(|(c, p)| (c.0 - p.0).abs().max((c.1 - p.1).abs()))
                .fold(0.0, f64::max);
            if dist < 1e-8 {
                return Ok(LimitSetEstimate {
                    verdict: LimitVerdict::Converged,
                    coord_trends: classify_trends(first_hull.as_ref().unwrap(), &current),
                    hull: current,
                    iterations,
                });
            }
        }
        let escaped = current.iter().any(|&(lo, hi)| lo.abs() > 1e12 || hi.abs() > 1e12);
        hull = current;
        if escaped {
            break;
        }
        prev_hull = Some(hull.clone());
    }
    let trends = classify_trends(first_hull.as_ref().unwrap_or(&hull), &hull);
    let any_expanding = trends.iter().any(|t| *t == CoordTrend::Expanding);
    let any_collapsed = trends.iter().any(|t| *t == CoordTrend::Collapsed);
    let verdict = if any_expanding && any_collapsed {
        LimitVerdict::Degenerate
    } else if any_expanding {
        LimitVerdict::Diverged
    } else {
        LimitVerdict::Inconclusive
    };
    Ok(LimitSetEstimate { verdict, hull, coord_trends: trends, iterations })
}

fn classify_trends(first: &[(f64, f64)], last: &[(f64, f64)]) -> Vec<CoordTrend> {
    first
        .iter()
        .zip(last)
        .map(|(f, l)| {
            let w0 = (f.1 - f.0).abs().max(1e-300);
            let w1 = (l.1 - l.0).abs();
            let extent = l.0.abs().max(l.1.abs());
            if w1 < 1e-6 * w0.max(1.0) || w1 < 1e-9 {
                CoordTrend::Collapsed
            } else if w1 > 1e3 * w0 || extent > 1e9 {
                CoordTrend::Expanding
            } else {
                CoordTrend::Bounded
            }
        })
        .collect()
}

/// Normalized limit of `f^{-j}` applied to a hyperplane normal: for a
/// rank-one diagonal family this is the component of the highest degree
/// present in the normal. The closed form and the iteration must agree.
pub fn pullback_hyperplane(cocycle: &Cocycle, normal: &[Scalar], j_max: usize) -> Result<Vec<f64>> {
    let geometry = &cocycle.geometry;
    if geometry.rank() != 1 {
        return Err(Error::RankNotOne { rank: geometry.rank() });
    }
    let n = geometry.algebra().dim();
    if normal.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: normal.len() });
    }
    let normal_f: Vec<f64> = normal.iter().map(Scalar::to_f64).collect();
    if normal_f.iter().all(|v| v.abs() <= 1e-300) {
        return Err(Error::ZeroNormal);
    }
    // closed form: keep the coordinates of maximal degree
    let active: Vec<usize> = (0..n).filter(|&q| normal_f[q].abs() > 1e-12).collect();
    let dmax = active.iter().map(|&q| geometry.scalar_degree(q)).fold(f64::NEG_INFINITY, f64::max);
    let mut closed: Vec<f64> = (0..n)
        .map(|q| if (geometry.scalar_degree(q) - dmax).abs() < 1e-12 { normal_f[q] } else { 0.0 })
        .collect();
    let norm = closed.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut closed {
        *v /= norm;
    }
    // numeric: iterate the inverse linear part with normalization
    let f_inv = cocycle.map(1, 0)?.linear().clone().into_mode(ScalarMode::Float).inverse()?;
    let mut v = normal_f.clone();
    for _ in 0..j_max {
        let mut w = f_inv.apply(&v.iter().map(|&x| Scalar::Float(x)).collect::<Vec<_>>());
        let norm = linalg::vec_norm_f64(&w);
        if !(norm > 0.0) {
            return Err(Error::ZeroNormal);
        }
        for s in &mut w {
            *s = Scalar::Float(s.to_f64() / norm);
        }
        v = w.iter().map(Scalar::to_f64).collect();
    }
    // orient the iterate along the closed form before comparing
    let dot: f64 = v.iter().zip(&closed).map(|(a, b)| a * b).sum();
    if dot < 0.0 {
        for x in &mut v {
            *x = -*x;
        }
    }
    let residual = v.iter().zip(&closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if residual > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "numeric and closed-form pullback disagree (residual {residual:.3e})"
        )));
    }
    Ok(closed)
}

/// Decompose `E` by its distinct ascending degrees (rank one); brackets of
/// blocks must land in the block of the summed degree.
pub fn grade_e(split: &FriedSplitting, geometry: &RayGeometry) -> Result<Vec<(Scalar, Subspace)>> {
    if geometry.rank() != 1 {
        return Err(Error::RankNotOne { rank: geometry.rank() });
    }
    let alg = geometry.algebra();
    let dim = alg.dim();
    let mode = alg.mode();
    let mut grouped: Vec<(Scalar, Vec<usize>)> = Vec::new();
    for q in 0..dim {
        if split.omega[q] == Omega::Zero {
            let d = geometry.degree_matrix()[(0, q)].clone();
            match grouped.iter_mut().find(|(dd, _)| (&d - dd).is_zero_within(1e-12)) {
                Some((_, idx)) => idx.push(q),
                None => grouped.push((d, vec![q])),
            }
        }
    }
    grouped.sort_by(|a, b| a.0.to_f64().partial_cmp(&b.0.to_f64()).unwrap());
    let blocks: Vec<(Scalar, Subspace)> = grouped
        .into_iter()
        .map(|(d, idx)| (d, Subspace::coordinate(&idx, dim, mode)))
        .collect();
    // bracket compatibility between blocks
    for (da, sa) in &blocks {
        for (db, sb) in &blocks {
            let sum = da + db;
            let target = blocks
                .iter()
                .find(|(d, _)| (&sum - d).is_zero_within(1e-12))
                .map(|(_, s)| s.clone());
            for x in sa.basis() {
                for y in sb.basis() {
                    let br = alg.bracket(x, y)?;
                    if linalg::vec_is_zero(&br, 1e-12) {
                        continue;
                    }
                    match &target {
                        Some(t) if t.contains(&br, 1e-9) => {}
                        _ => return Err(Error::NotGraded),
                    }
                }
            }
        }
    }
    Ok(blocks)
}

/// Invisible-subspace data: `I`, its invariant complement `V`, and the
/// degree grading of `E`.
#[derive(Debug, Clone)]
pub struct InvisibleData {
    pub i: Subspace,
    pub v: Subspace,
    pub grading_of_e: Vec<(Scalar, Subspace)>,
}

/// Minimal subspace containing `P + F`, invariant under every holonomy
/// linear part and closed under the bracket, computed by alternating
/// closure. This is a lower bound for the invisible set of a manifold.
pub fn invisible_subspace(
    split: &FriedSplitting,
    geometry: &RayGeometry,
    holonomy_linear_parts: &[Matrix],
) -> Result<Subspace> {
    let alg = geometry.algebra();
    let dim = alg.dim();
    let mut current = split.p.sum(&split.f);
    for _ in 0..=dim {
        let mut next = current.clone();
        for f in holonomy_linear_parts {
            next = next.sum(&current.map(f));
        }
        let basis = current.basis().to_vec();
        for (a, x) in basis.iter().enumerate() {
            for y in basis.iter().skip(a + 1) {
                let br = alg.bracket(x, y)?;
                if !linalg::vec_is_zero(&br, 1e-14) {
                    next = next.sum(&Subspace::from_generators(&[br], dim, alg.mode()));
                }
            }
        }
        if next.dim() == current.dim() {
            break;
        }
        current = next;
    }
    // graded compatibility: I = (P + F) + sum of (E_m cap I)
    let grading = grade_e(split, geometry)?;
    let mut graded = split.p.sum(&split.f);
    for (_, e_m) in &grading {
        graded = graded.sum(&e_m.intersect(&current));
    }
    if graded != current {
        return Err(Error::NotGraded);
    }
    Ok(current)
}

/// Build the complement `V` of `I`: inside every degree block of `E`, take
/// the orthogonal complement of `I cap E_m` for the geometry's invariant
/// product, and verify holonomy invariance of both subspaces.
pub fn invariant_complement(
    i_space: &Subspace,
    split: &FriedSplitting,
    geometry: &RayGeometry,
    holonomy_linear_parts: &[Matrix],
) -> Result<InvisibleData> {
    let alg = geometry.algebra();
    let dim = alg.dim();
    let grading = grade_e(split, geometry)?;
    let mut v = Subspace::zero(dim, alg.mode());
    for (_, e_m) in &grading {
        let i_m = e_m.intersect(i_space);
        let v_m = e_m.orthogonal_complement_within(&i_m, geometry.inner_product());
        v = v.sum(&v_m);
    }
    if i_space.dim() + v.dim() != dim || i_space.sum(&v).dim() != dim {
        return Err(Error::NotGraded);
    }
    for (index, f) in holonomy_linear_parts.iter().enumerate() {
        let fi = i_space.map(f);
        if !i_space.contains_subspace(&fi, COCYCLE_TOL) {
            return Err(Error::NotInvariant { index });
        }
        let fv = v.map(f);
        if !v.contains_subspace(&fv, COCYCLE_TOL) {
            return Err(Error::NotInvariant { index });
        }
    }
    Ok(InvisibleData { i: i_space.clone(), v, grading_of_e: grading })
}

/// Left-trivialized value of the radial field at `x`: the logarithm of the
/// `V`-part of the unique decomposition `x = x_I x_V`.
pub fn radial_field(alg: &GradedNilpotentAlgebra, x: &GroupElement, data: &InvisibleData) -> Result<Vector> {
    let (_, x_v) = alg.split_decompose(x, &data.i, &data.v)?;
    Ok(x_v.log)
}

/// Radial flow with multiplier `lambda = e^t`:
/// `R(x_I x_V) = x_I (lambda x_V)`. Exact for rational `lambda`.
pub fn radial_flow_lambda(
    alg: &GradedNilpotentAlgebra,
    x: &GroupElement,
    lambda: &Scalar,
    data: &InvisibleData,
) -> Result<GroupElement> {
    let (x_i, x_v) = alg.split_decompose(x, &data.i, &data.v)?;
    let scaled = alg.scalar_power(&x_v, lambda);
    alg.bch(&x_i, &scaled)
}

/// Radial flow at time `t` (float parameterization of the multiplier).
pub fn radial_flow(
    alg: &GradedNilpotentAlgebra,
    x: &GroupElement,
    t: f64,
    data: &InvisibleData,
) -> Result<GroupElement> {
    let lambda = match alg.mode() {
        ScalarMode::Float => Scalar::Float(t.exp()),
        ScalarMode::Exact => {
            return Err(Error::ModeMismatch);
        }
    };
    radial_flow_lambda(alg, x, &lambda, data)
}

/// Numeric Jacobian determinant of the flow in log coordinates, compared
/// with the exact scaling `e^{t dim V}` over seeded sample points.
pub fn volume_scaling_check(
    geometry: &RayGeometry,
    data: &InvisibleData,
    times: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Report> {
    let float_alg = std::sync::Arc::new(geometry.algebra().into_mode(ScalarMode::Float));
    let float_data = InvisibleData {
        i: data.i.clone().into_mode(ScalarMode::Float),
        v: data.v.clone().into_mode(ScalarMode::Float),
        grading_of_e: data
            .grading_of_e
            .iter()
            .map(|(d, s)| (d.clone().into_mode(ScalarMode::Float), s.clone().into_mode(ScalarMode::Float)))
            .collect(),
    };
    let n = float_alg.dim();
    let dim_v = data.v.dim() as f64;
    let h = 1e-6;
    let mut worst = 0.0f64;
    let mut sampler = Sampler::new(seed);
    for _ in 0..samples {
        let base: Vec<f64> = (0..n).map(|_| sampler.float_in(-1.0, 1.0)).collect();
        for &t in times {
            let expected = (t * dim_v).exp();
            let mut jac = Matrix::zeros(n, n, ScalarMode::Float);
            for a in 0..n {
                let mut plus = base.clone();
                plus[a] += h;
                let mut minus = base.clone();
                minus[a] -= h;
                let fp = radial_flow(
                    &float_alg,
                    &GroupElement::new(plus.iter().map(|&v| Scalar::Float(v)).collect()),
                    t,
                    &float_data,
                )?;
                let fm = radial_flow(
                    &float_alg,
                    &GroupElement::new(minus.iter().map(|&v| Scalar::Float(v)).collect()),
                    t,
                    &float_data,
                )?;
                for b in 0..n {
                    jac[(b, a)] = Scalar::Float((fp.log[b].to_f64() - fm.log[b].to_f64()) / (2.0 * h));
                }
            }
            let det = jac.det().to_f64();
            let rel = (det - expected).abs() / expected.abs().max(1e-300);
            worst = worst.max(rel);
        }
    }
    let mut report = Report::new();
    report.push(Check::with_residual("volume_scaling", worst <= 1e-6, worst));
    Ok(report)
}

/// Equivariance of the radial field under a holonomy-like map `T` whose
/// translation lies in `exp(I)` and whose linear part preserves `I` and
/// `V`: `f(X(x)) = X(T(x))` at seeded samples.
pub fn field_equivariance_check(
    map: &NilAffineMap,
    data: &InvisibleData,
    samples: usize,
    seed: u64,
) -> Result<Report> {
    let alg = map.algebra();
    if !data.i.contains(&map.translation().log, crate::nilaffine::AUTOMORPHISM_TOL) {
        return Err(Error::TranslationNotInI);
    }
    let f = map.linear();
    if !data.i.contains_subspace(&data.i.map(f), COCYCLE_TOL) {
        return Err(Error::NotInvariant { index: 0 });
    }
    if !data.v.contains_subspace(&data.v.map(f), COCYCLE_TOL) {
        return Err(Error::NotInvariant { index: 0 });
    }
    let mut sampler = Sampler::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = GroupElement::new(sampler.vector(alg.dim(), alg.mode()));
        let lhs = f.apply(&radial_field(alg, &x, data)?);
        let rhs = radial_field(alg, &map.apply(&x)?, data)?;
        worst = worst.max(linalg::vec_sup_norm_f64(&linalg::vec_sub(&lhs, &rhs)));
    }
    let mut report = Report::new();
    report.push(Check::with_residual("field_equivariance", worst <= COCYCLE_TOL, worst));
    Ok(report)
}

/// Result of iterating a map from a starting point.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum OrbitResult {
    Converged { point: Vec<f64>, iterations: usize },
    Diverged { iterations: usize },
    Inconclusive { iterations: usize },
}

/// Iterate `T` from `p` until the successive log-coordinate distance drops
/// below 1e-12 (convergence), a coordinate escapes (divergence), or the
/// budget runs out.
pub fn orbit_limit(map: &NilAffineMap, p: &GroupElement, n_max: usize) -> Result<OrbitResult> {
    let float_alg = std::sync::Arc::new(map.algebra().into_mode(ScalarMode::Float));
    let t = NilAffineMap::new(
        float_alg.clone(),
        GroupElement::new(
            map.translation().log.iter().map(|s| s.clone().into_mode(ScalarMode::Float)).collect(),
        ),
        map.linear().clone().into_mode(ScalarMode::Float),
    )?;
    let mut x = GroupElement::new(p.log.iter().map(|s| s.clone().into_mode(ScalarMode::Float)).collect());
    for iter in 1..=n_max {
        let next = t.apply(&x)?;
        let dist = linalg::vec_sup_norm_f64(&linalg::vec_sub(&next.log, &x.log));
        x = next;
        if dist < 1e-12 {
            return Ok(OrbitResult::Converged {
                point: x.log.iter().map(Scalar::to_f64).collect(),
                iterations: iter,
            });
        }
        if linalg::vec_sup_norm_f64(&x.log) > 1e12 {
            return Ok(OrbitResult::Diverged { iterations: iter });
        }
    }
    Ok(OrbitResult::Inconclusive { iterations: n_max })
}

/// Probe verdicts: a found witness certifies non-properness; no witness is
/// explicitly not a proof of properness.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ProbeOutcome {
    NonProperWitnessFound {
        base_point: Vec<f64>,
        limit_point: Vec<f64>,
        escape_norm: f64,
    },
    NoWitnessFound { reason: String },
}

/// Search for sequences `x_n -> x` with `g_n(x_n)` convergent while the
/// map parameters `(c, f, f^{-1})` escape every bound.
pub fn properness_probe(
    maps: &[NilAffineMap],
    domain_samples: &[GroupElement],
    witness_budget: usize,
) -> Result<ProbeOutcome> {
    if maps.len() < 3 {
        return Ok(ProbeOutcome::NoWitnessFound { reason: "sequence too short".into() });
    }
    let norms: Vec<f64> = maps.iter().map(NilAffineMap::parameter_norm).collect();
    let escape = norms.last().copied().unwrap_or(0.0);
    let escaping = escape > 100.0 * norms[0].max(1.0);
    if !escaping {
        return Ok(ProbeOutcome::NoWitnessFound { reason: "sequence not escaping".into() });
    }
    let tail = maps.len().min(6);
    for x in domain_samples.iter().take(witness_budget) {
        let mut images = Vec::new();
        let mut ok = true;
        for g in maps {
            match g.apply(x) {
                Ok(y) => images.push(y.log.iter().map(Scalar::to_f64).collect::<Vec<f64>>()),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        // Cauchy tail of the image sequence.
        let last = &images[images.len() - 1];
        if last.iter().any(|v| !v.is_finite() || v.abs() > 1e9) {
            continue;
        }
        let mut cauchy = true;
        for w in images.len() - tail..images.len() - 1 {
            let d: f64 = images[w]
                .iter()
                .zip(last)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if d > 1e-6 {
                cauchy = false;
                break;
            }
        }
        if cauchy {
            return Ok(ProbeOutcome::NonProperWitnessFound {
                base_point: x.log.iter().map(Scalar::to_f64).collect(),
                limit_point: last.clone(),
                escape_norm: escape,
            });
        }
    }
    Ok(ProbeOutcome::NoWitnessFound { reason: "no convergent image sequence within budget".into() })
}
