//! Seeded property suites shared by the command-line `check` command and
//! the acceptance tests.
//!
//! Every suite takes a sample count and a seed and returns a [`Report`];
//! sampling is data-parallel with per-item derived seeds, so results do not
//! depend on thread count.

use std::sync::Arc;

use rayon::prelude::*;

use crate::dynamics;
use crate::lie::{self, GradedNilpotentAlgebra, GroupElement};
use crate::linalg::{self, Matrix, Subspace};
use crate::nilaffine::{self, NilAffineMap};
use crate::parabolic;
use crate::report::{Check, Report};
use crate::sampling::Sampler;
use crate::scalar::{Scalar, ScalarMode};
use crate::Result;

const EXACT: ScalarMode = ScalarMode::Exact;

/// The nilpotent algebras every exact suite runs over: the built-in
/// Heisenberg algebra, its abelian companion, and the nilradical of every
/// catalog parabolic (orders one to three).
pub fn catalog_nilpotent_algebras() -> Result<Vec<(String, Arc<GradedNilpotentAlgebra>)>> {
    let mut out: Vec<(String, Arc<GradedNilpotentAlgebra>)> = vec![
        ("heis3".into(), Arc::new(lie::heisenberg3(EXACT))),
        ("abelian3".into(), Arc::new(lie::abelian(3, EXACT))),
    ];
    let mut cached: std::collections::BTreeMap<&str, parabolic::RestrictedRootSystem> =
        Default::default();
    for &(key, _, _, sigma, label, _, _) in parabolic::TABLE1_EXPECTED {
        if !cached.contains_key(key) {
            let alg = parabolic::load_algebra(key)?;
            cached.insert(key, parabolic::restricted_roots(&alg)?);
        }
        let pd = parabolic::parabolic(&cached[key], sigma)?;
        out.push((format!("{key} n_Sigma {label}"), pd.nil_algebra.clone()));
    }
    Ok(out)
}

fn parallel_exact_failures<F>(samples: usize, seed: u64, f: F) -> usize
where
    F: Fn(&mut Sampler) -> bool + Sync,
{
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut sampler = Sampler::for_item(seed, i);
            usize::from(!f(&mut sampler))
        })
        .sum()
}

/// Group axioms and the Ad identity, exactly, on seeded rational samples.
pub fn suite_bch(samples: usize, seed: u64) -> Result<Report> {
    let mut report = Report::new();
    for (name, alg) in catalog_nilpotent_algebras()? {
        let alg_ref = &alg;
        let failures = parallel_exact_failures(samples, seed, |sampler| {
            let x = GroupElement::new(sampler.vector(alg_ref.dim(), EXACT));
            let y = GroupElement::new(sampler.vector(alg_ref.dim(), EXACT));
            let z = GroupElement::new(sampler.vector(alg_ref.dim(), EXACT));
            let e = alg_ref.identity();
            let assoc = {
                let left = alg_ref.bch(&alg_ref.bch(&x, &y).unwrap(), &z).unwrap();
                let right = alg_ref.bch(&x, &alg_ref.bch(&y, &z).unwrap()).unwrap();
                left == right
            };
            let identity = alg_ref.bch(&x, &e).unwrap() == x && alg_ref.bch(&e, &x).unwrap() == x;
            let inverse = {
                let inv = alg_ref.inverse(&x);
                alg_ref.bch(&x, &inv).unwrap() == e && alg_ref.bch(&inv, &x).unwrap() == e
            };
            let ad_identity = {
                let conj = alg_ref.conjugate(&x, &y).unwrap();
                let chain = alg_ref
                    .bch(&alg_ref.bch(&x, &y).unwrap(), &alg_ref.inverse(&x))
                    .unwrap();
                conj == chain
            };
            let ad_nilpotent = {
                let ad = alg_ref.ad_matrix(&x.log).unwrap();
                ad.pow(alg_ref.order() as u64).is_zero(0.0)
            };
            assoc && identity && inverse && ad_identity && ad_nilpotent
        });
        report.push(
            Check::exact(format!("group_axioms {name}"), failures == 0)
                .detail(format!("{samples} samples, {failures} failures")),
        );
    }
    Ok(report)
}

/// Two-step convexity: the log coordinates of `p + exp(a + t v)` are affine
/// in `t` for every algebra of order at most two (second difference zero,
/// exactly).
pub fn suite_convexity(samples: usize, seed: u64) -> Result<Report> {
    let mut report = Report::new();
    for (name, alg) in catalog_nilpotent_algebras()? {
        if alg.order() > 2 {
            continue;
        }
        let alg_ref = &alg;
        let failures = parallel_exact_failures(samples, seed ^ 0xC0, |sampler| {
            let p = GroupElement::new(sampler.vector(alg_ref.dim(), EXACT));
            let a = sampler.vector(alg_ref.dim(), EXACT);
            let v = sampler.vector(alg_ref.dim(), EXACT);
            let t0 = sampler.rational();
            let h = sampler.rational_nonzero();
            let at = |t: &Scalar| {
                let dir = linalg::vec_add(&a, &linalg::vec_scale(t, &v));
                alg_ref.bch(&p, &GroupElement::new(dir)).unwrap().log
            };
            let f_minus = at(&(&t0 - &h));
            let f_mid = at(&t0);
            let f_plus = at(&(&t0 + &h));
            let second = linalg::vec_add(
                &linalg::vec_sub(&f_plus, &linalg::vec_scale(&Scalar::from_i64(2, EXACT), &f_mid)),
                &f_minus,
            );
            linalg::vec_is_zero(&second, 0.0)
        });
        report.push(
            Check::exact(format!("two_step_convexity {name}"), failures == 0)
                .detail(format!("{samples} samples, {failures} failures")),
        );
    }
    Ok(report)
}

/// Decomposition lemma: recomposition is exact and perturbing the first
/// factor inside `L1` never yields a second decomposition.
pub fn suite_split(samples: usize, seed: u64) -> Result<Report> {
    let mut report = Report::new();
    for (name, alg) in catalog_nilpotent_algebras()? {
        let dim = alg.dim();
        if dim < 2 {
            continue;
        }
        let alg_ref = &alg;
        let failures = parallel_exact_failures(samples, seed ^ 0x51, |sampler| {
            // random proper coordinate split (always layer-compatible)
            let cut = 1 + (sampler.float_in(0.0, (dim - 1) as f64) as usize);
            let mut idx: Vec<usize> = (0..dim).collect();
            for i in (1..dim).rev() {
                let j = sampler.float_in(0.0, (i + 1) as f64) as usize;
                idx.swap(i, j.min(i));
            }
            let l1 = Subspace::coordinate(&idx[..cut], dim, EXACT);
            let l2 = Subspace::coordinate(&idx[cut..], dim, EXACT);
            let x = GroupElement::new(sampler.vector(dim, EXACT));
            let Ok((x1, x2)) = alg_ref.split_decompose(&x, &l1, &l2) else {
                return false;
            };
            if !l1.contains(&x1.log, 0.0) || !l2.contains(&x2.log, 0.0) {
                return false;
            }
            if alg_ref.bch(&x1, &x2).unwrap() != x {
                return false;
            }
            // uniqueness falsifier
            let mut delta = linalg::zero_vector(dim, EXACT);
            let slot = idx[..cut][sampler.float_in(0.0, cut as f64) as usize % cut];
            delta[slot] = sampler.rational_nonzero();
            let x1_perturbed = GroupElement::new(linalg::vec_add(&x1.log, &delta));
            let forced = alg_ref
                .bch(&alg_ref.inverse(&x1_perturbed), &x)
                .unwrap();
            !l2.contains(&forced.log, 0.0)
        });
        report.push(
            Check::exact(format!("split_decompose {name}"), failures == 0)
                .detail(format!("{samples} samples, {failures} failures")),
        );
    }
    Ok(report)
}

/// Ray-geometry validation, the `A`-homomorphism law and geodesic
/// equivariance of nil-affine maps on the built-in geometries.
pub fn suite_ray(samples: usize, seed: u64) -> Result<Report> {
    let mut report = Report::new();
    for key in nilaffine::BUILTIN_RAY_GEOMETRIES {
        let rg = nilaffine::builtin_ray_geometry(key, EXACT)?;
        let validation = rg.validate();
        report.push(
            Check::exact(format!("validate {key}"), validation.pass())
                .detail(format!("max residual {:.3e}", validation.max_residual())),
        );

        let rg_ref = &rg;
        let hom_failures = parallel_exact_failures(samples, seed ^ 0xA4, |sampler| {
            let lambdas1: Vec<Scalar> =
                (0..rg_ref.rank()).map(|_| sampler.rational_nonzero().abs()).collect();
            let lambdas2: Vec<Scalar> =
                (0..rg_ref.rank()).map(|_| sampler.rational_nonzero().abs()).collect();
            let a1 = rg_ref.a_element_lambda(&lambdas1).unwrap();
            let a2 = rg_ref.a_element_lambda(&lambdas2).unwrap();
            let both: Vec<Scalar> =
                lambdas1.iter().zip(&lambdas2).map(|(u, v)| u * v).collect();
            let a12 = rg_ref.a_element_lambda(&both).unwrap();
            a1.mul(&a2) == a12 && nilaffine::is_automorphism(&a12, rg_ref.algebra())
        });
        report.push(
            Check::exact(format!("a_element_homomorphism {key}"), hom_failures == 0)
                .detail(format!("{samples} samples, {hom_failures} failures")),
        );
    }

    // geodesic equivariance of nil-affine maps on the Heisenberg group
    let alg = Arc::new(lie::heisenberg3(EXACT));
    let sim = nilaffine::builtin_ray_geometry("heis3_similarity", EXACT)?;
    let alg_ref = &alg;
    let sim_ref = &sim;
    let failures = parallel_exact_failures(samples, seed ^ 0x9E, |sampler| {
        let c = GroupElement::new(sampler.vector(3, EXACT));
        let lambda = sampler.rational_nonzero().abs();
        let f = sim_ref.a_element_lambda(&[lambda]).unwrap();
        let map = NilAffineMap::new(alg_ref.clone(), c, f).unwrap();
        let p = GroupElement::new(sampler.vector(3, EXACT));
        let v = sampler.vector(3, EXACT);
        let t = sampler.rational();
        let lhs = map
            .apply(&alg_ref.geodesic_point(&p, &v, &t).unwrap())
            .unwrap();
        let rhs = alg_ref
            .geodesic_point(&map.apply(&p).unwrap(), &map.linear().apply(&v), &t)
            .unwrap();
        lhs == rhs
    });
    report.push(
        Check::exact("geodesic_equivariance heis3", failures == 0)
            .detail(format!("{samples} samples, {failures} failures")),
    );
    Ok(report)
}

/// The su(2,2) worked example: restricted roots, the adjoint weights on
/// the Borel nilradical, the Levi geometry ranks, and the rotation block of
/// the compact factor.
pub fn suite_adjoint() -> Result<Report> {
    let mut report = Report::new();
    let alg = parabolic::load_algebra("su22")?;
    let rs = parabolic::restricted_roots(&alg)?;

    let mut mults: Vec<(Vec<i64>, usize)> = rs
        .positive_roots()
        .into_iter()
        .map(|i| {
            (
                rs.roots[i].coords.iter().map(|c| c.to_f64() as i64).collect(),
                rs.roots[i].multiplicity(),
            )
        })
        .collect();
    mults.sort();
    let expected = vec![(vec![0, 2], 1), (vec![1, -1], 2), (vec![1, 1], 2), (vec![2, 0], 1)];
    report.push(Check::exact("su22_positive_roots", mults == expected));

    let pd = parabolic::parabolic(&rs, &[])?;
    let (first, _) = pd.levi_ray_geometries(&rs)?;
    let cols: Vec<Vec<i64>> = (0..6)
        .map(|q| first.degree_column(q).iter().map(|c| c.to_f64() as i64).collect())
        .collect();
    let expected_cols = vec![
        vec![1, -1],
        vec![1, -1],
        vec![0, 2],
        vec![1, 1],
        vec![1, 1],
        vec![2, 0],
    ];
    report.push(Check::exact("su22_eq_hbn_weights", cols == expected_cols));

    // adjoint action of the diagonal cartan is the expected diagonal
    let mut h = vec![Scalar::zero(EXACT); alg.dim()];
    h[alg.split_cartan()[0]] = Scalar::from_i64(5, EXACT);
    h[alg.split_cartan()[1]] = Scalar::from_i64(3, EXACT);
    let act = pd.adjoint_action(&h)?;
    let expected_diag = [2i64, 2, 6, 8, 8, 10];
    let diag_ok = (0..6).all(|q| act[(q, q)] == Scalar::from_i64(expected_diag[q], EXACT))
        && (0..6).all(|p| (0..6).all(|q| p == q || act[(p, q)].is_zero()));
    report.push(Check::exact("su22_adjoint_diagonal", diag_ok));

    let pd2 = parabolic::parabolic(&rs, &[1])?;
    let (g1, g2) = pd2.levi_ray_geometries(&rs)?;
    report.push(Check::exact(
        "su22_sigma2_ranks",
        g1.rank() == 2 && g2.rank() == 1 && g1.validate().pass() && g2.validate().pass(),
    ));

    // both ray geometries on every catalog row validate
    let mut all_rows = true;
    for &(key, _, _, sigma, _, _, _) in parabolic::TABLE1_EXPECTED {
        let alg = parabolic::load_algebra(key)?;
        let rs = parabolic::restricted_roots(&alg)?;
        let pd = parabolic::parabolic(&rs, sigma)?;
        let (a, b) = pd.levi_ray_geometries(&rs)?;
        all_rows &= a.validate().pass() && b.validate().pass();
        all_rows &= pd.nil_algebra.validate().pass();
    }
    report.push(Check::exact("levi_ray_geometries_validate", all_rows));
    Ok(report)
}

/// Fixed-point agreement between the layer solve and the iteration oracle
/// on seeded expanding maps.
pub fn suite_fixed_point(samples: usize, seed: u64) -> Result<Report> {
    let alg = Arc::new(lie::heisenberg3(EXACT));
    let full = Subspace::full(3, EXACT);
    let mut worst = 0.0f64;
    let mut pass = true;
    let mut sampler = Sampler::new(seed ^ 0xF1);
    for _ in 0..samples {
        let c = GroupElement::new(sampler.vector(3, EXACT));
        // expanding dilation with lambda in {2, 3, 4}
        let l = 2 + (sampler.float_in(0.0, 3.0) as i64).min(2);
        let f = Matrix::diagonal(&[
            Scalar::from_i64(l, EXACT),
            Scalar::from_i64(l, EXACT),
            Scalar::from_i64(l * l, EXACT),
        ]);
        let map = NilAffineMap::new(alg.clone(), c, f).unwrap();
        let solved = dynamics::q_fixed_point(&map, &full).unwrap();
        if map.apply(&solved).unwrap() != solved {
            pass = false;
        }
        let iterated = dynamics::q_fixed_point_iterate(&map, 20_000).unwrap();
        for (a, b) in solved.log.iter().zip(&iterated.log) {
            worst = worst.max((a.to_f64() - b.to_f64()).abs());
        }
    }
    let mut report = Report::new();
    report.push(Check::with_residual("fixed_point_layer_vs_iteration", pass && worst <= 1e-10, worst));
    Ok(report)
}
