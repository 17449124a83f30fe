//! Fried-dynamics machinery on the Heisenberg ray geometries: frozen
//! expected values first, derived with independent oracles (hand BCH
//! evaluation, contraction iteration, coordinate-wise scaling, finite
//! differences), then the operations are run against them.

use std::collections::BTreeMap;
use std::sync::Arc;

use nilgeo::dynamics::{self, ConvexBody, Cocycle, CoordTrend, Direction, LimitVerdict, Omega, OrbitResult, ProbeOutcome};
use nilgeo::lie::{heisenberg3, GroupElement};
use nilgeo::linalg::{self, Matrix, Subspace};
use nilgeo::nilaffine::{builtin_ray_geometry, NilAffineMap, RayGeometry};
use nilgeo::scalar::{Scalar, ScalarMode};
use nilgeo::Error;

const EXACT: ScalarMode = ScalarMode::Exact;

fn ge(coords: &[(i64, i64)]) -> GroupElement {
    GroupElement::new(coords.iter().map(|&(p, q)| Scalar::ratio(p, q)).collect())
}

fn diag(entries: &[(i64, i64)]) -> Matrix {
    Matrix::diagonal(&entries.iter().map(|&(p, q)| Scalar::ratio(p, q)).collect::<Vec<_>>())
}

fn similarity() -> RayGeometry {
    builtin_ray_geometry("heis3_similarity", EXACT).unwrap()
}

fn volume_preserving() -> RayGeometry {
    builtin_ray_geometry("heis3_volume", EXACT).unwrap()
}

/// Contracting similarity generator: a_element at lambda = 1/2.
fn contracting_similarity() -> Cocycle {
    let rg = similarity();
    let f = rg.a_element_lambda(&[Scalar::ratio(1, 2)]).unwrap();
    let gen = NilAffineMap::from_linear(rg.algebra().clone(), f).unwrap();
    Cocycle::power(rg, gen)
}

/// Contracting volume-preserving generator with a translation part.
fn contracting_volume(c: GroupElement) -> Cocycle {
    let rg = volume_preserving();
    let f = rg.a_element_lambda(&[Scalar::ratio(1, 2)]).unwrap();
    let gen = NilAffineMap::new(rg.algebra().clone(), c, f).unwrap();
    Cocycle::power(rg, gen)
}

#[test]
fn cocycle_power_family_passes_exactly() {
    let report = dynamics::cocycle_check(&contracting_similarity()).unwrap();
    assert!(report.pass(), "{:?}", report.failures().collect::<Vec<_>>());
    assert_eq!(report.max_residual(), 0.0);
    // the identity family also passes
    let rg = similarity();
    let id = NilAffineMap::identity(rg.algebra().clone());
    let report = dynamics::cocycle_check(&Cocycle::power(rg, id)).unwrap();
    assert!(report.pass());
}

#[test]
fn cocycle_perturbed_table_fails_with_triple() {
    let rg = similarity();
    let alg = rg.algebra().clone();
    let f = rg.a_element_lambda(&[Scalar::ratio(1, 2)]).unwrap();
    let gen = NilAffineMap::new(alg.clone(), ge(&[(1, 1), (0, 1), (0, 1)]), f).unwrap();
    let mut maps = BTreeMap::new();
    let size = 3usize;
    for i in 0..size {
        for j in i + 1..=size {
            maps.insert((j, i), gen.pow((j - i) as i64).unwrap());
        }
    }
    // perturb T_{3,0} by 1e-3 in the translation
    let t30 = maps.get(&(3, 0)).unwrap().clone();
    let mut c = t30.translation().clone();
    c.log[0] = &c.log[0] + &Scalar::ratio(1, 1000);
    maps.insert((3, 0), NilAffineMap::new(alg.clone(), c, t30.linear().clone()).unwrap());
    let cocycle = Cocycle::table(rg, size, maps);
    let report = dynamics::cocycle_check(&cocycle).unwrap();
    assert!(!report.pass());
    let failing = report.failures().next().unwrap();
    assert_eq!(failing.name, "cocycle_relation");
    assert!(failing.detail.as_deref().unwrap_or("").contains("T_(3,0)"));
    assert!(failing.residual >= 1e-4);
}

#[test]
fn omega_tags_on_similarity_and_volume() {
    // similarity, contracting: everything contracts
    let split = dynamics::omega_degrees(&contracting_similarity(), Direction::Contracting).unwrap();
    assert_eq!(split.omega, vec![Omega::Zero, Omega::Zero, Omega::Zero]);
    assert_eq!(split.e.dim(), 3);
    assert!(split.p.is_zero() && split.f.is_zero());

    // volume-preserving, contracting: E = X, F = Y, P = Z
    let split = dynamics::omega_degrees(&contracting_volume(ge(&[(0, 1), (0, 1), (0, 1)])), Direction::Contracting)
        .unwrap();
    assert_eq!(split.omega, vec![Omega::Zero, Omega::Infinity, Omega::One]);
    assert_eq!(split.e, Subspace::coordinate(&[0], 3, EXACT));
    assert_eq!(split.f, Subspace::coordinate(&[1], 3, EXACT));
    assert_eq!(split.p, Subspace::coordinate(&[2], 3, EXACT));

    // identity family: everything is neutral
    let rg = similarity();
    let id = NilAffineMap::identity(rg.algebra().clone());
    let split = dynamics::omega_numeric(&Cocycle::power(rg, id), 16).unwrap();
    assert_eq!(split.omega, vec![Omega::One, Omega::One, Omega::One]);
}

#[test]
fn omega_numeric_agrees_with_closed_form_on_power_families() {
    for (key, lambda) in [
        ("heis3_similarity", Scalar::ratio(1, 2)),
        ("heis3_similarity", Scalar::ratio(2, 3)),
        ("heis3_volume", Scalar::ratio(1, 3)),
        ("heis3_volume", Scalar::ratio(3, 4)),
    ] {
        let rg = builtin_ray_geometry(key, EXACT).unwrap();
        let f = rg.a_element_lambda(&[lambda]).unwrap();
        let gen = NilAffineMap::from_linear(rg.algebra().clone(), f).unwrap();
        let cocycle = Cocycle::power(rg.clone(), gen);
        let closed = dynamics::omega_closed_form(&rg, Direction::Contracting).unwrap();
        let numeric = dynamics::omega_numeric(&cocycle, 20).unwrap();
        assert_eq!(closed.omega, numeric.omega, "{key}");
    }
}

#[test]
fn rank_one_structure_by_degree_sign() {
    let (l1, l2, l3) = dynamics::rank_one_structure(&volume_preserving()).unwrap();
    assert_eq!(l1, Subspace::coordinate(&[0], 3, EXACT));
    assert_eq!(l2, Subspace::coordinate(&[1], 3, EXACT));
    assert_eq!(l3, Subspace::coordinate(&[2], 3, EXACT));

    let (l1, l2, l3) = dynamics::rank_one_structure(&similarity()).unwrap();
    assert_eq!(l1.dim(), 3);
    assert!(l2.is_zero() && l3.is_zero());

    // all degrees zero: trivial A
    let alg = Arc::new(heisenberg3(EXACT));
    let rg = RayGeometry::new(
        alg,
        Matrix::zeros(1, 3, EXACT),
        Vec::new(),
        None,
    )
    .unwrap();
    let (l1, l2, l3) = dynamics::rank_one_structure(&rg).unwrap();
    assert!(l1.is_zero() && l2.is_zero());
    assert_eq!(l3.dim(), 3);

    assert!(matches!(
        dynamics::rank_one_structure(&builtin_ray_geometry("heis3_rank2", EXACT).unwrap()),
        Err(Error::RankNotOne { rank: 2 })
    ));
}

#[test]
fn fixed_point_layer_solve_matches_hand_value() {
    let alg = Arc::new(heisenberg3(EXACT));
    let full = Subspace::full(3, EXACT);
    let q = NilAffineMap::new(alg.clone(), ge(&[(1, 1), (1, 1), (1, 1)]), diag(&[(2, 1), (2, 1), (4, 1)]))
        .unwrap();
    let fixed = dynamics::q_fixed_point(&q, &full).unwrap();
    assert_eq!(fixed, ge(&[(-1, 1), (-1, 1), (-1, 3)]));
    // verified by applying Q
    assert_eq!(q.apply(&fixed).unwrap(), fixed);
    // iteration oracle agrees
    let iterated = dynamics::q_fixed_point_iterate(&q, 10_000).unwrap();
    for (a, b) in fixed.log.iter().zip(&iterated.log) {
        assert!((a.to_f64() - b.to_f64()).abs() <= 1e-10);
    }
    // identity translation fixes the identity
    let q0 = NilAffineMap::from_linear(alg.clone(), diag(&[(2, 1), (2, 1), (4, 1)])).unwrap();
    assert_eq!(dynamics::q_fixed_point(&q0, &full).unwrap(), alg.identity());
    // one-dimensional F with f = 2 and c = 1: q = -1
    let span_y = Subspace::coordinate(&[1], 3, EXACT);
    let q1 = NilAffineMap::new(
        alg.clone(),
        ge(&[(0, 1), (1, 1), (0, 1)]),
        diag(&[(1, 2), (2, 1), (1, 1)]),
    )
    .unwrap();
    let fixed = dynamics::q_fixed_point(&q1, &span_y).unwrap();
    assert_eq!(fixed, ge(&[(0, 1), (-1, 1), (0, 1)]));
    // error paths
    let not_in_f = NilAffineMap::new(
        alg.clone(),
        ge(&[(1, 1), (0, 1), (0, 1)]),
        diag(&[(1, 2), (2, 1), (1, 1)]),
    )
    .unwrap();
    assert!(matches!(dynamics::q_fixed_point(&not_in_f, &span_y), Err(Error::TranslationNotInF)));
    let contracts = NilAffineMap::new(
        alg.clone(),
        ge(&[(0, 1), (1, 1), (0, 1)]),
        diag(&[(2, 1), (1, 2), (1, 1)]),
    )
    .unwrap();
    assert!(matches!(dynamics::q_fixed_point(&contracts, &span_y), Err(Error::NotExpanding)));
}

#[test]
fn q_map_splits_translation() {
    let cocycle = contracting_volume(ge(&[(1, 1), (1, 1), (1, 1)]));
    let split = dynamics::omega_degrees(&cocycle, Direction::Contracting).unwrap();
    let t = cocycle.map(1, 0).unwrap();
    let (q, c_l) = dynamics::q_map(&t, &split).unwrap();
    // c = c_L + c_F with c_F in exp(F)
    assert!(split.f.contains(&q.translation().log, 0.0));
    let alg = cocycle.algebra();
    let recomposed = alg.bch(&c_l, q.translation()).unwrap();
    assert_eq!(&recomposed, t.translation());
    // the Q fixed point on F solves q_y = 1 + 2 q_y
    let fixed = dynamics::q_fixed_point(&q, &split.f).unwrap();
    assert!(split.f.contains(&fixed.log, 0.0));
    assert_eq!(fixed.log[1], Scalar::from_i64(-1, EXACT));
}

#[test]
fn limit_sets_of_contractions_and_volume_family() {
    // pure contraction: the unit ball collapses to the origin
    let estimate = dynamics::limit_set_estimate(
        &contracting_similarity(),
        &ConvexBody::Ball {
            center: vec![Scalar::Float(0.0), Scalar::Float(0.0), Scalar::Float(0.0)],
            radius: Scalar::Float(1.0),
        },
        200,
    )
    .unwrap();
    assert!(matches!(estimate.verdict, LimitVerdict::Converged));
    for (lo, hi) in &estimate.hull {
        assert!(lo.abs() < 1e-7 && hi.abs() < 1e-7);
    }

    // identity family: the body does not move
    let rg = similarity();
    let id = NilAffineMap::identity(rg.algebra().clone());
    let body = ConvexBody::Ball {
        center: vec![Scalar::Float(0.5), Scalar::Float(0.0), Scalar::Float(0.0)],
        radius: Scalar::Float(0.25),
    };
    let estimate = dynamics::limit_set_estimate(&Cocycle::power(rg, id), &body, 50).unwrap();
    assert!(matches!(estimate.verdict, LimitVerdict::Converged));
    assert!((estimate.hull[0].0 - 0.25).abs() < 1e-9 && (estimate.hull[0].1 - 0.75).abs() < 1e-9);

    // volume-preserving contraction: the hull degenerates onto the F-leaf,
    // X-extent dies, Y-extent persists
    let estimate = dynamics::limit_set_estimate(
        &contracting_volume(ge(&[(0, 1), (0, 1), (0, 1)])),
        &ConvexBody::Ball {
            center: vec![Scalar::Float(0.0), Scalar::Float(0.0), Scalar::Float(0.0)],
            radius: Scalar::Float(0.125),
        },
        80,
    )
    .unwrap();
    assert!(matches!(estimate.verdict, LimitVerdict::Degenerate));
    assert_eq!(estimate.coord_trends[0], CoordTrend::Collapsed);
    assert_eq!(estimate.coord_trends[1], CoordTrend::Expanding);
}

#[test]
fn pullback_hyperplane_selects_highest_degree() {
    let cocycle = contracting_similarity();
    let one = Scalar::one(EXACT);
    let dir = dynamics::pullback_hyperplane(&cocycle, &[one.clone(), one.clone(), one.clone()], 60).unwrap();
    assert!((dir[0]).abs() < 1e-12 && (dir[1]).abs() < 1e-12);
    assert!((dir[2] - 1.0).abs() < 1e-12);
    // a single-degree eigenvector is unchanged
    let dir = dynamics::pullback_hyperplane(&cocycle, &[Scalar::zero(EXACT), one.clone(), Scalar::zero(EXACT)], 60)
        .unwrap();
    assert!((dir[1] - 1.0).abs() < 1e-12);
    // equal degrees: the direction is preserved and normalized
    let dir = dynamics::pullback_hyperplane(&cocycle, &[one.clone(), one.clone(), Scalar::zero(EXACT)], 60).unwrap();
    let s = 0.5f64.sqrt();
    assert!((dir[0] - s).abs() < 1e-12 && (dir[1] - s).abs() < 1e-12 && dir[2].abs() < 1e-12);
    // zero normal errors
    let z = Scalar::zero(EXACT);
    assert!(matches!(
        dynamics::pullback_hyperplane(&cocycle, &[z.clone(), z.clone(), z], 10),
        Err(Error::ZeroNormal)
    ));
}

#[test]
fn grade_e_blocks() {
    let split = dynamics::omega_degrees(&contracting_similarity(), Direction::Contracting).unwrap();
    let blocks = dynamics::grade_e(&split, &similarity()).unwrap();
    assert_eq!(blocks.len(), 2);
    assert_eq!(blocks[0].0, Scalar::one(EXACT));
    assert_eq!(blocks[0].1, Subspace::coordinate(&[0, 1], 3, EXACT));
    assert_eq!(blocks[1].0, Scalar::from_i64(2, EXACT));
    assert_eq!(blocks[1].1, Subspace::coordinate(&[2], 3, EXACT));

    let split = dynamics::omega_degrees(&contracting_volume(ge(&[(0, 1), (0, 1), (0, 1)])), Direction::Contracting)
        .unwrap();
    let blocks = dynamics::grade_e(&split, &volume_preserving()).unwrap();
    assert_eq!(blocks.len(), 1);
    assert_eq!(blocks[0].1, Subspace::coordinate(&[0], 3, EXACT));
}

#[test]
fn invisible_subspace_cases() {
    // radiant: similarity splitting has P = F = 0, holonomy the dilation
    let rg = similarity();
    let split = dynamics::omega_degrees(&contracting_similarity(), Direction::Contracting).unwrap();
    let holonomy = vec![diag(&[(2, 1), (2, 1), (4, 1)])];
    let i = dynamics::invisible_subspace(&split, &rg, &holonomy).unwrap();
    assert!(i.is_zero());
    // identity holonomy with P = F = 0 also gives zero
    let i = dynamics::invisible_subspace(&split, &rg, &[Matrix::identity(3, EXACT)]).unwrap();
    assert!(i.is_zero());

    // volume-preserving splitting with diagonal holonomy: I = span(Y, Z)
    let rg = volume_preserving();
    let split = dynamics::omega_degrees(&contracting_volume(ge(&[(0, 1), (0, 1), (0, 1)])), Direction::Contracting)
        .unwrap();
    let holonomy = vec![diag(&[(1, 2), (2, 1), (1, 1)])];
    let i = dynamics::invisible_subspace(&split, &rg, &holonomy).unwrap();
    assert_eq!(i, Subspace::coordinate(&[1, 2], 3, EXACT));
}

#[test]
fn invariant_complement_and_radial_data() {
    let rg = volume_preserving();
    let split = dynamics::omega_degrees(&contracting_volume(ge(&[(0, 1), (0, 1), (0, 1)])), Direction::Contracting)
        .unwrap();
    let holonomy = vec![diag(&[(1, 2), (2, 1), (1, 1)])];
    let i = dynamics::invisible_subspace(&split, &rg, &holonomy).unwrap();
    let data = dynamics::invariant_complement(&i, &split, &rg, &holonomy).unwrap();
    assert_eq!(data.v, Subspace::coordinate(&[0], 3, EXACT));

    // I = everything gives V = 0 (use a splitting whose E is empty-free)
    let full = Subspace::full(3, EXACT);
    let data_full = dynamics::invariant_complement(&full, &split, &rg, &holonomy).unwrap();
    assert!(data_full.v.is_zero());

    // I = 0 with the similarity splitting gives V = everything
    let rg_sim = similarity();
    let split_sim = dynamics::omega_degrees(&contracting_similarity(), Direction::Contracting).unwrap();
    let data_sim =
        dynamics::invariant_complement(&Subspace::zero(3, EXACT), &split_sim, &rg_sim, &[]).unwrap();
    assert_eq!(data_sim.v.dim(), 3);

    // a holonomy part that moves V off itself is rejected
    let alg = rg.algebra();
    let skew = NilAffineMap::from_spec(
        alg.clone(),
        &nilgeo::nilaffine::MapSpec {
            c: vec![Scalar::zero(EXACT); 3],
            f: vec![
                vec![Scalar::one(EXACT), Scalar::zero(EXACT), Scalar::zero(EXACT)],
                vec![Scalar::one(EXACT), Scalar::one(EXACT), Scalar::zero(EXACT)],
                vec![Scalar::zero(EXACT), Scalar::zero(EXACT), Scalar::one(EXACT)],
            ],
        },
    )
    .unwrap();
    assert!(matches!(
        dynamics::invariant_complement(&i, &split, &rg, &[skew.linear().clone()]),
        Err(Error::NotInvariant { .. })
    ));
}

fn volume_data() -> (Arc<nilgeo::lie::GradedNilpotentAlgebra>, RayGeometry, dynamics::InvisibleData) {
    let rg = volume_preserving();
    let split = dynamics::omega_degrees(&contracting_volume(ge(&[(0, 1), (0, 1), (0, 1)])), Direction::Contracting)
        .unwrap();
    let holonomy = vec![diag(&[(1, 2), (2, 1), (1, 1)])];
    let i = dynamics::invisible_subspace(&split, &rg, &holonomy).unwrap();
    let data = dynamics::invariant_complement(&i, &split, &rg, &holonomy).unwrap();
    (rg.algebra().clone(), rg, data)
}

#[test]
fn radial_field_and_flow_frozen_values() {
    let (alg, _rg, data) = volume_data();
    // x = (1,1,1): x_I = (0,1,3/2), x_V = (1,0,0)
    let x = ge(&[(1, 1), (1, 1), (1, 1)]);
    let field = dynamics::radial_field(&alg, &x, &data).unwrap();
    assert_eq!(field, ge(&[(1, 1), (0, 1), (0, 1)]).log);
    // x in exp(I): field vanishes
    let xi = ge(&[(0, 1), (2, 1), (-3, 1)]);
    assert!(linalg::vec_is_zero(&dynamics::radial_field(&alg, &xi, &data).unwrap(), 0.0));
    // x in exp(V): field is ln x
    let xv = ge(&[(5, 7), (0, 1), (0, 1)]);
    assert_eq!(dynamics::radial_field(&alg, &xv, &data).unwrap(), xv.log);

    // flow at lambda = 2: (1,1,1) -> (2,1,1/2)
    let flowed = dynamics::radial_flow_lambda(&alg, &x, &Scalar::from_i64(2, EXACT), &data).unwrap();
    assert_eq!(flowed, ge(&[(2, 1), (1, 1), (1, 2)]));
    // lambda = 1 is the identity
    assert_eq!(dynamics::radial_flow_lambda(&alg, &x, &Scalar::one(EXACT), &data).unwrap(), x);
    // points of exp(I) are fixed for every lambda
    assert_eq!(
        dynamics::radial_flow_lambda(&alg, &xi, &Scalar::from_i64(7, EXACT), &data).unwrap(),
        xi
    );
}

#[test]
fn radial_flow_group_law_exact() {
    let (alg, _rg, data) = volume_data();
    let mut sampler = nilgeo::sampling::Sampler::new(23);
    for _ in 0..50 {
        let x = GroupElement::new(sampler.vector(3, EXACT));
        let l1 = sampler.rational_nonzero().abs();
        let l2 = sampler.rational_nonzero().abs();
        let a = dynamics::radial_flow_lambda(
            &alg,
            &dynamics::radial_flow_lambda(&alg, &x, &l1, &data).unwrap(),
            &l2,
            &data,
        )
        .unwrap();
        let b = dynamics::radial_flow_lambda(&alg, &x, &(&l1 * &l2), &data).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn volume_scaling_and_field_equivariance() {
    let (alg, rg, data) = volume_data();
    // dim V = 1: determinant e^t, checked at t = ln 2 and t = 0
    let report =
        dynamics::volume_scaling_check(&rg, &data, &[2f64.ln(), 0.0, -0.4, 1.0], 30, 5).unwrap();
    assert!(report.pass(), "residual {}", report.max_residual());

    // dim V = 3 (I = 0, similarity): determinant e^{3t}
    let rg_sim = similarity();
    let split_sim = dynamics::omega_degrees(&contracting_similarity(), Direction::Contracting).unwrap();
    let data_sim =
        dynamics::invariant_complement(&Subspace::zero(3, EXACT), &split_sim, &rg_sim, &[]).unwrap();
    let report = dynamics::volume_scaling_check(&rg_sim, &data_sim, &[1.0], 20, 6).unwrap();
    assert!(report.pass(), "residual {}", report.max_residual());

    // field equivariance: identity, a translation in exp(I), a diagonal part
    let id = NilAffineMap::identity(alg.clone());
    assert!(dynamics::field_equivariance_check(&id, &data, 100, 7).unwrap().pass());
    let tr = NilAffineMap::from_translation(alg.clone(), ge(&[(0, 1), (1, 1), (0, 1)])).unwrap();
    let rep = dynamics::field_equivariance_check(&tr, &data, 100, 8).unwrap();
    assert!(rep.pass(), "residual {}", rep.max_residual());
    let lin = NilAffineMap::from_linear(alg.clone(), diag(&[(1, 2), (2, 1), (1, 1)])).unwrap();
    let rep = dynamics::field_equivariance_check(&lin, &data, 100, 9).unwrap();
    assert!(rep.pass(), "residual {}", rep.max_residual());
    // a translation outside exp(I) is rejected
    let bad = NilAffineMap::from_translation(alg.clone(), ge(&[(1, 1), (0, 1), (0, 1)])).unwrap();
    assert!(matches!(
        dynamics::field_equivariance_check(&bad, &data, 10, 10),
        Err(Error::TranslationNotInI)
    ));
}

#[test]
fn orbit_limit_of_counterexample_map() {
    let alg = Arc::new(heisenberg3(EXACT));
    // f(x, y, z) = (x/2, y, z/2) is an automorphism: (1/2) * 1 = 1/2
    let f = NilAffineMap::from_linear(alg.clone(), diag(&[(1, 2), (1, 1), (1, 2)])).unwrap();
    let p = ge(&[(1, 1), (1, 1), (0, 1)]);
    match dynamics::orbit_limit(&f, &p, 60).unwrap() {
        OrbitResult::Converged { point, iterations } => {
            assert!(iterations <= 60);
            assert!((point[0]).abs() <= 1e-9);
            assert!((point[1] - 1.0).abs() <= 1e-12);
            assert!((point[2]).abs() <= 1e-9);
        }
        other => panic!("expected convergence, got {other:?}"),
    }
    // identity map converges immediately to p
    let id = NilAffineMap::identity(alg.clone());
    assert!(matches!(dynamics::orbit_limit(&id, &p, 5).unwrap(), OrbitResult::Converged { .. }));
    // a dilation by 2 diverges from any nonidentity point
    let dil = NilAffineMap::from_linear(alg.clone(), diag(&[(2, 1), (2, 1), (4, 1)])).unwrap();
    assert!(matches!(
        dynamics::orbit_limit(&dil, &p, 200).unwrap(),
        OrbitResult::Diverged { .. }
    ));
}

#[test]
fn properness_probe_outcomes() {
    let alg = Arc::new(heisenberg3(EXACT));
    let f = NilAffineMap::from_linear(alg.clone(), diag(&[(1, 2), (1, 1), (1, 2)])).unwrap();
    // the sequence g_n = f^n escapes (f^{-n} blows up) while orbits near
    // (x0, 1, 0) converge to (0, 1, 0)
    let maps: Vec<NilAffineMap> = (1..=40).map(|n| f.pow(n).unwrap()).collect();
    let samples: Vec<GroupElement> = (0..8)
        .map(|k| ge(&[(k + 1, 4), (1, 1), (k, 7)]))
        .collect();
    match dynamics::properness_probe(&maps, &samples, 100).unwrap() {
        ProbeOutcome::NonProperWitnessFound { limit_point, escape_norm, .. } => {
            assert!((limit_point[0]).abs() < 1e-6);
            assert!((limit_point[1] - 1.0).abs() < 1e-9);
            assert!((limit_point[2]).abs() < 1e-6);
            assert!(escape_norm > 1e6);
        }
        other => panic!("expected a witness, got {other:?}"),
    }

    // the identity sequence does not escape
    let id = NilAffineMap::identity(alg.clone());
    let maps: Vec<NilAffineMap> = (0..10).map(|_| id.clone()).collect();
    match dynamics::properness_probe(&maps, &samples, 100).unwrap() {
        ProbeOutcome::NoWitnessFound { reason } => assert!(reason.contains("not escaping")),
        other => panic!("expected no witness, got {other:?}"),
    }

    // dilations by 2^n escape but send an annulus to infinity: no witness
    let dil = NilAffineMap::from_linear(alg.clone(), diag(&[(2, 1), (2, 1), (4, 1)])).unwrap();
    let maps: Vec<NilAffineMap> = (1..=40).map(|n| dil.pow(n).unwrap()).collect();
    let annulus: Vec<GroupElement> = (0..8).map(|k| ge(&[(k + 2, 2), (1, 1), (1, 1)])).collect();
    match dynamics::properness_probe(&maps, &annulus, 100).unwrap() {
        ProbeOutcome::NoWitnessFound { reason } => assert!(reason.contains("budget")),
        other => panic!("expected no witness, got {other:?}"),
    }
}
