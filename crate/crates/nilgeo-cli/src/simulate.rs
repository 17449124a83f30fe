//! The `simulate` subcommand: run the cocycle-dynamics pipeline described
//! by a scenario file and emit a report with a stable schema.

use std::process::ExitCode;

use serde::Serialize;

use nilgeo::dynamics::{
    self, Cocycle, Direction, FriedSplitting, InvisibleData, LimitSetEstimate, OrbitResult,
    ProbeOutcome,
};
use nilgeo::lie::GroupElement;
use nilgeo::linalg::Subspace;
use nilgeo::nilaffine::{NilAffineMap, RayGeometry};
use nilgeo::report::{Check, Report};
use nilgeo::sampling::Sampler;
use nilgeo::scalar::{Scalar, ScalarMode};

use crate::model::Scenario;

#[derive(Serialize)]
struct SplittingOut {
    omega: Vec<dynamics::Omega>,
    #[serde(rename = "E")]
    e: Vec<Vec<Scalar>>,
    #[serde(rename = "P")]
    p: Vec<Vec<Scalar>>,
    #[serde(rename = "F")]
    f: Vec<Vec<Scalar>>,
}

#[derive(Serialize)]
struct GradeOut {
    degree: Scalar,
    basis: Vec<Vec<Scalar>>,
}

#[derive(Serialize)]
struct SimulateReport {
    command: &'static str,
    scenario: String,
    seed: u64,
    direction: Direction,
    #[serde(skip_serializing_if = "Option::is_none")]
    splitting: Option<SplittingOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_point: Option<Vec<Scalar>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grading_of_e: Option<Vec<GradeOut>>,
    #[serde(rename = "I", skip_serializing_if = "Option::is_none")]
    i: Option<Vec<Vec<Scalar>>>,
    #[serde(rename = "V", skip_serializing_if = "Option::is_none")]
    v: Option<Vec<Vec<Scalar>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    limit_set: Option<LimitSetEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orbit: Option<OrbitResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    probe: Option<ProbeOutcome>,
    checks: Vec<Check>,
    pass: bool,
}

fn subspace_rows(s: &Subspace) -> Vec<Vec<Scalar>> {
    s.basis().to_vec()
}

/// Everything the pipeline produced; assembled into the report at the end.
#[derive(Default)]
struct Outcome {
    splitting: Option<FriedSplitting>,
    fixed_point: Option<GroupElement>,
    data: Option<InvisibleData>,
    grading: Option<Vec<(Scalar, Subspace)>>,
    limit_set: Option<LimitSetEstimate>,
    orbit: Option<OrbitResult>,
    probe: Option<ProbeOutcome>,
}

fn run_pipeline(
    scenario: &Scenario,
    geometry: &RayGeometry,
    cocycle: &Cocycle,
    seed: u64,
    report: &mut Report,
) -> nilgeo::Result<Outcome> {
    let mut out = Outcome::default();

    // Input validation: the declared family must be a cocycle with linear
    // parts in KA.
    report.merge(dynamics::cocycle_check(cocycle)?);

    // The splitting machinery works in the contracting orientation.
    let contracting = match scenario.direction {
        Direction::Contracting => cocycle.clone(),
        Direction::Expanding => cocycle.inverted()?,
    };
    let splitting = dynamics::omega_degrees(&contracting, Direction::Contracting)?;
    let genuinely_contracting = splitting.p.dim() < geometry.algebra().dim();
    report.push(
        Check::exact("dim_E_positive", splitting.dim_e() > 0 || !genuinely_contracting)
            .detail(format!("dim E = {}", splitting.dim_e())),
    );

    if geometry.rank() == 1 {
        let grading = dynamics::grade_e(&splitting, geometry)?;
        let t = contracting.map(1, 0)?;
        let (q, _c_l) = dynamics::q_map(&t, &splitting)?;
        let fixed = dynamics::q_fixed_point(&q, &splitting.f)?;
        report.push(Check::exact("q_fixed_point_on_F", splitting.f.contains(&fixed.log, 1e-10)));

        // holonomy linear parts as declared (invariance does not depend on
        // the orientation)
        let mut holonomy = Vec::new();
        match &cocycle.family {
            dynamics::Family::Power { generator } => holonomy.push(generator.linear().clone()),
            dynamics::Family::Table { maps, .. } => {
                for map in maps.values() {
                    holonomy.push(map.linear().clone());
                }
            }
        }
        let i_space = dynamics::invisible_subspace(&splitting, geometry, &holonomy)?;
        let data = dynamics::invariant_complement(&i_space, &splitting, geometry, &holonomy)?;
        report.push(
            Check::exact("invisible_contains_PF", i_space.contains_subspace(&splitting.p.sum(&splitting.f), 1e-12))
                .detail(format!("dim I = {}, dim V = {}", i_space.dim(), data.v.dim())),
        );

        report.merge(dynamics::volume_scaling_check(
            geometry,
            &data,
            &[2f64.ln(), 0.0, 1.0],
            scenario.budgets.samples.max(4),
            seed,
        )?);

        // field equivariance for the contracting step, when it stabilizes I
        let eligible = data.i.contains(&t.translation().log, 1e-12);
        if eligible {
            report.merge(dynamics::field_equivariance_check(&t, &data, scenario.budgets.samples.max(4), seed)?);
        } else {
            report.push(
                Check::exact("field_equivariance", true)
                    .detail("skipped: generator translation lies outside exp(I)"),
            );
        }

        out.grading = Some(grading);
        out.fixed_point = Some(fixed);
        out.data = Some(data);
    } else {
        report.push(
            Check::exact("rank_one_analysis", true)
                .detail(format!("skipped: geometry has rank {}", geometry.rank())),
        );
    }

    if let Some(body) = &scenario.body {
        out.limit_set = Some(dynamics::limit_set_estimate(&contracting, body, scenario.budgets.j_max)?);
    }

    if let Some(orbit) = &scenario.orbit {
        let map = cocycle.map(1, 0)?;
        let alg = geometry.algebra();
        let start = GroupElement::new(
            orbit.start.iter().map(|s| s.clone().into_mode(alg.mode())).collect(),
        );
        out.orbit = Some(dynamics::orbit_limit(&map, &start, orbit.n_max)?);
    }

    if let Some(probe) = &scenario.probe {
        let alg = geometry.algebra();
        let mode = alg.mode();
        let maps: Vec<NilAffineMap> = (1..=probe.powers)
            .map(|n| cocycle.map(n, 0))
            .collect::<nilgeo::Result<_>>()?;
        let samples: Vec<GroupElement> = if probe.samples.is_empty() {
            let center: Vec<Scalar> = scenario
                .orbit
                .as_ref()
                .map(|o| o.start.clone())
                .unwrap_or_else(|| vec![Scalar::zero(ScalarMode::Float); alg.dim()]);
            let mut sampler = Sampler::new(seed);
            (0..probe.witness_budget.min(32))
                .map(|_| {
                    let jitter = sampler.vector(alg.dim(), mode);
                    let scaled: Vec<Scalar> = jitter
                        .iter()
                        .zip(&center)
                        .map(|(j, c)| {
                            let small = match mode {
                                ScalarMode::Exact => j * &Scalar::ratio(1, 64),
                                ScalarMode::Float => Scalar::Float(j.to_f64() / 64.0),
                            };
                            &small + &c.clone().into_mode(mode)
                        })
                        .collect();
                    GroupElement::new(scaled)
                })
                .collect()
        } else {
            probe
                .samples
                .iter()
                .map(|p| GroupElement::new(p.iter().map(|s| s.clone().into_mode(mode)).collect()))
                .collect()
        };
        out.probe = Some(dynamics::properness_probe(&maps, &samples, probe.witness_budget)?);
    }

    out.splitting = Some(splitting);
    Ok(out)
}

pub fn cmd_simulate(path: &str, json: bool, seed_flag: Option<u64>) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("cannot read {path}: {e}");
            return ExitCode::from(2);
        }
    };
    let scenario: Scenario = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("parse error in {path} at line {}, column {}: {e}", e.line(), e.column());
            return ExitCode::from(2);
        }
    };
    let seed = seed_flag.unwrap_or(scenario.seed);
    let geometry = match scenario.geometry() {
        Ok(g) => g,
        Err(e) => {
            eprintln!("invalid scenario geometry: {e}");
            return ExitCode::from(2);
        }
    };
    let validation = geometry.validate();
    let mut report = Report::new();
    report.merge(validation);
    let cocycle = match scenario.cocycle(&geometry) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invalid scenario maps: {e}");
            return ExitCode::from(2);
        }
    };

    let outcome = match run_pipeline(&scenario, &geometry, &cocycle, seed, &mut report) {
        Ok(outcome) => outcome,
        Err(e) => {
            // invariant violations surface as a failing check, exit 1
            report.push(Check::exact("pipeline", false).detail(e.to_string()));
            Outcome::default()
        }
    };

    let pass = report.pass();
    let out = SimulateReport {
        command: "simulate",
        scenario: path.to_string(),
        seed,
        direction: scenario.direction,
        splitting: outcome.splitting.as_ref().map(|s| SplittingOut {
            omega: s.omega.clone(),
            e: subspace_rows(&s.e),
            p: subspace_rows(&s.p),
            f: subspace_rows(&s.f),
        }),
        fixed_point: outcome.fixed_point.as_ref().map(|p| p.log.clone()),
        grading_of_e: outcome.grading.as_ref().map(|blocks| {
            blocks
                .iter()
                .map(|(d, s)| GradeOut { degree: d.clone(), basis: subspace_rows(s) })
                .collect()
        }),
        i: outcome.data.as_ref().map(|d| subspace_rows(&d.i)),
        v: outcome.data.as_ref().map(|d| subspace_rows(&d.v)),
        limit_set: outcome.limit_set,
        orbit: outcome.orbit,
        probe: outcome.probe,
        checks: report.checks.clone(),
        pass,
    };

    if json {
        crate::print_json(&out);
    } else {
        println!("scenario {path} (direction {:?}, seed {seed})", out.direction);
        if let Some(s) = &out.splitting {
            println!("omega tags: {:?}", s.omega);
            println!("dim E = {}, dim P = {}, dim F = {}", s.e.len(), s.p.len(), s.f.len());
        }
        if let Some(fp) = &out.fixed_point {
            let coords: Vec<String> = fp.iter().map(|s| s.to_string()).collect();
            println!("fixed point on exp(F): [{}]", coords.join(", "));
        }
        if let Some(i) = &out.i {
            println!("dim I = {}, dim V = {}", i.len(), out.v.as_ref().map_or(0, Vec::len));
        }
        if let Some(l) = &out.limit_set {
            println!("limit set: {:?} after {} steps", l.verdict, l.iterations);
        }
        if let Some(o) = &out.orbit {
            println!("orbit: {o:?}");
        }
        if let Some(p) = &out.probe {
            println!("probe: {p:?}");
        }
        crate::print_checks_text(&report);
        println!("{}", if pass { "PASS" } else { "FAIL" });
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
