//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

#![allow(clippy::needless_range_loop)]

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::Matrix3;
use polysphere::angles::{self, FeasibilityStatus, MARGINAL_SLACK};
use polysphere::capacity::{self, segment_derivative};
use polysphere::lobachevsky::{lobachevsky, lobachevsky_quadrature};
use polysphere::solver::{self, SolveOptions};
use polysphere::trig::{self, TriangleAngles};
use polysphere::{AngleVector, EdgeFunction, Mesh};
use rand::Rng;

use common::{corpus, euclidean_point, interior_point, max_abs_diff, random_structure, rng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Smallest face margin of sampled points; excludes only points that sit
/// on the boundary to within rounding.
const SAMPLE_MARGIN: f64 = 1e-9;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lobachevsky_agreement() -> Outcome {
    const LAMBDA_PI_4: f64 = 0.457_982_797_088_609_5;
    let start = Instant::now();
    let n = 10_000;
    let mut worst = 0.0f64;
    for i in 0..n {
        let t = -PI + 3.0 * PI * (i as f64 + 0.5) / n as f64;
        worst = worst.max((lobachevsky(t) - lobachevsky_quadrature(t, 1e-12)).abs());
    }
    let anchor = (lobachevsky(FRAC_PI_4) - LAMBDA_PI_4)
        .abs()
        .max((lobachevsky_quadrature(FRAC_PI_4, 1e-12) - LAMBDA_PI_4).abs());
    let elapsed = start.elapsed();
    check(
        worst <= 1e-10 && anchor <= 1e-9 && elapsed < Duration::from_secs(5),
        format!("max |series - quadrature| = {worst:.2e} over {n} points, Λ(π/4) error {anchor:.2e}, {elapsed:.2?}"),
    )
}

fn theta_vanishes_at_octant() -> Outcome {
    let v = capacity::capacity_theta(&TriangleAngles::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2))
        .map_err(|e| e.to_string())?;
    check(v.abs() <= 1e-12, format!("θ(π/2, π/2, π/2) = {v:.3e}"))
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn gradient_matches_differences() -> Outcome {
    let mut rng = rng(3);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = interior_point(&mut rng, SAMPLE_MARGIN.max(2.0 * h));
        let g = capacity::grad_theta(&x).map_err(|e| e.to_string())?;
        let fd: Vec<f64> = (0..3)
            .map(|i| {
                let (mut up, mut down) = (x, x);
                up.0[i] += h;
                down.0[i] -= h;
                (capacity::capacity_theta(&up).unwrap() - capacity::capacity_theta(&down).unwrap())
                    / (2.0 * h)
            })
            .collect();
        worst = worst.max(max_abs_diff(&g, &fd) / norm_inf(&g));
    }
    check(
        worst <= 1e-5,
        format!("max relative error {worst:.2e} over 1000 points"),
    )
}

fn capacity_is_convex() -> Outcome {
    let mut rng = rng(4);
    let mut min_eig = f64::INFINITY;
    for _ in 0..1000 {
        let x = interior_point(&mut rng, SAMPLE_MARGIN);
        let h = capacity::hessian_theta(&x).map_err(|e| e.to_string())?;
        let eig = Matrix3::from_fn(|i, j| h[i][j])
            .symmetric_eigenvalues()
            .min();
        min_eig = min_eig.min(eig);
    }
    let mut worst_gap = f64::INFINITY;
    for (_, file) in corpus() {
        let m = &file.mesh;
        for _ in 0..100 {
            let a = random_structure(m, &mut rng, SAMPLE_MARGIN);
            let b = random_structure(m, &mut rng, SAMPLE_MARGIN);
            let mid = AngleVector(a.0.iter().zip(&b.0).map(|(p, q)| 0.5 * (p + q)).collect());
            let value = |x: &AngleVector| angles::total_capacity_value(m, x).unwrap();
            worst_gap = worst_gap.min(0.5 * (value(&a) + value(&b)) - value(&mid));
        }
    }
    check(
        min_eig > 0.0 && worst_gap > 0.0,
        format!("min Hessian eigenvalue {min_eig:.3e}, min midpoint gap {worst_gap:.3e}"),
    )
}

fn trig_round_trip() -> Outcome {
    let mut rng = rng(5);
    let (mut round, mut forms) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let x = interior_point(&mut rng, SAMPLE_MARGIN);
        let y = trig::angles_to_lengths(&x).map_err(|e| e.to_string())?;
        let back = trig::lengths_to_angles(&y).map_err(|e| e.to_string())?;
        round = round.max(max_abs_diff(&back.0, &x.0));
        let cosine = trig::cosine_law(&x).map(|c| c.clamp(-1.0, 1.0).acos());
        forms = forms.max(max_abs_diff(&cosine, &trig::half_angle_lengths(&x)));
    }
    check(round <= 1e-9 && forms <= 1e-12, format!("max round-trip error {round:.2e}, max |y| disagreement between cosine-law forms {forms:.2e} over 10000 triangles"))
}

fn jacobian_matches_differences() -> Outcome {
    let mut rng = rng(6);
    let h = 1e-6;
    let (mut worst, mut asym) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let x = interior_point(&mut rng, SAMPLE_MARGIN.max(2.0 * h));
        let jac = trig::length_jacobian(&x).map_err(|e| e.to_string())?;
        let lengths = |x: &TriangleAngles| trig::angles_to_lengths(x).unwrap().0;
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        for j in 0..3 {
            let (mut up, mut down) = (x, x);
            up.0[j] += h;
            down.0[j] -= h;
            let (yu, yd) = (lengths(&up), lengths(&down));
            for i in 0..3 {
                err = err.max(((yu[i] - yd[i]) / (2.0 * h) - jac[i][j]).abs());
                scale = scale.max(jac[i][j].abs());
            }
        }
        worst = worst.max(err / scale);
        let a = trig::sine_law_products(&x).map_err(|e| e.to_string())?;
        asym = asym.max((a[0] - a[1]).abs()).max((a[1] - a[2]).abs());
    }
    check(
        worst <= 1e-5 && asym <= 1e-12,
        format!("max relative error {worst:.2e}, max |A_ijk - A_jki| {asym:.2e}"),
    )
}

fn feasibility_matches_subset_condition() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(7);
    let (mut disagreements, mut marginal, mut feasible, mut total) = (0, 0, 0, 0);
    for (name, file) in corpus() {
        let m = &file.mesh;
        for _ in 0..100 {
            let d = EdgeFunction::from_fn(m, |_| rng.random_range(0.0..PI));
            let lp = angles::feasibility(m, &d).map_err(|e| format!("{name}: {e}"))?;
            let guo =
                angles::guo_condition_bruteforce(m, &d).map_err(|e| format!("{name}: {e}"))?;
            total += 1;
            if lp.marginal {
                marginal += 1;
                continue;
            }
            let lp_feasible = lp.status == FeasibilityStatus::Feasible;
            feasible += usize::from(lp_feasible);
            disagreements += usize::from(lp_feasible != guo);
        }
    }
    let elapsed = start.elapsed();
    check(
        disagreements == 0 && elapsed < Duration::from_secs(30),
        format!(
            "{disagreements} disagreements in {total} draws ({feasible} feasible, {marginal} within slack {MARGINAL_SLACK:e}), {elapsed:.2?}"
        ),
    )
}

/// The bundled invariant of each corpus mesh plus invariants of random
/// angle structures, which are feasible by construction.
fn feasible_instances() -> Vec<(String, Mesh, EdgeFunction)> {
    let mut rng = rng(8);
    let mut out = Vec::new();
    for (name, file) in corpus() {
        let m = file.mesh;
        out.push((
            format!("{name} (bundled)"),
            m.clone(),
            file.invariant.unwrap(),
        ));
        for k in 0..3 {
            let x = random_structure(&m, &mut rng, 0.05);
            out.push((
                format!("{name} (random {k})"),
                m.clone(),
                angles::edge_invariant(&m, &x).unwrap(),
            ));
        }
    }
    out
}

fn solution_is_unique() -> Outcome {
    let mut rng = rng(9);
    let opts = SolveOptions::default();
    let mut worst = 0.0f64;
    let mut count = 0;
    for (name, m, d) in feasible_instances() {
        let mut finals = Vec::new();
        for _ in 0..2 {
            let start =
                solver::random_start(&m, &d, &mut rng).map_err(|e| format!("{name}: {e}"))?;
            let r = solver::minimize_capacity_from(&m, &d, start, &opts)
                .map_err(|e| format!("{name}: {e}"))?;
            if !r.converged() {
                return Err(format!("{name}: solve ended with {:?}", r.status));
            }
            finals.push(r.x_final.unwrap());
        }
        worst = worst.max(max_abs_diff(&finals[0].0, &finals[1].0));
        count += 1;
    }
    check(
        worst <= 1e-7,
        format!("max per-corner difference {worst:.2e} over {count} instances"),
    )
}

fn metric_round_trip() -> Outcome {
    let mut rng = rng(10);
    let opts = SolveOptions::default();
    let mut cases: Vec<(String, Mesh, EdgeFunction)> = Vec::new();
    let octa = polysphere::corpus::octahedron().mesh;
    cases.push((
        "octahedron l = π/2".into(),
        octa.clone(),
        EdgeFunction::constant(&octa, FRAC_PI_2),
    ));
    for k in 0..50 {
        let l = EdgeFunction::from_fn(&octa, |_| FRAC_PI_2 + rng.random_range(-0.15..0.15));
        cases.push((format!("octahedron perturbation {k}"), octa.clone(), l));
    }
    let double = polysphere::corpus::double_triangle().mesh;
    cases.push((
        "double triangle".into(),
        double.clone(),
        EdgeFunction::constant(&double, (1.0 / 5f64.sqrt()).acos()),
    ));

    let (mut err, mut residual, mut slowest) = (0.0f64, 0.0f64, Duration::ZERO);
    for (name, m, l) in &cases {
        let start = Instant::now();
        let r = solver::roundtrip(m, l, &opts).map_err(|e| format!("{name}: {e}"))?;
        slowest = slowest.max(start.elapsed());
        if !r.solve.converged() {
            return Err(format!("{name}: solve ended with {:?}", r.solve.status));
        }
        err = err.max(r.max_length_error);
        residual = residual.max(r.solve.metric.as_ref().unwrap().max_residual());
    }
    check(
        err <= 1e-8 && residual <= 1e-8 && slowest < Duration::from_secs(1),
        format!("{} instances, max length error {err:.2e}, max residual {residual:.2e}, slowest {slowest:.2?}", cases.len()),
    )
}

fn degeneration() -> Outcome {
    let p = TriangleAngles::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2);
    let ts = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let diverging = [
        ("I", TriangleAngles::new(PI / 3.0, PI / 3.0, PI / 3.0)),
        ("II", TriangleAngles::new(FRAC_PI_2, 0.75 * PI, 0.75 * PI)),
        ("III", TriangleAngles::new(0.0, PI / 3.0, 2.0 * PI / 3.0)),
        ("IV", TriangleAngles::new(PI, FRAC_PI_2, FRAC_PI_2)),
    ];
    let bounded = [
        ("V", TriangleAngles::new(PI, PI, PI)),
        ("VI", TriangleAngles::new(PI, 0.0, 0.0)),
    ];
    let slope = |a: &TriangleAngles, t: f64| {
        segment_derivative(a, &p, t)
            .map(|s| s.value())
            .map_err(|e| e.to_string())
    };

    let mut notes = Vec::new();
    let mut ok = true;
    for (kind, a) in diverging {
        if trig::classify(&a, trig::CLASSIFY_EPS).to_string() != kind {
            return Err(format!("target {:?} is not of type {kind}", a.0));
        }
        let values = ts
            .iter()
            .map(|&t| slope(&a, t))
            .collect::<Result<Vec<_>, _>>()?;
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        ok &= decreasing && values.iter().all(|&v| v < 0.0) && values[4] < -3.0;
        notes.push(format!("{kind}: f'(1e-6) = {:.3}", values[4]));
    }
    for (kind, a) in bounded {
        if trig::classify(&a, trig::CLASSIFY_EPS).to_string() != kind {
            return Err(format!("target {:?} is not of type {kind}", a.0));
        }
        let jump = (slope(&a, 1e-5)? - slope(&a, 1e-6)?).abs();
        ok &= jump < 1e-2;
        notes.push(format!("{kind}: |f'(1e-5) - f'(1e-6)| = {jump:.1e}"));
    }
    check(ok, notes.join(", "))
}

fn derivative_forms_agree() -> Outcome {
    let mut rng = rng(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let a = interior_point(&mut rng, SAMPLE_MARGIN);
        let p = interior_point(&mut rng, SAMPLE_MARGIN);
        let t = 1.0 - rng.random_range(0.0..1.0);
        let s = segment_derivative(&a, &p, t).map_err(|e| e.to_string())?;
        worst = worst.max((s.direct - s.expanded).abs());
    }
    check(
        worst <= 1e-9,
        format!("max |direct - expanded| = {worst:.2e} over 1000 triples"),
    )
}

fn euclidean_relations() -> Outcome {
    let mut rng = rng(12);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = euclidean_point(&mut rng);
        let tilde = capacity::capacity_theta_tilde(&x).map_err(|e| e.to_string())?;
        worst = worst.max((tilde + 0.5 * capacity::capacity_v(&x)).abs());
    }
    let mut invariant_gap = 0.0f64;
    for (_, file) in corpus() {
        let m = &file.mesh;
        for _ in 0..100 {
            let x = AngleVector(
                (0..m.num_faces())
                    .flat_map(|_| euclidean_point(&mut rng).0)
                    .collect(),
            );
            let d = angles::edge_invariant(m, &x).unwrap();
            let delaunay = angles::delaunay_invariant(m, &x).unwrap();
            for e in 0..m.num_edges() {
                invariant_gap = invariant_gap.max((2.0 * d[e] + delaunay[e] - 2.0 * PI).abs());
            }
        }
    }
    // a few ulps of 2π
    let ulps = 16.0 * f64::EPSILON * 2.0 * PI;
    check(
        worst <= 1e-10 && invariant_gap <= ulps,
        format!("max |θ̃ + V/2| = {worst:.2e}, max |2D + 𝒟 - 2π| = {invariant_gap:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("Lobachevsky series vs quadrature", lobachevsky_agreement),
        ("θ at the octant triangle", theta_vanishes_at_octant),
        (
            "gradient vs finite differences",
            gradient_matches_differences,
        ),
        ("convexity", capacity_is_convex),
        ("angles/lengths round trip", trig_round_trip),
        ("length Jacobian", jacobian_matches_differences),
        (
            "LP feasibility vs subset condition",
            feasibility_matches_subset_condition,
        ),
        ("uniqueness from random starts", solution_is_unique),
        ("metric round trip", metric_round_trip),
        ("degeneration at boundary strata", degeneration),
        ("segment derivative forms", derivative_forms_agree),
        ("Euclidean relations", euclidean_relations),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail}", i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
