//! Minimization of the total capacity over angle structures with a
//! prescribed edge invariant, and recovery of the metric at the minimizer.
//!
//! The edge constraints pair up corners disjointly, so the null space of the
//! constraint matrix has the orthonormal basis `(e_a - e_b)/√2`, one vector
//! per edge. Newton's method runs in those reduced coordinates, with steps
//! capped short of the face constraints and an Armijo backtracking search.
//! At a critical point the two corners facing each edge see the same
//! `ln tan(l/2)`, which defines the edge length `l`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::angles::{self, AngleVector, ConstraintSystem, FeasibilityResult};
use crate::capacity;
use crate::error::{Error, Result};
use crate::mesh::{EdgeFunction, Mesh};
use crate::trig::{self, TriangleLengths};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Stop when the reduced gradient's infinity norm is at most this.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Backtracking factor.
    pub ls_shrink: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo_c: f64,
    /// Largest fraction of the distance to the nearest constraint a step may
    /// cover.
    pub boundary_fraction: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iters: 500,
            ls_shrink: 0.5,
            armijo_c: 1e-4,
            boundary_fraction: 0.99,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = self.grad_tol > 0.0
            && self.max_iters > 0
            && self.ls_shrink > 0.0
            && self.armijo_c > 0.0;
        if positive
            && self.ls_shrink < 1.0
            && self.armijo_c < 1.0
            && self.boundary_fraction > 0.0
            && self.boundary_fraction < 1.0
        {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid solver options {self:?}")))
        }
    }
}

/// Edge lengths measured at a critical point must agree from both sides to
/// this many radians.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    Infeasible,
    IterationLimit,
}

/// Lengths read off an angle structure, one per corner averaged per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedMetric {
    pub lengths: EdgeFunction,
    /// `|y_a - y_b|` between the two corner-derived lengths of each edge.
    pub residuals: EdgeFunction,
    /// `ln tan(l(e)/2)`, the Lagrange multiplier of the edge constraint.
    pub multipliers: EdgeFunction,
}

impl ExtractedMetric {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Final (or best) iterate; absent only for infeasible invariants.
    pub x_final: Option<AngleVector>,
    pub metric: Option<ExtractedMetric>,
    pub iterations: usize,
    /// Θ at the start and after each accepted step.
    pub objective_trace: Vec<f64>,
    /// Infinity norm of the reduced gradient at `x_final`.
    pub reduced_gradient: f64,
    /// Smallest face margin seen over all iterates; shrinking values signal
    /// drift toward degenerate faces.
    pub min_face_margin: f64,
    pub feasibility: FeasibilityResult,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// Per-corner lengths via the half-angle cosine law, averaged per edge.
pub fn extract_metric(m: &Mesh, x: &AngleVector) -> Result<ExtractedMetric> {
    x.check_len(m)?;
    m.require_valid()?;
    let mut corner_len = vec![0.0; x.len()];
    for f in 0..m.num_faces() {
        let t = x.face(f);
        trig::require_interior(&t, "extract_metric").map_err(|e| Error::FaceDomain {
            face: m.face(f).id.clone(),
            reason: e.to_string(),
        })?;
        corner_len[3 * f..3 * f + 3].copy_from_slice(&trig::half_angle_lengths(&t));
    }
    let mut lengths = Vec::with_capacity(m.num_edges());
    let mut residuals = Vec::with_capacity(m.num_edges());
    for e in 0..m.num_edges() {
        let [a, b] = m.edge_pair(e)?;
        lengths.push(0.5 * (corner_len[a] + corner_len[b]));
        residuals.push((corner_len[a] - corner_len[b]).abs());
    }
    let multipliers = lengths.iter().map(|l| (0.5 * l).tan().ln()).collect();
    Ok(ExtractedMetric {
        lengths: EdgeFunction::new(lengths),
        residuals: EdgeFunction::new(residuals),
        multipliers: EdgeFunction::new(multipliers),
    })
}

/// Inner angles of each face measured from the metric `l`.
pub fn metric_to_structure(m: &Mesh, l: &EdgeFunction) -> Result<AngleVector> {
    m.require_valid()?;
    l.check_total(m, "length")?;
    let mut x = vec![0.0; m.num_corners()];
    for (f, face) in m.faces().iter().enumerate() {
        let y = TriangleLengths(face.edges.map(|e| l[e]));
        let angles = trig::lengths_to_angles(&y).map_err(|e| Error::FaceDomain {
            face: face.id.clone(),
            reason: e.to_string(),
        })?;
        x[3 * f..3 * f + 3].copy_from_slice(&angles.0);
    }
    Ok(AngleVector(x))
}

/// Null-space coordinates: for edge `e` with corners `(a, b)`, the basis
/// vector is `(e_a - e_b)/√2`.
struct NullSpace {
    pairs: Vec<[usize; 2]>,
    /// `(edge, ±1)` for each corner.
    corner: Vec<(usize, f64)>,
}

impl NullSpace {
    fn new(system: &ConstraintSystem, n: usize) -> Self {
        let mut corner = vec![(0, 0.0); n];
        for (e, &[a, b]) in system.rows.iter().enumerate() {
            corner[a] = (e, 1.0);
            corner[b] = (e, -1.0);
        }
        Self {
            pairs: system.rows.clone(),
            corner,
        }
    }

    fn dim(&self) -> usize {
        self.pairs.len()
    }

    fn reduce(&self, g: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.pairs
                .iter()
                .map(|&[a, b]| FRAC_1_SQRT_2 * (g[a] - g[b])),
        )
    }

    fn lift(&self, z: &DVector<f64>) -> Vec<f64> {
        self.corner
            .iter()
            .map(|&(e, s)| s * FRAC_1_SQRT_2 * z[e])
            .collect()
    }

    /// `Nᵀ H N` with `H` the block-diagonal Hessian of Θ.
    fn reduced_hessian(&self, m: &Mesh, x: &AngleVector) -> Result<DMatrix<f64>> {
        let k = self.dim();
        let mut h = DMatrix::zeros(k, k);
        for f in 0..m.num_faces() {
            let block = capacity::hessian_theta(&x.face(f)).map_err(|e| Error::FaceDomain {
                face: m.face(f).id.clone(),
                reason: e.to_string(),
            })?;
            for (i, row) in block.iter().enumerate() {
                let (ei, si) = self.corner[3 * f + i];
                for (j, &value) in row.iter().enumerate() {
                    let (ej, sj) = self.corner[3 * f + j];
                    h[(ei, ej)] += 0.5 * si * sj * value;
                }
            }
        }
        Ok(h)
    }
}

/// Largest `α` with every face constraint still satisfied at `x + α d`.
/// The constraints are the affine forms `x_c`, `π - x_c`, `x*_i`, `Σx - π`.
fn max_step(m: &Mesh, x: &AngleVector, d: &[f64]) -> f64 {
    let mut alpha = f64::INFINITY;
    let mut limit = |value: f64, rate: f64| {
        if rate < 0.0 {
            alpha = alpha.min(value / -rate);
        }
    };
    for c in 0..x.len() {
        limit(x[c], d[c]);
        limit(PI - x[c], -d[c]);
    }
    for f in 0..m.num_faces() {
        let t = x.face(f);
        let dual = t.dual();
        let dd = [d[3 * f], d[3 * f + 1], d[3 * f + 2]];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            limit(dual[i], 0.5 * (dd[i] - dd[j] - dd[k]));
        }
        limit(t.sum() - PI, dd.iter().sum());
    }
    alpha
}

/// Minimizes Θ on the slice with edge invariant `d`, starting from the
/// feasibility witness.
pub fn minimize_capacity(m: &Mesh, d: &EdgeFunction, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let feas = angles::feasibility(m, d)?;
    let Some(start) = feas.witness.clone() else {
        return Ok(infeasible_report(feas));
    };
    newton(m, d, start, feas, opts)
}

/// As [`minimize_capacity`] from a caller-supplied interior start.
pub fn minimize_capacity_from(
    m: &Mesh,
    d: &EdgeFunction,
    start: AngleVector,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    opts.validate()?;
    let feas = angles::feasibility(m, d)?;
    if !feas.is_feasible() {
        return Ok(infeasible_report(feas));
    }
    let system = ConstraintSystem::new(m, d)?;
    start.check_len(m)?;
    if !start.is_spherical(m) || system.residual(&start) > 1e-9 {
        return Err(Error::domain(
            "start point is not an interior angle structure with the prescribed invariant",
        ));
    }
    newton(m, d, start, feas, opts)
}

/// A feasible interior point away from the witness: the witness moved along
/// a random null-space direction by half the distance to the boundary.
pub fn random_start<R: Rng + ?Sized>(
    m: &Mesh,
    d: &EdgeFunction,
    rng: &mut R,
) -> Result<AngleVector> {
    let feas = angles::feasibility(m, d)?;
    let w = feas
        .witness
        .ok_or_else(|| Error::domain("no angle structure has the prescribed invariant"))?;
    let system = ConstraintSystem::new(m, d)?;
    let null = NullSpace::new(&system, m.num_corners());
    let z = DVector::from_fn(null.dim(), |_, _| rng.random_range(-1.0..1.0));
    let dir = null.lift(&z);
    let alpha = max_step(m, &w, &dir);
    let step = if alpha.is_finite() { 0.5 * alpha } else { 1.0 };
    Ok(AngleVector(
        w.0.iter().zip(&dir).map(|(x, v)| x + step * v).collect(),
    ))
}

fn infeasible_report(feas: FeasibilityResult) -> SolveReport {
    SolveReport {
        status: SolveStatus::Infeasible,
        x_final: None,
        metric: None,
        iterations: 0,
        objective_trace: Vec::new(),
        reduced_gradient: f64::NAN,
        min_face_margin: f64::NAN,
        feasibility: feas,
    }
}

fn newton(
    m: &Mesh,
    d: &EdgeFunction,
    start: AngleVector,
    feas: FeasibilityResult,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let system = ConstraintSystem::new(m, d)?;
    let null = NullSpace::new(&system, m.num_corners());
    let mut x = start;
    let mut min_margin = x.min_face_margin();
    let (mut value, mut grad) = angles::total_capacity(m, &x)?;
    let mut trace = vec![value];
    let mut iterations = 0;
    let mut status = SolveStatus::IterationLimit;
    let mut g_red = null.reduce(&grad);

    loop {
        if g_red.amax() <= opts.grad_tol {
            status = SolveStatus::Converged;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        let h_red = null.reduced_hessian(m, &x)?;
        let chol = h_red.cholesky().ok_or(Error::Factorization {
            iteration: iterations,
        })?;
        let dz = -chol.solve(&g_red);
        let dir = null.lift(&dz);
        // directional derivative g·d = g_red·dz < 0
        let slope = g_red.dot(&dz);
        let alpha_max = opts.boundary_fraction * max_step(m, &x, &dir);
        let mut alpha = alpha_max.min(1.0);
        // function differences below this are rounding noise
        let noise = 8.0 * f64::EPSILON * (1.0 + value.abs());
        let accepted = loop {
            let trial = AngleVector(x.0.iter().zip(&dir).map(|(a, b)| a + alpha * b).collect());
            let trial_value = angles::total_capacity_value(m, &trial)?;
            if trial_value <= value + opts.armijo_c * alpha * slope
                || (-slope < noise && trial_value <= value + noise)
            {
                break Some((trial, trial_value));
            }
            alpha *= opts.ls_shrink;
            if alpha < 1e-20 {
                break None;
            }
        };
        let Some((next, next_value)) = accepted else {
            // no descent possible at working precision
            break;
        };
        iterations += 1;
        x = next;
        min_margin = min_margin.min(x.min_face_margin());
        let (v, g) = angles::total_capacity(m, &x)?;
        debug_assert!((v - next_value).abs() <= 1e-12 * (1.0 + v.abs()));
        value = v;
        grad = g;
        trace.push(value);
        g_red = null.reduce(&grad);
    }

    let metric = extract_metric(m, &x)?;
    if status == SolveStatus::Converged && metric.max_residual() > RESIDUAL_TOL {
        status = SolveStatus::IterationLimit;
    }
    Ok(SolveReport {
        status,
        x_final: Some(x),
        metric: Some(metric),
        iterations,
        objective_trace: trace,
        reduced_gradient: g_red.amax(),
        min_face_margin: min_margin,
        feasibility: feas,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripReport {
    pub max_length_error: f64,
    /// The edge invariant induced by the input metric.
    pub invariant: EdgeFunction,
    pub solve: SolveReport,
}

impl RoundtripReport {
    /// Converged and recovered the metric to [`RESIDUAL_TOL`].
    pub fn recovered(&self) -> bool {
        self.solve.converged() && self.max_length_error <= RESIDUAL_TOL
    }
}

/// Metric → angle structure → edge invariant → solver → metric.
pub fn roundtrip(m: &Mesh, l: &EdgeFunction, opts: &SolveOptions) -> Result<RoundtripReport> {
    let x = metric_to_structure(m, l)?;
    let invariant = angles::edge_invariant(m, &x)?;
    let solve = minimize_capacity(m, &invariant, opts)?;
    let max_length_error = match &solve.metric {
        Some(metric) => metric
            .lengths
            .iter()
            .zip(l.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max),
        None => f64::INFINITY,
    };
    Ok(RoundtripReport {
        max_length_error,
        invariant,
        solve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn double() -> Mesh {
        Mesh::from_faces([("f1", ["a", "b", "c"]), ("f2", ["a", "b", "c"])]).unwrap()
    }

    const EQUILATERAL_LENGTH: f64 = 1.107_148_717_794_090_5;

    #[test]
    fn double_triangle_solution_is_equilateral() {
        let m = double();
        let r = minimize_capacity(
            &m,
            &EdgeFunction::constant(&m, 0.8 * PI),
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(r.converged(), "{r:?}");
        let x = r.x_final.unwrap();
        assert!(x.0.iter().all(|v| (v - 0.4 * PI).abs() < 1e-9), "{x:?}");
        let metric = r.metric.unwrap();
        assert!(metric
            .lengths
            .iter()
            .all(|l| (l - EQUILATERAL_LENGTH).abs() < 1e-9));
        assert!(metric.max_residual() <= RESIDUAL_TOL);
    }

    #[test]
    fn infeasible_invariant_reported() {
        let m = double();
        let r = minimize_capacity(
            &m,
            &EdgeFunction::constant(&m, 0.3 * PI),
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.x_final.is_none());
    }

    #[test]
    fn metric_to_structure_examples() {
        let m = double();
        let x = metric_to_structure(&m, &EdgeFunction::constant(&m, 1.1071487)).unwrap();
        assert!(x.0.iter().all(|v| (v - 0.4 * PI).abs() < 1e-7));
        let bad = EdgeFunction::new(vec![2.5, 2.5, 2.0]);
        match metric_to_structure(&m, &bad) {
            Err(Error::FaceDomain { face, reason }) => {
                assert_eq!(face, "f1");
                assert!(reason.contains("perimeter"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extraction_from_a_metric_has_no_residual() {
        let m = double();
        let l = EdgeFunction::new(vec![1.0, 1.3, 1.6]);
        let x = metric_to_structure(&m, &l).unwrap();
        let metric = extract_metric(&m, &x).unwrap();
        assert!(metric.max_residual() < 1e-12);
        for e in 0..3 {
            assert!((metric.lengths[e] - l[e]).abs() < 1e-12);
            assert!((metric.multipliers[e] - (0.5 * l[e]).tan().ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn extraction_rejects_degenerate_faces() {
        let m = double();
        assert!(extract_metric(&m, &AngleVector::constant(&m, PI / 3.0)).is_err());
        assert!(extract_metric(&m, &AngleVector::constant(&m, FRAC_PI_2)).is_ok());
    }

    #[test]
    fn options_validated() {
        let bad = SolveOptions {
            boundary_fraction: 1.0,
            ..SolveOptions::default()
        };
        assert!(bad.validate().is_err());
        let m = double();
        assert!(minimize_capacity(&m, &EdgeFunction::constant(&m, 0.8 * PI), &bad).is_err());
    }

    #[test]
    fn iteration_limit_keeps_best_iterate() {
        let m = Mesh::from_faces([
            ("f0", ["e23", "e13", "e12"]),
            ("f1", ["e23", "e03", "e02"]),
            ("f2", ["e13", "e03", "e01"]),
            ("f3", ["e12", "e02", "e01"]),
        ])
        .unwrap();
        let d = EdgeFunction::new(vec![3.0, 2.4, 2.7, 2.5, 2.9, 2.2]);
        let opts = SolveOptions {
            max_iters: 1,
            ..SolveOptions::default()
        };
        let r = minimize_capacity(&m, &d, &opts).unwrap();
        assert_eq!(r.status, SolveStatus::IterationLimit);
        assert_eq!(r.iterations, 1);
        assert!(r.x_final.unwrap().is_spherical(&m));
    }
}
