//! Spherical angle structures on a triangulated surface.
//!
//! An angle structure assigns an angle to each corner. It is spherical when
//! every face triple lies in M3. The edge invariant sums the two angles
//! facing an edge; prescribing it cuts out an affine slice of the open
//! polytope of spherical angle structures, and deciding whether that slice is
//! nonempty is a linear program.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use crate::capacity;
use crate::error::{Error, Result};
use crate::lobachevsky::lobachevsky;
use crate::mesh::{EdgeFunction, Mesh};
use crate::simplex::{LinearProgram, LpOutcome, Relation};
use crate::trig::{self, BoundaryType, TriangleAngles, CLASSIFY_EPS};

/// One angle per corner, indexed `3 * face + slot`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector(pub Vec<f64>);

impl AngleVector {
    pub fn constant(m: &Mesh, value: f64) -> Self {
        Self(vec![value; m.num_corners()])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn face(&self, f: usize) -> TriangleAngles {
        TriangleAngles([self.0[3 * f], self.0[3 * f + 1], self.0[3 * f + 2]])
    }

    /// Smallest face margin to ∂M3; positive iff the structure is spherical.
    pub fn min_face_margin(&self) -> f64 {
        (0..self.0.len() / 3)
            .map(|f| self.face(f).margin())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_spherical(&self, m: &Mesh) -> bool {
        self.0.len() == m.num_corners()
            && (0..m.num_faces())
                .all(|f| self.face(f).classify(CLASSIFY_EPS) == BoundaryType::Interior)
    }

    pub(crate) fn check_len(&self, m: &Mesh) -> Result<()> {
        if self.0.len() == m.num_corners() {
            Ok(())
        } else {
            Err(Error::Reference(format!(
                "angle vector has {} entries for {} corners",
                self.0.len(),
                m.num_corners()
            )))
        }
    }
}

impl std::ops::Index<usize> for AngleVector {
    type Output = f64;

    fn index(&self, c: usize) -> &f64 {
        &self.0[c]
    }
}

pub fn edge_invariant(m: &Mesh, x: &AngleVector) -> Result<EdgeFunction> {
    x.check_len(m)?;
    Ok(EdgeFunction::from_fn(m, |e| {
        m.edge_corners(e).iter().map(|&c| x[c]).sum()
    }))
}

fn face_sum(x: &AngleVector, f: usize) -> f64 {
    x[3 * f] + x[3 * f + 1] + x[3 * f + 2]
}

/// Side angles at the edge minus the facing angles: with `f, f'` the faces
/// at `e`, `(Σ_f x + Σ_f' x) - 2 D_x(e)`.
pub fn delaunay_invariant(m: &Mesh, x: &AngleVector) -> Result<EdgeFunction> {
    x.check_len(m)?;
    Ok(EdgeFunction::from_fn(m, |e| {
        let corners = m.edge_corners(e);
        let faces: f64 = corners.iter().map(|&c| face_sum(x, c / 3)).sum();
        let facing: f64 = corners.iter().map(|&c| x[c]).sum();
        faces - 2.0 * facing
    }))
}

/// Θ(x) = Σ θ over faces; valid on the closure of each face's moduli space.
pub fn total_capacity_value(m: &Mesh, x: &AngleVector) -> Result<f64> {
    x.check_len(m)?;
    let mut total = 0.0;
    for f in 0..m.num_faces() {
        let t = x.face(f);
        if trig::classify(&t, CLASSIFY_EPS) == BoundaryType::Exterior {
            return Err(Error::FaceDomain {
                face: m.face(f).id.clone(),
                reason: format!("angles {:?} are not spherical", t.0),
            });
        }
        total += theta_unchecked(&t);
    }
    Ok(total)
}

// θ without the domain check, for callers that have already classified
fn theta_unchecked(t: &TriangleAngles) -> f64 {
    let d = t.dual();
    4.0 * lobachevsky(std::f64::consts::FRAC_PI_4)
        - d.iter().map(|&v| lobachevsky(v)).sum::<f64>()
        - lobachevsky(0.5 * (PI + t.sum()))
}

/// Θ and its gradient; the component at corner `c` is `ln tan(y/2)` for the
/// edge that corner faces within its face. Faces are reduced in index order.
pub fn total_capacity(m: &Mesh, x: &AngleVector) -> Result<(f64, Vec<f64>)> {
    x.check_len(m)?;
    let mut value = 0.0;
    let mut grad = vec![0.0; x.len()];
    for f in 0..m.num_faces() {
        let t = x.face(f);
        let g = capacity::grad_theta(&t).map_err(|e| Error::FaceDomain {
            face: m.face(f).id.clone(),
            reason: e.to_string(),
        })?;
        value += theta_unchecked(&t);
        grad[3 * f..3 * f + 3].copy_from_slice(&g);
    }
    Ok((value, grad))
}

/// The edge constraints `x_a + x_b = D(e)`, one row per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    pub rows: Vec<[usize; 2]>,
    pub rhs: EdgeFunction,
}

impl ConstraintSystem {
    pub fn new(m: &Mesh, d: &EdgeFunction) -> Result<Self> {
        m.require_valid()?;
        d.check_total(m, "invariant")?;
        let rows = (0..m.num_edges())
            .map(|e| m.edge_pair(e))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rows,
            rhs: d.clone(),
        })
    }

    /// Largest constraint violation `max_e |x_a + x_b - D(e)|`.
    pub fn residual(&self, x: &AngleVector) -> f64 {
        self.rows
            .iter()
            .enumerate()
            .map(|(e, &[a, b])| (x[a] + x[b] - self.rhs[e]).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    /// Optimal point of the slack-maximizing program, present when feasible.
    pub witness: Option<AngleVector>,
    /// Optimal minimum slack over all strict inequalities.
    pub slack: f64,
    /// True when the slack sits within [`MARGINAL_SLACK`] of zero.
    pub marginal: bool,
    /// For infeasible invariants, the constraint family that fails.
    pub certificate: Option<String>,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

/// Slack at or below this is reported infeasible.
pub const MARGINAL_SLACK: f64 = 1e-11;

/// Largest face count accepted by [`guo_condition_bruteforce`].
pub const GUO_MAX_FACES: usize = 20;

/// Decides whether a spherical angle structure with edge invariant `d`
/// exists by maximizing the smallest slack `s` of `x*_i ≥ s` and
/// `Σx ≥ π + s` on every face, subject to the edge equalities.
///
/// The bounds `0 < x_c < π` are left out: on a face, `x_i ≥ 3s/2` and
/// `x_i ≤ π - 2s`, so they follow whenever `s ≥ 0` and the sign of the
/// optimum is unchanged.
///
/// The corners of edge `e` are written `D(e)/2 ± w_e` with `w_e = w⁺ - w⁻`,
/// and `s = s₀ + σ` where `s₀` is one below the slack at `w = 0`. The origin
/// is then strictly feasible, every row reads `≤` with a positive right-hand
/// side, and the simplex starts from the slack basis.
pub fn feasibility(m: &Mesh, d: &EdgeFunction) -> Result<FeasibilityResult> {
    let system = ConstraintSystem::new(m, d)?;
    let n = m.num_corners();
    let ne = m.num_edges();

    let half = AngleVector((0..n).map(|c| d[m.corner_edge(c)] / 2.0).collect());
    let s0 = (0..m.num_faces())
        .map(|f| half.face(f).margin())
        .fold(f64::INFINITY, f64::min)
        - 1.0;

    // corner c moves by sign[c] · w_{edge(c)}
    let mut sign = vec![0.0; n];
    for &[a, b] in &system.rows {
        sign[a] = 1.0;
        sign[b] = -1.0;
    }

    let sigma = 2 * ne;
    let mut lp = LinearProgram::new(2 * ne + 1);
    lp.objective[sigma] = 1.0;
    // Σ a_c x_c - β s ≥ r, rewritten in (w⁺, w⁻, σ) as a `≤` row
    let mut add = |terms: &[(usize, f64)], beta: f64, r: f64| {
        let mut row = vec![0.0; 2 * ne + 1];
        let mut rhs = -r - beta * s0;
        for &(c, a) in terms {
            let e = m.corner_edge(c);
            row[e] -= a * sign[c];
            row[ne + e] += a * sign[c];
            rhs += a * half[c];
        }
        row[sigma] = beta;
        lp.add(row, Relation::Le, rhs);
    };
    for f in 0..m.num_faces() {
        let [a, b, c] = [3 * f, 3 * f + 1, 3 * f + 2];
        for (i, j, l) in [(a, b, c), (b, c, a), (c, a, b)] {
            // x*_i ≥ s  ⇔  x_i - x_j - x_l - 2s ≥ -π
            add(&[(i, 1.0), (j, -1.0), (l, -1.0)], 2.0, -PI);
        }
        add(&[(a, 1.0), (b, 1.0), (c, 1.0)], 1.0, PI);
    }

    let u = match lp.solve()? {
        LpOutcome::Optimal { x, .. } => x,
        // the origin is feasible and the slack is bounded on every face
        other => {
            return Err(Error::Consistency(format!(
                "slack program returned {other:?}"
            )))
        }
    };
    let slack = s0 + u[sigma];
    let witness = AngleVector(
        (0..n)
            .map(|c| half[c] + sign[c] * (u[m.corner_edge(c)] - u[ne + m.corner_edge(c)]))
            .collect(),
    );
    let marginal = slack.abs() <= MARGINAL_SLACK;
    if slack > MARGINAL_SLACK {
        Ok(FeasibilityResult {
            status: FeasibilityStatus::Feasible,
            witness: Some(witness),
            slack,
            marginal,
            certificate: None,
        })
    } else {
        let mut certificate = violated_subset(m, d).unwrap_or_else(|| {
            format!("no angle structure keeps every face strictly spherical (best minimum slack {slack:.3e})")
        });
        if marginal {
            certificate.push_str(" [marginal: optimal slack within 1e-11 of zero]");
        }
        Ok(FeasibilityResult {
            status: FeasibilityStatus::Infeasible,
            witness: None,
            slack,
            marginal,
            certificate: Some(certificate),
        })
    }
}

/// For small meshes, names the face subset with the worst subset-sum margin
/// when it is violated.
fn violated_subset(m: &Mesh, d: &EdgeFunction) -> Option<String> {
    if m.num_faces() > GUO_MAX_FACES {
        return None;
    }
    let (mask, gap) = worst_subset(m, d);
    if gap < 0.0 {
        return None;
    }
    let faces: Vec<&str> = (0..m.num_faces())
        .filter(|f| mask >> f & 1 == 1)
        .map(|f| m.face(f).id.as_str())
        .collect();
    let count = faces.len() as f64;
    Some(format!(
        "face subset {{{}}}: π·|X| = {:.12} is not below the edge sum {:.12}",
        faces.join(", "),
        PI * count,
        PI * count - gap
    ))
}

/// Subset maximizing `π|X| - Σ_{E(X)} D`; returns (mask, gap).
fn worst_subset(m: &Mesh, d: &EdgeFunction) -> (u64, f64) {
    let nf = m.num_faces();
    let mut best = (0u64, f64::NEG_INFINITY);
    for mask in 1u64..(1u64 << nf) {
        let mut edges = BTreeSet::new();
        for f in 0..nf {
            if mask >> f & 1 == 1 {
                edges.extend(m.face(f).edges);
            }
        }
        let sum: f64 = edges.iter().map(|&e| d[e]).sum();
        let gap = PI * mask.count_ones() as f64 - sum;
        if gap > best.1 {
            best = (mask, gap);
        }
    }
    best
}

/// `π|X| < Σ_{e ∈ E(X)} D(e)` for every nonempty face subset `X`, where
/// `E(X)` is the set of edges of faces in `X`. Exponential in the face count.
pub fn guo_condition_bruteforce(m: &Mesh, d: &EdgeFunction) -> Result<bool> {
    m.require_valid()?;
    d.check_total(m, "invariant")?;
    if m.num_faces() > GUO_MAX_FACES {
        return Err(Error::SizeLimit(format!(
            "subset enumeration needs at most {GUO_MAX_FACES} faces, mesh has {}",
            m.num_faces()
        )));
    }
    Ok(worst_subset(m, d).1 < 0.0)
}
