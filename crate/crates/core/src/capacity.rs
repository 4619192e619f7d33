//! Capacity of a spherical triangle and its relatives.
//!
//! With `x*` the dual angles and `σ = (π + x1 + x2 + x3) / 2`:
//!
//! ```text
//! θ(x)  = -Σ Λ(x*_i) - Λ(σ) + 4Λ(π/4)        ∂θ/∂x_i = ln tan(y_i / 2)
//! θ̃(x) = -Σ Λ(x*_i) - Λ(σ)
//! V(x)  =  Σ (Λ(x_i) + Λ(x*_i)) - Λ(σ)
//! ```
//!
//! θ is strictly convex on M3 and extends continuously to its closure; its
//! Hessian is a positive multiple of the Gram matrix of the triangle's
//! vertex vectors.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::lobachevsky::lobachevsky;
use crate::trig::{self, BoundaryType, TriangleAngles, CLASSIFY_EPS};

/// θ, with optional derivatives when evaluated inside M3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityValue {
    pub value: f64,
    pub gradient: Option<[f64; 3]>,
    pub hessian: Option<[[f64; 3]; 3]>,
}

fn four_lambda_pi_4() -> f64 {
    4.0 * lobachevsky(FRAC_PI_4)
}

/// The shared part `-Σ Λ(x*_i) - Λ((π + Σx)/2)`.
fn w(x: &TriangleAngles) -> f64 {
    let d = x.dual();
    -d.iter().map(|&v| lobachevsky(v)).sum::<f64>() - lobachevsky(0.5 * (PI + x.sum()))
}

pub fn capacity_theta(x: &TriangleAngles) -> Result<f64> {
    if trig::classify(x, CLASSIFY_EPS) == BoundaryType::Exterior {
        return Err(Error::domain(format!(
            "capacity θ: {:?} is outside the closed moduli space",
            x.0
        )));
    }
    Ok(w(x) + four_lambda_pi_4())
}

/// Closure of `{x_i > 0, Σx < π}` (hyperbolic triangles).
fn in_hyperbolic_closure(x: &TriangleAngles, eps: f64) -> bool {
    x.is_finite() && x.0.iter().all(|&v| v >= -eps) && x.sum() <= PI + eps
}

pub fn capacity_theta_tilde(x: &TriangleAngles) -> Result<f64> {
    let spherical = trig::classify(x, CLASSIFY_EPS) != BoundaryType::Exterior;
    if !spherical && !in_hyperbolic_closure(x, CLASSIFY_EPS) {
        return Err(Error::domain(format!(
            "capacity θ̃: {:?} is outside both the spherical and hyperbolic closures",
            x.0
        )));
    }
    Ok(w(x))
}

pub fn capacity_v(x: &TriangleAngles) -> f64 {
    let d = x.dual();
    x.0.iter()
        .chain(d.iter())
        .map(|&v| lobachevsky(v))
        .sum::<f64>()
        - lobachevsky(0.5 * (PI + x.sum()))
}

/// `ln tan(y_i/2)` through the half-angle cosine law:
/// `½[ln sin x*_i - ln sin x*_j - ln sin x*_k + ln|cos(Σx/2)|]`.
pub fn grad_theta(x: &TriangleAngles) -> Result<[f64; 3]> {
    trig::require_interior(x, "grad θ")?;
    Ok(log_half_tan(x))
}

pub(crate) fn log_half_tan(x: &TriangleAngles) -> [f64; 3] {
    let s = x.dual().map(half_log_sin);
    let c = half_log_abs_cos_half_sum(x);
    std::array::from_fn(|i| s[i] - s[(i + 1) % 3] - s[(i + 2) % 3] + c)
}

/// `S(u) = ½ ln sin u`.
fn half_log_sin(u: f64) -> f64 {
    0.5 * u.sin().ln()
}

/// `C(x) = ½ ln|cos(Σx/2)|`.
fn half_log_abs_cos_half_sum(x: &TriangleAngles) -> f64 {
    0.5 * (0.5 * x.sum()).cos().abs().ln()
}

/// Relative tolerance of the sine-law check inside [`hessian_theta`].
const SINE_LAW_CHECK: f64 = 1e-10;

/// `H = c [a_rs]` with `a_ii = 1`, `a_ij = cos y_k` and
/// `c = sin x_i / (sin y_i · A_ijk)`, the same for every `i`.
pub fn hessian_theta(x: &TriangleAngles) -> Result<[[f64; 3]; 3]> {
    let y = trig::angles_to_lengths(x)?.0;
    let sx = x.0.map(f64::sin);
    let scale = |i: usize| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let sy = y[i].sin();
        sx[i] / (sy * sy * sx[j] * sx[k])
    };
    let c = scale(0);
    for i in 1..3 {
        let ci = scale(i);
        if (ci - c).abs() > SINE_LAW_CHECK * c.abs() {
            return Err(Error::Consistency(format!(
                "Hessian scale differs between corners 1 and {}: {c} vs {ci}",
                i + 1
            )));
        }
    }
    let cy = y.map(f64::cos);
    let mut h = [[c; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                h[i][j] = c * cy[3 - i - j];
            }
        }
    }
    Ok(h)
}

/// θ with gradient and Hessian where they exist.
pub fn evaluate(x: &TriangleAngles) -> Result<CapacityValue> {
    let value = capacity_theta(x)?;
    if trig::require_interior(x, "capacity").is_err() {
        return Ok(CapacityValue {
            value,
            gradient: None,
            hessian: None,
        });
    }
    Ok(CapacityValue {
        value,
        gradient: Some(log_half_tan(x)),
        hessian: Some(hessian_theta(x)?),
    })
}

/// Both expansions of `f'(t)` for `f(t) = θ((1 - t) a + t p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentDerivative {
    /// `Σ ln tan(y_i/2) (p_i - a_i)` with `y` from the arccos cosine law.
    pub direct: f64,
    /// `2 Σ S(x*_i)(p*_i - a*_i) + C(x)(Σp - Σa)`.
    pub expanded: f64,
}

impl SegmentDerivative {
    pub fn value(&self) -> f64 {
        self.expanded
    }
}

pub fn segment_derivative(
    a: &TriangleAngles,
    p: &TriangleAngles,
    t: f64,
) -> Result<SegmentDerivative> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::domain(format!(
            "segment parameter t = {t} is not in (0, 1]"
        )));
    }
    let x = TriangleAngles::lerp(a, p, t);
    trig::require_interior(&x, "segment derivative")?;

    let dp = p.dual();
    let da = a.dual();
    let s = x.dual().map(half_log_sin);
    let c = half_log_abs_cos_half_sum(&x);
    let expanded =
        2.0 * (0..3).map(|i| s[i] * (dp[i] - da[i])).sum::<f64>() + c * (p.sum() - a.sum());

    let y = trig::cosine_law(&x).map(|v| v.clamp(-1.0, 1.0).acos());
    let direct = (0..3)
        .map(|i| (0.5 * y[i]).tan().ln() * (p.0[i] - a.0[i]))
        .sum();

    Ok(SegmentDerivative { direct, expanded })
}

/// Two candidate volumes of the ideal octahedron spanned by the six
/// intersection points of the great circles bounding the triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OctahedronVolumes {
    /// `16Λ(π/4) - 4θ(x)`.
    pub from_capacity: f64,
    /// Sum of `V/2` over the eight triangles cut out by the three circles.
    pub from_tetrahedra: f64,
}

impl OctahedronVolumes {
    pub fn ratio(&self) -> f64 {
        self.from_capacity / self.from_tetrahedra
    }
}

/// Diagnostic only: the two expressions differ by a factor of two at
/// `(π/2, π/2, π/2)` and no relation between them is asserted.
pub fn octahedron_volumes(x: &TriangleAngles) -> Result<OctahedronVolumes> {
    let theta = capacity_theta(x)?;
    let [a, b, c] = x.0;
    let pairs = [
        TriangleAngles::new(a, b, c),
        TriangleAngles::new(a, PI - b, PI - c),
        TriangleAngles::new(PI - a, b, PI - c),
        TriangleAngles::new(PI - a, PI - b, c),
    ];
    // each antipodal pair contributes 2 · V/2
    let from_tetrahedra = pairs.iter().map(capacity_v).sum();
    Ok(OctahedronVolumes {
        from_capacity: 4.0 * four_lambda_pi_4() - 4.0 * theta,
        from_tetrahedra,
    })
}
