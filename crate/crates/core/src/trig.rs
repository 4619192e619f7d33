//! Trigonometry of a single spherical triangle, parametrized by its inner
//! angles.
//!
//! The moduli space of spherical triangles is the open tetrahedron
//!
//! ```text
//! M3 = { x in (0, π)^3 : x*_i > 0, x1 + x2 + x3 > π },   x*_i = (π + x_i - x_j - x_k) / 2
//! ```
//!
//! with vertices (π,0,0), (0,π,0), (0,0,π), (π,π,π). Its boundary splits into
//! six strata, see [`BoundaryType`]. Lengths `y_i` are measured in radians on
//! the unit sphere and `y_i` faces the angle `x_i`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Default tolerance for boundary classification.
pub const CLASSIFY_EPS: f64 = 1e-9;

/// Interior points closer than this to ∂M3 are rejected by derivative
/// evaluations.
pub const INTERIOR_MARGIN: f64 = 1e-12;

/// Absolute agreement required between the arccos cosine law and the
/// half-angle form, before the conditioning allowance.
const COSINE_LAW_AGREEMENT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleAngles(pub [f64; 3]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleLengths(pub [f64; 3]);

impl TriangleAngles {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self([x1, x2, x3])
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn dual(&self) -> [f64; 3] {
        dual_angles(self)
    }

    /// Signed distance proxy to ∂M3: the smallest of the four defining
    /// linear forms `x*_1, x*_2, x*_3, Σx - π`. Positive exactly on M3.
    pub fn margin(&self) -> f64 {
        let d = self.dual();
        d[0].min(d[1]).min(d[2]).min(self.sum() - PI)
    }

    pub fn classify(&self, eps: f64) -> BoundaryType {
        classify(self, eps)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Convex combination `(1 - t) a + t b`.
    pub fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        Self(std::array::from_fn(|i| (1.0 - t) * a.0[i] + t * b.0[i]))
    }
}

impl From<[f64; 3]> for TriangleAngles {
    fn from(x: [f64; 3]) -> Self {
        Self(x)
    }
}

impl TriangleLengths {
    pub fn new(y1: f64, y2: f64, y3: f64) -> Self {
        Self([y1, y2, y3])
    }
}

/// Position of an angle triple relative to the closed tetrahedron M3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryType {
    Interior,
    /// Open face Σx = π: triangles shrinking to a point.
    I,
    /// Open faces x*_i = 0: triangles opening up to a lune.
    II,
    /// Open edges where x*_i = 0 meets Σx = π.
    III,
    /// Open edges from (π,π,π) to the other vertices.
    IV,
    /// The vertex (π,π,π).
    V,
    /// The vertices (π,0,0), (0,π,0), (0,0,π).
    VI,
    Exterior,
}

impl BoundaryType {
    pub fn is_boundary(self) -> bool {
        !matches!(self, BoundaryType::Interior | BoundaryType::Exterior)
    }
}

impl fmt::Display for BoundaryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BoundaryType::Interior => "interior",
            BoundaryType::I => "I",
            BoundaryType::II => "II",
            BoundaryType::III => "III",
            BoundaryType::IV => "IV",
            BoundaryType::V => "V",
            BoundaryType::VI => "VI",
            BoundaryType::Exterior => "exterior",
        };
        f.write_str(s)
    }
}

pub fn dual_angles(x: &TriangleAngles) -> [f64; 3] {
    let [a, b, c] = x.0;
    [
        0.5 * (PI + a - b - c),
        0.5 * (PI + b - c - a),
        0.5 * (PI + c - a - b),
    ]
}

/// Classifies `x` against the closed tetrahedron. Equalities are read as
/// `|·| <= eps`.
///
/// The closure is `{x*_i >= 0, Σx >= π}`; inside it the stratum is fixed by
/// which of those four forms vanish:
///
/// | vanishing forms             | stratum |
/// |-----------------------------|---------|
/// | none                        | interior |
/// | Σx - π                      | I   |
/// | one x*_i                    | II  |
/// | one x*_i and Σx - π         | III |
/// | two x*_i                    | IV  |
/// | all three x*_i (Σx = 3π)    | V   |
/// | two x*_i and Σx - π         | VI  |
pub fn classify(x: &TriangleAngles, eps: f64) -> BoundaryType {
    if !x.is_finite() {
        return BoundaryType::Exterior;
    }
    let d = x.dual();
    let excess = x.sum() - PI;
    if d.iter().any(|&v| v < -eps) || excess < -eps {
        return BoundaryType::Exterior;
    }
    let zero_duals = d.iter().filter(|v| v.abs() <= eps).count();
    let flat = excess.abs() <= eps;
    match (zero_duals, flat) {
        (0, false) => BoundaryType::Interior,
        (0, true) => BoundaryType::I,
        (1, false) => BoundaryType::II,
        (1, true) => BoundaryType::III,
        (2, false) => BoundaryType::IV,
        (2, true) => BoundaryType::VI,
        (3, false) => BoundaryType::V,
        // three vanishing duals force Σx = 3π; unreachable for small eps
        _ => BoundaryType::Exterior,
    }
}

pub(crate) fn require_interior(x: &TriangleAngles, what: &str) -> Result<()> {
    let m = x.margin();
    if x.is_finite() && m > INTERIOR_MARGIN {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{what}: angles ({}, {}, {}) are not inside the spherical moduli space (margin {m:e})",
            x.0[0], x.0[1], x.0[2]
        )))
    }
}

/// Right-hand sides of the spherical cosine law, `cos y_i`.
pub fn cosine_law(x: &TriangleAngles) -> [f64; 3] {
    let (s, c) = (x.0.map(f64::sin), x.0.map(f64::cos));
    std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        (c[i] + c[j] * c[k]) / (s[j] * s[k])
    })
}

/// Half-angle form of the cosine law:
/// `tan²(y_i/2) = -sin x*_i cos(Σx/2) / (sin x*_j sin x*_k)`.
pub fn half_tan_squared(x: &TriangleAngles) -> [f64; 3] {
    let sd = x.dual().map(f64::sin);
    let half = (0.5 * x.sum()).cos();
    std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        -sd[i] * half / (sd[j] * sd[k])
    })
}

/// Lengths from the half-angle form, `y = 2 atan(sqrt(tan²(y/2)))`.
pub fn half_angle_lengths(x: &TriangleAngles) -> [f64; 3] {
    half_tan_squared(x).map(|t| 2.0 * t.sqrt().atan())
}

/// Edge lengths of the spherical triangle with inner angles `x`.
///
/// Evaluates `arccos` of the cosine law and cross-checks it against the
/// half-angle form. The check allows for the `1/sin y` conditioning of
/// `arccos` near 0 and π.
pub fn angles_to_lengths(x: &TriangleAngles) -> Result<TriangleLengths> {
    require_interior(x, "angles_to_lengths")?;
    let y = cosine_law(x).map(|c| c.clamp(-1.0, 1.0).acos());
    let alt = half_angle_lengths(x);
    for i in 0..3 {
        let tol = COSINE_LAW_AGREEMENT + 1e-15 / y[i].sin();
        if (y[i] - alt[i]).abs() > tol {
            return Err(Error::Consistency(format!(
                "cosine law forms disagree on y{}: {} vs {}",
                i + 1,
                y[i],
                alt[i]
            )));
        }
    }
    Ok(TriangleLengths(y))
}

pub fn is_spherical_length_triple(y: &[f64; 3]) -> bool {
    length_triple_violation(y).is_none()
}

/// Names the first failed invariant of a spherical length triple.
pub fn length_triple_violation(y: &[f64; 3]) -> Option<String> {
    if let Some(i) = (0..3).find(|&i| !(y[i] > 0.0 && y[i] < PI)) {
        return Some(format!("length y{} = {} is not in (0, π)", i + 1, y[i]));
    }
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        if y[i] >= y[j] + y[k] {
            return Some(format!(
                "triangle inequality fails: y{} = {} >= y{} + y{}",
                i + 1,
                y[i],
                j + 1,
                k + 1
            ));
        }
    }
    let p = y[0] + y[1] + y[2];
    if p >= 2.0 * PI {
        return Some(format!("perimeter {p} is not below 2π"));
    }
    None
}

/// Inner angles of the spherical triangle with edge lengths `y`.
pub fn lengths_to_angles(y: &TriangleLengths) -> Result<TriangleAngles> {
    if let Some(why) = length_triple_violation(&y.0) {
        return Err(Error::domain(why));
    }
    let (s, c) = (y.0.map(f64::sin), y.0.map(f64::cos));
    Ok(TriangleAngles(std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        ((c[i] - c[j] * c[k]) / (s[j] * s[k]))
            .clamp(-1.0, 1.0)
            .acos()
    })))
}

/// `J[i][j] = ∂y_i/∂x_j`.
///
/// `∂y_i/∂x_i = sin x_i / A_ijk` with `A_ijk = sin y_i sin x_j sin x_k`, and
/// `∂y_i/∂x_j = ∂y_i/∂x_i · cos y_k`.
pub fn length_jacobian(x: &TriangleAngles) -> Result<[[f64; 3]; 3]> {
    let y = angles_to_lengths(x)?.0;
    let sx = x.0.map(f64::sin);
    let mut jac = [[0.0; 3]; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let diag = sx[i] / (y[i].sin() * sx[j] * sx[k]);
        jac[i][i] = diag;
        jac[i][j] = diag * y[k].cos();
        jac[i][k] = diag * y[j].cos();
    }
    Ok(jac)
}

/// The three products `A_123, A_231, A_312`; equal by the sine law.
pub fn sine_law_products(x: &TriangleAngles) -> Result<[f64; 3]> {
    let y = angles_to_lengths(x)?.0;
    let sx = x.0.map(f64::sin);
    Ok(std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        y[i].sin() * sx[j] * sx[k]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn dual_examples() {
        let cases = [
            ([FRAC_PI_2; 3], [PI / 4.0; 3]),
            ([0.4 * PI; 3], [0.3 * PI; 3]),
            (
                [0.5 * PI, 0.6 * PI, 0.7 * PI],
                [0.1 * PI, 0.2 * PI, 0.3 * PI],
            ),
        ];
        for (x, want) in cases {
            let d = dual_angles(&TriangleAngles(x));
            for i in 0..3 {
                assert!(close(d[i], want[i], 1e-15), "{x:?} -> {d:?}");
            }
            let sum: f64 = d.iter().sum();
            assert!(close(sum, 0.5 * (3.0 * PI - x.iter().sum::<f64>()), 1e-15));
        }
    }

    #[test]
    fn classify_examples() {
        let third = PI / 3.0;
        assert_eq!(
            classify(&TriangleAngles::new(third, third, third), CLASSIFY_EPS),
            BoundaryType::I
        );
        assert_eq!(
            classify(&TriangleAngles::new(PI, PI, PI), CLASSIFY_EPS),
            BoundaryType::V
        );
        assert_eq!(
            classify(&TriangleAngles::new(PI, 0.0, 0.0), CLASSIFY_EPS),
            BoundaryType::VI
        );
        assert_eq!(
            classify(&TriangleAngles::new(0.0, PI, 0.0), CLASSIFY_EPS),
            BoundaryType::VI
        );
        assert_eq!(
            classify(
                &TriangleAngles::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2),
                CLASSIFY_EPS
            ),
            BoundaryType::Interior
        );
        // x*_1 = 0, Σ = 2π
        assert_eq!(
            classify(
                &TriangleAngles::new(FRAC_PI_2, 0.75 * PI, 0.75 * PI),
                CLASSIFY_EPS
            ),
            BoundaryType::II
        );
        // x*_1 = 0, Σ = π
        assert_eq!(
            classify(&TriangleAngles::new(0.0, third, 2.0 * third), CLASSIFY_EPS),
            BoundaryType::III
        );
        // x*_2 = x*_3 = 0, x_1 = π
        assert_eq!(
            classify(&TriangleAngles::new(PI, FRAC_PI_2, FRAC_PI_2), CLASSIFY_EPS),
            BoundaryType::IV
        );
        assert_eq!(
            classify(&TriangleAngles::new(0.1, 0.1, 0.1), CLASSIFY_EPS),
            BoundaryType::Exterior
        );
        assert_eq!(
            classify(&TriangleAngles::new(PI, PI, 0.5), CLASSIFY_EPS),
            BoundaryType::Exterior
        );
        assert_eq!(
            classify(&TriangleAngles::new(f64::NAN, 1.0, 1.0), CLASSIFY_EPS),
            BoundaryType::Exterior
        );
    }

    #[test]
    fn lengths_examples() {
        let y = angles_to_lengths(&TriangleAngles([FRAC_PI_2; 3]))
            .unwrap()
            .0;
        assert!(y.iter().all(|v| close(*v, FRAC_PI_2, 1e-15)));
        let y = angles_to_lengths(&TriangleAngles::new(FRAC_PI_2, FRAC_PI_2, 0.7 * PI))
            .unwrap()
            .0;
        assert!(
            close(y[0], FRAC_PI_2, 1e-14)
                && close(y[1], FRAC_PI_2, 1e-14)
                && close(y[2], 0.7 * PI, 1e-14)
        );
        // arccos(1/√5), frozen from an independent high-precision evaluation
        let y = angles_to_lengths(&TriangleAngles([0.4 * PI; 3])).unwrap().0;
        assert!(
            y.iter().all(|v| close(*v, 1.107_148_717_794_090_7, 1e-14)),
            "{y:?}"
        );
    }

    #[test]
    fn lengths_reject_boundary_and_exterior() {
        let third = PI / 3.0;
        assert!(angles_to_lengths(&TriangleAngles([third; 3])).is_err());
        assert!(angles_to_lengths(&TriangleAngles([0.2; 3])).is_err());
        assert!(angles_to_lengths(&TriangleAngles::new(PI, PI, PI)).is_err());
    }

    #[test]
    fn angles_examples() {
        let x = lengths_to_angles(&TriangleLengths([FRAC_PI_2; 3]))
            .unwrap()
            .0;
        assert!(x.iter().all(|v| close(*v, FRAC_PI_2, 1e-15)));
        let x = lengths_to_angles(&TriangleLengths([1.1071487; 3]))
            .unwrap()
            .0;
        assert!(x.iter().all(|v| close(*v, 0.4 * PI, 1e-7)), "{x:?}");
        let x = lengths_to_angles(&TriangleLengths::new(0.3, FRAC_PI_2, FRAC_PI_2))
            .unwrap()
            .0;
        assert!(
            close(x[0], 0.3, 1e-14)
                && close(x[1], FRAC_PI_2, 1e-14)
                && close(x[2], FRAC_PI_2, 1e-14)
        );
    }

    #[test]
    fn length_triples() {
        assert!(is_spherical_length_triple(&[FRAC_PI_2; 3]));
        assert!(!is_spherical_length_triple(&[3.0, 0.1, 0.1]));
        assert!(!is_spherical_length_triple(&[2.5, 2.5, 2.0]));
        assert!(!is_spherical_length_triple(&[0.0, 1.0, 1.0]));
        let err = lengths_to_angles(&TriangleLengths::new(2.5, 2.5, 2.0)).unwrap_err();
        assert!(err.to_string().contains("perimeter"));
        let err = lengths_to_angles(&TriangleLengths::new(3.0, 0.1, 0.1)).unwrap_err();
        assert!(err.to_string().contains("triangle inequality"));
    }

    #[test]
    fn jacobian_examples() {
        let j = length_jacobian(&TriangleAngles([FRAC_PI_2; 3])).unwrap();
        for (r, row) in j.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert!(close(*v, if r == c { 1.0 } else { 0.0 }, 1e-15));
            }
        }
        // frozen from central differences of the cosine law (h = 1e-6) and
        // cross-checked symbolically
        let j = length_jacobian(&TriangleAngles([0.4 * PI; 3])).unwrap();
        for (r, row) in j.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let want = if r == c {
                    1.175_570_504_584_946
                } else {
                    0.525_731_112_119_133_4
                };
                assert!(close(*v, want, 1e-12), "{r}{c}: {v}");
            }
        }
    }

    #[test]
    fn dual_pair_sums() {
        let x = TriangleAngles::new(0.9, 1.7, 2.2);
        let d = x.dual();
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            assert!(close(d[j] + d[k], PI - x.0[i], 1e-15));
        }
    }
}
