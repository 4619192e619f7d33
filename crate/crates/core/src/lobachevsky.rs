//! The Lobachevsky function `Λ(t) = -∫₀ᵗ ln|2 sin u| du`.
//!
//! Λ is odd and π-periodic, so every argument reduces to `[0, π/2]`. There
//! `Λ(t) = Cl₂(2t) / 2` and the Clausen function has the expansion
//!
//! ```text
//! Cl₂(θ) = θ - θ ln θ + Σ_{k≥1} ζ(2k) / (k (2k + 1)) · θ (θ / 2π)^{2k},   0 ≤ θ < 2π
//! ```
//!
//! which converges at least like `4^-k` on `[0, π]`. A quadrature of the
//! defining integral is kept alongside as an independent evaluation path.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::OnceLock;

pub const DEFAULT_ABS_ERR: f64 = 1e-12;

const SERIES_TERMS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LobachevskyMethod {
    Series,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LobachevskyEvaluator {
    pub method: LobachevskyMethod,
    pub target_abs_err: f64,
}

impl Default for LobachevskyEvaluator {
    fn default() -> Self {
        Self {
            method: LobachevskyMethod::Series,
            target_abs_err: DEFAULT_ABS_ERR,
        }
    }
}

impl LobachevskyEvaluator {
    pub fn quadrature() -> Self {
        Self {
            method: LobachevskyMethod::Quadrature,
            ..Self::default()
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.method {
            LobachevskyMethod::Series => lobachevsky(t),
            LobachevskyMethod::Quadrature => lobachevsky_quadrature(t, self.target_abs_err),
        }
    }
}

/// ζ(2k)/(k(2k+1)) for k = 1..=SERIES_TERMS.
fn series_coefficients() -> &'static [f64; SERIES_TERMS] {
    static COEFFS: OnceLock<[f64; SERIES_TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        std::array::from_fn(|i| {
            let k = (i + 1) as f64;
            zeta_even(i + 1) / (k * (2.0 * k + 1.0))
        })
    })
}

/// ζ(2k) for k ≥ 1.
fn zeta_even(k: usize) -> f64 {
    let p2 = PI * PI;
    match k {
        1 => p2 / 6.0,
        2 => p2 * p2 / 90.0,
        3 => p2 * p2 * p2 / 945.0,
        4 => p2.powi(4) / 9450.0,
        5 => p2.powi(5) / 93555.0,
        _ => {
            // tail below 30^(1-2k)/(2k-1) < 1e-17 for k ≥ 6
            let s = -2.0 * k as f64;
            (1..=30).rev().map(|n| (n as f64).powf(s)).sum()
        }
    }
}

/// Λ(t) by range reduction and the Clausen series. Accurate to a few ulps of
/// the unit scale over all finite `t`.
pub fn lobachevsky(t: f64) -> f64 {
    if !t.is_finite() {
        return f64::NAN;
    }
    let r = t.rem_euclid(PI);
    if r > FRAC_PI_2 {
        -clausen_half(PI - r)
    } else {
        clausen_half(r)
    }
}

/// `Cl₂(2r)/2` for `r` in `[0, π/2]`.
fn clausen_half(r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let theta = 2.0 * r;
    let q = (theta / TAU) * (theta / TAU);
    let mut power = 1.0;
    let mut tail = 0.0;
    for c in series_coefficients() {
        power *= q;
        let term = c * power;
        tail += term;
        if term < 1e-18 * tail {
            break;
        }
    }
    0.5 * theta * (1.0 - theta.ln() + tail)
}

/// Λ(t) by adaptive Gauss–Kronrod quadrature of `-∫₀ᵗ ln|2 sin u| du`.
///
/// The integrand is reduced to `[0, π]` using only its own symmetries (even,
/// π-periodic). The logarithmic endpoint singularities there are subtracted
/// in closed form: `ln|2 sin u| = ln u + ln(π - u) + ln(2 sin u / (u (π - u)))`
/// where the last term is smooth.
pub fn lobachevsky_quadrature(t: f64, abs_err: f64) -> f64 {
    if !t.is_finite() {
        return f64::NAN;
    }
    let sign = if t < 0.0 { 1.0 } else { -1.0 };
    let a = t.abs();
    let periods = (a / PI).floor();
    let rest = a - periods * PI;
    let full = if periods > 0.0 {
        log_sine_integral(PI, abs_err)
    } else {
        0.0
    };
    sign * (periods * full + log_sine_integral(rest, abs_err))
}

/// `∫₀ᵃ ln(2 sin u) du` for `a` in `[0, π]`.
fn log_sine_integral(a: f64, abs_err: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let b = PI - a;
    // ∫₀ᵃ ln u du + ∫₀ᵃ ln(π - u) du
    let x_ln_x = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    let singular = (x_ln_x(a) - a) + (PI * PI.ln() - PI) - (x_ln_x(b) - b);
    let smooth = |u: f64| {
        let v = PI - u;
        // sin u / u and sin v / v stay well conditioned on the whole interval
        let ratio = if u < v {
            (u.sin() / u) * (1.0 / v)
        } else {
            (v.sin() / v) * (1.0 / u)
        };
        (2.0 * ratio).ln()
    };
    singular + adaptive_gauss_kronrod(&smooth, 0.0, a, abs_err.max(1e-15))
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 7-point Gauss / 15-point Kronrod pair on `[a, b]`: (estimate, error).
fn gauss_kronrod_15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS_K[7] * fc;
    let mut gauss = GK_WEIGHTS_G[3] * fc;
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += GK_WEIGHTS_K[i] * pair;
        if i % 2 == 1 {
            gauss += GK_WEIGHTS_G[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adaptive_gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (est, err) = gauss_kronrod_15(f, a, b);
        if err <= tol || depth == 0 {
            return est;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth - 1) + recurse(f, m, b, 0.5 * tol, depth - 1)
    }
    recurse(f, a, b, tol, 40)
}
