//! Closed-form interaction potential for the Hopf model, where each sheet
//! carries `g₀₀ = g₁₁ = b²`, `g₂₂ = g₃₃ = a²`.
//!
//! With `P = a₂b₁` and `R = a₁b₂` the potential is
//!
//! ```text
//! V̂ = 2π² (F + G) / ((P − R)(P + R)²)
//! F  = 4 a₁²a₂²b₁²b₂² (a₁ − a₂)(b₁ − b₂) log(R/P)
//! G  = (P² − R²) [a₁²b₁²a₂(b₁ − 2b₂) + a₂²b₂²a₁(b₂ − 2b₁) + a₁³b₁²b₂ + a₂³b₂²b₁]
//! ```
//!
//! `P = R` (proportional sheets) is a removable singularity.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DiagonalMetric;
use crate::quadrature::{potential_numeric, SphereRule, DEFAULT_LEVEL};

/// Relative half-width of the tube around `a₂b₁ = a₁b₂` inside which
/// [`potential_closed`] integrates numerically instead.
pub const SINGULAR_TUBE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfMetric {
    a: f64,
    b: f64,
}

impl HopfMetric {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0) {
            return Err(Error::InvalidMetric(format!(
                "Hopf metric needs positive finite a, b; got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `(b, b, a, a)`
    pub fn to_diagonal(&self) -> DiagonalMetric {
        DiagonalMetric::new([self.b, self.b, self.a, self.a]).expect("validated on construction")
    }

    /// Recognizes `(b, b, a, a)`.
    pub fn from_diagonal(g: &DiagonalMetric) -> Result<Self> {
        let s = g.scale_factors();
        if s[0] != s[1] || s[2] != s[3] {
            return Err(Error::NotHopfShaped(format!("{s:?}")));
        }
        Self::new(s[2], s[0])
    }
}

/// `F(a₁,a₂,b₁,b₂)`, the logarithmic part of the numerator.
pub fn f_term(a1: f64, a2: f64, b1: f64, b2: f64) -> f64 {
    let (p, r) = (a2 * b1, a1 * b2);
    let log_ratio = ((r - p) / p).ln_1p();
    4.0 * (a1 * a2 * b1 * b2).powi(2) * (a1 - a2) * (b1 - b2) * log_ratio
}

/// `a₁²b₁²a₂(b₁−2b₂) + a₂²b₂²a₁(b₂−2b₁) + a₁³b₁²b₂ + a₂³b₂²b₁`, regrouped
/// around `u = a₁−a₂`, `v = b₁−b₂` so that it keeps full relative precision
/// on the lines `u = 0` and `v = 0`.
fn g_bracket(a1: f64, a2: f64, b1: f64, b2: f64) -> f64 {
    let (u, v) = (a1 - a2, b1 - b2);
    let (aa, bb) = (a1 * a2, b1 * b2);
    (a1 * b1 + a2 * b2) * (bb * u * u + aa * v * v) + 2.0 * aa * bb * u * v
}

/// `G(a₁,a₂,b₁,b₂)`, the rational part of the numerator.
pub fn g_term(a1: f64, a2: f64, b1: f64, b2: f64) -> f64 {
    let (p, r) = (a2 * b1, a1 * b2);
    (p - r) * (p + r) * g_bracket(a1, a2, b1, b2)
}

fn fallback_rule() -> &'static SphereRule {
    static RULE: OnceLock<SphereRule> = OnceLock::new();
    RULE.get_or_init(|| SphereRule::new(DEFAULT_LEVEL).expect("default level is valid"))
}

/// True if `(h1, h2)` lies inside the numerical-fallback tube.
pub fn near_singular_surface(h1: &HopfMetric, h2: &HopfMetric) -> bool {
    let (p, r) = (h2.a * h1.b, h1.a * h2.b);
    (p - r).abs() < SINGULAR_TUBE * (p + r)
}

/// Closed-form `V̂` for two Hopf sheets. Inside the tube around
/// `a₂b₁ = a₁b₂` the value comes from level-64 quadrature.
pub fn potential_closed(h1: &HopfMetric, h2: &HopfMetric) -> f64 {
    if near_singular_surface(h1, h2) {
        return potential_numeric(&h1.to_diagonal(), &h2.to_diagonal(), fallback_rule())
            .expect("Hopf integrands are finite for positive metrics");
    }
    let (a1, b1, a2, b2) = (h1.a, h1.b, h2.a, h2.b);
    let (p, r) = (a2 * b1, a1 * b2);
    let s = p + r;
    // F/(P−R) + G/(P−R), with the common (P−R) divided out of G exactly.
    let f_over = f_term(a1, a2, b1, b2) / (p - r);
    let g_over = s * g_bracket(a1, a2, b1, b2);
    2.0 * PI * PI * (f_over + g_over) / (s * s)
}

/// `𝕍(x, y)` with `x = b₁/b₂` and `y = a₁/a₂`:
///
/// `4x²y²(x−1)(y−1) log(y/x) / ((x−y)(x+y)²) + x²y² + 1 − 2xy(xy+1)/(x+y)`.
///
/// The log term is evaluated as `−8x²y²(x−1)(y−1) atanh(s) / (s (x+y)³)`
/// with `s = (x−y)/(x+y)`, which is regular on `x = y`; there it reduces to
/// `(y−1)²(y²+1)`.
pub fn script_v(x: f64, y: f64) -> f64 {
    let sum = x + y;
    let xy = x * y;
    let rational = xy * xy + 1.0 - 2.0 * xy * (xy + 1.0) / sum;
    if x == y {
        return (y - 1.0).powi(2) * (y * y + 1.0);
    }
    let s = (x - y) / sum;
    let atanh_over_s = if s.abs() < 1e-4 {
        // atanh(s)/s = 1 + s²/3 + s⁴/5 + s⁶/7 + …
        let s2 = s * s;
        1.0 + s2 * (1.0 / 3.0 + s2 * (1.0 / 5.0 + s2 / 7.0))
    } else {
        s.atanh() / s
    };
    -8.0 * xy * xy * (x - 1.0) * (y - 1.0) * atanh_over_s / sum.powi(3) + rational
}

/// `2π² 𝕍(b₁/b₂, a₁/a₂) √det g₂` with `√det g₂ = a₂²b₂²`.
pub fn potential_via_conjecture(h1: &HopfMetric, h2: &HopfMetric) -> f64 {
    let x = h1.b / h2.b;
    let y = h1.a / h2.a;
    2.0 * PI * PI * script_v(x, y) * (h2.a * h2.b).powi(2)
}

/// Value of `V̂` on the singular surface, `2π² (b₂/a₂)² (a₁−a₂)² (a₁² + a₂²)`.
pub fn singular_limit(a1: f64, a2: f64, b2: f64) -> f64 {
    2.0 * PI * PI * (b2 / a2).powi(2) * (a1 - a2).powi(2) * (a1 * a1 + a2 * a2)
}
