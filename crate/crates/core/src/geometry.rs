//! Constant diagonal metrics on each sheet of a doubled geometry, and the
//! post-Clifford-trace symbol algebra of the squared Dirac operator.
//!
//! A sheet metric is `ds² = Σ aⱼ² (dxʲ)²`. Its Dirac operator has constant
//! coefficients `Aⱼ = 1/aⱼ` (the spin connection vanishes), so the leading
//! symbol of the inverse Laplacian on sheet `i` is `1/Qᵢ(ξ)` with
//! `Qᵢ(ξ) = Σⱼ ξⱼ²/a_{i,j}²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Four positive scale factors `(a₀, a₁, a₂, a₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct DiagonalMetric([f64; 4]);

impl DiagonalMetric {
    pub fn new(a: [f64; 4]) -> Result<Self> {
        for (j, &v) in a.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidMetric(format!(
                    "scale factor a{j} = {v} must be positive and finite"
                )));
            }
        }
        Ok(Self(a))
    }

    pub fn euclidean() -> Self {
        Self([1.0; 4])
    }

    pub fn uniform(a: f64) -> Result<Self> {
        Self::new([a; 4])
    }

    pub fn scale_factors(&self) -> [f64; 4] {
        self.0
    }

    /// `Aⱼ = 1/aⱼ`, the Dirac-operator coefficient along axis `j`.
    pub fn inverse_rates(&self) -> [f64; 4] {
        self.0.map(|a| 1.0 / a)
    }

    /// `Q(ξ) = Σⱼ ξⱼ²/aⱼ²`.
    pub fn quadratic_form(&self, xi: &UnitVector4) -> f64 {
        let x = xi.components();
        let r = self.inverse_rates();
        (0..4).map(|j| r[j] * r[j] * x[j] * x[j]).sum()
    }

    /// `√det g = Π aⱼ`.
    pub fn sqrt_det(&self) -> f64 {
        self.0.iter().product()
    }

    /// Per-axis rescaling `aⱼ → λⱼ aⱼ`.
    pub fn scaled(&self, scales: [f64; 4]) -> Result<Self> {
        Self::new([
            self.0[0] * scales[0],
            self.0[1] * scales[1],
            self.0[2] * scales[2],
            self.0[3] * scales[3],
        ])
    }

    /// Axis relabeling: the new axis `j` carries the old axis `perm[j]`.
    pub fn permuted(&self, perm: [usize; 4]) -> Self {
        Self(perm.map(|p| self.0[p]))
    }
}

impl TryFrom<[f64; 4]> for DiagonalMetric {
    type Error = Error;

    fn try_from(a: [f64; 4]) -> Result<Self> {
        Self::new(a)
    }
}

impl From<DiagonalMetric> for [f64; 4] {
    fn from(g: DiagonalMetric) -> Self {
        g.0
    }
}

/// Eigenvalues of `√(g₂⁻¹ g₁)` for diagonal metrics, in axis order.
pub fn relative_eigenvalues(g1: &DiagonalMetric, g2: &DiagonalMetric) -> [f64; 4] {
    let (a1, a2) = (g1.scale_factors(), g2.scale_factors());
    [0, 1, 2, 3].map(|j| a1[j] / a2[j])
}

/// A point on the unit 3-sphere in momentum space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector4([f64; 4]);

impl UnitVector4 {
    pub const NORM_TOLERANCE: f64 = 1e-14;

    pub fn new(xi: [f64; 4]) -> Result<Self> {
        let n2: f64 = xi.iter().map(|v| v * v).sum();
        if !n2.is_finite() || (n2 - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "xi",
                reason: format!("squared norm {n2} is not 1"),
            });
        }
        Ok(Self(xi))
    }

    /// Projects a nonzero vector onto the sphere.
    pub fn normalize(v: [f64; 4]) -> Result<Self> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter {
                name: "xi",
                reason: "cannot normalize a zero or non-finite vector".into(),
            });
        }
        Ok(Self(v.map(|x| x / n)))
    }

    /// Skips the norm check; callers construct `xi` from spherical coordinates.
    pub(crate) fn from_coordinates(xi: [f64; 4]) -> Self {
        Self(xi)
    }

    pub fn components(&self) -> [f64; 4] {
        self.0
    }
}

/// `γ² = κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Kappa {
    Plus,
    Minus,
}

impl Kappa {
    pub fn sign(self) -> f64 {
        match self {
            Kappa::Plus => 1.0,
            Kappa::Minus => -1.0,
        }
    }
}

impl TryFrom<i8> for Kappa {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Kappa::Plus),
            -1 => Ok(Kappa::Minus),
            _ => Err(Error::InvalidParameter {
                name: "kappa",
                reason: format!("must be +1 or -1, got {v}"),
            }),
        }
    }
}

impl From<Kappa> for i8 {
    fn from(k: Kappa) -> i8 {
        match k {
            Kappa::Plus => 1,
            Kappa::Minus => -1,
        }
    }
}

/// Two sheets coupled by a constant off-diagonal field of modulus `|Φ|`.
///
/// Only `|Φ|` enters any result, so the phase of `Φ` is not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubledGeometry {
    pub g1: DiagonalMetric,
    pub g2: DiagonalMetric,
    phi_abs: f64,
    pub kappa: Kappa,
    lambda: f64,
    c: f64,
}

impl DoubledGeometry {
    pub fn new(
        g1: DiagonalMetric,
        g2: DiagonalMetric,
        phi_abs: f64,
        kappa: Kappa,
        lambda: f64,
        c: f64,
    ) -> Result<Self> {
        if !(phi_abs.is_finite() && phi_abs >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "phi",
                reason: format!("|Φ| must be nonnegative and finite, got {phi_abs}"),
            });
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("cutoff must be positive and finite, got {lambda}"),
            });
        }
        if !c.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: format!("moment coefficient must be finite, got {c}"),
            });
        }
        Ok(Self { g1, g2, phi_abs, kappa, lambda, c })
    }

    pub fn phi_abs(&self) -> f64 {
        self.phi_abs
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn effective_params(&self) -> Result<EffectiveParams> {
        if self.c == 0.0 {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: "must be nonzero".into(),
            });
        }
        let k = self.kappa.sign();
        let phi2 = self.phi_abs * self.phi_abs;
        Ok(EffectiveParams {
            lambda_e_sq: 12.0 / self.c * (self.lambda * self.lambda - self.c * k * phi2),
            alpha: 12.0 * k * phi2,
        })
    }
}

/// Coefficients of the kinetic term (`Λₑ²`) and the interaction potential (`α`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub lambda_e_sq: f64,
    pub alpha: f64,
}

/// Real 2×2 matrix over the sheet index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Mat2([[f64; 2]; 2]);

impl Mat2 {
    fn diag(p: f64, q: f64) -> Self {
        Mat2([[p, 0.0], [0.0, q]])
    }

    fn off_diag(upper: f64, lower: f64) -> Self {
        Mat2([[0.0, upper], [lower, 0.0]])
    }

    fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }

    fn sub(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }

    fn add(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    fn scale(&self, s: f64) -> Mat2 {
        Mat2(self.0.map(|row| row.map(|v| v * s)))
    }

    fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }
}

/// Trace of the commutator part of `Tr_Cl 𝔟₂`, built from explicit 2×2
/// products:
///
/// `Tr[-4κ 𝔟₀ (Σⱼ [F,Aⱼ] 𝔟₀ [F,Aⱼ] ξⱼ²) 𝔟₀]`
///
/// with `𝔟₀ = diag(1/Q₁, 1/Q₂)`, `F = offdiag(Φ, Φ*)`, `Aⱼ = diag(1/a_{1,j}, 1/a_{2,j})`.
/// The `κF²` term is carried by `Λₑ²` and is not included.
pub fn b2_trace_matrix(dg: &DoubledGeometry, xi: &UnitVector4) -> f64 {
    let x = xi.components();
    let (r1, r2) = (dg.g1.inverse_rates(), dg.g2.inverse_rates());
    let b0 = Mat2::diag(1.0 / dg.g1.quadratic_form(xi), 1.0 / dg.g2.quadratic_form(xi));
    let f = Mat2::off_diag(dg.phi_abs, dg.phi_abs);

    let mut inner = Mat2::diag(0.0, 0.0);
    for j in 0..4 {
        let aj = Mat2::diag(r1[j], r2[j]);
        let comm = f.mul(&aj).sub(&aj.mul(&f));
        inner = inner.add(&comm.mul(&b0).mul(&comm).scale(x[j] * x[j]));
    }
    b0.mul(&inner).mul(&b0).scale(-4.0 * dg.kappa.sign()).trace()
}

/// Closed form of [`b2_trace_matrix`]:
///
/// `4κ|Φ|² Σ_{j,k} (A_{2,j} − A_{1,j})² (A_{1,k}² + A_{2,k}²) ξⱼ²ξₖ² / (Q₁² Q₂²)`.
pub fn b2_trace_closed(dg: &DoubledGeometry, xi: &UnitVector4) -> f64 {
    let x = xi.components();
    let (r1, r2) = (dg.g1.inverse_rates(), dg.g2.inverse_rates());
    let (q1, q2) = (dg.g1.quadratic_form(xi), dg.g2.quadratic_form(xi));
    let mut sum = 0.0;
    for j in 0..4 {
        let d = r2[j] - r1[j];
        for k in 0..4 {
            sum += d * d * (r1[k] * r1[k] + r2[k] * r2[k]) * x[j] * x[j] * x[k] * x[k];
        }
    }
    4.0 * dg.kappa.sign() * dg.phi_abs * dg.phi_abs * sum / (q1 * q1 * q2 * q2)
}
