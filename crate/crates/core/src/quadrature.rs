//! Product quadrature on the unit 3-sphere and the numerical evaluation of
//! the sphere integrals that make up the spectral action.
//!
//! Coordinates: `ξ = (√(1−t) cos φ, √(1−t) sin φ, √t cos ψ, √t sin ψ)` with
//! `t = sin²θ ∈ [0, 1]`, for which `dS = ½ dt dφ dψ`. The rule is
//! Gauss–Legendre in `t` and the periodic trapezoid rule in `φ` and `ψ`.
//!
//! Nodes are ordered `t`-major, then `φ`, then `ψ`. Every reduction sums
//! each constant-`t` slab with compensated summation and then folds the slab
//! totals in slab order, so results are bit-identical for any thread count.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{DiagonalMetric, DoubledGeometry, UnitVector4};
use crate::matchings::PerturbedForm;
use crate::summation::CompensatedSum;

pub const MIN_LEVEL: usize = 4;

/// Level used wherever a quadrature result stands in for an exact value.
pub const DEFAULT_LEVEL: usize = 64;

/// `area(S³)`.
pub const SPHERE_AREA: f64 = 2.0 * PI * PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                dp = legendre_with_derivative(n, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy)]
struct Slab {
    /// `√(1−t)`
    cos_theta: f64,
    /// `√t`
    sin_theta: f64,
    /// Weight shared by every node of the slab.
    weight: f64,
}

/// Quadrature rule on S³ with `level` Gauss nodes in `t` and `2·level`
/// equispaced nodes in each of `φ`, `ψ`.
#[derive(Clone)]
pub struct SphereRule {
    level: usize,
    slabs: Vec<Slab>,
    angles: Vec<(f64, f64)>,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl std::fmt::Debug for SphereRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SphereRule")
            .field("level", &self.level)
            .field("nodes", &self.len())
            .field("threads", &self.threads())
            .finish()
    }
}

pub fn build_rule(level: usize) -> Result<SphereRule> {
    SphereRule::new(level)
}

impl SphereRule {
    pub fn new(level: usize) -> Result<Self> {
        if level < MIN_LEVEL {
            return Err(Error::LevelTooLow(level));
        }
        let n_ang = 2 * level;
        let h = 2.0 * PI / n_ang as f64;
        let slabs = gauss_legendre(level)
            .into_iter()
            .map(|(x, w)| {
                let t = 0.5 * (x + 1.0);
                Slab {
                    cos_theta: (0.5 * (1.0 - x)).sqrt(),
                    sin_theta: t.sqrt(),
                    // ½ (Jacobian) · ½ (map [-1,1] → [0,1]) · h²
                    weight: 0.25 * w * h * h,
                }
            })
            .collect();
        let angles = (0..n_ang)
            .map(|k| {
                let a = h * k as f64;
                (a.cos(), a.sin())
            })
            .collect();
        Ok(Self { level, slabs, angles, pool: None })
    }

    /// Evaluates slabs on `threads` workers. Results do not depend on the
    /// thread count.
    pub fn with_threads(mut self, threads: usize) -> Result<Self> {
        self.pool = if threads <= 1 {
            None
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::InvalidParameter { name: "threads", reason: e.to_string() })?;
            Some(Arc::new(pool))
        };
        Ok(self)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn threads(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }

    pub fn len(&self) -> usize {
        self.slabs.len() * self.angles.len() * self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All nodes with their weights, in reduction order.
    pub fn nodes(&self) -> impl Iterator<Item = (UnitVector4, f64)> + '_ {
        self.slabs.iter().flat_map(move |s| {
            self.angles.iter().flat_map(move |&(cp, sp)| {
                self.angles.iter().map(move |&(cs, ss)| {
                    let xi = [s.cos_theta * cp, s.cos_theta * sp, s.sin_theta * cs, s.sin_theta * ss];
                    (UnitVector4::from_coordinates(xi), s.weight)
                })
            })
        })
    }

    /// `Σ wᵢ f(ξᵢ)`. Fails if `f` is not finite at some node.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&UnitVector4) -> f64 + Sync,
    {
        let [v] = self.integrate_many(|xi| [f(xi)])?;
        Ok(v)
    }

    /// Integrates `N` components of a vector-valued integrand in one pass.
    pub fn integrate_many<const N: usize, F>(&self, f: F) -> Result<[f64; N]>
    where
        F: Fn(&UnitVector4) -> [f64; N] + Sync,
    {
        let per_slab = self.angles.len() * self.angles.len();
        let slab_sum = |(si, s): (usize, &Slab)| -> Result<[f64; N]> {
            let mut acc = [CompensatedSum::new(); N];
            for (row, &(cp, sp)) in self.angles.iter().enumerate() {
                let (x0, x1) = (s.cos_theta * cp, s.cos_theta * sp);
                // Rows are short; plain sums per row, compensated across rows.
                let mut row_sum = [0.0; N];
                for &(cs, ss) in &self.angles {
                    let xi = UnitVector4::from_coordinates([x0, x1, s.sin_theta * cs, s.sin_theta * ss]);
                    let v = f(&xi);
                    for (r, vi) in row_sum.iter_mut().zip(v) {
                        *r += vi;
                    }
                }
                if row_sum.iter().any(|r| !r.is_finite()) {
                    return Err(self.first_non_finite(&f, si * per_slab + row * self.angles.len()));
                }
                for (a, r) in acc.iter_mut().zip(row_sum) {
                    a.add(r);
                }
            }
            Ok(acc.map(|a| a.value() * s.weight))
        };

        let partials: Vec<[f64; N]> = match &self.pool {
            Some(pool) => pool.install(|| {
                self.slabs.par_iter().enumerate().map(slab_sum).collect::<Result<Vec<_>>>()
            })?,
            None => self.slabs.iter().enumerate().map(slab_sum).collect::<Result<Vec<_>>>()?,
        };

        let mut total = [CompensatedSum::new(); N];
        for p in &partials {
            for (t, &v) in total.iter_mut().zip(p) {
                t.add(v);
            }
        }
        Ok(total.map(|t| t.value()))
    }
}

impl SphereRule {
    /// Locates the first non-finite component in the row starting at `start`.
    fn first_non_finite<const N: usize, F>(&self, f: &F, start: usize) -> Error
    where
        F: Fn(&UnitVector4) -> [f64; N],
    {
        let n = self.angles.len();
        let (slab, row) = (start / (n * n), start / n % n);
        let s = &self.slabs[slab];
        let (cp, sp) = self.angles[row];
        for (k, &(cs, ss)) in self.angles.iter().enumerate() {
            let xi = UnitVector4::from_coordinates([
                s.cos_theta * cp,
                s.cos_theta * sp,
                s.sin_theta * cs,
                s.sin_theta * ss,
            ]);
            if let Some(&value) = f(&xi).iter().find(|v| !v.is_finite()) {
                return Error::NonFiniteIntegrand { index: start + k, value };
            }
        }
        // Finite values whose row sum overflowed.
        Error::NonFiniteIntegrand { index: start, value: f64::INFINITY }
    }
}

/// `∫ (Q₁⁻² + Q₂⁻²) dS`, the coefficient of `Λₑ²` in the action.
pub fn kinetic_term(g1: &DiagonalMetric, g2: &DiagonalMetric, rule: &SphereRule) -> Result<f64> {
    let (s1, s2) = (squares(g1.inverse_rates()), squares(g2.inverse_rates()));
    rule.integrate(|xi| {
        let x = squares(xi.components());
        let (q1, q2) = (dot(&s1, &x), dot(&s2, &x));
        1.0 / (q1 * q1) + 1.0 / (q2 * q2)
    })
}

/// The sixteen integrals `I_{jk} = ∫ ξⱼ²ξₖ² / (Q₁² Q₂²) dS`.
///
/// `I_{jk} = I_{kj}`, so only the upper triangle is accumulated.
pub fn interaction_moments(
    g1: &DiagonalMetric,
    g2: &DiagonalMetric,
    rule: &SphereRule,
) -> Result<[[f64; 4]; 4]> {
    const PAIRS: [(usize, usize); 10] =
        [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];
    let (s1, s2) = (squares(g1.inverse_rates()), squares(g2.inverse_rates()));
    let upper = rule.integrate_many(|xi| {
        let x = squares(xi.components());
        let (q1, q2) = (dot(&s1, &x), dot(&s2, &x));
        let base = 1.0 / (q1 * q1 * q2 * q2);
        PAIRS.map(|(j, k)| base * x[j] * x[k])
    })?;
    let mut out = [[0.0; 4]; 4];
    for (&(j, k), v) in PAIRS.iter().zip(upper) {
        out[j][k] = v;
        out[k][j] = v;
    }
    Ok(out)
}

/// Interaction potential
/// `V̂(g₁,g₂) = Σ_{j,k} (A_{2,j} − A_{1,j})² (A_{1,k}² + A_{2,k}²) I_{jk}`.
pub fn potential_numeric(g1: &DiagonalMetric, g2: &DiagonalMetric, rule: &SphereRule) -> Result<f64> {
    let (r1, r2) = (g1.inverse_rates(), g2.inverse_rates());
    if r1 == r2 {
        return Ok(0.0);
    }
    let moments = interaction_moments(g1, g2, rule)?;
    let mut acc = CompensatedSum::new();
    for j in 0..4 {
        let d = (r2[j] - r1[j]) * (r2[j] - r1[j]);
        for k in 0..4 {
            acc.add(d * (r1[k] * r1[k] + r2[k] * r2[k]) * moments[j][k]);
        }
    }
    Ok(acc.value())
}

/// `∫ dS / (ξᵀ A ξ)` with `A = Ω(δ + ε)`.
pub fn rational_integral(pf: &PerturbedForm, rule: &SphereRule) -> Result<f64> {
    let a = pf.matrix();
    let v = rule.integrate(|xi| {
        let x = xi.components();
        let mut q = 0.0;
        for m in 0..4 {
            for n in 0..4 {
                q += a[m][n] * x[m] * x[n];
            }
        }
        if q > 0.0 { 1.0 / q } else { f64::NAN }
    });
    v.map_err(|e| match e {
        Error::NonFiniteIntegrand { index, .. } => Error::InvalidPerturbation(format!(
            "quadratic form is not positive at quadrature node {index}"
        )),
        other => other,
    })
}

/// `Λₑ² · kinetic + α · V̂`, the integrand of the action over the base manifold.
pub fn action_density(dg: &DoubledGeometry, rule: &SphereRule) -> Result<f64> {
    let p = dg.effective_params()?;
    let kinetic = kinetic_term(&dg.g1, &dg.g2, rule)?;
    let potential = potential_numeric(&dg.g1, &dg.g2, rule)?;
    Ok(p.lambda_e_sq * kinetic + p.alpha * potential)
}

#[inline]
fn squares(v: [f64; 4]) -> [f64; 4] {
    v.map(|x| x * x)
}

#[inline]
fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}
