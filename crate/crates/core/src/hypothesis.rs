//! Randomized checks of the bimetric form `V̂(g₁,g₂) = 2π² 𝕍(√(g₂⁻¹g₁)) √det g₂`.
//!
//! For diagonal metrics two pairs share the eigenvalues of `√(g₂⁻¹g₁)`
//! exactly when they are related by a joint per-axis rescaling followed by a
//! joint axis permutation. The conjecture is therefore equivalent, inside the
//! diagonal class, to invariance of `𝕍′ = V̂ / (2π² √det g₂)` under both
//! transformations. The exchange identity `V̂(g₁,g₂) = V̂(g₂,g₁)` is checked
//! alongside, and Hopf pairs are also compared against the closed `𝕍`.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DiagonalMetric;
use crate::hopf::{script_v, HopfMetric};
use crate::quadrature::{potential_numeric, SphereRule};

/// Identifier of the generator recorded in every report.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng(seed_from_u64)";

/// Range of every sampled scale factor. Rescaled pairs are kept inside it.
pub const PARAMETER_RANGE: (f64, f64) = (0.5, 2.0);

/// `𝕍′(g₁,g₂) = V̂(g₁,g₂) / (2π² √det g₂)`.
pub fn v_prime(g1: &DiagonalMetric, g2: &DiagonalMetric, rule: &SphereRule) -> Result<f64> {
    Ok(potential_numeric(g1, g2, rule)? / (2.0 * PI * PI * g2.sqrt_det()))
}

fn discrepancy(reference: f64, other: f64) -> f64 {
    (other - reference).abs() / reference.abs().max(other.abs()).max(1e-30)
}

/// Relative change of `𝕍′` under `a_{i,j} → λⱼ a_{i,j}` on both sheets.
pub fn check_scaling_invariance(
    g1: &DiagonalMetric,
    g2: &DiagonalMetric,
    scales: [f64; 4],
    rule: &SphereRule,
) -> Result<f64> {
    let base = v_prime(g1, g2, rule)?;
    scaled_discrepancy(base, g1, g2, scales, rule)
}

fn scaled_discrepancy(
    base: f64,
    g1: &DiagonalMetric,
    g2: &DiagonalMetric,
    scales: [f64; 4],
    rule: &SphereRule,
) -> Result<f64> {
    let moved = v_prime(&g1.scaled(scales)?, &g2.scaled(scales)?, rule)?;
    Ok(discrepancy(base, moved))
}

/// Relative change of `𝕍′` under a joint relabeling of the axes.
pub fn check_permutation_invariance(
    g1: &DiagonalMetric,
    g2: &DiagonalMetric,
    perm: [usize; 4],
    rule: &SphereRule,
) -> Result<f64> {
    validate_permutation(perm)?;
    let base = v_prime(g1, g2, rule)?;
    Ok(discrepancy(base, v_prime(&g1.permuted(perm), &g2.permuted(perm), rule)?))
}

/// Relative mismatch of `𝕍′(g₁,g₂)√det g₂` and `𝕍′(g₂,g₁)√det g₁`.
pub fn check_exchange(g1: &DiagonalMetric, g2: &DiagonalMetric, rule: &SphereRule) -> Result<f64> {
    let forward = v_prime(g1, g2, rule)? * g2.sqrt_det();
    let backward = v_prime(g2, g1, rule)? * g1.sqrt_det();
    Ok(discrepancy(forward, backward))
}

fn validate_permutation(perm: [usize; 4]) -> Result<()> {
    let mut seen = [false; 4];
    for p in perm {
        if p > 3 || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParameter {
                name: "perm",
                reason: format!("{perm:?} is not a permutation of 0..4"),
            });
        }
    }
    Ok(())
}

/// Which metric pairs a suite samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PairFamily {
    /// Independent log-uniform scale factors on all eight axes.
    #[default]
    Generic,
    /// `(b, b, a, a)` on each sheet; adds a comparison with the closed `𝕍`.
    Hopf,
    /// `g₁ = g₂`.
    Identical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Scaling,
    Permutation,
    Exchange,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub g1: DiagonalMetric,
    pub g2: DiagonalMetric,
    pub check: Check,
    /// The scales or permutation applied, when the check has one.
    pub transformation: Option<Vec<f64>>,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub trials: usize,
    pub seed: u64,
    pub rng: String,
    pub family: PairFamily,
    pub level: usize,
    pub tol: f64,
    pub max_violation: f64,
    pub max_scaling: f64,
    pub max_permutation: f64,
    pub max_exchange: f64,
    /// Only populated for Hopf pairs.
    pub max_closed_form: Option<f64>,
    pub failures: Vec<Violation>,
}

fn log_uniform(rng: &mut ChaCha8Rng) -> f64 {
    let (lo, hi) = PARAMETER_RANGE;
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// Per-axis factors, log-uniform over the range that keeps both rescaled
/// metrics inside the sampling box.
fn draw_scales(rng: &mut ChaCha8Rng, g1: &DiagonalMetric, g2: &DiagonalMetric) -> [f64; 4] {
    let (lo, hi) = PARAMETER_RANGE;
    let (a1, a2) = (g1.scale_factors(), g2.scale_factors());
    let mut out = [1.0; 4];
    for (j, s) in out.iter_mut().enumerate() {
        let low = (lo / a1[j].min(a2[j])).min(1.0);
        let high = (hi / a1[j].max(a2[j])).max(1.0);
        if high > low {
            *s = rng.random_range(low.ln()..high.ln()).exp();
        }
    }
    out
}

fn draw_metric(rng: &mut ChaCha8Rng, family: PairFamily) -> DiagonalMetric {
    let a = match family {
        PairFamily::Hopf => {
            let (b, a) = (log_uniform(rng), log_uniform(rng));
            [b, b, a, a]
        }
        _ => [0; 4].map(|_| log_uniform(rng)),
    };
    DiagonalMetric::new(a).expect("sampled factors are positive")
}

/// Runs `trials` seeded trials. Each trial draws a pair, a rescaling and a
/// permutation, then records every check whose discrepancy exceeds `tol`.
pub fn run_hypothesis_suite(
    trials: usize,
    seed: u64,
    family: PairFamily,
    rule: &SphereRule,
    tol: f64,
) -> Result<HypothesisReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter { name: "trials", reason: "must be at least 1".into() });
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidParameter { name: "tol", reason: format!("must be nonnegative, got {tol}") });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = HypothesisReport {
        trials,
        seed,
        rng: RNG_ALGORITHM.to_string(),
        family,
        level: rule.level(),
        tol,
        max_violation: 0.0,
        max_scaling: 0.0,
        max_permutation: 0.0,
        max_exchange: 0.0,
        max_closed_form: (family == PairFamily::Hopf).then_some(0.0),
        failures: Vec::new(),
    };

    for trial in 0..trials {
        let g1 = draw_metric(&mut rng, family);
        let g2 = if family == PairFamily::Identical { g1 } else { draw_metric(&mut rng, family) };
        let scales = draw_scales(&mut rng, &g1, &g2);
        let mut perm = [0, 1, 2, 3];
        perm.shuffle(&mut rng);

        let forward = v_prime(&g1, &g2, rule)?;
        let backward = v_prime(&g2, &g1, rule)?;
        let scaling = scaled_discrepancy(forward, &g1, &g2, scales, rule)?;
        let permutation = discrepancy(forward, v_prime(&g1.permuted(perm), &g2.permuted(perm), rule)?);
        let exchange = discrepancy(forward * g2.sqrt_det(), backward * g1.sqrt_det());

        let mut outcomes = vec![
            (Check::Scaling, Some(scales.to_vec()), scaling),
            (Check::Permutation, Some(perm.map(|p| p as f64).to_vec()), permutation),
            (Check::Exchange, None, exchange),
        ];
        report.max_scaling = report.max_scaling.max(scaling);
        report.max_permutation = report.max_permutation.max(permutation);
        report.max_exchange = report.max_exchange.max(exchange);

        if family == PairFamily::Hopf {
            let (h1, h2) = (HopfMetric::from_diagonal(&g1)?, HopfMetric::from_diagonal(&g2)?);
            let closed = script_v(h1.b() / h2.b(), h1.a() / h2.a());
            let d = discrepancy(closed, forward);
            report.max_closed_form = report.max_closed_form.map(|m| m.max(d));
            outcomes.push((Check::ClosedForm, None, d));
        }

        for (check, transformation, d) in outcomes {
            report.max_violation = report.max_violation.max(d);
            if d > tol {
                report.failures.push(Violation { trial, g1, g2, check, transformation, discrepancy: d });
            }
        }
    }
    Ok(report)
}
