//! Near-diagonal expansion of `I = ∫_{S³} dS / (ξᵀAξ)` with
//! `A = Ω(δ + ε)`, `ε` symmetric and traceless.
//!
//! On the unit sphere `ξᵀAξ = Ω(1 + ξᵀεξ)`, so
//! `I = Ω⁻¹ Σₘ (−1)ᵐ ∫ (ξᵀεξ)ᵐ dS`. Each moment
//! `∫ ξ^{γ₁} ⋯ ξ^{γ₂ₘ} dS = cₘ Δ^{γ₁…γ₂ₘ}` is a sum over perfect matchings of
//! the `2m` slots; contracting `m` copies of `ε` along a matching produces a
//! product of traces `Π tr(ε^k)`, one factor per cycle of the matching.
//!
//! Two series are provided. [`series_exact`] sums every trace pattern and is
//! the trusted expansion. [`series_candidate`] evaluates the shorter
//! candidate form built from `(−2)ᵐ 𝒩₂ₘ tr(εᵐ)` alone, for side-by-side
//! comparison through [`compare_series`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use nalgebra::Matrix4;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{rational_integral, SphereRule};

/// Largest `m` for which matchings are enumerated.
pub const MAX_MATCHING_ORDER: usize = 10;

/// Largest `m` for which [`enumerate_matchings`] builds the full list
/// (`13!! = 135135` matchings); larger orders go through [`for_each_matching`].
pub const MAX_MATERIALIZED_ORDER: usize = 7;

/// Largest order accepted by [`series_exact`], [`moment_integral`] and
/// [`compare_series`].
pub const MAX_SERIES_ORDER: usize = 8;

const SYMMETRY_TOLERANCE: f64 = 1e-15;

/// An exact rational multiple of `π²`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PiSquared(pub BigRational);

impl PiSquared {
    pub fn zero() -> Self {
        PiSquared(BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        PiSquared(BigRational::new(num.into(), den.into()))
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN) * PI * PI
    }

    pub fn scaled(&self, k: u64) -> Self {
        PiSquared(&self.0 * BigRational::from_integer(k.into()))
    }
}

impl fmt::Display for PiSquared {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            write!(f, "0")
        } else if self.0.is_integer() {
            write!(f, "{}π²", self.0.numer())
        } else {
            write!(f, "{}/{}π²", self.0.numer(), self.0.denom())
        }
    }
}

/// `(2k−1)!!` with `(−1)!! = 1`.
pub fn odd_double_factorial(k: usize) -> u128 {
    (1..=k as u128).map(|i| 2 * i - 1).product()
}

/// `(2k)!! = 2ᵏ k!`.
pub fn even_double_factorial(k: usize) -> num_bigint::BigInt {
    (1..=k as u64).map(|i| num_bigint::BigInt::from(2 * i)).product()
}

/// `cₘ = 4π² / (2m+2)!!`, the common value of the degree-`2m` moments
/// `∫ ξ^{γ₁} ⋯ ξ^{γ₂ₘ} dS` per matching. `c₀ = 2π²` is the area of S³.
pub fn c_coefficient(m: usize) -> PiSquared {
    PiSquared(BigRational::new(4.into(), even_double_factorial(m + 1)))
}

/// A perfect matching of `{1, …, 2m}` in canonical form: each pair is
/// increasing and pairs are sorted by their first entry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n = 2 * pairs.len();
        let mut seen = vec![false; n + 1];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if !(1 <= a && a < b && b <= n) {
                return Err(Error::InvalidParameter {
                    name: "matching",
                    reason: format!("pair ({a}, {b}) is not an increasing pair in 1..={n}"),
                });
            }
            if i > 0 && pairs[i - 1].0 >= a {
                return Err(Error::InvalidParameter {
                    name: "matching",
                    reason: "pairs must be sorted by first entry".into(),
                });
            }
            for v in [a, b] {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidParameter {
                        name: "matching",
                        reason: format!("index {v} used twice"),
                    });
                }
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    /// True if some pair is one of the blocks `(2l−1, 2l)`.
    pub fn has_block_pair(&self) -> bool {
        has_block_pair(&self.pairs)
    }
}

fn has_block_pair(pairs: &[(usize, usize)]) -> bool {
    pairs.iter().any(|&(a, b)| a % 2 == 1 && b == a + 1)
}

/// Visits every canonical matching of `{1, …, 2m}` by pairing the smallest
/// free index with each larger free index in turn.
pub fn for_each_matching<F: FnMut(&[(usize, usize)])>(m: usize, mut visit: F) {
    fn recurse<F: FnMut(&[(usize, usize)])>(
        free: &mut Vec<usize>,
        pairs: &mut Vec<(usize, usize)>,
        visit: &mut F,
    ) {
        if free.is_empty() {
            visit(pairs);
            return;
        }
        let first = free.remove(0);
        for i in 0..free.len() {
            let partner = free.remove(i);
            pairs.push((first, partner));
            recurse(free, pairs, visit);
            pairs.pop();
            free.insert(i, partner);
        }
        free.insert(0, first);
    }
    let mut free: Vec<usize> = (1..=2 * m).collect();
    let mut pairs = Vec::with_capacity(m);
    recurse(&mut free, &mut pairs, &mut visit);
}

pub fn enumerate_matchings(m: usize) -> Result<Vec<Matching>> {
    check_order(m, MAX_MATERIALIZED_ORDER)?;
    let mut out = Vec::with_capacity(odd_double_factorial(m) as usize);
    for_each_matching(m, |p| out.push(Matching { pairs: p.to_vec() }));
    Ok(out)
}

/// `𝒩₂ₘ`: matchings with no pair of the form `(2l−1, 2l)`, by enumeration.
pub fn count_n(m: usize) -> Result<u64> {
    check_order(m, MAX_MATCHING_ORDER)?;
    let mut n = 0;
    for_each_matching(m, |p| {
        if !has_block_pair(p) {
            n += 1;
        }
    });
    Ok(n)
}

/// `𝒩₂ₘ = Σₖ (−1)ᵏ C(m,k) (2(m−k)−1)!!`.
pub fn count_n_inclusion_exclusion(m: usize) -> i128 {
    let mut total = 0i128;
    let mut binom = 1i128;
    for k in 0..=m {
        let term = binom * odd_double_factorial(m - k) as i128;
        total += if k % 2 == 0 { term } else { -term };
        binom = binom * (m - k) as i128 / (k + 1) as i128;
    }
    total
}

fn check_order(m: usize, max: usize) -> Result<()> {
    if m > max {
        Err(Error::OrderTooLarge { order: m, max })
    } else {
        Ok(())
    }
}

/// Cycle type of a matching: contracting `ε_{γ₁γ₂} ⋯ ε_{γ₂ₘ₋₁γ₂ₘ}` along the
/// matching gives `Π tr(ε^k)` over the cycle lengths `k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TracePattern {
    cycle_lengths: Vec<usize>,
}

impl TracePattern {
    pub fn new(mut cycle_lengths: Vec<usize>) -> Self {
        cycle_lengths.sort_unstable();
        Self { cycle_lengths }
    }

    pub fn cycle_lengths(&self) -> &[usize] {
        &self.cycle_lengths
    }

    pub fn order(&self) -> usize {
        self.cycle_lengths.iter().sum()
    }

    /// `Π tr(ε^k)`, with `traces[k] = tr(ε^k)`.
    pub fn value(&self, traces: &[f64]) -> f64 {
        self.cycle_lengths.iter().map(|&k| traces[k]).product()
    }

    /// Patterns containing a 1-cycle carry `tr ε = 0`.
    pub fn vanishes_for_traceless(&self) -> bool {
        self.cycle_lengths.first() == Some(&1)
    }
}

impl fmt::Display for TracePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.cycle_lengths.iter().map(|k| k.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

pub fn trace_pattern(mt: &Matching) -> TracePattern {
    pattern_of(mt.pairs())
}

fn pattern_of(pairs: &[(usize, usize)]) -> TracePattern {
    let m = pairs.len();
    // 0-based slots; slot s lies in block s / 2.
    let mut partner = vec![0usize; 2 * m];
    for &(a, b) in pairs {
        partner[a - 1] = b - 1;
        partner[b - 1] = a - 1;
    }
    let mut visited = vec![false; m];
    let mut lengths = Vec::new();
    for start in 0..m {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut slot = 2 * start;
        let mut len = 0;
        loop {
            let q = partner[slot];
            len += 1;
            let block = q / 2;
            if block == start {
                break;
            }
            visited[block] = true;
            slot = q ^ 1;
        }
        lengths.push(len);
    }
    TracePattern::new(lengths)
}

/// Trace patterns of all matchings of order `m` with their multiplicities,
/// sorted by pattern.
pub fn pattern_census(m: usize) -> Result<Vec<(TracePattern, u64)>> {
    check_order(m, MAX_MATCHING_ORDER)?;
    let mut census: BTreeMap<TracePattern, u64> = BTreeMap::new();
    for_each_matching(m, |p| *census.entry(pattern_of(p)).or_default() += 1);
    Ok(census.into_iter().collect())
}

fn cached_census(m: usize) -> &'static [(TracePattern, u64)] {
    static CACHE: [OnceLock<Vec<(TracePattern, u64)>>; MAX_SERIES_ORDER + 1] =
        [const { OnceLock::new() }; MAX_SERIES_ORDER + 1];
    CACHE[m].get_or_init(|| pattern_census(m).expect("order within series cap"))
}

/// `∫_{S³} ξ^{γ₁} ⋯ ξ^{γ₂ₘ} dS`, exactly, as `cₘ` times the number of
/// matchings that pair equal axis labels. Odd index counts give zero.
pub fn moment_integral(indices: &[u8]) -> Result<PiSquared> {
    if let Some(&bad) = indices.iter().find(|&&i| i > 3) {
        return Err(Error::InvalidParameter {
            name: "indices",
            reason: format!("axis label {bad} is outside 0..=3"),
        });
    }
    if indices.len() % 2 == 1 {
        return Ok(PiSquared::zero());
    }
    let m = indices.len() / 2;
    check_order(m, MAX_SERIES_ORDER)?;
    Ok(c_coefficient(m).scaled(count_label_matchings(indices)))
}

/// Matchings of the slots of `labels` in which every pair carries equal labels.
fn count_label_matchings(labels: &[u8]) -> u64 {
    fn recurse(labels: &[u8], used: &mut [bool]) -> u64 {
        let Some(first) = used.iter().position(|u| !u) else {
            return 1;
        };
        used[first] = true;
        let mut n = 0;
        for j in first + 1..labels.len() {
            if !used[j] && labels[j] == labels[first] {
                used[j] = true;
                n += recurse(labels, used);
                used[j] = false;
            }
        }
        used[first] = false;
        n
    }
    recurse(labels, &mut vec![false; labels.len()])
}

/// `A = Ω(δ + ε)` with `Ω > 0` and `ε` symmetric, traceless, `ρ(ε) < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbedForm {
    omega: f64,
    eps: [[f64; 4]; 4],
}

impl PerturbedForm {
    pub fn new(omega: f64, eps: [[f64; 4]; 4]) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidPerturbation(format!("Ω must be positive, got {omega}")));
        }
        if eps.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPerturbation("ε has non-finite entries".into()));
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if (eps[i][j] - eps[j][i]).abs() > SYMMETRY_TOLERANCE {
                    return Err(Error::InvalidPerturbation(format!(
                        "ε is not symmetric at ({i},{j}): {} vs {}",
                        eps[i][j], eps[j][i]
                    )));
                }
            }
        }
        let tr: f64 = (0..4).map(|i| eps[i][i]).sum();
        if tr.abs() > SYMMETRY_TOLERANCE {
            return Err(Error::InvalidPerturbation(format!("tr ε = {tr} is not zero")));
        }
        let pf = Self { omega, eps };
        let rho = pf.spectral_radius();
        if rho >= 1.0 {
            return Err(Error::InvalidPerturbation(format!(
                "spectral radius {rho} of ε must be below 1"
            )));
        }
        Ok(pf)
    }

    /// Builds `ε` from its upper triangle in row order
    /// `(ε₀₀, ε₀₁, ε₀₂, ε₀₃, ε₁₁, ε₁₂, ε₁₃, ε₂₂, ε₂₃, ε₃₃)`.
    pub fn from_upper(omega: f64, upper: [f64; 10]) -> Result<Self> {
        let mut eps = [[0.0; 4]; 4];
        let mut it = upper.into_iter();
        for i in 0..4 {
            for j in i..4 {
                let v = it.next().unwrap_or_default();
                eps[i][j] = v;
                eps[j][i] = v;
            }
        }
        Self::new(omega, eps)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn eps(&self) -> [[f64; 4]; 4] {
        self.eps
    }

    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let mut a = self.eps;
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += 1.0;
            for v in row.iter_mut() {
                *v *= self.omega;
            }
        }
        a
    }

    pub fn spectral_radius(&self) -> f64 {
        let m = Matrix4::from_fn(|i, j| self.eps[i][j]);
        m.symmetric_eigenvalues().amax()
    }

    /// `[tr ε⁰, tr ε¹, …, tr εᵐᵃˣ]`.
    pub fn power_traces(&self, max_power: usize) -> Vec<f64> {
        let e = Matrix4::from_fn(|i, j| self.eps[i][j]);
        let mut p = Matrix4::<f64>::identity();
        let mut out = Vec::with_capacity(max_power + 1);
        for _ in 0..=max_power {
            out.push(p.trace());
            p *= e;
        }
        out
    }

    /// Conjugates `ε` by the axis permutation: `ε'_{ij} = ε_{p(i) p(j)}`.
    pub fn permuted(&self, perm: [usize; 4]) -> Result<Self> {
        let mut eps = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                eps[i][j] = self.eps[perm[i]][perm[j]];
            }
        }
        Self::new(self.omega, eps)
    }
}

fn check_series_order(order: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::InvalidParameter {
            name: "order",
            reason: format!("series order must be at least 2, got {order}"),
        });
    }
    check_order(order, MAX_SERIES_ORDER)
}

/// Order-`m` term of the trusted expansion, including the `1/Ω` factor:
/// `Ω⁻¹ (−1)ᵐ cₘ Σ_{matchings} Π tr(ε^k)`.
fn exact_term(m: usize, traces: &[f64], omega: f64) -> f64 {
    let contraction: f64 = cached_census(m)
        .iter()
        .filter(|(p, _)| !p.vanishes_for_traceless())
        .map(|(p, mult)| *mult as f64 * p.value(traces))
        .sum();
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * c_coefficient(m).to_f64() * contraction / omega
}

/// Order-`m` term of the candidate series, including the `1/Ω` factor.
fn candidate_term(m: usize, traces: &[f64], omega: f64) -> f64 {
    let pi2 = PI * PI;
    let bracket = match m {
        0 => 2.0 * pi2,
        1 => 0.0,
        2 => 2.0 * pi2 / 3.0 * traces[2],
        _ => {
            let dfact = even_double_factorial(m + 1).to_f64().unwrap_or(f64::INFINITY);
            4.0 * pi2 * (-2f64).powi(m as i32) / dfact
                * count_n_inclusion_exclusion(m) as f64
                * traces[m]
        }
    };
    bracket / omega
}

/// The candidate truncated series
/// `Ω⁻¹ [2π² + (2π²/3) tr ε² + 4π² Σ_{m=3}^{M} (−2)ᵐ/(2m+2)!! 𝒩₂ₘ tr εᵐ]`.
pub fn series_candidate(pf: &PerturbedForm, order: usize) -> Result<f64> {
    if order < 2 {
        return Err(Error::InvalidParameter {
            name: "order",
            reason: format!("series order must be at least 2, got {order}"),
        });
    }
    let traces = pf.power_traces(order);
    Ok((0..=order).map(|m| candidate_term(m, &traces, pf.omega)).sum())
}

/// The term-by-term expansion of `1/(Ω(1 + ξᵀεξ))`, truncated at `m = M`,
/// with every sphere moment evaluated exactly over all trace patterns.
pub fn series_exact(pf: &PerturbedForm, order: usize) -> Result<f64> {
    check_order(order, MAX_SERIES_ORDER)?;
    let traces = pf.power_traces(order.max(1));
    Ok((0..=order).map(|m| exact_term(m, &traces, pf.omega)).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub order: usize,
    pub candidate_term: f64,
    pub exact_term: f64,
    pub candidate_partial: f64,
    pub exact_partial: f64,
    /// `candidate_term / exact_term`; absent where the exact term is numerically zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesComparison {
    pub omega: f64,
    pub spectral_radius: f64,
    pub order: usize,
    pub level: usize,
    pub value_candidate: f64,
    pub value_exact: f64,
    pub value_quadrature: f64,
    /// `10 ρ^{M+1} 2π²/Ω`
    pub tail_bound: f64,
    pub rows: Vec<SeriesRow>,
}

impl SeriesComparison {
    pub fn exact_within_tail_bound(&self) -> bool {
        (self.value_exact - self.value_quadrature).abs() <= self.tail_bound
    }
}

/// Evaluates both series order by order next to the quadrature value of `I`.
pub fn compare_series(pf: &PerturbedForm, order: usize, rule: &SphereRule) -> Result<SeriesComparison> {
    check_series_order(order)?;
    let traces = pf.power_traces(order);
    let mut rows = Vec::with_capacity(order + 1);
    let (mut candidate_partial, mut exact_partial) = (0.0, 0.0);
    let mut terms = Vec::with_capacity(order + 1);
    for m in 0..=order {
        terms.push((candidate_term(m, &traces, pf.omega), exact_term(m, &traces, pf.omega)));
    }
    let scale = terms.iter().map(|t| t.1.abs()).fold(0.0, f64::max);
    for (m, (p, e)) in terms.into_iter().enumerate() {
        candidate_partial += p;
        exact_partial += e;
        let ratio = (e.abs() > 1e-14 * scale).then(|| p / e);
        rows.push(SeriesRow { order: m, candidate_term: p, exact_term: e, candidate_partial, exact_partial, ratio });
    }
    let rho = pf.spectral_radius();
    Ok(SeriesComparison {
        omega: pf.omega,
        spectral_radius: rho,
        order,
        level: rule.level(),
        value_candidate: candidate_partial,
        value_exact: exact_partial,
        value_quadrature: rational_integral(pf, rule)?,
        tail_bound: 10.0 * rho.powi(order as i32 + 1) * 2.0 * PI * PI / pf.omega,
        rows,
    })
}
