//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use doubled_spectral::cli::to_json;
use doubled_spectral::geometry::{b2_trace_closed, b2_trace_matrix};
use doubled_spectral::hopf::{potential_closed, script_v, singular_limit, HopfMetric};
use doubled_spectral::hypothesis::{run_hypothesis_suite, PairFamily};
use doubled_spectral::matchings::{
    c_coefficient, compare_series, count_n, count_n_inclusion_exclusion, moment_integral, series_exact,
    PerturbedForm,
};
use doubled_spectral::quadrature::{potential_numeric, rational_integral, SphereRule};
use doubled_spectral::{DiagonalMetric, DoubledGeometry, Kappa, UnitVector4};

const TWO_PI_SQ: f64 = 2.0 * PI * PI;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.5..2.0)
}

fn metric(a: [f64; 4]) -> DiagonalMetric {
    DiagonalMetric::new(a).unwrap()
}

fn hopf(a: f64, b: f64) -> HopfMetric {
    HopfMetric::new(a, b).unwrap()
}

fn rule(level: usize) -> SphereRule {
    SphereRule::new(level).unwrap()
}

fn ac1() -> Outcome {
    let v = rule(8).integrate(|_| 1.0).unwrap();
    let e = rel(v, TWO_PI_SQ);
    outcome(e <= 1e-12, format!("area = {v:.17e}, rel err {e:.2e}"))
}

/// Hopf closed form against level-64 quadrature; returns the JSON record too.
fn ac2_run() -> (Outcome, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let r = rule(64);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    while rows.len() < 100 {
        let (a1, b1, a2, b2) = (uniform(&mut rng), uniform(&mut rng), uniform(&mut rng), uniform(&mut rng));
        let (p, q) = (a2 * b1, a1 * b2);
        if (p - q).abs() <= 0.05 * (p + q) {
            continue;
        }
        let (h1, h2) = (hopf(a1, b1), hopf(a2, b2));
        let closed = potential_closed(&h1, &h2);
        let numeric = potential_numeric(&h1.to_diagonal(), &h2.to_diagonal(), &r).unwrap();
        worst = worst.max(rel(closed, numeric));
        rows.push([a1, b1, a2, b2, closed, numeric]);
    }
    (outcome(worst <= 1e-8, format!("100 pairs, max rel err {worst:.2e}")), to_json(&rows))
}

fn ac3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_a, mut worst_b) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let (a, b1, b2) = (uniform(&mut rng), uniform(&mut rng), uniform(&mut rng));
        let expected = TWO_PI_SQ * a * a * (b1 - b2).powi(2);
        worst_a = worst_a.max(rel(potential_closed(&hopf(a, b1), &hopf(a, b2)), expected));
    }
    for _ in 0..20 {
        let (a1, a2, b) = (uniform(&mut rng), uniform(&mut rng), uniform(&mut rng));
        let expected = TWO_PI_SQ * (a1 - a2).powi(2) * b * b;
        worst_b = worst_b.max(rel(potential_closed(&hopf(a1, b), &hopf(a2, b)), expected));
    }
    outcome(
        worst_a <= 1e-12 && worst_b <= 1e-12,
        format!("a1=a2: max rel err {worst_a:.2e}; b1=b2: max rel err {worst_b:.2e}"),
    )
}

fn ac4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let r = rule(64);
    let (mut worst_full, mut best_bare) = (0.0f64, f64::INFINITY);
    println!("  singular surface b1 = b2·a1/a2 (level 64 quadrature):");
    println!("  {:>8} {:>8} {:>8} {:>24} {:>12} {:>12}", "a1", "a2", "b2", "quadrature", "rel(2π²·L)", "rel(L)");
    for _ in 0..10 {
        let (a1, a2, b2) = (uniform(&mut rng), uniform(&mut rng), uniform(&mut rng));
        let b1 = b2 * a1 / a2;
        let v = potential_numeric(&hopf(a1, b1).to_diagonal(), &hopf(a2, b2).to_diagonal(), &r).unwrap();
        let with = singular_limit(a1, a2, b2);
        let bare = with / TWO_PI_SQ;
        let (e_with, e_bare) = (rel(v, with), rel(v, bare));
        println!("  {a1:>8.5} {a2:>8.5} {b2:>8.5} {v:>24.16e} {e_with:>12.2e} {e_bare:>12.2e}");
        worst_full = worst_full.max(e_with);
        best_bare = best_bare.min(e_bare);
    }
    let agrees_full = worst_full <= 1e-6;
    let agrees_bare = best_bare <= 1e-6;
    outcome(
        agrees_full != agrees_bare && agrees_full,
        format!(
            "with 2π²: max rel err {worst_full:.2e}; candidate limit without 2π²: min rel err {best_bare:.2e}"
        ),
    )
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let r = rule(32);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g1 = metric([0; 4].map(|_| uniform(&mut rng)));
        let g2 = metric([0; 4].map(|_| uniform(&mut rng)));
        let a = potential_numeric(&g1, &g2, &r).unwrap();
        let b = potential_numeric(&g2, &g1, &r).unwrap();
        worst = worst.max((a - b).abs() / a);
    }
    outcome(worst <= 1e-10, format!("100 pairs, max |V(g1,g2) − V(g2,g1)|/V = {worst:.2e}"))
}

fn ac6_run() -> (Outcome, String) {
    let report = run_hypothesis_suite(200, 42, PairFamily::Generic, &rule(64), 1e-7).unwrap();
    let o = outcome(
        report.failures.is_empty(),
        format!(
            "{} failures; max scaling {:.2e}, permutation {:.2e}, exchange {:.2e}",
            report.failures.len(),
            report.max_scaling,
            report.max_permutation,
            report.max_exchange
        ),
    );
    (o, to_json(&report))
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (a1, b1, a2, b2) = (uniform(&mut rng), uniform(&mut rng), uniform(&mut rng), uniform(&mut rng));
        let (x, y) = (b1 / b2, a1 / a2);
        let lhs = script_v(x, y) * (a2 * b2).powi(2);
        let rhs = script_v(1.0 / x, 1.0 / y) * (a1 * b1).powi(2);
        worst = worst.max((lhs - rhs).abs());
    }
    outcome(worst <= 1e-10, format!("100 pairs, max |𝕍(x,y)a2²b2² − 𝕍(1/x,1/y)a1²b1²| = {worst:.2e}"))
}

fn ac8() -> Outcome {
    let mut ok = true;
    let mut counts = Vec::new();
    for m in 0..=8 {
        let n = count_n(m).unwrap();
        ok &= n as i128 == count_n_inclusion_exclusion(m);
        counts.push(n);
    }
    ok &= counts[1] == 0 && counts[2] == 2 && counts[3] == 8;
    ok &= c_coefficient(1).coefficient() == &BigRational::new(1.into(), 2.into());
    for m in 1..=12 {
        let prev = c_coefficient(m - 1).coefficient().clone();
        ok &= c_coefficient(m).coefficient() == &(prev / BigRational::from_integer((2 * m as i64 + 2).into()));
    }
    outcome(ok, format!("N_2m for m = 0..8: {counts:?}; c1 = {}", c_coefficient(1)))
}

fn ac9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let r = rule(32);
    let mut worst = 0.0f64;
    let mut nonzero = 0;
    for i in 0..50 {
        let m = rng.random_range(1..=4);
        // Odd draws are arbitrary; even draws pair up labels so the moment is nonzero.
        let idx: Vec<u8> = if i % 2 == 0 {
            let mut v: Vec<u8> = (0..m).flat_map(|_| [rng.random_range(0..4u8); 2]).collect();
            v.shuffle(&mut rng);
            v
        } else {
            (0..2 * m).map(|_| rng.random_range(0..4u8)).collect()
        };
        let exact = moment_integral(&idx).unwrap().to_f64();
        let quad = r
            .integrate(|xi| {
                let x = xi.components();
                idx.iter().map(|&i| x[i as usize]).product()
            })
            .unwrap();
        let err = if exact == 0.0 {
            quad.abs() / TWO_PI_SQ
        } else {
            nonzero += 1;
            rel(quad, exact)
        };
        worst = worst.max(err);
    }
    outcome(worst <= 1e-11, format!("50 tuples ({nonzero} nonzero moments), max rel err {worst:.2e}"))
}

/// Random symmetric traceless ε with spectral radius in `[0.01, 0.05]`.
fn random_form(rng: &mut ChaCha8Rng) -> PerturbedForm {
    let mut upper: [f64; 10] = [0.0; 10].map(|_| rng.random_range(-1.0..1.0));
    let tr = upper[0] + upper[4] + upper[7] + upper[9];
    for d in [0, 4, 7, 9] {
        upper[d] -= tr / 4.0;
    }
    let omega = uniform(rng);
    let rho = PerturbedForm::from_upper(omega, upper.map(|v| v * 1e-3)).unwrap().spectral_radius() * 1e3;
    let target = rng.random_range(0.01..0.05);
    PerturbedForm::from_upper(omega, upper.map(|v| v * target / rho)).unwrap()
}

fn ac10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let r = rule(32);
    let mut worst_ratio = 0.0f64;
    for _ in 0..20 {
        let pf = random_form(&mut rng);
        let rho = pf.spectral_radius();
        let bound = 10.0 * rho.powi(5) * TWO_PI_SQ / pf.omega();
        let err = (series_exact(&pf, 4).unwrap() - rational_integral(&pf, &r).unwrap()).abs();
        worst_ratio = worst_ratio.max(err / bound);
    }
    outcome(worst_ratio <= 1.0, format!("20 forms, max |exact − quadrature| / bound = {worst_ratio:.3}"))
}

fn ac11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let g1 = metric([0; 4].map(|_| uniform(&mut rng)));
        let g2 = metric([0; 4].map(|_| uniform(&mut rng)));
        let kappa = if rng.random_bool(0.5) { Kappa::Plus } else { Kappa::Minus };
        let dg = DoubledGeometry::new(g1, g2, rng.random_range(0.0..2.0), kappa, 1.0, 1.0).unwrap();
        let xi = UnitVector4::normalize([0; 4].map(|_| rng.random_range(-1.0..1.0))).unwrap();
        let (m, c) = (b2_trace_matrix(&dg, &xi), b2_trace_closed(&dg, &xi));
        let e = if c == 0.0 { m.abs() } else { rel(m, c) };
        worst = worst.max(e);
    }
    outcome(worst <= 1e-12, format!("1000 samples, max rel err {worst:.2e}"))
}

fn ac12_run(verbose: bool) -> (Outcome, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let r = rule(32);
    let mut reports = Vec::new();
    let mut ok = true;
    if verbose {
        println!("  series adjudication, order 4 (candidate/exact ratio per order):");
    }
    for i in 0..5 {
        let pf = random_form(&mut rng);
        let report = compare_series(&pf, 4, &r).unwrap();
        ok &= report.exact_within_tail_bound();
        let ratios: Vec<String> = report
            .rows
            .iter()
            .map(|row| row.ratio.map_or_else(|| "-".to_string(), |v| format!("{v:.6}")))
            .collect();
        if !verbose {
            reports.push(report);
            continue;
        }
        println!(
            "  #{i} ρ={:.4} quad={:.16e} exact={:.16e} candidate={:.16e} ratios [{}]",
            report.spectral_radius,
            report.value_quadrature,
            report.value_exact,
            report.value_candidate,
            ratios.join(", ")
        );
        reports.push(report);
    }
    (outcome(ok, "5 inputs, exact column within tail bound; ratios recorded above"), to_json(&reports))
}

fn ac13(first: &[String; 3]) -> Outcome {
    let again = [ac2_run().1, ac6_run().1, ac12_run(false).1];
    let same: Vec<bool> = first.iter().zip(&again).map(|(a, b)| a == b).collect();
    outcome(
        same.iter().all(|&s| s),
        format!("byte-identical reruns: AC2 {}, AC6 {}, AC12 {}", same[0], same[1], same[2]),
    )
}

fn report(n: usize, name: &str, f: impl FnOnce() -> Outcome, failures: &mut usize) {
    let t = Instant::now();
    let o = f();
    let tag = if o.pass { "PASS" } else { "FAIL" };
    if !o.pass {
        *failures += 1;
    }
    println!("[{tag}] AC{n:<2} {name}: {} ({:.1}s)", o.detail, t.elapsed().as_secs_f64());
}

fn main() {
    let mut failures = 0;
    let mut outputs: [String; 3] = Default::default();
    report(1, "sphere area", ac1, &mut failures);
    report(
        2,
        "Hopf closed form vs quadrature",
        || {
            let (o, s) = ac2_run();
            outputs[0] = s;
            o
        },
        &mut failures,
    );
    report(3, "reduction identities", ac3, &mut failures);
    report(4, "singular-surface adjudication", ac4, &mut failures);
    report(5, "exchange symmetry", ac5, &mut failures);
    report(
        6,
        "hypothesis suite (200 trials, seed 42)",
        || {
            let (o, s) = ac6_run();
            outputs[1] = s;
            o
        },
        &mut failures,
    );
    report(7, "bimetric identity on Hopf pairs", ac7, &mut failures);
    report(8, "matching combinatorics", ac8, &mut failures);
    report(9, "moment integrals vs quadrature", ac9, &mut failures);
    report(10, "series oracle", ac10, &mut failures);
    report(11, "b2 trace: matrix vs closed form", ac11, &mut failures);
    report(
        12,
        "series adjudication report",
        || {
            let (o, s) = ac12_run(true);
            outputs[2] = s;
            o
        },
        &mut failures,
    );
    report(13, "determinism", || ac13(&outputs), &mut failures);
    println!("acceptance: {} passed, {failures} failed", 13 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
