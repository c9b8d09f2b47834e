//! Near-diagonal series of `∫ dS / (ξᵀAξ)`, `A = Ω(δ + ε)`: the candidate
//! `(−2)ᵐ𝒩₂ₘ` coefficients, the exact term-by-term expansion, and quadrature side by
//! side. Prints the discrepancy report reproduced in the README.

use doubled_spectral::hopf::singular_limit;
use doubled_spectral::matchings::{compare_series, PerturbedForm};
use doubled_spectral::quadrature::{potential_numeric, SphereRule};
use doubled_spectral::HopfMetric;

fn main() -> doubled_spectral::Result<()> {
    let rule = SphereRule::new(64)?;
    let inputs: [(&str, f64, [f64; 10]); 3] = [
        ("diag(η,η,−η,−η), η = 0.05", 1.0, [0.05, 0.0, 0.0, 0.0, 0.05, 0.0, 0.0, -0.05, 0.0, -0.05]),
        ("diag(0.03,0.01,−0.015,−0.025)+off-diag", 1.0, [0.03, 0.01, -0.02, 0.0, 0.01, 0.01, 0.01, -0.015, 0.0, -0.025]),
        ("same, Ω = 2", 2.0, [0.03, 0.01, -0.02, 0.0, 0.01, 0.01, 0.01, -0.015, 0.0, -0.025]),
    ];
    println!("## Series: candidate coefficients vs exact expansion\n");
    for (label, omega, upper) in inputs {
        let pf = PerturbedForm::from_upper(omega, upper)?;
        let r = compare_series(&pf, 6, &rule)?;
        println!("{label}: Ω = {omega}, ρ(ε) = {:.4}, level {}\n", r.spectral_radius, r.level);
        println!("| m | candidate term | exact term | candidate / exact |");
        println!("|---|---|---|---|");
        for row in &r.rows {
            let ratio = row.ratio.map_or("-".to_string(), |v| format!("{v:.6}"));
            println!("| {} | {:.6e} | {:.6e} | {ratio} |", row.order, row.candidate_term, row.exact_term);
        }
        println!(
            "\nquadrature {:.15e}; exact partial sum {:.15e} (|Δ| = {:.1e}, tail bound {:.1e}); candidate partial sum {:.15e} (|Δ| = {:.1e})\n",
            r.value_quadrature,
            r.value_exact,
            (r.value_exact - r.value_quadrature).abs(),
            r.tail_bound,
            r.value_candidate,
            (r.value_candidate - r.value_quadrature).abs()
        );
    }

    println!("## Singular surface a2·b1 = a1·b2\n");
    println!("| a1 | a2 | b2 | quadrature | 2π²(b2/a2)²(a1−a2)²(a1²+a2²) | without 2π² |");
    println!("|---|---|---|---|---|---|");
    for (a1, a2, b2) in [(1.5, 0.8, 1.1), (0.6, 1.7, 0.9), (1.9, 1.2, 0.5)] {
        let b1 = b2 * a1 / a2;
        let v = potential_numeric(&HopfMetric::new(a1, b1)?.to_diagonal(), &HopfMetric::new(a2, b2)?.to_diagonal(), &rule)?;
        let with = singular_limit(a1, a2, b2);
        println!("| {a1} | {a2} | {b2} | {v:.12e} | {with:.12e} | {:.12e} |", with / (2.0 * std::f64::consts::PI.powi(2)));
    }
    Ok(())
}
