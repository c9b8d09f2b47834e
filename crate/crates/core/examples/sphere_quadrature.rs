//! Tensor-product rule on S³: area, a few monomial moments, and convergence
//! of the potential for a generic pair of metrics.

use doubled_spectral::matchings::moment_integral;
use doubled_spectral::quadrature::{potential_numeric, SphereRule, SPHERE_AREA};
use doubled_spectral::DiagonalMetric;

fn main() -> doubled_spectral::Result<()> {
    let rule = SphereRule::new(8)?;
    let area = rule.integrate(|_| 1.0)?;
    println!("level 8, {} nodes: area = {area:.17e} (2π² = {SPHERE_AREA:.17e})", rule.len());

    let rule = SphereRule::new(16)?;
    for idx in [&[0u8, 0][..], &[0, 0, 2, 2], &[1, 1, 1, 1], &[0, 1, 2, 3, 0, 1, 2, 3]] {
        let exact = moment_integral(idx)?;
        let quad = rule.integrate(|xi| {
            let x = xi.components();
            idx.iter().map(|&i| x[i as usize]).product()
        })?;
        println!("∫ ξ{idx:?} dS = {exact} = {:.17e}, quadrature {quad:.17e}", exact.to_f64());
    }

    let g1 = DiagonalMetric::new([0.7, 1.3, 0.9, 1.8])?;
    let g2 = DiagonalMetric::new([1.1, 0.6, 1.5, 1.2])?;
    let reference = potential_numeric(&g1, &g2, &SphereRule::new(128)?)?;
    println!("\nV̂ for g1 = {:?}, g2 = {:?}", g1.scale_factors(), g2.scale_factors());
    for level in [8, 16, 24, 32, 48, 64] {
        let v = potential_numeric(&g1, &g2, &SphereRule::new(level)?)?;
        println!("  level {level:>3}: {v:.17e}  |Δ| vs level 128 = {:.2e}", (v - reference).abs());
    }

    // Thread count changes scheduling only, never the bits of the result.
    let serial = potential_numeric(&g1, &g2, &SphereRule::new(32)?)?;
    let parallel = potential_numeric(&g1, &g2, &SphereRule::new(32)?.with_threads(4)?)?;
    println!("\n1 thread vs 4 threads bit-identical: {}", serial.to_bits() == parallel.to_bits());
    Ok(())
}
