//! The Clifford-traced symbol term: 2×2 matrix route against the closed
//! form, and the effective cutoff and coupling of the action.

use doubled_spectral::geometry::{b2_trace_closed, b2_trace_matrix};
use doubled_spectral::quadrature::{action_density, kinetic_term, potential_numeric, SphereRule};
use doubled_spectral::{DiagonalMetric, DoubledGeometry, Kappa, UnitVector4};

fn main() -> doubled_spectral::Result<()> {
    let g1 = DiagonalMetric::new([1.0, 1.2, 0.8, 1.5])?;
    let g2 = DiagonalMetric::new([0.7, 1.1, 1.3, 0.9])?;
    let dg = DoubledGeometry::new(g1, g2, 0.6, Kappa::Plus, 2.0, 1.5)?;

    for v in [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [0.3, -0.5, 0.7, 0.2], [1.0, 1.0, 1.0, 1.0]] {
        let xi = UnitVector4::normalize(v)?;
        println!(
            "ξ = {:>44}: matrix {:.17e}  closed {:.17e}",
            format!("{:.4?}", xi.components()),
            b2_trace_matrix(&dg, &xi),
            b2_trace_closed(&dg, &xi)
        );
    }

    let rule = SphereRule::new(64)?;
    let p = dg.effective_params()?;
    println!("\nΛₑ² = {:.17e}\nα = {:.17e}", p.lambda_e_sq, p.alpha);
    println!("kinetic = {:.17e}", kinetic_term(&g1, &g2, &rule)?);
    println!("V̂ = {:.17e}", potential_numeric(&g1, &g2, &rule)?);
    println!("density = {:.17e}", action_density(&dg, &rule)?);

    let flipped = DoubledGeometry::new(g1, g2, 0.6, Kappa::Minus, 2.0, 1.5)?;
    println!("\nκ = −1: α = {:.17e}", flipped.effective_params()?.alpha);
    Ok(())
}
