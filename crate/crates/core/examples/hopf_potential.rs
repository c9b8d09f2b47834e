//! Closed-form potential for Hopf-shaped pairs `(b,b,a,a)` against quadrature.

use std::f64::consts::PI;

use doubled_spectral::hopf::{potential_closed, HopfMetric};
use doubled_spectral::quadrature::{potential_numeric, SphereRule};

fn main() -> doubled_spectral::Result<()> {
    let rule = SphereRule::new(64)?;
    let pairs = [((1.0, 2.0), (1.0, 1.0)), ((1.3, 0.7), (0.6, 1.9)), ((0.5, 2.0), (2.0, 0.5)), ((1.4, 0.7), (0.9, 1.2))];
    println!("{:>18} {:>18} {:>24} {:>24} {:>10}", "(a1, b1)", "(a2, b2)", "closed", "quadrature", "rel diff");
    for ((a1, b1), (a2, b2)) in pairs {
        let (h1, h2) = (HopfMetric::new(a1, b1)?, HopfMetric::new(a2, b2)?);
        let closed = potential_closed(&h1, &h2);
        let numeric = potential_numeric(&h1.to_diagonal(), &h2.to_diagonal(), &rule)?;
        println!(
            "{:>18} {:>18} {closed:>24.16e} {numeric:>24.16e} {:>10.2e}",
            format!("({a1}, {b1})"),
            format!("({a2}, {b2})"),
            (closed - numeric).abs() / numeric
        );
    }

    // On a₁ = a₂ the potential is 2π²a²(b₁−b₂)²; on b₁ = b₂ it is 2π²(a₁−a₂)²b².
    let v = potential_closed(&HopfMetric::new(1.3, 0.7)?, &HopfMetric::new(1.3, 1.6)?);
    println!("\na1 = a2 = 1.3, b = 0.7, 1.6: {v:.17e} vs {:.17e}", 2.0 * PI * PI * 1.69 * 0.81);
    let v = potential_closed(&HopfMetric::new(0.55, 1.2)?, &HopfMetric::new(1.8, 1.2)?);
    println!("b1 = b2 = 1.2, a = 0.55, 1.8: {v:.17e} vs {:.17e}", 2.0 * PI * PI * 1.5625 * 1.44);
    Ok(())
}
