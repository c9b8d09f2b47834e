//! Behaviour of the closed form on and near the surface `a₂b₁ = a₁b₂`, where
//! its two parts are separately indeterminate.

use std::f64::consts::PI;

use doubled_spectral::hopf::{near_singular_surface, potential_closed, singular_limit, HopfMetric};
use doubled_spectral::quadrature::{potential_numeric, SphereRule};

fn main() -> doubled_spectral::Result<()> {
    let rule = SphereRule::new(64)?;
    let (a1, a2, b2) = (1.5, 0.8, 1.1);
    let b_star = b2 * a1 / a2;
    let limit = singular_limit(a1, a2, b2);
    println!("a1 = {a1}, a2 = {a2}, b2 = {b2}: surface at b1 = {b_star}");
    println!("2π²(b2/a2)²(a1−a2)²(a1²+a2²) = {limit:.17e}");
    println!("same without the 2π² factor  = {:.17e}\n", limit / (2.0 * PI * PI));

    println!("{:>14} {:>8} {:>24} {:>24}", "b1 − b*", "tube", "closed", "quadrature");
    for off in [-1e-2, -1e-4, -1e-6, -1e-8, 0.0, 1e-8, 1e-6, 1e-4, 1e-2] {
        let b1 = b_star + off;
        let (h1, h2) = (HopfMetric::new(a1, b1)?, HopfMetric::new(a2, b2)?);
        let closed = potential_closed(&h1, &h2);
        let numeric = potential_numeric(&h1.to_diagonal(), &h2.to_diagonal(), &rule)?;
        println!("{off:>14.1e} {:>8} {closed:>24.16e} {numeric:>24.16e}", near_singular_surface(&h1, &h2));
    }
    Ok(())
}
