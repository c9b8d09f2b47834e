//! The bimetric form `V̂ = 2π² 𝕍(x, y) √det g₂` on Hopf pairs, and the
//! randomized invariance checks for generic diagonal pairs.

use doubled_spectral::hopf::{potential_closed, potential_via_conjecture, script_v, HopfMetric};
use doubled_spectral::hypothesis::{run_hypothesis_suite, PairFamily};
use doubled_spectral::quadrature::SphereRule;

fn main() -> doubled_spectral::Result<()> {
    println!("𝕍(x, y) on a few points:");
    for (x, y) in [(1.0, 1.0), (2.0, 1.0), (1.0, 0.5), (2.0, 2.0), (0.5, 3.0), (1.7, 0.4)] {
        println!("  𝕍({x}, {y}) = {:.17e}   x²y²𝕍(1/x, 1/y) = {:.17e}", script_v(x, y), x * x * y * y * script_v(1.0 / x, 1.0 / y));
    }

    let (h1, h2) = (HopfMetric::new(1.4, 0.7)?, HopfMetric::new(0.9, 1.2)?);
    println!(
        "\nclosed {:.17e}\nbimetric form {:.17e}",
        potential_closed(&h1, &h2),
        potential_via_conjecture(&h1, &h2)
    );

    let rule = SphereRule::new(48)?;
    for family in [PairFamily::Hopf, PairFamily::Generic] {
        let r = run_hypothesis_suite(20, 42, family, &rule, 1e-7)?;
        println!(
            "\n{family:?}: {} trials at level {}, {} failures\n  max scaling {:.2e}, permutation {:.2e}, exchange {:.2e}, closed form {}",
            r.trials,
            r.level,
            r.failures.len(),
            r.max_scaling,
            r.max_permutation,
            r.max_exchange,
            r.max_closed_form.map_or("-".into(), |v| format!("{v:.2e}"))
        );
    }
    Ok(())
}
