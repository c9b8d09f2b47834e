//! Perfect matchings of 2m points: block-avoiding counts, sphere-moment
//! coefficients, and trace-pattern multiplicities.

use doubled_spectral::matchings::{
    c_coefficient, count_n, count_n_inclusion_exclusion, odd_double_factorial, pattern_census,
};

fn main() -> doubled_spectral::Result<()> {
    println!("{:>2} {:>10} {:>10} {:>10} {:>16}", "m", "(2m−1)!!", "N_2m", "incl-excl", "c_m");
    for m in 0..=8 {
        println!(
            "{m:>2} {:>10} {:>10} {:>10} {:>16}",
            odd_double_factorial(m),
            count_n(m)?,
            count_n_inclusion_exclusion(m),
            c_coefficient(m).to_string()
        );
    }

    for m in 2..=5 {
        println!("\nm = {m} trace patterns (cycle lengths × multiplicity):");
        for (pattern, count) in pattern_census(m)? {
            let note = if pattern.vanishes_for_traceless() { "  (zero for tr ε = 0)" } else { "" };
            println!("  {pattern:<12} × {count}{note}");
        }
    }
    Ok(())
}
