//! Admissible β₀ and the constants of the Wilson-loop estimates.

use zn_gauge::model::{beta0_admissible, minimal_admissible_beta0, predicted_wilson, Representation, TheoryConstants};

fn main() -> zn_gauge::Result<()> {
    for n in 2..=5 {
        let rep = Representation::standard(n)?;
        let beta0 = minimal_admissible_beta0(&rep);
        let report = beta0_admissible(&rep, beta0)?;
        let c = TheoryConstants::new(&rep, beta0)?;
        println!(
            "n={n}: β₀={beta0:.2} admissible={} θ(β₀)={:.6} K*={:.4} K_*={:.4} K″={:.4}",
            report.admissible(),
            c.theta.value,
            c.k_star_sup.value,
            c.k_lower.value,
            c.k_dblprime.value
        );
    }
    let rep = Representation::standard(2)?;
    for beta in [0.6, 1.0, 2.0] {
        println!("β={beta}: e^(−ℓ(1−θ)) for a 3×3 loop = {:.12}", predicted_wilson(&rep, 12, beta));
    }
    Ok(())
}
