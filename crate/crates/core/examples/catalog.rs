//! The 24 quadratic numbers used throughout: Ω, its surd form and the
//! eigenvalue data of U.
use quadsplit::cli::catalog;
use quadsplit::resonance::build_u;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<6} {:>10} {:>10} {:>3}  identity", "word", "omega", "lambda", "sg");
    for cf in catalog() {
        let u = build_u(&cf)?;
        println!(
            "{:<6} {:>10.6} {:>10.4} {:>3}  {}",
            cf.word(),
            cf.value().to_f64(),
            u.lambda.to_f64(),
            u.sigma,
            u.verify(&cf)?
        );
    }
    Ok(())
}
