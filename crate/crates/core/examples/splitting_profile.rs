//! h1, h2 over two periods in ln ε, written as CSV (the data behind a
//! figure of the splitting exponents).
use quadsplit::splitting::{profile, Mode, ProfileConfig};
use quadsplit::ResonanceAnalysis;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let word = std::env::args().nth(1).unwrap_or_else(|| "1,2".into());
    let a = ResonanceAnalysis::new(&word.parse()?)?;
    let period = a.lambda_f64().powi(4);
    let config = ProfileConfig {
        eps_lo: 1e-4 / (period * period),
        eps_hi: 1e-4,
        samples: 200,
        mode: Mode::Exact,
        rho: 1.0,
    };
    let p = profile(&a, &config)?;
    eprintln!(
        "[{word}] C0 = {:.5}, period lambda^4 = {period:.3}, level H = {}",
        p.c0, p.threshold
    );
    p.write_csv(std::io::stdout().lock())?;
    Ok(())
}
