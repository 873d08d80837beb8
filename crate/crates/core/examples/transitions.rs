//! Transition values of ε in limit mode: geometric sequences of ratio λ⁴.
use quadsplit::splitting::{profile, Mode, ProfileConfig, Source};
use quadsplit::ResonanceAnalysis;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let word = std::env::args().nth(1).unwrap_or_else(|| "1,2".into());
    let a = ResonanceAnalysis::new(&word.parse()?)?;
    let l4 = a.lambda_f64().powi(4);
    let p = profile(
        &a,
        &ProfileConfig {
            eps_lo: 1e-9,
            eps_hi: 1e-9 * l4 * l4 * l4,
            samples: 400,
            mode: Mode::Limit,
            rho: 1.0,
        },
    )?;
    let name = |s: &Source| match s {
        Source::Sequence { j, n } => format!("s({j},{n})"),
        Source::Sporadic => "sporadic".into(),
    };
    for t in &p.transitions {
        println!(
            "{:?}  eps* = {:.6e}  {:>9} -> {:<9}  gap {:.1e}",
            t.kind,
            t.eps_star,
            name(&t.sources[0]),
            name(&t.sources[1]),
            t.gap
        );
    }
    println!("lambda^4 = {l4:.6}");
    Ok(())
}
