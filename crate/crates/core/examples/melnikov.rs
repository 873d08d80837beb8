//! Zeros of the Melnikov potential, the smallest transversality eigenvalue
//! and the maximal splitting, next to the exponent predictions.
use quadsplit::cli::{melnikov_report, RunConfig};
use quadsplit::melnikov::PhaseSpec;
use quadsplit::ResonanceAnalysis;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let word = args.next().unwrap_or_else(|| "1,2".into());
    let eps: f64 = args.next().map_or(Ok(1e-6), |s| s.parse())?;
    let a = ResonanceAnalysis::new(&word.parse()?)?;
    for phases in [PhaseSpec::Zero, PhaseSpec::Seeded(1)] {
        let cfg = RunConfig {
            phases,
            ..RunConfig::default()
        };
        let r = melnikov_report(&a, eps, &cfg, true)?;
        println!("[{word}] eps = {eps:e}, phases {phases}, {} harmonics", r.harmonics);
        println!("  S1 = ({}, {}), S2 = ({}, {})", r.s1.k1, r.s1.k2, r.s2.k1, r.s2.k2);
        for z in &r.zeros.zeros {
            println!(
                "  zero at ({:.6}, {:.6})  eigenvalues {:.3e}, {:.3e}",
                z.theta[0], z.theta[1], z.eigenvalues[0], z.eigenvalues[1]
            );
        }
        println!(
            "  h1 = {:.5} E1 = {:.5} ({:+.2}%)   h2 = {:.5} E2 = {:.5} ({:+.2}%)",
            r.h1,
            r.e1,
            100.0 * r.rel_dev_e1,
            r.h2,
            r.e2,
            100.0 * r.rel_dev_e2
        );
    }
    Ok(())
}
