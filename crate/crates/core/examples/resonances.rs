//! Resonant sequences of a frequency ratio, with a brute-force cross-check
//! of γ*.
use quadsplit::resonance::brute_force_scan;
use quadsplit::ResonanceAnalysis;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let word = std::env::args().nth(1).unwrap_or_else(|| "1,2".into());
    let a = ResonanceAnalysis::new(&word.parse()?)?;
    println!("[{word}]  omega = {}  lambda = {}", a.omega, a.umat.lambda);
    println!("U = {:?}", a.umat.matrix);
    for s in a.sequences.iter().take(8) {
        println!(
            "j={:<3} k0=({:>3},{:>3})  K={:.4}  gamma*={:.6}  {:?}",
            s.j, s.k0.k1, s.k0.k2, s.growth, s.gamma_star, s.role
        );
    }
    for n in 0..4 {
        let k = a.member(&a.primary().k0, n);
        println!("s(j0,{n}) = ({}, {})  gamma = {:.8}", k.k1, k.k2, a.gamma(&k)?);
    }
    let scan = brute_force_scan(&a, 20_000)?;
    println!(
        "gamma* = {} ~ {:.10}, brute force tail min {:.10}",
        a.gamma_star,
        a.gamma_star_f64(),
        scan.tail_min
    );
    Ok(())
}
