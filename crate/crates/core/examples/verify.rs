//! The quick oracle suite over the whole catalog.
use quadsplit::cli::{catalog, verify, Level};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = verify(&catalog(), Level::Quick)?;
    for c in &report.checks {
        if !c.passed || c.word == "1,2" {
            let tag = if c.passed { "ok" } else { "FAIL" };
            println!("{tag:>4} [{}] {} {:.2e} (tol {:.0e})", c.word, c.name, c.measured, c.tolerance);
        }
    }
    println!("{} checks, all passed: {}", report.checks.len(), report.passed);
    Ok(())
}
