use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::melnikov::{find_zeros, harmonic_coeff, quadrature_oracle, MelnikovModel, PhaseSpec};
use crate::quadfield::PeriodicCF;
use crate::resonance::{brute_force_scan, partition_check, IntVec2, ResonanceAnalysis};
use crate::splitting::{dominant_harmonics, CandidateOptions, CandidateSet, Mode, Source};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub word: String,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub level: Level,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn check(word: &str, name: &str, measured: f64, tolerance: f64) -> Check {
    Check {
        word: word.to_string(),
        name: name.to_string(),
        passed: measured <= tolerance,
        measured,
        tolerance,
    }
}

/// Runs the oracle suite on each word; words are processed in parallel and
/// reported in input order.
pub fn verify(words: &[PeriodicCF], level: Level) -> Result<VerifyReport, CliError> {
    let per_word = words
        .par_iter()
        .map(|cf| verify_word(cf, level))
        .collect::<Result<Vec<_>, _>>()?;
    let checks: Vec<Check> = per_word.into_iter().flatten().collect();
    Ok(VerifyReport {
        level,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn verify_word(cf: &PeriodicCF, level: Level) -> Result<Vec<Check>, CliError> {
    let w = cf.word();
    let a = ResonanceAnalysis::new(cf)?;
    let mut out = Vec::new();

    let exact = a.umat.verify(cf)?;
    out.push(check(&w, "eigen-identity", if exact { 0.0 } else { 1.0 }, 0.0));

    let (n_max, tol) = match level {
        Level::Quick => (10_000, 1e-4),
        Level::Full => (100_000, 1e-6),
    };
    let scan = brute_force_scan(&a, n_max)?;
    let gs = a.gamma_star_f64();
    out.push(check(&w, "gamma-star-brute-force", (scan.tail_min / gs - 1.0).abs(), tol));

    // limit-mode periodicity and the unit floor over one period
    let ln_lambda = a.lambda_f64().ln();
    let (lo, hi) = (1e-8f64, 1e-6f64);
    let limit = CandidateSet::build(
        &a,
        lo,
        hi * a.lambda_f64().powi(4),
        CandidateOptions {
            mode: Mode::Limit,
            ..Default::default()
        },
    )?;
    let mut dev = 0.0f64;
    let mut order = 0.0f64;
    for i in 0..64 {
        let x = lo.ln() + (hi / lo).ln() * i as f64 / 63.0;
        let d0 = dominant_harmonics(&limit, x)?;
        let d1 = dominant_harmonics(&limit, x + 4.0 * ln_lambda)?;
        dev = dev.max((d1.h1 - d0.h1).abs());
        order = order.max(d0.h1 - d0.h2).max(1.0 - d0.h1);
    }
    out.push(check(&w, "limit-periodicity", dev, 1e-12));
    let (floor, _) = limit
        .envelope_minimum(lo.ln(), lo.ln() + 4.0 * ln_lambda)
        .expect("candidate set is not empty");
    out.push(check(&w, "h1-floor", (floor - 1.0).abs(), 1e-9));
    out.push(check(&w, "h-ordering", order.max(0.0), 1e-12));

    if level == Level::Full {
        let rep = partition_check(&a, 2000)?;
        let bad = rep.duplicates + rep.missing + rep.extra;
        out.push(check(&w, "partition", bad as f64, 0.0));

        let mut worst = 0.0f64;
        for eps in [1e-1, 1e-2] {
            let m = MelnikovModel::build(&a, eps, 1.0, 1.0, PhaseSpec::Zero)?;
            for h in m.harmonics.iter().take(10) {
                let k = IntVec2::new(h.k[0], h.k[1]);
                let q = quadrature_oracle(&k, &a.omega, eps, 1.0, 40.0, 20_000)?;
                let c = harmonic_coeff(&k, &a.omega, eps, 1.0)?;
                worst = worst.max((q / c.ln_abs.exp() - 1.0).abs());
            }
        }
        out.push(check(&w, "quadrature-vs-sinh", worst, 1e-8));

        // S₁ primary over two periods, exact mode
        let (lo, hi) = (1e-4 / a.lambda_f64().powi(8), 1e-4f64);
        let set = CandidateSet::build(&a, lo, hi, CandidateOptions::default())?;
        let mut off = 0usize;
        for i in 0..200 {
            let x = lo.ln() + (hi / lo).ln() * i as f64 / 199.0;
            let d = dominant_harmonics(&set, x)?;
            let primary = matches!(set.entries[d.s1].source, Source::Sequence { j, .. } if j == a.j0);
            off += usize::from(!primary);
        }
        out.push(check(&w, "s1-primary", off as f64, 0.0));

        // four simple zeros at an unflagged ε near 10⁻⁶
        let mut eps = 1e-6;
        let probe = CandidateSet::build(&a, eps, eps * 2.0, CandidateOptions::default())?;
        while dominant_harmonics(&probe, eps.ln())?.flagged && eps < 2e-6 {
            eps *= 1.01;
        }
        let m = MelnikovModel::build_power(&a, eps, 4.0, 1.0, PhaseSpec::Zero)?;
        let z = find_zeros(&m);
        out.push(check(
            &w,
            "four-simple-zeros",
            if z.is_nondegenerate() { 0.0 } else { z.zeros.len() as f64 },
            0.0,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_on_golden_mean() {
        let r = verify(&["1".parse().unwrap()], Level::Quick).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.checks.len(), 5);
    }
}
