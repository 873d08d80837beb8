use serde::{Deserialize, Serialize};

use super::CliError;
use crate::quadfield::{PeriodicCF, QuadSurd};
use crate::resonance::{IntMat2, IntVec2, ResonanceAnalysis, Role};
use crate::splitting::constants;

/// The 24 periods `[n]`, `n = 1..=13`, and `[1, n]`, `n = 2..=12`.
pub fn catalog() -> Vec<PeriodicCF> {
    let single = (1..=13).map(|n| vec![n]);
    let pairs = (2..=12).map(|n| vec![1, n]);
    single
        .chain(pairs)
        .map(|p| PeriodicCF::new(p).expect("catalog words are valid"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub word: String,
    pub omega: f64,
    pub omega_surd: String,
    #[serde(rename = "D")]
    pub d: u64,
}

pub fn catalog_entries() -> Vec<CatalogEntry> {
    catalog()
        .into_iter()
        .map(|cf| {
            let v = cf.value();
            CatalogEntry {
                word: cf.word(),
                omega: v.to_f64(),
                omega_surd: v.to_string(),
                d: v.d(),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub j: u64,
    pub k0: IntVec2,
    #[serde(rename = "K")]
    pub growth: f64,
    pub gamma_star: f64,
    pub gamma_star_surd: String,
    pub gamma_tilde: f64,
    pub role: Role,
    pub family: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub word: String,
    pub m: usize,
    pub omega: f64,
    pub omega_surd: String,
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(rename = "U")]
    pub u: IntMat2,
    pub lambda: f64,
    pub lambda_surd: String,
    pub sigma: i8,
    /// `Uᵀ(1, Ω) = σλ⁻¹(1, Ω)` and `det U = (−1)^m`, checked exactly.
    pub eigen_identity: bool,
    pub j0: u64,
    pub gamma_star: f64,
    pub gamma_star_surd: String,
    pub j1: u64,
    pub gamma_star_j1: f64,
    pub j_certified: u64,
    pub sequences: Vec<SequenceRow>,
    pub rho: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "D0")]
    pub d0: f64,
}

impl AnalysisReport {
    pub fn new(analysis: &ResonanceAnalysis, rho: f64) -> Result<Self, CliError> {
        let gs = analysis.gamma_star_f64();
        let c = constants(gs, rho)?;
        let sequences = analysis
            .sequences
            .iter()
            .map(|s| SequenceRow {
                j: s.j,
                k0: s.k0.clone(),
                growth: s.growth,
                gamma_star: s.gamma_star,
                gamma_star_surd: s.limits.gamma_star.to_string(),
                gamma_tilde: s.gamma_star / gs,
                role: s.role,
                family: s.family,
            })
            .collect();
        Ok(AnalysisReport {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            word: analysis.cf.word(),
            m: analysis.cf.len(),
            omega: analysis.omega_f64(),
            omega_surd: analysis.omega.to_string(),
            d: analysis.omega.d(),
            u: analysis.umat.matrix.clone(),
            lambda: analysis.lambda_f64(),
            lambda_surd: analysis.umat.lambda.to_string(),
            sigma: analysis.umat.sigma,
            eigen_identity: analysis.umat.verify(&analysis.cf)?,
            j0: analysis.j0,
            gamma_star: gs,
            gamma_star_surd: analysis.gamma_star.to_string(),
            j1: analysis.j1,
            gamma_star_j1: analysis.main_secondary().gamma_star,
            j_certified: analysis.j_certified,
            sequences,
            rho,
            c0: c.c0,
            d0: c.d0,
        })
    }

    /// Parses the exact `Ω`, `λ` and `γ*` strings back.
    pub fn surds(&self) -> Result<[QuadSurd; 3], CliError> {
        let bad = |s: &str, e| CliError::Usage(format!("bad surd {s:?}: {e}"));
        // rationals carry no radicand in their text form
        let parse = |s: &str| {
            let x = s.parse::<QuadSurd>().map_err(|e| bad(s, e))?;
            if x.is_rational() {
                QuadSurd::new(x.p().clone(), 0, x.r().clone(), self.d).map_err(|e| bad(s, e))
            } else {
                Ok(x)
            }
        };
        Ok([
            parse(&self.omega_surd)?,
            parse(&self.lambda_surd)?,
            parse(&self.gamma_star_surd)?,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_24_words() {
        let c = catalog_entries();
        assert_eq!(c.len(), 24);
        let e = c.iter().find(|e| e.word == "1,2").unwrap();
        assert_eq!(e.omega_surd.parse::<QuadSurd>().unwrap(), QuadSurd::new(-1, 1, 1, 3).unwrap());
        let e = c.iter().find(|e| e.word == "1").unwrap();
        assert_eq!(e.omega_surd.parse::<QuadSurd>().unwrap(), QuadSurd::new(-1, 1, 2, 5).unwrap());
    }

    #[test]
    fn report_round_trips() {
        let a = ResonanceAnalysis::new(&"1,2".parse().unwrap()).unwrap();
        let r = AnalysisReport::new(&a, 1.0).unwrap();
        assert!(r.eigen_identity);
        assert_eq!(r.gamma_star, 0.5);
        let json = serde_json::to_string(&r).unwrap();
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let [omega, lambda, gs] = back.surds().unwrap();
        assert_eq!(omega, a.omega);
        assert_eq!(lambda, QuadSurd::new(2, 1, 1, 3).unwrap());
        assert_eq!(gs, QuadSurd::from_ratio(1, 2, 3).unwrap());
    }

    #[test]
    fn c0_follows_gamma_star() {
        let a = ResonanceAnalysis::new(&"4".parse().unwrap()).unwrap();
        let r = AnalysisReport::new(&a, 1.0).unwrap();
        assert!((r.c0 - (std::f64::consts::TAU * r.gamma_star).sqrt()).abs() < 1e-15);
    }
}
