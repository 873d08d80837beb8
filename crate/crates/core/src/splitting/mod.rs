//! Exponent functions `g_k(ε)`, their lower envelopes `h₁`, `h₂` and the
//! dominant harmonics realizing them.
//!
//! With `γ̃_k = γ_k/γ*` and `ε_k = D₀ γ̃_k²/|k|₁⁴`,
//!
//! ```text
//! g_k(ε) = (γ̃_k^{1/2}/2)·[(ε/ε_k)^{1/4} + (ε_k/ε)^{1/4}] = γ̃_k^{1/2}·cosh((ln ε − ln ε_k)/4)
//! ```
//!
//! and the Fourier exponents of the Melnikov potential are
//! `β_k = C₀ ε^{-1/4} g_k(ε)` with `C₀ = (2πργ*)^{1/2}`, `D₀ = (πγ*/(2ρ))²`.

mod candidates;
mod profile;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use candidates::{CandidateOptions, CandidateSet};
pub use profile::{
    dominant_harmonics, envelope_minimum, profile, Dominant, ProfileConfig, ProfileSample,
    SplittingProfile, TransitionKind, TransitionPoint,
};

use crate::resonance::{IntVec2, ResonanceError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplittingError {
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("empty or inverted range [{lo}, {hi}]")]
    BadRange { lo: f64, hi: f64 },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("the two curves coincide")]
    CoincidentCurves,
    #[error("no candidate harmonic independent of S1")]
    NoIndependentCandidate,
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64, SplittingError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(SplittingError::NonPositive { name, value })
    }
}

/// `C₀` and `D₀` for given `γ*` and analyticity width `ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub gamma_star: f64,
    pub rho: f64,
    pub c0: f64,
    pub d0: f64,
}

pub fn constants(gamma_star: f64, rho: f64) -> Result<Constants, SplittingError> {
    positive("gamma_star", gamma_star)?;
    positive("rho", rho)?;
    let pi = std::f64::consts::PI;
    Ok(Constants {
        gamma_star,
        rho,
        c0: (2.0 * pi * rho * gamma_star).sqrt(),
        d0: (pi * gamma_star / (2.0 * rho)).powi(2),
    })
}

/// How `γ̃_k` and `ε_k` are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// True numerators of each integer vector.
    Exact,
    /// Sequence limits `γ̃*_j` and `ε_{s(j,n)} = D₀(γ̃*_j)²/(K_j⁴λ^{4n})`.
    Limit,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "limit" => Ok(Mode::Limit),
            _ => Err(format!("unknown mode {s:?} (expected exact or limit)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Limit => "limit",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Source {
    /// `k = ±s(j, n)`.
    Sequence { j: u64, n: i64 },
    /// A non-resonant vector, `|⟨k, ω⟩| ≥ 1/2`.
    Sporadic,
}

/// One candidate harmonic `k` with the data defining `g_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicEntry {
    pub k: IntVec2,
    pub gamma_tilde: f64,
    pub eps_peak: f64,
    pub ln_eps_peak: f64,
    pub source: Source,
    #[serde(skip)]
    pub(crate) small: Option<[i64; 2]>,
}

impl HarmonicEntry {
    /// Exact-mode entry: `ε_k = D₀ γ̃_k² / |k|₁⁴`.
    pub fn exact(k: IntVec2, gamma_tilde: f64, constants: &Constants, source: Source) -> Self {
        let ln_eps_peak =
            constants.d0.ln() + 2.0 * gamma_tilde.ln() - 4.0 * k.norm1_f64().ln();
        Self::from_peak(k, gamma_tilde, ln_eps_peak, source)
    }

    pub fn from_peak(k: IntVec2, gamma_tilde: f64, ln_eps_peak: f64, source: Source) -> Self {
        let small = k.to_i64();
        HarmonicEntry {
            k,
            gamma_tilde,
            eps_peak: ln_eps_peak.exp(),
            ln_eps_peak,
            source,
            small,
        }
    }

    /// `g_k` at `ln ε`.
    pub fn g_ln(&self, ln_eps: f64) -> f64 {
        self.gamma_tilde.sqrt() * ((ln_eps - self.ln_eps_peak) / 4.0).cosh()
    }

    pub fn g(&self, eps: f64) -> Result<f64, SplittingError> {
        Ok(self.g_ln(positive("eps", eps)?.ln()))
    }

    /// Coefficients of `g = a·x + b/x` with `x = ε^{1/4}`.
    pub fn affine_coefficients(&self) -> (f64, f64) {
        let s = self.gamma_tilde.sqrt() / 2.0;
        let q = (self.ln_eps_peak / 4.0).exp();
        (s / q, s * q)
    }

    pub fn is_collinear(&self, other: &HarmonicEntry) -> bool {
        match (self.small, other.small) {
            (Some([a, b]), Some([c, d])) => (a as i128) * (d as i128) == (b as i128) * (c as i128),
            _ => self.k.is_collinear(&other.k),
        }
    }
}

/// `g_k(ε)` for one entry.
pub fn g_of_eps(entry: &HarmonicEntry, eps: f64) -> Result<f64, SplittingError> {
    entry.g(eps)
}

/// Solves `g_A(ε) = g_B(ε)`: with `x = ε^{1/4}` the equation
/// `a_A x + b_A/x = a_B x + b_B/x` gives `ε^{1/2} = (b_B − b_A)/(a_A − a_B)`.
/// Returns `None` when the curves never cross.
pub fn transition_solve(
    a: &HarmonicEntry,
    b: &HarmonicEntry,
) -> Result<Option<f64>, SplittingError> {
    let (aa, ba) = a.affine_coefficients();
    let (ab, bb) = b.affine_coefficients();
    let da = aa - ab;
    let db = bb - ba;
    let scale_a = aa.abs().max(ab.abs());
    let scale_b = ba.abs().max(bb.abs());
    let same_a = da.abs() <= 1e-15 * scale_a;
    let same_b = db.abs() <= 1e-15 * scale_b;
    if same_a && same_b {
        return Err(SplittingError::CoincidentCurves);
    }
    if same_a {
        return Ok(None);
    }
    let sqrt_eps = db / da;
    if sqrt_eps <= 0.0 {
        return Ok(None);
    }
    Ok(Some(sqrt_eps * sqrt_eps))
}

/// Log-scale predictions: `ln(μ/√ε) − C₀h₁ε^{-1/4}` for the maximal splitting
/// distance and `ln(μ ε^{1/4}) − C₀h₂ε^{-1/4}` for the transversality.
pub fn asymptotic_estimates(
    eps: f64,
    mu: f64,
    c0: f64,
    h1: f64,
    h2: f64,
) -> Result<(f64, f64), SplittingError> {
    positive("eps", eps)?;
    positive("mu", mu)?;
    let q = eps.powf(0.25);
    let ln_max = mu.ln() - 0.5 * eps.ln() - c0 * h1 / q;
    let ln_m_star = mu.ln() + 0.25 * eps.ln() - c0 * h2 / q;
    Ok((ln_max, ln_m_star))
}
