//! Finite candidate sets of harmonics for the envelopes `h₁`, `h₂`.
//!
//! Since `g_k ≥ γ̃_k^{1/2}`, harmonics with `γ̃_k > H²` never go below level
//! `H`, and a harmonic whose peak lies at distance `d` from `ε` (in `ln ε`)
//! has `g_k(ε) ≥ cosh(d/4)`. Keeping every `k` with `γ̃_k ≤ H²` and peak within
//! `4·arcosh(H)` of the window therefore gives the exact envelopes wherever
//! `h₂ < H`.

use serde::{Deserialize, Serialize};

use super::{constants, Constants, HarmonicEntry, Mode, Source, SplittingError};
use crate::resonance::{IntVec2, ResonanceAnalysis, ResonanceError};
use crate::QuadSurd;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateOptions {
    /// Level `H`; only harmonics with `γ̃_k ≤ H²` are kept.
    pub threshold: f64,
    /// Analyticity width `ρ`.
    pub rho: f64,
    pub mode: Mode,
}

impl Default for CandidateOptions {
    fn default() -> Self {
        CandidateOptions {
            threshold: 4.0,
            rho: 1.0,
            mode: Mode::Exact,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateSet {
    pub options: CandidateOptions,
    pub constants: Constants,
    pub ln_lambda: f64,
    /// Window in `ln ε` for which the set is complete below level `H`.
    pub ln_lo: f64,
    pub ln_hi: f64,
    pub entries: Vec<HarmonicEntry>,
}

impl CandidateSet {
    /// Builds the set for `ε ∈ [eps_lo, eps_hi]`.
    pub fn build(
        analysis: &ResonanceAnalysis,
        eps_lo: f64,
        eps_hi: f64,
        options: CandidateOptions,
    ) -> Result<Self, SplittingError> {
        super::positive("eps_lo", eps_lo)?;
        super::positive("eps_hi", eps_hi)?;
        if eps_lo > eps_hi {
            return Err(SplittingError::BadRange {
                lo: eps_lo,
                hi: eps_hi,
            });
        }
        let h = options.threshold;
        if !(h >= 1.0 && h.is_finite()) {
            return Err(SplittingError::NonPositive {
                name: "threshold - 1",
                value: h - 1.0,
            });
        }
        let gamma_star = analysis.gamma_star_f64();
        let constants = constants(gamma_star, options.rho)?;
        let ln_lambda = analysis.lambda_f64().ln();
        let margin = (8.0 * ln_lambda).max(4.0 * h.acosh());
        let (ln_lo, ln_hi) = (eps_lo.ln(), eps_hi.ln());
        let (lo, hi) = (ln_lo - margin, ln_hi + margin);
        let inside = |x: f64| x >= lo && x <= hi;
        let h2 = h * h;

        let mut entries = Vec::new();
        match options.mode {
            Mode::Limit => {
                for seq in analysis.sequences_below(h2 * gamma_star)? {
                    let gt = seq.gamma_star / gamma_star;
                    let base = constants.d0.ln() + 2.0 * gt.ln() - 4.0 * seq.growth.ln();
                    // base − 4n ln λ ∈ [lo, hi]
                    let n_min = ((base - hi) / (4.0 * ln_lambda)).ceil() as i64;
                    let n_max = ((base - lo) / (4.0 * ln_lambda)).floor() as i64;
                    for n in n_min..=n_max {
                        let k = analysis.member(&seq.k0, n).sign_normalized();
                        let ln_peak = base - 4.0 * n as f64 * ln_lambda;
                        entries.push(HarmonicEntry::from_peak(
                            k,
                            gt,
                            ln_peak,
                            Source::Sequence { j: seq.j, n },
                        ));
                    }
                }
            }
            Mode::Exact => {
                // γ_k of a member can dip below its limit; the factor 2 on
                // the seed level covers the O(λ^{-2n}) corrections.
                for seq in analysis.sequences_below(2.0 * h2 * gamma_star)? {
                    let mut k = seq.k0.clone();
                    let mut n = 0i64;
                    loop {
                        let gt = analysis.gamma_tilde(&k)?;
                        let entry = HarmonicEntry::exact(
                            k.sign_normalized(),
                            gt,
                            &constants,
                            Source::Sequence { j: seq.j, n },
                        );
                        // peaks decrease along the sequence once |k| grows
                        if entry.ln_eps_peak < lo && n > 0 {
                            break;
                        }
                        if gt <= h2 && inside(entry.ln_eps_peak) {
                            entries.push(entry);
                        }
                        k = analysis.umat.matrix.apply(&k);
                        n += 1;
                    }
                }
                let bound = (2.0 * h2 * gamma_star).floor() as i64;
                let half = QuadSurd::from_ratio(1, 2, analysis.omega.d()).map_err(ResonanceError::from)?;
                for k2 in 0..=bound {
                    for k1 in -bound..=bound {
                        if k1.abs() + k2 > bound || (k2 == 0 && k1 <= 0) {
                            continue;
                        }
                        let k = IntVec2::new(k1, k2);
                        let dot = k.dot_omega(&analysis.omega).map_err(ResonanceError::from)?;
                        if dot.abs().compare(&half).map_err(ResonanceError::from)?.is_lt() {
                            continue;
                        }
                        let gt = analysis.gamma_tilde(&k)?;
                        let entry = HarmonicEntry::exact(k, gt, &constants, Source::Sporadic);
                        if gt <= h2 && inside(entry.ln_eps_peak) {
                            entries.push(entry);
                        }
                    }
                }
            }
        }
        entries.sort_by(|a, b| a.k.cmp(&b.k));
        entries.dedup_by(|a, b| a.k == b.k);
        Ok(CandidateSet {
            options,
            constants,
            ln_lambda,
            ln_lo,
            ln_hi,
            entries,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn threshold(&self) -> f64 {
        self.options.threshold
    }

    /// Exact minimum of `h₁` over `ln ε ∈ [a, b]`: each `g_k` is convex in
    /// `ln ε` with its minimum at the peak.
    pub fn envelope_minimum(&self, ln_a: f64, ln_b: f64) -> Option<(f64, &HarmonicEntry)> {
        self.entries
            .iter()
            .map(|e| {
                let x = e.ln_eps_peak.clamp(ln_a, ln_b);
                (e.g_ln(x), e)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.k.cmp(&b.1.k)))
    }
}
