//! First-order splitting: the Melnikov potential
//!
//! ```text
//! L(θ) = Σ_{k₂ ≥ 0, k ≠ 0} L_k cos(⟨k, θ⟩ − σ_k),
//! L_k  = 2π|a_k| e^{−ρ|k|₁} / sinh(π|a_k|/2),   a_k = ⟨k, ω⟩/√ε,
//! ```
//!
//! its critical points (the zeros of `μ∇L`), the transversality eigenvalue
//! and the maximal splitting distance.
//!
//! The coefficients are exponentially small, so everything is stored in log
//! scale: `L_k = e^{log_scale} · A_k` with `A_k ≤ 1` and `log_scale` the
//! largest `ln L_k`. Zeros and eigenvalues are computed on `L̂ = Σ A_k cos(…)`.

mod zeros;

use std::f64::consts::{LN_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use zeros::{find_zeros, max_splitting, transversality, MaxSplitting, Transversality, Zero, ZeroReport};

use crate::quadfield::QuadSurd;
use crate::resonance::{IntVec2, ResonanceAnalysis, ResonanceError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MelnikovError {
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("the zero vector has no harmonic")]
    ZeroVector,
    #[error("harmonics need k2 >= 0, got {0}")]
    NegativeK2(IntVec2),
    #[error("fewer than two independent harmonics survive truncation")]
    TooFewHarmonics,
    #[error("quadrature needs T >= 40 and at least 10000 nodes")]
    QuadratureTooCoarse,
    #[error("bad phase specification {0:?} (expected zero or seed:N)")]
    BadPhases(String),
}

fn positive(name: &'static str, value: f64) -> Result<f64, MelnikovError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(MelnikovError::NonPositive { name, value })
    }
}

/// `ln sinh x` for `x > 0`, stable for large `x`.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 1.0 {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `ln(2π|a|/sinh(π|a|/2))`, tending to `ln 4` as `a → 0`.
fn ln_kernel(a: f64) -> f64 {
    let a = a.abs();
    if a < 1e-8 {
        4f64.ln()
    } else {
        (TAU * a).ln() - ln_sinh(PI * a / 2.0)
    }
}

/// One Fourier coefficient of the Melnikov potential, in log scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    /// `a_k = ⟨k, ω⟩/√ε`.
    pub a: f64,
    pub ln_abs: f64,
    /// `β_k = ρ|k|₁ + π|⟨k, ω⟩|/(2√ε)`.
    pub beta: f64,
    /// `ln α_k` with `α_k = 4π|⟨k, ω⟩|/√ε`, so that `L_k ≈ α_k e^{−β_k}`.
    pub ln_alpha: f64,
}

fn coefficient_from_dot(dot: f64, norm1: f64, eps: f64, rho: f64) -> Coefficient {
    let a = dot / eps.sqrt();
    Coefficient {
        a,
        ln_abs: ln_kernel(a) - rho * norm1,
        beta: rho * norm1 + PI * a.abs() / 2.0,
        ln_alpha: (2.0 * TAU * a.abs()).ln(),
    }
}

/// `L_k` for `ω = (1, Ω)`; `⟨k, ω⟩` is evaluated exactly before rounding.
pub fn harmonic_coeff(
    k: &IntVec2,
    omega: &QuadSurd,
    eps: f64,
    rho: f64,
) -> Result<Coefficient, MelnikovError> {
    positive("eps", eps)?;
    positive("rho", rho)?;
    if k.is_zero() {
        return Err(MelnikovError::ZeroVector);
    }
    if k.k2 < 0.into() {
        return Err(MelnikovError::NegativeK2(k.clone()));
    }
    let dot = k.dot_omega(omega).map_err(ResonanceError::from)?.to_f64();
    Ok(coefficient_from_dot(dot, k.norm1_f64(), eps, rho))
}

/// Trapezoidal value of `e^{−ρ|k|₁}·2∫_{−T}^{T} sech²t·cos(a t) dt`, the
/// coefficient of `cos(⟨k, θ⟩ − σ_k)` obtained from the subtracted
/// integrand `cos x₀(t) − 1 = −2 sech² t`. The integrand is analytic in a
/// strip, so the rule converges geometrically.
pub fn quadrature_oracle(
    k: &IntVec2,
    omega: &QuadSurd,
    eps: f64,
    rho: f64,
    t_max: f64,
    nodes: usize,
) -> Result<f64, MelnikovError> {
    positive("eps", eps)?;
    positive("rho", rho)?;
    if t_max < 40.0 || nodes < 10_000 {
        return Err(MelnikovError::QuadratureTooCoarse);
    }
    if k.is_zero() {
        return Err(MelnikovError::ZeroVector);
    }
    let dot = k.dot_omega(omega).map_err(ResonanceError::from)?.to_f64();
    let a = dot / eps.sqrt();
    let sech2 = |t: f64| {
        let s = 1.0 / t.cosh();
        s * s
    };
    if sech2(t_max) > 1e-18 {
        log::warn!("quadrature truncated at T = {t_max} with integrand {}", sech2(t_max));
    }
    let h = 2.0 * t_max / nodes as f64;
    let mut sum = 0.0;
    for i in 0..=nodes {
        let t = -t_max + h * i as f64;
        let w = if i == 0 || i == nodes { 0.5 } else { 1.0 };
        sum += w * sech2(t) * (a * t).cos();
    }
    Ok(2.0 * h * sum * (-rho * k.norm1_f64()).exp())
}

/// `2πa/sinh(πa/2)`, the closed form of the oracle integral.
pub fn kernel(a: f64) -> f64 {
    ln_kernel(a).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "seed")]
pub enum PhaseSpec {
    Zero,
    Seeded(u64),
}

impl PhaseSpec {
    /// `σ_k`; seeded phases depend only on `(seed, k)`.
    pub fn phase(&self, k: [i64; 2]) -> f64 {
        match *self {
            PhaseSpec::Zero => 0.0,
            PhaseSpec::Seeded(seed) => {
                let mix = seed
                    ^ (k[0] as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    ^ (k[1] as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
                ChaCha8Rng::seed_from_u64(mix).gen_range(0.0..TAU)
            }
        }
    }
}

impl std::str::FromStr for PhaseSpec {
    type Err = MelnikovError;
    fn from_str(s: &str) -> Result<Self, MelnikovError> {
        if s == "zero" {
            return Ok(PhaseSpec::Zero);
        }
        s.strip_prefix("seed:")
            .and_then(|n| n.parse().ok())
            .map(PhaseSpec::Seeded)
            .ok_or_else(|| MelnikovError::BadPhases(s.to_string()))
    }
}

impl std::fmt::Display for PhaseSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PhaseSpec::Zero => f.write_str("zero"),
            PhaseSpec::Seeded(s) => write!(f, "seed:{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub k: [i64; 2],
    pub ln_abs: f64,
    pub beta: f64,
    /// `L_k e^{−log_scale}`.
    pub amplitude: f64,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MelnikovModel {
    pub eps: f64,
    pub mu: f64,
    pub rho: f64,
    /// Exponent `p` when `μ = ε^p`.
    pub p: Option<f64>,
    pub phases: PhaseSpec,
    /// Sorted by `ln|L_k|`, descending.
    pub harmonics: Vec<Harmonic>,
    /// `ln L_{S₁}`, the largest coefficient.
    pub log_scale: f64,
    /// `β_{S₁}`.
    pub beta_ref: f64,
    /// Index in `harmonics` of the strongest harmonic independent of `S₁`.
    pub second: usize,
    /// Bound on `Σ L_k e^{−log_scale}` over the dropped harmonics.
    pub tail_bound: f64,
}

/// Relative floor: harmonics below `FLOOR · A_{S₂}` are dropped, and the
/// dropped tail sums to less than that.
pub const FLOOR: f64 = 1e-16;

/// `Σ_{n > K} (2n+1)·4e^{−ρn}`: `2n + 1` vectors with `k₂ ≥ 0` have
/// `|k|₁ = n`, and `L_k ≤ 4e^{−ρ|k|₁}`.
fn shell_tail(k_max: u64, rho: f64) -> f64 {
    let q = (-rho).exp();
    let n = (k_max + 1) as f64;
    // Σ_{m≥N} m qᵐ = qᴺ (N − (N−1)q)/(1−q)²,  Σ_{m≥N} qᵐ = qᴺ/(1−q)
    let qn = q.powf(n);
    4.0 * (2.0 * qn * (n - (n - 1.0) * q) / (1.0 - q).powi(2) + qn / (1.0 - q))
}

impl MelnikovModel {
    /// All harmonics with `k₂ ≥ 0` whose coefficient exceeds [`FLOOR`] times
    /// that of `S₂`, the strongest harmonic independent of the strongest.
    pub fn build(
        analysis: &ResonanceAnalysis,
        eps: f64,
        mu: f64,
        rho: f64,
        phases: PhaseSpec,
    ) -> Result<Self, MelnikovError> {
        positive("eps", eps)?;
        positive("mu", mu)?;
        positive("rho", rho)?;
        let omega = analysis.omega_f64();
        let mut k_max = 32u64;
        loop {
            // f64 screening; survivors are recomputed with exact ⟨k, ω⟩.
            let mut screened: Vec<([i64; 2], f64)> = Vec::new();
            let km = k_max as i64;
            for k2 in 0..=km {
                for k1 in -(km - k2)..=(km - k2) {
                    if k1 == 0 && k2 == 0 {
                        continue;
                    }
                    let dot = k1 as f64 + k2 as f64 * omega;
                    let norm = (k1.abs() + k2) as f64;
                    let c = coefficient_from_dot(dot, norm, eps, rho);
                    screened.push(([k1, k2], c.ln_abs));
                }
            }
            screened.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let top = screened[0].0;
            let second = screened
                .iter()
                .find(|(k, _)| (k[0] as i128) * (top[1] as i128) != (k[1] as i128) * (top[0] as i128))
                .ok_or(MelnikovError::TooFewHarmonics)?;
            let ln_floor = second.1 + FLOOR.ln();
            let tail = shell_tail(k_max, rho);
            if tail.ln() > ln_floor - 1.0 {
                k_max *= 2;
                continue;
            }
            // keep the shortest prefix whose complement (plus the shells
            // beyond k_max) sums below the floor
            let mut dropped = tail;
            let mut cut = screened.len();
            while cut > 0 {
                let next = dropped + screened[cut - 1].1.exp();
                if next.ln() >= ln_floor - 1.0 {
                    break;
                }
                dropped = next;
                cut -= 1;
            }
            let mut harmonics = Vec::with_capacity(cut);
            for &(k, _) in &screened[..cut] {
                let kv = IntVec2::new(k[0], k[1]);
                let c = harmonic_coeff(&kv, &analysis.omega, eps, rho)?;
                harmonics.push(Harmonic {
                    k,
                    ln_abs: c.ln_abs,
                    beta: c.beta,
                    amplitude: 0.0,
                    phase: phases.phase(k),
                });
            }
            harmonics.sort_by(|a, b| b.ln_abs.total_cmp(&a.ln_abs).then(a.k.cmp(&b.k)));
            let log_scale = harmonics[0].ln_abs;
            for h in &mut harmonics {
                h.amplitude = (h.ln_abs - log_scale).exp();
            }
            let s1 = harmonics[0].k;
            let second = harmonics
                .iter()
                .position(|h| !collinear(h.k, s1))
                .ok_or(MelnikovError::TooFewHarmonics)?;
            return Ok(MelnikovModel {
                eps,
                mu,
                rho,
                p: None,
                phases,
                beta_ref: harmonics[0].beta,
                log_scale,
                second,
                tail_bound: (dropped.ln() - log_scale).exp(),
                harmonics,
            });
        }
    }

    /// Model with `μ = ε^p`.
    pub fn build_power(
        analysis: &ResonanceAnalysis,
        eps: f64,
        p: f64,
        rho: f64,
        phases: PhaseSpec,
    ) -> Result<Self, MelnikovError> {
        positive("eps", eps)?;
        let mut m = Self::build(analysis, eps, eps.powf(p), rho, phases)?;
        m.p = Some(p);
        Ok(m)
    }

    pub fn s1(&self) -> [i64; 2] {
        self.harmonics[0].k
    }

    pub fn s2(&self) -> [i64; 2] {
        self.harmonics[self.second].k
    }

    /// The same model with `σ_k → σ_k + ⟨k, c⟩`, i.e. `L(θ) → L(θ − c)`.
    pub fn shifted(&self, c: [f64; 2]) -> Self {
        let mut m = self.clone();
        for h in &mut m.harmonics {
            h.phase = (h.phase + h.k[0] as f64 * c[0] + h.k[1] as f64 * c[1]).rem_euclid(TAU);
        }
        m
    }

    /// The model without its weakest harmonic.
    pub fn truncated(&self) -> Self {
        let mut m = self.clone();
        m.harmonics.pop();
        m
    }

    pub fn ln_mu(&self) -> f64 {
        self.mu.ln()
    }
}

pub(crate) fn collinear(a: [i64; 2], b: [i64; 2]) -> bool {
    (a[0] as i128) * (b[1] as i128) == (a[1] as i128) * (b[0] as i128)
}

/// `L̂`, its gradient and Hessian at `θ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

pub fn potential_eval(model: &MelnikovModel, theta: [f64; 2]) -> Evaluation {
    let mut e = Evaluation {
        value: 0.0,
        grad: [0.0; 2],
        hess: [[0.0; 2]; 2],
    };
    for h in &model.harmonics {
        let (k1, k2) = (h.k[0] as f64, h.k[1] as f64);
        let phi = k1 * theta[0] + k2 * theta[1] - h.phase;
        let (s, c) = phi.sin_cos();
        let a = h.amplitude;
        e.value += a * c;
        e.grad[0] -= a * s * k1;
        e.grad[1] -= a * s * k2;
        e.hess[0][0] -= a * c * k1 * k1;
        e.hess[0][1] -= a * c * k1 * k2;
        e.hess[1][1] -= a * c * k2 * k2;
    }
    e.hess[1][0] = e.hess[0][1];
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analysis(word: &str) -> ResonanceAnalysis {
        ResonanceAnalysis::new(&word.parse().unwrap()).unwrap()
    }

    #[test]
    fn kernel_limits() {
        assert!((kernel(0.0) - 4.0).abs() < 1e-15);
        assert!((kernel(1e-6) - 4.0).abs() < 1e-10);
        let a = 3.0f64;
        assert!((kernel(a) - TAU * a / (PI * a / 2.0).sinh()).abs() < 1e-14);
        // large argument: no overflow
        let big = ln_kernel(1e4);
        assert!((big - ((TAU * 1e4).ln() - PI * 1e4 / 2.0 + LN_2)).abs() < 1e-9);
    }

    #[test]
    fn large_argument_matches_alpha_beta_form() {
        let a = analysis("1,2");
        let k = IntVec2::new(-1, 1);
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let c = harmonic_coeff(&k, &a.omega, eps, 1.0).unwrap();
            let d = (c.ln_abs - (c.ln_alpha - c.beta)).abs();
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-100f64.max(1e-300));
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let a = analysis("1,2");
        let k = IntVec2::new(0, 1);
        let q = quadrature_oracle(&k, &a.omega, 1e-2, 1.0, 40.0, 20_000).unwrap();
        let c = harmonic_coeff(&k, &a.omega, 1e-2, 1.0).unwrap();
        assert!((q / c.ln_abs.exp() - 1.0).abs() < 1e-8, "{q} {}", c.ln_abs.exp());
        assert!(quadrature_oracle(&k, &a.omega, 1e-2, 1.0, 10.0, 20_000).is_err());
    }

    #[test]
    fn coefficient_rejects_bad_vectors() {
        let a = analysis("1,2");
        assert_eq!(
            harmonic_coeff(&IntVec2::new(0, 0), &a.omega, 1e-2, 1.0),
            Err(MelnikovError::ZeroVector)
        );
        assert!(matches!(
            harmonic_coeff(&IntVec2::new(1, -1), &a.omega, 1e-2, 1.0),
            Err(MelnikovError::NegativeK2(_))
        ));
    }

    #[test]
    fn phase_spec_parsing_and_determinism() {
        assert_eq!("zero".parse::<PhaseSpec>().unwrap(), PhaseSpec::Zero);
        let s: PhaseSpec = "seed:7".parse().unwrap();
        assert_eq!(s, PhaseSpec::Seeded(7));
        assert_eq!(s.to_string(), "seed:7");
        assert!("seed:x".parse::<PhaseSpec>().is_err());
        let p = s.phase([3, 4]);
        assert_eq!(p, PhaseSpec::Seeded(7).phase([3, 4]));
        assert!((0.0..TAU).contains(&p));
        assert_ne!(p, PhaseSpec::Seeded(8).phase([3, 4]));
    }

    #[test]
    fn model_is_sorted_and_normalized() {
        let a = analysis("1,2");
        let m = MelnikovModel::build(&a, 1e-5, 1e-20, 1.0, PhaseSpec::Zero).unwrap();
        assert!(m.harmonics.len() >= 2);
        assert_eq!(m.harmonics[0].amplitude, 1.0);
        for w in m.harmonics.windows(2) {
            assert!(w[0].ln_abs >= w[1].ln_abs);
        }
        for h in &m.harmonics {
            assert!(h.k[1] >= 0 && h.k != [0, 0]);
        }
        assert!(!collinear(m.s1(), m.s2()));
        assert!(m.tail_bound < FLOOR * m.harmonics[m.second].amplitude);
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let a = analysis("1,2");
        let m = MelnikovModel::build(&a, 1e-3, 1.0, 1.0, PhaseSpec::Seeded(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-5;
        for _ in 0..100 {
            let t = [rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)];
            let e = potential_eval(&m, t);
            let scale = e.grad[0].abs().max(e.grad[1].abs()).max(1e-3);
            let hscale = e.hess[0][0].abs().max(e.hess[1][1].abs()).max(1e-3);
            for i in 0..2 {
                let mut tp = t;
                let mut tm = t;
                tp[i] += h;
                tm[i] -= h;
                let (ep, em) = (potential_eval(&m, tp), potential_eval(&m, tm));
                let fd = (ep.value - em.value) / (2.0 * h);
                assert!((fd - e.grad[i]).abs() < 1e-6 * scale);
                for j in 0..2 {
                    let fd = (ep.grad[j] - em.grad[j]) / (2.0 * h);
                    assert!((fd - e.hess[i][j]).abs() < 1e-5 * hscale);
                }
            }
        }
    }

    #[test]
    fn gradient_has_zero_mean() {
        let a = analysis("1,2");
        let m = MelnikovModel::build(&a, 1e-3, 1.0, 1.0, PhaseSpec::Seeded(5)).unwrap();
        let n = 64;
        let mut mean = [0.0; 2];
        for i in 0..n {
            for j in 0..n {
                let t = [TAU * i as f64 / n as f64, TAU * j as f64 / n as f64];
                let g = potential_eval(&m, t).grad;
                mean[0] += g[0];
                mean[1] += g[1];
            }
        }
        let scale: f64 = m.harmonics.iter().map(|h| h.amplitude).sum();
        // harmonics with |k_i| ≥ 64 alias onto the mean
        if m.harmonics.iter().all(|h| h.k[0].abs() < 64 && h.k[1] < 64) {
            assert!(mean[0].abs() / ((n * n) as f64) < 1e-12 * scale);
            assert!(mean[1].abs() / ((n * n) as f64) < 1e-12 * scale);
        }
    }
}
