//! Resonances of the frequency vector `ω = (1, Ω)` for a quadratic `Ω`.
//!
//! Every integer vector `k` with `|⟨k, ω⟩| < 1/2` lies, up to sign, on exactly
//! one resonant sequence `s(j, n) = Uⁿ k⁰(j)`, `k⁰(j) = (−rint(jΩ), j)`, where
//! the seed satisfies `1/(2λ) < |⟨k⁰(j), ω⟩| < 1/2`. Along a sequence the
//! numerators `γ_k = |⟨k, ω⟩|·|k|₁` converge to a limit `γ*_j`; the smallest
//! limit defines the primary resonances.
//!
//! All identities here are checked in ℚ(√D) without rounding. Floating values
//! are derived from the exact ones at the end.

mod scan;
mod vector;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use scan::{brute_force_scan, partition_check, PartitionReport, ScanResult, SequenceMinimum};
pub use vector::{IntMat2, IntVec2};

use crate::quadfield::{squarefree_split, PeriodicCF, QuadError, QuadSurd};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error(transparent)]
    Field(#[from] QuadError),
    #[error("U is not hyperbolic (trace {trace}, det {det})")]
    NotHyperbolic { trace: BigInt, det: BigInt },
    #[error("eigenvalues of U live in Q(sqrt({found})), but Omega lives in Q(sqrt({expected}))")]
    FieldMismatch { expected: u64, found: u64 },
    #[error("U^T (1, Omega) is not proportional to (1, Omega)")]
    NotProportional,
    #[error("eigen-decomposition of U is degenerate")]
    Degenerate,
    #[error("the zero vector has no numerator")]
    ZeroVector,
    #[error("vector {0} is not resonant: |<k, omega>| >= 1/2")]
    NotResonant(IntVec2),
    #[error("limits of sequence j = {j} disagree with direct iteration (deviation {deviation:e})")]
    CrossCheck { j: u64, deviation: f64 },
    #[error("classification needs seeds up to j = {needed}, above the cap {cap}")]
    Uncertified { needed: u64, cap: u64 },
    #[error("no resonant sequence independent of the primary one below j = {0}")]
    NoSecondary(u64),
}

/// The matrix `U = (−1)^m A₁⁻¹⋯A_m⁻¹` with its eigen-data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UMatrix {
    pub matrix: IntMat2,
    /// `λ > 1`, the modulus of the expanding eigenvalue.
    pub lambda: QuadSurd,
    /// Sign with `Uᵀω = σ λ⁻¹ ω`.
    pub sigma: i8,
    /// The expanding eigenvalue itself (`±λ`).
    pub expanding: QuadSurd,
    /// The contracting eigenvalue `σ/λ`.
    pub contracting: QuadSurd,
}

/// Builds `U` from the period and verifies `Uᵀω = σλ⁻¹ω` exactly.
pub fn build_u(cf: &PeriodicCF) -> Result<UMatrix, ResonanceError> {
    let mut acc = IntMat2::identity();
    for &a in cf.period() {
        // A⁻¹ for A = [[a, 1], [1, 0]]
        let inv = IntMat2 {
            entries: [
                [BigInt::zero(), BigInt::one()],
                [BigInt::one(), -BigInt::from(a)],
            ],
        };
        acc = acc.mul(&inv);
    }
    if cf.len() % 2 == 1 {
        acc = acc.scale(&BigInt::from(-1));
    }
    let omega = cf.value();
    eigen_data(acc, &omega)
}

fn eigen_data(matrix: IntMat2, omega: &QuadSurd) -> Result<UMatrix, ResonanceError> {
    let d = omega.d();
    let trace = matrix.trace();
    let det = matrix.det();
    let disc = &trace * &trace - BigInt::from(4) * &det;
    let hyperbolic = disc.is_positive() && det.abs().is_one();
    let disc_u64 = disc.to_u64().filter(|_| hyperbolic);
    let Some(disc_u64) = disc_u64 else {
        return Err(ResonanceError::NotHyperbolic { trace, det });
    };
    let (f, kernel) = squarefree_split(disc_u64);
    if kernel == 1 {
        return Err(ResonanceError::NotHyperbolic { trace, det });
    }
    if kernel != d {
        return Err(ResonanceError::FieldMismatch {
            expected: d,
            found: kernel,
        });
    }
    let sgn = if trace.is_negative() { -1 } else { 1 };
    let expanding = QuadSurd::new(trace.clone(), BigInt::from(sgn * f as i64), 2, d)?;
    let det_s = QuadSurd::from_integer(det.clone(), d)?;
    let contracting = det_s.checked_div(&expanding)?;

    if !transposed_eigen_identity(&matrix, omega, &contracting)? {
        return Err(ResonanceError::NotProportional);
    }
    let sigma = if contracting.is_negative() { -1 } else { 1 };
    Ok(UMatrix {
        matrix,
        lambda: expanding.abs(),
        sigma,
        expanding,
        contracting,
    })
}

/// `γ_k = |⟨k, ω⟩|·|k|₁`, exactly.
pub fn gamma_k(k: &IntVec2, omega: &QuadSurd) -> Result<QuadSurd, ResonanceError> {
    if k.is_zero() {
        return Err(ResonanceError::ZeroVector);
    }
    Ok(k.dot_omega(omega)?.abs().scale(&k.norm1()))
}

/// Floating `γ_k`, accurate to a few ulps.
pub fn gamma_k_f64(k: &IntVec2, omega: &QuadSurd) -> Result<f64, ResonanceError> {
    Ok(gamma_k(k, omega)?.to_f64())
}

/// `k⁰(j) = (−rint(jΩ), j)`.
pub fn seed_vector(j: u64, omega: &QuadSurd) -> Result<IntVec2, QuadError> {
    let jb = BigInt::from(j);
    Ok(IntVec2::new(-omega.scale(&jb).rint()?, jb))
}

/// Whether `1/(2λ) < |x| < 1/2`, decided exactly.
fn in_window(x: &QuadSurd, lambda: &QuadSurd) -> Result<bool, QuadError> {
    let ax = x.abs();
    let half = QuadSurd::from_ratio(1, 2, x.d())?;
    let lower = half.checked_div(lambda)?;
    Ok(ax.compare(&lower)? == Ordering::Greater && ax.compare(&half)? == Ordering::Less)
}

/// Seeds `k⁰(j)`, `j = 1..=j_max`, that satisfy the primitivity window.
pub fn initial_vectors(
    omega: &QuadSurd,
    lambda: &QuadSurd,
    j_max: u64,
) -> Result<Vec<(u64, IntVec2)>, ResonanceError> {
    let mut out = Vec::new();
    for j in 1..=j_max {
        let k0 = seed_vector(j, omega)?;
        if in_window(&k0.dot_omega(omega)?, lambda)? {
            out.push((j, k0));
        }
    }
    Ok(out)
}

/// Right eigenvectors of `U`: `u = (−Ω, 1)` for the expanding eigenvalue
/// (so `⟨u, ω⟩ = 0`) and `w` for the contracting one.
#[derive(Clone, Debug)]
struct EigenBasis {
    u: [QuadSurd; 2],
    w: [QuadSurd; 2],
    det_uw: QuadSurd,
    w_dot_omega: QuadSurd,
    u_norm1: QuadSurd,
}

impl EigenBasis {
    fn new(umat: &UMatrix, omega: &QuadSurd) -> Result<Self, ResonanceError> {
        let d = omega.d();
        let int = |x: &BigInt| QuadSurd::from_integer(x.clone(), d);
        let m = &umat.matrix;
        let u = [-omega, QuadSurd::from_integer(1, d)?];
        // U u = ν u
        for i in 0..2 {
            let lhs = int(m.get(i, 0))?
                .checked_mul(&u[0])?
                .checked_add(&int(m.get(i, 1))?.checked_mul(&u[1])?)?;
            if lhs != umat.expanding.checked_mul(&u[i])? {
                return Err(ResonanceError::Degenerate);
            }
        }
        let tau = &umat.contracting;
        let w = if !m.get(0, 1).is_zero() {
            [int(m.get(0, 1))?, tau.checked_sub(&int(m.get(0, 0))?)?]
        } else {
            [tau.checked_sub(&int(m.get(1, 1))?)?, int(m.get(1, 0))?]
        };
        let det_uw = u[0].checked_mul(&w[1])?.checked_sub(&u[1].checked_mul(&w[0])?)?;
        if det_uw.is_zero() {
            return Err(ResonanceError::Degenerate);
        }
        let w_dot_omega = w[0].checked_add(&w[1].checked_mul(omega)?)?;
        let u_norm1 = u[0].abs().checked_add(&u[1].abs())?;
        Ok(EigenBasis {
            u,
            w,
            det_uw,
            w_dot_omega,
            u_norm1,
        })
    }

    /// Coordinates `(c, d)` of `k = c·u + d·w`.
    fn coordinates(&self, k: &IntVec2) -> Result<(QuadSurd, QuadSurd), QuadError> {
        let dd = self.det_uw.d();
        let k1 = QuadSurd::from_integer(k.k1.clone(), dd)?;
        let k2 = QuadSurd::from_integer(k.k2.clone(), dd)?;
        let c = k1
            .checked_mul(&self.w[1])?
            .checked_sub(&k2.checked_mul(&self.w[0])?)?
            .checked_div(&self.det_uw)?;
        let d = self.u[0]
            .checked_mul(&k2)?
            .checked_sub(&self.u[1].checked_mul(&k1)?)?
            .checked_div(&self.det_uw)?;
        Ok((c, d))
    }
}

/// Whether `Mᵀ(1, Ω) = τ(1, Ω)` holds exactly.
fn transposed_eigen_identity(
    matrix: &IntMat2,
    omega: &QuadSurd,
    tau: &QuadSurd,
) -> Result<bool, QuadError> {
    let d = omega.d();
    let t = matrix.transpose();
    let row = |i: usize| -> Result<QuadSurd, QuadError> {
        QuadSurd::from_integer(t.get(i, 0).clone(), d)?.checked_add(&omega.scale(t.get(i, 1)))
    };
    Ok(row(0)? == *tau && row(1)? == tau.checked_mul(omega)?)
}

impl UMatrix {
    /// Re-checks `Uᵀ(1, Ω) = σλ⁻¹(1, Ω)` and `det U = (−1)^m` exactly.
    pub fn verify(&self, cf: &PeriodicCF) -> Result<bool, ResonanceError> {
        let omega = cf.value();
        let tau = QuadSurd::from_integer(self.sigma as i64, omega.d())?.checked_div(&self.lambda)?;
        let det = if cf.len().is_multiple_of(2) { 1 } else { -1 };
        Ok(transposed_eigen_identity(&self.matrix, &omega, &tau)?
            && self.matrix.det() == BigInt::from(det))
    }
}

/// Exact limits of a resonant sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceLimits {
    /// `K_j` with `|s(j, n)|₁ = K_j λⁿ + O(λ⁻ⁿ)`.
    pub growth: QuadSurd,
    /// `γ*_j = lim γ_{s(j, n)}`.
    pub gamma_star: QuadSurd,
}

/// `K_j = |c|·|u|₁` and `γ*_j = K_j·|d ⟨w, ω⟩|` from the eigen-coordinates of
/// the seed, cross-validated against `s(j, 20)`.
pub fn sequence_limits(
    j: u64,
    seed: &IntVec2,
    umat: &UMatrix,
    omega: &QuadSurd,
) -> Result<SequenceLimits, ResonanceError> {
    let basis = EigenBasis::new(umat, omega)?;
    let limits = limits_in_basis(&basis, seed)?;
    cross_check(j, seed, umat, omega, &limits, 20)?;
    Ok(limits)
}

fn limits_in_basis(basis: &EigenBasis, seed: &IntVec2) -> Result<SequenceLimits, QuadError> {
    let (c, d) = basis.coordinates(seed)?;
    let growth = c.abs().checked_mul(&basis.u_norm1)?;
    let gamma_star = growth.checked_mul(&d.checked_mul(&basis.w_dot_omega)?.abs())?;
    Ok(SequenceLimits { growth, gamma_star })
}

fn cross_check(
    j: u64,
    seed: &IntVec2,
    umat: &UMatrix,
    omega: &QuadSurd,
    limits: &SequenceLimits,
    n: i32,
) -> Result<(), ResonanceError> {
    let mut s = seed.clone();
    for _ in 0..n {
        s = umat.matrix.apply(&s);
    }
    let lambda = umat.lambda.to_f64();
    let tol = lambda.powi(-2 * n + 2) * limits.gamma_star.to_f64().max(1.0);
    let dev_gamma = gamma_k(&s, omega)?
        .checked_sub(&limits.gamma_star)?
        .to_f64()
        .abs();
    // |s|₁ λ⁻ⁿ − K, exactly
    let lambda_n = pow(&umat.lambda, n as u32)?;
    let dev_growth = QuadSurd::from_integer(s.norm1(), omega.d())?
        .checked_div(&lambda_n)?
        .checked_sub(&limits.growth)?
        .to_f64()
        .abs();
    let growth_tol = lambda.powi(-2 * n + 2) * limits.growth.to_f64().max(1.0);
    if dev_gamma > tol || dev_growth > growth_tol {
        return Err(ResonanceError::CrossCheck {
            j,
            deviation: dev_gamma.max(dev_growth),
        });
    }
    Ok(())
}

fn pow(x: &QuadSurd, n: u32) -> Result<QuadSurd, QuadError> {
    let mut acc = QuadSurd::from_integer(1, x.d())?;
    for _ in 0..n {
        acc = acc.checked_mul(x)?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Primary,
    MainSecondary,
    Secondary,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResonantSequence {
    pub j: u64,
    pub k0: IntVec2,
    /// `K_j`.
    pub growth: f64,
    /// `γ*_j`.
    pub gamma_star: f64,
    pub limits: SequenceLimits,
    pub role: Role,
    /// Seed index of the primitive sequence this one is a multiple of
    /// (`family == j` for primitive seeds).
    pub family: u64,
}

/// Position of a resonant vector: `k = sign · Uⁿ k⁰(j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Located {
    pub j: u64,
    pub n: u64,
    pub sign: i8,
}

/// Full resonance analysis of one quadratic frequency ratio.
#[derive(Clone, Debug)]
pub struct ResonanceAnalysis {
    pub cf: PeriodicCF,
    pub omega: QuadSurd,
    pub umat: UMatrix,
    u_inv: IntMat2,
    basis: EigenBasis,
    /// Admitted seeds `j ≤ j_scanned`, ordered by `j`.
    pub sequences: Vec<ResonantSequence>,
    pub j0: u64,
    pub j1: u64,
    /// `γ* = γ*_{j₀}`, exactly.
    pub gamma_star: QuadSurd,
    /// Every admitted `j` beyond this bound has `γ*_j > γ*_{j₁}`.
    pub j_certified: u64,
    omega_f64: f64,
    lambda_f64: f64,
    /// `|κ|`, the `u`-coordinate of `(1, 0)`; enters the seed bound.
    kappa: f64,
}

/// Default cap on the number of seeds examined by [`ResonanceAnalysis::new`].
pub const DEFAULT_J_CAP: u64 = 100_000;

impl ResonanceAnalysis {
    pub fn new(cf: &PeriodicCF) -> Result<Self, ResonanceError> {
        Self::with_cap(cf, DEFAULT_J_CAP)
    }

    /// Runs the classification, examining at most `j_cap` seeds.
    ///
    /// The scan is certified: for an admitted seed `γ*_j = K_j |⟨k⁰(j), ω⟩|`
    /// with `|⟨k⁰(j), ω⟩| > 1/(2λ)` and `K_j = |c_j|·(1 + Ω)`, where
    /// `c_j ≥ j − |κ|/2` and `κ` is the `u`-coordinate of `(1, 0)`. Seeds
    /// past `J = ⌈2λγ*_{j₁}/(1 + Ω) + |κ|/2⌉` therefore cannot beat `j₁`.
    pub fn with_cap(cf: &PeriodicCF, j_cap: u64) -> Result<Self, ResonanceError> {
        let omega = cf.value();
        let umat = build_u(cf)?;
        let u_inv = umat
            .matrix
            .inverse_unimodular()
            .ok_or(ResonanceError::Degenerate)?;
        let basis = EigenBasis::new(&umat, &omega)?;
        let lambda_f64 = umat.lambda.to_f64();
        let omega_f64 = omega.to_f64();
        let (kappa, _) = basis.coordinates(&IntVec2::new(1, 0))?;
        let kappa = kappa.abs().to_f64();

        let mut analysis = ResonanceAnalysis {
            cf: cf.clone(),
            omega,
            umat,
            u_inv,
            basis,
            sequences: Vec::new(),
            j0: 0,
            j1: 0,
            gamma_star: QuadSurd::from_integer(0, 2)?,
            j_certified: 0,
            omega_f64,
            lambda_f64,
            kappa,
        };

        let mut j_max = 16u64.min(j_cap);
        let mut scanned = 0u64;
        loop {
            for (j, k0) in initial_vectors(&analysis.omega, &analysis.umat.lambda, j_max)?
                .into_iter()
                .filter(|(j, _)| *j > scanned)
            {
                let limits = sequence_limits(j, &k0, &analysis.umat, &analysis.omega)?;
                let family = analysis.family_of(&k0)?;
                analysis.sequences.push(ResonantSequence {
                    j,
                    k0,
                    growth: limits.growth.to_f64(),
                    gamma_star: limits.gamma_star.to_f64(),
                    limits,
                    role: Role::Secondary,
                    family,
                });
            }
            scanned = j_max;
            let (i0, i1) = match analysis.best_two(j_max) {
                Ok(pair) => pair,
                Err(ResonanceError::NoSecondary(_)) if j_max < j_cap => {
                    j_max = (2 * j_max).min(j_cap);
                    continue;
                }
                Err(ResonanceError::NoSecondary(_)) => {
                    return Err(ResonanceError::Uncertified {
                        needed: j_max + 1,
                        cap: j_cap,
                    })
                }
                Err(e) => return Err(e),
            };
            let second = analysis.sequences[i1].gamma_star;
            let needed = analysis.seed_bound(second);
            if needed <= j_max {
                let (j0, j1) = (analysis.sequences[i0].j, analysis.sequences[i1].j);
                analysis.j0 = j0;
                analysis.j1 = j1;
                analysis.gamma_star = analysis.sequences[i0].limits.gamma_star.clone();
                analysis.j_certified = needed;
                for s in &mut analysis.sequences {
                    s.role = if s.j == j0 {
                        Role::Primary
                    } else if s.j == j1 {
                        Role::MainSecondary
                    } else {
                        Role::Secondary
                    };
                }
                return Ok(analysis);
            }
            if needed > j_cap {
                return Err(ResonanceError::Uncertified {
                    needed,
                    cap: j_cap,
                });
            }
            j_max = needed;
        }
    }

    /// Indices of the primary sequence and of the best sequence from a
    /// different family.
    fn best_two(&self, j_max: u64) -> Result<(usize, usize), ResonanceError> {
        let cmp = |a: &&ResonantSequence, b: &&ResonantSequence| {
            a.limits
                .gamma_star
                .compare(&b.limits.gamma_star)
                .unwrap_or(Ordering::Equal)
                .then(a.j.cmp(&b.j))
        };
        let primary = self
            .sequences
            .iter()
            .min_by(cmp)
            .ok_or(ResonanceError::NoSecondary(j_max))?;
        let secondary = self
            .sequences
            .iter()
            .filter(|s| s.family != primary.family)
            .min_by(cmp)
            .ok_or(ResonanceError::NoSecondary(j_max))?;
        let idx = |j: u64| self.sequences.iter().position(|s| s.j == j).unwrap();
        Ok((idx(primary.j), idx(secondary.j)))
    }

    /// Seed of the primitive sequence containing the primitive part of `k0`.
    fn family_of(&self, k0: &IntVec2) -> Result<u64, ResonanceError> {
        let g = k0.k1.gcd(&k0.k2);
        if g.is_one() {
            return Ok(k0.k2.to_u64().unwrap_or(0));
        }
        let prim = IntVec2::new(&k0.k1 / &g, &k0.k2 / &g);
        Ok(self.locate(&prim)?.j)
    }

    /// Seeds past this index have `γ*_j` above `gamma_limit`.
    pub fn seed_bound(&self, gamma_limit: f64) -> u64 {
        (2.0 * self.lambda_f64 * gamma_limit / (1.0 + self.omega_f64) + self.kappa / 2.0)
            .ceil()
            .max(1.0) as u64
    }

    /// All resonant sequences with `γ*_j ≤ gamma_limit`, ordered by `j`.
    /// Sequences beyond the classified range are tagged secondary.
    pub fn sequences_below(&self, gamma_limit: f64) -> Result<Vec<ResonantSequence>, ResonanceError> {
        let bound = self.seed_bound(gamma_limit);
        let mut out = Vec::new();
        for (j, k0) in initial_vectors(&self.omega, &self.umat.lambda, bound)? {
            let seq = match self.sequence(j) {
                Some(s) => s.clone(),
                None => {
                    let limits = self.limits_of(&k0)?;
                    ResonantSequence {
                        j,
                        growth: limits.growth.to_f64(),
                        gamma_star: limits.gamma_star.to_f64(),
                        family: self.family_of(&k0)?,
                        k0,
                        limits,
                        role: Role::Secondary,
                    }
                }
            };
            if seq.gamma_star <= gamma_limit {
                out.push(seq);
            }
        }
        Ok(out)
    }

    pub fn omega_f64(&self) -> f64 {
        self.omega_f64
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda_f64
    }

    pub fn gamma_star_f64(&self) -> f64 {
        self.gamma_star.to_f64()
    }

    pub fn sequence(&self, j: u64) -> Option<&ResonantSequence> {
        self.sequences.iter().find(|s| s.j == j)
    }

    pub fn primary(&self) -> &ResonantSequence {
        self.sequence(self.j0).expect("primary sequence present")
    }

    pub fn main_secondary(&self) -> &ResonantSequence {
        self.sequence(self.j1).expect("main secondary sequence present")
    }

    /// `Uⁿ k⁰(j)` for any integer `n` (negative `n` applies `U⁻¹`).
    pub fn member(&self, k0: &IntVec2, n: i64) -> IntVec2 {
        let m = if n >= 0 { &self.umat.matrix } else { &self.u_inv };
        let mut k = k0.clone();
        for _ in 0..n.unsigned_abs() {
            k = m.apply(&k);
        }
        k
    }

    pub fn gamma(&self, k: &IntVec2) -> Result<f64, ResonanceError> {
        gamma_k_f64(k, &self.omega)
    }

    /// `γ̃_k = γ_k / γ*`.
    pub fn gamma_tilde(&self, k: &IntVec2) -> Result<f64, ResonanceError> {
        Ok(gamma_k(k, &self.omega)?
            .checked_div(&self.gamma_star)?
            .to_f64())
    }

    /// Finds `(j, n, sign)` with `k = sign · Uⁿ k⁰(j)` by walking backwards
    /// with `U⁻¹` until the seed window is reached.
    pub fn locate(&self, k: &IntVec2) -> Result<Located, ResonanceError> {
        let dot = k.dot_omega(&self.omega)?;
        let half = QuadSurd::from_ratio(1, 2, self.omega.d())?;
        if k.is_zero() || dot.abs().compare(&half)? != Ordering::Less {
            return Err(ResonanceError::NotResonant(k.clone()));
        }
        let threshold = 0.5 / self.lambda_f64;
        let mut cur = k.clone();
        let mut n = 0u64;
        loop {
            let (a, b) = cur.to_f64();
            let approx = (a + b * self.omega_f64).abs();
            let reached = if (approx - threshold).abs() > 1e-9 * threshold.max(approx) {
                approx > threshold
            } else {
                in_window(&cur.dot_omega(&self.omega)?, &self.umat.lambda)?
            };
            if reached {
                break;
            }
            cur = self.u_inv.apply(&cur);
            n += 1;
        }
        let sign: i8 = if cur.k2.is_negative() { -1 } else { 1 };
        let seed = cur.sign_normalized();
        let j = seed.k2.to_u64().ok_or(ResonanceError::Degenerate)?;
        debug_assert_eq!(seed, seed_vector(j, &self.omega)?);
        Ok(Located { j, n, sign })
    }

    /// Limits of the sequence seeded at `k0`, without the iteration check.
    pub fn limits_of(&self, k0: &IntVec2) -> Result<SequenceLimits, ResonanceError> {
        Ok(limits_in_basis(&self.basis, k0)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf(s: &str) -> PeriodicCF {
        s.parse().unwrap()
    }

    #[test]
    fn u_for_golden_mean() {
        let u = build_u(&cf("1")).unwrap();
        assert_eq!(u.matrix, IntMat2::new(0, -1, -1, 1));
        assert_eq!(u.lambda, QuadSurd::new(1, 1, 2, 5).unwrap());
        assert_eq!(u.sigma, -1);
    }

    #[test]
    fn u_for_one_two() {
        let u = build_u(&cf("1,2")).unwrap();
        assert_eq!(u.matrix, IntMat2::new(1, -2, -1, 3));
        assert_eq!(u.lambda, QuadSurd::new(2, 1, 1, 3).unwrap());
        assert_eq!(u.matrix.det(), BigInt::from(1));
        assert_eq!(u.sigma, 1);
    }

    #[test]
    fn non_proportional_matrix_is_rejected() {
        let omega = cf("1,2").value();
        // hyperbolic over Q(√3) but unrelated to Ω
        let err = eigen_data(IntMat2::new(2, 1, 3, 2), &omega).unwrap_err();
        assert_eq!(err, ResonanceError::NotProportional);
        let err = eigen_data(IntMat2::new(1, 1, 1, 0), &omega).unwrap_err();
        assert!(matches!(err, ResonanceError::FieldMismatch { .. }));
    }

    #[test]
    fn gamma_examples() {
        let omega = cf("1,2").value();
        let g = gamma_k(&IntVec2::new(-1, 1), &omega).unwrap();
        assert_eq!(g, QuadSurd::new(4, -2, 1, 3).unwrap());
        let golden = cf("1").value();
        let g = gamma_k(&IntVec2::new(-1, 1), &golden).unwrap();
        assert_eq!(g, QuadSurd::new(3, -1, 1, 5).unwrap());
        assert!((g.to_f64() - 0.763_932_022_500_210_3).abs() < 1e-15);
        let g = gamma_k(&IntVec2::new(1, 0), &golden).unwrap();
        assert_eq!(g, QuadSurd::from_integer(1, 5).unwrap());
        assert_eq!(
            gamma_k(&IntVec2::new(0, 0), &golden),
            Err(ResonanceError::ZeroVector)
        );
    }

    #[test]
    fn seed_window() {
        let word = cf("1,2");
        let u = build_u(&word).unwrap();
        let seeds = initial_vectors(&word.value(), &u.lambda, 4).unwrap();
        let js: Vec<u64> = seeds.iter().map(|(j, _)| *j).collect();
        assert!(js.contains(&1));
        assert!(!js.contains(&4));
        // k⁰(4) = (−3, 4) = U k⁰(1)
        assert_eq!(seed_vector(4, &word.value()).unwrap(), IntVec2::new(-3, 4));
        assert_eq!(u.matrix.apply(&IntVec2::new(-1, 1)), IntVec2::new(-3, 4));

        let golden = cf("1");
        let u = build_u(&golden).unwrap();
        let seeds = initial_vectors(&golden.value(), &u.lambda, 1).unwrap();
        assert_eq!(seeds, vec![(1, IntVec2::new(-1, 1))]);
    }

    #[test]
    fn limits_of_first_sequences() {
        let word = cf("1,2");
        let omega = word.value();
        let u = build_u(&word).unwrap();
        let lim = sequence_limits(1, &IntVec2::new(-1, 1), &u, &omega).unwrap();
        assert_eq!(lim.gamma_star, QuadSurd::from_ratio(1, 2, 3).unwrap());

        let golden = cf("1");
        let omega = golden.value();
        let u = build_u(&golden).unwrap();
        let lim = sequence_limits(1, &IntVec2::new(-1, 1), &u, &omega).unwrap();
        // (1 + √5)/(2√5) = (5 + √5)/10
        assert_eq!(lim.gamma_star, QuadSurd::new(5, 1, 10, 5).unwrap());
    }

    #[test]
    fn classification_of_small_words() {
        let a = ResonanceAnalysis::new(&cf("1,2")).unwrap();
        assert_eq!(a.j0, 1);
        assert_eq!(a.gamma_star, QuadSurd::from_ratio(1, 2, 3).unwrap());
        assert_ne!(a.j1, a.j0);
        assert_eq!(a.main_secondary().role, Role::MainSecondary);
        assert!(a.main_secondary().gamma_star > a.primary().gamma_star);

        let g = ResonanceAnalysis::new(&cf("1")).unwrap();
        assert_eq!(g.j0, 1);
        assert!((g.gamma_star_f64() - 0.723_606_797_749_979).abs() < 1e-14);
        // primary γ̃ tends to one
        let k = g.member(&g.primary().k0, 30);
        assert!((g.gamma_tilde(&k).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uncertified_cap_is_reported() {
        let err = ResonanceAnalysis::with_cap(&cf("1,12"), 1).unwrap_err();
        assert!(matches!(err, ResonanceError::Uncertified { .. }));
    }

    #[test]
    fn locate_walks_back_to_seed() {
        let a = ResonanceAnalysis::new(&cf("1,2")).unwrap();
        let k0 = a.primary().k0.clone();
        let k = a.member(&k0, 7);
        let loc = a.locate(&k).unwrap();
        assert_eq!((loc.j, loc.n, loc.sign), (a.j0, 7, 1));
        let loc = a.locate(&-&k).unwrap();
        assert_eq!(loc.sign, -1);
        assert!(a.locate(&IntVec2::new(1, 0)).is_err());
    }
}
