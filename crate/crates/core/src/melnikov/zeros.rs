//! Critical points of `L̂`, transversality and maximal splitting.
//!
//! The second dominant harmonic can be 10⁻²⁰ times weaker than the first, so
//! Newton's method in `θ` would face a Hessian with condition number beyond
//! double precision. All iterations run in `ψ = (⟨S₁, θ⟩, ⟨S₂, θ⟩)`, where
//! each harmonic reads `a_k ψ₁ + b_k ψ₂` and the two gradient components are
//! accumulated separately.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MelnikovModel;

/// `ψ`-coordinates attached to a model.
struct Basis {
    delta: i64,
    adj: [[i64; 2]; 2],
    /// `(a_k, b_k)` per harmonic: `k = a_k S₁ + b_k S₂`.
    coords: Vec<[f64; 2]>,
    /// `M Mᵀ` with `M` the matrix of rows `S₁`, `S₂`.
    gram: [[f64; 2]; 2],
    /// Representatives `2πc` of the `|Δ|` cells covering the torus.
    offsets: Vec<[f64; 2]>,
}

fn cross(x: [i64; 2], y: [i64; 2]) -> i64 {
    x[0] * y[1] - x[1] * y[0]
}

impl Basis {
    fn new(model: &MelnikovModel) -> Self {
        let (s1, s2) = (model.s1(), model.s2());
        let delta = cross(s1, s2);
        let d = delta as f64;
        let coords = model
            .harmonics
            .iter()
            .map(|h| [cross(h.k, s2) as f64 / d, cross(s1, h.k) as f64 / d])
            .collect();
        let dot = |x: [i64; 2], y: [i64; 2]| (x[0] * y[0] + x[1] * y[1]) as f64;
        let gram = [[dot(s1, s1), dot(s1, s2)], [dot(s1, s2), dot(s2, s2)]];
        let adj = [[s2[1], -s1[1]], [-s2[0], s1[0]]];
        let n = delta.abs();
        let mut keys = Vec::new();
        let mut offsets = Vec::new();
        'outer: for i in 0..n {
            for j in 0..n {
                let key = [
                    (adj[0][0] * i + adj[0][1] * j).rem_euclid(n),
                    (adj[1][0] * i + adj[1][1] * j).rem_euclid(n),
                ];
                if !keys.contains(&key) {
                    keys.push(key);
                    offsets.push([TAU * i as f64, TAU * j as f64]);
                    if offsets.len() as i64 == n {
                        break 'outer;
                    }
                }
            }
        }
        Basis {
            delta,
            adj,
            coords,
            gram,
            offsets,
        }
    }

    /// `θ = M⁻¹ψ mod 2π`.
    fn theta(&self, psi: [f64; 2]) -> [f64; 2] {
        let d = self.delta as f64;
        let a = &self.adj;
        [
            ((a[0][0] as f64 * psi[0] + a[0][1] as f64 * psi[1]) / d).rem_euclid(TAU),
            ((a[1][0] as f64 * psi[0] + a[1][1] as f64 * psi[1]) / d).rem_euclid(TAU),
        ]
    }
}

/// Gradient and Hessian of `L̂` in `ψ`, over the first `n` harmonics.
fn eval_psi(model: &MelnikovModel, basis: &Basis, psi: [f64; 2], n: usize) -> ([f64; 2], [[f64; 2]; 2]) {
    let mut g = [0.0; 2];
    let mut h = [[0.0; 2]; 2];
    for (harm, c) in model.harmonics[..n].iter().zip(&basis.coords) {
        let phi = c[0] * psi[0] + c[1] * psi[1] - harm.phase;
        let (s, co) = phi.sin_cos();
        let (as_, ac) = (harm.amplitude * s, harm.amplitude * co);
        g[0] -= as_ * c[0];
        g[1] -= as_ * c[1];
        h[0][0] -= ac * c[0] * c[0];
        h[0][1] -= ac * c[0] * c[1];
        h[1][1] -= ac * c[1] * c[1];
    }
    h[1][0] = h[0][1];
    (g, h)
}

fn newton_step(g: [f64; 2], h: [[f64; 2]; 2]) -> Option<[f64; 2]> {
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        (-g[0] * h[1][1] + h[0][1] * g[1]) / det,
        (-g[1] * h[0][0] + h[1][0] * g[0]) / det,
    ])
}

/// Runs Newton from `psi`; returns the limit when the last step is below `tol`.
fn newton(
    model: &MelnikovModel,
    basis: &Basis,
    mut psi: [f64; 2],
    n: usize,
    iters: usize,
    tol: f64,
) -> Option<[f64; 2]> {
    let mut last = f64::INFINITY;
    for _ in 0..iters {
        let (g, h) = eval_psi(model, basis, psi, n);
        let mut step = newton_step(g, h)?;
        let size = step[0].abs().max(step[1].abs());
        if size > 0.5 {
            step = [step[0] * 0.5 / size, step[1] * 0.5 / size];
        }
        psi = [psi[0] + step[0], psi[1] + step[1]];
        last = size;
        if size < tol {
            break;
        }
    }
    (last < tol * 1e3).then_some(psi)
}

fn torus_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = |x: f64, y: f64| {
        let r = (x - y).rem_euclid(TAU);
        r.min(TAU - r)
    };
    d(a[0], b[0]).max(d(a[1], b[1]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub theta: [f64; 2],
    pub psi: [f64; 2],
    /// Hessian eigenvalues of `L̂` in `θ`, smaller modulus first.
    pub eigenvalues: [f64; 2],
    pub det_sign: i8,
    pub simple: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub s1: [i64; 2],
    pub s2: [i64; 2],
    /// `det(S₁, S₂)`.
    pub delta: i64,
    pub zeros: Vec<Zero>,
    /// Smallest `|eigenvalue|` over the zeros, for `L̂`.
    pub eigen_min: f64,
    pub index_sum: i64,
}

impl ZeroReport {
    /// Exactly four simple zeros with vanishing index sum.
    pub fn is_nondegenerate(&self) -> bool {
        self.zeros.len() == 4 && self.zeros.iter().all(|z| z.simple) && self.index_sum == 0
    }
}

const GRID: usize = 64;

/// All critical points of `L̂` on `T²`.
///
/// Newton runs from a 64×64 grid in `ψ` on every cell covering the torus,
/// first on the harmonics above `10⁻⁸ A_{S₂}`, then on the full model.
pub fn find_zeros(model: &MelnikovModel) -> ZeroReport {
    let basis = Basis::new(model);
    let a2 = model.harmonics[model.second].amplitude;
    let reduced = model
        .harmonics
        .iter()
        .take_while(|h| h.amplitude >= 1e-8 * a2)
        .count()
        .max(model.second + 1);
    let full = model.harmonics.len();

    let seeds: Vec<[f64; 2]> = basis
        .offsets
        .iter()
        .flat_map(|o| {
            (0..GRID * GRID).map(move |i| {
                let step = TAU / GRID as f64;
                [
                    o[0] + step * ((i / GRID) as f64 + 0.5),
                    o[1] + step * ((i % GRID) as f64 + 0.5),
                ]
            })
        })
        .collect();
    let coarse: Vec<[f64; 2]> = seeds
        .par_iter()
        .filter_map(|&s| newton(model, &basis, s, reduced, 50, 1e-13))
        .collect();
    let mut distinct: Vec<([f64; 2], [f64; 2])> = Vec::new();
    for psi in coarse {
        let th = basis.theta(psi);
        if distinct.iter().all(|(_, t)| torus_distance(*t, th) > 1e-6) {
            distinct.push((psi, th));
        }
    }
    let mut zeros: Vec<Zero> = Vec::new();
    for (psi, _) in distinct {
        let Some(psi) = newton(model, &basis, psi, full, 10, 1e-15) else {
            continue;
        };
        let theta = basis.theta(psi);
        if zeros.iter().any(|z| torus_distance(z.theta, theta) < 1e-8) {
            continue;
        }
        zeros.push(classify(model, &basis, psi, theta));
    }
    zeros.sort_by(|a, b| {
        a.theta[0]
            .total_cmp(&b.theta[0])
            .then(a.theta[1].total_cmp(&b.theta[1]))
    });
    let eigen_min = zeros
        .iter()
        .map(|z| z.eigenvalues[0].abs())
        .fold(f64::INFINITY, f64::min);
    let index_sum = zeros.iter().map(|z| z.det_sign as i64).sum();
    ZeroReport {
        s1: model.s1(),
        s2: model.s2(),
        delta: basis.delta,
        zeros,
        eigen_min,
        index_sum,
    }
}

fn classify(model: &MelnikovModel, basis: &Basis, psi: [f64; 2], theta: [f64; 2]) -> Zero {
    let (_, h) = eval_psi(model, basis, psi, model.harmonics.len());
    let det_psi = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let (mut s11, mut s22) = (0.0, 0.0);
    for (harm, c) in model.harmonics.iter().zip(&basis.coords) {
        s11 += harm.amplitude * c[0] * c[0];
        s22 += harm.amplitude * c[1] * c[1];
    }
    let simple = det_psi.abs() > 1e-10 * s11 * s22;
    let d = basis.delta as f64;
    let det = d * d * det_psi;
    let gm = &basis.gram;
    let trace = h[0][0] * gm[0][0] + 2.0 * h[0][1] * gm[0][1] + h[1][1] * gm[1][1];
    let disc = (0.25 * trace * trace - det).max(0.0).sqrt();
    let big = 0.5 * trace + trace.signum() * disc;
    let small = if big != 0.0 { det / big } else { 0.0 };
    Zero {
        theta,
        psi,
        eigenvalues: [small, big],
        det_sign: det_psi.signum() as i8,
        simple,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transversality {
    /// `min |eigenvalue|` of the Hessian of `L̂` at the zeros.
    pub eigen_min: f64,
    /// `ln m* = ln μ + log_scale + ln eigen_min`.
    pub ln_m_star: f64,
    pub per_zero: Vec<[f64; 2]>,
}

/// `m*`, the smallest eigenvalue modulus of `μ·Hess L` over the zeros.
pub fn transversality(model: &MelnikovModel, report: &ZeroReport) -> Transversality {
    Transversality {
        eigen_min: report.eigen_min,
        ln_m_star: model.ln_mu() + model.log_scale + report.eigen_min.ln(),
        per_zero: report.zeros.iter().map(|z| z.eigenvalues).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxSplitting {
    /// `max |∇L̂|`.
    pub max_grad: f64,
    pub theta: [f64; 2],
    /// `ln(μ max|∇L|)`.
    pub ln_max: f64,
}

/// `|∇_θ L̂|² = g_ψᵀ (M Mᵀ) g_ψ`.
fn grad_norm2(model: &MelnikovModel, basis: &Basis, psi: [f64; 2]) -> f64 {
    let mut g = [0.0; 2];
    for (harm, c) in model.harmonics.iter().zip(&basis.coords) {
        let s = (c[0] * psi[0] + c[1] * psi[1] - harm.phase).sin() * harm.amplitude;
        g[0] -= s * c[0];
        g[1] -= s * c[1];
    }
    let m = &basis.gram;
    g[0] * g[0] * m[0][0] + 2.0 * g[0] * g[1] * m[0][1] + g[1] * g[1] * m[1][1]
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-10 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// Maximizes `|∇L̂|` over a 128² grid per cell, refining the best points by
/// alternating one-dimensional golden-section searches in `ψ`.
pub fn max_splitting(model: &MelnikovModel) -> MaxSplitting {
    const N: usize = 128;
    let basis = Basis::new(model);
    let step = TAU / N as f64;
    let mut grid: Vec<(f64, [f64; 2])> = basis
        .offsets
        .par_iter()
        .flat_map_iter(|o| {
            let basis = &basis;
            (0..N * N).map(move |i| {
                let psi = [o[0] + step * (i / N) as f64, o[1] + step * (i % N) as f64];
                (grad_norm2(model, basis, psi), psi)
            })
        })
        .collect();
    grid.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = (f64::NEG_INFINITY, [0.0; 2]);
    for &(_, start) in grid.iter().take(4) {
        let mut psi = start;
        for _ in 0..4 {
            psi[0] = golden_max(|x| grad_norm2(model, &basis, [x, psi[1]]), psi[0] - step, psi[0] + step);
            psi[1] = golden_max(|y| grad_norm2(model, &basis, [psi[0], y]), psi[1] - step, psi[1] + step);
        }
        let f = grad_norm2(model, &basis, psi);
        if f > best.0 {
            best = (f, psi);
        }
    }
    let max_grad = best.0.sqrt();
    MaxSplitting {
        max_grad,
        theta: basis.theta(best.1),
        ln_max: model.ln_mu() + model.log_scale + max_grad.ln(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{potential_eval, Harmonic, PhaseSpec};
    use super::*;
    use crate::ResonanceAnalysis;

    fn two_harmonics(a2: f64) -> MelnikovModel {
        let harm = |k: [i64; 2], amplitude: f64| Harmonic {
            k,
            ln_abs: amplitude.ln(),
            beta: 0.0,
            amplitude,
            phase: 0.0,
        };
        MelnikovModel {
            eps: 1e-4,
            mu: 1.0,
            rho: 1.0,
            p: None,
            phases: PhaseSpec::Zero,
            harmonics: vec![harm([-3, 4], 1.0), harm([1, 1], a2)],
            log_scale: 0.0,
            beta_ref: 0.0,
            second: 1,
            tail_bound: 0.0,
        }
    }

    #[test]
    fn two_harmonic_zeros_are_lattice_points() {
        let m = two_harmonics(0.3);
        let r = find_zeros(&m);
        assert_eq!(r.delta.abs(), 7);
        // ⟨S₁,θ⟩, ⟨S₂,θ⟩ ∈ {0, π}: 4|Δ| critical points
        assert_eq!(r.zeros.len(), 28);
        assert_eq!(r.index_sum, 0);
        for z in &r.zeros {
            let g = potential_eval(&m, z.theta).grad;
            assert!(g[0].abs() + g[1].abs() < 1e-10);
        }
    }

    #[test]
    fn single_dominant_maximum() {
        let m = two_harmonics(1e-200);
        let ms = max_splitting(&m);
        assert!((ms.max_grad - 5.0).abs() < 1e-12, "{}", ms.max_grad);
    }

    #[test]
    fn four_zeros_with_zero_phases() {
        let a = ResonanceAnalysis::new(&"1,2".parse().unwrap()).unwrap();
        let m = MelnikovModel::build_power(&a, 1e-5, 4.0, 1.0, PhaseSpec::Zero).unwrap();
        let r = find_zeros(&m);
        assert!(r.is_nondegenerate(), "{r:?}");
        for z in &r.zeros {
            for c in z.theta {
                let d = c.min((c - std::f64::consts::PI).abs()).min(TAU - c);
                assert!(d < 1e-9, "{:?}", z.theta);
            }
        }
    }

    #[test]
    fn phase_shift_translates_zeros() {
        let a = ResonanceAnalysis::new(&"1,2".parse().unwrap()).unwrap();
        let m = MelnikovModel::build_power(&a, 1e-5, 4.0, 1.0, PhaseSpec::Seeded(1)).unwrap();
        let c = [0.4, 1.3];
        let shifted = m.shifted(c);
        let (r0, r1) = (find_zeros(&m), find_zeros(&shifted));
        assert!(r0.is_nondegenerate() && r1.is_nondegenerate());
        assert!((r0.eigen_min / r1.eigen_min - 1.0).abs() < 1e-10);
        for z in &r0.zeros {
            let moved = [z.theta[0] + c[0], z.theta[1] + c[1]];
            assert!(r1.zeros.iter().any(|w| torus_distance(w.theta, moved) < 1e-8));
        }
        let (a0, a1) = (max_splitting(&m), max_splitting(&shifted));
        assert!((a0.ln_max - a1.ln_max).abs() < 1e-10);
    }

    #[test]
    fn m_star_is_linear_in_mu() {
        let a = ResonanceAnalysis::new(&"1,2".parse().unwrap()).unwrap();
        let m1 = MelnikovModel::build(&a, 1e-5, 1e-20, 1.0, PhaseSpec::Zero).unwrap();
        let m2 = MelnikovModel::build(&a, 1e-5, 3e-20, 1.0, PhaseSpec::Zero).unwrap();
        let t1 = transversality(&m1, &find_zeros(&m1));
        let t2 = transversality(&m2, &find_zeros(&m2));
        assert!((t2.ln_m_star - t1.ln_m_star - 3f64.ln()).abs() < 1e-12);
    }
}
