//! Resonance structure of quadratic frequency ratios and first-order
//! estimates for the exponentially small splitting of separatrices of a
//! two-dimensional whiskered torus with fast frequencies `(1, Ω)/√ε`.
//!
//! The crate is organized bottom-up:
//!
//! - [`quadfield`]: exact arithmetic in ℚ(√D) and continued fractions.
//! - [`resonance`]: the matrix `U`, resonant sequences `s(j, n)`, their limits
//!   and the primary / main secondary classification.
//! - [`splitting`]: the exponent functions `g_k(ε)`, the envelopes `h₁`, `h₂`,
//!   dominant harmonics and transition points.
//! - [`melnikov`]: the Melnikov potential from its Fourier coefficients, its
//!   homoclinic zeros, transversality and maximal splitting.
//! - [`cli`]: report types, file writers and the command implementations
//!   behind the `quadsplit` binary.

pub mod cli;
pub mod melnikov;
pub mod quadfield;
pub mod resonance;
pub mod splitting;

pub use quadfield::{PeriodicCF, QuadSurd};
pub use resonance::{IntVec2, ResonanceAnalysis};
