//! Finite free convolution, Jacobi-matrix spectral tools and the freezing
//! (β → ∞) regime of beta Dyson Brownian motions and beta Laguerre processes.
//!
//! The crate is organised bottom-up:
//!
//! * [`elemsym`]: root tuples, elementary symmetric polynomials, real-rooted solving.
//! * [`finfree`]: the finite free convolution ⊞_N, its Fourier-type transform,
//!   classical zeros and the Markov–Krein lift.
//! * [`orthopoly`]: Jacobi matrices, Sturm bisection, spectral measures and
//!   dual orthogonal polynomials.
//! * [`dynamics`]: exact polynomial-in-time limits of e_k and the closed-form
//!   convolution expressions for the limiting particle positions.
//! * [`stochastic`]: Euler–Maruyama simulators and tridiagonal β-ensemble samplers.
//! * [`stats`]: Monte Carlo estimators used to check the limit theorems.

pub mod dynamics;
pub mod elemsym;
pub mod error;
pub mod finfree;
pub mod orthopoly;
pub mod poly;
pub mod stats;
pub mod stochastic;

pub use elemsym::{MonicPolynomial, RootTuple};
pub use error::{Error, Result};
pub use orthopoly::{JacobiMatrix, OrthogonalSystem, SpectralMeasure};
