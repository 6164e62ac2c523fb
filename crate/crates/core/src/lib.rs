//! Simulation and numerical analysis of randomly weighted self-normalized
//! subordinators.
//!
//! A driftless subordinator `V_t` with Lévy tail `Λ̄` has each of its jumps
//! weighted by an independent draw from a weight law `F`, producing the
//! pair `(U_t, V_t)` and the ratio `T_t = U_t / V_t`. This crate provides
//!
//! - [`levy_measure`]: tail descriptors, generalized inverses, truncated
//!   moments and Laplace exponents for a family of built-in measures plus
//!   user-supplied step tails;
//! - [`weights`]: weight laws with the fractional-moment functionals that
//!   parameterize the nondegenerate limits;
//! - [`simulate`]: two exact Monte Carlo constructions of `(U_t, V_t)`
//!   (inverse-tail series and layered shells) with truncation accounting;
//! - [`limits`]: the limit CDFs/densities, the bivariate stable
//!   characteristic exponent, Fourier inversion and moment identities;
//! - [`diagnostics`]: grid scans classifying a measure into the asymptotic
//!   regimes;
//! - [`stats`]: Kolmogorov–Smirnov distances and related instruments.

pub mod diagnostics;
pub mod error;
pub mod levy_measure;
pub mod limits;
pub mod quad;
pub mod rng;
pub mod simulate;
pub mod stats;
pub mod weights;

pub use error::{Error, Result};
pub use levy_measure::{LevyMeasure, MeasureKind};
pub use limits::LimitLaw;
pub use simulate::{Engine, RatioBatch, SeriesConfig, ShellConfig, SimulationConfig};
pub use weights::{WeightKind, WeightLaw};
