//! Linearly coupled two-mode boson model of a condensate output coupler.
//!
//! A trapped mode `b₁` (the condensate) and an untrapped mode `b₂` are coupled
//! by a classical drive of frequency `ω(t)`:
//!
//! ```text
//! H = ω_a b₂†b₂ + ω_R [ b₂†b₁ e^{−i∫₀ᵗω} + h.c. ]      (ħ = 1)
//! ```
//!
//! The crate provides
//!
//! * [`model`]: scenario parameters, drive profiles and spectral data,
//! * [`closed_form`]: exact constant-drive solutions, the forced-oscillator
//!   (Bogoliubov) amplitude and the field expectation,
//! * [`dynamics`]: ODE engines for arbitrary sweeps, the Landau-Zener
//!   quadrature and the thermodynamic-limit scan,
//! * [`fock`]: a truncated Fock-space propagator with purity, Mandel Q,
//!   quadrature variance and product-state fidelity diagnostics.
//!
//! The crate is `no_std` and only needs `alloc`.
//!
//! ```
//! use coupler_core::closed_form::untrapped_population_exact;
//! use coupler_core::fock::{mean_number, propagate};
//! use coupler_core::{Complex64, FockBasis, Mode, ModelParams, OracleConfig, TwoModeFockVector};
//!
//! // ω_a = 2, Δ = 0.5, ω_R = 1, N_c = 4
//! let p = ModelParams::with_detuning(2.0, 0.5, 1.0, 4.0)?;
//! let n2 = untrapped_population_exact(&p, 1.2)?;
//!
//! let basis = FockBasis::for_mean_number(4.0);
//! let zero = Complex64::new(0.0, 0.0);
//! let psi0 = TwoModeFockVector::coherent_product(Complex64::new(2.0, 0.0), zero, basis, 1e-12)?;
//! let psi = propagate(&psi0, &p, 1.2, &OracleConfig::default())?;
//! assert!((mean_number(&psi, Mode::Untrapped) - n2).abs() < 1e-8);
//! # Ok::<(), coupler_core::Error>(())
//! ```

#![no_std]
// `!(x > 0.0)` is how NaN gets rejected along with the rest
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod closed_form;
pub mod dynamics;
mod error;
pub mod fock;
pub mod linalg;
pub mod model;
pub mod ode;

pub use closed_form::{FieldSample, TransferMatrix};
pub use dynamics::{ConvergenceScan, ThermoLimitSpec};
pub use error::{Error, Result};
pub use fock::{FockBasis, Mode, OracleConfig, TwoModeFockVector};
pub use model::{ModelParams, ProductCoherentState, SpectralData, SweepProfile, SweepTable};
pub use ode::{IntegrationConfig, Method, Trajectory};

pub use num_complex::Complex64;
