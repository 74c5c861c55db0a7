//! Analytic solutions for a constant drive frequency.
//!
//! Frame convention: transfer matrices are lab-frame Heisenberg maps,
//! `b(t) = M(t) b(0)`, so mode-2 rows carry the drive phase `e^{−iωt}` and
//! mode-1 rows do not. A coherent product `|α₁⟩⊗|α₂⟩` evolves to the product
//! with amplitudes `M(t)·(α₁, α₂)`.

use alloc::vec::Vec;
use core::ops::Mul;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::dynamics::ThermoLimitSpec;
use crate::error::{invalid, Error, Result};
use crate::model::{ModelParams, ProductCoherentState, SpectralData};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// 2×2 map of mode operators; `m11, m12` are the trapped-mode coefficients
/// `(α₁, α₂)`, `m21, m22` the untrapped ones `(β₁, β₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix {
        m11: Complex64::new(1.0, 0.0),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::new(1.0, 0.0),
    };

    pub fn from_rows(rows: [Complex64; 4]) -> Self {
        TransferMatrix { m11: rows[0], m12: rows[1], m21: rows[2], m22: rows[3] }
    }

    pub fn to_rows(&self) -> [Complex64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }

    pub fn adjoint(&self) -> Self {
        TransferMatrix { m11: self.m11.conj(), m12: self.m21.conj(), m21: self.m12.conj(), m22: self.m22.conj() }
    }

    /// `max |(M M† − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = *self * self.adjoint();
        let d = [p.m11 - 1.0, p.m12, p.m21, p.m22 - 1.0];
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Evolve coherent amplitudes: `(α₁, α₂) ↦ M·(α₁, α₂)`.
    pub fn apply(&self, state: &ProductCoherentState) -> ProductCoherentState {
        ProductCoherentState::new(
            self.m11 * state.alpha1 + self.m12 * state.alpha2,
            self.m21 * state.alpha1 + self.m22 * state.alpha2,
        )
    }

    /// Largest entrywise distance to another matrix.
    pub fn max_abs_diff(&self, other: &TransferMatrix) -> f64 {
        self.to_rows().iter().zip(other.to_rows().iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }
}

fn constant_drive(params: &ModelParams) -> Result<(f64, SpectralData)> {
    let omega = params.sweep.constant_omega().ok_or(Error::UnsupportedProfile)?;
    Ok((omega, SpectralData::new(params.omega_a - omega, params.omega_r)))
}

/// Exact lab-frame Heisenberg transfer matrix for a constant drive.
///
/// In the frame rotating with the drive the coefficients are
/// `e^{−iΔt/2}(cos Ωt ± i cos θ sin Ωt)` on the diagonal and
/// `−i sin θ e^{−iΔt/2} sin Ωt` off it; the second row then picks up `e^{−iωt}`.
/// This is the normal-mode (ω±) expansion rewritten in terms of Ω and θ,
/// which stays accurate for small ω_R.
pub fn transfer_matrix(params: &ModelParams, t: f64) -> Result<TransferMatrix> {
    let (omega, sd) = constant_drive(params)?;
    let envelope = Complex64::from_polar(1.0, -0.5 * sd.delta * t);
    let (s, c) = (sd.big_omega * t).sin_cos();
    let cos_theta = sd.cos_theta();
    let diag_plus = envelope * Complex64::new(c, s * cos_theta);
    let diag_minus = envelope * Complex64::new(c, -s * cos_theta);
    let off = envelope * (-I * sd.sin_theta() * s);
    let drive = Complex64::from_polar(1.0, -omega * t);
    Ok(TransferMatrix { m11: diag_plus, m12: off, m21: off * drive, m22: diag_minus * drive })
}

/// Coherent amplitudes at time `t` for the initial state `|√N_c⟩ ⊗ |0⟩`.
///
/// Equals `√N_c·(m11, m21)`; in closed form
/// `α₁ = √N_c e^{−iΔt/2}(cos Ωt + i sin Ωt cos θ)` and
/// `α₂ = −i √N_c e^{−iΔt/2} sin θ sin Ωt e^{−iωt}`.
pub fn evolve_product_state(params: &ModelParams, t: f64) -> Result<ProductCoherentState> {
    let m = transfer_matrix(params, t)?;
    let amp = params.n_c.sqrt();
    Ok(ProductCoherentState::new(m.m11 * amp, m.m21 * amp))
}

/// `N₂(t) = N_c sin²θ sin²(Ωt)`.
pub fn untrapped_population_exact(params: &ModelParams, t: f64) -> Result<f64> {
    let (_, sd) = constant_drive(params)?;
    let s = sd.sin_theta() * (sd.big_omega * t).sin();
    Ok(params.n_c * s * s)
}

/// `sin(x)/x` with the removable singularity filled in.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Coherent amplitude of the untrapped mode in the forced-oscillator
/// (Bogoliubov) model, started from vacuum:
/// `α̃(t) = (ω_R√N_c/Δ)(1 − e^{iΔt}) e^{−iω_a t}`.
///
/// Written as `−i ω_R√N_c t e^{iΔt/2} sinc(Δt/2) e^{−iω_a t}` so that Δ = 0 is
/// the continuous limit `−i ω_R√N_c t e^{−iω_a t}`.
pub fn fho_amplitude(params: &ModelParams, t: f64) -> Result<Complex64> {
    let (_, sd) = constant_drive(params)?;
    let coupling = params.omega_r * params.n_c.sqrt();
    let half = 0.5 * sd.delta * t;
    let phase = Complex64::from_polar(1.0, half - params.omega_a * t);
    Ok(-I * coupling * t * sinc(half) * phase)
}

/// `|α̃(t)|² = 2(ω_R²/Δ²) N_c (1 − cos Δt)`, or `N_c ω_R² t²` on resonance.
pub fn untrapped_population_bogoliubov(params: &ModelParams, t: f64) -> Result<f64> {
    let (_, sd) = constant_drive(params)?;
    let delta = sd.delta;
    if delta == 0.0 {
        return Ok(params.n_c * params.omega_r * params.omega_r * t * t);
    }
    // 1 − cos x = 2 sin²(x/2)
    let s = (0.5 * delta * t).sin();
    Ok(4.0 * params.omega_r * params.omega_r / (delta * delta) * params.n_c * s * s)
}

/// Stationary-phase estimate of the post-sweep amplitude,
/// `i g √(π n_c / (4 ω̇))`, evaluated literally.
///
/// The prefactor is not a full stationary-phase result; compare with
/// [`crate::dynamics::lz_transfer`], which integrates the chirped equation.
pub fn lz_asymptotic_amplitude(spec: &ThermoLimitSpec, rate: f64) -> Result<Complex64> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(invalid("rate", "sweep rate must be positive"));
    }
    let magnitude = spec.g * (core::f64::consts::PI * spec.n_c / (4.0 * rate)).sqrt();
    Ok(I * magnitude)
}

/// Evaluated field expectation at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub x: f64,
    pub t: f64,
    pub value: f64,
    pub k_modes: Vec<f64>,
}

/// Mean of the untrapped-mode field,
/// `Σ_k √(2 n_c/ω) sin θ sin(Ωt) sin(kx − Δt/2 − ωt)` with ħ = 1.
pub fn field_expectation(
    spectral: &SpectralData,
    omega: f64,
    n_c: f64,
    k_modes: &[f64],
    x: f64,
    t: f64,
) -> Result<FieldSample> {
    if !(omega > 0.0) {
        return Err(invalid("omega", "field prefactor needs a positive drive frequency"));
    }
    if k_modes.is_empty() {
        return Err(invalid("k_modes", "at least one wave number required"));
    }
    if n_c < 0.0 {
        return Err(invalid("n_c", "density must be >= 0"));
    }
    let envelope = (2.0 * n_c / omega).sqrt() * spectral.sin_theta() * (spectral.big_omega * t).sin();
    let value = k_modes.iter().map(|k| envelope * (k * x - 0.5 * spectral.delta * t - omega * t).sin()).sum();
    Ok(FieldSample { x, t, value, k_modes: k_modes.to_vec() })
}
