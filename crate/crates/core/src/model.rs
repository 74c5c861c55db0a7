//! Scenario parameters, drive-frequency profiles and the derived spectral
//! quantities shared by every engine.
//!
//! Units are natural (ħ = 1): frequencies in rad per time unit, times in an
//! arbitrary but consistent unit. The detuning convention is
//! `Δ = ω_a − ω(t)`, positive when the level splitting exceeds the drive.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::error::{invalid, Error, Result};

/// Drive frequency ω(t) of the coupling pulse.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepProfile {
    Constant {
        omega: f64,
    },
    /// `ω(t) = omega_at_t0 + rate·(t − t0)`.
    LinearChirp {
        rate: f64,
        t0: f64,
        omega_at_t0: f64,
    },
    Tabulated(SweepTable),
}

/// Sampled drive frequency with linear interpolation between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    samples: Vec<(f64, f64)>,
}

impl SweepTable {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid("samples", "need at least 2 samples"));
        }
        if samples.iter().any(|(t, w)| !t.is_finite() || !w.is_finite()) {
            return Err(invalid("samples", "non-finite sample"));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(invalid("samples", "times must be strictly increasing"));
        }
        Ok(SweepTable { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn start(&self) -> f64 {
        self.samples[0].0
    }

    pub fn end(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    fn check(&self, t: f64) -> Result<()> {
        if t < self.start() || t > self.end() || t.is_nan() {
            return Err(Error::OutOfDomain { t, start: self.start(), end: self.end() });
        }
        Ok(())
    }

    /// Index `i` of the segment `[t_i, t_{i+1}]` containing `t`.
    fn segment(&self, t: f64) -> usize {
        let idx = self.samples.partition_point(|&(ts, _)| ts <= t);
        idx.saturating_sub(1).min(self.samples.len() - 2)
    }

    fn value(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (t0, w0) = self.samples[i];
        let (t1, w1) = self.samples[i + 1];
        w0 + (w1 - w0) * (t - t0) / (t1 - t0)
    }

    /// Trapezoid integral of the interpolant from `a` to `b`, `a <= b`, both in range.
    fn integral(&self, a: f64, b: f64) -> f64 {
        let mut acc = 0.0;
        let mut lo = a;
        let mut i = self.segment(a);
        while lo < b {
            let hi = self.samples[i + 1].0.min(b);
            acc += 0.5 * (self.value(lo) + self.value(hi)) * (hi - lo);
            lo = hi;
            i += 1;
            if i + 1 >= self.samples.len() {
                break;
            }
        }
        acc
    }
}

impl SweepProfile {
    pub fn constant(omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(invalid("omega", "must be finite"));
        }
        Ok(SweepProfile::Constant { omega })
    }

    /// Linear chirp crossing `omega_at_t0` at `t0`. Only upward sweeps (`rate > 0`) are accepted.
    pub fn linear_chirp(rate: f64, t0: f64, omega_at_t0: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(invalid("rate", "chirp rate must be positive and finite"));
        }
        if !t0.is_finite() || !omega_at_t0.is_finite() {
            return Err(invalid("t0", "must be finite"));
        }
        Ok(SweepProfile::LinearChirp { rate, t0, omega_at_t0 })
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        SweepTable::new(samples).map(SweepProfile::Tabulated)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SweepProfile::Constant { omega } => Self::constant(*omega).map(drop),
            SweepProfile::LinearChirp { rate, t0, omega_at_t0 } => {
                Self::linear_chirp(*rate, *t0, *omega_at_t0).map(drop)
            }
            SweepProfile::Tabulated(table) => SweepTable::new(table.samples.clone()).map(drop),
        }
    }

    /// Instantaneous drive frequency.
    pub fn omega(&self, t: f64) -> Result<f64> {
        match self {
            SweepProfile::Constant { omega } => Ok(*omega),
            SweepProfile::LinearChirp { rate, t0, omega_at_t0 } => Ok(omega_at_t0 + rate * (t - t0)),
            SweepProfile::Tabulated(table) => {
                table.check(t)?;
                Ok(table.value(t))
            }
        }
    }

    /// Accumulated drive phase `∫₀ᵗ ω(τ) dτ`.
    pub fn phase_integral(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(invalid("t", "phase integral is defined for t >= 0"));
        }
        match self {
            SweepProfile::Constant { omega } => Ok(omega * t),
            SweepProfile::LinearChirp { rate, t0, omega_at_t0 } => {
                Ok(omega_at_t0 * t + 0.5 * rate * ((t - t0) * (t - t0) - t0 * t0))
            }
            SweepProfile::Tabulated(table) => {
                table.check(0.0)?;
                table.check(t)?;
                Ok(table.integral(0.0, t))
            }
        }
    }

    /// `Some(ω)` for a constant drive.
    pub fn constant_omega(&self) -> Option<f64> {
        match self {
            SweepProfile::Constant { omega } => Some(*omega),
            _ => None,
        }
    }
}

/// Parameters of one scenario of the two-level boson model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Splitting of the untrapped level over the trapped one.
    pub omega_a: f64,
    /// Coupling (Rabi) strength.
    pub omega_r: f64,
    pub sweep: SweepProfile,
    /// Mean condensate number `N_c = |α|²` of the initial coherent state.
    pub n_c: f64,
}

impl ModelParams {
    pub fn new(omega_a: f64, omega_r: f64, sweep: SweepProfile, n_c: f64) -> Result<Self> {
        let params = ModelParams { omega_a, omega_r, sweep, n_c };
        params.validate()?;
        Ok(params)
    }

    /// Constant drive chosen so that `ω_a − ω = detuning`.
    pub fn with_detuning(omega_a: f64, detuning: f64, omega_r: f64, n_c: f64) -> Result<Self> {
        Self::new(omega_a, omega_r, SweepProfile::constant(omega_a - detuning)?, n_c)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.omega_a.is_finite() || self.omega_a < 0.0 {
            return Err(invalid("omega_a", "must be finite and >= 0"));
        }
        if !self.omega_r.is_finite() || self.omega_r < 0.0 {
            return Err(invalid("omega_r", "must be finite and >= 0"));
        }
        if !self.n_c.is_finite() || self.n_c < 0.0 {
            return Err(invalid("n_c", "must be finite and >= 0"));
        }
        self.sweep.validate()
    }

    /// Detuning `Δ(t) = ω_a − ω(t)`.
    pub fn detuning(&self, t: f64) -> Result<f64> {
        Ok(self.omega_a - self.sweep.omega(t)?)
    }

    /// Spectral data of the constant-drive problem.
    pub fn spectral_data(&self) -> Result<SpectralData> {
        let omega = self.sweep.constant_omega().ok_or(Error::UnsupportedProfile)?;
        Ok(SpectralData::new(self.omega_a - omega, self.omega_r))
    }

    /// Initial state `|√N_c⟩ ⊗ |0⟩`.
    pub fn initial_state(&self) -> ProductCoherentState {
        ProductCoherentState::new(Complex64::new(self.n_c.sqrt(), 0.0), Complex64::new(0.0, 0.0))
    }
}

/// Detuning, mixing angle, Rabi frequency and normal-mode frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralData {
    pub delta: f64,
    /// Mixing angle with `tan θ = 2ω_R/Δ`, taken in `[0, π]` so that `sin θ ≥ 0`.
    pub theta: f64,
    /// `Ω = √(Δ²/4 + ω_R²)`.
    pub big_omega: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
}

impl SpectralData {
    pub fn new(delta: f64, omega_r: f64) -> Self {
        let big_omega = (0.5 * delta).hypot(omega_r);
        let theta = if delta == 0.0 { FRAC_PI_2 } else { (2.0 * omega_r).atan2(delta) };
        // take the root without cancellation first, recover the other from ω₊ω₋ = −ω_R²
        let (omega_plus, omega_minus) = if big_omega == 0.0 {
            (0.0, 0.0)
        } else if delta >= 0.0 {
            let wp = 0.5 * delta + big_omega;
            (wp, -omega_r * omega_r / wp)
        } else {
            let wm = 0.5 * delta - big_omega;
            (-omega_r * omega_r / wm, wm)
        };
        SpectralData { delta, theta, big_omega, omega_plus, omega_minus }
    }

    pub fn sin_theta(&self) -> f64 {
        self.theta.sin()
    }

    pub fn cos_theta(&self) -> f64 {
        self.theta.cos()
    }
}

/// Pair of coherent amplitudes for the trapped (1) and untrapped (2) modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductCoherentState {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
}

impl ProductCoherentState {
    pub fn new(alpha1: Complex64, alpha2: Complex64) -> Self {
        ProductCoherentState { alpha1, alpha2 }
    }

    pub fn n1(&self) -> f64 {
        self.alpha1.norm_sqr()
    }

    pub fn n2(&self) -> f64 {
        self.alpha2.norm_sqr()
    }

    pub fn total(&self) -> f64 {
        self.n1() + self.n2()
    }
}
