//! Numerical engines for arbitrary drive profiles.
//!
//! Both engines integrate in the lab frame with the explicit drive phase
//! `e^{iφ(t)}`, `φ = ∫₀ᵗ ω`, so every [`SweepProfile`] goes through the same path.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::closed_form::TransferMatrix;
use crate::error::{invalid, Error, Result};
use crate::model::{ModelParams, SweepProfile};
use crate::ode::{self, IntegrationConfig, Trajectory};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Thermodynamic-limit parameterization: `N_c, V → ∞` at fixed density,
/// with `ω_R = g/√V` so that `ω_R√N_c = g√n_c` stays finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoLimitSpec {
    pub g: f64,
    /// Number density.
    pub n_c: f64,
    pub volume: Option<f64>,
}

impl ThermoLimitSpec {
    pub fn new(g: f64, n_c: f64, volume: Option<f64>) -> Result<Self> {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(invalid("g", "must be finite and >= 0"));
        }
        if !(n_c >= 0.0) || !n_c.is_finite() {
            return Err(invalid("n_c", "density must be finite and >= 0"));
        }
        if let Some(v) = volume {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid("volume", "must be positive and finite"));
            }
        }
        Ok(ThermoLimitSpec { g, n_c, volume })
    }

    /// The finite combination `g√n_c`.
    pub fn coupling(&self) -> f64 {
        self.g * self.n_c.sqrt()
    }

    pub fn condensate_number(&self) -> Option<f64> {
        self.volume.map(|v| self.n_c * v)
    }

    pub fn omega_r(&self) -> Option<f64> {
        self.volume.map(|v| self.g / v.sqrt())
    }
}

/// Heisenberg transfer matrix `M(t)` with `b(t) = M(t) b(0)` on every grid time.
///
/// Solves `ḃ₁ = −iω_R e^{iφ} b₂`, `ḃ₂ = −iω_a b₂ − iω_R e^{−iφ} b₁` for the
/// coefficient rows. The grid must start at 0, where `M = I`.
pub fn integrate_transfer_matrix(
    params: &ModelParams,
    t_grid: &[f64],
    cfg: &IntegrationConfig,
) -> Result<Trajectory<TransferMatrix>> {
    params.validate()?;
    ode::check_grid(t_grid)?;
    if t_grid[0] != 0.0 {
        return Err(invalid("t_grid", "transfer-matrix grid must start at t = 0"));
    }
    let (omega_a, omega_r) = (params.omega_a, params.omega_r);
    let sweep = &params.sweep;
    let rhs = |t: f64, m: &[Complex64; 4]| -> Result<[Complex64; 4]> {
        let drive = Complex64::from_polar(1.0, sweep.phase_integral(t)?);
        let up = -I * omega_r * drive;
        let down = -I * omega_r * drive.conj();
        let [m11, m12, m21, m22] = *m;
        Ok([up * m21, up * m22, down * m11 - I * omega_a * m21, down * m12 - I * omega_a * m22])
    };
    let traj = ode::integrate(rhs, t_grid, TransferMatrix::IDENTITY.to_rows(), cfg)?;
    Ok(Trajectory { times: traj.times, values: traj.values.into_iter().map(TransferMatrix::from_rows).collect() })
}

/// Forced-oscillator amplitude `dα̃/dt = −iω_a α̃ − i·coupling·e^{−iφ(t)}`,
/// with `coupling = ω_R√N_c` (or `g√n_c`), starting from vacuum at `t_grid[0]`.
pub fn integrate_fho_amplitude(
    coupling: f64,
    omega_a: f64,
    sweep: &SweepProfile,
    t_grid: &[f64],
    cfg: &IntegrationConfig,
) -> Result<Trajectory<Complex64>> {
    if !coupling.is_finite() || !omega_a.is_finite() {
        return Err(invalid("coupling", "must be finite"));
    }
    sweep.validate()?;
    let rhs = |t: f64, a: &[Complex64; 1]| -> Result<[Complex64; 1]> {
        let drive = Complex64::from_polar(1.0, -sweep.phase_integral(t)?);
        Ok([-I * omega_a * a[0] - I * coupling * drive])
    };
    let traj = ode::integrate(rhs, t_grid, [Complex64::new(0.0, 0.0)], cfg)?;
    Ok(Trajectory { times: traj.times, values: traj.values.into_iter().map(|[a]| a).collect() })
}

/// Minimum edge detuning, in units of `√rate`, for [`lz_transfer`] windows.
pub const LZ_MIN_EDGE: f64 = 20.0;

/// Post-sweep untrapped amplitude for a linear chirp through resonance,
/// by direct integration of the forced-oscillator equation.
///
/// `window = (t_start, t_end)` is measured from the resonance crossing, so it
/// must satisfy `t_start < 0 < t_end` with `rate·|t_edge| ≥ 20√rate` at both
/// edges. The drive is switched on at `t_start` with the oscillator in vacuum.
/// The level splitting is placed at the largest edge detuning so `ω(t) ≥ 0`
/// over the window; the result has the free `e^{−iω_a t}` winding removed.
pub fn lz_transfer(
    spec: &ThermoLimitSpec,
    rate: f64,
    window: (f64, f64),
    cfg: &IntegrationConfig,
) -> Result<Complex64> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(invalid("rate", "sweep rate must be positive"));
    }
    let (t_start, t_end) = window;
    if !(t_start < 0.0 && t_end > 0.0) {
        return Err(invalid("window", "window must bracket the resonance crossing"));
    }
    let required = LZ_MIN_EDGE * rate.sqrt();
    let edge = (rate * -t_start).min(rate * t_end);
    if edge < required {
        return Err(Error::WindowTooNarrow { required_detuning: required, actual_detuning: edge });
    }
    let omega_a = rate * (-t_start).max(t_end);
    let duration = t_end - t_start;
    let sweep = SweepProfile::linear_chirp(rate, -t_start, omega_a)?;
    let traj = integrate_fho_amplitude(spec.coupling(), omega_a, &sweep, &[0.0, duration], cfg)?;
    let (_, amp) = traj.last().expect("grid has two points");
    Ok(amp * Complex64::from_polar(1.0, omega_a * duration))
}

/// Settings of a Bogoliubov-versus-exact comparison at fixed `ω_R√N_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceScan {
    /// `ω_R√N_c = g√n_c`, held fixed across the scan.
    pub coupling: f64,
    pub detuning: f64,
    pub omega_a: f64,
    pub horizon: f64,
    /// Number of intervals of the uniform comparison grid on `[0, horizon]`.
    pub samples: usize,
}

/// For each `N_c`, the largest gap `| |α̃(t)|² − N₂(t) | / N_c` over the horizon,
/// where `N₂ = N_c |m21|²` comes from the integrated exact model and `α̃` from
/// the integrated forced oscillator, both with `ω_R = coupling/√N_c`.
pub fn bogoliubov_convergence_scan(
    scan: &ConvergenceScan,
    n_c_grid: &[f64],
    cfg: &IntegrationConfig,
) -> Result<Vec<(f64, f64)>> {
    if n_c_grid.is_empty() || n_c_grid.iter().any(|n| !(*n > 0.0) || !n.is_finite()) {
        return Err(invalid("n_c_grid", "condensate numbers must be positive"));
    }
    if n_c_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("n_c_grid", "must be strictly increasing"));
    }
    if !(scan.horizon >= 0.0) || !scan.horizon.is_finite() {
        return Err(invalid("horizon", "must be finite and >= 0"));
    }
    let grid: Vec<f64> = if scan.horizon == 0.0 {
        alloc::vec![0.0]
    } else {
        let n = scan.samples.max(1);
        (0..=n).map(|k| scan.horizon * k as f64 / n as f64).collect()
    };
    n_c_grid.iter().map(|&n_c| bogoliubov_gap(scan, n_c, &grid, cfg).map(|err| (n_c, err))).collect()
}

/// Single grid point of [`bogoliubov_convergence_scan`].
pub fn bogoliubov_gap(scan: &ConvergenceScan, n_c: f64, grid: &[f64], cfg: &IntegrationConfig) -> Result<f64> {
    let omega_r = scan.coupling / n_c.sqrt();
    let params = ModelParams::with_detuning(scan.omega_a, scan.detuning, omega_r, n_c)?;
    let exact = integrate_transfer_matrix(&params, grid, cfg)?;
    let bogo = integrate_fho_amplitude(scan.coupling, params.omega_a, &params.sweep, grid, cfg)?;
    Ok(exact
        .values
        .iter()
        .zip(bogo.values.iter())
        .map(|(m, a)| (a.norm_sqr() - n_c * m.m21.norm_sqr()).abs() / n_c)
        .fold(0.0, f64::max))
}
