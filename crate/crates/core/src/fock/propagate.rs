use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use super::{FockBasis, OracleConfig, TwoModeFockVector};
use crate::error::{invalid, Error, Result};
use crate::linalg::SymmetricEigen;
use crate::model::{ModelParams, SweepProfile};

const NORM_DRIFT_LIMIT: f64 = 1e-8;

/// Tridiagonal rotating-frame Hamiltonian of one sector, states `|N−j, j⟩`:
/// `Δ j + κ₁(N−j)(N−j−1) + κ₂ j(j−1)` on the diagonal and
/// `ω_R √((j+1)(N−j))` coupling `j ↔ j+1`.
struct SectorHamiltonian {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SectorHamiltonian {
    fn new(n_total: usize, delta: f64, omega_r: f64, cfg: &OracleConfig) -> Self {
        let diag = (0..=n_total)
            .map(|j| {
                let n1 = (n_total - j) as f64;
                let n2 = j as f64;
                delta * n2 + cfg.kerr_kappa1 * n1 * (n1 - 1.0) + cfg.kerr_kappa2 * n2 * (n2 - 1.0)
            })
            .collect();
        let off = (0..n_total).map(|j| omega_r * (((j + 1) * (n_total - j)) as f64).sqrt()).collect();
        SectorHamiltonian { diag, off }
    }

    fn dense(&self) -> Vec<f64> {
        let n = self.diag.len();
        let mut a = alloc::vec![0.0; n * n];
        for j in 0..n {
            a[j * n + j] = self.diag[j];
        }
        for (j, o) in self.off.iter().enumerate() {
            a[j * n + j + 1] = *o;
            a[(j + 1) * n + j] = *o;
        }
        a
    }

    /// Gershgorin bound on the spectral radius.
    fn bound(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|j| {
                let left = if j > 0 { self.off[j - 1].abs() } else { 0.0 };
                let right = if j + 1 < n { self.off[j].abs() } else { 0.0 };
                self.diag[j].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.diag.len();
        for j in 0..n {
            let mut acc = x[j] * self.diag[j];
            if j > 0 {
                acc += x[j - 1] * self.off[j - 1];
            }
            if j + 1 < n {
                acc += x[j + 1] * self.off[j];
            }
            out[j] = acc;
        }
    }

    /// `x ← exp(−i H h) x` by a Taylor series on substeps with `‖H‖ h_sub ≤ 1/2`.
    fn exp_apply(&self, x: &mut [Complex64], h: f64) {
        let bound = self.bound();
        let substeps = ((bound * h.abs()) / 0.5).ceil().max(1.0) as usize;
        let hs = h / substeps as f64;
        let n = x.len();
        let mut term = alloc::vec![Complex64::new(0.0, 0.0); n];
        let mut next = alloc::vec![Complex64::new(0.0, 0.0); n];
        for _ in 0..substeps {
            term.copy_from_slice(x);
            let scale: f64 = x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for k in 1..=60 {
                self.apply(&term, &mut next);
                let factor = Complex64::new(0.0, -hs / k as f64);
                let mut size = 0.0;
                for (t, nx) in term.iter_mut().zip(next.iter()) {
                    *t = nx * factor;
                    size += t.norm_sqr();
                }
                for (xi, t) in x.iter_mut().zip(term.iter()) {
                    *xi += t;
                }
                if size.sqrt() <= 1e-18 * scale.max(1e-300) {
                    break;
                }
            }
        }
    }
}

/// Exact propagator for a constant drive: per-sector spectral decomposition
/// of the rotating-frame Hamiltonian, with lab phases `e^{−iωt n₂}` restored.
#[derive(Debug, Clone)]
pub struct SectorPropagator {
    basis: FockBasis,
    omega: f64,
    sectors: Vec<SymmetricEigen>,
}

impl SectorPropagator {
    pub fn new(basis: FockBasis, params: &ModelParams, cfg: &OracleConfig) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        let omega = params.sweep.constant_omega().ok_or(Error::UnsupportedProfile)?;
        let delta = params.omega_a - omega;
        let sectors = (0..=basis.n_total_max())
            .map(|n| {
                let h = SectorHamiltonian::new(n, delta, params.omega_r, cfg);
                SymmetricEigen::new(h.dense(), n + 1)
            })
            .collect();
        Ok(SectorPropagator { basis, omega, sectors })
    }

    /// Evolve a lab-frame state given at `t_from` to `t_to`.
    pub fn evolve(&self, state: &TwoModeFockVector, t_from: f64, t_to: f64) -> Result<TwoModeFockVector> {
        if state.basis() != self.basis {
            return Err(invalid("state", "basis differs from the propagator basis"));
        }
        let mut out = state.clone();
        out.rotate_mode2(-self.omega * t_from);
        let tau = t_to - t_from;
        for (n, eig) in self.sectors.iter().enumerate() {
            let dim = n + 1;
            let psi = out.sector_mut(n);
            // coefficients in the eigenbasis, phased, then back
            let coeffs: Vec<Complex64> = (0..dim)
                .map(|k| {
                    let c: Complex64 = (0..dim).map(|j| psi[j] * eig.vectors[j * dim + k]).sum();
                    c * Complex64::from_polar(1.0, -eig.values[k] * tau)
                })
                .collect();
            for (j, amp) in psi.iter_mut().enumerate() {
                *amp = (0..dim).map(|k| coeffs[k] * eig.vectors[j * dim + k]).sum();
            }
        }
        out.rotate_mode2(self.omega * t_to);
        check_norm(state, &out)?;
        Ok(out)
    }
}

fn check_norm(before: &TwoModeFockVector, after: &TwoModeFockVector) -> Result<()> {
    let (a, b) = (before.norm(), after.norm());
    if !b.is_finite() || (a - b).abs() > NORM_DRIFT_LIMIT {
        return Err(Error::NormDrift { norm: b });
    }
    Ok(())
}

/// Largest `|Δ(t)|` over `[t_from, t_to]` for step-size selection.
fn max_detuning(params: &ModelParams, t_from: f64, t_to: f64) -> Result<f64> {
    let mut worst = params.detuning(t_from)?.abs().max(params.detuning(t_to)?.abs());
    if let SweepProfile::Tabulated(table) = &params.sweep {
        for &(t, w) in table.samples() {
            if t > t_from && t < t_to {
                worst = worst.max((params.omega_a - w).abs());
            }
        }
    }
    Ok(worst)
}

/// Propagate a lab-frame state given at `t_from` to `t_to` under the
/// two-mode Hamiltonian (plus optional Kerr terms).
///
/// Constant drives use [`SectorPropagator`]. Other sweeps step the
/// rotating-frame Hamiltonian `Δ(t) n₂ + ω_R(b₂†b₁ + b₁†b₂)` with its value at
/// each step midpoint, then restore `e^{−iφ(t) n₂}`.
pub fn propagate_between(
    state: &TwoModeFockVector,
    params: &ModelParams,
    t_from: f64,
    t_to: f64,
    cfg: &OracleConfig,
) -> Result<TwoModeFockVector> {
    if !(t_to >= t_from) || !t_from.is_finite() || !t_to.is_finite() {
        return Err(invalid("t", "propagation requires finite t_to >= t_from"));
    }
    if params.sweep.constant_omega().is_some() {
        return SectorPropagator::new(state.basis(), params, cfg)?.evolve(state, t_from, t_to);
    }
    params.validate()?;
    cfg.validate()?;
    let basis = state.basis();
    let m = basis.n_total_max();
    let dt = match cfg.dt {
        Some(dt) => dt,
        None => {
            let delta = max_detuning(params, t_from, t_to)?;
            let bound = SectorHamiltonian::new(m, delta, params.omega_r, cfg).bound() + delta * m as f64 + 1e-300;
            1e-4 / bound
        }
    };
    let span = t_to - t_from;
    let steps = if span == 0.0 { 0 } else { (span / dt).ceil().max(1.0) as usize };
    let mut out = state.clone();
    out.rotate_mode2(-params.sweep.phase_integral(t_from)?);
    for k in 0..steps {
        let h = span / steps as f64;
        let t_mid = t_from + (k as f64 + 0.5) * h;
        let delta = params.detuning(t_mid)?;
        for n in 0..=m {
            let ham = SectorHamiltonian::new(n, delta, params.omega_r, cfg);
            ham.exp_apply(out.sector_mut(n), h);
        }
    }
    out.rotate_mode2(params.sweep.phase_integral(t_to)?);
    check_norm(state, &out)?;
    Ok(out)
}

/// Propagate a state prepared at `t = 0` to time `t`.
pub fn propagate(
    state: &TwoModeFockVector,
    params: &ModelParams,
    t: f64,
    cfg: &OracleConfig,
) -> Result<TwoModeFockVector> {
    propagate_between(state, params, 0.0, t, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form;
    use crate::dynamics;
    use crate::fock::{mandel_q, Mode};
    use crate::ode::IntegrationConfig;
    use core::f64::consts::FRAC_PI_2;

    fn mean(state: &TwoModeFockVector, mode: Mode) -> f64 {
        let basis = state.basis();
        (0..basis.dim())
            .map(|i| {
                let (n1, n2) = basis.occupation(i);
                let n = if mode == Mode::Trapped { n1 } else { n2 };
                n as f64 * state.amplitudes()[i].norm_sqr()
            })
            .sum()
    }

    fn coherent(a1: f64, basis: FockBasis) -> TwoModeFockVector {
        TwoModeFockVector::coherent_product(Complex64::new(a1, 0.0), 0.0.into(), basis, 1e-12).unwrap()
    }

    #[test]
    fn exp_apply_matches_spectral() {
        let cfg = OracleConfig { kerr_kappa1: 0.1, kerr_kappa2: 0.3, ..Default::default() };
        let ham = SectorHamiltonian::new(6, 0.7, 1.3, &cfg);
        let eig = SymmetricEigen::new(ham.dense(), 7);
        let x0: Vec<Complex64> = (0..7).map(|j| Complex64::new(j as f64, 1.0 - j as f64 * 0.5)).collect();
        let mut x = x0.clone();
        ham.exp_apply(&mut x, 2.3);
        for (j, xj) in x.iter().enumerate() {
            let expect: Complex64 = (0..7)
                .map(|k| {
                    let c: Complex64 = (0..7).map(|i| x0[i] * eig.vectors[i * 7 + k]).sum();
                    c * Complex64::from_polar(1.0, -eig.values[k] * 2.3) * eig.vectors[j * 7 + k]
                })
                .sum();
            assert!((xj - expect).norm() < 1e-11, "j={j}");
        }
    }

    #[test]
    fn uncoupled_keeps_populations() {
        let basis = FockBasis::new(30);
        let state =
            TwoModeFockVector::coherent_product(Complex64::new(1.5, 0.2), Complex64::new(-0.5, 1.0), basis, 1e-12)
                .unwrap();
        let p = ModelParams::with_detuning(2.0, 0.4, 0.0, 1.0).unwrap();
        for t in [0.3, 2.0, 11.0] {
            let out = propagate(&state, &p, t, &OracleConfig::default()).unwrap();
            assert!((mean(&out, Mode::Trapped) - mean(&state, Mode::Trapped)).abs() < 1e-12);
            assert!((mean(&out, Mode::Untrapped) - mean(&state, Mode::Untrapped)).abs() < 1e-12);
        }
    }

    #[test]
    fn resonant_full_transfer() {
        let basis = FockBasis::new(40);
        let p = ModelParams::with_detuning(1.0, 0.0, 1.0, 4.0).unwrap();
        let out = propagate(&coherent(2.0, basis), &p, FRAC_PI_2, &OracleConfig::default()).unwrap();
        assert!((mean(&out, Mode::Untrapped) - 4.0).abs() < 1e-8);
    }

    #[test]
    fn detuned_matches_closed_form() {
        let basis = FockBasis::new(40);
        let p = ModelParams::with_detuning(3.0, 1.0, 0.5, 4.0).unwrap();
        let out = propagate(&coherent(2.0, basis), &p, 1.3, &OracleConfig::default()).unwrap();
        let exact = closed_form::untrapped_population_exact(&p, 1.3).unwrap();
        assert!((mean(&out, Mode::Untrapped) - exact).abs() < 1e-8);
    }

    #[test]
    fn conserves_norm_and_total_number_with_kerr() {
        let basis = FockBasis::new(36);
        let p = ModelParams::with_detuning(1.0, 0.3, 0.8, 4.0).unwrap();
        let state = coherent(2.0, basis);
        let before = state.sector_weights();
        let cfg = OracleConfig::with_kerr(0.2);
        let out = propagate(&state, &p, 2.7, &cfg).unwrap();
        assert!((out.norm() - state.norm()).abs() < 1e-10);
        let total_in = mean(&state, Mode::Trapped) + mean(&state, Mode::Untrapped);
        let total_out = mean(&out, Mode::Trapped) + mean(&out, Mode::Untrapped);
        assert!((total_out - total_in).abs() < 1e-10 * total_in);
        for (a, b) in before.iter().zip(out.sector_weights().iter()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn sectors_do_not_leak() {
        let basis = FockBasis::new(8);
        let state = TwoModeFockVector::number_state(basis, 3, 1).unwrap();
        let p = ModelParams::new(1.0, 0.9, SweepProfile::linear_chirp(0.5, 1.0, 1.0).unwrap(), 1.0).unwrap();
        let cfg = OracleConfig { dt: Some(0.01), ..OracleConfig::with_kerr(0.1) };
        let out = propagate(&state, &p, 2.0, &cfg).unwrap();
        for n in (0..=8).filter(|&n| n != 4) {
            assert!(out.sector(n).iter().all(|a| *a == Complex64::new(0.0, 0.0)));
        }
    }

    #[test]
    fn chirp_matches_transfer_matrix_ode() {
        // coherent input stays coherent; mode means follow M(t)·(α₁, α₂)
        let basis = FockBasis::for_mean_number(2.25);
        let p = ModelParams::new(2.0, 0.6, SweepProfile::linear_chirp(0.4, 3.0, 2.0).unwrap(), 2.25).unwrap();
        let state = coherent(1.5, basis);
        let t = 6.0;
        let cfg = OracleConfig { dt: Some(2e-3), ..Default::default() };
        let out = propagate(&state, &p, t, &cfg).unwrap();
        let traj = dynamics::integrate_transfer_matrix(&p, &[0.0, t], &IntegrationConfig::default()).unwrap();
        let predicted = traj.last().unwrap().1.apply(&p.initial_state());
        assert!((mean(&out, Mode::Untrapped) - predicted.n2()).abs() < 1e-6);
        let fid = crate::fock::fidelity_to_product(&out, &predicted, 1e-12).unwrap();
        assert!(fid > 1.0 - 1e-6, "fidelity {fid}");
        assert!(mandel_q(&out, Mode::Untrapped).unwrap().abs() < 1e-6);
    }

    #[test]
    fn between_composes() {
        let basis = FockBasis::new(30);
        let p = ModelParams::with_detuning(2.0, 0.7, 0.9, 1.0).unwrap();
        let cfg = OracleConfig::with_kerr(0.05);
        let state = coherent(1.3, basis);
        let direct = propagate(&state, &p, 2.5, &cfg).unwrap();
        let mid = propagate(&state, &p, 1.1, &cfg).unwrap();
        let split = propagate_between(&mid, &p, 1.1, 2.5, &cfg).unwrap();
        assert!(direct.amplitudes().iter().zip(split.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn rejects_bad_times() {
        let basis = FockBasis::new(4);
        let p = ModelParams::with_detuning(2.0, 0.7, 0.9, 1.0).unwrap();
        let s = TwoModeFockVector::number_state(basis, 1, 0).unwrap();
        assert!(propagate_between(&s, &p, 2.0, 1.0, &OracleConfig::default()).is_err());
    }
}
