//! Brute-force ground truth on a truncated two-mode Fock space.
//!
//! The coupling conserves `n₁ + n₂`, so the basis is grouped by total number
//! `N` and every operator used here is block diagonal over these sectors.

mod diagnostics;
mod propagate;

pub use diagnostics::{
    best_product_fidelity, fidelity_to_product, kerr_breakdown_scan, mandel_q, mean_field, mean_number,
    quadrature_variance, reduced_purity, Mode,
};
pub use propagate::{propagate, propagate_between, SectorPropagator};

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::error::{invalid, Error, Result};

/// Truncated basis `{|n₁, n₂⟩ : n₁ + n₂ ≤ n_total_max}`, ordered by sector
/// `N = n₁ + n₂` and by `n₂` inside a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis {
    n_total_max: usize,
}

impl FockBasis {
    pub fn new(n_total_max: usize) -> Self {
        FockBasis { n_total_max }
    }

    /// Cutoff `⌈⟨N⟩ + 10√⟨N⟩ + 10⌉` for a state with mean total number `mean`.
    pub fn for_mean_number(mean: f64) -> Self {
        let mean = mean.max(0.0);
        FockBasis::new((mean + 10.0 * mean.sqrt() + 10.0).ceil() as usize)
    }

    pub fn n_total_max(&self) -> usize {
        self.n_total_max
    }

    pub fn dim(&self) -> usize {
        (self.n_total_max + 1) * (self.n_total_max + 2) / 2
    }

    /// First linear index of sector `n_total`.
    pub fn sector_offset(n_total: usize) -> usize {
        n_total * (n_total + 1) / 2
    }

    pub fn index(&self, n1: usize, n2: usize) -> Option<usize> {
        let total = n1 + n2;
        (total <= self.n_total_max).then(|| Self::sector_offset(total) + n2)
    }

    pub fn occupation(&self, index: usize) -> (usize, usize) {
        debug_assert!(index < self.dim());
        // largest N with N(N+1)/2 <= index
        let mut total = (((8 * index + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
        while Self::sector_offset(total + 1) <= index {
            total += 1;
        }
        while Self::sector_offset(total) > index {
            total -= 1;
        }
        let n2 = index - Self::sector_offset(total);
        (total - n2, n2)
    }
}

/// Oracle settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Allowed truncated weight `1 − ‖ψ‖²` of coherent inputs.
    pub epsilon_trunc: f64,
    /// Step for time-dependent sweeps; `None` picks `(‖H‖·dt)³ ≤ 1e-12`.
    pub dt: Option<f64>,
    /// Strength of `κ₁ b₁†b₁†b₁b₁`.
    pub kerr_kappa1: f64,
    /// Strength of `κ₂ b₂†b₂†b₂b₂`.
    pub kerr_kappa2: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { epsilon_trunc: 1e-12, dt: None, kerr_kappa1: 0.0, kerr_kappa2: 0.0 }
    }
}

impl OracleConfig {
    pub fn with_kerr(kappa: f64) -> Self {
        OracleConfig { kerr_kappa1: kappa, kerr_kappa2: kappa, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_trunc > 0.0 && self.epsilon_trunc < 1.0) {
            return Err(invalid("epsilon_trunc", "must lie in (0, 1)"));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(invalid("dt", "must be positive and finite"));
            }
        }
        if !(self.kerr_kappa1 >= 0.0) || !(self.kerr_kappa2 >= 0.0) {
            return Err(invalid("kerr_kappa", "interaction strengths must be >= 0"));
        }
        Ok(())
    }
}

/// State vector over a [`FockBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFockVector {
    basis: FockBasis,
    amplitudes: Vec<Complex64>,
}

/// Coherent-state expansion `e^{−|α|²/2} αⁿ/√(n!)` for `n = 0..=n_max`.
pub(crate) fn coherent_coefficients(alpha: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    out.push(c);
    for n in 1..=n_max {
        c = c * alpha / (n as f64).sqrt();
        out.push(c);
    }
    out
}

/// Smallest cutoff `M` whose Poisson(`mean`) weight up to `M` reaches `1 − epsilon`.
pub(crate) fn required_cutoff(mean: f64, epsilon: f64) -> usize {
    let mut pmf = (-mean).exp();
    let mut cdf = pmf;
    let mut n = 0usize;
    while 1.0 - cdf > epsilon && n < 100_000 {
        n += 1;
        pmf *= mean / n as f64;
        cdf += pmf;
    }
    n
}

impl TwoModeFockVector {
    pub fn zeros(basis: FockBasis) -> Self {
        TwoModeFockVector { basis, amplitudes: vec![Complex64::new(0.0, 0.0); basis.dim()] }
    }

    pub fn from_amplitudes(basis: FockBasis, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(invalid("amplitudes", "length does not match basis dimension"));
        }
        Ok(TwoModeFockVector { basis, amplitudes })
    }

    /// Number state `|n₁, n₂⟩`.
    pub fn number_state(basis: FockBasis, n1: usize, n2: usize) -> Result<Self> {
        let idx =
            basis.index(n1, n2).ok_or(Error::CutoffTooSmall { required: n1 + n2, actual: basis.n_total_max() })?;
        let mut v = Self::zeros(basis);
        v.amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    /// Truncated expansion of `|α₁⟩ ⊗ |α₂⟩`. Fails when the discarded weight
    /// exceeds `epsilon_trunc`, reporting the cutoff that would suffice.
    pub fn coherent_product(
        alpha1: Complex64,
        alpha2: Complex64,
        basis: FockBasis,
        epsilon_trunc: f64,
    ) -> Result<Self> {
        let m = basis.n_total_max();
        let c1 = coherent_coefficients(alpha1, m);
        let c2 = coherent_coefficients(alpha2, m);
        let mut v = Self::zeros(basis);
        for total in 0..=m {
            let off = FockBasis::sector_offset(total);
            for n2 in 0..=total {
                v.amplitudes[off + n2] = c1[total - n2] * c2[n2];
            }
        }
        if 1.0 - v.norm_sqr() > epsilon_trunc {
            let mean = alpha1.norm_sqr() + alpha2.norm_sqr();
            return Err(Error::CutoffTooSmall { required: required_cutoff(mean, epsilon_trunc), actual: m });
        }
        Ok(v)
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, n1: usize, n2: usize) -> Complex64 {
        self.basis.index(n1, n2).map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn sector(&self, n_total: usize) -> &[Complex64] {
        let off = FockBasis::sector_offset(n_total);
        &self.amplitudes[off..off + n_total + 1]
    }

    pub(crate) fn sector_mut(&mut self, n_total: usize) -> &mut [Complex64] {
        let off = FockBasis::sector_offset(n_total);
        &mut self.amplitudes[off..off + n_total + 1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Weight in each total-number sector.
    pub fn sector_weights(&self) -> Vec<f64> {
        (0..=self.basis.n_total_max()).map(|n| self.sector(n).iter().map(|a| a.norm_sqr()).sum()).collect()
    }

    /// `⟨ψ|φ⟩`.
    pub fn inner(&self, other: &TwoModeFockVector) -> Complex64 {
        self.amplitudes.iter().zip(other.amplitudes.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Multiply `|n₁, n₂⟩` by `e^{−i·angle·n₂}`.
    pub(crate) fn rotate_mode2(&mut self, angle: f64) {
        for total in 0..=self.basis.n_total_max() {
            for (n2, a) in self.sector_mut(total).iter_mut().enumerate() {
                *a *= Complex64::from_polar(1.0, -angle * n2 as f64);
            }
        }
    }
}
