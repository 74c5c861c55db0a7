use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use super::{coherent_coefficients, propagate, required_cutoff, FockBasis, OracleConfig, TwoModeFockVector};
use crate::error::{invalid, Error, Result};
use crate::model::{ModelParams, ProductCoherentState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Mode 1, the trapped condensate level.
    Trapped,
    /// Mode 2, the untrapped output level.
    Untrapped,
}

/// Normalized single-mode moments `(⟨b⟩, ⟨b²⟩, ⟨n⟩, ⟨n²⟩)`.
fn moments(state: &TwoModeFockVector, mode: Mode) -> (Complex64, Complex64, f64, f64) {
    let basis = state.basis();
    let amps = state.amplitudes();
    let (mut b, mut b2, mut n, mut n_sq) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0, 0.0);
    for (i, a) in amps.iter().enumerate() {
        let (n1, n2) = basis.occupation(i);
        let k = match mode {
            Mode::Trapped => n1,
            Mode::Untrapped => n2,
        };
        let lowered = |by: usize| match mode {
            Mode::Trapped => basis.index(n1 - by, n2),
            Mode::Untrapped => basis.index(n1, n2 - by),
        };
        let w = a.norm_sqr();
        n += k as f64 * w;
        n_sq += (k * k) as f64 * w;
        if k >= 1 {
            let j = lowered(1).expect("lowering stays inside the basis");
            b += amps[j].conj() * a * (k as f64).sqrt();
        }
        if k >= 2 {
            let j = lowered(2).expect("lowering stays inside the basis");
            b2 += amps[j].conj() * a * ((k * (k - 1)) as f64).sqrt();
        }
    }
    let norm = state.norm_sqr();
    (b / norm, b2 / norm, n / norm, n_sq / norm)
}

/// Mean occupation `⟨b†b⟩` of one mode.
pub fn mean_number(state: &TwoModeFockVector, mode: Mode) -> f64 {
    moments(state, mode).2
}

/// Mean field `⟨b⟩` of one mode.
pub fn mean_field(state: &TwoModeFockVector, mode: Mode) -> Complex64 {
    moments(state, mode).0
}

/// Mandel `Q = (⟨n²⟩ − ⟨n⟩² − ⟨n⟩)/⟨n⟩`: 0 for coherent, −1 for a number state.
pub fn mandel_q(state: &TwoModeFockVector, mode: Mode) -> Result<f64> {
    let (_, _, n, n_sq) = moments(state, mode);
    if !(n > 0.0) {
        return Err(Error::UndefinedStatistic);
    }
    Ok((n_sq - n * n - n) / n)
}

/// Variance of `X = (b + b†)/√2`; 1/2 for any coherent state.
pub fn quadrature_variance(state: &TwoModeFockVector, mode: Mode) -> f64 {
    let (b, b2, n, _) = moments(state, mode);
    let x_mean = 2f64.sqrt() * b.re;
    let x_sq = b2.re + n + 0.5;
    x_sq - x_mean * x_mean
}

/// `Tr ρ²` of the reduced single-mode density operator.
pub fn reduced_purity(state: &TwoModeFockVector, mode: Mode) -> f64 {
    let basis = state.basis();
    let m = basis.n_total_max();
    let amp = |kept: usize, traced: usize| match mode {
        Mode::Trapped => state.amplitude(kept, traced),
        Mode::Untrapped => state.amplitude(traced, kept),
    };
    let mut rho = vec![Complex64::new(0.0, 0.0); (m + 1) * (m + 1)];
    for traced in 0..=m {
        let top = m - traced;
        for a in 0..=top {
            let pa = amp(a, traced);
            if pa == Complex64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..=top {
                rho[a * (m + 1) + b] += pa * amp(b, traced).conj();
            }
        }
    }
    let norm = state.norm_sqr();
    rho.iter().map(|r| r.norm_sqr()).sum::<f64>() / (norm * norm)
}

fn product_overlap(state: &TwoModeFockVector, alpha1: Complex64, alpha2: Complex64) -> Complex64 {
    let m = state.basis().n_total_max();
    let c1 = coherent_coefficients(alpha1, m);
    let c2 = coherent_coefficients(alpha2, m);
    let mut acc = Complex64::new(0.0, 0.0);
    for total in 0..=m {
        for (n2, a) in state.sector(total).iter().enumerate() {
            acc += (c1[total - n2] * c2[n2]).conj() * a;
        }
    }
    acc
}

/// `|⟨α₁, α₂|ψ⟩|²` against a coherent product that must fit the basis within `epsilon_trunc`.
pub fn fidelity_to_product(
    state: &TwoModeFockVector,
    target: &ProductCoherentState,
    epsilon_trunc: f64,
) -> Result<f64> {
    let required = required_cutoff(target.total(), epsilon_trunc);
    let actual = state.basis().n_total_max();
    if required > actual {
        return Err(Error::CutoffTooSmall { required, actual });
    }
    Ok(product_overlap(state, target.alpha1, target.alpha2).norm_sqr())
}

/// Closest coherent product to `state` and its fidelity.
///
/// Seeds at the mode mean fields and refines the four real coordinates by
/// coordinate descent with step halving.
pub fn best_product_fidelity(state: &TwoModeFockVector) -> (ProductCoherentState, f64) {
    let fid = |x: &[f64; 4]| product_overlap(state, Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])).norm_sqr();
    let b1 = mean_field(state, Mode::Trapped);
    let b2 = mean_field(state, Mode::Untrapped);
    let mut x = [b1.re, b1.im, b2.re, b2.im];
    let mut best = fid(&x);
    let mut step = 0.25;
    while step > 1e-7 {
        let mut improved = false;
        for coord in 0..4 {
            for sign in [1.0, -1.0] {
                let mut trial = x;
                trial[coord] += sign * step;
                let f = fid(&trial);
                if f > best {
                    best = f;
                    x = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (ProductCoherentState::new(Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])), best)
}

/// Best-product fidelity at time `t` of `|α⟩ ⊗ |0⟩` evolved with equal Kerr
/// strength `κ` on both modes, for each `κ` in `kappa_grid`.
pub fn kerr_breakdown_scan(
    alpha: Complex64,
    params: &ModelParams,
    kappa_grid: &[f64],
    t: f64,
    base: &OracleConfig,
) -> Result<Vec<(f64, f64)>> {
    if kappa_grid.iter().any(|k| !(*k >= 0.0) || !k.is_finite()) {
        return Err(invalid("kappa_grid", "interaction strengths must be finite and >= 0"));
    }
    let basis = FockBasis::for_mean_number(alpha.norm_sqr());
    let start = TwoModeFockVector::coherent_product(alpha, Complex64::new(0.0, 0.0), basis, base.epsilon_trunc)?;
    kappa_grid
        .iter()
        .map(|&kappa| {
            let cfg = OracleConfig { kerr_kappa1: kappa, kerr_kappa2: kappa, ..*base };
            let evolved = propagate(&start, params, t, &cfg)?;
            Ok((kappa, best_product_fidelity(&evolved).1))
        })
        .collect()
}
