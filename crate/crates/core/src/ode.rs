//! Explicit Runge-Kutta integration of small complex linear systems.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Adaptive Dormand-Prince 5(4) pair with local extrapolation.
    DormandPrince,
    /// Classical fourth-order Runge-Kutta with a fixed step.
    Rk4 { step: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub method: Method,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig { rel_tol: 1e-10, abs_tol: 1e-12, max_step: 1.0, method: Method::DormandPrince }
    }
}

impl IntegrationConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        IntegrationConfig { rel_tol, abs_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(invalid("tolerance", "tolerances must be positive"));
        }
        if !(self.max_step > 0.0) {
            return Err(invalid("max_step", "must be positive"));
        }
        if let Method::Rk4 { step } = self.method {
            if !(step > 0.0) || !step.is_finite() {
                return Err(invalid("step", "fixed step must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// Sampled solution aligned with its output times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<f64>,
    pub values: Vec<T>,
}

impl<T> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(&f64, &T)> {
        self.times.last().zip(self.values.last())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&f64, &T)> {
        self.times.iter().zip(self.values.iter())
    }
}

pub(crate) fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(invalid("t_grid", "time grid is empty"));
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(invalid("t_grid", "non-finite time"));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("t_grid", "times must be strictly increasing"));
    }
    Ok(())
}

type State<const N: usize> = [Complex64; N];

fn axpy<const N: usize>(y: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    let mut out = *y;
    for (coef, k) in terms {
        let c = h * coef;
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += ki * c;
        }
    }
    out
}

// Dormand-Prince 5(4) tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `dy/dt = rhs(t, y)` from `y0` at `t_grid[0]`, returning the
/// solution at every grid time.
pub fn integrate<const N: usize, F>(
    mut rhs: F,
    t_grid: &[f64],
    y0: State<N>,
    cfg: &IntegrationConfig,
) -> Result<Trajectory<State<N>>>
where
    F: FnMut(f64, &State<N>) -> Result<State<N>>,
{
    check_grid(t_grid)?;
    cfg.validate()?;
    let mut values = Vec::with_capacity(t_grid.len());
    values.push(y0);
    match cfg.method {
        Method::Rk4 { step } => {
            let mut y = y0;
            for w in t_grid.windows(2) {
                let (a, b) = (w[0], w[1]);
                let n = ((b - a) / step).ceil().max(1.0) as usize;
                let h = (b - a) / n as f64;
                for i in 0..n {
                    y = rk4_step(&mut rhs, a + i as f64 * h, &y, h)?;
                }
                values.push(y);
            }
        }
        Method::DormandPrince => {
            let mut stepper = DormandPrince::new(cfg, t_grid[0], y0, &mut rhs)?;
            for &target in &t_grid[1..] {
                stepper.advance_to(&mut rhs, target)?;
                values.push(stepper.y);
            }
        }
    }
    Ok(Trajectory { times: t_grid.to_vec(), values })
}

fn rk4_step<const N: usize, F>(rhs: &mut F, t: f64, y: &State<N>, h: f64) -> Result<State<N>>
where
    F: FnMut(f64, &State<N>) -> Result<State<N>>,
{
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + 0.5 * h, &axpy(y, h, &[(0.5, &k1)]))?;
    let k3 = rhs(t + 0.5 * h, &axpy(y, h, &[(0.5, &k2)]))?;
    let k4 = rhs(t + h, &axpy(y, h, &[(1.0, &k3)]))?;
    Ok(axpy(y, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]))
}

// Local error target as a fraction of the requested tolerance, so that drift
// accumulated over many steps stays within the tolerance budget.
const LOCAL_TOL_FRACTION: f64 = 0.01;

struct DormandPrince<const N: usize> {
    t: f64,
    y: State<N>,
    k1: State<N>,
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_step: f64,
}

impl<const N: usize> DormandPrince<N> {
    fn new<F>(cfg: &IntegrationConfig, t: f64, y: State<N>, rhs: &mut F) -> Result<Self>
    where
        F: FnMut(f64, &State<N>) -> Result<State<N>>,
    {
        let k1 = rhs(t, &y)?;
        let mut s = DormandPrince {
            t,
            y,
            k1,
            h: 0.0,
            rel_tol: cfg.rel_tol * LOCAL_TOL_FRACTION,
            abs_tol: cfg.abs_tol * LOCAL_TOL_FRACTION,
            max_step: cfg.max_step,
        };
        s.h = s.initial_step();
        Ok(s)
    }

    fn scaled_norm(&self, v: &State<N>, reference: &State<N>) -> f64 {
        let sum: f64 = v
            .iter()
            .zip(reference.iter())
            .map(|(vi, ri)| {
                let sc = self.abs_tol + self.rel_tol * ri.norm();
                (vi.norm() / sc).powi(2)
            })
            .sum();
        (sum / N as f64).sqrt()
    }

    fn initial_step(&self) -> f64 {
        let d0 = self.scaled_norm(&self.y, &self.y);
        let d1 = self.scaled_norm(&self.k1, &self.y);
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(self.max_step)
    }

    fn advance_to<F>(&mut self, rhs: &mut F, target: f64) -> Result<()>
    where
        F: FnMut(f64, &State<N>) -> Result<State<N>>,
    {
        while self.t < target {
            let remaining = target - self.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            let (y_new, k7, err) = self.trial(rhs, h)?;
            if err <= 1.0 {
                self.t = if last { target } else { self.t + h };
                self.y = y_new;
                self.k1 = k7;
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a clipped final step says nothing about the natural step size
                if !last || h * grow > self.h {
                    self.h = (h * grow).min(self.max_step);
                }
            } else {
                let shrink = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                self.h = h * shrink;
                if self.h < 1e-14 * self.t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t: self.t, step: self.h });
                }
            }
        }
        Ok(())
    }

    fn trial<F>(&self, rhs: &mut F, h: f64) -> Result<(State<N>, State<N>, f64)>
    where
        F: FnMut(f64, &State<N>) -> Result<State<N>>,
    {
        let (t, y, k1) = (self.t, &self.y, &self.k1);
        let k2 = rhs(t + C2 * h, &axpy(y, h, &[(A21, k1)]))?;
        let k3 = rhs(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
        let k4 = rhs(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = rhs(t + C5 * h, &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = rhs(t + h, &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        let y_new = axpy(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = rhs(t + h, &y_new)?;
        let zero = [Complex64::new(0.0, 0.0); N];
        let e = axpy(&zero, h, &[(E1, k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
        let mut reference = *y;
        for (r, yn) in reference.iter_mut().zip(y_new.iter()) {
            if yn.norm() > r.norm() {
                *r = *yn;
            }
        }
        let err = self.scaled_norm(&e, &reference);
        if !err.is_finite() {
            return Err(Error::StepUnderflow { t, step: h });
        }
        Ok((y_new, k7, err))
    }
}
