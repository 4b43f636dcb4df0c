//! Classic fourth-order Runge–Kutta with optional step-doubling control.
//!
//! The moment systems are linear, small and non-stiff, so the default is a
//! fixed step that divides every sampling interval evenly. That keeps output
//! bit-reproducible for a given control.

use crate::error::{Error, Result};

/// A state vector the integrator can advance.
pub trait OdeState: Clone {
    /// `self + h·k`.
    fn axpy(&self, h: f64, k: &Self) -> Self;
    /// Max-norm of `self − other`.
    fn distance(&self, other: &Self) -> f64;
    /// Max-norm of `self`.
    fn magnitude(&self) -> f64;
    fn is_finite(&self) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Largest step taken, in the same time units as the rates.
    pub max_step: f64,
    /// Absolute tolerance; used by step doubling and by invariant checks.
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Enables step-doubling error control.
    pub adaptive: bool,
    /// Adaptive steps below this raise `StepUnderflow`.
    pub min_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { max_step: 0.05, abs_tol: 1e-10, rel_tol: 1e-10, adaptive: false, min_step: 1e-9 }
    }
}

impl StepControl {
    pub fn fixed(max_step: f64) -> Self {
        Self { max_step, ..Self::default() }
    }

    pub fn adaptive(max_step: f64, abs_tol: f64, rel_tol: f64) -> Self {
        Self { max_step, abs_tol, rel_tol, adaptive: true, ..Self::default() }
    }

    fn check(&self) -> Result<()> {
        let ok = self.max_step > 0.0
            && self.abs_tol > 0.0
            && self.rel_tol >= 0.0
            && self.min_step > 0.0
            && self.max_step.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid step control {self:?}")))
        }
    }
}

pub fn rk4_step<S, F>(rhs: &F, y: &S, h: f64) -> S
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    let k1 = rhs(y);
    let k2 = rhs(&y.axpy(0.5 * h, &k1));
    let k3 = rhs(&y.axpy(0.5 * h, &k2));
    let k4 = rhs(&y.axpy(h, &k3));
    y.axpy(h / 6.0, &k1).axpy(h / 3.0, &k2).axpy(h / 3.0, &k3).axpy(h / 6.0, &k4)
}

/// Integrates from `times[0]` and returns the state at every entry of `times`
/// (the first entry is `initial` itself). `times` must be strictly increasing.
pub fn integrate_to<S, F>(rhs: F, initial: S, times: &[f64], control: &StepControl) -> Result<Vec<S>>
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    control.check()?;
    if times.is_empty() {
        return Ok(Vec::new());
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("sample times must be strictly increasing".into()));
    }
    let mut out = Vec::with_capacity(times.len());
    let mut y = initial;
    out.push(y.clone());
    let mut h_try = control.max_step;
    for w in times.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        y = if control.adaptive {
            advance_adaptive(&rhs, y, t0, t1, control, &mut h_try)?
        } else {
            advance_fixed(&rhs, y, t0, t1, control.max_step)?
        };
        out.push(y.clone());
    }
    Ok(out)
}

fn advance_fixed<S, F>(rhs: &F, mut y: S, t0: f64, t1: f64, max_step: f64) -> Result<S>
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    let n = ((t1 - t0) / max_step).ceil().max(1.0) as usize;
    let h = (t1 - t0) / n as f64;
    for k in 0..n {
        y = rk4_step(rhs, &y, h);
        if !y.is_finite() {
            return Err(Error::NonFiniteState { t: t0 + (k + 1) as f64 * h });
        }
    }
    Ok(y)
}

fn advance_adaptive<S, F>(rhs: &F, mut y: S, t0: f64, t1: f64, control: &StepControl, h_try: &mut f64) -> Result<S>
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    let mut t = t0;
    while t < t1 {
        let remaining = t1 - t;
        let h = h_try.min(control.max_step).min(remaining);
        let full = rk4_step(rhs, &y, h);
        let half = rk4_step(rhs, &y, 0.5 * h);
        let two_halves = rk4_step(rhs, &half, 0.5 * h);
        if !two_halves.is_finite() || !full.is_finite() {
            return Err(Error::NonFiniteState { t: t + h });
        }
        let scale = control.abs_tol + control.rel_tol * two_halves.magnitude();
        // Richardson estimate of the local error of the two-half-step result
        let err = two_halves.distance(&full) / 15.0;
        if err <= scale {
            t = if h == remaining { t1 } else { t + h };
            y = two_halves;
            let grow = if err == 0.0 { 4.0 } else { (0.9 * (scale / err).powf(0.2)).clamp(1.0, 4.0) };
            // do not let the clamp to a sample boundary shrink the next step
            *h_try = (h.max(*h_try) * grow).min(control.max_step);
        } else {
            let shrink = (0.9 * (scale / err).powf(0.2)).clamp(0.1, 0.5);
            *h_try = h * shrink;
            if *h_try < control.min_step {
                return Err(Error::StepUnderflow { t, min_step: control.min_step });
            }
        }
    }
    Ok(y)
}

/// Uniform sample grid `t_end·k/(samples−1)`, `k = 0..samples`.
pub fn uniform_times(t_end: f64, samples: usize) -> Vec<f64> {
    let samples = samples.max(2);
    (0..samples).map(|k| if k + 1 == samples { t_end } else { t_end * k as f64 / (samples - 1) as f64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone, Debug)]
    struct Scalar(f64);

    impl OdeState for Scalar {
        fn axpy(&self, h: f64, k: &Self) -> Self {
            Scalar(self.0 + h * k.0)
        }
        fn distance(&self, other: &Self) -> f64 {
            (self.0 - other.0).abs()
        }
        fn magnitude(&self) -> f64 {
            self.0.abs()
        }
        fn is_finite(&self) -> bool {
            self.0.is_finite()
        }
    }

    #[test]
    fn exponential_decay_fixed() {
        let times = uniform_times(2.0, 5);
        let ys = integrate_to(|y: &Scalar| Scalar(-y.0), Scalar(1.0), &times, &StepControl::fixed(1e-3)).unwrap();
        for (t, y) in times.iter().zip(&ys) {
            assert!((y.0 - (-t).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn exponential_decay_adaptive() {
        let times = uniform_times(5.0, 3);
        let ys = integrate_to(
            |y: &Scalar| Scalar(-2.0 * y.0),
            Scalar(1.0),
            &times,
            &StepControl::adaptive(0.5, 1e-12, 1e-12),
        )
        .unwrap();
        assert!((ys[2].0 - (-10f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn blowup_reports_non_finite() {
        let times = [0.0, 1e4];
        let r = integrate_to(|y: &Scalar| Scalar(y.0 * y.0), Scalar(1.0), &times, &StepControl::fixed(0.1));
        assert!(matches!(r, Err(Error::NonFiniteState { .. })));
    }

    #[test]
    fn adaptive_underflow() {
        let times = [0.0, 2.0];
        let mut c = StepControl::adaptive(0.5, 1e-14, 0.0);
        c.min_step = 1e-3;
        // finite-time blowup at t = 1 forces the step to collapse
        let r = integrate_to(|y: &Scalar| Scalar(y.0 * y.0), Scalar(1.0), &times, &c);
        assert!(matches!(r, Err(Error::StepUnderflow { .. }) | Err(Error::NonFiniteState { .. })));
    }

    #[test]
    fn rejects_bad_control_and_times() {
        let c = StepControl { max_step: 0.0, ..StepControl::default() };
        assert!(integrate_to(|y: &Scalar| y.clone(), Scalar(0.0), &[0.0, 1.0], &c).is_err());
        assert!(integrate_to(|y: &Scalar| y.clone(), Scalar(0.0), &[0.0, 0.0], &StepControl::default()).is_err());
    }

    #[test]
    fn uniform_grid_endpoints() {
        let t = uniform_times(3.0, 4);
        assert_eq!(t, vec![0.0, 1.0, 2.0, 3.0]);
    }
}
