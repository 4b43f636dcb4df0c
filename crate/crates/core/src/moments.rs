//! First and second moments of the two modes and their equations of motion.
//!
//! Because the model is linear with linear jump operators, the five moments
//! `⟨a⟩, ⟨b⟩, ⟨a†a⟩, ⟨b†b⟩, ⟨a†b⟩` obey a closed linear system. Starting from
//! a product coherent state (vacuum in particular) the state stays coherent,
//! so the second moments factorize along every trajectory.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::ode::{self, OdeState, StepControl};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MomentState {
    /// `⟨a⟩`
    pub mean_a: C64,
    /// `⟨b⟩`
    pub mean_b: C64,
    /// `⟨a†a⟩`
    pub n_a: f64,
    /// `⟨b†b⟩`
    pub n_b: f64,
    /// `⟨a†b⟩`
    pub cross_ab: C64,
}

impl MomentState {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Moments of the product coherent state `|α⟩⊗|β⟩`.
    pub fn coherent(alpha: C64, beta: C64) -> Self {
        Self { mean_a: alpha, mean_b: beta, n_a: alpha.norm_sqr(), n_b: beta.norm_sqr(), cross_ab: alpha.conj() * beta }
    }

    /// Cauchy–Schwarz slack `n_a n_b − |⟨a†b⟩|²`; negative values beyond
    /// round-off mean the moments cannot come from a physical state.
    pub fn cauchy_schwarz_slack(&self) -> f64 {
        self.n_a * self.n_b - self.cross_ab.norm_sqr()
    }

    pub(crate) fn to_array(self) -> [f64; 8] {
        [
            self.mean_a.re,
            self.mean_a.im,
            self.mean_b.re,
            self.mean_b.im,
            self.n_a,
            self.n_b,
            self.cross_ab.re,
            self.cross_ab.im,
        ]
    }
}

impl OdeState for MomentState {
    fn axpy(&self, h: f64, k: &Self) -> Self {
        Self {
            mean_a: self.mean_a + k.mean_a * h,
            mean_b: self.mean_b + k.mean_b * h,
            n_a: self.n_a + k.n_a * h,
            n_b: self.n_b + k.n_b * h,
            cross_ab: self.cross_ab + k.cross_ab * h,
        }
    }

    fn distance(&self, other: &Self) -> f64 {
        self.to_array().iter().zip(other.to_array()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    fn magnitude(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

/// Time derivative of the five moments.
pub fn rhs(params: &SystemParams, s: &MomentState) -> MomentState {
    let gamma = params.shared.gamma;
    let rates = params.derived_rates();
    let mu = rates.mu;
    let j = params.coupling.complex();
    let f = params.drive.amplitude;
    let delta = params.drive.detuning;
    let damp_a = rates.gamma_a + params.local.kappa_a;
    let damp_b = rates.gamma_b + params.local.kappa_b;

    let j_plus = j + I * mu * (gamma / 2.0);
    let j_minus = j - I * mu * (gamma / 2.0);
    let jc_plus = j.conj() + I * mu.conj() * (gamma / 2.0);
    let jc_minus = j.conj() - I * mu.conj() * (gamma / 2.0);

    let d_mean_a = -(C64::new(damp_a, 2.0 * delta) / 2.0) * s.mean_a - I * j_plus * s.mean_b - I * f;
    let d_mean_b = -(C64::new(damp_b, 2.0 * delta) / 2.0) * s.mean_b - I * jc_plus * s.mean_a;
    let d_n_a = -damp_a * s.n_a - 2.0 * (I * j_plus * s.cross_ab).re - 2.0 * f * s.mean_a.im;
    let d_n_b = -damp_b * s.n_b + 2.0 * (I * j_minus * s.cross_ab).re;
    let d_cross =
        -((damp_a + damp_b) / 2.0) * s.cross_ab - I * jc_plus * s.n_a + I * jc_minus * s.n_b + I * f * s.mean_b;

    MomentState { mean_a: d_mean_a, mean_b: d_mean_b, n_a: d_n_a, n_b: d_n_b, cross_ab: d_cross }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Energies {
    pub e_a: f64,
    pub e_b: f64,
    /// Total energy `E_A + E_B`.
    pub xi: f64,
}

impl Energies {
    pub fn new(e_a: f64, e_b: f64) -> Self {
        Self { e_a, e_b, xi: e_a + e_b }
    }
}

pub fn energies(state: &MomentState, omega: f64) -> Energies {
    Energies::new(omega * state.n_a, omega * state.n_b)
}

/// Distance of the second moments from those of a product coherent state
/// with the same first moments. Zero for pure coherent states.
pub fn purity_residual(s: &MomentState) -> f64 {
    let da = (s.n_a - s.mean_a.norm_sqr()).abs();
    let db = (s.n_b - s.mean_b.norm_sqr()).abs();
    let dc = (s.cross_ab - s.mean_a.conj() * s.mean_b).norm();
    da.max(db).max(dc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MomentState>,
    pub energies: Vec<Energies>,
    /// Rate used for the dimensionless abscissa (`|J|`, or `Γ/2` if `J = 0`).
    pub scale: f64,
}

impl Trajectory {
    pub fn scaled_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.times.iter().map(move |t| t * self.scale)
    }

    pub fn last(&self) -> (f64, &MomentState, &Energies) {
        let k = self.times.len() - 1;
        (self.times[k], &self.states[k], &self.energies[k])
    }

    pub fn max_purity_residual(&self) -> f64 {
        self.states.iter().map(purity_residual).fold(0.0, f64::max)
    }
}

/// Integrates the moment equations from `initial` to `t_end`, recording
/// `samples` evenly spaced states (both endpoints included).
pub fn integrate(
    params: &SystemParams,
    initial: MomentState,
    t_end: f64,
    samples: usize,
    control: &StepControl,
) -> Result<Trajectory> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    let times = ode::uniform_times(t_end, samples);
    let states = ode::integrate_to(|s| rhs(params, s), initial, &times, control)?;
    let energies = states.iter().map(|s| energies(s, params.omega)).collect();
    Ok(Trajectory { times, states, energies, scale: params.time_scale() })
}

/// Integrates until `‖rhs‖ < 1e-9·max(F, 1e-300)` or `max_t` is reached,
/// checking every `check_every` time units. Returns the time reached and the
/// final state.
pub fn integrate_until_stationary(
    params: &SystemParams,
    initial: MomentState,
    check_every: f64,
    max_t: f64,
    control: &StepControl,
) -> Result<(f64, MomentState)> {
    let threshold = 1e-9 * params.drive.amplitude.max(1e-300);
    let mut t = 0.0;
    let mut state = initial;
    while t < max_t {
        if rhs(params, &state).magnitude() < threshold {
            return Ok((t, state));
        }
        let step = check_every.min(max_t - t);
        let out = ode::integrate_to(|s| rhs(params, s), state, &[t, t + step], control)?;
        state = out[1];
        t += step;
    }
    Ok((t, state))
}
