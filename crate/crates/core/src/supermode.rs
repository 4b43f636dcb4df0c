//! Hamiltonian super-modes `C± = (a ± e^{iφ} b)/√2` and the moment equations
//! written in that basis.
//!
//! `φ` is the phase of the coherent coupling. In this basis the Hamiltonian
//! is diagonal with detunings `Δ ± |J|` and every bath couples through a
//! weight pair `(p_+, p_−)`: the shared bath through `p^z`, the local baths
//! through fixed `±1/√2`-type weights.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::moments::MomentState;
use crate::ode::{self, OdeState, StepControl};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Tolerance on `|p^z|` below which a super-mode is taken to be decoupled
/// from the shared bath.
pub const DECOUPLED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SupermodeState {
    /// `⟨C₊⟩`
    pub mean_plus: C64,
    /// `⟨C₋⟩`
    pub mean_minus: C64,
    pub n_plus: f64,
    pub n_minus: f64,
    /// `⟨C₊†C₋⟩`
    pub cross_pm: C64,
}

impl SupermodeState {
    fn to_array(self) -> [f64; 8] {
        [
            self.mean_plus.re,
            self.mean_plus.im,
            self.mean_minus.re,
            self.mean_minus.im,
            self.n_plus,
            self.n_minus,
            self.cross_pm.re,
            self.cross_pm.im,
        ]
    }
}

impl OdeState for SupermodeState {
    fn axpy(&self, h: f64, k: &Self) -> Self {
        Self {
            mean_plus: self.mean_plus + k.mean_plus * h,
            mean_minus: self.mean_minus + k.mean_minus * h,
            n_plus: self.n_plus + k.n_plus * h,
            n_minus: self.n_minus + k.n_minus * h,
            cross_pm: self.cross_pm + k.cross_pm * h,
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

pub fn to_supermode(s: &MomentState, phi: f64) -> SupermodeState {
    let e = C64::from_polar(1.0, phi);
    let sqrt2 = std::f64::consts::SQRT_2;
    // e^{iφ}⟨a†b⟩ + c.c. and e^{iφ}⟨a†b⟩ − c.c.
    let rotated = e * s.cross_ab;
    SupermodeState {
        mean_plus: (s.mean_a + e * s.mean_b) / sqrt2,
        mean_minus: (s.mean_a - e * s.mean_b) / sqrt2,
        n_plus: 0.5 * (s.n_a + s.n_b) + rotated.re,
        n_minus: 0.5 * (s.n_a + s.n_b) - rotated.re,
        cross_pm: 0.5 * (C64::new(s.n_a - s.n_b, 0.0) - rotated + rotated.conj()),
    }
}

pub fn from_supermode(s: &SupermodeState, phi: f64) -> MomentState {
    let e_minus = C64::from_polar(1.0, -phi);
    let sqrt2 = std::f64::consts::SQRT_2;
    MomentState {
        mean_a: (s.mean_plus + s.mean_minus) / sqrt2,
        mean_b: e_minus * (s.mean_plus - s.mean_minus) / sqrt2,
        n_a: 0.5 * (s.n_plus + s.n_minus) + s.cross_pm.re,
        n_b: 0.5 * (s.n_plus + s.n_minus) - s.cross_pm.re,
        cross_ab: e_minus * 0.5 * (C64::new(s.n_plus - s.n_minus, 0.0) - s.cross_pm + s.cross_pm.conj()),
    }
}

/// Bath weights in the super-mode basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupermodeCouplings {
    /// `p_a^z`, weight of `C₊` in the shared jump operator.
    pub p_plus_z: C64,
    /// `p_b^z`, weight of `C₋`.
    pub p_minus_z: C64,
    /// `μ_z = −p_a^z (p_b^z)*`
    pub mu_z: C64,
    pub local_a_weights: (C64, C64),
    pub local_b_weights: (C64, C64),
    pub mu_a: f64,
    pub mu_b: f64,
}

pub fn supermode_couplings(params: &SystemParams) -> SupermodeCouplings {
    let phi = params.coupling.phase;
    let e_minus = C64::from_polar(1.0, -phi);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (pa, pb) = (params.shared.p_a, params.shared.p_b);
    let p_plus_z = (pa + e_minus * pb) * r;
    let p_minus_z = (pa - e_minus * pb) * r;
    SupermodeCouplings {
        p_plus_z,
        p_minus_z,
        mu_z: -p_plus_z * p_minus_z.conj(),
        local_a_weights: (C64::new(r, 0.0), C64::new(r, 0.0)),
        local_b_weights: (e_minus * r, -e_minus * r),
        mu_a: -0.5,
        mu_b: 0.5,
    }
}

/// Time derivative of the super-mode moments.
pub fn rhs_global(params: &SystemParams, s: &SupermodeState) -> SupermodeState {
    let c = supermode_couplings(params);
    let gamma = params.shared.gamma;
    let (ka, kb) = (params.local.kappa_a, params.local.kappa_b);
    let j = params.coupling.magnitude;
    let delta = params.drive.detuning;
    let f = params.drive.amplitude * std::f64::consts::FRAC_1_SQRT_2;

    let damp_plus = gamma * c.p_plus_z.norm_sqr() + (ka + kb) / 2.0;
    let damp_minus = gamma * c.p_minus_z.norm_sqr() + (ka + kb) / 2.0;
    let local_mix = (kb - ka) / 4.0;
    // couplings of ⟨C₋⟩ into d⟨C₊⟩ and of ⟨C₊⟩ into d⟨C₋⟩
    let k_pm = c.mu_z.conj() * (gamma / 2.0) + local_mix;
    let k_mp = c.mu_z * (gamma / 2.0) + local_mix;

    let d_plus = -(C64::new(damp_plus, 2.0 * (delta + j)) / 2.0) * s.mean_plus + k_pm * s.mean_minus - I * f;
    let d_minus = -(C64::new(damp_minus, 2.0 * (delta - j)) / 2.0) * s.mean_minus + k_mp * s.mean_plus - I * f;
    let d_n_plus = -damp_plus * s.n_plus + 2.0 * (k_pm * s.cross_pm).re - 2.0 * f * s.mean_plus.im;
    let d_n_minus = -damp_minus * s.n_minus + 2.0 * (k_pm * s.cross_pm).re - 2.0 * f * s.mean_minus.im;
    let d_cross = -(C64::new(damp_plus + damp_minus, -4.0 * j) / 2.0) * s.cross_pm + k_mp * (s.n_plus + s.n_minus)
        - I * f * s.mean_plus.conj()
        + I * f * s.mean_minus;

    SupermodeState { mean_plus: d_plus, mean_minus: d_minus, n_plus: d_n_plus, n_minus: d_n_minus, cross_pm: d_cross }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Supermode {
    Plus,
    Minus,
}

/// The super-mode that does not couple to the shared bath, if any.
pub fn decoherence_free_mode(params: &SystemParams) -> Option<Supermode> {
    if !(params.shared.gamma > 0.0) {
        return None;
    }
    let c = supermode_couplings(params);
    if c.p_minus_z.norm() <= DECOUPLED_TOL {
        Some(Supermode::Minus)
    } else if c.p_plus_z.norm() <= DECOUPLED_TOL {
        Some(Supermode::Plus)
    } else {
        None
    }
}

/// Integrates the super-mode equations from `initial`, sampling `samples`
/// evenly spaced times on `[0, t_end]`.
pub fn integrate_global(
    params: &SystemParams,
    initial: SupermodeState,
    t_end: f64,
    samples: usize,
    control: &StepControl,
) -> Result<Vec<SupermodeState>> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    let times = ode::uniform_times(t_end, samples);
    ode::integrate_to(|s| rhs_global(params, s), initial, &times, control)
}
