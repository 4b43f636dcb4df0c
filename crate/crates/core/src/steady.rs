//! Stationary energies, in closed form and by a direct linear solve.
//!
//! The closed forms are written with the kernels
//!
//! ```text
//! 𝒦_bb = 4Δ² + (Γ_b + κ_b)²
//! 𝒦_ab = (2Δ + i(Γ_a + κ_a))(2Δ + i(Γ_b + κ_b))
//! 𝒥(x, θ) = 4|J|² + x² − 4|J|x cos θ
//! E_A = 4F²𝒦_bb / |𝒥(iΓ, θ) − 𝒦_ab|²
//! E_B = 4F²𝒥(Γ, π/2 − θ) / |𝒥(iΓ, θ) − 𝒦_ab|²
//! ```
//!
//! The bare formulas hold for `μ = +1`. For a general shared-bath weight the
//! same expressions are exact once `Γ` is read as the cross rate `Γ|μ|` and
//! the angle as `θ = φ − arg μ`; with real positive `p_a = p_b` (so `μ = −1`)
//! this means `θ = φ − π`. Local damping always uses `Γ_a`, `Γ_b`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::SystemParams;
use crate::moments::{self, Energies, MomentState};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyKernels {
    pub k_bb: f64,
    pub k_ab: C64,
    /// `|J|`
    pub coupling: f64,
    /// Cross-dissipation rate `Γ|μ|`.
    pub cross_rate: f64,
    /// Coupling angle relative to the dissipative cross term, `φ − arg μ`.
    pub theta: f64,
    /// `α = π/2 − θ`.
    pub alpha: f64,
}

impl SteadyKernels {
    pub fn new(params: &SystemParams) -> Self {
        let delta = params.drive.detuning;
        let damp_a = params.total_damping_a();
        let damp_b = params.total_damping_b();
        let mu = params.shared.mu();
        let cross_rate = params.shared.gamma * mu.norm();
        let theta = if mu.norm() > 0.0 { params.coupling.phase - mu.arg() } else { params.coupling.phase };
        Self {
            k_bb: 4.0 * delta * delta + damp_b * damp_b,
            k_ab: C64::new(2.0 * delta, damp_a) * C64::new(2.0 * delta, damp_b),
            coupling: params.coupling.magnitude,
            cross_rate,
            theta,
            alpha: std::f64::consts::FRAC_PI_2 - theta,
        }
    }

    /// `𝒥(x, θ)` for complex `x`.
    pub fn j_kernel(&self, x: C64, theta: f64) -> C64 {
        let j = self.coupling;
        4.0 * j * j + x * x - 4.0 * j * x * theta.cos()
    }

    /// `|𝒥(iΓ, θ) − 𝒦_ab|²`.
    pub fn denominator(&self) -> f64 {
        (self.j_kernel(I * self.cross_rate, self.theta) - self.k_ab).norm_sqr()
    }

    /// `𝒥(Γ, α)`, the battery numerator kernel.
    pub fn transfer(&self) -> f64 {
        self.j_kernel(C64::new(self.cross_rate, 0.0), self.alpha).re
    }
}

pub fn denominator(params: &SystemParams) -> f64 {
    SteadyKernels::new(params).denominator()
}

fn checked_denominator(params: &SystemParams, kernels: &SteadyKernels) -> Result<f64> {
    let d = kernels.denominator();
    let scale = [
        params.coupling.magnitude,
        params.drive.detuning.abs(),
        params.total_damping_a(),
        params.total_damping_b(),
        kernels.cross_rate,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if !(d > 1e-24 * scale.powi(4)) {
        return Err(Error::DivergentSteadyState);
    }
    Ok(d)
}

/// Closed-form stationary charger energy.
pub fn energy_a_analytic(params: &SystemParams) -> Result<f64> {
    let k = SteadyKernels::new(params);
    let d = checked_denominator(params, &k)?;
    let f = params.drive.amplitude;
    Ok(params.omega * 4.0 * f * f * k.k_bb / d)
}

/// Closed-form stationary battery energy.
pub fn energy_b_analytic(params: &SystemParams) -> Result<f64> {
    let k = SteadyKernels::new(params);
    let d = checked_denominator(params, &k)?;
    let f = params.drive.amplitude;
    Ok(params.omega * 4.0 * f * f * k.transfer() / d)
}

pub fn energies_analytic(params: &SystemParams) -> Result<Energies> {
    Ok(Energies::new(energy_a_analytic(params)?, energy_b_analytic(params)?))
}

/// Solves `rhs = 0` directly: a 2×2 complex system for the first moments,
/// then a 4×4 real system for `n_a`, `n_b`, `Re⟨a†b⟩`, `Im⟨a†b⟩`.
///
/// Both matrices are read off the right-hand side by probing it with unit
/// vectors, so this route shares no algebra with the closed forms.
pub fn steady_moments_linear(params: &SystemParams) -> Result<MomentState> {
    let zero = MomentState::vacuum();
    let undriven = {
        let mut p = *params;
        p.drive.amplitude = 0.0;
        p
    };

    // first moments: d/dt (a, b) = A (a, b) + c
    let offset = moments::rhs(params, &zero);
    let col_a = moments::rhs(&undriven, &MomentState { mean_a: C64::new(1.0, 0.0), ..zero });
    let col_b = moments::rhs(&undriven, &MomentState { mean_b: C64::new(1.0, 0.0), ..zero });
    let a = vec![col_a.mean_a, col_b.mean_a, col_a.mean_b, col_b.mean_b];
    let means = linalg::solve(a, vec![-offset.mean_a, -offset.mean_b])?;
    let with_means = MomentState { mean_a: means[0], mean_b: means[1], ..zero };

    // second moments are affine in (n_a, n_b, Re c, Im c) once the means are fixed
    let second = |s: &MomentState| -> [f64; 4] {
        let d = moments::rhs(params, s);
        [d.n_a, d.n_b, d.cross_ab.re, d.cross_ab.im]
    };
    let base = second(&with_means);
    let probes = [
        MomentState { n_a: 1.0, ..with_means },
        MomentState { n_b: 1.0, ..with_means },
        MomentState { cross_ab: C64::new(1.0, 0.0), ..with_means },
        MomentState { cross_ab: C64::new(0.0, 1.0), ..with_means },
    ];
    let cols: Vec<[f64; 4]> = probes.iter().map(second).collect();
    let mut m = Vec::with_capacity(16);
    for row in 0..4 {
        for col in &cols {
            m.push(C64::new(col[row] - base[row], 0.0));
        }
    }
    let x = linalg::solve(m, base.iter().map(|v| C64::new(-v, 0.0)).collect())?;
    Ok(MomentState {
        mean_a: means[0],
        mean_b: means[1],
        n_a: x[0].re,
        n_b: x[1].re,
        cross_ab: C64::new(x[2].re, x[3].re),
    })
}

/// Eigenvalues of the first-moment drift matrix.
pub fn drift_eigenvalues(params: &SystemParams) -> [C64; 2] {
    let mut undriven = *params;
    undriven.drive.amplitude = 0.0;
    let zero = MomentState::vacuum();
    let col_a = moments::rhs(&undriven, &MomentState { mean_a: C64::new(1.0, 0.0), ..zero });
    let col_b = moments::rhs(&undriven, &MomentState { mean_b: C64::new(1.0, 0.0), ..zero });
    let (a11, a12, a21, a22) = (col_a.mean_a, col_b.mean_a, col_a.mean_b, col_b.mean_b);
    let half_trace = (a11 + a22) / 2.0;
    let disc = (((a11 - a22) / 2.0).powi(2) + a12 * a21).sqrt();
    [half_trace + disc, half_trace - disc]
}

/// Slowest relaxation rate of the first moments (`−max Re λ`). Non-positive
/// values mean some normal mode is undamped or amplified.
pub fn slowest_decay_rate(params: &SystemParams) -> f64 {
    let [l1, l2] = drift_eigenvalues(params);
    -(l1.re.max(l2.re))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SteadyMethod {
    Analytic,
    LinearSolve,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyStateReport {
    pub e_a: f64,
    pub e_b: f64,
    pub xi: f64,
    /// Only the linear solve produces the moments themselves.
    pub moments: Option<MomentState>,
    pub method: SteadyMethod,
}

pub fn steady_state(params: &SystemParams, method: SteadyMethod) -> Result<SteadyStateReport> {
    match method {
        SteadyMethod::Analytic => {
            let e = energies_analytic(params)?;
            Ok(SteadyStateReport { e_a: e.e_a, e_b: e.e_b, xi: e.xi, moments: None, method })
        }
        SteadyMethod::LinearSolve => {
            let s = steady_moments_linear(params)?;
            let e = moments::energies(&s, params.omega);
            Ok(SteadyStateReport { e_a: e.e_a, e_b: e.e_b, xi: e.xi, moments: Some(s), method })
        }
    }
}
