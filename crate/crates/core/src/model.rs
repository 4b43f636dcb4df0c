//! Physical parameters of the driven charger–battery pair.
//!
//! Mode `a` (the charger) is driven by a classical field of amplitude `F`
//! detuned by `Δ`; mode `b` (the battery) is coupled to it coherently through
//! `J = |J|e^{iφ}` and dissipatively through a shared zero-temperature bath
//! with jump operator `z = p_a a + p_b b` at rate `Γ`. Each mode additionally
//! leaks into its own bath at rate `κ_a`, `κ_b`. All rates share one
//! arbitrary unit (ħ = 1).

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Drive amplitude `F ≥ 0`.
    pub amplitude: f64,
    /// Laser detuning `Δ = ω_L − ω`.
    pub detuning: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentCoupling {
    pub magnitude: f64,
    /// Phase `φ ∈ [0, 2π)`.
    pub phase: f64,
}

impl CoherentCoupling {
    /// Builds a coupling with the phase wrapped into `[0, 2π)`.
    pub fn new(magnitude: f64, phase: f64) -> Self {
        let mut phase = phase.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        if phase >= TAU {
            phase = 0.0;
        }
        Self { magnitude, phase }
    }

    /// `J = |J| e^{iφ}`.
    pub fn complex(&self) -> C64 {
        C64::from_polar(self.magnitude, self.phase)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalBaths {
    pub kappa_a: f64,
    pub kappa_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharedBath {
    pub gamma: f64,
    pub p_a: C64,
    pub p_b: C64,
}

impl SharedBath {
    pub fn gamma_a(&self) -> f64 {
        self.gamma * self.p_a.norm_sqr()
    }

    pub fn gamma_b(&self) -> f64 {
        self.gamma * self.p_b.norm_sqr()
    }

    /// Dissipative cross-coupling weight `μ = −p_b p_a*`.
    pub fn mu(&self) -> C64 {
        -self.p_b * self.p_a.conj()
    }
}

/// Rates induced by the shared bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub mu: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub drive: DriveParams,
    pub coupling: CoherentCoupling,
    pub local: LocalBaths,
    pub shared: SharedBath,
    /// Mode frequency used as the energy unit. Defaults to 1 so that energies
    /// read as mean photon numbers.
    pub omega: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            drive: DriveParams { amplitude: 0.0, detuning: 0.0 },
            coupling: CoherentCoupling { magnitude: 0.0, phase: 0.0 },
            local: LocalBaths { kappa_a: 0.0, kappa_b: 0.0 },
            shared: SharedBath { gamma: 0.0, p_a: C64::new(1.0, 0.0), p_b: C64::new(1.0, 0.0) },
            omega: 1.0,
        }
    }
}

impl SystemParams {
    pub fn with_drive(mut self, amplitude: f64, detuning: f64) -> Self {
        self.drive = DriveParams { amplitude, detuning };
        self
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.drive.detuning = detuning;
        self
    }

    pub fn with_coupling(mut self, magnitude: f64, phase: f64) -> Self {
        self.coupling = CoherentCoupling::new(magnitude, phase);
        self
    }

    pub fn with_local(mut self, kappa_a: f64, kappa_b: f64) -> Self {
        self.local = LocalBaths { kappa_a, kappa_b };
        self
    }

    pub fn with_shared(mut self, gamma: f64, p_a: C64, p_b: C64) -> Self {
        self.shared = SharedBath { gamma, p_a, p_b };
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    /// Checks every invariant and hands the parameters back unchanged.
    pub fn validate(self) -> Result<Self> {
        let reals = [
            ("F", self.drive.amplitude),
            ("Delta", self.drive.detuning),
            ("J_mag", self.coupling.magnitude),
            ("J_phase", self.coupling.phase),
            ("kappa_a", self.local.kappa_a),
            ("kappa_b", self.local.kappa_b),
            ("Gamma", self.shared.gamma),
            ("p_a_re", self.shared.p_a.re),
            ("p_a_im", self.shared.p_a.im),
            ("p_b_re", self.shared.p_b.re),
            ("p_b_im", self.shared.p_b.im),
            ("omega", self.omega),
        ];
        for (name, value) in reals {
            if !value.is_finite() {
                return Err(Error::NonFinite { name });
            }
        }
        let nonnegative = [
            ("F", self.drive.amplitude),
            ("J_mag", self.coupling.magnitude),
            ("kappa_a", self.local.kappa_a),
            ("kappa_b", self.local.kappa_b),
            ("Gamma", self.shared.gamma),
        ];
        for (name, value) in nonnegative {
            if value < 0.0 {
                return Err(Error::NegativeRate { name, value });
            }
        }
        if self.omega <= 0.0 {
            return Err(Error::NegativeRate { name: "omega", value: self.omega });
        }
        if !(0.0..TAU).contains(&self.coupling.phase) {
            return Err(Error::PhaseOutOfRange(self.coupling.phase));
        }
        Ok(self)
    }

    /// Rescales `p_a`, `p_b` by `1/√|p_a p_b|` and absorbs the factor into
    /// `Γ`, so that `|μ| = 1` while `Γ_a`, `Γ_b` and `Γμ` stay fixed.
    pub fn normalize_shared(&self) -> Result<Self> {
        let shared = &self.shared;
        if shared.p_a == C64::new(0.0, 0.0) {
            return Err(Error::ZeroCoupling("p_a"));
        }
        if shared.p_b == C64::new(0.0, 0.0) {
            return Err(Error::ZeroCoupling("p_b"));
        }
        let product = shared.p_a.norm() * shared.p_b.norm();
        if product == 1.0 {
            return Ok(*self);
        }
        let scale = product.sqrt().recip();
        let mut out = *self;
        out.shared = SharedBath { gamma: shared.gamma * product, p_a: shared.p_a * scale, p_b: shared.p_b * scale };
        Ok(out)
    }

    pub fn derived_rates(&self) -> DerivedRates {
        DerivedRates { gamma_a: self.shared.gamma_a(), gamma_b: self.shared.gamma_b(), mu: self.shared.mu() }
    }

    /// Built-in detuning `|Δ_in| = |J|` (the splitting of the Hamiltonian
    /// eigenfrequencies `ω ± |J|`).
    pub fn built_in_detuning(&self) -> f64 {
        self.coupling.magnitude
    }

    /// Total damping of the charger, `Γ_a + κ_a`.
    pub fn total_damping_a(&self) -> f64 {
        self.shared.gamma_a() + self.local.kappa_a
    }

    /// Total damping of the battery, `Γ_b + κ_b`.
    pub fn total_damping_b(&self) -> f64 {
        self.shared.gamma_b() + self.local.kappa_b
    }

    /// Time scale used for dimensionless reporting: `|J|`, or `Γ/2` for a
    /// purely dissipative coupling, or 1 when the modes are uncoupled.
    pub fn time_scale(&self) -> f64 {
        if self.coupling.magnitude > 0.0 {
            self.coupling.magnitude
        } else if self.shared.gamma > 0.0 {
            self.shared.gamma / 2.0
        } else {
            1.0
        }
    }
}
