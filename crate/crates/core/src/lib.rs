//! Simulation and optimization of a laser-driven charger–battery pair of
//! bosonic modes coupled coherently and through an engineered shared
//! reservoir.
//!
//! * [`model`]: parameter set and derived shared-bath rates.
//! * [`moments`]: the closed moment equations and their integration.
//! * [`steady`]: closed-form and linear-solve stationary energies.
//! * [`optimize`]: optimal detuning, super-optimal bath weights and the
//!   comparison quantities built on them.
//! * [`supermode`]: the same dynamics in the Hamiltonian eigenmode basis.
//! * [`fock`]: brute-force density-matrix evolution used as an oracle.
//! * [`scenario`]: declarative scenarios, figure data and verification.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod linalg;
pub mod model;
pub mod moments;
pub mod ode;
pub mod optimize;
pub mod scenario;
pub mod steady;
pub mod supermode;

pub use error::{Error, Result};
pub use model::{CoherentCoupling, DerivedRates, DriveParams, LocalBaths, SharedBath, SystemParams};
pub use moments::{Energies, MomentState, Trajectory};
pub use num_complex::Complex64;
pub use ode::StepControl;
pub use steady::{SteadyMethod, SteadyStateReport};
