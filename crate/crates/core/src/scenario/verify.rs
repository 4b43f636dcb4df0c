//! Verification suite behind `qbcharge verify`: the Fock-space oracle against
//! the moment equations, plus the closed-form/numeric cross-checks.
//!
//! A [`Mutation`] swaps one formula for a tampered copy so the suite can be
//! checked to fail on the right named invariant.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fock::{self, FockDensityMatrix, Lindbladian};
use crate::model::SystemParams;
use crate::moments::{self, MomentState};
use crate::ode::StepControl;
use crate::optimize;
use crate::steady::{self, SteadyMethod};
use crate::supermode;

use super::figures::par_map;
use super::{closed_form_detuning, Preset, ScenarioConfig};

const SEED: u64 = 0x5eed_0b05;
pub const ORACLE_TOL: f64 = 1e-6;
pub const TRUNCATION_TOL: f64 = 1e-9;
pub const PURITY_TOL: f64 = 1e-6;
pub const STEADY_REL_TOL: f64 = 1e-9;
pub const DETUNING_TOL: f64 = 1e-8;
pub const RATIO_REL_TOL: f64 = 1e-6;
pub const GAP_REL_TOL: f64 = 1e-9;
pub const SUPERMODE_TOL: f64 = 1e-9;
pub const PURITY_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyLevel {
    Fast,
    Full,
}

impl VerifyLevel {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fast" => Some(Self::Fast),
            "full" => Some(Self::Full),
            _ => None,
        }
    }
}

/// Tampered formulas used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Drops the factor 2 in front of `Γ` in the dissipative gap term.
    GapFormula,
    /// Uses `κ_a/κ_b` instead of its square root as the optimal ratio.
    RatioFormula,
    /// Flips the sign of the coherent coupling in the moment equations.
    CouplingSign,
    /// Replaces the optimal-detuning square root by `|J|`.
    DetuningFormula,
}

impl Mutation {
    pub const ALL: [Mutation; 4] =
        [Mutation::GapFormula, Mutation::RatioFormula, Mutation::CouplingSign, Mutation::DetuningFormula];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::GapFormula => "gap-formula",
            Mutation::RatioFormula => "ratio-formula",
            Mutation::CouplingSign => "coupling-sign",
            Mutation::DetuningFormula => "detuning-formula",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Name of the check expected to catch this mutation.
    pub fn target(self) -> &'static str {
        match self {
            Mutation::GapFormula => "redistribution-gap",
            Mutation::RatioFormula => "ratio-closed-vs-numeric",
            Mutation::CouplingSign => "fock-oracle",
            Mutation::DetuningFormula => "detuning-closed-vs-numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub mutation: Option<Mutation>,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Small-amplitude parameter set where a six-level truncation is converged.
pub fn oracle_params() -> SystemParams {
    SystemParams::default().with_drive(0.02, 0.0).with_coupling(0.1, 0.0).with_local(0.4, 0.2).with_shared(
        0.2,
        c(1.0, 0.0),
        c(1.0, 0.0),
    )
}

fn random_oracle_params(rng: &mut ChaCha8Rng) -> SystemParams {
    SystemParams::default()
        .with_drive(rng.gen_range(0.005..0.02), rng.gen_range(-0.2..0.2))
        .with_coupling(rng.gen_range(0.0..0.2), rng.gen_range(0.0..2.0 * PI))
        .with_local(rng.gen_range(0.2..0.5), rng.gen_range(0.2..0.5))
        .with_shared(
            rng.gen_range(0.0..0.3),
            C64::from_polar(rng.gen_range(0.7..1.3), rng.gen_range(0.0..2.0 * PI)),
            C64::from_polar(rng.gen_range(0.7..1.3), rng.gen_range(0.0..2.0 * PI)),
        )
}

fn moment_error(a: &MomentState, b: &MomentState) -> f64 {
    let d = [
        (a.mean_a - b.mean_a).norm(),
        (a.mean_b - b.mean_b).norm(),
        (a.n_a - b.n_a).abs(),
        (a.n_b - b.n_b).abs(),
        (a.cross_ab - b.cross_ab).norm(),
    ];
    d.into_iter().fold(0.0, f64::max)
}

/// Oracle-vs-moments comparison on one parameter set.
pub struct OracleComparison {
    pub max_deviation: f64,
    pub min_purity: f64,
    pub truncation_change: f64,
}

pub const ORACLE_T_END: f64 = 20.0;
pub const ORACLE_SAMPLES: usize = 50;

/// Evolves `ρ` from vacuum at truncations 6 and 8 and compares the extracted
/// moments with the moment equations integrated by `moment_params`.
pub fn compare_oracle(params: &SystemParams, moment_params: &SystemParams) -> Result<OracleComparison> {
    let run = |n: usize| -> Result<fock::FockEvolution> {
        let dt = Lindbladian::new(params, n)?.default_dt();
        fock::evolve(params, FockDensityMatrix::vacuum(n), ORACLE_T_END, dt, ORACLE_SAMPLES)
    };
    let runs = par_map(&[6usize, 8], |&n| run(n));
    let mut runs = runs.into_iter();
    let (small, large) = (runs.next().unwrap()?, runs.next().unwrap()?);
    let reference = moments::integrate(
        moment_params,
        MomentState::vacuum(),
        ORACLE_T_END,
        ORACLE_SAMPLES,
        &StepControl::fixed(2e-3),
    )?;
    let max_deviation =
        small.moments.iter().zip(&reference.states).map(|(a, b)| moment_error(a, b)).fold(0.0, f64::max);
    let truncation_change =
        small.moments.iter().zip(&large.moments).map(|(a, b)| moment_error(a, b)).fold(0.0, f64::max);
    let min_purity = small.purity.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(OracleComparison { max_deviation, min_purity, truncation_change })
}

fn moment_params_for(p: &SystemParams, mutation: Option<Mutation>) -> SystemParams {
    if mutation == Some(Mutation::CouplingSign) {
        let phase = (p.coupling.phase + PI) % (2.0 * PI);
        p.with_coupling(p.coupling.magnitude, phase)
    } else {
        *p
    }
}

fn check_oracle(level: VerifyLevel, mutation: Option<Mutation>) -> Result<(bool, String)> {
    let mut sets = vec![oracle_params()];
    if level == VerifyLevel::Full {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        sets.extend((0..8).map(|_| random_oracle_params(&mut rng)));
    }
    let mut worst = OracleComparison { max_deviation: 0.0, min_purity: 1.0, truncation_change: 0.0 };
    let results = par_map(&sets, |p| compare_oracle(p, &moment_params_for(p, mutation)));
    for r in results {
        let r = r?;
        worst.max_deviation = worst.max_deviation.max(r.max_deviation);
        worst.min_purity = worst.min_purity.min(r.min_purity);
        worst.truncation_change = worst.truncation_change.max(r.truncation_change);
    }
    let passed = worst.max_deviation < ORACLE_TOL
        && worst.min_purity > 1.0 - PURITY_TOL
        && worst.truncation_change < TRUNCATION_TOL;
    Ok((
        passed,
        format!(
            "{} sets: max |moments diff| = {:.3e}, min purity = {:.12}, N 6->8 change = {:.3e}",
            sets.len(),
            worst.max_deviation,
            worst.min_purity,
            worst.truncation_change
        ),
    ))
}

fn preset_params() -> Result<Vec<SystemParams>> {
    Preset::ALL
        .into_iter()
        .filter(|&p| p != Preset::Custom)
        .map(|p| ScenarioConfig::preset(p).resolve().map(|r| r.params))
        .collect()
}

fn random_stable_params(rng: &mut ChaCha8Rng) -> SystemParams {
    SystemParams::default()
        .with_drive(rng.gen_range(0.01..0.2), rng.gen_range(-0.5..0.5))
        .with_coupling(rng.gen_range(0.0..0.5), rng.gen_range(0.0..2.0 * PI))
        .with_local(rng.gen_range(0.01..0.2), rng.gen_range(0.01..0.2))
        .with_shared(
            rng.gen_range(0.0..0.5),
            C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..2.0 * PI)),
            C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..2.0 * PI)),
        )
}

fn check_steady(level: VerifyLevel) -> Result<(bool, String)> {
    let mut sets = preset_params()?;
    if level == VerifyLevel::Full {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
        sets.extend((0..200).map(|_| random_stable_params(&mut rng)));
    }
    let mut worst = 0.0f64;
    for p in &sets {
        let a = steady::steady_state(p, SteadyMethod::Analytic)?;
        let l = steady::steady_state(p, SteadyMethod::LinearSolve)?;
        worst = worst.max(rel(a.e_a, l.e_a)).max(rel(a.e_b, l.e_b));
    }
    Ok((worst < STEADY_REL_TOL, format!("{} sets: max relative diff = {worst:.3e}", sets.len())))
}

fn closed_conventional(p: &SystemParams, mutation: Option<Mutation>) -> Result<f64> {
    if mutation == Some(Mutation::DetuningFormula) {
        return Ok(p.coupling.magnitude);
    }
    Ok(closed_form_detuning(p)?.delta_opt)
}

fn check_detuning(level: VerifyLevel, mutation: Option<Mutation>) -> Result<(bool, String)> {
    let base = SystemParams::default().with_drive(0.1, 0.0).with_local(0.05, 0.01);
    let mut sets = vec![base.with_coupling(0.2, 0.0)];
    if level == VerifyLevel::Full {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
        while sets.len() < 20 {
            let ka: f64 = rng.gen_range(0.01..0.1);
            let kb: f64 = rng.gen_range(0.01..0.1);
            let j: f64 = rng.gen_range(0.05..0.5);
            // keep an interior optimum well separated from Δ = 0
            if j * j - (ka * ka + kb * kb) / 8.0 > 1e-3 {
                sets.push(SystemParams::default().with_drive(0.1, 0.0).with_local(ka, kb).with_coupling(j, 0.0));
            }
        }
    }
    let mut worst = 0.0f64;
    for p in &sets {
        let closed = closed_conventional(p, mutation)?.abs();
        let w = 2.0 * p.coupling.magnitude;
        let numeric = optimize::optimal_detuning_numeric(p, (0.0, w))?.delta_opt;
        worst = worst.max((closed - numeric).abs());
    }
    // shared bath plus coherent coupling: the certified cubic
    let shared = base.with_coupling(0.2, 0.0).with_shared(0.4, c(1.0, 0.0), c(1.0, 0.0));
    let cubic = optimize::optimal_detuning_shared(&shared)?;
    let certified = cubic.closed_form == optimize::ClosedFormStatus::Certified;
    Ok((
        worst < DETUNING_TOL && certified,
        format!(
            "{} conventional sets: max |closed - numeric| = {worst:.3e}; shared cubic status {:?}",
            sets.len(),
            cubic.closed_form
        ),
    ))
}

fn closed_ratio(ka: f64, kb: f64, mutation: Option<Mutation>) -> Result<f64> {
    if mutation == Some(Mutation::RatioFormula) {
        return Ok(ka / kb);
    }
    optimize::optimal_ratio(ka, kb)
}

fn check_ratio(level: VerifyLevel, mutation: Option<Mutation>) -> Result<(bool, String)> {
    let mut sets = vec![(0.4, 0.05, 0.01)];
    if level == VerifyLevel::Full {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
        sets.extend((0..20).map(|_| (rng.gen_range(0.05..1.0), rng.gen_range(0.005..0.1), rng.gen_range(0.005..0.1))));
    }
    let mut worst = 0.0f64;
    for &(g, ka, kb) in &sets {
        let base =
            SystemParams::default().with_drive(0.1, 0.0).with_local(ka, kb).with_shared(g, c(1.0, 0.0), c(1.0, 0.0));
        let y = closed_ratio(ka, kb, mutation)?;
        let y0 = optimize::optimal_ratio(ka, kb)?;
        let numeric =
            optimize::optimal_ratio_numeric(&base, optimize::RatioObjective::Battery, (y0 / 20.0, y0 * 20.0))?;
        worst = worst.max(rel(y, numeric));
    }
    Ok((worst < RATIO_REL_TOL, format!("{} sets: max relative |y_closed - argmax E_B| = {worst:.3e}", sets.len())))
}

fn gap_closed(f: f64, g: f64, ka: f64, kb: f64, mutation: Option<Mutation>) -> Result<f64> {
    if mutation == Some(Mutation::GapFormula) {
        let g2 = g * g;
        let coherent = 4.0 / ((ka + kb).powi(2) * ((ka - kb).powi(2) - 4.0 * g2));
        let dissipative = 1.0 / (ka * kb * (g + (ka * kb).sqrt()).powi(2));
        return Ok(4.0 * g2 * f * f * (coherent + dissipative));
    }
    optimize::redistribution_gap(f, g, ka, kb)
}

fn check_gap(level: VerifyLevel, mutation: Option<Mutation>) -> Result<(bool, String)> {
    let mut sets = vec![(0.1, 0.4, 0.05, 0.01)];
    if level == VerifyLevel::Full {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
        while sets.len() < 51 {
            let s: (f64, f64, f64, f64) = (
                rng.gen_range(0.01..0.3),
                rng.gen_range(0.05..1.0),
                rng.gen_range(0.005..0.1),
                rng.gen_range(0.005..0.1),
            );
            let pole = (s.2 - s.3).powi(2) - 4.0 * s.1 * s.1;
            // stay clear of the pole and of Δ_opt² ≤ 0
            if pole.abs() > 1e-3 && s.1 * s.1 / 4.0 > (s.2 * s.2 + s.3 * s.3) / 8.0 {
                sets.push(s);
            }
        }
    }
    let mut worst = 0.0f64;
    let mut headline = f64::NAN;
    for &(f, g, ka, kb) in &sets {
        let closed = gap_closed(f, g, ka, kb, mutation)?;
        let general = optimize::redistribution_gap_via_general(f, g, ka, kb)?;
        if headline.is_nan() {
            headline = closed;
        }
        worst = worst.max(rel(closed, general));
    }
    Ok((
        worst < GAP_REL_TOL,
        format!("{} sets: gap at figure parameters = {headline:.6}, max relative diff = {worst:.3e}", sets.len()),
    ))
}

fn check_supermode(level: VerifyLevel) -> Result<(bool, String)> {
    let fig2 = SystemParams::default().with_drive(0.1, 0.2).with_coupling(0.2, 0.0).with_local(0.05, 0.01).with_shared(
        0.4,
        c(1.0, 0.0),
        c(1.0, 0.0),
    );
    let mut sets = vec![fig2, fig2.with_coupling(0.2, PI)];
    if level == VerifyLevel::Full {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
        sets.extend((0..10).map(|_| random_stable_params(&mut rng)));
    }
    let control = StepControl::fixed(0.02);
    let mut worst = 0.0f64;
    for p in &sets {
        let t_end = 300.0 / p.time_scale();
        let samples = 301;
        let local = moments::integrate(p, MomentState::vacuum(), t_end, samples, &control)?;
        let phi = p.coupling.phase;
        let global = supermode::integrate_global(
            p,
            supermode::to_supermode(&MomentState::vacuum(), phi),
            t_end,
            samples,
            &control,
        )?;
        for (a, g) in local.states.iter().zip(&global) {
            worst = worst.max(moment_error(a, &supermode::from_supermode(g, phi)));
        }
    }
    let p_eq = |phase| fig2.with_coupling(0.2, phase);
    let diag_ok = supermode::decoherence_free_mode(&p_eq(0.0)) == Some(supermode::Supermode::Minus)
        && supermode::decoherence_free_mode(&p_eq(PI)) == Some(supermode::Supermode::Plus);
    Ok((
        worst < SUPERMODE_TOL && diag_ok,
        format!("{} sets: max deviation = {worst:.3e}; decoherence-free diagnosis ok = {diag_ok}", sets.len()),
    ))
}

fn check_purity(level: VerifyLevel) -> Result<(bool, String)> {
    let mut sets = preset_params()?;
    if level == VerifyLevel::Full {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
        sets.extend((0..20).map(|_| random_stable_params(&mut rng)));
    }
    let mut worst = 0.0f64;
    for p in &sets {
        let tr = moments::integrate(p, MomentState::vacuum(), 300.0 / p.time_scale(), 601, &StepControl::default())?;
        worst = worst.max(tr.max_purity_residual());
    }
    Ok((worst < PURITY_RESIDUAL_TOL, format!("{} trajectories: max residual = {worst:.3e}", sets.len())))
}

type Check = fn(VerifyLevel, Option<Mutation>) -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 7] = [
    ("fock-oracle", check_oracle),
    ("steady-analytic-vs-linear", |l, _| check_steady(l)),
    ("detuning-closed-vs-numeric", check_detuning),
    ("ratio-closed-vs-numeric", check_ratio),
    ("redistribution-gap", check_gap),
    ("supermode-commutation", |l, _| check_supermode(l)),
    ("purity-residual", |l, _| check_purity(l)),
];

/// Runs every check. Numerical errors inside a check count as a failure of
/// that check rather than aborting the suite.
pub fn verify(level: VerifyLevel, mutation: Option<Mutation>) -> VerifyReport {
    let checks = par_map(&CHECKS, |&(name, check)| {
        let start = Instant::now();
        let (passed, detail) = match check(level, mutation) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        CheckResult { name, passed, detail, seconds: start.elapsed().as_secs_f64() }
    });
    VerifyReport { level, mutation, checks }
}
