//! Optimal charging parameters and the comparisons built on them.
//!
//! The battery numerator `𝒥(Γ, α)` does not depend on `Δ`, so maximizing the
//! stationary battery energy over the detuning is the same as minimizing the
//! quartic `|𝒥(iΓ, θ) − 𝒦_ab|²`. Its stationarity condition is the depressed
//! cubic
//!
//! ```text
//! Δ³ + pΔ + q = 0,   p = (S² − 2R)/8,   q = QS/16,
//! S = X_a + X_b,  R = 4|J|² − Γ² + X_a X_b,  Q = 4|J|Γ cos θ,
//! ```
//!
//! with `X_i = Γ_i + κ_i`. At `Γ = 0` the nonzero roots are
//! `±√(|J|² − (κ_a² + κ_b²)/8)`.
//!
//! Energies returned by the specialized closed forms in this module
//! ([`super_optimal_energies`], [`redistribution_gap`], [`delta_e_coh`], ...)
//! are photon numbers, i.e. in units of `ω`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::moments::Energies;
use crate::steady::{self, SteadyKernels};

/// Points in the coarse grid of the numeric optimizers.
pub const GRID_POINTS: usize = 4001;
/// Bracket width at which golden-section refinement stops.
pub const REFINE_TOL: f64 = 1e-11;
/// Relative disagreement in achieved energy above which a closed form is
/// rejected in favour of the numeric optimum.
pub const CERTIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetuningMethod {
    ClosedFormConventional,
    ClosedFormShared,
    Numeric,
}

/// Outcome of checking a closed-form optimum against the numeric one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedFormStatus {
    NotChecked,
    Certified,
    /// The closed form disagreed with the numeric optimum; the numeric
    /// result was returned.
    BranchMismatch,
    /// The closed form could not be evaluated; the numeric result was
    /// returned.
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetuningOptimum {
    /// Maximizing detuning. Among equally good maxima the positive one for
    /// closed forms, the leftmost one for the numeric search.
    pub delta_opt: f64,
    /// Every local maximum of `E_B(Δ)` found, ascending.
    pub branches: Vec<f64>,
    pub achieved_e_b: f64,
    pub method: DetuningMethod,
    pub closed_form: ClosedFormStatus,
}

fn battery_energy_at(params: &SystemParams, delta: f64) -> f64 {
    steady::energy_b_analytic(&params.with_detuning(delta)).unwrap_or(f64::INFINITY)
}

/// `Δ_opt = ±√(Δ_in² − κ²/8)` for coherent coupling without a shared bath.
///
/// `achieved_e_b` is the stationary battery photon number at `Δ_opt` for
/// drive amplitude `amplitude`; it is infinite when `κ_a = κ_b = 0`.
pub fn optimal_detuning_conventional(
    coupling: f64,
    kappa_a: f64,
    kappa_b: f64,
    amplitude: f64,
) -> Result<DetuningOptimum> {
    let params = SystemParams::default()
        .with_drive(amplitude, 0.0)
        .with_coupling(coupling, 0.0)
        .with_local(kappa_a, kappa_b)
        .validate()?;
    let radicand = coupling * coupling - (kappa_a * kappa_a + kappa_b * kappa_b) / 8.0;
    if radicand < 0.0 {
        let fallback = DetuningOptimum {
            delta_opt: 0.0,
            branches: vec![0.0],
            achieved_e_b: battery_energy_at(&params, 0.0),
            method: DetuningMethod::Numeric,
            closed_form: ClosedFormStatus::Undefined,
        };
        return Err(Error::NoInteriorOptimum { fallback: Box::new(fallback) });
    }
    let delta = radicand.sqrt();
    Ok(DetuningOptimum {
        delta_opt: delta,
        branches: vec![-delta, delta],
        achieved_e_b: battery_energy_at(&params, delta),
        method: DetuningMethod::ClosedFormConventional,
        closed_form: ClosedFormStatus::NotChecked,
    })
}

/// Coefficients `(p, q)` of the stationarity cubic `Δ³ + pΔ + q = 0`.
pub fn detuning_cubic(params: &SystemParams) -> (f64, f64) {
    let k = SteadyKernels::new(params);
    let xa = params.total_damping_a();
    let xb = params.total_damping_b();
    let s = xa + xb;
    let g = k.cross_rate;
    let j = k.coupling;
    let r = 4.0 * j * j - g * g + xa * xb;
    let q_coef = 4.0 * j * g * k.theta.cos();
    ((s * s - 2.0 * r) / 8.0, q_coef * s / 16.0)
}

/// Cardano roots of `Δ³ + pΔ + q = 0` from all three complex cube-root
/// branches. `None` when the Cardano term vanishes (`p = q = 0`).
pub fn cardano_roots(p: f64, q: f64) -> Option<[C64; 3]> {
    let half_q = C64::new(-q / 2.0, 0.0);
    let disc = C64::new(q * q / 4.0 + p * p * p / 27.0, 0.0).sqrt();
    let (c1, c2) = (half_q + disc, half_q - disc);
    let cube = if c1.norm() >= c2.norm() { c1 } else { c2 };
    if cube.norm() == 0.0 {
        return None;
    }
    let u0 = cube.powf(1.0 / 3.0);
    let rotation = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let mut roots = [C64::new(0.0, 0.0); 3];
    let mut u = u0;
    for root in roots.iter_mut() {
        *root = u - p / (3.0 * u);
        u *= rotation;
    }
    Some(roots)
}

/// Real critical points of `|𝒥(iΓ, θ) − 𝒦_ab|²` that are minima, i.e. the
/// local maxima of `E_B(Δ)`.
pub fn closed_form_detuning_branches(params: &SystemParams) -> Option<Vec<f64>> {
    let (p, q) = detuning_cubic(params);
    let roots = cardano_roots(p, q)?;
    let scale = p.abs().sqrt() + q.abs().cbrt();
    let mut real: Vec<f64> =
        roots.iter().filter(|r| r.im.abs() <= 1e-7 * scale).map(|r| r.re).filter(|d| 3.0 * d * d + p > 0.0).collect();
    real.sort_by(f64::total_cmp);
    real.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * scale);
    if real.is_empty() {
        None
    } else {
        Some(real)
    }
}

fn search_half_width(params: &SystemParams) -> f64 {
    let k = SteadyKernels::new(params);
    let w = 2.0 * k.coupling + params.total_damping_a() + params.total_damping_b() + k.cross_rate;
    if w > 0.0 {
        w
    } else {
        1.0
    }
}

/// Optimal detuning in the presence of the shared bath, from the
/// stationarity cubic, certified against [`optimal_detuning_numeric`].
pub fn optimal_detuning_shared(params: &SystemParams) -> Result<DetuningOptimum> {
    let params = params.validate()?;
    let w = search_half_width(&params);
    let numeric = optimal_detuning_numeric(&params, (-w, w))?;
    let Some(branches) = closed_form_detuning_branches(&params) else {
        return Ok(DetuningOptimum { closed_form: ClosedFormStatus::Undefined, ..numeric });
    };
    let mut best = branches[0];
    let mut best_e = battery_energy_at(&params, best);
    for &d in &branches[1..] {
        let e = battery_energy_at(&params, d);
        // ties go to the positive branch
        if e > best_e * (1.0 + 1e-12) || (e >= best_e * (1.0 - 1e-12) && d > best) {
            best = d;
            best_e = e;
        }
    }
    let agree = if best_e.is_infinite() || numeric.achieved_e_b.is_infinite() {
        best_e == numeric.achieved_e_b
    } else {
        (best_e - numeric.achieved_e_b).abs() <= CERTIFY_TOL * numeric.achieved_e_b.abs().max(f64::MIN_POSITIVE)
    };
    if !agree {
        return Ok(DetuningOptimum { closed_form: ClosedFormStatus::BranchMismatch, ..numeric });
    }
    Ok(DetuningOptimum {
        delta_opt: best,
        branches,
        achieved_e_b: best_e,
        method: DetuningMethod::ClosedFormShared,
        closed_form: ClosedFormStatus::Certified,
    })
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        // stop once the bracket no longer shrinks in floating point
        if x1 >= x2 {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    [(x1, f1), (x2, f2)].into_iter().fold((x, fx), |best, c| if c.1 > best.1 { c } else { best })
}

/// Grid search plus golden-section refinement of every local maximum.
/// Returns `(argmax, max, refined local maxima ascending)`; a flat landscape
/// yields the leftmost grid point.
fn grid_maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64, Vec<(f64, f64)>) {
    let n = points.max(3);
    let xs: Vec<f64> =
        (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let fmax = fs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if fs.iter().all(|&v| v == fmax) {
        return (xs[0], fmax, vec![(xs[0], fmax)]);
    }
    let mut peaks = Vec::new();
    for i in 0..n {
        let left = if i == 0 { f64::NEG_INFINITY } else { fs[i - 1] };
        let right = if i + 1 == n { f64::NEG_INFINITY } else { fs[i + 1] };
        if fs[i] > left && fs[i] >= right {
            let a = xs[i.saturating_sub(1)];
            let b = xs[(i + 1).min(n - 1)];
            let refined = if fs[i].is_infinite() { (xs[i], fs[i]) } else { golden_section_max(&f, a, b, REFINE_TOL) };
            peaks.push(refined);
        }
    }
    let mut best = peaks[0];
    for &p in &peaks[1..] {
        if p.1 > best.1 * (1.0 + 1e-12) || (best.1.is_finite() && p.1 > best.1 && p.1 - best.1 > 1e-12 * best.1.abs()) {
            best = p;
        }
    }
    (best.0, best.1, peaks)
}

/// Numeric argmax of the stationary battery energy over `Δ ∈ range`.
pub fn optimal_detuning_numeric(params: &SystemParams, range: (f64, f64)) -> Result<DetuningOptimum> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidArgument(format!("detuning range {range:?} is empty or infinite")));
    }
    let (delta, e, peaks) = grid_maximize(|d| battery_energy_at(params, d), lo, hi, GRID_POINTS);
    Ok(DetuningOptimum {
        delta_opt: delta,
        branches: peaks.iter().map(|p| p.0).collect(),
        achieved_e_b: e,
        method: DetuningMethod::Numeric,
        closed_form: ClosedFormStatus::NotChecked,
    })
}

fn require_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::ZeroRate(name))
    }
}

/// Super-optimal weight ratio `y = |p_a|/|p_b| = √(κ_a/κ_b)`, i.e.
/// `Γ_a/Γ_b = κ_a/κ_b`.
pub fn optimal_ratio(kappa_a: f64, kappa_b: f64) -> Result<f64> {
    require_positive("kappa_a", kappa_a)?;
    require_positive("kappa_b", kappa_b)?;
    Ok((kappa_a / kappa_b).sqrt())
}

/// Shared-bath-only configuration (`J = 0`, `Δ = 0`) with weights
/// `p_a = √y`, `p_b = 1/√y`, so that `|p_a p_b| = 1` and `|p_a|/|p_b| = y`.
/// At `y = √(κ_a/κ_b)` these are the weights `(κ_a/κ_b)^{±1/4}`.
pub fn ratio_params(base: &SystemParams, y: f64) -> SystemParams {
    let mut p = base.with_coupling(0.0, 0.0).with_detuning(0.0);
    p.shared.p_a = C64::new(y.sqrt(), 0.0);
    p.shared.p_b = C64::new(1.0 / y.sqrt(), 0.0);
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioOptimum {
    pub y_opt: f64,
    pub achieved: Energies,
}

/// The super-optimal point for the drive, `Γ` and local rates of `base`,
/// evaluated with the general closed forms.
pub fn super_optimal_ratio(base: &SystemParams) -> Result<RatioOptimum> {
    let y = optimal_ratio(base.local.kappa_a, base.local.kappa_b)?;
    let achieved = steady::energies_analytic(&ratio_params(base, y))?;
    Ok(RatioOptimum { y_opt: y, achieved })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioObjective {
    Charger,
    Battery,
    Total,
}

impl RatioObjective {
    fn pick(self, e: &Energies) -> f64 {
        match self {
            Self::Charger => e.e_a,
            Self::Battery => e.e_b,
            Self::Total => e.xi,
        }
    }
}

pub fn ratio_energies(base: &SystemParams, y: f64) -> Result<Energies> {
    steady::energies_analytic(&ratio_params(base, y))
}

/// Numeric argmax over `y ∈ range` of the chosen stationary energy, on a
/// logarithmic grid refined by golden section in `ln y`.
pub fn optimal_ratio_numeric(base: &SystemParams, objective: RatioObjective, range: (f64, f64)) -> Result<f64> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("ratio range {range:?} must be positive and nonempty")));
    }
    let f = |ln_y: f64| match ratio_energies(base, ln_y.exp()) {
        Ok(e) => objective.pick(&e),
        Err(_) => f64::INFINITY,
    };
    let (ln_y, _, _) = grid_maximize(f, lo.ln(), hi.ln(), GRID_POINTS);
    Ok(ln_y.exp())
}

/// Closed-form super-optimal stationary energies. `E_B` and `ξ` are the
/// reported expressions; the charger energy is `ξ − E_B`.
pub fn super_optimal_energies(amplitude: f64, gamma: f64, kappa_a: f64, kappa_b: f64) -> Result<Energies> {
    require_positive("kappa_a", kappa_a)?;
    require_positive("kappa_b", kappa_b)?;
    if gamma < 0.0 {
        return Err(Error::NegativeRate { name: "Gamma", value: gamma });
    }
    let f2 = amplitude * amplitude;
    let root = (kappa_a * kappa_b).sqrt();
    let den = (2.0 * gamma + root).powi(2);
    let e_b = 4.0 * gamma * gamma * f2 / (kappa_a * kappa_b * den);
    let xi =
        4.0 * f2 * (kappa_a * kappa_b * kappa_b + 2.0 * gamma * kappa_b * root + gamma * gamma * (kappa_a + kappa_b))
            / (kappa_a * kappa_a * kappa_b * den);
    Ok(Energies { e_a: xi - e_b, e_b, xi })
}

fn pole_check(name: &'static str, kappa_a: f64, kappa_b: f64, rate: f64) -> Result<()> {
    let lhs = (kappa_a - kappa_b).powi(2);
    let rhs = 4.0 * rate * rate;
    if (lhs - rhs).abs() <= 1e-12 * lhs.max(rhs) || lhs == rhs {
        return Err(Error::PoleAtResonance(name));
    }
    Ok(())
}

/// Redistribution gap `𝒢_B^r = E^S_{B,sup-opt} − E_{B,opt}` under `Γ = 2|J|`,
/// as a single closed form.
pub fn redistribution_gap(amplitude: f64, gamma: f64, kappa_a: f64, kappa_b: f64) -> Result<f64> {
    require_positive("kappa_a", kappa_a)?;
    require_positive("kappa_b", kappa_b)?;
    pole_check("Gamma", kappa_a, kappa_b, gamma)?;
    let g2 = gamma * gamma;
    let coherent = 4.0 / ((kappa_a + kappa_b).powi(2) * ((kappa_a - kappa_b).powi(2) - 4.0 * g2));
    let dissipative = 1.0 / (kappa_a * kappa_b * (2.0 * gamma + (kappa_a * kappa_b).sqrt()).powi(2));
    Ok(4.0 * g2 * amplitude * amplitude * (coherent + dissipative))
}

/// Maximal stationary battery photon number with coherent coupling only,
/// from the general closed form at the optimal detuning.
pub fn conventional_optimal_energy(amplitude: f64, coupling: f64, kappa_a: f64, kappa_b: f64) -> Result<f64> {
    match optimal_detuning_conventional(coupling, kappa_a, kappa_b, amplitude) {
        Ok(opt) => Ok(opt.achieved_e_b),
        Err(Error::NoInteriorOptimum { fallback }) => Ok(fallback.achieved_e_b),
        Err(e) => Err(e),
    }
}

/// [`redistribution_gap`] evaluated through the general closed forms.
pub fn redistribution_gap_via_general(amplitude: f64, gamma: f64, kappa_a: f64, kappa_b: f64) -> Result<f64> {
    let base = SystemParams::default().with_drive(amplitude, 0.0).with_local(kappa_a, kappa_b).with_shared(
        gamma,
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
    );
    let sup = super_optimal_ratio(&base)?.achieved.e_b;
    let conv = conventional_optimal_energy(amplitude, gamma / 2.0, kappa_a, kappa_b)?;
    Ok(sup - conv)
}

/// Stationary photon number of a single directly driven mode, `4F²/κ²`.
pub fn single_battery_energy(amplitude: f64, kappa: f64) -> Result<f64> {
    require_positive("kappa", kappa)?;
    Ok(4.0 * amplitude * amplitude / (kappa * kappa))
}

/// `ΔE_coh` as the reported closed form.
///
/// This expression is the coherent term of [`redistribution_gap`] with `Γ`
/// replaced by `J` rather than `2J`, so it does not equal
/// `E_{B,opt} − E_single`; use [`delta_e_coh_via_general`] for that
/// difference. Kept for comparison with the reported κ_b → 0 limit
/// `4F²/(4J² − κ²)`.
pub fn delta_e_coh(amplitude: f64, coupling: f64, kappa: f64, kappa_b: f64) -> Result<f64> {
    require_positive("kappa", kappa)?;
    pole_check("J", kappa, kappa_b, coupling)?;
    let j2 = coupling * coupling;
    let term = -4.0 * j2 / ((kappa + kappa_b).powi(2) * ((kappa - kappa_b).powi(2) - 4.0 * j2));
    Ok(4.0 * amplitude * amplitude * (term - 1.0 / (kappa * kappa)))
}

/// `ΔE_diss = E^S_{B,sup-opt} − E_single` as the reported closed form.
pub fn delta_e_diss(amplitude: f64, gamma: f64, kappa: f64, kappa_b: f64) -> Result<f64> {
    require_positive("kappa", kappa)?;
    require_positive("kappa_b", kappa_b)?;
    let inner = gamma * gamma * kappa / (kappa_b * (2.0 * gamma + (kappa * kappa_b).sqrt()).powi(2)) - 1.0;
    Ok(4.0 * amplitude * amplitude * inner / (kappa * kappa))
}

/// `E_{B,opt} − E_single` with the optimum from the general closed form.
pub fn delta_e_coh_via_general(amplitude: f64, coupling: f64, kappa: f64, kappa_b: f64) -> Result<f64> {
    Ok(conventional_optimal_energy(amplitude, coupling, kappa, kappa_b)? - single_battery_energy(amplitude, kappa)?)
}

/// `E^S_{B,sup-opt} − E_single` with the super-optimal energy from the
/// general closed form.
pub fn delta_e_diss_via_general(amplitude: f64, gamma: f64, kappa: f64, kappa_b: f64) -> Result<f64> {
    let base = SystemParams::default().with_drive(amplitude, 0.0).with_local(kappa, kappa_b).with_shared(
        gamma,
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
    );
    Ok(super_optimal_ratio(&base)?.achieved.e_b - single_battery_energy(amplitude, kappa)?)
}

/// Charger-mediated storage against a directly driven battery with the
/// same dissipation `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub e_single: f64,
    /// `E_{B,opt} − E_single` (coherent charger, optimal detuning).
    pub delta_e_coh: f64,
    /// `E^S_{B,sup-opt} − E_single` (dissipative charger, optimal weights).
    pub delta_e_diss: f64,
    /// Redistribution gap at the same `Γ`, from its closed form.
    pub g_b_r: f64,
}

pub fn comparison_report(
    amplitude: f64,
    coupling: f64,
    gamma: f64,
    kappa: f64,
    kappa_b: f64,
) -> Result<ComparisonReport> {
    let e_single = single_battery_energy(amplitude, kappa)?;
    let e_coh = conventional_optimal_energy(amplitude, coupling, kappa, kappa_b)?;
    let e_sup = super_optimal_energies(amplitude, gamma, kappa, kappa_b)?.e_b;
    Ok(ComparisonReport {
        e_single,
        delta_e_coh: e_coh - e_single,
        delta_e_diss: e_sup - e_single,
        g_b_r: redistribution_gap(amplitude, gamma, kappa, kappa_b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const F: f64 = 0.1;
    const KA: f64 = 0.05;
    const KB: f64 = 0.01;

    fn shared_added(phase: f64) -> SystemParams {
        SystemParams::default().with_drive(F, 0.0).with_coupling(0.2, phase).with_local(KA, KB).with_shared(
            0.4,
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
        )
    }

    #[test]
    fn conventional_closed_form() {
        let opt = optimal_detuning_conventional(0.2, KA, KB, F).unwrap();
        assert!((opt.delta_opt - 0.1991858).abs() < 1e-7);
        assert!((opt.delta_opt - (0.04f64 - 0.000325).sqrt()).abs() < 1e-16);
        assert_eq!(opt.branches, vec![-opt.delta_opt, opt.delta_opt]);
        assert!((opt.achieved_e_b - 11.139).abs() < 1e-3);
        let p = SystemParams::default().with_drive(F, 0.0).with_coupling(0.2, 0.0).with_local(KA, KB);
        assert_eq!(battery_energy_at(&p, -opt.delta_opt), battery_energy_at(&p, opt.delta_opt));
    }

    #[test]
    fn conventional_ideal_case_hits_built_in_detuning() {
        let opt = optimal_detuning_conventional(0.2, 0.0, 0.0, F).unwrap();
        assert_eq!(opt.delta_opt, 0.2);
        assert!(opt.achieved_e_b.is_infinite());
    }

    #[test]
    fn conventional_without_interior_optimum() {
        match optimal_detuning_conventional(0.01, 0.05, 0.05, F) {
            Err(Error::NoInteriorOptimum { fallback }) => {
                assert_eq!(fallback.delta_opt, 0.0);
                assert_eq!(fallback.method, DetuningMethod::Numeric);
            }
            other => panic!("expected NoInteriorOptimum, got {other:?}"),
        }
    }

    #[test]
    fn numeric_matches_conventional() {
        let p = SystemParams::default().with_drive(F, 0.0).with_coupling(0.2, 0.0).with_local(KA, KB);
        let num = optimal_detuning_numeric(&p, (-0.4, 0.4)).unwrap();
        let closed = optimal_detuning_conventional(0.2, KA, KB, F).unwrap();
        assert_eq!(num.branches.len(), 2);
        for (a, b) in num.branches.iter().zip(&closed.branches) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert!((num.achieved_e_b - closed.achieved_e_b).abs() < 1e-10 * closed.achieved_e_b);
    }

    #[test]
    fn numeric_is_independent_of_drive_strength() {
        let p = shared_added(0.0);
        let a = optimal_detuning_numeric(&p, (-0.4, 0.4)).unwrap();
        let b = optimal_detuning_numeric(&p.with_drive(0.37, 0.0), (-0.4, 0.4)).unwrap();
        assert!((a.delta_opt - b.delta_opt).abs() < 1e-9);
    }

    #[test]
    fn numeric_flat_landscape_is_leftmost() {
        let p = shared_added(0.0).with_drive(0.0, 0.0);
        let num = optimal_detuning_numeric(&p, (-0.4, 0.4)).unwrap();
        assert_eq!(num.delta_opt, -0.4);
        assert!(optimal_detuning_numeric(&p, (0.4, -0.4)).is_err());
    }

    #[test]
    fn numeric_without_coherent_coupling_is_zero() {
        let p = ratio_params(&shared_added(0.0), 1.0);
        let num = optimal_detuning_numeric(&p, (-1.0, 1.0)).unwrap();
        assert!(num.delta_opt.abs() < 1e-9);
    }

    #[test]
    fn shared_reduces_to_conventional_without_bath() {
        let p = shared_added(0.0).with_shared(0.0, C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        let shared = optimal_detuning_shared(&p).unwrap();
        let conv = optimal_detuning_conventional(0.2, KA, KB, F).unwrap();
        assert_eq!(shared.method, DetuningMethod::ClosedFormShared);
        assert_eq!(shared.closed_form, ClosedFormStatus::Certified);
        assert!((shared.delta_opt - conv.delta_opt).abs() < 1e-12);
        assert_eq!(shared.branches.len(), 2);
    }

    #[test]
    fn shared_added_fig2_matches_numeric() {
        for phase in [0.0, std::f64::consts::PI] {
            let p = shared_added(phase);
            let shared = optimal_detuning_shared(&p).unwrap();
            assert_eq!(shared.closed_form, ClosedFormStatus::Certified);
            let num = optimal_detuning_numeric(&p, (-0.4, 0.4)).unwrap();
            assert!((shared.delta_opt - num.delta_opt).abs() < 1e-6);
            // frozen from an independent grid evaluation (200001 points)
            assert!((shared.delta_opt.abs() - 0.199608).abs() < 1e-5);
            assert!((shared.achieved_e_b - 10.88957).abs() < 1e-4);
        }
    }

    #[test]
    fn shared_without_coupling_is_zero_detuning() {
        let p = ratio_params(&shared_added(0.0), 3.0);
        let opt = optimal_detuning_shared(&p).unwrap();
        assert!(opt.delta_opt.abs() < 1e-12);
    }

    #[test]
    fn cardano_recovers_known_roots() {
        // (Δ − 1)(Δ − 2)(Δ + 3) = Δ³ − 7Δ + 6
        let mut roots: Vec<f64> = cardano_roots(-7.0, 6.0).unwrap().iter().map(|r| r.re).collect();
        roots.sort_by(f64::total_cmp);
        for (r, e) in roots.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((r - e).abs() < 1e-12);
        }
        assert!(cardano_roots(0.0, 0.0).is_none());
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3).powi(2) + 2.0, -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(optimal_ratio(0.02, 0.02).unwrap(), 1.0);
        assert!((optimal_ratio(KA, KB).unwrap() - 2.2360680).abs() < 1e-7);
        assert!(matches!(optimal_ratio(0.0, KB), Err(Error::ZeroRate("kappa_a"))));
        let base = shared_added(0.0);
        let num = optimal_ratio_numeric(&base, RatioObjective::Battery, (0.01, 100.0)).unwrap();
        assert!((num / 5f64.sqrt() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ratio_params_keep_unit_mu() {
        let p = ratio_params(&shared_added(0.0), 7.0);
        assert!((p.shared.mu().norm() - 1.0).abs() < 1e-15);
        assert!((p.shared.gamma_a() / p.shared.gamma_b() - 49.0).abs() < 1e-12);
        assert_eq!(p.coupling.magnitude, 0.0);
        assert_eq!(p.drive.detuning, 0.0);
    }

    #[test]
    fn super_optimal_closed_forms() {
        let e = super_optimal_energies(F, 0.4, KA, KB).unwrap();
        assert!((e.e_b - 18.927).abs() < 1e-3);
        assert!((e.xi - 23.147).abs() < 1e-3);
        assert!((e.e_a - 4.2207).abs() < 1e-3);
        // simplified charger expression 4F²(Γ + √κ_aκ_b)² / (κ_a²(2Γ + √κ_aκ_b)²)
        let r = (KA * KB).sqrt();
        let simplified = 4.0 * F * F * (0.4 + r).powi(2) / (KA * KA * (0.8 + r).powi(2));
        assert!((e.e_a - simplified).abs() < 1e-12 * simplified);
        let general = super_optimal_ratio(&shared_added(0.0)).unwrap().achieved;
        assert!((general.e_b - e.e_b).abs() < 1e-10 * e.e_b);
        assert!((general.e_a - e.e_a).abs() < 1e-10 * e.e_a);
    }

    #[test]
    fn super_optimal_limits() {
        let e = super_optimal_energies(F, 0.0, KA, KB).unwrap();
        assert_eq!(e.e_b, 0.0);
        assert!((e.e_a - 4.0 * F * F / (KA * KA)).abs() < 1e-12);
        let mut last = 0.0;
        for g in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let eb = super_optimal_energies(F, g, KA, KB).unwrap().e_b;
            assert!(eb > last);
            last = eb;
        }
        let far = super_optimal_energies(F, 1e4, KA, KB).unwrap().e_b;
        let limit = F * F / (KA * KB);
        assert!((far - limit).abs() < 1e-3 * limit);
        assert!(super_optimal_energies(F, 0.4, KA, 0.0).is_err());
    }

    #[test]
    fn gap_matches_difference_of_optima() {
        let gap = redistribution_gap(F, 0.4, KA, KB).unwrap();
        assert!((gap - 7.788).abs() < 1e-3);
        let via = redistribution_gap_via_general(F, 0.4, KA, KB).unwrap();
        assert!((gap - via).abs() < 1e-9 * gap.abs());
        assert_eq!(redistribution_gap(0.0, 0.4, KA, KB).unwrap(), 0.0);
        assert!(matches!(redistribution_gap(F, 0.02, KA, KB), Err(Error::PoleAtResonance(_))));
    }

    #[test]
    fn gap_with_equal_local_rates() {
        let gap = redistribution_gap(F, 0.4, 0.03, 0.03).unwrap();
        let via = redistribution_gap_via_general(F, 0.4, 0.03, 0.03).unwrap();
        assert!((gap - via).abs() < 1e-9 * gap.abs());
    }

    #[test]
    fn single_battery() {
        assert!((single_battery_energy(F, 0.05).unwrap() - 16.0).abs() < 1e-12);
        assert_eq!(single_battery_energy(0.0, 0.05).unwrap(), 0.0);
        assert!(single_battery_energy(F, 0.0).is_err());
    }

    #[test]
    fn comparison_values() {
        let diss = delta_e_diss(F, 0.4, 0.05, 0.01).unwrap();
        assert!((diss - 2.927).abs() < 1e-3);
        assert!((diss - delta_e_diss_via_general(F, 0.4, 0.05, 0.01).unwrap()).abs() < 1e-9);
        let report = comparison_report(F, 0.2, 0.4, 0.05, 0.01).unwrap();
        assert!((report.delta_e_diss - diss).abs() < 1e-9);
        assert!((report.delta_e_coh + 4.86).abs() < 0.01);
        assert!((report.delta_e_coh - delta_e_coh_via_general(F, 0.2, 0.05, 0.01).unwrap()).abs() < 1e-12);
        // g_b_r = ΔE_diss − ΔE_coh at Γ = 2J
        assert!((report.g_b_r - (report.delta_e_diss - report.delta_e_coh)).abs() < 1e-9);
    }

    #[test]
    fn reported_coherent_difference_and_its_limit() {
        let printed = delta_e_coh(F, 0.2, 0.05, 0.01).unwrap();
        // frozen from direct evaluation of the reported expression
        assert!((printed + 4.776655443).abs() < 1e-8);
        let limit = delta_e_coh(F, 0.2, 0.05, 1e-12).unwrap();
        assert!((limit - 4.0 * F * F / (4.0 * 0.04 - 0.0025)).abs() < 1e-8);
        assert!(delta_e_diss(F, 0.4, 0.05, 1e-6).unwrap() > 1e3);
    }
}
