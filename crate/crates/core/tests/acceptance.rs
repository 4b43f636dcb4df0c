//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qbcharge_core::moments::{self, MomentState};
use qbcharge_core::optimize::{self, RatioObjective};
use qbcharge_core::scenario::{self, FigureId, Preset, ScenarioConfig};
use qbcharge_core::steady::{self, SteadyMethod};
use qbcharge_core::supermode::{self, Supermode};
use qbcharge_core::{Complex64 as C64, StepControl, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const F: f64 = 0.1;
const J: f64 = 0.2;
const GAMMA: f64 = 0.4;
const KA: f64 = 0.05;
const KB: f64 = 0.01;

type Outcome = Result<(bool, String), qbcharge_core::Error>;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn conventional() -> SystemParams {
    SystemParams::default().with_drive(F, 0.0).with_coupling(J, 0.0).with_local(KA, KB)
}

fn optimal_detuning() -> Outcome {
    let closed = optimize::optimal_detuning_conventional(J, KA, KB, F)?;
    let numeric = optimize::optimal_detuning_numeric(&conventional(), (-0.4, 0.4))?;
    let branches_ok = closed.branches.iter().any(|d| (d - 0.1991858).abs() < 1e-7)
        && closed.branches.iter().any(|d| (d + 0.1991858).abs() < 1e-7);
    let diff = (closed.delta_opt.abs() - numeric.delta_opt.abs()).abs();
    Ok((
        branches_ok && diff < 1e-8,
        format!("closed ±{:.10}, numeric {:.10}, |diff| = {diff:.2e}", closed.delta_opt, numeric.delta_opt),
    ))
}

fn conventional_energy() -> Outcome {
    let opt = optimize::optimal_detuning_conventional(J, KA, KB, F)?;
    let p = conventional().with_detuning(opt.delta_opt);
    let analytic = steady::steady_state(&p, SteadyMethod::Analytic)?;
    let linear = steady::steady_state(&p, SteadyMethod::LinearSolve)?;
    let traj = moments::integrate(&p, MomentState::vacuum(), 300.0 / J, 601, &StepControl::default())?;
    let (_, _, last) = traj.last();
    let values_ok = (analytic.e_b - 11.139).abs() < 1e-3 && (analytic.e_a - 11.055).abs() < 1e-3;
    let exact = rel(analytic.e_a, linear.e_a).max(rel(analytic.e_b, linear.e_b));
    let limit = rel(analytic.e_a, last.e_a).max(rel(analytic.e_b, last.e_b));
    Ok((
        values_ok && exact < 1e-9 && limit < 0.01,
        format!(
            "E_B = {:.6}, E_A = {:.6}; analytic vs linear {exact:.2e}; vs Jt=300 {limit:.2e}",
            analytic.e_b, analytic.e_a
        ),
    ))
}

fn super_optimal() -> Outcome {
    let w = (KA / KB).powf(0.25);
    let p = SystemParams::default().with_drive(F, 0.0).with_local(KA, KB).with_shared(
        GAMMA,
        C64::new(w, 0.0),
        C64::new(1.0 / w, 0.0),
    );
    let closed = optimize::super_optimal_energies(F, GAMMA, KA, KB)?;
    let linear = steady::steady_state(&p, SteadyMethod::LinearSolve)?;
    let ok = (closed.e_b - 18.927).abs() < 1e-3
        && (linear.e_b - 18.927).abs() < 1e-3
        && (closed.xi - 23.147).abs() < 1e-3
        && (closed.xi - closed.e_b - 4.2207).abs() < 1e-3
        && (linear.e_a - 4.2207).abs() < 1e-3;
    Ok((
        ok,
        format!(
            "closed E_B = {:.6}, xi = {:.6}, xi - E_B = {:.6}; linear E_A = {:.6}, E_B = {:.6}",
            closed.e_b,
            closed.xi,
            closed.xi - closed.e_b,
            linear.e_a,
            linear.e_b
        ),
    ))
}

fn ratio_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_b, mut worst_xi) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let g = rng.gen_range(0.05..1.0);
        let ka = rng.gen_range(0.005..0.1);
        let kb = rng.gen_range(0.005..0.1);
        let base = SystemParams::default().with_drive(F, 0.0).with_local(ka, kb).with_shared(g, one(), one());
        let y = optimize::optimal_ratio(ka, kb)?;
        let range = (y / 20.0, y * 20.0);
        let yb = optimize::optimal_ratio_numeric(&base, RatioObjective::Battery, range)?;
        let yx = optimize::optimal_ratio_numeric(&base, RatioObjective::Total, range)?;
        worst_b = worst_b.max(rel(yb, y));
        worst_xi = worst_xi.max(rel(yx, y));
    }
    Ok((
        worst_b < 1e-6 && worst_xi < 1e-6,
        format!("20 triples: max rel. deviation argmax E_B {worst_b:.2e}, argmax xi {worst_xi:.2e}"),
    ))
}

/// `E^S_{B,sup-opt} − E_{B,opt}` from linear steady solves.
fn gap_by_linear_solve(f: f64, g: f64, ka: f64, kb: f64) -> Result<f64, qbcharge_core::Error> {
    let w = (ka / kb).powf(0.25);
    let sup = SystemParams::default().with_drive(f, 0.0).with_local(ka, kb).with_shared(
        g,
        C64::new(w, 0.0),
        C64::new(1.0 / w, 0.0),
    );
    let j = g / 2.0;
    let delta = (j * j - (ka * ka + kb * kb) / 8.0).sqrt();
    let conv = SystemParams::default().with_drive(f, delta).with_coupling(j, 0.0).with_local(ka, kb);
    Ok(steady::steady_state(&sup, SteadyMethod::LinearSolve)?.e_b
        - steady::steady_state(&conv, SteadyMethod::LinearSolve)?.e_b)
}

fn redistribution_gap() -> Outcome {
    let headline = optimize::redistribution_gap(F, GAMMA, KA, KB)?;
    let mut worst = rel(headline, gap_by_linear_solve(F, GAMMA, KA, KB)?);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut n = 0;
    while n < 50 {
        let f = rng.gen_range(0.01..0.3);
        let g: f64 = rng.gen_range(0.05..1.0);
        let ka: f64 = rng.gen_range(0.005..0.1);
        let kb: f64 = rng.gen_range(0.005..0.1);
        if ((ka - kb).powi(2) - 4.0 * g * g).abs() < 1e-3 || g * g / 4.0 <= (ka * ka + kb * kb) / 8.0 {
            continue;
        }
        worst = worst.max(rel(optimize::redistribution_gap(f, g, ka, kb)?, gap_by_linear_solve(f, g, ka, kb)?));
        n += 1;
    }
    Ok((
        (headline - 7.788).abs() < 1e-3 && worst < 1e-9,
        format!("gap = {headline:.6}; 51 sets, max rel. diff vs linear solves {worst:.2e}"),
    ))
}

fn charger_defense() -> Outcome {
    let report = optimize::comparison_report(F, J, GAMMA, KA, KB)?;
    let diss_printed = optimize::delta_e_diss(F, GAMMA, KA, KB)?;
    let unbounded = optimize::delta_e_diss(F, GAMMA, KA, 1e-6)?;
    let limit = optimize::delta_e_coh(F, J, KA, 1e-12)?;
    let expected_limit = 4.0 * F * F / (4.0 * J * J - KA * KA);
    let ok = (report.delta_e_diss - 2.927).abs() < 1e-3
        && (diss_printed - 2.927).abs() < 1e-3
        && (report.delta_e_coh + 4.86).abs() < 0.01
        && unbounded > 1e3
        && (limit - 0.254).abs() < 1e-3
        && (limit - expected_limit).abs() < 1e-9;
    Ok((
        ok,
        format!(
            "dE_diss = {:.6} (printed form {diss_printed:.6}), dE_coh = {:.6}, dE_diss(1e-6) = {unbounded:.3e}, \
             dE_coh limit = {limit:.6}",
            report.delta_e_diss, report.delta_e_coh
        ),
    ))
}

fn supermode_equivalence() -> Outcome {
    let shared = conventional().with_shared(GAMMA, one(), one());
    let p = shared.with_detuning(scenario::closed_form_detuning(&shared)?.delta_opt);
    let control = StepControl::fixed(0.02);
    let t_end = 300.0 / J;
    let local = moments::integrate(&p, MomentState::vacuum(), t_end, 301, &control)?;
    let phi = p.coupling.phase;
    let global =
        supermode::integrate_global(&p, supermode::to_supermode(&MomentState::vacuum(), phi), t_end, 301, &control)?;
    let mut worst = 0.0f64;
    for (a, g) in local.states.iter().zip(&global) {
        let b = supermode::from_supermode(g, phi);
        let d = [
            (a.mean_a - b.mean_a).norm(),
            (a.mean_b - b.mean_b).norm(),
            (a.n_a - b.n_a).abs(),
            (a.n_b - b.n_b).abs(),
            (a.cross_ab - b.cross_ab).norm(),
        ];
        worst = d.into_iter().fold(worst, f64::max);
    }
    let minus = supermode::decoherence_free_mode(&shared);
    let plus = supermode::decoherence_free_mode(&shared.with_coupling(J, PI));
    Ok((
        worst < 1e-9 && minus == Some(Supermode::Minus) && plus == Some(Supermode::Plus),
        format!("max deviation {worst:.2e}; phi=0 -> {minus:?}, phi=pi -> {plus:?}"),
    ))
}

fn fock_oracle() -> Outcome {
    let p = scenario::oracle_params();
    let r = scenario::compare_oracle(&p, &p)?;
    Ok((
        r.max_deviation < 1e-6 && r.min_purity > 1.0 - 1e-6 && r.truncation_change < 1e-9,
        format!(
            "{} samples: max diff {:.2e}, min purity {:.12}, N 6->8 change {:.2e}",
            scenario::ORACLE_SAMPLES,
            r.max_deviation,
            r.min_purity,
            r.truncation_change
        ),
    ))
}

fn purity_invariant() -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    for preset in Preset::ALL.into_iter().filter(|&p| p != Preset::Custom) {
        let r = ScenarioConfig::preset(preset).resolve()?;
        let tr = moments::integrate(&r.params, MomentState::vacuum(), r.t_end, r.samples, &StepControl::default())?;
        worst = worst.max(tr.max_purity_residual());
        n += 1;
    }
    Ok((worst < 1e-8, format!("{n} presets: max purity residual {worst:.2e}")))
}

fn appendix_inequality() -> Outcome {
    let fig = scenario::figure_data(FigureId::FigB)?;
    let gammas = fig.column("Gamma").unwrap();
    let plain = fig.column("xi_S").unwrap();
    let opt = fig.column("xi_S_opt").unwrap();
    let violations: Vec<f64> =
        gammas.iter().zip(plain.iter().zip(&opt)).filter(|(_, (p, o))| o < p).map(|(g, _)| *g).collect();
    let detail = match violations.first() {
        None => format!("{} grid points, no violation", gammas.len()),
        Some(g0) => format!(
            "{} of {} grid points violate, Gamma in [{g0}, {}]; at Gamma = {g0}: xi_opt = {:.4}, xi = {:.4}",
            violations.len(),
            gammas.len(),
            violations.last().unwrap(),
            opt[0],
            plain[0]
        ),
    };
    Ok((violations.is_empty(), detail))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("optimal detuning", Duration::from_secs(1), optimal_detuning),
        ("conventional optimal stationary energy", Duration::from_secs(5), conventional_energy),
        ("super-optimal energies", Duration::from_secs(1), super_optimal),
        ("ratio optimality", Duration::from_secs(10), ratio_optimality),
        ("redistribution-gap identity", Duration::from_secs(5), redistribution_gap),
        ("charger-battery defense", Duration::from_secs(1), charger_defense),
        ("super-mode equivalence", Duration::from_secs(5), supermode_equivalence),
        ("Fock-oracle equivalence", Duration::from_secs(120), fock_oracle),
        ("purity invariant", Duration::from_secs(5), purity_invariant),
        ("optimized total energy dominates", Duration::from_secs(1), appendix_inequality),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match outcome {
            Ok((ok, detail)) => (ok && elapsed < budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "{} #{:<2} {name}: {detail} [{:.3}s / {}s]",
            if passed { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
