//! Declarative scenarios: JSON configuration, preset charging scenarios,
//! figure data and the verification suite.
//!
//! Every output is deterministic: the same configuration produces
//! byte-identical files.

mod figures;
mod output;
mod verify;

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::moments::{self, Energies, MomentState};
use crate::ode::StepControl;
use crate::optimize::{self, DetuningMethod, DetuningOptimum};
use crate::steady::{self, SteadyMethod};

pub use figures::{figure_data, reproduce_figure, FigureId, FigureOutput};
pub use output::params_json;
pub use verify::{
    compare_oracle, oracle_params, verify, CheckResult, Mutation, OracleComparison, VerifyLevel, VerifyReport,
    ORACLE_SAMPLES, ORACLE_T_END,
};

/// Default dimensionless horizon (`Jt`, or `Γt/2` without coherent coupling).
pub const DEFAULT_HORIZON: f64 = 300.0;
pub const DEFAULT_SAMPLES: usize = 601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Conventional,
    SharedAdded,
    SharedReplaced,
    SuperOptimal,
    SingleBattery,
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Conventional,
        Preset::SharedAdded,
        Preset::SharedReplaced,
        Preset::SuperOptimal,
        Preset::SingleBattery,
        Preset::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Conventional => "conventional",
            Preset::SharedAdded => "shared-added",
            Preset::SharedReplaced => "shared-replaced",
            Preset::SuperOptimal => "super-optimal",
            Preset::SingleBattery => "single-battery",
            Preset::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    /// Parameters used for keys the configuration leaves out.
    pub fn defaults(self) -> SystemParams {
        let one = C64::new(1.0, 0.0);
        let base = SystemParams::default().with_drive(0.1, 0.0).with_local(0.05, 0.01);
        match self {
            Preset::Conventional => base.with_coupling(0.2, 0.0),
            Preset::SharedAdded => base.with_coupling(0.2, 0.0).with_shared(0.4, one, one),
            Preset::SharedReplaced | Preset::SuperOptimal => base.with_shared(0.4, one, one),
            Preset::SingleBattery => base,
            Preset::Custom => SystemParams::default(),
        }
    }

    fn default_detuning_mode(self) -> DetuningMode {
        match self {
            Preset::Custom | Preset::SingleBattery | Preset::SuperOptimal => DetuningMode::Fixed,
            _ => DetuningMode::OptimalClosed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetuningMode {
    Fixed,
    OptimalClosed,
    OptimalNumeric,
}

impl DetuningMode {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "fixed" => Some(Self::Fixed),
            "optimal-closed" => Some(Self::OptimalClosed),
            "optimal-numeric" => Some(Self::OptimalNumeric),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Preset,
    pub params: SystemParams,
    pub detuning_mode: DetuningMode,
    /// Dimensionless horizon in units of `1/time_scale`.
    pub horizon: f64,
    pub samples: usize,
    pub output_dir: Option<PathBuf>,
    /// Parameter keys present in the source document.
    explicit: Vec<String>,
}

const PARAM_KEYS: [&str; 12] =
    ["F", "Delta", "J_mag", "J_phase", "kappa_a", "kappa_b", "Gamma", "p_a_re", "p_a_im", "p_b_re", "p_b_im", "omega"];
const OTHER_KEYS: [&str; 5] = ["scenario", "detuning_mode", "horizon", "samples", "output_dir"];

fn number(obj: &Map<String, Value>, key: &str) -> Result<Option<f64>> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => {
            n.as_f64().filter(|x| x.is_finite()).map(Some).ok_or_else(|| Error::config(key, "not a finite number"))
        }
        Some(other) => Err(Error::config(key, format!("expected a number, found {other}"))),
    }
}

fn string<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<Option<&'a str>> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(Error::config(key, format!("expected a string, found {other}"))),
    }
}

impl ScenarioConfig {
    pub fn preset(scenario: Preset) -> Self {
        Self {
            scenario,
            params: scenario.defaults(),
            detuning_mode: scenario.default_detuning_mode(),
            horizon: DEFAULT_HORIZON,
            samples: DEFAULT_SAMPLES,
            output_dir: None,
            explicit: Vec::new(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::config("$", e.to_string()))?;
        Self::from_value(&value)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| Error::config("$", "expected a JSON object"))?;
        if let Some(key) = obj.keys().find(|k| !PARAM_KEYS.contains(&k.as_str()) && !OTHER_KEYS.contains(&k.as_str())) {
            return Err(Error::config(key.as_str(), "unknown key"));
        }
        let scenario = match string(obj, "scenario")? {
            None => Preset::Custom,
            Some(s) => Preset::parse(s).ok_or_else(|| Error::config("scenario", format!("unknown scenario `{s}`")))?,
        };
        let mut cfg = Self::preset(scenario);
        if let Some(s) = string(obj, "detuning_mode")? {
            cfg.detuning_mode = DetuningMode::parse(s)
                .ok_or_else(|| Error::config("detuning_mode", format!("unknown detuning mode `{s}`")))?;
        }
        if let Some(h) = number(obj, "horizon")? {
            if h <= 0.0 {
                return Err(Error::config("horizon", "must be positive"));
            }
            cfg.horizon = h;
        }
        if let Some(v) = obj.get("samples") {
            let n =
                v.as_u64().filter(|n| *n >= 2).ok_or_else(|| Error::config("samples", "expected an integer ≥ 2"))?;
            cfg.samples = n as usize;
        }
        cfg.output_dir = string(obj, "output_dir")?.map(PathBuf::from);

        let p = &mut cfg.params;
        let mut phase = p.coupling.phase;
        let mut magnitude = p.coupling.magnitude;
        for key in PARAM_KEYS {
            let Some(x) = number(obj, key)? else { continue };
            cfg.explicit.push(key.to_string());
            match key {
                "F" => p.drive.amplitude = x,
                "Delta" => p.drive.detuning = x,
                "J_mag" => magnitude = x,
                "J_phase" => phase = x,
                "kappa_a" => p.local.kappa_a = x,
                "kappa_b" => p.local.kappa_b = x,
                "Gamma" => p.shared.gamma = x,
                "p_a_re" => p.shared.p_a.re = x,
                "p_a_im" => p.shared.p_a.im = x,
                "p_b_re" => p.shared.p_b.re = x,
                "p_b_im" => p.shared.p_b.im = x,
                "omega" => p.omega = x,
                _ => unreachable!(),
            }
        }
        *p = p.with_coupling(magnitude, phase);
        cfg.check_preset()?;
        Ok(cfg)
    }

    fn has(&self, key: &str) -> bool {
        self.explicit.iter().any(|k| k == key)
    }

    fn check_preset(&self) -> Result<()> {
        let p = &self.params;
        let forbid = |key: &str, why: &str| -> Result<()> {
            if self.has(key) {
                Err(Error::config(key, format!("fixed by the `{}` scenario ({why})", self.scenario.name())))
            } else {
                Ok(())
            }
        };
        match self.scenario {
            Preset::SharedReplaced | Preset::SuperOptimal => {
                if p.coupling.magnitude != 0.0 {
                    return Err(Error::config("J_mag", "must be 0: the coherent coupling is replaced"));
                }
                if !(p.shared.gamma > 0.0) {
                    return Err(Error::config("Gamma", "must be positive: the shared bath carries the coupling"));
                }
                if self.scenario == Preset::SuperOptimal {
                    for key in ["p_a_re", "p_a_im", "p_b_re", "p_b_im"] {
                        forbid(key, "weights follow from kappa_a/kappa_b")?;
                    }
                    if p.drive.detuning != 0.0 {
                        return Err(Error::config("Delta", "must be 0 in the super-optimal scenario"));
                    }
                    if self.detuning_mode != DetuningMode::Fixed {
                        return Err(Error::config("detuning_mode", "super-optimal charging uses Delta = 0"));
                    }
                    if !(p.local.kappa_a > 0.0 && p.local.kappa_b > 0.0) {
                        return Err(Error::config("kappa_b", "both local rates must be positive"));
                    }
                }
            }
            Preset::SingleBattery => {
                if p.coupling.magnitude != 0.0 {
                    return Err(Error::config("J_mag", "must be 0 for a single directly driven battery"));
                }
                if p.shared.gamma != 0.0 {
                    return Err(Error::config("Gamma", "must be 0 for a single directly driven battery"));
                }
            }
            _ => {}
        }
        p.validate().map(|_| ()).map_err(|e| match e {
            Error::NegativeRate { name, value } => Error::config(name, format!("must be nonnegative (got {value})")),
            Error::NonFinite { name } => Error::config(name, "not finite"),
            Error::PhaseOutOfRange(x) => Error::config("J_phase", format!("{x} outside [0, 2π)")),
            other => other,
        })
    }

    /// Fills in preset-determined quantities: optimal detuning, super-optimal
    /// weights.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        let mut params = self.params.validate()?;
        let mut y_opt = None;
        if self.scenario == Preset::SuperOptimal {
            let y = optimize::optimal_ratio(params.local.kappa_a, params.local.kappa_b)?;
            params = optimize::ratio_params(&params, y);
            y_opt = Some(y);
        }
        let detuning = match self.detuning_mode {
            DetuningMode::Fixed => None,
            DetuningMode::OptimalClosed => Some(closed_form_detuning(&params)?),
            DetuningMode::OptimalNumeric => {
                let w = 2.0 * params.coupling.magnitude
                    + params.total_damping_a()
                    + params.total_damping_b()
                    + params.shared.gamma * params.shared.mu().norm();
                let w = if w > 0.0 { w } else { 1.0 };
                Some(optimize::optimal_detuning_numeric(&params, (-w, w))?)
            }
        };
        if let Some(opt) = &detuning {
            params = params.with_detuning(opt.delta_opt);
        }
        let t_end = self.horizon / params.time_scale();
        Ok(ResolvedScenario { scenario: self.scenario, params, detuning, y_opt, t_end, samples: self.samples })
    }
}

/// Closed-form optimal detuning: the conventional formula without a shared
/// bath, the certified cubic otherwise.
pub fn closed_form_detuning(params: &SystemParams) -> Result<DetuningOptimum> {
    if params.shared.gamma == 0.0 {
        let j = params.coupling.magnitude;
        let (ka, kb) = (params.local.kappa_a, params.local.kappa_b);
        match optimize::optimal_detuning_conventional(j, ka, kb, params.drive.amplitude) {
            Ok(mut opt) => {
                // the closed form assumes ω = 1 photon numbers; re-evaluate here
                opt.achieved_e_b = steady::energy_b_analytic(&params.with_detuning(opt.delta_opt))?;
                Ok(opt)
            }
            Err(Error::NoInteriorOptimum { fallback }) => Ok(*fallback),
            Err(e) => Err(e),
        }
    } else {
        optimize::optimal_detuning_shared(params)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    pub scenario: Preset,
    pub params: SystemParams,
    pub detuning: Option<DetuningOptimum>,
    pub y_opt: Option<f64>,
    pub t_end: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyRow {
    pub method: &'static str,
    pub energies: Energies,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub resolved: ResolvedScenario,
    pub final_state: MomentState,
    pub final_energies: Energies,
    pub steady: Vec<SteadyRow>,
    pub files: Vec<PathBuf>,
}

/// Runs the scenario and writes `trajectory.csv`, `steady.csv` and
/// `meta.json` into `out_dir`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<ScenarioOutcome> {
    let resolved = config.resolve()?;
    let params = resolved.params;
    let trajectory =
        moments::integrate(&params, MomentState::vacuum(), resolved.t_end, resolved.samples, &StepControl::default())?;
    let analytic = steady::steady_state(&params, SteadyMethod::Analytic)?;
    let linear = steady::steady_state(&params, SteadyMethod::LinearSolve)?;
    let (_, final_state, final_energies) = trajectory.last();
    let (final_state, final_energies) = (*final_state, *final_energies);
    let steady_rows = vec![
        SteadyRow { method: "analytic", energies: Energies { e_a: analytic.e_a, e_b: analytic.e_b, xi: analytic.xi } },
        SteadyRow { method: "linear-solve", energies: Energies { e_a: linear.e_a, e_b: linear.e_b, xi: linear.xi } },
        SteadyRow { method: "trajectory-final", energies: final_energies },
    ];

    output::create_dir(out_dir)?;
    let mut files = Vec::new();
    files.push(output::write_trajectory(&out_dir.join("trajectory.csv"), &trajectory)?);
    files.push(output::write_steady(&out_dir.join("steady.csv"), &steady_rows)?);
    let meta = serde_json::json!({
        "scenario": config.scenario.name(),
        "detuning_mode": config.detuning_mode,
        "horizon": config.horizon,
        "samples": resolved.samples,
        "time_scale": params.time_scale(),
        "t_end": resolved.t_end,
        "params": params_json(&params),
        "detuning_optimum": resolved.detuning,
        "y_opt": resolved.y_opt,
        "steady": steady_rows,
    });
    files.push(output::write_json(&out_dir.join("meta.json"), &meta)?);

    Ok(ScenarioOutcome { resolved, final_state, final_energies, steady: steady_rows, files })
}

/// Detuning optimum for `optimize --mode detuning`.
pub fn optimize_detuning(config: &ScenarioConfig) -> Result<(DetuningOptimum, Option<DetuningOptimum>)> {
    let params = config.params.validate()?;
    let closed = closed_form_detuning(&params)?;
    let numeric = if closed.method == DetuningMethod::Numeric {
        None
    } else {
        let w = closed.branches.iter().fold(0.0f64, |m, d| m.max(d.abs())) * 2.0
            + params.total_damping_a()
            + params.total_damping_b()
            + params.shared.gamma;
        Some(optimize::optimal_detuning_numeric(&params, (-w, w))?)
    };
    Ok((closed, numeric))
}
