//! Data behind the published figures, with parameters fixed by the captions.
//!
//! Time-domain figures share the abscissa `Jt` with `|J| = 0.2` from the
//! conventional scenario; shared-bath curves use `Γ = 2|J| = 0.4`, so `Jt`
//! coincides with `Γt/2` for them.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::moments::{self, Energies, MomentState};
use crate::ode::StepControl;
use crate::optimize;
use crate::steady;

use super::closed_form_detuning;
use super::output::{self, params_json};

pub const F: f64 = 0.1;
pub const J_REF: f64 = 0.2;
pub const GAMMA: f64 = 0.4;
pub const KAPPA_A: f64 = 0.05;
pub const KAPPA_B: f64 = 0.01;
/// `Jt` range of the time-domain figures.
pub const HORIZON: f64 = 300.0;
pub const TIME_SAMPLES: usize = 601;
pub const GRID_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig6,
    #[serde(rename = "figB")]
    FigB,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig2,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig6,
        FigureId::FigB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig6 => "fig6",
            FigureId::FigB => "figB",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, Copy)]
enum Quantity {
    Charger,
    Battery,
}

impl Quantity {
    fn pick(self, e: &Energies) -> f64 {
        match self {
            Quantity::Charger => e.e_a,
            Quantity::Battery => e.e_b,
        }
    }
}

struct Curve {
    label: &'static str,
    params: SystemParams,
}

/// Data and provenance of one figure.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureOutput {
    pub id: FigureId,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: Value,
    pub files: Vec<PathBuf>,
}

impl FigureOutput {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Maps `f` over `items` on all available cores, keeping input order.
pub(crate) fn par_map<T, R, G>(items: &[T], f: G) -> Vec<R>
where
    T: Sync,
    R: Send,
    G: Fn(&T) -> R + Sync,
{
    if items.is_empty() {
        return Vec::new();
    }
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len());
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| {
                let f = &f;
                s.spawn(move || c.iter().map(f).collect::<Vec<R>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("figure worker panicked")).collect()
    })
}

fn base() -> SystemParams {
    SystemParams::default().with_drive(F, 0.0).with_local(KAPPA_A, KAPPA_B)
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn with_optimal_detuning(p: SystemParams) -> Result<SystemParams> {
    Ok(p.with_detuning(closed_form_detuning(&p)?.delta_opt))
}

fn conventional_optimal() -> Result<SystemParams> {
    with_optimal_detuning(base().with_coupling(J_REF, 0.0))
}

fn shared_replaced() -> SystemParams {
    base().with_shared(GAMMA, one(), one())
}

fn super_optimal(gamma: f64) -> Result<SystemParams> {
    let b = base().with_shared(gamma, one(), one());
    Ok(optimize::ratio_params(&b, optimize::optimal_ratio(KAPPA_A, KAPPA_B)?))
}

fn curves(id: FigureId) -> Result<(Vec<Curve>, Quantity)> {
    let conv = Curve { label: "conventional_optimal", params: conventional_optimal()? };
    Ok(match id {
        FigureId::Fig2 => {
            let added =
                |phase| with_optimal_detuning(base().with_coupling(J_REF, phase).with_shared(GAMMA, one(), one()));
            let curves = vec![
                conv,
                Curve { label: "shared_added_optimal_phi0", params: added(0.0)? },
                Curve { label: "shared_added_optimal_phipi", params: added(std::f64::consts::PI)? },
                Curve { label: "conventional_delta0", params: base().with_coupling(J_REF, 0.0) },
            ];
            (curves, Quantity::Battery)
        }
        FigureId::Fig3a | FigureId::Fig3b => {
            let q = if id == FigureId::Fig3a { Quantity::Charger } else { Quantity::Battery };
            (vec![conv, Curve { label: "shared_replaced", params: shared_replaced() }], q)
        }
        FigureId::Fig4a | FigureId::Fig4b => {
            let q = if id == FigureId::Fig4a { Quantity::Charger } else { Quantity::Battery };
            (vec![conv, Curve { label: "super_optimal", params: super_optimal(GAMMA)? }], q)
        }
        FigureId::Fig6 | FigureId::FigB => unreachable!("not a time-domain figure"),
    })
}

fn time_domain(id: FigureId) -> Result<(Vec<String>, Vec<Vec<f64>>, Value)> {
    let (curves, quantity) = curves(id)?;
    let t_end = HORIZON / J_REF;
    let runs = par_map(&curves, |c| {
        moments::integrate(&c.params, MomentState::vacuum(), t_end, TIME_SAMPLES, &StepControl::default())
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let prefix = match quantity {
        Quantity::Charger => "E_A",
        Quantity::Battery => "E_B",
    };
    let mut columns = vec!["Jt".to_string()];
    columns.extend(curves.iter().map(|c| format!("{prefix}_{}", c.label)));
    let rows = (0..TIME_SAMPLES)
        .map(|k| {
            let mut row = vec![runs[0].times[k] * J_REF];
            row.extend(runs.iter().map(|r| quantity.pick(&r.energies[k])));
            row
        })
        .collect();
    let mut curve_meta = Vec::new();
    for c in &curves {
        let stationary = steady::energies_analytic(&c.params)?;
        curve_meta.push(json!({
            "label": c.label,
            "params": params_json(&c.params),
            "stationary": stationary,
        }));
    }
    let meta = json!({
        "figure": id.name(),
        "abscissa": "Jt",
        "J_ref": J_REF,
        "horizon": HORIZON,
        "samples": TIME_SAMPLES,
        "curves": curve_meta,
    });
    Ok((columns, rows, meta))
}

fn kappa_b_grid() -> Vec<f64> {
    (1..=GRID_POINTS).map(|k| KAPPA_B_MAX * k as f64 / GRID_POINTS as f64).collect()
}

const KAPPA_B_MAX: f64 = 0.05;
const GAMMA_MAX: f64 = 1.0;

fn fig6() -> Result<(Vec<String>, Vec<Vec<f64>>, Value)> {
    let kappa = KAPPA_A;
    let grid = kappa_b_grid();
    let rows = par_map(&grid, |&kb| -> Result<Vec<f64>> {
        let report = optimize::comparison_report(F, J_REF, GAMMA, kappa, kb)?;
        Ok(vec![
            kb,
            report.delta_e_coh,
            report.delta_e_diss,
            optimize::delta_e_coh(F, J_REF, kappa, kb)?,
            optimize::delta_e_diss(F, GAMMA, kappa, kb)?,
            report.e_single,
        ])
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let columns = ["kappa_b", "delta_e_coh", "delta_e_diss", "delta_e_coh_printed", "delta_e_diss_printed", "e_single"]
        .map(String::from)
        .to_vec();
    let meta = json!({
        "figure": "fig6",
        "abscissa": "kappa_b",
        "F": F,
        "kappa": kappa,
        "J": J_REF,
        "Gamma": GAMMA,
        "kappa_b_range": [KAPPA_B_MAX / GRID_POINTS as f64, KAPPA_B_MAX],
        "points": GRID_POINTS,
        "note": "delta_e_coh is E_B,opt - E_single from the general closed form; the *_printed columns evaluate the reported specialized expressions",
    });
    Ok((columns, rows, meta))
}

fn fig_b() -> Result<(Vec<String>, Vec<Vec<f64>>, Value)> {
    let grid: Vec<f64> = (1..=GRID_POINTS).map(|k| GAMMA_MAX * k as f64 / GRID_POINTS as f64).collect();
    let rows = par_map(&grid, |&g| -> Result<Vec<f64>> {
        let plain = steady::energies_analytic(&base().with_shared(g, one(), one()))?;
        let opt = steady::energies_analytic(&super_optimal(g)?)?;
        Ok(vec![g, plain.xi, opt.xi])
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let columns = ["Gamma", "xi_S", "xi_S_opt"].map(String::from).to_vec();
    let meta = json!({
        "figure": "figB",
        "abscissa": "Gamma",
        "F": F,
        "kappa_a": KAPPA_A,
        "kappa_b": KAPPA_B,
        "Delta": 0.0,
        "Gamma_range": [GAMMA_MAX / GRID_POINTS as f64, GAMMA_MAX],
        "points": GRID_POINTS,
        "weights_opt": params_json(&super_optimal(GAMMA)?),
    });
    Ok((columns, rows, meta))
}

fn plot_script(id: FigureId, columns: &[String]) -> String {
    let xlabel = &columns[0];
    let ylabel = match id {
        FigureId::Fig6 => "Delta E",
        FigureId::FigB => "xi",
        FigureId::Fig3a | FigureId::Fig4a => "E_A",
        _ => "E_B",
    };
    format!(
        "# gnuplot script for {name}.csv\n\
         set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel '{xlabel}'\n\
         set ylabel '{ylabel}'\n\
         plot for [i=2:{n}] '{name}.csv' using 1:i with lines\n",
        name = id.name(),
        n = columns.len(),
    )
}

/// Computes the figure data without touching the file system.
pub fn figure_data(id: FigureId) -> Result<FigureOutput> {
    let (columns, rows, meta) = match id {
        FigureId::Fig6 => fig6()?,
        FigureId::FigB => fig_b()?,
        _ => time_domain(id)?,
    };
    Ok(FigureOutput { id, columns, rows, meta, files: Vec::new() })
}

/// Writes `<id>.csv`, `<id>.gp` (gnuplot) and `<id>_meta.json` into `out_dir`.
pub fn reproduce_figure(id: FigureId, out_dir: &Path) -> Result<FigureOutput> {
    let mut fig = figure_data(id)?;
    if fig.rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteState { t: f64::NAN });
    }
    output::create_dir(out_dir)?;
    let header: Vec<&str> = fig.columns.iter().map(String::as_str).collect();
    let name = id.name();
    fig.files.push(output::write_csv(&out_dir.join(format!("{name}.csv")), &header, fig.rows.clone())?);
    fig.files.push(output::write_text(&out_dir.join(format!("{name}.gp")), &plot_script(id, &fig.columns))?);
    fig.files.push(output::write_json(&out_dir.join(format!("{name}_meta.json")), &fig.meta)?);
    Ok(fig)
}
