//! File writers. Numbers are printed with 17 significant digits so that
//! outputs round-trip exactly and compare byte-for-byte.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::moments::{self, Trajectory};

use super::SteadyRow;

pub(crate) fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

pub(crate) fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<PathBuf>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write_file(path, &out)
}

pub(crate) fn write_json(path: &Path, value: &Value) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    text.push('\n');
    write_file(path, &text)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    write_file(path, text)
}

pub(crate) const TRAJECTORY_HEADER: [&str; 12] =
    ["t", "scaled_t", "re_a", "im_a", "re_b", "im_b", "n_a", "n_b", "E_A", "E_B", "xi", "purity_residual"];

pub(crate) fn write_trajectory(path: &Path, tr: &Trajectory) -> Result<PathBuf> {
    let rows = tr.times.iter().zip(&tr.states).zip(&tr.energies).map(|((&t, s), e)| {
        vec![
            t,
            t * tr.scale,
            s.mean_a.re,
            s.mean_a.im,
            s.mean_b.re,
            s.mean_b.im,
            s.n_a,
            s.n_b,
            e.e_a,
            e.e_b,
            e.xi,
            moments::purity_residual(s),
        ]
    });
    write_csv(path, &TRAJECTORY_HEADER, rows)
}

pub(crate) fn write_steady(path: &Path, rows: &[SteadyRow]) -> Result<PathBuf> {
    let mut out = String::from("method,E_A,E_B,xi\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.method, fmt(r.energies.e_a), fmt(r.energies.e_b), fmt(r.energies.xi));
    }
    write_file(path, &out)
}

/// Parameters under the flat configuration key names.
pub fn params_json(p: &SystemParams) -> Value {
    json!({
        "F": p.drive.amplitude,
        "Delta": p.drive.detuning,
        "J_mag": p.coupling.magnitude,
        "J_phase": p.coupling.phase,
        "kappa_a": p.local.kappa_a,
        "kappa_b": p.local.kappa_b,
        "Gamma": p.shared.gamma,
        "p_a_re": p.shared.p_a.re,
        "p_a_im": p.shared.p_a.im,
        "p_b_re": p.shared.p_b.re,
        "p_b_im": p.shared.p_b.im,
        "omega": p.omega,
    })
}
