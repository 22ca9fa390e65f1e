use std::fmt;
use std::path::{Path, PathBuf};

use piezodyn::explicit::explicit_on_grid;
use piezodyn::fd::{convergence_against, reference_samples};
use piezodyn::prelude::*;

use crate::config::{RunConfig, Scenario};
use crate::csv;
use crate::error::{scoped, CliError, Result};
use crate::svg;
use crate::sweep;

/// Writes `contents` to `dir/rel`, creating directories as needed. Failures
/// name the config key the path came from.
fn write_output(dir: &Path, rel: &Path, field: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(rel);
    let fail = |e: std::io::Error| CliError::config(field, format!("cannot write {}: {e}", path.display()));
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(fail)?;
    }
    std::fs::write(&path, contents).map_err(fail)?;
    Ok(path)
}

fn chart_title(name: &str, s: &Scenario) -> String {
    format!(
        "{name}: alpha = {}, k_alpha = {}, t1 = {:.3} us",
        s.damper.alpha,
        s.damper.k_alpha,
        s.load.duration() * 1e6
    )
}

/// Time-series CSV and, when `svg` is set or the config names a plot, the
/// voltage chart. Returns the files written.
pub fn simulate(config: &RunConfig, name: &str, out: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    let scenario = config.resolve()?;
    let result = scenario.run()?;
    let csv_path = config
        .output
        .csv
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    let mut written = vec![write_output(out, &csv_path, "output.csv", &csv::time_series(&result).render())?];
    if svg || config.output.svg.is_some() {
        let svg_path = config
            .output
            .svg
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{name}.svg")));
        let times: Vec<f64> = result.grid.times().collect();
        let doc = svg::voltage_chart(&times, &result.history.voltage, &chart_title(name, &scenario));
        written.push(write_output(out, &svg_path, "output.svg", &doc)?);
    }
    Ok(written)
}

/// One field CSV per requested instant, each moved to its nearest sample.
pub fn fields(config: &RunConfig, out: &Path) -> Result<Vec<(f64, PathBuf)>> {
    let scenario = config.resolve()?;
    if config.output.snapshot_times.is_empty() {
        return Err(CliError::config("output.snapshot_times", "no snapshot instants given"));
    }
    let result = scenario.run()?;
    let mut written = Vec::new();
    for (k, t) in config.output.snapshot_times.iter().enumerate() {
        let i = ((t / result.grid.dt).round() as usize).min(result.grid.steps);
        let snap = snapshot(result.grid.time(i), config.output.snapshot_points, &result).map_err(scoped)?;
        let rel = PathBuf::from(format!("fields_{k:03}.csv"));
        let path = write_output(out, &rel, "--out", &csv::fields(&snap).render())?;
        written.push((snap.time, path));
    }
    Ok(written)
}

pub fn sweep(config: &RunConfig, name: &str, out: &Path, workers: usize) -> Result<(PathBuf, usize)> {
    let rows = sweep::run_sweep(config, workers)?;
    let rel = PathBuf::from(format!("{name}_sweep.csv"));
    let path = write_output(out, &rel, "--out", &sweep::summary(&rows).render())?;
    Ok((path, rows.len()))
}

pub const CLOSED_FORM_TOL: f64 = 1e-9;
pub const BOUNDARY_TOL: f64 = 1e-10;
pub const REFINEMENT_TOL: f64 = 1e-12;
pub const FD_TOL: f64 = 0.01;
pub const ECHO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<24} {:.3e} (tolerance {:e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.tolerance
            )?;
        }
        Ok(())
    }
}

/// Free-rod velocities from perfect reflections at both faces.
fn free_rod_echo(result: &SimulationResult) -> (Vec<f64>, Vec<f64>) {
    let p = &result.load_samples;
    let z = result.derived.impedance;
    let n = result.grid.samples_per_transit;
    let len = result.grid.len();
    let mut v0 = vec![0.0; len];
    let mut vh = vec![0.0; len];
    for i in 0..len {
        let mut top = p[i];
        let mut k = 2 * n;
        while k <= i {
            top += 2.0 * p[i - k];
            k += 2 * n;
        }
        let mut bottom = 0.0;
        let mut k = n;
        while k <= i {
            bottom += 2.0 * p[i - k];
            k += 2 * n;
        }
        vh[i] = top / z;
        v0[i] = bottom / z;
    }
    (v0, vh)
}

/// Cross-checks the recursion against the closed forms, the boundary
/// relations, a refined grid and the finite-difference solver. `corrupt`
/// perturbs one history sample first.
pub fn validate(config: &RunConfig, corrupt: bool) -> Result<ValidationReport> {
    let scenario = config.resolve()?;
    let mut result = scenario.run()?;
    if corrupt {
        let i = result.history.len() / 2;
        let scale = result.history.vh.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        result.history.vh[i] += 1e-3 * scale;
    }
    let h = &result.history;
    let mut report = ValidationReport::default();

    let (v0, vh) = explicit_on_grid(&result).map_err(|e| match e {
        piezodyn::Error::UnsupportedCase { .. } => CliError::config(
            "load.t1",
            format!("validation needs a pulse shorter than 6 transit times: {e}"),
        ),
        other => scoped(other),
    })?;
    report.checks.push(Check {
        name: "closed_form_rel_dev",
        value: relative_deviation(&h.v0, &v0).max(relative_deviation(&h.vh, &vh)),
        tolerance: CLOSED_FORM_TOL,
    });

    report.checks.push(Check {
        name: "boundary_residual",
        value: boundary_residual(&result),
        tolerance: BOUNDARY_TOL,
    });

    let fine = scenario.refined(2)?.run()?;
    let shared = h.len().min(fine.history.len().div_ceil(2));
    let every_other = |v: &[f64]| -> Vec<f64> { (0..shared).map(|i| v[2 * i]).collect() };
    let refinement = [
        (&h.v0, &fine.history.v0),
        (&h.vh, &fine.history.vh),
        (&h.voltage, &fine.history.voltage),
    ]
    .iter()
    .map(|(a, b)| relative_deviation(&a[..shared], &every_other(b)))
    .fold(0.0_f64, f64::max);
    report.checks.push(Check {
        name: "grid_refinement_rel_dev",
        value: refinement,
        tolerance: REFINEMENT_TOL,
    });

    let nx = config.validate.fd_nx;
    let target = reference_samples(&[nx]);
    let factor = target.div_ceil(scenario.grid.samples_per_transit).max(1);
    let reference = scenario.refined(factor)?.run()?;
    let rows = convergence_against(&reference, &[nx], config.validate.cfl, scenario.grid.end()).map_err(scoped)?;
    report.checks.push(Check {
        name: "fd_voltage_rel_linf",
        value: rows[0].error.rel_linf,
        tolerance: FD_TOL,
    });

    if scenario.damper.gamma == 0.0 {
        let (e0, eh) = free_rod_echo(&result);
        report.checks.push(Check {
            name: "free_rod_echo_rel_dev",
            value: relative_deviation(&h.v0, &e0).max(relative_deviation(&h.vh, &eh)),
            tolerance: ECHO_TOL,
        });
    }
    Ok(report)
}
