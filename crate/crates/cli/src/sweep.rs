//! Cartesian parameter sweeps with one summary row per run.
//!
//! Runs are numbered lexicographically over the axes `alpha`, `k_alpha`,
//! `t1`, `p_a` (in that order, last axis fastest). Rows come back in that
//! order whatever the worker count.

use piezodyn::metrics::VoltageMetrics;
use rayon::prelude::*;

use crate::config::{LoadKind, RunConfig};
use crate::csv::Table;
use crate::error::{CliError, Result};

pub const SUMMARY_HEADER: &str = "run,alpha,k_alpha,gamma,t1_s,p_a_Pa,peak_abs_V,t_peak_s,peak_spacing_s,crest_spacing_s,post_load_ratio";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub run: usize,
    pub alpha: f64,
    pub k_alpha: f64,
    pub gamma: f64,
    /// Pulse duration actually simulated.
    pub t1: f64,
    pub p_a: f64,
    pub metrics: VoltageMetrics,
}

fn axis(values: &[f64]) -> Vec<Option<f64>> {
    if values.is_empty() {
        vec![None]
    } else {
        values.iter().copied().map(Some).collect()
    }
}

/// One config per grid point of the sweep.
pub fn expand(base: &RunConfig) -> Result<Vec<RunConfig>> {
    let s = &base.sweep;
    let count = [&s.alpha, &s.k_alpha, &s.t1, &s.p_a]
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len().max(1)))
        .unwrap_or(usize::MAX);
    if count > s.max_runs {
        return Err(CliError::config(
            "sweep.max_runs",
            format!("{count} runs requested, limit is {}", s.max_runs),
        ));
    }
    let pulse = matches!(base.load.kind, LoadKind::Rectangular | LoadKind::HalfSine);
    if !pulse && !s.t1.is_empty() {
        return Err(CliError::config("sweep.t1", "only pulse loads have a duration to sweep"));
    }
    if !pulse && !s.p_a.is_empty() {
        return Err(CliError::config("sweep.p_a", "only pulse loads have an amplitude to sweep"));
    }

    let mut out = Vec::with_capacity(count);
    for alpha in axis(&s.alpha) {
        for k_alpha in axis(&s.k_alpha) {
            for t1 in axis(&s.t1) {
                for p_a in axis(&s.p_a) {
                    let mut c = base.clone();
                    if let Some(a) = alpha {
                        c.damper.alpha = a;
                    }
                    if let Some(k) = k_alpha {
                        c.damper.k_alpha = k;
                    }
                    if let Some(t) = t1 {
                        c.load.t1 = Some(t);
                    }
                    if let Some(p) = p_a {
                        c.load.p_a = Some(p);
                        c.load.force = None;
                    }
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}

fn run_one(run: usize, config: &RunConfig) -> Result<SweepRow> {
    let scenario = config.resolve()?;
    let result = scenario.run()?;
    let metrics = VoltageMetrics::compute(
        &result.history.voltage,
        result.grid.dt,
        result.grid.samples_per_transit,
        result.derived.transit,
        result.load.duration(),
    );
    Ok(SweepRow {
        run,
        alpha: scenario.damper.alpha,
        k_alpha: scenario.damper.k_alpha,
        gamma: scenario.damper.gamma,
        t1: scenario.load.duration(),
        p_a: scenario.load.amplitude(),
        metrics,
    })
}

/// Runs every point on `workers` threads.
pub fn run_sweep(base: &RunConfig, workers: usize) -> Result<Vec<SweepRow>> {
    if workers == 0 {
        return Err(CliError::config("--workers", "must be at least 1"));
    }
    let configs = expand(base)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::config("--workers", e.to_string()))?;
    let results: Vec<Result<SweepRow>> = pool.install(|| {
        configs
            .par_iter()
            .enumerate()
            .map(|(i, c)| run_one(i, c))
            .collect()
    });
    // The first failure in run order, independent of scheduling.
    results.into_iter().collect()
}

pub fn summary(rows: &[SweepRow]) -> Table {
    let mut table = Table::new(SUMMARY_HEADER);
    for r in rows {
        let m = &r.metrics;
        table.rows.push(vec![
            Some(r.run as f64),
            Some(r.alpha),
            Some(r.k_alpha),
            Some(r.gamma),
            Some(r.t1),
            Some(r.p_a),
            Some(m.peak_abs),
            Some(m.t_peak),
            m.peak_spacing,
            m.crest_spacing,
            Some(m.post_load_ratio),
        ]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;

    #[test]
    fn lexicographic_order() {
        let mut c = preset("fig1").unwrap();
        c.sweep.alpha = vec![0.5, 2.0];
        c.sweep.t1 = vec![5e-6, 10e-6, 15e-6];
        let runs = expand(&c).unwrap();
        let keys: Vec<(f64, f64)> = runs.iter().map(|r| (r.damper.alpha, r.load.t1.unwrap())).collect();
        assert_eq!(
            keys,
            vec![(0.5, 5e-6), (0.5, 10e-6), (0.5, 15e-6), (2.0, 5e-6), (2.0, 10e-6), (2.0, 15e-6)]
        );
    }

    #[test]
    fn empty_axes_give_the_base_run() {
        let c = preset("fig2").unwrap();
        assert_eq!(expand(&c).unwrap(), vec![c]);
    }

    #[test]
    fn caps_and_axis_checks() {
        let mut c = preset("fig1").unwrap();
        c.sweep.k_alpha = (0..200).map(f64::from).collect();
        c.sweep.alpha = (1..=60).map(|a| a as f64 / 30.0).collect();
        assert!(matches!(expand(&c), Err(CliError::Config { field, .. }) if field == "sweep.max_runs"));
        c.sweep.max_runs = 12_000;
        assert_eq!(expand(&c).unwrap().len(), 12_000);

        let mut c = preset("fig1").unwrap();
        c.load.kind = LoadKind::Zero;
        c.sweep.t1 = vec![1e-6];
        assert!(matches!(expand(&c), Err(CliError::Config { field, .. }) if field == "sweep.t1"));
    }

    #[test]
    fn amplitude_axis_replaces_force() {
        let mut c = preset("fig4").unwrap();
        c.sweep.p_a = vec![1e8];
        let runs = run_sweep(&c, 2).unwrap();
        assert_eq!(runs[0].p_a, 1e8);
    }
}
