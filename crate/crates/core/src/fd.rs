//! Leapfrog finite-difference solver for the same rod, used as an
//! independent check on the exact recursion.
//!
//! The displacement wave equation `ρü = C^D u''` is advanced on `nx + 1`
//! nodes with the explicit central scheme
//!
//! ```text
//! u[j]⁺ = 2u[j] − u[j]⁻ + λ² (u[j+1] − 2u[j] + u[j−1]),   λ = c Δt / Δx
//! ```
//!
//! Both stress conditions are imposed with ghost nodes and centred
//! differences. At the top `C^D u'(h) = p(t)` is explicit. At the bottom the
//! damper ties `C^D u'(0)` to the centred velocity `ξ = (u[0]⁺ − u[0]⁻)/2Δt`,
//! which after elimination of the ghost node reads
//!
//! ```text
//! ξ + λγ |ξ|^α sgn ξ = (u[0] − u[0]⁻ + λ² (u[1] − u[0])) / Δt
//! ```
//!
//! and is inverted exactly with `Q_α` at the rescaled coefficient `λγ`.

use serde::{Deserialize, Serialize};

use crate::damper::QAlphaSolver;
use crate::error::{Error, Result};
use crate::load::LoadSignal;
use crate::material::{derive_constants, make_grid, DamperSpec, Geometry, MaterialProperties};
use crate::solver::{run_recursive, BoundaryHistory, SimulationResult};

pub const DEFAULT_CFL: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    /// Number of cells; the mesh has `nx + 1` nodes.
    pub nx: usize,
    pub cfl: f64,
    pub t_end: f64,
}

impl FdConfig {
    pub fn new(nx: usize, t_end: f64) -> Self {
        Self {
            nx,
            cfl: DEFAULT_CFL,
            t_end,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 16 {
            return Err(Error::Invalid {
                field: "nx",
                reason: format!("must be >= 16, got {}", self.nx),
            });
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Invalid {
                field: "cfl",
                reason: format!("Courant number must lie in (0, 1], got {}", self.cfl),
            });
        }
        crate::error::positive("t_end", self.t_end)?;
        Ok(())
    }
}

/// Finite-difference run: boundary histories on the uniform step `dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdResult {
    pub config: FdConfig,
    pub dt: f64,
    pub history: BoundaryHistory,
    /// Kinetic plus strain energy, J.
    pub energy: Vec<f64>,
    /// Cumulative work done by the load on the upper face, J.
    pub load_work: Vec<f64>,
    /// Cumulative energy absorbed by the damper, J.
    pub dissipated: Vec<f64>,
}

impl FdResult {
    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.history.len()).map(|n| self.time(n))
    }
}

pub fn run_fd(
    mat: &MaterialProperties,
    geo: &Geometry,
    damper: &DamperSpec,
    load: &LoadSignal,
    fd: &FdConfig,
) -> Result<FdResult> {
    fd.validate()?;
    load.validate()?;
    let derived = derive_constants(mat, geo)?;
    let nx = fd.nx;
    let dx = geo.thickness / nx as f64;
    let dt = fd.cfl * dx / derived.wave_speed;
    let lam2 = fd.cfl * fd.cfl;
    let q = QAlphaSolver::new(damper.alpha, fd.cfl * damper.gamma)?;
    let steps = (fd.t_end / dt).ceil() as usize;
    let area = geo.face_area;

    let mut prev = vec![0.0; nx + 1];
    let mut cur = vec![0.0; nx + 1];
    let mut next = vec![0.0; nx + 1];

    let len = steps + 1;
    let mut v0 = Vec::with_capacity(len);
    let mut vh = Vec::with_capacity(len);
    let mut sigma0 = Vec::with_capacity(len);
    let mut u0 = Vec::with_capacity(len);
    let mut uh = Vec::with_capacity(len);
    let mut energy = Vec::with_capacity(len);
    let mut load_work = Vec::with_capacity(len);
    let mut dissipated = Vec::with_capacity(len);
    let (mut work, mut lost) = (0.0, 0.0);

    for n in 0..len {
        let p = load.eval(n as f64 * dt)?;
        for j in 1..nx {
            next[j] = 2.0 * cur[j] - prev[j] + lam2 * (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]);
        }
        next[nx] = 2.0 * cur[nx] - prev[nx]
            + lam2 * (2.0 * cur[nx - 1] - 2.0 * cur[nx] + 2.0 * dx * p / derived.c_d);
        let r = (cur[0] - prev[0] + lam2 * (cur[1] - cur[0])) / dt;
        let xi = q.q_alpha(r)?;
        next[0] = prev[0] + 2.0 * dt * xi;

        let top_v = (next[nx] - prev[nx]) / (2.0 * dt);
        let s0 = damper.stress(xi, geo);
        v0.push(xi);
        vh.push(top_v);
        sigma0.push(s0);
        u0.push(cur[0]);
        uh.push(cur[nx]);

        // Trapezoid-weighted energy at level n.
        let mut kinetic = 0.0;
        for j in 0..=nx {
            let v = (next[j] - prev[j]) / (2.0 * dt);
            let w = if j == 0 || j == nx { 0.5 } else { 1.0 };
            kinetic += w * v * v;
        }
        let strain: f64 = cur.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
        energy.push(
            area * (0.5 * mat.density * kinetic * dx + 0.5 * derived.c_d * strain / dx),
        );
        if n > 0 {
            work += area * p * top_v * dt;
            lost += area * s0 * xi * dt;
        }
        load_work.push(work);
        dissipated.push(lost);

        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }

    let coupling = mat.coupling();
    let voltage = u0.iter().zip(&uh).map(|(a, b)| coupling * (a - b)).collect();
    Ok(FdResult {
        config: *fd,
        dt,
        history: BoundaryHistory {
            v0,
            vh,
            sigma0,
            u0,
            uh,
            voltage,
        },
        energy,
        load_work,
        dissipated,
    })
}

/// Error of a sampled series against a reference on a finer grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesError {
    pub linf: f64,
    pub l2: f64,
    /// `linf` divided by the reference's largest magnitude.
    pub rel_linf: f64,
}

/// Compares `values` at `t_n = n·dt` against `reference` at `t_i = i·ref_dt`,
/// interpolating the reference linearly. Samples past the reference's end are
/// ignored.
pub fn series_error(reference: &[f64], ref_dt: f64, values: &[f64], dt: f64) -> SeriesError {
    let ref_end = (reference.len().saturating_sub(1)) as f64 * ref_dt;
    let scale = reference.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let (mut linf, mut sq, mut count) = (0.0_f64, 0.0, 0usize);
    for (n, v) in values.iter().enumerate() {
        let t = n as f64 * dt;
        if t > ref_end * (1.0 + 1e-12) {
            break;
        }
        let mut pos = t / ref_dt;
        if (pos - pos.round()).abs() <= 1e-9 {
            pos = pos.round();
        }
        let i = (pos.floor() as usize).min(reference.len() - 1);
        let frac = pos - i as f64;
        let r = if i + 1 < reference.len() {
            reference[i] + frac * (reference[i + 1] - reference[i])
        } else {
            reference[i]
        };
        let e = (v - r).abs();
        linf = linf.max(e);
        sq += e * e;
        count += 1;
    }
    let l2 = if count > 0 { (sq / count as f64).sqrt() } else { 0.0 };
    SeriesError {
        linf,
        l2,
        rel_linf: if scale > 0.0 { linf / scale } else { linf },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub nx: usize,
    pub error: SeriesError,
    /// `log(e_prev/e)/log(nx/nx_prev)` against the previous row; `None` on the first.
    pub observed_order: Option<f64>,
}

/// Samples per transit of the exact reference used by [`convergence_study`].
pub fn reference_samples(nx_list: &[usize]) -> usize {
    let finest = nx_list.iter().copied().max().unwrap_or(1);
    (8 * finest).next_power_of_two().max(1024)
}

/// Voltage error of the finite-difference solver against the exact one for
/// each mesh in `nx_list`.
///
/// The load is first snapped to the reference grid so both solvers see the
/// same signal.
pub fn convergence_study(
    mat: &MaterialProperties,
    geo: &Geometry,
    damper: &DamperSpec,
    load: &LoadSignal,
    nx_list: &[usize],
    cfl: f64,
    t_end: f64,
) -> Result<Vec<ConvergenceRow>> {
    let derived = derive_constants(mat, geo)?;
    let grid = make_grid(derived.transit, reference_samples(nx_list), t_end)?;
    let load = load.snapped_to(&grid);
    let exact = run_recursive(mat, geo, damper, &load, &grid)?;
    convergence_against(&exact, nx_list, cfl, t_end)
}

/// Same as [`convergence_study`] with a precomputed exact reference.
pub fn convergence_against(
    exact: &SimulationResult,
    nx_list: &[usize],
    cfl: f64,
    t_end: f64,
) -> Result<Vec<ConvergenceRow>> {
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(nx_list.len());
    for &nx in nx_list {
        let fd = run_fd(
            &exact.material,
            &exact.geometry,
            &exact.damper,
            &exact.load,
            &FdConfig { nx, cfl, t_end },
        )?;
        let error = series_error(&exact.history.voltage, exact.grid.dt, &fd.history.voltage, fd.dt);
        let observed_order = rows.last().map(|prev| {
            (prev.error.linf / error.linf).ln() / (nx as f64 / prev.nx as f64).ln()
        });
        rows.push(ConvergenceRow {
            nx,
            error,
            observed_order,
        });
    }
    Ok(rows)
}
