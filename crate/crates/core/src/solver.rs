//! Exact recursive time marching of the boundary values.
//!
//! With `z = ρc`, `N` grid steps per transit time and every quantity zero at
//! negative times, each step evaluates
//!
//! ```text
//! v0[i] = Q_α( vh[i-N] + p[i-N]/z )
//! vh[i] = 2 v0[i-N] - vh[i-2N] + (p[i] - p[i-2N]) / z
//! ```
//!
//! Both right-hand sides only read indices at least `N` steps back, so the
//! values at grid times are exact up to floating-point rounding regardless
//! of `N`. Displacements follow by quadrature and the output voltage from
//! the open-circuit potential `Δφ = (e/ε)(u(0,t) − u(h,t))`.

use serde::{Deserialize, Serialize};

use crate::damper::QAlphaSolver;
use crate::error::Result;
use crate::load::LoadSignal;
use crate::material::{
    derive_constants, DamperSpec, DerivedConstants, Geometry, MaterialProperties, TimeGrid,
};

/// Rule used to integrate boundary velocities into displacements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    /// Exact for right-continuous piecewise-constant velocities with
    /// breakpoints on the grid.
    LeftRiemann,
    Trapezoidal,
}

impl Quadrature {
    pub fn for_load(load: &LoadSignal) -> Self {
        if load.is_piecewise_constant() {
            Self::LeftRiemann
        } else {
            Self::Trapezoidal
        }
    }

    /// Running integral `u[i] = ∫_0^{t_i} v dτ`, `u[0] = 0`, with
    /// Neumaier-compensated accumulation.
    pub fn cumulative(self, v: &[f64], dt: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(v.len());
        let (mut sum, mut carry) = (0.0_f64, 0.0_f64);
        for i in 0..v.len() {
            if i > 0 {
                let term = match self {
                    Self::LeftRiemann => v[i - 1] * dt,
                    Self::Trapezoidal => 0.5 * (v[i - 1] + v[i]) * dt,
                };
                let t = sum + term;
                carry += if sum.abs() >= term.abs() {
                    (sum - t) + term
                } else {
                    (term - t) + sum
                };
                sum = t;
            }
            out.push(sum + carry);
        }
        out
    }
}

/// Boundary values on the time grid.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundaryHistory {
    /// Lower-face velocity `v(0, t_i)`, m/s.
    pub v0: Vec<f64>,
    /// Upper-face velocity `v(h, t_i)`, m/s.
    pub vh: Vec<f64>,
    /// Lower-face stress `σ(0, t_i)`, Pa.
    pub sigma0: Vec<f64>,
    /// Lower-face displacement, m.
    pub u0: Vec<f64>,
    /// Upper-face displacement, m.
    pub uh: Vec<f64>,
    /// Output voltage `φ(0,t) − φ(h,t)`, V.
    pub voltage: Vec<f64>,
}

impl BoundaryHistory {
    pub fn len(&self) -> usize {
        self.v0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v0.is_empty()
    }

    pub(crate) fn finish(
        v0: Vec<f64>,
        vh: Vec<f64>,
        sigma0: Vec<f64>,
        dt: f64,
        rule: Quadrature,
        coupling: f64,
    ) -> Self {
        let u0 = rule.cumulative(&v0, dt);
        let uh = rule.cumulative(&vh, dt);
        // Integrating the difference avoids cancelling two large displacements.
        let relative: Vec<f64> = v0.iter().zip(&vh).map(|(a, b)| a - b).collect();
        let voltage = rule
            .cumulative(&relative, dt)
            .into_iter()
            .map(|du| coupling * du)
            .collect();
        Self {
            v0,
            vh,
            sigma0,
            u0,
            uh,
            voltage,
        }
    }
}

/// Everything needed to reproduce and post-process a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub grid: TimeGrid,
    pub history: BoundaryHistory,
    pub material: MaterialProperties,
    pub geometry: Geometry,
    pub derived: DerivedConstants,
    pub damper: DamperSpec,
    pub load: LoadSignal,
    /// `p(t_i)` as used by the recursion.
    pub load_samples: Vec<f64>,
    pub quadrature: Quadrature,
}

impl SimulationResult {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.grid.times()
    }
}

#[inline]
pub(crate) fn lagged(v: &[f64], i: usize, lag: usize) -> f64 {
    if i >= lag {
        v[i - lag]
    } else {
        0.0
    }
}

pub fn run_recursive(
    mat: &MaterialProperties,
    geo: &Geometry,
    damper: &DamperSpec,
    load: &LoadSignal,
    grid: &TimeGrid,
) -> Result<SimulationResult> {
    let derived = derive_constants(mat, geo)?;
    load.validate()?;
    let p = load.sample(grid)?;
    let q = QAlphaSolver::for_damper(damper)?;
    let z = derived.impedance;
    let n = grid.samples_per_transit;
    let len = grid.len();

    let mut v0 = vec![0.0; len];
    let mut vh = vec![0.0; len];
    let mut sigma0 = vec![0.0; len];
    for i in 0..len {
        v0[i] = q.q_alpha(lagged(&vh, i, n) + lagged(&p, i, n) / z)?;
        vh[i] = 2.0 * lagged(&v0, i, n) - lagged(&vh, i, 2 * n)
            + (p[i] - lagged(&p, i, 2 * n)) / z;
        sigma0[i] = damper.stress(v0[i], geo);
    }

    let quadrature = Quadrature::for_load(load);
    let history = BoundaryHistory::finish(v0, vh, sigma0, grid.dt, quadrature, mat.coupling());
    Ok(SimulationResult {
        grid: *grid,
        history,
        material: *mat,
        geometry: *geo,
        derived,
        damper: *damper,
        load: load.clone(),
        load_samples: p,
        quadrature,
    })
}

/// Largest residual of the two characteristic boundary relations
///
/// ```text
/// p(t)  = σ0(t − θ) + z [vh(t) − v0(t − θ)]
/// σ0(t) = p(t − θ)  + z [vh(t − θ) − v0(t)]
/// ```
///
/// over the grid, divided by `max(p_a, z·max|v|)`.
pub fn boundary_residual(result: &SimulationResult) -> f64 {
    let h = &result.history;
    let p = &result.load_samples;
    let z = result.derived.impedance;
    let n = result.grid.samples_per_transit;
    let vmax = h.v0.iter().chain(&h.vh).fold(0.0_f64, |m, v| m.max(v.abs()));
    let scale = result.load.amplitude().max(z * vmax);
    if scale == 0.0 {
        return 0.0;
    }
    (0..h.len())
        .map(|i| {
            let top = p[i] - lagged(&h.sigma0, i, n) - z * (h.vh[i] - lagged(&h.v0, i, n));
            let bottom = h.sigma0[i] - lagged(p, i, n) - z * (lagged(&h.vh, i, n) - h.v0[i]);
            top.abs().max(bottom.abs())
        })
        .fold(0.0_f64, f64::max)
        / scale
}

/// Cumulative energy absorbed by the damper, J.
///
/// `E[i] = A Σ_{j<=i} (k_α/A)|v0[j]|^{α+1} dt`.
pub fn dissipated_energy(
    history: &BoundaryHistory,
    damper: &DamperSpec,
    geo: &Geometry,
    dt: f64,
) -> Vec<f64> {
    let mut acc = 0.0;
    history
        .v0
        .iter()
        .map(|v| {
            // Power absorbed: A σ(0,t) v(0,t) >= 0.
            acc += geo.face_area * damper.stress(*v, geo) * v * dt;
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{derive_damper, make_grid};

    fn setup(alpha: f64, k: f64, t1_transits: f64, n: usize) -> SimulationResult {
        let mat = MaterialProperties::PZT5A;
        let geo = Geometry::with_diameter(0.01, 0.01).unwrap();
        let d = derive_constants(&mat, &geo).unwrap();
        let damper = derive_damper(k, alpha, &d, &geo).unwrap();
        let grid = make_grid(d.transit, n, 12.0 * d.transit).unwrap();
        let load = LoadSignal::rectangular(3.6466e8, t1_transits * d.transit)
            .unwrap()
            .snapped_to(&grid);
        run_recursive(&mat, &geo, &damper, &load, &grid).unwrap()
    }

    #[test]
    fn early_windows() {
        let r = setup(0.5, 1000.0, 1.5, 16);
        let z = r.derived.impedance;
        let n = r.grid.samples_per_transit;
        for i in 0..n {
            assert_eq!(r.history.v0[i], 0.0);
        }
        for i in 0..2 * n {
            assert_eq!(r.history.vh[i], r.load_samples[i] / z);
        }
        assert!((r.history.vh[0] + 12.77).abs() < 0.01, "{}", r.history.vh[0]);
    }

    #[test]
    fn early_voltage_ramp() {
        let r = setup(0.5, 1000.0, 1.5, 16);
        let slope = r.material.coupling() * 3.6466e8 / r.derived.impedance;
        assert!((slope - 3.338e10).abs() < 0.001e10, "{slope}");
        for i in 0..=r.grid.samples_per_transit {
            let want = slope * r.grid.time(i);
            assert!((r.history.voltage[i] - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn matched_damper_absorbs() {
        let mat = MaterialProperties::PZT5A;
        let geo = Geometry::with_diameter(0.01, 0.01).unwrap();
        let d = derive_constants(&mat, &geo).unwrap();
        let damper = derive_damper(d.impedance * geo.face_area, 1.0, &d, &geo).unwrap();
        assert_eq!(damper.gamma, 1.0);
        let grid = make_grid(d.transit, 8, 10.0 * d.transit).unwrap();
        let load = LoadSignal::rectangular(1e8, 1.5 * d.transit).unwrap().snapped_to(&grid);
        let r = run_recursive(&mat, &geo, &damper, &load, &grid).unwrap();
        for i in 16..grid.len() {
            assert!(r.history.vh[i].abs() <= 1e-12, "i={i} {}", r.history.vh[i]);
        }
    }

    #[test]
    fn stress_follows_damper_law() {
        let r = setup(2.0, 250.0, 3.0, 8);
        for (s, v) in r.history.sigma0.iter().zip(&r.history.v0) {
            assert_eq!(*s, r.damper.stress(*v, &r.geometry));
        }
    }

    #[test]
    fn dissipation() {
        let r = setup(0.5, 1000.0, 2.5, 8);
        let e = dissipated_energy(&r.history, &r.damper, &r.geometry, r.grid.dt);
        let n = r.grid.samples_per_transit;
        assert!(e[..n].iter().all(|x| *x == 0.0));
        assert!(e.windows(2).all(|w| w[1] >= w[0]));
        assert!(*e.last().unwrap() > 0.0);

        let free = setup(0.5, 0.0, 2.5, 8);
        let e = dissipated_energy(&free.history, &free.damper, &free.geometry, free.grid.dt);
        assert!(e.iter().all(|x| *x == 0.0));

        let lin = setup(1.0, 700.0, 2.5, 8);
        let e = dissipated_energy(&lin.history, &lin.damper, &lin.geometry, lin.grid.dt);
        let direct: f64 = lin.history.v0.iter().map(|v| 700.0 * v * v * lin.grid.dt).sum();
        assert!((e.last().unwrap() - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn linear_scaling() {
        let mat = MaterialProperties::PZT5A;
        let geo = Geometry::with_diameter(0.01, 0.01).unwrap();
        let d = derive_constants(&mat, &geo).unwrap();
        let damper = derive_damper(800.0, 1.0, &d, &geo).unwrap();
        let grid = make_grid(d.transit, 8, 10.0 * d.transit).unwrap();
        let run = |pa: f64| {
            let load = LoadSignal::rectangular(pa, 3.0 * d.transit).unwrap().snapped_to(&grid);
            run_recursive(&mat, &geo, &damper, &load, &grid).unwrap()
        };
        let a = run(1e8);
        let b = run(3.5e8);
        let max = a.history.voltage.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (x, y) in a.history.voltage.iter().zip(&b.history.voltage) {
            assert!((3.5 * x - y).abs() <= 1e-13 * 3.5 * max);
        }
    }

    #[test]
    fn residual_of_exact_run_is_rounding() {
        let mut r = setup(0.5, 1000.0, 2.5, 8);
        assert!(boundary_residual(&r) <= 1e-14);
        r.history.vh[30] += 1.0;
        assert!(boundary_residual(&r) > 1e-3);
    }

    #[test]
    fn quadrature_rules() {
        let v = [1.0, 1.0, 3.0, 3.0];
        assert_eq!(Quadrature::LeftRiemann.cumulative(&v, 0.5), vec![0.0, 0.5, 1.0, 2.5]);
        assert_eq!(Quadrature::Trapezoidal.cumulative(&v, 0.5), vec![0.0, 0.5, 1.5, 3.0]);
    }
}
