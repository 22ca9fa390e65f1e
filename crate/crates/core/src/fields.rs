//! Interior fields rebuilt from the boundary histories.
//!
//! With no body force, no free charge and `D ≡ 0`, the representation
//! formulas reduce to delayed boundary values along the two characteristics
//! through `(x, t)`:
//!
//! ```text
//! v(x,t) = ½[v0(t − x/c) + vh(t − (h−x)/c)] + [p(t − (h−x)/c) − σ0(t − x/c)] / 2z
//! σ(x,t) = (z/2)[vh(t − (h−x)/c) − v0(t − x/c)] + ½[σ0(t − x/c) + p(t − (h−x)/c)]
//! ```
//!
//! Positions are restricted to `x = j h / P` with `P | N`, so every delay is
//! a whole number of grid steps and nothing is interpolated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::aligned_index;
use crate::solver::{lagged, SimulationResult};

/// Field profiles at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub time: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub sigma: Vec<f64>,
    pub phi: Vec<f64>,
    /// Electric displacement, identically zero under open-circuit loading.
    pub d: f64,
}

/// Position expressed as a delay `x/c` in grid steps.
fn delay_steps(x: f64, result: &SimulationResult) -> Result<usize> {
    let h = result.geometry.thickness;
    if !(x.is_finite() && (0.0..=h * (1.0 + 1e-12)).contains(&x)) {
        return Err(Error::Invalid {
            field: "x",
            reason: format!("must lie in [0, {h:e}] m, got {x:e}"),
        });
    }
    let step = h / result.grid.samples_per_transit as f64;
    Ok(aligned_index("x", x, step)? as usize)
}

fn time_index(t: f64, result: &SimulationResult) -> Result<usize> {
    result.grid.index_of("t", t)
}

fn velocity_idx(d0: usize, i: usize, r: &SimulationResult) -> f64 {
    let n = r.grid.samples_per_transit;
    let h = &r.history;
    let z = r.derived.impedance;
    let d1 = n - d0;
    0.5 * (lagged(&h.v0, i, d0) + lagged(&h.vh, i, d1))
        + (lagged(&r.load_samples, i, d1) - lagged(&h.sigma0, i, d0)) / (2.0 * z)
}

fn stress_idx(d0: usize, i: usize, r: &SimulationResult) -> f64 {
    let n = r.grid.samples_per_transit;
    let h = &r.history;
    let z = r.derived.impedance;
    let d1 = n - d0;
    0.5 * z * (lagged(&h.vh, i, d1) - lagged(&h.v0, i, d0))
        + 0.5 * (lagged(&h.sigma0, i, d0) + lagged(&r.load_samples, i, d1))
}

fn displacement_idx(d0: usize, i: usize, r: &SimulationResult) -> f64 {
    // The faces reuse the solver's sums so that φ(0) cancels exactly.
    if d0 == 0 {
        return r.history.u0[i];
    }
    if d0 == r.grid.samples_per_transit {
        return r.history.uh[i];
    }
    let v: Vec<f64> = (0..=i).map(|j| velocity_idx(d0, j, r)).collect();
    r.quadrature.cumulative(&v, r.grid.dt)[i]
}

fn potential_from(u: f64, i: usize, r: &SimulationResult) -> f64 {
    r.material.coupling() * (u - r.history.u0[i])
}

pub fn velocity_at(x: f64, t: f64, result: &SimulationResult) -> Result<f64> {
    Ok(velocity_idx(delay_steps(x, result)?, time_index(t, result)?, result))
}

pub fn stress_at(x: f64, t: f64, result: &SimulationResult) -> Result<f64> {
    Ok(stress_idx(delay_steps(x, result)?, time_index(t, result)?, result))
}

/// `u(x,t) = ∫_0^t v(x,τ) dτ` with the solver's quadrature rule.
pub fn displacement_at(x: f64, t: f64, result: &SimulationResult) -> Result<f64> {
    Ok(displacement_idx(delay_steps(x, result)?, time_index(t, result)?, result))
}

/// Electric potential with the lower electrode grounded.
pub fn potential_at(x: f64, t: f64, result: &SimulationResult) -> Result<f64> {
    let i = time_index(t, result)?;
    let u = displacement_idx(delay_steps(x, result)?, i, result);
    Ok(potential_from(u, i, result))
}

pub fn snapshot(t: f64, points: usize, result: &SimulationResult) -> Result<FieldSnapshot> {
    let n = result.grid.samples_per_transit;
    if points == 0 || !n.is_multiple_of(points) {
        return Err(Error::Misaligned {
            what: "snapshot points",
            value: points as f64,
            step: n as f64,
            suggested_n: None,
        });
    }
    let i = time_index(t, result)?;
    let stride = n / points;
    let h = result.geometry.thickness;
    let mut snap = FieldSnapshot {
        time: result.grid.time(i),
        x: Vec::with_capacity(points + 1),
        u: Vec::with_capacity(points + 1),
        v: Vec::with_capacity(points + 1),
        sigma: Vec::with_capacity(points + 1),
        phi: Vec::with_capacity(points + 1),
        d: 0.0,
    };
    for j in 0..=points {
        let d0 = j * stride;
        let u = displacement_idx(d0, i, result);
        snap.x.push(j as f64 * h / points as f64);
        snap.u.push(u);
        snap.v.push(velocity_idx(d0, i, result));
        snap.sigma.push(stress_idx(d0, i, result));
        snap.phi.push(potential_from(u, i, result));
    }
    check_snapshot(&snap, i, result)?;
    Ok(snap)
}

fn check_snapshot(s: &FieldSnapshot, i: usize, r: &SimulationResult) -> Result<()> {
    let h = &r.history;
    let last = s.x.len() - 1;
    let vscale = h.vh.iter().chain(&h.v0).fold(1e-300_f64, |m, v| m.max(v.abs()));
    let sscale = r.load.amplitude().max(r.derived.impedance * vscale);
    let uscale = h.uh.iter().chain(&h.u0).fold(1e-300_f64, |m, v| m.max(v.abs()));
    let pscale = r.material.coupling() * uscale;
    let checks = [
        ("phi(0)", s.phi[0], 0.0, pscale),
        ("phi(h)", s.phi[last], r.material.coupling() * (h.uh[i] - h.u0[i]), pscale),
        ("sigma(h)", s.sigma[last], r.load_samples[i], sscale),
        ("sigma(0)", s.sigma[0], h.sigma0[i], sscale),
        ("v(0)", s.v[0], h.v0[i], vscale),
        ("v(h)", s.v[last], h.vh[i], vscale),
    ];
    for (name, got, want, scale) in checks {
        if (got - want).abs() > 1e-9 * scale {
            return Err(Error::Invariant(format!(
                "{name} = {got:e} but boundary value is {want:e} at t = {:e}",
                s.time
            )));
        }
    }
    Ok(())
}
