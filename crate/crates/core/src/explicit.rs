//! Closed-form boundary velocities for loads shorter than six transit times.
//!
//! Write `T = 2Q_α − I` and `P(m) = p(t − mθ)/z`. Unrolling the two-transit
//! recursion `v(h,t) = T[v(h,t−2θ) + P(2)] + P(0)` gives the nested series
//!
//! ```text
//! v(h,t) = P(0) + T[2P(2) + T[2P(4) + ... + T[2P(2k)]]],  2kθ <= t < 2(k+1)θ
//! ```
//!
//! When `p` vanishes outside `[0, 2Mθ)` only the innermost `M` terms survive
//! and the leading zeros collapse into a power of `T`, which is what makes a
//! fixed-size formula possible for each `M = 1, 2, 3`. Note the factor 2 on
//! every delayed term: only the undelayed `P(0)` enters with weight one.
//!
//! The lower-face velocity follows from `v(0,t) = Q_α[v(h,t−θ) + P(1)]` and
//! has the same structure on the odd windows `(2k−1)θ <= t < (2k+1)θ`.

use serde::{Deserialize, Serialize};

use crate::damper::QAlphaSolver;
use crate::error::{Error, Result};
use crate::load::LoadSignal;
use crate::material::DamperSpec;
use crate::solver::{lagged, SimulationResult};

/// Which closed form covers a load of duration `t1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DurationCase {
    /// `t1 < 2θ`
    Case1,
    /// `t1 < 4θ`
    Case2,
    /// `t1 < 6θ`
    Case3,
    /// `t1 >= 6θ`: recursion only.
    General,
}

pub fn classify_case(t1: f64, theta: f64) -> DurationCase {
    if t1 < 2.0 * theta {
        DurationCase::Case1
    } else if t1 < 4.0 * theta {
        DurationCase::Case2
    } else if t1 < 6.0 * theta {
        DurationCase::Case3
    } else {
        DurationCase::General
    }
}

/// Classification by grid indices, free of rounding at the boundaries.
pub fn classify_case_on_grid(t1_steps: usize, samples_per_transit: usize) -> DurationCase {
    let n = samples_per_transit;
    if t1_steps < 2 * n {
        DurationCase::Case1
    } else if t1_steps < 4 * n {
        DurationCase::Case2
    } else if t1_steps < 6 * n {
        DurationCase::Case3
    } else {
        DurationCase::General
    }
}

/// `v(h,t)` in window `k`, with `pd(m) = p(t − mθ)/z`.
fn vh_window(
    case: DurationCase,
    k: usize,
    pd: &impl Fn(usize) -> f64,
    q: &QAlphaSolver,
) -> Result<f64> {
    use DurationCase::*;
    let t = |x: f64| q.two_q_minus_i(x);
    if k == 0 {
        return Ok(pd(0));
    }
    match case {
        Case1 => q.two_q_minus_i_pow(k, 2.0 * pd(2 * k)),
        Case2 => match k {
            1 => Ok(pd(0) + t(2.0 * pd(2))?),
            _ => q.two_q_minus_i_pow(k - 1, 2.0 * pd(2 * k - 2) + t(2.0 * pd(2 * k))?),
        },
        Case3 => match k {
            1 => Ok(pd(0) + t(2.0 * pd(2))?),
            2 => Ok(pd(0) + t(2.0 * pd(2) + t(2.0 * pd(4))?)?),
            _ => {
                let inner = 2.0 * pd(2 * k - 2) + t(2.0 * pd(2 * k))?;
                q.two_q_minus_i_pow(k - 2, 2.0 * pd(2 * k - 4) + t(inner)?)
            }
        },
        General => Err(Error::UnsupportedCase { duration: f64::NAN }),
    }
}

/// `v(0,t)` in odd window `k`: `(2k−1)θ <= t < (2k+1)θ`.
fn v0_window(
    case: DurationCase,
    k: usize,
    pd: &impl Fn(usize) -> f64,
    q: &QAlphaSolver,
) -> Result<f64> {
    use DurationCase::*;
    let t = |x: f64| q.two_q_minus_i(x);
    if k == 0 {
        return Ok(0.0);
    }
    let arg = match case {
        Case1 => q.two_q_minus_i_pow(k - 1, 2.0 * pd(2 * k - 1))?,
        Case2 => match k {
            1 => 2.0 * pd(1),
            _ => q.two_q_minus_i_pow(k - 2, 2.0 * pd(2 * k - 3) + t(2.0 * pd(2 * k - 1))?)?,
        },
        Case3 => match k {
            1 => 2.0 * pd(1),
            2 => 2.0 * pd(1) + t(2.0 * pd(3))?,
            _ => {
                let inner = 2.0 * pd(2 * k - 3) + t(2.0 * pd(2 * k - 1))?;
                q.two_q_minus_i_pow(k - 3, 2.0 * pd(2 * k - 5) + t(inner)?)?
            }
        },
        General => return Err(Error::UnsupportedCase { duration: f64::NAN }),
    };
    q.q_alpha(arg)
}

fn check_case(case: DurationCase, load: &LoadSignal, theta: f64) -> Result<()> {
    let duration = load.duration();
    if case == DurationCase::General {
        return Err(Error::UnsupportedCase { duration });
    }
    let needed = classify_case(duration, theta);
    if needed as u8 > case as u8 {
        return Err(Error::Invalid {
            field: "case",
            reason: format!("{case:?} does not cover a load of duration {duration:e} s"),
        });
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Invalid {
            field: "t",
            reason: format!("must be finite and >= 0, got {t}"),
        })
    }
}

/// Closed-form `v(h, t)`.
pub fn explicit_vh(
    case: DurationCase,
    t: f64,
    load: &LoadSignal,
    damper: &DamperSpec,
    z: f64,
    theta: f64,
) -> Result<f64> {
    check_time(t)?;
    check_case(case, load, theta)?;
    let q = QAlphaSolver::for_damper(damper)?;
    let k = (t / (2.0 * theta)).floor() as usize;
    let pd = |m: usize| load.eval(t - m as f64 * theta).unwrap_or(0.0) / z;
    vh_window(case, k, &pd, &q)
}

/// Closed-form `v(0, t)`.
pub fn explicit_v0(
    case: DurationCase,
    t: f64,
    load: &LoadSignal,
    damper: &DamperSpec,
    z: f64,
    theta: f64,
) -> Result<f64> {
    check_time(t)?;
    check_case(case, load, theta)?;
    let q = QAlphaSolver::for_damper(damper)?;
    let k = ((t / theta + 1.0) / 2.0).floor() as usize;
    let pd = |m: usize| load.eval(t - m as f64 * theta).unwrap_or(0.0) / z;
    v0_window(case, k, &pd, &q)
}

/// Closed-form boundary velocities at every grid time of `result`.
///
/// Delays are taken as exact index shifts on the sampled load, so jumps are
/// resolved the same way as in the recursion. Returns `(v0, vh)`.
pub fn explicit_on_grid(result: &SimulationResult) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = result.grid.samples_per_transit;
    let p = &result.load_samples;
    let z = result.derived.impedance;
    let t1_steps = p.iter().rposition(|v| *v != 0.0).map_or(0, |i| i + 1);
    let case = classify_case_on_grid(t1_steps, n);
    if case == DurationCase::General {
        return Err(Error::UnsupportedCase {
            duration: result.load.duration(),
        });
    }
    let q = QAlphaSolver::for_damper(&result.damper)?;
    let len = result.grid.len();
    let mut v0 = Vec::with_capacity(len);
    let mut vh = Vec::with_capacity(len);
    for i in 0..len {
        let pd = |m: usize| lagged(p, i, m * n) / z;
        vh.push(vh_window(case, i / (2 * n), &pd, &q)?);
        v0.push(v0_window(case, (i + n) / (2 * n), &pd, &q)?);
    }
    Ok((v0, vh))
}
