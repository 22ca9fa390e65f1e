//! The damper response `f(ξ) = ξ + γ|ξ|^α sgn(ξ)` and its inverse `Q_α`.
//!
//! At every time step the lower-face velocity `ξ` solves `f(ξ) = r`, where
//! `r` collects the wave arriving from the loaded face. `f` is odd, continuous
//! and strictly increasing for `α > 0`, so the inverse is unique.
//!
//! Four exponents have closed forms:
//!
//! | α   | `Q_α r` for `r ≥ 0`                                   |
//! |-----|-------------------------------------------------------|
//! | 2   | `(-1 + sqrt(1 + 4γr)) / (2γ)`                         |
//! | 1   | `r / (1 + γ)`                                         |
//! | 1/2 | `(-γ + sqrt(γ² + 4r))² / 4`                           |
//! | 1/3 | `s³` with `s` the real root of `s³ + γs − r = 0`      |
//!
//! They are evaluated in rationalised forms that avoid the cancellation in
//! `-1 + sqrt(1 + small)`. Every other `α` goes through a safeguarded Newton
//! iteration on a bracket `[0, |r|]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{signed_pow, DamperSpec};

/// `ξ + γ|ξ|^α sgn(ξ)`, with `sgn(0) = 0`.
pub fn damper_residual(xi: f64, spec: &DamperSpec) -> f64 {
    response(xi, spec.alpha, spec.gamma)
}

fn response(xi: f64, alpha: f64, gamma: f64) -> f64 {
    xi + gamma * signed_pow(xi, alpha)
}

/// How [`QAlphaSolver`] evaluates the inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InverseMode {
    ClosedForm2,
    ClosedForm1,
    ClosedFormHalf,
    ClosedFormThird,
    RootFind,
}

impl InverseMode {
    /// Closed form when `α` is exactly 2, 1, 1/2 or 1/3, root-finding otherwise.
    pub fn for_alpha(alpha: f64) -> Self {
        if alpha == 2.0 {
            Self::ClosedForm2
        } else if alpha == 1.0 {
            Self::ClosedForm1
        } else if alpha == 0.5 {
            Self::ClosedFormHalf
        } else if alpha == 1.0 / 3.0 {
            Self::ClosedFormThird
        } else {
            Self::RootFind
        }
    }
}

pub const DEFAULT_REL_TOL: f64 = 1e-13;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Inverse `Q_α` of the damper response for fixed `α` and `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QAlphaSolver {
    pub alpha: f64,
    pub gamma: f64,
    pub mode: InverseMode,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl QAlphaSolver {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Invalid {
                field: "alpha",
                reason: format!("must be finite and > 0, got {alpha}"),
            });
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::Invalid {
                field: "gamma",
                reason: format!("must be finite and >= 0, got {gamma}"),
            });
        }
        Ok(Self {
            alpha,
            gamma,
            mode: InverseMode::for_alpha(alpha),
            rel_tol: DEFAULT_REL_TOL,
            max_iter: DEFAULT_MAX_ITER,
        })
    }

    pub fn for_damper(spec: &DamperSpec) -> Result<Self> {
        Self::new(spec.alpha, spec.gamma)
    }

    /// Same `α, γ`, but always solved numerically.
    pub fn root_finding(mut self) -> Self {
        self.mode = InverseMode::RootFind;
        self
    }

    pub fn with_tolerance(mut self, rel_tol: f64, max_iter: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-8) {
            return Err(Error::Invalid {
                field: "rel_tol",
                reason: format!("must lie in (0, 1e-8], got {rel_tol}"),
            });
        }
        if max_iter < 50 {
            return Err(Error::Invalid {
                field: "max_iter",
                reason: format!("must be >= 50, got {max_iter}"),
            });
        }
        self.rel_tol = rel_tol;
        self.max_iter = max_iter;
        Ok(self)
    }

    /// `Q_α r`: the unique `ξ` with `ξ + γ|ξ|^α sgn(ξ) = r`.
    pub fn q_alpha(&self, r: f64) -> Result<f64> {
        if !r.is_finite() {
            return Err(Error::Invalid {
                field: "r",
                reason: format!("must be finite, got {r}"),
            });
        }
        if r == 0.0 {
            return Ok(0.0);
        }
        if self.gamma == 0.0 {
            return Ok(r);
        }
        let m = r.abs();
        let g = self.gamma;
        let xi = match self.mode {
            InverseMode::ClosedForm1 => m / (1.0 + g),
            InverseMode::ClosedForm2 => 2.0 * m / (1.0 + (1.0 + 4.0 * g * m).sqrt()),
            InverseMode::ClosedFormHalf => {
                let d = g + (g * g + 4.0 * m).sqrt();
                4.0 * m * m / (d * d)
            }
            InverseMode::ClosedFormThird => {
                // Cardano: s = a + b with a³ = m/2 + S, ab = -γ/3. Writing
                // s = (a³ + b³)/(a² - ab + b²) keeps every term positive.
                let a = (0.5 * m + (0.25 * m * m + g * g * g / 27.0).sqrt()).cbrt();
                let b = g / (3.0 * a);
                let s = m / (a * a + g / 3.0 + b * b);
                s * s * s
            }
            InverseMode::RootFind => self.solve_positive(m)?,
        };
        Ok(xi.copysign(r))
    }

    /// `(2Q_α − I) r`: the reflection of an incident wave at the damper.
    pub fn two_q_minus_i(&self, r: f64) -> Result<f64> {
        Ok(2.0 * self.q_alpha(r)? - r)
    }

    /// `(2Q_α − I)^k r`, with `k = 0` the identity.
    pub fn two_q_minus_i_pow(&self, k: usize, r: f64) -> Result<f64> {
        (0..k).try_fold(r, |acc, _| self.two_q_minus_i(acc))
    }

    /// Root of `f(ξ) = m` for `m > 0`, `γ > 0`.
    ///
    /// For `α ≥ 1`, `f` is convex on `[0, ∞)`. For `α < 1` the iteration runs
    /// in `s = ξ^α`, where `g(s) = s^{1/α} + γs` is convex and its slope stays
    /// finite at zero. Newton started from an upper bound of a convex
    /// increasing function descends monotonically onto the root; the bracket
    /// and bisection fallback cover floating-point misbehaviour.
    fn solve_positive(&self, m: f64) -> Result<f64> {
        let (alpha, gamma) = (self.alpha, self.gamma);
        let in_s = alpha < 1.0;
        let p = if in_s { 1.0 / alpha } else { alpha };
        // Work variable y is ξ (α ≥ 1) or ξ^α (α < 1); in both cases the
        // equation reads y^p·a + y·b = m.
        let (ca, cb) = if in_s { (1.0, gamma) } else { (gamma, 1.0) };
        let g = |y: f64| ca * y.powf(p) + cb * y;
        let dg = |y: f64| ca * p * y.powf(p - 1.0) + cb;

        let (mut lo, mut hi) = (0.0_f64, (m / cb).min((m / ca).powf(1.0 / p)));
        let mut y = hi;
        let mut iterations = 0;
        while iterations < self.max_iter {
            iterations += 1;
            let gy = g(y) - m;
            if gy == 0.0 {
                break;
            }
            if gy > 0.0 {
                hi = hi.min(y);
            } else {
                lo = lo.max(y);
            }
            let step = gy / dg(y);
            let mut next = y - step;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if next == y || hi - lo <= 2.0 * f64::EPSILON * hi {
                y = next;
                break;
            }
            y = next;
        }
        let xi = if in_s { polish(y.powf(p), m, alpha, gamma) } else { y };
        let resid = (response(xi, alpha, gamma) - m).abs();
        // A root below the float resolution rounds to a neighbour of xi.
        let bracketed = response(xi.next_down().max(0.0), alpha, gamma) <= m
            && response(xi.next_up(), alpha, gamma) >= m;
        if resid <= self.rel_tol * m.max(1.0) || bracketed {
            Ok(xi)
        } else {
            Err(Error::NotConverged {
                r: m,
                alpha,
                gamma,
                iterations,
            })
        }
    }
}

/// Newton steps in `ξ` itself, kept while the residual shrinks.
///
/// One ulp of `s = ξ^α` is `1/α` ulps of `ξ`, so for small `α` the root
/// found in `s` is only good to about `ε/α` relative.
fn polish(mut xi: f64, m: f64, alpha: f64, gamma: f64) -> f64 {
    let mut resid = (response(xi, alpha, gamma) - m).abs();
    for _ in 0..8 {
        if xi <= 0.0 || resid == 0.0 {
            break;
        }
        let slope = 1.0 + gamma * alpha * xi.powf(alpha - 1.0);
        let next = xi - (response(xi, alpha, gamma) - m) / slope;
        let r = (response(next, alpha, gamma) - m).abs();
        if !(next > 0.0 && r < resid) {
            break;
        }
        xi = next;
        resid = r;
    }
    xi
}
