//! Applied normal stress `p(t)` on the upper face.
//!
//! Loads are causal (zero for `t < 0`) and right-continuous at jumps, so a
//! rectangular pulse of duration `t1` takes the value `-p_a` at `t = 0` and
//! `0` at `t = t1`. Compression is negative.

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::material::{aligned_index, Geometry, TimeGrid, ALIGN_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LoadSignal {
    /// `-p_a [H(t) - H(t - t1)]`.
    Rectangular { p_a: f64, t1: f64 },
    /// `-p_a sin(πt/t1)` on `[0, t1)`. Not one of the original examples:
    /// it is smooth enough for clean finite-difference convergence rates.
    HalfSine { p_a: f64, t1: f64 },
    /// Piecewise-constant samples on a uniform step `dt`, starting at `t = 0`.
    Sampled { dt: f64, values: Vec<f64> },
    Zero,
}

/// Pressure on a face from a total force `F` spread uniformly over it.
pub fn face_pressure_from_force(force: f64, geo: &Geometry) -> Result<f64> {
    positive("force", force)?;
    geo.validate()?;
    Ok(force / geo.face_area)
}

impl LoadSignal {
    pub fn rectangular(p_a: f64, t1: f64) -> Result<Self> {
        positive("p_a", p_a)?;
        positive("t1", t1)?;
        Ok(Self::Rectangular { p_a, t1 })
    }

    pub fn half_sine(p_a: f64, t1: f64) -> Result<Self> {
        positive("p_a", p_a)?;
        positive("t1", t1)?;
        Ok(Self::HalfSine { p_a, t1 })
    }

    pub fn sampled(dt: f64, values: Vec<f64>) -> Result<Self> {
        positive("dt", dt)?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Invalid {
                field: "values",
                reason: format!("samples must be finite, got {v}"),
            });
        }
        Ok(Self::Sampled { dt, values })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Rectangular { p_a, t1 } | Self::HalfSine { p_a, t1 } => {
                positive("p_a", *p_a)?;
                positive("t1", *t1)?;
            }
            Self::Sampled { dt, values } => {
                Self::sampled(*dt, values.clone())?;
            }
            Self::Zero => {}
        }
        Ok(())
    }

    /// `p(t)`; exactly zero for `t < 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::Invalid {
                field: "t",
                reason: format!("must be finite, got {t}"),
            });
        }
        if t < 0.0 {
            return Ok(0.0);
        }
        Ok(match self {
            Self::Rectangular { p_a, t1 } => {
                if t < *t1 {
                    -p_a
                } else {
                    0.0
                }
            }
            Self::HalfSine { p_a, t1 } => {
                if t < *t1 {
                    -p_a * (std::f64::consts::PI * t / t1).sin()
                } else {
                    0.0
                }
            }
            Self::Sampled { dt, values } => {
                // Zero-order hold; times within the alignment tolerance of a
                // sample count as that sample.
                let i = (t / dt + ALIGN_TOL).floor() as usize;
                values.get(i).copied().unwrap_or(0.0)
            }
            Self::Zero => 0.0,
        })
    }

    /// Times where `p` jumps or its slope breaks, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Rectangular { t1, .. } | Self::HalfSine { t1, .. } => vec![0.0, *t1],
            Self::Sampled { dt, values } => {
                let mut out = Vec::new();
                let mut prev = 0.0;
                for (i, v) in values.iter().enumerate() {
                    if *v != prev {
                        out.push(i as f64 * dt);
                    }
                    prev = *v;
                }
                if prev != 0.0 {
                    out.push(values.len() as f64 * dt);
                }
                out
            }
            Self::Zero => Vec::new(),
        }
    }

    /// End of the support: `p(t) = 0` for every `t >= duration`.
    pub fn duration(&self) -> f64 {
        match self {
            Self::Rectangular { t1, .. } | Self::HalfSine { t1, .. } => *t1,
            Self::Sampled { .. } => self.breakpoints().last().copied().unwrap_or(0.0),
            Self::Zero => 0.0,
        }
    }

    /// Largest load magnitude.
    pub fn amplitude(&self) -> f64 {
        match self {
            Self::Rectangular { p_a, .. } | Self::HalfSine { p_a, .. } => *p_a,
            Self::Sampled { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
            Self::Zero => 0.0,
        }
    }

    /// Whether piecewise-constant quadrature is exact for responses to this load.
    pub fn is_piecewise_constant(&self) -> bool {
        !matches!(self, Self::HalfSine { .. })
    }

    /// Copy of the load with its duration moved to the nearest grid time.
    pub fn snapped_to(&self, grid: &TimeGrid) -> Self {
        let snap = |t1: f64| ((t1 / grid.dt).round().max(1.0)) * grid.dt;
        match *self {
            Self::Rectangular { p_a, t1 } => Self::Rectangular { p_a, t1: snap(t1) },
            Self::HalfSine { p_a, t1 } => Self::HalfSine { p_a, t1: snap(t1) },
            _ => self.clone(),
        }
    }

    /// Checks that every breakpoint lies on `grid`.
    pub fn check_alignment(&self, grid: &TimeGrid) -> Result<()> {
        if let Self::Sampled { dt, .. } = self {
            let ratio = dt / grid.dt;
            if (ratio - ratio.round()).abs() > ALIGN_TOL || ratio.round() < 1.0 {
                return Err(Error::Misaligned {
                    what: "sample dt",
                    value: *dt,
                    step: grid.dt,
                    suggested_n: None,
                });
            }
        }
        for t in self.breakpoints() {
            if aligned_index("breakpoint", t, grid.dt).is_err() {
                return Err(Error::Misaligned {
                    what: "load breakpoint",
                    value: t,
                    step: grid.dt,
                    suggested_n: Some(nearest_admissible_n(t, grid)),
                });
            }
        }
        Ok(())
    }

    /// `p` at every grid time, with jumps resolved by index.
    pub fn sample(&self, grid: &TimeGrid) -> Result<Vec<f64>> {
        self.check_alignment(grid)?;
        let n = grid.len();
        Ok(match self {
            Self::Rectangular { p_a, t1 } => {
                let end = (t1 / grid.dt).round() as usize;
                (0..n).map(|i| if i < end { -p_a } else { 0.0 }).collect()
            }
            Self::HalfSine { p_a, t1 } => {
                let end = (t1 / grid.dt).round() as usize;
                let w = std::f64::consts::PI / end as f64;
                (0..n)
                    .map(|i| if i < end { -p_a * (w * i as f64).sin() } else { 0.0 })
                    .collect()
            }
            Self::Sampled { dt, values } => {
                let stride = (dt / grid.dt).round() as usize;
                (0..n)
                    .map(|i| values.get(i / stride).copied().unwrap_or(0.0))
                    .collect()
            }
            Self::Zero => vec![0.0; n],
        })
    }
}

/// `N' <= 4N` that brings `t` closest to a grid point.
fn nearest_admissible_n(t: f64, grid: &TimeGrid) -> usize {
    let frac_err = |n: usize| {
        let x = t * n as f64 / grid.transit;
        (x - x.round()).abs()
    };
    (1..=4 * grid.samples_per_transit)
        .min_by(|a, b| frac_err(*a).total_cmp(&frac_err(*b)))
        .unwrap_or(grid.samples_per_transit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::make_grid;

    #[test]
    fn rectangular_values() {
        let p = LoadSignal::rectangular(3.6466e8, 5e-6).unwrap();
        assert_eq!(p.eval(-1e-9).unwrap(), 0.0);
        assert_eq!(p.eval(0.0).unwrap(), -3.6466e8);
        assert_eq!(p.eval(5e-6).unwrap(), 0.0);
        assert_eq!(p.breakpoints(), vec![0.0, 5e-6]);
    }

    #[test]
    fn other_kinds() {
        assert!(LoadSignal::Zero.breakpoints().is_empty());
        assert_eq!(LoadSignal::Zero.eval(1.0).unwrap(), 0.0);
        let h = LoadSignal::half_sine(2.0, 4.0).unwrap();
        assert_eq!(h.breakpoints(), vec![0.0, 4.0]);
        assert!((h.eval(2.0).unwrap() + 2.0).abs() < 1e-15);
        assert_eq!(h.eval(4.0).unwrap(), 0.0);
        let s = LoadSignal::sampled(0.5, vec![-1.0, -2.0]).unwrap();
        assert_eq!(s.eval(0.5).unwrap(), -2.0);
        assert_eq!(s.eval(1.5).unwrap(), 0.0);
        assert_eq!(s.eval(0.3).unwrap(), -1.0);
        assert_eq!(s.eval(0.999).unwrap(), -2.0);
        assert_eq!(s.breakpoints(), vec![0.0, 0.5, 1.0]);
        assert!(LoadSignal::rectangular(-1.0, 1.0).is_err());
    }

    #[test]
    fn force_to_pressure() {
        let rod = Geometry::with_diameter(0.01, 0.01).unwrap();
        let p = face_pressure_from_force(28640.0, &rod).unwrap();
        assert!((p - 364.66e6).abs() < 0.1e6, "{p}");
        let unit = Geometry::new(1.0, 2.5).unwrap();
        assert_eq!(face_pressure_from_force(2.5, &unit).unwrap(), 1.0);
        assert_eq!(face_pressure_from_force(5.0, &unit).unwrap(), 2.0);
        assert!(face_pressure_from_force(0.0, &unit).is_err());
    }

    #[test]
    fn alignment() {
        let grid = make_grid(1e-6, 4, 1e-5).unwrap();
        let ok = LoadSignal::rectangular(1.0, 1.5e-6).unwrap();
        let s = ok.sample(&grid).unwrap();
        assert_eq!(&s[..8], &[-1.0, -1.0, -1.0, -1.0, -1.0, -1.0, 0.0, 0.0]);
        let bad = LoadSignal::rectangular(1.0, 1.3e-6).unwrap();
        match bad.sample(&grid) {
            Err(Error::Misaligned { suggested_n: Some(n), .. }) => assert_eq!(n, 10),
            other => panic!("{other:?}"),
        }
        let snapped = bad.snapped_to(&grid);
        assert!(snapped.check_alignment(&grid).is_ok());
        assert_eq!(snapped.duration(), 5.0 * grid.dt);
    }

    #[test]
    fn causality_all_kinds() {
        let kinds = [
            LoadSignal::rectangular(1.0, 1.0).unwrap(),
            LoadSignal::half_sine(1.0, 1.0).unwrap(),
            LoadSignal::sampled(0.1, vec![3.0; 4]).unwrap(),
            LoadSignal::Zero,
        ];
        for k in &kinds {
            for t in [-1e-12, -0.5, -1e9] {
                assert_eq!(k.eval(t).unwrap(), 0.0);
            }
            assert_eq!(k.eval(k.duration()).unwrap(), 0.0);
            assert_eq!(k.eval(k.duration() + 0.3).unwrap(), 0.0);
        }
    }
}
