//! Physical inputs and the constants derived from them.
//!
//! Everything here is in SI base units. The one-dimensional coefficients are
//! taken as given: whether they describe a uniaxial-strain or uniaxial-stress
//! state is up to the caller.

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};

/// One-dimensional piezoelectric material constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialProperties {
    /// Elastic modulus `C`, Pa.
    pub stiffness: f64,
    /// Piezoelectric stress constant `e`, N/(V·m).
    pub piezo: f64,
    /// Permittivity `ε`, F/m.
    pub permittivity: f64,
    /// Mass density `ρ`, kg/m³.
    pub density: f64,
}

impl MaterialProperties {
    /// PZT-5A, as used for the piston-driven generator examples.
    pub const PZT5A: Self = Self {
        stiffness: 5.32e10,
        piezo: 19.89,
        permittivity: 76.12e-10,
        density: 7750.0,
    };

    pub fn validate(&self) -> Result<()> {
        positive("stiffness", self.stiffness)?;
        positive("permittivity", self.permittivity)?;
        positive("density", self.density)?;
        // e = 0 is the decoupled elastic limit and stays admissible.
        non_negative("piezo", self.piezo)?;
        Ok(())
    }

    /// Coupling factor `e/ε` relating displacement to potential, V/m².
    pub fn coupling(&self) -> f64 {
        self.piezo / self.permittivity
    }
}

/// Layer (or rod) geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Thickness `h`, m.
    pub thickness: f64,
    /// End-face area `A`, m².
    pub face_area: f64,
}

impl Geometry {
    pub fn new(thickness: f64, face_area: f64) -> Result<Self> {
        let g = Self {
            thickness,
            face_area,
        };
        g.validate()?;
        Ok(g)
    }

    /// Circular rod of diameter `d`: `A = π d² / 4`.
    pub fn with_diameter(thickness: f64, diameter: f64) -> Result<Self> {
        positive("diameter", diameter)?;
        Self::new(thickness, std::f64::consts::PI * diameter * diameter / 4.0)
    }

    pub fn validate(&self) -> Result<()> {
        positive("thickness", self.thickness)?;
        positive("face_area", self.face_area)?;
        Ok(())
    }
}

/// Wave-propagation constants shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Stiffness at constant electric displacement, `C + e²/ε`, Pa.
    pub c_d: f64,
    /// Longitudinal wave speed `sqrt(C^D/ρ)`, m/s.
    pub wave_speed: f64,
    /// Acoustic impedance `ρc`, Pa·s/m.
    pub impedance: f64,
    /// One-way transit time `h/c`, s.
    pub transit: f64,
}

pub fn derive_constants(mat: &MaterialProperties, geo: &Geometry) -> Result<DerivedConstants> {
    mat.validate()?;
    geo.validate()?;
    let c_d = mat.stiffness + mat.piezo * mat.piezo / mat.permittivity;
    let wave_speed = (c_d / mat.density).sqrt();
    Ok(DerivedConstants {
        c_d,
        wave_speed,
        impedance: mat.density * wave_speed,
        transit: geo.thickness / wave_speed,
    })
}

/// Power-law damper `F = -k_α |v|^α sgn(v)` attached to the lower face.
///
/// `gamma = k_α/(ρcA)` is the coefficient of the boundary relation in
/// velocity form. For `α != 1` it carries units of (m/s)^(1-α); it is used
/// as a plain number with velocities expressed in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DamperSpec {
    pub alpha: f64,
    pub k_alpha: f64,
    pub gamma: f64,
}

impl DamperSpec {
    /// Boundary stress produced by the damper at lower-face velocity `v`.
    pub fn stress(&self, v: f64, geo: &Geometry) -> f64 {
        self.k_alpha / geo.face_area * signed_pow(v, self.alpha)
    }
}

pub fn derive_damper(
    k_alpha: f64,
    alpha: f64,
    derived: &DerivedConstants,
    geo: &Geometry,
) -> Result<DamperSpec> {
    positive("alpha", alpha)?;
    non_negative("k_alpha", k_alpha)?;
    geo.validate()?;
    Ok(DamperSpec {
        alpha,
        k_alpha,
        gamma: k_alpha / (derived.impedance * geo.face_area),
    })
}

/// `|x|^α sgn(x)` with `sgn(0) = 0`.
pub(crate) fn signed_pow(x: f64, alpha: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(alpha)
    }
}

/// Uniform time grid whose step divides the transit time exactly.
///
/// Delays by one and two transit times are the integer shifts
/// `samples_per_transit` and `2 * samples_per_transit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub samples_per_transit: usize,
    pub transit: f64,
    pub dt: f64,
    /// Number of steps `M`; the grid holds `M + 1` times `0, dt, ..., M dt`.
    pub steps: usize,
}

impl TimeGrid {
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.time(i))
    }

    pub fn end(&self) -> f64 {
        self.time(self.steps)
    }

    /// Grid index of `t` if it lies on the grid (to within 1e-6 of a step).
    pub fn index_of(&self, what: &'static str, t: f64) -> Result<usize> {
        let idx = aligned_index(what, t, self.dt)?;
        if idx < 0 || idx as usize > self.steps {
            return Err(Error::Invalid {
                field: what,
                reason: format!("{t:e} s is outside the grid [0, {:e}] s", self.end()),
            });
        }
        Ok(idx as usize)
    }
}

/// Relative slack, in units of one step, for treating a time as on-grid.
pub(crate) const ALIGN_TOL: f64 = 1e-6;

pub(crate) fn aligned_index(what: &'static str, t: f64, step: f64) -> Result<i64> {
    if !t.is_finite() {
        return Err(Error::Invalid {
            field: what,
            reason: format!("must be finite, got {t}"),
        });
    }
    let ratio = t / step;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > ALIGN_TOL {
        return Err(Error::Misaligned {
            what,
            value: t,
            step,
            suggested_n: None,
        });
    }
    Ok(rounded as i64)
}

pub fn make_grid(transit: f64, samples_per_transit: usize, t_end: f64) -> Result<TimeGrid> {
    positive("transit", transit)?;
    positive("t_end", t_end)?;
    if samples_per_transit == 0 {
        return Err(Error::Invalid {
            field: "samples_per_transit",
            reason: "must be >= 1".into(),
        });
    }
    let dt = transit / samples_per_transit as f64;
    let ratio = t_end / dt;
    // Absorb representation noise so that t_end = k·dt yields exactly k steps.
    let steps = if (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0) {
        ratio.round()
    } else {
        ratio.ceil()
    };
    Ok(TimeGrid {
        samples_per_transit,
        transit,
        dt,
        steps: (steps as usize).max(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rod() -> Geometry {
        Geometry::with_diameter(0.01, 0.01).unwrap()
    }

    #[test]
    fn pzt5a_wave_speed_and_transit() {
        let d = derive_constants(&MaterialProperties::PZT5A, &rod()).unwrap();
        assert!((d.wave_speed - 3684.06).abs() < 0.5, "{}", d.wave_speed);
        assert!((d.transit - 2.71e-6).abs() < 0.01e-6, "{}", d.transit);
        assert!((d.transit * d.wave_speed - 0.01).abs() <= 1e-17);
        assert!(d.c_d > MaterialProperties::PZT5A.stiffness);
    }

    #[test]
    fn decoupled_limit() {
        let mat = MaterialProperties {
            piezo: 0.0,
            ..MaterialProperties::PZT5A
        };
        let d = derive_constants(&mat, &rod()).unwrap();
        assert_eq!(d.c_d, mat.stiffness);
        assert_eq!(d.wave_speed, (mat.stiffness / mat.density).sqrt());
    }

    #[test]
    fn rejects_bad_inputs_by_name() {
        let mut mat = MaterialProperties::PZT5A;
        mat.density = -1.0;
        match derive_constants(&mat, &rod()) {
            Err(Error::Invalid { field, .. }) => assert_eq!(field, "density"),
            other => panic!("{other:?}"),
        }
        mat = MaterialProperties::PZT5A;
        mat.permittivity = f64::NAN;
        assert!(matches!(
            derive_constants(&mat, &rod()),
            Err(Error::Invalid { field: "permittivity", .. })
        ));
        assert!(matches!(
            Geometry::new(0.0, 1.0),
            Err(Error::Invalid { field: "thickness", .. })
        ));
    }

    #[test]
    fn damper_gamma() {
        let geo = rod();
        let d = derive_constants(&MaterialProperties::PZT5A, &geo).unwrap();
        let g = derive_damper(1000.0, 0.5, &d, &geo).unwrap().gamma;
        assert!((g - 0.4460).abs() < 5e-4, "{g}");
        let g = derive_damper(250.0, 2.0, &d, &geo).unwrap().gamma;
        assert!((g - 0.1115).abs() < 5e-4, "{g}");
        assert_eq!(derive_damper(0.0, 1.0, &d, &geo).unwrap().gamma, 0.0);
        assert!(derive_damper(1.0, 0.0, &d, &geo).is_err());
        assert!(derive_damper(-1.0, 1.0, &d, &geo).is_err());
    }

    #[test]
    fn gamma_monotonicity() {
        let geo = rod();
        let d = derive_constants(&MaterialProperties::PZT5A, &geo).unwrap();
        let g1 = derive_damper(100.0, 1.0, &d, &geo).unwrap().gamma;
        let g2 = derive_damper(200.0, 1.0, &d, &geo).unwrap().gamma;
        assert!(g2 > g1);
        let wide = Geometry::new(geo.thickness, geo.face_area * 2.0).unwrap();
        assert!(derive_damper(100.0, 1.0, &d, &wide).unwrap().gamma < g1);
    }

    #[test]
    fn grid_arithmetic() {
        let g = make_grid(2.714e-6, 4, 4.0 * 2.714e-6).unwrap();
        assert_eq!(g.steps, 16);
        assert!((g.dt - 6.785e-7).abs() < 1e-18);
        let g = make_grid(2.714e-6, 4, 1.0857e-5).unwrap();
        assert_eq!(g.steps, 17);
        assert!(g.end() >= 1.0857e-5);
        assert_eq!(make_grid(1e-6, 1, 1e-6).unwrap().dt, 1e-6);
        assert_eq!(make_grid(1e-6, 4, 1e-9).unwrap().steps, 1);
        assert!(make_grid(1e-6, 0, 1.0).is_err());
        assert!(make_grid(1e-6, 1, 0.0).is_err());
    }
}
