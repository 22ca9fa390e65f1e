//! Run configuration files.
//!
//! A config is a TOML document with the sections `material`, `geometry`,
//! `damper`, `load`, `grid`, `output`, `validate` and `sweep`. Only `damper`
//! and `load` are required; the others default to a 1 cm PZT-5A disk sampled
//! 64 times per transit up to 50 μs. `configs/schema.toml` lists every key.

use std::path::{Path, PathBuf};

use piezodyn::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{scoped, CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub material: MaterialSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    pub damper: DamperSection,
    pub load: LoadSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub validate: ValidateSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    /// Elastic stiffness, Pa.
    #[serde(rename = "C")]
    pub stiffness: f64,
    /// Piezoelectric constant, C/m².
    pub e: f64,
    /// Permittivity, F/m.
    pub eps: f64,
    /// Density, kg/m³.
    pub rho: f64,
}

impl Default for MaterialSection {
    fn default() -> Self {
        let m = MaterialProperties::PZT5A;
        Self {
            stiffness: m.stiffness,
            e: m.piezo,
            eps: m.permittivity,
            rho: m.density,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    /// Thickness, m.
    #[serde(default = "default_thickness")]
    pub h: f64,
    /// Face area, m². Exclusive with `d`.
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    /// Face diameter, m. Exclusive with `A`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
}

fn default_thickness() -> f64 {
    0.01
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            h: default_thickness(),
            area: None,
            d: Some(0.01),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DamperSection {
    pub alpha: f64,
    pub k_alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadKind {
    Rectangular,
    HalfSine,
    Sampled,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSection {
    pub kind: LoadKind,
    /// Pressure magnitude, Pa. The face stress is `-p_a` while loaded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_a: Option<f64>,
    /// Total force, N, spread over the face. Exclusive with `p_a`.
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub force: Option<f64>,
    /// Pulse duration, s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    /// Sample spacing of a sampled load, s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Face stress samples, Pa, held until the next sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_samples")]
    pub samples_per_transit: usize,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// Move pulse ends to the nearest grid time instead of rejecting them.
    #[serde(default)]
    pub snap_load: bool,
}

fn default_samples() -> usize {
    64
}

fn default_t_end() -> f64 {
    50e-6
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            samples_per_transit: default_samples(),
            t_end: default_t_end(),
            snap_load: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Time-series CSV, relative to the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Voltage plot; written when set or when `--svg` is passed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
    /// Instants for `fields`, s. Each is moved to the nearest grid time.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Number of intervals across the thickness; must divide the grid's
    /// samples per transit.
    #[serde(rename = "snapshot_P", alias = "snapshot_points", default = "default_snapshot_points")]
    pub snapshot_points: usize,
}

fn default_snapshot_points() -> usize {
    16
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            csv: None,
            svg: None,
            snapshot_times: Vec::new(),
            snapshot_points: default_snapshot_points(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    #[serde(default = "default_fd_nx")]
    pub fd_nx: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
}

fn default_fd_nx() -> usize {
    2000
}

fn default_cfl() -> f64 {
    piezodyn::fd::DEFAULT_CFL
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self {
            fd_nx: default_fd_nx(),
            cfl: default_cfl(),
        }
    }
}

/// Axes of a parameter sweep. Empty axes keep the base value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub k_alpha: Vec<f64>,
    #[serde(default)]
    pub t1: Vec<f64>,
    #[serde(default)]
    pub p_a: Vec<f64>,
    #[serde(default = "default_max_runs")]
    pub max_runs: usize,
}

fn default_max_runs() -> usize {
    10_000
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            alpha: Vec::new(),
            k_alpha: Vec::new(),
            t1: Vec::new(),
            p_a: Vec::new(),
            max_runs: default_max_runs(),
        }
    }
}

/// A validated configuration turned into solver inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub material: MaterialProperties,
    pub geometry: Geometry,
    pub derived: DerivedConstants,
    pub damper: DamperSpec,
    pub load: LoadSignal,
    pub grid: TimeGrid,
}

impl Scenario {
    pub fn run(&self) -> Result<SimulationResult> {
        run_recursive(&self.material, &self.geometry, &self.damper, &self.load, &self.grid)
            .map_err(scoped)
    }

    /// Same scenario on a grid `factor` times finer.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let grid = make_grid(
            self.derived.transit,
            self.grid.samples_per_transit * factor,
            self.grid.end(),
        )
        .map_err(scoped)?;
        Ok(Self { grid, ..self.clone() })
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn resolve(&self) -> Result<Scenario> {
        let m = &self.material;
        let material = MaterialProperties {
            stiffness: m.stiffness,
            piezo: m.e,
            permittivity: m.eps,
            density: m.rho,
        };
        material.validate().map_err(scoped)?;

        let g = &self.geometry;
        let geometry = match (g.area, g.d) {
            (Some(a), None) => Geometry::new(g.h, a),
            (None, Some(d)) => Geometry::with_diameter(g.h, d),
            (Some(_), Some(_)) => {
                return Err(CliError::config("geometry.A", "give either A or d, not both"))
            }
            (None, None) => return Err(CliError::config("geometry.A", "one of A or d is required")),
        }
        .map_err(scoped)?;

        let derived = derive_constants(&material, &geometry).map_err(scoped)?;
        let damper =
            derive_damper(self.damper.k_alpha, self.damper.alpha, &derived, &geometry).map_err(scoped)?;
        let grid = make_grid(derived.transit, self.grid.samples_per_transit, self.grid.t_end)
            .map_err(scoped)?;

        let mut load = self.load.signal(&geometry)?;
        if self.grid.snap_load {
            load = load.snapped_to(&grid);
        }
        load.check_alignment(&grid).map_err(scoped)?;

        if self.output.snapshot_points == 0 || grid.samples_per_transit % self.output.snapshot_points != 0 {
            return Err(CliError::config(
                "output.snapshot_P",
                format!(
                    "{} must be a positive divisor of grid.samples_per_transit = {}",
                    self.output.snapshot_points, grid.samples_per_transit
                ),
            ));
        }
        if let Some(t) = self.output.snapshot_times.iter().find(|t| !(t.is_finite() && **t >= 0.0 && **t <= grid.end())) {
            return Err(CliError::config(
                "output.snapshot_times",
                format!("{t:e} s lies outside the simulated span [0, {:e}] s", grid.end()),
            ));
        }
        Ok(Scenario {
            material,
            geometry,
            derived,
            damper,
            load,
            grid,
        })
    }
}

impl LoadSection {
    fn forbid(&self, kind: &str, keys: &[(&str, bool)]) -> Result<()> {
        for (key, present) in keys {
            if *present {
                return Err(CliError::config(format!("load.{key}"), format!("not used by a {kind} load")));
            }
        }
        Ok(())
    }

    fn amplitude(&self, geo: &Geometry) -> Result<f64> {
        match (self.p_a, self.force) {
            (Some(p), None) => Ok(p),
            (None, Some(f)) => face_pressure_from_force(f, geo).map_err(scoped),
            (Some(_), Some(_)) => Err(CliError::config("load.p_a", "give either p_a or F, not both")),
            (None, None) => Err(CliError::config("load.p_a", "one of p_a or F is required")),
        }
    }

    fn duration(&self) -> Result<f64> {
        self.t1.ok_or_else(|| CliError::config("load.t1", "required for this load kind"))
    }

    pub fn signal(&self, geo: &Geometry) -> Result<LoadSignal> {
        match self.kind {
            LoadKind::Rectangular | LoadKind::HalfSine => {
                self.forbid("pulse", &[("dt", self.dt.is_some()), ("values", self.values.is_some())])?;
                let p_a = self.amplitude(geo)?;
                let t1 = self.duration()?;
                if self.kind == LoadKind::Rectangular {
                    LoadSignal::rectangular(p_a, t1)
                } else {
                    LoadSignal::half_sine(p_a, t1)
                }
                .map_err(scoped)
            }
            LoadKind::Sampled => {
                self.forbid(
                    "sampled",
                    &[("p_a", self.p_a.is_some()), ("F", self.force.is_some()), ("t1", self.t1.is_some())],
                )?;
                let dt = self.dt.ok_or_else(|| CliError::config("load.dt", "required for a sampled load"))?;
                let values = self
                    .values
                    .clone()
                    .ok_or_else(|| CliError::config("load.values", "required for a sampled load"))?;
                LoadSignal::sampled(dt, values).map_err(scoped)
            }
            LoadKind::Zero => {
                self.forbid(
                    "zero",
                    &[
                        ("p_a", self.p_a.is_some()),
                        ("F", self.force.is_some()),
                        ("t1", self.t1.is_some()),
                        ("dt", self.dt.is_some()),
                        ("values", self.values.is_some()),
                    ],
                )?;
                Ok(LoadSignal::Zero)
            }
        }
    }
}

/// Built-in configurations reproducing the six published voltage traces.
pub const PRESETS: [&str; 6] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"];

pub fn preset(name: &str) -> Option<RunConfig> {
    let index = PRESETS.iter().position(|p| *p == name)?;
    let (alpha, k_alpha) = if index < 3 { (0.5, 1000.0) } else { (2.0, 250.0) };
    let t1 = [5e-6, 10e-6, 15e-6][index % 3];
    Some(RunConfig {
        material: MaterialSection::default(),
        geometry: GeometrySection::default(),
        damper: DamperSection { alpha, k_alpha },
        load: LoadSection {
            kind: LoadKind::Rectangular,
            p_a: None,
            force: Some(28_640.0),
            t1: Some(t1),
            dt: None,
            values: None,
        },
        grid: GridSection {
            snap_load: true,
            ..GridSection::default()
        },
        output: OutputSection::default(),
        validate: ValidateSection::default(),
        sweep: SweepSection::default(),
    })
}
