use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A configuration value is missing, malformed or out of range.
    #[error("config `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("cannot parse config: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error(transparent)]
    Solver(#[from] piezodyn::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Config key for a solver input name.
fn config_key(field: &str) -> &str {
    match field {
        "stiffness" => "material.C",
        "piezo" => "material.e",
        "permittivity" => "material.eps",
        "density" => "material.rho",
        "thickness" => "geometry.h",
        "face_area" => "geometry.A",
        "diameter" => "geometry.d",
        "alpha" => "damper.alpha",
        "k_alpha" => "damper.k_alpha",
        "force" => "load.F",
        "p_a" => "load.p_a",
        "t1" => "load.t1",
        "dt" => "load.dt",
        "values" => "load.values",
        "t_end" => "grid.t_end",
        "samples_per_transit" => "grid.samples_per_transit",
        "nx" => "validate.fd_nx",
        "cfl" => "validate.cfl",
        other => other,
    }
}

/// Re-labels solver validation errors with the config key they came from.
pub(crate) fn scoped(err: piezodyn::Error) -> CliError {
    use piezodyn::Error as E;
    match &err {
        E::Invalid { field, reason } => CliError::config(config_key(field), reason.clone()),
        E::Misaligned { what, .. } => {
            let key = match *what {
                "load breakpoint" => "load.t1",
                "sample dt" => "load.dt",
                other => other,
            };
            let hint = if key == "load.t1" {
                "; or set grid.snap_load = true"
            } else {
                ""
            };
            CliError::config(key, format!("{err}{hint}"))
        }
        _ => CliError::Solver(err),
    }
}
