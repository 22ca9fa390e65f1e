use thiserror::Error;

/// Errors reported by the solver and its input validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical input violates its domain (non-positive, non-finite, ...).
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },

    /// A time or position does not land on the delay-aligned grid.
    #[error("{what} = {value:e} is not aligned with the grid step {step:e}{}", suggestion(*.suggested_n))]
    Misaligned {
        what: &'static str,
        value: f64,
        step: f64,
        suggested_n: Option<usize>,
    },

    /// The damper inverse failed to reach its residual tolerance.
    #[error("damper inverse did not converge for r = {r:e} (alpha = {alpha}, gamma = {gamma:e}) after {iterations} iterations")]
    NotConverged {
        r: f64,
        alpha: f64,
        gamma: f64,
        iterations: usize,
    },

    /// Closed-form solutions exist only for loads shorter than 6 transit times.
    #[error("no explicit solution for load duration {duration:e} s (>= 6 transit times); use the recursion")]
    UnsupportedCase { duration: f64 },

    /// A computed field broke one of its structural invariants.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

fn suggestion(n: Option<usize>) -> String {
    match n {
        Some(n) => format!("; nearest admissible samples_per_transit is {n}"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Invalid {
            field,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

pub(crate) fn non_negative(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Invalid {
            field,
            reason: format!("must be finite and >= 0, got {value}"),
        })
    }
}
