//! Plain CSV tables with a fixed header and lossless float text.
//!
//! Values are written in the shortest decimal form that parses back to the
//! same `f64` (never more than 17 significant digits), switching to
//! exponent notation outside `[1e-5, 1e16)`. Lines end in `\n`.

use piezodyn::fields::FieldSnapshot;
use piezodyn::solver::SimulationResult;

use crate::error::{CliError, Result};

pub const TIME_SERIES_HEADER: &str = "t_s,v0_mps,vh_mps,sigma0_Pa,u0_m,uh_m,voltage_V";
pub const FIELDS_HEADER: &str = "x_m,u_m,v_mps,sigma_Pa,phi_V";

pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// A header and rows of numbers. Empty cells hold `None`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Self {
            header: header.split(',').map(str::to_owned).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: impl IntoIterator<Item = f64>) {
        self.rows.push(row.into_iter().map(Some).collect());
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if let Some(v) = cell {
                    out.push_str(&format_float(*v));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.split('\n');
        let header = lines
            .next()
            .filter(|h| !h.is_empty())
            .ok_or(CliError::Csv {
                line: 1,
                reason: "missing header".into(),
            })?;
        let mut table = Self::new(header);
        for (n, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let line_no = n + 2;
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != table.header.len() {
                return Err(CliError::Csv {
                    line: line_no,
                    reason: format!("{} cells, header has {}", cells.len(), table.header.len()),
                });
            }
            let row = cells
                .iter()
                .map(|c| {
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<f64>().map(Some).map_err(|e| CliError::Csv {
                            line: line_no,
                            reason: format!("`{c}`: {e}"),
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }
}

pub fn time_series(result: &SimulationResult) -> Table {
    let h = &result.history;
    let mut table = Table::new(TIME_SERIES_HEADER);
    for (i, t) in result.grid.times().enumerate() {
        table.push([t, h.v0[i], h.vh[i], h.sigma0[i], h.u0[i], h.uh[i], h.voltage[i]]);
    }
    table
}

pub fn fields(snapshot: &FieldSnapshot) -> Table {
    let mut table = Table::new(FIELDS_HEADER);
    for j in 0..snapshot.x.len() {
        table.push([snapshot.x[j], snapshot.u[j], snapshot.v[j], snapshot.sigma[j], snapshot.phi[j]]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-12.5), "-12.5");
        assert_eq!(format_float(2.714566277424094e-6), "2.714566277424094e-6");
        assert_eq!(format_float(1e16), "1e16");
        assert_eq!(format_float(0.1 + 0.2), "0.30000000000000004");
        assert_eq!(format_float(364655805.61215055), "364655805.61215055");
    }

    #[test]
    fn parse_errors() {
        assert!(Table::parse("").is_err());
        let err = Table::parse("a,b\n1,2\n3\n").unwrap_err();
        assert!(matches!(err, CliError::Csv { line: 3, .. }), "{err}");
        let err = Table::parse("a\nx\n").unwrap_err();
        assert!(matches!(err, CliError::Csv { line: 2, .. }));
        let t = Table::parse("a,b\n1,\n").unwrap();
        assert_eq!(t.rows, vec![vec![Some(1.0), None]]);
    }

    #[test]
    fn render_layout() {
        let mut t = Table::new("a,b");
        t.push([1.0, -0.5]);
        t.rows.push(vec![None, Some(3e-9)]);
        assert_eq!(t.render(), "a,b\n1,-0.5\n,3e-9\n");
        assert_eq!(t.column("b").unwrap(), vec![Some(-0.5), Some(3e-9)]);
        assert!(t.column("c").is_none());
    }
}
