//! Machine-readable output: float formatting, CSV tables and plot data.

use serde::Serializer;

use crate::error::{Error, Result};

/// Shortest representation that round-trips, with `inf`, `-inf` and `nan`
/// spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_owned()
    } else if x == f64::INFINITY {
        "inf".to_owned()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_owned()
    } else {
        format!("{x:?}")
    }
}

/// Serializes finite floats as JSON numbers and the rest as strings.
pub fn serialize_lossless<S: Serializer>(x: &f64, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        serializer.serialize_f64(*x)
    } else {
        serializer.serialize_str(&fmt_f64(*x))
    }
}

/// A rectangular table with a header row, rendered as CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// One measured point of a rate sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub n: usize,
    pub quantity: f64,
    pub rate: f64,
}

/// CSV `(n, quantity, paper_rate, fitted_constant)` with
/// `fitted_constant = quantity / paper_rate`, for external log-log plots.
pub fn emit_plotdata(sweep: &[RatePoint]) -> Result<String> {
    if sweep.is_empty() {
        return Err(Error::invalid("plot data needs a non-empty sweep"));
    }
    let mut rows: Vec<RatePoint> = sweep.to_vec();
    rows.sort_by_key(|p| p.n);
    let mut table = Table::new(&["n", "quantity", "paper_rate", "fitted_constant"]);
    for p in rows {
        table.push(vec![
            p.n.to_string(),
            fmt_f64(p.quantity),
            fmt_f64(p.rate),
            fmt_f64(p.quantity / p.rate),
        ]);
    }
    Ok(table.to_csv())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02e23, -0.0, 1.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn energy_plotdata() {
        let rows: Vec<RatePoint> = [4usize, 2, 8]
            .iter()
            .map(|&n| {
                let n_f = n as f64;
                RatePoint { n, quantity: n_f.ln() / (n_f - 1.0), rate: n_f.ln() / n_f }
            })
            .collect();
        let csv = emit_plotdata(&rows).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,quantity,paper_rate,fitted_constant");
        assert!(lines[1].starts_with("2,"));
        // ratio n/(n-1) for n = 2
        assert!(lines[1].ends_with(",2.0"));
    }

    #[test]
    fn empty_sweep_is_an_error() {
        assert!(emit_plotdata(&[]).is_err());
    }
}
