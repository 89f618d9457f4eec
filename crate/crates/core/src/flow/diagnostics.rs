use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column order of the time-series CSV.
pub const CSV_HEADER: [&str; 10] =
    ["t", "phi", "T_tilde", "eta", "pohozaev_relerr", "min_h", "max_h", "min_lambda", "max_lambda", "residual"];

/// Factor by which a monitored quantity may shrink (or grow) relative to its
/// initial value before an alert fires.
pub const BOUND_FACTOR: f64 = 1e3;

/// One time-series row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub phi: f64,
    pub t_tilde: f64,
    pub eta: f64,
    pub pohozaev_relerr: f64,
    pub min_h: f64,
    pub max_h: f64,
    pub min_lambda: f64,
    pub max_lambda: f64,
    pub residual: f64,
}

impl Diagnostics {
    fn fields(&self) -> [f64; 10] {
        [
            self.t,
            self.phi,
            self.t_tilde,
            self.eta,
            self.pohozaev_relerr,
            self.min_h,
            self.max_h,
            self.min_lambda,
            self.max_lambda,
            self.residual,
        ]
    }

    fn from_fields(v: [f64; 10]) -> Self {
        Diagnostics {
            t: v[0],
            phi: v[1],
            t_tilde: v[2],
            eta: v[3],
            pohozaev_relerr: v[4],
            min_h: v[5],
            max_h: v[6],
            min_lambda: v[7],
            max_lambda: v[8],
            residual: v[9],
        }
    }

    /// Comma-separated, 17 significant digits, no trailing newline.
    pub fn csv_row(&self) -> String {
        self.fields().iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(",")
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_header() -> String {
    CSV_HEADER.join(",")
}

pub fn write_csv(rows: &[Diagnostics]) -> String {
    let mut out = csv_header();
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_row());
        out.push('\n');
    }
    out
}

/// Parse a time series written by [`write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<Diagnostics>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim() == csv_header() => {}
        Some((i, _)) => return Err(Error::Config { line: Some(i + 1), message: "unexpected CSV header".into() }),
        None => return Err(Error::Config { line: None, message: "empty time series".into() }),
    }
    lines
        .map(|(i, line)| {
            let parsed: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config { line: Some(i + 1), message: e.to_string() })?;
            let fields: [f64; 10] = parsed.try_into().map_err(|v: Vec<f64>| Error::Config {
                line: Some(i + 1),
                message: format!("expected 10 columns, found {}", v.len()),
            })?;
            Ok(Diagnostics::from_fields(fields))
        })
        .collect()
}

/// Empirical bound monitor anchored at the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundMonitor {
    pub min_h: f64,
    pub max_h: f64,
    pub min_lambda: f64,
    pub max_lambda: f64,
}

impl BoundMonitor {
    pub fn new(initial: &Diagnostics) -> Self {
        BoundMonitor {
            min_h: initial.min_h,
            max_h: initial.max_h,
            min_lambda: initial.min_lambda,
            max_lambda: initial.max_lambda,
        }
    }

    pub fn alerts(&self, row: &Diagnostics) -> Vec<String> {
        let mut alerts = Vec::new();
        if row.min_h < self.min_h / BOUND_FACTOR {
            alerts.push(format!("t = {:e}: min h {:e} below {:e}", row.t, row.min_h, self.min_h / BOUND_FACTOR));
        }
        if row.max_h > self.max_h * BOUND_FACTOR {
            alerts.push(format!("t = {:e}: max h {:e} above {:e}", row.t, row.max_h, self.max_h * BOUND_FACTOR));
        }
        if row.min_lambda < self.min_lambda / BOUND_FACTOR {
            alerts.push(format!(
                "t = {:e}: min radius {:e} below {:e}",
                row.t,
                row.min_lambda,
                self.min_lambda / BOUND_FACTOR
            ));
        }
        if row.max_lambda > self.max_lambda * BOUND_FACTOR {
            alerts.push(format!(
                "t = {:e}: max radius {:e} above {:e}",
                row.t,
                row.max_lambda,
                self.max_lambda * BOUND_FACTOR
            ));
        }
        alerts
    }
}
