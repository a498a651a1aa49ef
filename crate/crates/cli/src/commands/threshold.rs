use std::io::Write;

use serde::Serialize;

use pst_core::advantage_threshold_with_tolerance;
use pst_core::distill::{theta_window, Window, THRESHOLD_TOLERANCE};

use crate::cli::{Format, ThresholdArgs};
use crate::config::FileConfig;
use crate::error::{CliError, Result};
use crate::output::{float, optional, write_table, Tabular};

/// Depolarization strengths at which windows are sampled.
pub const SAMPLE_P: [f64; 3] = [0.75, 0.85, 0.95];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdRow {
    /// `threshold`, `near_threshold`, `sample` or `region`.
    pub kind: &'static str,
    pub p: f64,
    pub window_lower_deg: Option<f64>,
    pub window_upper_deg: Option<f64>,
}

impl ThresholdRow {
    fn window(kind: &'static str, p: f64, window: Option<Window>) -> Self {
        Self {
            kind,
            p,
            window_lower_deg: window.map(|w| w.lower_deg),
            window_upper_deg: window.map(|w| w.upper_deg),
        }
    }
}

impl Tabular for ThresholdRow {
    fn header(&self) -> Vec<&'static str> {
        vec!["kind", "p", "window_lower_deg", "window_upper_deg"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.kind.to_string(),
            float(self.p),
            optional(self.window_lower_deg),
            optional(self.window_upper_deg),
        ]
    }
}

pub fn compute(tolerance: f64) -> Result<Vec<ThresholdRow>> {
    if !(tolerance > 0.0 && tolerance < 0.01) {
        return Err(CliError::usage(format!("--tol {tolerance} must lie in (0, 0.01)")));
    }
    let threshold = advantage_threshold_with_tolerance(tolerance)?;
    let p_star = threshold.p_star;
    let mut rows = vec![
        ThresholdRow::window("threshold", p_star, None),
        ThresholdRow::window("near_threshold", (p_star + 10.0 * tolerance).min(1.0), threshold.window_above),
    ];
    for p in SAMPLE_P {
        rows.push(ThresholdRow::window("sample", p, theta_window(p)?));
    }
    rows.push(ThresholdRow::window("region", 1.0, threshold.region));
    Ok(rows)
}

pub fn run(args: &ThresholdArgs, file: &FileConfig, out: &mut dyn Write) -> Result<()> {
    let tolerance = args.tol.or(file.tol).unwrap_or(THRESHOLD_TOLERANCE);
    let rows = compute(tolerance)?;
    write_table(&rows, args.format.or(file.format).unwrap_or(Format::Csv), out, "stdout")
}
