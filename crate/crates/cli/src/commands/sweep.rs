use std::fs::File;
use std::io::{BufWriter, Write};

use rayon::prelude::*;
use serde::Serialize;

use pst_core::distill::compare;
use pst_core::{
    p_direct_dephasing, p_pst_analytic, p_pst_dephasing, p_straight_analytic, simulate_with_settings, ChannelKind,
    ChannelParams,
};

use super::{preset, qubit};
use crate::config::{SweepChannel, SweepConfig};
use crate::error::{CliError, Result};
use crate::output::{float, optional, write_table, Tabular};

/// One grid point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta_deg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    pub p_pst_sim: f64,
    pub p_pst_analytic: f64,
    pub p_straight: f64,
    /// Distilled teleportation at matched resources; depolarizing only.
    pub p_teleport: Option<f64>,
    pub k_star: Option<f64>,
    pub enhancement_direct: f64,
    pub enhancement_teleport: Option<f64>,
}


impl Tabular for SweepRow {
    fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["theta_deg"];
        if self.p.is_some() {
            h.push("p");
        } else {
            h.extend(["beta1", "beta2"]);
        }
        h.extend([
            "p_pst_sim",
            "p_pst_analytic",
            "p_straight",
            "p_teleport",
            "k_star",
            "enhancement_direct",
            "enhancement_teleport",
        ]);
        h
    }

    fn fields(&self) -> Vec<String> {
        let mut f = vec![float(self.theta_deg)];
        if self.p.is_some() {
            f.push(optional(self.p));
        } else {
            f.extend([optional(self.beta1), optional(self.beta2)]);
        }
        f.extend([
            float(self.p_pst_sim),
            float(self.p_pst_analytic),
            float(self.p_straight),
            optional(self.p_teleport),
            optional(self.k_star),
            float(self.enhancement_direct),
            optional(self.enhancement_teleport),
        ]);
        f
    }
}

#[derive(Clone, Copy, Debug)]
enum Point {
    Depolarizing { theta_deg: f64, p: f64 },
    Dephasing { theta_deg: f64, beta1: f64, beta2: f64 },
}

/// Grid points with the angle as the outer loop.
fn grid(config: &SweepConfig) -> Vec<Point> {
    let mut points = Vec::new();
    for theta_deg in config.theta.values() {
        match config.channel {
            SweepChannel::Depolarizing { p } => {
                points.extend(p.values().into_iter().map(|p| Point::Depolarizing { theta_deg, p }));
            }
            SweepChannel::Dephasing { beta, beta2 } => {
                points.extend(beta.values().into_iter().map(|b| Point::Dephasing {
                    theta_deg,
                    beta1: b,
                    beta2: beta2.unwrap_or(b),
                }));
            }
        }
    }
    points
}

fn evaluate(point: Point, config: &SweepConfig) -> Result<SweepRow> {
    let theta_deg = match point {
        Point::Depolarizing { theta_deg, .. } | Point::Dephasing { theta_deg, .. } => theta_deg,
    };
    let qubit = qubit(theta_deg, config.phi_deg)?;
    let settings = preset(&qubit, &config.engine)?;
    let theta = qubit.theta();
    Ok(match point {
        Point::Depolarizing { p, .. } => {
            let params = ChannelParams::depolarizing(p)?;
            let sim = simulate_with_settings(&qubit, &settings, &params, ChannelKind::Depolarizing)?.success_probability;
            let straight = p_straight_analytic(p);
            let comparison = compare(theta, p)?;
            SweepRow {
                theta_deg,
                p: Some(p),
                beta1: None,
                beta2: None,
                p_pst_sim: sim,
                p_pst_analytic: p_pst_analytic(theta, p),
                p_straight: straight,
                p_teleport: Some(comparison.p_teleport),
                k_star: Some(comparison.k_star),
                enhancement_direct: sim - straight,
                enhancement_teleport: Some(sim - comparison.p_teleport),
            }
        }
        Point::Dephasing { beta1, beta2, .. } => {
            let params = ChannelParams::dephasing(beta1, beta2)?;
            let sim = simulate_with_settings(&qubit, &settings, &params, ChannelKind::Dephasing)?.success_probability;
            let straight = p_direct_dephasing(theta, beta1);
            SweepRow {
                theta_deg,
                p: None,
                beta1: Some(beta1),
                beta2: Some(beta2),
                p_pst_sim: sim,
                p_pst_analytic: p_pst_dephasing(theta, beta1, beta2),
                p_straight: straight,
                p_teleport: None,
                k_star: None,
                enhancement_direct: sim - straight,
                enhancement_teleport: None,
            }
        }
    })
}

/// Evaluates the grid on `config.workers` threads; row order does not
/// depend on the worker count.
pub fn compute(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {} workers: {e}", config.workers)))?;
    let points = grid(config);
    pool.install(|| points.par_iter().map(|p| evaluate(*p, config)).collect())
}

pub fn run(config: &SweepConfig, stdout: &mut dyn Write) -> Result<()> {
    let rows = compute(config)?;
    match &config.output {
        Some(path) => {
            let target = path.display().to_string();
            let file = File::create(path).map_err(|e| CliError::io(&target, e))?;
            let mut writer = BufWriter::new(file);
            write_table(&rows, config.format, &mut writer, &target)?;
            writer.flush().map_err(|e| CliError::io(&target, e))
        }
        None => write_table(&rows, config.format, stdout, "stdout"),
    }
}
