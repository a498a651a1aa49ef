use std::io::Write;

use serde::Serialize;

use pst_core::channels::p_from_distance;
use pst_core::{
    p_direct_dephasing, p_pst_analytic, p_pst_dephasing, p_straight_analytic, simulate_with_settings, ChannelKind,
    ChannelParams,
};

use super::{preset, qubit};
use crate::cli::{Format, TransferArgs};
use crate::config::{Engine, FileConfig};
use crate::error::{CliError, Result};
use crate::output::{float, optional, write_table, Tabular};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferRow {
    pub theta_deg: f64,
    pub phi_deg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    pub p_pst_sim: f64,
    pub p_pst_analytic: f64,
    pub postselect_probability: f64,
    pub p_straight: f64,
}

impl Tabular for TransferRow {
    fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["theta_deg", "phi_deg"];
        if self.p.is_some() {
            h.push("p");
        } else {
            h.extend(["beta1", "beta2"]);
        }
        h.extend(["p_pst_sim", "p_pst_analytic", "postselect_probability", "p_straight"]);
        h
    }

    fn fields(&self) -> Vec<String> {
        let mut f = vec![float(self.theta_deg), float(self.phi_deg)];
        if self.p.is_some() {
            f.push(optional(self.p));
        } else {
            f.extend([optional(self.beta1), optional(self.beta2)]);
        }
        f.extend([
            float(self.p_pst_sim),
            float(self.p_pst_analytic),
            float(self.postselect_probability),
            float(self.p_straight),
        ]);
        f
    }
}

fn channel(args: &TransferArgs) -> Result<(ChannelParams, ChannelKind)> {
    let depolarizing = args.p.is_some() as u8 + (args.gamma.is_some() || args.distance.is_some()) as u8;
    let dephasing = args.beta1.is_some() || args.beta2.is_some();
    match (depolarizing, dephasing) {
        (0, false) => Err(CliError::usage("give one of --p, --gamma with --distance, or --beta1 with --beta2")),
        (1, false) => {
            let p = match (args.p, args.gamma, args.distance) {
                (Some(p), None, None) => p,
                (None, Some(gamma), Some(distance)) => p_from_distance(gamma, distance).map_err(|e| CliError::usage(e.to_string()))?,
                _ => return Err(CliError::usage("--gamma and --distance go together")),
            };
            let params = ChannelParams::depolarizing(p).map_err(|e| CliError::usage(e.to_string()))?;
            Ok((params, ChannelKind::Depolarizing))
        }
        (0, true) => match (args.beta1, args.beta2) {
            (Some(b1), Some(b2)) => {
                let params = ChannelParams::dephasing(b1, b2).map_err(|e| CliError::usage(e.to_string()))?;
                Ok((params, ChannelKind::Dephasing))
            }
            _ => Err(CliError::usage("--beta1 and --beta2 go together")),
        },
        _ => Err(CliError::usage("choose exactly one channel: --p, --gamma/--distance or --beta1/--beta2")),
    }
}

pub fn compute(args: &TransferArgs, file: &FileConfig) -> Result<TransferRow> {
    let (params, kind) = channel(args)?;
    let phi_deg = args.phi.or(file.phi_q).unwrap_or(0.0);
    let qubit = qubit(args.theta, phi_deg)?;
    let engine = Engine::resolve(&args.engine, file);
    let settings = preset(&qubit, &engine)?;
    let outcome = simulate_with_settings(&qubit, &settings, &params, kind)?;
    let theta = qubit.theta();
    let (p, beta1, beta2, analytic, straight) = match kind {
        ChannelKind::Depolarizing => (
            Some(params.p),
            None,
            None,
            p_pst_analytic(theta, params.p),
            p_straight_analytic(params.p),
        ),
        ChannelKind::Dephasing => (
            None,
            Some(params.beta1),
            Some(params.beta2),
            p_pst_dephasing(theta, params.beta1, params.beta2),
            p_direct_dephasing(theta, params.beta1),
        ),
    };
    Ok(TransferRow {
        theta_deg: args.theta,
        phi_deg,
        p,
        beta1,
        beta2,
        p_pst_sim: outcome.success_probability,
        p_pst_analytic: analytic,
        postselect_probability: outcome.postselect_probability,
        p_straight: straight,
    })
}

pub fn run(args: &TransferArgs, file: &FileConfig, out: &mut dyn Write) -> Result<()> {
    let row = compute(args, file)?;
    let format = args.format.or(file.format).unwrap_or(Format::Csv);
    write_table(&[row], format, out, "stdout")
}
