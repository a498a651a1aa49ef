//! Cross-engine checks. Each check has its own tolerance; `--tol` replaces
//! all of them with one absolute value.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use pst_core::channels::{choi_min_eigenvalue, kraus_completeness_deviation, ChannelSpec};
use pst_core::distill::{yield_closed, yield_product};
use pst_core::oracle::{oracle_bbo, DEFAULT_PUMP_NMAX};
use pst_core::{
    p_pst_analytic, p_pst_dephasing, simulate_with_settings, BboCoupling, ChannelKind, ChannelParams, ModeLabel, Path,
    PolarizationRotation, PumpField, PureFockState, QubitSpec,
};

use super::preset;
use crate::cli::{Format, ValidateArgs};
use crate::config::{Engine, FileConfig};
use crate::error::{CliError, Result};
use crate::output::{float, optional, write_table, Tabular};

const CP_TOLERANCE: f64 = 1e-12;
const TRACE_TOLERANCE: f64 = 1e-12;
const PIPELINE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub passed: bool,
    /// Worst observed deviation; absent when the check could not run.
    pub worst: Option<f64>,
    pub tolerance: f64,
    pub detail: String,
}

impl Tabular for CheckResult {
    fn header(&self) -> Vec<&'static str> {
        vec!["check", "passed", "worst", "tolerance", "detail"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.check.to_string(),
            self.passed.to_string(),
            optional(self.worst),
            float(self.tolerance),
            self.detail.clone(),
        ]
    }
}

fn outcome(check: &'static str, worst: pst_core::Result<f64>, tolerance: f64, detail: &str) -> CheckResult {
    match worst {
        Ok(w) => CheckResult {
            check,
            passed: w <= tolerance,
            worst: Some(w),
            tolerance,
            detail: detail.to_string(),
        },
        Err(e) => CheckResult {
            check,
            passed: false,
            worst: None,
            tolerance,
            detail: e.to_string(),
        },
    }
}

fn oracle_deviation(engine: &Engine, pump_nmax: u8) -> pst_core::Result<f64> {
    let coupling = BboCoupling::new(engine.g)?;
    let alpha = Complex64::new(engine.alpha, 0.0);
    PumpField::horizontal(alpha).check_regime(&coupling)?;
    let vacuum = PureFockState::vacuum(engine.nmax, PumpField::horizontal(alpha));
    let mut inputs = vec![vacuum.clone()];
    inputs.extend(ModeLabel::ALL.iter().map(|m| vacuum.apply_creation(*m).state));
    let qubit = QubitSpec::from_degrees(35.0, 20.0)?;
    let rotation = PolarizationRotation::from_v_image(qubit.a1(), qubit.a2())?;
    let first = vacuum.bbo_apply_perturbative(&coupling, alpha)?.state;
    inputs.push(first.rotate_polarization(Path::One, &rotation).state);

    let mut worst = 0.0f64;
    for input in inputs {
        let pert = input.bbo_apply_perturbative(&coupling, alpha)?.state;
        let exact = oracle_bbo(&input, &coupling, pump_nmax)?;
        for (occ, _) in exact.iter().chain(pert.iter()) {
            worst = worst.max((exact.amplitude(occ) - pert.amplitude(occ)).norm());
        }
    }
    Ok(worst)
}

fn channel_grid() -> impl Iterator<Item = ChannelSpec> {
    (0..=10).flat_map(|i| {
        let x = f64::from(i) / 10.0;
        [ChannelSpec::Depolarize(x), ChannelSpec::Dephase(x)]
    })
}

fn choi_violation() -> pst_core::Result<f64> {
    channel_grid().try_fold(0.0f64, |worst, spec| Ok(worst.max(-choi_min_eigenvalue(&spec)?)))
}

fn trace_deviation() -> pst_core::Result<f64> {
    channel_grid().try_fold(0.0f64, |worst, spec| Ok(worst.max(kraus_completeness_deviation(&spec)?)))
}

fn pipeline_deviation(engine: &Engine, kind: ChannelKind) -> pst_core::Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..=18 {
        let theta_deg = 5.0 * f64::from(i);
        let qubit = QubitSpec::from_degrees(theta_deg, 0.0)?;
        let settings = preset(&qubit, engine)?;
        for j in 0..=20 {
            let x = 0.05 * f64::from(j);
            let (params, analytic) = match kind {
                ChannelKind::Depolarizing => (ChannelParams::depolarizing(x)?, p_pst_analytic(qubit.theta(), x)),
                ChannelKind::Dephasing => (ChannelParams::dephasing(x, x)?, p_pst_dephasing(qubit.theta(), x, x)),
            };
            let sim = simulate_with_settings(&qubit, &settings, &params, kind)?.success_probability;
            worst = worst.max((sim - analytic).abs());
        }
    }
    Ok(worst)
}

/// Worst `|closed - product| / (2 (1 - F0))`.
fn yield_deviation() -> f64 {
    let mut worst = 0.0f64;
    for f0 in [0.9, 0.95, 0.99] {
        for k in 1..=3u32 {
            worst = worst.max((yield_closed(f64::from(k), f0) - yield_product(k, f0)).abs() / (2.0 * (1.0 - f0)));
        }
    }
    worst
}

pub fn compute(args: &ValidateArgs, file: &FileConfig) -> Result<Vec<CheckResult>> {
    let engine = Engine::resolve(&args.engine, file);
    let pump_nmax = args.pump_nmax.or(file.pump_nmax).unwrap_or(DEFAULT_PUMP_NMAX);
    let tol = args.tol.or(file.tol);
    if let Some(t) = tol {
        if !(t >= 0.0) {
            return Err(CliError::usage(format!("--tol {t} must be non-negative")));
        }
    }
    let pick = |native: f64| tol.unwrap_or(native);
    let gx = (engine.g * engine.alpha).abs();
    Ok(vec![
        outcome(
            "oracle_amplitudes",
            oracle_deviation(&engine, pump_nmax),
            pick(20.0 * gx.powi(3)),
            "perturbative crystal vs quantized-pump matrix exponential",
        ),
        outcome("channel_complete_positivity", choi_violation(), pick(CP_TOLERANCE), "negated smallest Choi eigenvalue"),
        outcome("channel_trace_preservation", trace_deviation(), pick(TRACE_TOLERANCE), "Kraus completeness"),
        outcome(
            "pipeline_depolarizing",
            pipeline_deviation(&engine, ChannelKind::Depolarizing),
            pick(PIPELINE_TOLERANCE),
            "19 x 21 grid against the closed form",
        ),
        outcome(
            "pipeline_dephasing",
            pipeline_deviation(&engine, ChannelKind::Dephasing),
            pick(PIPELINE_TOLERANCE),
            "19 x 21 grid against the closed form",
        ),
        match tol {
            // The native bound is relative to 2 (1 - F0).
            None => outcome("yield_product", Ok(yield_deviation()), 1.0, "|closed - product| / (2 (1 - F0))"),
            Some(t) => {
                let mut worst = 0.0f64;
                for f0 in [0.9, 0.95, 0.99] {
                    for k in 1..=3u32 {
                        worst = worst.max((yield_closed(f64::from(k), f0) - yield_product(k, f0)).abs());
                    }
                }
                outcome("yield_product", Ok(worst), t, "|closed - product|")
            }
        },
    ])
}

pub fn run(args: &ValidateArgs, file: &FileConfig, out: &mut dyn Write) -> Result<()> {
    let checks = compute(args, file)?;
    write_table(&checks, args.format.or(file.format).unwrap_or(Format::Csv), out, "stdout")?;
    match checks.iter().filter(|c| !c.passed).count() {
        0 => Ok(()),
        n => Err(CliError::ChecksFailed(n)),
    }
}
