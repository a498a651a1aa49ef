//! Settings file and its merge with command-line flags.
//!
//! Every key is optional. A flag given on the command line wins over the
//! file, which wins over the built-in default. `PST_WORKERS` wins over all
//! sources for the worker count.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::cli::{Channel, EngineArgs, Format, SweepArgs};
use crate::error::{CliError, Result};

pub const WORKERS_ENV: &str = "PST_WORKERS";

pub const DEFAULT_G: f64 = 1e-3;
pub const DEFAULT_ALPHA: f64 = 1.0;

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub g: Option<f64>,
    pub alpha: Option<f64>,
    pub nmax: Option<u8>,
    pub pump_nmax: Option<u8>,
    pub phi_q: Option<f64>,
    pub channel: Option<Channel>,
    pub theta_min: Option<f64>,
    pub theta_max: Option<f64>,
    pub theta_steps: Option<usize>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub p_steps: Option<usize>,
    pub beta_min: Option<f64>,
    pub beta_max: Option<f64>,
    pub beta_steps: Option<usize>,
    pub beta2: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
    pub tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }
}

/// Coupling, pump and truncation after merging.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Engine {
    pub g: f64,
    pub alpha: f64,
    pub nmax: u8,
}

impl Engine {
    pub fn resolve(args: &EngineArgs, file: &FileConfig) -> Self {
        Self {
            g: args.g.or(file.g).unwrap_or(DEFAULT_G),
            alpha: args.alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA),
            nmax: args.nmax.or(file.nmax).unwrap_or(pst_core::fock::DEFAULT_NMAX),
        }
    }
}

/// Inclusive evenly spaced range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Range {
    fn checked(name: &str, min: f64, max: f64, steps: usize, domain: (f64, f64)) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min > max || min < domain.0 || max > domain.1 {
            return Err(CliError::usage(format!(
                "{name} range [{min}, {max}] must be ordered and inside [{}, {}]",
                domain.0, domain.1
            )));
        }
        if steps == 0 || (min < max && steps < 2) {
            return Err(CliError::usage(format!("{name} range needs at least 2 steps")));
        }
        Ok(Self { min, max, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepChannel {
    Depolarizing { p: Range },
    /// `beta2 = None` sweeps both paths together.
    Dephasing { beta: Range, beta2: Option<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub theta: Range,
    pub phi_deg: f64,
    pub channel: SweepChannel,
    pub engine: Engine,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub workers: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

/// `PST_WORKERS`, if set, must be a positive integer.
pub fn workers_from_env(value: Option<&str>) -> Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::usage(format!("{WORKERS_ENV}={v:?} is not a positive integer"))),
        },
    }
}

impl SweepConfig {
    pub fn resolve(args: &SweepArgs, file: &FileConfig, env_workers: Option<usize>) -> Result<Self> {
        let theta = Range::checked(
            "theta",
            args.theta_min.or(file.theta_min).unwrap_or(0.0),
            args.theta_max.or(file.theta_max).unwrap_or(90.0),
            args.theta_steps.or(file.theta_steps).unwrap_or(19),
            (0.0, 90.0),
        )?;
        let channel = match args.channel.or(file.channel).unwrap_or(Channel::Depolarizing) {
            Channel::Depolarizing => SweepChannel::Depolarizing {
                p: Range::checked(
                    "p",
                    args.p_min.or(file.p_min).unwrap_or(0.0),
                    args.p_max.or(file.p_max).unwrap_or(1.0),
                    args.p_steps.or(file.p_steps).unwrap_or(21),
                    (0.0, 1.0),
                )?,
            },
            Channel::Dephasing => {
                let beta2 = args.beta2.or(file.beta2);
                if let Some(b) = beta2 {
                    if !(0.0..=1.0).contains(&b) {
                        return Err(CliError::usage(format!("beta2 = {b} must lie in [0, 1]")));
                    }
                }
                SweepChannel::Dephasing {
                    beta: Range::checked(
                        "beta",
                        args.beta_min.or(file.beta_min).unwrap_or(0.0),
                        args.beta_max.or(file.beta_max).unwrap_or(1.0),
                        args.beta_steps.or(file.beta_steps).unwrap_or(11),
                        (0.0, 1.0),
                    )?,
                    beta2,
                }
            }
        };
        let workers = env_workers.or(args.workers).or(file.workers).unwrap_or_else(default_workers);
        if workers == 0 {
            return Err(CliError::usage("workers must be positive"));
        }
        Ok(Self {
            theta,
            phi_deg: args.phi.or(file.phi_q).unwrap_or(0.0),
            channel,
            engine: Engine::resolve(&args.engine, file),
            output: args.output.clone().or_else(|| file.output.clone()),
            format: args.format.or(file.format).unwrap_or(Format::Csv),
            workers,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_and_env_beats_both() {
        let file: FileConfig = toml::from_str("g = 0.002\np_steps = 5\nworkers = 3\n").unwrap();
        let args = SweepArgs {
            p_steps: Some(7),
            workers: Some(2),
            ..SweepArgs::default()
        };
        let cfg = SweepConfig::resolve(&args, &file, None).unwrap();
        assert_eq!(cfg.engine.g, 0.002);
        assert_eq!(cfg.channel, SweepChannel::Depolarizing { p: Range { min: 0.0, max: 1.0, steps: 7 } });
        assert_eq!(cfg.workers, 2);
        assert_eq!(SweepConfig::resolve(&args, &file, Some(5)).unwrap().workers, 5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("gee = 1").is_err());
    }

    #[test]
    fn ranges() {
        let r = Range::checked("p", 0.0, 1.0, 21, (0.0, 1.0)).unwrap();
        let v = r.values();
        assert_eq!(v.len(), 21);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[20], 1.0);
        assert!((v[1] - 0.05).abs() < 1e-15);
        assert!(Range::checked("p", 0.0, 1.0, 1, (0.0, 1.0)).is_err());
        assert!(Range::checked("p", 0.5, 0.5, 1, (0.0, 1.0)).is_ok());
        assert!(Range::checked("p", 0.0, 1.5, 3, (0.0, 1.0)).is_err());
    }

    #[test]
    fn worker_env_parsing() {
        assert_eq!(workers_from_env(None).unwrap(), None);
        assert_eq!(workers_from_env(Some("4")).unwrap(), Some(4));
        assert!(workers_from_env(Some("0")).is_err());
        assert!(workers_from_env(Some("many")).is_err());
    }
}
