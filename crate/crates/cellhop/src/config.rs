//! Flat key-value experiment configuration.
//!
//! The format is one `key = value` per line, `#` starting a comment,
//! blank lines ignored. Every key is optional and defaults to the
//! baseline configuration; unknown and repeated keys are rejected.
//! [`ExperimentConfig::dump`] emits the canonical form, and
//! parse(dump(c)) reproduces `c` exactly (floats are printed with
//! round-tripping precision).

use std::collections::HashSet;
use std::path::Path;

use crate::analytic::QuadratureSpec;
use crate::channel::PathLossModel;
use crate::geometry::{IntensityProfile, LatticeSpec, Point};
use crate::montecarlo::RelayScheme;
use crate::SystemParams;

/// Everything an experiment run needs: the physical parameters (SNR in
/// dB, as on the figure axes), the sweep grids, the trial budget, and
/// quadrature overrides for the analytic side.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub lattice_density: f64,
    pub lattice_truncation: usize,
    pub mobile_density: f64,
    pub cell_side: f64,
    pub path_loss: PathLossModel,
    pub theta: f64,
    pub dest_x: f64,
    pub dest_y: f64,
    pub sigma2: f64,
    pub snr_db: f64,
    pub beta: f64,
    pub sweep_snr_db: Vec<f64>,
    pub sweep_betas: Vec<f64>,
    pub scheme: RelayScheme,
    pub trials: u64,
    pub seed: u64,
    /// Output path; `None` writes to stdout.
    pub out: Option<String>,
    pub quad_radial_step: f64,
    pub quad_grid_n: usize,
    pub quad_truncation: usize,
    pub quad_include_tail: bool,
    pub quad_tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = SystemParams::default();
        let quad = QuadratureSpec::default();
        ExperimentConfig {
            lattice_density: p.lattice.density,
            lattice_truncation: p.lattice.truncation,
            mobile_density: p.mobiles.density,
            cell_side: p.mobiles.side,
            path_loss: p.path_loss,
            theta: p.theta,
            dest_x: p.dest_offset.x,
            dest_y: p.dest_offset.y,
            sigma2: p.sigma2,
            snr_db: 10.0 * p.snr.log10(),
            beta: p.beta,
            sweep_snr_db: (0..=8).map(|k| 5.0 * k as f64).collect(),
            sweep_betas: vec![0.25, 0.75],
            scheme: RelayScheme::NearestToDestination,
            trials: 100_000,
            seed: 1,
            out: None,
            quad_radial_step: quad.radial_step,
            quad_grid_n: quad.grid_n,
            quad_truncation: quad.lattice_truncation,
            quad_include_tail: quad.include_tail,
            quad_tol: quad.tol,
        }
    }
}

/// Configuration errors, each carrying the offending line number.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    Value { line: usize, key: String, reason: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

impl ExperimentConfig {
    /// Parses the flat key-value text, filling unmentioned keys with
    /// defaults.
    pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        let mut alpha_override: Option<f64> = None;
        let mut seen: HashSet<String> = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or(ConfigError::Syntax { line })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::Duplicate { line, key: key.to_string() });
            }
            let bad = |reason: &str| ConfigError::Value {
                line,
                key: key.to_string(),
                reason: reason.to_string(),
            };
            match key {
                "lattice_density" => cfg.lattice_density = parse_f64(value).map_err(|e| bad(&e))?,
                "lattice_truncation" => {
                    cfg.lattice_truncation = value.parse().map_err(|_| bad("expected integer"))?
                }
                "mobile_density" => cfg.mobile_density = parse_f64(value).map_err(|e| bad(&e))?,
                "cell_side" => cfg.cell_side = parse_f64(value).map_err(|e| bad(&e))?,
                "path_loss" => {
                    let alpha = alpha_override.unwrap_or(cfg.path_loss.alpha());
                    cfg.path_loss = match value {
                        "singular" => PathLossModel::Singular { alpha },
                        "sum" => PathLossModel::NonSingularSum { alpha },
                        "min" => PathLossModel::NonSingularMin { alpha },
                        _ => return Err(bad("expected singular|sum|min")),
                    };
                }
                "alpha" => {
                    let alpha = parse_f64(value).map_err(|e| bad(&e))?;
                    alpha_override = Some(alpha);
                    cfg.path_loss = cfg.path_loss.with_alpha(alpha);
                }
                "theta" => cfg.theta = parse_f64(value).map_err(|e| bad(&e))?,
                "dest_x" => cfg.dest_x = parse_f64(value).map_err(|e| bad(&e))?,
                "dest_y" => cfg.dest_y = parse_f64(value).map_err(|e| bad(&e))?,
                "sigma2" => cfg.sigma2 = parse_f64(value).map_err(|e| bad(&e))?,
                "snr_db" => cfg.snr_db = parse_f64(value).map_err(|e| bad(&e))?,
                "beta" => cfg.beta = parse_f64(value).map_err(|e| bad(&e))?,
                "sweep_snr_db" => cfg.sweep_snr_db = parse_list(value).map_err(|e| bad(&e))?,
                "sweep_betas" => cfg.sweep_betas = parse_list(value).map_err(|e| bad(&e))?,
                "scheme" => {
                    cfg.scheme = RelayScheme::from_label(value)
                        .ok_or_else(|| bad("expected retransmit|nearest|best"))?
                }
                "trials" => cfg.trials = value.parse().map_err(|_| bad("expected integer"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("expected integer"))?,
                "out" => cfg.out = if value.is_empty() { None } else { Some(value.to_string()) },
                "quad_radial_step" => {
                    cfg.quad_radial_step = parse_f64(value).map_err(|e| bad(&e))?
                }
                "quad_grid_n" => {
                    cfg.quad_grid_n = value.parse().map_err(|_| bad("expected integer"))?
                }
                "quad_truncation" => {
                    cfg.quad_truncation = value.parse().map_err(|_| bad("expected integer"))?
                }
                "quad_include_tail" => {
                    cfg.quad_include_tail = match value {
                        "true" => true,
                        "false" => false,
                        _ => return Err(bad("expected true|false")),
                    }
                }
                "quad_tol" => cfg.quad_tol = parse_f64(value).map_err(|e| bad(&e))?,
                _ => return Err(ConfigError::UnknownKey { line, key: key.to_string() }),
            }
        }
        Ok(cfg)
    }

    /// Reads and parses a config file.
    pub fn from_file(path: &Path) -> Result<ExperimentConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        ExperimentConfig::parse(&text)
    }

    /// Canonical dump: every key once, fixed order, parseable back into
    /// an equal configuration.
    pub fn dump(&self) -> String {
        let kind = match self.path_loss {
            PathLossModel::Singular { .. } => "singular",
            PathLossModel::NonSingularSum { .. } => "sum",
            PathLossModel::NonSingularMin { .. } => "min",
        };
        let mut s = String::new();
        s.push_str("# network geometry\n");
        s.push_str(&format!("lattice_density = {}\n", self.lattice_density));
        s.push_str(&format!("lattice_truncation = {}\n", self.lattice_truncation));
        s.push_str(&format!("mobile_density = {}\n", self.mobile_density));
        s.push_str(&format!("cell_side = {}\n", self.cell_side));
        s.push_str("# channel\n");
        s.push_str(&format!("path_loss = {kind}\n"));
        s.push_str(&format!("alpha = {}\n", self.path_loss.alpha()));
        s.push_str(&format!("theta = {}\n", self.theta));
        s.push_str(&format!("dest_x = {}\n", self.dest_x));
        s.push_str(&format!("dest_y = {}\n", self.dest_y));
        s.push_str(&format!("sigma2 = {}\n", self.sigma2));
        s.push_str(&format!("snr_db = {}\n", self.snr_db));
        s.push_str(&format!("beta = {}\n", self.beta));
        s.push_str("# experiment\n");
        s.push_str(&format!("sweep_snr_db = {}\n", join(&self.sweep_snr_db)));
        s.push_str(&format!("sweep_betas = {}\n", join(&self.sweep_betas)));
        s.push_str(&format!("scheme = {}\n", self.scheme.label()));
        s.push_str(&format!("trials = {}\n", self.trials));
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str(&format!("out = {}\n", self.out.as_deref().unwrap_or("")));
        s.push_str("# quadrature\n");
        s.push_str(&format!("quad_radial_step = {}\n", self.quad_radial_step));
        s.push_str(&format!("quad_grid_n = {}\n", self.quad_grid_n));
        s.push_str(&format!("quad_truncation = {}\n", self.quad_truncation));
        s.push_str(&format!("quad_include_tail = {}\n", self.quad_include_tail));
        s.push_str(&format!("quad_tol = {}\n", self.quad_tol));
        s
    }

    /// FNV-1a hash of the canonical dump; stamped into every output file
    /// so data can be traced back to its exact configuration.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.dump().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }

    /// Physical parameter set at the configured operating point (SNR
    /// converted from dB to linear).
    pub fn system_params(&self) -> SystemParams {
        SystemParams {
            lattice: LatticeSpec {
                density: self.lattice_density,
                truncation: self.lattice_truncation,
            },
            mobiles: IntensityProfile { density: self.mobile_density, side: self.cell_side },
            path_loss: self.path_loss,
            theta: self.theta,
            dest_offset: Point::new(self.dest_x, self.dest_y),
            sigma2: self.sigma2,
            snr: 10f64.powf(self.snr_db / 10.0),
            beta: self.beta,
        }
    }

    /// Quadrature settings for the analytic side.
    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            radial_step: self.quad_radial_step,
            grid_n: self.quad_grid_n,
            lattice_truncation: self.quad_truncation,
            include_tail: self.quad_include_tail,
            tol: self.quad_tol,
            ..QuadratureSpec::default()
        }
    }

    /// Domain checks beyond syntax: physical parameters, budgets, grids.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.system_params()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.trials == 0 {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        if self.sweep_snr_db.is_empty() || self.sweep_betas.is_empty() {
            return Err(ConfigError::Invalid("sweep grids must be non-empty".into()));
        }
        if !(self.quad_radial_step > 0.0) || !(self.quad_tol > 0.0) {
            return Err(ConfigError::Invalid("quadrature steps must be positive".into()));
        }
        if self.quad_grid_n < 8 || self.quad_grid_n % 2 != 0 {
            return Err(ConfigError::Invalid("quad_grid_n must be even and at least 8".into()));
        }
        Ok(())
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("expected number, got `{s}`"))
}

/// Parses a comma-separated list of numbers (used by config values and
/// CLI flags alike).
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_f64)
        .collect()
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_baseline_parameters() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.system_params(), SystemParams::default());
        assert_eq!(cfg.quadrature(), QuadratureSpec::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn dump_parse_round_trip_is_lossless() {
        let mut cfg = ExperimentConfig::default();
        cfg.snr_db = 23.456789012345678;
        cfg.path_loss = PathLossModel::Singular { alpha: 3.3 };
        cfg.sweep_betas = vec![0.1, 0.333333333333333314, 0.9];
        cfg.scheme = RelayScheme::BestChannel;
        cfg.out = Some("runs/data.csv".to_string());
        cfg.trials = 12345;
        let again = ExperimentConfig::parse(&cfg.dump()).unwrap();
        assert_eq!(cfg, again);
        // Hash is stable under the round trip and sensitive to content.
        assert_eq!(cfg.hash(), again.hash());
        let mut other = cfg.clone();
        other.seed += 1;
        assert_ne!(cfg.hash(), other.hash());
    }

    #[test]
    fn partial_files_fill_with_defaults() {
        let cfg = ExperimentConfig::parse(
            "# comment only\n\nsnr_db = 30 # trailing comment\nscheme=best\n",
        )
        .unwrap();
        assert_eq!(cfg.snr_db, 30.0);
        assert_eq!(cfg.scheme, RelayScheme::BestChannel);
        assert_eq!(cfg.theta, ExperimentConfig::default().theta);
    }

    #[test]
    fn alpha_and_kind_combine_in_any_order() {
        let a = ExperimentConfig::parse("path_loss = singular\nalpha = 3.5\n").unwrap();
        let b = ExperimentConfig::parse("alpha = 3.5\npath_loss = singular\n").unwrap();
        assert_eq!(a.path_loss, PathLossModel::Singular { alpha: 3.5 });
        assert_eq!(a, b);
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(matches!(
            ExperimentConfig::parse("no_such_key = 1\n"),
            Err(ConfigError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("theta 1.5\n"),
            Err(ConfigError::Syntax { line: 1 })
        ));
        assert!(matches!(
            ExperimentConfig::parse("theta = 1.5\ntheta = 2.0\n"),
            Err(ConfigError::Duplicate { line: 2, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("theta = fast\n"),
            Err(ConfigError::Value { line: 1, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("scheme = fastest\n"),
            Err(ConfigError::Value { line: 1, .. })
        ));

        let mut cfg = ExperimentConfig::default();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        cfg = ExperimentConfig::default();
        cfg.theta = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn list_parsing_handles_spaces_and_rejects_junk() {
        assert_eq!(parse_list("1, 2.5,3e1").unwrap(), vec![1.0, 2.5, 30.0]);
        assert_eq!(parse_list("").unwrap(), Vec::<f64>::new());
        assert!(parse_list("1,x,3").is_err());
    }
}
