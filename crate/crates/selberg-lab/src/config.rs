//! Experiment configuration: a flat key-value file, command-line overrides,
//! and validation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::sampler::ShiftSchedule;
use crate::{Error, Result};

/// Names of the runnable experiments.
pub const EXPERIMENT_NAMES: [&str; 7] = [
    "primes",
    "oracles",
    "onedim",
    "multidim-big",
    "multidim-small",
    "zeros",
    "mesoscopic",
];

/// Output format for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config {
                field: "format".into(),
                message: format!("expected 'csv' or 'json', got '{other}'"),
            }),
        }
    }
}

/// Declarative description of one experiment run. The shift schedule is kept
/// in its textual form (e.g. "big:2", "small:inf,0.5") so that the config
/// echo in a report round-trips exactly; `schedule()` parses it on demand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub t_grid: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub schedule: String,
    pub prime_limit: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    /// Defaults for everything except the experiment name and seed, which
    /// have no sensible defaults.
    pub fn defaults(experiment: &str) -> Self {
        ExperimentConfig {
            experiment: experiment.to_string(),
            t_grid: vec![1e3, 1e4, 1e5, 1e6],
            samples: 20_000,
            seed: 0,
            schedule: "big:1".to_string(),
            prime_limit: 1_000_000,
            output_path: None,
            format: OutputFormat::Json,
        }
    }

    pub fn schedule(&self) -> Result<ShiftSchedule> {
        parse_schedule(&self.schedule)
    }

    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENT_NAMES.contains(&self.experiment.as_str()) {
            return Err(Error::Config {
                field: "experiment".into(),
                message: format!(
                    "unknown experiment '{}'; expected one of {EXPERIMENT_NAMES:?}",
                    self.experiment
                ),
            });
        }
        if self.t_grid.is_empty() {
            return Err(Error::Config {
                field: "t_grid".into(),
                message: "t_grid must be non-empty".into(),
            });
        }
        for w in self.t_grid.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Config {
                    field: "t_grid".into(),
                    message: format!("t_grid must be strictly ascending, got {:?}", self.t_grid),
                });
            }
        }
        for &t in &self.t_grid {
            if !(t >= 16.0) {
                return Err(Error::Config {
                    field: "t_grid".into(),
                    message: format!("every T must be ≥ 16, got {t}"),
                });
            }
            if t > self.prime_limit as f64 {
                return Err(Error::Config {
                    field: "t_grid".into(),
                    message: format!("T = {t} exceeds prime_limit = {}", self.prime_limit),
                });
            }
        }
        if self.samples < 100 {
            return Err(Error::Config {
                field: "samples".into(),
                message: format!("samples must be ≥ 100, got {}", self.samples),
            });
        }
        if self.prime_limit > crate::primes::MAX_PRIME_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "prime_limit {} exceeds maximum {}",
                self.prime_limit,
                crate::primes::MAX_PRIME_LIMIT
            )));
        }
        self.schedule()?.validate()?;
        Ok(())
    }
}

/// Parses a shift schedule from its textual form:
/// - `big:d` — d+1 evaluation points at the big shifts 0, T, …, dT;
/// - `small:e1,e2,…` — points at offsets (log T)^{−e}; `inf` means offset 0;
/// - `explicit:f1,f2,…` — literal offsets.
pub fn parse_schedule(s: &str) -> Result<ShiftSchedule> {
    let err = |message: String| Error::Config { field: "schedule".into(), message };
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| err(format!("expected 'kind:args', got '{s}'")))?;
    let schedule = match kind {
        "big" => {
            let d: usize = rest
                .parse()
                .map_err(|_| err(format!("big:d needs an integer d, got '{rest}'")))?;
            ShiftSchedule::Big { dimension: d + 1 }
        }
        "small" => {
            let mut exponents = Vec::new();
            for part in rest.split(',') {
                let e = if part == "inf" {
                    f64::INFINITY
                } else {
                    part.parse::<f64>()
                        .map_err(|_| err(format!("bad exponent '{part}'")))?
                };
                exponents.push(e);
            }
            ShiftSchedule::Small { exponents }
        }
        "explicit" => {
            let mut offsets = Vec::new();
            for part in rest.split(',') {
                offsets.push(
                    part.parse::<f64>()
                        .map_err(|_| err(format!("bad offset '{part}'")))?,
                );
            }
            ShiftSchedule::Explicit { offsets }
        }
        other => return Err(err(format!("unknown schedule kind '{other}'"))),
    };
    schedule.validate()?;
    Ok(schedule)
}

/// Reads a flat key-value config file: one `key = value` pair per line,
/// `#` comments, blank lines ignored. Returns the raw pairs; merging with
/// flag overrides happens in the CLI layer.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            field: format!("{}:{}", path.display(), lineno + 1),
            message: format!("expected 'key = value', got '{raw}'"),
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Applies a key-value pair (from file or flag) onto a config under
/// construction. Returns an error naming the offending field.
pub fn apply_key(config: &mut ExperimentConfig, key: &str, value: &str) -> Result<()> {
    let bad = |message: String| Error::Config { field: key.to_string(), message };
    match key {
        "experiment" => config.experiment = value.to_string(),
        "t_grid" => {
            let mut grid = Vec::new();
            for part in value.split(',') {
                grid.push(
                    part.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(format!("bad grid value '{part}'")))?,
                );
            }
            config.t_grid = grid;
        }
        "samples" => {
            config.samples = value
                .parse()
                .map_err(|_| bad(format!("bad sample count '{value}'")))?;
        }
        "seed" => {
            config.seed = value
                .parse()
                .map_err(|_| bad(format!("bad seed '{value}'")))?;
        }
        "schedule" => {
            parse_schedule(value)?;
            config.schedule = value.to_string();
        }
        "prime_limit" => {
            config.prime_limit = value
                .parse()
                .map_err(|_| bad(format!("bad prime limit '{value}'")))?;
        }
        "out" | "output_path" => config.output_path = Some(value.to_string()),
        "format" => config.format = OutputFormat::parse(value)?,
        other => {
            return Err(Error::Config {
                field: other.to_string(),
                message: "unknown config key".into(),
            })
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_big_counts_points() {
        match parse_schedule("big:2").unwrap() {
            ShiftSchedule::Big { dimension } => assert_eq!(dimension, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schedule_small_with_infinity() {
        match parse_schedule("small:inf,0.5").unwrap() {
            ShiftSchedule::Small { exponents } => {
                assert_eq!(exponents.len(), 2);
                assert!(exponents[0].is_infinite());
                assert_eq!(exponents[1], 0.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schedule_rejects_garbage() {
        assert!(parse_schedule("big").is_err());
        assert!(parse_schedule("big:x").is_err());
        assert!(parse_schedule("medium:1").is_err());
        assert!(parse_schedule("small:-1").is_err());
    }

    #[test]
    fn validation_catches_bad_grids() {
        let mut c = ExperimentConfig::defaults("onedim");
        assert!(c.validate().is_ok());
        c.t_grid = vec![1000.0, 1000.0];
        assert!(c.validate().is_err());
        c.t_grid = vec![10.0];
        assert!(c.validate().is_err());
        c.t_grid = vec![2e6];
        assert!(c.validate().is_err()); // above prime_limit
        c.t_grid = vec![1e3];
        c.samples = 99;
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_file_round_trip() {
        let dir = std::env::temp_dir();
        let path = dir.join("selberg-lab-config-test.cfg");
        std::fs::write(
            &path,
            "# comment\nexperiment = onedim\nt_grid = 1000, 10000\nseed = 7\nformat = csv\n",
        )
        .unwrap();
        let map = read_config_file(&path).unwrap();
        let mut c = ExperimentConfig::defaults("primes");
        for (k, v) in &map {
            apply_key(&mut c, k, v).unwrap();
        }
        assert_eq!(c.experiment, "onedim");
        assert_eq!(c.t_grid, vec![1000.0, 10000.0]);
        assert_eq!(c.seed, 7);
        assert_eq!(c.format, OutputFormat::Csv);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn unknown_key_rejected() {
        let mut c = ExperimentConfig::defaults("primes");
        assert!(apply_key(&mut c, "threads", "4").is_err());
    }
}
