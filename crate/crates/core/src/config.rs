//! One TOML file configures everything: site geometry, hardware catalog,
//! economics, fitness, optimizer budget, benchmark protocol, scenario
//! synthesis, and the search box. Each section deserializes with
//! defaults, so an empty file (or any subset of keys) is valid, and every
//! tunable default appears as a key when the config is saved.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::BenchConfig;
use crate::components::ComponentCatalog;
use crate::dispatch::DesignVector;
use crate::economics::{EconConfig, FitnessConfig};
use crate::optimize::{Algorithm, OptimizeError, OptimizerConfig, SearchSpace};
use crate::timeseries::{SiteConfig, SynthesisParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("writing {path}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<OptimizeError> for ConfigError {
    fn from(e: OptimizeError) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

/// Benchmark protocol keys that aren't shared with other sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub runs: usize,
    pub algorithms: Vec<Algorithm>,
    /// Label recorded in reports; set to the scenario file's name when
    /// benchmarking stored data.
    pub scenario: String,
    /// Worker threads; 0 means one per available core.
    pub parallelism: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            runs: 30,
            algorithms: Algorithm::ALL.to_vec(),
            scenario: "synthetic".to_string(),
            parallelism: 0,
        }
    }
}

/// Bounds of the sizing search, one min/max pair per design dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceSection {
    pub n_pv_min: f64,
    pub n_pv_max: f64,
    pub n_wg_min: f64,
    pub n_wg_max: f64,
    pub n_bat_min: f64,
    pub n_bat_max: f64,
    pub tilt_min_deg: f64,
    pub tilt_max_deg: f64,
    pub hub_height_min_m: f64,
    pub hub_height_max_m: f64,
    pub n_bio_min: f64,
    pub n_bio_max: f64,
}

impl Default for SpaceSection {
    fn default() -> Self {
        Self {
            n_pv_min: 1.0,
            n_pv_max: 300.0,
            n_wg_min: 1.0,
            n_wg_max: 80.0,
            n_bat_min: 1.0,
            n_bat_max: 300.0,
            tilt_min_deg: 0.0,
            tilt_max_deg: 90.0,
            hub_height_min_m: 11.0,
            hub_height_max_m: 40.0,
            n_bio_min: 1.0,
            n_bio_max: 10.0,
        }
    }
}

impl SpaceSection {
    /// Assemble the optimizer's box in design-vector order; count
    /// dimensions are integer-masked.
    pub fn to_search_space(&self) -> Result<SearchSpace, ConfigError> {
        Ok(SearchSpace::new(
            vec![
                self.n_pv_min,
                self.n_wg_min,
                self.n_bat_min,
                self.tilt_min_deg,
                self.hub_height_min_m,
                self.n_bio_min,
            ],
            vec![
                self.n_pv_max,
                self.n_wg_max,
                self.n_bat_max,
                self.tilt_max_deg,
                self.hub_height_max_m,
                self.n_bio_max,
            ],
            DesignVector::integer_mask().to_vec(),
        )?)
    }
}

/// The whole configuration file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub site: SiteConfig,
    pub catalog: ComponentCatalog,
    pub econ: EconConfig,
    pub fitness: FitnessConfig,
    pub optimizer: OptimizerConfig,
    pub bench: BenchSection,
    pub synthesis: SynthesisParams,
    pub space: SpaceSection,
}

impl AppConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut config: AppConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        config.normalize();
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: &Path) -> Result<(), ConfigError> {
        let text = self.to_toml_string()?;
        fs::write(path, text).map_err(|e| ConfigError::Write {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn to_toml_string(&self) -> Result<String, ConfigError> {
        toml::to_string_pretty(self).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Reconcile cross-section invariants: the economic model prices
    /// battery strings off the same bus voltage the simulator wires.
    pub fn normalize(&mut self) {
        self.econ.bus_voltage_v = self.site.bus_voltage_v;
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.space.to_search_space()?;
        if self.optimizer.population < 2 {
            return Err(ConfigError::Invalid(format!(
                "optimizer population {} below 2",
                self.optimizer.population
            )));
        }
        if self.optimizer.iterations < 1 {
            return Err(ConfigError::Invalid(
                "optimizer iterations below 1".to_string(),
            ));
        }
        if self.bench.runs < 1 {
            return Err(ConfigError::Invalid("bench runs below 1".to_string()));
        }
        if self.bench.algorithms.is_empty() {
            return Err(ConfigError::Invalid(
                "bench algorithm list is empty".to_string(),
            ));
        }
        Ok(())
    }

    /// Assemble the benchmark recipe from the optimizer, fitness, space,
    /// and bench sections.
    pub fn bench_config(&self) -> Result<BenchConfig, ConfigError> {
        Ok(BenchConfig {
            runs: self.bench.runs,
            optimizer: self.optimizer.clone(),
            algorithms: self.bench.algorithms.clone(),
            scenario: self.bench.scenario.clone(),
            parallelism: self.bench.parallelism,
            space: self.space.to_search_space()?,
            fitness: self.fitness.clone(),
        })
    }
}
