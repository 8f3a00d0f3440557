//! TOML config schemas, one section per subcommand.
//!
//! Configs are flat key-value tables; shared hardware and link blocks reuse
//! the library parameter structs directly so field names stay in one place.

use serde::Deserialize;

use qrs_core::repeater::{HardwareParams, LinkParams};
use qrs_core::sweep::{KPolicy, SweepSpec};

use crate::CliError;

/// `[capacity]` section.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityConfig {
    /// Target code rate R_c = (2k-d)/d; k is chosen per d.
    pub code_rate: f64,
    /// Prime dimensions to tabulate.
    pub d_list: Vec<u64>,
    /// Half-width of the p_l window around the capacity threshold.
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_half_width() -> f64 {
    0.15
}

fn default_points() -> usize {
    101
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityFile {
    pub capacity: CapacityConfig,
}

/// `[chain]` + `[hardware]` + `[link]` sections.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub chain: ChainConfig,
    pub hardware: HardwareParams,
    pub link: LinkConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub d: u64,
    pub k: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub l_0_km: u64,
    #[serde(default = "default_l_att")]
    pub l_att_km: f64,
    pub l_tot_km: u64,
}

fn default_l_att() -> f64 {
    qrs_core::repeater::DEFAULT_ATTENUATION_KM
}

impl LinkConfig {
    pub fn to_link(&self) -> Result<LinkParams, CliError> {
        LinkParams::new(self.l_0_km, self.l_att_km, self.l_tot_km)
            .map_err(|e| CliError::Validation(e.to_string()))
    }
}

/// `[optimize]` + `[hardware]` sections.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeFile {
    pub optimize: OptimizeConfig,
    pub hardware: HardwareParams,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    /// Prime dimensions to search; omitted means odd primes up to 23.
    pub d_candidates: Option<Vec<u64>>,
    #[serde(default = "default_k_policy")]
    pub k_policy: KPolicy,
    pub l_0_min_km: u64,
    pub l_0_max_km: u64,
    pub l_tot_km: u64,
    #[serde(default = "default_l_att")]
    pub l_att_km: f64,
    /// Cap on 2 d log2 d physical qubits per station.
    #[serde(default = "default_budget")]
    pub qubit_budget: f64,
}

fn default_k_policy() -> KPolicy {
    KPolicy::Free
}

fn default_budget() -> f64 {
    200.0
}

impl OptimizeFile {
    pub fn to_spec(&self) -> SweepSpec {
        SweepSpec {
            d_candidates: self
                .optimize
                .d_candidates
                .clone()
                .unwrap_or_else(qrs_core::sweep::default_d_candidates),
            k_policy: self.optimize.k_policy,
            l_0_min_km: self.optimize.l_0_min_km,
            l_0_max_km: self.optimize.l_0_max_km,
            l_tot_km: self.optimize.l_tot_km,
            l_att_km: self.optimize.l_att_km,
            hardware: self.hardware,
            qubit_budget: Some(self.optimize.qubit_budget),
        }
    }
}

/// `[verify]` section with its grid of experiments.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFile {
    pub verify: VerifyConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub grid: Vec<VerifyPoint>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyPoint {
    pub d: u64,
    pub k: usize,
    pub p_l: f64,
    pub eps: f64,
}

pub fn parse<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}
