//! Scenario files: one JSON document per run.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use perimeter_defense::error::check_nu;
use perimeter_defense::montecarlo::MonteCarloSpec;
use perimeter_defense::oracle::MinimaxConfig;
use perimeter_defense::sim::{DefenderPolicy, IntruderPolicy, SimConfig, DEFAULT_REASSIGN_PERIOD};
use perimeter_defense::{PerimeterCurve, PerimeterSpec, Vec2};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

fn default_reassign() -> usize {
    DEFAULT_REASSIGN_PERIOD
}

fn default_record() -> usize {
    1
}

fn default_solo() -> DefenderPolicy {
    DefenderPolicy::SoloOptimal
}

fn default_intruder() -> IntruderPolicy {
    IntruderPolicy::SoloOptimal { assumed_nu: None }
}

/// Step parameters; absent values scale with the perimeter length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimParams {
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub capture_eps: Option<f64>,
    #[serde(default = "default_reassign")]
    pub reassign_period: usize,
    #[serde(default = "default_record")]
    pub record_period: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            dt: None,
            t_max: None,
            capture_eps: None,
            reassign_period: DEFAULT_REASSIGN_PERIOD,
            record_period: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloParams {
    pub instances: usize,
    #[serde(default)]
    pub defenders: Option<(usize, usize)>,
    #[serde(default)]
    pub intruders: Option<(usize, usize)>,
    #[serde(default)]
    pub distance: Option<(f64, f64)>,
    #[serde(default)]
    pub margin: Option<f64>,
    #[serde(default)]
    pub policies: Option<Vec<DefenderPolicy>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleParams {
    /// States sampled for each agreement check.
    pub samples: usize,
    #[serde(default)]
    pub minimax: Option<MinimaxConfig>,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            samples: 500,
            minimax: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputParams {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub svg: bool,
    /// Level-set grid nodes per axis; no level-set export when absent.
    #[serde(default)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub perimeter: PerimeterSpec,
    pub nu: f64,
    #[serde(default)]
    pub defenders: Vec<f64>,
    #[serde(default)]
    pub intruders: Vec<Vec2>,
    #[serde(default = "default_solo")]
    pub defender_policy: DefenderPolicy,
    #[serde(default = "default_intruder")]
    pub intruder_policy: IntruderPolicy,
    #[serde(default)]
    pub sim: SimParams,
    #[serde(default)]
    pub montecarlo: Option<MonteCarloParams>,
    #[serde(default)]
    pub oracle: Option<OracleParams>,
    #[serde(default)]
    pub output: OutputParams,
}

impl ScenarioFile {
    #[cfg(test)]
    pub fn new(perimeter: PerimeterSpec, nu: f64) -> Self {
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            perimeter,
            nu,
            defenders: Vec::new(),
            intruders: Vec::new(),
            defender_policy: default_solo(),
            intruder_policy: default_intruder(),
            sim: SimParams::default(),
            montecarlo: None,
            oracle: None,
            output: OutputParams::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let s: ScenarioFile = serde_json::from_str(text).context("malformed scenario")?;
        if s.schema_version != SCHEMA_VERSION {
            bail!(
                "schema_version: unsupported version {}, expected {}",
                s.schema_version,
                SCHEMA_VERSION
            );
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    #[cfg(test)]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Builds the perimeter and checks the agents against it.
    pub fn validate(&self) -> Result<PerimeterCurve> {
        check_nu(self.nu).context("nu")?;
        let c = self.perimeter.build().context("perimeter")?;
        let l = c.total_length();
        for (k, &s) in self.defenders.iter().enumerate() {
            if !(s.is_finite() && (0.0..l).contains(&s)) {
                bail!("defenders[{k}]: arc position {s} must lie in [0, {l})");
            }
        }
        for (k, x) in self.intruders.iter().enumerate() {
            if !x.is_finite() || !c.is_exterior(*x) {
                bail!("intruders[{k}]: ({}, {}) must lie strictly outside the perimeter", x.x, x.y);
            }
        }
        Ok(c)
    }

    pub fn sim_config(&self) -> SimConfig {
        let mut cfg = SimConfig::new(
            self.perimeter.clone(),
            self.nu,
            self.defenders.clone(),
            self.intruders.clone(),
            self.defender_policy.clone(),
            self.intruder_policy.clone(),
        );
        cfg.dt = self.sim.dt;
        cfg.t_max = self.sim.t_max;
        cfg.capture_eps = self.sim.capture_eps;
        cfg.reassign_period = self.sim.reassign_period;
        cfg.record_period = self.sim.record_period;
        cfg.seed = self.sim.seed;
        cfg
    }

    pub fn montecarlo_spec(&self) -> MonteCarloSpec {
        let p = self.montecarlo.clone().unwrap_or(MonteCarloParams {
            instances: 100,
            defenders: None,
            intruders: None,
            distance: None,
            margin: None,
            policies: None,
        });
        let mut spec = MonteCarloSpec::new(self.perimeter.clone(), self.nu, p.instances);
        if let Some(r) = p.defenders {
            spec.defenders = r;
        }
        if let Some(r) = p.intruders {
            spec.intruders = r;
        }
        if let Some(d) = p.distance {
            spec.distance = d;
        }
        if let Some(m) = p.margin {
            spec.margin = m;
        }
        if let Some(pol) = p.policies {
            spec.policies = pol;
        }
        spec.dt = self.sim.dt;
        spec.t_max = self.sim.t_max;
        spec.seed = self.sim.seed;
        spec
    }
}
