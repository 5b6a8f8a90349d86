use serde::{Deserialize, Serialize};

use crate::error::{check_nu, Error, Result};
use crate::geometry::PerimeterCurve;
use crate::shapes::PerimeterSpec;
use crate::vec2::Vec2;

/// Default step, capture radius and horizon, as fractions (or multiples) of
/// the perimeter length.
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_CAPTURE_EPS: f64 = 1e-3;
pub const DEFAULT_T_MAX: f64 = 3.0;
pub const DEFAULT_REASSIGN_PERIOD: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DefenderPolicy {
    /// Each defender plays the one-on-one game against the intruder it is
    /// most sure to beat.
    SoloOptimal,
    /// Defenders 0 and 1 play the two-on-one game against the first live
    /// intruder.
    PairPincer,
    Mm,
    Mis,
    Lgr,
    /// Every defender holds the same signed speed.
    Constant { omega: f64 },
    /// `omegas[step][defender]`; the last row repeats.
    Scripted { omegas: Vec<Vec<f64>> },
    /// Uniform speed in `[-1, 1]`, redrawn every `period` steps.
    RandomTurn {
        #[serde(default = "default_period")]
        period: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IntruderPolicy {
    /// One-on-one optimal against the most threatening defender, computed
    /// as if the speed ratio were `assumed_nu` (the true one by default).
    SoloOptimal {
        #[serde(default)]
        assumed_nu: Option<f64>,
    },
    ClosestPoint,
    TangentPoint,
    /// Two-on-one optimal against defenders 0 and 1.
    DuoOptimal,
    GreedyTeam,
    RandomHeading {
        #[serde(default = "default_period")]
        period: usize,
    },
    /// `headings[step][intruder]`, rescaled to full speed; the last row
    /// repeats.
    Scripted { headings: Vec<Vec<Vec2>> },
}

fn default_period() -> usize {
    50
}

fn default_reassign() -> usize {
    DEFAULT_REASSIGN_PERIOD
}

fn default_record_period() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub perimeter: PerimeterSpec,
    pub nu: f64,
    pub defenders: Vec<f64>,
    pub intruders: Vec<Vec2>,
    pub defender_policy: DefenderPolicy,
    pub intruder_policy: IntruderPolicy,
    /// Time step; `DEFAULT_DT * L` when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Horizon; `DEFAULT_T_MAX * L` when absent.
    #[serde(default)]
    pub t_max: Option<f64>,
    /// Capture radius; `DEFAULT_CAPTURE_EPS * L` when absent.
    #[serde(default)]
    pub capture_eps: Option<f64>,
    #[serde(default = "default_reassign")]
    pub reassign_period: usize,
    /// Keep one record every this many steps; 0 keeps none.
    #[serde(default = "default_record_period")]
    pub record_period: usize,
    #[serde(default)]
    pub seed: u64,
}

/// Step parameters with defaults filled in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolved {
    pub dt: f64,
    pub t_max: f64,
    pub capture_eps: f64,
}

impl SimConfig {
    pub fn new(
        perimeter: PerimeterSpec,
        nu: f64,
        defenders: Vec<f64>,
        intruders: Vec<Vec2>,
        defender_policy: DefenderPolicy,
        intruder_policy: IntruderPolicy,
    ) -> Self {
        SimConfig {
            perimeter,
            nu,
            defenders,
            intruders,
            defender_policy,
            intruder_policy,
            dt: None,
            t_max: None,
            capture_eps: None,
            reassign_period: DEFAULT_REASSIGN_PERIOD,
            record_period: 1,
            seed: 0,
        }
    }

    /// Checks the configuration against a built perimeter and fills in
    /// defaults.
    pub fn validate(&self, c: &PerimeterCurve) -> Result<Resolved> {
        check_nu(self.nu)?;
        let l = c.total_length();
        let r = Resolved {
            dt: self.dt.unwrap_or(DEFAULT_DT * l),
            t_max: self.t_max.unwrap_or(DEFAULT_T_MAX * l),
            capture_eps: self.capture_eps.unwrap_or(DEFAULT_CAPTURE_EPS * l),
        };
        if !(r.dt > 0.0 && r.dt.is_finite()) {
            return Err(Error::config("dt", "must be positive"));
        }
        if !(r.capture_eps > 0.0 && r.capture_eps.is_finite()) {
            return Err(Error::config("capture_eps", "must be positive"));
        }
        if !(r.t_max >= 0.0 && r.t_max.is_finite()) {
            return Err(Error::config("t_max", "must be non-negative"));
        }
        if self.reassign_period == 0 {
            return Err(Error::config("reassign_period", "must be at least 1"));
        }
        for (k, &s) in self.defenders.iter().enumerate() {
            if !(0.0..l).contains(&s) {
                return Err(Error::config(format!("defenders[{k}]"), format!("arc position must lie in [0, {l})")));
            }
        }
        for (k, &x) in self.intruders.iter().enumerate() {
            if !x.is_finite() || !c.is_exterior(x) {
                return Err(Error::config(format!("intruders[{k}]"), "must lie strictly outside the perimeter"));
            }
        }
        match &self.defender_policy {
            DefenderPolicy::Constant { omega } if omega.is_nan() || omega.abs() > 1.0 => {
                return Err(Error::config("defender_policy.omega", "must lie in [-1, 1]"));
            }
            DefenderPolicy::PairPincer if self.defenders.len() != 2 => {
                return Err(Error::config("defender_policy", "pair-pincer needs exactly two defenders"));
            }
            DefenderPolicy::RandomTurn { period: 0 } => {
                return Err(Error::config("defender_policy.period", "must be at least 1"));
            }
            DefenderPolicy::Scripted { omegas }
                if (omegas.is_empty() || omegas.iter().any(|row| row.len() != self.defenders.len())) => {
                    return Err(Error::config("defender_policy.omegas", "need one value per defender in every row"));
                }
            _ => {}
        }
        match &self.intruder_policy {
            IntruderPolicy::SoloOptimal { assumed_nu: Some(v) } => {
                check_nu(*v).map_err(|_| Error::config("intruder_policy.assumed_nu", "must lie in (0,1]"))?;
            }
            IntruderPolicy::DuoOptimal if self.defenders.len() != 2 => {
                return Err(Error::config("intruder_policy", "duo-optimal needs exactly two defenders"));
            }
            IntruderPolicy::RandomHeading { period: 0 } => {
                return Err(Error::config("intruder_policy.period", "must be at least 1"));
            }
            IntruderPolicy::Scripted { headings }
                if (headings.is_empty() || headings.iter().any(|row| row.len() != self.intruders.len())) => {
                    return Err(Error::config("intruder_policy.headings", "need one value per intruder in every row"));
                }
            _ => {}
        }
        Ok(r)
    }
}
