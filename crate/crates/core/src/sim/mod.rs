//! Fixed-step simulation of defenders and intruders.
//!
//! All controls are computed from the same pre-step state, then every agent
//! moves with an explicit Euler step. Boundary contact inside a step is found
//! exactly on the segment and adjudicated there.

mod config;
mod policy;

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::PerimeterCurve;
use crate::solo::{evaluate_solo, is_afferent, singular_distance};
use crate::team::{Assignment, Engagement};
use crate::vec2::Vec2;

pub use config::{
    DefenderPolicy, IntruderPolicy, Resolved, SimConfig, DEFAULT_CAPTURE_EPS, DEFAULT_DT, DEFAULT_REASSIGN_PERIOD,
    DEFAULT_T_MAX,
};
pub use policy::EngagementValue;

use policy::Controller;

/// Relative slack on the control bounds.
const CONTROL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IntruderStatus {
    Alive,
    Breached,
    Captured,
}

impl IntruderStatus {
    pub fn is_alive(self) -> bool {
        self == IntruderStatus::Alive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimState {
    pub t: f64,
    pub defenders: Vec<f64>,
    pub intruders: Vec<Vec2>,
    pub status: Vec<IntruderStatus>,
    /// Fraction of the last step at which each intruder touched the
    /// perimeter; its position is the contact point.
    #[serde(skip)]
    pub contact: Vec<Option<f64>>,
}

impl SimState {
    pub fn new(defenders: Vec<f64>, intruders: Vec<Vec2>) -> Self {
        let n = intruders.len();
        SimState {
            t: 0.0,
            defenders,
            intruders,
            status: vec![IntruderStatus::Alive; n],
            contact: vec![None; n],
        }
    }

    pub fn alive(&self) -> impl Iterator<Item = bool> + '_ {
        self.status.iter().map(|s| s.is_alive())
    }

    pub fn all_resolved(&self) -> bool {
        self.status.iter().all(|s| !s.is_alive())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Event {
    Breach {
        t: f64,
        intruder: usize,
        s_b: f64,
        safe_distance: f64,
    },
    Capture {
        t: f64,
        defenders: Vec<usize>,
        intruder: usize,
    },
    Reassign {
        t: f64,
        edges: Vec<Engagement>,
        secondary: Vec<Engagement>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: f64,
    pub defenders: Vec<f64>,
    /// `None` once the intruder is resolved.
    pub intruders: Vec<Option<Vec2>>,
    pub omegas: Vec<f64>,
    pub headings: Vec<Vec2>,
    pub values: Vec<EngagementValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    /// Number of breaches.
    pub q: usize,
    pub status: Vec<IntruderStatus>,
    pub t_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimTrace {
    pub params: Resolved,
    /// Score bound of the defender policy at `t = 0`, for assignment policies.
    pub bound: Option<usize>,
    pub records: Vec<StepRecord>,
    pub events: Vec<Event>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreachInfo {
    pub t: f64,
    pub s_b: f64,
    pub safe_distance: f64,
}

impl SimTrace {
    pub fn breach(&self, k: usize) -> Option<BreachInfo> {
        self.events.iter().find_map(|e| match *e {
            Event::Breach {
                t,
                intruder,
                s_b,
                safe_distance,
            } if intruder == k => Some(BreachInfo { t, s_b, safe_distance }),
            _ => None,
        })
    }

    pub fn captured(&self, k: usize) -> bool {
        self.outcome.status.get(k) == Some(&IntruderStatus::Captured)
    }

    /// Largest recorded value of the engagements that involve intruder `k`.
    pub fn max_value(&self, k: usize) -> Option<f64> {
        self.records
            .iter()
            .flat_map(|r| r.values.iter())
            .filter(|v| v.intruder == k)
            .map(|v| v.value)
            .reduce(f64::max)
    }

    /// Step records as JSON lines.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Everything but the step records.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "params": self.params,
            "bound": self.bound,
            "events": self.events,
            "outcome": self.outcome,
        })
    }
}

/// Signed arc change from `a` to `b`, taking the short way round.
fn arc_delta(c: &PerimeterCurve, a: f64, b: f64) -> f64 {
    let d = c.arc_distance_ccw(a, b);
    if d > 0.5 * c.total_length() {
        d - c.total_length()
    } else {
        d
    }
}

/// Advances every live agent by one explicit step. An intruder whose path
/// meets the perimeter stops at the contact point.
pub fn step(c: &PerimeterCurve, state: &SimState, omegas: &[f64], headings: &[Vec2], nu: f64, dt: f64) -> Result<SimState> {
    if omegas.len() != state.defenders.len() || headings.len() != state.intruders.len() {
        return Err(Error::config("controls", "one control per agent required"));
    }
    for (index, &omega) in omegas.iter().enumerate() {
        if omega.is_nan() || omega.abs() > 1.0 + CONTROL_SLACK {
            return Err(Error::DefenderControl { index, omega });
        }
    }
    for (index, &u) in headings.iter().enumerate() {
        let speed = u.norm();
        if speed.is_nan() || speed > nu * (1.0 + CONTROL_SLACK) {
            return Err(Error::IntruderControl { index, speed, nu });
        }
    }
    let defenders = state
        .defenders
        .iter()
        .zip(omegas)
        .map(|(&s, &w)| c.wrap(s + w * dt))
        .collect();
    let mut intruders = state.intruders.clone();
    let mut contact = vec![None; intruders.len()];
    for k in 0..intruders.len() {
        if !state.status[k].is_alive() {
            continue;
        }
        let a = state.intruders[k];
        let b = a + headings[k] * dt;
        if c.is_exterior(b) {
            intruders[k] = b;
        } else {
            let lam = c.segment_entry(a, b).unwrap_or(1.0);
            let p = a.lerp(b, lam);
            intruders[k] = c.point_at(c.project_boundary(p));
            contact[k] = Some(lam);
        }
    }
    Ok(SimState {
        t: state.t + dt,
        defenders,
        intruders,
        status: state.status.clone(),
        contact,
    })
}

/// Smallest distance between an intruder and a defender that both move
/// linearly over `[0, 1]`.
fn closest_approach(x0: Vec2, x1: Vec2, p0: Vec2, p1: Vec2) -> f64 {
    let r0 = x0 - p0;
    let dr = (x1 - x0) - (p1 - p0);
    let dd = dr.norm_sq();
    let tau = if dd > 0.0 { (-r0.dot(dr) / dd).clamp(0.0, 1.0) } else { 0.0 };
    (r0 + dr * tau).norm()
}

/// Terminal checks for the transition `before -> after`.
///
/// `solo_engaged[d]` names the intruder defender `d` played the one-on-one
/// game against during the step; reaching or crossing that defender's
/// afferent surface counts as capture.
pub fn adjudicate(
    c: &PerimeterCurve,
    before: &SimState,
    after: &SimState,
    solo_engaged: &[Option<usize>],
    nu: f64,
    capture_eps: f64,
) -> Result<Vec<Event>> {
    let mut events = Vec::new();
    let t = after.t;
    for k in 0..after.intruders.len() {
        if !before.status[k].is_alive() {
            continue;
        }
        let lam = after.contact[k].unwrap_or(1.0);
        let mut near = Vec::new();
        for d in 0..before.defenders.len() {
            let s0 = before.defenders[d];
            let s1 = s0 + lam * arc_delta(c, s0, after.defenders[d]);
            let dist = closest_approach(before.intruders[k], after.intruders[k], c.point_at(s0), c.point_at(s1));
            if dist <= capture_eps {
                near.push(d);
            }
        }
        if let Some(lam) = after.contact[k] {
            let s_b = c.project_boundary(after.intruders[k]);
            let mut safe = f64::INFINITY;
            for d in 0..before.defenders.len() {
                let s0 = before.defenders[d];
                let s = s0 + lam * arc_delta(c, s0, after.defenders[d]);
                let gap = c.arc_distance(s, s_b);
                if gap <= capture_eps && !near.contains(&d) {
                    near.push(d);
                }
                safe = safe.min(gap);
            }
            if near.is_empty() {
                events.push(Event::Breach {
                    t: before.t + lam * (after.t - before.t),
                    intruder: k,
                    s_b,
                    safe_distance: if safe.is_finite() { safe } else { 0.5 * c.total_length() },
                });
                continue;
            }
        } else if near.is_empty() {
            for (d, engaged) in solo_engaged.iter().enumerate() {
                if *engaged != Some(k) {
                    continue;
                }
                let x = after.intruders[k];
                let e = evaluate_solo(c, after.defenders[d], x, nu)?;
                if e.value > 0.0 || !is_afferent(c, &e, x) {
                    continue;
                }
                // Touching the surface, or crossing it during the step.
                let crossed = || -> Result<bool> {
                    let e0 = evaluate_solo(c, before.defenders[d], before.intruders[k], nu)?;
                    Ok(e0.gap() * e.gap() <= 0.0 && is_afferent(c, &e0, before.intruders[k]))
                };
                if singular_distance(c, &e, x, nu) <= capture_eps || crossed()? {
                    near.push(d);
                }
            }
        }
        if !near.is_empty() {
            near.sort_unstable();
            events.push(Event::Capture {
                t,
                defenders: near,
                intruder: k,
            });
        }
    }
    Ok(events)
}

fn apply(state: &mut SimState, events: &[Event]) {
    for e in events {
        match *e {
            Event::Breach { intruder, .. } => state.status[intruder] = IntruderStatus::Breached,
            Event::Capture { intruder, .. } => state.status[intruder] = IntruderStatus::Captured,
            Event::Reassign { .. } => {}
        }
    }
}

/// Builds the perimeter and runs the configuration.
pub fn run(cfg: &SimConfig) -> Result<SimTrace> {
    let c = cfg.perimeter.build()?;
    run_on(&c, cfg)
}

/// Runs the configuration on an already built perimeter, which must match
/// `cfg.perimeter`.
pub fn run_on(c: &PerimeterCurve, cfg: &SimConfig) -> Result<SimTrace> {
    let params = cfg.validate(c)?;
    let nu = cfg.nu;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ctl = Controller::new(
        cfg.defender_policy.clone(),
        cfg.intruder_policy.clone(),
        nu,
        2.0 * params.dt,
        cfg.reassign_period,
        cfg.defenders.len(),
        cfg.intruders.len(),
    );
    let mut state = SimState::new(
        cfg.defenders.iter().map(|&s| c.wrap(s)).collect(),
        cfg.intruders.clone(),
    );
    let bound = ctl.bound(c, &state)?;
    let mut records = Vec::new();
    let mut events = Vec::new();
    let n_steps = (params.t_max / params.dt - 1e-9).ceil().max(0.0) as usize;
    let mut step_index = 0;
    while step_index < n_steps && !state.all_resolved() {
        if let Some(Assignment { edges, secondary }) = ctl.reassign(c, &state, step_index)? {
            events.push(Event::Reassign {
                t: state.t,
                edges,
                secondary,
            });
        }
        let d_out = ctl.defenders(c, &state, step_index, &mut rng)?;
        let headings = ctl.intruders(c, &state, step_index, &mut rng)?;
        if cfg.record_period > 0 && step_index % cfg.record_period == 0 {
            records.push(StepRecord {
                t: state.t,
                defenders: state.defenders.clone(),
                intruders: state
                    .intruders
                    .iter()
                    .zip(&state.status)
                    .map(|(&x, s)| s.is_alive().then_some(x))
                    .collect(),
                omegas: d_out.omegas.clone(),
                headings: headings.clone(),
                values: d_out.values.clone(),
            });
        }
        let mut next = step(c, &state, &d_out.omegas, &headings, nu, params.dt)?;
        let new_events = adjudicate(c, &state, &next, &d_out.solo_engaged, nu, params.capture_eps)?;
        apply(&mut next, &new_events);
        events.extend(new_events);
        state = next;
        step_index += 1;
    }
    let q = state.status.iter().filter(|&&s| s == IntruderStatus::Breached).count();
    Ok(SimTrace {
        params,
        bound,
        records,
        events,
        outcome: Outcome {
            q,
            status: state.status,
            t_final: state.t,
        },
    })
}
