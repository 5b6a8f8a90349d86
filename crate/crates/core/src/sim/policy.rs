//! Per-step control laws for both teams.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::duo::{evaluate_duo, intruder_control_2v1};
use crate::error::Result;
use crate::geometry::PerimeterCurve;
use crate::solo::{defender_control_hysteresis, evaluate_solo, heading_to};
use crate::team::{
    greedy_heading, greedy_pair, lgr_bounds, lgr_defense_assignment, mis_assignment, mm_assignment, Assignment,
    Engagement, GreedyChoice, Member,
};
use crate::team::secondary_matching;
use crate::vec2::Vec2;

use super::config::{DefenderPolicy, IntruderPolicy};
use super::SimState;

/// Value of one engagement at the current step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngagementValue {
    pub member: Member,
    pub intruder: usize,
    pub value: f64,
}

pub(crate) struct DefenderOutput {
    pub omegas: Vec<f64>,
    /// Intruder each defender is playing the one-on-one game against.
    pub solo_engaged: Vec<Option<usize>>,
    pub values: Vec<EngagementValue>,
}

pub(crate) struct Controller {
    pub defender_policy: DefenderPolicy,
    pub intruder_policy: IntruderPolicy,
    pub nu: f64,
    pub band: f64,
    pub reassign_period: usize,
    previous_omega: Vec<Option<f64>>,
    greedy: Vec<Option<GreedyChoice>>,
    random_omega: Vec<f64>,
    random_heading: Vec<Vec2>,
    pub assignment: Option<Assignment>,
    assigned_alive: Vec<bool>,
}

impl Controller {
    pub fn new(
        defender_policy: DefenderPolicy,
        intruder_policy: IntruderPolicy,
        nu: f64,
        band: f64,
        reassign_period: usize,
        n_d: usize,
        n_a: usize,
    ) -> Self {
        Controller {
            defender_policy,
            intruder_policy,
            nu,
            band,
            reassign_period,
            previous_omega: vec![None; n_d],
            greedy: vec![None; n_a],
            random_omega: vec![0.0; n_d],
            random_heading: vec![Vec2::ZERO; n_a],
            assignment: None,
            assigned_alive: Vec::new(),
        }
    }

    /// Score bound of the assignment policy for the given state.
    pub fn bound(&self, c: &PerimeterCurve, state: &SimState) -> Result<Option<usize>> {
        let (defenders, intruders) = (&state.defenders, &state.intruders);
        Ok(match self.defender_policy {
            DefenderPolicy::Mm => Some(mm_assignment(c, defenders, intruders, self.nu)?.1),
            DefenderPolicy::Mis => Some(mis_assignment(c, defenders, intruders, self.nu)?.1),
            DefenderPolicy::Lgr => Some(lgr_bounds(c, defenders, intruders, self.nu)?.q_lg),
            _ => None,
        })
    }

    /// Recomputes the assignment when it is due. Guaranteed engagements
    /// that are still winning are kept unless the fresh assignment
    /// guarantees more. Returns the new assignment when it changed.
    pub fn reassign(&mut self, c: &PerimeterCurve, state: &SimState, step: usize) -> Result<Option<Assignment>> {
        let kind = match self.defender_policy {
            DefenderPolicy::Mm | DefenderPolicy::Mis | DefenderPolicy::Lgr => self.defender_policy.clone(),
            _ => return Ok(None),
        };
        let alive: Vec<bool> = state.alive().collect();
        if self.assignment.is_some() && !step.is_multiple_of(self.reassign_period) && alive == self.assigned_alive {
            return Ok(None);
        }
        let live: Vec<usize> = (0..alive.len()).filter(|&k| alive[k]).collect();
        let points: Vec<Vec2> = live.iter().map(|&k| state.intruders[k]).collect();
        let nu = self.nu;
        let local = match kind {
            DefenderPolicy::Mm => mm_assignment(c, &state.defenders, &points, nu)?.0,
            DefenderPolicy::Mis => mis_assignment(c, &state.defenders, &points, nu)?.0,
            _ => lgr_defense_assignment(c, &state.defenders, &points, nu)?,
        };
        let remap = |e: &Engagement| Engagement {
            member: e.member,
            intruder: live[e.intruder],
        };
        let mut next = Assignment {
            edges: local.edges.iter().map(remap).collect(),
            secondary: local.secondary.iter().map(remap).collect(),
        };
        if let Some(old) = &self.assignment {
            let mut kept = Vec::new();
            for e in &old.edges {
                if alive[e.intruder] && self.still_winning(c, state, e)? {
                    kept.push(*e);
                }
            }
            if kept.len() >= next.edges.len() {
                let solo_value = state
                    .defenders
                    .iter()
                    .map(|&s| {
                        (0..alive.len())
                            .map(|k| {
                                if alive[k] {
                                    evaluate_solo(c, s, state.intruders[k], nu).map(|e| e.value)
                                } else {
                                    Ok(f64::INFINITY)
                                }
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let dead: Vec<usize> = (0..alive.len()).filter(|&k| !alive[k]).collect();
                next = Assignment {
                    secondary: secondary_matching(&solo_value, alive.len(), &kept, &dead),
                    edges: kept,
                };
            }
        }
        self.assigned_alive = alive;
        if self.assignment.as_ref() == Some(&next) {
            return Ok(None);
        }
        self.assignment = Some(next.clone());
        Ok(Some(next))
    }

    /// True while the engagement still wins, up to the switching band.
    fn still_winning(&self, c: &PerimeterCurve, state: &SimState, e: &Engagement) -> Result<bool> {
        let x = state.intruders[e.intruder];
        let solo = |d: usize| evaluate_solo(c, state.defenders[d], x, self.nu).map(|v| v.value);
        Ok(match e.member {
            Member::Solo(d) => solo(d)? <= self.band,
            Member::Pair(i, j) => {
                solo(i)? <= self.band
                    || solo(j)? <= self.band
                    || evaluate_duo(c, state.defenders[i], state.defenders[j], x, self.nu)?.value <= self.band
            }
        })
    }

    pub fn defenders(
        &mut self,
        c: &PerimeterCurve,
        state: &SimState,
        step: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<DefenderOutput> {
        let n_d = state.defenders.len();
        let mut out = DefenderOutput {
            omegas: vec![0.0; n_d],
            solo_engaged: vec![None; n_d],
            values: Vec::new(),
        };
        let live: Vec<usize> = state.alive().enumerate().filter(|&(_, a)| a).map(|(k, _)| k).collect();
        match &self.defender_policy {
            DefenderPolicy::SoloOptimal => {
                for d in 0..n_d {
                    let mut best: Option<(f64, usize)> = None;
                    for &k in &live {
                        let v = evaluate_solo(c, state.defenders[d], state.intruders[k], self.nu)?.value;
                        if best.is_none_or(|(b, _)| v < b) {
                            best = Some((v, k));
                        }
                    }
                    if let Some((_, k)) = best {
                        self.play_solo(c, state, d, k, &mut out)?;
                    }
                }
            }
            DefenderPolicy::PairPincer => {
                if let Some(&k) = live.first() {
                    self.play_pair(c, state, 0, 1, k, &mut out)?;
                }
            }
            DefenderPolicy::Mm | DefenderPolicy::Mis | DefenderPolicy::Lgr => {
                let a = self.assignment.clone().unwrap_or_default();
                for e in a.edges.iter().chain(&a.secondary) {
                    if !state.status[e.intruder].is_alive() {
                        continue;
                    }
                    match e.member {
                        Member::Solo(d) => self.play_solo(c, state, d, e.intruder, &mut out)?,
                        Member::Pair(i, j) => self.play_pair(c, state, i, j, e.intruder, &mut out)?,
                    }
                }
            }
            DefenderPolicy::Constant { omega } => out.omegas.fill(*omega),
            DefenderPolicy::Scripted { omegas } => {
                out.omegas.clone_from(&omegas[step.min(omegas.len() - 1)]);
            }
            DefenderPolicy::RandomTurn { period } => {
                if step.is_multiple_of(*period) {
                    for w in &mut self.random_omega {
                        *w = rng.gen_range(-1.0..=1.0);
                    }
                }
                out.omegas.clone_from(&self.random_omega);
            }
        }
        for (prev, &w) in self.previous_omega.iter_mut().zip(&out.omegas) {
            *prev = Some(w);
        }
        Ok(out)
    }

    fn play_solo(&self, c: &PerimeterCurve, state: &SimState, d: usize, k: usize, out: &mut DefenderOutput) -> Result<()> {
        let e = evaluate_solo(c, state.defenders[d], state.intruders[k], self.nu)?;
        out.omegas[d] = defender_control_hysteresis(&e, self.previous_omega[d], self.band);
        out.solo_engaged[d] = Some(k);
        out.values.push(EngagementValue {
            member: Member::Solo(d),
            intruder: k,
            value: e.value,
        });
        Ok(())
    }

    /// A member that wins alone plays its one-on-one strategy while the
    /// other holds; otherwise the pair closes in from both sides.
    fn play_pair(
        &self,
        c: &PerimeterCurve,
        state: &SimState,
        i: usize,
        j: usize,
        k: usize,
        out: &mut DefenderOutput,
    ) -> Result<()> {
        let x = state.intruders[k];
        for (a, b) in [(i, j), (j, i)] {
            let e = evaluate_solo(c, state.defenders[a], x, self.nu)?;
            if e.value <= 0.0 {
                out.omegas[a] = defender_control_hysteresis(&e, self.previous_omega[a], self.band);
                out.omegas[b] = 0.0;
                out.solo_engaged[a] = Some(k);
                out.values.push(EngagementValue {
                    member: Member::Solo(a),
                    intruder: k,
                    value: e.value,
                });
                return Ok(());
            }
        }
        let e = evaluate_duo(c, state.defenders[i], state.defenders[j], x, self.nu)?;
        let (cw, ccw) = if e.i_cw == 0 { (i, j) } else { (j, i) };
        out.omegas[cw] = 1.0;
        out.omegas[ccw] = -1.0;
        out.values.push(EngagementValue {
            member: Member::pair(i, j),
            intruder: k,
            value: e.value,
        });
        Ok(())
    }

    pub fn intruders(
        &mut self,
        c: &PerimeterCurve,
        state: &SimState,
        step: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Vec2>> {
        let nu = self.nu;
        let defenders = &state.defenders;
        let mut out = vec![Vec2::ZERO; state.intruders.len()];
        if let IntruderPolicy::RandomHeading { period } = self.intruder_policy {
            if step.is_multiple_of(period) {
                for h in &mut self.random_heading {
                    *h = Vec2::from_angle(rng.gen_range(0.0..std::f64::consts::TAU)) * nu;
                }
            }
        }
        for k in 0..out.len() {
            if !state.status[k].is_alive() {
                continue;
            }
            let x = state.intruders[k];
            out[k] = match &self.intruder_policy {
                IntruderPolicy::SoloOptimal { assumed_nu } => {
                    solo_heading(c, defenders, x, nu, assumed_nu.unwrap_or(nu))?
                }
                IntruderPolicy::TangentPoint => solo_heading(c, defenders, x, nu, 1.0)?,
                IntruderPolicy::ClosestPoint => heading_to(c, x, c.closest_arc(x)?, nu),
                IntruderPolicy::DuoOptimal => intruder_control_2v1(c, defenders[0], defenders[1], x, nu)?,
                IntruderPolicy::GreedyTeam => {
                    let choice = greedy_pair(c, defenders, x, nu, self.greedy[k])?;
                    self.greedy[k] = Some(choice);
                    greedy_heading(c, defenders, x, nu, choice)?
                }
                IntruderPolicy::RandomHeading { .. } => self.random_heading[k],
                IntruderPolicy::Scripted { headings } => {
                    let h = headings[step.min(headings.len() - 1)][k];
                    if h.norm() > 0.0 {
                        h.normalized() * nu
                    } else {
                        Vec2::ZERO
                    }
                }
            };
        }
        Ok(out)
    }
}

/// Heads for the breaching point against the defender with the smallest
/// value, computed with speed ratio `assumed`, at true speed `nu`.
fn solo_heading(c: &PerimeterCurve, defenders: &[f64], x: Vec2, nu: f64, assumed: f64) -> Result<Vec2> {
    let mut best: Option<(f64, f64)> = None;
    for &s in defenders {
        let e = evaluate_solo(c, s, x, assumed)?;
        if best.is_none_or(|(v, _)| e.value < v) {
            best = Some((e.value, e.target()));
        }
    }
    let target = match best {
        Some((_, s)) => s,
        None => c.closest_arc(x)?,
    };
    Ok(heading_to(c, x, target, nu))
}
