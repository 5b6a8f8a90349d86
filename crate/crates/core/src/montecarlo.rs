//! Random team instances, bound checks and batch simulation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duo::evaluate_duo;
use crate::error::{check_nu, Error, Result};
use crate::geometry::PerimeterCurve;
use crate::shapes::PerimeterSpec;
use crate::sim::{run_on, DefenderPolicy, IntruderPolicy, SimConfig};
use crate::solo::evaluate_solo;
use crate::team::{lgr_bounds, ScoreBounds};
use crate::vec2::Vec2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub defenders: Vec<f64>,
    pub intruders: Vec<Vec2>,
}

/// Outward offset of the boundary point at `s`.
fn offset_point(c: &PerimeterCurve, s: f64, dist: f64) -> Vec2 {
    let (tm, tp) = c.tangent_at(s);
    let t = (tm + tp).normalized();
    c.point_at(s) + Vec2::new(t.y, -t.x) * dist
}

/// Smallest `|V|` over all one-on-one and pair engagements, relative to `L`.
pub fn instance_margin(c: &PerimeterCurve, inst: &Instance, nu: f64) -> Result<f64> {
    let mut m = f64::INFINITY;
    for &x in &inst.intruders {
        for (a, &s) in inst.defenders.iter().enumerate() {
            m = m.min(evaluate_solo(c, s, x, nu)?.value.abs());
            for &t in &inst.defenders[a + 1..] {
                if c.arc_distance(s, t) > c.eps() {
                    m = m.min(evaluate_duo(c, s, t, x, nu)?.value.abs());
                }
            }
        }
    }
    Ok(m / c.total_length())
}

/// Uniform defender arcs and intruders at a uniform offset in
/// `[dist.0, dist.1]` from a uniform boundary point. Instances with an
/// engagement value within `margin * L` of zero are redrawn.
pub fn random_instance(
    c: &PerimeterCurve,
    n_d: usize,
    n_a: usize,
    dist: (f64, f64),
    nu: f64,
    margin: f64,
    rng: &mut impl Rng,
) -> Result<Instance> {
    let l = c.total_length();
    if !(dist.0 > 0.0 && dist.1 >= dist.0) {
        return Err(Error::config("distance", "need 0 < min <= max"));
    }
    loop {
        let inst = Instance {
            defenders: (0..n_d).map(|_| rng.gen_range(0.0..l)).collect(),
            intruders: (0..n_a)
                .map(|_| offset_point(c, rng.gen_range(0.0..l), rng.gen_range(dist.0..=dist.1)))
                .collect(),
        };
        if !inst.intruders.iter().all(|&x| c.is_exterior(x)) {
            continue;
        }
        if margin <= 0.0 || instance_margin(c, &inst, nu)? > margin {
            return Ok(inst);
        }
    }
}

fn default_policies() -> Vec<DefenderPolicy> {
    vec![DefenderPolicy::Mm, DefenderPolicy::Mis, DefenderPolicy::Lgr]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSpec {
    pub perimeter: PerimeterSpec,
    pub nu: f64,
    pub instances: usize,
    /// Inclusive team size ranges.
    pub defenders: (usize, usize),
    pub intruders: (usize, usize),
    /// Intruder offset range from the boundary, as fractions of `L`.
    pub distance: (f64, f64),
    /// Minimum `|V|` of every engagement, as a fraction of `L`.
    #[serde(default)]
    pub margin: f64,
    /// Defender policies simulated against the greedy intruder team; empty
    /// to check bounds only.
    #[serde(default = "default_policies")]
    pub policies: Vec<DefenderPolicy>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl MonteCarloSpec {
    pub fn new(perimeter: PerimeterSpec, nu: f64, instances: usize) -> Self {
        MonteCarloSpec {
            perimeter,
            nu,
            instances,
            defenders: (1, 5),
            intruders: (1, 5),
            distance: (0.02, 0.25),
            margin: 1e-3,
            policies: default_policies(),
            dt: None,
            t_max: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyRun {
    pub policy: DefenderPolicy,
    pub bound: usize,
    pub q: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceReport {
    pub index: usize,
    pub instance: Instance,
    pub q_mm: usize,
    pub q_mis: usize,
    pub q_lg: usize,
    pub runs: Vec<PolicyRun>,
}

impl InstanceReport {
    pub fn chain_holds(&self) -> bool {
        self.q_lg <= self.q_mis && self.q_mis <= self.q_mm
    }

    pub fn sound(&self) -> bool {
        self.runs.iter().all(|r| r.q <= r.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub instances: Vec<InstanceReport>,
    pub chain_violations: usize,
    pub soundness_violations: usize,
    /// Instances with `Q_MIS < Q_MM`.
    pub mis_gaps: usize,
}

/// Draws one instance per index from a per-index seed so that results do
/// not depend on scheduling.
pub fn instance_for(c: &PerimeterCurve, spec: &MonteCarloSpec, index: usize) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let n_d = rng.gen_range(spec.defenders.0..=spec.defenders.1);
    let n_a = rng.gen_range(spec.intruders.0..=spec.intruders.1);
    let l = c.total_length();
    random_instance(
        c,
        n_d,
        n_a,
        (spec.distance.0 * l, spec.distance.1 * l),
        spec.nu,
        spec.margin,
        &mut rng,
    )
}

fn check_spec(spec: &MonteCarloSpec) -> Result<()> {
    check_nu(spec.nu)?;
    if spec.defenders.0 > spec.defenders.1 || spec.intruders.0 > spec.intruders.1 {
        return Err(Error::config("montecarlo", "team size ranges must be ordered"));
    }
    Ok(())
}

/// Bounds and, for each requested policy, a simulation against the greedy
/// intruder team.
pub fn evaluate_instance(
    c: &PerimeterCurve,
    spec: &MonteCarloSpec,
    index: usize,
    inst: Instance,
) -> Result<InstanceReport> {
    let ScoreBounds { q_mm, q_mis, q_lg, .. } = lgr_bounds(c, &inst.defenders, &inst.intruders, spec.nu)?;
    let mut runs = Vec::new();
    for policy in &spec.policies {
        let mut cfg = SimConfig::new(
            spec.perimeter.clone(),
            spec.nu,
            inst.defenders.clone(),
            inst.intruders.clone(),
            policy.clone(),
            IntruderPolicy::GreedyTeam,
        );
        cfg.dt = spec.dt;
        cfg.t_max = spec.t_max;
        cfg.record_period = 0;
        cfg.seed = spec.seed.wrapping_add(index as u64);
        let tr = run_on(c, &cfg)?;
        let bound = match policy {
            DefenderPolicy::Mm => q_mm,
            DefenderPolicy::Mis => q_mis,
            DefenderPolicy::Lgr => q_lg,
            _ => tr.bound.unwrap_or(inst.intruders.len()),
        };
        runs.push(PolicyRun {
            policy: policy.clone(),
            bound,
            q: tr.outcome.q,
        });
    }
    Ok(InstanceReport {
        index,
        instance: inst,
        q_mm,
        q_mis,
        q_lg,
        runs,
    })
}

pub fn run_montecarlo(spec: &MonteCarloSpec) -> Result<MonteCarloReport> {
    check_spec(spec)?;
    let c = spec.perimeter.build()?;
    let instances = (0..spec.instances)
        .into_par_iter()
        .map(|i| evaluate_instance(&c, spec, i, instance_for(&c, spec, i)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonteCarloReport {
        chain_violations: instances.iter().filter(|r| !r.chain_holds()).count(),
        soundness_violations: instances.iter().filter(|r| !r.sound()).count(),
        mis_gaps: instances.iter().filter(|r| r.q_mis < r.q_mm).count(),
        instances,
    })
}

/// First instance, within `max_samples` draws, where pair defense tightens
/// the bound (`Q_MIS < Q_MM`).
pub fn find_mis_gap(
    c: &PerimeterCurve,
    spec: &MonteCarloSpec,
    max_samples: usize,
) -> Result<Option<(usize, Instance, ScoreBounds)>> {
    check_spec(spec)?;
    for i in 0..max_samples {
        let inst = instance_for(c, spec, i)?;
        let b = lgr_bounds(c, &inst.defenders, &inst.intruders, spec.nu)?;
        if b.q_mis < b.q_mm {
            return Ok(Some((i, inst, b)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_respect_offsets_and_margin() {
        let c = PerimeterSpec::square().build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let inst = random_instance(&c, 3, 4, (0.1, 0.5), 0.6, 1e-3, &mut rng).unwrap();
            assert_eq!((inst.defenders.len(), inst.intruders.len()), (3, 4));
            for &x in &inst.intruders {
                let d = c.signed_distance(x);
                assert!(d > 0.1 - 1e-9 && d < 0.5 + 1e-9, "{d}");
            }
            assert!(instance_margin(&c, &inst, 0.6).unwrap() > 1e-3);
        }
    }

    #[test]
    fn same_index_same_instance() {
        let spec = MonteCarloSpec::new(PerimeterSpec::square(), 0.5, 4);
        let c = spec.perimeter.build().unwrap();
        assert_eq!(instance_for(&c, &spec, 2).unwrap(), instance_for(&c, &spec, 2).unwrap());
        assert_ne!(instance_for(&c, &spec, 2).unwrap(), instance_for(&c, &spec, 3).unwrap());
    }

    #[test]
    fn bounds_only_batch() {
        let mut spec = MonteCarloSpec::new(PerimeterSpec::square(), 0.5, 10);
        spec.policies.clear();
        let r = run_montecarlo(&spec).unwrap();
        assert_eq!(r.instances.len(), 10);
        assert_eq!(r.chain_violations, 0);
    }
}
