use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use perimeter_defense::barrier::barrier_sample;
use perimeter_defense::duo::{defender_control_2v1, duo_region_report, evaluate_duo, intruder_control_2v1};
use perimeter_defense::export::{barrier_svg, duo_level_grid, frame_svg, solo_level_grid, write_polyline_csv};
use perimeter_defense::montecarlo::run_montecarlo;
use perimeter_defense::oracle::{circle_value, dominance_test, CircleGameState, MinimaxOracle};
use perimeter_defense::sim::{run_on, Event};
use perimeter_defense::solo::{evaluate_solo, solo_controls};
use perimeter_defense::team::{lgr_bounds, lgr_defense_assignment, mis_assignment, mm_assignment, Assignment};
use perimeter_defense::{PerimeterCurve, PerimeterSpec, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::scenario::{OracleParams, ScenarioFile};
use crate::Common;

const SVG_WIDTH: f64 = 640.0;
const MAX_FRAMES: usize = 200;
const DEFAULT_BARRIER_SAMPLES: usize = 1024;

/// Loads the scenario, applies flag overrides and validates it.
fn load(a: &Common) -> Result<(ScenarioFile, PerimeterCurve)> {
    let mut s = ScenarioFile::load(&a.scenario)?;
    if let Some(seed) = a.seed {
        s.sim.seed = seed;
    }
    if a.dt.is_some() {
        s.sim.dt = a.dt;
    }
    if a.tmax.is_some() {
        s.sim.t_max = a.tmax;
    }
    if a.eps.is_some() {
        s.sim.capture_eps = a.eps;
    }
    if a.out.is_some() {
        s.output.dir = a.out.clone();
    }
    s.output.svg |= a.svg;
    if a.grid.is_some() {
        s.output.grid = a.grid;
    }
    let c = s.validate()?;
    Ok((s, c))
}

fn need(s: &ScenarioFile, defenders: usize, intruders: usize) -> Result<()> {
    if s.defenders.len() < defenders {
        bail!("defenders: need at least {defenders}, got {}", s.defenders.len());
    }
    if s.intruders.len() < intruders {
        bail!("intruders: need at least {intruders}, got {}", s.intruders.len());
    }
    Ok(())
}

fn out_dir(s: &ScenarioFile) -> Result<Option<&Path>> {
    match &s.output.dir {
        Some(d) => {
            fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
            Ok(Some(d.as_path()))
        }
        None => Ok(None),
    }
}

fn create(path: PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_text(path: PathBuf, text: &str) -> Result<()> {
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn level_set_pad(c: &PerimeterCurve) -> f64 {
    let (lo, hi) = c.bounds();
    0.5 * (hi - lo).norm()
}

pub fn solve1v1(a: &Common) -> Result<Value> {
    let (s, c) = load(a)?;
    need(&s, 1, 1)?;
    let mut engagements = Vec::new();
    for (d, &s_d) in s.defenders.iter().enumerate() {
        for (k, &x) in s.intruders.iter().enumerate() {
            let e = evaluate_solo(&c, s_d, x, s.nu)?;
            let u = solo_controls(&c, s_d, x, s.nu)?;
            engagements.push(json!({
                "defender": d,
                "intruder": k,
                "value": e.value,
                "region": e.region,
                "omega": u.omega_d,
                "heading": u.u_a,
                "s_l": e.s_l,
                "s_r": e.s_r,
                "j_l": e.j_l,
                "j_r": e.j_r,
                "s_tan_l": e.fan.s_tan_l,
                "s_tan_r": e.fan.s_tan_r,
                "dominated": dominance_test(&c, s_d, x, s.nu, 512)?,
            }));
        }
    }
    let mut files = Vec::new();
    if let Some(dir) = out_dir(&s)? {
        for (d, &s_d) in s.defenders.iter().enumerate() {
            if let Some(n) = s.output.grid {
                let p = dir.join(format!("levelset_1v1_d{d}.csv"));
                solo_level_grid(&c, s_d, s.nu, n, level_set_pad(&c)).write_csv(create(p.clone())?)?;
                files.push(p);
            }
            if s.output.svg {
                let b = barrier_sample(&c, s_d, s.nu, DEFAULT_BARRIER_SAMPLES)?;
                let p = dir.join(format!("barrier_d{d}.svg"));
                write_text(p.clone(), &barrier_svg(&c, s_d, &b, SVG_WIDTH))?;
                files.push(p);
            }
        }
    }
    Ok(json!({ "length": c.total_length(), "engagements": engagements, "files": files }))
}

pub fn solve2v1(a: &Common) -> Result<Value> {
    let (s, c) = load(a)?;
    need(&s, 2, 1)?;
    let (s1, s2) = (s.defenders[0], s.defenders[1]);
    let mut engagements = Vec::new();
    for (k, &x) in s.intruders.iter().enumerate() {
        let e = evaluate_duo(&c, s1, s2, x, s.nu)?;
        engagements.push(json!({
            "intruder": k,
            "evaluation": e,
            "regions": duo_region_report(&c, s1, s2, x, s.nu)?,
            "omegas": defender_control_2v1(&c, s1, s2, x, s.nu)?,
            "heading": intruder_control_2v1(&c, s1, s2, x, s.nu)?,
        }));
    }
    let mut files = Vec::new();
    if let (Some(dir), Some(n)) = (out_dir(&s)?, s.output.grid) {
        let p = dir.join("levelset_2v1.csv");
        duo_level_grid(&c, s1, s2, s.nu, n, level_set_pad(&c)).write_csv(create(p.clone())?)?;
        files.push(p);
    }
    Ok(json!({ "length": c.total_length(), "engagements": engagements, "files": files }))
}

pub fn bounds(a: &Common) -> Result<Value> {
    let (s, c) = load(a)?;
    let b = lgr_bounds(&c, &s.defenders, &s.intruders, s.nu)?;
    let (mm, _) = mm_assignment(&c, &s.defenders, &s.intruders, s.nu)?;
    let (mis, _) = mis_assignment(&c, &s.defenders, &s.intruders, s.nu)?;
    let lgr = lgr_defense_assignment(&c, &s.defenders, &s.intruders, s.nu)?;
    Ok(json!({
        "q_mm": b.q_mm,
        "q_mis": b.q_mis,
        "q_lg": b.q_lg,
        "regions": b.regions,
        "selected_regions": b.selected,
        "assignments": { "mm": mm, "mis": mis, "lgr": lgr },
    }))
}

/// Assignment in force at time `t`, from the reassignment events.
fn assignment_at(events: &[Event], t: f64) -> Assignment {
    events
        .iter()
        .filter_map(|e| match e {
            Event::Reassign { t: te, edges, secondary } if *te <= t => Some(Assignment {
                edges: edges.clone(),
                secondary: secondary.clone(),
            }),
            _ => None,
        })
        .next_back()
        .unwrap_or_default()
}

pub fn simulate(a: &Common) -> Result<Value> {
    let (s, c) = load(a)?;
    need(&s, 0, 1)?;
    let cfg = s.sim_config();
    let tr = run_on(&c, &cfg)?;
    let mut files = Vec::new();
    if let Some(dir) = out_dir(&s)? {
        let p = dir.join("trace.jsonl");
        tr.write_jsonl(create(p.clone())?)?;
        files.push(p);
        let p = dir.join("summary.json");
        write_text(p.clone(), &serde_json::to_string_pretty(&tr.summary())?)?;
        files.push(p);
        if s.output.svg && !tr.records.is_empty() {
            let frames = dir.join("frames");
            fs::create_dir_all(&frames)?;
            let stride = tr.records.len().div_ceil(MAX_FRAMES);
            let mut picks: Vec<usize> = (0..tr.records.len()).step_by(stride).collect();
            if picks.last() != Some(&(tr.records.len() - 1)) {
                picks.push(tr.records.len() - 1);
            }
            for (n, &i) in picks.iter().enumerate() {
                let rec = &tr.records[i];
                let svg = frame_svg(&c, s.nu, rec, &assignment_at(&tr.events, rec.t), SVG_WIDTH);
                write_text(frames.join(format!("frame_{n:05}.svg")), &svg)?;
            }
            files.push(frames);
        }
    }
    let mut summary = tr.summary();
    summary["files"] = json!(files);
    Ok(summary)
}

pub fn montecarlo(a: &Common) -> Result<Value> {
    let (s, _) = load(a)?;
    let spec = s.montecarlo_spec();
    let t0 = Instant::now();
    let rep = run_montecarlo(&spec)?;
    let mut per_policy = Vec::new();
    for p in &spec.policies {
        let runs: Vec<_> = rep
            .instances
            .iter()
            .flat_map(|r| r.runs.iter().filter(|run| &run.policy == p))
            .collect();
        let violations = runs.iter().filter(|r| r.q > r.bound).count();
        let mean_q = runs.iter().map(|r| r.q as f64).sum::<f64>() / runs.len().max(1) as f64;
        let mean_bound = runs.iter().map(|r| r.bound as f64).sum::<f64>() / runs.len().max(1) as f64;
        per_policy.push(json!({
            "policy": p,
            "runs": runs.len(),
            "violations": violations,
            "mean_q": mean_q,
            "mean_bound": mean_bound,
        }));
    }
    let mut files = Vec::new();
    if let Some(dir) = out_dir(&s)? {
        let p = dir.join("montecarlo.json");
        write_text(p.clone(), &serde_json::to_string_pretty(&rep)?)?;
        files.push(p);
    }
    Ok(json!({
        "instances": rep.instances.len(),
        "chain_violations": rep.chain_violations,
        "soundness_violations": rep.soundness_violations,
        "mis_gaps": rep.mis_gaps,
        "policies": per_policy,
        "seconds": t0.elapsed().as_secs_f64(),
        "files": files,
    }))
}

fn random_exterior(c: &PerimeterCurve, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec2 {
    let l = c.total_length();
    loop {
        let s = rng.gen_range(0.0..l);
        let (tm, tp) = c.tangent_at(s);
        let t = (tm + tp).normalized();
        let x = c.point_at(s) + Vec2::new(t.y, -t.x) * (rng.gen_range(lo..hi) * l);
        if c.is_exterior(x) {
            return x;
        }
    }
}

pub fn oracle(a: &Common) -> Result<Value> {
    let (s, c) = load(a)?;
    let p = s.oracle.clone().unwrap_or_default();
    let OracleParams { samples, minimax } = p;
    let l = c.total_length();
    let nu = s.nu;
    let mut rng = ChaCha8Rng::seed_from_u64(s.sim.seed);
    let mut report = json!({});

    if let PerimeterSpec::Circle { radius, .. } = s.perimeter {
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let s_d = rng.gen_range(0.0..l);
            let x = random_exterior(&c, &mut rng, 1e-3, 0.5);
            let g = CircleGameState::from_planar(radius, s_d, x, nu);
            let v = evaluate_solo(&c, s_d, x, nu)?.value;
            worst = worst.max((v - circle_value(radius, g.r, g.theta, nu)).abs());
        }
        report["circle"] = json!({ "samples": samples, "max_abs_error": worst });
    }

    let (mut certified, mut violations) = (0, 0);
    for _ in 0..samples {
        let s_d = rng.gen_range(0.0..l);
        let x = random_exterior(&c, &mut rng, 1e-3, 0.5);
        if dominance_test(&c, s_d, x, nu, 512)? {
            certified += 1;
            if evaluate_solo(&c, s_d, x, nu)?.value <= 0.0 {
                violations += 1;
            }
        }
    }
    report["dominance"] = json!({ "samples": samples, "certified": certified, "violations": violations });

    let t0 = Instant::now();
    let cfg = minimax.unwrap_or_default();
    let solver = MinimaxOracle::solve(&c, nu, cfg)?;
    let (mut n, mut agree, mut attempts) = (0usize, 0usize, 0usize);
    while n < samples && attempts < 200 * samples.max(1) {
        attempts += 1;
        let s_d = rng.gen_range(0.0..l);
        let x = random_exterior(&c, &mut rng, 5e-3, 0.15);
        if !solver.covers(x) {
            continue;
        }
        let v = evaluate_solo(&c, s_d, x, nu)?.value;
        if v.abs() <= 0.05 * l {
            continue;
        }
        n += 1;
        agree += usize::from((solver.estimate(s_d, x)?.sign > 0) == (v > 0.0));
    }
    report["minimax"] = json!({
        "config": cfg,
        "states": n,
        "agree": agree,
        "agreement": agree as f64 / n.max(1) as f64,
        "truncated": solver.truncated(),
        "seconds": t0.elapsed().as_secs_f64(),
    });
    Ok(report)
}

pub fn barrier(a: &Common) -> Result<Value> {
    let (s, c) = load(a)?;
    need(&s, 1, 0)?;
    let n = s.output.grid.unwrap_or(DEFAULT_BARRIER_SAMPLES);
    let dir = out_dir(&s)?;
    let mut out = Vec::new();
    let mut files = Vec::new();
    for (d, &s_d) in s.defenders.iter().enumerate() {
        let b = barrier_sample(&c, s_d, s.nu, n)?;
        match dir {
            Some(dir) => {
                let p = dir.join(format!("barrier_d{d}.csv"));
                write_polyline_csv(create(p.clone())?, &b.polyline())?;
                files.push(p);
                if s.output.svg {
                    let p = dir.join(format!("barrier_d{d}.svg"));
                    write_text(p.clone(), &barrier_svg(&c, s_d, &b, SVG_WIDTH))?;
                    files.push(p);
                }
                out.push(json!({ "defender": d, "left": b.left.len(), "right": b.right.len() }));
            }
            None => out.push(json!({ "defender": d, "left": b.left, "right": b.right })),
        }
    }
    Ok(json!({ "barriers": out, "files": files }))
}
