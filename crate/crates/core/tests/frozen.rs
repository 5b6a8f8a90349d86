//! Frozen reference values and end-to-end determinism.

mod common;

use perimeter_defense::barrier::barrier_sample;
use perimeter_defense::duo::{evaluate_duo, DuoRegion};
use perimeter_defense::export::{solo_level_grid, write_polyline_csv};
use perimeter_defense::montecarlo::{run_montecarlo, MonteCarloSpec};
use perimeter_defense::oracle::circle_value;
use perimeter_defense::sim::{run, DefenderPolicy, IntruderPolicy, SimConfig};
use perimeter_defense::solo::{evaluate_solo, solo_controls, Region};
use perimeter_defense::team::lgr_bounds;
use perimeter_defense::{PerimeterSpec, Vec2};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn square_reference_state() {
    let c = PerimeterSpec::square().build().unwrap();
    let e = evaluate_solo(&c, 0.5, Vec2::new(2.0, 0.5), 0.3).unwrap();
    assert!(close(e.value, -2.179797, 1e-6), "{}", e.value);
    assert!(close(e.s_l, 1.8144855, 1e-6) && close(e.s_r, 1.1855145, 1e-6));
    assert_eq!(e.region, Region::Left);
    let u = solo_controls(&c, 0.5, Vec2::new(2.0, 0.5), 0.3).unwrap();
    assert_eq!(u.omega_d, 1.0);
    assert!(close(u.u_a.norm(), 0.3, 1e-12));
}

#[test]
fn circle_reference_state() {
    let c = PerimeterSpec::circle(1.0).build().unwrap();
    let v = evaluate_solo(&c, 0.0, Vec2::new(0.0, 2.0), 0.5).unwrap().value;
    assert!(close(v, -0.29922, 1e-5), "{v}");
    assert!(close(v, circle_value(1.0, 1.0, std::f64::consts::FRAC_PI_2, 0.5), 1e-5));
}

#[test]
fn opposed_pair_on_the_circle() {
    let c = PerimeterSpec::circle(1.0).build().unwrap();
    let e = evaluate_duo(&c, 0.0, std::f64::consts::PI, Vec2::new(0.0, 1.5), 0.5).unwrap();
    assert_eq!(e.region, DuoRegion::RMid);
    assert!(close(e.value, 0.5 * std::f64::consts::PI - 1.0, 1e-4), "{}", e.value);
    assert!(close(e.c_radius, 0.25 * std::f64::consts::PI, 1e-4));
}

#[test]
fn reference_team_scores() {
    let c = PerimeterSpec::circle(1.0).build().unwrap();
    let b = lgr_bounds(&c, &[0.0, 2.1, 4.2], &[Vec2::new(1.3, 0.9), Vec2::new(-1.5, 0.6), Vec2::new(0.2, -1.6)], 0.5)
        .unwrap();
    assert!(b.q_lg <= b.q_mis && b.q_mis <= b.q_mm);
    assert_eq!(b.q_mis, 0);
}

#[test]
fn simulations_repeat_exactly() {
    let mut cfg = SimConfig::new(
        PerimeterSpec::circle(1.0),
        0.5,
        vec![0.0, 3.0],
        vec![Vec2::new(1.6, 0.4), Vec2::new(-1.2, -1.1)],
        DefenderPolicy::RandomTurn { period: 20 },
        IntruderPolicy::RandomHeading { period: 30 },
    );
    cfg.seed = 17;
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a, b);
    cfg.seed = 18;
    assert_ne!(run(&cfg).unwrap().records, a.records);

    let mut spec = MonteCarloSpec::new(PerimeterSpec::circle(1.0), 0.5, 8);
    spec.policies = vec![DefenderPolicy::Mis];
    let (x, y) = (run_montecarlo(&spec).unwrap(), run_montecarlo(&spec).unwrap());
    assert_eq!(x.chain_violations, 0);
    assert_eq!(
        x.instances.iter().map(|i| i.runs[0].q).collect::<Vec<_>>(),
        y.instances.iter().map(|i| i.runs[0].q).collect::<Vec<_>>()
    );
}

#[test]
fn exports_are_consistent() {
    let c = PerimeterSpec::square().build().unwrap();
    let grid = solo_level_grid(&c, 0.5, 0.3, 40, 1.0);
    let mut csv = Vec::new();
    grid.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let rows = grid.values.iter().filter(|v| v.is_some()).count();
    assert_eq!(text.lines().count(), rows + 1);
    // The zero contour runs along the barrier.
    let b = barrier_sample(&c, 0.5, 0.3, 512).unwrap();
    let cell = (grid.hi.x - grid.lo.x) / 39.0;
    let segs = grid.zero_contour();
    assert!(!segs.is_empty());
    for (p, q) in segs {
        assert!(b.distance(p.lerp(q, 0.5)) < 2.0 * cell);
    }
    let mut out = Vec::new();
    write_polyline_csv(&mut out, &b.polyline()).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), b.polyline().len() + 1);
}

#[test]
fn crossed_afferent_surfaces_keep_the_better_side() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10371832505410787572);
    let c = common::random_polygon(&mut rng);
    let l = c.total_length();
    let nu = 0.9961479594539356;
    let d: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..l)).collect();
    let x: Vec<Vec2> = (0..4).map(|_| common::random_exterior(&c, 0.01, 0.4, &mut rng)).collect();
    let e = evaluate_duo(&c, d[1], d[2], x[3], nu).unwrap();
    let solo = evaluate_solo(&c, d[2], x[3], nu).unwrap();
    assert_eq!(e.region, DuoRegion::RJ);
    assert!(close(e.value, solo.j_r, 1e-12) && e.value > 0.0);
    let b = lgr_bounds(&c, &d, &x, nu).unwrap();
    assert!(b.q_lg <= b.q_mis && b.q_mis <= b.q_mm, "{} {} {}", b.q_lg, b.q_mis, b.q_mm);
}
