use shocklab::determinator::{DeterminatorConfig, Verdict};
use shocklab::field::FieldExpr;
use shocklab::tracker::{find_perestroikas, instant_shock, ScanConfig};
use std::time::Instant;

fn cfg2(t_min: f64, t_max: f64) -> ScanConfig {
    ScanConfig {
        window_lo: vec![-3.0, -3.0],
        window_hi: vec![3.0, 3.0],
        resolution: 61,
        t_min,
        t_max,
        time_steps: 16,
        seed_grid: 10,
        time_tol: 1e-5,
        ..ScanConfig::new_1d(t_min, t_max)
    }
}

#[test]
fn shock_2d_timing() {
    let f = FieldExpr::parse("-1.0*gauss((-0.8,0),0.7) - 1.2*gauss((0.9,0.1),0.8)", 2).unwrap();
    let cfg = cfg2(0.2, 1.0);
    let t0 = Instant::now();
    let g = instant_shock(&f, 2.0, &cfg).unwrap();
    eprintln!("slice took {:?}; {} vertices, {} edges, inv {:?}", t0.elapsed(), g.vertices.len(), g.edges.len(), g.invariants());
}

#[test]
fn events_2d_two_wells() {
    let f = FieldExpr::parse("-1.0*gauss((-0.8,0),0.7) - 1.2*gauss((0.9,0.1),0.8)", 2).unwrap();
    let cfg = cfg2(0.2, 1.0);
    let t0 = Instant::now();
    let events = match find_perestroikas(&f, &cfg, &DeterminatorConfig::default()) { Ok(e) => e, Err(e) => { eprintln!("EVENTS ERROR: {e}"); return; } };
    eprintln!("events took {:?}", t0.elapsed());
    for e in &events {
        let v = match &e.classification.verdict {
            Verdict::Perestroika { rendered, .. } => rendered.clone(),
            other => format!("{other:?}"),
        };
        eprintln!("  t*={:.6} x*={:?} {} after: {}", e.t_star, e.x_star, v, e.restriction.verdict);
    }
}

#[test]
fn shock_2d_geometry_dump() {
    let f = FieldExpr::parse("-1.0*gauss((-0.8,0),0.7) - 1.2*gauss((0.9,0.1),0.8)", 2).unwrap();
    let cfg = cfg2(0.2, 1.0);
    let g = instant_shock(&f, 2.0, &cfg).unwrap();
    let mut degree = vec![0usize; g.vertices.len()];
    for e in &g.edges {
        degree[e[0]] += 1;
        degree[e[1]] += 1;
    }
    for (i, v) in g.vertices.iter().enumerate() {
        if degree[i] != 2 {
            eprintln!("v{} deg {} kind {:?} at ({:+.3}, {:+.3})", i, degree[i], g.vertex_kinds[i], v[0], v[1]);
        }
    }
}
