use shocklab::determinator::{DeterminatorConfig, Verdict};
use shocklab::field::FieldExpr;
use shocklab::tracker::{find_perestroikas, ScanConfig};

#[test]
fn tilted_double_well_single_birth() {
    // One concave region -> exactly one A3^- birth at (x*, t*) = (-0.05, 1/4):
    // the kernel point is a* = 0 where phi''' = 0, t* = -1/phi''(0), and
    // x* = a* + t* phi'(a*).
    let f = FieldExpr::parse("(a1^2 - 1)^2 - 0.2*a1", 1).unwrap();
    let mut cfg = ScanConfig::new_1d(0.05, 1.2);
    cfg.window_lo = vec![-2.5];
    cfg.window_hi = vec![2.5];
    cfg.time_steps = 46;
    let det = DeterminatorConfig::default();
    let events = find_perestroikas(&f, &cfg, &det).unwrap();
    for e in &events {
        eprintln!("event t* = {:.9}, x* = {:.9}, {:?}", e.t_star, e.x_star[0], e.classification.verdict);
    }
    assert_eq!(events.len(), 1);
    let e = &events[0];
    assert!((e.t_star - 0.25).abs() < 1e-6, "t* = {}", e.t_star);
    assert!((e.x_star[0] + 0.05).abs() < 1e-6, "x* = {:?}", e.x_star);
    match &e.classification.verdict {
        Verdict::Perestroika { rendered, .. } => assert_eq!(rendered, "A3^-"),
        other => panic!("expected A3^-, got {other:?}"),
    }
}

#[test]
fn three_well_merge() {
    // Three wells: two shock births, then the two shock points stick in an
    // A1^{+--} merge.
    let f = FieldExpr::parse(
        "-1.0*gauss((-1.2),0.5) - 0.9*gauss((0),0.6) - 1.1*gauss((1.2),0.55) - 0.03*a1",
        1,
    )
    .unwrap();
    let mut cfg = ScanConfig::new_1d(0.1, 5.0);
    cfg.window_lo = vec![-3.0];
    cfg.window_hi = vec![3.0];
    cfg.time_steps = 70;
    let det = DeterminatorConfig::default();
    let events = find_perestroikas(&f, &cfg, &det).unwrap();
    for e in &events {
        let verdict = match &e.classification.verdict {
            Verdict::Perestroika { rendered, .. } => rendered.clone(),
            other => format!("{other:?}"),
        };
        eprintln!(
            "event t* = {:.8}, x* = {:.8}, {}  restriction: {}",
            e.t_star, e.x_star[0], verdict, e.restriction.verdict
        );
    }
    let merges: Vec<_> = events
        .iter()
        .filter(|e| matches!(&e.classification.verdict, Verdict::Perestroika { rendered, .. } if rendered == "A1^{+--}"))
        .collect();
    assert_eq!(merges.len(), 1, "expected exactly one A1^{{+--}} merge");
    assert_eq!(merges[0].restriction.verdict, "contractible");
}
