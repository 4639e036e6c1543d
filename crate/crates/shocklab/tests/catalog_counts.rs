use shocklab::catalog::{derive_allowed_map, Allowed, CatalogConfig};

#[test]
fn d2_allowed_count() {
    let map = derive_allowed_map(2, &CatalogConfig::default());
    let allowed: Vec<&str> = map
        .iter()
        .filter(|e| e.allowed == Allowed::Allowed)
        .map(|e| e.rendered.as_str())
        .collect();
    eprintln!("d=2 allowed ({}):", allowed.len());
    for e in &map {
        eprintln!("  {:?}  {}  before={:?} after={:?}", e.allowed, e.rendered, e.before_invariants, e.after_invariants);
    }
    assert_eq!(allowed.len(), 9);
}

#[test]
fn d3_allowed_count() {
    let mut cfg = CatalogConfig::default();
    cfg.resolution_3d = 48;
    let map = derive_allowed_map(3, &cfg);
    let allowed: Vec<&str> = map
        .iter()
        .filter(|e| e.allowed == Allowed::Allowed)
        .map(|e| e.rendered.as_str())
        .collect();
    eprintln!("d=3 allowed ({}):", allowed.len());
    for e in &map {
        eprintln!("  {:?}  {}  after={:?}", e.allowed, e.rendered, e.after_invariants);
    }
    assert_eq!(allowed.len(), 26);
}
