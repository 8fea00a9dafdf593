use ctxtt::harness::{self, Config};

#[test]
fn seed_zero_passes() {
    let report = harness::run(&Config::new(0, 100));
    for s in &report.suites {
        for f in s.failures.iter().take(3) {
            eprintln!("{}: case {} depth {}\n  {}\n  {}", s.name, f.case, f.depth, f.witness, f.message);
        }
    }
    assert_eq!(report.suites.len(), harness::SUITES.len());
    assert!(report.passed());
}

#[test]
fn skipping_eta_is_caught() {
    let mut cfg = Config::new(0, 100);
    cfg.skip_eta = true;
    let eta = harness::run_suite(&cfg, "eta").unwrap();
    assert!(!eta.failures.is_empty());
    let f = &eta.failures[0];
    assert!(f.depth <= harness::MAX_DEPTH);
    assert!(f.message.contains("eta"), "{}", f.message);
}

#[test]
fn zero_cases_give_an_empty_report() {
    let report = harness::run(&Config::new(0, 0));
    assert!(report.suites.is_empty());
    assert_eq!(serde_json::to_string(&report).unwrap(), r#"{"suites":[]}"#);
}
