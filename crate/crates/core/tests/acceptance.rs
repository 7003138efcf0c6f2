use geoflow_core::acceptance::{run_acceptance, CRITERIA};

#[test]
fn acceptance_battery() {
    let report = run_acceptance(42);
    assert_eq!(report.criteria.len(), CRITERIA.len());
    for c in &report.criteria {
        println!("{}", c.summary_line());
    }
    let failed: Vec<String> = report
        .criteria
        .iter()
        .flat_map(|c| c.checks.iter().filter(|k| !k.pass).map(move |k| format!("{}. {}: {k:?}", c.id, k.label)))
        .collect();
    for f in &failed {
        println!("  failing check: {f}");
    }
    assert!(report.pass, "{} failing checks", failed.len());
}
