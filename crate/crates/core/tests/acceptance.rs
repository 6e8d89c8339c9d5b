use adhm_core::acceptance;

#[test]
fn acceptance_suite() {
    let report = acceptance::run(0);
    print!("{}", report.render());
    let failed: Vec<u8> = report.outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert_eq!(report.outcomes.len(), 9);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
