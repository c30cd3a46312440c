use gwzw_core::verify::{negative_control, verify_all, VerifyConfig};

#[test]
fn every_check_passes_for_n_up_to_two() {
    let cfg = VerifyConfig::default();
    let outcomes = verify_all(&cfg).unwrap();
    assert!(outcomes.iter().any(|c| c.n == 2));
    let failed: Vec<_> = outcomes.iter().filter(|c| !c.passed).collect();
    assert!(failed.is_empty(), "{failed:#?}");
}

#[test]
fn corrupted_identity_yields_witness() {
    let c = negative_control(&VerifyConfig::default()).unwrap();
    assert!(c.passed);
    assert!(c.detail.contains("witness seed"), "{}", c.detail);
}
