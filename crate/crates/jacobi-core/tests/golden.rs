use jacobi_core::golden;

#[test]
fn generated_systems_match_reference_data() {
    let checks = golden::check_all().unwrap();
    let failures: Vec<String> = checks.iter().filter(|c| !c.passed()).map(|c| c.to_string()).collect();
    assert!(checks.len() > 100, "only {} checks ran", checks.len());
    assert!(failures.is_empty(), "{} mismatches:\n{}", failures.len(), failures.join("\n"));
}
