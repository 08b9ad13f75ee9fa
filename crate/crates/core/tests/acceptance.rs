use vortexwave::verify::run_criterion;

#[test]
fn acceptance_criteria() {
    let results: Vec<_> = (1..=13).map(run_criterion).collect();
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("{} of {} criteria passed", results.len() - failed.len(), results.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
