use symext::acceptance::{run_all, DEFAULT_SEED};

fn main() {
    let results = run_all(DEFAULT_SEED);
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        println!("acceptance: PASS ({} criteria)", results.len());
    } else {
        println!("acceptance: FAIL, criteria {failed:?}");
        std::process::exit(1);
    }
}
