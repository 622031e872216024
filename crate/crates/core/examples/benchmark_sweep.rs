//! A small benchmark sweep over bin counts, written as CSV to stdout.

use retrotomo::harness::{run_benchmark, write_csv, BenchmarkPlan};

const PLAN: &str = r#"
algorithm = "pgdb"
events = 4000
dist = "exp"
param = 0.39269908169872414
trials = 20
master_seed = 1
sweep_bins = [4, 16, "sparse"]
"#;

fn main() -> retrotomo::Result<()> {
    let plan = BenchmarkPlan::from_toml_str(PLAN)?;
    let reports = run_benchmark(&plan)?;
    let rows: Vec<_> = reports.into_iter().map(|r| r.summary).collect();
    write_csv(&rows, std::io::stdout().lock())
}
