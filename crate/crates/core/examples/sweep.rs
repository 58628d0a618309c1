//! The full variant grid with repeated seeds.
//!
//! cargo run --release --example sweep -- [repetitions] [meta_updates]

use meta_curriculum::harness::{run_sweep, ExperimentConfig, ExperimentPlan};

fn main() -> meta_curriculum::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut config = ExperimentConfig::default();
    let repetitions = args.next().map_or(3, |r| r.parse().expect("repetitions"));
    config.meta.meta_updates = args
        .next()
        .map_or(500, |m| m.parse().expect("meta_updates"));

    let mut plan = ExperimentPlan::standard(config);
    plan.repetitions = repetitions;
    let out = run_sweep(&plan, None)?;
    print!("{}", out.table.render());
    println!();
    print!("{}", out.table.to_tsv());
    Ok(())
}
