//! Meta-train with the curriculum sampler and print the learning curve.
//!
//! cargo run --release --example meta_train -- [sampler] [meta_updates]

use meta_curriculum::harness::ExperimentConfig;
use meta_curriculum::meta::{meta_train, TrainedModel};
use meta_curriculum::tasks::TaskId;

fn main() -> meta_curriculum::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut config = ExperimentConfig::default();
    if let Some(s) = args.next() {
        config.meta.sampler = s.parse()?;
    }
    config.meta.meta_updates = args
        .next()
        .map_or(1000, |m| m.parse().expect("meta_updates"));

    let data = config.source.generate(config.data_seed)?;
    let init = TrainedModel::initialized(config.architecture()?, config.meta.seed);
    let out = meta_train(init, &config.meta, &TaskId::ALL, &data)?;

    let m = out.log.len();
    let window = (m / 10).max(1);
    println!(
        "{:>10} {:>12} {:>12}",
        "iteration", "AUC after", "query loss"
    );
    for start in (0..m).step_by(window) {
        let end = (start + window).min(m);
        let recs = &out.log.records[start..end];
        let loss = recs
            .iter()
            .map(|r| r.query_loss / r.tasks.len() as f64)
            .sum::<f64>()
            / recs.len() as f64;
        println!(
            "{start:>10} {:>12.4} {loss:>12.4}",
            out.log.mean_auc_after(start..end).unwrap_or(f64::NAN)
        );
    }
    println!("log sha256 {}", out.log.sha256());
    Ok(())
}
