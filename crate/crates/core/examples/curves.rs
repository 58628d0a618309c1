//! Per-task trajectories and selection histograms from a run log.

use meta_curriculum::harness::{emit_curves, ExperimentConfig};
use meta_curriculum::meta::{meta_train, TrainedModel};
use meta_curriculum::samplers::SamplerKind;
use meta_curriculum::tasks::TaskId;

fn main() -> meta_curriculum::Result<()> {
    let mut config = ExperimentConfig::default();
    config.meta.meta_updates = 500;
    let data = config.source.generate(config.data_seed)?;
    for sampler in [SamplerKind::Cl, SamplerKind::AllTask] {
        config.meta.sampler = sampler;
        let init = TrainedModel::initialized(config.architecture()?, config.meta.seed);
        let log = meta_train(init, &config.meta, &TaskId::ALL, &data)?.log;
        let curves = emit_curves(&log, 100);
        println!("{}", sampler.display_name());
        print!("{}", curves.histogram_tsv());
        for task in TaskId::ALL {
            let points: Vec<_> = curves
                .trajectories
                .iter()
                .filter(|p| p.task == task)
                .collect();
            if let Some(last) = points.last() {
                println!(
                    "  {task}: {} visits, last observation {:+.3}",
                    points.len(),
                    last.observation
                );
            }
        }
    }
    Ok(())
}
