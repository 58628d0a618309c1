//! Meta-train, fine-tune on the screening task, and evaluate, for each way
//! of obtaining the starting model. Artifacts go to a temporary directory.

use meta_curriculum::harness::{run_pipeline, ExperimentConfig, Method};
use meta_curriculum::meta::TrainedModel;

fn main() -> meta_curriculum::Result<()> {
    let mut config = ExperimentConfig::default();
    config.meta.meta_updates = 500;
    let dir = std::env::temp_dir().join("meta-curriculum-pipeline");
    for method in [Method::Plain, Method::MultiTask, Method::Meta] {
        let result = run_pipeline(&config, method)?;
        let out = dir.join(method.to_string());
        let manifest = result.write_artifacts(&out, &config, method, "full_pipeline example")?;
        let reloaded = TrainedModel::load(&out.join("checkpoint.toml"))?;
        assert_eq!(reloaded.params, result.model.params);
        println!(
            "{method:<10} validation AUC {:.4}  test AUC {:.4}  ({} files in {})",
            result.best_validation_auc,
            result.test_auc,
            manifest.files.len(),
            out.display()
        );
    }
    Ok(())
}
