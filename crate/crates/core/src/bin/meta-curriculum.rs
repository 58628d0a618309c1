use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use meta_curriculum::error::StageContext;
use meta_curriculum::harness::{
    emit_curves, initial_model, run_pipeline, run_sweep, ExperimentConfig, ExperimentPlan,
    Manifest, Method, DEFAULT_REPETITIONS, DEFAULT_WINDOW,
};
use meta_curriculum::meta::{evaluate, fine_tune, GradientMode, RunLog, TrainedModel};
use meta_curriculum::samplers::SamplerKind;
use meta_curriculum::tasks::{io, SplitDataset, TaskId};
use meta_curriculum::{Error, Result};

#[derive(Parser)]
#[command(
    name = "meta-curriculum",
    version,
    about = "Curriculum-sampled meta-learning experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic train/validation/test splits.
    Generate(Common),
    /// Meta-train an initialization and write its checkpoint and run log.
    MetaTrain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Fine-tune a checkpoint (or a random initialization) on the screening task.
    FineTune {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Score a checkpoint on the screening task's test split.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Meta-train (or not), fine-tune and evaluate in one go.
    Run {
        #[command(flatten)]
        common: Common,
        /// meta, plain or multitask.
        #[arg(long, default_value = "meta")]
        method: Method,
    },
    /// Run the variant grid and write the results table.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
        repetitions: u64,
    },
    /// Turn a run log into trajectory and sampling-histogram tables.
    Curves {
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for initialization, sampling, episodes and fine-tuning.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed for the synthetic cohort.
    #[arg(long, alias = "data_seed")]
    data_seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    sampler: Option<SamplerKind>,
    #[arg(long, visible_alias = "meta-batch-size", alias = "meta_batch_size")]
    meta_batch: Option<usize>,
    #[arg(
        long,
        visible_alias = "exclude-target-task",
        alias = "exclude_target_task"
    )]
    no_target_task: bool,
    #[arg(long, alias = "gradient_mode")]
    gradient_mode: Option<GradientMode>,
    #[arg(long, alias = "adaptation_rate")]
    adaptation_rate: Option<f64>,
    #[arg(long, alias = "meta_rate")]
    meta_rate: Option<f64>,
    #[arg(long, alias = "meta_updates")]
    meta_updates: Option<usize>,
    #[arg(long, alias = "inner_steps")]
    inner_steps: Option<usize>,
    #[arg(long, alias = "n_tr")]
    n_tr: Option<usize>,
    #[arg(long, alias = "n_val")]
    n_val: Option<usize>,
    #[arg(long, alias = "buffer_capacity")]
    buffer_capacity: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let m = &mut c.meta;
        if let Some(v) = self.seed {
            m.seed = v;
        }
        if let Some(v) = self.sampler {
            m.sampler = v;
        }
        if let Some(v) = self.meta_batch {
            m.meta_batch_size = v;
        }
        if self.no_target_task {
            m.exclude_target_task = true;
        }
        if let Some(v) = self.gradient_mode {
            m.gradient_mode = v;
        }
        if let Some(v) = self.adaptation_rate {
            m.adaptation_rate = v;
        }
        if let Some(v) = self.meta_rate {
            m.meta_rate = v;
        }
        if let Some(v) = self.meta_updates {
            m.meta_updates = v;
        }
        if let Some(v) = self.inner_steps {
            m.inner_steps = v;
        }
        if let Some(v) = self.n_tr {
            m.n_tr = v;
        }
        if let Some(v) = self.n_val {
            m.n_val = v;
        }
        if let Some(v) = self.buffer_capacity {
            m.buffer_capacity = v;
        }
        if let Some(v) = self.data_seed {
            c.data_seed = v;
        }
        c.validate()?;
        Ok(c)
    }
}

fn load_data(config: &ExperimentConfig, dir: Option<&Path>) -> Result<SplitDataset> {
    match dir {
        Some(dir) => io::read_dataset(dir),
        None => config.source.generate(config.data_seed),
    }
    .stage("generate")
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(common) => {
            let config = common.config().stage("config")?;
            let data = load_data(&config, None)?;
            create_dir(&common.out)?;
            let mut manifest = Manifest::new(&command_line(), &config);
            manifest.write_file(&common.out, "config.toml", &config.to_toml())?;
            for (name, split) in [
                ("train.tsv", &data.train),
                ("validation.tsv", &data.validation),
                ("test.tsv", &data.test),
            ] {
                manifest.write_file(&common.out, name, &io::samples_to_tsv(split))?;
            }
            manifest.save(&common.out)?;
            println!(
                "wrote {} / {} / {} samples to {}",
                data.train.len(),
                data.validation.len(),
                data.test.len(),
                common.out.display()
            );
        }
        Command::MetaTrain { common, data } => {
            let config = common.config().stage("config")?;
            let data = load_data(&config, data.as_deref())?;
            let (model, log) = initial_model(&config, Method::Meta, &data)?;
            let log = log.expect("meta-training produces a log");
            create_dir(&common.out)?;
            let mut manifest = Manifest::new(&command_line(), &config);
            manifest.write_file(&common.out, "config.toml", &config.to_toml())?;
            manifest.write_file(&common.out, "checkpoint.toml", &model.to_checkpoint())?;
            manifest.write_file(&common.out, "run_log.tsv", &log.to_tsv())?;
            manifest.save(&common.out)?;
            println!("{} meta-updates; log sha256 {}", log.len(), log.sha256());
        }
        Command::FineTune {
            common,
            checkpoint,
            data,
        } => {
            let config = common.config().stage("config")?;
            let data = load_data(&config, data.as_deref())?;
            let start = match checkpoint {
                Some(path) => TrainedModel::load(&path).stage("load")?,
                None => initial_model(&config, Method::Plain, &data)?.0,
            };
            let out = fine_tune(
                start,
                TaskId::TARGET,
                &data,
                &config.fine_tune,
                config.meta.seed,
            )
            .stage("fine-tune")?;
            create_dir(&common.out)?;
            let mut manifest = Manifest::new(&command_line(), &config);
            manifest.write_file(&common.out, "config.toml", &config.to_toml())?;
            manifest.write_file(&common.out, "checkpoint.toml", &out.model.to_checkpoint())?;
            let mut history = String::from("epoch\tvalidation_auc\n");
            for (epoch, auc) in out.validation_auc.iter().enumerate() {
                history.push_str(&format!("{epoch}\t{auc:?}\n"));
            }
            manifest.write_file(&common.out, "validation.tsv", &history)?;
            manifest.save(&common.out)?;
            println!(
                "best epoch {} validation AUC {:.4}",
                out.best_epoch, out.validation_auc[out.best_epoch]
            );
        }
        Command::Evaluate {
            common,
            checkpoint,
            data,
        } => {
            let config = common.config().stage("config")?;
            let data = load_data(&config, data.as_deref())?;
            let model = TrainedModel::load(&checkpoint).stage("load")?;
            let auc = evaluate(&model, TaskId::TARGET, &data).stage("evaluate")?;
            create_dir(&common.out)?;
            let mut manifest = Manifest::new(&command_line(), &config);
            let result = serde_json::json!({ "task": TaskId::TARGET.to_string(), "test_auc": auc });
            manifest.write_file(&common.out, "evaluation.json", &result.to_string())?;
            manifest.save(&common.out)?;
            println!("test AUC {auc:.4}");
        }
        Command::Run { common, method } => {
            let config = common.config().stage("config")?;
            let result = run_pipeline(&config, method)?;
            result.write_artifacts(&common.out, &config, method, &command_line())?;
            println!(
                "{method}: validation AUC {:.4}, test AUC {:.4}",
                result.best_validation_auc, result.test_auc
            );
        }
        Command::Sweep {
            common,
            repetitions,
        } => {
            let config = common.config().stage("config")?;
            let mut plan = ExperimentPlan::standard(config.clone());
            plan.repetitions = repetitions;
            let runs = common.out.join("runs");
            let output = run_sweep(&plan, Some(&runs)).stage("sweep")?;
            let mut manifest = Manifest::new(&command_line(), &config);
            manifest.write_file(&common.out, "config.toml", &config.to_toml())?;
            manifest.write_file(&common.out, "results.tsv", &output.table.to_tsv())?;
            manifest.write_file(&common.out, "results.json", &output.table.to_json())?;
            manifest.write_file(&common.out, "results.txt", &output.table.render())?;
            manifest.save(&common.out)?;
            print!("{}", output.table.render());
        }
        Command::Curves { log, window, out } => {
            let text = fs::read_to_string(&log).map_err(|e| Error::io(&log, e))?;
            let log = RunLog::from_tsv(&text).stage("curves")?;
            let curves = emit_curves(&log, window);
            match out {
                Some(dir) => {
                    create_dir(&dir)?;
                    for (name, body) in [
                        ("trajectories.tsv", curves.trajectories_tsv()),
                        ("histogram.tsv", curves.histogram_tsv()),
                    ] {
                        let path = dir.join(name);
                        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
                    }
                }
                None => print!("{}", curves.histogram_tsv()),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
