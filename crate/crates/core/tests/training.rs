use meta_curriculum::harness::ExperimentConfig;
use meta_curriculum::meta::{
    fine_tune, inner_adapt, meta_train, minibatch_indices, multitask_gradient, multitask_train,
    FineTuneConfig, MetaConfig, MultiTaskConfig, MultiTaskModel, TrainedModel,
};
use meta_curriculum::numerics::{grad, ParamVector};
use meta_curriculum::rng::{stream, stream_rng};
use meta_curriculum::samplers::SamplerKind;
use meta_curriculum::tasks::{map_labels, SplitDataset, TaskId};

fn setup(updates: usize) -> (ExperimentConfig, SplitDataset, TrainedModel) {
    let mut config = ExperimentConfig::default();
    config.meta.meta_updates = updates;
    let data = config.source.generate(config.data_seed).unwrap();
    let init = TrainedModel::initialized(config.architecture().unwrap(), config.meta.seed);
    (config, data, init)
}

#[test]
fn zero_updates_return_initialization() {
    let (config, data, init) = setup(0);
    let out = meta_train(init.clone(), &config.meta, &TaskId::ALL, &data).unwrap();
    assert_eq!(out.model.params, init.params);
    assert!(out.log.is_empty());
}

#[test]
fn zero_meta_rate_keeps_params_but_logs_selections() {
    let (mut config, data, init) = setup(100);
    config.meta.meta_rate = 0.0;
    config.meta.meta_batch_size = 3;
    let out = meta_train(init.clone(), &config.meta, &TaskId::ALL, &data).unwrap();
    assert_eq!(out.model.params, init.params);
    assert_eq!(
        out.log.records.iter().map(|r| r.tasks.len()).sum::<usize>(),
        300
    );
}

#[test]
fn query_auc_improves_over_training() {
    let (config, data, init) = setup(500);
    let log = meta_train(init, &config.meta, &TaskId::ALL, &data)
        .unwrap()
        .log;
    let early = log.mean_auc_after(0..50).unwrap();
    let late = log.mean_auc_after(450..500).unwrap();
    assert!(late > early, "{early} -> {late}");
}

#[test]
fn meta_training_is_reproducible() {
    let (config, data, init) = setup(60);
    let a = meta_train(init.clone(), &config.meta, &TaskId::ALL, &data).unwrap();
    let b = meta_train(init, &config.meta, &TaskId::ALL, &data).unwrap();
    assert_eq!(a.model.params, b.model.params);
    assert_eq!(a.log.to_tsv(), b.log.to_tsv());
    assert_eq!(a.model.arch, b.model.arch);
    assert_eq!(a.model.params.len(), b.model.arch.param_count());
}

#[test]
fn excluded_target_never_sampled() {
    let (mut config, data, init) = setup(200);
    config.meta.exclude_target_task = true;
    config.meta.meta_batch_size = 4;
    for sampler in SamplerKind::ALL {
        config.meta.sampler = sampler;
        let log = meta_train(init.clone(), &config.meta, &TaskId::ALL, &data)
            .unwrap()
            .log;
        assert!(
            log.records.iter().all(|r| !r.tasks.contains(&TaskId::K5)),
            "{sampler:?}"
        );
    }
}

#[test]
fn log_round_trips() {
    let (config, data, init) = setup(20);
    let log = meta_train(init, &config.meta, &TaskId::ALL, &data)
        .unwrap()
        .log;
    let text = log.to_tsv();
    assert_eq!(meta_curriculum::meta::RunLog::from_tsv(&text).unwrap(), log);
    assert!(meta_curriculum::meta::RunLog::from_tsv("iteration\tnonsense\n").is_err());
}

#[test]
fn one_inner_step_is_one_gradient_step() {
    let (_, data, init) = setup(0);
    let batch = map_labels(&TaskId::K2.definition(), &data.train[..20]).unwrap();
    let adapted = inner_adapt(&init.arch, &init.params, &batch, 0.1, 1).unwrap();
    let g = grad(&init.arch, &init.params, &batch).unwrap();
    assert_eq!(adapted, init.params.sub(&g.scaled(0.1)));
}

#[test]
fn invalid_meta_config_is_rejected() {
    let (_, data, init) = setup(0);
    let bad = MetaConfig {
        n_tr: 0,
        ..MetaConfig::default()
    };
    assert!(meta_train(init, &bad, &TaskId::ALL, &data).is_err());
}

#[test]
fn fine_tune_zero_epochs_is_identity() {
    let (config, data, init) = setup(0);
    let cfg = FineTuneConfig {
        epochs: 0,
        ..config.fine_tune
    };
    let out = fine_tune(init.clone(), TaskId::TARGET, &data, &cfg, 0).unwrap();
    assert_eq!(out.model.params, init.params);
    assert_eq!(out.best_epoch, 0);
}

#[test]
fn fine_tune_snapshot_never_worse_than_start() {
    let (config, data, init) = setup(0);
    let out = fine_tune(init, TaskId::TARGET, &data, &config.fine_tune, 1).unwrap();
    let best = out.validation_auc[out.best_epoch];
    assert!(best >= out.validation_auc[0]);
    assert!(out.validation_auc.iter().all(|&a| a <= best));
    assert_eq!(out.validation_auc.len(), config.fine_tune.epochs + 1);
}

#[test]
fn multitask_zero_iterations_returns_init() {
    let (_, data, init) = setup(0);
    let cfg = MultiTaskConfig {
        iterations: 0,
        ..MultiTaskConfig::default()
    };
    let out = multitask_train(&init, &TaskId::ALL, &data, &cfg, 0).unwrap();
    assert_eq!(out.screening.params, init.params);
}

#[test]
fn multitask_with_one_task_is_plain_minibatch_descent() {
    let (_, data, init) = setup(0);
    let cfg = MultiTaskConfig {
        iterations: 50,
        ..MultiTaskConfig::default()
    };
    let out = multitask_train(&init, &[TaskId::K4], &data, &cfg, 9).unwrap();

    let all = map_labels(&TaskId::K4.definition(), &data.train).unwrap();
    let mut rng = stream_rng(9, stream::MULTITASK);
    let mut params = init.params.clone();
    for _ in 0..cfg.iterations {
        let idx = minibatch_indices(&mut rng, all.len(), cfg.batch_size);
        let g = grad(&init.arch, &params, &all.select(&idx).unwrap()).unwrap();
        params.axpy(-cfg.learning_rate, &g);
    }
    assert_eq!(out.screening.params, params);
}

#[test]
fn multitask_gradient_is_sum_of_task_gradients() {
    let (_, data, init) = setup(0);
    let model = MultiTaskModel::from_single(init.arch.clone(), &init.params, &TaskId::ALL).unwrap();
    let batches: Vec<_> = TaskId::ALL
        .iter()
        .map(|&t| (t, map_labels(&t.definition(), &data.train[..30]).unwrap()))
        .collect();
    let (trunk, heads) = multitask_gradient(&model, &batches).unwrap();
    let split = init.arch.trunk_len();
    let mut trunk_sum = ParamVector::zeros(split);
    for (t, b) in &batches {
        let g = grad(&init.arch, &model.classifier(*t).unwrap(), b).unwrap();
        trunk_sum = trunk_sum.add(&ParamVector::new(g.as_slice()[..split].to_vec()));
        let head = &heads[t];
        for (a, b) in head.iter().zip(&g.as_slice()[split..]) {
            assert!((a - b).abs() < 1e-15);
        }
    }
    for (a, b) in trunk.iter().zip(trunk_sum.iter()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn checkpoint_round_trip_is_bit_exact() {
    let (config, data, init) = setup(5);
    let model = meta_train(init, &config.meta, &TaskId::ALL, &data)
        .unwrap()
        .model;
    let back = TrainedModel::from_checkpoint(&model.to_checkpoint()).unwrap();
    assert_eq!(back, model);
}
