//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! with a failure status if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{
    fd_gradient, loss_fd_gradient, max_relative_error, replay_matches, tiny_problem,
    ReferenceSampler,
};
use meta_curriculum::harness::{
    run_sweep, ExperimentConfig, ExperimentPlan, Manifest, Method, Variant,
};
use meta_curriculum::meta::{adaptation_step, meta_gradient, meta_objective, GradientMode, RunLog};
use meta_curriculum::metrics::{pairwise_auc, trapezoidal_auc, ScoredLabels};
use meta_curriculum::numerics::{grad, Activation, Architecture, ParamVector, Quadratic};
use meta_curriculum::rng::stream_rng;
use meta_curriculum::samplers::{SamplerKind, SamplerState};
use meta_curriculum::tasks::{sample_episode, TaskId};
use rand::Rng;
use rand_distr::{Distribution, Normal};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    if elapsed < limit {
        Ok(format!("{detail}, {:.2}s", elapsed.as_secs_f64()))
    } else {
        Err(format!(
            "{detail}, took {:.2}s (limit {}s)",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ))
    }
}

fn gradient_correctness() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let (arch, params, batch) = tiny_problem(seed);
        let g = grad(&arch, &params, &batch).map_err(|e| e.to_string())?;
        worst = worst.max(max_relative_error(
            &g,
            &loss_fd_gradient(&arch, &params, &batch),
            1e-8,
        ));
    }
    let detail = format!("20 networks, max relative error {worst:.2e}");
    if worst >= 1e-5 {
        return Err(detail);
    }
    within(start.elapsed(), Duration::from_secs(10), detail)
}

fn meta_gradient_correctness() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for steps in [1, 2, 5] {
        for seed in 0..5 {
            let settings = meta_curriculum::harness::SourceSettings {
                dimension: 3,
                ..Default::default()
            };
            let data = settings.generate(seed).map_err(|e| e.to_string())?;
            let arch = Architecture::new(vec![3, 4, 2], Activation::Tanh).unwrap();
            let params = arch.init_params(&mut stream_rng(seed, 0));
            let mut rng = stream_rng(seed, 2);
            let episodes: Vec<_> = [TaskId::K1, TaskId::K5]
                .iter()
                .map(|&t| sample_episode(t, &data.train, 4, 4, &mut rng).unwrap())
                .collect();
            let rate = 0.5;
            let g = meta_gradient(
                &arch,
                &params,
                &episodes,
                rate,
                steps,
                GradientMode::SecondOrder,
            )
            .map_err(|e| e.to_string())?;
            let fd = fd_gradient(
                &|p| meta_objective(&arch, p, &episodes, rate, steps).unwrap(),
                &params,
                1e-3,
            );
            worst = worst.max(max_relative_error(&g, &fd, 1e-8));
        }
    }
    let detail = format!("steps 1/2/5, max relative error {worst:.2e}");
    if worst >= 1e-4 {
        return Err(detail);
    }
    within(start.elapsed(), Duration::from_secs(60), detail)
}

fn quadratic_closed_form() -> Outcome {
    let q = Quadratic::unit(2);
    let mut worst: f64 = 0.0;
    let mut rng = stream_rng(3, 0);
    for _ in 0..100 {
        let theta = ParamVector::new(vec![
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        ]);
        let alpha: f64 = rng.random_range(0.0..1.0);
        let second = adaptation_step(&q, &q, &theta, alpha, 1, GradientMode::SecondOrder).unwrap();
        let first = adaptation_step(&q, &q, &theta, alpha, 1, GradientMode::FirstOrder).unwrap();
        for i in 0..2 {
            worst = worst.max((second.meta_gradient[i] - (1.0 - alpha).powi(2) * theta[i]).abs());
            worst = worst.max((first.meta_gradient[i] - (1.0 - alpha) * theta[i]).abs());
        }
    }
    let detail = format!("100 random cases, max deviation {worst:.1e}");
    if worst < 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn auc_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut with_ties = 0;
    for seed in 0..1000 {
        let mut rng = stream_rng(seed, 40);
        let n = rng.random_range(2..=50);
        let levels = rng.random_range(2..=20);
        let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        labels[0] = 0;
        labels[1] = 1;
        let mut sorted = scores.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            with_ties += 1;
        }
        let d = ScoredLabels::new(&scores, &labels).unwrap();
        worst = worst.max((trapezoidal_auc(&d).unwrap() - pairwise_auc(&d).unwrap()).abs());
    }
    let detail = format!("1000 instances ({with_ties} with ties), max difference {worst:.1e}");
    if worst < 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sampler_contracts() -> Outcome {
    let mut all = SamplerState::with_seed(SamplerKind::AllTask, 10, 0);
    let mut once = all
        .select_batch(&TaskId::ALL, 5)
        .map_err(|e| e.to_string())?
        .tasks;
    once.sort();
    if once != TaskId::ALL.to_vec() {
        return Err(format!("all-task batch {once:?}"));
    }
    if all.select_batch(&TaskId::ALL, 3).is_ok() {
        return Err("all-task accepted |K| = 3".into());
    }
    let mut sequences = 0;
    for seed in 0..2500 {
        for kind in SamplerKind::ALL {
            replay_matches(kind, seed, 25)?;
            sequences += 1;
        }
    }
    Ok(format!(
        "all-task contract holds, {sequences} replayed sequences match the reference"
    ))
}

fn scripted_curriculum() -> Outcome {
    let pool = [TaskId::K1, TaskId::K2, TaskId::K3];
    let mut fractions = Vec::new();
    for seed in 0..20 {
        let counts = common::scripted_curriculum(SamplerKind::Cl, seed, 100);
        // Same environment driven by the reference sampler.
        let noise = Normal::new(0.0, 0.005).unwrap();
        let mut env = stream_rng(seed, 9);
        let mut reference = ReferenceSampler::new(SamplerKind::Cl, 10, stream_rng(seed, 1));
        let mut oracle = [0usize; 3];
        for _ in 0..100 {
            let t = reference.select(&pool, 1)[0];
            oracle[t.index()] += 1;
            let v = if t == TaskId::K1 {
                0.05 * oracle[0] as f64
            } else {
                noise.sample(&mut env)
            };
            reference.record(t, v);
        }
        if oracle != counts {
            return Err(format!(
                "seed {seed}: sampler {counts:?}, reference {oracle:?}"
            ));
        }
        fractions.push(counts[0] as f64 / 100.0);
    }
    let min = fractions.iter().copied().fold(1.0, f64::min);
    let mean = fractions.iter().sum::<f64>() / 20.0;
    let detail = format!(
        "improving task share over 20 seeds: min {:.0}%, mean {:.1}%",
        min * 100.0,
        mean * 100.0
    );
    if min > 0.6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn paired(meta: &[f64], plain: &[f64]) -> (usize, f64) {
    let wins = meta.iter().zip(plain).filter(|(m, p)| m > p).count();
    let gap = meta.iter().zip(plain).map(|(m, p)| m - p).sum::<f64>() / meta.len() as f64;
    (wins, gap)
}

fn meta_learning_effect() -> Outcome {
    let start = Instant::now();
    let mut base = ExperimentConfig::default();
    base.meta.meta_updates = 500;
    let plan = ExperimentPlan {
        base,
        variants: vec![
            Variant::meta("BSML", 5, SamplerKind::Cl, false),
            Variant::baseline("Plain", Method::Plain),
        ],
        repetitions: 10,
    };
    let out = run_sweep(&plan, None).map_err(|e| e.to_string())?;
    let (meta, plain) = (out.test_aucs(0), out.test_aucs(1));
    if meta.len() != 10 || plain.len() != 10 {
        return Err(format!(
            "only {} / {} runs completed",
            meta.len(),
            plain.len()
        ));
    }
    let (wins, gap) = paired(&meta, &plain);
    let detail = format!("meta-trained wins {wins}/10 seeds, mean gap {gap:+.4}");
    if wins < 8 || gap <= 0.0 {
        return Err(detail);
    }
    within(start.elapsed(), Duration::from_secs(600), detail)
}

fn no_target_task_mode() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut base = ExperimentConfig::default();
    base.meta.meta_updates = 500;
    let plan = ExperimentPlan {
        base,
        variants: vec![
            Variant::meta("BSML-NS", 4, SamplerKind::Cl, true),
            Variant::baseline("Plain", Method::Plain),
        ],
        repetitions: 10,
    };
    let out = run_sweep(&plan, Some(dir.path())).map_err(|e| e.to_string())?;
    let mut batches = 0;
    let mut k5 = 0;
    for r in 0..10 {
        let path = dir
            .path()
            .join(plan.variants[0].slug())
            .join(format!("rep-{r}"))
            .join("run_log.tsv");
        let log = RunLog::from_tsv(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        batches += log.len();
        k5 += log
            .records
            .iter()
            .filter(|rec| rec.tasks.contains(&TaskId::K5))
            .count();
    }
    let (meta, plain) = (out.test_aucs(0), out.test_aucs(1));
    let (wins, gap) = paired(&meta, &plain);
    let detail = format!(
        "K5 in {k5} of {batches} logged meta-batches; wins {wins}/10 seeds, mean gap {gap:+.4}"
    );
    if k5 == 0 && batches == 5000 && wins >= 7 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().unwrap() != "manifest.toml" {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                files.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    files
}

fn sweep_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_meta-curriculum");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut manifests = Vec::new();
    let mut trees = Vec::new();
    for name in ["first", "second"] {
        let out = dir.path().join(name);
        let output = Command::new(bin)
            .args([
                "sweep",
                "--meta-updates",
                "300",
                "--repetitions",
                "10",
                "--out",
            ])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !output.status.success() {
            return Err(String::from_utf8_lossy(&output.stderr).into_owned());
        }
        let m = Manifest::load(&out.join("manifest.toml")).map_err(|e| e.to_string())?;
        manifests.push((m.config, m.data_seed, m.seed, m.files));
        trees.push(read_tree(&out));
    }
    let logs = trees[0]
        .keys()
        .filter(|k| k.ends_with("run_log.tsv"))
        .count();
    let detail = format!(
        "full grid x 10 repetitions, {} files compared ({logs} run logs)",
        trees[0].len()
    );
    if manifests[0] == manifests[1] && trees[0] == trees[1] {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("gradient matches finite differences", gradient_correctness),
        (
            "second-order meta-gradient matches finite differences",
            meta_gradient_correctness,
        ),
        ("quadratic meta-gradient closed form", quadratic_closed_form),
        ("trapezoidal and pairwise AUC agree", auc_equivalence),
        (
            "sampler contracts against reference replay",
            sampler_contracts,
        ),
        ("curriculum follows the improving task", scripted_curriculum),
        (
            "meta-training beats plain fine-tuning",
            meta_learning_effect,
        ),
        (
            "screening task excluded from meta-training",
            no_target_task_mode,
        ),
        ("sweeps are bit-for-bit reproducible", sweep_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}: {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}: {name} ({detail})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
