mod common;

use common::{replay_matches, scripted_curriculum};
use meta_curriculum::samplers::{SamplerKind, SamplerState};
use meta_curriculum::tasks::TaskId::{self, *};

#[test]
fn replay_agrees_with_reference() {
    for seed in 0..400 {
        for kind in SamplerKind::ALL {
            replay_matches(kind, seed, 25).unwrap();
        }
    }
}

#[test]
fn buffer_holds_most_recent_values() {
    for capacity in [1, 3, 10] {
        let mut s = SamplerState::with_seed(SamplerKind::Mab, capacity, 0);
        let values: Vec<f64> = (0..25).map(|i| i as f64 * 0.01).collect();
        for (k, &v) in values.iter().enumerate() {
            s.record_observation(K2, v);
            let start = (k + 1).saturating_sub(capacity);
            assert!(s
                .buffer(K2)
                .iter()
                .copied()
                .eq(values[start..=k].iter().copied()));
        }
    }
}

#[test]
fn identical_inputs_give_identical_selections() {
    let run = |seed| {
        let mut s = SamplerState::with_seed(SamplerKind::Cl, 10, seed);
        let mut picks = Vec::new();
        for i in 0..200 {
            let batch = s.select_batch(&TaskId::ALL, 3).unwrap();
            for &t in &batch.tasks {
                s.record_observation(t, ((i * 7 + t.index() * 3) % 11) as f64 / 10.0 - 0.5);
            }
            picks.extend(batch.tasks);
        }
        picks
    };
    assert_eq!(run(4), run(4));
    assert_ne!(run(4), run(5));
}

#[test]
fn random_frequencies_within_three_sigma() {
    let mut s = SamplerState::with_seed(SamplerKind::Random, 10, 12);
    let n = 10_000;
    let mut counts = [0usize; 5];
    for t in s.select_batch(&TaskId::ALL, n).unwrap().tasks {
        counts[t.index()] += 1;
    }
    let sigma = (n as f64 * 0.2 * 0.8).sqrt();
    for c in counts {
        assert!(
            (c as f64 - n as f64 * 0.2).abs() < 3.0 * sigma,
            "{counts:?}"
        );
    }
}

#[test]
fn alltask_emits_each_task_once() {
    let mut s = SamplerState::with_seed(SamplerKind::AllTask, 10, 0);
    let mut tasks = s.select_batch(&TaskId::ALL, 5).unwrap().tasks;
    tasks.sort();
    assert_eq!(tasks, TaskId::ALL.to_vec());
    assert!(s.select_batch(&TaskId::ALL, 3).is_err());
}

#[test]
fn decreasing_task_keeps_being_sampled() {
    let mut s = SamplerState::with_seed(SamplerKind::Cl, 10, 3);
    s.set_buffer(K1, &[-0.4; 10]);
    s.set_buffer(K2, &[0.1; 10]);
    s.set_buffer(K3, &[0.0; 10]);
    for _ in 0..1000 {
        assert_eq!(s.select_one_cl(&[K1, K2, K3]).unwrap(), K1);
    }
}

#[test]
fn mab_prefers_least_negative() {
    let mut s = SamplerState::with_seed(SamplerKind::Mab, 10, 3);
    s.set_buffer(K1, &[-0.4]);
    s.set_buffer(K2, &[-0.1]);
    s.set_buffer(K3, &[-0.2]);
    assert_eq!(s.select_one_mab(&[K1, K2, K3]).unwrap(), K2);
}

#[test]
fn record_outcome_rewards() {
    let mut s = SamplerState::with_seed(SamplerKind::Cl, 10, 0);
    let first = s.record_outcome(K4, 0.5, 0.75).unwrap();
    assert_eq!(first.buffered, Some(0.25));
    s.record_observation(K4, 0.10);
    let next = s.record_observation(K4, 0.25);
    assert!((next.reward - 0.15).abs() < 1e-15);
    let mut m = SamplerState::with_seed(SamplerKind::Mab, 10, 0);
    assert_eq!(m.record_observation(K1, -0.05).buffered, Some(-0.05));
}

#[test]
fn curriculum_follows_the_improving_task() {
    for seed in 0..20 {
        let counts = scripted_curriculum(SamplerKind::Cl, seed, 100);
        assert!(counts[0] > 60, "seed {seed}: {counts:?}");
    }
}
