//! Reference implementations shared by the integration tests.
#![allow(dead_code)]

use meta_curriculum::numerics::{loss, Activation, Architecture, Batch, Matrix, ParamVector};
use meta_curriculum::rng::{stream_rng, Rng};
use meta_curriculum::samplers::{SamplerKind, SamplerState};
use meta_curriculum::tasks::TaskId;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};

/// A small random network and batch. Even seeds use tanh, odd seeds relu.
pub fn tiny_problem(seed: u64) -> (Architecture, ParamVector, Batch) {
    let mut rng = stream_rng(seed, 77);
    let input = rng.random_range(1..=4);
    let depth = rng.random_range(1..=2);
    let mut widths = vec![input];
    for _ in 0..depth {
        widths.push(rng.random_range(2..=5));
    }
    widths.push(2);
    let act = if seed.is_multiple_of(2) {
        Activation::Tanh
    } else {
        Activation::Relu
    };
    let arch = Architecture::new(widths, act).unwrap();
    let params = arch.init_params(&mut rng);
    let n = rng.random_range(3..=8);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..input).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
    labels[0] = 0;
    labels[1] = 1;
    let batch = Batch::new(Matrix::from_rows(&rows).unwrap(), labels).unwrap();
    (arch, params, batch)
}

/// Fourth-order central difference of `f` along coordinate `i`.
pub fn central_difference(
    f: &dyn Fn(&ParamVector) -> f64,
    x: &ParamVector,
    i: usize,
    h: f64,
) -> f64 {
    let at = |d: f64| {
        let mut y = x.clone();
        y[i] += d;
        f(&y)
    };
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

pub fn fd_gradient(f: &dyn Fn(&ParamVector) -> f64, x: &ParamVector, h: f64) -> ParamVector {
    ParamVector::new(
        (0..x.len())
            .map(|i| central_difference(f, x, i, h))
            .collect(),
    )
}

pub fn loss_fd_gradient(arch: &Architecture, params: &ParamVector, batch: &Batch) -> ParamVector {
    fd_gradient(&|p| loss(arch, p, batch).unwrap(), params, 1e-3)
}

/// Largest per-component relative error; components where both values are
/// below `floor` are compared absolutely against `floor`.
pub fn max_relative_error(a: &ParamVector, b: &ParamVector, floor: f64) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let scale = x.abs().max(y.abs());
            if scale < floor {
                if (x - y).abs() < floor {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Brute-force sampler: keeps the full history and rebuilds each buffer as
/// its last `capacity` entries; draws come from a clone of the same stream.
pub struct ReferenceSampler {
    pub kind: SamplerKind,
    pub capacity: usize,
    pub history: [Vec<f64>; 5],
    pub last: [Option<f64>; 5],
    pub rng: Rng,
}

impl ReferenceSampler {
    pub fn new(kind: SamplerKind, capacity: usize, rng: Rng) -> Self {
        ReferenceSampler {
            kind,
            capacity,
            history: Default::default(),
            last: [None; 5],
            rng,
        }
    }

    fn buffer(&self, t: TaskId) -> &[f64] {
        let h = &self.history[t.index()];
        &h[h.len().saturating_sub(self.capacity)..]
    }

    pub fn select(&mut self, pool: &[TaskId], k: usize) -> Vec<TaskId> {
        match self.kind {
            SamplerKind::Random => (0..k)
                .map(|_| pool[self.rng.random_range(0..pool.len())])
                .collect(),
            SamplerKind::AllTask => pool.to_vec(),
            SamplerKind::Cl | SamplerKind::Mab => {
                let mut chosen: Vec<TaskId> = Vec::new();
                for _ in 0..k {
                    let mut empty: Vec<TaskId> = pool
                        .iter()
                        .copied()
                        .filter(|t| self.buffer(*t).is_empty() && !chosen.contains(t))
                        .collect();
                    empty.sort();
                    if let Some(&t) = empty.first() {
                        chosen.push(t);
                        continue;
                    }
                    let mut scored: Vec<(TaskId, f64)> = Vec::new();
                    for &t in pool {
                        let len = self.buffer(t).len();
                        if len == 0 {
                            continue;
                        }
                        let j = self.rng.random_range(0..len);
                        let v = self.buffer(t)[j];
                        scored.push((
                            t,
                            if self.kind == SamplerKind::Cl {
                                v.abs()
                            } else {
                                v
                            },
                        ));
                    }
                    let pick = if scored.is_empty() {
                        *pool.iter().min().unwrap()
                    } else {
                        let best = scored.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
                        scored
                            .iter()
                            .filter(|s| s.1 == best)
                            .map(|s| s.0)
                            .min()
                            .unwrap()
                    };
                    chosen.push(pick);
                }
                chosen
            }
        }
    }

    pub fn record(&mut self, t: TaskId, observation: f64) {
        let i = t.index();
        let reward = observation - self.last[i].unwrap_or(0.0);
        self.last[i] = Some(observation);
        match self.kind {
            SamplerKind::Cl => self.history[i].push(reward),
            SamplerKind::Mab => self.history[i].push(observation),
            _ => {}
        }
    }
}

/// Replays one scripted sequence through both samplers; returns the first
/// iteration at which they disagree.
pub fn replay_matches(kind: SamplerKind, seed: u64, iterations: usize) -> Result<(), String> {
    let mut script = stream_rng(seed, 31);
    let pool_size = if kind == SamplerKind::AllTask {
        5
    } else {
        script.random_range(1..=5)
    };
    let mut pool: Vec<TaskId> = TaskId::ALL.to_vec();
    while pool.len() > pool_size {
        let j = script.random_range(0..pool.len());
        pool.remove(j);
    }
    let k = if kind == SamplerKind::AllTask {
        pool.len()
    } else {
        script.random_range(1..=5)
    };
    let capacity = script.random_range(1..=10);
    // Coarse values produce frequent ties.
    let coarse = script.random_bool(0.5);
    let stream = stream_rng(seed, 1);
    let mut sut = SamplerState::new(kind, capacity, stream.clone());
    let mut reference = ReferenceSampler::new(kind, capacity, stream);
    for it in 0..iterations {
        let got = sut.select_batch(&pool, k).map_err(|e| e.to_string())?.tasks;
        let want = reference.select(&pool, k);
        if got != want {
            return Err(format!(
                "seed {seed} iteration {it}: got {got:?}, reference {want:?}"
            ));
        }
        for &t in &got {
            let v = if coarse {
                script.random_range(-2..=2) as f64 * 0.25
            } else {
                script.random_range(-1.0..1.0)
            };
            let out = sut.record_observation(t, v);
            reference.record(t, v);
            if sut
                .buffer(t)
                .iter()
                .copied()
                .ne(reference.buffer(t).iter().copied())
            {
                return Err(format!("seed {seed} iteration {it}: buffer of {t} differs"));
            }
            let _ = out;
        }
    }
    Ok(())
}

/// Scripted environment: K1's observation grows by 0.05 per visit, K2 and
/// K3 are flat at zero plus N(0, 0.005) noise. Returns how often each pool
/// task was picked in `selections` single-task draws.
pub fn scripted_curriculum(kind: SamplerKind, seed: u64, selections: usize) -> [usize; 3] {
    let pool = [TaskId::K1, TaskId::K2, TaskId::K3];
    let noise = Normal::new(0.0, 0.005).unwrap();
    let mut env = stream_rng(seed, 9);
    let mut sampler = SamplerState::with_seed(kind, 10, seed);
    let mut counts = [0usize; 3];
    for _ in 0..selections {
        let t = sampler.select_batch(&pool, 1).unwrap().tasks[0];
        counts[t.index()] += 1;
        let v = if t == TaskId::K1 {
            0.05 * counts[0] as f64
        } else {
            noise.sample(&mut env)
        };
        sampler.record_observation(t, v);
    }
    counts
}
