//! Samplers on a scripted environment: task K1 improves by 0.05 per visit,
//! K2 and K3 are flat with small noise.

use meta_curriculum::rng::stream_rng;
use meta_curriculum::samplers::{SamplerKind, SamplerState};
use meta_curriculum::tasks::TaskId;
use rand_distr::{Distribution, Normal};

fn main() -> meta_curriculum::Result<()> {
    let pool = [TaskId::K1, TaskId::K2, TaskId::K3];
    let noise = Normal::new(0.0, 0.005).unwrap();
    for kind in [SamplerKind::Random, SamplerKind::Mab, SamplerKind::Cl] {
        let mut total = 0;
        for seed in 0..20 {
            let mut sampler = SamplerState::with_seed(kind, 10, seed);
            let mut env = stream_rng(seed, 9);
            let mut visits = 0;
            for _ in 0..100 {
                let task = sampler.select_batch(&pool, 1)?.tasks[0];
                let value = if task == TaskId::K1 {
                    visits += 1;
                    0.05 * visits as f64
                } else {
                    noise.sample(&mut env)
                };
                sampler.record_observation(task, value);
            }
            total += visits;
        }
        println!(
            "{:<8} picks the improving task {:.1}% of the time",
            kind.display_name(),
            total as f64 / 20.0
        );
    }

    let mut sampler = SamplerState::with_seed(SamplerKind::Cl, 10, 0);
    println!(
        "first curriculum batch over all tasks: {:?}",
        sampler.select_batch(&TaskId::ALL, 5)?.tasks
    );
    let mut all = SamplerState::with_seed(SamplerKind::AllTask, 10, 0);
    match all.select_batch(&TaskId::ALL, 3) {
        Ok(_) => println!("unexpected"),
        Err(e) => println!("all-task with |K| = 3: {e}"),
    }
    Ok(())
}
