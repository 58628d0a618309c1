//! The five binary tasks over the synthetic cohort, and one episode of each.

use meta_curriculum::harness::SourceSettings;
use meta_curriculum::rng::stream_rng;
use meta_curriculum::tasks::{map_labels, sample_episode, TaskId};

fn main() -> meta_curriculum::Result<()> {
    let data = SourceSettings::default().generate(0)?;
    for (name, split) in data.splits() {
        let mut counts = [0usize; 3];
        for s in split {
            counts[s.class as usize] += 1;
        }
        println!("{name:<10} {} samples, per class {counts:?}", split.len());
    }

    let mut rng = stream_rng(0, 2);
    for task in TaskId::ALL {
        let def = task.definition();
        let batch = map_labels(&def, &data.train)?;
        let ep = sample_episode(task, &data.train, 4, 4, &mut rng)?;
        println!(
            "{task}: {} eligible ({} positive); support labels {:?}, query labels {:?}",
            batch.len(),
            batch.positives(),
            ep.support.labels(),
            ep.query.labels()
        );
    }
    Ok(())
}
