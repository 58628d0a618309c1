//! Meta-trained versus plain initialization, paired by seed.
//!
//! cargo run --release --example paired_comparison -- [meta_updates] [repetitions]

use meta_curriculum::harness::{run_sweep, ExperimentConfig, ExperimentPlan, Method, Variant};
use meta_curriculum::samplers::SamplerKind;

fn main() -> meta_curriculum::Result<()> {
    let mut args = std::env::args().skip(1);
    let meta_updates = args
        .next()
        .map_or(500, |a| a.parse().expect("meta_updates"));
    let repetitions = args.next().map_or(10, |a| a.parse().expect("repetitions"));

    let mut base = ExperimentConfig::default();
    base.meta.meta_updates = meta_updates;
    let plan = ExperimentPlan {
        base,
        variants: vec![
            Variant::meta("BSML", 5, SamplerKind::Cl, false),
            Variant::baseline("Plain", Method::Plain),
        ],
        repetitions,
    };
    let out = run_sweep(&plan, None)?;
    let meta = out.test_aucs(0);
    let plain = out.test_aucs(1);
    let mut wins = 0;
    for (r, (m, p)) in meta.iter().zip(&plain).enumerate() {
        if m > p {
            wins += 1;
        }
        println!("rep {r}: meta {m:.4}  plain {p:.4}  gap {:+.4}", m - p);
    }
    let gap = meta.iter().zip(&plain).map(|(m, p)| m - p).sum::<f64>() / meta.len() as f64;
    println!("meta wins {wins}/{}  mean gap {gap:+.4}", meta.len());
    print!("{}", out.table.render());
    Ok(())
}
