//! The three AUC estimators agree, ties included.

use meta_curriculum::metrics::{
    compute_auc, observation, pairwise_auc, reward, roc_curve, trapezoidal_auc, ScoredLabels,
};

fn main() -> meta_curriculum::Result<()> {
    let scores = [0.9, 0.8, 0.8, 0.6, 0.55, 0.4, 0.3, 0.3];
    let labels = [1, 1, 0, 1, 0, 0, 1, 0];
    let data = ScoredLabels::new(&scores, &labels)?;

    println!("sorted concordance  {:.6}", compute_auc(&data)?);
    println!("pairwise            {:.6}", pairwise_auc(&data)?);
    println!("trapezoidal ROC     {:.6}", trapezoidal_auc(&data)?);
    for p in roc_curve(&data)? {
        println!(
            "  fpr {:.3}  tpr {:.3}",
            p.false_positive_rate, p.true_positive_rate
        );
    }

    let first = observation(0.72, 0.60)?;
    let second = observation(0.80, 0.74)?;
    println!(
        "observations {:.2} then {:.2}, reward {:+.2}",
        first.value(),
        second.value(),
        reward(second, first).value()
    );
    Ok(())
}
