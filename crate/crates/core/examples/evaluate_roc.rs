//! Metrics from scores: confusion matrix, precision/recall/F1 in both
//! averaging modes, the ROC curve as CSV, AUC and MAE.
//!
//! cargo run --example evaluate_roc

use qeeg::eval::{
    auc, classification_metrics, confusion_matrix, evaluate, mae, roc_curve, Averaging,
};

fn main() -> qeeg::Result<()> {
    let truth = [1, 1, 0, 1, 0, 0, 1, 0, 1, 0];
    let p_pos = [0.92, 0.81, 0.74, 0.66, 0.55, 0.41, 0.38, 0.22, 0.71, 0.05];
    let predicted: Vec<usize> = p_pos.iter().map(|&p| usize::from(p > 0.5)).collect();

    let cm = confusion_matrix(&truth, &predicted, 2)?;
    println!("confusion {:?}", cm.counts());
    for averaging in [Averaging::BinaryPositive, Averaging::Macro] {
        let m = classification_metrics(&cm, averaging)?;
        println!("{averaging:?}: {m:?}");
    }

    let positive: Vec<bool> = truth.iter().map(|&t| t == 1).collect();
    let curve = roc_curve(&p_pos, &positive)?;
    println!("\nROC CSV:");
    curve.write_csv(std::io::stdout().lock())?;
    println!("AUC {:.4}", auc(&curve));

    let probs: Vec<Vec<f64>> = p_pos.iter().map(|&p| vec![1.0 - p, p]).collect();
    println!("MAE {:.4}", mae(&probs, &truth)?);
    println!("\n{}", evaluate(&probs, &truth, 2, Averaging::BinaryPositive)?);
    Ok(())
}
