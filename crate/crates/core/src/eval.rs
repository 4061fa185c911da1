//! Classification metrics: confusion matrix, accuracy/precision/recall/F1,
//! ROC curve with trapezoidal AUC, and probability MAE.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }

    fn column_sum(&self, c: usize) -> u64 {
        self.counts.iter().map(|row| row[c]).sum()
    }

    fn row_sum(&self, r: usize) -> u64 {
        self.counts[r].iter().sum()
    }
}

pub fn confusion_matrix(true_labels: &[usize], predicted: &[usize], n_classes: usize) -> Result<ConfusionMatrix> {
    if true_labels.len() != predicted.len() {
        return Err(Error::Shape(format!(
            "{} true labels but {} predictions",
            true_labels.len(),
            predicted.len()
        )));
    }
    let mut counts = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in true_labels.iter().zip(predicted) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::Input(format!("label pair ({t}, {p}) out of range for {n_classes} classes")));
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Class 1 is the positive class of a 2-class problem.
    #[default]
    BinaryPositive,
    /// Unweighted mean of per-class precision, recall and F1.
    Macro,
}

impl std::str::FromStr for Averaging {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" | "binary_positive" => Ok(Averaging::BinaryPositive),
            "macro" => Ok(Averaging::Macro),
            other => Err(Error::Config(format!("unknown averaging '{other}' (binary|macro)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Zero denominators yield 0 for that quantity.
pub fn classification_metrics(cm: &ConfusionMatrix, averaging: Averaging) -> Result<ClassificationMetrics> {
    if cm.total() == 0 {
        return Err(Error::Input("confusion matrix is empty".into()));
    }
    let accuracy = ratio(cm.trace(), cm.total());
    let per_class = |c: usize| {
        let tp = cm.get(c, c);
        let p = ratio(tp, cm.column_sum(c));
        let r = ratio(tp, cm.row_sum(c));
        (p, r, harmonic(p, r))
    };
    let (precision, recall, f1) = match averaging {
        Averaging::BinaryPositive => {
            if cm.n_classes() != 2 {
                return Err(Error::Config(format!(
                    "binary averaging needs 2 classes, matrix has {}",
                    cm.n_classes()
                )));
            }
            per_class(1)
        }
        Averaging::Macro => {
            let k = cm.n_classes() as f64;
            (0..cm.n_classes()).map(per_class).fold((0.0, 0.0, 0.0), |acc, (p, r, f)| {
                (acc.0 + p / k, acc.1 + r / k, acc.2 + f / k)
            })
        }
    };
    Ok(ClassificationMetrics {
        accuracy,
        precision,
        recall,
        f1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub false_positive_rate: f64,
    pub true_positive_rate: f64,
    /// Score at or above which samples are called positive.
    pub threshold: f64,
}

/// From `(0, 0)` to `(1, 1)`, non-decreasing in both rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// Writes `fpr,tpr,threshold` rows; the leading point's threshold is `inf`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "fpr,tpr,threshold")?;
        for p in &self.points {
            writeln!(
                out,
                "{:.17e},{:.17e},{}",
                p.false_positive_rate,
                p.true_positive_rate,
                if p.threshold.is_infinite() {
                    "inf".to_string()
                } else {
                    format!("{:.17e}", p.threshold)
                }
            )?;
        }
        Ok(())
    }
}

/// Threshold sweep over distinct scores, highest first; tied scores move
/// together.
pub fn roc_curve(positive_scores: &[f64], is_positive: &[bool]) -> Result<RocCurve> {
    if positive_scores.len() != is_positive.len() {
        return Err(Error::Shape(format!(
            "{} scores but {} labels",
            positive_scores.len(),
            is_positive.len()
        )));
    }
    if positive_scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Input("scores must not be NaN".into()));
    }
    let n_pos = is_positive.iter().filter(|&&p| p).count();
    let n_neg = is_positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Input("ROC curve is undefined unless both classes are present".into()));
    }
    let mut order: Vec<usize> = (0..positive_scores.len()).collect();
    order.sort_by(|&a, &b| positive_scores[b].total_cmp(&positive_scores[a]));

    let mut points = vec![RocPoint {
        false_positive_rate: 0.0,
        true_positive_rate: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let score = positive_scores[order[i]];
        while i < order.len() && positive_scores[order[i]] == score {
            if is_positive[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            false_positive_rate: fp as f64 / n_neg as f64,
            true_positive_rate: tp as f64 / n_pos as f64,
            threshold: score,
        });
    }
    let last = points[points.len() - 1];
    if last.false_positive_rate != 1.0 || last.true_positive_rate != 1.0 {
        points.push(RocPoint {
            false_positive_rate: 1.0,
            true_positive_rate: 1.0,
            threshold: f64::NEG_INFINITY,
        });
    }
    Ok(RocCurve { points })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| {
            (w[1].false_positive_rate - w[0].false_positive_rate) * (w[1].true_positive_rate + w[0].true_positive_rate)
                / 2.0
        })
        .sum()
}

/// Mean of `|p_c − onehot_c|` over samples and classes.
pub fn mae(probabilities: &[Vec<f64>], true_labels: &[usize]) -> Result<f64> {
    if probabilities.len() != true_labels.len() {
        return Err(Error::Shape(format!(
            "{} probability vectors but {} labels",
            probabilities.len(),
            true_labels.len()
        )));
    }
    if probabilities.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for (p, &label) in probabilities.iter().zip(true_labels) {
        if label >= p.len() {
            return Err(Error::Input(format!("label {label} out of range for {} classes", p.len())));
        }
        for (c, &pc) in p.iter().enumerate() {
            let target = if c == label { 1.0 } else { 0.0 };
            total += (pc - target).abs();
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// Index of the largest probability; ties go to the lowest index.
pub fn argmax(probabilities: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p > probabilities[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_samples: usize,
    pub averaging: Averaging,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: ConfusionMatrix,
    /// Present for 2-class problems with both classes in the evaluated set.
    pub auc: Option<f64>,
    pub mae: f64,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples:   {}", self.n_samples)?;
        writeln!(f, "averaging: {:?}", self.averaging)?;
        writeln!(f, "accuracy:  {:.4}", self.accuracy)?;
        writeln!(f, "precision: {:.4}", self.precision)?;
        writeln!(f, "recall:    {:.4}", self.recall)?;
        writeln!(f, "f1:        {:.4}", self.f1)?;
        match self.auc {
            Some(a) => writeln!(f, "auc:       {a:.4}")?,
            None => writeln!(f, "auc:       n/a")?,
        }
        writeln!(f, "mae:       {:.4}", self.mae)?;
        writeln!(f, "confusion (rows = true, cols = predicted):")?;
        for row in self.confusion.counts() {
            let cells: Vec<String> = row.iter().map(|c| format!("{c:>6}")).collect();
            writeln!(f, "  {}", cells.join(""))?;
        }
        Ok(())
    }
}

/// Full report from predicted class probabilities.
pub fn evaluate(probabilities: &[Vec<f64>], true_labels: &[usize], n_classes: usize, averaging: Averaging) -> Result<EvalReport> {
    if let Some(p) = probabilities.iter().find(|p| p.len() != n_classes) {
        return Err(Error::Shape(format!("probability vector of length {} for {n_classes} classes", p.len())));
    }
    let predicted: Vec<usize> = probabilities.iter().map(|p| argmax(p)).collect();
    let cm = confusion_matrix(true_labels, &predicted, n_classes)?;
    let m = classification_metrics(&cm, averaging)?;
    let auc = if n_classes == 2 {
        let scores: Vec<f64> = probabilities.iter().map(|p| p[1]).collect();
        let positive: Vec<bool> = true_labels.iter().map(|&l| l == 1).collect();
        roc_curve(&scores, &positive).ok().map(|c| auc(&c))
    } else {
        None
    };
    Ok(EvalReport {
        n_samples: true_labels.len(),
        averaging,
        accuracy: m.accuracy,
        precision: m.precision,
        recall: m.recall,
        f1: m.f1,
        confusion: cm,
        auc,
        mae: mae(probabilities, true_labels)?,
    })
}
