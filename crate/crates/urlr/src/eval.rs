//! Ranking-agreement and outlier-detection metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lasso::OutlierPath;

/// Metrics for one evaluated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Fraction of item pairs ordered discordantly against the truth, in [0, 1].
    pub kendall_distance: f64,
    /// `1 - 2 * kendall_distance`, in [-1, 1].
    pub kendall_correlation: f64,
    pub n_pairs_evaluated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tpr_fpr: Option<Vec<RocPoint>>,
}

/// One point on the detection ROC curve, taken after `rank` edges are cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub rank: usize,
    pub tpr: f64,
    pub fpr: f64,
}

fn pair_term(pred_a: f64, pred_b: f64, truth_a: f64, truth_b: f64) -> Option<f64> {
    if truth_a == truth_b {
        return None; // no ground-truth preference to violate
    }
    if pred_a == pred_b {
        return Some(0.5);
    }
    let agree = (pred_a < pred_b) == (truth_a < truth_b);
    Some(if agree { 0.0 } else { 1.0 })
}

/// Fraction of item pairs whose predicted order disagrees with the truth.
///
/// Predicted ties count half a disagreement; pairs tied in the truth are
/// excluded from the denominator.
pub fn kendall_distance(pred_scores: &[f64], truth_scores: &[f64]) -> Result<f64> {
    if pred_scores.len() != truth_scores.len() {
        return Err(Error::DimensionMismatch {
            context: "kendall: prediction vs truth length".into(),
            expected: truth_scores.len(),
            found: pred_scores.len(),
        });
    }
    let n = pred_scores.len();
    if n < 2 {
        return Err(Error::TooFewItems(n));
    }
    let mut discordant = 0.0;
    let mut total = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(term) = pair_term(
                pred_scores[i],
                pred_scores[j],
                truth_scores[i],
                truth_scores[j],
            ) {
                discordant += term;
                total += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::DegenerateTruth(
            "all ground-truth pairs are tied".into(),
        ));
    }
    Ok(discordant / total as f64)
}

/// `1 - 2 * kendall_distance`.
pub fn kendall_correlation(pred_scores: &[f64], truth_scores: &[f64]) -> Result<f64> {
    Ok(1.0 - 2.0 * kendall_distance(pred_scores, truth_scores)?)
}

/// Disagreement restricted to an explicit pair list (held-out evaluation).
pub fn pair_disagreement(
    pred_scores: &[f64],
    truth_scores: &[f64],
    pairs: &[(usize, usize)],
) -> Result<f64> {
    if pred_scores.len() != truth_scores.len() {
        return Err(Error::DimensionMismatch {
            context: "kendall: prediction vs truth length".into(),
            expected: truth_scores.len(),
            found: pred_scores.len(),
        });
    }
    let mut discordant = 0.0;
    let mut total = 0usize;
    for &(i, j) in pairs {
        if let Some(term) = pair_term(
            pred_scores[i],
            pred_scores[j],
            truth_scores[i],
            truth_scores[j],
        ) {
            discordant += term;
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::DegenerateTruth(
            "no untied pairs to evaluate".into(),
        ));
    }
    Ok(discordant / total as f64)
}

/// Distance, correlation and pair count in one report (no detection part).
pub fn kendall_report(pred_scores: &[f64], truth_scores: &[f64]) -> Result<EvalReport> {
    let distance = kendall_distance(pred_scores, truth_scores)?;
    let n = pred_scores.len();
    let tied = {
        let mut t = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                if truth_scores[i] == truth_scores[j] {
                    t += 1;
                }
            }
        }
        t
    };
    Ok(EvalReport {
        kendall_distance: distance,
        kendall_correlation: 1.0 - 2.0 * distance,
        n_pairs_evaluated: n * (n - 1) / 2 - tied,
        auc: None,
        tpr_fpr: None,
    })
}

/// Detection ROC from an outlier ordering.
///
/// The prune cut sweeps along the order; activated edges are strictly
/// ordered, while all never-activated edges share one terminal tie class, so
/// the trapezoid area equals the midrank (tie-aware) AUC.
pub fn outlier_roc(path: &OutlierPath, truth_outliers: &[bool]) -> Result<(f64, Vec<RocPoint>)> {
    let n = path.n_edges();
    if truth_outliers.len() != n {
        return Err(Error::DimensionMismatch {
            context: "roc: truth length vs edges".into(),
            expected: n,
            found: truth_outliers.len(),
        });
    }
    let n_pos = truth_outliers.iter().filter(|&&t| t).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateTruth(format!(
            "need at least one outlier and one inlier, got {n_pos} positives of {n}"
        )));
    }

    // Tie classes along the order: activated edges singly, the
    // never-activated tail as one block.
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut tail: Vec<usize> = Vec::new();
    for &edge in &path.order {
        if path.activation_lambda[edge] > 0.0 {
            classes.push(vec![edge]);
        } else {
            tail.push(edge);
        }
    }
    if !tail.is_empty() {
        classes.push(tail);
    }

    let mut points = Vec::with_capacity(classes.len());
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut cut = 0usize;
    let mut auc = 0.0;
    let mut prev_tpr = 0.0;
    let mut prev_fpr = 0.0;
    for class in &classes {
        for &edge in class {
            if truth_outliers[edge] {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        cut += class.len();
        let tpr = tp as f64 / n_pos as f64;
        let fpr = fp as f64 / n_neg as f64;
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        points.push(RocPoint {
            rank: cut,
            tpr,
            fpr,
        });
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    Ok((auc, points))
}
