use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::argmax;

/// Score vectors and true labels for a set of documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PredictionRepr", into = "PredictionRepr")]
pub struct PredictionSet {
    num_classes: usize,
    scores: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PredictionRepr {
    num_classes: usize,
    labels: Vec<usize>,
    scores: Vec<Vec<f64>>,
}

impl TryFrom<PredictionRepr> for PredictionSet {
    type Error = Error;
    fn try_from(r: PredictionRepr) -> Result<Self> {
        PredictionSet::new(r.scores, r.labels, r.num_classes)
    }
}

impl From<PredictionSet> for PredictionRepr {
    fn from(p: PredictionSet) -> Self {
        PredictionRepr {
            num_classes: p.num_classes,
            labels: p.labels,
            scores: p.scores,
        }
    }
}

impl PredictionSet {
    pub fn new(scores: Vec<Vec<f64>>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::data("prediction set is empty"));
        }
        if scores.len() != labels.len() {
            return Err(Error::contract(format!(
                "{} score vectors but {} labels",
                scores.len(),
                labels.len()
            )));
        }
        if let Some((i, s)) = scores.iter().enumerate().find(|(_, s)| s.len() != num_classes) {
            return Err(Error::contract(format!(
                "score vector {i} has length {}, expected {num_classes}",
                s.len()
            )));
        }
        if let Some(&y) = labels.iter().find(|&&y| y >= num_classes) {
            return Err(Error::data(format!("label {y} out of range for {num_classes} classes")));
        }
        if scores.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::non_finite("prediction scores"));
        }
        Ok(Self {
            num_classes,
            scores,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn scores(&self) -> &[Vec<f64>] {
        &self.scores
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Highest-scoring class per document, lowest index on ties.
    pub fn predicted(&self) -> Vec<usize> {
        self.scores.iter().map(|s| argmax(s)).collect()
    }

    pub fn correctness(&self) -> Vec<bool> {
        self.predicted().iter().zip(&self.labels).map(|(p, y)| p == y).collect()
    }

    fn check_paired(&self, other: &PredictionSet) -> Result<()> {
        if self.len() != other.len() || self.num_classes != other.num_classes {
            return Err(Error::contract(format!(
                "prediction sets differ in shape: {}x{} vs {}x{}",
                self.len(),
                self.num_classes,
                other.len(),
                other.num_classes
            )));
        }
        Ok(())
    }
}

pub fn accuracy(preds: &PredictionSet) -> f64 {
    let hits = preds.correctness().iter().filter(|&&c| c).count();
    hits as f64 / preds.len() as f64
}

/// Classes ordered by descending score, lower index first on ties.
pub fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

/// Fraction of documents whose label is among the `l` highest-scoring classes.
pub fn top_l_accuracy(preds: &PredictionSet, l: usize) -> Result<f64> {
    if l == 0 || l > preds.num_classes {
        return Err(Error::contract(format!(
            "top-l needs 1 <= l <= {}, got {l}",
            preds.num_classes
        )));
    }
    let hits = preds
        .scores
        .iter()
        .zip(&preds.labels)
        .filter(|(s, y)| ranking(s)[..l].contains(y))
        .count();
    Ok(hits as f64 / preds.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Documents whose true label is this class.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F1Report {
    pub macro_f1: f64,
    pub per_class: Vec<ClassScores>,
}

/// Per-class precision, recall, F1 and their macro average.
///
/// Undefined ratios (0/0) count as 0.
pub fn macro_f1_from_labels(labels: &[usize], predicted: &[usize], num_classes: usize) -> Result<F1Report> {
    if labels.len() != predicted.len() {
        return Err(Error::contract("label and prediction lists differ in length"));
    }
    if labels.iter().chain(predicted).any(|&c| c >= num_classes) {
        return Err(Error::data(format!("class index out of range for {num_classes} classes")));
    }
    let mut tp = vec![0usize; num_classes];
    let mut fp = vec![0usize; num_classes];
    let mut fn_ = vec![0usize; num_classes];
    for (&y, &p) in labels.iter().zip(predicted) {
        if y == p {
            tp[y] += 1;
        } else {
            fp[p] += 1;
            fn_[y] += 1;
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let per_class: Vec<ClassScores> = (0..num_classes)
        .map(|k| {
            let precision = ratio(tp[k], tp[k] + fp[k]);
            let recall = ratio(tp[k], tp[k] + fn_[k]);
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ClassScores {
                precision,
                recall,
                f1,
                support: tp[k] + fn_[k],
            }
        })
        .collect();
    let macro_f1 = per_class.iter().map(|c| c.f1).sum::<f64>() / num_classes as f64;
    Ok(F1Report { macro_f1, per_class })
}

pub fn macro_f1(preds: &PredictionSet) -> F1Report {
    macro_f1_from_labels(&preds.labels, &preds.predicted(), preds.num_classes).expect("validated prediction set")
}

/// Fraction of documents on which two models predict the same class.
pub fn fidelity(a: &PredictionSet, b: &PredictionSet) -> Result<f64> {
    a.check_paired(b)?;
    let same = a.predicted().iter().zip(b.predicted()).filter(|(x, y)| **x == *y).count();
    Ok(same as f64 / a.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Average,
    Hard,
}

impl Difficulty {
    /// More than 1000 test examples is easy, 100 to 1000 average, fewer than 100 hard.
    pub fn of_count(count: usize) -> Self {
        match count {
            c if c > 1000 => Difficulty::Easy,
            c if c >= 100 => Difficulty::Average,
            _ => Difficulty::Hard,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScore {
    pub classes: Vec<usize>,
    pub macro_f1: f64,
}

/// Macro F1 within each difficulty group; a group without classes is `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultyGroups {
    pub easy: Option<GroupScore>,
    pub average: Option<GroupScore>,
    pub hard: Option<GroupScore>,
}

impl DifficultyGroups {
    pub fn get(&self, d: Difficulty) -> Option<&GroupScore> {
        match d {
            Difficulty::Easy => self.easy.as_ref(),
            Difficulty::Average => self.average.as_ref(),
            Difficulty::Hard => self.hard.as_ref(),
        }
    }
}

/// Groups classes by their test-set frequency and averages per-class F1
/// within each group.
pub fn group_by_difficulty(f1: &F1Report, class_counts: &[usize]) -> Result<DifficultyGroups> {
    if class_counts.len() != f1.per_class.len() {
        return Err(Error::contract(format!(
            "{} class counts for {} classes",
            class_counts.len(),
            f1.per_class.len()
        )));
    }
    let group = |d: Difficulty| {
        let classes: Vec<usize> = (0..class_counts.len())
            .filter(|&k| Difficulty::of_count(class_counts[k]) == d)
            .collect();
        if classes.is_empty() {
            return None;
        }
        let sum: f64 = classes.iter().map(|&k| f1.per_class[k].f1).sum();
        Some(GroupScore {
            macro_f1: sum / classes.len() as f64,
            classes,
        })
    };
    Ok(DifficultyGroups {
        easy: group(Difficulty::Easy),
        average: group(Difficulty::Average),
        hard: group(Difficulty::Hard),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(scores: Vec<Vec<f64>>, labels: Vec<usize>) -> PredictionSet {
        let k = scores[0].len();
        PredictionSet::new(scores, labels, k).unwrap()
    }

    #[test]
    fn accuracy_counts() {
        let p = set(
            vec![vec![0.9, 0.1], vec![0.2, 0.8], vec![0.6, 0.4], vec![0.3, 0.7]],
            vec![0, 1, 0, 0],
        );
        assert_eq!(accuracy(&p), 0.75);
        assert_eq!(p.predicted(), vec![0, 1, 0, 1]);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let p = set(vec![vec![0.5, 0.5, 0.0]], vec![1]);
        assert_eq!(accuracy(&p), 0.0);
        assert_eq!(top_l_accuracy(&p, 1).unwrap(), 0.0);
        assert_eq!(top_l_accuracy(&p, 2).unwrap(), 1.0);
        assert_eq!(ranking(&[0.1, 0.3, 0.3]), vec![1, 2, 0]);
    }

    #[test]
    fn top_l_examples() {
        let p = set(vec![vec![0.5, 0.3, 0.2]], vec![1]);
        assert_eq!(top_l_accuracy(&p, 2).unwrap(), 1.0);
        assert_eq!(top_l_accuracy(&p, 3).unwrap(), 1.0);
        assert!(top_l_accuracy(&p, 0).is_err());
        assert!(top_l_accuracy(&p, 4).is_err());
    }

    #[test]
    fn hand_checked_f1() {
        let r = macro_f1_from_labels(&[0, 0, 1, 1], &[0, 1, 1, 1], 2).unwrap();
        assert_eq!(r.per_class[0].precision, 1.0);
        assert_eq!(r.per_class[0].recall, 0.5);
        assert!((r.per_class[1].f1 - 0.8).abs() < 1e-15);
        assert!((r.macro_f1 - 11.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn never_predicted_class_scores_zero() {
        let r = macro_f1_from_labels(&[0, 1, 2], &[0, 0, 0], 3).unwrap();
        assert_eq!(r.per_class[1].precision, 0.0);
        assert_eq!(r.per_class[1].f1, 0.0);
        assert_eq!(r.per_class[1].support, 1);
    }

    #[test]
    fn fidelity_cases() {
        let a = set(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0, 0]);
        let b = set(vec![vec![1.0, 0.0], vec![1.0, 0.0]], vec![0, 0]);
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.5);
        let c = set(vec![vec![1.0, 0.0]], vec![0]);
        assert!(fidelity(&a, &c).is_err());
    }

    #[test]
    fn difficulty_boundaries() {
        assert_eq!(Difficulty::of_count(1001), Difficulty::Easy);
        assert_eq!(Difficulty::of_count(1000), Difficulty::Average);
        assert_eq!(Difficulty::of_count(100), Difficulty::Average);
        assert_eq!(Difficulty::of_count(99), Difficulty::Hard);
    }

    #[test]
    fn single_hard_group_equals_overall() {
        let r = macro_f1_from_labels(&[0, 1, 2, 2], &[0, 2, 2, 1], 3).unwrap();
        let g = group_by_difficulty(&r, &[50, 50, 50]).unwrap();
        assert!(g.easy.is_none() && g.average.is_none());
        assert_eq!(g.hard.unwrap().macro_f1, r.macro_f1);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(PredictionSet::new(vec![vec![0.0, 1.0]], vec![2], 2).is_err());
        assert!(PredictionSet::new(vec![vec![0.0]], vec![0], 2).is_err());
        assert!(PredictionSet::new(vec![], vec![], 2).is_err());
        assert!(PredictionSet::new(vec![vec![f64::NAN, 1.0]], vec![0], 2).is_err());
    }

    #[test]
    fn serde_roundtrip() {
        let p = set(vec![vec![0.25, 0.75]], vec![1]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<PredictionSet>(&s).unwrap(), p);
        assert!(serde_json::from_str::<PredictionSet>(r#"{"num_classes":2,"labels":[5],"scores":[[0,1]]}"#).is_err());
    }
}
