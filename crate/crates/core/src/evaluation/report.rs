use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::{
    accuracy, fidelity, group_by_difficulty, macro_f1, top_l_accuracy, ClassScores, DifficultyGroups, PredictionSet,
};
use super::significance::{macro_t_test, mcnemar_test, stars, McNemar, MacroTTest};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopL {
    pub l: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub num_documents: usize,
    pub num_classes: usize,
    pub accuracy: f64,
    pub top_l: Vec<TopL>,
    pub macro_f1: f64,
    pub per_class: Vec<ClassScores>,
    pub difficulty: Option<DifficultyGroups>,
    /// Agreement with a reference model, when one was given.
    pub fidelity: Option<f64>,
}

impl MetricsReport {
    /// Computes every measure. Values of `ls` larger than the number of
    /// classes are skipped.
    pub fn new(preds: &PredictionSet, ls: &[usize], class_counts: Option<&[usize]>) -> Result<Self> {
        let f1 = macro_f1(preds);
        let top_l = ls
            .iter()
            .filter(|&&l| l <= preds.num_classes())
            .map(|&l| Ok(TopL { l, accuracy: top_l_accuracy(preds, l)? }))
            .collect::<Result<Vec<_>>>()?;
        let difficulty = class_counts.map(|c| group_by_difficulty(&f1, c)).transpose()?;
        Ok(Self {
            num_documents: preds.len(),
            num_classes: preds.num_classes(),
            accuracy: accuracy(preds),
            top_l,
            macro_f1: f1.macro_f1,
            per_class: f1.per_class,
            difficulty,
            fidelity: None,
        })
    }

    pub fn with_fidelity(mut self, preds: &PredictionSet, reference: &PredictionSet) -> Result<Self> {
        self.fidelity = Some(fidelity(preds, reference)?);
        Ok(self)
    }
}

/// One model measured against the reference model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub model: String,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub mcnemar: McNemar,
    pub t_test: MacroTTest,
    /// One-sided p in the direction of the observed accuracy difference.
    pub accuracy_p: f64,
    /// One-sided p in the direction of the observed macro F1 difference.
    pub macro_f1_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceTable {
    pub reference: String,
    pub reference_accuracy: f64,
    pub reference_macro_f1: f64,
    pub rows: Vec<Comparison>,
}

pub fn compare_to_reference(
    reference_name: &str,
    reference: &PredictionSet,
    models: &[(String, PredictionSet)],
) -> Result<SignificanceTable> {
    let ref_f1 = macro_f1(reference);
    let ref_correct = reference.correctness();
    let ref_acc = accuracy(reference);
    let rows = models
        .iter()
        .map(|(name, p)| {
            if p.labels() != reference.labels() || p.num_classes() != reference.num_classes() {
                return Err(Error::data(format!(
                    "{name} was not evaluated on the same documents as {reference_name}"
                )));
            }
            let f1 = macro_f1(p);
            let acc = accuracy(p);
            let mcnemar = mcnemar_test(&p.correctness(), &ref_correct)?;
            let a: Vec<f64> = f1.per_class.iter().map(|c| c.f1).collect();
            let b: Vec<f64> = ref_f1.per_class.iter().map(|c| c.f1).collect();
            let t_test = macro_t_test(&a, &b)?;
            let accuracy_p = if acc >= ref_acc { mcnemar.p_greater } else { mcnemar.p_less };
            let macro_f1_p = if t_test.mean_difference >= 0.0 {
                t_test.p_greater
            } else {
                t_test.p_less
            };
            Ok(Comparison {
                model: name.clone(),
                accuracy: acc,
                macro_f1: f1.macro_f1,
                mcnemar,
                t_test,
                accuracy_p,
                macro_f1_p,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SignificanceTable {
        reference: reference_name.to_string(),
        reference_accuracy: ref_acc,
        reference_macro_f1: ref_f1.macro_f1,
        rows,
    })
}

impl SignificanceTable {
    /// Plain-text table; asterisks mark significance against the reference
    /// at p < 1e-2 (*), 1e-3 (**), 1e-4 (***).
    pub fn render(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.model.len())
            .chain([self.reference.len(), 5])
            .max()
            .unwrap_or(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>8}     {:>8}", "model", "accuracy", "macro F1");
        let _ = writeln!(
            out,
            "{:<width$}  {:>8.1}     {:>8.1}",
            self.reference,
            100.0 * self.reference_accuracy,
            100.0 * self.reference_macro_f1
        );
        for r in &self.rows {
            let line = format!(
                "{:<width$}  {:>8.1}{:<3}  {:>8.1}{:<3}",
                r.model,
                100.0 * r.accuracy,
                stars(r.accuracy_p),
                100.0 * r.macro_f1,
                stars(r.macro_f1_p)
            );
            let _ = writeln!(out, "{}", line.trim_end());
        }
        let _ = writeln!(
            out,
            "significance against {}: * p<1e-2, ** p<1e-3, *** p<1e-4 (McNemar for accuracy, macro t-test for F1)",
            self.reference
        );
        out
    }
}
