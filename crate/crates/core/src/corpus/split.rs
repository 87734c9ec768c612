use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::Document;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Train,
    Valid,
    Test,
}

impl Part {
    pub const ALL: [Part; 3] = [Part::Train, Part::Valid, Part::Test];

    pub fn file_stem(self) -> &'static str {
        match self {
            Part::Train => "train",
            Part::Valid => "valid",
            Part::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSplit {
    pub train: Vec<Document>,
    pub valid: Vec<Document>,
    pub test: Vec<Document>,
    /// Label string to dense class index in `0..num_classes`.
    pub class_map: BTreeMap<String, usize>,
}

impl CorpusSplit {
    pub fn num_classes(&self) -> usize {
        self.class_map.len()
    }

    pub fn part(&self, part: Part) -> &[Document] {
        match part {
            Part::Train => &self.train,
            Part::Valid => &self.valid,
            Part::Test => &self.test,
        }
    }

    pub fn part_mut(&mut self, part: Part) -> &mut Vec<Document> {
        match part {
            Part::Train => &mut self.train,
            Part::Valid => &mut self.valid,
            Part::Test => &mut self.test,
        }
    }

    /// Class names ordered by index.
    pub fn class_names(&self) -> Vec<String> {
        let mut names = vec![String::new(); self.class_map.len()];
        for (name, &i) in &self.class_map {
            names[i] = name.clone();
        }
        names
    }

    pub fn class_of(&self, doc: &Document) -> Result<usize> {
        let label = doc
            .label
            .as_ref()
            .ok_or_else(|| Error::data("document without a label"))?;
        self.class_map
            .get(label)
            .copied()
            .ok_or_else(|| Error::data(format!("label {label:?} missing from class map")))
    }

    pub fn labels(&self, part: Part) -> Result<Vec<usize>> {
        self.part(part).iter().map(|d| self.class_of(d)).collect()
    }

    /// Number of documents per class index in one part.
    pub fn class_counts(&self, part: Part) -> Result<Vec<usize>> {
        let mut counts = vec![0; self.num_classes()];
        for y in self.labels(part)? {
            counts[y] += 1;
        }
        Ok(counts)
    }
}

/// Keeps, for every distinct token sequence, the earliest-dated document
/// (first in input order on equal dates). Survivors keep their input order.
pub fn deduplicate(docs: Vec<Document>) -> Vec<Document> {
    let mut keep: HashMap<&[String], usize> = HashMap::new();
    for (i, d) in docs.iter().enumerate() {
        keep.entry(d.tokens.as_slice())
            .and_modify(|best| {
                if d.inserted_at < docs[*best].inserted_at {
                    *best = i;
                }
            })
            .or_insert(i);
    }
    let mut survivors: Vec<bool> = vec![false; docs.len()];
    for &i in keep.values() {
        survivors[i] = true;
    }
    docs.into_iter()
        .zip(survivors)
        .filter_map(|(d, s)| s.then_some(d))
        .collect()
}

fn ceil_count(frac: f64, n: usize) -> usize {
    // guard against 0.2 * 15 = 3.0000000000000004
    ((frac * n as f64) - 1e-9).ceil().max(0.0) as usize
}

/// Sorts by (date, input position); the newest `ceil(test_frac * n)` documents
/// form the test set, the `ceil(valid_frac * n)` before them the validation
/// set, and the remainder the training set.
pub fn temporal_split(docs: Vec<Document>, test_frac: f64, valid_frac: f64) -> Result<CorpusSplit> {
    if !(test_frac > 0.0 && test_frac < 1.0 && valid_frac > 0.0 && valid_frac < 1.0)
        || test_frac + valid_frac >= 1.0
    {
        return Err(Error::contract(format!(
            "split fractions must lie in (0,1) and sum below 1 (test {test_frac}, valid {valid_frac})"
        )));
    }
    let n = docs.len();
    if n < 3 {
        return Err(Error::data(format!("need at least 3 documents to split, got {n}")));
    }
    let n_test = ceil_count(test_frac, n);
    let n_valid = ceil_count(valid_frac, n);
    if n_test + n_valid >= n {
        return Err(Error::data(format!(
            "{n} documents leave no training data after a {n_valid}/{n_test} valid/test split"
        )));
    }
    let mut class_map = BTreeMap::new();
    for d in &docs {
        let label = d
            .label
            .as_ref()
            .ok_or_else(|| Error::data("cannot split unlabeled documents"))?;
        class_map.entry(label.clone()).or_insert(0);
    }
    for (i, v) in class_map.values_mut().enumerate() {
        *v = i;
    }

    let mut order: Vec<(usize, Document)> = docs.into_iter().enumerate().collect();
    order.sort_by_key(|(i, d)| (d.inserted_at, *i));
    let mut sorted: Vec<Document> = order.into_iter().map(|(_, d)| d).collect();
    let test = sorted.split_off(n - n_test);
    let valid = sorted.split_off(n - n_test - n_valid);
    Ok(CorpusSplit {
        train: sorted,
        valid,
        test,
        class_map,
    })
}

/// Drops every class with fewer than `min_test` test documents from all
/// three parts and recompacts class indices (label order is preserved).
pub fn filter_rare_classes(split: CorpusSplit, min_test: usize) -> Result<CorpusSplit> {
    let counts = split.class_counts(Part::Test)?;
    let names = split.class_names();
    let kept: BTreeMap<String, usize> = names
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c >= min_test)
        .enumerate()
        .map(|(new, (name, _))| (name.clone(), new))
        .collect();
    if kept.is_empty() {
        return Err(Error::data(format!(
            "no class has at least {min_test} test documents"
        )));
    }
    let retain = |docs: Vec<Document>| -> Vec<Document> {
        docs.into_iter()
            .filter(|d| d.label.as_ref().is_some_and(|l| kept.contains_key(l)))
            .collect()
    };
    Ok(CorpusSplit {
        train: retain(split.train),
        valid: retain(split.valid),
        test: retain(split.test),
        class_map: kept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{Days, NaiveDate};

    fn doc(text: &str, label: &str, day: u64) -> Document {
        Document {
            tokens: text.split(' ').map(str::to_string).collect(),
            sentences: None,
            label: Some(label.to_string()),
            inserted_at: NaiveDate::from_ymd_opt(2000, 1, 1).unwrap() + Days::new(day),
        }
    }

    #[test]
    fn dedup_keeps_earliest() {
        let docs = vec![doc("A B", "x", 5), doc("A B", "y", 2), doc("C", "x", 9)];
        let out = deduplicate(docs);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].label.as_deref(), Some("y"));
        assert_eq!(out[1].tokens, vec!["C".to_string()]);
    }

    #[test]
    fn dedup_three_identical_and_identity() {
        let docs = vec![doc("A", "x", 3), doc("A", "x", 3), doc("A", "x", 1)];
        let out = deduplicate(docs);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].inserted_at, doc("A", "x", 1).inserted_at);

        let distinct = vec![doc("A", "x", 1), doc("B", "x", 0), doc("C", "x", 2)];
        assert_eq!(deduplicate(distinct.clone()), distinct);
    }

    #[test]
    fn split_ten_by_date() {
        // input deliberately out of order
        let docs: Vec<Document> = [4, 9, 1, 7, 2, 10, 3, 6, 8, 5]
            .iter()
            .map(|&d| doc(&format!("T{d}"), "x", d))
            .collect();
        let s = temporal_split(docs, 0.2, 0.2).unwrap();
        let days = |v: &[Document]| -> Vec<String> { v.iter().map(|d| d.tokens[0].clone()).collect() };
        assert_eq!(days(&s.train), vec!["T1", "T2", "T3", "T4", "T5", "T6"]);
        assert_eq!(days(&s.valid), vec!["T7", "T8"]);
        assert_eq!(days(&s.test), vec!["T9", "T10"]);
    }

    #[test]
    fn split_ties_follow_input_order() {
        let docs: Vec<Document> = (0..5).map(|i| doc(&format!("D{i}"), "x", 0)).collect();
        let s = temporal_split(docs, 0.2, 0.2).unwrap();
        assert_eq!((s.train.len(), s.valid.len(), s.test.len()), (3, 1, 1));
        assert_eq!(s.test[0].tokens[0], "D4");
        assert_eq!(s.valid[0].tokens[0], "D3");
    }

    #[test]
    fn split_needs_three_docs() {
        let docs = vec![doc("A", "x", 0), doc("B", "x", 1)];
        assert!(temporal_split(docs, 0.2, 0.2).is_err());
    }

    #[test]
    fn ceil_count_is_robust() {
        assert_eq!(ceil_count(0.2, 15), 3);
        assert_eq!(ceil_count(0.2, 16), 4);
        assert_eq!(ceil_count(0.2, 10), 2);
    }

    #[test]
    fn rare_classes_removed_everywhere() {
        let mut docs = Vec::new();
        // five test docs per class, then one "a" test doc is dropped
        for i in 0..20 {
            docs.push(doc(&format!("A{i}"), "a", i));
        }
        for i in 0..20 {
            docs.push(doc(&format!("B{i}"), "b", i));
        }
        let mut s = temporal_split(docs, 0.25, 0.25).unwrap();
        s.test.retain(|d| d.tokens[0] != "A19");
        let before = s.class_counts(Part::Test).unwrap();
        assert_eq!(before, vec![4, 5]);
        let f = filter_rare_classes(s, 5).unwrap();
        assert_eq!(f.num_classes(), 1);
        assert_eq!(f.class_map["b"], 0);
        for part in Part::ALL {
            assert!(f.part(part).iter().all(|d| d.label.as_deref() == Some("b")));
        }
        assert!(filter_rare_classes(f, 100).is_err());
    }
}
