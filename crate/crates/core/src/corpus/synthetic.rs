//! Seeded keyword corpora with known ground truth.
//!
//! Every document mixes a handful of its class's signal keywords into noise
//! drawn from a shared vocabulary, so a bag-of-words classifier can separate
//! the classes perfectly and interpretability can be scored against the
//! planted keywords.

use std::collections::{BTreeSet, HashSet};

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::RawRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocCounts {
    Uniform(usize),
    PerClass(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub num_classes: usize,
    pub keywords_per_class: usize,
    pub docs: DocCounts,
    /// Inclusive range for the number of noise tokens per document.
    pub noise_len: (usize, usize),
    /// Inclusive range for the number of keyword occurrences per document.
    pub keywords_per_doc: (usize, usize),
    /// Inclusive range of words per sentence; each sentence ends with a period.
    pub sentence_len: (usize, usize),
    pub noise_vocab: usize,
    /// Replaces the generated keyword sets when present (one list per class).
    #[serde(default)]
    pub custom_keywords: Option<Vec<Vec<String>>>,
    /// Largest tolerated |K_a ∩ K_b| / min(|K_a|, |K_b|) before a warning is recorded.
    pub max_keyword_overlap: f64,
    pub docs_per_day: usize,
    pub start_date: NaiveDate,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            num_classes: 61,
            keywords_per_class: 3,
            docs: DocCounts::Uniform(100),
            noise_len: (6, 16),
            keywords_per_doc: (1, 3),
            sentence_len: (3, 7),
            noise_vocab: 300,
            custom_keywords: None,
            max_keyword_overlap: 0.0,
            docs_per_day: 3,
            start_date: NaiveDate::from_ymd_opt(2004, 1, 1).expect("valid date"),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticMetadata {
    pub seed: u64,
    pub labels: Vec<String>,
    /// Uppercase keywords per class, in label order.
    pub keywords: Vec<Vec<String>>,
    pub max_overlap: f64,
    pub warnings: Vec<String>,
}

impl SyntheticMetadata {
    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_keyword_of(&self, class: usize, token: &str) -> bool {
        self.keywords[class].iter().any(|k| k == token)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub records: Vec<RawRecord>,
    pub metadata: SyntheticMetadata,
}

const ONSETS: &[&str] = &[
    "b", "c", "d", "f", "g", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr", "st", "gl",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u"];

fn pseudo_word(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.random_range(2..=4);
    (0..syllables)
        .map(|_| {
            let o = ONSETS[rng.random_range(0..ONSETS.len())];
            let v = VOWELS[rng.random_range(0..VOWELS.len())];
            format!("{o}{v}")
        })
        .collect()
}

fn check_range(name: &str, r: (usize, usize), min: usize) -> Result<()> {
    if r.0 > r.1 || r.0 < min {
        return Err(Error::contract(format!("{name} range {r:?} is invalid")));
    }
    Ok(())
}

fn keyword_overlap(sets: &[Vec<String>]) -> f64 {
    let sets: Vec<HashSet<&String>> = sets.iter().map(|s| s.iter().collect()).collect();
    let mut worst: f64 = 0.0;
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            let denom = sets[a].len().min(sets[b].len());
            if denom == 0 {
                continue;
            }
            let inter = sets[a].intersection(&sets[b]).count();
            worst = worst.max(inter as f64 / denom as f64);
        }
    }
    worst
}

/// Generates a corpus; identical specs yield identical output.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    let k = spec.num_classes;
    if k < 2 {
        return Err(Error::contract("a synthetic corpus needs at least 2 classes"));
    }
    check_range("noise_len", spec.noise_len, 0)?;
    check_range("keywords_per_doc", spec.keywords_per_doc, 1)?;
    check_range("sentence_len", spec.sentence_len, 1)?;
    if spec.docs_per_day == 0 {
        return Err(Error::contract("docs_per_day must be positive"));
    }
    let counts = match &spec.docs {
        DocCounts::Uniform(n) => vec![*n; k],
        DocCounts::PerClass(v) if v.len() == k => v.clone(),
        DocCounts::PerClass(v) => {
            return Err(Error::contract(format!(
                "{} per-class counts for {k} classes",
                v.len()
            )))
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let n_generated_kw = if spec.custom_keywords.is_some() {
        0
    } else {
        if spec.keywords_per_class == 0 {
            return Err(Error::contract("keywords_per_class must be positive"));
        }
        k * spec.keywords_per_class
    };
    let mut seen = BTreeSet::new();
    let mut pool = Vec::with_capacity(n_generated_kw + spec.noise_vocab);
    if let Some(custom) = &spec.custom_keywords {
        for w in custom.iter().flatten() {
            seen.insert(w.to_lowercase());
        }
    }
    while pool.len() < n_generated_kw + spec.noise_vocab {
        let w = pseudo_word(&mut rng);
        if seen.insert(w.clone()) {
            pool.push(w);
        }
    }
    let (kw_pool, noise) = pool.split_at(n_generated_kw);
    if noise.is_empty() && spec.noise_len.1 > 0 {
        return Err(Error::contract("noise tokens requested with an empty noise vocabulary"));
    }

    let keywords: Vec<Vec<String>> = match &spec.custom_keywords {
        Some(custom) if custom.len() == k => custom
            .iter()
            .map(|ws| ws.iter().map(|w| w.to_lowercase()).collect())
            .collect(),
        Some(custom) => {
            return Err(Error::contract(format!(
                "{} custom keyword sets for {k} classes",
                custom.len()
            )))
        }
        None => kw_pool
            .chunks(spec.keywords_per_class)
            .map(<[String]>::to_vec)
            .collect(),
    };
    if keywords.iter().any(Vec::is_empty) {
        return Err(Error::contract("every class needs at least one keyword"));
    }

    let max_overlap = keyword_overlap(&keywords);
    let mut warnings = Vec::new();
    if max_overlap > spec.max_keyword_overlap {
        warnings.push(format!(
            "keyword sets overlap up to {max_overlap:.3}, above the configured {:.3}",
            spec.max_keyword_overlap
        ));
    }

    let width = (k - 1).to_string().len().max(2);
    let labels: Vec<String> = (0..k).map(|c| format!("C{c:0width$}")).collect();

    let mut docs: Vec<(usize, String)> = Vec::with_capacity(counts.iter().sum());
    for (c, &n) in counts.iter().enumerate() {
        for _ in 0..n {
            let len = rng.random_range(spec.noise_len.0..=spec.noise_len.1);
            let mut words: Vec<&str> = (0..len)
                .map(|_| noise[rng.random_range(0..noise.len())].as_str())
                .collect();
            let m = rng.random_range(spec.keywords_per_doc.0..=spec.keywords_per_doc.1);
            for _ in 0..m {
                let kw = keywords[c][rng.random_range(0..keywords[c].len())].as_str();
                let pos = rng.random_range(0..=words.len());
                words.insert(pos, kw);
            }
            let mut text = String::new();
            let mut i = 0;
            while i < words.len() {
                let n = rng
                    .random_range(spec.sentence_len.0..=spec.sentence_len.1)
                    .min(words.len() - i);
                if !text.is_empty() {
                    text.push(' ');
                }
                text.push_str(&words[i..i + n].join(" "));
                text.push('.');
                i += n;
            }
            docs.push((c, text));
        }
    }
    docs.shuffle(&mut rng);

    let records = docs
        .into_iter()
        .enumerate()
        .map(|(i, (c, text))| {
            let date = spec.start_date + Days::new((i / spec.docs_per_day) as u64);
            RawRecord::with_diagnosis(text, Some(labels[c].clone()), date)
        })
        .collect();

    Ok(SyntheticCorpus {
        records,
        metadata: SyntheticMetadata {
            seed: spec.seed,
            labels,
            keywords: keywords
                .iter()
                .map(|ws| ws.iter().map(|w| w.to_uppercase()).collect())
                .collect(),
            max_overlap,
            warnings,
        },
    })
}
