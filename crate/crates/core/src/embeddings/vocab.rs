use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub const UNK_TOKEN: &str = "<UNK>";
pub const UNK: usize = 0;

/// Token/index bijection over tokens seen at least `min_count` times.
///
/// Index 0 is reserved for [`UNK_TOKEN`]; its count is the total number of
/// dropped occurrences. Remaining tokens are ordered by descending count,
/// then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "VocabRepr", into = "VocabRepr")]
pub struct Vocabulary {
    index: HashMap<String, usize>,
    tokens: Vec<String>,
    counts: Vec<u64>,
    min_count: u64,
}

#[derive(Serialize, Deserialize)]
struct VocabRepr {
    min_count: u64,
    tokens: Vec<String>,
    counts: Vec<u64>,
}

impl From<VocabRepr> for Vocabulary {
    fn from(r: VocabRepr) -> Self {
        let index = r
            .tokens
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self {
            index,
            tokens: r.tokens,
            counts: r.counts,
            min_count: r.min_count,
        }
    }
}

impl From<Vocabulary> for VocabRepr {
    fn from(v: Vocabulary) -> Self {
        Self {
            min_count: v.min_count,
            tokens: v.tokens,
            counts: v.counts,
        }
    }
}

impl Vocabulary {
    pub fn build<'a, I, D>(docs: I, min_count: u64) -> Self
    where
        I: IntoIterator<Item = D>,
        D: IntoIterator<Item = &'a String>,
    {
        let mut freq: HashMap<&'a String, u64> = HashMap::new();
        for doc in docs {
            for t in doc {
                *freq.entry(t).or_default() += 1;
            }
        }
        let mut kept: Vec<(&String, u64)> = Vec::new();
        let mut dropped = 0;
        for (t, c) in freq {
            if c >= min_count && t != UNK_TOKEN {
                kept.push((t, c));
            } else {
                dropped += c;
            }
        }
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let mut tokens = vec![UNK_TOKEN.to_string()];
        let mut counts = vec![dropped];
        for (t, c) in kept {
            tokens.push(t.clone());
            counts.push(c);
        }
        VocabRepr {
            min_count,
            tokens,
            counts,
        }
        .into()
    }

    /// A vocabulary over an explicit token list, every count set to 1.
    pub fn from_tokens<I: IntoIterator<Item = String>>(tokens: I) -> Self {
        let mut list = vec![UNK_TOKEN.to_string()];
        for t in tokens {
            if t != UNK_TOKEN && !list.contains(&t) {
                list.push(t);
            }
        }
        let counts = vec![1; list.len()];
        VocabRepr {
            min_count: 1,
            tokens: list,
            counts,
        }
        .into()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.len() <= 1
    }

    /// Index of `token`, or [`UNK`].
    pub fn index(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(UNK)
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, i: usize) -> &str {
        &self.tokens[i]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i]
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn encode(&self, tokens: &[String]) -> Vec<usize> {
        tokens.iter().map(|t| self.index(t)).collect()
    }
}
