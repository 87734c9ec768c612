use std::collections::HashMap;

use super::vocab::{Vocabulary, UNK};

/// Symmetric sparse co-occurrence counts, sorted by `(row, col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceTable {
    vocab_size: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl CooccurrenceTable {
    pub fn from_entries(vocab_size: usize, mut entries: Vec<(u32, u32, f64)>) -> Self {
        entries.sort_by_key(|e| (e.0, e.1));
        Self {
            vocab_size,
            entries,
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(i as u32, j as u32), |e| (e.0, e.1))
            .map(|k| self.entries[k].2)
            .unwrap_or(0.0)
    }
}

/// For every pair of in-vocabulary tokens at distance `1 <= d <= window`
/// inside one document, adds `1/d` to both `X[a][b]` and `X[b][a]`.
/// Out-of-vocabulary positions still count towards distances.
pub fn count_cooccurrences<'a, I>(docs: I, vocab: &Vocabulary, window: usize) -> CooccurrenceTable
where
    I: IntoIterator<Item = &'a [String]>,
{
    let mut acc: HashMap<(u32, u32), f64> = HashMap::new();
    for doc in docs {
        let ids = vocab.encode(doc);
        for (s, &a) in ids.iter().enumerate() {
            if a == UNK {
                continue;
            }
            for d in 1..=window {
                let Some(&b) = ids.get(s + d) else { break };
                if b == UNK {
                    continue;
                }
                let w = 1.0 / d as f64;
                *acc.entry((a as u32, b as u32)).or_default() += w;
                *acc.entry((b as u32, a as u32)).or_default() += w;
            }
        }
    }
    CooccurrenceTable::from_entries(vocab.len(), acc.into_iter().map(|((i, j), x)| (i, j, x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split(' ').map(str::to_string).collect()
    }

    #[test]
    fn adjacent_and_distance_two() {
        let d = [toks("A B C")];
        let v = Vocabulary::build(&d, 1);
        let t = count_cooccurrences(d.iter().map(Vec::as_slice), &v, 15);
        let (a, b, c) = (v.index("A"), v.index("B"), v.index("C"));
        assert_eq!(t.get(a, b), 1.0);
        assert_eq!(t.get(b, a), 1.0);
        assert_eq!(t.get(a, c), 0.5);
        assert_eq!(t.get(c, a), 0.5);
        assert_eq!(t.get(a, a), 0.0);
    }

    #[test]
    fn window_limits_distance() {
        let d = [toks("A X X B")];
        let v = Vocabulary::build(&d, 1);
        let t = count_cooccurrences(d.iter().map(Vec::as_slice), &v, 2);
        assert_eq!(t.get(v.index("A"), v.index("B")), 0.0);
    }
}
