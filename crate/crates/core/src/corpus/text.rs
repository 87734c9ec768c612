use std::ops::Range;

use super::{Document, RawRecord};

pub const SEPARATOR: &str = ".";

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Whitespace split, then leading and trailing punctuation characters
/// become one token each. Inner punctuation ("2.3", "CK-7") stays put.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let lead = chars.iter().take_while(|c| is_punct(**c)).count();
        if lead == chars.len() {
            out.extend(chars.iter().map(|c| c.to_uppercase().collect::<String>()));
            continue;
        }
        let trail = chars.iter().rev().take_while(|c| is_punct(**c)).count();
        out.extend(chars[..lead].iter().map(|c| c.to_string()));
        let core: String = chars[lead..chars.len() - trail].iter().collect();
        out.push(core.to_uppercase());
        out.extend(chars[chars.len() - trail..].iter().map(|c| c.to_string()));
    }
    out
}

/// Merges macroscopy, diagnosis and anamnesis (in that order, joined by a
/// period token), uppercases and tokenizes. `None` means the record has no
/// text at all and should be skipped.
pub fn preprocess(record: &RawRecord) -> Option<Document> {
    let mut tokens = Vec::new();
    for field in [&record.macroscopy, &record.diagnosis, &record.anamnesis] {
        let Some(text) = field.as_deref() else { continue };
        let toks = tokenize(text);
        if toks.is_empty() {
            continue;
        }
        if !tokens.is_empty() {
            tokens.push(SEPARATOR.to_string());
        }
        tokens.extend(toks);
    }
    if tokens.is_empty() {
        return None;
    }
    Some(Document {
        tokens,
        sentences: None,
        label: record.label.clone(),
        inserted_at: record.inserted_at,
    })
}

pub(crate) fn sentence_ranges(tokens: &[String]) -> Vec<Range<usize>> {
    let mut ranges = Vec::new();
    let mut start = 0;
    for (i, t) in tokens.iter().enumerate() {
        if t == SEPARATOR {
            ranges.push(start..i + 1);
            start = i + 1;
        }
    }
    if start < tokens.len() {
        ranges.push(start..tokens.len());
    }
    ranges
}

/// Splits after every standalone period token; a trailing run without a
/// period still forms a sentence.
pub fn segment_sentences(mut doc: Document) -> Document {
    doc.sentences = Some(sentence_ranges(&doc.tokens));
    doc
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn date() -> NaiveDate {
        NaiveDate::from_ymd_opt(2010, 1, 1).unwrap()
    }

    fn rec(m: Option<&str>, d: Option<&str>, a: Option<&str>) -> RawRecord {
        RawRecord {
            macroscopy: m.map(str::to_string),
            diagnosis: d.map(str::to_string),
            anamnesis: a.map(str::to_string),
            label: Some("C61".into()),
            inserted_at: date(),
            distilled_k: None,
        }
    }

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn preprocess_examples() {
        let d = preprocess(&rec(None, Some("adenocarcinoma prostatico."), None)).unwrap();
        assert_eq!(d.tokens, toks(&["ADENOCARCINOMA", "PROSTATICO", "."]));

        let d = preprocess(&rec(Some("a"), Some("b"), None)).unwrap();
        assert_eq!(d.tokens, toks(&["A", ".", "B"]));

        let d = preprocess(&rec(None, Some("Polipo, peduncolato"), None)).unwrap();
        assert_eq!(d.tokens, toks(&["POLIPO", ",", "PEDUNCOLATO"]));
    }

    #[test]
    fn empty_records_are_skipped() {
        assert!(preprocess(&rec(None, None, None)).is_none());
        assert!(preprocess(&rec(Some("  "), Some(""), None)).is_none());
    }

    #[test]
    fn inner_punctuation_is_kept() {
        assert_eq!(tokenize("gleason 3+4, psa 2.3."), toks(&["GLEASON", "3+4", ",", "PSA", "2.3", "."]));
        assert_eq!(tokenize("(ck7+)"), toks(&["(", "CK7", "+", ")"]));
        assert_eq!(tokenize("..."), toks(&[".", ".", "."]));
    }

    #[test]
    fn segmentation_examples() {
        let r = sentence_ranges(&toks(&["A", ".", "B", "."]));
        assert_eq!(r, vec![0..2, 2..4]);
        let r = sentence_ranges(&toks(&["A", "B"]));
        assert_eq!(r, vec![0..2]);
        let r = sentence_ranges(&toks(&[".", "."]));
        assert_eq!(r, vec![0..1, 1..2]);
        let r = sentence_ranges(&toks(&["PSA", "2.3", "OK"]));
        assert_eq!(r, vec![0..3]);
    }

    proptest::proptest! {
        #[test]
        fn preprocess_is_idempotent(text in "[a-zA-Z0-9 ,.;:()+'-]{1,60}") {
            if let Some(d) = preprocess(&rec(None, Some(&text), None)) {
                let again = preprocess(&rec(None, Some(&d.text()), None)).unwrap();
                proptest::prop_assert_eq!(&again.tokens, &d.tokens);
                proptest::prop_assert!(d.tokens.iter().all(|t| *t == t.to_uppercase()));
            }
        }

        #[test]
        fn sentences_reassemble_tokens(words in proptest::collection::vec("[A-C.]", 1..30)) {
            let tokens: Vec<String> = words;
            let ranges = sentence_ranges(&tokens);
            let mut next = 0;
            let mut rebuilt = Vec::new();
            for r in &ranges {
                proptest::prop_assert_eq!(r.start, next);
                proptest::prop_assert!(r.end > r.start);
                next = r.end;
                rebuilt.extend_from_slice(&tokens[r.clone()]);
            }
            proptest::prop_assert_eq!(rebuilt, tokens);
        }
    }
}
