use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{preprocess, segment_sentences, CorpusSplit, Document, Part, RawRecord};
use crate::error::{Error, Result};

/// Reads a line-delimited JSON corpus; blank lines are ignored.
pub fn read_records(path: &Path) -> Result<Vec<RawRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RawRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(format!("{}:{}", path.display(), i + 1), e))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_records(path: &Path, records: &[RawRecord]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::parse("record", e))?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// A preprocessed document in record form: its tokens, space-joined, in the
/// diagnosis field. Preprocessing the result gives the same tokens back.
pub fn document_to_record(doc: &Document, distilled_k: Option<usize>) -> RawRecord {
    RawRecord {
        macroscopy: None,
        diagnosis: Some(doc.text()),
        anamnesis: None,
        label: doc.label.clone(),
        inserted_at: doc.inserted_at,
        distilled_k,
    }
}

pub fn write_documents(path: &Path, docs: &[Document], distilled_k: Option<usize>) -> Result<()> {
    let recs: Vec<RawRecord> = docs.iter().map(|d| document_to_record(d, distilled_k)).collect();
    write_records(path, &recs)
}

/// Reads a corpus file and preprocesses it (with sentence ranges), skipping empty records.
pub fn read_documents(path: &Path) -> Result<Vec<Document>> {
    Ok(read_records(path)?
        .iter()
        .filter_map(preprocess)
        .map(segment_sentences)
        .collect())
}

pub fn write_class_map(path: &Path, map: &BTreeMap<String, usize>) -> Result<()> {
    let s = serde_json::to_string_pretty(map).map_err(|e| Error::parse("class map", e))?;
    fs::write(path, s + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_class_map(path: &Path) -> Result<BTreeMap<String, usize>> {
    let s = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let map: BTreeMap<String, usize> =
        serde_json::from_str(&s).map_err(|e| Error::parse(path.display(), e))?;
    let mut idx: Vec<usize> = map.values().copied().collect();
    idx.sort_unstable();
    if idx.iter().enumerate().any(|(i, &v)| i != v) {
        return Err(Error::data(format!(
            "{}: class indices are not dense in 0..{}",
            path.display(),
            map.len()
        )));
    }
    Ok(map)
}

/// Writes `train.jsonl`, `valid.jsonl`, `test.jsonl` and `class_map.json` into `dir`.
pub fn write_split(dir: &Path, split: &CorpusSplit, distilled_k: Option<usize>) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for part in Part::ALL {
        let path = dir.join(format!("{}.jsonl", part.file_stem()));
        write_documents(&path, split.part(part), distilled_k)?;
    }
    write_class_map(&dir.join("class_map.json"), &split.class_map)
}

pub fn read_split(dir: &Path) -> Result<CorpusSplit> {
    let class_map = read_class_map(&dir.join("class_map.json"))?;
    let mut split = CorpusSplit {
        train: Vec::new(),
        valid: Vec::new(),
        test: Vec::new(),
        class_map,
    };
    for part in Part::ALL {
        let docs = read_documents(&dir.join(format!("{}.jsonl", part.file_stem())))?;
        *split.part_mut(part) = docs;
    }
    for part in Part::ALL {
        split.labels(part)?;
    }
    Ok(split)
}
