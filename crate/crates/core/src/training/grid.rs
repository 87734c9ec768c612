use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::networks::{Family, ModelConfig};

/// Named axes, each with a finite list of values.
///
/// Points are enumerated with axes in name order and the last axis varying
/// fastest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid {
    axes: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub index: usize,
    pub values: BTreeMap<String, f64>,
}

impl GridPoint {
    /// Value of an axis that must hold a non-negative integer.
    pub fn usize(&self, axis: &str) -> Result<Option<usize>> {
        self.values.get(axis).map(|&v| as_count(axis, v)).transpose()
    }
}

fn as_count(axis: &str, v: f64) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(Error::contract(format!("axis {axis} needs whole numbers, got {v}")))
    }
}

impl HyperGrid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_axis(mut self, name: &str, values: impl IntoIterator<Item = f64>) -> Self {
        self.axes.insert(name.to_string(), values.into_iter().collect());
        self
    }

    pub fn axes(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.axes
    }

    pub fn axis_names(&self) -> Vec<&str> {
        self.axes.keys().map(String::as_str).collect()
    }

    /// Product of axis lengths (1 for a grid without axes).
    pub fn len(&self) -> usize {
        self.axes.values().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<GridPoint> {
        let names: Vec<&String> = self.axes.keys().collect();
        let lens: Vec<usize> = self.axes.values().map(Vec::len).collect();
        (0..self.len())
            .map(|index| {
                let mut rest = index;
                let mut values = BTreeMap::new();
                for a in (0..names.len()).rev() {
                    let i = rest % lens[a];
                    rest /= lens[a];
                    values.insert(names[a].clone(), self.axes[names[a]][i]);
                }
                GridPoint { index, values }
            })
            .collect()
    }

    /// Reads the table named after `family` from a grid file:
    ///
    /// ```toml
    /// [MAX]
    /// rnn_width = [8, 16, 32]
    /// g_layers = [1, 2]
    /// ```
    pub fn from_toml(text: &str, family: Family) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e| Error::parse("grid file", e))?;
        let section = table
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(family.name()))
            .map(|(_, v)| v)
            .ok_or_else(|| Error::data(format!("grid file has no [{}] table", family.name())))?;
        let section = section
            .as_table()
            .ok_or_else(|| Error::parse("grid file", format!("[{}] is not a table", family.name())))?;
        let mut grid = HyperGrid::new();
        for (name, v) in section {
            let list = v
                .as_array()
                .ok_or_else(|| Error::parse("grid file", format!("axis {name} is not a list")))?;
            let values = list
                .iter()
                .map(|x| {
                    x.as_float()
                        .or_else(|| x.as_integer().map(|i| i as f64))
                        .ok_or_else(|| Error::parse("grid file", format!("axis {name} holds a non-number")))
                })
                .collect::<Result<Vec<f64>>>()?;
            grid.axes.insert(name.clone(), values);
        }
        Ok(grid)
    }
}

/// Outcome of training one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointOutcome {
    pub valid_accuracy: f64,
    pub num_parameters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub index: usize,
    pub values: BTreeMap<String, f64>,
    pub valid_accuracy: Option<f64>,
    pub num_parameters: Option<usize>,
    pub error: Option<String>,
}

/// Orders by validation accuracy (descending), then parameter count
/// (ascending), then enumeration order. Failed points go last.
pub fn rank_results(results: &mut [GridResult]) {
    results.sort_by(|a, b| {
        let acc = |r: &GridResult| r.valid_accuracy.unwrap_or(f64::NEG_INFINITY);
        acc(b)
            .total_cmp(&acc(a))
            .then(a.num_parameters.unwrap_or(usize::MAX).cmp(&b.num_parameters.unwrap_or(usize::MAX)))
            .then(a.index.cmp(&b.index))
    });
}

/// Runs `run` on every grid point, `jobs` points at a time, and returns the
/// ranked results. A failing point is recorded and the search continues.
pub fn grid_search<F>(grid: &HyperGrid, jobs: usize, run: F) -> Result<Vec<GridResult>>
where
    F: Fn(&GridPoint) -> Result<PointOutcome> + Sync,
{
    if grid.is_empty() {
        return Err(Error::contract("grid has an empty axis"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::contract(format!("cannot start worker pool: {e}")))?;
    let points = grid.points();
    let mut results: Vec<GridResult> = pool.install(|| {
        points
            .par_iter()
            .map(|p| match run(p) {
                Ok(o) => GridResult {
                    index: p.index,
                    values: p.values.clone(),
                    valid_accuracy: Some(o.valid_accuracy),
                    num_parameters: Some(o.num_parameters),
                    error: None,
                },
                Err(e) => GridResult {
                    index: p.index,
                    values: p.values.clone(),
                    valid_accuracy: None,
                    num_parameters: None,
                    error: Some(e.to_string()),
                },
            })
            .collect()
    });
    rank_results(&mut results);
    Ok(results)
}

/// Copies a grid point into a model configuration.
///
/// For hierarchical families `rnn_layers`, `rnn_width` and `attention_width`
/// also set their sentence-level counterparts unless those are axes of
/// their own.
pub fn apply_point(base: &ModelConfig, point: &GridPoint) -> Result<ModelConfig> {
    let mut c = base.clone();
    for (name, &v) in &point.values {
        if ModelConfig::AXES.contains(&name.as_str()) {
            c.set_axis(name, as_count(name, v)?)?;
        }
    }
    if c.is_hierarchical() {
        for (word, sentence) in [
            ("rnn_layers", "sentence_rnn_layers"),
            ("rnn_width", "sentence_rnn_width"),
            ("attention_width", "sentence_attention_width"),
        ] {
            if let (Some(v), false) = (point.usize(word)?, point.values.contains_key(sentence)) {
                c.set_axis(sentence, v)?;
            }
        }
    }
    Ok(c)
}

pub fn write_results_csv(path: &Path, grid: &HyperGrid, results: &[GridResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::parse(path.display(), e))?;
    let mut header = vec!["rank".to_string(), "point".to_string()];
    header.extend(grid.axis_names().iter().map(|s| s.to_string()));
    header.extend(["valid_accuracy", "num_parameters", "error"].map(String::from));
    w.write_record(&header).map_err(|e| Error::parse(path.display(), e))?;
    for (rank, r) in results.iter().enumerate() {
        let mut row = vec![(rank + 1).to_string(), r.index.to_string()];
        row.extend(grid.axis_names().iter().map(|a| r.values.get(*a).map_or(String::new(), |v| v.to_string())));
        row.push(r.valid_accuracy.map_or(String::new(), |v| v.to_string()));
        row.push(r.num_parameters.map_or(String::new(), |v| v.to_string()));
        row.push(r.error.clone().unwrap_or_default());
        w.write_record(&row).map_err(|e| Error::parse(path.display(), e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Site code, 61 classes in the original registry data.
    Topography,
    /// Cell-type code, 134 classes.
    Morphology,
}

fn powers_of_two(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|e| f64::from(1u32 << e)).collect()
}

/// Published search spaces for the recurrent families.
pub fn reference_grid(family: Family, task: Task) -> Option<HyperGrid> {
    use Task::*;
    let g = HyperGrid::new();
    let grid = match (family, task) {
        (Family::Max, Topography) => g
            .with_axis("rnn_layers", [1.0, 2.0])
            .with_axis("g_layers", [1.0, 2.0, 4.0])
            .with_axis("rnn_width", powers_of_two(1, 9))
            .with_axis("g_width", powers_of_two(1, 11)),
        (Family::Max, Morphology) => g
            .with_axis("rnn_layers", [1.0])
            .with_axis("g_layers", [1.0, 2.0, 4.0])
            .with_axis("rnn_width", powers_of_two(1, 9))
            .with_axis("g_width", powers_of_two(1, 11)),
        (Family::Att, Topography) => g
            .with_axis("rnn_layers", [1.0])
            .with_axis("g_layers", [0.0, 1.0])
            .with_axis("rnn_width", [64.0, 128.0, 256.0])
            .with_axis("g_width", [256.0, 512.0, 1024.0])
            .with_axis("attention_width", [128.0, 256.0, 512.0, 1024.0]),
        (Family::Att, Morphology) => g
            .with_axis("rnn_layers", [1.0])
            .with_axis("g_layers", [0.0, 1.0])
            .with_axis("rnn_width", [64.0, 128.0, 256.0])
            .with_axis("g_width", [64.0, 128.0, 256.0])
            .with_axis("attention_width", [128.0, 256.0, 512.0, 1024.0]),
        (Family::MaxH, Topography) => g
            .with_axis("rnn_layers", [1.0])
            .with_axis("g_layers", [0.0, 1.0, 2.0, 4.0])
            .with_axis("rnn_width", [32.0, 64.0, 128.0, 256.0])
            .with_axis("g_width", [256.0, 512.0, 1024.0, 2048.0]),
        (Family::MaxH, Morphology) => g
            .with_axis("rnn_layers", [1.0])
            .with_axis("g_layers", [0.0, 1.0, 2.0, 4.0])
            .with_axis("rnn_width", [32.0, 64.0, 128.0, 256.0])
            .with_axis("g_width", [256.0, 512.0, 1024.0, 2048.0]),
        (Family::AttH, _) => g
            .with_axis("rnn_layers", [1.0])
            .with_axis("g_layers", [0.0, 1.0, 2.0, 4.0])
            .with_axis("rnn_width", [32.0, 64.0, 128.0, 256.0])
            .with_axis("g_width", [256.0, 512.0, 1024.0, 2048.0])
            .with_axis("attention_width", [64.0, 128.0, 256.0, 512.0]),
        (Family::MaxI, Topography) => g
            .with_axis("rnn_layers", [1.0, 2.0, 4.0])
            .with_axis("g_layers", [1.0, 2.0, 4.0])
            .with_axis("rnn_width", powers_of_two(1, 9))
            .with_axis("g_width", powers_of_two(1, 11)),
        (Family::MaxI, Morphology) => g
            .with_axis("rnn_layers", [1.0, 2.0, 4.0])
            .with_axis("g_layers", [1.0])
            .with_axis("rnn_width", [64.0, 128.0, 256.0, 512.0]),
        (Family::Gru, _) => g
            .with_axis("rnn_layers", [1.0, 2.0, 4.0])
            .with_axis("rnn_width", [128.0, 256.0, 512.0, 1024.0]),
        (Family::Svm | Family::Cnn, _) => return None,
    };
    Some(grid)
}
