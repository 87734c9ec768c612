//! Self-describing model container shared by neural and linear models.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::LinearClassifier;
use crate::networks::{Family, Network};

pub const MODEL_FORMAT: &str = "textcode-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StoredModel {
    Neural(Network),
    Linear(LinearClassifier),
}

impl StoredModel {
    pub fn family(&self) -> Family {
        match self {
            StoredModel::Neural(n) => n.config().family,
            StoredModel::Linear(_) => Family::Svm,
        }
    }

    pub fn num_classes(&self) -> usize {
        match self {
            StoredModel::Neural(n) => n.config().num_classes,
            StoredModel::Linear(l) => l.num_classes(),
        }
    }
}

/// A model with its class names, as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub class_names: Vec<String>,
    pub model: StoredModel,
}

impl ModelFile {
    pub fn new(model: StoredModel, class_names: Vec<String>) -> Result<Self> {
        if class_names.len() != model.num_classes() {
            return Err(Error::contract(format!(
                "{} class names for a {}-class model",
                class_names.len(),
                model.num_classes()
            )));
        }
        Ok(Self {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            class_names,
            model,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::parse("model file", e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format: String,
            version: u32,
        }
        let header: Header = serde_json::from_str(text).map_err(|e| Error::parse("model file header", e))?;
        if header.format != MODEL_FORMAT {
            return Err(Error::data(format!("not a model file (format {:?})", header.format)));
        }
        if header.version != MODEL_VERSION {
            return Err(Error::data(format!(
                "unsupported model file version {} (expected {MODEL_VERSION})",
                header.version
            )));
        }
        let file: Self = serde_json::from_str(text).map_err(|e| Error::parse("model file", e))?;
        if file.class_names.len() != file.model.num_classes() {
            return Err(Error::data("class names do not match the model's output size"));
        }
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
