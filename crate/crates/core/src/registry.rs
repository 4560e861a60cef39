//! Per-class reference models and their JSON persistence.
//!
//! A registry file is a single JSON document:
//!
//! ```json
//! {"version": 1, "multi_exemplar": false, "models": [
//!   {"label": "star5", "source": "star5/a.pgm", "features": {...}}
//! ]}
//! ```
//!
//! Floats are written in shortest round-trip form, so `load(save(r)) == r`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::contour::BinaryMask;
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::pipeline::{extract_features, PipelineParams};
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ReferenceModel<T = f64> {
    pub label: String,
    /// Identifier of the exemplar the model was built from.
    pub source: String,
    pub features: FeatureSet<T>,
}

impl<T: Scalar> ReferenceModel<T> {
    pub fn params(&self) -> &PipelineParams {
        &self.features.params
    }
}

/// Runs the full pipeline on an exemplar mask and wraps the result.
pub fn build_model<T: Scalar>(
    mask: &BinaryMask,
    label: impl Into<String>,
    source: impl Into<String>,
    params: &PipelineParams,
) -> Result<ReferenceModel<T>> {
    Ok(ReferenceModel { label: label.into(), source: source.into(), features: extract_features(mask, params)? })
}

/// Ordered collection of reference models sharing one parameter set.
///
/// Labels are unique unless multi-exemplar mode is on. Model order only
/// matters for tie-breaking during matching (lowest index wins).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelRegistry<T = f64> {
    models: Vec<ReferenceModel<T>>,
    multi_exemplar: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct RegistryDocument<T> {
    version: u64,
    #[serde(default)]
    multi_exemplar: bool,
    models: Vec<ReferenceModel<T>>,
}

impl<T: Scalar> ModelRegistry<T> {
    pub fn new() -> Self {
        Self { models: Vec::new(), multi_exemplar: false }
    }

    /// Registry that accepts several models per label.
    pub fn multi_exemplar() -> Self {
        Self { models: Vec::new(), multi_exemplar: true }
    }

    pub fn is_multi_exemplar(&self) -> bool {
        self.multi_exemplar
    }

    pub fn models(&self) -> &[ReferenceModel<T>] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Shared pipeline parameters, once a model has been added.
    pub fn params(&self) -> Option<&PipelineParams> {
        self.models.first().map(|m| m.params())
    }

    /// Distinct labels in insertion order.
    pub fn labels(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for m in &self.models {
            if !out.contains(&m.label.as_str()) {
                out.push(&m.label);
            }
        }
        out
    }

    pub fn push(&mut self, model: ReferenceModel<T>) -> Result<()> {
        model.features.validate()?;
        if let Some(params) = self.params() {
            if params != model.params() {
                return Err(Error::ParamMismatch(format!(
                    "model {:?} was built with {:?}, registry uses {:?}",
                    model.label,
                    model.params(),
                    params
                )));
            }
        }
        if !self.multi_exemplar && self.models.iter().any(|m| m.label == model.label) {
            return Err(Error::DuplicateLabel(model.label));
        }
        self.models.push(model);
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        if self.models.is_empty() {
            return Err(Error::RefuseEmptyRegistry);
        }
        let doc = RegistryDocument {
            version: SCHEMA_VERSION,
            multi_exemplar: self.multi_exemplar,
            models: self.models.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let version = value.get("version").ok_or_else(|| Error::Schema("missing \"version\" field".into()))?;
        let found = version
            .as_u64()
            .ok_or_else(|| Error::Schema(format!("version must be an unsigned integer, got {version}")))?;
        if found != SCHEMA_VERSION {
            return Err(Error::SchemaVersionMismatch { found, expected: SCHEMA_VERSION });
        }
        let doc: RegistryDocument<T> = serde_json::from_value(value)?;
        let mut registry = Self { models: Vec::with_capacity(doc.models.len()), multi_exemplar: doc.multi_exemplar };
        for model in doc.models {
            registry.push(model)?;
        }
        Ok(registry)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = self.to_json()?;
        fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
