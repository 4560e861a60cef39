//! Image datasets laid out as `<root>/<class_label>/<image files>`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::netpbm::{load_mask, DEFAULT_THRESHOLD};
use crate::pipeline::PipelineParams;
use crate::registry::{build_model, ModelRegistry};
use crate::scalar::Scalar;

pub const IMAGE_EXTENSIONS: &[&str] = &["pbm", "pgm", "pnm", "png"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub label: String,
    pub path: PathBuf,
    /// `<label>/<file name>`, with `/` on every platform. Stored as the
    /// model source, which is how exemplars are recognized later.
    pub id: String,
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

fn utf8_name(path: &Path) -> Result<String> {
    path.file_name()
        .and_then(|n| n.to_str())
        .map(str::to_owned)
        .ok_or_else(|| Error::Dataset(format!("non UTF-8 name {}", path.display())))
}

/// Every image in the dataset, sorted by class label then file name.
/// Hidden entries and files with other extensions are skipped.
pub fn list_dataset(root: impl AsRef<Path>) -> Result<Vec<DatasetEntry>> {
    let root = root.as_ref();
    if !root.is_dir() {
        return Err(Error::Dataset(format!("{} is not a directory", root.display())));
    }
    let mut out = Vec::new();
    for class in fs::read_dir(root)? {
        let class = class?.path();
        let label = utf8_name(&class)?;
        if !class.is_dir() || label.starts_with('.') {
            continue;
        }
        for file in fs::read_dir(&class)? {
            let path = file?.path();
            let name = utf8_name(&path)?;
            if path.is_file() && !name.starts_with('.') && is_image(&path) {
                out.push(DatasetEntry { id: format!("{label}/{name}"), label: label.clone(), path });
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Dataset(format!("no class images under {}", root.display())));
    }
    out.sort_by(|a, b| a.label.cmp(&b.label).then_with(|| a.id.cmp(&b.id)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegistryBuildOptions {
    pub params: PipelineParams,
    pub threshold: u8,
    /// Build a model from every image instead of one exemplar per class.
    pub multi_exemplar: bool,
    /// Class label to exemplar file name, overriding the default choice of
    /// the lexicographically first image.
    pub exemplars: BTreeMap<String, String>,
}

impl Default for RegistryBuildOptions {
    fn default() -> Self {
        Self {
            params: PipelineParams::default(),
            threshold: DEFAULT_THRESHOLD,
            multi_exemplar: false,
            exemplars: BTreeMap::new(),
        }
    }
}

/// Images that become reference models under `options`.
pub fn select_exemplars<'a>(
    entries: &'a [DatasetEntry],
    options: &RegistryBuildOptions,
) -> Result<Vec<&'a DatasetEntry>> {
    if options.multi_exemplar {
        return Ok(entries.iter().collect());
    }
    let mut by_class: BTreeMap<&str, Vec<&DatasetEntry>> = BTreeMap::new();
    for e in entries {
        by_class.entry(&e.label).or_default().push(e);
    }
    for label in options.exemplars.keys() {
        if !by_class.contains_key(label.as_str()) {
            return Err(Error::Dataset(format!("exemplar override for unknown class {label:?}")));
        }
    }
    by_class
        .into_iter()
        .map(|(label, files)| match options.exemplars.get(label) {
            None => Ok(files[0]),
            Some(name) => files
                .iter()
                .copied()
                .find(|e| e.id == format!("{label}/{name}"))
                .ok_or_else(|| Error::Dataset(format!("exemplar {label}/{name} not found"))),
        })
        .collect()
}

/// Builds a registry from a dataset directory. Models are ordered by class
/// label (then file name in multi-exemplar mode).
pub fn build_registry_from_dir<T: Scalar>(
    root: impl AsRef<Path>,
    options: &RegistryBuildOptions,
) -> Result<ModelRegistry<T>> {
    options.params.validate()?;
    let entries = list_dataset(root)?;
    let chosen = select_exemplars(&entries, options)?;
    let models = chosen
        .par_iter()
        .map(|e| {
            let mask = load_mask(&e.path, options.threshold)?;
            build_model(&mask, e.label.clone(), e.id.clone(), &options.params)
                .map_err(|err| Error::Dataset(format!("exemplar {}: {err}", e.id)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut registry = if options.multi_exemplar { ModelRegistry::multi_exemplar() } else { ModelRegistry::new() };
    for model in models {
        registry.push(model)?;
    }
    Ok(registry)
}
