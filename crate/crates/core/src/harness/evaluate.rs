//! Exemplar-vs-rest evaluation and accuracy reports.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::BinaryMask;
use crate::error::{Error, Result};
use crate::harness::dataset::list_dataset;
use crate::matcher::{match_features, MatchOptions};
use crate::netpbm::{load_mask, DEFAULT_THRESHOLD};
use crate::pipeline::{extract_features, PipelineParams};
use crate::registry::ModelRegistry;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub threshold: u8,
    pub matching: MatchOptions,
    /// Query the registry exemplars themselves instead of the other images.
    pub self_test: bool,
    /// Worker count; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { threshold: DEFAULT_THRESHOLD, matching: MatchOptions::default(), self_test: false, threads: None }
    }
}

/// One query to classify.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Query {
    pub label: String,
    pub id: String,
}

/// Result for a single query image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: String,
    pub label: String,
    pub predicted: Option<String>,
    pub distance: Option<f64>,
    pub theta: Option<f64>,
    /// Pipeline error message; such queries count as misclassified.
    pub error: Option<String>,
}

impl Outcome {
    pub fn is_correct(&self) -> bool {
        self.predicted.as_deref() == Some(self.label.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub label: String,
    pub n_images: usize,
    pub n_correct: usize,
}

/// Rows are true labels, columns predicted labels, both in `labels` order;
/// failed queries go to the `errors` column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
    pub errors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub per_class: Vec<ClassSummary>,
    pub overall_accuracy: f64,
    pub n_images: usize,
    pub n_correct: usize,
    pub confusion: ConfusionMatrix,
    pub params: PipelineParams,
    pub matching: MatchOptions,
    pub threshold: u8,
    pub self_test: bool,
    pub outcomes: Vec<Outcome>,
}

fn classify_one<T: Scalar>(
    mask: Result<BinaryMask>,
    registry: &ModelRegistry<T>,
    params: &PipelineParams,
    matching: &MatchOptions,
) -> Result<(String, f64, f64)> {
    let features = extract_features::<T>(&mask?, params)?;
    let result = match_features(&features, registry, matching)?;
    Ok((result.label, result.distance.to_f64_lossy(), result.theta.to_f64_lossy()))
}

fn run_in_pool<R: Send>(threads: Option<usize>, job: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Classifies `queries`, loading each mask through `load`. Per-query
/// failures are recorded in the report, never propagated.
pub fn evaluate_queries<T, F>(
    queries: &[Query],
    registry: &ModelRegistry<T>,
    options: &EvalOptions,
    load: F,
) -> Result<EvaluationReport>
where
    T: Scalar,
    F: Fn(&Query) -> Result<BinaryMask> + Sync,
{
    let params = *registry.params().ok_or(Error::EmptyRegistry)?;
    options.matching.thetas()?;
    let mut queries = queries.to_vec();
    queries.sort();
    let outcomes: Vec<Outcome> = run_in_pool(options.threads, || {
        queries
            .par_iter()
            .map(|q| {
                let mut outcome = Outcome {
                    id: q.id.clone(),
                    label: q.label.clone(),
                    predicted: None,
                    distance: None,
                    theta: None,
                    error: None,
                };
                match classify_one(load(q), registry, &params, &options.matching) {
                    Ok((label, distance, theta)) => {
                        outcome.predicted = Some(label);
                        outcome.distance = Some(distance);
                        outcome.theta = Some(theta);
                    }
                    Err(e) => outcome.error = Some(e.to_string()),
                }
                outcome
            })
            .collect()
    })?;
    Ok(EvaluationReport::from_outcomes(outcomes, registry, params, options))
}

/// Evaluates every image of a dataset directory against `registry`.
///
/// Images the registry was built from are left out of the queries, or are
/// the only queries in self-test mode.
pub fn evaluate_dir<T: Scalar>(
    root: impl AsRef<Path>,
    registry: &ModelRegistry<T>,
    options: &EvalOptions,
) -> Result<EvaluationReport> {
    let entries = list_dataset(root)?;
    let sources: HashSet<&str> = registry.models().iter().map(|m| m.source.as_str()).collect();
    let selected: BTreeMap<Query, &Path> = entries
        .iter()
        .filter(|e| sources.contains(e.id.as_str()) == options.self_test)
        .map(|e| (Query { label: e.label.clone(), id: e.id.clone() }, e.path.as_path()))
        .collect();
    if selected.is_empty() {
        return Err(Error::Dataset("no query images left after exemplar exclusion".into()));
    }
    let queries: Vec<Query> = selected.keys().cloned().collect();
    evaluate_queries(&queries, registry, options, |q| load_mask(selected[q], options.threshold))
}

impl EvaluationReport {
    fn from_outcomes<T: Scalar>(
        outcomes: Vec<Outcome>,
        registry: &ModelRegistry<T>,
        params: PipelineParams,
        options: &EvalOptions,
    ) -> Self {
        let labels: Vec<String> = outcomes
            .iter()
            .map(|o| o.label.as_str())
            .chain(registry.labels())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(str::to_owned)
            .collect();
        let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let k = labels.len();
        let mut counts = vec![vec![0; k]; k];
        let mut errors = vec![0; k];
        let mut per_class: BTreeMap<&str, ClassSummary> = BTreeMap::new();
        for o in &outcomes {
            let row = index[o.label.as_str()];
            match &o.predicted {
                Some(p) => counts[row][index[p.as_str()]] += 1,
                None => errors[row] += 1,
            }
            let entry = per_class.entry(&o.label).or_insert_with(|| ClassSummary {
                label: o.label.clone(),
                n_images: 0,
                n_correct: 0,
            });
            entry.n_images += 1;
            entry.n_correct += usize::from(o.is_correct());
        }
        let n_images = outcomes.len();
        let n_correct = outcomes.iter().filter(|o| o.is_correct()).count();
        Self {
            per_class: per_class.into_values().collect(),
            overall_accuracy: if n_images == 0 { 0.0 } else { n_correct as f64 / n_images as f64 },
            n_images,
            n_correct,
            confusion: ConfusionMatrix { labels, counts, errors },
            params,
            matching: options.matching,
            threshold: options.threshold,
            self_test: options.self_test,
            outcomes,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Human-readable summary: per-class accuracy, confusion matrix and the
    /// failed queries.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .per_class
            .iter()
            .map(|c| c.label.len())
            .chain(self.confusion.labels.iter().map(String::len))
            .chain(["class".len(), "overall".len()])
            .max()
            .unwrap_or(5);
        let _ = writeln!(out, "{:<width$}  {:>7}  {:>7}  {:>8}", "class", "images", "correct", "accuracy");
        let row = |out: &mut String, label: &str, n: usize, c: usize| {
            let acc = if n == 0 { 0.0 } else { c as f64 / n as f64 };
            let _ = writeln!(out, "{label:<width$}  {n:>7}  {c:>7}  {acc:>8.4}");
        };
        for c in &self.per_class {
            row(&mut out, &c.label, c.n_images, c.n_correct);
        }
        row(&mut out, "overall", self.n_images, self.n_correct);

        let cell = self
            .confusion
            .labels
            .iter()
            .map(String::len)
            .chain(["error".len()])
            .chain(self.confusion.counts.iter().flatten().map(|n| n.to_string().len()))
            .max()
            .unwrap_or(5);
        let _ = write!(out, "\nconfusion (rows: true, columns: predicted)\n{:<width$}", "");
        for l in self.confusion.labels.iter().map(String::as_str).chain(["error"]) {
            let _ = write!(out, "  {l:>cell$}");
        }
        out.push('\n');
        for (i, l) in self.confusion.labels.iter().enumerate() {
            let _ = write!(out, "{l:<width$}");
            for n in self.confusion.counts[i].iter().chain([&self.confusion.errors[i]]) {
                let _ = write!(out, "  {n:>cell$}");
            }
            out.push('\n');
        }

        let misses: Vec<&Outcome> = self.outcomes.iter().filter(|o| !o.is_correct()).collect();
        if !misses.is_empty() {
            out.push_str("\nmisclassified\n");
            for o in misses {
                let what = match (&o.predicted, &o.error) {
                    (Some(p), _) => format!("-> {p} (d = {:.4})", o.distance.unwrap_or(f64::NAN)),
                    (None, Some(e)) => format!("error: {e}"),
                    (None, None) => "no prediction".to_string(),
                };
                let _ = writeln!(out, "  {}  {what}", o.id);
            }
        }
        out
    }
}
