mod settings;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use sdd_core::harness::{
    build_registry_from_dir, evaluate_dir, generate_synthetic, EvalOptions, RegistryBuildOptions, ShapeKind,
    SuiteConfig, SynthSpec,
};
use sdd_core::netpbm::{load_mask, save_mask};
use sdd_core::{analyze, build_model, extract_features, match_features, BinaryMask, ExtremumKind, ModelRegistry};
use serde::Serialize;

use settings::{Knobs, THREADS_ENV};

/// Shape recognition with slope difference distribution contour features.
#[derive(Debug, Parser)]
#[command(name = "sdd", version)]
struct Cli {
    /// Key = value settings file [default: ./sdd.toml when present]
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(flatten)]
    knobs: Knobs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract a reference model from one image
    BuildModel {
        image: PathBuf,
        /// Class label [default: name of the image's parent directory]
        #[arg(long)]
        label: Option<String>,
        /// Append the model to this registry, creating it if missing
        #[arg(long, value_name = "REGISTRY")]
        append: Option<PathBuf>,
        /// Write the model JSON here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a registry from a <dir>/<class>/<images> dataset
    BuildRegistry {
        dir: PathBuf,
        #[arg(short, long, default_value = "registry.json")]
        output: PathBuf,
        /// Keep every image as a model, not one exemplar per class
        #[arg(long)]
        multi_exemplar: bool,
        /// Exemplar file for a class, as LABEL=FILE (repeatable)
        #[arg(long, value_name = "LABEL=FILE", value_parser = parse_assignment)]
        exemplar: Vec<(String, String)>,
    },
    /// Classify one image against a registry
    Match {
        registry: PathBuf,
        image: PathBuf,
        /// Keep only the best K ranking entries
        #[arg(long, value_name = "K")]
        top: Option<usize>,
    },
    /// Classify every non-exemplar image of a dataset
    Evaluate {
        dir: PathBuf,
        /// Registry to match against [default: built from the dataset]
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Query the exemplars themselves
        #[arg(long)]
        self_test: bool,
        /// Print the JSON report instead of the table
        #[arg(long)]
        json: bool,
        /// Also write the JSON report to this file
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
        #[arg(long)]
        multi_exemplar: bool,
        #[arg(long, value_name = "LABEL=FILE", value_parser = parse_assignment)]
        exemplar: Vec<(String, String)>,
    },
    /// Render synthetic shapes
    Synth {
        #[command(subcommand)]
        shape: SynthCommand,
    },
    /// Write the radial signature, smoothed signature and SDD curve as CSV
    DumpSdd {
        image: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, clap::Args)]
struct Placement {
    /// Counter-clockwise rotation in degrees
    #[arg(long, default_value_t = 0.0)]
    rotation: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Output image (.pgm or .pbm)
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Subcommand)]
enum SynthCommand {
    Star {
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 100.0)]
        outer: f64,
        #[arg(long, default_value_t = 40.0)]
        inner: f64,
        #[command(flatten)]
        at: Placement,
    },
    Polygon {
        #[arg(long, default_value_t = 6)]
        sides: usize,
        #[arg(long, default_value_t = 100.0)]
        radius: f64,
        #[command(flatten)]
        at: Placement,
    },
    Circle {
        #[arg(long, default_value_t = 100.0)]
        radius: f64,
        #[command(flatten)]
        at: Placement,
    },
    /// Seeded star benchmark written as a dataset directory
    Suite {
        dir: PathBuf,
        /// Tip counts, comma separated
        #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,8")]
        classes: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        per_class: usize,
        #[arg(long, default_value_t = 0.3)]
        noise: f64,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn parse_assignment(s: &str) -> std::result::Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((k.to_owned(), v.to_owned())),
        _ => Err(format!("expected LABEL=FILE, got {s:?}")),
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn build_options(knobs: &Knobs, multi_exemplar: bool, exemplar: &[(String, String)]) -> Result<RegistryBuildOptions> {
    let exemplars: BTreeMap<String, String> = exemplar.iter().cloned().collect();
    if exemplars.len() != exemplar.len() {
        bail!("more than one --exemplar for the same class");
    }
    if multi_exemplar && !exemplars.is_empty() {
        bail!("--exemplar has no effect with --multi-exemplar");
    }
    Ok(RegistryBuildOptions { params: knobs.pipeline()?, threshold: knobs.threshold(), multi_exemplar, exemplars })
}

fn load(image: &Path, knobs: &Knobs) -> Result<BinaryMask> {
    load_mask(image, knobs.threshold()).with_context(|| format!("loading {}", image.display()))
}

fn default_label(image: &Path) -> Result<String> {
    image
        .canonicalize()
        .ok()
        .and_then(|p| p.parent()?.file_name()?.to_str().map(str::to_owned))
        .ok_or_else(|| anyhow!("cannot infer a label for {}; pass --label", image.display()))
}

fn run(cli: Cli) -> Result<()> {
    let knobs = cli.knobs.over(&Knobs::from_config(cli.config.as_deref())?);
    let cap = std::env::var(THREADS_ENV).ok();
    if let Some(n) = knobs.threads(cap.as_deref())? {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }

    match cli.command {
        Command::BuildModel { image, label, append, output } => {
            let label = match label {
                Some(l) => l,
                None => default_label(&image)?,
            };
            let mask = load(&image, &knobs)?;
            let source = image.to_string_lossy().into_owned();
            match append {
                None => {
                    let model = build_model::<f64>(&mask, label, source, &knobs.pipeline()?)?;
                    emit(&json(&model)?, output.as_deref())
                }
                Some(path) => {
                    let mut registry = if path.exists() { ModelRegistry::load(&path)? } else { ModelRegistry::new() };
                    let params = match registry.params() {
                        Some(p) => knobs.pipeline_for(p)?,
                        None => knobs.pipeline()?,
                    };
                    let model = build_model::<f64>(&mask, label, source, &params)?;
                    let text = json(&model)?;
                    registry.push(model)?;
                    registry.save(&path)?;
                    emit(&text, output.as_deref())
                }
            }
        }
        Command::BuildRegistry { dir, output, multi_exemplar, exemplar } => {
            let opts = build_options(&knobs, multi_exemplar, &exemplar)?;
            let registry: ModelRegistry = build_registry_from_dir(&dir, &opts)?;
            registry.save(&output)?;
            eprintln!("{} models ({}) -> {}", registry.len(), registry.labels().join(", "), output.display());
            Ok(())
        }
        Command::Match { registry, image, top } => {
            let registry: ModelRegistry = ModelRegistry::load(&registry)?;
            let params = knobs.pipeline_for(registry.params().ok_or_else(|| anyhow!("registry has no models"))?)?;
            let query = extract_features::<f64>(&load(&image, &knobs)?, &params)?;
            let mut result = match_features(&query, &registry, &knobs.matching()?)?;
            if let Some(k) = top {
                result.ranking.truncate(k.max(1));
            }
            emit(&json(&result)?, None)
        }
        Command::Evaluate { dir, registry, self_test, json: as_json, report, multi_exemplar, exemplar } => {
            let registry: ModelRegistry = match registry {
                Some(path) => {
                    if multi_exemplar || !exemplar.is_empty() {
                        bail!("--multi-exemplar and --exemplar only apply when building the registry");
                    }
                    let registry = ModelRegistry::load(&path)?;
                    if let Some(p) = registry.params() {
                        knobs.pipeline_for(p)?;
                    }
                    registry
                }
                None => build_registry_from_dir(&dir, &build_options(&knobs, multi_exemplar, &exemplar)?)?,
            };
            let opts =
                EvalOptions { threshold: knobs.threshold(), matching: knobs.matching()?, self_test, threads: None };
            let result = evaluate_dir(&dir, &registry, &opts)?;
            let text = result.to_json()? + "\n";
            if let Some(path) = &report {
                fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            }
            emit(&if as_json { text } else { result.to_table() }, None)
        }
        Command::Synth { shape } => synth(shape),
        Command::DumpSdd { image, output } => {
            let params = knobs.pipeline()?;
            let a = analyze::<f64>(&load(&image, &knobs)?, &params)?;
            let mut marks = vec![""; params.samples];
            for e in &a.extrema {
                marks[e.index] = match e.kind {
                    ExtremumKind::RadialPeak => "peak",
                    ExtremumKind::RadialValley => "valley",
                };
            }
            let mut csv = String::from("index,radial,smoothed,s,extremum\n");
            for (j, mark) in marks.iter().enumerate() {
                writeln!(csv, "{j},{},{},{},{mark}", a.radial.values[j], a.smoothed[j], a.curve.s[j])?;
            }
            emit(&csv, output.as_deref())
        }
    }
}

fn synth(shape: SynthCommand) -> Result<()> {
    let (kind, at) = match shape {
        SynthCommand::Star { points, outer, inner, at } => (ShapeKind::Star { points, outer, inner }, at),
        SynthCommand::Polygon { sides, radius, at } => (ShapeKind::RegularPolygon { sides, radius }, at),
        SynthCommand::Circle { radius, at } => (ShapeKind::Circle { radius }, at),
        SynthCommand::Suite { dir, classes, per_class, noise, seed } => {
            let config = SuiteConfig { classes, per_class, noise, seed, ..SuiteConfig::default() };
            let written = config.write(&dir)?;
            eprintln!("{} images -> {}", written.len(), dir.display());
            return Ok(());
        }
    };
    let spec = SynthSpec::new(kind).rotated(at.rotation).scaled(at.scale);
    save_mask(&generate_synthetic(&spec)?, &at.output)?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
