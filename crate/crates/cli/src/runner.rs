//! Runs (method, seed) cells in parallel and writes their artifacts.
//!
//! Layout under `output_dir`:
//!
//! ```text
//! config.toml                      resolved configuration
//! summary.csv                      run: one row for the method
//! comparison.csv, split_hashes.csv compare
//! ablation.csv, ablation_summary.csv, ablation_pivot.csv   ablate
//! <method>/<seed>/history.csv
//! <method>/<seed>/metrics.csv
//! <method>/<seed>/classifier.ckpt
//! <method>/<seed>/policy.ckpt      only for methods with a policy
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pseudosup_core::data::{
    generate_grid_gaussians, generate_multimodal, generate_overlapping_gaussians, load_dataset, split_dataset,
    write_dataset,
};
use pseudosup_core::metrics::{correlation_density, mean_and_std, CorrelationDensity};
use pseudosup_core::nn::write_checkpoint;
use pseudosup_core::ssl::{train, train_self_training, train_supervised_only, TrainOutput};
use pseudosup_core::{DatasetSplits, EngineConfig, MetricsReport, Sample};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Method, REFERENCE_BETA, REFERENCE_GAMMA};
use crate::error::{CliError, Result};

/// Splits for one seed: the dataset file as-is, or freshly generated and split.
pub fn build_splits(cfg: &ExperimentConfig, seed: u64) -> Result<DatasetSplits> {
    let d = &cfg.dataset;
    if let Some(path) = &d.path {
        return Ok(load_dataset(path)?);
    }
    let samples = match (d.grid, cfg.multimodal) {
        (Some([h, w]), true) => generate_multimodal(d.n_per_class, h, w, d.class_separation, d.vf_target_len, seed)?,
        (Some([h, w]), false) => generate_grid_gaussians(d.n_per_class, h, w, d.class_separation, seed)?,
        (None, _) => generate_overlapping_gaussians(d.n_per_class, d.dim, d.class_separation, seed)?,
    };
    Ok(split_dataset(&samples, d.label_fraction, d.fractions(), seed)?)
}

/// SHA-256 of the splits in the dataset text format, hex encoded.
pub fn split_hash(splits: &DatasetSplits) -> Result<String> {
    let mut bytes = Vec::new();
    write_dataset(splits, &mut bytes)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn engine_for(cfg: &ExperimentConfig, method: Method, seed: u64) -> EngineConfig {
    EngineConfig {
        seed,
        augment: method == Method::PseudoSupAug,
        ..cfg.engine.clone()
    }
}

pub fn train_method(
    cfg: &ExperimentConfig,
    engine: &EngineConfig,
    method: Method,
    splits: &DatasetSplits,
) -> Result<TrainOutput> {
    let out = match method {
        Method::PseudoSup | Method::PseudoSupAug => train(splits, engine)?,
        Method::Supervised => train_supervised_only(splits, engine)?,
        Method::SelfTraining => {
            let t = cfg
                .confidence_threshold
                .ok_or_else(|| CliError::config("confidence_threshold: required when the method is self_training"))?;
            train_self_training(splits, engine, t)?
        }
    };
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub method: Method,
    pub seed: u64,
    pub metrics: MetricsReport,
    pub split_hash: String,
}

pub fn cell_dir(output_dir: &Path, method: Method, seed: u64) -> PathBuf {
    output_dir.join(method.as_str()).join(seed.to_string())
}

fn run_cell(cfg: &ExperimentConfig, method: Method, seed: u64) -> Result<CellResult> {
    let splits = build_splits(cfg, seed)?;
    let split_hash = split_hash(&splits)?;
    let out = train_method(cfg, &engine_for(cfg, method, seed), method, &splits)?;

    let dir = cell_dir(&cfg.output_dir, method, seed);
    create_dir(&dir)?;
    write_file(&dir.join("history.csv"), out.history.to_csv())?;
    write_file(
        &dir.join("metrics.csv"),
        format!("{}\n{}\n", MetricsReport::CSV_HEADER, out.test_metrics.csv_row()),
    )?;
    write_file(&dir.join("classifier.ckpt"), checkpoint_text(&out.classifier)?)?;
    if let Some(policy) = &out.policy {
        write_file(&dir.join("policy.ckpt"), checkpoint_text(policy.model())?)?;
    }
    Ok(CellResult {
        method,
        seed,
        metrics: out.test_metrics,
        split_hash,
    })
}

fn checkpoint_text(model: &pseudosup_core::MlpModel) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_checkpoint(model, &mut buf)?;
    Ok(buf)
}

fn run_cells(cfg: &ExperimentConfig, methods: &[Method]) -> Result<Vec<CellResult>> {
    let cells: Vec<(Method, u64)> = methods
        .iter()
        .flat_map(|&m| cfg.seeds.iter().map(move |&s| (m, s)))
        .collect();
    cells.par_iter().map(|&(m, s)| run_cell(cfg, m, s)).collect()
}

/// Mean and sample standard deviation of each metric over seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub n_runs: usize,
    pub accuracy: (f64, f64),
    pub f1: (f64, f64),
    pub auc: (f64, f64),
}

impl MethodSummary {
    pub const CSV_HEADER: &'static str = "method,n_runs,accuracy_mean,accuracy_std,f1_mean,f1_std,auc_mean,auc_std";

    pub fn from_cells(method: Method, cells: &[CellResult]) -> Self {
        let pick = |f: fn(&MetricsReport) -> f64| -> (f64, f64) {
            let v: Vec<f64> = cells.iter().filter(|c| c.method == method).map(|c| f(&c.metrics)).collect();
            mean_and_std(&v)
        };
        MethodSummary {
            method,
            n_runs: cells.iter().filter(|c| c.method == method).count(),
            accuracy: pick(|m| m.accuracy),
            f1: pick(|m| m.f1),
            auc: pick(|m| m.auc),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.method, self.n_runs, self.accuracy.0, self.accuracy.1, self.f1.0, self.f1.1, self.auc.0, self.auc.1
        )
    }
}

fn summary_csv(rows: &[MethodSummary]) -> String {
    let mut out = format!("{}\n", MethodSummary::CSV_HEADER);
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

fn prepare_output(cfg: &ExperimentConfig) -> Result<()> {
    create_dir(&cfg.output_dir)?;
    write_file(&cfg.output_dir.join("config.toml"), cfg.to_toml()?)
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub cells: Vec<CellResult>,
    pub summary: MethodSummary,
}

/// Trains `cfg.method` once per seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    prepare_output(cfg)?;
    let cells = run_cells(cfg, &[cfg.method])?;
    let summary = MethodSummary::from_cells(cfg.method, &cells);
    write_file(&cfg.output_dir.join("summary.csv"), summary_csv(std::slice::from_ref(&summary)))?;
    Ok(ExperimentReport { cells, summary })
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub cells: Vec<CellResult>,
    pub summaries: Vec<MethodSummary>,
    /// Seeds whose methods did not all train on the same splits.
    pub mismatched_seeds: Vec<u64>,
}

/// Trains every method in `cfg.methods` on every seed. Each cell rebuilds its
/// splits independently; the recorded hashes show they agree per seed.
pub fn compare_methods(cfg: &ExperimentConfig) -> Result<Comparison> {
    cfg.validate_compare()?;
    prepare_output(cfg)?;
    let cells = run_cells(cfg, &cfg.methods)?;
    let summaries: Vec<MethodSummary> = cfg.methods.iter().map(|&m| MethodSummary::from_cells(m, &cells)).collect();
    write_file(&cfg.output_dir.join("comparison.csv"), summary_csv(&summaries))?;

    let mut hashes = String::from("seed");
    for m in &cfg.methods {
        let _ = write!(hashes, ",{m}");
    }
    hashes.push_str(",identical\n");
    let mut mismatched_seeds = Vec::new();
    for &seed in &cfg.seeds {
        let row: Vec<&str> = cfg
            .methods
            .iter()
            .map(|&m| {
                cells
                    .iter()
                    .find(|c| c.method == m && c.seed == seed)
                    .map(|c| c.split_hash.as_str())
                    .expect("every (method, seed) cell ran")
            })
            .collect();
        let identical = row.iter().all(|h| *h == row[0]);
        if !identical {
            mismatched_seeds.push(seed);
        }
        let _ = writeln!(hashes, "{seed},{},{identical}", row.join(","));
    }
    write_file(&cfg.output_dir.join("split_hashes.csv"), hashes)?;
    Ok(Comparison {
        cells,
        summaries,
        mismatched_seeds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AblationRow {
    pub beta: usize,
    pub gamma: f64,
    pub seed: u64,
    pub auc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AblationCell {
    pub beta: usize,
    pub gamma: f64,
    pub auc_mean: f64,
    pub auc_std: f64,
    pub reference: bool,
}

#[derive(Clone, Debug)]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
    pub cells: Vec<AblationCell>,
}

impl AblationReport {
    pub fn cell(&self, beta: usize, gamma: f64) -> Option<&AblationCell> {
        self.cells.iter().find(|c| c.beta == beta && c.gamma == gamma)
    }
}

/// Trains `cfg.method` over the β × γ grid for every seed. Only test AUC is
/// kept; no per-cell directories are written.
pub fn run_ablation(cfg: &ExperimentConfig) -> Result<AblationReport> {
    cfg.validate_ablation()?;
    prepare_output(cfg)?;
    let a = &cfg.ablation;
    let mut jobs = Vec::with_capacity(a.betas.len() * a.gammas.len() * cfg.seeds.len());
    for &beta in &a.betas {
        for &gamma in &a.gammas {
            for &seed in &cfg.seeds {
                jobs.push((beta, gamma, seed));
            }
        }
    }
    let rows: Vec<AblationRow> = jobs
        .par_iter()
        .map(|&(beta, gamma, seed)| {
            let splits = build_splits(cfg, seed)?;
            let engine = EngineConfig {
                beta,
                gamma,
                ..engine_for(cfg, cfg.method, seed)
            };
            let out = train_method(cfg, &engine, cfg.method, &splits)?;
            Ok(AblationRow {
                beta,
                gamma,
                seed,
                auc: out.test_metrics.auc,
            })
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for &beta in &a.betas {
        for &gamma in &a.gammas {
            let aucs: Vec<f64> = rows
                .iter()
                .filter(|r| r.beta == beta && r.gamma == gamma)
                .map(|r| r.auc)
                .collect();
            let (auc_mean, auc_std) = mean_and_std(&aucs);
            cells.push(AblationCell {
                beta,
                gamma,
                auc_mean,
                auc_std,
                reference: beta == REFERENCE_BETA && gamma == REFERENCE_GAMMA,
            });
        }
    }

    let mut long = String::from("beta,gamma,seed,auc\n");
    for r in &rows {
        let _ = writeln!(long, "{},{},{},{:.16e}", r.beta, r.gamma, r.seed, r.auc);
    }
    write_file(&cfg.output_dir.join("ablation.csv"), long)?;

    let mut summary = String::from("beta,gamma,n_runs,auc_mean,auc_std,reference\n");
    for c in &cells {
        let _ = writeln!(
            summary,
            "{},{},{},{:.16e},{:.16e},{}",
            c.beta,
            c.gamma,
            cfg.seeds.len(),
            c.auc_mean,
            c.auc_std,
            c.reference
        );
    }
    write_file(&cfg.output_dir.join("ablation_summary.csv"), summary)?;

    let mut pivot = String::from("beta");
    for g in &a.gammas {
        let _ = write!(pivot, ",gamma={g}");
    }
    pivot.push('\n');
    for &beta in &a.betas {
        pivot.push_str(&beta.to_string());
        for &gamma in &a.gammas {
            let c = cells.iter().find(|c| c.beta == beta && c.gamma == gamma).expect("cell exists");
            let _ = write!(pivot, ",{:.6}", c.auc_mean);
        }
        pivot.push('\n');
    }
    write_file(&cfg.output_dir.join("ablation_pivot.csv"), pivot)?;

    Ok(AblationReport { rows, cells })
}

/// Writes the splits `cfg` would use for `seed` in the dataset text format.
pub fn generate_data(cfg: &ExperimentConfig, seed: u64, path: &Path) -> Result<DatasetSplits> {
    cfg.validate()?;
    let splits = build_splits(cfg, seed)?;
    let mut buf = Vec::new();
    write_dataset(&splits, &mut buf)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_file(path, buf)?;
    Ok(splits)
}

/// Pairwise Pearson correlations of the labeled samples (every partition)
/// grouped by whether the pair shares a label. Writes
/// `correlation_within.csv` and `correlation_between.csv` to `out_dir`.
pub fn analyze_correlation(data: &Path, bins: usize, out_dir: &Path) -> Result<CorrelationDensity> {
    let splits = load_dataset(data)?;
    let labeled: Vec<Sample> = splits
        .labeled_train()
        .iter()
        .chain(splits.validation())
        .chain(splits.test())
        .cloned()
        .collect();
    let density = correlation_density(&labeled, bins)?;
    create_dir(out_dir)?;
    write_file(&out_dir.join("correlation_within.csv"), density.within_hist.to_csv())?;
    write_file(&out_dir.join("correlation_between.csv"), density.between_hist.to_csv())?;
    Ok(density)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}
