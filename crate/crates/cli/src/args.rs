//! Command-line surface. Flags mirror configuration fields and are applied
//! on top of `--config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, Method};
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "pseudosup", version, about = "Pseudo-supervisor semi-supervised experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one method for every seed and write a summary.
    Run(Overrides),
    /// Sweep β and γ for a policy method.
    Ablate {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
    },
    /// Train several methods on shared splits.
    Compare {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
    },
    /// Write the splits for one seed to a dataset file.
    GenData {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Histogram within-class and between-class sample correlations.
    AnalyzeCorr {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub multimodal: bool,
    #[arg(long)]
    pub confidence_threshold: Option<f64>,
    /// Pre-split dataset file instead of synthetic data.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub n_per_class: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub class_separation: Option<f64>,
    /// Grid shape as `HxW`.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<[usize; 2]>,
    #[arg(long)]
    pub label_fraction: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub warmup_steps: Option<usize>,
    #[arg(long)]
    pub beta: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub classifier_lr: Option<f64>,
    #[arg(long)]
    pub policy_lr: Option<f64>,
    #[arg(long)]
    pub batch_labeled: Option<usize>,
    #[arg(long)]
    pub batch_unlabeled: Option<usize>,
    #[arg(long)]
    pub pseudo_loss_weight: Option<f64>,
}

fn parse_grid(s: &str) -> std::result::Result<[usize; 2], String> {
    let (h, w) = s.split_once(['x', 'X']).ok_or("expected HxW, e.g. 8x8")?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok([parse(h)?, parse(w)?])
}

impl Overrides {
    /// Loads `--config` (or the defaults) and applies every flag that was given.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path).map_err(|e| match e {
                CliError::Io { .. } => CliError::config(format!("config: {e}")),
                other => other,
            })?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = &self.$flag { cfg.$($field).+ = v.clone(); })*
            };
        }
        set!(
            method => method,
            seeds => seeds,
            output_dir => output_dir,
            n_per_class => dataset.n_per_class,
            dim => dataset.dim,
            class_separation => dataset.class_separation,
            label_fraction => dataset.label_fraction,
            epochs => engine.epochs,
            warmup_steps => engine.warmup_steps,
            beta => engine.beta,
            gamma => engine.gamma,
            classifier_lr => engine.classifier_lr,
            policy_lr => engine.policy_lr,
            batch_labeled => engine.batch_labeled,
            batch_unlabeled => engine.batch_unlabeled,
            pseudo_loss_weight => engine.pseudo_loss_weight,
        );
        if let Some(t) = self.confidence_threshold {
            cfg.confidence_threshold = Some(t);
        }
        if let Some(p) = &self.data {
            cfg.dataset.path = Some(p.clone());
        }
        if let Some(g) = self.grid {
            cfg.dataset.grid = Some(g);
        }
        if self.multimodal {
            cfg.multimodal = true;
        }
        Ok(cfg)
    }
}
