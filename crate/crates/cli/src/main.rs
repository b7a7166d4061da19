use std::process::ExitCode;

use clap::Parser;
use pseudosup_cli::args::{Cli, Command};
use pseudosup_cli::{runner, Result};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run(o) => {
            let cfg = o.resolve()?;
            let report = runner::run_experiment(&cfg)?;
            let s = &report.summary;
            println!(
                "{}: {} runs, AUC {:.4} ± {:.4}, accuracy {:.4} ± {:.4}, F1 {:.4} ± {:.4}",
                s.method, s.n_runs, s.auc.0, s.auc.1, s.accuracy.0, s.accuracy.1, s.f1.0, s.f1.1
            );
            println!("wrote {}", cfg.output_dir.display());
        }
        Command::Ablate { overrides, betas, gammas } => {
            let mut cfg = overrides.resolve()?;
            if let Some(b) = betas {
                cfg.ablation.betas = b;
            }
            if let Some(g) = gammas {
                cfg.ablation.gammas = g;
            }
            let report = runner::run_ablation(&cfg)?;
            println!("beta  gamma  mean AUC");
            for c in &report.cells {
                let mark = if c.reference { "  (reference)" } else { "" };
                println!("{:>4}  {:>5}  {:.4} ± {:.4}{mark}", c.beta, c.gamma, c.auc_mean, c.auc_std);
            }
            println!("wrote {}", cfg.output_dir.display());
        }
        Command::Compare { overrides, methods } => {
            let mut cfg = overrides.resolve()?;
            if let Some(m) = methods {
                cfg.methods = m;
            }
            let cmp = runner::compare_methods(&cfg)?;
            for s in &cmp.summaries {
                println!(
                    "{:<15} AUC {:.4} ± {:.4}  accuracy {:.4} ± {:.4}  F1 {:.4} ± {:.4}",
                    s.method.as_str(),
                    s.auc.0,
                    s.auc.1,
                    s.accuracy.0,
                    s.accuracy.1,
                    s.f1.0,
                    s.f1.1
                );
            }
            if !cmp.mismatched_seeds.is_empty() {
                eprintln!("warning: split hashes differ for seeds {:?}", cmp.mismatched_seeds);
            }
            println!("wrote {}", cfg.output_dir.display());
        }
        Command::GenData { overrides, seed, out } => {
            let cfg = overrides.resolve()?;
            let splits = runner::generate_data(&cfg, seed, &out)?;
            println!(
                "wrote {} ({} labeled, {} unlabeled, {} val, {} test)",
                out.display(),
                splits.labeled_train().len(),
                splits.unlabeled_train().len(),
                splits.validation().len(),
                splits.test().len()
            );
        }
        Command::AnalyzeCorr { data, bins, out } => {
            let d = runner::analyze_correlation(&data, bins, &out)?;
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
            println!(
                "within-class mean r {:.4} over {} pairs; between-class mean r {:.4} over {} pairs; {} skipped",
                mean(&d.within_group),
                d.within_group.len(),
                mean(&d.between_group),
                d.between_group.len(),
                d.skipped_pairs
            );
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}
