use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::metrics::MetricsReport;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub epoch: usize,
    pub loss_val_before: f64,
    pub loss_val_after: f64,
    pub reward: f64,
    pub policy_update: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub test: MetricsReport,
    /// Pseudo-labeled samples the classifier saw this epoch.
    pub pseudo_count: usize,
}

/// Per-step rewards and per-epoch test metrics of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub steps: Vec<StepRecord>,
    pub epochs: Vec<EpochRecord>,
}

impl History {
    pub const CSV_HEADER: &'static str = "kind,step,loss_val_before,loss_val_after,reward,policy_update_flag,epoch,test_accuracy,test_f1,test_auc,pseudo_count";

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty() && self.epochs.is_empty()
    }

    pub fn policy_updates(&self) -> usize {
        self.steps.iter().filter(|s| s.policy_update).count()
    }

    /// Step rows, each epoch's summary row following its last step.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(128 * (self.steps.len() + self.epochs.len() + 1));
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        let mut steps = self.steps.iter().peekable();
        for e in &self.epochs {
            while let Some(s) = steps.next_if(|s| s.epoch <= e.epoch) {
                write_step(&mut out, s);
            }
            let _ = writeln!(
                out,
                "epoch,,,,,,{},{:.16e},{:.16e},{:.16e},{}",
                e.epoch, e.test.accuracy, e.test.f1, e.test.auc, e.pseudo_count
            );
        }
        for s in steps {
            write_step(&mut out, s);
        }
        out
    }
}

fn write_step(out: &mut String, s: &StepRecord) {
    let _ = writeln!(
        out,
        "step,{},{:.16e},{:.16e},{:.16e},{},{},,,,",
        s.step,
        s.loss_val_before,
        s.loss_val_after,
        s.reward,
        u8::from(s.policy_update),
        s.epoch
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let m = MetricsReport {
            accuracy: 0.5,
            f1: 0.25,
            auc: 0.75,
            n_samples: 4,
            positive_class: 1,
        };
        let step = |i, e| StepRecord {
            step: i,
            epoch: e,
            loss_val_before: 0.7,
            loss_val_after: 0.6,
            reward: 0.1,
            policy_update: i == 1,
        };
        let h = History {
            steps: vec![step(0, 0), step(1, 0), step(2, 1)],
            epochs: vec![
                EpochRecord { epoch: 0, test: m, pseudo_count: 3 },
                EpochRecord { epoch: 1, test: m, pseudo_count: 0 },
            ],
        };
        let csv = h.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("step,0,"));
        assert!(lines[2].starts_with("step,1,") && lines[2].contains(",1,0,,,,"));
        assert!(lines[3].starts_with("epoch,,,,,,0,"));
        assert!(lines[4].starts_with("step,2,"));
        assert!(lines[5].ends_with(",0"));
        for l in &lines {
            assert_eq!(l.split(',').count(), 11, "{l}");
        }
        assert_eq!(h.policy_updates(), 1);
    }
}
