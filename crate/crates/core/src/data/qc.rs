//! Scan and visual-field reliability screening.

use serde::{Deserialize, Serialize};

use super::Sample;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QcRecord {
    /// 0 (worst) to 10 (best).
    pub signal_strength: u8,
    pub fixation_loss_rate: f64,
    pub false_positive_rate: f64,
    pub false_negative_rate: f64,
}

pub const MIN_SIGNAL_STRENGTH: u8 = 6;
pub const MAX_FIXATION_LOSS: f64 = 0.33;
pub const MAX_FALSE_POSITIVE: f64 = 0.20;
pub const MAX_FALSE_NEGATIVE: f64 = 0.20;

/// Exclusion counts per rule. A record failing several rules counts once per rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QcReport {
    pub total: usize,
    pub retained: usize,
    pub low_signal: usize,
    pub fixation_loss: usize,
    pub false_positive: usize,
    pub false_negative: usize,
}

impl QcRecord {
    pub fn failures(&self) -> [bool; 4] {
        [
            self.signal_strength < MIN_SIGNAL_STRENGTH,
            self.fixation_loss_rate > MAX_FIXATION_LOSS,
            self.false_positive_rate > MAX_FALSE_POSITIVE,
            self.false_negative_rate > MAX_FALSE_NEGATIVE,
        ]
    }

    pub fn passes(&self) -> bool {
        !self.failures().iter().any(|&f| f)
    }
}

/// Keeps samples with signal ≥ 6, fixation losses ≤ 33 %, and false positive
/// and false negative rates ≤ 20 %.
pub fn qc_filter(records: &[(Sample, QcRecord)]) -> (Vec<Sample>, QcReport) {
    let mut report = QcReport {
        total: records.len(),
        ..Default::default()
    };
    let mut kept = Vec::new();
    for (sample, qc) in records {
        let [signal, fixation, fp, fneg] = qc.failures();
        report.low_signal += signal as usize;
        report.fixation_loss += fixation as usize;
        report.false_positive += fp as usize;
        report.false_negative += fneg as usize;
        if qc.passes() {
            kept.push(sample.clone());
        }
    }
    report.retained = kept.len();
    (kept, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(signal: u8, fix: f64, fp: f64, fneg: f64) -> QcRecord {
        QcRecord {
            signal_strength: signal,
            fixation_loss_rate: fix,
            false_positive_rate: fp,
            false_negative_rate: fneg,
        }
    }

    #[test]
    fn boundaries() {
        assert!(rec(6, 0.0, 0.0, 0.0).passes());
        assert!(!rec(5, 0.0, 0.0, 0.0).passes());
        assert!(rec(10, 0.33, 0.20, 0.20).passes());
        assert!(!rec(10, 0.34, 0.0, 0.0).passes());
        assert!(!rec(10, 0.0, 0.21, 0.0).passes());
        assert!(!rec(10, 0.0, 0.0, 0.21).passes());
    }

    #[test]
    fn report_counts_each_rule() {
        let s = |id| Sample::unlabeled(id, vec![0.0]);
        let records = vec![
            (s(0), rec(6, 0.0, 0.0, 0.0)),
            (s(1), rec(5, 0.5, 0.0, 0.0)),
            (s(2), rec(9, 0.0, 0.3, 0.3)),
        ];
        let (kept, report) = qc_filter(&records);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].id, 0);
        assert_eq!(
            report,
            QcReport {
                total: 3,
                retained: 1,
                low_signal: 1,
                fixation_loss: 1,
                false_positive: 1,
                false_negative: 1,
            }
        );
    }
}
