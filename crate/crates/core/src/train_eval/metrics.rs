use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::Window;
use crate::error::{Error, Result};
use crate::par;

/// Anything that maps contexts to next-token log probabilities.
pub trait Predictor: Sync {
    /// Required context length, or `None` when any length is accepted.
    fn context_len(&self) -> Option<usize>;

    fn vocab_size(&self) -> usize;

    /// Natural-log next-token probabilities, `V` values per context, row-major.
    fn log_probs(&self, contexts: &[&[u32]]) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub dataset: String,
    pub model: String,
    pub accuracy: f64,
    pub mean_log_likelihood: f64,
    pub n: usize,
}

pub const METRICS_CSV_HEADER: &str = "dataset,model,accuracy,mean_log_likelihood,n";

pub fn write_metrics_csv<W: Write>(mut w: W, records: &[MetricsRecord]) -> std::io::Result<()> {
    writeln!(w, "{METRICS_CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.dataset, r.model, r.accuracy, r.mean_log_likelihood, r.n
        )?;
    }
    Ok(())
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in row.iter().enumerate() {
        if *v > row[best] {
            best = i;
        }
    }
    best
}

/// Sums of (hits, log likelihood) over rows of log probabilities.
pub(crate) fn score_rows(log_probs: &[f64], vocab_size: usize, targets: &[u32]) -> (usize, f64) {
    let mut hits = 0;
    let mut ll = 0.0;
    for (row, &t) in log_probs.chunks_exact(vocab_size).zip(targets) {
        if argmax(row) == t as usize {
            hits += 1;
        }
        ll += row[t as usize];
    }
    (hits, ll)
}

const EVAL_BATCH: usize = 256;

/// Accuracy (argmax = target) and mean natural-log likelihood of the target.
pub fn evaluate<P: Predictor + ?Sized>(
    model: &P,
    windows: &[Window],
    dataset: &str,
    model_name: &str,
) -> Result<MetricsRecord> {
    if windows.is_empty() {
        return Err(Error::Validation(format!("no windows to evaluate for {dataset}")));
    }
    let v = model.vocab_size();
    if let Some(k) = model.context_len() {
        if let Some(w) = windows.iter().find(|w| w.context.len() != k) {
            return Err(Error::shape("evaluate", &[k], &[w.context.len()]));
        }
    }
    if let Some(w) = windows.iter().find(|w| w.target as usize >= v) {
        return Err(Error::Range(format!("target {} >= V = {v}", w.target)));
    }
    let batches: Vec<&[Window]> = windows.chunks(EVAL_BATCH).collect();
    let partial = par::map(&batches, |batch| -> Result<(usize, f64)> {
        let contexts: Vec<&[u32]> = batch.iter().map(|w| w.context.as_slice()).collect();
        let targets: Vec<u32> = batch.iter().map(|w| w.target).collect();
        let lp = model.log_probs(&contexts)?;
        Ok(score_rows(&lp, v, &targets))
    });
    let mut hits = 0;
    let mut ll = 0.0;
    for p in partial {
        let (h, l) = p?;
        hits += h;
        ll += l;
    }
    let n = windows.len();
    Ok(MetricsRecord {
        dataset: dataset.to_string(),
        model: model_name.to_string(),
        accuracy: hits as f64 / n as f64,
        mean_log_likelihood: ll / n as f64,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Returns fixed logits per context (keyed by the first context id).
    struct Fixed(Vec<Vec<f64>>);

    impl Predictor for Fixed {
        fn context_len(&self) -> Option<usize> {
            Some(1)
        }
        fn vocab_size(&self) -> usize {
            3
        }
        fn log_probs(&self, contexts: &[&[u32]]) -> Result<Vec<f64>> {
            Ok(contexts
                .iter()
                .flat_map(|c| {
                    let logits = &self.0[c[0] as usize];
                    let lse = logits.iter().map(|l| l.exp()).sum::<f64>().ln();
                    logits.iter().map(move |l| l - lse).collect::<Vec<_>>()
                })
                .collect())
        }
    }

    fn w(c: u32, t: u32) -> Window {
        Window {
            match_id: 0,
            context: vec![c],
            target: t,
        }
    }

    #[test]
    fn three_window_hand_case() {
        let model = Fixed(vec![vec![0.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 0.0, 0.0]]);
        let r = evaluate(&model, &[w(0, 1), w(1, 1), w(2, 2)], "hand", "fixed").unwrap();
        // window 0: argmax 1, hit; window 1: tie 0/1 -> 0, miss; window 2: tie -> 0, miss.
        assert!((r.accuracy - 1.0 / 3.0).abs() < 1e-15);
        let z0 = 2.0 + 1f64.exp();
        let z1 = 2.0 * 2f64.exp() + 1.0;
        let expected = ((1f64.exp() / z0).ln() + (2f64.exp() / z1).ln() + (1.0f64 / 3.0).ln()) / 3.0;
        assert!((r.mean_log_likelihood - expected).abs() < 1e-12);
        assert_eq!(r.n, 3);
    }

    #[test]
    fn constant_argmax_accuracy_is_modal_frequency() {
        let model = Fixed(vec![vec![0.0, 5.0, 0.0]; 3]);
        let windows = [w(0, 1), w(1, 1), w(2, 0), w(0, 2), w(1, 1)];
        let r = evaluate(&model, &windows, "d", "m").unwrap();
        assert!((r.accuracy - 3.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_empty_and_mismatched_windows() {
        let model = Fixed(vec![vec![0.0; 3]; 3]);
        assert!(matches!(evaluate(&model, &[], "d", "m"), Err(Error::Validation(_))));
        let long = Window {
            match_id: 0,
            context: vec![0, 1],
            target: 0,
        };
        assert!(matches!(evaluate(&model, &[long], "d", "m"), Err(Error::Shape { .. })));
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "dataset,model,accuracy,mean_log_likelihood,n\n"
        );
    }
}
