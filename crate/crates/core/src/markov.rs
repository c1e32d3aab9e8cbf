//! Laplace-smoothed 2-gram transition model.
//!
//! `T[i][j] = 0.1 + #(i followed by j)` over adjacent pairs inside a
//! sequence, and `P` is `T` with each row normalized to sum to one.

use std::io::{Read, Write};

use crate::corpus::Window;
use crate::error::{Error, Result};
use crate::par;
use crate::train_eval::{self, MetricsRecord, Predictor};

pub const SMOOTHING: f64 = 0.1;
const DTYPE_F64: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    vocab_size: usize,
    counts: Vec<f64>,
    probs: Vec<f64>,
}

/// Fits on independent sequences (matches or periods); pairs are never
/// counted across sequence boundaries.
pub fn fit<S: AsRef<[u32]> + Sync>(sequences: &[S], vocab_size: usize) -> Result<TransitionModel> {
    if vocab_size == 0 {
        return Err(Error::Validation("vocabulary size must be positive".into()));
    }
    let per_sequence = par::map(sequences, |s| -> Result<Vec<(u32, u32)>> {
        let ids = s.as_ref();
        if let Some(bad) = ids.iter().find(|&&id| id as usize >= vocab_size) {
            return Err(Error::Range(format!("token id {bad} >= V = {vocab_size}")));
        }
        Ok(ids.windows(2).map(|p| (p[0], p[1])).collect())
    });
    let mut raw = vec![0u64; vocab_size * vocab_size];
    for pairs in per_sequence {
        for (i, j) in pairs? {
            raw[i as usize * vocab_size + j as usize] += 1;
        }
    }
    let counts = raw.into_iter().map(|c| SMOOTHING + c as f64).collect();
    Ok(TransitionModel::from_counts(vocab_size, counts))
}

impl TransitionModel {
    fn from_counts(vocab_size: usize, counts: Vec<f64>) -> Self {
        let mut probs = counts.clone();
        par::for_each_row(&mut probs, vocab_size, |_, row| {
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= total);
        });
        TransitionModel {
            vocab_size,
            counts,
            probs,
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    /// Smoothed count `T[i][j]`.
    pub fn count(&self, i: u32, j: u32) -> f64 {
        self.counts[i as usize * self.vocab_size + j as usize]
    }

    /// Transition probability `P[i][j]`.
    pub fn prob(&self, i: u32, j: u32) -> f64 {
        self.probs[i as usize * self.vocab_size + j as usize]
    }

    /// Row `current` of `P`.
    pub fn next_distribution(&self, current: u32) -> Result<&[f64]> {
        let i = current as usize;
        if i >= self.vocab_size {
            return Err(Error::Lookup(format!("token id {current} >= V = {}", self.vocab_size)));
        }
        Ok(&self.probs[i * self.vocab_size..(i + 1) * self.vocab_size])
    }

    /// Accuracy and mean log likelihood using only the last context token.
    pub fn evaluate(&self, windows: &[Window], dataset: &str) -> Result<MetricsRecord> {
        train_eval::evaluate(self, windows, dataset, "markov")
    }

    /// Header `V: u32, dtype: u32 (64 = f64)`, then `T` row-major, little-endian.
    pub fn save<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&(self.vocab_size as u32).to_le_bytes())?;
        w.write_all(&DTYPE_F64.to_le_bytes())?;
        for c in &self.counts {
            w.write_all(&c.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn load<R: Read>(mut r: R) -> Result<Self> {
        let io = |e| Error::io("<markov model>", e);
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4).map_err(io)?;
        let v = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b4).map_err(io)?;
        let dtype = u32::from_le_bytes(b4);
        if dtype != DTYPE_F64 {
            return Err(Error::Parse {
                record: "markov model header".into(),
                message: format!("unsupported dtype tag {dtype}"),
            });
        }
        let mut bytes = vec![0u8; v * v * 8];
        r.read_exact(&mut bytes).map_err(io)?;
        let counts: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        if let Some(c) = counts.iter().find(|c| !(**c >= SMOOTHING)) {
            return Err(Error::Validation(format!("transition count {c} below smoothing floor")));
        }
        Ok(TransitionModel::from_counts(v, counts))
    }
}

impl Predictor for TransitionModel {
    fn context_len(&self) -> Option<usize> {
        None
    }

    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn log_probs(&self, contexts: &[&[u32]]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(contexts.len() * self.vocab_size);
        for ctx in contexts {
            let last = *ctx.last().ok_or_else(|| Error::Validation("empty context".into()))?;
            out.extend(self.next_distribution(last)?.iter().map(|p| p.ln()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const A: u32 = 0;
    const B: u32 = 1;

    fn window(context: Vec<u32>, target: u32) -> Window {
        Window {
            match_id: 0,
            context,
            target,
        }
    }

    #[test]
    fn hand_counted_example() {
        let m = fit(&[vec![A, B, A, B]], 2).unwrap();
        assert_eq!(m.counts, vec![0.1, 2.1, 1.1, 0.1]);
        let row = m.next_distribution(A).unwrap();
        assert!((row[0] - 0.1 / 2.2).abs() < 1e-15);
        assert!((row[1] - 2.1 / 2.2).abs() < 1e-15);
        assert!((row[0] - 0.04545).abs() < 1e-5 && (row[1] - 0.95455).abs() < 1e-5);
        let argmax = row
            .iter()
            .enumerate()
            .fold(0, |best, (i, p)| if *p > row[best] { i } else { best });
        assert_eq!(argmax, B as usize);
    }

    #[test]
    fn empty_corpus_is_pure_smoothing() {
        let m = fit::<Vec<u32>>(&[], 2).unwrap();
        assert_eq!(m.counts, vec![0.1; 4]);
        assert_eq!(m.probs, vec![0.5; 4]);
        let m = fit::<Vec<u32>>(&[], 7).unwrap();
        for p in m.next_distribution(3).unwrap() {
            assert!((p - 1.0 / 7.0).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_pairs_are_excluded() {
        let split = fit(&[vec![A, B], vec![B, A]], 2).unwrap();
        let joined = fit(&[vec![A, B, B, A]], 2).unwrap();
        for (i, j) in [(A, A), (A, B), (B, A)] {
            assert_eq!(split.count(i, j), joined.count(i, j));
        }
        assert_eq!(split.count(B, B), 0.1);
        assert_eq!(joined.count(B, B), 1.1);
    }

    #[test]
    fn errors() {
        assert!(matches!(fit::<Vec<u32>>(&[], 0), Err(Error::Validation(_))));
        assert!(matches!(fit(&[vec![0, 5]], 3), Err(Error::Range(_))));
        let m = fit(&[vec![0, 1]], 2).unwrap();
        assert!(matches!(m.next_distribution(2), Err(Error::Lookup(_))));
        assert!(matches!(m.evaluate(&[], "val"), Err(Error::Validation(_))));
    }

    #[test]
    fn evaluate_hand_corpus() {
        // T from [a b a b]: row a = [0.1, 2.1] / 2.2, row b = [1.1, 0.1] / 1.2.
        let m = fit(&[vec![A, B, A, B]], 2).unwrap();
        let windows = vec![
            window(vec![B, A], B), // argmax b, hit, p = 2.1/2.2
            window(vec![A, B], A), // argmax a, hit, p = 1.1/1.2
            window(vec![B, A], A), // miss, p = 0.1/2.2
            window(vec![A, B], B), // miss, p = 0.1/1.2
        ];
        let r = m.evaluate(&windows, "hand").unwrap();
        assert_eq!(r.n, 4);
        assert!((r.accuracy - 0.5).abs() < 1e-15);
        let expected = ((2.1f64 / 2.2).ln() + (1.1f64 / 1.2).ln() + (0.1f64 / 2.2).ln() + (0.1f64 / 1.2).ln()) / 4.0;
        assert!((r.mean_log_likelihood - expected).abs() < 1e-12);
    }

    #[test]
    fn smoothing_only_model_scores_minus_ln_v() {
        let m = fit::<Vec<u32>>(&[], 40).unwrap();
        let r = m.evaluate(&[window(vec![3, 9], 17)], "x").unwrap();
        assert!((r.mean_log_likelihood + 40f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ties_break_to_lowest_id() {
        let m = fit(&[vec![0, 2], vec![0, 1]], 3).unwrap();
        let r = m.evaluate(&[window(vec![0], 1)], "t").unwrap();
        assert_eq!(r.accuracy, 1.0);
    }

    #[test]
    fn binary_round_trip() {
        let m = fit(&[vec![0, 1, 2, 2, 1], vec![2, 0]], 3).unwrap();
        let mut buf = Vec::new();
        m.save(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 9 * 8);
        assert_eq!(TransitionModel::load(&buf[..]).unwrap(), m);
    }

    proptest! {
        #[test]
        fn rows_are_stochastic(seqs in proptest::collection::vec(proptest::collection::vec(0u32..6, 0..40), 0..5)) {
            let m = fit(&seqs, 6).unwrap();
            for i in 0..6 {
                let s: f64 = m.next_distribution(i).unwrap().iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
                for j in 0..6 {
                    prop_assert!(m.count(i, j) >= SMOOTHING);
                    prop_assert_eq!(m.prob(i, j), m.count(i, j) / (0..6).map(|k| m.count(i, k)).sum::<f64>());
                }
            }
        }

        #[test]
        fn one_more_pair_raises_its_probability(
            seqs in proptest::collection::vec(proptest::collection::vec(0u32..5, 0..30), 1..4),
            i in 0u32..5,
            j in 0u32..5,
        ) {
            let before = fit(&seqs, 5).unwrap();
            let mut more = seqs.clone();
            more.push(vec![i, j]);
            let after = fit(&more, 5).unwrap();
            prop_assert!(after.prob(i, j) > before.prob(i, j));
        }
    }
}
