//! Match-level splits and fixed-length next-token windows.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{segments, MatchTable};
use crate::tokenizer::Vocabulary;

pub const DEFAULT_CONTEXT: usize = 9;

/// A contiguous run of token ids (one period of one match).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub match_id: u64,
    pub ids: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub match_id: u64,
    pub context: Vec<u32>,
    pub target: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<u64>,
    pub val: Vec<u64>,
    pub test: Vec<u64>,
    pub seed: u64,
}

/// Matches held out for each of validation and test: 10%, rounded half up.
pub fn holdout_size(n: usize) -> usize {
    (n + 5) / 10
}

/// 80/10/10 split by match. Validation and test each get
/// [`holdout_size`] matches; training gets the remainder.
pub fn split_matches(match_ids: &[u64], seed: u64) -> Result<Split> {
    let mut ids = match_ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 10 {
        return Err(Error::Validation(format!(
            "need at least 10 distinct matches to split, got {}",
            ids.len()
        )));
    }
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let h = holdout_size(ids.len());
    let mut test = ids[..h].to_vec();
    let mut val = ids[h..2 * h].to_vec();
    let mut train = ids[2 * h..].to_vec();
    test.sort_unstable();
    val.sort_unstable();
    train.sort_unstable();
    Ok(Split { train, val, test, seed })
}

/// Nested subsample: the first `ceil(fraction * n)` of a seeded shuffle, so
/// a larger fraction always contains a smaller one under the same seed.
pub fn subsample(match_ids: &[u64], fraction: f64, seed: u64) -> Result<Vec<u64>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Validation(format!("fraction {fraction} not in (0, 1]")));
    }
    let mut ids = match_ids.to_vec();
    ids.sort_unstable();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n = ((fraction * ids.len() as f64).ceil() as usize).clamp(1.min(ids.len()), ids.len());
    let mut out = ids[..n].to_vec();
    out.sort_unstable();
    Ok(out)
}

/// Token sequences for the given matches, one per period.
pub fn tokenize_matches(tables: &[MatchTable], vocab: &Vocabulary) -> Result<Vec<TokenSequence>> {
    let mut out = Vec::new();
    for t in tables {
        let ids = t
            .actions
            .iter()
            .map(|a| vocab.encode_id(a))
            .collect::<Result<Vec<_>>>()?;
        for seg in segments(&ids, &t.period_starts) {
            out.push(TokenSequence {
                match_id: t.match_id,
                ids: seg.to_vec(),
            });
        }
    }
    Ok(out)
}

/// Sequences grouped by the split their match belongs to. Matches outside
/// the split are dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    pub train: Vec<TokenSequence>,
    pub val: Vec<TokenSequence>,
    pub test: Vec<TokenSequence>,
}

pub fn partition(sequences: &[TokenSequence], split: &Split) -> Partition {
    let mut out = Partition::default();
    for s in sequences {
        let bucket = if split.train.contains(&s.match_id) {
            &mut out.train
        } else if split.val.contains(&s.match_id) {
            &mut out.val
        } else if split.test.contains(&s.match_id) {
            &mut out.test
        } else {
            continue;
        };
        bucket.push(s.clone());
    }
    out
}

/// Stride-1 windows inside each sequence; a sequence of n tokens yields
/// `max(0, n - k)` windows and no window spans two sequences.
pub fn make_windows(sequences: &[TokenSequence], k: usize) -> Vec<Window> {
    assert!(k >= 1, "context length must be at least 1");
    let mut out = Vec::with_capacity(window_count(sequences, k));
    for seq in sequences {
        for w in seq.ids.windows(k + 1) {
            out.push(Window {
                match_id: seq.match_id,
                context: w[..k].to_vec(),
                target: w[k],
            });
        }
    }
    out
}

pub fn window_count(sequences: &[TokenSequence], k: usize) -> usize {
    sequences.iter().map(|s| s.ids.len().saturating_sub(k)).sum()
}

/// Binary layout: `k: u32, V: u32, count: u64`, then `count` records of
/// `k + 1` ids (context then target), all little-endian.
pub fn write_windows<W: Write>(mut w: W, k: usize, vocab_size: usize, windows: &[Window]) -> std::io::Result<()> {
    w.write_all(&(k as u32).to_le_bytes())?;
    w.write_all(&(vocab_size as u32).to_le_bytes())?;
    w.write_all(&(windows.len() as u64).to_le_bytes())?;
    for win in windows {
        debug_assert_eq!(win.context.len(), k);
        for id in win.context.iter().chain(std::iter::once(&win.target)) {
            w.write_all(&id.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Returns `(k, V, windows)`; match ids are not stored and read back as 0.
pub fn read_windows<R: Read>(mut r: R) -> Result<(usize, usize, Vec<Window>)> {
    let io = |e| Error::io("<windows>", e);
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4).map_err(io)?;
    let k = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4).map_err(io)?;
    let v = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8).map_err(io)?;
    let count = u64::from_le_bytes(b8) as usize;
    let mut windows = Vec::with_capacity(count);
    for i in 0..count {
        let mut ids = Vec::with_capacity(k + 1);
        for _ in 0..=k {
            r.read_exact(&mut b4).map_err(io)?;
            let id = u32::from_le_bytes(b4);
            if id as usize >= v {
                return Err(Error::Parse {
                    record: format!("window {i}"),
                    message: format!("token id {id} >= V = {v}"),
                });
            }
            ids.push(id);
        }
        let target = ids.pop().expect("k + 1 ids");
        windows.push(Window {
            match_id: 0,
            context: ids,
            target,
        });
    }
    Ok((k, v, windows))
}
