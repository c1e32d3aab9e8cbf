//! Autoregressive rollouts with greedy or temperature (optionally top-k)
//! sampling.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::tokenizer::Vocabulary;
use crate::train_eval::{argmax, Predictor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    Greedy,
    Temperature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub mode: SamplerMode,
    pub temperature: f64,
    pub top_k: Option<usize>,
    pub seed: u64,
}

impl SamplerSpec {
    pub fn greedy() -> Self {
        SamplerSpec {
            mode: SamplerMode::Greedy,
            temperature: 1.0,
            top_k: None,
            seed: 0,
        }
    }

    pub fn temperature(temperature: f64, seed: u64) -> Self {
        SamplerSpec {
            mode: SamplerMode::Temperature,
            temperature,
            top_k: None,
            seed,
        }
    }

    pub fn with_top_k(self, k: usize) -> Self {
        SamplerSpec { top_k: Some(k), ..self }
    }

    pub fn validate(&self, vocab_size: usize) -> Result<()> {
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::Config(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if let Some(k) = self.top_k {
            if k == 0 || k > vocab_size {
                return Err(Error::Config(format!("top_k {k} outside 1..={vocab_size}")));
            }
        }
        Ok(())
    }
}

/// Uniform draw number `draw` of the stream owned by `seed`.
fn uniform(seed: u64, draw: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(draw);
    rng.gen::<f64>()
}

/// Chooses a token from one row of log probabilities (or logits).
pub fn sample(scores: &[f64], spec: &SamplerSpec, draw: u64) -> Result<u32> {
    spec.validate(scores.len())?;
    if spec.mode == SamplerMode::Greedy {
        return Ok(argmax(scores) as u32);
    }
    let mut candidates: Vec<usize> = (0..scores.len()).collect();
    if let Some(k) = spec.top_k {
        candidates.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        candidates.truncate(k);
        candidates.sort_unstable();
    }
    let max = candidates.iter().map(|&i| scores[i]).fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = candidates
        .iter()
        .map(|&i| ((scores[i] - max) / spec.temperature).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    let target = uniform(spec.seed, draw) * total;
    let mut cum = 0.0;
    for (&i, &w) in candidates.iter().zip(&weights) {
        cum += w;
        if cum > target {
            return Ok(i as u32);
        }
    }
    Ok(*candidates.last().expect("nonempty candidates") as u32)
}

fn check_context<P: Predictor + ?Sized>(model: &P, context: &[u32]) -> Result<()> {
    if let Some(k) = model.context_len() {
        if context.len() != k {
            return Err(Error::shape("generate context", &[context.len()], &[k]));
        }
    }
    if context.is_empty() {
        return Err(Error::Validation("empty context".into()));
    }
    Ok(())
}

/// Next token for `context`; `draw` indexes the sampler's random stream.
pub fn step<P: Predictor + ?Sized>(model: &P, context: &[u32], spec: &SamplerSpec, draw: u64) -> Result<u32> {
    Ok(step_with_prob(model, context, spec, draw)?.0)
}

fn step_with_prob<P: Predictor + ?Sized>(
    model: &P,
    context: &[u32],
    spec: &SamplerSpec,
    draw: u64,
) -> Result<(u32, f64)> {
    check_context(model, context)?;
    let lp = model.log_probs(&[context])?;
    let token = sample(&lp, spec, draw)?;
    Ok((token, lp[token as usize].exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratedStep {
    pub token: u32,
    /// Model probability of the chosen token.
    pub prob: f64,
}

/// Like [`rollout`], calling `observe(context, chosen)` before each slide.
pub fn rollout_with<P, F>(
    model: &P,
    seed_context: &[u32],
    n_steps: usize,
    spec: &SamplerSpec,
    mut observe: F,
) -> Result<Vec<GeneratedStep>>
where
    P: Predictor + ?Sized,
    F: FnMut(&[u32], u32),
{
    if n_steps == 0 {
        return Err(Error::Validation("n_steps must be at least 1".into()));
    }
    spec.validate(model.vocab_size())?;
    let mut context = seed_context.to_vec();
    let mut out = Vec::with_capacity(n_steps);
    for s in 0..n_steps {
        let (token, prob) = step_with_prob(model, &context, spec, s as u64)?;
        observe(&context, token);
        context.remove(0);
        context.push(token);
        out.push(GeneratedStep { token, prob });
    }
    Ok(out)
}

/// Generates `n_steps` tokens, sliding the context by one after each.
pub fn rollout<P: Predictor + ?Sized>(
    model: &P,
    seed_context: &[u32],
    n_steps: usize,
    spec: &SamplerSpec,
) -> Result<Vec<GeneratedStep>> {
    rollout_with(model, seed_context, n_steps, spec, |_, _| {})
}

/// `count` independent rollouts; rollout `i` uses sampler seed `spec.seed + i`.
pub fn rollouts<P: Predictor + ?Sized>(
    model: &P,
    seed_context: &[u32],
    n_steps: usize,
    spec: &SamplerSpec,
    count: usize,
) -> Result<Vec<Vec<GeneratedStep>>> {
    par::map_range(count, |i| {
        let s = SamplerSpec {
            seed: spec.seed.wrapping_add(i as u64),
            ..*spec
        };
        rollout(model, seed_context, n_steps, &s)
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutRecord {
    pub step: usize,
    pub token_id: u32,
    pub token: String,
    pub is_home: bool,
    pub action_type: String,
    pub bx: u8,
    pub by: u8,
    /// Bin center, yards.
    pub x: f64,
    pub y: f64,
    pub prob: f64,
}

pub fn rollout_records(steps: &[GeneratedStep], vocab: &Vocabulary) -> Result<Vec<RolloutRecord>> {
    steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let t = vocab.id_to_token(s.token)?;
            let (x, y) = t.bin.center();
            Ok(RolloutRecord {
                step: i + 1,
                token_id: s.token,
                token: t.to_string(),
                is_home: t.is_home,
                action_type: t.action_type.to_string(),
                bx: t.bin.bx,
                by: t.bin.by,
                x,
                y,
                prob: s.prob,
            })
        })
        .collect()
}

pub fn write_rollout_jsonl<W: Write>(mut w: W, records: &[RolloutRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(w, "{}", serde_json::to_string(r).expect("rollout record serializes"))?;
    }
    Ok(())
}
