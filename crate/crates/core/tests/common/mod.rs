#![allow(dead_code)]

use pitchseq::models::Network;
use pitchseq::nn::{Scalar, Tape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;
/// Below this magnitude central differences are dominated by roundoff
/// (about eps·|loss|/step), so errors are measured against it instead.
pub const GRAD_FLOOR: f64 = 1e-6;

/// |a - b| relative to the larger magnitude, with a floor for gradients
/// that are essentially zero.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(GRAD_FLOOR)
}

/// Central difference of `f` at 0, compared with `analytic`. A step that
/// straddles a ReLU kink gives a one-sided slope mixture, so when the
/// default step disagrees the check retries with smaller steps and keeps the
/// closest; a genuinely wrong gradient disagrees at every step.
pub fn fd_check(analytic: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let mut best = (f64::INFINITY, f64::NAN);
    for h in [FD_STEP, FD_STEP / 10.0, FD_STEP / 100.0] {
        let numeric = (f(h) - f(-h)) / (2.0 * h);
        let e = rel_err(analytic, numeric);
        if e < best.0 {
            best = (e, numeric);
        }
        if e < 1e-6 {
            break;
        }
    }
    best
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_batch(rng: &mut ChaCha8Rng, n: usize, k: usize, v: usize) -> (Vec<Vec<u32>>, Vec<u32>) {
    let ctx = (0..n)
        .map(|_| (0..k).map(|_| rng.gen_range(0..v as u32)).collect())
        .collect();
    let tgt = (0..n).map(|_| rng.gen_range(0..v as u32)).collect();
    (ctx, tgt)
}

pub fn mean_ce<T: Scalar>(net: &Network<T>, ctx: &[Vec<u32>], tgt: &[u32]) -> f64 {
    let refs: Vec<&[u32]> = ctx.iter().map(Vec::as_slice).collect();
    let mut tape = Tape::with_params(net.store());
    let logits = net.forward(&mut tape, &refs).unwrap();
    let loss = tape.cross_entropy(logits, tgt).unwrap();
    tape.value(loss).data()[0].as_f64()
}

/// Analytic gradients, left in the store's `grad` buffers.
pub fn backprop(net: &mut Network<f64>, ctx: &[Vec<u32>], tgt: &[u32]) {
    let refs: Vec<&[u32]> = ctx.iter().map(Vec::as_slice).collect();
    let grads = {
        let mut tape = Tape::with_params(net.store());
        let logits = net.forward(&mut tape, &refs).unwrap();
        let loss = tape.cross_entropy(logits, tgt).unwrap();
        let g = tape.backward(loss).unwrap();
        tape.param_grads(g)
    };
    let store = net.store_mut();
    store.zero_grad();
    store.accumulate(grads);
}

#[derive(Debug, Default)]
pub struct CheckSummary {
    pub checked: usize,
    pub worst: f64,
    pub worst_at: String,
}

/// Compares analytic and central-difference gradients on the scalars chosen
/// by `pick(param_name, len)`.
pub fn check_network(
    net: &mut Network<f64>,
    ctx: &[Vec<u32>],
    tgt: &[u32],
    pick: impl Fn(&str, usize) -> Vec<usize>,
) -> CheckSummary {
    backprop(net, ctx, tgt);
    let names: Vec<(String, usize)> = net.store().iter().map(|p| (p.name.clone(), p.value.len())).collect();
    let mut summary = CheckSummary::default();
    for (name, len) in names {
        let id = net.store().id(&name).unwrap();
        let analytic = net.store().get(id).grad.clone();
        for i in pick(&name, len) {
            let orig = net.store().get(id).value.data()[i];
            let (e, numeric) = fd_check(analytic[i], |h| {
                net.store_mut().get_mut(id).value.data_mut()[i] = orig + h;
                mean_ce(net, ctx, tgt)
            });
            net.store_mut().get_mut(id).value.data_mut()[i] = orig;
            summary.checked += 1;
            if e > summary.worst {
                summary.worst = e;
                summary.worst_at = format!("{name}[{i}] analytic {:e} numeric {:e}", analytic[i], numeric);
            }
        }
    }
    summary
}

pub fn every(_: &str, len: usize) -> Vec<usize> {
    (0..len).collect()
}

use pitchseq::nn::{Tensor, Var};

/// Worst relative error between analytic and numeric gradients of
/// `Σ r ⊙ f(inputs)` (a fixed random projection `r`) w.r.t. every input.
pub fn check_op(inputs: &[Tensor<f64>], seed: u64, f: impl Fn(&mut Tape<'_, f64>, &[Var]) -> Var) -> f64 {
    let objective = |tape: &mut Tape<'_, f64>, vars: &[Var], r: &Option<Vec<f64>>| -> (Var, Vec<f64>) {
        let out = f(tape, vars);
        let n = tape.value(out).len();
        let r = r.clone().unwrap_or_else(|| {
            let mut g = rng(seed);
            (0..n).map(|_| g.gen_range(-1.0..1.0)).collect()
        });
        let flat = tape.reshape(out, &[1, n]).unwrap();
        let proj = tape.input(Tensor::new(&[n, 1], r.clone()).unwrap());
        let y = tape.matmul(flat, proj).unwrap();
        (tape.sum(y).unwrap(), r)
    };
    let mut tape = Tape::new();
    let vars: Vec<Var> = inputs.iter().map(|t| tape.leaf(t.clone())).collect();
    let (loss, r) = objective(&mut tape, &vars, &None);
    let grads = tape.backward(loss).unwrap();
    let analytic: Vec<Vec<f64>> = vars.iter().map(|&v| grads.get(v).unwrap().to_vec()).collect();
    let r = Some(r);
    let eval = |xs: &[Tensor<f64>]| -> f64 {
        let mut tape = Tape::new();
        let vars: Vec<Var> = xs.iter().map(|t| tape.leaf(t.clone())).collect();
        let (loss, _) = objective(&mut tape, &vars, &r);
        tape.value(loss).data()[0]
    };
    let mut worst = 0.0f64;
    let mut xs = inputs.to_vec();
    for a in 0..xs.len() {
        for i in 0..xs[a].len() {
            let orig = xs[a].data()[i];
            xs[a].data_mut()[i] = orig + FD_STEP;
            let up = eval(&xs);
            xs[a].data_mut()[i] = orig - FD_STEP;
            let down = eval(&xs);
            xs[a].data_mut()[i] = orig;
            worst = worst.max(rel_err(analytic[a][i], (up - down) / (2.0 * FD_STEP)));
        }
    }
    worst
}

pub fn random_tensor(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor<f64> {
    let n = shape.iter().product();
    Tensor::new(shape, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// Per-op checks as `(op name, worst relative error)`.
pub fn op_checks() -> Vec<(&'static str, f64)> {
    let mut g = rng(21);
    let mut out = Vec::new();
    let a = random_tensor(&mut g, &[2, 3, 4]);
    let b = random_tensor(&mut g, &[4, 5]);
    out.push((
        "matmul",
        check_op(&[a.clone(), b], 1, |t, v| t.matmul(v[0], v[1]).unwrap()),
    ));
    let bias = random_tensor(&mut g, &[4]);
    out.push((
        "add",
        check_op(&[a.clone(), bias.clone()], 2, |t, v| t.add(v[0], v[1]).unwrap()),
    ));
    // keep inputs away from the kink
    let mut r = random_tensor(&mut g, &[3, 4]);
    r.data_mut().iter_mut().for_each(|x| *x += 0.1 * x.signum());
    out.push(("relu", check_op(&[r], 3, |t, v| t.relu(v[0]).unwrap())));
    let table = random_tensor(&mut g, &[6, 3]);
    out.push((
        "embedding",
        check_op(&[table], 4, |t, v| {
            t.embedding(v[0], &[1, 5, 1, 0, 5, 2], &[2, 3]).unwrap()
        }),
    ));
    let gain = random_tensor(&mut g, &[4]);
    out.push((
        "layer_norm",
        check_op(&[a.clone(), gain, bias], 5, |t, v| {
            t.layer_norm(v[0], v[1], v[2]).unwrap()
        }),
    ));
    out.push((
        "softmax",
        check_op(std::slice::from_ref(&a), 6, |t, v| t.softmax(v[0]).unwrap()),
    ));
    out.push((
        "log_softmax",
        check_op(std::slice::from_ref(&a), 7, |t, v| t.log_softmax(v[0]).unwrap()),
    ));
    let logits = random_tensor(&mut g, &[3, 5]);
    out.push((
        "cross_entropy",
        check_op(&[logits], 8, |t, v| t.cross_entropy(v[0], &[4, 0, 2]).unwrap()),
    ));
    let (bsz, seq, d) = (2, 4, 6);
    let q = random_tensor(&mut g, &[bsz * seq, d]);
    let k = random_tensor(&mut g, &[bsz * seq, d]);
    let val = random_tensor(&mut g, &[bsz * seq, d]);
    out.push((
        "causal_attention",
        check_op(&[q, k, val], 9, |t, v| {
            t.causal_attention(v[0], v[1], v[2], bsz, seq, 2).unwrap()
        }),
    ));
    out.push((
        "rows",
        check_op(std::slice::from_ref(&a), 10, |t, v| t.rows(v[0], &[5, 0, 5]).unwrap()),
    ));
    out.push((
        "reshape",
        check_op(std::slice::from_ref(&a), 11, |t, v| t.reshape(v[0], &[4, 6]).unwrap()),
    ));
    out.push(("sum", check_op(&[a], 12, |t, v| t.sum(v[0]).unwrap())));
    out
}

/// Element names with their `class` attribute, in document order. Fails on
/// anything that is not well-formed XML with an `<svg>` root.
pub fn svg_elements(svg: &str) -> Result<Vec<(String, String)>, String> {
    use quick_xml::events::Event;
    let mut reader = quick_xml::Reader::from_str(svg);
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut roots = 0usize;
    loop {
        let ev = reader
            .read_event()
            .map_err(|e| format!("at byte {}: {e}", reader.buffer_position()))?;
        let (start, is_open) = match &ev {
            Event::Start(s) => (Some(s.clone()), true),
            Event::Empty(s) => (Some(s.clone()), false),
            Event::End(_) => {
                depth = depth.checked_sub(1).ok_or("unbalanced end tag")?;
                (None, false)
            }
            Event::Eof => break,
            _ => (None, false),
        };
        if let Some(s) = start {
            let name = String::from_utf8_lossy(s.name().as_ref()).into_owned();
            if depth == 0 {
                roots += 1;
                if name != "svg" {
                    return Err(format!("root element is <{name}>"));
                }
            }
            let class = s
                .try_get_attribute("class")
                .map_err(|e| e.to_string())?
                .map(|a| String::from_utf8_lossy(&a.value).into_owned())
                .unwrap_or_default();
            out.push((name, class));
            if is_open {
                depth += 1;
            }
        }
    }
    if depth != 0 || roots != 1 {
        return Err(format!("{roots} root elements, {depth} left open"));
    }
    Ok(out)
}

pub fn count_class(elements: &[(String, String)], name: &str, class: &str) -> usize {
    elements
        .iter()
        .filter(|(n, c)| n == name && c.split_whitespace().any(|x| x == class))
        .count()
}

/// Splits one CSV line, honoring double-quoted fields.
pub fn csv_fields(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in line.chars() {
        match c {
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    out.push(cur);
    out
}
