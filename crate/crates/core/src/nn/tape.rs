//! Reverse-mode differentiation over tensor-valued operations.
//!
//! Nodes are appended in evaluation order, so every parent index is smaller
//! than its child's and a single reverse sweep over the node list visits
//! each node once in reverse topological order.

use crate::error::{Error, Result};
use crate::par;

use super::kernels::{dot, matmul, matmul_at, matmul_bt};
use super::{ParamId, ParamStore, Scalar, Tensor};

pub const LAYER_NORM_EPS: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

enum Value<T> {
    Owned(Tensor<T>),
    Param(ParamId),
}

enum Op<T> {
    Input,
    Leaf,
    Param(ParamId),
    MatMul(Var, Var),
    Add(Var, Var),
    Relu(Var),
    Embedding {
        table: Var,
        ids: Vec<u32>,
    },
    LayerNorm {
        x: Var,
        gain: Var,
        bias: Var,
        xhat: Vec<T>,
        rstd: Vec<T>,
    },
    Softmax(Var),
    LogSoftmax(Var),
    CrossEntropy {
        logits: Var,
        targets: Vec<u32>,
        probs: Vec<T>,
    },
    Attention(Box<AttentionSaved<T>>),
    Rows {
        x: Var,
        rows: Vec<usize>,
    },
    Reshape(Var),
    Sum(Var),
}

struct AttentionSaved<T> {
    q: Var,
    k: Var,
    v: Var,
    batch: usize,
    seq: usize,
    heads: usize,
    /// `[batch, heads, seq, seq]`, zero above the diagonal.
    weights: Vec<T>,
}

struct Node<T> {
    value: Value<T>,
    op: Op<T>,
    tracked: bool,
}

/// Record of one forward evaluation.
pub struct Tape<'p, T: Scalar> {
    params: Option<&'p ParamStore<T>>,
    nodes: Vec<Node<T>>,
}

/// Gradients produced by [`Tape::backward`], indexed by node.
pub struct Gradients<T> {
    grads: Vec<Option<Vec<T>>>,
}

impl<T: Scalar> Gradients<T> {
    pub fn get(&self, var: Var) -> Option<&[T]> {
        self.grads.get(var.0).and_then(|g| g.as_deref())
    }
}

impl<'p, T: Scalar> Default for Tape<'p, T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<'p, T: Scalar> Tape<'p, T> {
    pub fn new() -> Self {
        Tape {
            params: None,
            nodes: Vec::new(),
        }
    }

    /// A tape whose parameter nodes read from `store` without copying.
    pub fn with_params(store: &'p ParamStore<T>) -> Self {
        Tape {
            params: Some(store),
            nodes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, var: Var) -> &Tensor<T> {
        match &self.nodes[var.0].value {
            Value::Owned(t) => t,
            Value::Param(id) => self
                .params
                .expect("parameter nodes require a parameter store")
                .value(*id),
        }
    }

    pub fn shape(&self, var: Var) -> &[usize] {
        self.value(var).shape()
    }

    fn tracked(&self, var: Var) -> bool {
        self.nodes[var.0].tracked
    }

    fn push(&mut self, value: Tensor<T>, op: Op<T>, parents: &[Var]) -> Var {
        debug_assert!(
            !parents.iter().all(|p| self.value(*p).is_finite()) || value.is_finite(),
            "non-finite forward value from finite inputs"
        );
        let tracked = parents.iter().any(|p| self.tracked(*p));
        self.nodes.push(Node {
            value: Value::Owned(value),
            op,
            tracked,
        });
        Var(self.nodes.len() - 1)
    }

    /// Constant input; no gradient flows into it.
    pub fn input(&mut self, value: Tensor<T>) -> Var {
        self.nodes.push(Node {
            value: Value::Owned(value),
            op: Op::Input,
            tracked: false,
        });
        Var(self.nodes.len() - 1)
    }

    /// Differentiable leaf whose gradient is reported by [`Gradients::get`].
    pub fn leaf(&mut self, value: Tensor<T>) -> Var {
        self.nodes.push(Node {
            value: Value::Owned(value),
            op: Op::Leaf,
            tracked: true,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn param(&mut self, id: ParamId) -> Var {
        assert!(self.params.is_some(), "tape was created without a parameter store");
        self.nodes.push(Node {
            value: Value::Param(id),
            op: Op::Param(id),
            tracked: true,
        });
        Var(self.nodes.len() - 1)
    }

    /// `[..., n] · [n, p] -> [..., p]`
    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (sa, sb) = (self.shape(a), self.shape(b));
        if sa.is_empty() || sb.len() != 2 || sa[sa.len() - 1] != sb[0] {
            return Err(Error::shape("matmul", sa, sb));
        }
        let (n, p) = (sb[0], sb[1]);
        let mut shape = sa.to_vec();
        *shape.last_mut().expect("nonempty") = p;
        let m = self.value(a).rows();
        let out = matmul(self.value(a).data(), self.value(b).data(), m, n, p);
        let t = Tensor::new(&shape, out)?;
        Ok(self.push(t, Op::MatMul(a, b), &[a, b]))
    }

    /// Elementwise sum; `b` may also match the trailing axes of `a`, in which
    /// case it is broadcast over the leading ones.
    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (sa, sb) = (self.shape(a), self.shape(b));
        if sb.len() > sa.len() || sa[sa.len() - sb.len()..] != *sb {
            return Err(Error::shape("add", sa, sb));
        }
        let bd = self.value(b).data();
        let blk = bd.len().max(1);
        let data: Vec<T> = self
            .value(a)
            .data()
            .iter()
            .enumerate()
            .map(|(i, &x)| x + bd[i % blk])
            .collect();
        let t = Tensor::new(sa, data)?;
        Ok(self.push(t, Op::Add(a, b), &[a, b]))
    }

    pub fn relu(&mut self, x: Var) -> Result<Var> {
        let v = self.value(x);
        let data = v
            .data()
            .iter()
            .map(|&z| if z > T::zero() { z } else { T::zero() })
            .collect();
        let t = Tensor::new(v.shape(), data)?;
        Ok(self.push(t, Op::Relu(x), &[x]))
    }

    /// Rows of `table` (`[V, d]`) selected by `ids`; output shape is
    /// `prefix ++ [d]` where `prefix` multiplies out to `ids.len()`.
    pub fn embedding(&mut self, table: Var, ids: &[u32], prefix: &[usize]) -> Result<Var> {
        let st = self.shape(table);
        if st.len() != 2 || prefix.iter().product::<usize>() != ids.len() {
            return Err(Error::shape("embedding", st, prefix));
        }
        let (vocab, d) = (st[0], st[1]);
        if let Some(bad) = ids.iter().find(|&&id| id as usize >= vocab) {
            return Err(Error::Lookup(format!("token id {bad} >= embedding rows {vocab}")));
        }
        let tv = self.value(table).data();
        let mut data = Vec::with_capacity(ids.len() * d);
        for &id in ids {
            data.extend_from_slice(&tv[id as usize * d..(id as usize + 1) * d]);
        }
        let mut shape = prefix.to_vec();
        shape.push(d);
        let t = Tensor::new(&shape, data)?;
        Ok(self.push(
            t,
            Op::Embedding {
                table,
                ids: ids.to_vec(),
            },
            &[table],
        ))
    }

    /// Normalizes over the last axis with epsilon 1e-5, then scales and shifts.
    pub fn layer_norm(&mut self, x: Var, gain: Var, bias: Var) -> Result<Var> {
        let d = self.value(x).last_dim();
        if self.shape(gain) != [d] || self.shape(bias) != [d] {
            return Err(Error::shape("layer_norm", self.shape(x), self.shape(gain)));
        }
        let xv = self.value(x);
        let (g, b) = (self.value(gain).data(), self.value(bias).data());
        let rows = xv.rows();
        let eps = T::of(LAYER_NORM_EPS);
        let dn = T::of(d as f64);
        let mut xhat = vec![T::zero(); xv.len()];
        let mut rstd = vec![T::zero(); rows];
        let mut out = vec![T::zero(); xv.len()];
        for r in 0..rows {
            let row = &xv.data()[r * d..(r + 1) * d];
            let mean = row.iter().copied().sum::<T>() / dn;
            let var = row.iter().map(|&z| (z - mean) * (z - mean)).sum::<T>() / dn;
            let rs = T::one() / (var + eps).sqrt();
            rstd[r] = rs;
            for j in 0..d {
                let h = (row[j] - mean) * rs;
                xhat[r * d + j] = h;
                out[r * d + j] = h * g[j] + b[j];
            }
        }
        let t = Tensor::new(xv.shape(), out)?;
        Ok(self.push(
            t,
            Op::LayerNorm {
                x,
                gain,
                bias,
                xhat,
                rstd,
            },
            &[x, gain, bias],
        ))
    }

    /// Softmax over the last axis.
    pub fn softmax(&mut self, x: Var) -> Result<Var> {
        let xv = self.value(x);
        let d = xv.last_dim();
        let mut out = xv.data().to_vec();
        for row in out.chunks_mut(d) {
            softmax_in_place(row);
        }
        let t = Tensor::new(xv.shape(), out)?;
        Ok(self.push(t, Op::Softmax(x), &[x]))
    }

    /// Log-softmax over the last axis.
    pub fn log_softmax(&mut self, x: Var) -> Result<Var> {
        let xv = self.value(x);
        let d = xv.last_dim();
        let mut out = xv.data().to_vec();
        for row in out.chunks_mut(d) {
            log_softmax_in_place(row);
        }
        let t = Tensor::new(xv.shape(), out)?;
        Ok(self.push(t, Op::LogSoftmax(x), &[x]))
    }

    /// Mean over rows of `-log_softmax(logits)[target]`; `logits` is `[B, V]`.
    pub fn cross_entropy(&mut self, logits: Var, targets: &[u32]) -> Result<Var> {
        let lv = self.value(logits);
        if lv.shape().len() != 2 || lv.shape()[0] != targets.len() || targets.is_empty() {
            return Err(Error::shape("cross_entropy", lv.shape(), &[targets.len()]));
        }
        let v = lv.shape()[1];
        if let Some(bad) = targets.iter().find(|&&t| t as usize >= v) {
            return Err(Error::Lookup(format!("target {bad} >= {v} classes")));
        }
        let mut probs = lv.data().to_vec();
        let mut total = T::zero();
        for (row, &t) in probs.chunks_mut(v).zip(targets) {
            log_softmax_in_place(row);
            total -= row[t as usize];
            row.iter_mut().for_each(|z| *z = z.exp());
        }
        let loss = total / T::of(targets.len() as f64);
        Ok(self.push(
            Tensor::scalar(loss),
            Op::CrossEntropy {
                logits,
                targets: targets.to_vec(),
                probs,
            },
            &[logits],
        ))
    }

    /// Multi-head scaled dot-product attention with a strict causal mask.
    ///
    /// `q`, `k`, `v` hold `batch * seq` rows of width `d`; head `h` uses
    /// columns `h*d/heads .. (h+1)*d/heads`. Position `t` only reads
    /// positions `0..=t`, and masked positions are never evaluated.
    pub fn causal_attention(&mut self, q: Var, k: Var, v: Var, batch: usize, seq: usize, heads: usize) -> Result<Var> {
        let sq = self.shape(q);
        if self.shape(k) != sq || self.shape(v) != sq {
            return Err(Error::shape("attention", sq, self.shape(k)));
        }
        let d = self.value(q).last_dim();
        if heads == 0 || !d.is_multiple_of(heads) {
            return Err(Error::Config(format!("model width {d} not divisible by {heads} heads")));
        }
        if self.value(q).rows() != batch * seq {
            return Err(Error::shape("attention", sq, &[batch, seq, d]));
        }
        let hd = d / heads;
        let scale = T::one() / T::of(hd as f64).sqrt();
        let (qd, kd, vd) = (self.value(q).data(), self.value(k).data(), self.value(v).data());

        let per_batch = par::map_range(batch, |b| {
            let mut out = vec![T::zero(); seq * d];
            let mut weights = vec![T::zero(); heads * seq * seq];
            let base = b * seq;
            for h in 0..heads {
                let cols = h * hd..(h + 1) * hd;
                for t in 0..seq {
                    let qt = &qd[(base + t) * d..][cols.clone()];
                    let w = &mut weights[(h * seq + t) * seq..][..=t];
                    for (j, wj) in w.iter_mut().enumerate() {
                        *wj = dot(qt, &kd[(base + j) * d..][cols.clone()]) * scale;
                    }
                    softmax_in_place(w);
                    let o = &mut out[t * d..][cols.clone()];
                    for (j, &wj) in w.iter().enumerate() {
                        for (oc, &vc) in o.iter_mut().zip(&vd[(base + j) * d..][cols.clone()]) {
                            *oc += wj * vc;
                        }
                    }
                }
            }
            (out, weights)
        });
        let mut out = Vec::with_capacity(batch * seq * d);
        let mut weights = Vec::with_capacity(batch * heads * seq * seq);
        for (o, w) in per_batch {
            out.extend(o);
            weights.extend(w);
        }
        let t = Tensor::new(sq, out)?;
        Ok(self.push(
            t,
            Op::Attention(Box::new(AttentionSaved {
                q,
                k,
                v,
                batch,
                seq,
                heads,
                weights,
            })),
            &[q, k, v],
        ))
    }

    /// Gathers rows (last axis kept) of `x` viewed as `[rows, d]`.
    pub fn rows(&mut self, x: Var, rows: &[usize]) -> Result<Var> {
        let xv = self.value(x);
        let d = xv.last_dim();
        if let Some(&bad) = rows.iter().find(|&&r| r >= xv.rows()) {
            return Err(Error::shape("rows", xv.shape(), &[bad]));
        }
        let mut data = Vec::with_capacity(rows.len() * d);
        for &r in rows {
            data.extend_from_slice(&xv.data()[r * d..(r + 1) * d]);
        }
        let t = Tensor::new(&[rows.len(), d], data)?;
        Ok(self.push(t, Op::Rows { x, rows: rows.to_vec() }, &[x]))
    }

    pub fn reshape(&mut self, x: Var, shape: &[usize]) -> Result<Var> {
        let t = self.value(x).clone().reshaped(shape)?;
        Ok(self.push(t, Op::Reshape(x), &[x]))
    }

    pub fn sum(&mut self, x: Var) -> Result<Var> {
        let s = self.value(x).data().iter().copied().sum();
        Ok(self.push(Tensor::scalar(s), Op::Sum(x), &[x]))
    }

    /// Propagates d(loss)/d(node) to every tracked node.
    pub fn backward(&self, loss: Var) -> Result<Gradients<T>> {
        if self.value(loss).len() != 1 {
            return Err(Error::Validation(format!(
                "backward needs a scalar loss, got shape {:?}",
                self.shape(loss)
            )));
        }
        let mut grads: Vec<Option<Vec<T>>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(vec![T::one()]);
        for i in (0..=loss.0).rev() {
            let node = &self.nodes[i];
            if !node.tracked {
                continue;
            }
            let Some(g) = grads[i].take() else {
                continue;
            };
            self.propagate(Var(i), &node.op, &g, &mut grads);
            grads[i] = Some(g);
        }
        Ok(Gradients { grads })
    }

    fn propagate(&self, out: Var, op: &Op<T>, g: &[T], grads: &mut [Option<Vec<T>>]) {
        let mut send = |var: Var, delta: Vec<T>| {
            if !self.tracked(var) {
                return;
            }
            match &mut grads[var.0] {
                Some(acc) => acc.iter_mut().zip(delta).for_each(|(a, d)| *a += d),
                slot => *slot = Some(delta),
            }
        };
        match op {
            Op::Input | Op::Leaf | Op::Param(_) => {}
            Op::MatMul(a, b) => {
                let (av, bv) = (self.value(*a), self.value(*b));
                let (n, p) = (bv.shape()[0], bv.shape()[1]);
                let m = av.rows();
                if self.tracked(*a) {
                    send(*a, matmul_bt(g, bv.data(), m, p, n));
                }
                if self.tracked(*b) {
                    send(*b, matmul_at(av.data(), g, m, n, p));
                }
            }
            Op::Add(a, b) => {
                if self.tracked(*b) {
                    let blk = self.value(*b).len();
                    let mut db = vec![T::zero(); blk];
                    for chunk in g.chunks(blk) {
                        db.iter_mut().zip(chunk).for_each(|(d, &x)| *d += x);
                    }
                    send(*b, db);
                }
                send(*a, g.to_vec());
            }
            Op::Relu(x) => {
                let y = self.value(out).data();
                send(
                    *x,
                    g.iter()
                        .zip(y)
                        .map(|(&gi, &yi)| if yi > T::zero() { gi } else { T::zero() })
                        .collect(),
                );
            }
            Op::Embedding { table, ids } => {
                let st = self.shape(*table);
                let d = st[1];
                let mut dt = vec![T::zero(); st[0] * d];
                for (r, &id) in ids.iter().enumerate() {
                    let dst = &mut dt[id as usize * d..(id as usize + 1) * d];
                    dst.iter_mut().zip(&g[r * d..(r + 1) * d]).for_each(|(a, &b)| *a += b);
                }
                send(*table, dt);
            }
            Op::LayerNorm {
                x,
                gain,
                bias,
                xhat,
                rstd,
            } => {
                let gv = self.value(*gain).data();
                let d = gv.len();
                let dn = T::of(d as f64);
                let mut dgain = vec![T::zero(); d];
                let mut dbias = vec![T::zero(); d];
                let mut dx = vec![T::zero(); g.len()];
                let mut dxhat = vec![T::zero(); d];
                for (r, &rs) in rstd.iter().enumerate() {
                    let gr = &g[r * d..(r + 1) * d];
                    let hr = &xhat[r * d..(r + 1) * d];
                    let mut m1 = T::zero();
                    let mut m2 = T::zero();
                    for j in 0..d {
                        dgain[j] += gr[j] * hr[j];
                        dbias[j] += gr[j];
                        dxhat[j] = gr[j] * gv[j];
                        m1 += dxhat[j];
                        m2 += dxhat[j] * hr[j];
                    }
                    m1 /= dn;
                    m2 /= dn;
                    for j in 0..d {
                        dx[r * d + j] = rs * (dxhat[j] - m1 - hr[j] * m2);
                    }
                }
                send(*x, dx);
                send(*gain, dgain);
                send(*bias, dbias);
            }
            Op::Softmax(x) => {
                let y = self.value(out);
                let d = y.last_dim();
                let mut dx = vec![T::zero(); g.len()];
                for ((dr, gr), yr) in dx.chunks_mut(d).zip(g.chunks(d)).zip(y.data().chunks(d)) {
                    let s = dot(gr, yr);
                    for j in 0..d {
                        dr[j] = yr[j] * (gr[j] - s);
                    }
                }
                send(*x, dx);
            }
            Op::LogSoftmax(x) => {
                let y = self.value(out);
                let d = y.last_dim();
                let mut dx = vec![T::zero(); g.len()];
                for ((dr, gr), yr) in dx.chunks_mut(d).zip(g.chunks(d)).zip(y.data().chunks(d)) {
                    let s: T = gr.iter().copied().sum();
                    for j in 0..d {
                        dr[j] = gr[j] - yr[j].exp() * s;
                    }
                }
                send(*x, dx);
            }
            Op::CrossEntropy { logits, targets, probs } => {
                let v = probs.len() / targets.len();
                let scale = g[0] / T::of(targets.len() as f64);
                let mut dl: Vec<T> = probs.iter().map(|&p| p * scale).collect();
                for (r, &t) in targets.iter().enumerate() {
                    dl[r * v + t as usize] -= scale;
                }
                send(*logits, dl);
            }
            Op::Attention(saved) => {
                let (dq, dk, dv) = self.attention_backward(saved, g);
                send(saved.q, dq);
                send(saved.k, dk);
                send(saved.v, dv);
            }
            Op::Rows { x, rows } => {
                let xv = self.value(*x);
                let d = xv.last_dim();
                let mut dx = vec![T::zero(); xv.len()];
                for (i, &r) in rows.iter().enumerate() {
                    dx[r * d..(r + 1) * d]
                        .iter_mut()
                        .zip(&g[i * d..(i + 1) * d])
                        .for_each(|(a, &b)| *a += b);
                }
                send(*x, dx);
            }
            Op::Reshape(x) => send(*x, g.to_vec()),
            Op::Sum(x) => send(*x, vec![g[0]; self.value(*x).len()]),
        }
    }

    fn attention_backward(&self, s: &AttentionSaved<T>, g: &[T]) -> (Vec<T>, Vec<T>, Vec<T>) {
        let (qd, kd, vd) = (self.value(s.q).data(), self.value(s.k).data(), self.value(s.v).data());
        let d = self.value(s.q).last_dim();
        let (seq, heads) = (s.seq, s.heads);
        let hd = d / heads;
        let scale = T::one() / T::of(hd as f64).sqrt();
        let per_batch = par::map_range(s.batch, |b| {
            let base = b * seq;
            let mut dq = vec![T::zero(); seq * d];
            let mut dk = vec![T::zero(); seq * d];
            let mut dv = vec![T::zero(); seq * d];
            let mut dw = vec![T::zero(); seq];
            for h in 0..heads {
                let cols = h * hd..(h + 1) * hd;
                for t in 0..seq {
                    let w = &s.weights[((b * heads + h) * seq + t) * seq..][..=t];
                    let gt = &g[(base + t) * d..][cols.clone()];
                    for j in 0..=t {
                        dw[j] = dot(gt, &vd[(base + j) * d..][cols.clone()]);
                        for (dvc, &gc) in dv[j * d..][cols.clone()].iter_mut().zip(gt) {
                            *dvc += w[j] * gc;
                        }
                    }
                    let mix = dot(&dw[..=t], w);
                    let qt = &qd[(base + t) * d..][cols.clone()];
                    for j in 0..=t {
                        let ds = w[j] * (dw[j] - mix) * scale;
                        let kj = &kd[(base + j) * d..][cols.clone()];
                        for (dqc, &kc) in dq[t * d..][cols.clone()].iter_mut().zip(kj) {
                            *dqc += ds * kc;
                        }
                        for (dkc, &qc) in dk[j * d..][cols.clone()].iter_mut().zip(qt) {
                            *dkc += ds * qc;
                        }
                    }
                }
            }
            (dq, dk, dv)
        });
        let n = s.batch * seq * d;
        let (mut dq, mut dk, mut dv) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for (a, b, c) in per_batch {
            dq.extend(a);
            dk.extend(b);
            dv.extend(c);
        }
        (dq, dk, dv)
    }

    /// Moves the gradients of this tape's parameter nodes out of `grads`.
    pub fn param_grads(&self, mut grads: Gradients<T>) -> ParamGrads<T> {
        let mut out = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if let Op::Param(id) = n.op {
                if let Some(g) = grads.grads[i].take() {
                    out.push((id, g));
                }
            }
        }
        ParamGrads(out)
    }
}

/// Owned parameter gradients, detached from the tape that produced them.
pub struct ParamGrads<T>(Vec<(ParamId, Vec<T>)>);

pub(crate) fn softmax_in_place<T: Scalar>(row: &mut [T]) {
    let max = row.iter().copied().fold(T::neg_infinity(), T::max);
    let mut total = T::zero();
    for z in row.iter_mut() {
        *z = (*z - max).exp();
        total += *z;
    }
    row.iter_mut().for_each(|z| *z /= total);
}

pub(crate) fn log_softmax_in_place<T: Scalar>(row: &mut [T]) {
    let max = row.iter().copied().fold(T::neg_infinity(), T::max);
    let lse = row.iter().map(|&z| (z - max).exp()).sum::<T>().ln() + max;
    row.iter_mut().for_each(|z| *z -= lse);
}

impl<T: Scalar> ParamStore<T> {
    /// Adds gradients into the store. Every parameter counts as having a
    /// gradient afterwards (zero if the loss ignored it).
    pub fn accumulate(&mut self, grads: ParamGrads<T>) {
        for (id, g) in grads.0 {
            let p = self.get_mut(id);
            p.grad.iter_mut().zip(g).for_each(|(a, b)| *a += b);
        }
        for p in self.iter_mut() {
            p.has_grad = true;
        }
    }
}
