//! Dense classifier evaluation with exact first and second order derivatives.
//!
//! The Hessian-vector product is the directional derivative of the backward
//! pass (forward-over-reverse): every quantity of the forward and backward
//! sweeps is paired with its derivative along `v`, so `H v` is exact up to
//! rounding and costs roughly two gradient evaluations.

use super::{Architecture, Batch, LayerSlot, Matrix, ParamVector};
use crate::error::{Error, Result};

struct Trace {
    /// Input to each layer; `inputs[0]` is the batch itself.
    inputs: Vec<Matrix>,
    /// Pre-activation output of each layer; the last entry holds the logits.
    pre: Vec<Matrix>,
}

fn check_params(arch: &Architecture, params: &ParamVector) -> Result<()> {
    params.check_len("parameter vector", arch.param_count())
}

fn check_inputs(arch: &Architecture, inputs: &Matrix) -> Result<()> {
    if inputs.cols() != arch.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "input features",
            expected: arch.input_dim(),
            found: inputs.cols(),
        });
    }
    Ok(())
}

#[inline]
fn weight<'a>(params: &'a [f64], slot: &LayerSlot, o: usize) -> &'a [f64] {
    let start = slot.offset + o * slot.inputs;
    &params[start..start + slot.inputs]
}

#[inline]
fn bias(params: &[f64], slot: &LayerSlot, o: usize) -> f64 {
    params[slot.offset + slot.inputs * slot.outputs + o]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `out[s][o] = sum_i W[o][i] x[s][i] (+ b[o])`
fn affine(params: &[f64], slot: &LayerSlot, x: &Matrix, with_bias: bool) -> Matrix {
    let mut out = Matrix::zeros(x.rows(), slot.outputs);
    for s in 0..x.rows() {
        let row = x.row(s);
        let dst = out.row_mut(s);
        for (o, d) in dst.iter_mut().enumerate() {
            let b = if with_bias {
                bias(params, slot, o)
            } else {
                0.0
            };
            *d = b + dot(weight(params, slot, o), row);
        }
    }
    out
}

/// `out[s][i] = sum_o W[o][i] d[s][o]`
fn affine_transpose(params: &[f64], slot: &LayerSlot, d: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(d.rows(), slot.inputs);
    for s in 0..d.rows() {
        let drow = d.row(s);
        let dst = out.row_mut(s);
        for (o, &g) in drow.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            for (acc, w) in dst.iter_mut().zip(weight(params, slot, o)) {
                *acc += w * g;
            }
        }
    }
    out
}

/// Accumulates `d^T x` into the weight block and column sums of `d` into the bias block.
fn accumulate_outer(out: &mut [f64], slot: &LayerSlot, d: &Matrix, x: &Matrix) {
    for s in 0..d.rows() {
        let drow = d.row(s);
        let xrow = x.row(s);
        for (o, &g) in drow.iter().enumerate() {
            let start = slot.offset + o * slot.inputs;
            for (w, xi) in out[start..start + slot.inputs].iter_mut().zip(xrow) {
                *w += g * xi;
            }
            out[slot.offset + slot.inputs * slot.outputs + o] += g;
        }
    }
}

fn run_forward(arch: &Architecture, params: &[f64], inputs: &Matrix) -> Trace {
    let act = arch.activation();
    let last = arch.layers().len() - 1;
    let mut trace = Trace {
        inputs: Vec::with_capacity(last + 1),
        pre: Vec::with_capacity(last + 1),
    };
    let mut x = inputs.clone();
    for (l, slot) in arch.layers().iter().enumerate() {
        let z = affine(params, slot, &x, true);
        trace.inputs.push(x);
        if l < last {
            let mut a = z.clone();
            for s in 0..a.rows() {
                for v in a.row_mut(s) {
                    *v = act.apply(*v);
                }
            }
            x = a;
        } else {
            x = Matrix::zeros(0, 0);
        }
        trace.pre.push(z);
    }
    trace
}

fn softmax(row: &[f64]) -> Vec<f64> {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = row.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn log_sum_exp(row: &[f64]) -> f64 {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + row.iter().map(|z| (z - max).exp()).sum::<f64>().ln()
}

/// Network logits, one row per input row.
pub fn forward(arch: &Architecture, params: &ParamVector, inputs: &Matrix) -> Result<Matrix> {
    check_params(arch, params)?;
    check_inputs(arch, inputs)?;
    let mut trace = run_forward(arch, params.as_slice(), inputs);
    Ok(trace.pre.pop().unwrap())
}

/// Softmax probabilities of each logits row.
pub fn softmax_rows(logits: &Matrix) -> Matrix {
    let mut out = logits.clone();
    for s in 0..logits.rows() {
        out.row_mut(s).copy_from_slice(&softmax(logits.row(s)));
    }
    out
}

/// Mean negative log-likelihood of `labels` under the softmax of `logits`.
pub fn cross_entropy(logits: &Matrix, labels: &[u8]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyBatch("cross_entropy"));
    }
    if logits.rows() != labels.len() {
        return Err(Error::DimensionMismatch {
            context: "cross_entropy labels",
            expected: logits.rows(),
            found: labels.len(),
        });
    }
    let mut total = 0.0;
    for (s, &y) in labels.iter().enumerate() {
        let row = logits.row(s);
        let y = y as usize;
        if y >= row.len() {
            return Err(Error::InvalidLabel {
                index: s,
                label: y as u8,
            });
        }
        // log-sum-exp is always >= the selected logit; clamp rounding noise.
        total += (log_sum_exp(row) - row[y]).max(0.0);
    }
    Ok(total / labels.len() as f64)
}

pub fn loss(arch: &Architecture, params: &ParamVector, batch: &Batch) -> Result<f64> {
    let logits = forward(arch, params, batch.inputs())?;
    cross_entropy(&logits, batch.labels())
}

/// `(softmax - onehot) / n`, the loss derivative with respect to the logits.
fn logit_delta(logits: &Matrix, labels: &[u8]) -> (Matrix, Matrix) {
    let n = labels.len() as f64;
    let probs = softmax_rows(logits);
    let mut delta = probs.clone();
    for (s, &y) in labels.iter().enumerate() {
        let row = delta.row_mut(s);
        row[y as usize] -= 1.0;
        for v in row.iter_mut() {
            *v /= n;
        }
    }
    (probs, delta)
}

fn backward(arch: &Architecture, params: &[f64], trace: &Trace, labels: &[u8]) -> Vec<f64> {
    let act = arch.activation();
    let layers = arch.layers();
    let mut out = vec![0.0; arch.param_count()];
    let (_, mut delta) = logit_delta(trace.pre.last().unwrap(), labels);
    for l in (0..layers.len()).rev() {
        let slot = &layers[l];
        accumulate_outer(&mut out, slot, &delta, &trace.inputs[l]);
        if l > 0 {
            let mut back = affine_transpose(params, slot, &delta);
            let z = &trace.pre[l - 1];
            for s in 0..back.rows() {
                let zrow = z.row(s);
                for (b, &zi) in back.row_mut(s).iter_mut().zip(zrow) {
                    *b *= act.derivative(zi);
                }
            }
            delta = back;
        }
    }
    out
}

/// Gradient of the mean cross-entropy of `batch` with respect to `params`.
pub fn grad(arch: &Architecture, params: &ParamVector, batch: &Batch) -> Result<ParamVector> {
    loss_and_grad(arch, params, batch).map(|(_, g)| g)
}

pub fn loss_and_grad(
    arch: &Architecture,
    params: &ParamVector,
    batch: &Batch,
) -> Result<(f64, ParamVector)> {
    check_params(arch, params)?;
    check_inputs(arch, batch.inputs())?;
    let trace = run_forward(arch, params.as_slice(), batch.inputs());
    let value = cross_entropy(trace.pre.last().unwrap(), batch.labels())?;
    let g = backward(arch, params.as_slice(), &trace, batch.labels());
    Ok((value, ParamVector::new(g)))
}

/// Exact Hessian of the batch loss applied to `v`.
pub fn hessian_vector_product(
    arch: &Architecture,
    params: &ParamVector,
    batch: &Batch,
    v: &ParamVector,
) -> Result<ParamVector> {
    check_params(arch, params)?;
    check_inputs(arch, batch.inputs())?;
    v.check_len("direction vector", arch.param_count())?;

    let p = params.as_slice();
    let dir = v.as_slice();
    let act = arch.activation();
    let layers = arch.layers();
    let last = layers.len() - 1;
    let trace = run_forward(arch, p, batch.inputs());

    // Directional derivatives of the forward sweep.
    let mut r_pre: Vec<Matrix> = Vec::with_capacity(layers.len());
    let mut r_inputs: Vec<Matrix> = Vec::with_capacity(layers.len());
    let mut r_x = Matrix::zeros(batch.len(), arch.input_dim());
    for (l, slot) in layers.iter().enumerate() {
        let mut r_z = affine(p, slot, &r_x, false);
        let from_dir = affine(dir, slot, &trace.inputs[l], true);
        for s in 0..r_z.rows() {
            for (a, b) in r_z.row_mut(s).iter_mut().zip(from_dir.row(s)) {
                *a += b;
            }
        }
        r_inputs.push(r_x);
        if l < last {
            let z = &trace.pre[l];
            let mut next = r_z.clone();
            for s in 0..next.rows() {
                for (r, &zi) in next.row_mut(s).iter_mut().zip(z.row(s)) {
                    *r *= act.derivative(zi);
                }
            }
            r_x = next;
        } else {
            r_x = Matrix::zeros(0, 0);
        }
        r_pre.push(r_z);
    }

    // Backward sweep and its directional derivative.
    let labels = batch.labels();
    let n = labels.len() as f64;
    let (probs, mut delta) = logit_delta(trace.pre.last().unwrap(), labels);
    let r_logits = &r_pre[last];
    let mut r_delta = Matrix::zeros(batch.len(), arch.output_dim());
    for s in 0..batch.len() {
        let pr = probs.row(s);
        let rz = r_logits.row(s);
        let mean = dot(pr, rz);
        for ((out, &pi), &ri) in r_delta.row_mut(s).iter_mut().zip(pr).zip(rz) {
            *out = pi * (ri - mean) / n;
        }
    }

    let mut out = vec![0.0; arch.param_count()];
    for l in (0..layers.len()).rev() {
        let slot = &layers[l];
        accumulate_outer(&mut out, slot, &r_delta, &trace.inputs[l]);
        // Bias block already received r_delta; the delta term only touches weights.
        for s in 0..delta.rows() {
            let drow = delta.row(s);
            let rx = r_inputs[l].row(s);
            for (o, &g) in drow.iter().enumerate() {
                let start = slot.offset + o * slot.inputs;
                for (w, xi) in out[start..start + slot.inputs].iter_mut().zip(rx) {
                    *w += g * xi;
                }
            }
        }
        if l > 0 {
            let back = affine_transpose(p, slot, &delta);
            let mut r_back = affine_transpose(dir, slot, &delta);
            let r_back_w = affine_transpose(p, slot, &r_delta);
            let z = &trace.pre[l - 1];
            let r_z = &r_pre[l - 1];
            let mut next_delta = back.clone();
            for s in 0..back.rows() {
                let zrow = z.row(s);
                let rzrow = r_z.row(s);
                let brow = back.row(s);
                let extra = r_back_w.row(s);
                let nd = next_delta.row_mut(s);
                for i in 0..nd.len() {
                    nd[i] = brow[i] * act.derivative(zrow[i]);
                }
                let rb = r_back.row_mut(s);
                for i in 0..rb.len() {
                    rb[i] = (rb[i] + extra[i]) * act.derivative(zrow[i])
                        + brow[i] * act.second_derivative(zrow[i]) * rzrow[i];
                }
            }
            delta = next_delta;
            r_delta = r_back;
        }
    }
    Ok(ParamVector::new(out))
}
