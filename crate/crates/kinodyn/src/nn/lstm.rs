//! Convolutional LSTM cell with width-preserving 1×k gate convolutions.

use super::conv::{conv2d_backward, conv2d_forward};
use super::{sigmoid, NnError, Tensor};

/// Gate order used throughout: input, forget, output, candidate.
pub const GATE_I: usize = 0;
pub const GATE_F: usize = 1;
pub const GATE_O: usize = 2;
pub const GATE_G: usize = 3;

/// Convolutional LSTM cell.
///
/// Gates: `i = σ(Wxi∗x + Whi∗h + bi)`, `f`, `o` likewise, `g = tanh(...)`;
/// `c' = f⊙c + i⊙g`, `h' = o⊙tanh(c')`. Padding keeps the width unchanged so
/// hidden and cell states stay `hidden×H×W`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLstmCell {
    /// Input kernels per gate, each `[hidden, in_c, 1, k]`.
    pub wx: [Tensor; 4],
    /// Hidden kernels per gate, each `[hidden, hidden, 1, k]`.
    pub wh: [Tensor; 4],
    /// Gate biases, each of length `hidden`.
    pub bias: [Vec<f64>; 4],
    /// Width padding, `(k-1)/2` for width preservation.
    pub pad: usize,
}

/// Hidden and cell state, both `hidden×H×W`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Tensor,
    pub c: Tensor,
}

impl LstmState {
    pub fn zeros(hidden: usize, height: usize, width: usize) -> Self {
        LstmState {
            h: Tensor::zeros(&[hidden, height, width]),
            c: Tensor::zeros(&[hidden, height, width]),
        }
    }
}

/// Everything one step stores for backpropagation through time.
#[derive(Debug, Clone)]
pub struct LstmStepTrace {
    pub x: Tensor,
    pub h_prev: Tensor,
    pub c_prev: Tensor,
    /// Gate activations (i, f, o post-sigmoid; g post-tanh).
    pub gates: [Tensor; 4],
    pub c_new: Tensor,
    pub tanh_c_new: Tensor,
    pub h_new: Tensor,
}

/// Parameter gradients for one cell.
#[derive(Debug, Clone)]
pub struct ConvLstmGrads {
    pub wx: [Tensor; 4],
    pub wh: [Tensor; 4],
    pub bias: [Vec<f64>; 4],
}

impl ConvLstmGrads {
    pub fn zeros_like(cell: &ConvLstmCell) -> Self {
        ConvLstmGrads {
            wx: std::array::from_fn(|g| Tensor::zeros(cell.wx[g].shape())),
            wh: std::array::from_fn(|g| Tensor::zeros(cell.wh[g].shape())),
            bias: std::array::from_fn(|g| vec![0.0; cell.bias[g].len()]),
        }
    }

    pub fn add_assign(&mut self, other: &ConvLstmGrads) {
        for g in 0..4 {
            self.wx[g].add_assign(&other.wx[g]);
            self.wh[g].add_assign(&other.wh[g]);
            for (a, b) in self.bias[g].iter_mut().zip(other.bias[g].iter()) {
                *a += *b;
            }
        }
    }
}

impl ConvLstmCell {
    pub fn hidden_channels(&self) -> usize {
        self.wx[0].shape()[0]
    }

    pub fn in_channels(&self) -> usize {
        self.wx[0].shape()[1]
    }

    /// One step of the cell. Returns the new state and the trace needed for
    /// the backward pass.
    pub fn step(&self, x: &Tensor, state: &LstmState) -> Result<(LstmState, LstmStepTrace), NnError> {
        let hidden = self.hidden_channels();
        if x.shape().len() != 3 || x.shape()[0] != self.in_channels() {
            return Err(NnError::ShapeMismatch {
                context: "ConvLstmCell step input",
                expected: vec![self.in_channels()],
                got: x.shape().to_vec(),
            });
        }
        let (h_dim, w_dim) = (x.shape()[1], x.shape()[2]);
        if state.h.shape() != [hidden, h_dim, w_dim] {
            return Err(NnError::ShapeMismatch {
                context: "ConvLstmCell step state",
                expected: vec![hidden, h_dim, w_dim],
                got: state.h.shape().to_vec(),
            });
        }

        let zero_bias = vec![0.0; hidden];
        let mut gates: [Tensor; 4] = std::array::from_fn(|_| Tensor::zeros(&[0]));
        for g in 0..4 {
            let mut z = conv2d_forward(x, &self.wx[g], &self.bias[g], self.pad)?;
            let zh = conv2d_forward(&state.h, &self.wh[g], &zero_bias, self.pad)?;
            z.add_assign(&zh);
            gates[g] = if g == GATE_G {
                z.map(f64::tanh)
            } else {
                z.map(sigmoid)
            };
        }

        let mut c_new = Tensor::zeros(state.c.shape());
        for (idx, cv) in c_new.data_mut().iter_mut().enumerate() {
            *cv = gates[GATE_F].data()[idx] * state.c.data()[idx]
                + gates[GATE_I].data()[idx] * gates[GATE_G].data()[idx];
        }
        let tanh_c_new = c_new.map(f64::tanh);
        let mut h_new = Tensor::zeros(state.h.shape());
        for (idx, hv) in h_new.data_mut().iter_mut().enumerate() {
            *hv = gates[GATE_O].data()[idx] * tanh_c_new.data()[idx];
        }

        let trace = LstmStepTrace {
            x: x.clone(),
            h_prev: state.h.clone(),
            c_prev: state.c.clone(),
            gates,
            c_new: c_new.clone(),
            tanh_c_new,
            h_new: h_new.clone(),
        };
        Ok((LstmState { h: h_new, c: c_new }, trace))
    }

    /// Backward through one step. `dh`/`dc` are gradients w.r.t. the step's
    /// outputs; returns gradients w.r.t. the step's inputs plus parameter
    /// gradients.
    pub fn step_backward(
        &self,
        trace: &LstmStepTrace,
        dh: &Tensor,
        dc: &Tensor,
    ) -> Result<(Tensor, Tensor, Tensor, ConvLstmGrads), NnError> {
        let n = trace.h_new.len();
        if dh.len() != n || dc.len() != n {
            return Err(NnError::ShapeMismatch {
                context: "ConvLstmCell step_backward upstream",
                expected: vec![n],
                got: vec![dh.len(), dc.len()],
            });
        }

        let i = &trace.gates[GATE_I];
        let f = &trace.gates[GATE_F];
        let o = &trace.gates[GATE_O];
        let g = &trace.gates[GATE_G];

        // dc_total = dc + dh ⊙ o ⊙ (1 - tanh²(c'))
        let mut dc_total = dc.clone();
        for idx in 0..n {
            let th = trace.tanh_c_new.data()[idx];
            dc_total.data_mut()[idx] += dh.data()[idx] * o.data()[idx] * (1.0 - th * th);
        }

        let mut dz = [
            Tensor::zeros(i.shape()),
            Tensor::zeros(i.shape()),
            Tensor::zeros(i.shape()),
            Tensor::zeros(i.shape()),
        ];
        let mut dc_prev = Tensor::zeros(i.shape());
        for idx in 0..n {
            let (iv, fv, ov, gv) = (
                i.data()[idx],
                f.data()[idx],
                o.data()[idx],
                g.data()[idx],
            );
            let dct = dc_total.data()[idx];
            dz[GATE_I].data_mut()[idx] = dct * gv * iv * (1.0 - iv);
            dz[GATE_F].data_mut()[idx] = dct * trace.c_prev.data()[idx] * fv * (1.0 - fv);
            dz[GATE_O].data_mut()[idx] =
                dh.data()[idx] * trace.tanh_c_new.data()[idx] * ov * (1.0 - ov);
            dz[GATE_G].data_mut()[idx] = dct * iv * (1.0 - gv * gv);
            dc_prev.data_mut()[idx] = dct * fv;
        }

        let mut dx = Tensor::zeros(trace.x.shape());
        let mut dh_prev = Tensor::zeros(trace.h_prev.shape());
        let mut grads = ConvLstmGrads::zeros_like(self);
        for gate in 0..4 {
            let gx = conv2d_backward(&trace.x, &self.wx[gate], self.pad, &dz[gate])?;
            dx.add_assign(&gx.input);
            grads.wx[gate] = gx.weight;
            grads.bias[gate] = gx.bias;

            let gh = conv2d_backward(&trace.h_prev, &self.wh[gate], self.pad, &dz[gate])?;
            dh_prev.add_assign(&gh.input);
            grads.wh[gate] = gh.weight;
        }

        Ok((dx, dh_prev, dc_prev, grads))
    }
}
