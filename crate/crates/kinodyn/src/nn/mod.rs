//! Minimal neural-network kernels with hand-written reverse-mode gradients.
//!
//! Everything is f64 and single-threaded. Layers capture their forward
//! activations in a [`trace::NetworkTrace`] so that gradients with respect to
//! intermediate activations (the raw material for Grad-CAM) stay retrievable
//! after a backward pass.

pub mod checkpoint;
pub mod conv;
pub mod init;
pub mod linear;
pub mod loss;
pub mod lstm;
pub mod optim;
pub mod tensor;
pub mod trace;

pub use conv::ConvLayer;
pub use linear::Linear;
pub use lstm::{ConvLstmCell, LstmState};
pub use optim::{adam_update, AdamParams, AdamState};
pub use tensor::Tensor;
pub use trace::{LayerTrace, NetworkTrace};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch in {context}: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        context: &'static str,
        expected: Vec<usize>,
        got: Vec<usize>,
    },
    #[error("non-finite value at {context}")]
    NonFinite { context: &'static str },
    #[error("convolution output width would be empty: W={width} pad={pad} k={kernel}")]
    EmptyOutput {
        width: usize,
        pad: usize,
        kernel: usize,
    },
    #[error("trace is missing data for {0}")]
    MissingTrace(&'static str),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

/// Leaky ReLU forward: `x` if `x > 0`, else `slope * x`.
pub fn leaky_relu(x: &Tensor, slope: f64) -> Tensor {
    x.map(|v| if v > 0.0 { v } else { slope * v })
}

/// Backward of [`leaky_relu`]. Subgradient at zero is 1.
pub fn leaky_relu_backward(input: &Tensor, upstream: &Tensor, slope: f64) -> Tensor {
    debug_assert_eq!(input.shape(), upstream.shape());
    let data = input
        .data()
        .iter()
        .zip(upstream.data().iter())
        .map(|(&x, &g)| if x >= 0.0 { g } else { slope * g })
        .collect();
    Tensor::from_vec(input.shape(), data).expect("same shape")
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
