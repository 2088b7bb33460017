//! 2-D convolution with 1×k filters.
//!
//! Filter height is pinned to 1 so rows never mix: the activation at row `h`
//! depends only on input row `h`. Per-row saliency downstream relies on this.

use super::{NnError, Tensor};

/// Convolution layer: cross-correlation with `K` filters of shape `C×1×k`,
/// stride 1, width padding `pad_w`, no height padding.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    /// Filters, shape `[K, C, 1, k]`.
    pub weight: Tensor,
    /// One bias per output channel.
    pub bias: Vec<f64>,
    /// Zero padding applied on each side of the width axis.
    pub pad_w: usize,
}

impl ConvLayer {
    pub fn new(weight: Tensor, bias: Vec<f64>, pad_w: usize) -> Result<Self, NnError> {
        let s = weight.shape();
        if s.len() != 4 || s[2] != 1 {
            return Err(NnError::ShapeMismatch {
                context: "ConvLayer filters must be K×C×1×k",
                expected: vec![0, 0, 1, 0],
                got: s.to_vec(),
            });
        }
        if bias.len() != s[0] {
            return Err(NnError::ShapeMismatch {
                context: "ConvLayer bias length",
                expected: vec![s[0]],
                got: vec![bias.len()],
            });
        }
        Ok(ConvLayer {
            weight,
            bias,
            pad_w,
        })
    }

    pub fn out_channels(&self) -> usize {
        self.weight.shape()[0]
    }

    pub fn in_channels(&self) -> usize {
        self.weight.shape()[1]
    }

    pub fn kernel_width(&self) -> usize {
        self.weight.shape()[3]
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor, NnError> {
        conv2d_forward(x, &self.weight, &self.bias, self.pad_w)
    }

    pub fn backward(&self, x: &Tensor, upstream: &Tensor) -> Result<ConvGrads, NnError> {
        conv2d_backward(x, &self.weight, self.pad_w, upstream)
    }
}

/// Gradients of one convolution: input, filters, bias.
#[derive(Debug, Clone)]
pub struct ConvGrads {
    pub input: Tensor,
    pub weight: Tensor,
    pub bias: Vec<f64>,
}

/// Output width of a 1×k convolution over width `w` with padding `pad`.
pub fn conv_out_width(w: usize, pad: usize, kernel: usize) -> Result<usize, NnError> {
    let padded = w + 2 * pad;
    if padded < kernel {
        return Err(NnError::EmptyOutput {
            width: w,
            pad,
            kernel,
        });
    }
    Ok(padded - kernel + 1)
}

/// Cross-correlation of `x` (C×H×W) with filters (K×C×1×k) plus bias;
/// output is K×H×W' with W' = W + 2·pad − k + 1.
pub fn conv2d_forward(
    x: &Tensor,
    weight: &Tensor,
    bias: &[f64],
    pad: usize,
) -> Result<Tensor, NnError> {
    let (c_in, h, w) = expect_chw(x, "conv2d_forward input")?;
    let k_out = weight.shape()[0];
    if weight.shape()[1] != c_in {
        return Err(NnError::ShapeMismatch {
            context: "conv2d_forward channels",
            expected: vec![weight.shape()[1]],
            got: vec![c_in],
        });
    }
    x.ensure_finite("conv2d_forward input")?;
    let kw = weight.shape()[3];
    let w_out = conv_out_width(w, pad, kw)?;

    let mut out = Tensor::zeros(&[k_out, h, w_out]);
    for k in 0..k_out {
        for row in 0..h {
            let out_row = out.row3_mut(k, row);
            out_row.fill(bias[k]);
        }
        for c in 0..c_in {
            let w_base = (k * c_in + c) * kw;
            let filter = &weight.data()[w_base..w_base + kw];
            for row in 0..h {
                let x_row = x.row3(c, row);
                let out_start = out.idx3(k, row, 0);
                for j in 0..w_out {
                    let mut acc = 0.0;
                    for (i, &wv) in filter.iter().enumerate() {
                        let src = j + i;
                        // src indexes the padded row; subtract pad to land in x
                        if src >= pad && src - pad < w {
                            acc += wv * x_row[src - pad];
                        }
                    }
                    out.data_mut()[out_start + j] += acc;
                }
            }
        }
    }
    Ok(out)
}

/// Exact gradients of [`conv2d_forward`] given the forward input and the
/// upstream gradient (K×H×W').
pub fn conv2d_backward(
    x: &Tensor,
    weight: &Tensor,
    pad: usize,
    upstream: &Tensor,
) -> Result<ConvGrads, NnError> {
    let (c_in, h, w) = expect_chw(x, "conv2d_backward input")?;
    let k_out = weight.shape()[0];
    let kw = weight.shape()[3];
    let w_out = conv_out_width(w, pad, kw)?;
    if upstream.shape() != [k_out, h, w_out] {
        return Err(NnError::ShapeMismatch {
            context: "conv2d_backward upstream",
            expected: vec![k_out, h, w_out],
            got: upstream.shape().to_vec(),
        });
    }

    let mut grad_x = Tensor::zeros(&[c_in, h, w]);
    let mut grad_w = Tensor::zeros(weight.shape());
    let mut grad_b = vec![0.0; k_out];

    for k in 0..k_out {
        for row in 0..h {
            let up_row = upstream.row3(k, row);
            grad_b[k] += up_row.iter().sum::<f64>();
        }
        for c in 0..c_in {
            let w_base = (k * c_in + c) * kw;
            for row in 0..h {
                let x_row = x.row3(c, row);
                let up_row_start = upstream.idx3(k, row, 0);
                let gx_start = grad_x.idx3(c, row, 0);
                for j in 0..w_out {
                    let up = upstream.data()[up_row_start + j];
                    if up == 0.0 {
                        continue;
                    }
                    for i in 0..kw {
                        let src = j + i;
                        if src >= pad && src - pad < w {
                            grad_w.data_mut()[w_base + i] += up * x_row[src - pad];
                            grad_x.data_mut()[gx_start + src - pad] +=
                                up * weight.data()[w_base + i];
                        }
                    }
                }
            }
        }
    }

    Ok(ConvGrads {
        input: grad_x,
        weight: grad_w,
        bias: grad_b,
    })
}

fn expect_chw(x: &Tensor, context: &'static str) -> Result<(usize, usize, usize), NnError> {
    let s = x.shape();
    if s.len() != 3 {
        return Err(NnError::ShapeMismatch {
            context,
            expected: vec![3],
            got: s.to_vec(),
        });
    }
    Ok((s[0], s[1], s[2]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(k: usize, c: usize, kw: usize, weights: Vec<f64>, bias: Vec<f64>, pad: usize) -> ConvLayer {
        ConvLayer::new(Tensor::from_vec(&[k, c, 1, kw], weights).unwrap(), bias, pad).unwrap()
    }

    #[test]
    fn identity_filter_passes_input_through() {
        let l = layer(1, 1, 1, vec![1.0], vec![0.0], 0);
        let x = Tensor::from_vec(&[1, 1, 3], vec![1.0, 2.0, 3.0]).unwrap();
        let y = l.forward(&x).unwrap();
        assert_eq!(y.shape(), &[1, 1, 3]);
        assert_eq!(y.data(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn difference_filter_manual_convolution() {
        // [1,2,3] * [1,-1] (no pad) = [1-2, 2-3] = [-1,-1]
        let l = layer(1, 1, 2, vec![1.0, -1.0], vec![0.0], 0);
        let x = Tensor::from_vec(&[1, 1, 3], vec![1.0, 2.0, 3.0]).unwrap();
        let y = l.forward(&x).unwrap();
        assert_eq!(y.data(), &[-1.0, -1.0]);
    }

    #[test]
    fn width_and_channel_arithmetic_through_stack() {
        // 3×9×10 → (1,5) → 32×9×6 → (1,3) → 64×9×4 → (1,1) → 128×9×4
        let x = Tensor::zeros(&[3, 9, 10]);
        let l1 = ConvLayer::new(Tensor::zeros(&[32, 3, 1, 5]), vec![0.0; 32], 0).unwrap();
        let l2 = ConvLayer::new(Tensor::zeros(&[64, 32, 1, 3]), vec![0.0; 64], 0).unwrap();
        let l3 = ConvLayer::new(Tensor::zeros(&[128, 64, 1, 1]), vec![0.0; 128], 0).unwrap();
        let y1 = l1.forward(&x).unwrap();
        assert_eq!(y1.shape(), &[32, 9, 6]);
        let y2 = l2.forward(&y1).unwrap();
        assert_eq!(y2.shape(), &[64, 9, 4]);
        let y3 = l3.forward(&y2).unwrap();
        assert_eq!(y3.shape(), &[128, 9, 4]);
    }

    #[test]
    fn too_narrow_input_is_rejected() {
        let l = layer(1, 1, 5, vec![0.0; 5], vec![0.0], 0);
        let x = Tensor::zeros(&[1, 1, 3]);
        assert!(matches!(l.forward(&x), Err(NnError::EmptyOutput { .. })));
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let l = layer(2, 1, 3, vec![0.5; 6], vec![0.1, 0.2], 1);
        let x = Tensor::from_vec(&[1, 2, 4], (0..8).map(f64::from).collect()).unwrap();
        let up = Tensor::zeros(&[2, 2, 4]);
        let g = l.backward(&x, &up).unwrap();
        assert!(g.input.data().iter().all(|&v| v == 0.0));
        assert!(g.weight.data().iter().all(|&v| v == 0.0));
        assert!(g.bias.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_filter_backward_passes_upstream() {
        let l = layer(1, 1, 1, vec![1.0], vec![0.0], 0);
        let x = Tensor::from_vec(&[1, 1, 4], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let up = Tensor::from_vec(&[1, 1, 4], vec![0.5, -1.0, 2.0, 0.0]).unwrap();
        let g = l.backward(&x, &up).unwrap();
        assert_eq!(g.input.data(), up.data());
    }

    #[test]
    fn rejects_nonfinite_input() {
        let l = layer(1, 1, 1, vec![1.0], vec![0.0], 0);
        let mut x = Tensor::zeros(&[1, 1, 3]);
        x.data_mut()[0] = f64::INFINITY;
        assert!(matches!(l.forward(&x), Err(NnError::NonFinite { .. })));
    }
}
