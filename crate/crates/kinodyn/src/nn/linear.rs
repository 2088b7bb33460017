//! Fully-connected layer over a flattened input.

use super::{NnError, Tensor};

#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    /// Weights, shape `[out, in]`.
    pub weight: Tensor,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LinearGrads {
    pub input: Vec<f64>,
    pub weight: Tensor,
    pub bias: Vec<f64>,
}

impl Linear {
    pub fn new(weight: Tensor, bias: Vec<f64>) -> Result<Self, NnError> {
        if weight.shape().len() != 2 || weight.shape()[0] != bias.len() {
            return Err(NnError::ShapeMismatch {
                context: "Linear weight/bias",
                expected: vec![bias.len(), 0],
                got: weight.shape().to_vec(),
            });
        }
        Ok(Linear { weight, bias })
    }

    pub fn in_features(&self) -> usize {
        self.weight.shape()[1]
    }

    pub fn out_features(&self) -> usize {
        self.weight.shape()[0]
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        let (out_n, in_n) = (self.out_features(), self.in_features());
        if x.len() != in_n {
            return Err(NnError::ShapeMismatch {
                context: "Linear forward input",
                expected: vec![in_n],
                got: vec![x.len()],
            });
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(NnError::NonFinite {
                context: "Linear forward input",
            });
        }
        let mut y = self.bias.clone();
        for o in 0..out_n {
            let row = &self.weight.data()[o * in_n..(o + 1) * in_n];
            y[o] += row.iter().zip(x.iter()).map(|(&w, &v)| w * v).sum::<f64>();
        }
        Ok(y)
    }

    pub fn backward(&self, x: &[f64], upstream: &[f64]) -> Result<LinearGrads, NnError> {
        let (out_n, in_n) = (self.out_features(), self.in_features());
        if x.len() != in_n || upstream.len() != out_n {
            return Err(NnError::ShapeMismatch {
                context: "Linear backward",
                expected: vec![in_n, out_n],
                got: vec![x.len(), upstream.len()],
            });
        }
        let mut grad_x = vec![0.0; in_n];
        let mut grad_w = Tensor::zeros(self.weight.shape());
        for o in 0..out_n {
            let up = upstream[o];
            let w_row = &self.weight.data()[o * in_n..(o + 1) * in_n];
            let gw_row = &mut grad_w.data_mut()[o * in_n..(o + 1) * in_n];
            for i in 0..in_n {
                gw_row[i] = up * x[i];
                grad_x[i] += up * w_row[i];
            }
        }
        Ok(LinearGrads {
            input: grad_x,
            weight: grad_w,
            bias: upstream.to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_return_bias() {
        let l = Linear::new(Tensor::zeros(&[2, 3]), vec![0.7, -0.3]).unwrap();
        let y = l.forward(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(y, vec![0.7, -0.3]);
    }

    #[test]
    fn identity_block_passes_length_two_input() {
        let l = Linear::new(
            Tensor::from_vec(&[2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap(),
            vec![0.0, 0.0],
        )
        .unwrap();
        let y = l.forward(&[0.25, -4.0]).unwrap();
        assert_eq!(y, vec![0.25, -4.0]);
    }

    #[test]
    fn input_length_mismatch_is_error() {
        let l = Linear::new(Tensor::zeros(&[2, 3]), vec![0.0; 2]).unwrap();
        assert!(l.forward(&[1.0, 2.0]).is_err());
    }
}
