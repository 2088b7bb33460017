//! Seeded parameter initialization: centered uniform with fan-in scaling.

use super::Tensor;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Uniform in `(-1/√fan_in, 1/√fan_in)`.
pub fn uniform_fan_in(rng: &mut ChaCha8Rng, shape: &[usize], fan_in: usize) -> Tensor {
    let bound = 1.0 / (fan_in as f64).sqrt();
    let len: usize = shape.iter().product();
    let data = (0..len).map(|_| rng.gen_range(-bound..bound)).collect();
    Tensor::from_vec(shape, data).expect("length matches shape")
}

/// Bias init matches the weight bound of its layer.
pub fn bias_fan_in(rng: &mut ChaCha8Rng, len: usize, fan_in: usize) -> Vec<f64> {
    let bound = 1.0 / (fan_in as f64).sqrt();
    (0..len).map(|_| rng.gen_range(-bound..bound)).collect()
}
