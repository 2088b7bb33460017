//! Softmax cross-entropy with the max-shift stabilization.

/// Returns `(loss, grad_logits)` for `-log softmax(logits)[label]`.
///
/// The gradient is `softmax(logits) - onehot(label)`.
pub fn softmax_cross_entropy(logits: &[f64], label: usize) -> (f64, Vec<f64>) {
    assert!(label < logits.len(), "label {label} out of range");
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    let log_sum = sum.ln();
    let loss = -(logits[label] - max - log_sum);
    let mut grad: Vec<f64> = exps.iter().map(|&e| e / sum).collect();
    grad[label] -= 1.0;
    (loss, grad)
}

/// Softmax probabilities with max-shift.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symmetric_logits_give_ln2() {
        let (loss, grad) = softmax_cross_entropy(&[0.0, 0.0], 0);
        assert_abs_diff_eq!(loss, std::f64::consts::LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(grad[0], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(grad[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn large_logits_stay_finite() {
        let (loss, grad) = softmax_cross_entropy(&[1000.0, 0.0], 0);
        assert!(loss.is_finite());
        assert!(loss.abs() < 1e-300 || loss >= 0.0);
        assert!(grad.iter().all(|g| g.is_finite()));
        // extreme but bounded magnitudes survive the shifted computation
        let (loss2, grad2) = softmax_cross_entropy(&[1e6, -1e6], 1);
        assert!(loss2.is_finite());
        assert!(grad2.iter().all(|g| g.is_finite()));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let logits: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let label = rng.gen_range(0..2usize);
            let (_, grad) = softmax_cross_entropy(&logits, label);
            let eps = 1e-6;
            for i in 0..2 {
                let mut plus = logits.clone();
                let mut minus = logits.clone();
                plus[i] += eps;
                minus[i] -= eps;
                let fd = (softmax_cross_entropy(&plus, label).0
                    - softmax_cross_entropy(&minus, label).0)
                    / (2.0 * eps);
                let rel = (grad[i] - fd).abs() / fd.abs().max(1e-9);
                assert!(rel <= 1e-6, "logit {i}: analytic {} fd {}", grad[i], fd);
            }
        }
    }
}
