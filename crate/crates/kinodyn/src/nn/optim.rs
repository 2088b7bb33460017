//! Bias-corrected adaptive-moment parameter update.

/// Fixed moment coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamParams {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First/second moment estimates for one parameter vector.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
    pub params: AdamParams,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
            step: 0,
            params: AdamParams::default(),
        }
    }
}

/// One update over a flat parameter slice. `grads` must match `params`.
pub fn adam_update(params: &mut [f64], grads: &[f64], state: &mut AdamState, lr: f64) {
    assert_eq!(params.len(), grads.len());
    assert_eq!(params.len(), state.m.len());
    state.step += 1;
    let AdamParams {
        beta1,
        beta2,
        epsilon,
    } = state.params;
    let bc1 = 1.0 - beta1.powi(state.step as i32);
    let bc2 = 1.0 - beta2.powi(state.step as i32);
    for i in 0..params.len() {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grads[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grads[i] * grads[i];
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + epsilon);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_gradient_leaves_params_and_decays_moments() {
        let mut p = vec![1.0, -2.0];
        let mut st = AdamState::new(2);
        st.m = vec![0.5, 0.5];
        st.v = vec![0.25, 0.25];
        adam_update(&mut p, &[0.0, 0.0], &mut st, 0.1);
        assert_eq!(p, vec![1.0, -2.0]);
        assert_abs_diff_eq!(st.m[0], 0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(st.v[0], 0.25 * 0.999, epsilon = 1e-15);
    }

    #[test]
    fn constant_gradient_step_is_bounded_by_lr() {
        // With a constant gradient the bias-corrected step magnitude
        // approaches lr (sign-like behavior).
        let mut p = vec![0.0];
        let mut st = AdamState::new(1);
        let lr = 0.05;
        let mut prev = p[0];
        for _ in 0..200 {
            adam_update(&mut p, &[3.0], &mut st, lr);
            let step = (p[0] - prev).abs();
            assert!(step <= lr * 1.05, "step {step} exceeds lr bound");
            prev = p[0];
        }
        let final_step = {
            let before = p[0];
            adam_update(&mut p, &[3.0], &mut st, lr);
            (p[0] - before).abs()
        };
        assert_abs_diff_eq!(final_step, lr, epsilon = lr * 0.01);
    }

    /// Independent scalar re-implementation as the oracle for a short
    /// optimization of f(w) = w².
    #[test]
    fn quadratic_descent_matches_scalar_oracle() {
        let lr = 0.1;
        let (beta1, beta2, eps) = (0.9, 0.999, 1e-8);

        // oracle: plain scalar loop, written independently of adam_update
        let mut w_ref = 1.0f64;
        let (mut m, mut v) = (0.0f64, 0.0f64);
        let mut ref_history = Vec::new();
        for t in 1..=10 {
            let g = 2.0 * w_ref;
            m = beta1 * m + (1.0 - beta1) * g;
            v = beta2 * v + (1.0 - beta2) * g * g;
            let mh = m / (1.0 - beta1.powi(t));
            let vh = v / (1.0 - beta2.powi(t));
            w_ref -= lr * mh / (vh.sqrt() + eps);
            ref_history.push(w_ref);
        }

        let mut w = vec![1.0f64];
        let mut st = AdamState::new(1);
        let mut prev = w[0];
        for step in 0..10 {
            let g = vec![2.0 * w[0]];
            adam_update(&mut w, &g, &mut st, lr);
            assert!(w[0] < prev, "w must decrease monotonically");
            assert_abs_diff_eq!(w[0], ref_history[step], epsilon = 1e-12);
            prev = w[0];
        }
    }
}
