use serde::{Deserialize, Serialize};
use sebd_core::CutoffPolicy;

use crate::error::{Error, Result};

pub const DEFAULT_ETA: f64 = 21.3;

/// Expected peak operator entanglement `1/(e^γ − 1)` from an exponential
/// length distribution with rate `γ`.
pub fn predict_s_max(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("γ = {gamma} must be positive")));
    }
    Ok(1.0 / gamma.exp_m1())
}

/// Expected `I(A:B|C)` for a buffer of `d_c` rows on a strip of width `w_b`.
pub fn predict_cmi(gamma: f64, w_b: usize, d_c: usize) -> Result<f64> {
    if w_b == 0 {
        return Err(Error::Domain("W_b must be at least 1".into()));
    }
    Ok((-gamma * (w_b * d_c) as f64).exp() * predict_s_max(gamma)?)
}

/// `γ = η·p/T`.
pub fn gamma_model(eta: f64, p: f64, t: usize) -> f64 {
    eta * p / t as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffEvaluation {
    /// `log₂ χ_cutoff = λT/(ηp)`.
    pub chi_cutoff_log2: f64,
    /// `N·T·e^{−λ}`.
    pub tvd_bound: f64,
}

pub fn evaluate_cutoff_policy(policy: &CutoffPolicy, n: usize, t: usize, p: f64) -> CutoffEvaluation {
    CutoffEvaluation {
        chi_cutoff_log2: policy.threshold_bits(t, p),
        tvd_bound: n as f64 * t as f64 * (-policy.lambda).exp(),
    }
}

/// `λ = ln(NT/ε)`, which makes the total abort bound exactly `ε`.
pub fn lambda_for_total_error(n: usize, t: usize, epsilon: f64) -> f64 {
    (n as f64 * t as f64 / epsilon).ln()
}

/// `λ = ln(T/ε)`.
pub fn lambda_for_depth(t: usize, epsilon: f64) -> f64 {
    (t as f64 / epsilon).ln()
}
