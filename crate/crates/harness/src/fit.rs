use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::Histogram;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
}

/// Weighted least squares `y = slope·x + intercept`. Standard errors scale
/// the covariance by the weighted residual variance, and are zero for two
/// points.
pub fn fit_linear(xs: &[f64], ys: &[f64], weights: Option<&[f64]>) -> Result<LinearFit> {
    let n = xs.len();
    if ys.len() != n || weights.is_some_and(|w| w.len() != n) {
        return Err(Error::Fit("xs, ys and weights differ in length".into()));
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    if (0..n).any(|i| !(w(i) >= 0.0) || !xs[i].is_finite() || !ys[i].is_finite()) {
        return Err(Error::Fit("non-finite data or negative weight".into()));
    }
    let sw: f64 = (0..n).map(w).sum();
    if sw <= 0.0 {
        return Err(Error::Fit("all weights are zero".into()));
    }
    let xm = (0..n).map(|i| w(i) * xs[i]).sum::<f64>() / sw;
    let ym = (0..n).map(|i| w(i) * ys[i]).sum::<f64>() / sw;
    let sxx: f64 = (0..n).map(|i| w(i) * (xs[i] - xm).powi(2)).sum();
    let first = (0..n).find(|&i| w(i) > 0.0).map(|i| xs[i]);
    let distinct = (0..n).any(|i| w(i) > 0.0 && Some(xs[i]) != first);
    if !distinct || sxx <= 0.0 {
        return Err(Error::Fit("fewer than two distinct x values".into()));
    }
    let sxy: f64 = (0..n).map(|i| w(i) * (xs[i] - xm) * (ys[i] - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let used = (0..n).filter(|&i| w(i) > 0.0).count();
    let s2 = if used > 2 {
        (0..n).map(|i| w(i) * (ys[i] - slope * xs[i] - intercept).powi(2)).sum::<f64>() / (used - 2) as f64
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_se: (s2 / sxx).sqrt(),
        intercept_se: (s2 * (1.0 / sw + xm * xm / sxx)).sqrt(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub gamma: f64,
    pub gamma_se: f64,
    pub n_bins: usize,
}

/// Decay rate of `log D(ℓ)` over the bins `ℓ > ell0`, weighted by bin
/// counts.
pub fn fit_exponential_tail(hist: &Histogram, ell0: i64) -> Result<TailFit> {
    let bins: Vec<(i64, u64)> = hist.counts().iter().filter(|&(&k, &c)| k > ell0 && c > 0).map(|(&k, &c)| (k, c)).collect();
    if bins.len() < 3 {
        return Err(Error::Fit(format!("{} nonzero bins beyond ℓ₀ = {ell0}, need 3", bins.len())));
    }
    let xs: Vec<f64> = bins.iter().map(|b| b.0 as f64).collect();
    let ys: Vec<f64> = bins.iter().map(|b| hist.mass(b.0).ln()).collect();
    let ws: Vec<f64> = bins.iter().map(|b| b.1 as f64).collect();
    let f = fit_linear(&xs, &ys, Some(&ws))?;
    Ok(TailFit { gamma: -f.slope, gamma_se: f.slope_se, n_bins: bins.len() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub exponent_se: f64,
    pub prefactor: f64,
}

/// `β = A·p^k` by a straight line in log–log space.
pub fn fit_power_law(ps: &[f64], betas: &[f64]) -> Result<PowerLawFit> {
    if ps.len() != betas.len() || ps.len() < 3 {
        return Err(Error::Fit("power law needs at least 3 matched points".into()));
    }
    if ps.iter().chain(betas).any(|&v| !(v > 0.0)) {
        return Err(Error::Fit("power law needs positive inputs".into()));
    }
    let lx: Vec<f64> = ps.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = betas.iter().map(|v| v.ln()).collect();
    let f = fit_linear(&lx, &ly, None)?;
    Ok(PowerLawFit { exponent: f.slope, exponent_se: f.slope_se, prefactor: f.intercept.exp() })
}

pub const DEFAULT_CRITICAL_THRESHOLD: f64 = 0.01;

/// Smallest depth whose slope exceeds `threshold` and is two standard errors
/// above zero. Entries are `(T, α_T, se)`.
pub fn detect_critical_depth(alpha_by_t: &[(usize, f64, f64)], threshold: f64) -> Option<usize> {
    let mut sorted = alpha_by_t.to_vec();
    sorted.sort_by_key(|a| a.0);
    sorted.into_iter().find(|&(_, a, se)| a > threshold && a - 2.0 * se > 0.0).map(|a| a.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaFit {
    pub eta: f64,
    pub eta_se: f64,
}

/// `γ = η·x` through the origin with `x = p/T`. Entries are `(x, γ, se)`;
/// entries with zero se get unit weight.
pub fn fit_eta(points: &[(f64, f64, f64)]) -> Result<EtaFit> {
    if points.is_empty() || points.iter().all(|p| p.0 == 0.0) {
        return Err(Error::Fit("no points with p/T > 0".into()));
    }
    let w = |se: f64| if se > 0.0 { 1.0 / (se * se) } else { 1.0 };
    let sxx: f64 = points.iter().map(|&(x, _, se)| w(se) * x * x).sum();
    let sxy: f64 = points.iter().map(|&(x, g, se)| w(se) * x * g).sum();
    let eta = sxy / sxx;
    let s2 = if points.len() > 1 {
        points.iter().map(|&(x, g, se)| w(se) * (g - eta * x).powi(2)).sum::<f64>() / (points.len() - 1) as f64
    } else {
        0.0
    };
    Ok(EtaFit { eta, eta_se: (s2 / sxx).sqrt() })
}
