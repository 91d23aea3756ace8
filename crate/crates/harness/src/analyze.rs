use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aggregate::PointAggregate;
use crate::error::Result;
use crate::fit::{
    detect_critical_depth, fit_eta, fit_exponential_tail, fit_linear, fit_power_law, EtaFit, PowerLawFit,
    DEFAULT_CRITICAL_THRESHOLD,
};
use crate::sweep::read_sweep;

/// `S_op^peak = α_T·L + c_T` at one `(T, p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeSlope {
    #[serde(rename = "T")]
    pub t: usize,
    pub p: f64,
    pub alpha: f64,
    pub alpha_se: f64,
    pub c: f64,
    pub c_se: f64,
}

/// Peak entanglement at the largest `L` of one `(T, p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaturatedPeak {
    #[serde(rename = "T")]
    pub t: usize,
    pub p: f64,
    #[serde(rename = "L")]
    pub l: usize,
    pub s_max: f64,
    pub s_max_se: f64,
}

/// `S_op^max = β_p·T + c_p` at one `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthSlope {
    pub p: f64,
    pub beta: f64,
    pub beta_se: f64,
    pub c: f64,
    pub c_se: f64,
}

/// Decay rates at one grid point: `γ_len` per site from `D(ℓ)` and
/// `γ_cmi` per buffer row from the CMI profile of the dominant `W_b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRates {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "W")]
    pub w: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub p: f64,
    pub gamma_len: Option<f64>,
    pub gamma_len_se: Option<f64>,
    pub w_b: Option<usize>,
    pub gamma_cmi: Option<f64>,
    pub gamma_cmi_se: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResults {
    pub ell0: i64,
    pub alpha: Vec<VolumeSlope>,
    #[serde(rename = "T_c")]
    pub t_c: Option<usize>,
    pub s_max: Vec<SaturatedPeak>,
    pub beta: Vec<DepthSlope>,
    pub beta_power_law: Option<PowerLawFit>,
    pub decay: Vec<DecayRates>,
    pub eta: Option<EtaFit>,
}

fn key(p: f64) -> u64 {
    p.to_bits()
}

fn inverse_variance(se: f64) -> f64 {
    if se > 0.0 {
        1.0 / (se * se)
    } else {
        1.0
    }
}

/// Fit `ln CMI(d)` against `d`, weighted by `(mean/se)²`, over buffers with
/// nonzero mean. Returns `(rate, se)` with rate = −slope.
pub fn fit_cmi_decay(profile: &[(usize, f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<&(usize, f64, f64)> = profile.iter().filter(|p| p.1 > 0.0).collect();
    if pts.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let ws: Vec<f64> = pts.iter().map(|p| if p.2 > 0.0 { (p.1 / p.2).powi(2) } else { 1.0 }).collect();
    fit_linear(&xs, &ys, Some(&ws)).ok().map(|f| (-f.slope, f.slope_se))
}

/// All fits over a set of aggregated points.
pub fn fit_points(points: &[PointAggregate], ell0: i64) -> FitResults {
    let mut by_tp: BTreeMap<(usize, u64), Vec<&PointAggregate>> = BTreeMap::new();
    for a in points.iter().filter(|a| a.n_realizations > 0) {
        by_tp.entry((a.point.t, key(a.point.p))).or_default().push(a);
    }

    let mut alpha = Vec::new();
    let mut s_max = Vec::new();
    for group in by_tp.values_mut() {
        group.sort_by_key(|a| (a.point.l, a.point.w));
        let (t, p) = (group[0].point.t, group[0].point.p);
        // one value per L, from the widest grid at that L
        let mut per_l: BTreeMap<usize, &PointAggregate> = BTreeMap::new();
        for a in group.iter() {
            per_l.insert(a.point.l, a);
        }
        let xs: Vec<f64> = per_l.keys().map(|&l| l as f64).collect();
        let ys: Vec<f64> = per_l.values().map(|a| a.peak_mean).collect();
        let ws: Vec<f64> = per_l.values().map(|a| inverse_variance(a.peak_se)).collect();
        if let Ok(f) = fit_linear(&xs, &ys, Some(&ws)) {
            alpha.push(VolumeSlope { t, p, alpha: f.slope, alpha_se: f.slope_se, c: f.intercept, c_se: f.intercept_se });
        }
        let (&l, top) = per_l.iter().next_back().expect("group is non-empty");
        s_max.push(SaturatedPeak { t, p, l, s_max: top.peak_mean, s_max_se: top.peak_se });
    }

    let noiseless: Vec<(usize, f64, f64)> = alpha.iter().filter(|a| a.p == 0.0).map(|a| (a.t, a.alpha, a.alpha_se)).collect();
    let t_c = detect_critical_depth(&noiseless, DEFAULT_CRITICAL_THRESHOLD);

    let mut by_p: BTreeMap<u64, Vec<&SaturatedPeak>> = BTreeMap::new();
    for s in &s_max {
        by_p.entry(key(s.p)).or_default().push(s);
    }
    let mut beta = Vec::new();
    for group in by_p.values() {
        let xs: Vec<f64> = group.iter().map(|s| s.t as f64).collect();
        let ys: Vec<f64> = group.iter().map(|s| s.s_max).collect();
        let ws: Vec<f64> = group.iter().map(|s| inverse_variance(s.s_max_se)).collect();
        if let Ok(f) = fit_linear(&xs, &ys, Some(&ws)) {
            beta.push(DepthSlope { p: group[0].p, beta: f.slope, beta_se: f.slope_se, c: f.intercept, c_se: f.intercept_se });
        }
    }
    let noisy: Vec<&DepthSlope> = beta.iter().filter(|b| b.p > 0.0 && b.beta > 0.0).collect();
    let beta_power_law =
        fit_power_law(&noisy.iter().map(|b| b.p).collect::<Vec<_>>(), &noisy.iter().map(|b| b.beta).collect::<Vec<_>>()).ok();

    let mut decay = Vec::new();
    for a in points.iter().filter(|a| a.n_realizations > 0) {
        let tail = fit_exponential_tail(&a.lengths, ell0).ok();
        let w_b = a.dominant_w_b();
        let cmi = w_b.and_then(|w| fit_cmi_decay(&a.cmi_for_width(w)));
        decay.push(DecayRates {
            l: a.point.l,
            w: a.point.w,
            t: a.point.t,
            p: a.point.p,
            gamma_len: tail.map(|f| f.gamma),
            gamma_len_se: tail.map(|f| f.gamma_se),
            w_b,
            gamma_cmi: cmi.map(|c| c.0),
            gamma_cmi_se: cmi.map(|c| c.1),
        });
    }
    let eta_points: Vec<(f64, f64, f64)> = decay
        .iter()
        .filter(|d| d.p > 0.0)
        .filter_map(|d| Some((d.p / d.t as f64, d.gamma_len?, d.gamma_len_se?)))
        .collect();
    let eta = fit_eta(&eta_points).ok();

    FitResults { ell0, alpha, t_c, s_max, beta, beta_power_law, decay, eta }
}

/// Fit a sweep directory and write `fits.json` into it.
pub fn analyze_dir(dir: &Path, ell0: i64) -> Result<FitResults> {
    let points = read_sweep(dir)?;
    let fits = fit_points(&points, ell0);
    std::fs::write(dir.join("fits.json"), serde_json::to_string_pretty(&fits)? + "\n")?;
    Ok(fits)
}
