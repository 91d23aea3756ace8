use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sebd_core::diagnostics::{cmi_clipped, to_clipped_gauge};
use sebd_core::sebd::centered_buffer;
use sebd_core::TrajectoryRecord;

use crate::config::GridPoint;
use crate::error::{Error, Result};
use crate::histogram::{aggregate_histograms, center_histograms_by_width, Histogram};

/// Mean and standard error of the mean; the error is zero for one value.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmiPoint {
    pub w_b: usize,
    pub d_c: usize,
    pub n: usize,
    pub mean: f64,
    pub se: f64,
}

/// Everything kept about one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointAggregate {
    pub point: GridPoint,
    pub n_realizations: usize,
    pub n_failed: usize,
    /// Mean `S_op(t)` over the realizations that reached column `t`.
    pub curve_mean: Vec<f64>,
    pub curve_se: Vec<f64>,
    pub peak_mean: f64,
    pub peak_se: f64,
    pub t_peak_mean: f64,
    pub m_over_n_mean: f64,
    pub w_b_mean: f64,
    /// Realizations per peak strip width.
    pub w_b_counts: BTreeMap<usize, usize>,
    pub abort_fraction: f64,
    pub lengths: Histogram,
    /// Doubled-center histograms keyed by `W_b`.
    pub centers: BTreeMap<usize, Histogram>,
    /// CMI means per `(W_b, d_C)`.
    pub cmi: Vec<CmiPoint>,
}

impl PointAggregate {
    /// Aggregate in seed order, so any permutation of `records` gives the
    /// same result.
    pub fn from_records(point: GridPoint, records: &[TrajectoryRecord], n_failed: usize) -> Result<Self> {
        let mut sorted: Vec<&TrajectoryRecord> = records.iter().collect();
        sorted.sort_by(|a, b| a.seed.cmp(&b.seed).then_with(|| a.bits.cmp(&b.bits)));
        let owned: Vec<TrajectoryRecord> = sorted.iter().map(|r| (*r).clone()).collect();
        for r in &owned {
            if (r.l, r.w, r.t) != (point.l, point.w, point.t) || r.p.to_bits() != point.p.to_bits() {
                return Err(Error::Contract(format!("record for ({}, {}, {}, {}) in point {:?}", r.l, r.w, r.t, r.p, point)));
            }
        }
        let (_, lengths) = aggregate_histograms(&owned)?;
        let centers = center_histograms_by_width(&owned)?;

        let mut curve_mean = Vec::with_capacity(point.w);
        let mut curve_se = Vec::with_capacity(point.w);
        for t in 0..point.w {
            let vals: Vec<f64> = owned.iter().filter_map(|r| r.s_op_curve.get(t)).map(|&s| s as f64).collect();
            let (m, se) = mean_se(&vals);
            curve_mean.push(m);
            curve_se.push(se);
        }
        let col = |f: &dyn Fn(&TrajectoryRecord) -> f64| owned.iter().map(f).collect::<Vec<f64>>();
        let (peak_mean, peak_se) = mean_se(&col(&|r| r.s_op_peak as f64));
        let (t_peak_mean, _) = mean_se(&col(&|r| r.t_peak as f64));
        let (m_over_n_mean, _) = mean_se(&col(&|r| r.m_over_n_at_peak));
        let (w_b_mean, _) = mean_se(&col(&|r| r.w_b_at_peak as f64));
        let mut w_b_counts: BTreeMap<usize, usize> = BTreeMap::new();
        for r in &owned {
            *w_b_counts.entry(r.w_b_at_peak).or_default() += 1;
        }
        let aborts = owned.iter().filter(|r| r.aborted).count();

        let mut by_key: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        for r in &owned {
            for &(d, v) in &r.cmi_at_peak {
                by_key.entry((r.w_b_at_peak, d)).or_default().push(v as f64);
            }
        }
        let cmi = by_key
            .into_iter()
            .map(|((w_b, d_c), v)| {
                let (mean, se) = mean_se(&v);
                CmiPoint { w_b, d_c, n: v.len(), mean, se }
            })
            .collect();

        Ok(Self {
            point,
            n_realizations: owned.len(),
            n_failed,
            curve_mean,
            curve_se,
            peak_mean,
            peak_se,
            t_peak_mean,
            m_over_n_mean,
            w_b_mean,
            w_b_counts,
            abort_fraction: if owned.is_empty() { f64::NAN } else { aborts as f64 / owned.len() as f64 },
            lengths,
            centers,
            cmi,
        })
    }

    /// The strip width seen at the peak by the most realizations.
    pub fn dominant_w_b(&self) -> Option<usize> {
        self.w_b_counts.iter().max_by_key(|&(&w, &n)| (n, std::cmp::Reverse(w))).map(|(&w, _)| w)
    }

    /// CMI profile `(d_C, mean, se)` for one strip width.
    pub fn cmi_for_width(&self, w_b: usize) -> Vec<(usize, f64, f64)> {
        self.cmi.iter().filter(|c| c.w_b == w_b).map(|c| (c.d_c, c.mean, c.se)).collect()
    }
}

/// Mean `I(A:B|C)` per buffer size from stored peak states.
pub fn cmi_profile(records: &[TrajectoryRecord], buffers: &[usize]) -> Result<Vec<(usize, f64)>> {
    if records.is_empty() {
        return Err(Error::Contract("no records".into()));
    }
    let mut sums = vec![0usize; buffers.len()];
    for r in records {
        let state = r
            .peak_state
            .as_ref()
            .ok_or_else(|| Error::Contract(format!("record with seed {} has no peak state", r.seed)))?;
        let cg = to_clipped_gauge(state);
        let w_b = state.n_qubits() / r.l;
        for (sum, &d) in sums.iter_mut().zip(buffers) {
            *sum += cmi_clipped(&cg, &centered_buffer(r.l, w_b, d)?)?;
        }
    }
    Ok(buffers.iter().zip(sums).map(|(&d, s)| (d, s as f64 / records.len() as f64)).collect())
}
