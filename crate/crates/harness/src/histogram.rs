use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sebd_core::TrajectoryRecord;

use crate::error::{Error, Result};

/// Integer counts per bin. Masses are counts over the total `N_g`, so merges
/// are exact and independent of order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    counts: BTreeMap<i64, u64>,
    total: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (i64, u64)>) -> Self {
        let mut h = Self::new();
        for (k, c) in counts {
            h.add_count(k, c);
        }
        h
    }

    pub fn add(&mut self, key: i64) {
        self.add_count(key, 1);
    }

    pub fn add_count(&mut self, key: i64, count: u64) {
        if count > 0 {
            *self.counts.entry(key).or_default() += count;
            self.total += count;
        }
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (&k, &c) in &other.counts {
            self.add_count(k, c);
        }
    }

    /// `N_g`.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn count(&self, key: i64) -> u64 {
        self.counts.get(&key).copied().unwrap_or(0)
    }

    pub fn mass(&self, key: i64) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(key) as f64 / self.total as f64
        }
    }

    pub fn counts(&self) -> &BTreeMap<i64, u64> {
        &self.counts
    }

    pub fn masses(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.counts.keys().map(|&k| (k, self.mass(k)))
    }

    /// Relabel bins; bins mapped to the same key are summed.
    pub fn map_keys(&self, f: impl Fn(i64) -> i64) -> Histogram {
        Histogram::from_counts(self.counts.iter().map(|(&k, &c)| (f(k), c)))
    }
}

/// Doubled 1-based center `2·com(g)` of a generator from its `(com, len)`
/// pair, so half-integer centers get their own bin.
pub fn doubled_center(com: f64) -> i64 {
    (2.0 * com).round() as i64
}

/// Merge each half-integer bin `x + 1/2` into the site `x` on its left.
pub fn per_site(centers: &Histogram) -> Histogram {
    centers.map_keys(|k| k.div_euclid(2))
}

fn check_same_point(records: &[TrajectoryRecord]) -> Result<()> {
    if let Some(first) = records.first() {
        for r in records {
            if (r.l, r.w, r.t) != (first.l, first.w, first.t) || r.p.to_bits() != first.p.to_bits() {
                return Err(Error::Contract(format!(
                    "records mix (L, W, T, p) = ({}, {}, {}, {}) and ({}, {}, {}, {})",
                    first.l, first.w, first.t, first.p, r.l, r.w, r.t, r.p
                )));
            }
        }
    }
    Ok(())
}

/// Pool `(com, len)` pairs at `t_peak` over realizations into the center
/// distribution `C(x_c)` (keyed by doubled center) and the length
/// distribution `D(ℓ)`.
pub fn aggregate_histograms(records: &[TrajectoryRecord]) -> Result<(Histogram, Histogram)> {
    check_same_point(records)?;
    let mut centers = Histogram::new();
    let mut lengths = Histogram::new();
    for r in records {
        for &(com, len) in &r.gen_stats {
            centers.add(doubled_center(com));
            lengths.add(len as i64);
        }
    }
    Ok((centers, lengths))
}

/// Center distributions split by the strip width `W_b` at the peak, since
/// site labels of strips with different widths do not line up.
pub fn center_histograms_by_width(records: &[TrajectoryRecord]) -> Result<BTreeMap<usize, Histogram>> {
    check_same_point(records)?;
    let mut out: BTreeMap<usize, Histogram> = BTreeMap::new();
    for r in records {
        let h = out.entry(r.w_b_at_peak).or_default();
        for &(com, _) in &r.gen_stats {
            h.add(doubled_center(com));
        }
    }
    Ok(out)
}
