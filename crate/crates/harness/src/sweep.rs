use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sebd_core::sebd::run_trajectory_with_options;
use sebd_core::{CircuitGeometry, CutoffPolicy, TrajectoryOptions, TrajectoryRecord};

use crate::aggregate::{CmiPoint, PointAggregate};
use crate::config::{thread_count, GridPoint, SweepConfig};
use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::seeds::realization_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub realization: u64,
    pub seed: u64,
    pub error: String,
}

/// Raw output of one grid point, in realization order.
#[derive(Clone, Debug)]
pub struct PointRun {
    pub point: GridPoint,
    pub records: Vec<TrajectoryRecord>,
    pub failures: Vec<Failure>,
}

impl PointRun {
    pub fn aggregate(&self) -> Result<PointAggregate> {
        PointAggregate::from_records(self.point, &self.records, self.failures.len())
    }
}

pub fn trajectory_options(cfg: &SweepConfig, point: &GridPoint) -> Result<TrajectoryOptions> {
    let cutoff = cfg.lambda.map(|l| CutoffPolicy::new(l, cfg.eta, cfg.epsilon)).transpose()?;
    Ok(TrajectoryOptions {
        cmi_buffers: cfg.cmi_buffers.iter().copied().filter(|&d| d <= point.l).collect(),
        cutoff,
        keep_peak_state: false,
    })
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Run every realization of one point on the worker pool. Failed
/// trajectories are collected, not fatal.
pub fn simulate_point(point: GridPoint, cfg: &SweepConfig, opts: &TrajectoryOptions) -> Result<PointRun> {
    let geom = CircuitGeometry::new(point.l, point.w, point.t)?;
    let results: Vec<(u64, u64, std::result::Result<TrajectoryRecord, String>)> =
        with_pool(thread_count(cfg), || {
            (0..cfg.n_realizations as u64)
                .into_par_iter()
                .map(|i| {
                    let seed = realization_seed(cfg.master_seed, &point, i);
                    let r = run_trajectory_with_options(&geom, point.p, seed, opts).map_err(|e| e.to_string());
                    (i, seed, r)
                })
                .collect()
        })?;
    let mut records = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (realization, seed, r) in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(error) => failures.push(Failure { realization, seed, error }),
        }
    }
    Ok(PointRun { point, records, failures })
}

pub struct SweepResult {
    pub out_dir: PathBuf,
    pub points: Vec<PointAggregate>,
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a SweepConfig,
    points: Vec<String>,
}

/// Run the whole grid and write per-point aggregates under `cfg.out`.
/// Output depends only on the config.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out)?;
    let mut aggregates = Vec::new();
    for point in cfg.points() {
        let opts = trajectory_options(cfg, &point)?;
        let run = simulate_point(point, cfg, &opts)?;
        let agg = run.aggregate()?;
        let dir = cfg.out.join(point.dir_name());
        write_point(&dir, &agg, &run.failures)?;
        if cfg.dump_records {
            let mut f = BufWriter::new(File::create(dir.join("trajectories.jsonl"))?);
            for r in &run.records {
                writeln!(f, "{}", r.to_json_line())?;
            }
            f.flush()?;
        }
        aggregates.push(agg);
    }
    let meta = Metadata {
        tool: "sebd",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        points: cfg.points().iter().map(GridPoint::dir_name).collect(),
    };
    fs::write(cfg.out.join("metadata.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
    fs::write(cfg.out.join("schema.md"), SCHEMA)?;
    Ok(SweepResult { out_dir: cfg.out.clone(), points: aggregates })
}

pub const SCHEMA: &str = "\
# Sweep output

One directory per grid point, named `L{L}_W{W}_T{T}_p{p}`. Columns are 1-based
where they label columns or sites.

- `summary.csv`: `L,W,T,p,n_realizations,n_failed,peak_mean,peak_se,t_peak_mean,m_over_n_mean,w_b_mean,abort_fraction`.
  `peak_*` is the mean over realizations of each trajectory's maximum `S_op`, in bits.
- `curve.csv`: `t,mean,se`. Mean `S_op(t)` over realizations that reached column `t`.
- `lengths.csv`: `ell,count,mass`. Generator length distribution `D(ell)` at the peak column.
- `centers.csv`: `w_b,doubled_center,count,mass`. Center distribution `C(x_c)` keyed by `2*x_c`,
  split by peak strip width; masses are normalized within each width.
- `w_b.csv`: `w_b,count`. Realizations per peak strip width.
- `cmi.csv`: `w_b,d_c,n,mean,se`. `I(A:B|C)` at the peak for a centered buffer of `d_c` rows.
- `failures.csv`: `realization,seed,error` for trajectories that returned an error.
- `trajectories.jsonl`: one trajectory record per line, when record dumps are enabled.

`metadata.json` holds the resolved configuration. `fits.json` is written by `analyze`.
";

#[derive(Serialize, Deserialize)]
struct SummaryRow {
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "W")]
    w: usize,
    #[serde(rename = "T")]
    t: usize,
    p: f64,
    n_realizations: usize,
    n_failed: usize,
    peak_mean: f64,
    peak_se: f64,
    t_peak_mean: f64,
    m_over_n_mean: f64,
    w_b_mean: f64,
    abort_fraction: f64,
}

#[derive(Serialize, Deserialize)]
struct CurveRow {
    t: usize,
    mean: f64,
    se: f64,
}

#[derive(Serialize, Deserialize)]
struct LengthRow {
    ell: i64,
    count: u64,
    mass: f64,
}

#[derive(Serialize, Deserialize)]
struct CenterRow {
    w_b: usize,
    doubled_center: i64,
    count: u64,
    mass: f64,
}

#[derive(Serialize, Deserialize)]
struct WidthRow {
    w_b: usize,
    count: usize,
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>, header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Write one point's CSV files into `dir`.
pub fn write_point(dir: &Path, agg: &PointAggregate, failures: &[Failure]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let pt = agg.point;
    write_rows(
        &dir.join("summary.csv"),
        [SummaryRow {
            l: pt.l,
            w: pt.w,
            t: pt.t,
            p: pt.p,
            n_realizations: agg.n_realizations,
            n_failed: agg.n_failed,
            peak_mean: agg.peak_mean,
            peak_se: agg.peak_se,
            t_peak_mean: agg.t_peak_mean,
            m_over_n_mean: agg.m_over_n_mean,
            w_b_mean: agg.w_b_mean,
            abort_fraction: agg.abort_fraction,
        }],
        &["L", "W", "T", "p", "n_realizations", "n_failed", "peak_mean", "peak_se", "t_peak_mean", "m_over_n_mean", "w_b_mean", "abort_fraction"],
    )?;
    write_rows(
        &dir.join("curve.csv"),
        agg.curve_mean.iter().zip(&agg.curve_se).enumerate().map(|(t, (&mean, &se))| CurveRow { t: t + 1, mean, se }),
        &["t", "mean", "se"],
    )?;
    write_rows(
        &dir.join("lengths.csv"),
        agg.lengths.counts().iter().map(|(&ell, &count)| LengthRow { ell, count, mass: agg.lengths.mass(ell) }),
        &["ell", "count", "mass"],
    )?;
    write_rows(
        &dir.join("centers.csv"),
        agg.centers.iter().flat_map(|(&w_b, h)| {
            h.counts().iter().map(move |(&doubled_center, &count)| CenterRow { w_b, doubled_center, count, mass: h.mass(doubled_center) })
        }),
        &["w_b", "doubled_center", "count", "mass"],
    )?;
    write_rows(
        &dir.join("w_b.csv"),
        agg.w_b_counts.iter().map(|(&w_b, &count)| WidthRow { w_b, count }),
        &["w_b", "count"],
    )?;
    write_rows(&dir.join("cmi.csv"), agg.cmi.iter(), &["w_b", "d_c", "n", "mean", "se"])?;
    write_rows(&dir.join("failures.csv"), failures.iter(), &["realization", "seed", "error"])?;
    Ok(())
}

/// Read back what [`write_point`] wrote.
pub fn read_point(dir: &Path) -> Result<PointAggregate> {
    let s: Vec<SummaryRow> = read_rows(&dir.join("summary.csv"))?;
    let s = s.into_iter().next().ok_or_else(|| Error::Contract(format!("{}: empty summary", dir.display())))?;
    let curve: Vec<CurveRow> = read_rows(&dir.join("curve.csv"))?;
    let lengths: Vec<LengthRow> = read_rows(&dir.join("lengths.csv"))?;
    let centers: Vec<CenterRow> = read_rows(&dir.join("centers.csv"))?;
    let widths: Vec<WidthRow> = read_rows(&dir.join("w_b.csv"))?;
    let cmi: Vec<CmiPoint> = read_rows(&dir.join("cmi.csv"))?;
    let mut center_map: BTreeMap<usize, Histogram> = BTreeMap::new();
    for c in centers {
        center_map.entry(c.w_b).or_default().add_count(c.doubled_center, c.count);
    }
    Ok(PointAggregate {
        point: GridPoint::new(s.l, s.w, s.t, s.p),
        n_realizations: s.n_realizations,
        n_failed: s.n_failed,
        curve_mean: curve.iter().map(|c| c.mean).collect(),
        curve_se: curve.iter().map(|c| c.se).collect(),
        peak_mean: s.peak_mean,
        peak_se: s.peak_se,
        t_peak_mean: s.t_peak_mean,
        m_over_n_mean: s.m_over_n_mean,
        w_b_mean: s.w_b_mean,
        w_b_counts: widths.into_iter().map(|w| (w.w_b, w.count)).collect(),
        abort_fraction: s.abort_fraction,
        lengths: Histogram::from_counts(lengths.into_iter().map(|l| (l.ell, l.count))),
        centers: center_map,
        cmi,
    })
}

/// Every point directory under a sweep output directory, in name order.
pub fn read_sweep(dir: &Path) -> Result<Vec<PointAggregate>> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("summary.csv").is_file())
        .collect();
    dirs.sort();
    dirs.iter().map(|d| read_point(d)).collect()
}
