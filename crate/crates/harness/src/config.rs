use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DEFAULT_ETA;

/// One `(L, W, T, p)` grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "W")]
    pub w: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub p: f64,
}

impl GridPoint {
    pub fn new(l: usize, w: usize, t: usize, p: f64) -> Self {
        Self { l, w, t, p }
    }

    /// Directory name of the point inside a sweep output directory.
    pub fn dir_name(&self) -> String {
        format!("L{}_W{}_T{}_p{}", self.l, self.w, self.t, self.p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(rename = "L")]
    pub ls: Vec<usize>,
    #[serde(rename = "W")]
    pub ws: Vec<usize>,
    #[serde(rename = "T")]
    pub ts: Vec<usize>,
    pub p: Vec<f64>,
    pub n_realizations: usize,
    pub master_seed: u64,
    pub cmi_buffers: Vec<usize>,
    pub ell0: i64,
    /// Abort exponent; no cutoff when absent.
    pub lambda: Option<f64>,
    pub eta: f64,
    pub epsilon: f64,
    pub out: PathBuf,
    /// Worker threads; rayon's default when absent.
    pub threads: Option<usize>,
    /// Also write every trajectory record as a JSON line.
    pub dump_records: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ls: vec![40],
            ws: vec![40],
            ts: vec![8],
            p: vec![0.04],
            n_realizations: 1000,
            master_seed: 0,
            cmi_buffers: Vec::new(),
            ell0: 10,
            lambda: None,
            eta: DEFAULT_ETA,
            epsilon: 0.01,
            out: PathBuf::from("sweep_out"),
            threads: None,
            dump_records: false,
        }
    }
}

/// Partial settings from flags or a config file. Later sources override
/// earlier ones key by key.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    #[serde(rename = "L")]
    pub ls: Option<Vec<usize>>,
    #[serde(rename = "W")]
    pub ws: Option<Vec<usize>>,
    #[serde(rename = "T")]
    pub ts: Option<Vec<usize>>,
    pub p: Option<Vec<f64>>,
    pub n_realizations: Option<usize>,
    pub master_seed: Option<u64>,
    pub cmi_buffers: Option<Vec<usize>>,
    pub ell0: Option<i64>,
    pub lambda: Option<f64>,
    pub eta: Option<f64>,
    pub epsilon: Option<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub dump_records: Option<bool>,
}

impl ConfigOverrides {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn apply(self, cfg: &mut SweepConfig) {
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = self.$f { cfg.$f = v; })*};
        }
        set!(ls, ws, ts, p, n_realizations, master_seed, cmi_buffers, ell0, eta, epsilon, out, dump_records);
        if self.lambda.is_some() {
            cfg.lambda = self.lambda;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
    }
}

impl SweepConfig {
    /// Defaults, then flags, then the config file.
    pub fn resolve(flags: ConfigOverrides, file: Option<ConfigOverrides>) -> Result<Self> {
        let mut cfg = Self::default();
        flags.apply(&mut cfg);
        if let Some(f) = file {
            f.apply(&mut cfg);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for (name, v) in [("L", &self.ls), ("W", &self.ws)] {
            if v.is_empty() || v.iter().any(|&x| x < 2) {
                return bad(format!("{name} grid must be non-empty with values ≥ 2"));
            }
        }
        if self.ts.is_empty() || self.ts.contains(&0) {
            return bad("T grid must be non-empty and positive".into());
        }
        if self.p.is_empty() || self.p.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("p grid must be non-empty with values in [0, 1]".into());
        }
        if self.n_realizations == 0 {
            return bad("n_realizations must be at least 1".into());
        }
        if let Some(&d) = self.cmi_buffers.iter().find(|&&d| self.ls.iter().any(|&l| d > l)) {
            return bad(format!("buffer of {d} rows exceeds the smallest L"));
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        if let Some(l) = self.lambda {
            sebd_core::CutoffPolicy::new(l, self.eta, self.epsilon)?;
        }
        Ok(())
    }

    /// Grid points in `L`, `W`, `T`, `p` nesting order.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &l in &self.ls {
            for &w in &self.ws {
                for &t in &self.ts {
                    for &p in &self.p {
                        out.push(GridPoint::new(l, w, t, p));
                    }
                }
            }
        }
        out
    }
}

pub const THREADS_ENV: &str = "SEBD_THREADS";

/// Thread count from the config, else from `SEBD_THREADS`.
pub fn thread_count(cfg: &SweepConfig) -> Option<usize> {
    cfg.threads.or_else(|| std::env::var(THREADS_ENV).ok()?.parse().ok()).filter(|&n| n > 0)
}
