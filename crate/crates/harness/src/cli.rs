use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sebd_core::sebd::run_trajectory_with_options;
use sebd_core::validation::{clipped_gauge_check, dense_oracle_check, sebd_distribution_check, sebd_exact_check};
use sebd_core::{CircuitGeometry, CutoffPolicy};

use crate::analyze::analyze_dir;
use crate::config::{ConfigOverrides, SweepConfig};
use crate::error::{Error, Result};
use crate::model::{
    evaluate_cutoff_policy, gamma_model, lambda_for_depth, lambda_for_total_error, predict_cmi, predict_s_max,
    DEFAULT_ETA,
};
use crate::sweep::{run_sweep, trajectory_options};

#[derive(Parser, Debug)]
#[command(name = "sebd", version, about = "Column-by-column sampling of noisy 2D Clifford circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample one trajectory and print its record as a JSON line.
    Run(Flags),
    /// Run a parameter sweep and write aggregates.
    Sweep(Flags),
    /// Fit the aggregates of a sweep directory.
    Analyze(Flags),
    /// Evaluate the analytic model and cutoff formulas.
    Predict(PredictFlags),
    /// Run the oracle and equivalence checks.
    Validate(Flags),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// Lattice length(s), comma separated.
    #[arg(long = "L", value_delimiter = ',')]
    pub l: Vec<usize>,
    /// Lattice width(s).
    #[arg(long = "W", value_delimiter = ',')]
    pub w: Vec<usize>,
    /// Circuit depth(s).
    #[arg(long = "T", value_delimiter = ',')]
    pub t: Vec<usize>,
    /// Noise rate(s).
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Realizations per grid point, or cases for `validate`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Trajectory seed for `run`, master seed for `sweep`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tail fits use lengths above this.
    #[arg(long)]
    pub ell0: Option<i64>,
    /// Abort exponent; enables the entanglement cutoff.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Buffer sizes in rows for the CMI profile.
    #[arg(long = "dc", value_delimiter = ',')]
    pub dc: Vec<usize>,
    /// Output directory (sweep) or sweep directory to read (analyze).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML config file; its keys override flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (also SEBD_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write every trajectory record to trajectories.jsonl.
    #[arg(long)]
    pub dump_records: bool,
}

#[derive(Args, Debug, Clone, Default)]
pub struct PredictFlags {
    /// Length decay rate; derived as ηp/T when absent.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long = "T")]
    pub t: Option<usize>,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long = "W")]
    pub w: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Strip width for the CMI prediction.
    #[arg(long)]
    pub wb: Option<usize>,
    #[arg(long = "dc", value_delimiter = ',')]
    pub dc: Vec<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

impl Flags {
    fn overrides(&self) -> ConfigOverrides {
        let list = |v: &Vec<usize>| (!v.is_empty()).then(|| v.clone());
        ConfigOverrides {
            ls: list(&self.l),
            ws: list(&self.w),
            ts: list(&self.t),
            p: (!self.p.is_empty()).then(|| self.p.clone()),
            n_realizations: self.n,
            master_seed: self.seed,
            cmi_buffers: list(&self.dc),
            ell0: self.ell0,
            lambda: self.lambda,
            eta: self.eta,
            epsilon: self.epsilon,
            out: self.out.clone(),
            threads: self.threads,
            dump_records: self.dump_records.then_some(true),
        }
    }

    fn resolve(&self) -> Result<SweepConfig> {
        let file = self.config.as_deref().map(ConfigOverrides::from_file).transpose()?;
        SweepConfig::resolve(self.overrides(), file)
    }
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn cli_main<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Run(f) => {
            let cfg = f.resolve()?;
            let geom = CircuitGeometry::new(cfg.ls[0], cfg.ws[0], cfg.ts[0])?;
            let point = crate::config::GridPoint::new(cfg.ls[0], cfg.ws[0], cfg.ts[0], cfg.p[0]);
            let opts = trajectory_options(&cfg, &point)?;
            let rec = run_trajectory_with_options(&geom, point.p, cfg.master_seed, &opts)?;
            writeln!(out, "{}", rec.to_json_line())?;
            Ok(0)
        }
        Command::Sweep(f) => {
            let cfg = f.resolve()?;
            let res = run_sweep(&cfg)?;
            for a in &res.points {
                writeln!(
                    out,
                    "{}: {} realizations, {} failed, peak S_op {:.3} ± {:.3}",
                    a.point.dir_name(),
                    a.n_realizations,
                    a.n_failed,
                    a.peak_mean,
                    a.peak_se
                )?;
            }
            writeln!(out, "wrote {}", res.out_dir.display())?;
            Ok(0)
        }
        Command::Analyze(f) => {
            let cfg = f.resolve()?;
            let fits = analyze_dir(&cfg.out, cfg.ell0)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&fits)?)?;
            Ok(0)
        }
        Command::Predict(f) => {
            writeln!(out, "{}", serde_json::to_string_pretty(&predict(&f)?)?)?;
            Ok(0)
        }
        Command::Validate(f) => {
            let n = f.n.unwrap_or(500);
            let seed = f.seed.unwrap_or(1);
            let mut reports = vec![dense_oracle_check(n, 5, seed), clipped_gauge_check(n, 64, seed)];
            for (l, w, t, p) in [(4, 4, 4, 0.0), (4, 4, 4, 0.1), (5, 5, 6, 0.05)] {
                reports.push(sebd_exact_check(&CircuitGeometry::new(l, w, t)?, p, n.div_ceil(5), seed));
            }
            reports.push(sebd_distribution_check(&CircuitGeometry::new(4, 4, 4)?, 0.0, seed, 20 * n, 2, seed));
            for r in &reports {
                writeln!(out, "{r}")?;
            }
            Ok(if reports.iter().all(|r| r.passed()) { 0 } else { 1 })
        }
    }
}

fn predict(f: &PredictFlags) -> Result<serde_json::Value> {
    let eta = f.eta.unwrap_or(DEFAULT_ETA);
    let gamma = match (f.gamma, f.p, f.t) {
        (Some(g), _, _) => Some(g),
        (None, Some(p), Some(t)) => Some(gamma_model(eta, p, t)),
        _ => None,
    };
    let mut v = json!({});
    if let Some(g) = gamma {
        v["gamma"] = json!(g);
        v["s_max"] = json!(predict_s_max(g)?);
        if let Some(wb) = f.wb {
            let dcs = if f.dc.is_empty() { vec![0] } else { f.dc.clone() };
            let cmi: Vec<_> = dcs.iter().map(|&d| Ok(json!({"d_c": d, "cmi": predict_cmi(g, wb, d)?}))).collect::<Result<_>>()?;
            v["cmi"] = json!(cmi);
        }
    }
    let n = f.l.zip(f.w).map(|(l, w)| l * w);
    if let (Some(n), Some(t)) = (n, f.t) {
        let epsilon = f.epsilon.unwrap_or(0.01);
        v["lambda_total_error"] = json!(lambda_for_total_error(n, t, epsilon));
        v["lambda_depth"] = json!(lambda_for_depth(t, epsilon));
        if let (Some(lambda), Some(p)) = (f.lambda, f.p) {
            let policy = CutoffPolicy::new(lambda, eta, epsilon)?;
            let e = evaluate_cutoff_policy(&policy, n, t, p);
            v["chi_cutoff_log2"] = json!(e.chi_cutoff_log2);
            v["tvd_bound"] = json!(e.tvd_bound);
        }
    }
    if v.as_object().is_some_and(|o| o.is_empty()) {
        return Err(Error::Config("give --gamma, or --p and --T, or --L --W --T for cutoff presets".into()));
    }
    Ok(v)
}
