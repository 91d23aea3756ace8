//! Scaled-down reproduction checks. Each check simulates its grid at the
//! stated size and compares against a fixed tolerance.

use std::collections::BTreeMap;
use std::time::Instant;

use sebd_core::sebd::run_trajectory_with_cutoff;
use sebd_core::validation::{clipped_gauge_check, dense_oracle_check};
use sebd_core::{CircuitGeometry, CutoffPolicy};
use sebd_harness::analyze::fit_cmi_decay;
use sebd_harness::fit::{fit_eta, fit_exponential_tail, fit_power_law, DEFAULT_CRITICAL_THRESHOLD};
use sebd_harness::histogram::per_site;
use sebd_harness::model::{gamma_model, predict_s_max, DEFAULT_ETA};
use sebd_harness::seeds::realization_seed;
use sebd_harness::sweep::trajectory_options;
use sebd_harness::{fit_points, simulate_point, GridPoint, PointAggregate, SweepConfig};

const SEED: u64 = 20_240_601;
const ELL0: i64 = 10;

pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

fn run_points(points: &[(GridPoint, usize)], buffers: &[usize]) -> Vec<PointAggregate> {
    points
        .iter()
        .map(|&(pt, n)| {
            let cfg = SweepConfig {
                n_realizations: n,
                master_seed: SEED,
                cmi_buffers: buffers.to_vec(),
                ..Default::default()
            };
            let opts = trajectory_options(&cfg, &pt).unwrap();
            let run = simulate_point(pt, &cfg, &opts).unwrap();
            assert!(run.failures.is_empty(), "{:?}", run.failures);
            run.aggregate().unwrap()
        })
        .collect()
}

fn find(points: &[PointAggregate], l: usize, w: usize, t: usize, p: f64) -> &PointAggregate {
    points.iter().find(|a| a.point == GridPoint::new(l, w, t, p)).expect("point was simulated")
}

pub fn criterion_1() -> Verdict {
    let start = Instant::now();
    let rep = dense_oracle_check(500, 5, SEED);
    let secs = start.elapsed().as_secs_f64();
    Verdict { pass: rep.passed() && secs < 60.0, detail: format!("{rep}; {secs:.1} s") }
}

pub fn criterion_2() -> Verdict {
    let start = Instant::now();
    let rep = clipped_gauge_check(500, 64, SEED);
    let secs = start.elapsed().as_secs_f64();
    Verdict { pass: rep.passed() && secs < 60.0, detail: format!("{rep}; {secs:.1} s") }
}

pub fn criterion_3() -> Verdict {
    let grid: Vec<(GridPoint, usize)> = [16, 24, 32, 40]
        .iter()
        .flat_map(|&l| (4..=8).map(move |t| (GridPoint::new(l, 40, t, 0.0), 200)))
        .collect();
    let fits = fit_points(&run_points(&grid, &[]), ELL0);
    let mut pass = fits.alpha.len() == 5;
    let mut parts = Vec::new();
    for a in &fits.alpha {
        let ok = match a.t {
            t if t <= 5 => a.alpha.abs() < 0.02,
            t if t >= 7 => a.alpha > 0.05,
            _ => true,
        };
        pass &= ok;
        parts.push(format!("α_{}={:.4}±{:.4}", a.t, a.alpha, a.alpha_se));
    }
    pass &= matches!(fits.t_c, Some(5..=7));
    Verdict { pass, detail: format!("{}; T_c={:?} (threshold {DEFAULT_CRITICAL_THRESHOLD})", parts.join(" "), fits.t_c) }
}

pub fn criterion_4() -> Verdict {
    // W = 2L so the noiseless peak is not cut off by the grid width
    let grid: Vec<(GridPoint, usize)> = [0.04, 0.0]
        .iter()
        .flat_map(|&p| [40, 80].map(move |l| (GridPoint::new(l, 2 * l, 8, p), 300)))
        .collect();
    let pts = run_points(&grid, &[]);
    let peak = |l: usize, p: f64| find(&pts, l, 2 * l, 8, p).peak_mean;
    let (n40, n80) = (peak(40, 0.04), peak(80, 0.04));
    let (c40, c80) = (peak(40, 0.0), peak(80, 0.0));
    let noisy = (n80 - n40).abs() / n80.max(n40);
    let clean = (c80 - c40).abs() / c80.min(c40);
    Verdict {
        pass: noisy < 0.10 && clean > 0.50,
        detail: format!(
            "p=0.04: S(40)={n40:.2} S(80)={n80:.2} rel diff {noisy:.3} (< 0.10); p=0: S(40)={c40:.2} S(80)={c80:.2} rel diff {clean:.3} (> 0.50)"
        ),
    }
}

/// Points at `L = 80`, `W = 40` shared by criteria 5 to 7.
pub fn decay_points() -> Vec<PointAggregate> {
    let mut grid = Vec::new();
    for t in [8, 12, 16] {
        for p in [0.02, 0.04, 0.08] {
            grid.push((GridPoint::new(80, 40, t, p), 100));
        }
    }
    grid.push((GridPoint::new(80, 40, 8, 0.005), 100));
    grid.push((GridPoint::new(80, 40, 8, 0.01), 300));
    grid.push((GridPoint::new(80, 40, 8, 0.0), 100));
    run_points(&grid, &[0, 1, 2, 3, 4, 5, 6])
}

pub fn criterion_5(pts: &[PointAggregate]) -> Verdict {
    let grid: Vec<PointAggregate> =
        pts.iter().filter(|a| [8, 12, 16].contains(&a.point.t) && [0.02, 0.04, 0.08].contains(&a.point.p)).cloned().collect();
    let fits = fit_points(&grid, ELL0);
    let mut parts = Vec::new();
    let mut betas = Vec::new();
    for b in &fits.beta {
        parts.push(format!("β({})={:.3}±{:.3}", b.p, b.beta, b.beta_se));
        betas.push((b.p, b.beta));
    }
    // the exponent needs three positive slopes
    let positive: Vec<(f64, f64)> = betas.iter().copied().filter(|b| b.1 > 0.0).collect();
    let exponent = fit_power_law(&positive.iter().map(|b| b.0).collect::<Vec<_>>(), &positive.iter().map(|b| b.1).collect::<Vec<_>>())
        .ok()
        .map(|f| f.exponent);
    let exp_ok = exponent.is_some_and(|e| (-1.2..=-0.6).contains(&e));
    let eta = fits.eta.map(|e| e.eta);
    let mut worst: f64 = 0.0;
    if let Some(eta) = eta {
        for s in &fits.s_max {
            let pred = predict_s_max(gamma_model(eta, s.p, s.t)).unwrap();
            worst = worst.max((pred - s.s_max).abs() / s.s_max);
        }
    }
    let model_ok = eta.is_some() && worst <= 0.30;
    Verdict {
        pass: exp_ok && model_ok,
        detail: format!(
            "{}; power-law exponent {} (in [-1.2,-0.6]); refitted η={} worst model error {:.2} (≤ 0.30)",
            parts.join(" "),
            exponent.map_or("unavailable".into(), |e| format!("{e:.3}")),
            eta.map_or("unavailable".into(), |e| format!("{e:.2}")),
            worst
        ),
    }
}

pub fn criterion_6(pts: &[PointAggregate]) -> Verdict {
    let mut eta_points = Vec::new();
    let mut gamma_len = BTreeMap::new();
    for a in pts.iter().filter(|a| a.point.p > 0.0) {
        if let Ok(f) = fit_exponential_tail(&a.lengths, ELL0) {
            eta_points.push((a.point.p / a.point.t as f64, f.gamma, f.gamma_se));
            gamma_len.insert((a.point.t, a.point.p.to_bits()), f.gamma);
        }
    }
    let eta = fit_eta(&eta_points).ok();
    let eta_ok = eta.is_some_and(|e| (15.0..=30.0).contains(&e.eta));

    let mut cmi_ok = true;
    let mut parts = Vec::new();
    for a in pts.iter().filter(|a| a.point.p > 0.0 && (a.point.t == 8 || a.point.p == 0.02)) {
        let w_b = a.dominant_w_b().unwrap();
        let g_len = gamma_len.get(&(a.point.t, a.point.p.to_bits())).copied();
        let g_cmi = fit_cmi_decay(&a.cmi_for_width(w_b)).map(|c| c.0);
        let ok = match (g_len, g_cmi) {
            (Some(gl), Some(gc)) => (gc - gl * w_b as f64).abs() <= 0.25 * gl * w_b as f64,
            _ => false,
        };
        cmi_ok &= ok;
        parts.push(format!(
            "(T={},p={}) γ_cmi={} vs W_b·γ_len={}",
            a.point.t,
            a.point.p,
            g_cmi.map_or("-".into(), |g| format!("{g:.3}")),
            g_len.map_or("-".into(), |g| format!("{:.3}", g * w_b as f64))
        ));
    }

    let clean = pts.iter().find(|a| a.point.p == 0.0).unwrap();
    let w_b = clean.dominant_w_b().unwrap();
    let g_clean = fit_cmi_decay(&clean.cmi_for_width(w_b)).map_or(0.0, |c| c.0);
    let bound = gamma_len.get(&(8, 0.02f64.to_bits())).copied().unwrap_or(f64::NAN) * w_b as f64 / 5.0;
    let clean_ok = g_clean < bound;

    Verdict {
        pass: eta_ok && cmi_ok && clean_ok,
        detail: format!(
            "η={} (in [15,30]); {} (within 25%); p=0 CMI rate {g_clean:.4}/row < {bound:.4}/row",
            eta.map_or("unavailable".into(), |e| format!("{:.2}±{:.2}", e.eta, e.eta_se)),
            parts.join(", ")
        ),
    }
}

pub fn criterion_7(pts: &[PointAggregate]) -> Verdict {
    let a = pts.iter().find(|a| a.point == GridPoint::new(80, 40, 8, 0.01)).unwrap();
    let l = a.point.l;
    let mut pass = true;
    let mut parts = Vec::new();
    let mut any_bulk = false;
    for (&w_b, centers) in &a.centers {
        let sites = per_site(centers);
        let n_b = (l * w_b) as f64;
        let (mut lo, mut hi, mut bins) = (f64::INFINITY, f64::NEG_INFINITY, 0);
        for row in 2..l - 2 {
            for col in 2..w_b.saturating_sub(2) {
                // 1-based row-major site label
                let ratio = sites.mass((row * w_b + col + 1) as i64) * n_b;
                lo = lo.min(ratio);
                hi = hi.max(ratio);
                bins += 1;
            }
        }
        if bins == 0 {
            parts.push(format!("W_b={w_b}: no bulk bins"));
            continue;
        }
        any_bulk = true;
        pass &= lo >= 0.8 && hi <= 1.2;
        parts.push(format!("W_b={w_b}: {bins} bulk bins, N_b·C in [{lo:.3}, {hi:.3}] (N_g={})", centers.total()));
    }
    Verdict { pass: pass && any_bulk, detail: format!("{} (within ±20%)", parts.join("; ")) }
}

pub fn criterion_8() -> Verdict {
    let geom = CircuitGeometry::new(40, 40, 8).unwrap();
    let pt = GridPoint::new(40, 40, 8, 0.04);
    let n = 40 * 40;
    let mut pass = true;
    let mut parts = Vec::new();
    for lambda in [6.0, 8.0, 10.0] {
        let policy = CutoffPolicy::new(lambda, DEFAULT_ETA, 0.01).unwrap();
        let aborts = (0..2000u64)
            .filter(|&i| run_trajectory_with_cutoff(&geom, 0.04, realization_seed(SEED, &pt, i), policy).unwrap().aborted)
            .count();
        let frac = aborts as f64 / 2000.0;
        let bound = (n * 8) as f64 * (-lambda).exp();
        pass &= frac <= bound;
        parts.push(format!("λ={lambda}: abort fraction {frac:.4} ≤ {bound:.4}"));
    }
    Verdict { pass, detail: parts.join("; ") }
}

/// `⟨M⟩/N_b` at the peak for weak noise at `T = 8`, `L = 40`.
pub fn peak_density() -> Verdict {
    let grid: Vec<(GridPoint, usize)> = [0.005, 0.01, 0.02].map(|p| (GridPoint::new(40, 40, 8, p), 200)).to_vec();
    let pts = run_points(&grid, &[]);
    let mut pass = true;
    let mut parts = Vec::new();
    for a in &pts {
        pass &= (a.m_over_n_mean - 1.0).abs() <= 0.05;
        parts.push(format!("p={}: {:.3}", a.point.p, a.m_over_n_mean));
    }
    Verdict { pass, detail: format!("{} (within 5% of 1)", parts.join(", ")) }
}
