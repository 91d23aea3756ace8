use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sebd_harness::fit::{
    detect_critical_depth, fit_eta, fit_exponential_tail, fit_linear, fit_power_law, DEFAULT_CRITICAL_THRESHOLD,
};
use sebd_harness::Histogram;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

#[test]
fn linear_fit_examples() {
    let f = fit_linear(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0], None).unwrap();
    assert!((f.slope - 2.0).abs() < 1e-12 && f.intercept.abs() < 1e-12);
    assert!(f.slope_se < 1e-12);
    let f = fit_linear(&[1.0, 2.0, 5.0], &[7.0, 7.0, 7.0], None).unwrap();
    assert!(f.slope.abs() < 1e-12);
    assert!(fit_linear(&[3.0, 3.0, 3.0], &[1.0, 2.0, 3.0], None).is_err());
    assert!(fit_linear(&[1.0], &[1.0], None).is_err());
    assert!(fit_linear(&[1.0, 2.0], &[1.0], None).is_err());
}

#[test]
fn noisy_slope_within_three_standard_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut misses = 0;
    for _ in 0..200 {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 / 10.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0 + 0.1 * gaussian(&mut rng)).collect();
        let f = fit_linear(&xs, &ys, None).unwrap();
        // se against the exact sampling spread σ/√Sxx
        let sxx: f64 = xs.iter().map(|x| (x - 2.45).powi(2)).sum();
        assert!((f.slope_se / (0.1 / sxx.sqrt()) - 1.0).abs() < 0.4);
        if (f.slope - 3.0).abs() > 3.0 * f.slope_se {
            misses += 1;
        }
    }
    // a 3σ miss happens 0.3% of the time
    assert!(misses <= 3, "{misses} misses");
}

#[test]
fn weighted_fit_matches_replicated_points() {
    let xs = [0.0, 1.0, 2.0, 3.0];
    let ys = [0.1, 1.3, 1.9, 3.2];
    let f = fit_linear(&xs, &ys, Some(&[1.0, 2.0, 1.0, 3.0])).unwrap();
    let rx = [0.0, 1.0, 1.0, 2.0, 3.0, 3.0, 3.0];
    let ry = [0.1, 1.3, 1.3, 1.9, 3.2, 3.2, 3.2];
    let g = fit_linear(&rx, &ry, None).unwrap();
    assert!((f.slope - g.slope).abs() < 1e-12);
    assert!((f.intercept - g.intercept).abs() < 1e-12);
}

#[test]
fn tail_fit_examples() {
    let exact = Histogram::from_counts((0..60).map(|l| (l, (1e12 * (-0.5 * l as f64).exp()).round() as u64)));
    let f = fit_exponential_tail(&exact, 10).unwrap();
    assert!((f.gamma - 0.5).abs() < 1e-9, "{}", f.gamma);
    let uniform = Histogram::from_counts((0..40).map(|l| (l, 1000)));
    assert!(fit_exponential_tail(&uniform, 10).unwrap().gamma.abs() < 1e-12);
    let short = Histogram::from_counts([(11, 5), (12, 3), (5, 100)]);
    assert!(fit_exponential_tail(&short, 10).is_err());
}

#[test]
fn tail_fit_recovers_planted_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for gamma in [0.05, 0.1, 0.3] {
        let mut h = Histogram::new();
        for _ in 0..100_000 {
            // geometric lengths with P(ℓ) ∝ e^{−γℓ}
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            h.add((-u.ln() / gamma).floor() as i64);
        }
        let f = fit_exponential_tail(&h, 10).unwrap();
        assert!((f.gamma - gamma).abs() < 3.0 * f.gamma_se.max(1e-3), "{gamma}: {f:?}");
    }
}

#[test]
fn power_law_examples() {
    let ps = [0.02, 0.04, 0.08];
    let f = fit_power_law(&ps, &ps.map(|p| 1.0 / p)).unwrap();
    assert!((f.exponent + 1.0).abs() < 1e-12);
    let f = fit_power_law(&ps, &[2.0, 2.0, 2.0]).unwrap();
    assert!(f.exponent.abs() < 1e-12);
    assert!(fit_power_law(&ps, &[1.0, -1.0, 2.0]).is_err());
    assert!(fit_power_law(&ps[..2], &[1.0, 2.0]).is_err());
}

#[test]
fn critical_depth_examples() {
    let a = [(4, 0.001, 0.0), (5, 0.002, 0.0), (6, 0.03, 0.0), (7, 0.08, 0.0)];
    assert_eq!(detect_critical_depth(&a, DEFAULT_CRITICAL_THRESHOLD), Some(6));
    let low = [(4, 0.001, 0.0), (5, 0.002, 0.0)];
    assert_eq!(detect_critical_depth(&low, DEFAULT_CRITICAL_THRESHOLD), None);
    // above threshold but not two standard errors above zero
    let noisy = [(6, 0.03, 0.02), (7, 0.08, 0.01)];
    assert_eq!(detect_critical_depth(&noisy, DEFAULT_CRITICAL_THRESHOLD), Some(7));
}

#[test]
fn eta_fit_recovers_planted_prefactor() {
    let pts: Vec<(f64, f64, f64)> =
        [(0.02, 8), (0.04, 8), (0.02, 16), (0.08, 12)].iter().map(|&(p, t)| (p / t as f64, 21.3 * p / t as f64, 0.01)).collect();
    let f = fit_eta(&pts).unwrap();
    assert!((f.eta - 21.3).abs() < 1e-9 && f.eta_se < 1e-9);
    assert!(fit_eta(&[]).is_err());
}

proptest! {
    #[test]
    fn planted_lines_are_recovered(slope in -5.0f64..5.0, intercept in -5.0f64..5.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| slope * x + intercept + 0.05 * gaussian(&mut rng)).collect();
        let f = fit_linear(&xs, &ys, None).unwrap();
        prop_assert!(f.slope_se >= 0.0 && f.intercept_se >= 0.0);
        // 5σ keeps the false-failure rate negligible over many cases
        prop_assert!((f.slope - slope).abs() <= 5.0 * f.slope_se);
        prop_assert!((f.intercept - intercept).abs() <= 5.0 * f.intercept_se);
    }
}
