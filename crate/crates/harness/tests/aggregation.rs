use std::collections::HashSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sebd_core::sebd::{run_trajectory, run_trajectory_with_options};
use sebd_core::{CircuitGeometry, TrajectoryOptions, TrajectoryRecord};
use sebd_harness::aggregate::mean_se;
use sebd_harness::histogram::{per_site, Histogram};
use sebd_harness::seeds::realization_seed;
use sebd_harness::{aggregate_histograms, cmi_profile, GridPoint, PointAggregate};

fn record_with_lengths(lengths: &[usize]) -> TrajectoryRecord {
    let geom = CircuitGeometry::new(2, 2, 1).unwrap();
    let mut r = run_trajectory(&geom, 0.0, 0).unwrap();
    r.gen_stats = lengths.iter().map(|&l| (1.0 + l as f64 / 2.0, l)).collect();
    r
}

#[test]
fn length_distribution_examples() {
    let (_, d) = aggregate_histograms(&[record_with_lengths(&[1, 1, 3])]).unwrap();
    assert_eq!(d.total(), 3);
    assert!((d.mass(1) - 2.0 / 3.0).abs() < 1e-12);
    assert!((d.mass(3) - 1.0 / 3.0).abs() < 1e-12);
    let (c, d) = aggregate_histograms(&[record_with_lengths(&[4])]).unwrap();
    assert_eq!(d.mass(4), 1.0);
    assert_eq!(c.masses().map(|m| m.1).sum::<f64>(), 1.0);
}

#[test]
fn half_integer_centers_merge_to_the_left_site() {
    // centers 3, 3.5 and 4 → sites 3, 3, 4
    let h = Histogram::from_counts([(6, 1), (7, 1), (8, 1)]);
    let s = per_site(&h);
    assert_eq!(s.count(3), 2);
    assert_eq!(s.count(4), 1);
}

#[test]
fn mixed_parameters_are_rejected() {
    let a = run_trajectory(&CircuitGeometry::new(4, 4, 2).unwrap(), 0.0, 1).unwrap();
    let b = run_trajectory(&CircuitGeometry::new(4, 4, 2).unwrap(), 0.1, 1).unwrap();
    assert!(aggregate_histograms(&[a.clone(), b]).is_err());
    let point = GridPoint::new(4, 5, 2, 0.0);
    assert!(PointAggregate::from_records(point, &[a], 0).is_err());
}

#[test]
fn single_realization_aggregate_equals_its_record() {
    let geom = CircuitGeometry::new(6, 10, 6).unwrap();
    let opts = TrajectoryOptions { cmi_buffers: vec![0, 2], ..Default::default() };
    let rec = run_trajectory_with_options(&geom, 0.05, 3, &opts).unwrap();
    let agg = PointAggregate::from_records(GridPoint::new(6, 10, 6, 0.05), &[rec.clone()], 0).unwrap();
    assert_eq!(agg.n_realizations, 1);
    assert_eq!(agg.curve_mean, rec.s_op_curve.iter().map(|&s| s as f64).collect::<Vec<_>>());
    assert!(agg.curve_se.iter().all(|&s| s == 0.0));
    assert_eq!(agg.peak_mean, rec.s_op_peak as f64);
    assert_eq!(agg.t_peak_mean, rec.t_peak as f64);
    assert_eq!(agg.m_over_n_mean, rec.m_over_n_at_peak);
    assert_eq!(agg.lengths.total() as usize, rec.gen_stats.len());
    assert_eq!(agg.cmi.iter().map(|c| (c.d_c, c.mean as usize)).collect::<Vec<_>>(), rec.cmi_at_peak);
}

#[test]
fn cmi_profile_from_peak_states() {
    let geom = CircuitGeometry::new(8, 12, 8).unwrap();
    let opts = TrajectoryOptions { cmi_buffers: vec![0, 1, 2, 3], keep_peak_state: true, ..Default::default() };
    let recs: Vec<TrajectoryRecord> = (0..10).map(|s| run_trajectory_with_options(&geom, 0.02, s, &opts).unwrap()).collect();
    let prof = cmi_profile(&recs, &[0, 1, 2, 3]).unwrap();
    let mean_peak = recs.iter().map(|r| r.s_op_peak as f64).sum::<f64>() / 10.0;
    assert!((prof[0].1 - mean_peak).abs() < 1e-12);
    for (k, &(d, v)) in prof.iter().enumerate() {
        let from_records = recs.iter().map(|r| r.cmi_at_peak[k].1 as f64).sum::<f64>() / 10.0;
        assert_eq!(d, k);
        assert!((v - from_records).abs() < 1e-12);
    }
    assert!(cmi_profile(&recs, &[9]).is_err());
    let bare = run_trajectory(&geom, 0.02, 1).unwrap();
    assert!(cmi_profile(&[bare], &[0]).is_err());

    // no gates: product states carry no CMI
    let flat = CircuitGeometry::new(8, 6, 0).unwrap();
    let recs: Vec<TrajectoryRecord> = (0..3).map(|s| run_trajectory_with_options(&flat, 0.0, s, &opts).unwrap()).collect();
    assert!(cmi_profile(&recs, &[0, 1, 2]).unwrap().iter().all(|&(_, v)| v == 0.0));
}

#[test]
fn mean_and_standard_error() {
    let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(m, 2.5);
    assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-12);
    assert_eq!(mean_se(&[7.0]), (7.0, 0.0));
}

#[test]
fn seeds_do_not_collide() {
    let points: Vec<GridPoint> = [16, 24, 32, 40]
        .iter()
        .flat_map(|&l| [4, 6, 8, 12, 16].map(move |t| GridPoint::new(l, 40, t, 0.0)))
        .chain([0.005, 0.01, 0.02, 0.04, 0.08].map(|p| GridPoint::new(80, 40, 8, p)))
        .collect();
    let mut seen = HashSet::new();
    let per_point = 1_000_000 / points.len() as u64 + 1;
    for pt in &points {
        for i in 0..per_point {
            assert!(seen.insert(realization_seed(7, pt, i)));
        }
    }
    assert!(seen.len() >= 1_000_000);
    assert_ne!(realization_seed(7, &points[0], 0), realization_seed(8, &points[0], 0));
}

fn sample_records(n: u64) -> Vec<TrajectoryRecord> {
    let geom = CircuitGeometry::new(6, 8, 6).unwrap();
    let opts = TrajectoryOptions { cmi_buffers: vec![0, 1, 2], ..Default::default() };
    (0..n).map(|s| run_trajectory_with_options(&geom, 0.05, s, &opts).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn aggregation_ignores_record_order(shuffle_seed in any::<u64>()) {
        let recs = sample_records(12);
        let mut shuffled = recs.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        let pt = GridPoint::new(6, 8, 6, 0.05);
        let a = PointAggregate::from_records(pt, &recs, 0).unwrap();
        let b = PointAggregate::from_records(pt, &shuffled, 0).unwrap();
        prop_assert_eq!(a, b);
        let (c1, d1) = aggregate_histograms(&recs).unwrap();
        let (c2, d2) = aggregate_histograms(&shuffled).unwrap();
        prop_assert_eq!(c1, c2);
        prop_assert_eq!(d1, d2);
    }

    #[test]
    fn histogram_merge_is_commutative(a in prop::collection::vec((0i64..50, 1u64..20), 0..30), b in prop::collection::vec((0i64..50, 1u64..20), 0..30)) {
        let (ha, hb) = (Histogram::from_counts(a), Histogram::from_counts(b));
        let mut ab = ha.clone();
        ab.merge(&hb);
        let mut ba = hb.clone();
        ba.merge(&ha);
        prop_assert_eq!(&ab, &ba);
        prop_assert_eq!(ab.total(), ha.total() + hb.total());
        if !ab.is_empty() {
            prop_assert!((ab.masses().map(|m| m.1).sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
