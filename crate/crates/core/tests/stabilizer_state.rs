use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sebd_core::clifford::{symplectic_group, TWO_QUBIT_CLIFFORD_COUNT};
use sebd_core::dense::DenseState;
use sebd_core::tableau::random_mixed_tableau;
use sebd_core::validation::dense_oracle_check;
use sebd_core::{MixedTableau, Outcome, PauliString, TwoQubitClifford};

fn tab(n: usize, g: &[&str]) -> MixedTableau {
    MixedTableau::from_generators(n, g.iter().map(|s| s.parse().unwrap()).collect()).unwrap()
}

#[test]
fn clifford_group_size() {
    assert_eq!(symplectic_group().len(), 720);
    assert_eq!(TWO_QUBIT_CLIFFORD_COUNT, 11520);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let g = TwoQubitClifford::random(&mut rng);
        assert!(TwoQubitClifford::from_images(g.images().clone()).is_ok());
    }
}

#[test]
fn random_gate_matches_dense_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let g = TwoQubitClifford::random(&mut rng);
        let mut t = random_mixed_tableau(2, &mut rng);
        let mut d = DenseState::from_tableau(&t).unwrap();
        t.apply_two_qubit(&g, 0, 1).unwrap();
        d.apply_two_qubit(&g, 0, 1).unwrap();
        assert!(DenseState::from_tableau(&t).unwrap().max_abs_diff(&d) < 1e-9);
    }
}

#[test]
fn bell_measurement_against_dense() {
    let bell = tab(2, &["+XX", "+ZZ"]);
    let d = DenseState::from_tableau(&bell).unwrap();
    assert!((d.probability_z(0, false).unwrap() - 0.5).abs() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shots = 10_000;
    let mut ones = 0;
    for _ in 0..shots {
        let mut t = bell.clone();
        let o = t.measure_z(0, &mut rng).unwrap();
        ones += usize::from(o.bit());
        let sign = if o.bit() { "-" } else { "+" };
        let want = tab(2, &[&format!("{sign}ZI"), &format!("{sign}IZ")]);
        for g in want.generators() {
            assert_eq!(t.group_sign(g).unwrap(), Some(g.is_negative()));
        }
        let mut dd = d.clone();
        dd.postselect_z(0, o.bit()).unwrap();
        assert!(DenseState::from_tableau(&t).unwrap().max_abs_diff(&dd) < 1e-9);
    }
    let sigma = (shots as f64 * 0.25).sqrt();
    assert!((ones as f64 - shots as f64 / 2.0).abs() < 3.0 * sigma);
}

#[test]
fn ghz_trace_matches_group_enumeration() {
    let ghz = tab(3, &["+XXX", "+ZZI", "+IZZ"]);
    // every group element, kept when trivial on site 1
    let gens = ghz.generators();
    let mut survivors = Vec::new();
    for mask in 1u32..8 {
        let mut acc = PauliString::identity(3);
        for (i, g) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = acc.multiply(g).unwrap();
            }
        }
        if !acc.x_bit(1) && !acc.z_bit(1) {
            survivors.push(acc.to_string());
        }
    }
    assert_eq!(survivors, ["+ZIZ"]);
    let mut t = ghz;
    t.trace_replace_mixed(1).unwrap();
    assert_eq!(t.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>(), survivors);
}

#[test]
fn measure_and_discard_everything_against_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let mut t = random_mixed_tableau(4, &mut rng);
        let mut d = DenseState::from_tableau(&t).unwrap();
        while t.n_qubits() > 0 {
            let n = t.n_qubits();
            let q = rng.gen_range(0..n);
            let o = t.measure_z(q, &mut rng).unwrap();
            let p = d.probability_z(q, o.bit()).unwrap();
            let want = if o.is_random() { 0.5 } else { 1.0 };
            assert!((p - want).abs() < 1e-9);
            d.postselect_z(q, o.bit()).unwrap();
            t.discard_qubit(q).unwrap();
            let keep: Vec<usize> = (0..n).filter(|&s| s != q).collect();
            d = DenseState::from_matrix(n - 1, d.partial_trace(&keep).unwrap()).unwrap();
            assert!(DenseState::from_tableau(&t).unwrap().max_abs_diff(&d) < 1e-9);
        }
        assert_eq!(t.n_generators(), 0);
    }
}

#[test]
fn operation_sequences_match_dense_oracle() {
    let report = dense_oracle_check(150, 5, 99);
    assert!(report.passed(), "{report}");
}

#[test]
fn block_measurement_matches_sequential_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..300 {
        let n = rng.gen_range(2..=6);
        let t = random_mixed_tableau(n, &mut rng);
        let lo = rng.gen_range(0..n);
        let hi = rng.gen_range(lo + 1..=n);
        let mut joint = t.clone();
        let r = joint.measure_block_and_remove(lo, hi, &mut rng).unwrap();
        let mut d = DenseState::from_tableau(&t).unwrap();
        let mut prob = 1.0;
        for (k, &b) in r.bits.iter().enumerate() {
            prob *= d.postselect_z(lo + k, b).unwrap();
        }
        assert!((prob - 0.5f64.powi(r.n_random as i32)).abs() < 1e-9);
        let keep: Vec<usize> = (0..lo).chain(hi..n).collect();
        let reduced = if keep.is_empty() {
            None
        } else {
            Some(DenseState::from_matrix(keep.len(), d.partial_trace(&keep).unwrap()).unwrap())
        };
        if let Some(reduced) = reduced {
            assert!(DenseState::from_tableau(&joint).unwrap().max_abs_diff(&reduced) < 1e-9);
        }
    }
}

#[test]
fn generators_stay_hermitian_after_operations() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let mut t = random_mixed_tableau(20, &mut rng);
        for _ in 0..40 {
            let a = rng.gen_range(0..20);
            let b = (a + rng.gen_range(1..20)) % 20;
            t.apply_two_qubit(&TwoQubitClifford::random(&mut rng), a, b).unwrap();
            t.noise_event(rng.gen_range(0..20), 0.1, &mut rng).unwrap();
            t.measure_z(rng.gen_range(0..20), &mut rng).unwrap();
        }
        assert!(t.generators().iter().all(|g| g.is_hermitian()));
        t.validate().unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn repeated_measurement_is_repeatable(seed in any::<u64>(), n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = random_mixed_tableau(n, &mut rng);
        let q = rng.gen_range(0..n);
        let first = t.measure_z(q, &mut rng).unwrap();
        let second = t.measure_z(q, &mut rng).unwrap();
        prop_assert_eq!(second, Outcome::Determined(first.bit()));
        t.validate().unwrap();
    }

    #[test]
    fn trace_replace_is_idempotent(seed in any::<u64>(), n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = random_mixed_tableau(n, &mut rng);
        let q = rng.gen_range(0..n);
        t.trace_replace_mixed(q).unwrap();
        let once = t.clone();
        t.trace_replace_mixed(q).unwrap();
        prop_assert_eq!(&t, &once);
        prop_assert!(t.generators().iter().all(|g| !g.x_bit(q) && !g.z_bit(q)));
        t.validate().unwrap();
    }

    #[test]
    fn snapshot_roundtrip(seed in any::<u64>(), n in 0usize..80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_mixed_tableau(n, &mut rng);
        let text = t.to_string();
        let back: MixedTableau = text.parse().unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(back, t);
    }

    #[test]
    fn appended_qubits_keep_purity(seed in any::<u64>(), n in 1usize..20, k in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = MixedTableau::new(n);
        for _ in 0..3 * n {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                t.apply_two_qubit(&TwoQubitClifford::random(&mut rng), a, b).unwrap();
            }
        }
        t.append_qubits_zero(k);
        prop_assert!(t.is_pure());
        t.validate().unwrap();
    }
}
