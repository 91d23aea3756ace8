//! Cross-checks between independent simulation routes. Used by the test
//! suites and by the `validate` command.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::TwoQubitClifford;
use crate::dense::DenseState;
use crate::diagnostics::{
    cmi, cmi_clipped, entropy_region, mutual_information, operator_entanglement, to_clipped_gauge,
    Tripartition,
};
use crate::error::Result;
use crate::geometry::CircuitGeometry;
use crate::sebd::{run_realization, run_trajectory, CircuitRealization, TrajectoryOptions};
use crate::tableau::{random_mixed_tableau, MixedTableau};

const MAX_MESSAGES: usize = 20;

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub n_failures: usize,
    /// First few failure descriptions.
    pub failures: Vec<String>,
    pub max_deviation: f64,
    /// Free-form summary values, e.g. a test statistic.
    pub notes: Vec<(String, f64)>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            n_failures: 0,
            failures: Vec::new(),
            max_deviation: 0.0,
            notes: Vec::new(),
        }
    }

    fn fail(&mut self, msg: String) {
        self.n_failures += 1;
        if self.failures.len() < MAX_MESSAGES {
            self.failures.push(msg);
        }
    }

    fn deviation(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        let d = (got - want).abs();
        if d.is_nan() || d > self.max_deviation {
            self.max_deviation = d;
        }
        if !(d <= tol) {
            self.fail(format!("case {}: {what}: got {got}, expected {want}", self.cases));
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            let m = msg();
            self.fail(format!("case {}: {m}", self.cases));
        }
    }

    pub fn passed(&self) -> bool {
        self.n_failures == 0 && self.cases > 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ({} cases, {} failures, max deviation {:.3e}",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.cases,
            self.n_failures,
            self.max_deviation
        )?;
        for (k, v) in &self.notes {
            write!(f, ", {k} {v:.4}")?;
        }
        write!(f, ")")?;
        for m in &self.failures {
            write!(f, "\n  {m}")?;
        }
        Ok(())
    }
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |mask| (0..n).filter(|&q| mask >> q & 1 == 1).collect())
}

fn dense_cmi(d: &DenseState, a: &[usize], c: &[usize], b: &[usize]) -> Result<f64> {
    let join = |xs: &[&[usize]]| -> Vec<usize> { xs.iter().flat_map(|x| x.iter().copied()).collect() };
    Ok(d.entropy(&join(&[a, c]))? + d.entropy(&join(&[c, b]))? - d.entropy(c)?
        - d.entropy(&join(&[a, c, b]))?)
}

/// Random sequences of gates, measurements, trace replacements and discards
/// applied to a tableau and to a dense density matrix side by side, sharing
/// measurement outcomes. States and all entropy diagnostics must agree.
pub fn dense_oracle_check(cases: usize, max_qubits: usize, seed: u64) -> CheckReport {
    let mut rep = CheckReport::new("tableau vs dense oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const TOL: f64 = 1e-9;
    for _ in 0..cases {
        rep.cases += 1;
        if let Err(e) = dense_oracle_case(&mut rep, &mut rng, max_qubits, TOL) {
            rep.fail(format!("case {}: error {e}", rep.cases));
        }
    }
    rep
}

fn dense_oracle_case(rep: &mut CheckReport, rng: &mut ChaCha8Rng, max_qubits: usize, tol: f64) -> Result<()> {
    let mut n = rng.gen_range(1..=max_qubits);
    let mut tab = MixedTableau::new(n);
    let mut dense = DenseState::from_tableau(&tab)?;
    let steps = rng.gen_range(5..40);
    for _ in 0..steps {
        let q = rng.gen_range(0..n);
        match rng.gen_range(0..10) {
            0..=4 if n >= 2 => {
                let b = (q + rng.gen_range(1..n)) % n;
                let g = TwoQubitClifford::random(rng);
                tab.apply_two_qubit(&g, q, b)?;
                dense.apply_two_qubit(&g, q, b)?;
            }
            5 | 6 => {
                let o = tab.measure_z(q, rng)?;
                let prob = dense.probability_z(q, o.bit())?;
                rep.deviation("outcome probability", prob, if o.is_random() { 0.5 } else { 1.0 }, tol);
                dense.postselect_z(q, o.bit())?;
            }
            9 if n >= 2 => {
                let o = tab.measure_z(q, rng)?;
                dense.postselect_z(q, o.bit())?;
                tab.discard_qubit(q)?;
                let keep: Vec<usize> = (0..n).filter(|&s| s != q).collect();
                dense = DenseState::from_matrix(n - 1, dense.partial_trace(&keep)?)?;
                n -= 1;
            }
            _ => {
                tab.trace_replace_mixed(q)?;
                dense.trace_replace_mixed(q)?;
            }
        }
        if let Err(e) = tab.validate() {
            rep.fail(format!("case {}: invalid tableau: {e}", rep.cases));
        }
        let d = DenseState::from_tableau(&tab)?.max_abs_diff(&dense);
        rep.deviation("density matrix", d, 0.0, tol);
    }

    for region in subsets(n) {
        rep.deviation("entropy", entropy_region(&tab, &region)? as f64, dense.entropy(&region)?, tol);
    }
    let cg = to_clipped_gauge(&tab);
    for cut in 0..=n {
        let want = dense.operator_entanglement(cut)?;
        rep.deviation("operator entanglement", operator_entanglement(&cg, cut) as f64, want, tol);
        let (a, b): (Vec<usize>, Vec<usize>) = ((0..cut).collect(), (cut..n).collect());
        rep.deviation("mutual information", mutual_information(&tab, &a, &b)? as f64, want, tol);
    }
    for _ in 0..4 {
        let mut parts: [Vec<usize>; 3] = Default::default();
        for s in 0..n {
            let k = rng.gen_range(0..4);
            if k < 3 {
                parts[k].push(s);
            }
        }
        let [a, c, b] = &parts;
        rep.deviation("cmi", cmi(&tab, a, c, b)? as f64, dense_cmi(&dense, a, c, b)?, tol);
        let mi = dense.entropy(a)? + dense.entropy(b)? - dense.entropy(&[a.clone(), b.clone()].concat())?;
        rep.deviation("mutual information", mutual_information(&tab, a, b)? as f64, mi, tol);
    }
    Ok(())
}

fn random_pure_tableau<R: Rng + ?Sized>(n: usize, rng: &mut R) -> MixedTableau {
    let mut t = MixedTableau::new(n);
    if n >= 2 {
        for _ in 0..3 * n {
            let a = rng.gen_range(0..n);
            let b = if rng.gen_bool(0.5) { (a + 1) % n } else { (a + rng.gen_range(1..n)) % n };
            t.apply_two_qubit(&TwoQubitClifford::random(rng), a, b).unwrap();
        }
    }
    t
}

fn same_group(a: &MixedTableau, b: &MixedTableau) -> Result<bool> {
    if a.n_generators() != b.n_generators() {
        return Ok(false);
    }
    for g in a.generators() {
        if b.group_sign(g)? != Some(g.is_negative()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Clipped-gauge invariants on random mixed states: group preservation,
/// endpoint counts, crossing counts against rank-formula entropies, and
/// idempotence.
pub fn clipped_gauge_check(cases: usize, max_qubits: usize, seed: u64) -> CheckReport {
    let mut rep = CheckReport::new("clipped gauge invariants");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        rep.cases += 1;
        if let Err(e) = clipped_case(&mut rep, &mut rng, max_qubits) {
            rep.fail(format!("case {}: error {e}", rep.cases));
        }
    }
    rep
}

fn clipped_case(rep: &mut CheckReport, rng: &mut ChaCha8Rng, max_qubits: usize) -> Result<()> {
    let n = rng.gen_range(1..=max_qubits);
    let pure = rng.gen_bool(0.25);
    let t = if pure { random_pure_tableau(n, rng) } else { random_mixed_tableau(n, rng) };
    let cg = to_clipped_gauge(&t);
    let gauged = cg.to_tableau();
    rep.check(same_group(&t, &gauged)? && same_group(&gauged, &t)?, || "gauge changed the group".into());

    let mut lefts = vec![Vec::new(); n];
    let mut rights = vec![Vec::new(); n];
    for (i, &(l, r)) in cg.endpoints().iter().enumerate() {
        lefts[l].push(i);
        rights[r].push(i);
    }
    for (s, group) in lefts.iter().chain(rights.iter()).enumerate() {
        let s = s % n;
        rep.check(group.len() <= 2, || format!("{} endpoints at site {s}", group.len()));
        if group.len() == 2 {
            let (a, b) = (cg.generators()[group[0]].local(s), cg.generators()[group[1]].local(s));
            rep.check(a != b, || format!("dependent local actions at site {s}"));
        }
    }

    for cut in 0..=n {
        let a: Vec<usize> = (0..cut).collect();
        let b: Vec<usize> = (cut..n).collect();
        let count = operator_entanglement(&cg, cut);
        let mi = mutual_information(&t, &a, &b)?;
        rep.check(count == mi, || format!("cut {cut}: crossing count {count} vs mutual information {mi}"));
        if pure {
            let s = entropy_region(&t, &a)?;
            rep.check(count == 2 * s, || format!("cut {cut}: pure-state count {count} vs 2·S {s}"));
        }
    }
    for _ in 0..8 {
        let n_a = rng.gen_range(0..=n);
        let n_c = rng.gen_range(0..=n - n_a);
        let part = Tripartition::new(n, n_a, n_c)?;
        let (a, c, b): (Vec<usize>, Vec<usize>, Vec<usize>) =
            (part.a().collect(), part.c().collect(), part.b().collect());
        let counted = cmi_clipped(&cg, &part)?;
        let formula = cmi(&t, &a, &c, &b)?;
        rep.check(counted == formula, || {
            format!("tripartition {n_a}|{n_c}: clipped count {counted} vs entropy formula {formula}")
        });
    }

    let mut first: Vec<_> = cg.endpoints().to_vec();
    let mut again: Vec<_> = to_clipped_gauge(&gauged).endpoints().to_vec();
    first.sort_unstable();
    again.sort_unstable();
    rep.check(first == again, || "gauge is not idempotent on endpoints".into());
    Ok(())
}

/// The whole `L × W` lattice after all layers and noise, sites numbered
/// `col · L + row`. No light-cone bookkeeping is involved.
pub fn full_lattice_state(real: &CircuitRealization) -> Result<MixedTableau> {
    let geom = real.geometry();
    let l = geom.l();
    let mut tab = MixedTableau::new(geom.n_qubits());
    for k in 0..geom.t() {
        for e in geom.layer(k) {
            let ((ra, ca), (rb, cb)) = e.sites();
            tab.apply_two_qubit(real.gate(k, e), ca * l + ra, cb * l + rb)?;
        }
        for col in 0..geom.w() {
            for row in 0..l {
                if real.noise_fires(row, col, k) {
                    tab.trace_replace_mixed(col * l + row)?;
                }
            }
        }
    }
    Ok(tab)
}

/// `−log₂ P(columns)` under single-site Z postselection of the full lattice
/// in column-major order, or `None` for a zero-probability outcome.
pub fn full_lattice_inverse_log2_probability(full: &MixedTableau, columns: &[Vec<bool>]) -> Result<Option<usize>> {
    let mut state = full.clone();
    let mut k = 0;
    let l = columns.first().map_or(0, Vec::len);
    for (c, col) in columns.iter().enumerate() {
        for (r, &b) in col.iter().enumerate() {
            let p = state.postselect_z(c * l + r, b)?;
            if p == 0.0 {
                return Ok(None);
            }
            if p == 0.5 {
                k += 1;
            }
        }
    }
    Ok(Some(k))
}

/// Exact probabilities of every outcome on the first `n_cols` columns.
fn full_lattice_marginal(full: &MixedTableau, l: usize, n_cols: usize) -> Result<BTreeMap<u64, f64>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![(full.clone(), 0usize, 0u64, 1.0f64)];
    while let Some((state, depth, key, prob)) = stack.pop() {
        if depth == l * n_cols {
            out.insert(key, prob);
            continue;
        }
        for b in [false, true] {
            let mut s = state.clone();
            let p = s.postselect_z(depth, b)?;
            if p > 0.0 {
                stack.push((s, depth + 1, key << 1 | u64::from(b), prob * p));
            }
        }
    }
    Ok(out)
}

/// 99th percentile of χ² with `df` degrees of freedom (Wilson–Hilferty).
pub fn chi_square_critical_99(df: usize) -> f64 {
    let k = df as f64;
    let z = 2.326_347_874;
    let a = 2.0 / (9.0 * k);
    k * (1.0 - a + z * a.sqrt()).powi(3)
}

/// Each light-cone sample is checked against the full lattice: the sampled
/// string must have nonzero full-lattice probability equal to the product
/// of the sampler's coin probabilities. Each sample uses a fresh circuit.
pub fn sebd_exact_check(geom: &CircuitGeometry, p: f64, samples: usize, seed: u64) -> CheckReport {
    let mut rep = CheckReport::new(&format!(
        "light-cone vs full-lattice probabilities ({}x{}, T={}, p={p})",
        geom.l(),
        geom.w(),
        geom.t()
    ));
    for i in 0..samples {
        rep.cases += 1;
        let run = || -> Result<(usize, Option<usize>)> {
            let s = seed.wrapping_add(i as u64);
            let rec = run_trajectory(geom, p, s)?;
            let real = CircuitRealization::new(geom.clone(), p, s)?;
            let full = full_lattice_state(&real)?;
            let cols: Vec<Vec<bool>> = (1..=geom.w()).map(|c| rec.column_bits(c)).collect::<Result<_>>()?;
            Ok((rec.coin_flips, full_lattice_inverse_log2_probability(&full, &cols)?))
        };
        match run() {
            Ok((k, Some(full_k))) => rep.deviation("-log2 probability", k as f64, full_k as f64, 0.0),
            Ok((_, None)) => rep.fail(format!("case {}: sampled a zero-probability string", rep.cases)),
            Err(e) => rep.fail(format!("case {}: error {e}", rep.cases)),
        }
    }
    rep
}

/// Many samples from one fixed circuit: every sample passes the exact
/// probability check, and the joint distribution of the first `n_cols`
/// columns passes a χ² test at the 1% level against exact full-lattice
/// marginals (bins with expected count below 5 pooled).
pub fn sebd_distribution_check(
    geom: &CircuitGeometry,
    p: f64,
    circuit_seed: u64,
    samples: usize,
    n_cols: usize,
    seed: u64,
) -> CheckReport {
    let mut rep = CheckReport::new(&format!(
        "light-cone sampling distribution ({}x{}, T={}, p={p}, {samples} samples)",
        geom.l(),
        geom.w(),
        geom.t()
    ));
    if let Err(e) = distribution_inner(&mut rep, geom, p, circuit_seed, samples, n_cols, seed) {
        rep.fail(format!("error {e}"));
    }
    rep
}

fn distribution_inner(
    rep: &mut CheckReport,
    geom: &CircuitGeometry,
    p: f64,
    circuit_seed: u64,
    samples: usize,
    n_cols: usize,
    seed: u64,
) -> Result<()> {
    let l = geom.l();
    let real = CircuitRealization::new(geom.clone(), p, circuit_seed)?;
    let full = full_lattice_state(&real)?;
    let exact = full_lattice_marginal(&full, l, n_cols)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    let opts = TrajectoryOptions::default();
    for _ in 0..samples {
        rep.cases += 1;
        let rec = run_realization(&real, &mut rng, &opts)?;
        let cols: Vec<Vec<bool>> = (1..=geom.w()).map(|c| rec.column_bits(c)).collect::<Result<_>>()?;
        match full_lattice_inverse_log2_probability(&full, &cols)? {
            Some(k) => rep.deviation("-log2 probability", rec.coin_flips as f64, k as f64, 0.0),
            None => rep.fail(format!("case {}: sampled a zero-probability string", rep.cases)),
        }
        let key = cols[..n_cols].iter().flatten().fold(0u64, |k, &b| k << 1 | u64::from(b));
        *counts.entry(key).or_default() += 1;
    }
    for key in counts.keys() {
        if !exact.contains_key(key) {
            rep.fail(format!("pattern {key:b} sampled but impossible"));
        }
    }
    let n = samples as f64;
    let (mut chi2, mut bins) = (0.0, 0usize);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (key, &prob) in &exact {
        let e = prob * n;
        let o = *counts.get(key).unwrap_or(&0) as f64;
        if e < 5.0 {
            pooled_obs += o;
            pooled_exp += e;
        } else {
            chi2 += (o - e).powi(2) / e;
            bins += 1;
        }
    }
    if pooled_exp > 0.0 {
        chi2 += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        bins += 1;
    }
    let df = bins.saturating_sub(1).max(1);
    let critical = chi_square_critical_99(df);
    rep.notes.push(("chi2".into(), chi2));
    rep.notes.push(("df".into(), df as f64));
    rep.notes.push(("critical".into(), critical));
    if bins > 1 && chi2 > critical {
        rep.fail(format!("chi2 {chi2:.2} exceeds 1% critical value {critical:.2} at {df} dof"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_critical_values() {
        // tabulated 99th percentiles
        for (df, want) in [(5, 15.086), (10, 23.209), (30, 50.892), (100, 135.807)] {
            assert!((chi_square_critical_99(df) - want).abs() / want < 0.01);
        }
    }

    #[test]
    fn small_checks_pass() {
        assert!(dense_oracle_check(20, 4, 1).passed());
        assert!(clipped_gauge_check(20, 20, 2).passed());
        let geom = CircuitGeometry::new(3, 3, 4).unwrap();
        let r = sebd_exact_check(&geom, 0.1, 10, 3);
        assert!(r.passed(), "{r}");
    }
}
