//! Column-by-column sampling of a noisy brickwork Clifford circuit.
//!
//! Only the part of the circuit inside the past light cone of the unsampled
//! columns is simulated. For every level `k` (after layer `k`) the strip
//! tracks how many leading columns have been brought to that level; sampling
//! column `t` raises these counts to [`CircuitGeometry::covered_columns`]`(t)`,
//! adding the missing qubits, gates and noise events in layer order.
//!
//! A noise coin for `(qubit, layer)` is consulted exactly once, when that
//! pair first enters the simulated region. Deferring it until then is exact:
//! the marginal of the columns sampled so far depends only on events inside
//! their past light cone, and an event outside it acts on a qubit that is
//! traced out of every such marginal.
//!
//! Gate choices and noise coins are pure functions of the realization seed
//! and the event label, so the same circuit can be replayed by any other
//! simulation route.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{TwoQubitClifford, TWO_QUBIT_CLIFFORD_COUNT};
use crate::diagnostics::{
    cmi_clipped, generator_stats, operator_entanglement, to_clipped_gauge, ClippedGenerators,
    Tripartition,
};
use crate::error::{Error, Result};
use crate::geometry::{CircuitGeometry, Edge};
use crate::tableau::MixedTableau;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a word sequence.
pub fn hash_words(words: &[u64]) -> u64 {
    words.iter().fold(0x6A09_E667_F3BC_C908, |h, &w| mix64(h ^ mix64(w)))
}

/// A fixed circuit: gate choices and noise coins for every event.
#[derive(Clone, Debug)]
pub struct CircuitRealization {
    geom: CircuitGeometry,
    p: f64,
    seed: u64,
    gate_seed: u64,
    noise_seed: u64,
    measure_seed: u64,
}

impl CircuitRealization {
    pub fn new(geom: CircuitGeometry, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("noise probability {p} outside [0, 1]")));
        }
        Ok(Self {
            geom,
            p,
            seed,
            gate_seed: hash_words(&[seed, 1]),
            noise_seed: hash_words(&[seed, 2]),
            measure_seed: hash_words(&[seed, 3]),
        })
    }

    pub fn geometry(&self) -> &CircuitGeometry {
        &self.geom
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Index in `0..11520` of the gate on `edge` in 0-based layer `layer`.
    pub fn gate_index(&self, layer: usize, edge: Edge) -> usize {
        let h = hash_words(&[self.gate_seed, layer as u64, edge.id(self.geom.w())]);
        ((h as u128 * TWO_QUBIT_CLIFFORD_COUNT as u128) >> 64) as usize
    }

    pub fn gate(&self, layer: usize, edge: Edge) -> &'static TwoQubitClifford {
        TwoQubitClifford::cached(self.gate_index(layer, edge))
    }

    /// Whether qubit `(row, col)` is replaced by the maximally mixed state
    /// right after 0-based layer `layer`.
    pub fn noise_fires(&self, row: usize, col: usize, layer: usize) -> bool {
        if self.p <= 0.0 {
            return false;
        }
        if self.p >= 1.0 {
            return true;
        }
        let q = (row * self.geom.w() + col) as u64;
        let h = hash_words(&[self.noise_seed, q, layer as u64]);
        ((h >> 11) as f64) * (1.0 / (1u64 << 53) as f64) < self.p
    }

    /// Stream for measurement coins.
    pub fn measurement_rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.measure_seed)
    }
}

/// Events applied by a strip, in application order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventLog {
    /// `(layer, edge)`.
    pub gates: Vec<(usize, Edge)>,
    /// `(row, col, layer, fired)` for every noise coin consulted.
    pub noise: Vec<(usize, usize, usize, bool)>,
}

/// Boundary state on the unsampled columns of the light cone.
///
/// Internally sites are column-major, `(col − first) · L + row`, so new
/// columns are appended at the end and the sampled column is the leading
/// block. [`BoundaryStrip::row_major_tableau`] gives the row-major labeling
/// `row · W_b + (col − first)` used for all diagnostics.
#[derive(Clone, Debug)]
pub struct BoundaryStrip {
    l: usize,
    first_col: usize,
    covered: Vec<usize>,
    tableau: MixedTableau,
    events: Option<EventLog>,
}

/// Result of sampling one column.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub bits: Vec<bool>,
    /// Operator entanglement across the half-length cut before measurement.
    pub s_op: usize,
    /// Fair coins consumed by the column readout.
    pub n_random: usize,
}

impl BoundaryStrip {
    pub fn new(geom: &CircuitGeometry) -> Self {
        Self {
            l: geom.l(),
            first_col: 0,
            covered: vec![0; geom.t() + 1],
            tableau: MixedTableau::new(0),
            events: None,
        }
    }

    /// Keep a log of every gate and noise coin.
    pub fn with_event_log(mut self) -> Self {
        self.events = Some(EventLog::default());
        self
    }

    pub fn events(&self) -> Option<&EventLog> {
        self.events.as_ref()
    }

    /// Next column to sample, 0-based.
    pub fn first_col(&self) -> usize {
        self.first_col
    }

    /// Number of strip columns `W_b`.
    pub fn width(&self) -> usize {
        self.covered[0] - self.first_col
    }

    pub fn tableau(&self) -> &MixedTableau {
        &self.tableau
    }

    fn site(&self, row: usize, col: usize) -> usize {
        (col - self.first_col) * self.l + row
    }

    /// Bring the strip to the full light cone of column `t`: add qubits in
    /// `|0⟩`, then for each layer apply its new gates and fire the noise
    /// coins of newly covered qubits after it.
    pub fn prepare_column(&mut self, real: &CircuitRealization, t: usize) -> Result<()> {
        let geom = real.geometry();
        if t != self.first_col || t >= geom.w() {
            return Err(Error::Contract(format!(
                "column {t} requested, next unsampled column is {}",
                self.first_col
            )));
        }
        let target = geom.covered_columns(t);
        let old = std::mem::replace(&mut self.covered, target.clone());
        self.tableau.append_qubits_zero(self.l * (target[0] - old[0]));
        for k in 0..geom.t() {
            for e in geom.layer_edges_ending_in(k, old[k]..target[k]) {
                let ((ra, ca), (rb, cb)) = e.sites();
                let (a, b) = (self.site(ra, ca), self.site(rb, cb));
                self.tableau.apply_two_qubit(real.gate(k, e), a, b)?;
                if let Some(log) = &mut self.events {
                    log.gates.push((k, e));
                }
            }
            for col in old[k + 1]..target[k + 1] {
                for row in 0..self.l {
                    let fired = real.noise_fires(row, col, k);
                    if fired {
                        self.tableau.trace_replace_mixed(self.site(row, col))?;
                    }
                    if let Some(log) = &mut self.events {
                        log.noise.push((row, col, k, fired));
                    }
                }
            }
        }
        Ok(())
    }

    /// The state relabeled row-major.
    pub fn row_major_tableau(&self) -> MixedTableau {
        let wb = self.width();
        let perm: Vec<usize> =
            (0..self.tableau.n_qubits()).map(|i| (i % self.l) * wb + i / self.l).collect();
        self.tableau.permuted(&perm).expect("row-major relabeling is a permutation")
    }

    /// Site count before the half-length cut in the row-major labeling.
    pub fn half_cut(&self) -> usize {
        (self.l / 2) * self.width()
    }

    /// Measure the leading column in the Z basis and drop it.
    pub fn measure_column<R: rand::Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(Vec<bool>, usize)> {
        let r = self.tableau.measure_block_and_remove(0, self.l, rng)?;
        self.first_col += 1;
        Ok((r.bits, r.n_random))
    }
}

/// Sample column `t` of `real` from `strip`.
pub fn sebd_step<R: rand::Rng + ?Sized>(
    strip: &mut BoundaryStrip,
    real: &CircuitRealization,
    rng: &mut R,
    t: usize,
) -> Result<StepOutcome> {
    strip.prepare_column(real, t)?;
    let cg = to_clipped_gauge(&strip.row_major_tableau());
    let s_op = operator_entanglement(&cg, strip.half_cut());
    let (bits, n_random) = strip.measure_column(rng)?;
    Ok(StepOutcome { bits, s_op, n_random })
}

/// Abort rule: stop once `S_op` exceeds `λT/(ηp)` bits, the base-2 exponent
/// of the bond-dimension cutoff.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffPolicy {
    pub lambda: f64,
    pub eta: f64,
    pub epsilon: f64,
}

impl CutoffPolicy {
    pub fn new(lambda: f64, eta: f64, epsilon: f64) -> Result<Self> {
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::Domain(format!("lambda must be non-negative, got {lambda}")));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Domain(format!("eta must be positive, got {eta}")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(Self { lambda, eta, epsilon })
    }

    /// `λT/(ηp)`; infinite for `p = 0`.
    pub fn threshold_bits(&self, t: usize, p: f64) -> f64 {
        if p <= 0.0 || self.lambda.is_infinite() {
            return f64::INFINITY;
        }
        self.lambda * t as f64 / (self.eta * p)
    }
}

#[derive(Clone, Debug, Default)]
pub struct TrajectoryOptions {
    /// Buffer sizes `d_C`, in rows, for CMI at the peak.
    pub cmi_buffers: Vec<usize>,
    pub cutoff: Option<CutoffPolicy>,
    /// Keep the row-major peak state in the record.
    pub keep_peak_state: bool,
}

/// One sampled trajectory. Columns and centers are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "W")]
    pub w: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub p: f64,
    pub s_op_curve: Vec<usize>,
    pub s_op_peak: usize,
    pub t_peak: usize,
    /// One hex string per sampled column.
    pub bits: Vec<String>,
    /// `(com, len)` of the clipped generators at the peak.
    pub gen_stats: Vec<(f64, usize)>,
    pub m_over_n_at_peak: f64,
    pub w_b_at_peak: usize,
    /// `(d_C, I(A:B|C))` at the peak.
    pub cmi_at_peak: Vec<(usize, usize)>,
    /// Base-2 log of the inverse probability of the sampled bitstring.
    pub coin_flips: usize,
    pub aborted: bool,
    pub abort_column: Option<usize>,
    #[serde(skip)]
    pub peak_state: Option<MixedTableau>,
}

impl TrajectoryRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Decoded outcome of 1-based column `col`.
    pub fn column_bits(&self, col: usize) -> Result<Vec<bool>> {
        let s = self
            .bits
            .get(col.wrapping_sub(1))
            .ok_or(Error::IndexOutOfRange { site: col, n: self.bits.len() })?;
        hex_unpack(s, self.l)
    }
}

/// Bits as hex, first bit most significant, zero-padded to a multiple of 4.
pub fn hex_pack(bits: &[bool]) -> String {
    bits.chunks(4)
        .map(|c| {
            let v = c.iter().enumerate().fold(0u32, |v, (i, &b)| v | (u32::from(b) << (3 - i)));
            char::from_digit(v, 16).unwrap()
        })
        .collect()
}

pub fn hex_unpack(s: &str, len: usize) -> Result<Vec<bool>> {
    if s.len() != len.div_ceil(4) {
        return Err(Error::Parse(format!("hex string {s:?} does not hold {len} bits")));
    }
    let mut out = Vec::with_capacity(s.len() * 4);
    for ch in s.chars() {
        let v = ch.to_digit(16).ok_or_else(|| Error::Parse(format!("bad hex digit {ch:?}")))?;
        out.extend((0..4).map(|i| (v >> (3 - i)) & 1 == 1));
    }
    out.truncate(len);
    Ok(out)
}

/// Row-major `L × W_b` strip split into rows above a centered buffer of `d`
/// rows (A), the buffer (C) and the rows below (B).
pub fn centered_buffer(l: usize, w_b: usize, d: usize) -> Result<Tripartition> {
    if d > l {
        return Err(Error::Contract(format!("buffer of {d} rows exceeds L = {l}")));
    }
    let start_row = (l / 2 - d / 2).min(l - d);
    Tripartition::new(l * w_b, start_row * w_b, d * w_b)
}

/// Sample every column without a cutoff.
pub fn run_trajectory(geom: &CircuitGeometry, p: f64, seed: u64) -> Result<TrajectoryRecord> {
    run_trajectory_with_options(geom, p, seed, &TrajectoryOptions::default())
}

/// Sample until `S_op` first exceeds the policy threshold.
pub fn run_trajectory_with_cutoff(
    geom: &CircuitGeometry,
    p: f64,
    seed: u64,
    policy: CutoffPolicy,
) -> Result<TrajectoryRecord> {
    let opts = TrajectoryOptions { cutoff: Some(policy), ..Default::default() };
    run_trajectory_with_options(geom, p, seed, &opts)
}

struct Peak {
    cg: ClippedGenerators,
    w_b: usize,
}

pub fn run_trajectory_with_options(
    geom: &CircuitGeometry,
    p: f64,
    seed: u64,
    opts: &TrajectoryOptions,
) -> Result<TrajectoryRecord> {
    let real = CircuitRealization::new(geom.clone(), p, seed)?;
    let mut rng = real.measurement_rng();
    run_realization(&real, &mut rng, opts)
}

/// Sample one bitstring from a fixed circuit with measurement coins from
/// `rng`.
pub fn run_realization<R: rand::Rng + ?Sized>(
    real: &CircuitRealization,
    rng: &mut R,
    opts: &TrajectoryOptions,
) -> Result<TrajectoryRecord> {
    let geom = real.geometry();
    let p = real.p();
    let l = geom.l();
    for &d in &opts.cmi_buffers {
        if d > l {
            return Err(Error::Contract(format!("buffer of {d} rows exceeds L = {l}")));
        }
    }
    let mut strip = BoundaryStrip::new(geom);
    let threshold = opts.cutoff.map_or(f64::INFINITY, |c| c.threshold_bits(geom.t(), p));

    let mut curve = Vec::with_capacity(geom.w());
    let mut bits = Vec::with_capacity(geom.w());
    let mut peak: Option<(usize, usize, Peak)> = None;
    let mut coin_flips = 0;
    let mut abort_column = None;
    for t in 0..geom.w() {
        strip.prepare_column(real, t)?;
        let cg = to_clipped_gauge(&strip.row_major_tableau());
        let s = operator_entanglement(&cg, strip.half_cut());
        curve.push(s);
        if peak.as_ref().map_or(true, |(v, _, _)| s > *v) {
            peak = Some((s, t, Peak { cg, w_b: strip.width() }));
        }
        if s as f64 > threshold {
            abort_column = Some(t + 1);
            break;
        }
        let (b, n_random) = strip.measure_column(rng)?;
        coin_flips += n_random;
        bits.push(hex_pack(&b));
    }

    let (s_op_peak, t_peak, pk) = peak.expect("grid has at least two columns");
    let n_b = pk.cg.n_qubits();
    let mut cmi_at_peak = Vec::with_capacity(opts.cmi_buffers.len());
    for &d in &opts.cmi_buffers {
        let part = centered_buffer(l, pk.w_b, d)?;
        cmi_at_peak.push((d, cmi_clipped(&pk.cg, &part)?));
    }
    Ok(TrajectoryRecord {
        seed: real.seed(),
        l,
        w: geom.w(),
        t: geom.t(),
        p,
        s_op_curve: curve,
        s_op_peak,
        t_peak: t_peak + 1,
        bits,
        gen_stats: generator_stats(&pk.cg),
        m_over_n_at_peak: pk.cg.len() as f64 / n_b as f64,
        w_b_at_peak: pk.w_b,
        cmi_at_peak,
        coin_flips,
        aborted: abort_column.is_some(),
        abort_column,
        peak_state: opts.keep_peak_state.then(|| pk.cg.to_tableau()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_roundtrip() {
        let bits = [true, false, true, true, false, true];
        let s = hex_pack(&bits);
        assert_eq!(s, "b4");
        assert_eq!(hex_unpack(&s, 6).unwrap(), bits);
        assert!(hex_unpack("b4", 9).is_err());
        assert!(hex_unpack("zz", 8).is_err());
    }

    #[test]
    fn no_gates_gives_zero_outcomes() {
        let geom = CircuitGeometry::new(4, 5, 0).unwrap();
        let rec = run_trajectory(&geom, 0.0, 3).unwrap();
        assert!(rec.s_op_curve.iter().all(|&s| s == 0));
        for c in 1..=5 {
            assert_eq!(rec.column_bits(c).unwrap(), vec![false; 4]);
        }
        assert_eq!(rec.coin_flips, 0);
    }

    #[test]
    fn full_noise_gives_fair_bits_and_no_entanglement() {
        let geom = CircuitGeometry::new(6, 8, 4).unwrap();
        let mut ones = 0;
        let mut total = 0;
        for seed in 0..40 {
            let rec = run_trajectory(&geom, 1.0, seed).unwrap();
            assert!(rec.s_op_curve.iter().all(|&s| s == 0));
            assert_eq!(rec.coin_flips, 6 * 8);
            for c in 1..=8 {
                let b = rec.column_bits(c).unwrap();
                ones += b.iter().filter(|&&x| x).count();
                total += b.len();
            }
        }
        let sigma = (total as f64 * 0.25).sqrt();
        assert!((ones as f64 - total as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn columns_must_be_sampled_in_order() {
        let geom = CircuitGeometry::new(2, 3, 2).unwrap();
        let real = CircuitRealization::new(geom.clone(), 0.0, 1).unwrap();
        let mut strip = BoundaryStrip::new(&geom);
        let mut rng = real.measurement_rng();
        assert!(sebd_step(&mut strip, &real, &mut rng, 1).is_err());
        sebd_step(&mut strip, &real, &mut rng, 0).unwrap();
        sebd_step(&mut strip, &real, &mut rng, 1).unwrap();
    }

    #[test]
    fn record_json_roundtrip() {
        let geom = CircuitGeometry::new(4, 6, 4).unwrap();
        let opts = TrajectoryOptions { cmi_buffers: vec![0, 2], ..Default::default() };
        let rec = run_trajectory_with_options(&geom, 0.05, 17, &opts).unwrap();
        let line = rec.to_json_line();
        assert!(!line.contains('\n'));
        assert_eq!(TrajectoryRecord::from_json_line(&line).unwrap(), rec);
        assert_eq!(rec.cmi_at_peak[0], (0, rec.s_op_peak));
    }

    #[test]
    fn cutoff_policy_validation() {
        assert!(CutoffPolicy::new(-1.0, 21.3, 0.1).is_err());
        assert!(CutoffPolicy::new(1.0, 0.0, 0.1).is_err());
        assert!(CutoffPolicy::new(1.0, 21.3, 1.0).is_err());
        let c = CutoffPolicy::new(5.0, 21.3, 0.1).unwrap();
        assert!((c.threshold_bits(8, 0.04) - 46.948).abs() < 1e-3);
        assert!(c.threshold_bits(8, 0.0).is_infinite());
    }
}
