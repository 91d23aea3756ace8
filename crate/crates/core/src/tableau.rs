//! Mixed stabilizer states stored as a list of independent, commuting,
//! Hermitian generators.
//!
//! There are no destabilizer rows. Whenever a deterministic sign is needed the
//! target is reduced against a working copy of the generators.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::clifford::TwoQubitClifford;
use crate::error::{check_site, Error, Result};
use crate::gf2::Gf2Matrix;
use crate::pauli::{Pauli, PauliString};

/// Result of a single-qubit Z measurement.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Fair coin flip.
    Random(bool),
    /// Fixed by the state.
    Determined(bool),
}

impl Outcome {
    #[inline]
    pub fn bit(self) -> bool {
        match self {
            Outcome::Random(b) | Outcome::Determined(b) => b,
        }
    }

    #[inline]
    pub fn is_random(self) -> bool {
        matches!(self, Outcome::Random(_))
    }
}

/// Joint Z-basis readout of a block of sites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMeasurement {
    pub bits: Vec<bool>,
    /// Number of fair coins the outcome consumed; the outcome had
    /// probability `2^-n_random`.
    pub n_random: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedTableau {
    n: usize,
    gens: Vec<PauliString>,
}

impl MixedTableau {
    /// `|0…0⟩` on `n` qubits.
    pub fn new(n: usize) -> Self {
        let gens = (0..n).map(|q| PauliString::single(n, q, Pauli::Z).unwrap()).collect();
        Self { n, gens }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self { n, gens: Vec::new() }
    }

    /// Wrap an explicit generator list, checking every tableau invariant.
    pub fn from_generators(n: usize, gens: Vec<PauliString>) -> Result<Self> {
        let t = Self { n, gens };
        t.validate()?;
        Ok(t)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn n_generators(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.gens
    }

    pub fn is_pure(&self) -> bool {
        self.gens.len() == self.n
    }

    /// Check commutation, independence, real phases and sizes.
    pub fn validate(&self) -> Result<()> {
        if self.gens.len() > self.n {
            return Err(Error::Contract(format!(
                "{} generators on {} qubits",
                self.gens.len(),
                self.n
            )));
        }
        for g in &self.gens {
            if g.n_qubits() != self.n {
                return Err(Error::DimensionMismatch { left: g.n_qubits(), right: self.n });
            }
            if !g.is_hermitian() {
                return Err(Error::Contract(format!("generator {g} has an imaginary phase")));
            }
        }
        for (i, a) in self.gens.iter().enumerate() {
            for b in &self.gens[i + 1..] {
                if !a.commutes_unchecked(b) {
                    return Err(Error::Contract(format!("generators {a} and {b} anticommute")));
                }
            }
        }
        if self.sign_free_matrix().rank() != self.gens.len() {
            return Err(Error::Contract("generators are not independent".into()));
        }
        Ok(())
    }

    /// Generators as GF(2) rows `[x_0, z_0, x_1, z_1, …]`.
    pub fn sign_free_matrix(&self) -> Gf2Matrix {
        let mut m = Gf2Matrix::zeros(self.gens.len(), 2 * self.n);
        for (i, g) in self.gens.iter().enumerate() {
            for q in 0..self.n {
                let l = g.local(q);
                if l & 2 != 0 {
                    m.set(i, 2 * q, true);
                }
                if l & 1 != 0 {
                    m.set(i, 2 * q + 1, true);
                }
            }
        }
        m
    }

    /// Add `k` fresh qubits in `|0⟩` after the existing ones.
    pub fn append_qubits_zero(&mut self, k: usize) {
        let old = self.n;
        self.n += k;
        for g in &mut self.gens {
            g.extend(k);
        }
        for q in old..self.n {
            self.gens.push(PauliString::single(self.n, q, Pauli::Z).unwrap());
        }
    }

    /// Conjugate every generator by `gate` acting on sites `(a, b)`.
    pub fn apply_two_qubit(&mut self, gate: &TwoQubitClifford, a: usize, b: usize) -> Result<()> {
        check_site(a, self.n)?;
        check_site(b, self.n)?;
        if a == b {
            return Err(Error::Contract(format!("gate on repeated site {a}")));
        }
        for g in &mut self.gens {
            let (la, lb) = (g.local(a), g.local(b));
            if la == 0 && lb == 0 {
                continue;
            }
            let (na, nb, ph) = gate.conjugate_local(la, lb);
            g.set_local(a, na);
            g.set_local(b, nb);
            g.set_phase(g.phase() + ph);
        }
        Ok(())
    }

    /// If some element of the stabilizer group has the same Pauli content as
    /// `target`, return that element's sign (`true` for `-1`).
    pub fn group_sign(&self, target: &PauliString) -> Result<Option<bool>> {
        if target.n_qubits() != self.n {
            return Err(Error::DimensionMismatch { left: target.n_qubits(), right: self.n });
        }
        Ok(self.reduce_target(target).map(|phase| phase == 2))
    }

    fn reduce_target(&self, target: &PauliString) -> Option<u8> {
        let mut rows = self.gens.clone();
        let mut residual = target.clone();
        let mut acc = PauliString::identity(self.n);
        let mut used = 0;
        for q in 0..self.n {
            for mask in [2u8, 1u8] {
                let want = residual.local(q) & mask != 0;
                let pivot = (used..rows.len()).find(|&r| rows[r].local(q) & mask != 0);
                let Some(p) = pivot else {
                    if want {
                        return None;
                    }
                    continue;
                };
                rows.swap(used, p);
                let piv = rows[used].clone();
                for row in &mut rows[used + 1..] {
                    if row.local(q) & mask != 0 {
                        row.mul_assign_right(&piv);
                    }
                }
                if want {
                    residual.mul_assign_right(&piv);
                    acc.mul_assign_right(&piv);
                }
                used += 1;
            }
        }
        debug_assert!(residual.is_identity());
        Some(acc.phase())
    }

    fn z_string(&self, q: usize, negative: bool) -> PauliString {
        let mut z = PauliString::single(self.n, q, Pauli::Z).unwrap();
        if negative {
            z.negate();
        }
        z
    }

    /// Multiply every other row in `rows` by the pivot row.
    fn eliminate_with(&mut self, pivot: usize, rows: &[usize]) {
        let piv = self.gens[pivot].clone();
        for &r in rows {
            if r != pivot {
                self.gens[r].mul_assign_right(&piv);
            }
        }
    }

    /// Projective Z measurement of site `q`.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<Outcome> {
        check_site(q, self.n)?;
        let anti: Vec<usize> = (0..self.gens.len()).filter(|&r| self.gens[r].x_bit(q)).collect();
        if let Some(&p) = anti.first() {
            self.eliminate_with(p, &anti);
            let bit: bool = rng.gen();
            self.gens[p] = self.z_string(q, bit);
            return Ok(Outcome::Random(bit));
        }
        match self.reduce_target(&self.z_string(q, false)) {
            Some(phase) => Ok(Outcome::Determined(phase == 2)),
            None => {
                let bit: bool = rng.gen();
                self.gens.push(self.z_string(q, bit));
                Ok(Outcome::Random(bit))
            }
        }
    }

    /// Project site `q` onto `|bit⟩`, returning the Born probability of that
    /// outcome. On probability zero the state is left unchanged.
    pub fn postselect_z(&mut self, q: usize, bit: bool) -> Result<f64> {
        check_site(q, self.n)?;
        let anti: Vec<usize> = (0..self.gens.len()).filter(|&r| self.gens[r].x_bit(q)).collect();
        if let Some(&p) = anti.first() {
            self.eliminate_with(p, &anti);
            self.gens[p] = self.z_string(q, bit);
            return Ok(0.5);
        }
        match self.reduce_target(&self.z_string(q, false)) {
            Some(phase) => Ok(if (phase == 2) == bit { 1.0 } else { 0.0 }),
            None => {
                self.gens.push(self.z_string(q, bit));
                Ok(0.5)
            }
        }
    }

    /// Row-reduce so that at most one generator has an X component at `q`
    /// and at most one other acts as Z there. Returns those two rows.
    fn gauge_at(&mut self, q: usize) -> (Option<usize>, Option<usize>) {
        let xs: Vec<usize> = (0..self.gens.len()).filter(|&r| self.gens[r].x_bit(q)).collect();
        let xp = xs.first().copied();
        if let Some(p) = xp {
            self.eliminate_with(p, &xs);
        }
        let zs: Vec<usize> = (0..self.gens.len())
            .filter(|&r| Some(r) != xp && self.gens[r].z_bit(q))
            .collect();
        let zp = zs.first().copied();
        if let Some(p) = zp {
            self.eliminate_with(p, &zs);
        }
        (xp, zp)
    }

    fn remove_rows(&mut self, mut rows: Vec<usize>) {
        rows.sort_unstable();
        for r in rows.into_iter().rev() {
            self.gens.remove(r);
        }
    }

    /// Replace site `q` by the maximally mixed state: `ρ → tr_q(ρ) ⊗ I/2`.
    pub fn trace_replace_mixed(&mut self, q: usize) -> Result<()> {
        check_site(q, self.n)?;
        let (xp, zp) = self.gauge_at(q);
        self.remove_rows(xp.into_iter().chain(zp).collect());
        Ok(())
    }

    /// Remove site `q`, which must be a Z eigenstate in product with the rest.
    /// Higher sites shift down by one.
    pub fn discard_qubit(&mut self, q: usize) -> Result<()> {
        check_site(q, self.n)?;
        let (xp, zp) = self.gauge_at(q);
        if xp.is_some() {
            return Err(Error::Contract(format!("site {q} is not in a Z eigenstate")));
        }
        let Some(zp) = zp else {
            return Err(Error::Contract(format!("no generator fixes site {q}")));
        };
        if self.gens[zp].weight() != 1 && self.reduce_target(&self.z_string(q, false)).is_none() {
            return Err(Error::Contract(format!("site {q} is entangled with the rest")));
        }
        self.gens.remove(zp);
        for g in &mut self.gens {
            g.remove_range(q, q + 1);
        }
        self.n -= 1;
        Ok(())
    }

    /// With probability `p`, replace site `q` by the maximally mixed state.
    pub fn noise_event<R: Rng + ?Sized>(&mut self, q: usize, p: f64, rng: &mut R) -> Result<bool> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("noise probability {p} outside [0, 1]")));
        }
        check_site(q, self.n)?;
        if rng.gen_bool(p) {
            self.trace_replace_mixed(q)?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Measure sites `lo..hi` jointly in the Z basis and remove them.
    ///
    /// One elimination pass orders bit columns as (X on the block, everything
    /// off the block, Z on the block). Rows pivoting on block X bits do not
    /// survive the measurement; rows pivoting off the block are kept with
    /// their block Z content folded into the sign; the remaining rows are the
    /// group elements living purely as Z strings on the block and fix the
    /// outcome distribution, which is uniform over the solutions of their
    /// parity constraints.
    pub fn measure_block_and_remove<R: Rng + ?Sized>(
        &mut self,
        lo: usize,
        hi: usize,
        rng: &mut R,
    ) -> Result<BlockMeasurement> {
        if lo > hi || hi > self.n {
            return Err(Error::IndexOutOfRange { site: hi.max(lo), n: self.n });
        }
        let m = self.gens.len();
        let mut next = 0;
        let pivot_on = |gens: &mut Vec<PauliString>, next: &mut usize, q: usize, mask: u8| {
            if let Some(p) = (*next..m).find(|&r| gens[r].local(q) & mask != 0) {
                gens.swap(*next, p);
                let piv = gens[*next].clone();
                for row in &mut gens[*next + 1..] {
                    if row.local(q) & mask != 0 {
                        row.mul_assign_right(&piv);
                    }
                }
                *next += 1;
            }
        };
        for q in lo..hi {
            pivot_on(&mut self.gens, &mut next, q, 2);
        }
        let kept_start = next;
        for q in (0..lo).chain(hi..self.n) {
            pivot_on(&mut self.gens, &mut next, q, 2);
            pivot_on(&mut self.gens, &mut next, q, 1);
        }
        let kept_end = next;

        // Z-only constraints on the block, brought to reduced echelon form.
        let mut cons: Vec<PauliString> = self.gens.drain(kept_end..).collect();
        let width = hi - lo;
        let mut pivot_site: Vec<Option<usize>> = vec![None; width];
        let mut used = 0;
        for (k, slot) in pivot_site.iter_mut().enumerate() {
            let q = lo + k;
            if let Some(p) = (used..cons.len()).find(|&r| cons[r].z_bit(q)) {
                cons.swap(used, p);
                let piv = cons[used].clone();
                for (r, row) in cons.iter_mut().enumerate() {
                    if r != used && row.z_bit(q) {
                        row.mul_assign_right(&piv);
                    }
                }
                *slot = Some(used);
                used += 1;
            }
        }
        debug_assert_eq!(used, cons.len());
        let mut bits = vec![false; width];
        let mut n_random = 0;
        for (k, slot) in pivot_site.iter().enumerate() {
            if slot.is_none() {
                bits[k] = rng.gen();
                n_random += 1;
            }
        }
        for (k, slot) in pivot_site.iter().enumerate() {
            if let Some(r) = *slot {
                let row = &cons[r];
                let mut parity = row.is_negative();
                for (j, &b) in bits.iter().enumerate() {
                    if j != k && b && row.z_bit(lo + j) {
                        parity ^= true;
                    }
                }
                bits[k] = parity;
            }
        }

        self.gens.drain(..kept_start);
        for g in &mut self.gens {
            let flip = (lo..hi).filter(|&q| bits[q - lo] && g.z_bit(q)).count() % 2 == 1;
            if flip {
                g.negate();
            }
            g.remove_range(lo, hi);
        }
        self.n -= width;
        Ok(BlockMeasurement { bits, n_random })
    }

    /// Relabel sites: site `q` moves to `perm[q]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<MixedTableau> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch { left: perm.len(), right: self.n });
        }
        let mut seen = vec![false; self.n];
        for &t in perm {
            check_site(t, self.n)?;
            if std::mem::replace(&mut seen[t], true) {
                return Err(Error::Contract(format!("site {t} appears twice in permutation")));
            }
        }
        Ok(MixedTableau { n: self.n, gens: self.gens.iter().map(|g| g.permuted(perm)).collect() })
    }
}

impl fmt::Display for MixedTableau {
    /// Snapshot text: a header `N M`, then one generator per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.gens.len())?;
        for g in &self.gens {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for MixedTableau {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty snapshot".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header {header:?}"))))
            .collect::<Result<_>>()?;
        let [n, m] = nums[..] else {
            return Err(Error::Parse(format!("bad header {header:?}")));
        };
        let gens: Vec<PauliString> =
            lines.filter(|l| !l.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
        if gens.len() != m {
            return Err(Error::Parse(format!("header promises {m} generators, found {}", gens.len())));
        }
        if gens.iter().any(|g| g.n_qubits() != n) {
            return Err(Error::Parse("generator length disagrees with header".into()));
        }
        MixedTableau::from_generators(n, gens)
    }
}

/// Random mixed state for tests and validation: random two-qubit Cliffords
/// on both neighbouring and distant pairs, interleaved with trace
/// replacements and measurements.
pub fn random_mixed_tableau<R: Rng + ?Sized>(n: usize, rng: &mut R) -> MixedTableau {
    let mut t = MixedTableau::new(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            t.trace_replace_mixed(0).unwrap();
        }
        return t;
    }
    let rounds = 2 + rng.gen_range(0..3);
    for _ in 0..rounds {
        for _ in 0..2 * n {
            let a = rng.gen_range(0..n);
            let b = if rng.gen_bool(0.6) {
                (a + 1) % n
            } else {
                (a + rng.gen_range(1..n)) % n
            };
            t.apply_two_qubit(&TwoQubitClifford::random(rng), a, b).unwrap();
        }
        let p_trace = rng.gen_range(0.0..0.3);
        for q in 0..n {
            if rng.gen_bool(p_trace) {
                t.trace_replace_mixed(q).unwrap();
            } else if rng.gen_bool(0.1) {
                t.measure_z(q, rng).unwrap();
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gens(t: &MixedTableau) -> Vec<String> {
        t.generators().iter().map(|g| g.to_string()).collect()
    }

    fn bell() -> MixedTableau {
        let mut t = MixedTableau::new(2);
        t.apply_two_qubit(&TwoQubitClifford::hadamard_first(), 0, 1).unwrap();
        t.apply_two_qubit(&TwoQubitClifford::cnot(), 0, 1).unwrap();
        t
    }

    fn ghz3() -> MixedTableau {
        let g = ["+XXX", "+ZZI", "+IZZ"].map(|s| s.parse().unwrap()).to_vec();
        MixedTableau::from_generators(3, g).unwrap()
    }

    #[test]
    fn zero_state_constructors() {
        assert_eq!(gens(&MixedTableau::new(1)), ["+Z"]);
        assert_eq!(gens(&MixedTableau::new(3)), ["+ZII", "+IZI", "+IIZ"]);
        let empty = MixedTableau::new(0);
        assert_eq!(empty.n_qubits(), 0);
        assert_eq!(empty.n_generators(), 0);
    }

    #[test]
    fn append_qubits() {
        let mut t = MixedTableau::new(0);
        t.append_qubits_zero(2);
        assert_eq!(gens(&t), ["+ZI", "+IZ"]);
        let mut b = bell();
        b.append_qubits_zero(1);
        assert_eq!(b.n_generators(), 3);
        assert!(b.is_pure());
        assert_eq!(gens(&b)[2], "+IIZ");
        b.validate().unwrap();
    }

    #[test]
    fn cnot_and_bell() {
        let mut t = MixedTableau::new(2);
        t.apply_two_qubit(&TwoQubitClifford::cnot(), 0, 1).unwrap();
        assert_eq!(gens(&t), ["+ZI", "+ZZ"]);
        assert_eq!(gens(&bell()), ["+XX", "+ZZ"]);
        assert!(t.apply_two_qubit(&TwoQubitClifford::cnot(), 1, 1).is_err());
        assert!(t.apply_two_qubit(&TwoQubitClifford::cnot(), 0, 2).is_err());
    }

    #[test]
    fn measurement_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // case (b)
        let mut t = MixedTableau::new(2);
        assert_eq!(t.measure_z(0, &mut rng).unwrap(), Outcome::Determined(false));
        assert_eq!(t, MixedTableau::new(2));
        // case (a)
        let mut plus2 = MixedTableau::new(2);
        plus2.apply_two_qubit(&TwoQubitClifford::hadamard_first(), 0, 1).unwrap();
        let o = plus2.measure_z(0, &mut rng).unwrap();
        assert!(o.is_random());
        assert_eq!(plus2.generators()[0].get(0), Pauli::Z);
        assert_eq!(plus2.generators()[0].is_negative(), o.bit());
        // case (c)
        let mut mixed = MixedTableau::maximally_mixed(2);
        let o = mixed.measure_z(1, &mut rng).unwrap();
        assert!(o.is_random());
        assert_eq!(mixed.n_generators(), 1);
        // repeatability
        for _ in 0..20 {
            let mut s = random_mixed_tableau(5, &mut rng);
            let a = s.measure_z(2, &mut rng).unwrap();
            let b = s.measure_z(2, &mut rng).unwrap();
            assert_eq!(b, Outcome::Determined(a.bit()));
        }
    }

    #[test]
    fn deterministic_sign_through_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = ["-ZZ", "+ZI"].map(|s| s.parse().unwrap()).to_vec();
        let mut t = MixedTableau::from_generators(2, g).unwrap();
        assert_eq!(t.measure_z(1, &mut rng).unwrap(), Outcome::Determined(true));
    }

    #[test]
    fn bell_measurement_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let shots = 10_000;
        let mut ones = 0;
        for _ in 0..shots {
            let mut b = bell();
            let o = b.measure_z(0, &mut rng).unwrap();
            assert!(o.is_random());
            ones += usize::from(o.bit());
            let second = b.measure_z(1, &mut rng).unwrap();
            assert_eq!(second, Outcome::Determined(o.bit()));
        }
        let sigma = (shots as f64 * 0.25).sqrt();
        assert!((ones as f64 - shots as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn trace_replace_examples() {
        let mut t = MixedTableau::new(2);
        t.trace_replace_mixed(0).unwrap();
        assert_eq!(gens(&t), ["+IZ"]);
        let mut b = bell();
        b.trace_replace_mixed(1).unwrap();
        assert_eq!(b.n_generators(), 0);
        let mut g = ghz3();
        g.trace_replace_mixed(1).unwrap();
        assert_eq!(gens(&g), ["+ZIZ"]);
        let before = g.clone();
        g.trace_replace_mixed(1).unwrap();
        assert_eq!(g, before);
    }

    #[test]
    fn discard_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut t = MixedTableau::new(2);
        t.discard_qubit(0).unwrap();
        assert_eq!(gens(&t), ["+Z"]);
        let mut b = bell();
        assert!(b.discard_qubit(0).is_err());
        b.measure_z(0, &mut rng).unwrap();
        b.discard_qubit(0).unwrap();
        assert_eq!(b.n_qubits(), 1);
        assert_eq!(b.n_generators(), 1);
        assert!(MixedTableau::maximally_mixed(1).discard_qubit(0).is_err());
        // Z_q in the group but only as a product of generators
        let g = ["+ZZ", "+IZ"].map(|s| s.parse().unwrap()).to_vec();
        let mut t = MixedTableau::from_generators(2, g).unwrap();
        t.discard_qubit(0).unwrap();
        assert_eq!(gens(&t), ["+Z"]);
    }

    #[test]
    fn noise_event_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut t = MixedTableau::new(3);
        assert!(!(0..100).any(|_| t.noise_event(0, 0.0, &mut rng).unwrap()));
        for q in 0..3 {
            assert!(t.noise_event(q, 1.0, &mut rng).unwrap());
        }
        assert_eq!(t.n_generators(), 0);
        assert!(t.noise_event(0, 1.5, &mut rng).is_err());
        let trials = 10_000;
        let mut hits = 0;
        let mut s = MixedTableau::new(1);
        for _ in 0..trials {
            hits += usize::from(s.noise_event(0, 0.3, &mut rng).unwrap());
        }
        let sigma = (trials as f64 * 0.3 * 0.7).sqrt();
        assert!((hits as f64 - 0.3 * trials as f64).abs() < 3.0 * sigma);
    }

    #[test]
    fn snapshot_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in [0, 1, 5, 70] {
            let t = random_mixed_tableau(n, &mut rng);
            let text = t.to_string();
            let back: MixedTableau = text.parse().unwrap();
            assert_eq!(back, t);
            assert_eq!(back.to_string(), text);
        }
        assert!("2 1\n+XX\n+ZZ\n".parse::<MixedTableau>().is_err());
        assert!("2 2\n+XX\n+ZI\n".parse::<MixedTableau>().is_err());
    }

    #[test]
    fn random_states_stay_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..40 {
            let mut t = random_mixed_tableau(n, &mut rng);
            t.validate().unwrap();
            let q = rng.gen_range(0..n);
            t.measure_z(q, &mut rng).unwrap();
            t.discard_qubit(q).unwrap();
            t.validate().unwrap();
        }
    }

    #[test]
    fn block_measurement_keeps_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 2..30 {
            let mut t = random_mixed_tableau(n, &mut rng);
            let lo = rng.gen_range(0..n);
            let hi = rng.gen_range(lo..=n);
            let r = t.measure_block_and_remove(lo, hi, &mut rng).unwrap();
            assert_eq!(r.bits.len(), hi - lo);
            assert_eq!(t.n_qubits(), n - (hi - lo));
            t.validate().unwrap();
        }
    }
}
