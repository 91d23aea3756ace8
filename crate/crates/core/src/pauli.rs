//! Bit-packed Pauli strings with exact phase tracking.
//!
//! A [`PauliString`] on `n` qubits stores one X bit and one Z bit per site in
//! 64-bit words together with a phase `i^k`. Site `q` carries the Hermitian
//! single-qubit Pauli selected by its bit pair:
//!
//! | (x, z) | operator |
//! |--------|----------|
//! | (0, 0) | I        |
//! | (1, 0) | X        |
//! | (0, 1) | Z        |
//! | (1, 1) | Y        |
//!
//! so the full operator is `i^phase · σ_0 ⊗ σ_1 ⊗ … ⊗ σ_{n-1}`, and it is
//! Hermitian exactly when the phase is `+1` or `-1`.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_site, Error, Result};

pub(crate) const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Single-site Pauli operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Z => (false, true),
            Pauli::Y => (true, true),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Hermitian-or-not Pauli operator on `n` qubits, `i^phase · ⊗σ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self { n, x: vec![0; w], z: vec![0; w], phase: 0 }
    }

    /// `+P` acting on site `q` only.
    pub fn single(n: usize, q: usize, p: Pauli) -> Result<Self> {
        check_site(q, n)?;
        let mut s = Self::identity(n);
        s.set(q, p);
        Ok(s)
    }

    pub fn from_paulis(paulis: &[Pauli], phase: u8) -> Self {
        let mut s = Self::identity(paulis.len());
        for (q, &p) in paulis.iter().enumerate() {
            s.set(q, p);
        }
        s.phase = phase & 3;
        s
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Exponent `k` of the overall factor `i^k`.
    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    #[inline]
    pub fn set_phase(&mut self, phase: u8) {
        self.phase = phase & 3;
    }

    /// Flip the sign, i.e. multiply by `-1`.
    #[inline]
    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) & 3;
    }

    #[inline]
    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    /// `true` for a Hermitian string with sign `-1`.
    #[inline]
    pub fn is_negative(&self) -> bool {
        self.phase == 2
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / WORD] >> (q % WORD)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / WORD] >> (q % WORD)) & 1 == 1
    }

    /// Local action at `q` packed as `2·x + z`; zero means identity.
    #[inline]
    pub(crate) fn local(&self, q: usize) -> u8 {
        let w = q / WORD;
        let b = q % WORD;
        ((((self.x[w] >> b) & 1) << 1) | ((self.z[w] >> b) & 1)) as u8
    }

    #[inline]
    pub(crate) fn set_local(&mut self, q: usize, bits: u8) {
        let w = q / WORD;
        let m = 1u64 << (q % WORD);
        if bits & 2 != 0 {
            self.x[w] |= m;
        } else {
            self.x[w] &= !m;
        }
        if bits & 1 != 0 {
            self.z[w] |= m;
        } else {
            self.z[w] &= !m;
        }
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.set_local(q, (u8::from(x) << 1) | u8::from(z));
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(self.z.iter()).all(|&w| w == 0)
    }

    /// Same operator content ignoring the phase.
    pub fn same_bits(&self, other: &PauliString) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.n, right: other.n })
        }
    }

    /// Symplectic inner product test.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &PauliString) -> bool {
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones();
        }
        acc & 1 == 0
    }

    /// Operator product `self · other`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.mul_assign_right(other);
        Ok(out)
    }

    /// In place `self ← self · other`; lengths must agree.
    #[inline]
    pub(crate) fn mul_assign_right(&mut self, other: &PauliString) {
        let mut plus = 0u32;
        let mut minus = 0u32;
        for i in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[i], self.z[i], other.x[i], other.z[i]);
            // per-site i-power of σ(x1,z1)·σ(x2,z2): XY=iZ, YZ=iX, ZX=iY and
            // the reversed orders give -i
            let p = (x1 & !z1 & x2 & z2) | (x1 & z1 & !x2 & z2) | (!x1 & z1 & x2 & !z2);
            let m = (x1 & !z1 & !x2 & z2) | (x1 & z1 & x2 & !z2) | (!x1 & z1 & x2 & z2);
            plus += p.count_ones();
            minus += m.count_ones();
            self.x[i] = x1 ^ x2;
            self.z[i] = z1 ^ z2;
        }
        let delta = (plus.wrapping_sub(minus) & 3) as u8;
        self.phase = (self.phase + other.phase + delta) & 3;
    }

    /// 0-based indices of the first and last non-identity site.
    pub fn support_bounds(&self) -> Option<(usize, usize)> {
        let w = self.x.len();
        let first = (0..w).find_map(|i| {
            let m = self.x[i] | self.z[i];
            (m != 0).then(|| i * WORD + m.trailing_zeros() as usize)
        })?;
        let last = (0..w).rev().find_map(|i| {
            let m = self.x[i] | self.z[i];
            (m != 0).then(|| i * WORD + (WORD - 1 - m.leading_zeros() as usize))
        })?;
        Some((first, last))
    }

    /// Sign-free bits on `region`, interleaved per site as `[x_s, z_s, ...]`.
    pub fn restrict_to_region(&self, region: &[usize]) -> Result<Vec<bool>> {
        let mut row = Vec::with_capacity(2 * region.len());
        for &q in region {
            check_site(q, self.n)?;
            row.push(self.x_bit(q));
            row.push(self.z_bit(q));
        }
        Ok(row)
    }

    /// Append `k` identity sites at the end.
    pub(crate) fn extend(&mut self, k: usize) {
        self.n += k;
        let w = words_for(self.n);
        self.x.resize(w, 0);
        self.z.resize(w, 0);
    }

    /// Remove sites `lo..hi`, shifting higher sites down.
    pub(crate) fn remove_range(&mut self, lo: usize, hi: usize) {
        debug_assert!(lo <= hi && hi <= self.n);
        let n = self.n;
        remove_bit_range(&mut self.x, n, lo, hi);
        remove_bit_range(&mut self.z, n, lo, hi);
        self.n = n - (hi - lo);
        let w = words_for(self.n);
        self.x.truncate(w);
        self.z.truncate(w);
    }

    /// Relabel sites: site `q` of `self` becomes site `perm[q]` of the result.
    pub fn permuted(&self, perm: &[usize]) -> PauliString {
        let mut out = PauliString::identity(self.n);
        out.phase = self.phase;
        for (i, (&xw, &zw)) in self.x.iter().zip(&self.z).enumerate() {
            let mut m = xw | zw;
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                let q = i * WORD + b;
                let t = perm[q];
                let tm = 1u64 << (t % WORD);
                if (xw >> b) & 1 == 1 {
                    out.x[t / WORD] |= tm;
                }
                if (zw >> b) & 1 == 1 {
                    out.z[t / WORD] |= tm;
                }
            }
        }
        out
    }
}

fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i / WORD] >> (i % WORD)) & 1 == 1
}

/// Delete bits `lo..hi` from an `n`-bit packed vector in place.
fn remove_bit_range(words: &mut [u64], n: usize, lo: usize, hi: usize) {
    let k = hi - lo;
    if k == 0 {
        return;
    }
    if lo % WORD == 0 && k % WORD == 0 {
        let (wl, wk) = (lo / WORD, k / WORD);
        words.copy_within(wl + wk.., wl);
        let len = words.len();
        words[len - wk..].iter_mut().for_each(|w| *w = 0);
        return;
    }
    let mut out = vec![0u64; words.len()];
    let wl = lo / WORD;
    out[..wl].copy_from_slice(&words[..wl]);
    if lo % WORD != 0 {
        out[wl] = words[wl] & ((1u64 << (lo % WORD)) - 1);
    }
    // bits hi..n move to lo..n-k
    let mut dst = lo;
    let mut src = hi;
    while src < n {
        let take = (WORD - src % WORD).min(WORD - dst % WORD).min(n - src);
        let chunk = (words[src / WORD] >> (src % WORD))
            & if take == WORD { u64::MAX } else { (1u64 << take) - 1 };
        out[dst / WORD] |= chunk << (dst % WORD);
        dst += take;
        src += take;
    }
    debug_assert!((lo..n - k).all(|i| get_bit(&out, i) == get_bit(words, i + k)));
    words.copy_from_slice(&out);
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.get(q).symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (mut phase, rest) = if let Some(r) = s.strip_prefix('-') {
            (2u8, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0u8, r)
        } else {
            return Err(Error::Parse(format!("missing sign in {s:?}")));
        };
        let rest = match rest.strip_prefix('i') {
            Some(r) => {
                phase += 1;
                r
            }
            None => rest,
        };
        let paulis = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!("bad Pauli symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_paulis(&paulis, phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn commutation_examples() {
        assert!(p("+X").commutes(&p("+X")).unwrap());
        assert!(!p("+X").commutes(&p("+Z")).unwrap());
        assert!(p("+XI").commutes(&p("+IZ")).unwrap());
        assert!(matches!(
            p("+X").commutes(&p("+XX")),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn multiplication_examples() {
        // XZ = -iY
        assert_eq!(p("+X").multiply(&p("+Z")).unwrap().to_string(), "-iY");
        assert_eq!(p("+XX").multiply(&p("+ZZ")).unwrap().to_string(), "-YY");
        for g in ["+XYZ", "-ZZI", "+YIY"] {
            let sq = p(g).multiply(&p(g)).unwrap();
            assert!(sq.is_identity());
            assert_eq!(sq.phase(), 0);
        }
        assert!(p("+X").multiply(&p("+XX")).is_err());
    }

    #[test]
    fn support_examples() {
        assert_eq!(p("+IXZI").support_bounds(), Some((1, 2)));
        assert_eq!(p("+IIII").support_bounds(), None);
        assert_eq!(p("+ZIIZ").support_bounds(), Some((0, 3)));
    }

    #[test]
    fn restriction_examples() {
        assert_eq!(p("+XZ").restrict_to_region(&[0]).unwrap(), vec![true, false]);
        assert_eq!(p("+XZ").restrict_to_region(&[1]).unwrap(), vec![false, true]);
        assert_eq!(p("+II").restrict_to_region(&[0, 1]).unwrap(), vec![false; 4]);
        assert!(p("+XZ").restrict_to_region(&[2]).is_err());
    }

    #[test]
    fn text_roundtrip() {
        for s in ["+XXZI", "-YIZ", "+iX", "-iZZ", "+"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("XX".parse::<PauliString>().is_err());
        assert!("+XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn remove_range_across_words() {
        let n = 150;
        let mut s = PauliString::identity(n);
        for q in (0..n).step_by(3) {
            s.set(q, Pauli::Y);
        }
        for q in (1..n).step_by(7) {
            s.set(q, Pauli::Z);
        }
        let (lo, hi) = (37, 101);
        let mut r = s.clone();
        r.remove_range(lo, hi);
        assert_eq!(r.n_qubits(), n - (hi - lo));
        for q in 0..r.n_qubits() {
            let src = if q < lo { q } else { q + hi - lo };
            assert_eq!(r.get(q), s.get(src));
        }
        let mut a = s.clone();
        a.remove_range(0, 64);
        for q in 0..a.n_qubits() {
            assert_eq!(a.get(q), s.get(q + 64));
        }
    }

    #[test]
    fn permutation_relabels_sites() {
        let s = p("-XYZI");
        let t = s.permuted(&[3, 0, 1, 2]);
        assert_eq!(t.to_string(), "-YZIX");
    }
}
