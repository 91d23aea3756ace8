//! Dense density-matrix reference for a handful of qubits.
//!
//! Qubit 0 is the most significant bit of a basis index.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::clifford::TwoQubitClifford;
use crate::error::{check_site, Error, Result};
use crate::pauli::PauliString;
use crate::tableau::MixedTableau;

pub const DENSE_MAX_QUBITS: usize = 6;

type CMat = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => ONE,
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > DENSE_MAX_QUBITS {
        Err(Error::TooLarge { n, max: DENSE_MAX_QUBITS })
    } else {
        Ok(())
    }
}

#[inline]
fn bit(index: usize, n: usize, q: usize) -> usize {
    (index >> (n - 1 - q)) & 1
}

/// Full matrix of a Pauli string including its phase.
pub fn pauli_matrix(p: &PauliString) -> Result<CMat> {
    let n = p.n_qubits();
    check_size(n)?;
    let dim = 1 << n;
    let mut m = CMat::zeros(dim, dim);
    // σ(x,z)|j⟩ = i^{xz} (−1)^{z·j} |j ⊕ x⟩ on each site
    for col in 0..dim {
        let mut row = col;
        let mut k = p.phase();
        for q in 0..n {
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            if x && z {
                k += 1;
            }
            if z && bit(col, n, q) == 1 {
                k += 2;
            }
            if x {
                row ^= 1 << (n - 1 - q);
            }
        }
        m[(row, col)] = i_pow(k);
    }
    Ok(m)
}

fn von_neumann_bits(m: &CMat) -> f64 {
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > 1e-12)
        .map(|&l| -l * l.log2())
        .sum()
}

#[derive(Clone, Debug)]
pub struct DenseState {
    n: usize,
    rho: CMat,
}

impl DenseState {
    /// `Π_k (I + g_k)/2`, normalized to unit trace.
    pub fn from_tableau(t: &MixedTableau) -> Result<Self> {
        let n = t.n_qubits();
        check_size(n)?;
        let dim = 1 << n;
        let mut rho = CMat::identity(dim, dim);
        for g in t.generators() {
            let proj = (CMat::identity(dim, dim) + pauli_matrix(g)?) * Complex64::new(0.5, 0.0);
            rho = rho * proj;
        }
        let tr = rho.trace();
        rho /= tr;
        Ok(Self { n, rho })
    }

    pub fn from_matrix(n: usize, rho: CMat) -> Result<Self> {
        check_size(n)?;
        if rho.nrows() != 1 << n || rho.ncols() != 1 << n {
            return Err(Error::DimensionMismatch { left: rho.nrows(), right: 1 << n });
        }
        Ok(Self { n, rho })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.rho
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DenseState) -> f64 {
        (&self.rho - &other.rho).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Hermitian, unit trace and eigenvalues above `−1e−10`.
    pub fn is_valid(&self) -> bool {
        let herm = (&self.rho - self.rho.adjoint()).iter().all(|c| c.norm() < 1e-9);
        let tr = (self.rho.trace() - ONE).norm() < 1e-9;
        herm && tr && self.rho.clone().symmetric_eigen().eigenvalues.iter().all(|&l| l > -1e-10)
    }

    /// Unitary of `gate` on `(a, b)` embedded into the full space.
    pub fn gate_unitary(gate: &TwoQubitClifford) -> Result<CMat> {
        let img: Vec<CMat> = gate.images().iter().map(pauli_matrix).collect::<Result<_>>()?;
        let id = CMat::identity(4, 4);
        let half = Complex64::new(0.5, 0.0);
        // common +1 eigenvector of the images of Z_a and Z_b
        let proj = (&id + &img[1]) * half * ((&id + &img[3]) * half);
        let col = (0..4)
            .max_by(|&i, &j| proj.column(i).norm().total_cmp(&proj.column(j).norm()))
            .unwrap();
        let psi0 = proj.column(col).normalize();
        let mut u = CMat::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                let mut v = psi0.clone_owned();
                if j == 1 {
                    v = &img[2] * v;
                }
                if i == 1 {
                    v = &img[0] * v;
                }
                u.set_column(2 * i + j, &v);
            }
        }
        Ok(u)
    }

    pub fn apply_two_qubit(&mut self, gate: &TwoQubitClifford, a: usize, b: usize) -> Result<()> {
        check_site(a, self.n)?;
        check_site(b, self.n)?;
        if a == b {
            return Err(Error::Contract(format!("gate on repeated site {a}")));
        }
        let u = Self::gate_unitary(gate)?;
        let n = self.n;
        let dim = 1 << n;
        let (ma, mb) = (1 << (n - 1 - a), 1 << (n - 1 - b));
        let mut full = CMat::zeros(dim, dim);
        for col in 0..dim {
            let cin = 2 * bit(col, n, a) + bit(col, n, b);
            let rest = col & !(ma | mb);
            for out in 0..4 {
                let row = rest | if out & 2 != 0 { ma } else { 0 } | if out & 1 != 0 { mb } else { 0 };
                full[(row, col)] = u[(out, cin)];
            }
        }
        self.rho = &full * &self.rho * full.adjoint();
        Ok(())
    }

    /// Probability of reading `value` on site `q`.
    pub fn probability_z(&self, q: usize, value: bool) -> Result<f64> {
        check_site(q, self.n)?;
        Ok((0..1 << self.n)
            .filter(|&i| (bit(i, self.n, q) == 1) == value)
            .map(|i| self.rho[(i, i)].re)
            .sum())
    }

    /// Project site `q` onto `|value⟩` and renormalize; returns the Born
    /// probability. Fails on a zero-probability outcome.
    pub fn postselect_z(&mut self, q: usize, value: bool) -> Result<f64> {
        let prob = self.probability_z(q, value)?;
        if prob < 1e-12 {
            return Err(Error::Contract(format!("outcome {} on site {q} has zero probability", value as u8)));
        }
        let n = self.n;
        let keep = |i: usize| (bit(i, n, q) == 1) == value;
        let dim = 1 << n;
        for i in 0..dim {
            for j in 0..dim {
                if !(keep(i) && keep(j)) {
                    self.rho[(i, j)] = ZERO;
                }
            }
        }
        self.rho /= Complex64::new(prob, 0.0);
        Ok(prob)
    }

    /// `ρ → tr_q(ρ) ⊗ I/2` as the average over the four Pauli conjugations.
    pub fn trace_replace_mixed(&mut self, q: usize) -> Result<()> {
        check_site(q, self.n)?;
        let mut acc = CMat::zeros(1 << self.n, 1 << self.n);
        for (x, z) in [(false, false), (true, false), (true, true), (false, true)] {
            let mut p = PauliString::identity(self.n);
            p.set(q, crate::pauli::Pauli::from_bits(x, z));
            let m = pauli_matrix(&p)?;
            acc += &m * &self.rho * m.adjoint();
        }
        self.rho = acc * Complex64::new(0.25, 0.0);
        Ok(())
    }

    /// Reduced density matrix on `keep`, in the listed order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<CMat> {
        let n = self.n;
        let mut inside = vec![false; n];
        for &s in keep {
            check_site(s, n)?;
            if std::mem::replace(&mut inside[s], true) {
                return Err(Error::Contract(format!("site {s} listed twice")));
            }
        }
        let k = keep.len();
        let traced: Vec<usize> = (0..n).filter(|&s| !inside[s]).collect();
        let compose = |kept: usize, env: usize| {
            let mut idx = 0;
            for (pos, &s) in keep.iter().enumerate() {
                if (kept >> (k - 1 - pos)) & 1 == 1 {
                    idx |= 1 << (n - 1 - s);
                }
            }
            for (pos, &s) in traced.iter().enumerate() {
                if (env >> (traced.len() - 1 - pos)) & 1 == 1 {
                    idx |= 1 << (n - 1 - s);
                }
            }
            idx
        };
        let mut out = CMat::zeros(1 << k, 1 << k);
        for i in 0..1 << k {
            for j in 0..1 << k {
                let mut s = ZERO;
                for e in 0..1 << traced.len() {
                    s += self.rho[(compose(i, e), compose(j, e))];
                }
                out[(i, j)] = s;
            }
        }
        Ok(out)
    }

    /// Von Neumann entropy of the reduced state on `region`, in bits.
    pub fn entropy(&self, region: &[usize]) -> Result<f64> {
        if region.is_empty() {
            return Ok(0.0);
        }
        Ok(von_neumann_bits(&self.partial_trace(region)?))
    }

    /// Entropy of `|ρ⟩⟨ρ| / tr ρ²` reduced to the doubled copy of sites
    /// `0..cut`.
    pub fn operator_entanglement(&self, cut: usize) -> Result<f64> {
        if cut > self.n {
            return Err(Error::IndexOutOfRange { site: cut, n: self.n });
        }
        let nb = self.n - cut;
        let (da, db) = (1usize << cut, 1usize << nb);
        // R[(iA, jA), (iB, jB)] = ρ[(iA, iB), (jA, jB)]
        let mut r = CMat::zeros(da * da, db * db);
        for i in 0..1 << self.n {
            for j in 0..1 << self.n {
                let (ia, ib) = (i >> nb, i & (db - 1));
                let (ja, jb) = (j >> nb, j & (db - 1));
                r[(ia * da + ja, ib * db + jb)] = self.rho[(i, j)];
            }
        }
        let gram = if da <= db { &r * r.adjoint() } else { r.adjoint() * &r };
        let norm = gram.trace();
        Ok(von_neumann_bits(&(gram / norm)))
    }
}
