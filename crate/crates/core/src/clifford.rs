//! Two-qubit Clifford gates and uniform sampling from the two-qubit Clifford
//! group modulo global phase.
//!
//! A gate is stored through the images of `X_a, Z_a, X_b, Z_b` under
//! conjugation. Local bit pairs are packed as `la << 2 | lb` with
//! `la = 2·x_a + z_a`, so a 4-bit symplectic vector has bit 3 = `x_a`,
//! bit 2 = `z_a`, bit 1 = `x_b`, bit 0 = `z_b`.

use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Number of distinct gates: |Sp(4,2)| · 2^4.
pub const TWO_QUBIT_CLIFFORD_COUNT: usize = 11_520;

const BASIS: [u8; 4] = [0b1000, 0b0100, 0b0010, 0b0001];

#[inline]
fn swap_xz(v: u8) -> u8 {
    ((v & 0b1010) >> 1) | ((v & 0b0101) << 1)
}

/// Symplectic form on packed 4-bit vectors.
#[inline]
pub fn symplectic_form(u: u8, v: u8) -> u8 {
    ((u & swap_xz(v)).count_ones() & 1) as u8
}

/// All 4×4 binary matrices preserving the symplectic form, found by testing
/// every one of the 2^16 candidates. Each entry lists the images of
/// `X_a, Z_a, X_b, Z_b` as packed columns.
pub fn symplectic_group() -> &'static [[u8; 4]] {
    static GROUP: OnceLock<Vec<[u8; 4]>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let mut out = Vec::with_capacity(720);
        for code in 0u32..1 << 16 {
            let cols = [
                (code >> 12) as u8 & 0xf,
                (code >> 8) as u8 & 0xf,
                (code >> 4) as u8 & 0xf,
                code as u8 & 0xf,
            ];
            let preserves = (0..4).all(|i| {
                (i + 1..4).all(|j| {
                    symplectic_form(cols[i], cols[j]) == symplectic_form(BASIS[i], BASIS[j])
                })
            });
            if preserves {
                out.push(cols);
            }
        }
        out
    })
}

fn packed_to_pauli(v: u8, negative: bool) -> PauliString {
    let a = Pauli::from_bits(v & 0b1000 != 0, v & 0b0100 != 0);
    let b = Pauli::from_bits(v & 0b0010 != 0, v & 0b0001 != 0);
    PauliString::from_paulis(&[a, b], if negative { 2 } else { 0 })
}

fn pauli_to_packed(p: &PauliString) -> u8 {
    (p.local(0) << 2) | p.local(1)
}

/// Clifford unitary on two qubits, modulo global phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoQubitClifford {
    images: [PauliString; 4],
    // input local bits -> output bits in the low nibble, i-power in bits 4..6
    table: [u8; 16],
}

impl TwoQubitClifford {
    /// Build from the images of `X_a, Z_a, X_b, Z_b`, checking that they are
    /// Hermitian two-qubit strings with the canonical commutation relations.
    pub fn from_images(images: [PauliString; 4]) -> Result<Self> {
        for img in &images {
            if img.n_qubits() != 2 {
                return Err(Error::DimensionMismatch { left: img.n_qubits(), right: 2 });
            }
            if !img.is_hermitian() {
                return Err(Error::Contract(format!("image {img} is not Hermitian")));
            }
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let want = symplectic_form(BASIS[i], BASIS[j]) == 0;
                if images[i].commutes_unchecked(&images[j]) != want {
                    return Err(Error::Contract(format!(
                        "images {} and {} violate the symplectic relations",
                        images[i], images[j]
                    )));
                }
            }
        }
        let mut table = [0u8; 16];
        for (input, slot) in table.iter_mut().enumerate() {
            let bits = [input & 8 != 0, input & 4 != 0, input & 2 != 0, input & 1 != 0];
            // σ(x, z) = i^{xz} X^x Z^z on each site
            let pre = u8::from(bits[0] && bits[1]) + u8::from(bits[2] && bits[3]);
            let mut acc = PauliString::identity(2);
            acc.set_phase(pre);
            for (img, &on) in images.iter().zip(&bits) {
                if on {
                    acc.mul_assign_right(img);
                }
            }
            debug_assert!(acc.is_hermitian());
            *slot = pauli_to_packed(&acc) | (acc.phase() << 4);
        }
        Ok(Self { images, table })
    }

    /// Gate number `index` in `0..11520`: symplectic element `index / 16`,
    /// sign bits `index % 16`.
    pub fn from_index(index: usize) -> Self {
        assert!(index < TWO_QUBIT_CLIFFORD_COUNT, "gate index {index} out of range");
        let cols = symplectic_group()[index / 16];
        let signs = index % 16;
        let images = std::array::from_fn(|k| packed_to_pauli(cols[k], (signs >> k) & 1 == 1));
        Self::from_images(images).expect("symplectic table entries are valid gates")
    }

    pub fn identity() -> Self {
        Self::from_index(symplectic_group().iter().position(|c| *c == BASIS).unwrap() * 16)
    }

    /// CNOT with the first qubit as control.
    pub fn cnot() -> Self {
        Self::from_strs(["+XX", "+ZI", "+IX", "+ZZ"])
    }

    pub fn cz() -> Self {
        Self::from_strs(["+XZ", "+ZI", "+ZX", "+IZ"])
    }

    pub fn swap() -> Self {
        Self::from_strs(["+IX", "+IZ", "+XI", "+ZI"])
    }

    /// Hadamard on the first qubit, identity on the second.
    pub fn hadamard_first() -> Self {
        Self::from_strs(["+ZI", "+XI", "+IX", "+IZ"])
    }

    /// Phase gate S on the first qubit.
    pub fn phase_first() -> Self {
        Self::from_strs(["+YI", "+ZI", "+IX", "+IZ"])
    }

    fn from_strs(s: [&str; 4]) -> Self {
        Self::from_images(s.map(|p| p.parse().unwrap())).unwrap()
    }

    /// Shared copy of gate number `index`, built on first use.
    pub fn cached(index: usize) -> &'static Self {
        static ALL: OnceLock<Vec<TwoQubitClifford>> = OnceLock::new();
        &ALL.get_or_init(|| (0..TWO_QUBIT_CLIFFORD_COUNT).map(Self::from_index).collect())[index]
    }

    /// Uniform draw over all 11520 gates.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_index(rng.gen_range(0..TWO_QUBIT_CLIFFORD_COUNT))
    }

    /// Images of `X_a, Z_a, X_b, Z_b`.
    pub fn images(&self) -> &[PauliString; 4] {
        &self.images
    }

    /// Conjugate a local two-site action: returns the new `(la, lb)` and the
    /// i-power picked up.
    #[inline]
    pub(crate) fn conjugate_local(&self, la: u8, lb: u8) -> (u8, u8, u8) {
        let t = self.table[((la << 2) | lb) as usize];
        ((t >> 2) & 3, t & 3, t >> 4)
    }

    /// Conjugate an arbitrary two-qubit Pauli string.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.n_qubits() != 2 {
            return Err(Error::DimensionMismatch { left: p.n_qubits(), right: 2 });
        }
        let (a, b, ph) = self.conjugate_local(p.local(0), p.local(1));
        let mut out = PauliString::identity(2);
        out.set_local(0, a);
        out.set_local(1, b);
        out.set_phase(p.phase() + ph);
        Ok(out)
    }
}
