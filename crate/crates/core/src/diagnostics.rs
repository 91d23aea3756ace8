//! Clipped gauge and entropy diagnostics of mixed stabilizer states.
//!
//! All entropies are in bits. For stabilizer states they are integers.

use crate::error::{check_site, Error, Result};
use crate::gf2::Gf2Matrix;
use crate::pauli::PauliString;
use crate::tableau::MixedTableau;

/// Generators in clipped gauge with their 0-based support endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClippedGenerators {
    n: usize,
    gens: Vec<PauliString>,
    endpoints: Vec<(usize, usize)>,
}

impl ClippedGenerators {
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.gens
    }

    /// `(x_l, x_r)` per generator, 0-based.
    pub fn endpoints(&self) -> &[(usize, usize)] {
        &self.endpoints
    }

    /// The gauged rows as a tableau on the same sites.
    pub fn to_tableau(&self) -> MixedTableau {
        MixedTableau::from_generators(self.n, self.gens.clone())
            .expect("gauge fixing preserves tableau invariants")
    }
}

/// Put the generators of `state` into clipped gauge.
///
/// Left sweep: at each site keep at most two rows starting there, with
/// independent local actions, and push every other row's left endpoint
/// further right. Right sweep: the same for right endpoints, walking the rows
/// from the largest left endpoint down so that a row is only ever multiplied
/// by rows starting at or after its own left endpoint.
pub fn to_clipped_gauge(state: &MixedTableau) -> ClippedGenerators {
    let n = state.n_qubits();
    let mut rows = state.generators().to_vec();
    let m = rows.len();

    let mut done = 0;
    for s in 0..n {
        if done == m {
            break;
        }
        let Some(k1) = (done..m).find(|&r| rows[r].local(s) != 0) else {
            continue;
        };
        rows.swap(done, k1);
        let a = rows[done].local(s);
        let second = (done + 1..m).find(|&r| {
            let l = rows[r].local(s);
            l != 0 && l != a
        });
        let b = match second {
            Some(k2) => {
                rows.swap(done + 1, k2);
                rows[done + 1].local(s)
            }
            None => 0,
        };
        let p1 = rows[done].clone();
        let start = if b != 0 { done + 2 } else { done + 1 };
        let p2 = if b != 0 { Some(rows[done + 1].clone()) } else { None };
        for row in &mut rows[start..] {
            let l = row.local(s);
            if l == 0 {
                continue;
            }
            if l == a || (b != 0 && l == a ^ b) {
                row.mul_assign_right(&p1);
            }
            if b != 0 && (l == b || l == a ^ b) {
                row.mul_assign_right(p2.as_ref().unwrap());
            }
        }
        done = start;
    }

    let mut right = vec![0usize; m];
    let mut open: Vec<usize> = (0..m).rev().collect();
    for s in (0..n).rev() {
        if open.is_empty() {
            break;
        }
        let Some(i1) = open.iter().position(|&r| rows[r].local(s) != 0) else {
            continue;
        };
        let k1 = open[i1];
        let a = rows[k1].local(s);
        let i2 = (i1 + 1..open.len()).find(|&i| {
            let l = rows[open[i]].local(s);
            l != 0 && l != a
        });
        let p1 = rows[k1].clone();
        let (k2, b) = match i2 {
            Some(i) => (Some(open[i]), rows[open[i]].local(s)),
            None => (None, 0),
        };
        let p2 = k2.map(|k| rows[k].clone());
        for &r in &open[i1 + 1..] {
            if Some(r) == k2 {
                continue;
            }
            let l = rows[r].local(s);
            if l == 0 {
                continue;
            }
            if l == a || (b != 0 && l == a ^ b) {
                rows[r].mul_assign_right(&p1);
            }
            if b != 0 && (l == b || l == a ^ b) {
                rows[r].mul_assign_right(p2.as_ref().unwrap());
            }
        }
        right[k1] = s;
        if let Some(k) = k2 {
            right[k] = s;
        }
        open.retain(|&r| r != k1 && Some(r) != k2);
    }
    debug_assert!(open.is_empty());

    let endpoints = rows
        .iter()
        .zip(&right)
        .map(|(g, &r)| {
            let (l, _) = g.support_bounds().expect("generators are never the identity");
            debug_assert_eq!(g.support_bounds().unwrap().1, r);
            (l, r)
        })
        .collect();
    ClippedGenerators { n, gens: rows, endpoints }
}

/// Three contiguous blocks `A | C | B` covering the chain `0..n`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Tripartition {
    pub n: usize,
    pub n_a: usize,
    pub n_c: usize,
}

impl Tripartition {
    pub fn new(n: usize, n_a: usize, n_c: usize) -> Result<Self> {
        if n_a + n_c > n {
            return Err(Error::Contract(format!("blocks of sizes {n_a}+{n_c} exceed {n} sites")));
        }
        Ok(Self { n, n_a, n_c })
    }

    /// Build from explicit site lists, which must be contiguous, ordered
    /// `A` then `C` then `B`, and cover the chain.
    pub fn from_sets(n: usize, a: &[usize], c: &[usize], b: &[usize]) -> Result<Self> {
        let joined: Vec<usize> = a.iter().chain(c).chain(b).copied().collect();
        if joined.len() != n || joined.iter().enumerate().any(|(i, &s)| i != s) {
            return Err(Error::Contract("blocks must be contiguous A|C|B covering the chain".into()));
        }
        Self::new(n, a.len(), c.len())
    }

    pub fn a(&self) -> std::ops::Range<usize> {
        0..self.n_a
    }

    pub fn c(&self) -> std::ops::Range<usize> {
        self.n_a..self.n_a + self.n_c
    }

    pub fn b(&self) -> std::ops::Range<usize> {
        self.n_a + self.n_c..self.n
    }
}

/// Number of clipped generators starting in `0..cut` and ending in `cut..n`.
pub fn operator_entanglement(cg: &ClippedGenerators, cut: usize) -> usize {
    cg.endpoints.iter().filter(|&&(l, r)| l < cut && r >= cut).count()
}

/// Number of clipped generators starting in `A` and ending in `B`.
pub fn cmi_clipped(cg: &ClippedGenerators, part: &Tripartition) -> Result<usize> {
    if part.n != cg.n {
        return Err(Error::DimensionMismatch { left: part.n, right: cg.n });
    }
    let b0 = part.n_a + part.n_c;
    Ok(cg.endpoints.iter().filter(|&&(l, r)| l < part.n_a && r >= b0).count())
}

/// `(com, len)` per generator with 1-based centers; centers may be
/// half-integers.
pub fn generator_stats(cg: &ClippedGenerators) -> Vec<(f64, usize)> {
    cg.endpoints.iter().map(|&(l, r)| ((l + r) as f64 / 2.0 + 1.0, r - l)).collect()
}

fn check_region(region: &[usize], n: usize) -> Result<Vec<bool>> {
    let mut inside = vec![false; n];
    for &s in region {
        check_site(s, n)?;
        if std::mem::replace(&mut inside[s], true) {
            return Err(Error::Contract(format!("site {s} listed twice")));
        }
    }
    Ok(inside)
}

/// Von Neumann entropy of the reduced state on `region`, from the rank of the
/// generators restricted to the complement.
pub fn entropy_region(state: &MixedTableau, region: &[usize]) -> Result<usize> {
    let n = state.n_qubits();
    let inside = check_region(region, n)?;
    let comp: Vec<usize> = (0..n).filter(|&s| !inside[s]).collect();
    let gens = state.generators();
    let mut mat = Gf2Matrix::zeros(gens.len(), 2 * comp.len());
    for (i, g) in gens.iter().enumerate() {
        for (j, &s) in comp.iter().enumerate() {
            let l = g.local(s);
            if l & 2 != 0 {
                mat.set(i, 2 * j, true);
            }
            if l & 1 != 0 {
                mat.set(i, 2 * j + 1, true);
            }
        }
    }
    let m_x = gens.len() - mat.row_reduce();
    Ok(region.len() - m_x)
}

fn check_disjoint(n: usize, blocks: &[&[usize]]) -> Result<()> {
    let all: Vec<usize> = blocks.iter().flat_map(|b| b.iter().copied()).collect();
    check_region(&all, n).map(|_| ())
}

fn union(blocks: &[&[usize]]) -> Vec<usize> {
    blocks.iter().flat_map(|b| b.iter().copied()).collect()
}

/// `I(A:B) = S_A + S_B − S_AB`.
pub fn mutual_information(state: &MixedTableau, a: &[usize], b: &[usize]) -> Result<usize> {
    check_disjoint(state.n_qubits(), &[a, b])?;
    Ok(entropy_region(state, a)? + entropy_region(state, b)? - entropy_region(state, &union(&[a, b]))?)
}

/// `I(A:B|C) = S_AC + S_CB − S_C − S_ACB`.
pub fn cmi(state: &MixedTableau, a: &[usize], c: &[usize], b: &[usize]) -> Result<usize> {
    check_disjoint(state.n_qubits(), &[a, c, b])?;
    let s_ac = entropy_region(state, &union(&[a, c]))?;
    let s_cb = entropy_region(state, &union(&[c, b]))?;
    let s_c = entropy_region(state, c)?;
    let s_acb = entropy_region(state, &union(&[a, c, b]))?;
    Ok(s_ac + s_cb - s_c - s_acb)
}
