//! Dense bit-packed matrices over GF(2).

use crate::pauli::{words_for, WORD};

/// Row-major binary matrix with each row packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, bits: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from boolean rows; all rows must share one length.
    pub fn from_rows<R: AsRef<[bool]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &b) in r.iter().enumerate() {
                if b {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Parse rows written as strings of `0`/`1`.
    pub fn from_strs(rows: &[&str]) -> Self {
        let rows: Vec<Vec<bool>> =
            rows.iter().map(|r| r.chars().map(|c| c == '1').collect()).collect();
        Self::from_rows(&rows)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.bits[i * self.stride + j / WORD];
        let m = 1u64 << (j % WORD);
        if v {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.bits.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `row[dst] ^= row[src]`.
    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (src_off, dst_off) = (src * s, dst * s);
        for w in 0..s {
            let v = self.bits[src_off + w];
            self.bits[dst_off + w] ^= v;
        }
    }

    /// Row-reduce in place to echelon form; returns the rank.
    pub fn row_reduce(&mut self) -> usize {
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let (w, m) = (col / WORD, 1u64 << (col % WORD));
            let Some(p) = (rank..self.rows).find(|&r| self.bits[r * self.stride + w] & m != 0)
            else {
                continue;
            };
            self.swap_rows(rank, p);
            for r in rank + 1..self.rows {
                if self.bits[r * self.stride + w] & m != 0 {
                    self.xor_row_into(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    /// GF(2) row rank; `self` is left untouched.
    pub fn rank(&self) -> usize {
        self.clone().row_reduce()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(Gf2Matrix::identity(3).rank(), 3);
        assert_eq!(Gf2Matrix::from_strs(&["110", "011", "101"]).rank(), 2);
        assert_eq!(Gf2Matrix::zeros(4, 7).rank(), 0);
        assert_eq!(Gf2Matrix::zeros(0, 0).rank(), 0);
    }

    #[test]
    fn rank_leaves_input_unmodified() {
        let m = Gf2Matrix::from_strs(&["1101", "0110", "1011"]);
        let before = m.clone();
        let _ = m.rank();
        assert_eq!(m, before);
    }

    #[test]
    fn wide_rows_span_words() {
        let mut m = Gf2Matrix::zeros(3, 200);
        m.set(0, 150, true);
        m.set(1, 150, true);
        m.set(1, 3, true);
        m.set(2, 3, true);
        assert_eq!(m.rank(), 2);
        m.set(2, 199, true);
        assert_eq!(m.rank(), 3);
    }
}
