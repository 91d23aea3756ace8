//! Brickwork layer schedule on an `L × W` grid with open boundaries, and
//! past light cones of output columns.
//!
//! Rows and columns are 0-based here; "odd" and "even" in the layer names
//! refer to 1-based positions, so `VerticalOdd` pairs rows `(0,1), (2,3), …`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LayerKind {
    VerticalOdd,
    VerticalEven,
    HorizontalOdd,
    HorizontalEven,
}

impl LayerKind {
    pub fn is_horizontal(self) -> bool {
        matches!(self, LayerKind::HorizontalOdd | LayerKind::HorizontalEven)
    }

    /// 0-based offset of the lower end of every edge, modulo 2.
    fn parity(self) -> usize {
        match self {
            LayerKind::VerticalOdd | LayerKind::HorizontalOdd => 0,
            LayerKind::VerticalEven | LayerKind::HorizontalEven => 1,
        }
    }
}

pub const DEFAULT_CYCLE: [LayerKind; 4] = [
    LayerKind::VerticalOdd,
    LayerKind::VerticalEven,
    LayerKind::HorizontalOdd,
    LayerKind::HorizontalEven,
];

/// Nearest-neighbour edge from `(row, col)` to `(row + 1, col)` or
/// `(row, col + 1)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub row: usize,
    pub col: usize,
    pub horizontal: bool,
}

impl Edge {
    pub fn sites(self) -> ((usize, usize), (usize, usize)) {
        if self.horizontal {
            ((self.row, self.col), (self.row, self.col + 1))
        } else {
            ((self.row, self.col), (self.row + 1, self.col))
        }
    }

    /// Largest column touched.
    pub fn max_col(self) -> usize {
        self.col + usize::from(self.horizontal)
    }

    /// Identifier unique within a grid of width `w`.
    pub fn id(self, w: usize) -> u64 {
        ((self.row * w + self.col) as u64) << 1 | u64::from(self.horizontal)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitGeometry {
    l: usize,
    w: usize,
    t: usize,
    cycle: [LayerKind; 4],
}

impl CircuitGeometry {
    /// Default cycle: vertical odd, vertical even, horizontal odd,
    /// horizontal even. `t = 0` gives an empty circuit.
    pub fn new(l: usize, w: usize, t: usize) -> Result<Self> {
        Self::with_cycle(l, w, t, DEFAULT_CYCLE)
    }

    /// Any ordering of the four layer kinds.
    pub fn with_cycle(l: usize, w: usize, t: usize, cycle: [LayerKind; 4]) -> Result<Self> {
        if l < 2 || w < 2 {
            return Err(Error::Domain(format!("grid {l}x{w} is smaller than 2x2")));
        }
        let mut sorted = cycle;
        sorted.sort_by_key(|k| *k as u8);
        if sorted != DEFAULT_CYCLE {
            return Err(Error::Domain("cycle must use each layer kind exactly once".into()));
        }
        Ok(Self { l, w, t, cycle })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn cycle(&self) -> [LayerKind; 4] {
        self.cycle
    }

    pub fn n_qubits(&self) -> usize {
        self.l * self.w
    }

    /// Kind of 0-based layer `k`.
    pub fn layer_kind(&self, k: usize) -> LayerKind {
        self.cycle[k % 4]
    }

    /// Edges of 0-based layer `k` whose largest column lies in `cols`, in
    /// row-major order.
    pub fn layer_edges_ending_in(&self, k: usize, cols: std::ops::Range<usize>) -> Vec<Edge> {
        let kind = self.layer_kind(k);
        let par = kind.parity();
        let mut out = Vec::new();
        if kind.is_horizontal() {
            for row in 0..self.l {
                for end in cols.clone() {
                    if end >= 1 && end < self.w && (end - 1) % 2 == par {
                        out.push(Edge { row, col: end - 1, horizontal: true });
                    }
                }
            }
        } else {
            for row in (par..self.l.saturating_sub(1)).step_by(2) {
                for col in cols.clone().filter(|&c| c < self.w) {
                    out.push(Edge { row, col, horizontal: false });
                }
            }
        }
        out
    }

    /// All edges of 0-based layer `k`.
    pub fn layer(&self, k: usize) -> Vec<Edge> {
        self.layer_edges_ending_in(k, 0..self.w)
    }

    /// Number of leading columns that must be simulated at each level
    /// `0..=T` (level `k` = after layer `k`) to sample columns `0..=col`.
    pub fn covered_columns(&self, col: usize) -> Vec<usize> {
        let mut h = vec![0; self.t + 1];
        h[self.t] = (col + 1).min(self.w);
        for k in (0..self.t).rev() {
            let kind = self.layer_kind(k);
            let hk = h[k + 1];
            let widen = kind.is_horizontal() && hk < self.w && (hk - 1) % 2 == kind.parity();
            h[k] = hk + usize::from(widen);
        }
        h
    }

    /// Past light cone of output column `col`.
    pub fn past_light_cone(&self, col: usize) -> Result<LightCone> {
        if col >= self.w {
            return Err(Error::IndexOutOfRange { site: col, n: self.w });
        }
        let mut columns = vec![(col, col); self.t + 1];
        let mut gates = Vec::new();
        for k in (0..self.t).rev() {
            let (lo, hi) = columns[k + 1];
            let kind = self.layer_kind(k);
            let (mut nlo, mut nhi) = (lo, hi);
            if kind.is_horizontal() {
                if lo >= 1 && (lo - 1) % 2 == kind.parity() {
                    nlo = lo - 1;
                }
                if hi + 1 < self.w && hi % 2 == kind.parity() {
                    nhi = hi + 1;
                }
            }
            columns[k] = (nlo, nhi);
            for e in self.layer_edges_ending_in(k, nlo..nhi + 1) {
                if e.col >= nlo {
                    gates.push((k, e));
                }
            }
        }
        let (lo, hi) = columns[0];
        let qubits = (lo..=hi).flat_map(|c| (0..self.l).map(move |r| (r, c))).collect();
        Ok(LightCone { columns, qubits, gates })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LightCone {
    /// Inclusive column interval at each level `0..=T`.
    pub columns: Vec<(usize, usize)>,
    /// `(row, col)` of every input qubit in the cone.
    pub qubits: Vec<(usize, usize)>,
    /// `(layer, edge)` walked backwards from the last layer, so the deepest
    /// layer comes last.
    pub gates: Vec<(usize, Edge)>,
}
