pub mod clifford;
pub mod dense;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod gf2;
pub mod pauli;
pub mod sebd;
pub mod tableau;
pub mod validation;

pub use clifford::TwoQubitClifford;
pub use error::{Error, Result};
pub use gf2::Gf2Matrix;
pub use pauli::{Pauli, PauliString};
pub use tableau::{BlockMeasurement, MixedTableau, Outcome};
pub use diagnostics::{ClippedGenerators, Tripartition};
pub use geometry::{CircuitGeometry, Edge, LayerKind};
pub use sebd::{BoundaryStrip, CircuitRealization, CutoffPolicy, TrajectoryOptions, TrajectoryRecord};
