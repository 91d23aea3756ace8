pub mod aggregate;
pub mod analyze;
pub mod cli;
pub mod config;
pub mod error;
pub mod fit;
pub mod histogram;
pub mod model;
pub mod seeds;
pub mod sweep;

pub use aggregate::{cmi_profile, PointAggregate};
pub use analyze::{analyze_dir, fit_points, FitResults};
pub use config::{ConfigOverrides, GridPoint, SweepConfig};
pub use error::{Error, Result};
pub use histogram::{aggregate_histograms, Histogram};
pub use sweep::{run_sweep, simulate_point};
