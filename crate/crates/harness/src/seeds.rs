use sebd_core::sebd::hash_words;

use crate::config::GridPoint;

/// Seed of one realization, a hash of the master seed, the grid point's
/// parameters and the realization index. Adding grid values to a sweep does
/// not change the seeds of existing points.
pub fn realization_seed(master: u64, point: &GridPoint, index: u64) -> u64 {
    hash_words(&[master, 0x5eed, point.l as u64, point.w as u64, point.t as u64, point.p.to_bits(), index])
}
