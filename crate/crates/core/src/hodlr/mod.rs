//! Hierarchically off-diagonal low-rank (HODLR) matrices and formatted arithmetic.
//!
//! Off-diagonal blocks are stored as factor pairs `U V^T` and truncated with
//! an absolute singular-value threshold after every operation that can grow
//! their rank.

mod cholesky;
mod lowrank;
mod matrix;
mod tree;

pub use lowrank::LowRank;
pub use matrix::{Block, Diagnostics, HodlrMatrix, Split};
pub use tree::{OffDiagonalBlock, PartitionTree};
