//! Structured QR of `[cA; I]` for banded `A` and HODLR assembly of its `Q` factor.

mod assemble;
mod reduce;

pub use assemble::{assemble_q, q1q2t};
pub use reduce::{banded_rotation_count, reduce_banded, reduce_tridiag, UpperBanded};

use crate::banded::{BandedSymmetric, GivensSequence};
use crate::hodlr::{HodlrMatrix, PartitionTree};
use crate::Result;

/// Rotations, triangular factor and HODLR blocks of the orthogonal factor.
#[derive(Debug, Clone)]
pub struct StackedQr {
    pub givens: GivensSequence,
    pub r: UpperBanded,
    pub q1: HodlrMatrix,
    pub q2: HodlrMatrix,
}

/// QR of `[cA; I]` with `Q1`, `Q2` assembled on `tree`.
///
/// Bandwidth 1 uses the tridiagonal schedule, wider bands the banded one.
pub fn stacked_qr(ca: &BandedSymmetric, tree: &PartitionTree) -> Result<StackedQr> {
    let b = ca.bandwidth();
    let (givens, r) = if b == 1 { reduce_tridiag(ca)? } else { reduce_banded(ca) };
    let (q1, q2) = assemble_q(&givens, tree, b)?;
    Ok(StackedQr { givens, r, q1, q2 })
}
