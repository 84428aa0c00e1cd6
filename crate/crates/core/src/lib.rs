//! Spectral projectors of symmetric banded matrices.
//!
//! The projector onto the negative invariant subspace of a symmetric banded
//! matrix `A` is computed as `(I - sign(A)) / 2`, where the sign function is
//! obtained with QDWH iterations carried out in the HODLR format. The first
//! iterate uses a structured Givens QR of the stacked matrix `[cA; I]`; later
//! iterates use HODLR Cholesky factorizations.
//!
//! Dense reference implementations and Zolotarev-based a priori bounds are
//! provided for verification at moderate sizes.

pub mod banded;
pub mod dense;
mod error;
pub mod fastqr;
pub mod hodlr;
pub mod qdwh;
pub mod theory;

pub use error::{Error, Result};
