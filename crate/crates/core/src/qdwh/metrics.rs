use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dense::{sym_norm2, symmetrize, SpectralOracle};
use crate::{Error, Result};

/// Accuracy of a computed sign function `U` against the eigendecomposition of `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    /// `|U^2 - I|_2`
    pub e_id: f64,
    /// `|trace U - trace sign(A)|`
    pub e_trace: f64,
    /// `|(I - U)/2 - P_neg|_2`
    pub e_sp: f64,
}

pub fn error_metrics(u: &DMatrix<f64>, oracle: &SpectralOracle) -> Result<ErrorMetrics> {
    let n = oracle.eigenvalues.len();
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u.nrows() });
    }
    let eye = DMatrix::<f64>::identity(n, n);
    let e_id = sym_norm2(&symmetrize(&(u * u - &eye)));
    let nu = oracle.negative_count();
    let e_trace = (u.trace() - (n as f64 - 2.0 * nu as f64)).abs();
    let p = (&eye - u) * 0.5;
    let e_sp = sym_norm2(&symmetrize(&(p - oracle.negative_projector())));
    Ok(ErrorMetrics { e_id, e_trace, e_sp })
}
