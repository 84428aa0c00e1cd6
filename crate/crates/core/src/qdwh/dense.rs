use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::params::{l_update, qdwh_params};
use crate::dense::symmetrize;
use crate::{Error, Result};

/// How many QR-based steps the dense iteration takes before switching to Cholesky.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QrMode {
    /// Only the first step.
    OneQr,
    /// Every step with `c_k > 100`.
    MultiQr,
}

#[derive(Debug, Clone)]
pub struct DenseQdwh {
    pub u: DMatrix<f64>,
    pub iterations: usize,
    /// `l_0, l_1, ...`
    pub l: Vec<f64>,
    /// `c_0, c_1, ...`
    pub c: Vec<f64>,
    /// Number of QR-based steps taken.
    pub qr_steps: usize,
}

pub(crate) const MAX_ITERATIONS: usize = 20;

pub(crate) fn clamp_l0(l0: f64) -> Result<f64> {
    if l0.is_nan() || l0 <= 0.0 {
        return Err(Error::Domain(format!("initial lower bound l0 = {l0} must be positive")));
    }
    Ok(if l0 >= 1.0 { 1.0 - 1e-12 } else { l0 })
}

/// QDWH on a dense symmetric matrix with `alpha = |A|_2` and `l0 = sigma_min(A) / alpha`
/// taken from its eigenvalues.
pub fn dense_qdwh(a: &DMatrix<f64>, delta: f64, mode: QrMode) -> Result<DenseQdwh> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::InvalidInput("expected a nonempty square matrix".into()));
    }
    let eig = a.clone().symmetric_eigenvalues();
    let alpha = eig.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    let smin = eig.iter().fold(f64::INFINITY, |m, &x| m.min(x.abs()));
    if smin == 0.0 {
        return Err(Error::Singular(0));
    }
    dense_qdwh_with(a, alpha, smin / alpha, delta, mode)
}

/// QDWH with caller-provided scaling `alpha` and lower bound `l0`.
pub fn dense_qdwh_with(a: &DMatrix<f64>, alpha: f64, l0: f64, delta: f64, mode: QrMode) -> Result<DenseQdwh> {
    let n = a.nrows();
    let mut x = a / alpha;
    let mut l = clamp_l0(l0)?;
    let mut out = DenseQdwh { u: DMatrix::zeros(0, 0), iterations: 0, l: vec![l], c: Vec::new(), qr_steps: 0 };
    while (1.0 - l).abs() > delta && out.iterations < MAX_ITERATIONS {
        let w = qdwh_params(l)?;
        let use_qr = match mode {
            QrMode::OneQr => out.iterations == 0,
            QrMode::MultiQr => w.c > 100.0,
        };
        let scale = w.b / w.c;
        x = if use_qr {
            out.qr_steps += 1;
            let mut stacked = DMatrix::zeros(2 * n, n);
            stacked.view_mut((0, 0), (n, n)).copy_from(&(&x * w.c.sqrt()));
            stacked.view_mut((n, 0), (n, n)).fill_with_identity();
            let q = stacked.qr().q();
            let q1 = q.view((0, 0), (n, n));
            let q2 = q.view((n, 0), (n, n));
            &x * scale + (q1 * q2.transpose()) * ((w.a - scale) / w.c.sqrt())
        } else {
            let z = DMatrix::identity(n, n) + (x.transpose() * &x) * w.c;
            let chol = symmetrize(&z).cholesky().ok_or(Error::NotPositiveDefinite(0))?;
            // X Z^{-1} = (Z^{-1} X^T)^T
            let v = chol.solve(&x.transpose()).transpose();
            &x * scale + v * (w.a - scale)
        };
        x = symmetrize(&x);
        l = l_update(l, &w).min(1.0);
        out.c.push(w.c);
        out.l.push(l);
        out.iterations += 1;
    }
    out.u = x;
    Ok(out)
}
