use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::dense::{clamp_l0, MAX_ITERATIONS};
use super::params::{l_update, qdwh_params};
use crate::banded::{estimate_2norm, estimate_l0, BandedSymmetric};
use crate::fastqr::{q1q2t, stacked_qr};
use crate::hodlr::{HodlrMatrix, PartitionTree};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HqdwhOptions {
    pub n_min: usize,
    pub eps: f64,
    pub delta: f64,
}

impl HqdwhOptions {
    /// Leaf size 250 for tridiagonal input, 500 otherwise; `eps = 1e-10`, `delta = 1e-15`.
    pub fn for_bandwidth(b: usize) -> Self {
        HqdwhOptions { n_min: if b == 1 { 250 } else { 500 }, eps: 1e-10, delta: 1e-15 }
    }
}

/// State after one iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationInfo {
    pub k: usize,
    /// Lower bound after the step.
    pub l: f64,
    /// Weight `c` used in the step.
    pub c: f64,
    /// Whether the step was QR-based.
    pub qr: bool,
    pub max_rank: usize,
    pub memory_bytes: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct ProjectorResult {
    /// Approximation of the projector onto the negative invariant subspace.
    pub p: HodlrMatrix,
    /// Approximation of `sign(A)`.
    pub u: HodlrMatrix,
    pub iterations: usize,
    pub alpha: f64,
    pub l0: f64,
    pub history: Vec<IterationInfo>,
}

/// Spectral projector `(I - sign(A)) / 2` of a symmetric banded matrix in HODLR form.
///
/// The first step is QR-based, using the structured factorization of
/// `[sqrt(c) A / alpha; I]`; later steps use HODLR Cholesky and two triangular solves.
pub fn hqdwh(a: &BandedSymmetric, opts: &HqdwhOptions) -> Result<ProjectorResult> {
    if opts.eps.is_nan() || opts.eps < 0.0 || opts.delta.is_nan() || opts.delta <= 0.0 {
        return Err(Error::InvalidInput(format!("eps = {} and delta = {} must be nonnegative / positive", opts.eps, opts.delta)));
    }
    let n = a.n();
    let tree = PartitionTree::new(n, opts.n_min.min(n).max(2))?;
    let alpha = estimate_2norm(a);
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Singular(0));
    }
    let l0 = clamp_l0(estimate_l0(a, alpha)?)?;
    let eps = opts.eps;
    let x0 = HodlrMatrix::from_banded(&a.scaled(1.0 / alpha), tree.n_min())?;
    let mut x = x0.clone();
    let mut l = l0;
    let mut history = Vec::new();
    while (1.0 - l).abs() > opts.delta && history.len() < MAX_ITERATIONS {
        let start = Instant::now();
        let w = qdwh_params(l)?;
        let scale = w.b / w.c;
        let k = history.len();
        x = if k == 0 {
            let qr = stacked_qr(&a.scaled(w.c.sqrt() / alpha), &tree)?;
            let prod = q1q2t(&qr.q1, &qr.q2, eps)?;
            x0.scaled(scale).add(&prod.scaled((w.a - scale) / w.c.sqrt()), eps)?
        } else {
            let z = x.multiply(&x, eps)?.scaled(w.c).add_identity(1.0).symmetrize(eps);
            let chol = z.cholesky(eps)?;
            let y = x.solve_triangular_right(&chol, false, eps)?;
            let v = y.solve_triangular_right(&chol, true, eps)?;
            x.scaled(scale).add(&v.scaled(w.a - scale), eps)?
        }
        .symmetrize(eps);
        l = l_update(l, &w).min(1.0);
        let d = x.diagnostics();
        history.push(IterationInfo {
            k,
            l,
            c: w.c,
            qr: k == 0,
            max_rank: d.max_offdiag_rank,
            memory_bytes: d.memory_bytes,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    let p = x.scaled(-0.5).add_identity(0.5);
    Ok(ProjectorResult { p, u: x, iterations: history.len(), alpha, l0, history })
}
