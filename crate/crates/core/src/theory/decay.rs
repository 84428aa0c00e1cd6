use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::zolotarev::{decay_index, sv_decay_bound};
use crate::dense::singular_values;
use crate::hodlr::PartitionTree;
use crate::{Error, Result};

/// Relative slack granted to every bound check.
pub const DECAY_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayViolation {
    pub row_start: usize,
    pub col_start: usize,
    pub rows: usize,
    pub cols: usize,
    pub m: usize,
    pub sigma: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// `(block, m)` pairs examined.
    pub checks: usize,
    pub violations: Vec<DecayViolation>,
    /// Largest `sigma / max(bound, noise_floor)` over all checks; at most `1 + DECAY_SLACK` when passing.
    pub worst_ratio: f64,
    /// Singular values below this are rounding noise of the dense projector: `n * eps_mach`.
    pub noise_floor: f64,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks singular value `2mb + 1` of every off-diagonal block of a dense
/// projector against the a priori decay bound, for every admissible `m`.
pub fn verify_decay(p: &DMatrix<f64>, b: usize, gap: f64, tree: &PartitionTree) -> Result<DecayReport> {
    let n = tree.n();
    if p.nrows() != n || p.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.nrows() });
    }
    if b == 0 {
        return Err(Error::InvalidInput("bandwidth must be positive".into()));
    }
    if !(gap > 0.0 && gap < 1.0) {
        return Err(Error::Domain(format!("gap = {gap} must lie in (0, 1)")));
    }
    let noise_floor = n as f64 * f64::EPSILON;
    let mut report = DecayReport { checks: 0, violations: Vec::new(), worst_ratio: 0.0, noise_floor };
    for blk in tree.off_diagonal_blocks() {
        let block = p.view((blk.row_start, blk.col_start), (blk.rows, blk.cols)).into_owned();
        let sv = singular_values(&block);
        for m in 1.. {
            let idx = decay_index(m, b);
            if idx > sv.len() {
                break;
            }
            let sigma = sv[idx - 1];
            let bound = sv_decay_bound(m, gap);
            let ratio = sigma / bound.max(noise_floor);
            report.checks += 1;
            report.worst_ratio = report.worst_ratio.max(ratio);
            if ratio > 1.0 + DECAY_SLACK {
                report.violations.push(DecayViolation {
                    row_start: blk.row_start,
                    col_start: blk.col_start,
                    rows: blk.rows,
                    cols: blk.cols,
                    m,
                    sigma,
                    bound,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_projector_has_no_coupling() {
        let mut p = DMatrix::zeros(32, 32);
        for i in (0..32).step_by(3) {
            p[(i, i)] = 1.0;
        }
        let tree = PartitionTree::new(32, 4).unwrap();
        let r = verify_decay(&p, 1, 0.1, &tree).unwrap();
        assert!(r.passed());
        assert_eq!(r.worst_ratio, 0.0);
        assert!(r.checks > 0);
    }

    #[test]
    fn flags_slow_decay() {
        // Dense rank-16 coupling cannot satisfy a bound that decays in m.
        let v = DMatrix::from_fn(64, 16, |i, j| (((i + 1) * (j + 3)) as f64).sin());
        let q = v.qr().q();
        let p = &q * q.transpose();
        let tree = PartitionTree::new(64, 8).unwrap();
        let r = verify_decay(&p, 1, 0.5, &tree).unwrap();
        assert!(!r.passed());
        assert!(r.worst_ratio > 1.0);
    }

    #[test]
    fn input_checks() {
        let tree = PartitionTree::new(8, 2).unwrap();
        assert!(verify_decay(&DMatrix::zeros(7, 7), 1, 0.1, &tree).is_err());
        assert!(verify_decay(&DMatrix::zeros(8, 8), 0, 0.1, &tree).is_err());
        assert!(verify_decay(&DMatrix::zeros(8, 8), 1, 1.0, &tree).is_err());
    }
}
