use nalgebra::{DMatrix, QR};

use crate::dense::jacobi_svd;

/// Factored block `U V^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRank {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
}

impl LowRank {
    pub fn new(u: DMatrix<f64>, v: DMatrix<f64>) -> Self {
        assert_eq!(u.ncols(), v.ncols(), "factor ranks differ");
        LowRank { u, v }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        LowRank { u: DMatrix::zeros(rows, 0), v: DMatrix::zeros(cols, 0) }
    }

    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn cols(&self) -> usize {
        self.v.nrows()
    }

    pub fn rank(&self) -> usize {
        self.u.ncols()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        &self.u * self.v.transpose()
    }

    pub fn transpose(&self) -> LowRank {
        LowRank { u: self.v.clone(), v: self.u.clone() }
    }

    pub fn scaled(&self, alpha: f64) -> LowRank {
        LowRank { u: &self.u * alpha, v: self.v.clone() }
    }

    /// The sub-block at rows `r0..r0 + rn`, columns `c0..c0 + cn`.
    pub(crate) fn sub(&self, r0: usize, rn: usize, c0: usize, cn: usize) -> LowRank {
        LowRank { u: rows_of(&self.u, r0, rn), v: rows_of(&self.v, c0, cn) }
    }

    /// `self + other` with concatenated factors (no recompression).
    pub fn concat(&self, other: &LowRank) -> LowRank {
        LowRank { u: hcat(&self.u, &other.u), v: hcat(&self.v, &other.v) }
    }

    /// Best approximation that drops every singular value `<= eps`.
    ///
    /// Both factors are orthogonalized by QR and the small core `R_u R_v^T`
    /// is diagonalized by an SVD, so the discarded part has 2-norm at most `eps`.
    pub fn truncate(&self, eps: f64) -> LowRank {
        let (rows, cols, k) = (self.rows(), self.cols(), self.rank());
        if k == 0 || rows == 0 || cols == 0 {
            return LowRank::zero(rows, cols);
        }
        let (qu, ru) = thin_qr(&self.u);
        let (qv, rv) = thin_qr(&self.v);
        let core = &ru * rv.transpose();
        let (w, sv, z) = jacobi_svd(&core);
        let keep = sv.iter().take_while(|&&s| s > eps).count();
        let mut wk = w.columns(0, keep).into_owned();
        for (i, &s) in sv.iter().take(keep).enumerate() {
            wk.column_mut(i).scale_mut(s);
        }
        let zk = z.columns(0, keep).into_owned();
        LowRank { u: qu * wk, v: qv * zk }
    }
}

fn thin_qr(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = QR::new(m.clone());
    (qr.q(), qr.r())
}

/// `term + pending`, recompressed when there is something to add.
pub(crate) fn merge(term: LowRank, pending: Option<&LowRank>, eps: f64) -> LowRank {
    match pending {
        Some(t) => term.concat(t).truncate(eps),
        None => term,
    }
}

pub(crate) fn hcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert_eq!(a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// Rows `start..start + len` of `m`.
pub(crate) fn rows_of(m: &DMatrix<f64>, start: usize, len: usize) -> DMatrix<f64> {
    m.rows(start, len).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::norm2;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn with_singular_values(rows: usize, cols: usize, sv: &[f64], seed: u64) -> LowRank {
        let k = sv.len();
        let a = DMatrix::from_fn(rows, k, |i, j| ((i * 31 + j * 17 + seed as usize) as f64).sin());
        let b = DMatrix::from_fn(cols, k, |i, j| ((i * 13 + j * 29 + 3 * seed as usize) as f64).cos());
        let (qa, _) = thin_qr(&a);
        let (qb, _) = thin_qr(&b);
        let s = DMatrix::from_diagonal(&DVector::from_column_slice(sv));
        LowRank::new(qa * s, qb)
    }

    #[test]
    fn keeps_values_above_threshold() {
        let b = with_singular_values(20, 15, &[1.0, 1e-3], 1);
        let t = b.truncate(1e-10);
        assert_eq!(t.rank(), 2);
        assert!(norm2(&(t.to_dense() - b.to_dense())) < 1e-14);
    }

    #[test]
    fn drops_values_below_threshold() {
        let b = with_singular_values(20, 15, &[1.0, 1e-12], 2);
        let t = b.truncate(1e-10);
        assert_eq!(t.rank(), 1);
        assert!(norm2(&(t.to_dense() - b.to_dense())) <= 1e-12 * (1.0 + 1e-6));
    }

    #[test]
    fn redundant_factors_recompress() {
        let b = with_singular_values(40, 30, &[5.0, 3.0, 2.0, 1.0, 0.5, 0.25, 0.1, 0.05], 3);
        let doubled = b.scaled(0.5).concat(&b.scaled(0.5));
        let half_twice = doubled.concat(&LowRank::new(b.u.clone() * 0.0, b.v.clone()));
        assert_eq!(half_twice.rank(), 24);
        let t = half_twice.truncate(1e-10);
        assert_eq!(t.rank(), 8);
        assert!((t.to_dense() - b.to_dense()).abs().max() < 1e-13);
    }

    #[test]
    fn zero_rank_and_empty() {
        let z = LowRank::zero(5, 4);
        assert_eq!(z.truncate(1e-10).rank(), 0);
        assert_eq!(z.to_dense(), DMatrix::zeros(5, 4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn dropped_part_is_below_eps(rows in 1usize..60, cols in 1usize..60, k in 1usize..20, seed in 0u64..500, le in -12.0f64..-2.0) {
            let eps = 10f64.powf(le);
            let u = DMatrix::from_fn(rows, k, |i, j| ((i * 7 + j * 3 + seed as usize) as f64 * 0.37).sin() * 10f64.powi(-(j as i32)));
            let v = DMatrix::from_fn(cols, k, |i, j| ((i * 5 + j * 11 + seed as usize) as f64 * 0.91).cos());
            let b = LowRank::new(u, v);
            let t = b.truncate(eps);
            let err = norm2(&(b.to_dense() - t.to_dense()));
            prop_assert!(err <= eps * (1.0 + 1e-8) + 1e-14 * norm2(&b.to_dense()));
            prop_assert!(t.rank() <= rows.min(cols).min(k));
        }
    }
}
