//! Symmetric banded matrices in compact lower-band storage.

mod estimate;
mod givens;
mod io;
mod synth;

pub use estimate::{estimate_2norm, estimate_l0, BandedLu};
pub use givens::{make_givens, GivensRotation, GivensSequence};
pub use io::{parse_sbm, read_sbm, to_sbm_string, write_sbm};
pub use synth::{synth_banded, Distribution, SpectrumSpec};

use crate::{Error, Result};
use nalgebra::DMatrix;

/// Symmetric `n x n` matrix with `b` nonzero sub/super-diagonals.
///
/// `bands[d][i]` holds `A[i + d][i]` for `0 <= d <= b`, `0 <= i < n - d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymmetric {
    n: usize,
    b: usize,
    bands: Vec<Vec<f64>>,
}

impl BandedSymmetric {
    pub fn new(n: usize, b: usize, bands: Vec<Vec<f64>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("dimension n = {n} must be at least 2")));
        }
        if b == 0 || b >= n {
            return Err(Error::InvalidInput(format!(
                "bandwidth b = {b} must satisfy 1 <= b < n = {n}"
            )));
        }
        if bands.len() != b + 1 {
            return Err(Error::DimensionMismatch { expected: b + 1, found: bands.len() });
        }
        for (d, band) in bands.iter().enumerate() {
            if band.len() != n - d {
                return Err(Error::DimensionMismatch { expected: n - d, found: band.len() });
            }
            if band.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite entry on diagonal {d}")));
            }
        }
        Ok(BandedSymmetric { n, b, bands })
    }

    pub fn zeros(n: usize, b: usize) -> Result<Self> {
        let bands = (0..=b.min(n)).map(|d| vec![0.0; n.saturating_sub(d)]).collect();
        Self::new(n, b, bands)
    }

    /// The identity stored with bandwidth `b` (off-diagonals zero).
    pub fn identity(n: usize, b: usize) -> Result<Self> {
        let mut a = Self::zeros(n, b)?;
        a.bands[0].iter_mut().for_each(|v| *v = 1.0);
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.b
    }

    pub fn bands(&self) -> &[Vec<f64>] {
        &self.bands
    }

    /// Entry `A[i][j]`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.b {
            0.0
        } else {
            self.bands[d][lo]
        }
    }

    /// Builds a banded matrix from the lower triangle of a dense matrix.
    ///
    /// Fails if the lower triangle has nonzeros outside the band.
    pub fn from_dense(a: &DMatrix<f64>, b: usize) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
        }
        for j in 0..n {
            for i in (j + b + 1).min(n)..n {
                if a[(i, j)] != 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i}, {j}) lies outside bandwidth {b}"
                    )));
                }
            }
        }
        let bands = (0..=b.min(n.saturating_sub(1)))
            .map(|d| (0..n - d).map(|i| a[(i + d, i)]).collect())
            .collect();
        Self::new(n, b, bands)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (d, band) in self.bands.iter().enumerate() {
            for (i, &v) in band.iter().enumerate() {
                m[(i + d, i)] = v;
                m[(i, i + d)] = v;
            }
        }
        m
    }

    /// Exact symmetric product `A x` in `O(bn)` operations.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        let mut y: Vec<f64> = self.bands[0].iter().zip(x).map(|(a, x)| a * x).collect();
        for (d, band) in self.bands.iter().enumerate().skip(1) {
            for (i, &v) in band.iter().enumerate() {
                y[i + d] += v * x[i];
                y[i] += v * x[i + d];
            }
        }
        Ok(y)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let bands = self
            .bands
            .iter()
            .map(|band| band.iter().map(|v| v * factor).collect())
            .collect();
        BandedSymmetric { n: self.n, b: self.b, bands }
    }

    /// `A - mu I`.
    pub fn shifted(&self, mu: f64) -> Self {
        let mut out = self.clone();
        out.bands[0].iter_mut().for_each(|v| *v -= mu);
        out
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut sums: Vec<f64> = self.bands[0].iter().map(|v| v.abs()).collect();
        for (d, band) in self.bands.iter().enumerate().skip(1) {
            for (i, &v) in band.iter().enumerate() {
                sums[i] += v.abs();
                sums[i + d] += v.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }
}

/// Free-function form of [`BandedSymmetric::matvec`].
pub fn band_matvec(a: &BandedSymmetric, x: &[f64]) -> Result<Vec<f64>> {
    a.matvec(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validation() {
        assert!(BandedSymmetric::zeros(1, 1).is_err());
        assert!(BandedSymmetric::zeros(3, 3).is_err());
        assert!(BandedSymmetric::zeros(3, 0).is_err());
        assert!(BandedSymmetric::new(3, 1, vec![vec![1.0; 3], vec![f64::NAN; 2]]).is_err());
        assert!(BandedSymmetric::new(3, 1, vec![vec![1.0; 3], vec![0.0; 3]]).is_err());
    }

    #[test]
    fn two_by_two_dense() {
        let a = BandedSymmetric::new(2, 1, vec![vec![2.0, 2.0], vec![1.0]]).unwrap();
        let d = a.to_dense();
        assert_eq!(d, DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]));
        assert_eq!(BandedSymmetric::from_dense(&d, 1).unwrap(), a);
    }

    #[test]
    fn tridiagonal_first_column() {
        let a = BandedSymmetric::new(4, 1, vec![vec![2.0; 4], vec![1.0; 3]]).unwrap();
        let y = band_matvec(&a, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(y, vec![2.0, 1.0, 0.0, 0.0]);
        assert!(a.matvec(&[1.0]).is_err());
    }

    #[test]
    fn outside_band_is_zero() {
        let a = BandedSymmetric::new(5, 2, vec![vec![1.0; 5], vec![2.0; 4], vec![3.0; 3]]).unwrap();
        let d = a.to_dense();
        for i in 0..5usize {
            for j in 0..5usize {
                if i.abs_diff(j) > 2 {
                    assert_eq!(d[(i, j)], 0.0);
                }
            }
        }
        assert!(BandedSymmetric::from_dense(&d, 1).is_err());
        assert_eq!(a.norm1(), 1.0 + 2.0 * 2.0 + 2.0 * 3.0);
    }

    fn random_banded() -> impl Strategy<Value = BandedSymmetric> {
        (2usize..128)
            .prop_flat_map(|n| (Just(n), 1usize..n.min(9)))
            .prop_flat_map(|(n, b)| {
                let bands = (0..=b)
                    .map(|d| proptest::collection::vec(-1.0f64..1.0, n - d))
                    .collect::<Vec<_>>();
                (Just(n), Just(b), bands)
            })
            .prop_map(|(n, b, bands)| BandedSymmetric::new(n, b, bands).unwrap())
    }

    proptest! {
        #[test]
        fn matvec_matches_dense(a in random_banded(), seed in 0u64..1000) {
            let n = a.n();
            let x: Vec<f64> = (0..n).map(|i| ((i as u64 * 7919 + seed) % 101) as f64 / 50.0 - 1.0).collect();
            let y = a.matvec(&x).unwrap();
            let d = a.to_dense();
            let yd = &d * nalgebra::DVector::from_vec(x.clone());
            let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let an = crate::dense::sym_norm2(&d);
            for i in 0..n {
                prop_assert!((y[i] - yd[i]).abs() <= 1e-14 * an.max(1.0) * xn.max(1.0));
            }
        }

        #[test]
        fn dense_round_trip(a in random_banded()) {
            let back = BandedSymmetric::from_dense(&a.to_dense(), a.bandwidth()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
