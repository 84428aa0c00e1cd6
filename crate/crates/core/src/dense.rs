//! Dense reference kernels used by the oracles and the HODLR leaves.

use nalgebra::{DMatrix, SymmetricEigen};

/// Spectral norm of a general matrix, from the largest eigenvalue of the smaller Gram matrix.
pub fn norm2(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = if m.nrows() >= m.ncols() { m.transpose() * m } else { m * m.transpose() };
    sym_norm2(&gram).sqrt()
}

/// Thin SVD `M = U diag(s) V^T` by one-sided Jacobi rotations, `s` descending.
///
/// Small singular values come out with high relative accuracy, which the
/// recompression of low-rank blocks relies on.
pub fn jacobi_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    if m.nrows() < m.ncols() {
        let (u, s, v) = jacobi_svd(&m.transpose());
        return (v, s, u);
    }
    if m.ncols() == 0 {
        return (DMatrix::zeros(m.nrows(), 0), Vec::new(), DMatrix::zeros(0, 0));
    }
    // Pivoted QR first: sweeping the transposed triangular factor converges in a
    // handful of sweeps, and the factor is only k x k.
    let qr = m.clone().col_piv_qr();
    let (q, r, perm) = qr.unpack();
    let (x, s, y) = jacobi_sweeps(r.transpose());
    // m P = Q R and R^T = Y S X^T, so m = (Q X) S (P Y)^T.
    let mut right = x;
    perm.inv_permute_rows(&mut right);
    (q * y, s, right)
}

fn jacobi_sweeps(mut a: DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (rows, k) = a.shape();
    let mut v = DMatrix::<f64>::identity(k, k);
    let (av, vv) = (a.as_mut_slice(), v.as_mut_slice());
    let mut d = vec![0.0; k];
    for _sweep in 0..80 {
        for (j, dj) in d.iter_mut().enumerate() {
            *dj = av[j * rows..(j + 1) * rows].iter().map(|x| x * x).sum();
        }
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let (alpha, beta) = (d[p], d[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma: f64 = {
                    let (x, y) = (&av[p * rows..(p + 1) * rows], &av[q * rows..(q + 1) * rows]);
                    x.iter().zip(y).map(|(xi, yi)| xi * yi).sum()
                };
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate_columns(av, rows, p, q, c, s);
                rotate_columns(vv, k, p, q, c, s);
                d[p] = (alpha - t * gamma).max(0.0);
                d[q] = (beta + t * gamma).max(0.0);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..k).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = DMatrix::zeros(rows, k);
    let mut vs = DMatrix::zeros(k, k);
    let mut s = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        if sigma > 0.0 {
            u.set_column(dst, &(a.column(src) / sigma));
        }
        vs.set_column(dst, &v.column(src));
        s.push(sigma);
    }
    (u, s, vs)
}

/// Columns `p < q` of a column-major buffer: `(x, y) <- (c x - s y, s x + c y)`.
fn rotate_columns(buf: &mut [f64], rows: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = buf.split_at_mut(q * rows);
    let x = &mut head[p * rows..(p + 1) * rows];
    let y = &mut tail[..rows];
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*xi, *yi);
        *xi = c * a - s * b;
        *yi = s * a + c * b;
    }
}

/// Singular values in descending order (one-sided Jacobi).
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    jacobi_svd(m).1
}

/// Spectral norm of a symmetric matrix (largest eigenvalue magnitude).
///
/// Only the lower triangle is read.
pub fn sym_norm2(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s.abs()))
}

/// `(M + M^T) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct SpectralOracle {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralOracle {
    pub fn new(a: &DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(a.clone());
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        SpectralOracle { eigenvalues, eigenvectors }
    }

    /// Number of negative eigenvalues.
    pub fn negative_count(&self) -> usize {
        self.eigenvalues.iter().filter(|&&l| l < 0.0).count()
    }

    /// Orthogonal projector onto the span of eigenvectors with negative eigenvalues.
    pub fn negative_projector(&self) -> DMatrix<f64> {
        let nu = self.negative_count();
        let v = self.eigenvectors.columns(0, nu);
        v * v.transpose()
    }

    /// `V sign(Λ) V^T`.
    pub fn sign(&self) -> DMatrix<f64> {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            if l < 0.0 {
                scaled.column_mut(j).neg_mut();
            }
        }
        let s = &scaled * self.eigenvectors.transpose();
        debug_assert_eq!(s.nrows(), n);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_svd_reconstructs() {
        let m = DMatrix::from_fn(7, 4, |i, j| ((i * 5 + j * 3) % 7) as f64 - 3.0 + 1e-9 * (i as f64));
        for mm in [m.clone(), m.transpose()] {
            let (u, s, v) = jacobi_svd(&mm);
            let rebuilt = &u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s.clone())) * v.transpose();
            assert!((rebuilt - &mm).amax() < 1e-13);
            assert!(s.windows(2).all(|w| w[0] >= w[1]));
            let vtv = v.transpose() * &v;
            assert!((vtv - DMatrix::identity(v.ncols(), v.ncols())).amax() < 1e-14);
        }
    }

    #[test]
    fn jacobi_svd_pivoted_wide_and_tall() {
        // Column scales reversed so the pivoted QR has to reorder.
        let tall = DMatrix::from_fn(30, 12, |i, j| {
            (((i * 7 + j * 13) % 11) as f64 - 5.0) * 10f64.powi(j as i32 - 11) + 1e-3 * ((i + j) as f64).sin()
        });
        for m in [tall.clone(), tall.transpose()] {
            let (u, s, v) = jacobi_svd(&m);
            let back = &u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s.clone())) * v.transpose();
            assert!((back - &m).norm() <= 1e-13 * m.norm());
            assert!(s.windows(2).all(|w| w[0] >= w[1]));
            let k = s.len();
            assert!((u.transpose() * &u - DMatrix::identity(k, k)).norm() < 1e-12);
            assert!((v.transpose() * &v - DMatrix::identity(k, k)).norm() < 1e-12);
        }
    }

    #[test]
    fn jacobi_svd_graded_spectrum() {
        // Q1 diag(10^-2k) Q2^T with Householder reflectors as exact orthogonal factors
        let n = 9;
        let sv: Vec<f64> = (0..n).map(|k| 10f64.powi(-2 * k as i32)).collect();
        let house = |w: Vec<f64>| {
            let w = nalgebra::DVector::from_vec(w).normalize();
            DMatrix::identity(n, n) - &w * w.transpose() * 2.0
        };
        let q1 = house((0..n).map(|i| 1.0 + i as f64).collect());
        let q2 = house((0..n).map(|i| (i as f64 - 4.0).powi(2) + 0.5).collect());
        let m = &q1 * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sv.clone())) * q2.transpose();
        let s = singular_values(&m);
        for (got, want) in s.iter().zip(&sv) {
            assert!((got - want).abs() <= 1e-15 + 1e-6 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn norms_of_diagonal() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, 2.0, 0.5]));
        assert!((norm2(&d) - 3.0).abs() < 1e-14);
        assert!((sym_norm2(&d) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn oracle_projector_of_diagonal() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0, 3.0, -0.1]));
        let o = SpectralOracle::new(&d);
        assert_eq!(o.negative_count(), 2);
        let p = o.negative_projector();
        let mut expect = DMatrix::zeros(4, 4);
        expect[(1, 1)] = 1.0;
        expect[(3, 3)] = 1.0;
        assert!((p - expect).abs().max() < 1e-14);
        let s = o.sign();
        assert!((s[(0, 0)] - 1.0).abs() < 1e-14 && (s[(1, 1)] + 1.0).abs() < 1e-14);
    }
}
