use super::BandedSymmetric;
use crate::{Error, Result};

/// Power-iteration estimate of `||A||_2` from a normalized all-ones start.
///
/// Stops once the relative change drops below `1e-2` or after 100 steps.
pub fn estimate_2norm(a: &BandedSymmetric) -> f64 {
    let n = a.n();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut est = 0.0;
    for _ in 0..100 {
        let y = a.matvec(&x).expect("dimension is n by construction");
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let change = (norm - est).abs();
        est = norm;
        x = y.into_iter().map(|v| v / norm).collect();
        if change < 1e-2 * norm {
            break;
        }
    }
    est
}

/// LU factorization with partial pivoting of a banded matrix.
///
/// Storage follows the usual layout with `2b` super-diagonals reserved for
/// fill caused by row interchanges.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    b: usize,
    ld: usize,
    ab: Vec<f64>,
    piv: Vec<usize>,
}

impl BandedLu {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (2 * self.b + i - j) + j * self.ld
    }

    pub fn factor(a: &BandedSymmetric, scale: f64) -> Result<Self> {
        let (n, b) = (a.n(), a.bandwidth());
        let ld = 3 * b + 1;
        let mut lu = BandedLu { n, b, ld, ab: vec![0.0; ld * n], piv: vec![0; n] };
        for j in 0..n {
            for i in j.saturating_sub(b)..(j + b + 1).min(n) {
                let k = lu.idx(i, j);
                lu.ab[k] = a.get(i, j) * scale;
            }
        }
        for k in 0..n {
            let last = (k + b).min(n - 1);
            let mut p = k;
            for i in k + 1..=last {
                if lu.ab[lu.idx(i, k)].abs() > lu.ab[lu.idx(p, k)].abs() {
                    p = i;
                }
            }
            lu.piv[k] = p;
            let pivot = lu.ab[lu.idx(p, k)];
            if pivot == 0.0 {
                return Err(Error::Singular(k));
            }
            let right = (k + 2 * b).min(n - 1);
            if p != k {
                for j in k..=right {
                    let (x, y) = (lu.idx(k, j), lu.idx(p, j));
                    lu.ab.swap(x, y);
                }
            }
            for i in k + 1..=last {
                let li = lu.idx(i, k);
                let l = lu.ab[li] / pivot;
                lu.ab[li] = l;
                if l != 0.0 {
                    for j in k + 1..=right {
                        let (t, s) = (lu.idx(i, j), lu.idx(k, j));
                        lu.ab[t] -= l * lu.ab[s];
                    }
                }
            }
        }
        Ok(lu)
    }

    /// Solves `A x = y` in place.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, y: &mut [f64]) {
        let (n, b) = (self.n, self.b);
        for k in 0..n {
            y.swap(k, self.piv[k]);
            let yk = y[k];
            for i in k + 1..=(k + b).min(n - 1) {
                y[i] -= self.ab[self.idx(i, k)] * yk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = y[k];
            for j in k + 1..=(k + 2 * b).min(n - 1) {
                acc -= self.ab[self.idx(k, j)] * y[j];
            }
            y[k] = acc / self.ab[self.idx(k, k)];
        }
    }
}

fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// Hager-type lower estimate of `||M^{-1}||_1` for symmetric `M` given its LU factors.
fn inverse_norm1(lu: &BandedLu) -> f64 {
    let n = lu.n;
    let mut x = vec![1.0 / n as f64; n];
    let mut est = 0.0;
    let mut last_j = usize::MAX;
    for _ in 0..5 {
        let mut y = x.clone();
        lu.solve(&mut y);
        est = norm1(&y);
        // M is symmetric, so M^{-T} = M^{-1}
        let mut z: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
        lu.solve(&mut z);
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        let (j, zmax) = z
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |(bj, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bj, bv) });
        if zmax <= ztx || j == last_j {
            break;
        }
        last_j = j;
        x.iter_mut().for_each(|v| *v = 0.0);
        x[j] = 1.0;
    }
    // alternating test vector guards against poor convergence
    let mut alt: Vec<f64> = (0..n)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * (1.0 + i as f64 / (n - 1).max(1) as f64)
        })
        .collect();
    lu.solve(&mut alt);
    est.max(2.0 * norm1(&alt) / (3.0 * n as f64))
}

/// Lower bound estimate `||A/α||_1 / (sqrt(n) cond_1(A/α))` for the smallest
/// singular value of `A/α`.
pub fn estimate_l0(a: &BandedSymmetric, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Domain(format!("scaling alpha = {alpha} must be positive")));
    }
    let scale = 1.0 / alpha;
    let norm = a.norm1() * scale;
    let lu = BandedLu::factor(a, scale)?;
    let inv = inverse_norm1(&lu);
    let cond = norm * inv;
    Ok(norm / ((a.n() as f64).sqrt() * cond))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banded::{synth_banded, SpectrumSpec};
    use crate::dense::{sym_norm2, SpectralOracle};
    use proptest::prelude::*;

    fn sigma_min(a: &BandedSymmetric, alpha: f64) -> f64 {
        SpectralOracle::new(&a.to_dense())
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(v.abs() / alpha))
    }

    #[test]
    fn identity_and_scaling() {
        let i = BandedSymmetric::identity(8, 1).unwrap();
        assert!((estimate_2norm(&i) - 1.0).abs() < 1e-14);
        assert!((estimate_2norm(&i.scaled(2.0)) - 2.0).abs() < 1e-10);
        let l0 = estimate_l0(&i, 1.0).unwrap();
        assert!((l0 - 1.0 / 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn diagonal_two_one() {
        let a = BandedSymmetric::new(2, 1, vec![vec![2.0, 1.0], vec![0.0]]).unwrap();
        let l0 = estimate_l0(&a, 2.0).unwrap();
        assert!(l0 <= 0.5 && l0 > 0.0);
    }

    #[test]
    fn singular_detected() {
        let a = BandedSymmetric::new(3, 1, vec![vec![1.0, 1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(estimate_l0(&a, 1.0), Err(Error::Singular(_))));
    }

    #[test]
    fn lu_solve_matches_dense() {
        let spec = SpectrumSpec::uniform_two_sided(40, 0.05).unwrap();
        let a = synth_banded(&spec, 3, Some(1)).unwrap();
        let lu = BandedLu::factor(&a, 1.0).unwrap();
        let x: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let mut y = a.matvec(&x).unwrap();
        lu.solve(&mut y);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-11);
        }
    }

    #[test]
    fn synthetic_tridiagonal_64() {
        let spec = SpectrumSpec::uniform_two_sided(64, 0.1).unwrap();
        let a = synth_banded(&spec, 1, None).unwrap();
        let alpha = estimate_2norm(&a);
        let exact = sym_norm2(&a.to_dense());
        assert!(alpha >= 0.5 * exact && alpha <= 1.001 * exact);
        let l0 = estimate_l0(&a, alpha).unwrap();
        assert!(l0 > 0.0 && l0 <= sigma_min(&a, alpha) * (1.0 + 1e-8));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn l0_is_a_lower_bound(n in 4usize..128, b in 1usize..6, lg in -8.0f64..-0.5, seed in 0u64..1000) {
            prop_assume!(b < n);
            let spec = SpectrumSpec::uniform_two_sided(n, 10f64.powf(lg)).unwrap();
            let a = synth_banded(&spec, b, Some(seed)).unwrap();
            let alpha = estimate_2norm(&a);
            let exact = sym_norm2(&a.to_dense());
            prop_assert!(alpha >= 0.5 * exact && alpha <= 1.001 * exact);
            let l0 = estimate_l0(&a, alpha).unwrap();
            prop_assert!(l0 > 0.0 && l0 <= sigma_min(&a, alpha) * (1.0 + 1e-8));
        }
    }
}
