use super::{make_givens, BandedSymmetric};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// `floor(n/2)` values spread evenly over `[-1, -gap]` and the rest over `[gap, 1]`.
    UniformTwoSided,
    Custom,
}

/// Prescribed spectrum for a synthetic test matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    pub eigenvalues: Vec<f64>,
    pub gap: f64,
    pub distribution: Distribution,
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

impl SpectrumSpec {
    /// Eigenvalues evenly spaced in `[-1, -gap] ∪ [gap, 1]`, sorted ascending.
    pub fn uniform_two_sided(n: usize, gap: f64) -> Result<Self> {
        if !(gap > 0.0 && gap < 1.0) {
            return Err(Error::InvalidInput(format!("gap {gap} must lie in (0, 1)")));
        }
        let neg = n / 2;
        let pos = n - neg;
        // A single value on either side sits at the edge of the gap.
        let mut eigenvalues: Vec<f64> = linspace(gap, 1.0, neg).into_iter().map(|v| -v).collect();
        eigenvalues.reverse();
        eigenvalues.extend(linspace(gap, 1.0, pos));
        Ok(SpectrumSpec { eigenvalues, gap, distribution: Distribution::UniformTwoSided })
    }

    pub fn custom(eigenvalues: Vec<f64>) -> Self {
        let gap = eigenvalues.iter().fold(f64::INFINITY, |g, v| g.min(v.abs()));
        SpectrumSpec { eigenvalues, gap, distribution: Distribution::Custom }
    }

    pub fn negative_count(&self) -> usize {
        self.eigenvalues.iter().filter(|&&v| v < 0.0).count()
    }
}

/// Lower-band working storage with one extra diagonal for the bulge.
struct Work {
    n: usize,
    w: usize,
    bands: Vec<Vec<f64>>,
}

impl Work {
    fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        if hi - lo > self.w {
            0.0
        } else {
            self.bands[hi - lo][lo]
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(hi - lo <= self.w || v == 0.0);
        if hi - lo <= self.w {
            self.bands[hi - lo][lo] = v;
        }
    }

    /// Similarity `G A G^T` with `G` rotating indices `u < v`.
    fn rotate(&mut self, u: usize, v: usize, c: f64, s: f64) {
        let lo = u.saturating_sub(self.w);
        let hi = (v + self.w + 1).min(self.n);
        for k in lo..hi {
            if k == u || k == v {
                continue;
            }
            let (x, y) = (self.get(u, k), self.get(v, k));
            self.set(u, k, c * x + s * y);
            self.set(v, k, -s * x + c * y);
        }
        let (a, b, d) = (self.get(u, u), self.get(v, u), self.get(v, v));
        // rows first, then columns
        let (ra, rb) = (c * a + s * b, c * b + s * d);
        let (rc, rd) = (-s * a + c * b, -s * b + c * d);
        self.set(u, u, c * ra + s * rb);
        self.set(v, u, c * rc + s * rd);
        self.set(v, v, -s * rc + c * rd);
    }
}

/// Builds a `b`-banded symmetric matrix with the prescribed eigenvalues.
///
/// Starting from `diag(λ)`, each index pair `(i-1, i)` (bottom to top) is
/// mixed by a rotation built from `[a_ii; 1]`, and the resulting fill
/// outside the band is chased to the bottom right corner. `shuffle_seed`
/// permutes the eigenvalues on the diagonal before the rotations.
pub fn synth_banded(spec: &SpectrumSpec, b: usize, shuffle_seed: Option<u64>) -> Result<BandedSymmetric> {
    let n = spec.eigenvalues.len();
    if n < 2 || b == 0 || b >= n {
        return Err(Error::InvalidInput(format!("need n >= 2 and 1 <= b < n (n = {n}, b = {b})")));
    }
    if let Some(k) = spec.eigenvalues.iter().position(|&v| v == 0.0 || !v.is_finite()) {
        return Err(Error::InvalidInput(format!("eigenvalue {k} is zero or not finite")));
    }
    let mut diag = spec.eigenvalues.clone();
    if let Some(seed) = shuffle_seed {
        diag.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let w = b + 1;
    let mut work = Work { n, w, bands: (0..=w).map(|d| vec![0.0; n.saturating_sub(d)]).collect() };
    work.bands[0] = diag;

    for q in (1..n).rev() {
        let p = q - 1;
        let (c, s, _) = make_givens(work.get(q, q), 1.0);
        work.rotate(p, q, c, s);
        let mut r = q + b;
        while r < n {
            let col = r - w;
            let (c, s, _) = make_givens(work.get(r - 1, col), work.get(r, col));
            work.rotate(r - 1, r, c, s);
            work.set(r, col, 0.0);
            r += b;
        }
    }
    debug_assert!(work.bands[w].iter().all(|&v| v == 0.0));
    work.bands.truncate(b + 1);
    BandedSymmetric::new(n, b, work.bands)
}
