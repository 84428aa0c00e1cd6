use crate::{Error, Result};
use nalgebra::DMatrix;

/// Computes `(c, s, r)` with `c f + s g = r` and `-s f + c g = 0`.
///
/// `g == 0` gives `(1, 0, f)`, `f == 0` gives `(0, 1, g)`; otherwise `r`
/// carries the sign of `f`.
pub fn make_givens(f: f64, g: f64) -> (f64, f64, f64) {
    if g == 0.0 {
        (1.0, 0.0, f)
    } else if f == 0.0 {
        (0.0, 1.0, g)
    } else {
        let r = f.signum() * f.hypot(g);
        (f / r, g / r, r)
    }
}

/// Plane rotation acting on rows (or columns) `i` and `j`.
///
/// As a row operation: `x_i <- c x_i + s x_j`, `x_j <- -s x_i + c x_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensRotation {
    pub i: usize,
    pub j: usize,
    pub c: f64,
    pub s: f64,
}

impl GivensRotation {
    /// Rotation that annihilates `g` against pivot `f`; returns the new pivot too.
    pub fn annihilating(i: usize, j: usize, f: f64, g: f64) -> (Self, f64) {
        let (c, s, r) = make_givens(f, g);
        (GivensRotation { i, j, c, s }, r)
    }

    #[inline]
    pub fn apply_pair(&self, xi: f64, xj: f64) -> (f64, f64) {
        (self.c * xi + self.s * xj, -self.s * xi + self.c * xj)
    }

    /// Applies the rotation to entries `i` and `j` of a vector.
    #[inline]
    pub fn apply(&self, x: &mut [f64]) {
        let (a, b) = self.apply_pair(x[self.i], x[self.j]);
        x[self.i] = a;
        x[self.j] = b;
    }
}

/// Ordered rotations produced by the structured QR of a `2n x n` stacked matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GivensSequence {
    pub rotations: Vec<GivensRotation>,
    /// Row dimension `2n` of the stacked matrix.
    pub nrows: usize,
    /// Offsets into `rotations` at which each column step begins.
    pub step_starts: Vec<usize>,
}

impl GivensSequence {
    pub fn new(nrows: usize) -> Self {
        GivensSequence { rotations: Vec::new(), nrows, step_starts: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    /// Rotations belonging to column step `k`.
    pub fn step(&self, k: usize) -> &[GivensRotation] {
        let start = self.step_starts[k];
        let end = self.step_starts.get(k + 1).copied().unwrap_or(self.rotations.len());
        &self.rotations[start..end]
    }

    pub fn steps(&self) -> usize {
        self.step_starts.len()
    }

    /// Checks indices and that every rotation has unit norm.
    pub fn validate(&self) -> Result<()> {
        for (k, g) in self.rotations.iter().enumerate() {
            if g.i >= self.nrows || g.j >= self.nrows || g.i == g.j {
                return Err(Error::MalformedSequence(format!(
                    "rotation {k} acts on rows ({}, {}) of {}",
                    g.i, g.j, self.nrows
                )));
            }
            if ((g.c * g.c + g.s * g.s) - 1.0).abs() > 1e-14 {
                return Err(Error::MalformedSequence(format!("rotation {k} is not orthogonal")));
            }
        }
        if self.step_starts.windows(2).any(|w| w[0] > w[1])
            || self.step_starts.last().is_some_and(|&s| s > self.rotations.len())
        {
            return Err(Error::MalformedSequence("step offsets are not monotone".into()));
        }
        Ok(())
    }

    /// Applies the rotations in order to the rows of `m`.
    pub fn apply_rows(&self, m: &mut DMatrix<f64>) -> Result<()> {
        if m.nrows() != self.nrows {
            return Err(Error::DimensionMismatch { expected: self.nrows, found: m.nrows() });
        }
        for g in &self.rotations {
            for col in 0..m.ncols() {
                let (a, b) = g.apply_pair(m[(g.i, col)], m[(g.j, col)]);
                m[(g.i, col)] = a;
                m[(g.j, col)] = b;
            }
        }
        Ok(())
    }

    /// Accumulates the orthogonal factor `Q` (`2n x 2n`) with `Q^T [cA; I] = [R; 0]`.
    pub fn accumulate_dense(&self) -> DMatrix<f64> {
        let mut q = DMatrix::identity(self.nrows, self.nrows);
        for g in &self.rotations {
            let (ci, cj) = (g.i, g.j);
            for row in 0..self.nrows {
                let (a, b) = g.apply_pair(q[(row, ci)], q[(row, cj)]);
                q[(row, ci)] = a;
                q[(row, cj)] = b;
            }
        }
        q
    }

    /// Little-endian binary dump: per rotation `i: u32, j: u32, c: f64, s: f64`.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.rotations.len() * 24);
        for g in &self.rotations {
            out.extend_from_slice(&(g.i as u32).to_le_bytes());
            out.extend_from_slice(&(g.j as u32).to_le_bytes());
            out.extend_from_slice(&g.c.to_le_bytes());
            out.extend_from_slice(&g.s.to_le_bytes());
        }
        out
    }
}
