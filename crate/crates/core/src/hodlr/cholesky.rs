//! HODLR Cholesky factorization `M = W^T W` with upper-triangular `W`, and
//! the triangular solves used by the QDWH iteration.

use super::lowrank::{merge, rows_of, LowRank};
use super::matrix::{mul_dense, plus_pending, vcat, Block, HodlrMatrix, Split};
use crate::{Error, Result};
use nalgebra::DMatrix;

// Every routine below works on `B + T` for a pending low-rank `T`: Schur
// complement updates travel down the recursion and each off-diagonal block
// absorbs them with a single truncation.

/// Cholesky factor of `M + T`; only the upper part of `T` is read.
fn cholesky(m: &Block, pending: Option<&LowRank>, offset: usize, eps: f64) -> Result<Block> {
    match m {
        Block::Leaf(l) => {
            let chol = plus_pending(l.clone(), pending).cholesky().ok_or(Error::NotPositiveDefinite(offset))?;
            Ok(Block::Leaf(chol.l().transpose()))
        }
        Block::Split(s) => {
            let (s1, s2) = (s.a12.rows(), s.a21.rows());
            let w11 = cholesky(&s.a11, pending.map(|t| t.sub(0, s1, 0, s1)).as_ref(), offset, eps)?;
            // W12 = W11^{-T} M12
            let m12 = match pending {
                Some(t) => s.a12.concat(&t.sub(0, s1, s1, s2)),
                None => s.a12.clone(),
            };
            let x = solve_upper_t_left(&w11, &m12.u, offset)?;
            let w12 = LowRank::new(x, m12.v).truncate(eps);
            // M22 - W12^T W12
            let gram = w12.u.tr_mul(&w12.u);
            let update = LowRank::new(-(&w12.v * gram), w12.v.clone());
            let update = merge(update, pending.map(|t| t.sub(s1, s2, s1, s2)).as_ref(), eps);
            let w22 = cholesky(&s.a22, Some(&update), offset + s1, eps)?;
            Ok(Block::Split(Box::new(Split { a11: w11, a12: w12, a21: LowRank::zero(s2, s1), a22: w22 })))
        }
    }
}

/// Solves `W X = D` for dense `D`, `W` upper triangular.
fn solve_upper_left(w: &Block, d: &DMatrix<f64>, offset: usize) -> Result<DMatrix<f64>> {
    match w {
        Block::Leaf(l) => l.solve_upper_triangular(d).ok_or_else(|| singular_at(l, offset)),
        Block::Split(s) => {
            let (s1, s2) = (s.a12.rows(), s.a21.rows());
            let x2 = solve_upper_left(&s.a22, &rows_of(d, s1, s2), offset + s1)?;
            let rhs1 = rows_of(d, 0, s1) - &s.a12.u * (s.a12.v.transpose() * &x2);
            let x1 = solve_upper_left(&s.a11, &rhs1, offset)?;
            Ok(vcat(&x1, &x2))
        }
    }
}

/// Solves `W^T X = D` for dense `D`, `W` upper triangular.
fn solve_upper_t_left(w: &Block, d: &DMatrix<f64>, offset: usize) -> Result<DMatrix<f64>> {
    match w {
        Block::Leaf(l) => l.tr_solve_upper_triangular(d).ok_or_else(|| singular_at(l, offset)),
        Block::Split(s) => {
            let (s1, s2) = (s.a12.rows(), s.a21.rows());
            let x1 = solve_upper_t_left(&s.a11, &rows_of(d, 0, s1), offset)?;
            let rhs2 = rows_of(d, s1, s2) - &s.a12.v * (s.a12.u.transpose() * &x1);
            let x2 = solve_upper_t_left(&s.a22, &rhs2, offset + s1)?;
            Ok(vcat(&x1, &x2))
        }
    }
}

fn singular_at(l: &DMatrix<f64>, offset: usize) -> Error {
    let k = (0..l.nrows()).find(|&i| l[(i, i)] == 0.0).unwrap_or(0);
    Error::Singular(offset + k)
}

/// The off-diagonal block of `B + T` at the given position.
fn with_pending(block: &LowRank, pending: Option<&LowRank>, r0: usize, c0: usize) -> LowRank {
    match pending {
        Some(t) => block.concat(&t.sub(r0, block.rows(), c0, block.cols())),
        None => block.clone(),
    }
}

/// Solves `Y W = B + T` for HODLR `B`.
fn solve_right(b: &Block, w: &Block, pending: Option<&LowRank>, offset: usize, eps: f64) -> Result<Block> {
    match (b, w) {
        (Block::Leaf(bl), Block::Leaf(wl)) => {
            let rhs = plus_pending(bl.clone(), pending);
            let yt = wl.tr_solve_upper_triangular(&rhs.transpose()).ok_or_else(|| singular_at(wl, offset))?;
            Ok(Block::Leaf(yt.transpose()))
        }
        (Block::Split(bs), Block::Split(ws)) => {
            let (s1, s2) = (ws.a12.rows(), ws.a21.rows());
            let y11 = solve_right(&bs.a11, &ws.a11, pending.map(|t| t.sub(0, s1, 0, s1)).as_ref(), offset, eps)?;
            // Y21 W11 = B21
            let b21 = with_pending(&bs.a21, pending, s1, 0);
            let y21 = LowRank::new(b21.u, solve_upper_t_left(&ws.a11, &b21.v, offset)?);
            // Y12 W22 = B12 - Y11 W12
            let rhs12 = with_pending(&bs.a12, pending, 0, s1)
                .concat(&LowRank::new(-mul_dense(&y11, &ws.a12.u), ws.a12.v.clone()))
                .truncate(eps);
            let y12 = LowRank::new(rhs12.u, solve_upper_t_left(&ws.a22, &rhs12.v, offset + s1)?);
            // Y22 W22 = B22 - Y21 W12
            let cross = LowRank::new(-(&y21.u * (y21.v.transpose() * &ws.a12.u)), ws.a12.v.clone());
            let cross = merge(cross, pending.map(|t| t.sub(s1, s2, s1, s2)).as_ref(), eps);
            let y22 = solve_right(&bs.a22, &ws.a22, Some(&cross), offset + s1, eps)?;
            Ok(Block::Split(Box::new(Split { a11: y11, a12: y12.truncate(eps), a21: y21.truncate(eps), a22: y22 })))
        }
        _ => Err(Error::TreeMismatch),
    }
}

/// Solves `V W^T = B + T` for HODLR `B`.
fn solve_right_t(b: &Block, w: &Block, pending: Option<&LowRank>, offset: usize, eps: f64) -> Result<Block> {
    match (b, w) {
        (Block::Leaf(bl), Block::Leaf(wl)) => {
            let rhs = plus_pending(bl.clone(), pending);
            let vt = wl.solve_upper_triangular(&rhs.transpose()).ok_or_else(|| singular_at(wl, offset))?;
            Ok(Block::Leaf(vt.transpose()))
        }
        (Block::Split(bs), Block::Split(ws)) => {
            let (s1, s2) = (ws.a12.rows(), ws.a21.rows());
            // V12 W22^T = B12
            let b12 = with_pending(&bs.a12, pending, 0, s1);
            let v12 = LowRank::new(b12.u, solve_upper_left(&ws.a22, &b12.v, offset + s1)?);
            let v22 = solve_right_t(&bs.a22, &ws.a22, pending.map(|t| t.sub(s1, s2, s1, s2)).as_ref(), offset + s1, eps)?;
            // V11 W11^T = B11 - V12 W12^T
            let cross = LowRank::new(-(&v12.u * (v12.v.transpose() * &ws.a12.v)), ws.a12.u.clone());
            let cross = merge(cross, pending.map(|t| t.sub(0, s1, 0, s1)).as_ref(), eps);
            let v11 = solve_right_t(&bs.a11, &ws.a11, Some(&cross), offset, eps)?;
            // V21 W11^T = B21 - V22 W12^T
            let rhs21 = with_pending(&bs.a21, pending, s1, 0)
                .concat(&LowRank::new(-mul_dense(&v22, &ws.a12.v), ws.a12.u.clone()))
                .truncate(eps);
            let v21 = LowRank::new(rhs21.u, solve_upper_left(&ws.a11, &rhs21.v, offset)?);
            Ok(Block::Split(Box::new(Split { a11: v11, a12: v12.truncate(eps), a21: v21.truncate(eps), a22: v22 })))
        }
        _ => Err(Error::TreeMismatch),
    }
}

impl HodlrMatrix {
    /// Upper-triangular `W` with `W^T W = self`; the lower blocks of `W` have rank 0.
    pub fn cholesky(&self, eps: f64) -> Result<HodlrMatrix> {
        Ok(HodlrMatrix::from_parts(*self.tree(), cholesky(self.root(), None, 0, eps)?))
    }

    /// Solves `Y W = self` (or `Y W^T = self` when `transpose` is set) for
    /// upper-triangular `W`.
    pub fn solve_triangular_right(&self, w: &HodlrMatrix, transpose: bool, eps: f64) -> Result<HodlrMatrix> {
        self.check_tree(w)?;
        let root = if transpose {
            solve_right_t(self.root(), w.root(), None, 0, eps)?
        } else {
            solve_right(self.root(), w.root(), None, 0, eps)?
        };
        Ok(HodlrMatrix::from_parts(*self.tree(), root))
    }

    /// Solves `W X = D` (or `W^T X = D`) for dense `D`, `W = self` upper triangular.
    pub fn solve_upper_dense(&self, d: &DMatrix<f64>, transpose: bool) -> Result<DMatrix<f64>> {
        if d.nrows() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: d.nrows() });
        }
        if transpose {
            solve_upper_t_left(self.root(), d, 0)
        } else {
            solve_upper_left(self.root(), d, 0)
        }
    }
}
