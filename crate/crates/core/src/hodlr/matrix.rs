use super::lowrank::{hcat, merge, rows_of, LowRank};
use super::tree::PartitionTree;
use crate::banded::BandedSymmetric;
use crate::{Error, Result};
use nalgebra::DMatrix;
use serde::Serialize;

/// One node of a HODLR matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    Leaf(DMatrix<f64>),
    Split(Box<Split>),
}

/// `[a11 a12; a21 a22]` with factored off-diagonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub a11: Block,
    pub a12: LowRank,
    pub a21: LowRank,
    pub a22: Block,
}

/// Square matrix in HODLR format over a [`PartitionTree`].
#[derive(Debug, Clone, PartialEq)]
pub struct HodlrMatrix {
    tree: PartitionTree,
    root: Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub max_offdiag_rank: usize,
    pub memory_bytes: usize,
}

impl HodlrMatrix {
    pub fn from_parts(tree: PartitionTree, root: Block) -> Self {
        HodlrMatrix { tree, root }
    }

    pub fn tree(&self) -> &PartitionTree {
        &self.tree
    }

    pub fn root(&self) -> &Block {
        &self.root
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn zeros(tree: PartitionTree) -> Self {
        HodlrMatrix { tree, root: build(&tree, 0, tree.n(), &|_, s| DMatrix::zeros(s, s), &|_, r, c| LowRank::zero(r, c)) }
    }

    pub fn identity(tree: PartitionTree) -> Self {
        HodlrMatrix {
            tree,
            root: build(&tree, 0, tree.n(), &|_, s| DMatrix::identity(s, s), &|_, r, c| LowRank::zero(r, c)),
        }
    }

    /// Exact representation of a banded matrix; each off-diagonal block
    /// gets rank at most `b`.
    pub fn from_banded(a: &BandedSymmetric, n_min: usize) -> Result<Self> {
        let tree = PartitionTree::new(a.n(), n_min)?;
        let b = a.bandwidth();
        let leaf = |start: usize, size: usize| DMatrix::from_fn(size, size, |i, j| a.get(start + i, start + j));
        // lower-left block rows start+s1.., cols start..start+s1; only its top-right corner is nonzero
        let lower = |start: usize, rows: usize, cols: usize| {
            let col0 = start;
            let row0 = start + cols;
            let mut used: Vec<(usize, Vec<f64>)> = Vec::new();
            for r in 0..rows.min(b) {
                let entries: Vec<f64> = (0..cols).map(|c| a.get(row0 + r, col0 + c)).collect();
                if entries.iter().any(|&v| v != 0.0) {
                    used.push((r, entries));
                }
            }
            let mut u = DMatrix::zeros(rows, used.len());
            let mut v = DMatrix::zeros(cols, used.len());
            for (k, (r, entries)) in used.iter().enumerate() {
                u[(*r, k)] = 1.0;
                for (c, &e) in entries.iter().enumerate() {
                    v[(c, k)] = e;
                }
            }
            LowRank::new(u, v)
        };
        Ok(HodlrMatrix { tree, root: build_sym(&tree, 0, a.n(), &leaf, &lower) })
    }

    /// Compresses a dense matrix, truncating off-diagonal blocks at `eps`.
    pub fn from_dense(tree: PartitionTree, m: &DMatrix<f64>, eps: f64) -> Result<Self> {
        if m.nrows() != tree.n() || m.ncols() != tree.n() {
            return Err(Error::DimensionMismatch { expected: tree.n(), found: m.nrows() });
        }
        let leaf = |start: usize, size: usize| m.view((start, start), (size, size)).into_owned();
        let off = |(r0, c0): (usize, usize), rows: usize, cols: usize| {
            LowRank::new(m.view((r0, c0), (rows, cols)).into_owned(), DMatrix::identity(cols, cols)).truncate(eps)
        };
        Ok(HodlrMatrix { tree, root: build(&tree, 0, tree.n(), &leaf, &off) })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n(), self.n());
        fill_dense(&self.root, 0, &mut out);
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: x.len() });
        }
        let xm = DMatrix::from_column_slice(x.len(), 1, x);
        Ok(mul_dense(&self.root, &xm).as_slice().to_vec())
    }

    /// `self * X` for a dense `X`.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.nrows() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: x.nrows() });
        }
        Ok(mul_dense(&self.root, x))
    }

    pub fn transpose(&self) -> Self {
        HodlrMatrix { tree: self.tree, root: transpose(&self.root) }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        HodlrMatrix { tree: self.tree, root: scale(&self.root, alpha) }
    }

    /// `self + alpha I`, exact (only diagonal leaves change).
    pub fn add_identity(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        shift_diagonal(&mut out.root, alpha);
        out
    }

    /// Formatted sum: leaves are added densely, off-diagonal factors are
    /// concatenated and truncated at `eps`.
    pub fn add(&self, other: &HodlrMatrix, eps: f64) -> Result<Self> {
        self.check_tree(other)?;
        Ok(HodlrMatrix { tree: self.tree, root: add(&self.root, &other.root, eps) })
    }

    /// `(M + M^T) / 2`, with the lower blocks stored as exact mirrors of the upper ones.
    pub fn symmetrize(&self, eps: f64) -> Self {
        HodlrMatrix { tree: self.tree, root: symmetrize(&self.root, eps) }
    }

    /// Adds a global low-rank term `U V^T`, recompressing every touched block.
    pub fn add_lowrank(&self, term: &LowRank, eps: f64) -> Result<Self> {
        if term.rows() != self.n() || term.cols() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: term.rows() });
        }
        let mut out = self.clone();
        add_lowrank(&mut out.root, term, eps);
        Ok(out)
    }

    pub fn trace(&self) -> f64 {
        let mut t = 0.0;
        visit_leaves(&self.root, &mut |l| t += l.trace());
        t
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let mut max_rank = 0;
        let mut entries = 0;
        visit(&self.root, &mut |b| match b {
            Block::Leaf(l) => entries += l.len(),
            Block::Split(s) => {
                for lr in [&s.a12, &s.a21] {
                    max_rank = max_rank.max(lr.rank());
                    entries += lr.rank() * (lr.rows() + lr.cols());
                }
            }
        });
        Diagnostics { max_offdiag_rank: max_rank, memory_bytes: entries * std::mem::size_of::<f64>() }
    }

    /// `(level, upper, rank)` of every off-diagonal block, preorder.
    pub fn offdiag_ranks(&self) -> Vec<(usize, bool, usize)> {
        let mut out = Vec::new();
        fn rec(b: &Block, level: usize, out: &mut Vec<(usize, bool, usize)>) {
            if let Block::Split(s) = b {
                out.push((level, true, s.a12.rank()));
                out.push((level, false, s.a21.rank()));
                rec(&s.a11, level + 1, out);
                rec(&s.a22, level + 1, out);
            }
        }
        rec(&self.root, 0, &mut out);
        out
    }

    pub(crate) fn check_tree(&self, other: &HodlrMatrix) -> Result<()> {
        if self.tree != other.tree {
            return Err(Error::TreeMismatch);
        }
        Ok(())
    }
}

fn build<L, O>(tree: &PartitionTree, start: usize, size: usize, leaf: &L, off: &O) -> Block
where
    L: Fn(usize, usize) -> DMatrix<f64>,
    O: Fn((usize, usize), usize, usize) -> LowRank,
{
    match tree.split(size) {
        None => Block::Leaf(leaf(start, size)),
        Some((s1, s2)) => Block::Split(Box::new(Split {
            a11: build(tree, start, s1, leaf, off),
            a12: off((start, start + s1), s1, s2),
            a21: off((start + s1, start), s2, s1),
            a22: build(tree, start + s1, s2, leaf, off),
        })),
    }
}

fn build_sym<L, O>(tree: &PartitionTree, start: usize, size: usize, leaf: &L, lower: &O) -> Block
where
    L: Fn(usize, usize) -> DMatrix<f64>,
    O: Fn(usize, usize, usize) -> LowRank,
{
    match tree.split(size) {
        None => Block::Leaf(leaf(start, size)),
        Some((s1, s2)) => {
            let a21 = lower(start, s2, s1);
            Block::Split(Box::new(Split {
                a11: build_sym(tree, start, s1, leaf, lower),
                a12: a21.transpose(),
                a21,
                a22: build_sym(tree, start + s1, s2, leaf, lower),
            }))
        }
    }
}

fn visit<F: FnMut(&Block)>(b: &Block, f: &mut F) {
    f(b);
    if let Block::Split(s) = b {
        visit(&s.a11, f);
        visit(&s.a22, f);
    }
}

fn visit_leaves<F: FnMut(&DMatrix<f64>)>(b: &Block, f: &mut F) {
    visit(b, &mut |blk| {
        if let Block::Leaf(l) = blk {
            f(l)
        }
    });
}

fn fill_dense(b: &Block, start: usize, out: &mut DMatrix<f64>) {
    match b {
        Block::Leaf(l) => out.view_mut((start, start), (l.nrows(), l.ncols())).copy_from(l),
        Block::Split(s) => {
            let s1 = s.a12.rows();
            let s2 = s.a21.rows();
            fill_dense(&s.a11, start, out);
            fill_dense(&s.a22, start + s1, out);
            out.view_mut((start, start + s1), (s1, s2)).copy_from(&s.a12.to_dense());
            out.view_mut((start + s1, start), (s2, s1)).copy_from(&s.a21.to_dense());
        }
    }
}

/// `B X`.
pub(crate) fn mul_dense(b: &Block, x: &DMatrix<f64>) -> DMatrix<f64> {
    match b {
        Block::Leaf(l) => l * x,
        Block::Split(s) => {
            let (s1, s2) = (s.a12.rows(), s.a21.rows());
            let x1 = x.rows(0, s1);
            let x2 = x.rows(s1, s2);
            let top = mul_dense(&s.a11, &x1.into_owned()) + &s.a12.u * (s.a12.v.transpose() * x2);
            let bottom = &s.a21.u * (s.a21.v.transpose() * x1) + mul_dense(&s.a22, &x2.into_owned());
            vcat(&top, &bottom)
        }
    }
}

/// `B^T X`.
pub(crate) fn tmul_dense(b: &Block, x: &DMatrix<f64>) -> DMatrix<f64> {
    match b {
        Block::Leaf(l) => l.tr_mul(x),
        Block::Split(s) => {
            let (s1, s2) = (s.a12.rows(), s.a21.rows());
            let x1 = x.rows(0, s1);
            let x2 = x.rows(s1, s2);
            let top = tmul_dense(&s.a11, &x1.into_owned()) + &s.a21.v * (s.a21.u.transpose() * x2);
            let bottom = &s.a12.v * (s.a12.u.transpose() * x1) + tmul_dense(&s.a22, &x2.into_owned());
            vcat(&top, &bottom)
        }
    }
}

pub(crate) fn vcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.rows_mut(0, a.nrows()).copy_from(a);
    out.rows_mut(a.nrows(), b.nrows()).copy_from(b);
    out
}

fn transpose(b: &Block) -> Block {
    match b {
        Block::Leaf(l) => Block::Leaf(l.transpose()),
        Block::Split(s) => Block::Split(Box::new(Split {
            a11: transpose(&s.a11),
            a12: s.a21.transpose(),
            a21: s.a12.transpose(),
            a22: transpose(&s.a22),
        })),
    }
}

fn scale(b: &Block, alpha: f64) -> Block {
    match b {
        Block::Leaf(l) => Block::Leaf(l * alpha),
        Block::Split(s) => Block::Split(Box::new(Split {
            a11: scale(&s.a11, alpha),
            a12: s.a12.scaled(alpha),
            a21: s.a21.scaled(alpha),
            a22: scale(&s.a22, alpha),
        })),
    }
}

fn shift_diagonal(b: &mut Block, alpha: f64) {
    match b {
        Block::Leaf(l) => {
            for i in 0..l.nrows() {
                l[(i, i)] += alpha;
            }
        }
        Block::Split(s) => {
            shift_diagonal(&mut s.a11, alpha);
            shift_diagonal(&mut s.a22, alpha);
        }
    }
}

fn add(a: &Block, b: &Block, eps: f64) -> Block {
    match (a, b) {
        (Block::Leaf(x), Block::Leaf(y)) => Block::Leaf(x + y),
        (Block::Split(x), Block::Split(y)) => Block::Split(Box::new(Split {
            a11: add(&x.a11, &y.a11, eps),
            a12: x.a12.concat(&y.a12).truncate(eps),
            a21: x.a21.concat(&y.a21).truncate(eps),
            a22: add(&x.a22, &y.a22, eps),
        })),
        _ => unreachable!("trees were checked to match"),
    }
}

fn symmetrize(b: &Block, eps: f64) -> Block {
    match b {
        Block::Leaf(l) => Block::Leaf((l + l.transpose()) * 0.5),
        Block::Split(s) => {
            let a12 = s.a12.concat(&s.a21.transpose()).scaled(0.5).truncate(eps);
            Block::Split(Box::new(Split {
                a11: symmetrize(&s.a11, eps),
                a21: a12.transpose(),
                a12,
                a22: symmetrize(&s.a22, eps),
            }))
        }
    }
}

/// `b += U V^T` for a term covering the whole block.
pub(crate) fn add_lowrank(b: &mut Block, term: &LowRank, eps: f64) {
    if term.rank() == 0 {
        return;
    }
    match b {
        Block::Leaf(l) => *l += term.to_dense(),
        Block::Split(s) => {
            let (s1, s2) = (s.a12.rows(), s.a21.rows());
            let (u1, u2) = (rows_of(&term.u, 0, s1), rows_of(&term.u, s1, s2));
            let (v1, v2) = (rows_of(&term.v, 0, s1), rows_of(&term.v, s1, s2));
            s.a12 = LowRank::new(hcat(&s.a12.u, &u1), hcat(&s.a12.v, &v2)).truncate(eps);
            s.a21 = LowRank::new(hcat(&s.a21.u, &u2), hcat(&s.a21.v, &v1)).truncate(eps);
            add_lowrank(&mut s.a11, &LowRank::new(u1, v1), eps);
            add_lowrank(&mut s.a22, &LowRank::new(u2, v2), eps);
        }
    }
}

pub(crate) fn plus_pending(mut leaf: DMatrix<f64>, pending: Option<&LowRank>) -> DMatrix<f64> {
    if let Some(t) = pending {
        leaf += t.to_dense();
    }
    leaf
}

/// Formatted product `A B`, recompressing after every accumulation.
pub(crate) fn multiply(a: &Block, b: &Block, eps: f64) -> Block {
    multiply_acc(a, b, None, eps)
}

/// `A B + T` for a pending low-rank term `T`. Pushing `T` down the recursion
/// lets every off-diagonal block absorb all of its terms in one truncation.
fn multiply_acc(a: &Block, b: &Block, pending: Option<&LowRank>, eps: f64) -> Block {
    match (a, b) {
        (Block::Leaf(x), Block::Leaf(y)) => Block::Leaf(plus_pending(x * y, pending)),
        (Block::Split(x), Block::Split(y)) => {
            let (s1, s2) = (x.a12.rows(), x.a21.rows());
            // A12 B21 and A21 B12 collapse to low rank through the small cores
            let t11 = LowRank::new(&x.a12.u * (x.a12.v.transpose() * &y.a21.u), y.a21.v.clone());
            let t22 = LowRank::new(&x.a21.u * (x.a21.v.transpose() * &y.a12.u), y.a12.v.clone());
            let mut c12 = LowRank::new(mul_dense(&x.a11, &y.a12.u), y.a12.v.clone())
                .concat(&LowRank::new(x.a12.u.clone(), tmul_dense(&y.a22, &x.a12.v)));
            let mut c21 = LowRank::new(x.a21.u.clone(), tmul_dense(&y.a11, &x.a21.v))
                .concat(&LowRank::new(mul_dense(&x.a22, &y.a21.u), y.a21.v.clone()));
            if let Some(t) = pending {
                c12 = c12.concat(&t.sub(0, s1, s1, s2));
                c21 = c21.concat(&t.sub(s1, s2, 0, s1));
            }
            let t11 = merge(t11, pending.map(|t| t.sub(0, s1, 0, s1)).as_ref(), eps);
            let t22 = merge(t22, pending.map(|t| t.sub(s1, s2, s1, s2)).as_ref(), eps);
            Block::Split(Box::new(Split {
                a11: multiply_acc(&x.a11, &y.a11, Some(&t11), eps),
                a12: c12.truncate(eps),
                a21: c21.truncate(eps),
                a22: multiply_acc(&x.a22, &y.a22, Some(&t22), eps),
            }))
        }
        _ => unreachable!("trees were checked to match"),
    }
}

impl HodlrMatrix {
    /// Formatted product `self * other`.
    pub fn multiply(&self, other: &HodlrMatrix, eps: f64) -> Result<Self> {
        self.check_tree(other)?;
        Ok(HodlrMatrix { tree: self.tree, root: multiply(&self.root, &other.root, eps) })
    }
}
