//! Direct HODLR assembly of the blocks `Q1 = Q[0..n, 0..n]`, `Q2 = Q[n..2n, 0..n]`.
//!
//! Rows of `Q` evolve independently under column rotations, so each row range
//! of the partition is replayed on its own. Once a range `[s, m)` has seen all
//! steps up to `m - 1`, its restriction to every column that is still going to
//! be rotated lies in the span of at most `2b` snapshot columns; later steps
//! then only update small coefficient vectors against that snapshot.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::banded::GivensSequence;
use crate::hodlr::{Block, HodlrMatrix, LowRank, PartitionTree, Split};
use crate::{Error, Result};

/// Step index of the first and last rotation touching each column of `Q`.
struct Touches {
    first: Vec<usize>,
    last: Vec<Option<usize>>,
}

impl Touches {
    fn new(seq: &GivensSequence) -> Self {
        let m = seq.nrows;
        let mut first = vec![usize::MAX; m];
        let mut last = vec![None; m];
        for k in 0..seq.steps() {
            for g in seq.step(k) {
                for c in [g.i, g.j] {
                    first[c] = first[c].min(k);
                    last[c] = Some(k);
                }
            }
        }
        Touches { first, last }
    }

    /// Whether column `c` is rotated at some step `>= step`.
    fn live_after(&self, c: usize, step: usize) -> bool {
        self.last[c].is_some_and(|l| l >= step)
    }
}

/// Columns of a row range of `Q`, each stored as coefficients against a basis.
struct Coeffs {
    len: usize,
    cols: HashMap<usize, Vec<f64>>,
}

impl Coeffs {
    fn replay(&mut self, seq: &GivensSequence, steps: std::ops::Range<usize>) {
        for k in steps {
            for g in seq.step(k) {
                let a = self.cols.remove(&g.i);
                let b = self.cols.remove(&g.j);
                if a.is_none() && b.is_none() {
                    continue;
                }
                let mut a = a.unwrap_or_else(|| vec![0.0; self.len]);
                let mut b = b.unwrap_or_else(|| vec![0.0; self.len]);
                for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                    let (p, q) = g.apply_pair(*x, *y);
                    *x = p;
                    *y = q;
                }
                self.cols.insert(g.i, a);
                self.cols.insert(g.j, b);
            }
        }
    }
}

/// Spill entry `(row, col, value)` left of a row range, in block coordinates.
type Spill = Vec<(usize, usize, f64)>;

struct Built {
    block: Block,
    live: Vec<usize>,
    snapshot: DMatrix<f64>,
    spill: Spill,
}

struct Assembler<'a> {
    seq: &'a GivensSequence,
    touches: &'a Touches,
    tree: &'a PartitionTree,
    n: usize,
    offset: usize,
}

impl Assembler<'_> {
    fn build(&self, s: usize, e: usize) -> Built {
        match self.tree.split(e - s) {
            None => self.leaf(s, e),
            Some((first, _)) => self.node(s, s + first, e),
        }
    }

    fn leaf(&self, s: usize, e: usize) -> Built {
        let size = e - s;
        let mut t = Coeffs { len: size, cols: HashMap::new() };
        for r in 0..size {
            let mut v = vec![0.0; size];
            v[r] = 1.0;
            t.cols.insert(self.offset + s + r, v);
        }
        let start = (s..e).map(|r| self.touches.first[self.offset + r]).min().unwrap_or(0);
        t.replay(self.seq, start.min(e)..e);

        let mut dense = DMatrix::zeros(size, size);
        let mut spill = Vec::new();
        let mut live = Vec::new();
        for (&c, v) in &t.cols {
            if c < self.n && c >= s && c < e {
                dense.column_mut(c - s).copy_from_slice(v);
            } else if c < s {
                spill.extend(v.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(r, &x)| (s + r, c, x)));
            } else if self.touches.live_after(c, e) {
                live.push(c);
            }
        }
        live.sort_unstable();
        let mut snapshot = DMatrix::zeros(size, live.len());
        for (k, c) in live.iter().enumerate() {
            snapshot.column_mut(k).copy_from_slice(&t.cols[c]);
        }
        Built { block: Block::Leaf(dense), live, snapshot, spill }
    }

    fn node(&self, s: usize, m: usize, e: usize) -> Built {
        let a = self.build(s, m);
        let b = self.build(m, e);

        let la = a.live.len();
        let mut t = Coeffs { len: la, cols: HashMap::new() };
        for (k, &c) in a.live.iter().enumerate() {
            let mut v = vec![0.0; la];
            v[k] = 1.0;
            t.cols.insert(c, v);
        }
        t.replay(self.seq, m..e);

        let mut coef = DMatrix::zeros(e - m, la);
        for c in m..e {
            if let Some(v) = t.cols.get(&c) {
                for (k, &x) in v.iter().enumerate() {
                    coef[(c - m, k)] = x;
                }
            }
        }
        let a12 = LowRank::new(a.snapshot.clone(), coef);

        let (sa, sb) = (m - s, e - m);
        let mut lower_rows: Vec<usize> = Vec::new();
        let mut spill = a.spill;
        for &(r, c, x) in &b.spill {
            if c >= s {
                if !lower_rows.contains(&r) {
                    lower_rows.push(r);
                }
            } else {
                spill.push((r, c, x));
            }
        }
        lower_rows.sort_unstable();
        let mut lu = DMatrix::zeros(sb, lower_rows.len());
        let mut lv = DMatrix::zeros(sa, lower_rows.len());
        for (k, &r) in lower_rows.iter().enumerate() {
            lu[(r - m, k)] = 1.0;
        }
        for &(r, c, x) in &b.spill {
            if c >= s {
                let k = lower_rows.binary_search(&r).expect("row recorded above");
                lv[(c - s, k)] = x;
            }
        }
        let a21 = LowRank::new(lu, lv);

        let mut live: Vec<usize> = t
            .cols
            .keys()
            .copied()
            .chain(b.live.iter().copied())
            .filter(|&c| self.touches.live_after(c, e))
            .collect();
        live.sort_unstable();
        live.dedup();
        let mut snapshot = DMatrix::zeros(e - s, live.len());
        for (k, c) in live.iter().enumerate() {
            if let Some(v) = t.cols.get(c) {
                let col = &a.snapshot * nalgebra::DVector::from_column_slice(v);
                snapshot.view_mut((0, k), (sa, 1)).copy_from(&col);
            }
            if let Ok(idx) = b.live.binary_search(c) {
                snapshot.view_mut((sa, k), (sb, 1)).copy_from(&b.snapshot.column(idx));
            }
        }

        let block = Block::Split(Box::new(Split { a11: a.block, a12, a21, a22: b.block }));
        Built { block, live, snapshot, spill }
    }
}

/// Builds `Q1` and `Q2` in HODLR form directly from the rotation sequence.
///
/// Off-diagonal blocks come out in factored form with rank at most `2b`
/// (upper) and at most `b` (lower, `Q1` only); no dense `2n x 2n` matrix is formed.
pub fn assemble_q(seq: &GivensSequence, tree: &PartitionTree, b: usize) -> Result<(HodlrMatrix, HodlrMatrix)> {
    seq.validate()?;
    let n = tree.n();
    if seq.nrows != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, found: seq.nrows });
    }
    if seq.steps() != n {
        return Err(Error::MalformedSequence(format!("expected {n} column steps, found {}", seq.steps())));
    }
    if b == 0 || b >= n {
        return Err(Error::InvalidInput(format!("bandwidth {b} out of range for n = {n}")));
    }
    let touches = Touches::new(seq);
    let mut out = Vec::with_capacity(2);
    for offset in [0, n] {
        let asm = Assembler { seq, touches: &touches, tree, n, offset };
        let built = asm.build(0, n);
        out.push(HodlrMatrix::from_parts(*tree, built.block));
    }
    let q2 = out.pop().expect("two blocks");
    let q1 = out.pop().expect("two blocks");
    Ok((q1, q2))
}

/// `Q1 Q2^T` in HODLR form, symmetrized.
pub fn q1q2t(q1: &HodlrMatrix, q2: &HodlrMatrix, eps: f64) -> Result<HodlrMatrix> {
    let prod = q1.multiply(&q2.transpose(), eps)?;
    Ok(prod.symmetrize(eps))
}
