//! Givens reductions of the stacked matrix `[cA; I]` to upper-triangular form.

use crate::banded::{make_givens, BandedSymmetric, GivensRotation, GivensSequence};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Upper-triangular banded factor: `entries[i][d] = R[i][i + d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperBanded {
    n: usize,
    entries: Vec<Vec<f64>>,
}

impl UpperBanded {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest `d` with a stored entry `R[i][i + d]`.
    pub fn bandwidth(&self) -> usize {
        self.entries.iter().map(|r| r.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j < i {
            return 0.0;
        }
        self.entries[i].get(j - i).copied().unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}

/// Sparse row of the stacked matrix: nonzeros live in `start..start + vals.len()`.
#[derive(Debug, Clone, Default)]
struct Row {
    start: usize,
    vals: Vec<f64>,
}

impl Row {
    fn get(&self, col: usize) -> f64 {
        if col < self.start {
            0.0
        } else {
            self.vals.get(col - self.start).copied().unwrap_or(0.0)
        }
    }

    fn trim(&mut self) {
        let lead = self.vals.iter().take_while(|&&v| v == 0.0).count();
        if lead == self.vals.len() {
            self.vals.clear();
        } else {
            self.vals.drain(..lead);
            self.start += lead;
        }
    }
}

struct Stacked {
    rows: Vec<Row>,
    seq: GivensSequence,
}

impl Stacked {
    fn new(a: &BandedSymmetric) -> Self {
        let (n, b) = (a.n(), a.bandwidth());
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..n {
            let start = i.saturating_sub(b);
            let end = (i + b + 1).min(n);
            rows.push(Row { start, vals: (start..end).map(|j| a.get(i, j)).collect() });
        }
        for i in 0..n {
            rows.push(Row { start: i, vals: vec![1.0] });
        }
        Stacked { rows, seq: GivensSequence::new(2 * n) }
    }

    fn begin_step(&mut self) {
        let at = self.seq.rotations.len();
        self.seq.step_starts.push(at);
    }

    /// Rotates rows `pivot` and `target` so that `target` vanishes in `col`.
    fn annihilate(&mut self, pivot: usize, target: usize, col: usize) {
        let (f, g) = (self.rows[pivot].get(col), self.rows[target].get(col));
        let (c, s, _) = make_givens(f, g);
        let rot = GivensRotation { i: pivot, j: target, c, s };
        let p = std::mem::take(&mut self.rows[pivot]);
        let t = std::mem::take(&mut self.rows[target]);
        let start = match (p.vals.is_empty(), t.vals.is_empty()) {
            (true, true) => col,
            (true, false) => t.start,
            (false, true) => p.start,
            (false, false) => p.start.min(t.start),
        };
        let end = (p.start + p.vals.len()).max(t.start + t.vals.len()).max(col + 1);
        let mut np = Vec::with_capacity(end - start);
        let mut nt = Vec::with_capacity(end - start);
        for k in start..end {
            let (x, y) = rot.apply_pair(p.get(k), t.get(k));
            np.push(x);
            nt.push(y);
        }
        nt[col - start] = 0.0;
        let mut np = Row { start, vals: np };
        let mut nt = Row { start, vals: nt };
        np.trim();
        nt.trim();
        self.rows[pivot] = np;
        self.rows[target] = nt;
        self.seq.rotations.push(rot);
    }

    fn finish(self, n: usize) -> (GivensSequence, UpperBanded) {
        let entries = self.rows[..n]
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let end = row.start + row.vals.len();
                (i..end.max(i)).map(|j| row.get(j)).collect()
            })
            .collect();
        debug_assert!(self.rows[n..].iter().all(|r| r.vals.iter().all(|&v| v == 0.0)));
        (self.seq, UpperBanded { n, entries })
    }
}

/// Structured QR of `[cA; I]` for tridiagonal `cA`, `3n - 2` rotations.
///
/// Per column `i`: the identity row `n + i` is folded into row `n`, row `n`
/// is folded into row `i`, and the subdiagonal entry of row `i + 1` is removed.
pub fn reduce_tridiag(ca: &BandedSymmetric) -> Result<(GivensSequence, UpperBanded)> {
    if ca.bandwidth() != 1 {
        return Err(Error::InvalidInput(format!("expected bandwidth 1, found {}", ca.bandwidth())));
    }
    let n = ca.n();
    let mut st = Stacked::new(ca);
    st.begin_step();
    st.annihilate(0, n, 0);
    st.annihilate(0, 1, 0);
    for i in 1..n {
        st.begin_step();
        st.annihilate(n, n + i, i);
        st.annihilate(i, n, i);
        if i + 1 < n {
            st.annihilate(i, i + 1, i);
        }
    }
    Ok(st.finish(n))
}

/// Structured QR of `[cA; I]` for `b`-banded `cA`, `(2b + 1) n - b^2 - b` rotations.
///
/// Per column `i`: row `n + i` is cleared against row `n` and the identity
/// rows `n + j` below it, row `n` is folded into row `i`, and the `b`
/// subdiagonal entries of column `i` are removed against row `i`.
pub fn reduce_banded(ca: &BandedSymmetric) -> (GivensSequence, UpperBanded) {
    let (n, b) = (ca.n(), ca.bandwidth());
    let mut st = Stacked::new(ca);
    st.begin_step();
    st.annihilate(0, n, 0);
    for j in 1..=b.min(n - 1) {
        st.annihilate(0, j, 0);
    }
    for i in 1..n {
        st.begin_step();
        st.annihilate(n, n + i, i);
        for j in i + 1..=(b + i - 1).min(n - 1) {
            st.annihilate(n + j, n + i, j);
        }
        st.annihilate(i, n, i);
        if i + 1 < n {
            for j in i + 1..=(b + i).min(n - 1) {
                st.annihilate(i, j, i);
            }
        }
    }
    st.finish(n)
}

/// Number of rotations emitted by [`reduce_banded`].
pub fn banded_rotation_count(n: usize, b: usize) -> usize {
    (2 * b + 1) * n - b * b - b
}
