use crate::{Error, Result};

/// Recursive bisection of `0..n`: a block of `size > n_min` splits into a
/// leading part of `ceil(size / 2)` and the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionTree {
    n: usize,
    n_min: usize,
}

/// An off-diagonal block given by its row and column ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OffDiagonalBlock {
    pub row_start: usize,
    pub rows: usize,
    pub col_start: usize,
    pub cols: usize,
    /// Depth of the parent node, 0 at the root.
    pub level: usize,
    /// `true` for blocks above the diagonal.
    pub upper: bool,
}

impl PartitionTree {
    pub fn new(n: usize, n_min: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if n_min < 2 {
            return Err(Error::InvalidInput(format!("minimal block size {n_min} must be at least 2")));
        }
        Ok(PartitionTree { n, n_min })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_min(&self) -> usize {
        self.n_min
    }

    /// Sizes of the two children of a block, or `None` for a leaf.
    pub fn split(&self, size: usize) -> Option<(usize, usize)> {
        if size <= self.n_min {
            None
        } else {
            let first = size.div_ceil(2);
            Some((first, size - first))
        }
    }

    /// Number of levels below the root (0 when the root is a leaf).
    pub fn depth(&self) -> usize {
        let mut size = self.n;
        let mut depth = 0;
        while let Some((first, _)) = self.split(size) {
            size = first;
            depth += 1;
        }
        depth
    }

    /// `(start, size)` of every leaf, in order.
    pub fn leaves(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        self.walk(0, self.n, 0, &mut |start, size, _| {
            if self.split(size).is_none() {
                out.push((start, size));
            }
        });
        out
    }

    /// All off-diagonal blocks, upper and lower, in preorder.
    pub fn off_diagonal_blocks(&self) -> Vec<OffDiagonalBlock> {
        let mut out = Vec::new();
        self.walk(0, self.n, 0, &mut |start, size, level| {
            if let Some((s1, s2)) = self.split(size) {
                out.push(OffDiagonalBlock {
                    row_start: start,
                    rows: s1,
                    col_start: start + s1,
                    cols: s2,
                    level,
                    upper: true,
                });
                out.push(OffDiagonalBlock {
                    row_start: start + s1,
                    rows: s2,
                    col_start: start,
                    cols: s1,
                    level,
                    upper: false,
                });
            }
        });
        out
    }

    fn walk<F: FnMut(usize, usize, usize)>(&self, start: usize, size: usize, level: usize, f: &mut F) {
        f(start, size, level);
        if let Some((s1, s2)) = self.split(size) {
            self.walk(start, s1, level + 1, f);
            self.walk(start + s1, s2, level + 1, f);
        }
    }
}
