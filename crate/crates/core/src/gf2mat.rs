//! Dense GF(2) linear algebra on bit-packed rows.
//!
//! Every linear question downstream — dimension of a kernel, rank of a
//! filtration step, solving for coordinates in an adapted basis — reduces to
//! Gaussian elimination over GF(2), where row addition is a word-wise xor.
//! The elimination always scans columns left to right and rows top to bottom,
//! so echelon forms, kernels and solutions are deterministic functions of the
//! input, never of iteration order.

use crate::bits::BitVec;

/// A dense matrix over GF(2), stored row-major in packed words.
#[derive(Debug, Clone)]
pub(crate) struct Gf2Mat {
    ncols: usize,
    rows: Vec<BitVec>,
}

impl Gf2Mat {
    pub fn from_rows(ncols: usize, rows: Vec<BitVec>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), ncols, "row length must match column count");
        }
        Gf2Mat { ncols, rows }
    }

    /// Build from columns: cols[j] holds the j-th column as a length-nrows
    /// bit vector.  This is the natural orientation for operator matrices,
    /// where column j is the image of the j-th basis vector.
    pub fn from_columns(nrows: usize, cols: &[BitVec]) -> Self {
        let mut rows = vec![BitVec::zeros(cols.len()); nrows];
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), nrows, "column length must match row count");
            for i in col.iter_ones() {
                rows[i].set(j, true);
            }
        }
        Gf2Mat {
            ncols: cols.len(),
            rows,
        }
    }

    /// Append another matrix's rows below this one (same column space); the
    /// kernel of the stack is the intersection of the two kernels.
    pub fn stack(&mut self, other: &Gf2Mat) {
        assert_eq!(self.ncols, other.ncols);
        self.rows.extend(other.rows.iter().cloned());
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[cfg(test)]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[cfg(test)]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    /// Reduced row echelon form of a copy, plus the pivot column of each
    /// nonzero row.  Pivots are chosen leftmost-first, which makes the result
    /// canonical for the given row span.
    fn rref(&self) -> (Vec<BitVec>, Vec<usize>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.ncols {
            if r == rows.len() {
                break;
            }
            let Some(hit) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(r, hit);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            r += 1;
        }
        rows.truncate(r);
        (rows, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel {x : Ax = 0}, one vector per free column,
    /// listed in increasing free-column order.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let (rref, pivots) = self.rref();
        let mut is_pivot = vec![false; self.ncols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::with_capacity(self.ncols - pivots.len());
        for free in 0..self.ncols {
            if is_pivot[free] {
                continue;
            }
            let mut v = BitVec::zeros(self.ncols);
            v.set(free, true);
            for (row, &pcol) in rref.iter().zip(&pivots) {
                if row.get(free) {
                    v.set(pcol, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of Ax = b, or None if b is outside the column span.
    /// Free variables are set to zero, so the answer is canonical.
    pub fn solve(&self, rhs: &BitVec) -> Option<BitVec> {
        assert_eq!(rhs.len(), self.nrows(), "rhs length must match row count");
        let aug_cols = self.ncols + 1;
        let mut aug = Vec::with_capacity(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            let mut a = BitVec::zeros(aug_cols);
            for j in row.iter_ones() {
                a.set(j, true);
            }
            a.set(self.ncols, rhs.get(i));
            aug.push(a);
        }
        let (rref, pivots) = Gf2Mat::from_rows(aug_cols, aug).rref();
        if pivots.last() == Some(&self.ncols) {
            return None; // a row reduced to 0 = 1
        }
        let mut x = BitVec::zeros(self.ncols);
        for (row, &pcol) in rref.iter().zip(&pivots) {
            if row.get(self.ncols) {
                x.set(pcol, true);
            }
        }
        Some(x)
    }

    /// A · x, for x over the column index set.
    #[cfg(test)]
    pub fn apply(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.ncols);
        let mut out = BitVec::zeros(self.nrows());
        for (i, row) in self.rows.iter().enumerate() {
            let mut parity = false;
            for j in row.iter_ones() {
                parity ^= x.get(j);
            }
            out.set(i, parity);
        }
        out
    }
}
