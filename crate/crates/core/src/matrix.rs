//! Dense matrices over a tabled field, stored row-major as `u16`.

use rayon::prelude::*;

use crate::gf::{Elem, Field};

/// Row count times width above which elimination fans out over threads.
const PAR_THRESHOLD: usize = 1 << 15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u16>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vec<u16>]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<u16>) -> Matrix {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c] as Elem
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v as u16;
    }

    pub fn row(&self, r: usize) -> &[u16] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u16] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u16]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn push_row(&mut self, row: &[u16]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn truncate_rows(&mut self, rows: usize) {
        self.rows = rows.min(self.rows);
        self.data.truncate(self.rows * self.cols);
    }

    /// Rows stacked below each other.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    /// The submatrix formed by the listed columns, in that order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            let src = self.row(r);
            let dst = out.row_mut(r);
            for (d, &c) in dst.iter_mut().zip(cols) {
                *d = src[c];
            }
        }
        out
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        let cols = other.cols;
        out.data
            .par_chunks_mut(cols.max(1))
            .enumerate()
            .for_each(|(r, dst)| {
                for (k, &a) in self.row(r).iter().enumerate() {
                    f.axpy(dst, other.row(k), a as Elem);
                }
            });
        out
    }

    /// `v * self` for a row vector `v`.
    pub fn left_mul_vec(&self, f: &Field, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.rows);
        let mut acc = vec![0u16; self.cols];
        for (r, &c) in v.iter().enumerate() {
            f.axpy(&mut acc, self.row(r), c);
        }
        acc.into_iter().map(Elem::from).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Reduced row echelon form in place; returns the pivot columns. Zero rows are
    /// removed so the result has exactly `rank` rows.
    ///
    /// Pivoting takes the first column with a nonzero entry at or below the current
    /// row and the topmost such row, so the output is deterministic.
    pub fn rref(&mut self, f: &Field) -> Vec<usize> {
        self.eliminate(f, true)
    }

    /// Rank by forward elimination only (the matrix is consumed).
    pub fn rank(mut self, f: &Field) -> usize {
        self.eliminate(f, false).len()
    }

    fn eliminate(&mut self, f: &Field, full: bool) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..cols {
            if pr == rows {
                break;
            }
            let Some(found) = (pr..rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if found != pr {
                for j in c..cols {
                    self.data.swap(found * cols + j, pr * cols + j);
                }
            }
            let lead = self.data[pr * cols + c] as Elem;
            let inv = f.inv(lead).expect("pivot is nonzero");
            f.scale_row(&mut self.data[pr * cols + c..(pr + 1) * cols], inv);
            let pivot_row: Vec<u16> = self.data[pr * cols + c..(pr + 1) * cols].to_vec();
            let start = if full { 0 } else { pr + 1 };
            let body = &mut self.data[start * cols..rows * cols];
            let work = |(i, row): (usize, &mut [u16])| {
                if start + i == pr {
                    return;
                }
                let x = row[c] as Elem;
                if x != 0 {
                    f.axpy(&mut row[c..], &pivot_row, f.neg(x));
                }
            };
            if (rows - start) * (cols - c) >= PAR_THRESHOLD {
                body.par_chunks_mut(cols).enumerate().for_each(work);
            } else {
                body.chunks_mut(cols).enumerate().for_each(work);
            }
            pivots.push(c);
            pr += 1;
        }
        self.truncate_rows(pr);
        pivots
    }

    /// Basis of the right nullspace `{x : self * x = 0}` as rows, computed from a
    /// matrix already in reduced row echelon form with the given pivots.
    pub fn nullspace_of_rref(&self, f: &Field, pivots: &[usize]) -> Matrix {
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &p in pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let mut out = Matrix::zeros(free.len(), n);
        for (i, &fc) in free.iter().enumerate() {
            out.data[i * n + fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                let v = self.get(r, fc);
                if v != 0 {
                    out.data[i * n + pc] = f.neg(v) as u16;
                }
            }
        }
        out
    }

    /// Right nullspace of an arbitrary matrix.
    pub fn nullspace(&self, f: &Field) -> Matrix {
        let mut m = self.clone();
        let piv = m.rref(f);
        m.nullspace_of_rref(f, &piv)
    }

    /// One solution `x` of `self * x = b`, if the system is consistent.
    pub fn solve(&self, f: &Field, b: &[Elem]) -> Option<Vec<Elem>> {
        assert_eq!(b.len(), self.rows);
        let n = self.cols;
        let mut aug = Matrix::zeros(self.rows, n + 1);
        for (r, &br) in b.iter().enumerate() {
            aug.row_mut(r)[..n].copy_from_slice(self.row(r));
            aug.data[r * (n + 1) + n] = br as u16;
        }
        let piv = aug.rref(f);
        if piv.last() == Some(&n) {
            return None;
        }
        let mut x = vec![0; n];
        for (r, &c) in piv.iter().enumerate() {
            x[c] = aug.get(r, n);
        }
        Some(x)
    }
}
