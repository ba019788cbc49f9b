//! Dense exact matrices with row reduction, kernels and one-sided inverses.
//!
//! Outputs are canonical: row reduction visits columns left to right and
//! picks the first nonzero pivot row, kernel bases list free columns in
//! increasing order, and one-sided inverses come from elimination applied
//! to an augmented identity. Repeated calls are bit-identical.

use std::fmt;

use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::rng::Rng;
use crate::Result;

/// A dense `rows x cols` matrix over a fixed field, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    pub field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Result of row reduction.
pub struct Rref {
    /// The reduced row echelon form.
    pub reduced: Mat,
    /// Pivot column indices in increasing order; `pivots.len()` is the rank.
    pub pivots: Vec<usize>,
}

impl Mat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Mat {
        Mat {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Mat {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            field,
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Row-major entries from integers, reduced into the field.
    pub fn from_i64(field: Field, rows: usize, cols: usize, entries: &[i64]) -> Mat {
        assert_eq!(entries.len(), rows * cols);
        Mat {
            field,
            rows,
            cols,
            data: entries.iter().map(|&v| field.from_i64(v)).collect(),
        }
    }

    pub fn random(field: Field, rows: usize, cols: usize, rng: &mut Rng) -> Mat {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        Mat {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|s| !s.is_zero())
            .map(|i| (i / self.cols.max(1), i % self.cols.max(1)))
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let f = self.field;
        let mut out = Mat::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = f.add(out.get(i, j), &f.mul(a, b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f.add(a, b))
            .collect();
        Mat { data, ..*self }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f.sub(a, b))
            .collect();
        Mat { data, ..*self }
    }

    pub fn scale(&self, s: &Scalar) -> Mat {
        let f = self.field;
        let data = self.data.iter().map(|a| f.mul(a, s)).collect();
        Mat { data, ..*self }
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut out = Mat::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        out
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, sel: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.field, self.rows, sel.len());
        for r in 0..self.rows {
            for (j, &c) in sel.iter().enumerate() {
                out.set(r, j, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, sel: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.field, sel.len(), self.cols);
        for (i, &r) in sel.iter().enumerate() {
            for c in 0..self.cols {
                out.set(i, c, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    /// Row-reduced echelon form with pivot bookkeeping.
    pub fn rref(&self) -> Rref {
        self.rref_within(self.cols)
    }

    /// Row reduction with pivots restricted to the first `limit` columns;
    /// later columns are carried along (used for augmented eliminations).
    fn rref_within(&self, limit: usize) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pr = 0; // next pivot row
        for pc in 0..limit {
            if pr == m.rows {
                break;
            }
            let Some(row) = (pr..m.rows).find(|&r| !m.get(r, pc).is_zero()) else {
                continue;
            };
            m.swap_rows(pr, row);
            let inv = f.inv(m.get(pr, pc)).expect("pivot nonzero");
            for c in pc..m.cols {
                let v = f.mul(m.get(pr, c), &inv);
                m.set(pr, c, v);
            }
            for r in 0..m.rows {
                if r == pr || m.get(r, pc).is_zero() {
                    continue;
                }
                let factor = m.get(r, pc).clone();
                for c in pc..m.cols {
                    let v = f.sub(m.get(r, c), &f.mul(&factor, m.get(pr, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(pc);
            pr += 1;
        }
        Rref { reduced: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Canonical basis of the null space, one column per free variable,
    /// free variables in increasing column order.
    pub fn kernel_basis(&self) -> Mat {
        let f = self.field;
        let Rref { reduced, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Mat::zeros(f, self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            out.set(fc, j, f.one());
            for (r, &pc) in pivots.iter().enumerate() {
                out.set(pc, j, f.neg(reduced.get(r, fc)));
            }
        }
        out
    }

    /// Basis of the column space: the columns of `self` at the RREF pivot
    /// positions.
    pub fn column_space_basis(&self) -> Mat {
        let pivots = self.rref().pivots;
        self.select_cols(&pivots)
    }

    /// Left inverse (`L * self = I`) for a matrix of full column rank,
    /// computed by elimination on `[self | I]` with pivots confined to the
    /// columns of `self`.
    pub fn left_inverse(&self) -> Result<Mat> {
        let aug = self.hstack(&Mat::identity(self.field, self.rows));
        let Rref { reduced, pivots } = aug.rref_within(self.cols);
        let rank = pivots.len();
        if rank < self.cols {
            return Err(Error::NotOneSidedInvertible {
                side: "left",
                rank,
                need: self.cols,
            });
        }
        // All of self's columns are pivots, so rows 0..cols of the reduced
        // augment satisfy E * self = I.
        let sel: Vec<usize> = (self.cols..self.cols + self.rows).collect();
        let e = reduced.select_cols(&sel);
        Ok(e.select_rows(&(0..self.cols).collect::<Vec<_>>()))
    }

    /// Right inverse (`self * R = I`) for a matrix of full row rank.
    pub fn right_inverse(&self) -> Result<Mat> {
        match self.transpose().left_inverse() {
            Ok(l) => Ok(l.transpose()),
            Err(Error::NotOneSidedInvertible { rank, .. }) => Err(Error::NotOneSidedInvertible {
                side: "right",
                rank,
                need: self.rows,
            }),
            Err(e) => Err(e),
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Mat> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch {
                context: format!("inverse of {}x{}", self.rows, self.cols),
            });
        }
        self.left_inverse()
    }

    /// Canonical solution `X` of `self * X = rhs` (free variables zero),
    /// or `None` if the system is inconsistent.
    pub fn solve_right(&self, rhs: &Mat) -> Option<Mat> {
        assert_eq!(self.rows, rhs.rows);
        let f = self.field;
        let aug = self.hstack(rhs);
        let Rref { reduced, pivots } = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Mat::zeros(f, self.cols, rhs.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, reduced.get(r, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// `self^k` by repeated squaring (square matrices).
    pub fn pow(&self, mut k: u64) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = Mat::identity(self.field, self.rows);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
