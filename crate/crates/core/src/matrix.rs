//! Dense matrices over an exact [`Field`] with Gaussian elimination.

use std::fmt;

use crate::field::Field;

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    pub reduced: Matrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<F>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix row");
            data.extend(row);
        }
        Matrix { rows: n, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Copy of the rows listed in `rows`, restricted to the columns in `cols`.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix { rows: rows.len(), cols: cols.len(), data }
    }

    /// Appends the rows of `other` below `self`.
    pub fn stack(&self, other: &Matrix<F>) -> Self {
        assert_eq!(self.cols, other.cols, "column mismatch when stacking");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| self.row(r).iter().zip(v).fold(F::zero(), |acc, (a, b)| acc.add(&a.mul(b)))).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Eliminates below (and, if `reduce`, above) each pivot. Returns the
    /// pivot columns and the parity of row swaps performed.
    fn eliminate(&mut self, reduce: bool) -> (Vec<usize>, bool) {
        let mut pivots = Vec::new();
        let mut odd_swaps = false;
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(found) = (pivot_row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if found != pivot_row {
                self.swap_rows(found, pivot_row);
                odd_swaps = !odd_swaps;
            }
            let inv = self.get(pivot_row, col).inv().expect("pivot is nonzero");
            if reduce {
                for c in col..self.cols {
                    let v = self.get(pivot_row, c).mul(&inv);
                    self.set(pivot_row, c, v);
                }
            }
            let targets: Vec<usize> = if reduce {
                (0..self.rows).filter(|&r| r != pivot_row).collect()
            } else {
                (pivot_row + 1..self.rows).collect()
            };
            for r in targets {
                if self.get(r, col).is_zero() {
                    continue;
                }
                let factor = if reduce { self.get(r, col).clone() } else { self.get(r, col).mul(&inv) };
                for c in col..self.cols {
                    let v = self.get(r, c).sub(&factor.mul(self.get(pivot_row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (pivots, odd_swaps)
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate(false).0.len()
    }

    /// Exact determinant. Panics on a non-square matrix.
    pub fn determinant(&self) -> F {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let (pivots, odd) = m.eliminate(false);
        if pivots.len() < m.rows {
            return F::zero();
        }
        let mut det = F::one();
        for i in 0..m.rows {
            det = det.mul(m.get(i, i));
        }
        if odd {
            det.neg()
        } else {
            det
        }
    }

    pub fn echelon(&self) -> Echelon<F> {
        let mut reduced = self.clone();
        let (pivots, _) = reduced.eliminate(true);
        Echelon { reduced, pivots }
    }

    /// Basis of the right kernel `{x : Mx = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let Echelon { reduced, pivots } = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = vec![F::zero(); self.cols];
                x[free] = F::one();
                for (r, &p) in pivots.iter().enumerate() {
                    x[p] = reduced.get(r, free).neg();
                }
                x
            })
            .collect()
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  {}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}
