//! Dense exact matrices and right null spaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    /// Builds a matrix from row vectors; panics if they are ragged.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        let n = rows.len();
        Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Scalar::int(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Rows reordered by `perm` (row `k` of the result is row `perm[k]`).
    pub fn permute_rows(&self, perm: &[usize]) -> Matrix {
        Matrix::from_rows(perm.iter().map(|&i| self.row(i).to_vec()).collect())
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// Fraction-free (Bareiss) row reduction to echelon form.
    ///
    /// Rational rows are first scaled to integers, so for rational input all
    /// intermediate entries stay integral. Returns the echelon matrix and its
    /// pivot columns.
    fn echelon(&self) -> (Vec<Vec<Scalar>>, Vec<usize>) {
        let mut m: Vec<Vec<Scalar>> = (0..self.rows)
            .map(|i| clear_denominators(self.row(i)))
            .collect();
        let mut pivots = Vec::new();
        let mut prev = Scalar::one();
        let mut r = 0;
        for col in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m[i][col].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let (top, rest) = m.split_at_mut(r + 1);
            let pivot_row = &top[r];
            let pivot = pivot_row[col].clone();
            for row in rest.iter_mut() {
                let factor = row[col].clone();
                for j in col + 1..self.cols {
                    let lhs = &pivot * &row[j];
                    let v = if factor.is_zero() {
                        lhs
                    } else {
                        lhs - &factor * &pivot_row[j]
                    };
                    row[j] = &v / &prev;
                }
                row[col] = Scalar::zero();
            }
            prev = pivot;
            pivots.push(col);
            r += 1;
        }
        (m, pivots)
    }

    /// Basis of the right null space `{v : M v = 0}`.
    ///
    /// One vector per non-pivot column, in increasing column order; each is
    /// scaled so its first nonzero entry is 1. Empty when the kernel is
    /// trivial.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (m, pivots) = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (row, &pc) in pivots.iter().enumerate().rev() {
                    let mut acc = Scalar::zero();
                    for j in pc + 1..self.cols {
                        if !m[row][j].is_zero() && !v[j].is_zero() {
                            acc += &(&m[row][j] * &v[j]);
                        }
                    }
                    v[pc] = -(&acc / &m[row][pc]);
                }
                normalize_first_nonzero(&mut v);
                v
            })
            .collect()
    }
}

/// Scales `v` so its first nonzero entry is 1.
pub fn normalize_first_nonzero(v: &mut [Scalar]) {
    if let Some(lead) = v.iter().find(|c| !c.is_zero()).cloned() {
        let inv = lead.inv().expect("nonzero lead");
        for c in v.iter_mut() {
            *c = &*c * &inv;
        }
    }
}

/// Multiplies a rational row by the lcm of its denominators.
fn clear_denominators(row: &[Scalar]) -> Vec<Scalar> {
    let mut lcm = BigInt::one();
    for c in row {
        match c {
            Scalar::Rational(r) => lcm = lcm.lcm(r.denom()),
            Scalar::Quadratic { .. } => return row.to_vec(),
        }
    }
    let factor = Scalar::Rational(BigRational::from_integer(lcm));
    row.iter().map(|c| c * &factor).collect()
}

/// The kernel basis of `m`, free function form.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<Scalar>> {
    m.kernel_basis()
}
