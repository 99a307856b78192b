//! Sparse matrices stored by columns, plus a small dense elimination kit.
//!
//! Columns are kept canonical (sorted row indices, no explicit zeros) so
//! structural equality is semantic equality.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

pub type SparseColumn = Vec<(usize, Scalar)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<SparseColumn>,
}

fn canonical_column(mut entries: Vec<(usize, Scalar)>) -> SparseColumn {
    entries.sort_by_key(|(r, _)| *r);
    let mut out: SparseColumn = Vec::with_capacity(entries.len());
    for (r, v) in entries {
        match out.last_mut() {
            Some((lr, lv)) if *lr == r => *lv += &v,
            _ => out.push((r, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

/// Accumulates a sparse column from unordered contributions.
#[derive(Default)]
pub struct ColumnAccumulator {
    entries: BTreeMap<usize, Scalar>,
}

impl ColumnAccumulator {
    pub fn new() -> Self {
        ColumnAccumulator { entries: BTreeMap::new() }
    }

    pub fn add(&mut self, row: usize, v: Scalar) {
        match self.entries.get_mut(&row) {
            Some(x) => *x += &v,
            None => {
                self.entries.insert(row, v);
            }
        }
    }

    pub fn finish(self) -> SparseColumn {
        self.entries.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field, rows, cols, data: vec![Vec::new(); cols] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let data = (0..n).map(|i| vec![(i, field.one())]).collect();
        Matrix { field, rows: n, cols: n, data }
    }

    /// Builds from columns; entries may be unsorted, repeated or zero.
    pub fn from_columns(field: Field, rows: usize, columns: Vec<Vec<(usize, Scalar)>>) -> Result<Matrix> {
        let cols = columns.len();
        let mut data = Vec::with_capacity(cols);
        for (c, col) in columns.into_iter().enumerate() {
            for (r, v) in &col {
                if *r >= rows {
                    return Err(Error::Shape(format!("row index {r} out of range in column {c} ({rows} rows)")));
                }
                if v.field() != field {
                    return Err(Error::FieldMismatch(field, v.field()));
                }
            }
            data.push(canonical_column(col));
        }
        Ok(Matrix { field, rows, cols, data })
    }

    /// Builds from row-major dense data.
    pub fn from_dense(field: Field, rows: usize, cols: usize, dense: &[Vec<Scalar>]) -> Result<Matrix> {
        if dense.len() != rows || dense.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape(format!("expected a {rows}x{cols} array")));
        }
        let mut columns = vec![Vec::new(); cols];
        for (r, row) in dense.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if v.field() != field {
                    return Err(Error::FieldMismatch(field, v.field()));
                }
                if !v.is_zero() {
                    columns[c].push((r, v.clone()));
                }
            }
        }
        Ok(Matrix { field, rows, cols, data: columns })
    }

    /// Convenience constructor from small integers, row-major.
    pub fn from_ints(field: Field, rows: &[&[i64]]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let dense: Vec<Vec<Scalar>> = rows.iter().map(|row| row.iter().map(|&x| field.int(x)).collect()).collect();
        Matrix::from_dense(field, r, c, &dense).expect("ragged integer matrix")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> &[(usize, Scalar)] {
        &self.data[c]
    }

    pub fn columns(&self) -> &[SparseColumn] {
        &self.data
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.data[c]
            .binary_search_by_key(&r, |(i, _)| *i)
            .map(|k| self.data[c][k].1.clone())
            .unwrap_or_else(|_| self.field.zero())
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![self.field.zero(); self.cols]; self.rows];
        for (c, col) in self.data.iter().enumerate() {
            for (r, v) in col {
                out[*r][c] = v.clone();
            }
        }
        out
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = rhs
            .data
            .iter()
            .map(|col| {
                let mut acc = ColumnAccumulator::new();
                for (k, b) in col {
                    for (i, a) in &self.data[*k] {
                        acc.add(*i, a * b);
                    }
                }
                acc.finish()
            })
            .collect();
        Ok(Matrix { field: self.field, rows: self.rows, cols: rhs.cols, data })
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_field(rhs)?;
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Shape(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| canonical_column(a.iter().chain(b.iter()).cloned().collect()))
            .collect();
        Ok(Matrix { field: self.field, rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        if c.is_zero() {
            return Matrix::zeros(self.field, self.rows, self.cols);
        }
        let data = self.data.iter().map(|col| col.iter().map(|(r, v)| (*r, v * c)).collect()).collect();
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Matrix {
        let data = self.data.iter().map(|col| col.iter().map(|(r, v)| (*r, -v)).collect()).collect();
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Matrix {
        let mut cols = vec![Vec::new(); self.rows];
        for (c, col) in self.data.iter().enumerate() {
            for (r, v) in col {
                cols[*r].push((c, v.clone()));
            }
        }
        Matrix { field: self.field, rows: self.cols, cols: self.rows, data: cols }
    }

    /// Kronecker product; row `(i, k)` has index `i * rhs.rows + k`.
    pub fn kron(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_field(rhs)?;
        let mut data = Vec::with_capacity(self.cols * rhs.cols);
        for a_col in &self.data {
            for b_col in &rhs.data {
                let mut col = Vec::with_capacity(a_col.len() * b_col.len());
                for (i, a) in a_col {
                    for (k, b) in b_col {
                        col.push((i * rhs.rows + k, a * b));
                    }
                }
                data.push(col);
            }
        }
        Ok(Matrix { field: self.field, rows: self.rows * rhs.rows, cols: self.cols * rhs.cols, data })
    }

    pub fn rank(&self) -> usize {
        rref(&self.to_dense()).1.len()
    }
}

/// Reduced row echelon form of a dense matrix; returns the form and pivot columns.
pub fn rref(m: &[Vec<Scalar>]) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv().unwrap();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[i][j] = &a[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Basis of the null space of a dense `rows x cols` matrix.
pub fn kernel(field: Field, m: &[Vec<Scalar>], cols: usize) -> Vec<Vec<Scalar>> {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![field.zero(); cols];
            v[fc] = field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&r[row][fc];
            }
            v
        })
        .collect()
}

/// Some solution `x` of `m x = b`, if one exists.
pub fn solve(field: Field, m: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let cols = m.first().map_or(0, Vec::len);
    let aug: Vec<Vec<Scalar>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![field.zero(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = r[row][cols].clone();
    }
    Some(x)
}

/// Inverse of a square dense matrix.
pub fn inverse(field: Field, m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let aug: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>], f: Field) -> Vec<Vec<Scalar>> {
        let n = a.len();
        let m = b.first().map_or(0, Vec::len);
        let k = b.len();
        (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let mut s = f.zero();
                        for t in 0..k {
                            s += &(&a[i][t] * &b[t][j]);
                        }
                        s
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn product_matches_dense_oracle_over_f7() {
        let f = Field::prime(7).unwrap();
        let a = Matrix::from_ints(f, &[&[1, 2, 0], &[0, 3, 4], &[5, 0, 6]]);
        let b = Matrix::from_ints(f, &[&[0, 1, 1], &[2, 0, 3], &[4, 4, 0]]);
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod.to_dense(), dense_mul(&a.to_dense(), &b.to_dense(), f));
    }

    #[test]
    fn canonical_form_drops_cancelling_entries() {
        let q = Field::Rationals;
        let m = Matrix::from_columns(q, 2, vec![vec![(1, q.int(2)), (0, q.int(1)), (1, q.int(-2))]]).unwrap();
        let n = Matrix::from_ints(q, &[&[1], &[0]]);
        assert_eq!(m, n);
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn kron_indexing() {
        let q = Field::Rationals;
        let a = Matrix::from_ints(q, &[&[1, 2]]);
        let b = Matrix::from_ints(q, &[&[0], &[3]]);
        let k = a.kron(&b).unwrap();
        assert_eq!(k.to_dense(), Matrix::from_ints(q, &[&[0, 0], &[3, 6]]).to_dense());
    }

    #[test]
    fn kernel_and_solve() {
        let q = Field::Rationals;
        let m = Matrix::from_ints(q, &[&[1, 1, 0], &[0, 0, 1]]).to_dense();
        let k = kernel(q, &m, 3);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![q.int(-1), q.int(1), q.int(0)]);
        let x = solve(q, &m, &[q.int(2), q.int(5)]).unwrap();
        assert_eq!(x, vec![q.int(2), q.int(0), q.int(5)]);
        assert!(solve(q, &Matrix::from_ints(q, &[&[0]]).to_dense(), &[q.int(1)]).is_none());
        let inv = inverse(q, &Matrix::from_ints(q, &[&[2, 1], &[1, 1]]).to_dense()).unwrap();
        assert_eq!(inv, Matrix::from_ints(q, &[&[1, -1], &[-1, 2]]).to_dense());
    }
}
