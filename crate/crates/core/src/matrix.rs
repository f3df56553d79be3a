//! Dense matrices over an exact field, with the handful of operations the
//! braided-category machinery needs: products, Kronecker products, inverses.
//!
//! Convention used throughout the crate: a composite of maps "first A, then B"
//! is written as the product `A * B` (see [`Matrix::then`]). All derived
//! formulas are translated into this one convention, so every identity checked
//! by the verifiers is convention-independent.

use crate::perm::Permutation;
use crate::scalar::{FieldTag, Scalar};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: FieldTag,
    entries: Vec<Scalar>, // row-major
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {} [", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, field: FieldTag, entries: Vec<Scalar>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        for e in &entries {
            assert_eq!(e.field(), field, "entry field mismatch");
        }
        Matrix {
            rows,
            cols,
            field,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize, field: FieldTag) -> Self {
        Matrix {
            rows,
            cols,
            field,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, field: FieldTag) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, field: FieldTag, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Matrix::new(rows, cols, field, entries)
    }

    /// Integer matrix helper, mostly for tests and frozen constants.
    pub fn from_i64_rows(field: FieldTag, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            for &v in *row {
                entries.push(field.from_i64(v));
            }
        }
        Matrix::new(r, c, field, entries)
    }

    /// Matrix of a permutation acting on basis vectors: e_i -> e_{perm(i)}.
    pub fn permutation(perm: &Permutation, field: FieldTag) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.set(perm.apply(i), i, field.one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        assert_eq!(v.field(), self.field, "entry field mismatch");
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_identity(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.at(r, c);
                if r == c {
                    if !e.is_one() {
                        return false;
                    }
                } else if !e.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in mul");
        assert_eq!(self.field, rhs.field, "field mismatch in mul");
        let mut out = Matrix::zeros(self.rows, rhs.cols, self.field);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(r, c).add(&a.mul(b));
                    out.set(r, c, cur);
                }
            }
        }
        out
    }

    /// Composite "apply `self` first, then `rhs`".
    pub fn then(&self, rhs: &Matrix) -> Matrix {
        self.mul(rhs)
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        assert_eq!(self.field, rhs.field, "field mismatch in add");
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Matrix::new(self.rows, self.cols, self.field, entries)
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        assert_eq!(s.field(), self.field);
        let entries = self.entries.iter().map(|e| e.mul(s)).collect();
        Matrix::new(self.rows, self.cols, self.field, entries)
    }

    /// Kronecker product; the left factor is most significant, i.e. bases are
    /// ordered lexicographically as e_i (x) e_j.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.field, rhs.field, "field mismatch in kron");
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Matrix::zeros(rows, cols, self.field);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.at(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..rhs.rows {
                    for c2 in 0..rhs.cols {
                        let b = rhs.at(r2, c2);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(r1 * rhs.rows + r2, c1 * rhs.cols + c2, a.mul(b));
                    }
                }
            }
        }
        out
    }

    /// Kronecker product of a sequence; empty product is the 1x1 identity.
    pub fn kron_all(field: FieldTag, factors: &[&Matrix]) -> Matrix {
        let mut acc = Matrix::identity(1, field);
        for f in factors {
            acc = acc.kron(f);
        }
        acc
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n, self.field);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.at(r, col).is_zero())?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a.at(col, col).clone();
            let pinv = p.inv()?;
            a.scale_row(col, &pinv);
            inv.scale_row(col, &pinv);
            for r in 0..n {
                if r != col && !a.at(r, col).is_zero() {
                    let factor = a.at(r, col).clone();
                    a.sub_scaled_row(r, col, &factor);
                    inv.sub_scaled_row(r, col, &factor);
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for c in 0..self.cols {
            self.entries.swap(r1 * self.cols + c, r2 * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: &Scalar) {
        for c in 0..self.cols {
            let v = self.at(r, c).mul(s);
            self.set(r, c, v);
        }
    }

    fn sub_scaled_row(&mut self, target: usize, source: usize, factor: &Scalar) {
        for c in 0..self.cols {
            let v = self.at(target, c).sub(&self.at(source, c).mul(factor));
            self.set(target, c, v);
        }
    }

    /// First entry where two equally-sized matrices differ.
    pub fn first_difference(&self, rhs: &Matrix) -> Option<(usize, usize)> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Some((0, 0));
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.at(r, c) != rhs.at(r, c) {
                    return Some((r, c));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldTag {
        FieldTag::Q
    }

    #[test]
    fn mul_identity() {
        let m = Matrix::from_i64_rows(q(), &[&[1, 2], &[3, 4]]);
        let id = Matrix::identity(2, q());
        assert_eq!(m.mul(&id), m);
        assert_eq!(id.mul(&m), m);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_i64_rows(q(), &[&[1, 2], &[3, 5]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());

        let singular = Matrix::from_i64_rows(q(), &[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn inverse_fp() {
        let f = FieldTag::Fp(7);
        let m = Matrix::from_i64_rows(f, &[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
    }

    #[test]
    fn kron_mixed_product() {
        let a = Matrix::from_i64_rows(q(), &[&[1, 2], &[0, 1]]);
        let b = Matrix::from_i64_rows(q(), &[&[2, 0], &[1, 3]]);
        let c = Matrix::from_i64_rows(q(), &[&[1, 1], &[1, 0]]);
        let d = Matrix::from_i64_rows(q(), &[&[0, 1], &[2, 1]]);
        // (A (x) B)(C (x) D) = AC (x) BD
        let lhs = a.kron(&b).mul(&c.kron(&d));
        let rhs = a.mul(&c).kron(&b.mul(&d));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn kron_empty_is_unit() {
        let e = Matrix::kron_all(q(), &[]);
        assert_eq!(e.rows(), 1);
        assert!(e.is_identity());
    }

    #[test]
    fn permutation_matrix_action() {
        let p = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let m = Matrix::permutation(&p, q());
        // e_0 -> e_1
        assert!(m.at(1, 0).is_one());
        assert!(m.at(0, 0).is_zero());
    }
}
