//! Matrices over a non-Archimedean field.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec, Valuation};

/// Dense row-major matrix. Square matrices are the common case; rectangular
/// shapes (including `n x 1` columns) support storage, products and norms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl Matrix {
    pub fn new(spec: FieldSpec, rows: usize, cols: usize, entries: Vec<FieldElement>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|e| e.spec() != spec) {
            return Err(Error::FieldMismatch);
        }
        Ok(Matrix { spec, rows, cols, entries })
    }

    pub fn from_rows(spec: FieldSpec, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Self::new(spec, r, c, rows.into_iter().flatten().collect())
    }

    /// Build from integers (convenient in tests and examples).
    pub fn from_integers(spec: FieldSpec, rows: &[&[i64]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|&a| FieldElement::from_integer(spec, a)).collect())
            .collect();
        Self::from_rows(spec, rows)
    }

    pub fn zeros(spec: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { spec, rows, cols, entries: vec![FieldElement::zero(spec); rows * cols] }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(spec, n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::one(spec));
        }
        m
    }

    pub fn diagonal(spec: FieldSpec, diag: &[FieldElement]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(spec, n, n);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    /// `diag(pi^v_1, ..., pi^v_n)`.
    pub fn pi_diagonal(spec: FieldSpec, valuations: &[i64]) -> Self {
        let diag: Vec<_> = valuations.iter().map(|&v| FieldElement::pi_pow(spec, v)).collect();
        Self::diagonal(spec, &diag)
    }

    /// Matrix with independent Haar-uniform entries on `pi^t O`.
    pub fn haar<R: Rng + ?Sized>(spec: FieldSpec, rows: usize, cols: usize, t: i64, rng: &mut R) -> Self {
        let entries = (0..rows * cols).map(|_| FieldElement::haar_sample(spec, rng, t)).collect();
        Matrix { spec, rows, cols, entries }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: FieldElement) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.spec, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!("expected a square matrix, got {}x{}", self.rows, self.cols)))
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.spec != other.spec {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = FieldElement::zero(self.spec);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b)?)?;
                }
                entries.push(acc);
            }
        }
        Ok(Matrix { spec: self.spec, rows: self.rows, cols: other.cols, entries })
    }

    pub fn mul_vec(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} for a matrix with {} columns",
                x.len(),
                self.cols
            )));
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = FieldElement::zero(self.spec);
                for (a, b) in self.row(i).iter().zip(x) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b)?)?;
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.spec != other.spec {
            return Err(Error::FieldMismatch);
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch("cannot add matrices of different shapes".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Matrix { spec: self.spec, rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, c: &FieldElement) -> Result<Matrix> {
        let entries = self.entries.iter().map(|a| a.mul(c)).collect::<Result<_>>()?;
        Ok(Matrix { spec: self.spec, rows: self.rows, cols: self.cols, entries })
    }

    /// Smallest entry valuation; the operator norm is `q^-result` because the
    /// sup of `||Tx|| / ||x||` is attained at a basis vector.
    pub fn op_norm_exponent(&self) -> Result<i64> {
        match self.min_valuation() {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(Error::ZeroMatrix),
        }
    }

    pub fn min_valuation(&self) -> Valuation {
        self.entries.iter().map(FieldElement::valuation).min().unwrap_or(Valuation::Infinite)
    }

    /// Determinant by Gaussian elimination with full max-norm pivoting: every
    /// multiplier has norm at most 1.
    pub fn det(&self) -> Result<FieldElement> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.clone();
        let mut det = FieldElement::one(self.spec);
        let mut flip = false;
        for k in 0..n {
            let mut best: Option<(usize, usize, i64)> = None;
            for i in k..n {
                for j in k..n {
                    if let Valuation::Finite(v) = a.get(i, j).valuation() {
                        if best.is_none_or(|(_, _, bv)| v < bv) {
                            best = Some((i, j, v));
                        }
                    }
                }
            }
            let (r, c, _) = match best {
                Some(b) => b,
                None => return Ok(FieldElement::zero(self.spec)),
            };
            if r != k {
                a.swap_rows(r, k);
                flip = !flip;
            }
            if c != k {
                a.swap_cols(c, k);
                flip = !flip;
            }
            let pivot = a.get(k, k).clone();
            det = det.mul(&pivot)?;
            let pivot_inv = pivot.inv()?;
            for i in k + 1..n {
                if a.get(i, k).is_zero() {
                    continue;
                }
                let m = a.get(i, k).mul(&pivot_inv)?;
                for j in k + 1..n {
                    if a.get(k, j).is_zero() {
                        continue;
                    }
                    let updated = a.get(i, j).sub(&m.mul(a.get(k, j))?)?;
                    a.set(i, j, updated);
                }
            }
        }
        Ok(if flip { det.neg() } else { det })
    }

    /// Submatrix on the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Matrix> {
        if rows.iter().any(|&i| i >= self.rows) || cols.iter().any(|&j| j >= self.cols) {
            return Err(Error::ShapeMismatch("index out of range".into()));
        }
        let entries = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        Matrix::new(self.spec, rows.len(), cols.len(), entries)
    }

    /// Determinant of the square submatrix on strictly increasing indices.
    pub fn minor_det(&self, rows: &[usize], cols: &[usize]) -> Result<FieldElement> {
        if rows.len() != cols.len() || rows.is_empty() {
            return Err(Error::ShapeMismatch("minor index lists must have equal positive length".into()));
        }
        if !strictly_increasing(rows) || !strictly_increasing(cols) {
            return Err(Error::InvalidArgument("minor indices must be strictly increasing".into()));
        }
        self.submatrix(rows, cols)?.det()
    }

    /// Transposed cofactor matrix `T*`, so that `T T* = det(T) I`.
    pub fn adjugate(&self) -> Result<Matrix> {
        self.require_square()?;
        let n = self.rows;
        if n == 1 {
            return Ok(Matrix::identity(self.spec, 1));
        }
        let mut adj = Matrix::zeros(self.spec, n, n);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let minor = self.submatrix(&rows, &cols)?.det()?;
                adj.set(i, j, if (i + j) % 2 == 1 { minor.neg() } else { minor });
            }
        }
        Ok(adj)
    }

    /// `T^-1 = T* / det T`.
    pub fn inverse(&self) -> Result<Matrix> {
        let det = self.det()?;
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        self.adjugate()?.scale(&det.inv()?)
    }

    /// Membership in the isometry group: `||T|| = ||det T|| = 1`.
    pub fn is_isometry(&self) -> Result<bool> {
        self.require_square()?;
        if self.min_valuation() != Valuation::Finite(0) {
            return Ok(false);
        }
        Ok(self.det()?.valuation() == Valuation::Finite(0))
    }

    /// Entrywise equality up to the working precision of each entry.
    pub fn eq_at_precision(&self, other: &Matrix) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols)
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.eq_at_precision(b))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Max-norm of a vector, as the minimum coordinate valuation.
pub fn vector_valuation(x: &[FieldElement]) -> Valuation {
    x.iter().map(FieldElement::valuation).min().unwrap_or(Valuation::Infinite)
}

fn strictly_increasing(idx: &[usize]) -> bool {
    idx.windows(2).all(|w| w[0] < w[1])
}

/// All strictly increasing index strings of length `k` drawn from `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec() -> FieldSpec {
        FieldSpec::padic(3).unwrap()
    }

    /// `[[1 - c, -c], [1, 1]]`
    fn isometry_example(c: &FieldElement) -> Matrix {
        let s = c.spec();
        let one = FieldElement::one(s);
        Matrix::from_rows(s, vec![vec![one.sub(c).unwrap(), c.neg()], vec![one.clone(), one]]).unwrap()
    }

    #[test]
    fn identity_product_and_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = Matrix::haar(spec(), 3, 3, 0, &mut rng);
        let i = Matrix::identity(spec(), 3);
        assert_eq!(i.mul(&a).unwrap(), a);
        assert_eq!(i.op_norm_exponent().unwrap(), 0);
        assert_eq!(Matrix::pi_diagonal(spec(), &[1, 2]).op_norm_exponent().unwrap(), 1);
        assert_eq!(Matrix::zeros(spec(), 2, 2).op_norm_exponent(), Err(Error::ZeroMatrix));
    }

    #[test]
    fn diagonal_products_and_inverses() {
        let d = Matrix::pi_diagonal(spec(), &[1, 1]);
        assert_eq!(d.mul(&d).unwrap(), Matrix::pi_diagonal(spec(), &[2, 2]));
        let e = Matrix::pi_diagonal(spec(), &[1, 2]);
        assert!(e.inverse().unwrap().eq_at_precision(&Matrix::pi_diagonal(spec(), &[-1, -2])));
        let i = Matrix::identity(spec(), 2);
        assert_eq!(i.inverse().unwrap(), i);
        assert_eq!(Matrix::zeros(spec(), 2, 2).inverse(), Err(Error::SingularMatrix));
    }

    #[test]
    fn remark_isometry_has_unit_determinant() {
        for s in [spec(), FieldSpec::laurent(2).unwrap()] {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..20 {
                let c = FieldElement::haar_sample(s, &mut rng, 1);
                let t = isometry_example(&c);
                assert!(t.det().unwrap().eq_at_precision(&FieldElement::one(s)));
                assert!(t.is_isometry().unwrap());
            }
        }
        assert!(Matrix::identity(spec(), 3).is_isometry().unwrap());
        assert!(!Matrix::pi_diagonal(spec(), &[1, 0]).is_isometry().unwrap());
    }

    #[test]
    fn minors() {
        let t = Matrix::from_integers(spec(), &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]).unwrap();
        assert_eq!(t.minor_det(&[1], &[2]).unwrap(), FieldElement::from_integer(spec(), 6));
        assert!(t.minor_det(&[0, 1, 2], &[0, 1, 2]).unwrap().eq_at_precision(&t.det().unwrap()));
        // 1*5 - 2*4 = -3
        let m = t.minor_det(&[0, 1], &[0, 1]).unwrap();
        assert!(m.eq_at_precision(&FieldElement::from_integer(spec(), -3)));
        assert!(t.minor_det(&[1, 0], &[0, 1]).is_err());
        assert_eq!(combinations(4, 2).len(), 6);
    }

    #[test]
    fn det_with_sign_from_swaps() {
        // entries chosen so the max-norm pivot forces row and column swaps
        let t = Matrix::from_integers(spec(), &[&[3, 1], &[1, 0]]).unwrap();
        assert!(t.det().unwrap().eq_at_precision(&FieldElement::from_integer(spec(), -1)));
        let t = Matrix::from_integers(spec(), &[&[9, 3, 1], &[3, 1, 0], &[1, 0, 0]]).unwrap();
        assert!(t.det().unwrap().eq_at_precision(&FieldElement::from_integer(spec(), -1)));
    }

    #[test]
    fn rectangular_norm_and_shape_errors() {
        let s = spec();
        let col = Matrix::from_integers(s, &[&[9], &[3]]).unwrap();
        assert_eq!(col.op_norm_exponent().unwrap(), 1);
        assert!(col.det().is_err());
        let sq = Matrix::identity(s, 2);
        assert!(col.mul(&sq).is_err());
        assert_eq!(sq.mul(&col).unwrap(), col);
    }
}
