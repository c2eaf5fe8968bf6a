//! Isometric singular value decomposition `T = P D Q`.
//!
//! The decomposition is built by elementary isometries only: a maximal-norm
//! entry is moved to the pivot position with row and column swaps, then its
//! row and column are cleared with row/column additions whose multipliers
//! have norm at most 1. The diagonal entries of `D` are not unique, but their
//! norms (the singular values) are.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, Valuation};
use crate::linalg::{combinations, Matrix};

#[derive(Clone, Debug, PartialEq)]
pub struct SingularDecomposition {
    pub p: Matrix,
    pub d: Matrix,
    pub q: Matrix,
    /// Valuations of the diagonal of `D`, ascending (singular values descending).
    pub valuations: Vec<i64>,
}

impl SingularDecomposition {
    /// `P D Q`, to compare against the decomposed matrix.
    pub fn reconstruct(&self) -> Result<Matrix> {
        self.p.mul(&self.d)?.mul(&self.q)
    }

    /// Singular values `alpha_i = q^-v_i` rendered as floats.
    pub fn singular_values(&self) -> Vec<f64> {
        let q = self.d.spec().q() as f64;
        self.valuations.iter().map(|&v| q.powi(-(v as i32))).collect()
    }
}

/// How to pick among several entries of maximal norm.
trait PivotChoice {
    fn choose(&mut self, candidates: &[(usize, usize)]) -> usize;
}

struct FirstCandidate;

impl PivotChoice for FirstCandidate {
    fn choose(&mut self, _: &[(usize, usize)]) -> usize {
        0
    }
}

struct RandomCandidate<'a, R: Rng + ?Sized>(&'a mut R);

impl<R: Rng + ?Sized> PivotChoice for RandomCandidate<'_, R> {
    fn choose(&mut self, candidates: &[(usize, usize)]) -> usize {
        self.0.gen_range(0..candidates.len())
    }
}

struct Elimination {
    diag: Vec<FieldElement>,
    p: Option<Matrix>,
    q: Option<Matrix>,
}

fn eliminate(t: &Matrix, chooser: &mut dyn PivotChoice, track: bool) -> Result<Elimination> {
    if !t.is_square() {
        return Err(Error::ShapeMismatch("decomposition needs a square matrix".into()));
    }
    let spec = t.spec();
    let n = t.rows();
    let mut a = t.clone();
    let mut p = track.then(|| Matrix::identity(spec, n));
    let mut q = track.then(|| Matrix::identity(spec, n));
    let mut diag = Vec::with_capacity(n);
    let mut candidates = Vec::with_capacity(n * n);

    for k in 0..n {
        let mut best = Valuation::Infinite;
        candidates.clear();
        for i in k..n {
            for j in k..n {
                let v = a.get(i, j).valuation();
                if v.is_infinite() {
                    continue;
                }
                if v < best {
                    best = v;
                    candidates.clear();
                }
                if v == best {
                    candidates.push((i, j));
                }
            }
        }
        if candidates.is_empty() {
            return Err(Error::SingularMatrix);
        }
        let (r, c) = candidates[chooser.choose(&candidates)];

        // T = P A Q is maintained: a row swap on A is undone by a column swap
        // on P, a column swap on A by a row swap on Q.
        a.swap_rows(r, k);
        a.swap_cols(c, k);
        if let (Some(p), Some(q)) = (p.as_mut(), q.as_mut()) {
            p.swap_cols(r, k);
            q.swap_rows(c, k);
        }

        let pivot = a.get(k, k).clone();
        let pivot_inv = pivot.inv()?;
        let zero = FieldElement::zero(spec);

        // Row additions: row_i -= m_i row_k, undone by col_k(P) += m_i col_i(P).
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
            a.set(i, k, zero.clone());
            if let Some(p) = p.as_mut() {
                for r in 0..n {
                    if p.get(r, i).is_zero() {
                        continue;
                    }
                    let updated = p.get(r, k).add(&m.mul(p.get(r, i))?)?;
                    p.set(r, k, updated);
                }
            }
        }

        // Column additions: col_j -= m_j col_k, undone by row_k(Q) += m_j row_j(Q).
        // Column k is already cleared below the pivot, so only A[k][j] changes.
        for j in k + 1..n {
            if a.get(k, j).is_zero() {
                continue;
            }
            if let Some(q) = q.as_mut() {
                let m = a.get(k, j).mul(&pivot_inv)?;
                for c in 0..n {
                    if q.get(j, c).is_zero() {
                        continue;
                    }
                    let updated = q.get(k, c).add(&m.mul(q.get(j, c))?)?;
                    q.set(k, c, updated);
                }
            }
            a.set(k, j, zero.clone());
        }
        diag.push(pivot);
    }
    Ok(Elimination { diag, p, q })
}

fn finish(e: Elimination) -> SingularDecomposition {
    let Elimination { diag, p, q } = e;
    let p = p.expect("tracked");
    let q = q.expect("tracked");
    let spec = p.spec();
    let n = diag.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| diag[i].valuation());
    let mut p_sorted = Matrix::zeros(spec, n, n);
    let mut q_sorted = Matrix::zeros(spec, n, n);
    let mut d_sorted = Vec::with_capacity(n);
    for (l, &old) in order.iter().enumerate() {
        for r in 0..n {
            p_sorted.set(r, l, p.get(r, old).clone());
            q_sorted.set(l, r, q.get(old, r).clone());
        }
        d_sorted.push(diag[old].clone());
    }
    let valuations = d_sorted.iter().map(|d| d.valuation().finite().expect("nonzero pivot")).collect();
    SingularDecomposition { p: p_sorted, d: Matrix::diagonal(spec, &d_sorted), q: q_sorted, valuations }
}

/// Decompose a non-singular matrix, breaking pivot ties by the smallest
/// (row, column) position.
pub fn svd(t: &Matrix) -> Result<SingularDecomposition> {
    eliminate(t, &mut FirstCandidate, true).map(finish)
}

/// Decompose with uniformly random tie-breaking among maximal-norm pivots.
pub fn svd_randomized<R: Rng + ?Sized>(t: &Matrix, rng: &mut R) -> Result<SingularDecomposition> {
    eliminate(t, &mut RandomCandidate(rng), true).map(finish)
}

/// Sorted singular valuations from the same elimination, without
/// accumulating `P` and `Q`.
pub fn singular_valuations(t: &Matrix) -> Result<Vec<i64>> {
    let e = eliminate(t, &mut FirstCandidate, false)?;
    let mut v: Vec<i64> = e.diag.iter().map(|d| d.valuation().finite().expect("nonzero pivot")).collect();
    v.sort_unstable();
    Ok(v)
}

/// Singular valuations from minors alone: the largest `s x s` minor norm is
/// `alpha_1 ... alpha_s`, so consecutive differences recover each `v_s`.
pub fn singular_valuations_by_minors(t: &Matrix) -> Result<Vec<i64>> {
    if !t.is_square() {
        return Err(Error::ShapeMismatch("minors need a square matrix".into()));
    }
    let n = t.rows();
    let mut out = Vec::with_capacity(n);
    let mut previous = 0i64;
    for s in 1..=n {
        let subsets = combinations(n, s);
        let mut best = Valuation::Infinite;
        for rows in &subsets {
            for cols in &subsets {
                best = best.min(t.minor_det(rows, cols)?.valuation());
            }
        }
        let m = best.finite().ok_or(Error::SingularMatrix)?;
        out.push(m - previous);
        previous = m;
    }
    Ok(out)
}

/// Decompose twice with random tie-breaking and report whether the singular
/// valuations agree.
pub fn svd_uniqueness_probe<R: Rng + ?Sized>(t: &Matrix, rng: &mut R) -> Result<bool> {
    let first = svd_randomized(t, rng)?;
    let second = svd_randomized(t, rng)?;
    Ok(first.valuations == second.valuations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_decomposes_trivially() {
        let spec = FieldSpec::padic(3).unwrap();
        let i = Matrix::identity(spec, 3);
        let d = svd(&i).unwrap();
        assert_eq!(d.valuations, vec![0, 0, 0]);
        assert!(d.p.is_isometry().unwrap() && d.q.is_isometry().unwrap());
        assert!(d.reconstruct().unwrap().eq_at_precision(&i));
    }

    #[test]
    fn diagonal_is_sorted() {
        let spec = FieldSpec::laurent(2).unwrap();
        let t = Matrix::pi_diagonal(spec, &[2, 1]);
        let d = svd(&t).unwrap();
        assert_eq!(d.valuations, vec![1, 2]);
        assert!(d.reconstruct().unwrap().eq_at_precision(&t));
        assert_eq!(singular_valuations_by_minors(&t).unwrap(), vec![1, 2]);
        assert_eq!(singular_valuations(&t).unwrap(), vec![1, 2]);
    }

    #[test]
    fn isometry_example_has_unit_singular_values() {
        let spec = FieldSpec::padic(3).unwrap();
        let one = FieldElement::one(spec);
        let c = FieldElement::pi(spec);
        let t = Matrix::from_rows(spec, vec![vec![one.sub(&c).unwrap(), c.neg()], vec![one.clone(), one]])
            .unwrap();
        assert_eq!(svd(&t).unwrap().valuations, vec![0, 0]);
        assert_eq!(singular_valuations_by_minors(&t).unwrap(), vec![0, 0]);
    }

    #[test]
    fn singular_input_is_rejected() {
        let spec = FieldSpec::padic(5).unwrap();
        let t = Matrix::from_integers(spec, &[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(svd(&t).unwrap_err(), Error::SingularMatrix);
        assert_eq!(singular_valuations_by_minors(&t).unwrap_err(), Error::SingularMatrix);
    }

    #[test]
    fn ties_do_not_change_valuations() {
        let spec = FieldSpec::padic(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // all-ones plus a perturbation in P: every entry is a unit
        let mut t = Matrix::from_integers(spec, &[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]).unwrap();
        for i in 0..3 {
            let bump = FieldElement::haar_sample(spec, &mut rng, i as i64 + 1);
            t.set(i, i, t.get(i, i).add(&bump).unwrap());
        }
        let oracle = singular_valuations_by_minors(&t).unwrap();
        for _ in 0..20 {
            assert!(svd_uniqueness_probe(&t, &mut rng).unwrap());
            assert_eq!(svd_randomized(&t, &mut rng).unwrap().valuations, oracle);
        }
    }
}
