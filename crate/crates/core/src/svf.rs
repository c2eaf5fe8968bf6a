//! The singular value function `phi^s`, evaluated in log-base-q space from
//! integer singular valuations. With `alpha_i = q^-v_i`,
//!
//! ```text
//! log_q phi^s = -(v_1 + ... + v_{m-1} + (s - m + 1) v_m)   0 < s <= n, m = ceil(s)
//! log_q phi^s = -(s / n) (v_1 + ... + v_n)                 s > n
//! ```
//!
//! and `phi^0 = 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::svd::singular_valuations;

/// Relative tolerance for comparing non-integer-`s` log values.
pub const LOG_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiValue {
    pub log_q_value: f64,
    pub q: u64,
}

impl PhiValue {
    pub fn value(&self) -> f64 {
        (self.q as f64).powf(self.log_q_value)
    }

    /// Natural logarithm of `phi^s`.
    pub fn ln(&self) -> f64 {
        self.log_q_value * (self.q as f64).ln()
    }
}

/// `log_q phi^s` from ascending singular valuations.
pub fn phi_log(valuations: &[i64], s: f64, q: u64) -> Result<PhiValue> {
    if s < 0.0 || s.is_nan() {
        return Err(Error::NegativeExponent(s));
    }
    if valuations.is_empty() {
        return Err(Error::ShapeMismatch("no singular values".into()));
    }
    Ok(PhiValue { log_q_value: phi_log_q(valuations, s), q })
}

pub(crate) fn phi_log_q(valuations: &[i64], s: f64) -> f64 {
    let n = valuations.len();
    if s == 0.0 {
        return 0.0;
    }
    if s > n as f64 {
        let total: i64 = valuations.iter().sum();
        return -(s / n as f64) * total as f64;
    }
    let m = s.ceil() as usize;
    let head: i64 = valuations[..m - 1].iter().sum();
    -(head as f64 + (s - m as f64 + 1.0) * valuations[m - 1] as f64)
}

/// `phi^s(T)` for a non-singular square matrix.
pub fn phi(t: &Matrix, s: f64) -> Result<PhiValue> {
    let v = singular_valuations(t)?;
    phi_log(&v, s, t.spec().q())
}

/// One comparison `phi^s(TU)` against `phi^s(T) phi^s(U)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubmultiplicativeSample {
    pub s: f64,
    pub lhs_log_q: f64,
    pub rhs_log_q: f64,
    /// Decided by integer arithmetic (integer `s`, or any `s > n`).
    pub exact: bool,
    pub holds: bool,
    pub equality: bool,
}

/// Compare both sides from singular valuations of `T`, `U` and `TU`.
///
/// Integer `s` and every `s > n` reduce to comparisons between integer sums
/// of valuations; the remaining cases compare floats with a relative
/// tolerance of [`LOG_TOLERANCE`].
pub fn compare_submultiplicative(vt: &[i64], vu: &[i64], vtu: &[i64], s: f64) -> Result<SubmultiplicativeSample> {
    if s < 0.0 || s.is_nan() {
        return Err(Error::NegativeExponent(s));
    }
    let n = vt.len();
    if vu.len() != n || vtu.len() != n {
        return Err(Error::ShapeMismatch("valuation lists of different lengths".into()));
    }
    let lhs = phi_log_q(vtu, s);
    let rhs = phi_log_q(vt, s) + phi_log_q(vu, s);
    let prefix = |v: &[i64], k: usize| -> i64 { v[..k].iter().sum() };
    let integer_case = if s > n as f64 {
        Some(n)
    } else if s.fract() == 0.0 {
        Some(s as usize)
    } else {
        None
    };
    let (exact, holds, equality) = match integer_case {
        Some(k) => {
            // phi is q^-(sum), so phi(TU) <= phi(T) phi(U) iff the sums compare the other way
            let l = prefix(vtu, k);
            let r = prefix(vt, k) + prefix(vu, k);
            (true, l >= r, l == r)
        }
        None => {
            let slack = LOG_TOLERANCE * rhs.abs().max(1.0);
            (false, lhs <= rhs + slack, (lhs - rhs).abs() <= slack)
        }
    };
    Ok(SubmultiplicativeSample { s, lhs_log_q: lhs, rhs_log_q: rhs, exact, holds, equality })
}

/// Per-`s` comparisons for a pair of non-singular matrices.
pub fn submultiplicativity_report(t: &Matrix, u: &Matrix, s_grid: &[f64]) -> Result<Vec<SubmultiplicativeSample>> {
    let vt = singular_valuations(t)?;
    let vu = singular_valuations(u)?;
    let vtu = singular_valuations(&t.mul(u)?)?;
    s_grid.iter().map(|&s| compare_submultiplicative(&vt, &vu, &vtu, s)).collect()
}

/// True iff `phi^s(TU) <= phi^s(T) phi^s(U)` for every `s` in the grid.
pub fn check_submultiplicative(t: &Matrix, u: &Matrix, s_grid: &[f64]) -> Result<bool> {
    Ok(submultiplicativity_report(t, u, s_grid)?.iter().all(|c| c.holds))
}

/// The grid `step, 2 step, ..., max`.
pub fn s_grid(step: f64, max: f64) -> Vec<f64> {
    let count = (max / step).round() as usize;
    (1..=count).map(|i| i as f64 * step).collect()
}
