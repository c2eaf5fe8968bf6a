//! Word products, partition sums `S_k(s) = sum_{|w| = k} phi^s(T_w)` and a
//! guaranteed bracket for the critical exponent where the pressure
//! `P(s) = lim (1/k) log S_k(s)` vanishes.
//!
//! `phi^s` is submultiplicative, so `log S_k` is subadditive in `k` and
//! `P(s) = inf_k (1/k) log S_k(s)`. Every finite-depth root therefore bounds
//! the critical exponent from above. From below, `phi^s(T_w) >= b^{s|w|}`
//! with `b` the smallest singular value among the maps gives
//! `P(s) >= log M + s log b`.
//!
//! Singular valuations of `T_w` do not depend on `s`, so a single traversal
//! of the word tree records, per depth, how many words share each valuation
//! profile. Every `S_k(s)` evaluation afterwards is a short exact-count sum.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::linalg::Matrix;
use crate::parallel::run_tasks;
use crate::svd::singular_valuations;
use crate::svf::phi_log_q;

/// Default cap on the number of word products computed in one traversal.
pub const DEFAULT_NODE_CAP: u64 = 2_000_000;

/// Word-count budget used to pick the default depth.
pub const DEPTH_WORD_BUDGET: u64 = 1_000_000;

/// Number of words per ascending singular-valuation list, at one depth.
pub type ValuationProfile = BTreeMap<Vec<i64>, u64>;

/// An alphabet of contractive non-singular maps `T_1, ..., T_M`.
#[derive(Clone, Debug)]
pub struct WordSpace {
    spec: FieldSpec,
    dim: usize,
    maps: Vec<Matrix>,
    valuations: Vec<Vec<i64>>,
    a_exp: i64,
    b_exp: i64,
}

impl WordSpace {
    pub fn new(maps: Vec<Matrix>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::InvalidArgument("at least two maps are required".into()));
        }
        let spec = maps[0].spec();
        let dim = maps[0].rows();
        let mut valuations = Vec::with_capacity(maps.len());
        for (i, t) in maps.iter().enumerate() {
            if t.spec() != spec {
                return Err(Error::FieldMismatch);
            }
            if !t.is_square() || t.rows() != dim {
                return Err(Error::ShapeMismatch(format!("map {i} is not {dim}x{dim}")));
            }
            let v = match singular_valuations(t) {
                Ok(v) => v,
                Err(Error::SingularMatrix) => return Err(Error::SingularMap { map: i }),
                Err(e) => return Err(e),
            };
            if v[0] < 1 {
                return Err(Error::ContractivityViolation { map: i, norm_exponent: -v[0] });
            }
            valuations.push(v);
        }
        let a_exp = valuations.iter().map(|v| v[0]).min().expect("nonempty");
        let b_exp = valuations.iter().map(|v| v[dim - 1]).max().expect("nonempty");
        Ok(WordSpace { spec, dim, maps, valuations, a_exp, b_exp })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Alphabet size `M`.
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn map_valuations(&self) -> &[Vec<i64>] {
        &self.valuations
    }

    /// `a = q^-a_exp` is the largest singular value over all maps.
    pub fn a_exp(&self) -> i64 {
        self.a_exp
    }

    /// `b = q^-b_exp` is the smallest singular value over all maps.
    pub fn b_exp(&self) -> i64 {
        self.b_exp
    }

    /// The same alphabet with every map multiplied by `c`.
    pub fn scaled(&self, c: &FieldElement) -> Result<WordSpace> {
        let maps = self.maps.iter().map(|t| t.scale(c)).collect::<Result<_>>()?;
        WordSpace::new(maps)
    }

    /// `T_w = T_{w_1} ... T_{w_k}`.
    pub fn word_product(&self, word: &[usize]) -> Result<Matrix> {
        let mut out = Matrix::identity(self.spec, self.dim);
        for &i in word {
            let t = self.maps.get(i).ok_or_else(|| Error::InvalidArgument(format!("letter {i} out of range")))?;
            out = out.mul(t)?;
        }
        Ok(out)
    }

    /// Number of products needed to reach every word of length `<= k`.
    pub fn tree_size(&self, k: usize) -> u64 {
        let m = self.len() as u64;
        let mut total = 0u64;
        let mut level = 1u64;
        for _ in 0..k {
            level = level.saturating_mul(m);
            total = total.saturating_add(level);
        }
        total
    }
}

/// Largest depth (at most 12) whose word count fits [`DEPTH_WORD_BUDGET`].
pub fn default_k_max(alphabet: usize) -> usize {
    let m = alphabet.max(2) as u64;
    let mut k = 0;
    let mut words = 1u64;
    while k < 12 && words * m <= DEPTH_WORD_BUDGET {
        words *= m;
        k += 1;
    }
    k.max(1)
}

/// Depth-first lexicographic traversal of all words of length `k`,
/// maintaining `T_w` incrementally. Returns the accumulator and the number of
/// products computed, `M + M^2 + ... + M^k`.
pub fn word_fold<A, F>(ws: &WordSpace, k: usize, init: A, mut visit: F) -> Result<(A, u64)>
where
    F: FnMut(A, &[usize], &Matrix) -> Result<A>,
{
    if k == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let mut word = Vec::with_capacity(k);
    let mut nodes = 0u64;
    let root = Matrix::identity(ws.spec, ws.dim);
    let acc = fold_rec(ws, k, &mut word, &root, init, &mut visit, &mut nodes)?;
    Ok((acc, nodes))
}

fn fold_rec<A, F>(
    ws: &WordSpace,
    k: usize,
    word: &mut Vec<usize>,
    tw: &Matrix,
    mut acc: A,
    visit: &mut F,
    nodes: &mut u64,
) -> Result<A>
where
    F: FnMut(A, &[usize], &Matrix) -> Result<A>,
{
    for (i, t) in ws.maps.iter().enumerate() {
        let child = tw.mul(t)?;
        *nodes += 1;
        word.push(i);
        acc = if word.len() == k {
            visit(acc, word, &child)?
        } else {
            fold_rec(ws, k, word, &child, acc, visit, nodes)?
        };
        word.pop();
    }
    Ok(acc)
}

fn profile_subtree(
    ws: &WordSpace,
    tw: &Matrix,
    depth: usize,
    k_max: usize,
    profiles: &mut [ValuationProfile],
) -> Result<()> {
    *profiles[depth - 1].entry(singular_valuations(tw)?).or_insert(0) += 1;
    if depth < k_max {
        for t in &ws.maps {
            profile_subtree(ws, &tw.mul(t)?, depth + 1, k_max, profiles)?;
        }
    }
    Ok(())
}

/// Valuation profiles of `T_w` for every depth `1..=k_max`, in one traversal.
/// The depth-1 subtrees are distributed over `workers` threads; counts are
/// merged in letter order.
pub fn valuation_profiles(ws: &WordSpace, k_max: usize, workers: usize, node_cap: u64) -> Result<Vec<ValuationProfile>> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let nodes = ws.tree_size(k_max);
    if nodes > node_cap {
        return Err(Error::BudgetExceeded { expanded: nodes, cap: node_cap });
    }
    let parts = run_tasks(ws.len(), workers, |i| {
        let mut profiles = vec![ValuationProfile::new(); k_max];
        profile_subtree(ws, &ws.maps[i], 1, k_max, &mut profiles).map(|_| profiles)
    });
    let mut merged = vec![ValuationProfile::new(); k_max];
    for part in parts {
        for (into, from) in merged.iter_mut().zip(part?) {
            for (key, count) in from {
                *into.entry(key).or_insert(0) += count;
            }
        }
    }
    Ok(merged)
}

/// `log S(s)` (natural log) from a valuation profile, summed with the
/// largest term factored out, in the profile's fixed key order.
pub fn log_sum_profile(profile: &ValuationProfile, s: f64, q: u64) -> f64 {
    let ln_q = (q as f64).ln();
    let terms: Vec<f64> = profile
        .iter()
        .map(|(v, &count)| (count as f64).ln() + ln_q * phi_log_q(v, s))
        .collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `log S_k(s)`, natural logarithm of the depth-`k` partition sum.
pub fn log_partition_sum(ws: &WordSpace, s: f64, k: usize) -> Result<f64> {
    if s < 0.0 || s.is_nan() {
        return Err(Error::NegativeExponent(s));
    }
    let profiles = valuation_profiles(ws, k, 1, DEFAULT_NODE_CAP)?;
    Ok(log_sum_profile(&profiles[k - 1], s, ws.spec.q()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PressureOptions {
    /// Deepest word length; `None` picks [`default_k_max`].
    pub k_max: Option<usize>,
    pub tol: f64,
    pub workers: usize,
    pub node_cap: u64,
}

impl Default for PressureOptions {
    fn default() -> Self {
        PressureOptions { k_max: None, tol: 1e-9, workers: 1, node_cap: DEFAULT_NODE_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PressureProbe {
    pub s: f64,
    /// `(1/k) log S_k(s)` at the deepest level.
    pub f: f64,
}

/// Bounds on the critical exponent `d(T_1, ..., T_M)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureBracket {
    pub k: usize,
    pub s_lower: f64,
    pub s_upper: f64,
    /// Root of `(1/k) log S_k` for each depth `k = 1..=k_max`.
    pub roots: Vec<f64>,
    pub probes: Vec<PressureProbe>,
    pub nodes: u64,
}

impl PressureBracket {
    pub fn width(&self) -> f64 {
        self.s_upper - self.s_lower
    }

    pub fn contains(&self, d: f64) -> bool {
        self.s_lower <= d && d <= self.s_upper
    }
}

/// Right end of the bisection domain; `f_k` is negative there for every `k`
/// since each `T_w` has norm at most `q^-|w|`.
pub fn search_limit(ws: &WordSpace) -> f64 {
    ws.dim as f64 + (ws.len() as f64).ln() / (ws.spec.q() as f64).ln() + 1.0
}

fn bisect_root(f: impl Fn(f64) -> f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, hi);
    let f_lo = f(lo);
    if f_lo <= 0.0 {
        return Err(Error::BracketFailure(format!("pressure at s = 0 is {f_lo}, expected positive")));
    }
    if f(hi) > 0.0 {
        return Err(Error::BracketFailure(format!("pressure at s = {hi} is still positive")));
    }
    while hi - lo > tol / 2.0 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Bracket the critical exponent using words up to length `k_max`.
pub fn critical_exponent(ws: &WordSpace, k_max: usize, tol: f64) -> Result<PressureBracket> {
    critical_exponent_with(ws, &PressureOptions { k_max: Some(k_max), tol, ..Default::default() })
}

/// As [`critical_exponent`], with worker count and node budget control.
///
/// The upper bound is the smallest root of `(1/k) log S_k` over
/// `k = 1..=k_max`, each of which dominates the true exponent.
pub fn critical_exponent_with(ws: &WordSpace, opts: &PressureOptions) -> Result<PressureBracket> {
    let k_max = opts.k_max.unwrap_or_else(|| default_k_max(ws.len()));
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let q = ws.spec.q();
    let profiles = valuation_profiles(ws, k_max, opts.workers, opts.node_cap)?;
    let hi = search_limit(ws);
    let mut roots = Vec::with_capacity(k_max);
    for (i, profile) in profiles.iter().enumerate() {
        let k = (i + 1) as f64;
        roots.push(bisect_root(|s| log_sum_profile(profile, s, q) / k, hi, opts.tol)?);
    }
    let s_upper = roots.iter().copied().fold(f64::INFINITY, f64::min);
    let ln_m = (ws.len() as f64).ln();
    let s_lower = (ln_m / (ws.b_exp as f64 * (q as f64).ln())).max(0.0).min(s_upper);

    let deepest = &profiles[k_max - 1];
    let mut probe_points: Vec<f64> = (0..=((hi / 0.25).floor() as usize)).map(|i| i as f64 * 0.25).collect();
    probe_points.extend([s_lower, s_upper]);
    let probes = probe_points
        .into_iter()
        .map(|s| PressureProbe { s, f: log_sum_profile(deepest, s, q) / k_max as f64 })
        .collect();
    Ok(PressureBracket { k: k_max, s_lower, s_upper, roots, probes, nodes: ws.tree_size(k_max) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailClass {
    Converging,
    Diverging,
    Inconclusive,
}

/// Diagnostic classification of `sum_{w in J} phi^s(T_w)` from the trend of
/// `f_k(s) = (1/k) log S_k(s)`.
///
/// A negative `f_k` proves convergence (the pressure is below it). A positive
/// lower bound `log M - s b_exp log q` proves divergence. Otherwise a sequence
/// that stays positive and would remain so under linear extrapolation over
/// another `k_max` steps is called diverging; anything else is inconclusive.
pub fn series_tail_probe(ws: &WordSpace, s: f64, k_max: usize) -> Result<TailClass> {
    const EPS: f64 = 1e-9;
    if s < 0.0 || s.is_nan() {
        return Err(Error::NegativeExponent(s));
    }
    let q = ws.spec.q();
    let profiles = valuation_profiles(ws, k_max, 1, DEFAULT_NODE_CAP)?;
    let f: Vec<f64> = profiles
        .iter()
        .enumerate()
        .map(|(i, p)| log_sum_profile(p, s, q) / (i + 1) as f64)
        .collect();
    let last = *f.last().expect("k_max >= 1");
    if last < -EPS {
        return Ok(TailClass::Converging);
    }
    let lower = (ws.len() as f64).ln() - s * ws.b_exp as f64 * (q as f64).ln();
    if lower > EPS {
        return Ok(TailClass::Diverging);
    }
    if f.iter().all(|&x| x > EPS) {
        let slope = if f.len() >= 2 { last - f[f.len() - 2] } else { 0.0 };
        if last + slope.min(0.0) * k_max as f64 > EPS {
            return Ok(TailClass::Diverging);
        }
    }
    Ok(TailClass::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn similarity(kind: crate::field::FieldKind, p: u64, m: usize) -> WordSpace {
        let spec = FieldSpec::new(kind, p, 16).unwrap();
        WordSpace::new(vec![Matrix::pi_diagonal(spec, &[1]); m]).unwrap()
    }

    #[test]
    fn fold_visits_words_in_order() {
        let spec = FieldSpec::padic(3).unwrap();
        let ws = WordSpace::new(vec![Matrix::pi_diagonal(spec, &[1]), Matrix::pi_diagonal(spec, &[2])]).unwrap();
        let (words, nodes) = word_fold(&ws, 2, Vec::new(), |mut acc, w, _| {
            acc.push(w.to_vec());
            Ok(acc)
        })
        .unwrap();
        assert_eq!(words, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(nodes, 6);
        let (mats, _) = word_fold(&ws, 1, Vec::new(), |mut acc, _, t| {
            acc.push(t.clone());
            Ok(acc)
        })
        .unwrap();
        assert_eq!(mats, ws.maps().to_vec());
    }

    #[test]
    fn closed_form_partition_sum() {
        let ws = similarity(crate::field::FieldKind::Padic, 3, 2);
        let got = log_partition_sum(&ws, 1.0, 5).unwrap();
        let oracle = 5.0 * (2.0f64 / 3.0).ln();
        assert!((got - oracle).abs() < 1e-12);
        let zero = log_partition_sum(&ws, 0.0, 5).unwrap();
        assert!((zero - 5.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn similarity_brackets_collapse() {
        let ws = similarity(crate::field::FieldKind::Padic, 3, 2);
        let d = 2f64.ln() / 3f64.ln();
        let b = critical_exponent(&ws, 1, 1e-9).unwrap();
        assert!((b.s_upper - d).abs() <= 1e-9);
        assert!((b.s_lower - d).abs() <= 1e-9);
        assert!(b.width() <= 2e-9);
        let ws3 = similarity(crate::field::FieldKind::Laurent, 3, 3);
        let b3 = critical_exponent(&ws3, 3, 1e-9).unwrap();
        assert!((b3.s_upper - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn default_depths() {
        assert_eq!(default_k_max(2), 12);
        assert_eq!(default_k_max(3), 12);
        assert_eq!(default_k_max(4), 9);
        assert_eq!(default_k_max(10), 6);
    }

    #[test]
    fn validation() {
        let spec = FieldSpec::padic(3).unwrap();
        let one = Matrix::identity(spec, 1);
        let pi = Matrix::pi_diagonal(spec, &[1]);
        assert_eq!(
            WordSpace::new(vec![pi.clone(), one]).unwrap_err(),
            Error::ContractivityViolation { map: 1, norm_exponent: 0 }
        );
        assert!(WordSpace::new(vec![pi.clone()]).is_err());
        let singular = Matrix::zeros(spec, 1, 1);
        assert_eq!(WordSpace::new(vec![pi, singular]).unwrap_err(), Error::SingularMap { map: 1 });
    }

    #[test]
    fn budget_is_enforced() {
        let ws = similarity(crate::field::FieldKind::Padic, 3, 2);
        let err = valuation_profiles(&ws, 10, 1, 100).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { expanded: 2046, cap: 100 });
    }

    #[test]
    fn tail_probe_classes() {
        let ws = similarity(crate::field::FieldKind::Padic, 3, 2);
        let d = 2f64.ln() / 3f64.ln();
        assert_eq!(series_tail_probe(&ws, d + 0.1, 6).unwrap(), TailClass::Converging);
        assert_eq!(series_tail_probe(&ws, 0.0, 6).unwrap(), TailClass::Diverging);
        assert_eq!(series_tail_probe(&ws, d, 6).unwrap(), TailClass::Inconclusive);
    }
}
