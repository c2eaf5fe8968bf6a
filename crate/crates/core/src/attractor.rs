//! Affine iterated function systems `S_i(x) = T_i x + b_i` on `F^n`, exact
//! box counting of their attractors, dimension fits, the random-translation
//! experiment and Monte-Carlo potential integrals.
//!
//! In an ultrametric space two balls of the same radius are either equal or
//! disjoint, and a set of diameter at most `q^-t` sits inside exactly one
//! ball of radius `q^-t`. Counting distinct digit prefixes of points of the
//! attractor therefore gives the covering number with no approximation.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrefixKey, Valuation};
use crate::linalg::{vector_valuation, Matrix};
use crate::parallel::run_tasks;
use crate::pressure::{critical_exponent_with, PressureOptions, WordSpace, DEFAULT_NODE_CAP};
use crate::svf::phi;

#[derive(Clone, Debug)]
pub struct Aifs {
    ws: WordSpace,
    translations: Vec<Vec<FieldElement>>,
    r_exp: i64,
}

impl Aifs {
    pub fn new(ws: WordSpace, translations: Vec<Vec<FieldElement>>) -> Result<Self> {
        if translations.len() != ws.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} maps but {} translations",
                ws.len(),
                translations.len()
            )));
        }
        for (i, b) in translations.iter().enumerate() {
            if b.len() != ws.dim() {
                return Err(Error::ShapeMismatch(format!("translation {i} has length {}", b.len())));
            }
            if b.iter().any(|x| x.spec() != ws.spec()) {
                return Err(Error::FieldMismatch);
            }
        }
        let r_exp = translations
            .iter()
            .flatten()
            .filter_map(|x| x.valuation().finite())
            .fold(0, i64::min);
        Ok(Aifs { ws, translations, r_exp })
    }

    pub fn word_space(&self) -> &WordSpace {
        &self.ws
    }

    pub fn translations(&self) -> &[Vec<FieldElement>] {
        &self.translations
    }

    /// Exponent of the invariant ball: `S_i(B) ⊆ B` for `B` of radius
    /// `q^-r_exp`, since `||T_i x + b_i|| <= max(||T_i|| ||x||, ||b_i||)`.
    pub fn invariant_radius(&self) -> i64 {
        self.r_exp
    }

    /// `S_i(x)`.
    pub fn apply(&self, i: usize, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let tx = self.ws.maps()[i].mul_vec(x)?;
        tx.iter().zip(&self.translations[i]).map(|(a, b)| a.add(b)).collect()
    }

    /// `S_{w_1} ∘ ... ∘ S_{w_k}(0) = b_{w_1} + T_{w_1} b_{w_2} + ...`.
    pub fn eval_point(&self, word: &[usize]) -> Result<Vec<FieldElement>> {
        if word.is_empty() {
            return Err(Error::InvalidArgument("word must be nonempty".into()));
        }
        let mut c = vec![FieldElement::zero(self.ws.spec()); self.ws.dim()];
        let mut t = Matrix::identity(self.ws.spec(), self.ws.dim());
        for &i in word {
            if i >= self.ws.len() {
                return Err(Error::InvalidArgument(format!("letter {i} out of range")));
            }
            c = self.child_offset(&c, &t, i)?;
            t = t.mul(&self.ws.maps()[i])?;
        }
        Ok(c)
    }

    fn child_offset(&self, c: &[FieldElement], t: &Matrix, i: usize) -> Result<Vec<FieldElement>> {
        let tb = t.mul_vec(&self.translations[i])?;
        c.iter().zip(&tb).map(|(a, b)| a.add(b)).collect()
    }

    fn key(&self, c: &[FieldElement], t: i64) -> Result<Vec<u32>> {
        let mut key = Vec::with_capacity(c.len() * (t - self.r_exp).max(0) as usize);
        for x in c {
            key.extend(x.digit_prefix(t, self.r_exp)?.0);
        }
        Ok(key)
    }

    fn collect_keys(&self, t: i64, opts: &BoxOptions) -> Result<(HashSet<Vec<u32>>, u64)> {
        let spec = self.ws.spec();
        let n = self.ws.dim();
        let origin = vec![FieldElement::zero(spec); n];
        if self.r_exp >= t {
            let mut keys = HashSet::new();
            keys.insert(self.key(&origin, t)?);
            return Ok((keys, 0));
        }
        let expanded = AtomicU64::new(0);
        let identity = Matrix::identity(spec, n);
        let parts = run_tasks(self.ws.len(), opts.workers, |i| {
            let mut keys = HashSet::new();
            let walk = Walk { aifs: self, t, cap: opts.node_cap, expanded: &expanded };
            walk.descend(&identity, &origin, i, &mut keys).map(|_| keys)
        });
        let mut keys = HashSet::new();
        for part in parts {
            keys.extend(part?);
        }
        Ok((keys, expanded.load(Ordering::Relaxed)))
    }

    /// Exact number of radius-`q^-t` balls meeting the attractor, and the
    /// number of word products computed to find them.
    pub fn box_count(&self, t: i64, opts: &BoxOptions) -> Result<(u64, u64)> {
        let (keys, expanded) = self.collect_keys(t, opts)?;
        Ok((keys.len() as u64, expanded))
    }

    /// The distinct ball keys at scale `t`, sorted. Each key lists, per
    /// coordinate, the digits at positions `invariant_radius() .. t`.
    pub fn box_count_keys(&self, t: i64, opts: &BoxOptions) -> Result<Vec<PrefixKey>> {
        let (keys, _) = self.collect_keys(t, opts)?;
        let mut keys: Vec<PrefixKey> = keys.into_iter().map(PrefixKey).collect();
        keys.sort();
        Ok(keys)
    }

    pub fn box_count_table(&self, t_min: i64, t_max: i64, opts: &BoxOptions) -> Result<BoxCountTable> {
        if t_min > t_max {
            return Err(Error::InvalidArgument(format!("t_min {t_min} exceeds t_max {t_max}")));
        }
        let mut rows = Vec::new();
        for t in t_min..=t_max {
            let (count, words_expanded) = self.box_count(t, opts)?;
            rows.push(BoxCountRow { t, count, words_expanded });
        }
        Ok(BoxCountTable { q: self.ws.spec().q(), rows })
    }

    /// Least-squares slope of `log_q N_t` against `t` over `t_min..=t_max`.
    pub fn box_dimension_estimate(&self, t_min: i64, t_max: i64, opts: &BoxOptions) -> Result<f64> {
        if t_min >= t_max {
            return Err(Error::InvalidArgument("box dimension needs t_min < t_max".into()));
        }
        Ok(self.box_count_table(t_min, t_max, opts)?.slope())
    }
}

/// One branch of the word tree: offset `c_w = S_w(0)` and linear part `T_w`.
struct Walk<'a> {
    aifs: &'a Aifs,
    t: i64,
    cap: u64,
    expanded: &'a AtomicU64,
}

impl Walk<'_> {
    fn descend(&self, tw: &Matrix, cw: &[FieldElement], i: usize, keys: &mut HashSet<Vec<u32>>) -> Result<()> {
        if self.expanded.fetch_add(1, Ordering::Relaxed) >= self.cap {
            return Err(Error::BudgetExceeded { expanded: self.cap + 1, cap: self.cap });
        }
        let c = self.aifs.child_offset(cw, tw, i)?;
        let t = tw.mul(&self.aifs.ws.maps()[i])?;
        // the subtree lies in the ball of radius ||T_w|| R around c_w
        if t.op_norm_exponent()? + self.aifs.r_exp >= self.t {
            keys.insert(self.aifs.key(&c, self.t)?);
            return Ok(());
        }
        for j in 0..self.aifs.ws.len() {
            self.descend(&t, &c, j, keys)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxOptions {
    pub node_cap: u64,
    pub workers: usize,
}

impl Default for BoxOptions {
    fn default() -> Self {
        BoxOptions { node_cap: DEFAULT_NODE_CAP, workers: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoxCountRow {
    pub t: i64,
    pub count: u64,
    pub words_expanded: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxCountTable {
    pub q: u64,
    pub rows: Vec<BoxCountRow>,
}

impl BoxCountTable {
    /// Least-squares slope of `log_q N_t` against `t`.
    pub fn slope(&self) -> f64 {
        let ln_q = (self.q as f64).ln();
        let points: Vec<(f64, f64)> =
            self.rows.iter().map(|r| (r.t as f64, (r.count as f64).ln() / ln_q)).collect();
        least_squares_slope(&points)
    }

    /// Rows as `t,N_t,words_expanded` lines under a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,N_t,words_expanded\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.t, r.count, r.words_expanded));
        }
        out
    }
}

pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Haar-random translations, one vector per map, coordinates uniform on `O`.
pub fn haar_translations<R: Rng + ?Sized>(ws: &WordSpace, rng: &mut R) -> Vec<Vec<FieldElement>> {
    (0..ws.len())
        .map(|_| (0..ws.dim()).map(|_| FieldElement::haar_sample(ws.spec(), rng, 0)).collect())
        .collect()
}

/// The RNG for one trial: stream `trial` of the ChaCha generator seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOptions {
    pub trials: usize,
    pub seed: u64,
    pub t_min: i64,
    pub t_max: i64,
    /// Trials within this distance of `min(n, s_upper)` count as agreeing.
    pub band: f64,
    pub pressure: PressureOptions,
    pub boxes: BoxOptions,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            trials: 20,
            seed: 0,
            t_min: 4,
            t_max: 12,
            band: 0.05,
            pressure: PressureOptions::default(),
            boxes: BoxOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub estimate: f64,
    pub deviation: f64,
    pub within_band: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub s_lower: f64,
    pub s_upper: f64,
    /// `min(n, s_upper)`, the predicted dimension for almost every translation.
    pub target: f64,
    pub band: f64,
    pub trials: Vec<TrialResult>,
    pub fraction_within_band: f64,
    pub max_estimate: f64,
}

/// Box dimension of `K(b)` for Haar-random `b`, compared with `min(n, d)`.
pub fn random_translation_experiment(ws: &WordSpace, opts: &ExperimentOptions) -> Result<ExperimentReport> {
    if opts.trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let bracket = critical_exponent_with(ws, &opts.pressure)?;
    let target = (ws.dim() as f64).min(bracket.s_upper);
    let mut trials = Vec::with_capacity(opts.trials);
    for trial in 0..opts.trials {
        let mut rng = trial_rng(opts.seed, trial as u64);
        let aifs = Aifs::new(ws.clone(), haar_translations(ws, &mut rng))?;
        let estimate = aifs.box_dimension_estimate(opts.t_min, opts.t_max, &opts.boxes)?;
        let deviation = estimate - target;
        trials.push(TrialResult { trial, estimate, deviation, within_band: deviation.abs() <= opts.band });
    }
    let hits = trials.iter().filter(|r| r.within_band).count();
    let max_estimate = trials.iter().map(|r| r.estimate).fold(f64::NEG_INFINITY, f64::max);
    Ok(ExperimentReport {
        s_lower: bracket.s_lower,
        s_upper: bracket.s_upper,
        target,
        band: opts.band,
        fraction_within_band: hits as f64 / opts.trials as f64,
        max_estimate,
        trials,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub samples: usize,
    /// Mean of `||T x||^-s` over Haar-random `x` in `O^n`.
    pub mean: f64,
    pub std_error: f64,
    pub phi_log_q: f64,
    /// `mean * phi^s(T)`, bounded independently of `T`.
    pub statistic: f64,
}

/// Monte-Carlo estimate of `∫_{O^n} ||T x||^-s dx` for `0 < s < n`, `s` not
/// an integer.
pub fn potential_integral_mc<R: Rng + ?Sized>(t: &Matrix, s: f64, samples: usize, rng: &mut R) -> Result<McEstimate> {
    let n = t.rows();
    if !(s > 0.0 && s < n as f64) || s.fract() == 0.0 {
        return Err(Error::InvalidArgument(format!("s must be a non-integer in (0, {n}), got {s}")));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("at least two samples are required".into()));
    }
    let phi_t = phi(t, s)?;
    let spec = t.spec();
    let q = spec.q() as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut taken = 0;
    while taken < samples {
        let x: Vec<FieldElement> = (0..n).map(|_| FieldElement::haar_sample(spec, rng, 0)).collect();
        let v = match vector_valuation(&t.mul_vec(&x)?) {
            Valuation::Finite(v) => v,
            Valuation::Infinite => continue,
        };
        let value = q.powf(s * v as f64);
        sum += value;
        sum_sq += value * value;
        taken += 1;
    }
    let m = samples as f64;
    let mean = sum / m;
    let variance = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok(McEstimate {
        samples,
        mean,
        std_error: (variance / m).sqrt(),
        phi_log_q: phi_t.log_q_value,
        statistic: mean * phi_t.value(),
    })
}

/// `∫_{O} |x|^-s dx = (1 - q^-1) / (1 - q^(s-1))` in one dimension, `0 < s < 1`.
pub fn unit_potential_closed_form(q: u64, s: f64) -> f64 {
    let q = q as f64;
    (1.0 - 1.0 / q) / (1.0 - q.powf(s - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldKind, FieldSpec};

    fn cantor(kind: FieldKind, p: u64, b: [i64; 2]) -> Aifs {
        let spec = FieldSpec::new(kind, p, 32).unwrap();
        let ws = WordSpace::new(vec![Matrix::pi_diagonal(spec, &[1]); 2]).unwrap();
        let bs = b.iter().map(|&x| vec![FieldElement::from_integer(spec, x)]).collect();
        Aifs::new(ws, bs).unwrap()
    }

    #[test]
    fn cantor_counts_are_powers_of_two() {
        let k = cantor(FieldKind::Padic, 3, [0, 1]);
        let table = k.box_count_table(0, 10, &BoxOptions::default()).unwrap();
        for r in &table.rows {
            assert_eq!(r.count, 1 << r.t);
        }
        assert!((table.slope() - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_translations_give_a_point() {
        let k = cantor(FieldKind::Laurent, 3, [0, 0]);
        for t in 0..6 {
            assert_eq!(k.box_count(t, &BoxOptions::default()).unwrap().0, 1);
        }
        assert_eq!(k.box_dimension_estimate(1, 5, &BoxOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn eval_point_geometric_sum() {
        let k = cantor(FieldKind::Padic, 3, [0, 1]);
        let spec = k.word_space().spec();
        let x = k.eval_point(&[1, 1, 1]).unwrap();
        assert!(x[0].eq_at_precision(&FieldElement::from_integer(spec, 13)));
        assert_eq!(k.eval_point(&[0]).unwrap()[0], FieldElement::zero(spec));
    }

    #[test]
    fn invariant_radius_follows_translations() {
        let spec = FieldSpec::padic(3).unwrap();
        let ws = WordSpace::new(vec![Matrix::pi_diagonal(spec, &[1]); 2]).unwrap();
        let big = FieldElement::pi_pow(spec, -2);
        let k = Aifs::new(ws, vec![vec![FieldElement::zero(spec)], vec![big]]).unwrap();
        assert_eq!(k.invariant_radius(), -2);
        // a copy of the Cantor set scaled by q^2
        assert_eq!(k.box_count(-2, &BoxOptions::default()).unwrap().0, 1);
        assert_eq!(k.box_count(1, &BoxOptions::default()).unwrap().0, 8);
    }

    #[test]
    fn budget_is_not_silently_truncated() {
        let k = cantor(FieldKind::Padic, 3, [0, 1]);
        let err = k.box_count(10, &BoxOptions { node_cap: 50, workers: 1 }).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { expanded: 51, cap: 50 });
    }

    #[test]
    fn workers_do_not_change_counts() {
        let k = cantor(FieldKind::Padic, 3, [1, 5]);
        let one = k.box_count(8, &BoxOptions::default()).unwrap();
        let four = k.box_count(8, &BoxOptions { workers: 4, ..Default::default() }).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn closed_form_potential() {
        assert!((unit_potential_closed_form(3, 0.5) - 1.5773502691896257).abs() < 1e-12);
    }
}
