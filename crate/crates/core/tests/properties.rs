use nadim::attractor::{haar_translations, potential_integral_mc, trial_rng, unit_potential_closed_form};
use nadim::linalg::combinations;
use nadim::pressure::{critical_exponent, log_partition_sum, valuation_profiles, log_sum_profile};
use nadim::svd::{singular_valuations_by_minors, svd};
use nadim::svf::phi;
use nadim::{Aifs, BoxOptions, FieldElement, FieldKind, FieldSpec, Matrix, Valuation, WordSpace};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn spec_strategy() -> impl Strategy<Value = FieldSpec> {
    (prop_oneof![Just(FieldKind::Padic), Just(FieldKind::Laurent)], prop_oneof![Just(2u64), Just(3), Just(5), Just(7)])
        .prop_map(|(kind, p)| FieldSpec::new(kind, p, 24).unwrap())
}

fn element(spec: FieldSpec, rng: &mut ChaCha8Rng) -> FieldElement {
    let t = rng.gen_range(-3..=3);
    FieldElement::haar_sample(spec, rng, t)
}

fn nonsingular(spec: FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let t = Matrix::haar(spec, n, n, 0, rng);
        if !t.det().unwrap().is_zero() {
            return t;
        }
    }
}

fn v(x: &FieldElement) -> i64 {
    x.valuation().finite().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_laws_hold_at_precision(spec in spec_strategy(), seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let (x, y, z) = (element(spec, &mut rng), element(spec, &mut rng), element(spec, &mut rng));
        prop_assert!(x.add(&y).unwrap().eq_at_precision(&y.add(&x).unwrap()));
        prop_assert!(x.mul(&y).unwrap().eq_at_precision(&y.mul(&x).unwrap()));
        prop_assert!(x.add(&y).unwrap().sub(&y).unwrap().eq_at_precision(&x));
        let left = x.mul(&y.mul(&z).unwrap()).unwrap();
        let right = x.mul(&y).unwrap().mul(&z).unwrap();
        prop_assert_eq!(left.valuation(), right.valuation());
        prop_assert!(left.sub(&right).unwrap().valuation() >= Valuation::Finite(v(&left) + 16));
        prop_assert!(x.sub(&x).unwrap().is_zero());
    }

    #[test]
    fn inverse_round_trip(spec in spec_strategy(), seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let x = element(spec, &mut rng);
        let inv = x.inv().unwrap();
        prop_assert_eq!(v(&inv), -v(&x));
        prop_assert!(x.mul(&inv).unwrap().eq_at_precision(&FieldElement::one(spec)));
        prop_assert!(inv.inv().unwrap().eq_at_precision(&x));
    }

    #[test]
    fn prefix_keys_are_balls(spec in spec_strategy(), seed in any::<u64>(), t in 0i64..10, close in any::<bool>()) {
        let mut rng = trial_rng(seed, 0);
        let x = FieldElement::haar_sample(spec, &mut rng, 0);
        let d = if close {
            FieldElement::haar_sample(spec, &mut rng, t)
        } else {
            let k = rng.gen_range(0..t.max(1));
            FieldElement::haar_sample(spec, &mut rng, k)
        };
        let y = x.add(&d).unwrap();
        let same = x.digit_prefix(t, 0).unwrap() == y.digit_prefix(t, 0).unwrap();
        prop_assert_eq!(same, x.sub(&y).unwrap().valuation() >= Valuation::Finite(t));
    }

    #[test]
    fn operator_norm_is_submultiplicative(spec in spec_strategy(), seed in any::<u64>(), n in 1usize..4) {
        let mut rng = trial_rng(seed, 0);
        let a = Matrix::haar(spec, n, n, rng.gen_range(-2..2), &mut rng);
        let b = Matrix::haar(spec, n, n, rng.gen_range(-2..2), &mut rng);
        let ab = a.mul(&b).unwrap();
        prop_assert!(ab.min_valuation() >= Valuation::Finite(a.op_norm_exponent().unwrap() + b.op_norm_exponent().unwrap()));
    }

    #[test]
    fn determinant_is_multiplicative_and_adjugate_inverts(spec in spec_strategy(), seed in any::<u64>(), n in 1usize..4) {
        let mut rng = trial_rng(seed, 0);
        let a = nonsingular(spec, n, &mut rng);
        let b = nonsingular(spec, n, &mut rng);
        let (da, db) = (a.det().unwrap(), b.det().unwrap());
        let dab = a.mul(&b).unwrap().det().unwrap();
        prop_assert_eq!(v(&dab), v(&da) + v(&db));
        prop_assert!(dab.eq_at_precision(&da.mul(&db).unwrap()));
        let scaled = a.mul(&a.adjugate().unwrap()).unwrap();
        prop_assert!(scaled.eq_at_precision(&Matrix::diagonal(spec, &vec![da; n])));
    }

    #[test]
    fn cauchy_binet(seed in any::<u64>(), k in 1usize..3) {
        let spec = FieldSpec::padic(3).unwrap().with_precision(24).unwrap();
        let mut rng = trial_rng(seed, 0);
        let t = Matrix::haar(spec, 3, 3, 0, &mut rng);
        let u = Matrix::haar(spec, 3, 3, 0, &mut rng);
        let tu = t.mul(&u).unwrap();
        let subsets = combinations(3, k);
        let rows = &subsets[rng.gen_range(0..subsets.len())];
        let cols = &subsets[rng.gen_range(0..subsets.len())];
        let mut sum = FieldElement::zero(spec);
        for mid in &subsets {
            let term = t.minor_det(rows, mid).unwrap().mul(&u.minor_det(mid, cols).unwrap()).unwrap();
            sum = sum.add(&term).unwrap();
        }
        let direct = tu.minor_det(rows, cols).unwrap();
        prop_assert!(direct.sub(&sum).unwrap().valuation() >= Valuation::Finite(16));
    }

    #[test]
    fn decomposition_reconstructs(spec in spec_strategy(), seed in any::<u64>(), n in 1usize..5) {
        let mut rng = trial_rng(seed, 0);
        let t = nonsingular(spec, n, &mut rng);
        let d = svd(&t).unwrap();
        prop_assert!(d.reconstruct().unwrap().eq_at_precision(&t));
        prop_assert!(d.p.is_isometry().unwrap() && d.q.is_isometry().unwrap());
        prop_assert_eq!(&d.valuations, &singular_valuations_by_minors(&t).unwrap());
        prop_assert!(d.valuations.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(d.valuations.iter().sum::<i64>(), v(&t.det().unwrap()));
    }

    #[test]
    fn isometries_preserve_singular_values(seed in any::<u64>(), n in 1usize..4) {
        let spec = FieldSpec::laurent(2).unwrap().with_precision(24).unwrap();
        let mut rng = trial_rng(seed, 0);
        let t = nonsingular(spec, n, &mut rng);
        let iso = loop {
            let m = Matrix::haar(spec, n, n, 0, &mut rng);
            if m.det().unwrap().valuation() == Valuation::Finite(0) {
                break m;
            }
        };
        prop_assert!(iso.is_isometry().unwrap());
        prop_assert_eq!(svd(&iso.mul(&t).unwrap()).unwrap().valuations, svd(&t).unwrap().valuations);
    }
}

fn random_word_space(seed: u64) -> WordSpace {
    // products of random maps grow anisotropic, so keep the full default precision
    let spec = FieldSpec::padic(3).unwrap();
    let mut rng = trial_rng(seed, 0);
    let maps = (0..2)
        .map(|_| loop {
            let t = Matrix::haar(spec, 2, 2, 1, &mut rng);
            if !t.det().unwrap().is_zero() {
                break t;
            }
        })
        .collect();
    WordSpace::new(maps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partition_sums_are_subadditive(seed in any::<u64>(), s in 0.0f64..3.0) {
        let ws = random_word_space(seed);
        let profiles = valuation_profiles(&ws, 6, 1, 1_000_000).unwrap();
        let log_s = |k: usize| log_sum_profile(&profiles[k - 1], s, 3);
        for j in 1..=3 {
            for k in 1..=3 {
                prop_assert!(log_s(j + k) <= log_s(j) + log_s(k) + 1e-9);
            }
        }
        prop_assert!((log_s(4) - log_partition_sum(&ws, s, 4).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn pressure_decreases_in_s(seed in any::<u64>()) {
        let ws = random_word_space(seed);
        let profiles = valuation_profiles(&ws, 4, 1, 1_000_000).unwrap();
        let values: Vec<f64> = (0..=16).map(|i| log_sum_profile(&profiles[3], 0.25 * i as f64, 3)).collect();
        prop_assert!(values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn bracket_is_consistent(seed in any::<u64>()) {
        let ws = random_word_space(seed);
        let b = critical_exponent(&ws, 6, 1e-9).unwrap();
        prop_assert!(b.s_lower <= b.s_upper);
        for k in 1..=3 {
            prop_assert!(b.roots[2 * k - 1] <= b.roots[k - 1] + 1e-9);
        }
        let pi = FieldElement::pi(ws.spec());
        let shrunk = critical_exponent(&ws.scaled(&pi).unwrap(), 6, 1e-9).unwrap();
        prop_assert!(shrunk.s_upper < b.s_upper);
    }

    #[test]
    fn box_counts_refine_monotonically(seed in any::<u64>()) {
        let ws = random_word_space(seed);
        let mut rng = trial_rng(seed, 1);
        let aifs = Aifs::new(ws.clone(), haar_translations(&ws, &mut rng)).unwrap();
        let opts = BoxOptions::default();
        let table = aifs.box_count_table(0, 6, &opts).unwrap();
        prop_assert_eq!(table.rows[0].count, 1);
        for w in table.rows.windows(2) {
            prop_assert!(w[0].count <= w[1].count && w[1].count <= 9 * w[0].count);
        }
        // every fine ball sits inside a coarse one
        let coarse = aifs.box_count_keys(4, &opts).unwrap();
        let fine = aifs.box_count_keys(5, &opts).unwrap();
        for key in &fine {
            let truncated: Vec<u32> = key.0.chunks(5).flat_map(|c| c[..4].to_vec()).collect();
            prop_assert!(coarse.binary_search(&nadim::PrefixKey(truncated)).is_ok());
        }
    }

    #[test]
    fn attractor_is_invariant_at_each_resolution(seed in any::<u64>()) {
        let ws = random_word_space(seed);
        let mut rng = trial_rng(seed, 1);
        let aifs = Aifs::new(ws.clone(), haar_translations(&ws, &mut rng)).unwrap();
        let t = 4;
        let keys = aifs.box_count_keys(t, &BoxOptions::default()).unwrap();
        // points S_i(x_w) for deep words land in balls of K, and cover all of them
        let mut images = Vec::new();
        for i in 0..2 {
            for w in 0..64u32 {
                let word: Vec<usize> = (0..6).map(|b| ((w >> b) & 1) as usize).collect();
                let x = aifs.eval_point(&word).unwrap();
                let y = aifs.apply(i, &x).unwrap();
                let key: Vec<u32> = y.iter().flat_map(|c| c.digit_prefix(t, 0).unwrap().0).collect();
                images.push(nadim::PrefixKey(key));
            }
        }
        images.sort();
        images.dedup();
        prop_assert_eq!(images, keys);
    }

    #[test]
    fn eval_point_tail_bound(seed in any::<u64>(), len in 1usize..8, ext in 1usize..6) {
        let ws = random_word_space(seed);
        let mut rng = trial_rng(seed, 1);
        let aifs = Aifs::new(ws.clone(), haar_translations(&ws, &mut rng)).unwrap();
        let w: Vec<usize> = (0..len).map(|_| rng.gen_range(0..2)).collect();
        let mut wv = w.clone();
        wv.extend((0..ext).map(|_| rng.gen_range(0..2)));
        let a = aifs.eval_point(&w).unwrap();
        let b = aifs.eval_point(&wv).unwrap();
        let diff: Vec<FieldElement> = a.iter().zip(&b).map(|(x, y)| x.sub(y).unwrap()).collect();
        prop_assert!(nadim::linalg::vector_valuation(&diff) >= Valuation::Finite(len as i64));
    }
}

#[test]
fn invariant_ball_contains_images() {
    let spec = FieldSpec::laurent(3).unwrap().with_precision(24).unwrap();
    let mut rng = trial_rng(3, 0);
    let ws = WordSpace::new(vec![Matrix::pi_diagonal(spec, &[1, 2]), Matrix::pi_diagonal(spec, &[2, 1])]).unwrap();
    let b = vec![
        vec![FieldElement::pi_pow(spec, -2), FieldElement::one(spec)],
        vec![FieldElement::zero(spec), FieldElement::pi_pow(spec, -1)],
    ];
    let aifs = Aifs::new(ws, b).unwrap();
    let r = aifs.invariant_radius();
    assert_eq!(r, -2);
    for _ in 0..1000 {
        let x: Vec<FieldElement> = (0..2).map(|_| FieldElement::haar_sample(spec, &mut rng, r)).collect();
        for i in 0..2 {
            let y = aifs.apply(i, &x).unwrap();
            assert!(nadim::linalg::vector_valuation(&y) >= Valuation::Finite(r));
        }
    }
}

#[test]
fn haar_digits_are_uniform() {
    let spec = FieldSpec::padic(5).unwrap().with_precision(8).unwrap();
    let mut rng = trial_rng(0, 0);
    let samples = 100_000;
    let mut counts = [0u64; 5];
    for _ in 0..samples {
        // position 3 of a sample on O, zero-padded below its valuation
        let x = FieldElement::haar_sample(spec, &mut rng, 0);
        counts[x.digit_at(3).unwrap() as usize] += 1;
    }
    let p = 0.2;
    let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - samples as f64 * p).abs() <= 3.0 * sigma, "{counts:?}");
    }
}

#[test]
fn haar_scaling_by_pi() {
    let spec = FieldSpec::laurent(2).unwrap().with_precision(8).unwrap();
    let mut a = trial_rng(9, 0);
    let mut b = trial_rng(9, 0);
    let pi = FieldElement::pi(spec);
    for _ in 0..1000 {
        let x = FieldElement::haar_sample(spec, &mut a, 0).mul(&pi).unwrap();
        let y = FieldElement::haar_sample(spec, &mut b, 1);
        assert_eq!(x, y);
    }
}

#[test]
fn potential_integral_shifts_by_one_shell() {
    let spec = FieldSpec::padic(3).unwrap().with_precision(16).unwrap();
    let s = 0.5;
    let scaled = Matrix::pi_diagonal(spec, &[1]);
    let est = potential_integral_mc(&scaled, s, 50_000, &mut trial_rng(4, 0)).unwrap();
    let oracle = 3f64.powf(s) * unit_potential_closed_form(3, s);
    assert!((est.mean - oracle).abs() <= 3.0 * est.std_error, "{est:?} vs {oracle}");
    assert!((est.statistic - est.mean * phi(&scaled, s).unwrap().value()).abs() < 1e-12);
    assert!(potential_integral_mc(&scaled, 1.0, 10, &mut trial_rng(4, 0)).is_err());
}
