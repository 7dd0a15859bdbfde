use std::f64::consts::PI;

use circnorm::circulant::{
    gram_power, gram_row, normalized_power, spectral_norm, symbol_values, DftPlan, FirstRow,
};
use circnorm::classify::{
    classify, membership, minimal_positive_power, phase_cone, power_is_positive, SignCondition,
    Tolerances, Verdict,
};
use circnorm::dense::{dense_gram, dense_norm_oracle};
use circnorm::experiments::{build_table, sample_sphere, shard_rng, Condition, TableSpec};
use circnorm::NormalizedPowers;
use num_complex::Complex64;
use proptest::prelude::*;

fn real_row(max_n: usize) -> impl Strategy<Value = FirstRow> {
    prop::collection::vec(-1.0f64..1.0, 2..=max_n)
        .prop_filter("nonzero", |v| v.iter().any(|&a| a.abs() > 1e-3))
        .prop_map(|v| FirstRow::from_real(&v).unwrap())
}

fn complex_row(max_n: usize) -> impl Strategy<Value = FirstRow> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=max_n)
        .prop_filter("nonzero", |v| {
            v.iter().any(|&(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(|v| {
            FirstRow::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
        })
}

fn any_row(max_n: usize) -> impl Strategy<Value = FirstRow> {
    prop_oneof![real_row(max_n), complex_row(max_n)]
}

fn rel_err(got: &[Complex64], want: &[Complex64]) -> f64 {
    let scale = want
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    got.iter()
        .zip(want)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale
}

fn decided(a: Verdict, b: Verdict) -> bool {
    a != Verdict::Boundary && b != Verdict::Boundary
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_matches_dense_oracle(x in any_row(32)) {
        let norm = spectral_norm(&x);
        let oracle = dense_norm_oracle(&x).unwrap();
        prop_assert!((norm - oracle).abs() <= 1e-8 * norm.max(1.0), "{norm} vs {oracle}");
    }

    #[test]
    fn parseval(x in any_row(24)) {
        let lhs: f64 = symbol_values(&x).values().iter().map(|z| z.norm_sqr()).sum();
        let rhs = x.len() as f64 * x.norm2().powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }

    #[test]
    fn gram_symbol_is_squared_modulus(x in any_row(24)) {
        let got = symbol_values(&gram_row(&x));
        let want: Vec<Complex64> =
            symbol_values(&x).values().iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
        prop_assert!(rel_err(got.values(), &want) <= 1e-10);
    }

    #[test]
    fn gram_power_matches_dense(x in any_row(8), m in 1u32..=5) {
        let dense = dense_gram(&x).pow(m);
        let power = gram_power(&x, m).unwrap();
        prop_assert!(rel_err(power.row.entries(), dense.row(0)) <= 1e-8);
    }

    #[test]
    fn real_rows_give_real_powers(x in real_row(16), m in 1u32..=40) {
        let power = gram_power(&x, m).unwrap();
        prop_assert!(power.imag_residue < 1e-10 * power.symbol.max_abs());
        prop_assert!(power.row.is_real());
    }

    #[test]
    fn norm_scales_with_modulus(x in any_row(16), re in -10.0f64..10.0, im in -10.0f64..10.0) {
        let s = Complex64::new(re, im);
        prop_assume!(s.norm() > 1e-3);
        let scaled = spectral_norm(&x.scaled(s).unwrap());
        let want = s.norm() * spectral_norm(&x);
        prop_assert!((scaled - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn verdicts_invariant_under_real_scaling(x in any_row(10), s in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3]) {
        let tol = Tolerances::default();
        let a = membership(&x, &tol).unwrap();
        let b = membership(&x.scaled(Complex64::new(s, 0.0)).unwrap(), &tol).unwrap();
        if decided(a.in_cn, b.in_cn) {
            prop_assert_eq!(a.in_cn, b.in_cn);
        }
        if decided(a.in_cn_prime, b.in_cn_prime) {
            prop_assert_eq!(a.in_cn_prime, b.in_cn_prime);
        }
    }

    #[test]
    fn verdicts_invariant_under_rotation(x in any_row(10), k in 0usize..10) {
        let tol = Tolerances::default();
        let y = x.rotated(k);
        let mut ma = symbol_values(&x).moduli();
        let mut mb = symbol_values(&y).moduli();
        ma.sort_by(f64::total_cmp);
        mb.sort_by(f64::total_cmp);
        let scale = ma.last().copied().unwrap();
        for (a, b) in ma.iter().zip(&mb) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
        let a = membership(&x, &tol).unwrap();
        let b = membership(&y, &tol).unwrap();
        if decided(a.in_cn, b.in_cn) {
            prop_assert_eq!(a.in_cn, b.in_cn);
        }
        if decided(a.in_cn_prime, b.in_cn_prime) {
            prop_assert_eq!(a.in_cn_prime, b.in_cn_prime);
        }
    }

    #[test]
    fn power_chain(x in real_row(10)) {
        let tol = Tolerances::default();
        let powers = NormalizedPowers::new(&x).unwrap();
        for m in [1u32, 2, 4, 8, 16] {
            if power_is_positive(&powers, m, &tol) {
                prop_assert!(power_is_positive(&powers, 2 * m, &tol), "positive at {m}, not at {}", 2 * m);
            }
        }
    }

    #[test]
    fn phase_cone_is_sufficient(
        n in 2usize..=8,
        parts in prop::collection::vec((0.05f64..1.0, -0.99f64..0.99, any::<bool>()), 8),
        start in 0usize..8,
    ) {
        let tol = Tolerances::default();
        let half = PI / (2.0 * n as f64);
        let start = start % n;
        let entries: Vec<Complex64> = (0..n)
            .map(|j| {
                let (r, t, keep) = parts[j];
                // entries start and start+1 always survive
                let adjacent = j == start || j == (start + 1) % n;
                if keep || adjacent { Complex64::from_polar(r, t * half) } else { Complex64::new(0.0, 0.0) }
            })
            .collect();
        let y = FirstRow::new(entries).unwrap();
        prop_assert!(phase_cone(&y, &tol).holds);
        prop_assert_eq!(membership(&y, &tol).unwrap().in_cn_prime, Verdict::Yes);
    }
}

#[test]
fn chain_implications_on_the_sphere() {
    let tol = Tolerances::default();
    for n in 2..=10usize {
        let mut rng = shard_rng(0xC4A1, n as u64);
        for _ in 0..1000 {
            let x = sample_sphere(n, &mut rng).unwrap();
            let r = classify(&x, &tol, None).unwrap();
            let sign = r.sign_condition.unwrap();
            if matches!(
                sign,
                SignCondition::PlusNonneg
                    | SignCondition::MinusNonneg
                    | SignCondition::PlusPositive
                    | SignCondition::MinusPositive
            ) {
                assert!(r.gram_nonnegative, "{x:?}");
            }
            if r.gram_nonnegative {
                assert_ne!(r.in_cn, Verdict::No, "{x:?}");
            }
            if r.gram_positive {
                assert_ne!(r.in_cn_prime, Verdict::No, "{x:?}");
            }
        }
    }
}

#[test]
fn necessity_with_clear_gap() {
    let tol = Tolerances::default();
    let mut checked = 0;
    for n in 2..=10usize {
        let mut rng = shard_rng(0xEC55, n as u64);
        for _ in 0..500 {
            let x = sample_sphere(n, &mut rng).unwrap();
            let m = membership(&x, &tol).unwrap();
            if m.in_cn_prime != Verdict::Yes || m.gap_margin <= 1e-3 {
                continue;
            }
            checked += 1;
            let first = minimal_positive_power(&x, 512, &tol)
                .unwrap()
                .unwrap_or_else(|| panic!("no m for {x:?}"));
            let powers = NormalizedPowers::new(&x).unwrap();
            for probe in [first, first + 1, 2 * first, 512] {
                assert!(
                    power_is_positive(&powers, probe, &tol),
                    "{x:?} at m = {probe}"
                );
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn normalized_power_tends_to_uniform_row() {
    let x = FirstRow::from_real(&[1.0, -2.0, -3.0]).unwrap();
    let row = normalized_power(&x, 200).unwrap();
    assert!(row
        .entries()
        .iter()
        .all(|z| (z.re - 1.0 / 3.0).abs() < 1e-12));
}

#[test]
fn inverse_transform_round_trip() {
    let mut rng = shard_rng(0x1D, 0);
    for n in 1..=16 {
        let plan = DftPlan::new(n).unwrap();
        let x = circnorm::experiments::sample_complex_sphere(n, &mut rng).unwrap();
        let back = plan.inverse(&plan.symbol(x.entries()));
        assert!(rel_err(&back, x.entries()) < 1e-13);
    }
}

fn small_spec(samples: u64) -> TableSpec {
    TableSpec {
        dims: vec![2, 3, 5, 8],
        samples,
        ..TableSpec::default()
    }
}

#[test]
fn table_chain_is_monotone() {
    for row in build_table(&small_spec(30_000)).unwrap() {
        let cols = row.columns();
        for w in cols.windows(2) {
            let (a, b) = (w[0].1, w[1].1);
            let slack = match w[1].0 {
                Condition::InCnPrime => row.boundary_count as f64 / a.total as f64,
                _ => 0.0,
            };
            assert!(
                a.fraction() <= b.fraction() + slack + 1e-12,
                "n = {}: {:?} > {:?}",
                row.n,
                w[0],
                w[1]
            );
        }
    }
}

#[test]
fn table_is_deterministic_and_thread_count_free() {
    let spec = small_spec(20_000);
    let base = build_table(&spec).unwrap();
    assert_eq!(base, build_table(&spec).unwrap());
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        assert_eq!(
            base,
            pool.install(|| build_table(&spec).unwrap()),
            "{threads} threads"
        );
    }
}

#[test]
fn n2_is_one_half_everywhere() {
    let spec = TableSpec {
        dims: vec![2],
        samples: 40_000,
        ..TableSpec::default()
    };
    let row = &build_table(&spec).unwrap()[0];
    for (c, est) in row.columns() {
        let se = (0.25 / est.total as f64).sqrt();
        assert!(
            (est.fraction() - 0.5).abs() <= 4.0 * se,
            "{c:?}: {}",
            est.fraction()
        );
    }
}

#[test]
fn sphere_samples_are_centered() {
    let mut rng = shard_rng(0x5A, 0);
    let n = 4;
    let draws = 100_000;
    let mut sums = [0.0; 4];
    let mut positive = 0u32;
    for _ in 0..draws {
        let x = sample_sphere(n, &mut rng).unwrap().real_entries().unwrap();
        for (s, v) in sums.iter_mut().zip(&x) {
            *s += v;
        }
        positive += u32::from(x[0] > 0.0);
    }
    // each coordinate has variance 1/n on the sphere
    let se = (1.0 / (n as f64 * draws as f64)).sqrt();
    for s in sums {
        assert!((s / draws as f64).abs() <= 4.0 * se);
    }
    let p = positive as f64 / draws as f64;
    assert!((p - 0.5).abs() <= 4.0 * (0.25 / draws as f64).sqrt());
}
