use hardy_core::lexpr::LEFunction;
use hardy_core::nearlin::{find_lambda_witness, NearLinearEngine};
use hardy_core::seqcalc::{detect_polynomial, IntSeqWindow, Polynomial};
use hardy_core::sequence::PolySequence;
use hardy_core::sublin::{b_of, g_set_minimum};
use hardy_core::superlin::{check_pi, mu_equation, mu_super_seq, mu_window_len, search_pi_interval_with, PiSearchOptions};
use hardy_core::SearchBudget;
use num_bigint::BigInt;
use proptest::prelude::*;

fn poly_of_degree(r: usize) -> impl Strategy<Value = Vec<i64>> {
    (prop::collection::vec(-100i64..=100, r), 1i64..=100, any::<bool>()).prop_map(|(mut c, lead, neg)| {
        c.push(if neg { -lead } else { lead });
        c
    })
}

fn window_of(coeffs: &[i64], start: i64, len: usize) -> IntSeqWindow {
    let p = Polynomial::from_i64(coeffs);
    IntSeqWindow::from_fn(start, len, |n| p.eval_i64(n).to_integer())
}

fn brute_b(f: &LEFunction, m: i64) -> i64 {
    (f.x0()..).find(|&n| f.nint(n).unwrap() >= BigInt::from(m)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mu_equation_decides_products(
        (d, c) in (3u32..=6).prop_flat_map(|d| (Just(d), poly_of_degree(d as usize - 1))),
        n in 1i64..=8, m in 1i64..=8, q in 1i64..=8, start in -100i64..100,
    ) {
        let w = window_of(&c, start, mu_window_len(d, n, m, q));
        prop_assert_eq!(mu_equation(&w, d, n, m, q).unwrap(), q == n * m);
    }

    #[test]
    fn mu_super_on_polynomial_sequences(
        (d, c) in (3u32..=5).prop_flat_map(|d| (Just(d), poly_of_degree(d as usize - 1))),
        n in 1i64..=5, m in 1i64..=5, dq in -1i64..=1,
    ) {
        let q = (n * m + dq).max(1);
        let seq = PolySequence::from_i64(&c);
        let out = mu_super_seq(&seq, d, n, m, q, &SearchBudget::range(0, 10)).unwrap();
        prop_assert_eq!(out.value.as_bool(), Some(q == n * m));
    }

    #[test]
    fn check_pi_agrees_with_detection(
        d in 3u32..=5, deg in 0usize..=5, extra in 1usize..5, bump in prop::option::of((0usize..50, 1i64..4)),
        seed in poly_of_degree(5),
    ) {
        let c: Vec<i64> = seed[..=deg].iter().copied().collect();
        let len = d as usize + extra;
        let mut w = window_of(&c, 3, len);
        if let Some((at, b)) = bump {
            w.values[at % len] += b;
        }
        let expected = detect_polynomial(&w, d as usize - 1).unwrap().is_some_and(|p| p.degree() == Some(d as usize - 1));
        prop_assert_eq!(check_pi(&w, d).unwrap().is_some(), expected);
    }

    #[test]
    fn split_scans_find_the_same_smallest_witness(split in 0i64..400, chunk in 1i64..50) {
        let f = LEFunction::parse("x^(5/2)").unwrap();
        let opts = PiSearchOptions { chunk, ..PiSearchOptions::exhaustive() };
        let whole = search_pi_interval_with(&f, 3, 6, 0, 400, &opts).unwrap().witness;
        let first = search_pi_interval_with(&f, 3, 6, 0, split, &opts).unwrap().witness;
        let second = search_pi_interval_with(&f, 3, 6, split + 1, 400, &opts).unwrap().witness;
        prop_assert_eq!(whole, first.or(second));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn certified_lambda_witnesses_are_progressions(step in 600i64..3000, big_m in 2i64..=8) {
        let f = LEFunction::parse("x^(3/2)").unwrap();
        if let Some(w) = find_lambda_witness(&f, big_m, step, 0, 10_000_000).unwrap() {
            prop_assert!(w.conditions.all_hold);
            let base = f.nint(w.n0).unwrap();
            for m in 0..=big_m {
                prop_assert_eq!(f.nint(w.n0 + m).unwrap() - &base, BigInt::from(m * step));
            }
        }
    }

    #[test]
    fn larger_budgets_never_flip_mu1(n in 1i64..=6, m in 1i64..=6, dq in -1i64..=1) {
        let f = LEFunction::parse("x^(3/2)").unwrap();
        let q = n * m + dq;
        let mut seen = None;
        for n_to in [300, 3_000, 1_000_000] {
            let e = NearLinearEngine::new(f.clone(), SearchBudget::range(0, n_to)).unwrap();
            if let Some(v) = e.mu1(n, m, q).unwrap().value.as_bool() {
                if let Some(prev) = seen {
                    prop_assert_eq!(prev, v);
                }
                seen = Some(v);
            }
        }
        prop_assert_eq!(seen, Some(dq == 0));
    }

    #[test]
    fn b_matches_a_linear_scan(i in 0usize..3, m in 1i64..400) {
        let f = LEFunction::parse(["sqrt(x)", "x^(2/3)", "x^(3/4) + log(x)"][i]).unwrap();
        prop_assert_eq!(b_of(&f, m).unwrap(), brute_b(&f, m));
    }

    #[test]
    fn set_minimum_identity(i in 0usize..2, m in 2i64..400) {
        let f = LEFunction::parse(["sqrt(x)", "x^(2/3)"][i]).unwrap();
        prop_assert_eq!(g_set_minimum(&f, m).unwrap(), BigInt::from(brute_b(&f, m)));
    }
}
