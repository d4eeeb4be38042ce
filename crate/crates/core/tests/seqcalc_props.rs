use hardy_core::seqcalc::{delta, detect_polynomial, iterated_sym_delta, IntSeqWindow, Polynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

/// Coefficients `a_0..a_r` in [-100, 100] with `a_r != 0`.
fn poly(max_degree: usize) -> impl Strategy<Value = Vec<i64>> {
    (1..=max_degree).prop_flat_map(|r| {
        (prop::collection::vec(-100i64..=100, r), (1i64..=100, any::<bool>())).prop_map(|(mut c, (lead, neg))| {
            c.push(if neg { -lead } else { lead });
            c
        })
    })
}

fn window_of(coeffs: &[i64], start: i64, len: usize) -> IntSeqWindow {
    let p = Polynomial::from_i64(coeffs);
    IntSeqWindow::from_fn(start, len, |n| p.eval_i64(n).to_integer())
}

fn factorial(r: usize) -> BigInt {
    (1..=r as u64).map(BigInt::from).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn deltas_commute(values in prop::collection::vec(-1000i64..1000, 25..40), m in 1usize..=10, n in 1usize..=10) {
        let a = IntSeqWindow::from_i64(7, &values);
        let mn = delta(&delta(&a, m).unwrap(), n).unwrap();
        let nm = delta(&delta(&a, n).unwrap(), m).unwrap();
        prop_assert_eq!(mn, nm);
    }

    #[test]
    fn leading_coefficient_law(c in poly(6), m in 1usize..=10, start in -50i64..50) {
        let r = c.len() - 1;
        let w = window_of(&c, start, r + m + 4);
        let d = delta(&w, m).unwrap();
        let p = detect_polynomial(&d, r).unwrap().expect("delta of a polynomial is a polynomial");
        prop_assert_eq!(p.degree(), Some(r - 1).filter(|_| r >= 1));
        let lead = BigRational::from_integer(BigInt::from(r as i64 * c[r] * m as i64));
        prop_assert_eq!(p.leading(), lead);
    }

    #[test]
    fn product_law(c in poly(6).prop_filter("degree >= 2", |c| c.len() >= 3), n in 1i64..=8, m in 1i64..=8) {
        let r = c.len() - 1;
        let w = window_of(&c, 0, (r as i64 * (n + m) + 2) as usize);
        let v = iterated_sym_delta(&w, r - 1, n, m).unwrap();
        prop_assert_eq!(v, factorial(r) * c[r] * n * m);
    }

    #[test]
    fn detection_recovers_polynomials(c in poly(5), extra in 0usize..4, start in -20i64..20) {
        let k = c.len() - 1;
        let len = k + 2 + extra;
        let w = window_of(&c, start, len);
        for r in 0..=len - 2 {
            let got = detect_polynomial(&w, r).unwrap();
            prop_assert_eq!(got.is_some(), k <= r);
            if let Some(p) = got {
                for (i, v) in w.values.iter().enumerate() {
                    prop_assert_eq!(p.eval_i64(i as i64), BigRational::from_integer(v.clone()));
                }
            }
        }
    }

    #[test]
    fn detection_rejects_perturbed_windows(c in poly(4), extra in 0usize..4, at in 0usize..100, bump in 1i64..5) {
        let k = c.len() - 1;
        let len = k + 2 + extra;
        let mut w = window_of(&c, 0, len);
        let i = at % len;
        w.values[i] += bump;
        for r in 0..=len - 2 {
            prop_assert!(detect_polynomial(&w, r).unwrap().is_none());
        }
    }
}
