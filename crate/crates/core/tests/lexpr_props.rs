use hardy_core::arith::{Dyadic, Interval};
use hardy_core::lexpr::expr::{add, div, mul, pow, rat, sub};
use hardy_core::lexpr::{eval_exact, eval_interval, round_half_up, EvalConfig, Expr, LEFunction};
use hardy_core::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

/// Expressions whose value at a rational point is rational.
fn rational_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::x()),
        (-20i64..20, 1i64..6).prop_map(|(p, q)| Expr::constant(rat(p, q))),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| div(a, add(mul(b.clone(), b), Expr::int(1)))),
            (inner.clone(), 0i64..4).prop_map(|(a, k)| pow(a, rat(k, 1))),
            // square root of a square stays rational
            inner.prop_map(|a| pow(mul(a.clone(), a), rat(1, 2))),
        ]
    })
}

fn point() -> impl Strategy<Value = BigRational> {
    (-30i64..30, 1i64..8).prop_map(|(p, q)| rat(p, q))
}

const CURVES: [&str; 7] =
    ["x^(5/2)", "sqrt(2)*x^2", "x^(3/2)", "x^(2/3)", "x*log(x)", "exp(x/50)", "x^3/(x+1) + log(x)^2"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn enclosures_contain_exact_values(e in rational_expr(), x in point(), prec in 8u32..200) {
        if let Some(v) = eval_exact(&e, &x) {
            let cap = EvalConfig::default().exponent_cap;
            match eval_interval(&e, &Interval::from_rational(&x, prec), prec, cap) {
                Ok(iv) => prop_assert!(iv.contains_rational(&v), "{} at {}: {:?}", e, x, iv),
                Err(Error::Domain(_)) | Err(Error::Overflow { .. }) => {}
                Err(other) => prop_assert!(false, "{}: {}", e, other),
            }
        }
    }

    #[test]
    fn rounding_matches_exact_values(e in rational_expr(), n in 0i64..50) {
        let f = LEFunction::unchecked(e.clone(), 0);
        if let Some(v) = eval_exact(&e, &BigRational::from_integer(n.into())) {
            match f.nint(n) {
                Ok(k) => prop_assert_eq!(k, round_half_up(&v), "{} at {}", e, n),
                Err(Error::Domain(_)) | Err(Error::Overflow { .. }) => {}
                Err(other) => prop_assert!(false, "{}: {}", e, other),
            }
        }
    }

    #[test]
    fn escalation_is_consistent(i in 0usize..CURVES.len(), n in 2i64..100_000, cap in 64u32..300) {
        let f = LEFunction::parse(CURVES[i]).unwrap();
        let low = f.clone().with_eval_config(EvalConfig { max_bits: cap, ..*f.config() });
        if let Ok(k) = low.nint(n) {
            prop_assert_eq!(k, f.nint(n).unwrap());
        }
    }

    #[test]
    fn derivative_matches_centered_differences(i in 0usize..CURVES.len(), n in 2i64..300) {
        let f = LEFunction::parse(CURVES[i]).unwrap();
        let h = rat(1, 1000);
        let x = BigRational::from_integer(n.into());
        let bits = 200;
        let mid = |iv: &Interval| iv.mid().to_rational();
        let width = |iv: &Interval| iv.width().to_rational();
        let up = f.eval_rational(&(&x + &h), bits).unwrap();
        let down = f.eval_rational(&(&x - &h), bits).unwrap();
        let centered = (mid(&up) - mid(&down)) / (&h * rat(2, 1));
        let slack_fd = (width(&up) + width(&down)) / (&h * rat(2, 1));
        let fp = f.differentiate(1).eval_rational(&x, bits).unwrap();
        // truncation error of the centered difference is h^2/6 sup |f'''|
        let around = Interval::new(Dyadic::from_i64(n - 1), Dyadic::from_i64(n + 1));
        let f3 = eval_interval(f.differentiate(3).expr(), &around, 64, f.config().exponent_cap).unwrap();
        let bound = &h * &h / rat(6, 1) * f3.mag().to_rational() + slack_fd + width(&fp);
        let err = (centered - mid(&fp)).abs();
        prop_assert!(err <= bound, "{} at {}: {} > {}", CURVES[i], n, err, bound);
    }

    #[test]
    fn inversion_encloses_sample_points(k in 1i64..300, which in 0usize..3) {
        let (text, n, y) = match which {
            0 => ("x^(5/2)", k * k, BigInt::from(k).pow(5)),
            1 => ("x^2 + x", k, BigInt::from(k * k + k)),
            _ => ("x^(3/2)", k * k, BigInt::from(k).pow(3)),
        };
        let f = LEFunction::parse(text).unwrap();
        let enc = f.invert_at(&BigRational::from_integer(y), f.x0(), 64).unwrap();
        prop_assert!(enc.contains(&BigRational::from_integer(n.into())), "{}: {} not in {}", text, n, enc);
    }
}
