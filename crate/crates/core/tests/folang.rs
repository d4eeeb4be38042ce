use std::collections::BTreeMap;

use hardy_core::folang::{
    check_closed, evaluate, evaluate_seq, parse_formula, parse_formula_with, EvalOptions, Formula, MacroTable,
};
use hardy_core::lexpr::LEFunction;
use hardy_core::nearlin::NearLinearEngine;
use hardy_core::sequence::FnSequence;
use hardy_core::{Error, SearchBudget, TriState};
use num_bigint::BigInt;

fn env(pairs: &[(&str, i64)]) -> BTreeMap<String, BigInt> {
    pairs.iter().map(|(k, v)| (k.to_string(), BigInt::from(*v))).collect()
}

fn sqrt() -> LEFunction {
    LEFunction::parse("sqrt(x)").unwrap()
}

fn eval_str(text: &str, f: &LEFunction, e: &[(&str, i64)], opts: &EvalOptions) -> TriState {
    evaluate(&parse_formula(text).unwrap(), f, &env(e), opts).unwrap().value
}

#[test]
fn bounded_existential_over_sqrt() {
    let f = sqrt();
    let opts = EvalOptions::default();
    assert_eq!(eval_str("E x in [0,10]. f(x) = 5", &f, &[], &opts), TriState::False);
    let r = evaluate(&parse_formula("E x in [0,30]. f(x) = 5").unwrap(), &f, &env(&[]), &opts).unwrap();
    assert_eq!(r.value, TriState::True);
    assert_eq!(r.witness["x"], BigInt::from(21));
}

#[test]
fn tautology_holds() {
    assert_eq!(eval_str("A x in [1,5]. f(x) = f(x)", &sqrt(), &[], &EvalOptions::default()), TriState::True);
}

#[test]
fn syntax_errors_carry_offsets() {
    match parse_formula("E x. x <") {
        Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 8),
        other => panic!("expected a syntax error, got {other:?}"),
    }
    assert!(matches!(parse_formula("x * y < 3"), Err(Error::Syntax { .. })));
    assert!(matches!(parse_formula("nosuch(1, 2)"), Err(Error::Syntax { .. })));
    assert!(matches!(parse_formula("lambda(1, 2)"), Err(Error::Syntax { .. })));
}

#[test]
fn scope_errors() {
    let phi = parse_formula("E x. x < y").unwrap();
    assert!(matches!(check_closed(&phi, &[]), Err(Error::Scope(_))));
    assert!(check_closed(&phi, &["y"]).is_ok());
    let r = evaluate(&phi, &sqrt(), &env(&[]), &EvalOptions::default());
    assert!(matches!(r, Err(Error::Scope(_))));
}

#[test]
fn macro_expansion_is_hygienic() {
    // The argument `k` must not be captured by the template's own `k`.
    let phi = parse_formula("E k. lambda(0, 3, k)").unwrap();
    let text = phi.to_string();
    assert!(text.starts_with("E k. A k'"), "{text}");
    assert_eq!(parse_formula(&text).unwrap(), phi);
    let again = parse_formula("A n. A m. E q. mul(n,m,q)").unwrap();
    assert!(again.free_vars().is_empty());
}

#[test]
fn lambda_on_linear_sequence() {
    let lin = FnSequence(|n: i64| BigInt::from(5 * n + 2));
    let phi = parse_formula("lambda(0, 9, 5)").unwrap();
    let r = evaluate_seq(&phi, &lin, &env(&[]), &EvalOptions::default()).unwrap();
    assert_eq!(r.value, TriState::True);
    let phi = parse_formula("lambda(0, 9, 4)").unwrap();
    assert_eq!(evaluate_seq(&phi, &lin, &env(&[]), &EvalOptions::default()).unwrap().value, TriState::False);
}

#[test]
fn b_def_matches_b_of() {
    let f = sqrt();
    let opts = EvalOptions::default();
    assert_eq!(eval_str("b_def(7, 3)", &f, &[], &opts), TriState::True);
    assert_eq!(eval_str("b_def(6, 3)", &f, &[], &opts), TriState::False);
    assert_eq!(eval_str("b_def(8, 3)", &f, &[], &opts), TriState::False);
    assert_eq!(eval_str("b_def_unbounded(7, 3)", &f, &[], &opts.clone().closed()), TriState::True);
}

#[test]
fn mu1_agrees_with_native() {
    let f = LEFunction::parse("x^(3/2)").unwrap();
    let native = NearLinearEngine::new(f.clone(), SearchBudget::default()).unwrap();
    assert_eq!(native.mu1(7, 5, 35).unwrap().value, TriState::True);
    let opts = EvalOptions::with_bound(400);
    assert_eq!(eval_str("mu1(n, m, p)", &f, &[("n", 7), ("m", 5), ("p", 35)], &opts), TriState::True);
    let wrong = eval_str("mu1(7, 5, 36)", &f, &[], &opts);
    assert!(!wrong.is_true(), "{wrong:?}");
    assert_eq!(eval_str("mu1(7, 5, 36)", &f, &[], &opts.clone().closed()), TriState::False);
}

#[test]
fn closed_world_decides_false_products() {
    let f = LEFunction::parse("x^(3/2)").unwrap();
    let opts = EvalOptions::with_bound(200).closed();
    assert_eq!(eval_str("mul(3, 4, 13)", &f, &[], &opts), TriState::False);
}

#[test]
fn zero_bound_is_unknown() {
    let f = sqrt();
    let opts = EvalOptions::with_bound(0);
    assert!(eval_str("E x. f(x) = 5", &f, &[], &opts).is_unknown());
    assert!(eval_str("A x. f(x) < 100", &f, &[], &opts).is_unknown());
    assert_eq!(eval_str("E x. f(x) = 5", &f, &[], &opts.clone().closed()), TriState::False);
}

#[test]
fn unbounded_quantifiers() {
    let f = sqrt();
    let opts = EvalOptions::with_bound(100);
    assert_eq!(eval_str("E x. f(x) = 5", &f, &[], &opts), TriState::True);
    assert_eq!(eval_str("A x. f(x) < 5", &f, &[], &opts), TriState::False);
    assert!(eval_str("A x. f(x) < 1000", &f, &[], &opts).is_unknown());
    assert_eq!(eval_str("A x. f(x) < 1000", &f, &[], &opts.clone().closed()), TriState::True);
}

#[test]
fn candidate_cap_gives_unknown() {
    let opts = EvalOptions { candidate_cap: 5, ..EvalOptions::default() };
    assert!(eval_str("E x in [0, 30]. f(x) = 5", &sqrt(), &[], &opts).is_unknown());
}

#[test]
fn pi_template_on_squares() {
    let sq = FnSequence(|n: i64| BigInt::from(n * n));
    let t = MacroTable::builtin(3).unwrap();
    let phi = parse_formula_with("pi(2, 8)", &t).unwrap();
    assert_eq!(evaluate_seq(&phi, &sq, &env(&[]), &EvalOptions::default()).unwrap().value, TriState::True);
    let cube = FnSequence(|n: i64| BigInt::from(n * n * n));
    assert_eq!(evaluate_seq(&phi, &cube, &env(&[]), &EvalOptions::default()).unwrap().value, TriState::False);
}

#[test]
fn mu_super_template_on_squares() {
    // a(n) = n^2 agrees with a degree-2 polynomial everywhere.
    let sq = FnSequence(|n: i64| BigInt::from(n * n));
    let opts = EvalOptions::with_bound(60);
    let t = MacroTable::builtin(3).unwrap();
    let run = |text: &str| evaluate_seq(&parse_formula_with(text, &t).unwrap(), &sq, &env(&[]), &opts).unwrap().value;
    assert_eq!(run("mu_super(3, 4, 12)"), TriState::True);
    assert!(!run("mu_super(3, 4, 13)").is_true());
}

#[test]
fn mu_exact_requires_scale() {
    assert!(MacroTable::builtin(3).unwrap().get("mu_exact").is_none());
    assert!(MacroTable::builtin_with(3, Some(800)).unwrap().get("mu_exact").is_some());
    assert!(MacroTable::builtin(2).is_err());
}

#[test]
fn sugar_desugars() {
    let a = parse_formula("x <= y").unwrap();
    assert_eq!(a, parse_formula("!(y < x)").unwrap());
    let b = parse_formula("x != y").unwrap();
    assert!(matches!(b, Formula::Not(_)));
}
