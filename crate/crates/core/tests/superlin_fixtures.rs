//! Frozen values from the scripts in tests/oracle (integer-root evaluation of
//! n^(5/2), independent of the library).

use hardy_core::lexpr::LEFunction;
use hardy_core::superlin::{search_pi_interval, search_pi_interval_with, PiSearchOptions};

fn f52() -> LEFunction {
    LEFunction::parse("x^(5/2)").unwrap()
}

#[test]
fn small_range_exhaustive_and_filtered() {
    let f = f52();
    let ex = search_pi_interval_with(&f, 3, 6, 0, 100, &PiSearchOptions::exhaustive()).unwrap();
    assert_eq!(ex.witness.map(|w| w.n), Some(95));
    assert!(search_pi_interval(&f, 3, 6, 0, 100).unwrap().is_none());
}

#[test]
fn smallest_witness_above_ten_thousand() {
    let f = f52();
    let ex = search_pi_interval_with(&f, 3, 6, 10_000, 100_000_000, &PiSearchOptions::exhaustive()).unwrap();
    assert_eq!(ex.witness.unwrap().n, 10_004);
    let w = search_pi_interval(&f, 3, 6, 10_000, 100_000_000).unwrap().unwrap();
    assert_eq!(w.n, 10_816);
    assert_eq!(w.polynomial().degree(), Some(2));
    assert!(w.verify(&f).unwrap());
}

#[test]
fn split_scan_matches_unsplit() {
    let f = f52();
    let opts = PiSearchOptions { chunk: 37, ..PiSearchOptions::default() };
    let whole = search_pi_interval_with(&f, 3, 6, 10_000, 20_000, &opts).unwrap().witness;
    let first = search_pi_interval_with(&f, 3, 6, 10_000, 10_500, &opts).unwrap().witness;
    let second = search_pi_interval_with(&f, 3, 6, 10_501, 20_000, &opts).unwrap().witness;
    assert_eq!(whole, first.or(second));
}
