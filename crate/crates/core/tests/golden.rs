//! Frozen values. Anything here that is not a published number was computed
//! once, cross-checked against the brute-force oracle where one exists, and pinned.

use markoff_core::classify::{classify, Verdict};
use markoff_core::local::{
    count_mod, delta_2, delta_p_odd, delta_pair_odd, delta_truncated, explicit_solution_mod, nl_terms, np_closed,
    pair_density_at_level,
};
use markoff_core::oracle::{oracle_count_mod, orbit_decompose};
use markoff_core::scan::{census, exact_counts_vs_asymptotics, sector_mean, VarianceConfig};
use markoff_core::*;
use num_bigint::BigInt;
use num_rational::BigRational;

fn t(a: i128, b: i128, c: i128) -> Triple {
    Triple::new(a, b, c)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn small_counts_mod_q() {
    assert_eq!(count_mod(2, 1).unwrap(), 3);
    assert_eq!(count_mod(3, 3).unwrap(), 1);
    assert_eq!(oracle_count_mod(3, 3).unwrap(), 1);
    assert_eq!(count_mod(5, 0).unwrap(), 41);
    assert_eq!(count_mod(4, 3).unwrap(), 0);
    assert_eq!(count_mod(9, 3).unwrap(), 0);
}

#[test]
fn np_values() {
    assert_eq!(np_closed(3, 1, 0).unwrap(), 1);
    assert_eq!(np_closed(5, 0, 1).unwrap(), 30);
}

#[test]
fn explicit_solutions() {
    assert_eq!(explicit_solution_mod(5, 1, 0).unwrap(), t(1, 0, 2));
    assert_eq!(explicit_solution_mod(7, 3, 46).unwrap(), t(212, 174, 279));
    assert_eq!(explicit_solution_mod(13, 2, 4).unwrap(), t(2, 87, 87));
}

#[test]
fn density_values() {
    assert_eq!(delta_p_odd(5, 1).unwrap(), q(6, 25));
    assert_eq!(delta_2(1).unwrap(), q(3, 4));
    assert_eq!(nl_terms(3, 9, 2).unwrap(), q(2, 9));
    assert_eq!(delta_pair_odd(5, 3, 8).unwrap(), q(46, 25));
    assert_eq!(pair_density_at_level(5, 3, 3, 8).unwrap(), q(46, 25));
    assert_eq!(delta_truncated(46, 13).unwrap().truncated_product, q(105_984, 511_225));
    assert_eq!(delta_truncated(342, 13).unwrap().truncated_product, q(1_753_088, 5_780_775));
}

#[test]
fn bhargava_values() {
    let f = bhargava_forms(&t(3, 3, 3)).unwrap();
    for g in f {
        assert_eq!((g.a, g.b, g.c), (6, -8, 6));
        assert_eq!(g.discriminant().unwrap(), -80);
    }
    assert_eq!(delta(&t(3, 3, 3)).unwrap(), -80);
    let f = bhargava_forms(&t(1, 2, 3)).unwrap();
    let abc: Vec<_> = f.iter().map(|g| (g.a, g.b, g.c)).collect();
    assert_eq!(abc, vec![(5, -11, 5), (1, -5, 1), (-1, 5, -1)]);
    assert!(f.iter().all(|g| g.discriminant().unwrap() == 21));
    assert_eq!(delta(&t(1, 2, 3)).unwrap(), 21);
}

#[test]
fn reduce_words() {
    let (r, w) = reduce(&t(3, -5, 4)).unwrap();
    assert_eq!(r, t(-3, 4, 5));
    assert_eq!(w.to_string(), "P(1,3,2) S(1,3)");
    assert_eq!(evaluate(&r).unwrap(), 110);
    let (r, w) = reduce(&t(3, 3, 6)).unwrap();
    assert_eq!(w.to_string(), "V3");
    assert_eq!(r, t(3, 3, 3));
    // descent from far up the tree on k = -2
    let (r, _) = reduce(&t(3, 4, 9)).unwrap();
    assert_eq!(r, t(3, 3, 4));
}

#[test]
fn published_levels() {
    assert!(classify(46).unwrap().hasse_failure);
    assert!(classify(-4).unwrap().hasse_failure);
    assert_eq!(classify(-2).unwrap().reps, vec![t(3, 3, 4)]);
    assert_eq!(class_number(0).unwrap(), ClassNumber::Exact(2));
    assert_eq!(class_number(3685).unwrap(), ClassNumber::PlusBox(6));
    assert_eq!(class_number(-3691).unwrap(), ClassNumber::Exact(9));
    assert!(matches!(classify(3).unwrap().verdict, Verdict::NonAdmissible(_)));
    assert_eq!(orbit_decompose(-3691, 80).unwrap().orbits.len(), 9);
    // the box holds six orbits; a seventh runs through a coordinate -1
    let d = orbit_decompose(3685, 220).unwrap();
    assert_eq!(d.orbits.len(), 7);
    assert!(d.orbits.iter().any(|o| o.representative == t(-1, 32, 38)));
}

#[test]
fn census_small() {
    let a = census(100_800).unwrap();
    assert_eq!(a.hf_count, 7630);
    assert_eq!(a.admissible_total(), 58_800);
}

#[test]
fn asymptotics_at_one_million() {
    let r = exact_counts_vs_asymptotics(1_000_000, &[3, 4, 5, 10]).unwrap();
    let exact: Vec<u64> = r.rows.iter().map(|x| x.exact).collect();
    assert_eq!(exact, vec![212_933, 186_807, 166_670, 107_874]);
    assert!((r.rows[0].c + 2.2695).abs() < 1e-3);
    assert_eq!(r.r_plus, 2_937_115);
    assert_eq!(r.r_minus, 3_547_129);
}

#[test]
fn sector_sum_at_one_million() {
    let cfg = VarianceConfig::new(1_000_000, 200).unwrap();
    let (total, main) = sector_mean(&cfg).unwrap();
    assert_eq!(total, 528_686);
    assert!((main - 537_070.7).abs() < 0.1);
}
