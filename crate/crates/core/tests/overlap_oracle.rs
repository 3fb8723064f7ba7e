//! The floating-point overlap detector against exact rational clipping.

mod common;

use std::collections::BTreeSet;

use bandfold::unfold::{detect_overlap, AREA_EPS};
use common::oracle::*;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn detector_matches_exact_oracle(seed in any::<u64>()) {
        let polys = random_layout(seed);
        prop_assert_eq!(AREA_EPS, 1e-10);
        let expected = oracle_pairs(&polys);
        let got: BTreeSet<(usize, usize)> = detect_overlap(&to_layout(&polys)).pairs.iter().map(|p| p.faces).collect();
        prop_assert_eq!(got, expected);
    }
}

#[test]
fn oracle_sanity() {
    let sq = |x: f64, y: f64, s: f64| vec![P::snap(x, y), P::snap(x + s, y), P::snap(x + s, y + s), P::snap(x, y + s)];
    let quarter = Q::new(1.into(), 4.into());
    assert_eq!(exact_intersection_area(&sq(0.0, 0.0, 1.0), &sq(0.5, 0.5, 1.0)), quarter);
    assert!(exact_intersection_area(&sq(0.0, 0.0, 1.0), &sq(1.0, 0.0, 1.0)).is_zero());
    assert_eq!(exact_intersection_area(&sq(0.0, 0.0, 1.0), &sq(0.25, 0.25, 0.5)), quarter);
}

#[test]
fn generated_layouts_mix_overlapping_and_clean_pairs() {
    let (mut overlapping, mut clean) = (0, 0);
    for seed in 0..100 {
        let polys = random_layout(seed);
        for i in 0..polys.len() {
            for j in i + 1..polys.len() {
                if exact_intersection_area(&polys[i], &polys[j]).is_positive() {
                    overlapping += 1;
                } else {
                    clean += 1;
                }
            }
        }
    }
    assert!(overlapping > 50 && clean > 50, "{overlapping} overlapping, {clean} clean");
}
