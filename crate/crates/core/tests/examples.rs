use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use bratteli::diagram_file::{gallery, nonsimple_family, DiagramFile};
use bratteli::enumeration::{linear_scale, spine_diagram};
use bratteli::ordering::word_string;
use bratteli::skewsim::{simulate_correlation, visit_distribution, SkewConfig};

fn named() -> BTreeMap<String, DiagramFile> {
    gallery().into_iter().collect()
}

#[test]
fn gallery_structure() {
    let g = named();
    let inf = g["infrank-n3"].build().unwrap().base().structure_report();
    assert!(inf.ers.is_some());
    let sym = g["symmetric-2x2"].build().unwrap().base().structure_report();
    assert!(sym.ers.is_some() && sym.ecs.is_some());
    assert_eq!(sym.rank, 2);
}

#[test]
fn nonconsecutive_order_with_consecutive_odometer() {
    let od = nonsimple_family(2, 4, 8).build().unwrap();
    assert!(!od.is_consecutive(None).unwrap());
    let mut w = vec![vec![0]];
    w.extend(std::iter::repeat_n(vec![1], od.levels()));
    assert!(od.is_consecutive(Some(&w)).unwrap());
    let ex = od.extremal_prefix_count(8).unwrap();
    assert_eq!((ex.max_count, ex.min_count), (1, 1));
    assert_eq!(word_string(od.word(4, 1)), "122221");
}

#[test]
fn consecutive_fan_in() {
    let od = named()["fig1-consecutive"].build().unwrap();
    assert!(od.is_consecutive(None).unwrap());
    assert_eq!(od.base().height(2, 0), &BigUint::from(9u8));
}

#[test]
fn dyadic_telescope_doubles_edges() {
    let od = named()["dyadic"].build().unwrap();
    let t = od.telescope(&[0, 1, 3, 5]).unwrap();
    assert_eq!(t.base().incidence(2).unwrap().get(0, 0), &BigUint::from(4u8));
    assert_eq!(t.base().height(3, 0), od.base().height(5, 0));
}

#[test]
fn spine_becomes_positive_after_telescoping() {
    let scale = linear_scale(5, 40).unwrap();
    let od = spine_diagram(&scale, 24).unwrap();
    assert!(od.base().incidence(3).unwrap().min_entry().is_zero());
    let t = od.base().telescope(&[0, 1, 9, 17]).unwrap();
    for n in 2..=3 {
        assert!(!t.incidence(n).unwrap().min_entry().is_zero());
    }
    assert!(od.base().height(24, 0) >= &BigUint::one());
}

#[test]
fn visit_counts_for_simple_bases() {
    let whole = SkewConfig { d: vec![vec![]], ..SkewConfig::dyadic_example(100, 1000, 9) };
    let h = visit_distribution(&whole, 0).unwrap();
    assert_eq!(h.counts.keys().copied().collect::<Vec<_>>(), vec![101]);

    let half = SkewConfig::dyadic_example(1024, 4000, 9);
    let h = visit_distribution(&half, 0).unwrap();
    assert!((h.mean - 512.0).abs() < 0.05 * 512.0, "{}", h.mean);
}

#[test]
fn stderr_shrinks_with_samples() {
    let a = simulate_correlation(&SkewConfig::dyadic_example(8, 40_000, 5)).unwrap();
    let b = simulate_correlation(&SkewConfig::dyadic_example(8, 80_000, 5)).unwrap();
    let ratio = b.stderr / a.stderr;
    assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.05, "{ratio}");
}
