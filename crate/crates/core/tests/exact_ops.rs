//! Exact arithmetic, neighbours and truncation checked against the
//! exact-rational oracle.

mod common;

use common::{all_values, random_in};
use num_traits::Signed;
use proptest::prelude::*;
use srcore::{neighbors, FloatFormat, RngStream, SoftValue};

const PAIRS: usize = 10_000;

fn check_exact_ops(fmt: &FloatFormat, seed: u64) {
    let mut rng = RngStream::new(seed, 0);
    for i in 0..PAIRS {
        let (a, ra) = random_in(&mut rng, fmt);
        let (b, rb) = random_in(&mut rng, fmt);
        assert_eq!(a.exact_add(&b).to_rational(), &ra + &rb, "pair {i}: {a} + {b}");
        assert_eq!(a.exact_mul(&b).to_rational(), &ra * &rb, "pair {i}: {a} * {b}");
    }
}

#[test]
fn exact_ops_binary16() {
    check_exact_ops(&FloatFormat::binary16(), 1);
}

#[test]
fn exact_ops_bfloat16() {
    check_exact_ops(&FloatFormat::bfloat16(), 2);
}

#[test]
fn exact_ops_exhaustive_p3() {
    let fmt = FloatFormat::new(3, Some((-3, 3))).unwrap();
    let values = all_values(&fmt);
    assert_eq!(values.len(), 1 + 7 * 4 * 2);
    for a in &values {
        for b in &values {
            let (ra, rb) = (a.to_rational(), b.to_rational());
            assert_eq!(a.exact_add(b).to_rational(), &ra + &rb);
            assert_eq!(a.exact_mul(b).to_rational(), &ra * &rb);
            assert_eq!(a.cmp(b), ra.cmp(&rb));
        }
    }
}

#[test]
fn neighbours_match_oracle_on_products_and_sums() {
    let fmt = FloatFormat::binary16_unbounded();
    let p = fmt.precision();
    let mut rng = RngStream::new(3, 0);
    for _ in 0..PAIRS {
        let (a, ra) = random_in(&mut rng, &FloatFormat::binary16());
        let (b, rb) = random_in(&mut rng, &FloatFormat::binary16());
        for (x, rx) in [(a.exact_mul(&b), &ra * &rb), (a.exact_add(&b), &ra + &rb)] {
            let nb = neighbors(&x, &fmt).unwrap();
            let floor = nb.floor.to_rational();
            let ceil = nb.ceil.to_rational();
            assert_eq!(floor, sroracle::floor_p(&rx, p), "{x}");
            assert_eq!(ceil, sroracle::ceil_p(&rx, p), "{x}");
            assert!(floor <= rx && rx <= ceil);
            assert_eq!(nb.is_exact(), floor == ceil);
            let q = SoftValue::from_parts(false, nb.residual_num.clone(), -(nb.residual_den_log2 as i64));
            assert_eq!(q.to_rational(), sroracle::up_probability(&rx, p), "{x}");
        }
    }
}

#[test]
fn truncation_matches_oracle_and_bounds_beta() {
    let fmt = FloatFormat::bfloat16();
    let mut rng = RngStream::new(4, 0);
    for _ in 0..PAIRS {
        let (a, ra) = random_in(&mut rng, &fmt);
        let (b, rb) = random_in(&mut rng, &fmt);
        let x = a.exact_add(&b);
        let rx = &ra + &rb;
        if x.is_zero() {
            continue;
        }
        for bits in [8u32, 9, 11, 16, 20] {
            let t = x.truncate_to(bits);
            let rt = t.to_rational();
            assert_eq!(rt, sroracle::truncate(&rx, bits));
            let beta = ((&rt - &rx) / &rx).abs();
            assert!(beta < sroracle::pow2(1 - bits as i64), "{x} to {bits} bits");
        }
    }
}

fn soft() -> impl Strategy<Value = SoftValue> {
    (any::<bool>(), 0u64..1 << 40, -60i64..60).prop_map(|(neg, sig, lsb)| {
        SoftValue::from_parts(neg, sig.into(), lsb)
    })
}

proptest! {
    #[test]
    fn normalized_and_round_trips(x in soft()) {
        if !x.is_zero() {
            let w = x.width();
            prop_assert!(x.significand().bit(w - 1));
            prop_assert!(x.significand().bit(0));
            let back = SoftValue::from_parts(x.is_negative(), x.significand().clone(), x.lsb_exponent());
            prop_assert_eq!(back, x.clone());
            let parsed = srcore::parse_value(&x.to_string(), &FloatFormat::unbounded(64).unwrap()).unwrap();
            prop_assert_eq!(parsed, x);
        }
    }

    #[test]
    fn truncation_is_monotone(x in soft(), bits in 1u32..48) {
        let t = x.truncate_to(bits);
        prop_assert!(t.abs() <= x.abs());
        prop_assert!(t.width() <= bits as u64);
        if x.width() <= bits as u64 {
            prop_assert_eq!(t, x);
        }
    }

    #[test]
    fn neighbours_bracket(x in soft(), p in 2u32..12) {
        let fmt = FloatFormat::unbounded(p).unwrap();
        let nb = neighbors(&x, &fmt).unwrap();
        prop_assert!(nb.floor <= x && x <= nb.ceil);
        prop_assert_eq!(nb.is_exact(), nb.floor == nb.ceil);
        prop_assert!(fmt.contains(&nb.floor) && fmt.contains(&nb.ceil));
        if !nb.is_exact() {
            // gap is one ulp of x's binade
            let gap = nb.ceil.exact_sub(&nb.floor);
            prop_assert_eq!(gap.width(), 1);
            prop_assert_eq!(gap.exponent(), x.exponent() - p as i64 + 1);
        }
    }
}
