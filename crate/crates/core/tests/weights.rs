use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use tensorlab_core::schreier::{decompose, member};
use tensorlab_core::weights::{
    avg, avg2, avg2_terms, avg_exact, avg_terms, convexity_sums, p_weight, q_weight, square_sums, verify_perm,
    IndexedFamily,
};
use tensorlab_core::{Family, FiniteSet, Limits, Ordinal, Weight};

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn set(v: &[u64]) -> FiniteSet {
    FiniteSet::new(v.to_vec()).unwrap()
}

/// Consecutive pieces of `e`, each the longest prefix still in `fam`.
fn pieces(fam: &Family, e: &[u64]) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vec![Vec::new()];
    for &n in e {
        let cur = out.last_mut().unwrap();
        cur.push(n);
        if !member(fam, &set(cur)) {
            cur.pop();
            out.push(vec![n]);
        }
    }
    out
}

/// `None` stands for `w`.
fn p_oracle(xi: Option<u64>, e: &[u64]) -> BigRational {
    match xi {
        Some(0) => BigRational::one(),
        Some(k) => {
            let last = pieces(&Family::base(k), e).pop().unwrap();
            let f = pieces(&Family::base(k - 1), &last).pop().unwrap();
            p_oracle(Some(k - 1), &f) / BigRational::from_integer(BigInt::from(last[0]))
        }
        None => {
            let last = pieces(&Family::base(Ordinal::omega()), e).pop().unwrap();
            p_oracle(Some(last[0] + 1), &last)
        }
    }
}

/// The product of the divisors under the square root.
fn q_oracle(xi: u64, zeta: u64, e: &[u64]) -> u64 {
    if zeta == 0 {
        return 1;
    }
    let last = pieces(&Family::conv(zeta, xi), e).pop().unwrap();
    let f = pieces(&Family::conv(zeta - 1, xi), &last).pop().unwrap();
    q_oracle(xi, zeta - 1, &f) * last[0]
}

fn subsets(n: u64) -> impl Iterator<Item = Vec<u64>> {
    (1u32..1 << n).map(move |mask| (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect())
}

#[test]
fn spec_examples() {
    assert_eq!(p_weight(&Ordinal::zero(), &set(&[7, 9])).unwrap(), BigRational::one());
    assert_eq!(p_weight(&Ordinal::one(), &set(&[3, 4])).unwrap(), r(1, 3));
    // (2,3,4) sits in the S[2] block from 2; its last S[1] piece is (4)
    assert_eq!(p_weight(&Ordinal::nat(2), &set(&[2, 3, 4])).unwrap(), r(1, 8));

    assert_eq!(
        q_weight(&Ordinal::zero(), &Ordinal::zero(), &set(&[5, 6])).unwrap(),
        Weight::one()
    );
    assert_eq!(
        q_weight(&Ordinal::zero(), &Ordinal::one(), &set(&[3, 4])).unwrap(),
        Weight::inv_sqrt(3).unwrap()
    );
    // mins 2 and 4
    let q = q_weight(&Ordinal::zero(), &Ordinal::nat(2), &set(&[2, 3, 4])).unwrap();
    assert_eq!(q.square(), r(1, 8));
    assert_eq!(q.to_string(), "1/(2*sqrt(2))");
    assert!(p_weight(&Ordinal::one(), &FiniteSet::empty()).is_err());
}

#[test]
fn p_matches_the_definition() {
    for xi in [Some(0), Some(1), Some(2), Some(3), None] {
        let o = xi.map_or(Ordinal::omega(), Ordinal::nat);
        for e in subsets(10) {
            assert_eq!(p_weight(&o, &set(&e)).unwrap(), p_oracle(xi, &e), "p[{o}] of {e:?}");
        }
    }
}

#[test]
fn q_matches_the_definition() {
    for xi in 0..=1u64 {
        for zeta in 0..=2u64 {
            for e in subsets(10) {
                let q = q_weight(&Ordinal::nat(xi), &Ordinal::nat(zeta), &set(&e)).unwrap();
                assert_eq!(
                    q.square(),
                    r(1, q_oracle(xi, zeta, &e) as i64),
                    "q[{xi},{zeta}] of {e:?}"
                );
                assert!(q.coeff() > &BigRational::zero());
            }
        }
    }
}

#[test]
fn streamed_coefficients_match_the_direct_recursion() {
    let l = Limits::default();
    for xi in 0..=2u64 {
        let o = Ordinal::nat(xi);
        for start in 2..=5u64 {
            let k = if xi == 2 { 1 } else { 2 };
            let blocks = decompose(&Family::base(xi), start.., k, &l).unwrap();
            for n in 1..=k {
                let terms = avg_terms(&o, start.., n, &l).unwrap();
                assert_eq!(terms.last().unwrap().set.maximum(), blocks[n - 1].maximum());
                for t in &terms {
                    assert_eq!(t.weight, Weight::rational(p_weight(&o, &t.set).unwrap()));
                }
            }
        }
    }
    for (xi, zeta) in [(0u64, 1u64), (1, 1), (0, 2), (1, 0)] {
        let (x, z) = (Ordinal::nat(xi), Ordinal::nat(zeta));
        for t in avg2_terms(&x, &z, 3u64.., 1, &l).unwrap() {
            let want = q_weight(&x, &z, &t.set).unwrap().scale(&p_weight(&x, &t.set).unwrap());
            assert_eq!(t.weight, want);
        }
    }
}

#[test]
fn averages_on_small_blocks() {
    let l = Limits::default();
    let unit = |k: usize| -> Vec<f64> {
        let mut v = vec![0.0; 3];
        v[k] = 1.0;
        v
    };
    let mut coll = IndexedFamily::new();
    for k in 0..3 {
        coll.insert(FiniteSet::interval(3, 3 + k as u64), unit(k));
    }
    let a = avg(&Ordinal::one(), 3u64.., &coll, 1, vec![0.0; 3], &l).unwrap();
    assert_eq!(a, vec![1.0 / 3.0; 3]);
    let a0 = avg(&Ordinal::zero(), 3u64.., &coll, 2, vec![0.0; 3], &l).unwrap();
    assert_eq!(a0, unit(1));

    let v = vec![r(2, 7), r(-1, 1)];
    let same = |_: &FiniteSet| Some(v.clone());
    let zero = vec![BigRational::zero(); 2];
    assert_eq!(
        avg_exact(&Ordinal::one(), 3u64.., &same, 1, zero.clone(), &l).unwrap(),
        v
    );
    assert_eq!(avg_exact(&Ordinal::nat(2), 2u64.., &same, 1, zero, &l).unwrap(), v);

    let ones = |_: &FiniteSet| Some(vec![1.0]);
    let s = avg2(&Ordinal::zero(), &Ordinal::one(), 3u64.., &ones, 1, vec![0.0], &l).unwrap();
    assert!((s[0] - 3f64.sqrt()).abs() < 1e-12);
    let s = avg2(&Ordinal::zero(), &Ordinal::one(), 3u64.., &coll, 1, vec![0.0; 3], &l).unwrap();
    for x in s {
        assert!((x - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn avg2_without_outer_averaging_is_avg() {
    let l = Limits::default();
    let coll = |e: &FiniteSet| Some(vec![e.len() as f64 / 7.0, 1.0 / e.maximum().unwrap() as f64]);
    for xi in 0..=2u64 {
        let o = Ordinal::nat(xi);
        for n in 1..=(3 - xi as usize).min(2) {
            let a = avg(&o, 2u64.., &coll, n, vec![0.0; 2], &l).unwrap();
            let b = avg2(&o, &Ordinal::zero(), 2u64.., &coll, n, vec![0.0; 2], &l).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn perm_suite_examples() {
    let l = Limits::default();
    for (xi, zeta, start) in [
        (1u64, 1u64, 3u64),
        (0, 0, 3),
        (2, 1, 2),
        (1, 0, 3),
        (0, 1, 3),
        (0, 2, 3),
    ] {
        let checks = verify_perm(&Ordinal::nat(xi), &Ordinal::nat(zeta), start.., 1, &l);
        assert_eq!(checks.len(), 4);
        for c in checks {
            assert!(c.pass, "({xi},{zeta}) from {start}: {} {}", c.name, c.detail);
        }
    }
}

#[test]
fn weight_arithmetic() {
    let a = Weight::inv_sqrt(12).unwrap();
    assert_eq!(a.square(), r(1, 12));
    assert_eq!(a.radicand(), 3);
    let b = Weight::inv_sqrt(3).unwrap();
    assert_eq!(a.mul(&b), Weight::rational(r(1, 6)));
    assert_eq!(a.checked_add(&a).unwrap().square(), r(1, 3));
    assert!(a.checked_add(&Weight::one()).is_none());
    for w in [
        a,
        b,
        Weight::rational(r(5, 9)),
        Weight::inv_sqrt(30).unwrap().scale(&r(7, 2)),
    ] {
        let back: Weight = w.to_string().parse().unwrap();
        assert_eq!(back, w);
        assert!((w.to_f64() * w.to_f64() - 1.0 * num_traits::ToPrimitive::to_f64(&w.square()).unwrap()).abs() < 1e-12);
    }
}

fn arb_stream() -> impl Strategy<Value = Vec<u64>> {
    (
        2u64..7,
        prop::collection::vec(prop_oneof![4 => Just(1u64), 1 => Just(2u64)], 3000),
    )
        .prop_map(|(s, gaps)| {
            let mut v = vec![s];
            for g in gaps {
                let n = v.last().unwrap() + g;
                v.push(n);
            }
            v
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn permanence_and_convexity(stream in arb_stream(), xi in 0u64..3, zeta in 0u64..2) {
        let l = Limits::default();
        let (x, z) = (Ordinal::nat(xi), Ordinal::nat(zeta));
        let blocks = match decompose(&Family::conv(zeta, xi), stream.iter().copied(), 2, &l) {
            Ok(b) => b,
            Err(_) => return Ok(()),
        };
        // weights of segments reaching into the second block ignore the first
        let first = blocks[0].len();
        let joined: Vec<u64> = blocks.iter().flat_map(|b| b.as_slice().to_vec()).collect();
        for k in (first + 1..=joined.len()).step_by(7) {
            let whole = set(&joined[..k]);
            let tail = set(&joined[first..k]);
            prop_assert_eq!(p_weight(&x, &whole).unwrap(), p_weight(&x, &tail).unwrap());
            prop_assert_eq!(q_weight(&x, &z, &whole).unwrap(), q_weight(&x, &z, &tail).unwrap());
        }
        for s in convexity_sums(&x, stream.iter().copied(), 2, &l).unwrap() {
            prop_assert!(s.is_one());
        }
        for s in square_sums(&x, &z, stream.iter().copied(), 2, &l).unwrap() {
            prop_assert!(s.q_constant);
            prop_assert!(s.value.is_one());
        }
    }
}
