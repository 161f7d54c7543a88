use std::sync::Arc;

use overgroup_core::rings::{Ideal, Ring, RingElem};
use proptest::prelude::*;

fn zn(n: u64) -> Arc<Ring> {
    Ring::parse(&format!("z{n}")).unwrap()
}

fn elem(r: &Arc<Ring>, parts: Vec<i64>) -> RingElem {
    r.elem(parts).unwrap()
}

/// Digits of a packed `F_p[t]/(t^k)` scalar, lowest degree first.
fn digits(p: i64, k: u32, mut a: i64) -> Vec<i64> {
    (0..k)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

/// Full convolution followed by truncation.
fn poly_mul_oracle(p: i64, k: u32, a: i64, b: i64) -> Vec<i64> {
    let (x, y) = (digits(p, k, a), digits(p, k, b));
    let mut full = vec![0i64; 2 * k as usize];
    for (i, u) in x.iter().enumerate() {
        for (j, v) in y.iter().enumerate() {
            full[i + j] += u * v;
        }
    }
    full.truncate(k as usize);
    full.iter().map(|c| c.rem_euclid(p)).collect()
}

proptest! {
    #[test]
    fn zmod_matches_integer_arithmetic(n in prop::sample::select(vec![4u64, 8, 9, 12, 25, 27, 72]), a in 0i64..1000, b in 0i64..1000) {
        let r = zn(n);
        let m = n as i64;
        let (x, y) = (r.from_int(a), r.from_int(b));
        let crt = |v: i64| r.from_int(v);
        prop_assert_eq!(&x + &y, crt((a + b) % m));
        prop_assert_eq!(&x * &y, crt(a * b % m));
        prop_assert_eq!(-&x, crt((m - a % m) % m));
        prop_assert_eq!(x.is_unit(), num_integer::Integer::gcd(&a, &m) == 1);
        if x.is_unit() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn truncated_polynomials_match_convolution(a in 0i64..81, b in 0i64..81) {
        let r = Ring::parse("f3t4").unwrap();
        let prod = &elem(&r, vec![a]) * &elem(&r, vec![b]);
        prop_assert_eq!(digits(3, 4, prod.parts()[0]), poly_mul_oracle(3, 4, a, b));
    }

    #[test]
    fn ring_axioms(spec in prop::sample::select(vec!["z8", "z9", "f2t2", "z4xf2t3", "z12"]), seed in any::<u64>()) {
        let r = Ring::parse(spec).unwrap();
        let mut rng = overgroup_core::rng::SplitMix64::new(seed);
        let (a, b, c) = (r.random(&mut rng), r.random(&mut rng), r.random(&mut rng));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn ideals_are_closed(spec in prop::sample::select(vec!["z8", "z27", "f2t3"]), seed in any::<u64>(), j in 0u32..4) {
        let r = Ring::parse(spec).unwrap();
        let mut rng = overgroup_core::rng::SplitMix64::new(seed);
        let gen = r.random(&mut rng).pow(j.max(1));
        let i = Ideal::principal(&gen);
        let (x, y, s) = (i.random(&mut rng), i.random(&mut rng), r.random(&mut rng));
        prop_assert!(i.contains(&(&x + &y)).unwrap());
        prop_assert!(i.contains(&(&s * &x)).unwrap());
        // an ideal of a chain ring is determined by the least valuation
        let squared = i.product(&i).unwrap();
        prop_assert!(i.contains_ideal(&squared).unwrap());
        prop_assert_eq!(i.sum(&squared).unwrap(), i.clone());
    }
}

#[test]
fn ideal_lattice_of_z8() {
    let r = zn(8);
    let parse = |s: &str| Ideal::parse(&r, s).unwrap();
    assert_eq!(parse("(6)"), parse("(2)"));
    assert_eq!(parse("(2)").product(&parse("(2)")).unwrap(), parse("(4)"));
    assert!(parse("(2)").pow(3).is_zero());
    assert_eq!(parse("(2)").elements(64).unwrap().len(), 4);
}

#[test]
fn quotient_by_ideal() {
    let r = zn(8);
    let q = r.quotient(&Ideal::parse(&r, "(2)").unwrap()).unwrap();
    let x = q.apply(&r.from_int(7)).unwrap();
    assert!(x.is_one());
    assert_eq!(x.ring().size(), Some(2));
}
