use std::sync::Arc;

use overgroup_core::overgroup::parabolic::{self, chevalley_matsumoto, from_coords, levi_split, unipotent_coords, Side};
use overgroup_core::overgroup::{in_g_sigma, SigmaPair};
use overgroup_core::rep::{invert_word, Chevalley, Letter, Rep};
use overgroup_core::rings::{Ideal, Ring};
use overgroup_core::rng::SplitMix64;
use overgroup_core::roots::CaseTag;
use proptest::prelude::*;

fn chev(tag: CaseTag, l: usize, ring: &str) -> Chevalley {
    Chevalley::new(Rep::new(tag, l).unwrap(), Ring::parse(ring).unwrap())
}

fn any_case() -> impl Strategy<Value = (CaseTag, usize)> {
    prop::sample::select(vec![(CaseTag::A, 5), (CaseTag::A, 6), (CaseTag::B, 0), (CaseTag::C, 0)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn word_times_inverse_is_identity((tag, l) in any_case(), seed in any::<u64>()) {
        let c = chev(tag, l, "z8");
        let mut rng = SplitMix64::new(seed);
        let word = c.random_word(10, &mut rng);
        let g = c.eval_word(&word).unwrap();
        prop_assert!(g.mat.mul(&g.inv).unwrap().is_identity());
        let back = c.eval_word(&invert_word(&word)).unwrap();
        prop_assert_eq!(back.mat, g.inv);
    }

    #[test]
    fn reduction_is_a_homomorphism(seed in any::<u64>()) {
        let c = chev(CaseTag::B, 0, "z8");
        let q = c.ring.quotient(&Ideal::parse(&c.ring, "(2)").unwrap()).unwrap();
        let mut rng = SplitMix64::new(seed);
        let g = c.eval_word(&c.random_word(6, &mut rng)).unwrap();
        let h = c.eval_word(&c.random_word(6, &mut rng)).unwrap();
        let (small, gh) = c.reduce(&c.mul(&g, &h).unwrap(), &q).unwrap();
        let (_, rg) = c.reduce(&g, &q).unwrap();
        let (_, rh) = c.reduce(&h, &q).unwrap();
        prop_assert_eq!(gh.mat, small.mul(&rg, &rh).unwrap().mat);
    }

    #[test]
    fn unipotent_coordinates_round_trip((tag, l) in any_case(), seed in any::<u64>(), minus in any::<bool>()) {
        let c = chev(tag, l, "z9");
        let side = if minus { Side::Minus } else { Side::Plus };
        let l0 = c.weights().highest();
        let roots = parabolic::unipotent_roots(&c, l0, side);
        let mut rng = SplitMix64::new(seed);
        let coords: Vec<_> = roots.iter().map(|&r| (r, c.ring.random(&mut rng))).filter(|(_, v)| !v.is_zero()).collect();
        let u = from_coords(&c, &coords).unwrap();
        prop_assert_eq!(unipotent_coords(&c, &u.mat, l0, side), coords.clone());
        // the factors commute
        let rev: Vec<_> = coords.iter().rev().cloned().collect();
        prop_assert_eq!(from_coords(&c, &rev).unwrap().mat, u.mat);
    }

    #[test]
    fn levi_split_recovers_product((tag, l) in any_case(), seed in any::<u64>()) {
        let c = chev(tag, l, "z8");
        let case = c.case().clone();
        let l0 = c.weights().highest();
        let mut rng = SplitMix64::new(seed);
        let coords: Vec<_> = case.omega_plus().iter().map(|&r| (r, c.ring.random(&mut rng))).collect();
        let u = from_coords(&c, &coords).unwrap();
        let d = c.eval_word(&c.random_word_in(case.delta(), 6, &mut rng)).unwrap();
        let g = c.mul(&u, &d).unwrap();
        let (u2, l2) = levi_split(&c, &g, l0, Side::Plus).unwrap();
        prop_assert_eq!(&u2.mat, &u.mat);
        prop_assert_eq!(&l2.mat, &d.mat);
    }

    #[test]
    fn decomposition_of_unit_corner_words((tag, l) in any_case(), seed in any::<u64>()) {
        let c = chev(tag, l, "z8");
        let mut rng = SplitMix64::new(seed);
        let g = c.eval_word(&c.random_word(8, &mut rng)).unwrap();
        let l0 = c.weights().highest();
        prop_assume!(g.entry(l0, l0).is_unit());
        let cm = chevalley_matsumoto(&c, &g).unwrap();
        let back = c.mul(&c.mul(&cm.lower, &cm.levi).unwrap(), &cm.upper).unwrap();
        prop_assert_eq!(back.mat, g.mat);
    }

    #[test]
    fn positive_root_elements_in_g_sigma(seed in any::<u64>()) {
        let c = chev(CaseTag::C, 0, "z8");
        let sigma = SigmaPair::parse(&c.ring, "(2),(4)").unwrap();
        let mut rng = SplitMix64::new(seed);
        let xi = c.ring.random(&mut rng);
        let b = *rng.pick(c.case().omega_plus());
        let g = c.root_elt(b, &xi);
        prop_assert_eq!(in_g_sigma(&g, &sigma), sigma.plus.contains(&xi).unwrap());
        let low = c.root_elt(c.case().neg(b), &xi);
        prop_assert_eq!(in_g_sigma(&low, &sigma), sigma.minus.contains(&xi).unwrap());
    }
}

#[test]
fn omega_plus_is_abelian() {
    for tag in [CaseTag::B, CaseTag::C] {
        let case = Arc::clone(Rep::new(tag, 0).unwrap().case());
        for &a in case.omega_plus() {
            for &b in case.omega_plus() {
                assert!(case.add(a, b).is_none());
            }
        }
    }
}

#[test]
fn torus_and_weyl_letters_invert() {
    let c = chev(CaseTag::B, 0, "z9");
    let two = c.ring.from_int(2);
    for r in [0, 5, 17] {
        let word = vec![Letter::H { root: r, unit: two.clone() }, Letter::W { root: r, unit: two.clone() }];
        let g = c.eval_word(&word).unwrap();
        assert!(c.mul(&g, &c.eval_word(&invert_word(&word)).unwrap()).unwrap().is_identity());
    }
}
