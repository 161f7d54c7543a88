use overgroup_core::forms::{self, OrbitSampler};
use overgroup_core::rep::{Chevalley, Rep};
use overgroup_core::rings::Ring;
use overgroup_core::rng::SplitMix64;
use overgroup_core::roots::CaseTag;
use overgroup_core::Error;
use proptest::prelude::*;

/// `+1` for a symmetric invariant form, `-1` for a skew one: the 56-dimensional
/// module of E7 is symplectic, the half-spin module of `D_l` (`l` even) is
/// orthogonal for `l ≡ 0 (mod 4)` and symplectic for `l ≡ 2 (mod 4)`.
fn expected_parity(tag: CaseTag, l: usize) -> i8 {
    match tag {
        CaseTag::C => -1,
        _ if l.is_multiple_of(4) => 1,
        _ => -1,
    }
}

#[test]
fn bilinear_form_parity() {
    for (tag, l) in [(CaseTag::A, 6), (CaseTag::A, 8), (CaseTag::A, 10), (CaseTag::C, 0)] {
        let rep = Rep::new(tag, l).unwrap();
        let h = forms::build_bilinear(&rep).unwrap();
        for lam in rep.weights().weights() {
            assert_eq!(h.signs[h.partner[lam]], expected_parity(tag, l) * h.signs[lam], "{tag:?} {l}");
        }
        let z = Ring::parse("int").unwrap();
        assert_eq!(forms::bilinear_violation(&rep, &h, &z).unwrap(), None);
    }
}

#[test]
fn first_type_has_no_form() {
    for (tag, l) in [(CaseTag::A, 5), (CaseTag::A, 7), (CaseTag::B, 0)] {
        let rep = Rep::new(tag, l).unwrap();
        assert!(matches!(forms::build_pi_form(&rep, 1), Err(Error::Unsupported(m)) if m == "not applicable: first type"));
    }
}

#[test]
fn square_structure_in_e7() {
    let rep = Rep::new(CaseTag::C, 0).unwrap();
    let f = forms::build_pi_form(&rep, 3).unwrap();
    // members pair up
    assert_eq!(f.square.members.len(), f.square.matching.len() * 2);
    assert_eq!(f.path.last(), rep.weights().lowest().as_ref());
    assert_eq!(rep.weights().distance(f.path[0], rep.weights().highest()), 2);
}

#[test]
fn squares_need_distance_two() {
    let rep = Rep::new(CaseTag::C, 0).unwrap();
    let w = rep.weights();
    let n = w.neighbours(w.highest())[0];
    assert!(matches!(forms::find_square(&rep, w.highest(), n), Err(Error::Domain(_))));
}

#[test]
fn form_is_reproducible() {
    let rep = Rep::new(CaseTag::A, 6).unwrap();
    assert_eq!(forms::build_pi_form(&rep, 1).unwrap().q, forms::build_pi_form(&rep, 99).unwrap().q);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn columns_of_group_elements_lie_on_the_quadric(seed in any::<u64>(), e7 in any::<bool>()) {
        let rep = if e7 { Rep::new(CaseTag::C, 0).unwrap() } else { Rep::new(CaseTag::A, 8).unwrap() };
        let f = forms::build_pi_form(&rep, 5).unwrap();
        let c = Chevalley::new(rep.clone(), Ring::parse("z8").unwrap());
        let mut rng = SplitMix64::new(seed);
        let g = c.eval_word(&c.random_word(10, &mut rng)).unwrap();
        for j in 0..rep.dim() {
            let col: Vec<i64> = (0..rep.dim()).map(|i| g.mat.raw(0, i, j)).collect();
            prop_assert_eq!(f.q.eval_mod(&col, 8), 0);
        }
        let s = OrbitSampler::new(&rep, 6);
        prop_assert_eq!(f.q.eval(&s.vector(&mut rng)), 0);
    }
}
