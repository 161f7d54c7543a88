use overgroup_core::rep::Rep;
use overgroup_core::roots::{CaseTag, EmbeddingCase, EmbeddingType};
use overgroup_core::Error;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Roots of `D_l` as the vectors `±e_i ± e_j`, enumerated.
fn d_root_count(l: usize) -> usize {
    let mut roots = std::collections::BTreeSet::new();
    for i in 0..l {
        for j in 0..l {
            if i == j {
                continue;
            }
            for (s, t) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut v = vec![0i32; l];
                v[i] = s;
                v[j] = t;
                roots.insert(v);
            }
        }
    }
    roots.len()
}

#[test]
fn d_series_matches_the_orthogonal_model() {
    for l in 5..=10 {
        let rep = Rep::new(CaseTag::A, l).unwrap();
        assert_eq!(rep.case().len(), d_root_count(l));
        assert_eq!(rep.dim(), 1 << (l - 1));
        // half-spin weights (±1/2, ...) with an even number of minus signs,
        // graded by the number of minus signs / 2
        let sizes: Vec<usize> = (0..=l / 2).map(|k| binomial(l, 2 * k)).collect();
        assert_eq!(rep.weights().component_sizes(), sizes);
        let kind = if l % 2 == 1 { EmbeddingType::First } else { EmbeddingType::Second };
        assert_eq!(rep.case().kind(), kind);
        // Δ = A_{l-1}: l(l-1) roots
        assert_eq!(rep.case().delta().len(), l * (l - 1));
    }
}

#[test]
fn exceptional_cases() {
    let e6 = Rep::new(CaseTag::B, 0).unwrap();
    assert_eq!((e6.case().len(), e6.dim()), (72, 27));
    assert_eq!(e6.weights().component_sizes(), vec![1, 16, 10]);
    assert_eq!(e6.case().kind(), EmbeddingType::First);
    // Δ = D_5
    assert_eq!(e6.case().delta().len(), 40);

    let e7 = Rep::new(CaseTag::C, 0).unwrap();
    assert_eq!((e7.case().len(), e7.dim()), (126, 56));
    assert_eq!(e7.weights().component_sizes(), vec![1, 27, 27, 1]);
    assert_eq!(e7.case().kind(), EmbeddingType::Second);
    let w = e7.weights();
    assert_eq!(w.distance(w.highest(), w.lowest().unwrap()), 3);
    // Δ = E_6, Ω± have 27 roots each
    assert_eq!(e7.case().delta().len(), 72);
    assert_eq!(e7.case().omega_plus().len(), 27);
}

#[test]
fn rank_four_is_rejected() {
    assert!(matches!(EmbeddingCase::new(CaseTag::A, 4), Err(Error::RankOutOfRange(_))));
}

#[test]
fn shifts_and_distances() {
    let rep = Rep::new(CaseTag::B, 0).unwrap();
    let (case, w) = (rep.case(), rep.weights());
    let l0 = w.highest();
    // nothing lies above λ0
    assert!(w.shift(l0, case.simple(case.crossed)).is_none());
    for &a in case.omega_plus() {
        let low = w.shift(l0, case.neg(a)).expect("λ0 - α is a weight for α in Ω⁺");
        assert_eq!(w.shift(low, a), Some(l0));
        assert_eq!(w.distance(l0, low), 1);
    }
    for a in w.weights() {
        for b in w.weights() {
            assert_eq!(w.distance(a, b) == 1, w.diff(a, b).is_some());
            assert_eq!(w.distance(a, b), w.distance(b, a));
        }
    }
}

#[test]
fn every_neighbour_choice_in_e6_succeeds() {
    let rep = Rep::new(CaseTag::B, 0).unwrap();
    let w = rep.weights();
    assert_eq!(w.components()[1].len(), 16);
    for &l1 in &w.components()[1] {
        let mu = w.neighbor_in_component(l1, None).unwrap();
        assert_eq!((w.component_of(mu), w.distance(l1, mu)), (1, 1));
    }
}

#[test]
fn partner_of_crossed_root() {
    for rep in [Rep::new(CaseTag::B, 0).unwrap(), Rep::new(CaseTag::C, 0).unwrap()] {
        let case = rep.case();
        let a1 = case.simple(case.crossed);
        let a2 = case.simple(case.adjacent);
        assert!(case.add(a1, a2).is_some());
        let p = case.partner_root(a1).unwrap();
        assert!(case.in_delta(p) && case.add(p, a1).is_some());
        assert_eq!(case.reflect(a1, a1), case.neg(a1));
    }
}
