//! Parabolic subgroups `P_λ`, `P⁻_λ`, their Levi and unipotent parts, and the
//! decomposition `g = v g1 u` of an element with a unit in the corner `(λ0, λ0)`.
//!
//! The basis is graded by the distance `d(λ, ·)` in the weight graph. `U_λ` is
//! block upper unitriangular for this grading and `U⁻_λ` block lower unitriangular.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rep::{Chevalley, GroupElement, Letter};
use crate::rings::RingElem;
use crate::roots::RootId;
use crate::weights::{WeightId, WeightModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `P`, `U` and roots of `Ω⁺`.
    Plus,
    /// `P⁻`, `U⁻` and roots of `Ω⁻`.
    Minus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParabolicProfile {
    pub weight: WeightId,
    pub in_p: bool,
    pub in_p_minus: bool,
    pub in_levi: bool,
    pub in_unipotent: bool,
    pub in_unipotent_minus: bool,
}

pub fn grading(w: &WeightModule, lambda: WeightId) -> Vec<usize> {
    w.weights().map(|mu| w.distance(lambda, mu) as usize).collect()
}

pub fn in_p(m: &Matrix, lambda: WeightId) -> bool {
    (0..m.n()).all(|mu| mu == lambda || m.entry_is_zero(mu, lambda))
}

pub fn in_p_minus(m: &Matrix, lambda: WeightId) -> bool {
    (0..m.n()).all(|mu| mu == lambda || m.entry_is_zero(lambda, mu))
}

/// Identity on the diagonal blocks and zero wherever `keep(grade_i, grade_j)` fails.
fn unitriangular(m: &Matrix, grade: &[usize], keep: impl Fn(usize, usize) -> bool) -> bool {
    let n = m.n();
    let one = m.ring().one();
    for i in 0..n {
        for j in 0..n {
            if keep(grade[i], grade[j]) {
                continue;
            }
            let ok = if i == j { m.get(i, j) == one } else { m.entry_is_zero(i, j) };
            if !ok {
                return false;
            }
        }
    }
    true
}

pub fn profile(w: &WeightModule, m: &Matrix, lambda: WeightId) -> ParabolicProfile {
    let grade = grading(w, lambda);
    ParabolicProfile {
        weight: lambda,
        in_p: in_p(m, lambda),
        in_p_minus: in_p_minus(m, lambda),
        in_levi: m.block_diagonal(&grade) == *m,
        in_unipotent: unitriangular(m, &grade, |a, b| a < b),
        in_unipotent_minus: unitriangular(m, &grade, |a, b| a > b),
    }
}

/// `g = u l` with `u ∈ U_λ` (or `U⁻_λ`) and `l ∈ L_λ`; returns `(u, l)`.
pub fn levi_split(chev: &Chevalley, g: &GroupElement, lambda: WeightId, side: Side) -> Result<(GroupElement, GroupElement)> {
    let w = chev.weights();
    let member = match side {
        Side::Plus => in_p(&g.mat, lambda),
        Side::Minus => in_p_minus(&g.mat, lambda),
    };
    if !member {
        return Err(Error::Domain(format!(
            "element is not in the {}parabolic subgroup of weight {}",
            if side == Side::Minus { "opposite " } else { "" },
            w.format_weight(lambda)
        )));
    }
    let grade = grading(w, lambda);
    let l = GroupElement { mat: g.mat.block_diagonal(&grade), inv: g.inv.block_diagonal(&grade), word: None };
    let u = chev.mul(g, &l.inverse())?;
    let p = profile(w, &u.mat, lambda);
    let ok = match side {
        Side::Plus => p.in_unipotent,
        Side::Minus => p.in_unipotent_minus,
    };
    if !ok {
        return Err(Error::Internal("Levi splitting left a non-unipotent factor".into()));
    }
    Ok((u, l))
}

/// Roots `α` with `⟨λ, α⟩ = 1` (plus side) or `-1` (minus side); these index
/// the root subgroups of `U_λ` and `U⁻_λ`.
pub fn unipotent_roots(chev: &Chevalley, lambda: WeightId, side: Side) -> Vec<RootId> {
    let w = chev.weights();
    let want = if side == Side::Plus { 1 } else { -1 };
    chev.case().roots().filter(|&r| w.pairing(lambda, r) == want).collect()
}

/// Coordinates `ξ_α` of `u = ∏ x_α(ξ_α)` in `U_λ` or `U⁻_λ`, read off row (column) `λ`.
/// Zero coordinates are omitted.
pub fn unipotent_coords(chev: &Chevalley, u: &Matrix, lambda: WeightId, side: Side) -> Vec<(RootId, RingElem)> {
    let w = chev.weights();
    let mut out = Vec::new();
    for r in unipotent_roots(chev, lambda, side) {
        let value = match side {
            Side::Plus => {
                let mu = w.shift(lambda, chev.case().neg(r)).expect("λ - α is a weight");
                u.get(lambda, mu).scale_sign(chev.rep.sign(mu, r))
            }
            Side::Minus => {
                let mu = w.shift(lambda, r).expect("λ + α is a weight");
                u.get(mu, lambda).scale_sign(chev.rep.sign(lambda, r))
            }
        };
        if !value.is_zero() {
            out.push((r, value));
        }
    }
    out
}

pub fn from_coords(chev: &Chevalley, coords: &[(RootId, RingElem)]) -> Result<GroupElement> {
    let word: Vec<Letter> = coords.iter().map(|(r, v)| Letter::X { root: *r, value: v.clone() }).collect();
    chev.eval_word(&word)
}

/// `g = v g1 u` with `v ∈ U⁻`, `g1 ∈ L` and `u ∈ U`.
#[derive(Clone, Debug)]
pub struct ChevalleyMatsumoto {
    pub lower: GroupElement,
    pub levi: GroupElement,
    pub upper: GroupElement,
    pub lower_coords: Vec<(RootId, RingElem)>,
    pub upper_coords: Vec<(RootId, RingElem)>,
}

pub fn chevalley_matsumoto(chev: &Chevalley, g: &GroupElement) -> Result<ChevalleyMatsumoto> {
    let w = chev.weights();
    let case = chev.case();
    let l0 = w.highest();
    let corner = g.entry(l0, l0);
    if !corner.is_unit() {
        return Err(Error::Decomposition(format!("corner entry {corner} is not a unit")));
    }
    let c = corner.inv()?;
    let mut upper_coords = Vec::new();
    for &a in case.omega_plus() {
        let mu = w.shift(l0, case.neg(a)).expect("Ω⁺ lowers λ0");
        let v = (&g.entry(l0, mu) * &c).scale_sign(chev.rep.sign(mu, a));
        if !v.is_zero() {
            upper_coords.push((a, v));
        }
    }
    let mut lower_coords = Vec::new();
    for &a in case.omega_minus() {
        let mu = w.shift(l0, a).expect("Ω⁻ lowers λ0");
        let v = (&g.entry(mu, l0) * &c).scale_sign(chev.rep.sign(l0, a));
        if !v.is_zero() {
            lower_coords.push((a, v));
        }
    }
    let upper = from_coords(chev, &upper_coords)?;
    let lower = from_coords(chev, &lower_coords)?;
    let levi = chev.mul(&chev.mul(&lower.inverse(), g)?, &upper.inverse())?;
    if !profile(w, &levi.mat, l0).in_levi {
        return Err(Error::Decomposition("middle factor is not block diagonal".into()));
    }
    Ok(ChevalleyMatsumoto { lower, levi, upper, lower_coords, upper_coords })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::Rep;
    use crate::rings::Ring;
    use crate::rng::SplitMix64;
    use crate::roots::CaseTag;

    fn chev(tag: CaseTag, ring: &str) -> Chevalley {
        Chevalley::new(Rep::new(tag, 5).unwrap(), Ring::parse(ring).unwrap())
    }

    #[test]
    fn unipotent_coordinates_round_trip() {
        let c = chev(CaseTag::C, "z12");
        let mut rng = SplitMix64::new(3);
        let w = c.weights().clone();
        for lambda in [0, 5, 20] {
            for side in [Side::Plus, Side::Minus] {
                let roots = unipotent_roots(&c, lambda, side);
                let coords: Vec<_> = roots.iter().take(9).map(|&r| (r, c.ring.random(&mut rng))).collect();
                let u = from_coords(&c, &coords).unwrap();
                let p = profile(&w, &u.mat, lambda);
                assert!(if side == Side::Plus { p.in_unipotent && p.in_p } else { p.in_unipotent_minus && p.in_p_minus });
                let back = unipotent_coords(&c, &u.mat, lambda, side);
                assert_eq!(from_coords(&c, &back).unwrap().mat, u.mat);
            }
        }
    }

    #[test]
    fn levi_split_of_product() {
        let c = chev(CaseTag::B, "z4");
        let mut rng = SplitMix64::new(8);
        let case = c.case().clone();
        let mut word = c.random_word_in(case.delta(), 6, &mut rng);
        word.extend(c.random_word_in(case.omega_plus(), 5, &mut rng));
        let g = c.eval_word(&word).unwrap();
        let (u, l) = levi_split(&c, &g, 0, Side::Plus).unwrap();
        assert_eq!(c.mul(&u, &l).unwrap().mat, g.mat);
        assert!(profile(c.weights(), &l.mat, 0).in_levi);
    }

    #[test]
    fn decomposition_recovers_factors() {
        let c = chev(CaseTag::C, "z4");
        let mut rng = SplitMix64::new(21);
        let case = c.case().clone();
        let mut word = c.random_word_in(case.omega_minus(), 4, &mut rng);
        word.extend(c.random_word_in(case.delta(), 5, &mut rng));
        word.extend(c.random_word_in(case.omega_plus(), 4, &mut rng));
        let g = c.eval_word(&word).unwrap();
        let d = chevalley_matsumoto(&c, &g).unwrap();
        let back = c.mul(&c.mul(&d.lower, &d.levi).unwrap(), &d.upper).unwrap();
        assert_eq!(back.mat, g.mat);
    }
}
