//! Root type elements and the ideals attached to a weight of the first component.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rep::{Chevalley, GroupElement, Letter};
use crate::rings::Ideal;
use crate::weights::WeightId;

/// Checks the equations satisfied by root type elements: `(g - e)² = 0`,
/// vanishing at distance at least two, and one coefficient per root difference.
/// Returns a description of the first failure.
pub fn root_type_violation(chev: &Chevalley, m: &Matrix) -> Option<String> {
    let w = chev.weights();
    let n = chev.dim();
    let e = Matrix::identity(&chev.ring, n);
    let d = m.sub(&e).ok()?;
    if !d.mul(&d).ok()?.is_zero() {
        return Some("(g - e)² is not zero".into());
    }
    let mut coeff = vec![None; chev.case().len()];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dist = w.distance(i, j);
            if dist >= 2 {
                if !d.entry_is_zero(i, j) {
                    return Some(format!("nonzero entry at distance {dist}"));
                }
                continue;
            }
            let r = w.diff(i, j).expect("distance one means a root difference");
            let v = d.get(i, j).scale_sign(chev.rep.sign(j, r));
            match &coeff[r] {
                None => coeff[r] = Some(v),
                Some(prev) if *prev == v => {}
                Some(_) => return Some(format!("entries for root {} disagree", chev.case().format_root(r))),
            }
        }
    }
    None
}

fn require_triangle(chev: &Chevalley, lambda1: WeightId, mu: WeightId, nu: WeightId) -> Result<()> {
    let w = chev.weights();
    if w.distance(lambda1, mu) != 1 || w.distance(lambda1, nu) != 1 || w.distance(mu, nu) != 1 {
        return Err(Error::Domain("the three weights must be pairwise at distance one".into()));
    }
    Ok(())
}

/// `x(μ, ν) = x_α(c_{μ,α} g_{ν,λ1}) x_β(-c_{ν,β} g_{μ,λ1})` with `α = λ1 - μ`, `β = λ1 - ν`.
pub fn x_mu_nu(chev: &Chevalley, g: &GroupElement, lambda1: WeightId, mu: WeightId, nu: WeightId) -> Result<GroupElement> {
    require_triangle(chev, lambda1, mu, nu)?;
    let w = chev.weights();
    let alpha = w.diff(lambda1, mu).expect("checked distance");
    let beta = w.diff(lambda1, nu).expect("checked distance");
    let a = g.entry(nu, lambda1).scale_sign(chev.rep.sign(mu, alpha));
    let b = g.entry(mu, lambda1).scale_sign(chev.rep.sign(nu, beta)).neg();
    chev.eval_word(&[Letter::X { root: alpha, value: a }, Letter::X { root: beta, value: b }])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A2Check {
    /// `x(μ, ν)` fixes column `λ1` of `g`.
    pub stabilizes_column: bool,
    /// `g⁻¹ x g = x + (x g - g x)`.
    pub commutator_identity: bool,
}

pub fn a2_check(chev: &Chevalley, g: &GroupElement, lambda1: WeightId, mu: WeightId, nu: WeightId) -> Result<A2Check> {
    let x = x_mu_nu(chev, g, lambda1, mu, nu)?;
    let xg = x.mat.mul(&g.mat)?;
    let stabilizes_column = xg.col_vector(lambda1) == g.mat.col_vector(lambda1);
    let conj = g.inv.mul(&xg)?;
    let gx = g.mat.mul(&x.mat)?;
    let rhs = x.mat.add(&xg.sub(&gx)?)?;
    Ok(A2Check { stabilizes_column, commutator_identity: conj == rhs })
}

/// Triples `(λ1, μ, ν)` of pairwise adjacent weights with `λ1` in the first component.
pub fn triangles(chev: &Chevalley) -> Vec<(WeightId, WeightId, WeightId)> {
    let w = chev.weights();
    let mut out = Vec::new();
    for &l1 in &w.components()[1] {
        for &mu in w.neighbours(l1) {
            for &nu in w.neighbours(l1) {
                if mu != nu && w.distance(mu, nu) == 1 {
                    out.push((l1, mu, nu));
                }
            }
        }
    }
    out
}

/// The ideals generated by column `λ1` inside the first component (`𝔄`), by the
/// entry `(λ0, λ1)` (`𝔅`), and their transposed versions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbIdeals {
    pub a: Ideal,
    pub b: Ideal,
    pub a_prime: Ideal,
    pub b_prime: Ideal,
}

impl AbIdeals {
    pub fn to_json(&self) -> Value {
        json!({
            "A": self.a.to_string(),
            "B": self.b.to_string(),
            "A'": self.a_prime.to_string(),
            "B'": self.b_prime.to_string(),
        })
    }
}

pub fn ab_ideals(chev: &Chevalley, g: &GroupElement, lambda1: WeightId) -> Result<AbIdeals> {
    let w = chev.weights();
    if w.component_of(lambda1) != 1 {
        return Err(Error::Domain(format!("weight {} is not at distance one from λ0", w.format_weight(lambda1))));
    }
    let others: Vec<WeightId> = w.components()[1].iter().copied().filter(|&m| m != lambda1).collect();
    let col: Vec<_> = others.iter().map(|&m| g.entry(m, lambda1)).collect();
    let row: Vec<_> = others.iter().map(|&m| g.entry(lambda1, m)).collect();
    let l0 = w.highest();
    Ok(AbIdeals {
        a: Ideal::from_elems(&chev.ring, &col)?,
        b: Ideal::principal(&g.entry(l0, lambda1)),
        a_prime: Ideal::from_elems(&chev.ring, &row)?,
        b_prime: Ideal::principal(&g.entry(lambda1, l0)),
    })
}

/// Every entry of `g - e` lies in `b`.
pub fn congruent_to_identity(m: &Matrix, b: &Ideal) -> bool {
    let one = m.ring().one();
    (0..m.n()).all(|i| {
        (0..m.n()).all(|j| if i == j { b.contains(&(&m.get(i, i) - &one)).unwrap_or(false) } else { m.entry_in(i, j, b) })
    })
}

/// For `g ≡ e` modulo an ideal of square zero, entries at weight distance at
/// least two vanish. Returns whether that holds for `g`.
pub fn nilpotent_vanishing_check(chev: &Chevalley, g: &Matrix, b: &Ideal) -> Result<bool> {
    if !b.product(b)?.is_zero() {
        return Err(Error::Domain(format!("the ideal {b} does not square to zero")));
    }
    if !congruent_to_identity(g, b) {
        return Err(Error::Domain(format!("element is not congruent to e modulo {b}")));
    }
    let w = chev.weights();
    let n = chev.dim();
    Ok((0..n).all(|i| (0..n).all(|j| w.distance(i, j) < 2 || g.entry_is_zero(i, j))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::Rep;
    use crate::rings::Ring;
    use crate::rng::SplitMix64;
    use crate::roots::CaseTag;

    #[test]
    fn conjugated_root_elements_are_root_type() {
        let c = Chevalley::new(Rep::new(CaseTag::B, 0).unwrap(), Ring::parse("z12").unwrap());
        let mut rng = SplitMix64::new(2);
        for _ in 0..5 {
            let h = c.eval_word(&c.random_word(8, &mut rng)).unwrap();
            let x = c.root_elt(rng.below(c.case().len()), &c.ring.random(&mut rng));
            let g = c.conjugate(&h, &x).unwrap();
            assert_eq!(root_type_violation(&c, &g.mat), None);
        }
        let w = c.weyl(0, &c.ring.one()).unwrap();
        assert!(root_type_violation(&c, &w.mat).is_some());
    }

    #[test]
    fn nilpotent_products_vanish_far_from_diagonal() {
        let c = Chevalley::new(Rep::new(CaseTag::B, 0).unwrap(), Ring::parse("z4").unwrap());
        let b = Ideal::parse(&c.ring, "(2)").unwrap();
        let mut rng = SplitMix64::new(4);
        for _ in 0..20 {
            let word: Vec<Letter> = (0..6)
                .map(|_| Letter::X { root: rng.below(c.case().len()), value: b.random(&mut rng) })
                .collect();
            let g = c.eval_word(&word).unwrap();
            assert!(nilpotent_vanishing_check(&c, &g.mat, &b).unwrap());
        }
        let x = c.root_elt(0, &c.ring.one());
        assert!(nilpotent_vanishing_check(&c, &x.mat, &b).is_err());
    }

    #[test]
    fn a2_identities_hold() {
        let c = Chevalley::new(Rep::new(CaseTag::C, 0).unwrap(), Ring::parse("z4").unwrap());
        let mut rng = SplitMix64::new(9);
        let tri = triangles(&c);
        assert!(!tri.is_empty());
        let h = c.eval_word(&c.random_word(6, &mut rng)).unwrap();
        let g = c.conjugate(&h, &c.root_elt(3, &c.ring.one())).unwrap();
        for &(l1, mu, nu) in tri.iter().take(6) {
            let chk = a2_check(&c, &g, l1, mu, nu).unwrap();
            assert!(chk.stabilizes_column && chk.commutator_identity);
        }
    }
}
