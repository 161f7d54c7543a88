//! Overgroups of `E(Δ, R)`: levels, membership tests and extraction of root elements.
//!
//! A pair `σ = (I⁺, I⁻)` of ideals defines the elementary group
//! `E(Φ, Δ, R, σ)`, generated by `x_α(ξ)` with `α ∈ Δ, ξ ∈ R`,
//! `α ∈ Ω⁺, ξ ∈ I⁺` and `α ∈ Ω⁻, ξ ∈ I⁻`, and the group `G_σ` of matrices
//! whose row `λ0` is `e_λ0` modulo `I⁺` and whose column `λ0` is `e_λ0` modulo `I⁻`.

pub mod extract;
pub mod ideals;
pub mod level;
pub mod parabolic;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Vector};
use crate::rep::{Chevalley, GroupElement, Letter, LetterSampler};
use crate::rings::{Ideal, QuotientMap, Ring, RingElem};
use crate::roots::{EmbeddingType, RootId};

/// Largest ring that is enumerated element by element.
pub const ENUMERATION_LIMIT: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaPair {
    pub plus: Ideal,
    pub minus: Ideal,
}

impl SigmaPair {
    pub fn new(plus: Ideal, minus: Ideal) -> Result<SigmaPair> {
        plus.check_ring(minus.ring())?;
        Ok(SigmaPair { plus, minus })
    }

    pub fn zero(ring: &Arc<Ring>) -> SigmaPair {
        SigmaPair { plus: Ideal::zero(ring), minus: Ideal::zero(ring) }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.plus.ring()
    }

    /// Parses `"(2),(0)"`, optionally wrapped in one more pair of parentheses.
    pub fn parse(ring: &Arc<Ring>, text: &str) -> Result<SigmaPair> {
        let mut t = text.trim();
        loop {
            let parts = split_pair(t);
            if parts.len() == 2 {
                return SigmaPair::new(Ideal::parse(ring, parts[0])?, Ideal::parse(ring, parts[1])?);
            }
            match t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
                Some(inner) if parts.len() == 1 => t = inner.trim(),
                _ => return Err(Error::Parse(format!("expected a pair of ideals, got '{text}'"))),
            }
        }
    }

    pub fn contains(&self, other: &SigmaPair) -> Result<bool> {
        Ok(self.plus.contains_ideal(&other.plus)? && self.minus.contains_ideal(&other.minus)?)
    }

    pub fn sum(&self, other: &SigmaPair) -> Result<SigmaPair> {
        SigmaPair::new(self.plus.sum(&other.plus)?, self.minus.sum(&other.minus)?)
    }

    pub fn reduce(&self, q: &QuotientMap) -> Result<SigmaPair> {
        SigmaPair::new(q.apply_ideal(&self.plus)?, q.apply_ideal(&self.minus)?)
    }

    /// The generators of `E(Φ, Δ, R, σ)` as a sampler over root pools.
    pub fn sampler(&self, chev: &Chevalley) -> LetterSampler {
        let case = chev.case();
        LetterSampler::new(vec![
            (case.delta().to_vec(), Ideal::unit(&chev.ring)),
            (case.omega_plus().to_vec(), self.plus.clone()),
            (case.omega_minus().to_vec(), self.minus.clone()),
        ])
    }

    /// The ideal attached to a root: `R` on `Δ`, `I⁺` on `Ω⁺`, `I⁻` on `Ω⁻`.
    pub fn ideal_for(&self, chev: &Chevalley, root: RootId) -> Ideal {
        match chev.case().level(root) {
            1 => self.plus.clone(),
            -1 => self.minus.clone(),
            _ => Ideal::unit(&chev.ring),
        }
    }
}

fn split_pair(t: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in t.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&t[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&t[start..]);
    out
}

impl fmt::Display for SigmaPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.plus, self.minus)
    }
}

impl Serialize for SigmaPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `g ∈ G_σ`, checked on row and column `λ0` of a matrix.
pub fn in_g_sigma_matrix(m: &Matrix, sigma: &SigmaPair) -> bool {
    let l0 = 0;
    (1..m.n()).all(|l| m.entry_in(l0, l, &sigma.plus) && m.entry_in(l, l0, &sigma.minus))
}

/// `g ∈ G_σ`.
pub fn in_g_sigma(g: &GroupElement, sigma: &SigmaPair) -> bool {
    in_g_sigma_matrix(&g.mat, sigma)
}

/// Row `λ0` of `g` lies in `e_λ0 + I⁺`, i.e. `g ∈ G(Φ, Δ, R, (I⁺, R))`.
pub fn row_in_ideal(m: &Matrix, plus: &Ideal) -> bool {
    (1..m.n()).all(|l| m.entry_in(0, l, plus))
}

/// The normalizer test: `G_σ` for the first type, the four conditions on
/// `g` and `g⁻¹` for the second type.
pub fn in_normalizer(chev: &Chevalley, g: &GroupElement, sigma: &SigmaPair) -> Result<bool> {
    let w = chev.weights();
    match w.kind() {
        EmbeddingType::First => Ok(in_g_sigma(g, sigma)),
        EmbeddingType::Second => {
            let low = w.lowest().ok_or_else(|| Error::Internal("second type without -λ0".into()))?;
            let l0 = w.highest();
            for l in w.weights() {
                if l == l0 || l == low {
                    continue;
                }
                if !g.mat.entry_in(l0, l, &sigma.plus) || !g.inv.entry_in(l, l0, &sigma.minus) {
                    return Ok(false);
                }
            }
            let corner = Ideal::principal(&g.entry(l0, low));
            let inv_corner = Ideal::principal(&g.inv_entry(low, l0));
            Ok(sigma.plus.contains_ideal(&corner.product(&sigma.minus)?)?
                && sigma.minus.contains_ideal(&inv_corner.product(&sigma.plus)?)?)
        }
    }
}

/// Row and column `λ0` of `g x_α(1) g⁻¹`; off the diagonal these agree with `g e_α g⁻¹`.
pub(crate) fn conjugated_border(chev: &Chevalley, g: &GroupElement, root: RootId) -> (Vector, Vector) {
    let ops = chev.rep.action(root);
    let one = chev.ring.one();
    let mut row = g.mat.row_vector(0);
    row.apply_right(ops, &one);
    let mut col = g.inv.col_vector(0);
    col.apply_left(ops, &one);
    (g.inv.vec_mul(&row), g.mat.mul_vec(&col))
}

/// Complete check that `g E(Φ, Δ, R, σ) g⁻¹ ⊆ G_σ`, generator by generator.
/// Finite rings enumerate every `x_α(ξ)`; over Z the ideal generators suffice.
pub fn transporter_check(chev: &Chevalley, g: &GroupElement, sigma: &SigmaPair) -> Result<bool> {
    let case = chev.case();
    let n = chev.dim();
    let pools: Vec<(Vec<RootId>, Ideal)> = vec![
        (case.delta().to_vec(), Ideal::unit(&chev.ring)),
        (case.omega_plus().to_vec(), sigma.plus.clone()),
        (case.omega_minus().to_vec(), sigma.minus.clone()),
    ];
    for (roots, ideal) in pools {
        let values: Vec<RingElem> = match chev.ring.size() {
            Some(s) if s <= ENUMERATION_LIMIT => ideal.elements(ENUMERATION_LIMIT)?,
            _ => vec![ideal.generator()],
        };
        let values: Vec<RingElem> = values.into_iter().filter(|v| !v.is_zero()).collect();
        if values.is_empty() {
            continue;
        }
        for &r in &roots {
            let (row, col) = conjugated_border(chev, g, r);
            for v in &values {
                for l in 1..n {
                    if !sigma.plus.contains(&(v * &row.get(l)))? || !sigma.minus.contains(&(v * &col.get(l)))? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Conjugates `g x_α(ξ) g⁻¹` for every generator, as letters (used by sampling).
pub fn conjugate_letter(chev: &Chevalley, g: &GroupElement, letter: &Letter) -> Result<GroupElement> {
    match letter {
        Letter::X { root, value } => chev.conjugate_root(g, *root, value),
        _ => chev.conjugate(g, &chev.eval_word(std::slice::from_ref(letter))?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::Rep;
    use crate::roots::CaseTag;

    #[test]
    fn parse_sigma() {
        let r = Ring::parse("z4").unwrap();
        let s = SigmaPair::parse(&r, "(2),(0)").unwrap();
        assert_eq!(s, SigmaPair::parse(&r, "((2),(0))").unwrap());
        assert!(s.minus.is_zero());
        assert_eq!(s.to_string(), "((2),(0))");
    }

    #[test]
    fn root_elements_in_g_sigma() {
        let chev = Chevalley::new(Rep::new(CaseTag::B, 0).unwrap(), Ring::parse("z4").unwrap());
        let sigma = SigmaPair::parse(&chev.ring, "(2),(0)").unwrap();
        let beta = chev.case().omega_plus()[3];
        assert!(in_g_sigma(&chev.root_elt(beta, &chev.ring.from_int(2)), &sigma));
        assert!(!in_g_sigma(&chev.root_elt(beta, &chev.ring.from_int(1)), &sigma));
        let minus = chev.case().omega_minus()[0];
        assert!(!in_g_sigma(&chev.root_elt(minus, &chev.ring.from_int(2)), &sigma));
    }
}
