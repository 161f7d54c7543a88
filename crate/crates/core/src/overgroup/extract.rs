//! Extraction of elementary root elements from an overgroup.
//!
//! Every procedure records a [`Trace`]: a starting element of the overgroup
//! and a list of operations that keep us inside it (commutators and conjugates
//! with `x_α(1)`, `α ∈ Δ`, multiplication by generators of the elementary
//! group already known to lie in it, and factors certified by normality).
//! Replaying the trace must land exactly on the witness `x_α(ξ)`.

use serde_json::{json, Value};

use super::ideals::{congruent_to_identity, root_type_violation};
use super::parabolic::{self, levi_split, unipotent_coords, Side};
use super::{conjugated_border, in_g_sigma, row_in_ideal, SigmaPair};
use crate::error::{Error, Result};
use crate::matrix::Vector;
use crate::rep::{Chevalley, GroupElement, Letter};
use crate::rings::{Ideal, RingElem};
use crate::roots::RootId;
use crate::weights::WeightId;

#[derive(Clone, Debug)]
pub enum Step {
    /// `h <- [h, x_α(1)]`
    Commute { root: RootId },
    /// `h <- h x_α(ξ)`, a generator of the elementary group
    Strip { root: RootId, value: RingElem },
    /// `h <- h x_α(1) h⁻¹`
    Conjugate { root: RootId },
    /// `h <- h⁻¹ x_α(1) h`
    ConjugateInverse { root: RootId },
    /// `h <- f h`
    LeftCertified { factor: GroupElement, reason: String },
    /// `h <- h f`
    RightCertified { factor: GroupElement, reason: String },
}

impl Step {
    fn apply(&self, chev: &Chevalley, h: &GroupElement) -> Result<GroupElement> {
        let one = chev.ring.one();
        let mut out = match self {
            Step::Commute { root } => chev.commutator_with_root(h, *root, &one)?,
            Step::Strip { root, value } => {
                let mut g = h.clone();
                chev.mul_letter(&mut g, &Letter::X { root: *root, value: value.clone() })?;
                g
            }
            Step::Conjugate { root } => chev.conjugate_root(h, *root, &one)?,
            Step::ConjugateInverse { root } => chev.conjugate_root(&h.inverse(), *root, &one)?,
            Step::LeftCertified { factor, .. } => chev.mul(factor, h)?,
            Step::RightCertified { factor, .. } => chev.mul(h, factor)?,
        };
        // words double under commutators; the trace is the record
        out.word = None;
        Ok(out)
    }

    pub fn to_json(&self, chev: &Chevalley) -> Value {
        let case = chev.case();
        match self {
            Step::Commute { root } => json!({"op": "commute", "root": case.format_root(*root)}),
            Step::Strip { root, value } => {
                json!({"op": "strip", "root": case.format_root(*root), "value": value.to_json()})
            }
            Step::Conjugate { root } => json!({"op": "conjugate", "root": case.format_root(*root)}),
            Step::ConjugateInverse { root } => json!({"op": "conjugate_inverse", "root": case.format_root(*root)}),
            Step::LeftCertified { reason, .. } => json!({"op": "left_certified", "reason": reason}),
            Step::RightCertified { reason, .. } => json!({"op": "right_certified", "reason": reason}),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub start: GroupElement,
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn replay(&self, chev: &Chevalley) -> Result<GroupElement> {
        let mut h = self.start.clone();
        for s in &self.steps {
            h = s.apply(chev, &h)?;
        }
        Ok(h)
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub root: RootId,
    pub value: RingElem,
    pub trace: Trace,
}

impl Witness {
    /// Replays the trace and compares with `x_root(value)`.
    pub fn verify(&self, chev: &Chevalley) -> Result<bool> {
        let end = self.trace.replay(chev)?;
        Ok(end.mat == chev.root_elt(self.root, &self.value).mat)
    }

    pub fn level(&self, chev: &Chevalley) -> i32 {
        chev.case().level(self.root)
    }

    pub fn to_json(&self, chev: &Chevalley) -> Value {
        json!({
            "root": chev.case().format_root(self.root),
            "level": self.level(chev),
            "value": self.value.to_json(),
            "steps": self.trace.steps.iter().map(|s| s.to_json(chev)).collect::<Vec<_>>(),
        })
    }
}

/// The running element together with its trace.
struct Tracker<'a> {
    chev: &'a Chevalley,
    trace: Trace,
    h: GroupElement,
}

impl<'a> Tracker<'a> {
    fn new(chev: &'a Chevalley, g: &GroupElement) -> Tracker<'a> {
        let mut start = g.clone();
        start.word = None;
        Tracker { chev, trace: Trace { start: start.clone(), steps: Vec::new() }, h: start }
    }

    fn push(&mut self, step: Step) -> Result<()> {
        self.h = step.apply(self.chev, &self.h)?;
        self.trace.steps.push(step);
        Ok(())
    }

    fn finish(self, root: RootId, value: RingElem) -> Witness {
        Witness { root, value, trace: self.trace }
    }
}

fn one_root_loop_bound(chev: &Chevalley) -> usize {
    let case = chev.case();
    case.omega_plus().len() * (case.height(case.max_root()) as usize + 1) + 1
}

/// Raise the factors of an element of `U` (or `U⁻`) until a single root element
/// at the extreme root `±δ` remains. Factors with values in `target` are stripped.
fn unipotent_loop(mut t: Tracker<'_>, target: &Ideal, side: Side) -> Result<Witness> {
    let chev = t.chev;
    let case = chev.case().clone();
    let l0 = chev.weights().highest();
    let (extreme, raise): (RootId, Vec<RootId>) = match side {
        Side::Plus => (case.max_root(), case.delta_simple()),
        Side::Minus => (case.neg(case.max_root()), case.delta_simple().iter().map(|&a| case.neg(a)).collect()),
    };
    for _ in 0..one_root_loop_bound(chev) {
        let p = parabolic::profile(chev.weights(), &t.h.mat, l0);
        if !(match side {
            Side::Plus => p.in_unipotent,
            Side::Minus => p.in_unipotent_minus,
        }) {
            return Err(Error::Internal("element left the unipotent radical".into()));
        }
        let coords = unipotent_coords(chev, &t.h.mat, l0, side);
        let mut remaining = Vec::new();
        for (r, v) in coords {
            if target.contains(&v)? {
                t.push(Step::Strip { root: r, value: v.neg() })?;
            } else {
                remaining.push((r, v));
            }
        }
        match remaining.as_slice() {
            [] => return Err(Error::Internal("the factor outside the target ideal vanished".into())),
            [(r, v)] if *r == extreme => {
                let (r, v) = (*r, v.clone());
                return Ok(t.finish(r, v));
            }
            _ => {}
        }
        let beta = remaining.iter().map(|(r, _)| *r).find(|&r| r != extreme).expect("more than the extreme root");
        let am = raise
            .iter()
            .copied()
            .find(|&a| case.add(beta, a).is_some())
            .ok_or_else(|| Error::Internal(format!("no simple root raises {}", case.format_root(beta))))?;
        t.push(Step::Commute { root: am })?;
    }
    Err(Error::Internal("raising loop did not terminate".into()))
}

/// Extraction from `H ∩ P` (plus side) or `H ∩ P⁻` (minus side): if the unipotent
/// part of `g` has a coordinate outside `target`, returns a witness `x_{±δ}(ξ)`
/// with `ξ ∉ target`. Returns `None` when `g` has no such coordinate.
pub fn extract_from_p(chev: &Chevalley, g: &GroupElement, target: &Ideal, side: Side) -> Result<Option<Witness>> {
    let case = chev.case();
    let l0 = chev.weights().highest();
    let (u, l) = levi_split(chev, g, l0, side)?;
    let coords = unipotent_coords(chev, &u.mat, l0, side);
    let mut bad = None;
    for (r, v) in &coords {
        if !target.contains(v)? {
            bad = Some(*r);
            break;
        }
    }
    let Some(bad) = bad else { return Ok(None) };
    let mut t = Tracker::new(chev, g);
    if !l.is_identity() {
        let alpha = case.partner_root(bad)?;
        let one = chev.ring.one();
        let inner = chev.commutator_with_root(&l.inverse(), alpha, &one)?;
        let mut m = chev.conjugate(g, &inner)?;
        m.word = None;
        t.push(Step::Commute { root: alpha })?;
        t.push(Step::LeftCertified {
            factor: m,
            reason: "g [l⁻¹, x_α(1)] g⁻¹ where [l⁻¹, x_α(1)] lies in E(Δ, R)".into(),
        })?;
    }
    unipotent_loop(t, target, side).map(Some)
}

fn border_has_entry_outside(v: &Vector, ideal: &Ideal) -> bool {
    (1..v.len()).any(|l| !v.in_ideal_at(l, ideal))
}

/// `x_γ(1)` conjugated by `g` leaves the row of `λ0` outside `e_λ0 + I⁺`.
fn moves_row(chev: &Chevalley, g: &GroupElement, gamma: RootId, plus: &Ideal) -> bool {
    border_has_entry_outside(&conjugated_border(chev, g, gamma).0, plus)
}

fn leaves_g_sigma(chev: &Chevalley, g: &GroupElement, gamma: RootId, sigma: &SigmaPair) -> bool {
    let (row, col) = conjugated_border(chev, g, gamma);
    border_has_entry_outside(&row, &sigma.plus) || border_has_entry_outside(&col, &sigma.minus)
}

/// Extraction from `H ∩ P_λ1` for `λ1` in the first component of the weight graph.
///
/// `g` must be of root type and lie in `P_λ1`. Returns `None` when `g` already
/// lies in `G(Φ, Δ, R, (I⁺, R))`; otherwise a witness `x_δ(ξ)` with `ξ ∉ I⁺`,
/// or `x_β(ξ)` with `β ∈ Ω⁻`, `ξ ∉ I⁻`.
pub fn extract_from_p_lambda(
    chev: &Chevalley,
    g: &GroupElement,
    lambda1: WeightId,
    sigma: &SigmaPair,
) -> Result<Option<Witness>> {
    if let Some(why) = root_type_violation(chev, &g.mat) {
        return Err(Error::Domain(format!("element is not of root type: {why}")));
    }
    extract_from_p_lambda_traced(Tracker::new(chev, g), lambda1, sigma)
}

fn extract_from_p_lambda_traced(mut t: Tracker<'_>, lambda1: WeightId, sigma: &SigmaPair) -> Result<Option<Witness>> {
    let chev = t.chev;
    let w = chev.weights().clone();
    let case = chev.case().clone();
    if lambda1 == w.highest() || w.component_of(lambda1) != 1 {
        return Err(Error::Domain(format!("weight {} is not at distance one from λ0", w.format_weight(lambda1))));
    }
    if !parabolic::in_p(&t.h.mat, lambda1) {
        return Err(Error::Domain(format!("element is not in P at weight {}", w.format_weight(lambda1))));
    }
    if row_in_ideal(&t.h.mat, &sigma.plus) {
        return Ok(None);
    }
    let split = w.sigma_split(lambda1)?;
    let find_mover = |h: &GroupElement| split.delta_cap_prime.iter().copied().find(|&g| moves_row(chev, h, g, &sigma.plus));

    let gamma1 = find_mover(&t.h).ok_or_else(|| Error::Internal("no root of (Δ ∩ Δ_λ)' moves row λ0".into()))?;
    t.push(Step::Conjugate { root: gamma1 })?;
    let (_, l1) = levi_split(chev, &t.h, lambda1, Side::Plus)?;
    if !in_g_sigma(&l1, sigma) {
        let l1_inv = l1.inverse();
        let gamma2 = split
            .zero
            .iter()
            .copied()
            .find(|&g| leaves_g_sigma(chev, &l1_inv, g, sigma))
            .ok_or_else(|| Error::Internal("no root of Σ⁰ moves the Levi part out of G_σ".into()))?;
        t.push(Step::ConjugateInverse { root: gamma2 })?;
    } else {
        let gamma2 = find_mover(&t.h).ok_or_else(|| Error::Internal("second conjugation found no root".into()))?;
        t.push(Step::Conjugate { root: gamma2 })?;
        let (_, l2) = levi_split(chev, &t.h, lambda1, Side::Plus)?;
        if !in_g_sigma(&l2, sigma) {
            return Err(Error::Internal("Levi part of the second conjugate left G_σ".into()));
        }
        t.push(Step::RightCertified {
            factor: l2.inverse(),
            reason: "Levi part of a conjugate of a root element by an element of G_σ lies in E(Φ, Δ, R, σ)".into(),
        })?;
    }
    let p = parabolic::profile(&w, &t.h.mat, lambda1);
    if !p.in_unipotent || in_g_sigma(&t.h, sigma) {
        return Err(Error::Internal("expected an element of U_λ outside G_σ".into()));
    }

    let beta0 = *split.minus.first().ok_or_else(|| Error::Internal("Σ⁻ is empty".into()))?;
    let coords = unipotent_coords(chev, &t.h.mat, lambda1, Side::Plus);
    let mut bad_plus = None;
    for (r, v) in &coords {
        if case.level(*r) == 1 && !sigma.plus.contains(v)? {
            bad_plus = Some(*r);
            break;
        }
    }
    match bad_plus {
        Some(b1) => {
            let gamma = split
                .delta_cap
                .iter()
                .copied()
                .find(|&g| case.add(b1, g).is_some() && case.add(beta0, g).is_none())
                .ok_or_else(|| Error::Internal("no root of Δ ∩ Δ_λ separates the factors".into()))?;
            t.push(Step::Commute { root: gamma })?;
            for (r, v) in unipotent_coords(chev, &t.h.mat, lambda1, Side::Plus) {
                if case.level(r) == 0 {
                    t.push(Step::Strip { root: r, value: v.neg() })?;
                }
            }
            unipotent_loop(t, &sigma.plus, Side::Plus).map(Some)
        }
        None => {
            for (r, v) in &coords {
                if *r != beta0 {
                    t.push(Step::Strip { root: *r, value: v.neg() })?;
                }
            }
            let xi0 = coords
                .iter()
                .find(|(r, _)| *r == beta0)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::Internal("no factor at λ1 - λ0".into()))?;
            if sigma.minus.contains(&xi0)? {
                return Err(Error::Internal("remaining factor lies in I⁻".into()));
            }
            Ok(Some(t.finish(beta0, xi0)))
        }
    }
}

/// First stage of extraction from `H ∩ G(Φ, R, 𝔅)` with `𝔅² = 0`: from `g ∉ P⁻`
/// produce `h = g x_α(1) g⁻¹ ∈ P_λ1 \ P⁻`.
#[derive(Clone, Debug)]
pub struct NilpotentStep {
    pub lambda1: WeightId,
    pub alpha: RootId,
    pub h: GroupElement,
}

pub fn nilpotent_step(chev: &Chevalley, g: &GroupElement, b: &Ideal) -> Result<NilpotentStep> {
    if !b.product(b)?.is_zero() {
        return Err(Error::Domain(format!("the ideal {b} does not square to zero")));
    }
    if !congruent_to_identity(&g.mat, b) {
        return Err(Error::Domain(format!("element is not congruent to e modulo {b}")));
    }
    let n = chev.dim();
    let one = chev.ring.one();
    let w = chev.weights();
    let l0 = w.highest();
    let lambda1 = (0..n)
        .find(|&l| l != l0 && !g.mat.entry_is_zero(l0, l))
        .ok_or_else(|| Error::Domain("element lies in the opposite parabolic P⁻".into()))?;
    if w.component_of(lambda1) != 1 {
        return Err(Error::Internal("first nonzero entry of row λ0 is not at distance one".into()));
    }
    let nu = w
        .neighbor_in_component(lambda1, None)
        .ok_or_else(|| Error::Internal("no neighbour in the first component".into()))?;
    // with x_α raising weights, the root fixing the column line is λ1 - ν
    let alpha = w.diff(lambda1, nu).filter(|&a| chev.case().in_delta(a)).ok_or_else(|| {
        Error::Internal("neighbour difference is not a root of Δ".into())
    })?;
    // x_α(1) must fix the line of column λ1 of g⁻¹
    let col = g.inv.col_vector(lambda1);
    let mut moved = col.clone();
    moved.apply_left(chev.rep.action(alpha), &one);
    let pivot = col.get(lambda1);
    if !pivot.is_unit() {
        return Err(Error::Internal("diagonal entry of g⁻¹ is not a unit".into()));
    }
    let scale = &moved.get(lambda1) * &pivot.inv()?;
    if (0..n).any(|i| moved.get(i) != &col.get(i) * &scale) {
        return Err(Error::Internal("x_α(1) does not fix the line of column λ1 of g⁻¹".into()));
    }
    let mut h = chev.conjugate_root(g, alpha, &one)?;
    h.word = None;
    if !parabolic::in_p(&h.mat, lambda1) || parabolic::in_p_minus(&h.mat, l0) || h.mat.entry_is_zero(l0, nu) {
        return Err(Error::Internal("conjugate does not lie in P_λ1 outside P⁻".into()));
    }
    Ok(NilpotentStep { lambda1, alpha, h })
}

/// Full extraction from `H ∩ G(Φ, R, 𝔅) \ P⁻`, chaining the first stage into
/// extraction from `P_λ1` with target pair `sigma`. `None` when the conjugate
/// already lies in `G(Φ, Δ, R, (I⁺, R))`, which cannot happen for `I⁺ = 0`.
pub fn extract_from_nilpotent(chev: &Chevalley, g: &GroupElement, b: &Ideal, sigma: &SigmaPair) -> Result<Option<Witness>> {
    let step = nilpotent_step(chev, g, b)?;
    let mut t = Tracker::new(chev, g);
    t.push(Step::Conjugate { root: step.alpha })?;
    extract_from_p_lambda_traced(t, step.lambda1, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::Rep;
    use crate::rings::Ring;
    use crate::rng::SplitMix64;
    use crate::roots::CaseTag;

    fn chev(tag: CaseTag, l: usize, ring: &str) -> Chevalley {
        Chevalley::new(Rep::new(tag, l).unwrap(), Ring::parse(ring).unwrap())
    }

    #[test]
    fn from_p_reaches_max_root() {
        let c = chev(CaseTag::B, 0, "z4");
        let case = c.case().clone();
        let mut rng = SplitMix64::new(5);
        let target = Ideal::parse(&c.ring, "(2)").unwrap();
        let beta = case.omega_plus()[0];
        let mut word = c.random_word_in(case.delta(), 5, &mut rng);
        word.push(Letter::X { root: beta, value: c.ring.one() });
        let g = c.eval_word(&word).unwrap();
        let wit = extract_from_p(&c, &g, &target, Side::Plus).unwrap().unwrap();
        assert_eq!(wit.root, case.max_root());
        assert!(!target.contains(&wit.value).unwrap());
        assert!(wit.verify(&c).unwrap());
    }

    #[test]
    fn from_p_minus() {
        let c = chev(CaseTag::A, 5, "z12");
        let case = c.case().clone();
        let target = Ideal::parse(&c.ring, "(3)").unwrap();
        let g = c.root_elt(case.omega_minus()[2], &c.ring.from_int(2));
        let wit = extract_from_p(&c, &g, &target, Side::Minus).unwrap().unwrap();
        assert_eq!(wit.root, case.neg(case.max_root()));
        assert!(wit.verify(&c).unwrap());
        let inside = c.root_elt(case.omega_minus()[2], &c.ring.from_int(3));
        assert!(extract_from_p(&c, &inside, &target, Side::Minus).unwrap().is_none());
    }

    #[test]
    fn nilpotent_rejects_lower_unipotent() {
        let c = chev(CaseTag::C, 0, "f2t2");
        let case = c.case().clone();
        let b = Ideal::parse(&c.ring, "(t)").unwrap();
        let t = crate::rings::parse_elem(&c.ring, "t").unwrap();
        let lower = c.root_elt(case.omega_minus()[0], &t);
        assert!(matches!(nilpotent_step(&c, &lower, &b), Err(Error::Domain(_))));
        let upper = c.root_elt(case.omega_plus()[4], &t);
        let zero = SigmaPair::zero(&c.ring);
        let wit = extract_from_nilpotent(&c, &upper, &b, &zero).unwrap().expect("a witness for the zero pair");
        assert!(wit.verify(&c).unwrap());
        assert!(!wit.value.is_zero());
    }
}
