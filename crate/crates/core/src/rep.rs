//! Matrices of the Chevalley group in the minuscule module.
//!
//! Simple root vectors act by 0/1 matrices on the weight basis. Every other
//! root vector is obtained by conjugating a lower one with `w_{α_j}(1)`, where
//! `j` is the least index with `α - α_j` a positive root. This fixes the signs
//! `c_{λα}` in `x_α(ξ) v^λ = v^λ + c_{λα} ξ v^{λ+α}`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SparseEntry, Vector};
use crate::rings::{Ideal, QuotientMap, Ring, RingElem, RingSpec};
use crate::rng::SplitMix64;
use crate::roots::{CaseTag, EmbeddingCase, RootId};
use crate::weights::{WeightId, WeightModule};

#[derive(Debug)]
pub struct Rep {
    case: Arc<EmbeddingCase>,
    weights: Arc<WeightModule>,
    actions: Vec<Vec<SparseEntry>>,
    /// `signs[λ * |Φ| + α]` is `c_{λα}`, or 0 when `λ + α` is not a weight.
    signs: Vec<i8>,
}

/// A signed permutation of the weight basis: `v^λ -> sign * v^{target}`.
type SignedPerm = Vec<(WeightId, i8)>;

impl Rep {
    pub fn new(tag: CaseTag, l: usize) -> Result<Arc<Rep>> {
        let case = Arc::new(EmbeddingCase::new(tag, l)?);
        Rep::from_case(case)
    }

    pub fn from_case(case: Arc<EmbeddingCase>) -> Result<Arc<Rep>> {
        let weights = Arc::new(WeightModule::new(case.clone())?);
        let n = weights.len();
        let nr = case.len();
        let mut actions: Vec<Option<Vec<SparseEntry>>> = vec![None; nr];
        for i in 0..case.rank {
            for r in [case.simple(i), case.neg(case.simple(i))] {
                let ops = weights
                    .weights()
                    .filter_map(|w| weights.shift(w, r).map(|t| SparseEntry { src: w as u32, dst: t as u32, sign: 1 }))
                    .collect();
                actions[r] = Some(ops);
            }
        }
        let perms: Vec<SignedPerm> = (0..case.rank)
            .map(|i| {
                let (e, f) = (actions[case.simple(i)].as_ref().unwrap(), actions[case.neg(case.simple(i))].as_ref().unwrap());
                weyl_perm(n, e, f)
            })
            .collect::<Result<_>>()?;

        let mut positive: Vec<RootId> = case.roots().filter(|&r| case.is_positive(r)).collect();
        positive.sort_by_key(|&r| case.height(r));
        for &a in &positive {
            if actions[a].is_some() {
                continue;
            }
            let j = (0..case.rank)
                .find(|&j| case.sub(a, case.simple(j)).is_some_and(|b| case.is_positive(b)))
                .ok_or_else(|| Error::Internal("positive root without a lower neighbour".into()))?;
            let b = case.sub(a, case.simple(j)).unwrap();
            for (src, tgt) in [(b, a), (case.neg(b), case.neg(a))] {
                let ops = conjugate_ops(actions[src].as_ref().unwrap(), &perms[j]);
                for e in &ops {
                    if weights.shift(e.src as usize, tgt) != Some(e.dst as usize) {
                        return Err(Error::Internal("conjugated root vector has the wrong weight".into()));
                    }
                }
                actions[tgt] = Some(ops);
            }
        }
        let actions: Vec<Vec<SparseEntry>> = actions.into_iter().map(|a| a.expect("all roots reached")).collect();
        let mut signs = vec![0i8; n * nr];
        for (r, ops) in actions.iter().enumerate() {
            let expected = weights.weights().filter(|&w| weights.shift(w, r).is_some()).count();
            if ops.len() != expected || ops.iter().any(|e| e.sign != 1 && e.sign != -1) {
                return Err(Error::Internal(format!("root vector {} has malformed entries", case.format_root(r))));
            }
            for e in ops {
                signs[e.src as usize * nr + r] = e.sign;
            }
        }
        Ok(Arc::new(Rep { case, weights, actions, signs }))
    }

    pub fn case(&self) -> &Arc<EmbeddingCase> {
        &self.case
    }

    pub fn weights(&self) -> &Arc<WeightModule> {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Nonzero entries of the root vector `e_α`.
    pub fn action(&self, r: RootId) -> &[SparseEntry] {
        &self.actions[r]
    }

    /// `c_{λα}`, or 0 when `λ + α` is not a weight.
    #[inline]
    pub fn sign(&self, w: WeightId, r: RootId) -> i8 {
        self.signs[w * self.case.len() + r]
    }

    /// The Lie bracket constant `N` in `[e_α, e_β] = N e_{α+β}`.
    pub fn structure_constant(&self, a: RootId, b: RootId) -> Option<i32> {
        let s = self.case.add(a, b)?;
        let w = self.actions[s].first()?.src as usize;
        // (e_α e_β - e_β e_α) v^w, read at w + α + β
        let via = |first: RootId, second: RootId| -> i32 {
            match self.weights.shift(w, first) {
                Some(m) if self.weights.shift(m, second).is_some() => {
                    (self.sign(w, first) as i32) * (self.sign(m, second) as i32)
                }
                _ => 0,
            }
        };
        let bracket = via(b, a) - via(a, b);
        Some(bracket * self.sign(w, s) as i32)
    }
}

fn weyl_perm(n: usize, e: &[SparseEntry], f: &[SparseEntry]) -> Result<SignedPerm> {
    // w(1) = x_α(1) x_{-α}(-1) x_α(1), evaluated on each basis vector over Z
    let z = Ring::new(RingSpec::integers())?;
    let (one, minus) = (z.one(), z.from_int(-1));
    let mut out = Vec::with_capacity(n);
    for w in 0..n {
        let mut v = Vector::basis(&z, n, w);
        v.apply_left(e, &one);
        v.apply_left(f, &minus);
        v.apply_left(e, &one);
        let nz: Vec<usize> = (0..n).filter(|&i| !v.is_zero_at(i)).collect();
        match nz.as_slice() {
            [t] if v.raw(0, *t).abs() == 1 => out.push((*t, v.raw(0, *t) as i8)),
            _ => return Err(Error::Internal("w(1) is not a signed permutation".into())),
        }
    }
    Ok(out)
}

fn conjugate_ops(ops: &[SparseEntry], perm: &SignedPerm) -> Vec<SparseEntry> {
    let mut out: Vec<SparseEntry> = ops
        .iter()
        .map(|e| {
            let (s, ss) = perm[e.src as usize];
            let (t, ts) = perm[e.dst as usize];
            SparseEntry { src: s as u32, dst: t as u32, sign: ss * e.sign * ts }
        })
        .collect();
    out.sort_by_key(|e| e.src);
    out
}

/// One generator in a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Letter {
    /// `x_α(ξ)`
    X { root: RootId, value: RingElem },
    /// `w_α(ε) = x_α(ε) x_{-α}(-ε⁻¹) x_α(ε)`
    W { root: RootId, unit: RingElem },
    /// `h_α(ε) = w_α(ε) w_α(1)⁻¹`
    H { root: RootId, unit: RingElem },
}

impl Letter {
    pub fn inverse(&self) -> Letter {
        match self {
            Letter::X { root, value } => Letter::X { root: *root, value: value.neg() },
            Letter::W { root, unit } => Letter::W { root: *root, unit: unit.neg() },
            Letter::H { root, unit } => Letter::H { root: *root, unit: unit.inv().expect("torus letters carry units") },
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        match self {
            Letter::X { value, .. } => value.ring(),
            Letter::W { unit, .. } | Letter::H { unit, .. } => unit.ring(),
        }
    }

    pub fn reduce(&self, q: &QuotientMap) -> Result<Letter> {
        Ok(match self {
            Letter::X { root, value } => Letter::X { root: *root, value: q.apply(value)? },
            Letter::W { root, unit } => Letter::W { root: *root, unit: q.apply(unit)? },
            Letter::H { root, unit } => Letter::H { root: *root, unit: q.apply(unit)? },
        })
    }
}

pub type Word = Vec<Letter>;

pub fn invert_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inverse()).collect()
}

/// A group element with its inverse and, when known, a word producing it.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub mat: Matrix,
    pub inv: Matrix,
    pub word: Option<Word>,
}

impl GroupElement {
    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            mat: self.inv.clone(),
            inv: self.mat.clone(),
            word: self.word.as_ref().map(|w| invert_word(w)),
        }
    }

    pub fn entry(&self, i: WeightId, j: WeightId) -> RingElem {
        self.mat.get(i, j)
    }

    pub fn inv_entry(&self, i: WeightId, j: WeightId) -> RingElem {
        self.inv.get(i, j)
    }

    pub fn is_identity(&self) -> bool {
        self.mat.is_identity()
    }
}

/// The group `G(Φ, R)` in the minuscule module: a representation together with a ring.
#[derive(Clone, Debug)]
pub struct Chevalley {
    pub rep: Arc<Rep>,
    pub ring: Arc<Ring>,
}

impl Chevalley {
    pub fn new(rep: Arc<Rep>, ring: Arc<Ring>) -> Chevalley {
        Chevalley { rep, ring }
    }

    pub fn case(&self) -> &Arc<EmbeddingCase> {
        self.rep.case()
    }

    pub fn weights(&self) -> &Arc<WeightModule> {
        self.rep.weights()
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn with_ring(&self, ring: Arc<Ring>) -> Chevalley {
        Chevalley { rep: self.rep.clone(), ring }
    }

    pub fn identity(&self) -> GroupElement {
        let e = Matrix::identity(&self.ring, self.dim());
        GroupElement { mat: e.clone(), inv: e, word: Some(Vec::new()) }
    }

    fn torus_diag(&self, root: RootId, unit: &RingElem) -> Result<Vec<RingElem>> {
        let inv = unit.inv()?;
        let one = self.ring.one();
        Ok(self
            .weights()
            .weights()
            .map(|w| match self.weights().pairing(w, root) {
                1 => unit.clone(),
                -1 => inv.clone(),
                _ => one.clone(),
            })
            .collect())
    }

    /// `m <- letter * m`.
    pub fn apply_left(&self, m: &mut Matrix, letter: &Letter) -> Result<()> {
        if !Ring::same(letter.ring(), &self.ring) {
            return Err(Error::SpecMismatch);
        }
        match letter {
            Letter::X { root, value } => m.apply_left(self.rep.action(*root), value),
            Letter::W { root, unit } => {
                let inv = unit.inv()?.neg();
                let neg = self.case().neg(*root);
                m.apply_left(self.rep.action(*root), unit);
                m.apply_left(self.rep.action(neg), &inv);
                m.apply_left(self.rep.action(*root), unit);
            }
            Letter::H { root, unit } => m.scale_rows(&self.torus_diag(*root, unit)?),
        }
        Ok(())
    }

    /// `m <- m * letter`.
    pub fn apply_right(&self, m: &mut Matrix, letter: &Letter) -> Result<()> {
        if !Ring::same(letter.ring(), &self.ring) {
            return Err(Error::SpecMismatch);
        }
        match letter {
            Letter::X { root, value } => m.apply_right(self.rep.action(*root), value),
            Letter::W { root, unit } => {
                let inv = unit.inv()?.neg();
                let neg = self.case().neg(*root);
                m.apply_right(self.rep.action(*root), unit);
                m.apply_right(self.rep.action(neg), &inv);
                m.apply_right(self.rep.action(*root), unit);
            }
            Letter::H { root, unit } => m.scale_cols(&self.torus_diag(*root, unit)?),
        }
        Ok(())
    }

    /// `v <- letter * v` for a column vector.
    pub fn apply_to_vector(&self, v: &mut Vector, letter: &Letter) -> Result<()> {
        match letter {
            Letter::X { root, value } => v.apply_left(self.rep.action(*root), value),
            _ => {
                let mut m = Matrix::identity(&self.ring, self.dim());
                self.apply_left(&mut m, letter)?;
                *v = m.mul_vec(v);
            }
        }
        Ok(())
    }

    pub fn eval_word(&self, word: &[Letter]) -> Result<GroupElement> {
        let mut mat = Matrix::identity(&self.ring, self.dim());
        let mut inv = mat.clone();
        for l in word {
            self.apply_right(&mut mat, l)?;
            self.apply_left(&mut inv, &l.inverse())?;
        }
        Ok(GroupElement { mat, inv, word: Some(word.to_vec()) })
    }

    pub fn root_elt(&self, root: RootId, value: &RingElem) -> GroupElement {
        self.eval_word(&[Letter::X { root, value: value.clone() }]).expect("root elements are well defined")
    }

    pub fn weyl(&self, root: RootId, unit: &RingElem) -> Result<GroupElement> {
        if !unit.is_unit() {
            return Err(Error::NonUnit(unit.to_string()));
        }
        self.eval_word(&[Letter::W { root, unit: unit.clone() }])
    }

    pub fn torus(&self, root: RootId, unit: &RingElem) -> Result<GroupElement> {
        if !unit.is_unit() {
            return Err(Error::NonUnit(unit.to_string()));
        }
        self.eval_word(&[Letter::H { root, unit: unit.clone() }])
    }

    /// `z_α(ξ, ζ) = x_α(ζ) x_{-α}(ξ) x_α(-ζ)`.
    pub fn z_gen(&self, root: RootId, xi: &RingElem, zeta: &RingElem) -> GroupElement {
        let neg = self.case().neg(root);
        self.eval_word(&[
            Letter::X { root, value: zeta.clone() },
            Letter::X { root: neg, value: xi.clone() },
            Letter::X { root, value: zeta.neg() },
        ])
        .expect("root elements are well defined")
    }

    /// A group element from a bare matrix; the inverse comes from elimination.
    pub fn from_matrix(&self, m: Matrix) -> Result<GroupElement> {
        if m.n() != self.dim() {
            return Err(Error::Domain(format!("expected a {}x{} matrix", self.dim(), self.dim())));
        }
        let inv = m.inverse()?;
        Ok(GroupElement { mat: m, inv, word: None })
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        let word = match (&a.word, &b.word) {
            (Some(x), Some(y)) => Some(x.iter().chain(y).cloned().collect()),
            _ => None,
        };
        Ok(GroupElement { mat: a.mat.mul(&b.mat)?, inv: b.inv.mul(&a.inv)?, word })
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        a.inverse()
    }

    /// `g * letter`, in place.
    pub fn mul_letter(&self, g: &mut GroupElement, letter: &Letter) -> Result<()> {
        self.apply_right(&mut g.mat, letter)?;
        self.apply_left(&mut g.inv, &letter.inverse())?;
        if let Some(w) = g.word.as_mut() {
            w.push(letter.clone());
        }
        Ok(())
    }

    /// `letter * g`, in place.
    pub fn letter_mul(&self, letter: &Letter, g: &mut GroupElement) -> Result<()> {
        self.apply_left(&mut g.mat, letter)?;
        self.apply_right(&mut g.inv, &letter.inverse())?;
        if let Some(w) = g.word.as_mut() {
            w.insert(0, letter.clone());
        }
        Ok(())
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        let ab = self.mul(a, b)?;
        let ai_bi = self.mul(&self.inverse(a), &self.inverse(b))?;
        self.mul(&ab, &ai_bi)
    }

    /// `[g, x_α(ξ)]`, using sparse updates for the root element.
    pub fn commutator_with_root(&self, g: &GroupElement, root: RootId, value: &RingElem) -> Result<GroupElement> {
        let x = Letter::X { root, value: value.clone() };
        let mut left = g.clone();
        self.mul_letter(&mut left, &x)?;
        let mut right = self.inverse(g);
        self.mul_letter(&mut right, &x.inverse())?;
        self.mul(&left, &right)
    }

    /// `h g h⁻¹`.
    pub fn conjugate(&self, h: &GroupElement, g: &GroupElement) -> Result<GroupElement> {
        self.mul(&self.mul(h, g)?, &self.inverse(h))
    }

    /// `g x_α(ξ) g⁻¹`, using a sparse update for the root element.
    pub fn conjugate_root(&self, g: &GroupElement, root: RootId, value: &RingElem) -> Result<GroupElement> {
        let mut left = g.clone();
        self.mul_letter(&mut left, &Letter::X { root, value: value.clone() })?;
        self.mul(&left, &self.inverse(g))
    }

    pub fn reduce(&self, g: &GroupElement, q: &QuotientMap) -> Result<(Chevalley, GroupElement)> {
        let target = self.with_ring(q.target.clone());
        let word = match &g.word {
            Some(w) => Some(w.iter().map(|l| l.reduce(q)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        let h = GroupElement { mat: g.mat.reduce(q)?, inv: g.inv.reduce(q)?, word };
        Ok((target, h))
    }

    /// Recognises `x_α(ξ)` with `ξ ≠ 0` from its matrix.
    pub fn as_root_element(&self, m: &Matrix) -> Option<(RootId, RingElem)> {
        let n = self.dim();
        let w = self.weights();
        let e = Matrix::identity(&self.ring, n);
        let d = m.sub(&e).ok()?;
        let mut found: Option<(RootId, RingElem)> = None;
        for i in 0..n {
            for j in 0..n {
                if d.entry_is_zero(i, j) {
                    continue;
                }
                let r = w.diff(i, j)?;
                let value = d.get(i, j).scale_sign(self.rep.sign(j, r));
                match &found {
                    None => found = Some((r, value)),
                    Some((r0, v0)) if *r0 == r && *v0 == value => {}
                    _ => return None,
                }
            }
        }
        let (r, v) = found?;
        (self.root_elt(r, &v).mat == *m).then_some((r, v))
    }

    pub fn random_elem(&self, rng: &mut SplitMix64) -> RingElem {
        self.ring.random(rng)
    }

    /// A word of `len` root elements over all of `Φ` with random values.
    pub fn random_word(&self, len: usize, rng: &mut SplitMix64) -> Word {
        let nr = self.case().len();
        (0..len)
            .map(|_| Letter::X { root: rng.below(nr), value: self.ring.random(rng) })
            .collect()
    }

    /// A word of `len` root elements with roots drawn from `roots`.
    pub fn random_word_in(&self, roots: &[RootId], len: usize, rng: &mut SplitMix64) -> Word {
        (0..len)
            .map(|_| Letter::X { root: *rng.pick(roots), value: self.ring.random(rng) })
            .collect()
    }
}

/// Root elements `x_α(ξ)` with the root drawn from one of several pools and
/// the value from the ideal attached to that pool.
#[derive(Clone, Debug)]
pub struct LetterSampler {
    pools: Vec<(Vec<RootId>, Ideal)>,
}

impl LetterSampler {
    pub fn new(pools: Vec<(Vec<RootId>, Ideal)>) -> LetterSampler {
        let pools = pools.into_iter().filter(|(r, i)| !r.is_empty() && !i.is_zero()).collect();
        LetterSampler { pools }
    }

    pub fn is_empty(&self) -> bool {
        self.pools.is_empty()
    }

    pub fn sample(&self, rng: &mut SplitMix64) -> Letter {
        let total: usize = self.pools.iter().map(|(r, _)| r.len()).sum();
        let mut k = rng.below(total);
        for (roots, ideal) in &self.pools {
            if k < roots.len() {
                return Letter::X { root: roots[k], value: ideal.random(rng) };
            }
            k -= roots.len();
        }
        unreachable!()
    }

    pub fn word(&self, len: usize, rng: &mut SplitMix64) -> Word {
        (0..len).map(|_| self.sample(rng)).collect()
    }

    /// All letters with nonzero value, for finite rings of moderate size.
    pub fn enumerate(&self, limit: u64) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        for (roots, ideal) in &self.pools {
            let values: Vec<RingElem> = ideal.elements(limit)?.into_iter().filter(|x| !x.is_zero()).collect();
            for &r in roots {
                for v in &values {
                    out.push(Letter::X { root: r, value: v.clone() });
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chev(tag: CaseTag, l: usize, ring: &str) -> Chevalley {
        Chevalley::new(Rep::new(tag, l).unwrap(), Ring::parse(ring).unwrap())
    }

    #[test]
    fn simple_roots_act_by_plus_one() {
        let g = chev(CaseTag::C, 0, "z8");
        for i in 0..7 {
            for r in [g.case().simple(i), g.case().neg(g.case().simple(i))] {
                assert!(g.rep.action(r).iter().all(|e| e.sign == 1));
            }
        }
    }

    #[test]
    fn weyl_letter_matches_its_definition() {
        let g = chev(CaseTag::B, 0, "z9");
        let eps = g.ring.from_int(2);
        let inv = eps.inv().unwrap();
        for r in [0, 17, 40, 71] {
            let w = g.weyl(r, &eps).unwrap();
            let neg = g.case().neg(r);
            let by_def = g
                .eval_word(&[
                    Letter::X { root: r, value: eps.clone() },
                    Letter::X { root: neg, value: inv.neg() },
                    Letter::X { root: r, value: eps.clone() },
                ])
                .unwrap();
            assert_eq!(w.mat, by_def.mat);
        }
    }

    #[test]
    fn torus_letter_is_w_eps_times_w_one_inverse() {
        let g = chev(CaseTag::A, 5, "z9");
        let eps = g.ring.from_int(4);
        for r in g.case().roots() {
            let h = g.torus(r, &eps).unwrap();
            let w1 = g.weyl(r, &g.ring.one()).unwrap();
            let prod = g.mul(&g.weyl(r, &eps).unwrap(), &g.inverse(&w1)).unwrap();
            assert_eq!(h.mat, prod.mat);
        }
    }

    #[test]
    fn words_and_inverses() {
        let g = chev(CaseTag::C, 0, "z4xf2t2");
        let mut rng = SplitMix64::new(1);
        let w = g.random_word(12, &mut rng);
        let x = g.eval_word(&w).unwrap();
        assert!(x.mat.mul(&x.inv).unwrap().is_identity());
        let y = g.eval_word(&invert_word(&w)).unwrap();
        assert_eq!(y.mat, x.inv);
    }

    #[test]
    fn root_elements_are_recognised() {
        let g = chev(CaseTag::B, 0, "z8");
        let v = g.ring.from_int(6);
        for r in g.case().roots() {
            let x = g.root_elt(r, &v);
            assert_eq!(g.as_root_element(&x.mat), Some((r, v.clone())));
        }
        let two = g.mul(&g.root_elt(0, &v), &g.root_elt(5, &v)).unwrap();
        assert_eq!(g.as_root_element(&two.mat), None);
    }
}
