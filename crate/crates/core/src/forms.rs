//! The invariant bilinear form `h` and a quadratic equation `q` of the highest
//! weight orbit, for the embeddings of the second type (`-λ0` is a weight).
//!
//! `h(u, v) = Σ ε_λ u_λ v_{-λ}`. The quadratic form starts from a square
//! equation on `Ω(λ0, μ1)` and is pushed along a shortest path from `μ1` to
//! `-λ0` by the substitution `q'(v) = q(x_γ(1) v)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rep::Rep;
use crate::rings::Ring;
use crate::rng::SplitMix64;
use crate::roots::{EmbeddingType, RootId};
use crate::weights::WeightId;

fn require_second_type(rep: &Rep) -> Result<()> {
    match rep.weights().kind() {
        EmbeddingType::Second => Ok(()),
        EmbeddingType::First => Err(Error::Unsupported("not applicable: first type".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BilinearSigns {
    pub signs: Vec<i8>,
    pub partner: Vec<WeightId>,
}

impl BilinearSigns {
    pub fn eval(&self, u: &[i128], v: &[i128]) -> i128 {
        (0..u.len()).map(|l| self.signs[l] as i128 * u[l] * v[self.partner[l]]).sum()
    }

    /// Gram matrix: `h(u, v) = uᵀ H v`.
    pub fn matrix(&self, ring: &Arc<Ring>) -> Matrix {
        let n = self.signs.len();
        let mut m = Matrix::zeros(ring, n);
        for l in 0..n {
            m.set(l, self.partner[l], &ring.from_int(self.signs[l] as i64)).expect("same ring");
        }
        m
    }

    /// The vector `u` with `h(u, ·) = w`.
    pub fn transfer(&self, w: &[i128]) -> Vec<i128> {
        (0..w.len()).map(|l| self.signs[l] as i128 * w[self.partner[l]]).collect()
    }
}

/// `ε_λ0 = 1`; each simple root flips the sign along its edge. Any conflict is
/// reported as an internal error.
pub fn build_bilinear(rep: &Rep) -> Result<BilinearSigns> {
    require_second_type(rep)?;
    let w = rep.weights();
    let n = w.len();
    let partner: Vec<WeightId> = (0..n)
        .map(|l| w.negation(l).ok_or_else(|| Error::Internal("weight without negative".into())))
        .collect::<Result<_>>()?;
    let case = rep.case();
    let mut signs = vec![0i8; n];
    signs[w.highest()] = 1;
    let mut queue = std::collections::VecDeque::from([w.highest()]);
    while let Some(l) = queue.pop_front() {
        for &a in case.simple_roots() {
            for r in [a, case.neg(a)] {
                if let Some(m) = w.shift(l, r) {
                    // h(E u, v) + h(u, E v) = 0 on basis vectors
                    let s = -(signs[l] as i32) * rep.sign(l, r) as i32 * rep.sign(partner[m], r) as i32;
                    let s = s as i8;
                    if signs[m] == 0 {
                        signs[m] = s;
                        queue.push_back(m);
                    } else if signs[m] != s {
                        return Err(Error::Internal("sign propagation conflict".into()));
                    }
                }
            }
        }
    }
    Ok(BilinearSigns { signs, partner })
}

/// First root `α` with `x_α(1)ᵀ H x_α(1) ≠ H`, over the given ring.
pub fn bilinear_violation(rep: &Rep, h: &BilinearSigns, ring: &Arc<Ring>) -> Result<Option<RootId>> {
    let gram = h.matrix(ring);
    let one = ring.one();
    for r in rep.case().roots() {
        let mut x = Matrix::identity(ring, rep.dim());
        x.apply_left(rep.action(r), &one);
        if x.transpose().mul(&gram)?.mul(&x)? != gram {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Coefficients over unordered pairs `(a, b)`, `a <= b`; diagonal keys only
/// appear if a construction produced them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuadraticForm {
    pub coeffs: BTreeMap<(WeightId, WeightId), i64>,
}

fn key(a: WeightId, b: WeightId) -> (WeightId, WeightId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl QuadraticForm {
    pub fn get(&self, a: WeightId, b: WeightId) -> i64 {
        self.coeffs.get(&key(a, b)).copied().unwrap_or(0)
    }

    fn add(&mut self, a: WeightId, b: WeightId, c: i64) {
        let k = key(a, b);
        let e = self.coeffs.entry(k).or_insert(0);
        *e = e.checked_add(c).expect("form coefficients stay small");
        if *e == 0 {
            self.coeffs.remove(&k);
        }
    }

    pub fn has_diagonal(&self) -> bool {
        self.coeffs.keys().any(|(a, b)| a == b)
    }

    pub fn eval(&self, v: &[i128]) -> i128 {
        self.coeffs
            .iter()
            .map(|(&(a, b), &c)| (c as i128).checked_mul(v[a]).and_then(|t| t.checked_mul(v[b])))
            .try_fold(0i128, |acc, t| t.and_then(|t| acc.checked_add(t)))
            .expect("form value overflow")
    }

    pub fn eval_mod(&self, v: &[i64], m: i64) -> i64 {
        let mut s = 0i64;
        for (&(a, b), &c) in &self.coeffs {
            s = (s + c.rem_euclid(m) * v[a] % m * v[b]) % m;
        }
        s.rem_euclid(m)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(|(&(a, b), &c)| json!([a, b, c])).collect())
    }
}

/// Random orbit vectors of `v^λ0` under `G(Φ, Z)` (or the dual action on
/// covectors): one pass over the roots of one sign with coefficients in
/// `-1..=1`, which reaches a generic point, followed by `extra` random letters.
pub struct OrbitSampler<'a> {
    rep: &'a Rep,
    extra: usize,
}

fn bump(x: i128, c: i64, y: i128) -> i128 {
    (c as i128).checked_mul(y).and_then(|t| x.checked_add(t)).expect("orbit sample overflow")
}

impl<'a> OrbitSampler<'a> {
    pub fn new(rep: &'a Rep, extra: usize) -> OrbitSampler<'a> {
        OrbitSampler { rep, extra }
    }

    fn letters(&self, rng: &mut SplitMix64, positive: bool) -> Vec<(RootId, i64)> {
        let case = self.rep.case();
        let mut out: Vec<(RootId, i64)> =
            case.roots().filter(|&r| case.is_positive(r) == positive).map(|r| (r, rng.range_i64(-1, 1))).collect();
        out.extend((0..self.extra).map(|_| (rng.below(case.len()), rng.range_i64(-1, 1))));
        out
    }

    /// `g v^λ0` over Z.
    pub fn vector(&self, rng: &mut SplitMix64) -> Vec<i128> {
        let mut v = vec![0i128; self.rep.dim()];
        v[self.rep.weights().highest()] = 1;
        for (r, x) in self.letters(rng, false) {
            for e in self.rep.action(r) {
                let d = e.dst as usize;
                v[d] = bump(v[d], x * e.sign as i64, v[e.src as usize]);
            }
        }
        v
    }

    /// `g v^λ0` over `Z/m`, with coefficients uniform in `Z/m`.
    pub fn vector_mod(&self, rng: &mut SplitMix64, m: i64) -> Vec<i64> {
        let mut v = vec![0i64; self.rep.dim()];
        v[self.rep.weights().highest()] = 1;
        let letters: Vec<RootId> = self.letters(rng, false).into_iter().map(|(r, _)| r).collect();
        for r in letters {
            let x = rng.below(m as usize) as i64;
            for e in self.rep.action(r) {
                let d = e.dst as usize;
                v[d] = (v[d] + x * e.sign as i64 * v[e.src as usize]).rem_euclid(m);
            }
        }
        v
    }

    /// `(v^λ0)ᵀ g` over Z.
    pub fn covector(&self, rng: &mut SplitMix64) -> Vec<i128> {
        let mut w = vec![0i128; self.rep.dim()];
        w[self.rep.weights().highest()] = 1;
        for (r, x) in self.letters(rng, true) {
            for e in self.rep.action(r) {
                let s = e.src as usize;
                w[s] = bump(w[s], x * e.sign as i64, w[e.dst as usize]);
            }
        }
        w
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Square {
    pub lambda: WeightId,
    pub mu: WeightId,
    pub members: Vec<WeightId>,
    /// Pairs with non-root difference; each member occurs exactly once.
    pub matching: Vec<(WeightId, WeightId)>,
}

/// `Ω(λ, μ)`: `λ`, `μ` and their common neighbours, matched by non-root differences.
pub fn find_square(rep: &Rep, lambda: WeightId, mu: WeightId) -> Result<Square> {
    let w = rep.weights();
    if w.distance(lambda, mu) != 2 {
        return Err(Error::Domain("a square needs two weights at distance two".into()));
    }
    let mut members = vec![lambda, mu];
    members.extend(w.weights().filter(|&n| w.distance(n, lambda) == 1 && w.distance(n, mu) == 1));
    if members.len() < 4 {
        return Err(Error::Domain(format!("only {} members", members.len())));
    }
    let mut matching = Vec::new();
    for (i, &a) in members.iter().enumerate() {
        let partners: Vec<WeightId> = members.iter().copied().filter(|&b| b != a && w.distance(a, b) >= 2).collect();
        if partners.len() != 1 {
            return Err(Error::Domain(format!("member {} has {} non-root partners", w.format_weight(a), partners.len())));
        }
        let b = partners[0];
        if members[..i].contains(&b) {
            continue;
        }
        matching.push((a, b));
    }
    Ok(Square { lambda, mu, members, matching })
}

fn rational_kernel(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..cols {
                    let t = &f * &m[row][j];
                    m[i][j] = &m[i][j] - t;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| x / &g).collect()
}

/// The square equation: the unique (up to scale) relation `Σ ± v_a v_b = 0`
/// over the matched pairs that holds on the orbit, scaled so the pair
/// containing `λ` has coefficient `+1`.
pub fn square_equation(rep: &Rep, sq: &Square, seed: u64) -> Result<QuadraticForm> {
    let cols = sq.matching.len();
    let sampler = OrbitSampler::new(rep, 4);
    let rows: Vec<Vec<BigInt>> = (0..cols + 20)
        .map(|i| {
            let v = sampler.vector(&mut SplitMix64::for_sample(seed, i as u64));
            sq.matching.iter().map(|&(a, b)| BigInt::from(v[a]) * BigInt::from(v[b])).collect()
        })
        .collect();
    let kernel = rational_kernel(&rows, cols);
    if kernel.len() != 1 {
        return Err(Error::Internal(format!("square equation kernel has dimension {}", kernel.len())));
    }
    let mut coeffs = primitive(&kernel[0]);
    let lead = sq.matching.iter().position(|&(a, b)| a == sq.lambda || b == sq.lambda).expect("λ is matched");
    if coeffs[lead].is_negative() {
        coeffs.iter_mut().for_each(|c| *c = -c.clone());
    }
    let mut q = QuadraticForm::default();
    for (&(a, b), c) in sq.matching.iter().zip(&coeffs) {
        let c = c.to_i64().filter(|c| c.abs() == 1).ok_or_else(|| Error::Internal(format!("coefficient {c} is not ±1")))?;
        q.add(a, b, c);
    }
    for i in 0..200u64 {
        let v = sampler.vector(&mut SplitMix64::for_sample(seed ^ 0xf00d, i));
        if q.eval(&v) != 0 {
            return Err(Error::Internal("square equation fails on a fresh sample".into()));
        }
    }
    Ok(q)
}

/// `q'(v) = q(x_γ(1) v)` with `(x_γ v)_λ = v_λ + c_{λ-γ,γ} v_{λ-γ}`.
pub fn substitute(rep: &Rep, q: &QuadraticForm, gamma: RootId) -> QuadraticForm {
    let w = rep.weights();
    let back = rep.case().neg(gamma);
    let expand = |a: WeightId| -> Vec<(WeightId, i64)> {
        let mut t = vec![(a, 1)];
        if let Some(s) = w.shift(a, back) {
            t.push((s, rep.sign(s, gamma) as i64));
        }
        t
    };
    let mut out = QuadraticForm::default();
    for (&(a, b), &c) in &q.coeffs {
        for &(x, sx) in &expand(a) {
            for &(y, sy) in &expand(b) {
                out.add(x, y, c * sx * sy);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct PiForm {
    pub q: QuadraticForm,
    pub square: Square,
    /// `μ1, ..., μk = -λ0`.
    pub path: Vec<WeightId>,
}

impl PiForm {
    pub fn to_json(&self) -> Value {
        json!({
            "mu1": self.square.mu,
            "square": self.square.members,
            "path": self.path,
            "coefficients": self.q.to_json(),
        })
    }
}

/// `μ1` is the first weight of the second component closest to `-λ0`; the
/// path always steps to the first neighbour that is one closer.
pub fn build_pi_form(rep: &Rep, seed: u64) -> Result<PiForm> {
    require_second_type(rep)?;
    let w = rep.weights();
    let l0 = w.highest();
    let low = w.lowest().expect("second type");
    let mu1 = *w.components()[2].iter().min_by_key(|&&m| (w.distance(m, low), m)).expect("non-empty component");
    let mut path = vec![mu1];
    while *path.last().unwrap() != low {
        let cur = *path.last().unwrap();
        let d = w.distance(cur, low);
        let next = *w
            .neighbours(cur)
            .iter()
            .filter(|&&m| w.distance(m, low) + 1 == d)
            .min()
            .ok_or_else(|| Error::Internal("no step towards -λ0".into()))?;
        path.push(next);
    }
    let square = find_square(rep, l0, mu1)?;
    let mut q = square_equation(rep, &square, seed)?;
    for pair in path.windows(2) {
        let gamma = w.diff(pair[0], pair[1]).expect("adjacent weights");
        q = substitute(rep, &q, gamma);
        if q.get(l0, pair[1]).abs() != 1 {
            return Err(Error::Internal(format!("coefficient at (λ0, {}) is not ±1", w.format_weight(pair[1]))));
        }
    }
    if q.has_diagonal() {
        return Err(Error::Internal("the form has diagonal terms".into()));
    }
    Ok(PiForm { q, square, path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::CaseTag;

    #[test]
    fn first_type_is_not_applicable() {
        let rep = Rep::new(CaseTag::B, 0).unwrap();
        assert_eq!(build_bilinear(&rep), Err(Error::Unsupported("not applicable: first type".into())));
    }

    #[test]
    fn e7_bilinear_form_is_invariant() {
        let rep = Rep::new(CaseTag::C, 0).unwrap();
        let h = build_bilinear(&rep).unwrap();
        let z = Ring::parse("int").unwrap();
        assert_eq!(bilinear_violation(&rep, &h, &z).unwrap(), None);
        let l0 = rep.weights().highest();
        assert_eq!(h.partner[l0], rep.weights().lowest().unwrap());
    }

    #[test]
    fn pi_forms_vanish_on_orbits() {
        let mut reps = vec![Rep::new(CaseTag::C, 0).unwrap()];
        reps.extend([6, 8, 10].map(|l| Rep::new(CaseTag::A, l).unwrap()));
        for rep in reps {
            let f = build_pi_form(&rep, 5).unwrap();
            let s = OrbitSampler::new(&rep, 4);
            let mut rng = SplitMix64::new(8);
            for _ in 0..100 {
                assert_eq!(f.q.eval(&s.vector(&mut rng)), 0);
                assert_eq!(f.q.eval_mod(&s.vector_mod(&mut rng, 9), 9), 0);
            }
        }
    }

    #[test]
    fn d6_pi_form() {
        let rep = Rep::new(CaseTag::A, 6).unwrap();
        let f = build_pi_form(&rep, 1).unwrap();
        let w = rep.weights();
        assert_eq!(f.q.get(w.highest(), w.lowest().unwrap()).abs(), 1);
        let s = OrbitSampler::new(&rep, 4);
        let mut rng = SplitMix64::new(3);
        for _ in 0..50 {
            assert_eq!(f.q.eval(&s.vector(&mut rng)), 0);
        }
    }
}
