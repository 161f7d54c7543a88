//! Finite products of chain rings: `Z/p^k`, `F_p[t]/(t^k)`, or the integers on their own.
//!
//! Each factor stores its elements as a single `i64`. A truncated polynomial
//! ring packs its coefficients in base `p`, so `t^j` is stored as `p^j` and
//! reduction mod `t^j` is reduction mod `p^j`.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

pub type Scalar = i64;

/// Largest modulus allowed for a `Z/p^k` factor, so products fit in an `i64`.
const ZMOD_LIMIT: u64 = 1 << 31;
const POLY_LIMIT: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ChainFactor {
    #[serde(rename = "int")]
    Integers,
    #[serde(rename = "zmod")]
    ZMod { p: u64, k: u32 },
    #[serde(rename = "poly")]
    Poly { p: u64, k: u32 },
}

impl ChainFactor {
    pub fn is_finite(&self) -> bool {
        !matches!(self, ChainFactor::Integers)
    }

    /// Length of the chain of ideals, i.e. `k`.
    pub fn length(&self) -> Option<u32> {
        match *self {
            ChainFactor::Integers => None,
            ChainFactor::ZMod { k, .. } | ChainFactor::Poly { k, .. } => Some(k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub factors: Vec<ChainFactor>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn checked_pow(p: u64, k: u32, limit: u64) -> Option<u64> {
    let mut m: u64 = 1;
    for _ in 0..k {
        m = m.checked_mul(p)?;
        if m > limit {
            return None;
        }
    }
    Some(m)
}

impl RingSpec {
    pub fn integers() -> Self {
        RingSpec { factors: vec![ChainFactor::Integers] }
    }

    /// `Z/n`, split into prime-power factors in increasing order of `p`.
    pub fn zmod(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidRing(format!("Z/{n} is not a chain ring product")));
        }
        let mut factors = Vec::new();
        let mut rest = n;
        let mut p = 2;
        while p * p <= rest {
            let mut k = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            if k > 0 {
                factors.push(ChainFactor::ZMod { p, k });
            }
            p += 1;
        }
        if rest > 1 {
            factors.push(ChainFactor::ZMod { p: rest, k: 1 });
        }
        let spec = RingSpec { factors };
        spec.validate()?;
        Ok(spec)
    }

    pub fn poly(p: u64, k: u32) -> Result<Self> {
        let spec = RingSpec { factors: vec![ChainFactor::Poly { p, k }] };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::InvalidRing("no factors".into()));
        }
        for f in &self.factors {
            match *f {
                ChainFactor::Integers => {
                    if self.factors.len() > 1 {
                        return Err(Error::InvalidRing("Z cannot be combined with other factors".into()));
                    }
                }
                ChainFactor::ZMod { p, k } => {
                    if !is_prime(p) {
                        return Err(Error::InvalidRing(format!("{p} is not prime")));
                    }
                    if checked_pow(p, k, ZMOD_LIMIT).is_none() {
                        return Err(Error::InvalidRing(format!("Z/{p}^{k} is too large")));
                    }
                }
                ChainFactor::Poly { p, k } => {
                    if !is_prime(p) {
                        return Err(Error::InvalidRing(format!("{p} is not prime")));
                    }
                    if p >= ZMOD_LIMIT || checked_pow(p, k, POLY_LIMIT).is_none() {
                        return Err(Error::InvalidRing(format!("F_{p}[t]/(t^{k}) is too large")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Parses the short form used on the command line: `int`, `z12`,
    /// `f2t2` (for `F_2[t]/(t^2)`), or factors joined by `x`, as in `z4xf3t2`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim().to_ascii_lowercase();
        if text == "int" || text == "z" {
            return Ok(RingSpec::integers());
        }
        let mut factors = Vec::new();
        for part in text.split('x') {
            if let Some(n) = part.strip_prefix('z') {
                let n: u64 = n.parse().map_err(|_| Error::Parse(format!("bad ring factor '{part}'")))?;
                factors.extend(RingSpec::zmod(n)?.factors);
            } else if let Some(rest) = part.strip_prefix('f') {
                let (p, k) = rest
                    .split_once('t')
                    .ok_or_else(|| Error::Parse(format!("bad ring factor '{part}'")))?;
                let p: u64 = p.parse().map_err(|_| Error::Parse(format!("bad prime in '{part}'")))?;
                let k: u32 = k.parse().map_err(|_| Error::Parse(format!("bad length in '{part}'")))?;
                factors.push(ChainFactor::Poly { p, k });
            } else {
                return Err(Error::Parse(format!("bad ring factor '{part}'")));
            }
        }
        let spec = RingSpec { factors };
        spec.validate()?;
        Ok(spec)
    }

    pub fn is_finite(&self) -> bool {
        self.factors.iter().all(|f| f.is_finite())
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|c| match *c {
                ChainFactor::Integers => "Z".to_string(),
                ChainFactor::ZMod { p, k } => format!("Z/{}", p.pow(k)),
                ChainFactor::Poly { p, k } => format!("F{p}[t]/(t^{k})"),
            })
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Scalar arithmetic for one factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arith {
    Int,
    ZMod { p: i64, k: u32, m: i64 },
    Poly { p: i64, k: u32, m: i64 },
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let e = Integer::extended_gcd(&a.rem_euclid(m), &m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m))
}

impl Arith {
    fn new(c: &ChainFactor) -> Arith {
        match *c {
            ChainFactor::Integers => Arith::Int,
            ChainFactor::ZMod { p, k } => Arith::ZMod { p: p as i64, k, m: p.pow(k) as i64 },
            ChainFactor::Poly { p, k } => Arith::Poly { p: p as i64, k, m: p.pow(k) as i64 },
        }
    }

    /// `None` for the integers.
    pub fn modulus(&self) -> Option<i64> {
        match *self {
            Arith::Int => None,
            Arith::ZMod { m, .. } | Arith::Poly { m, .. } => Some(m),
        }
    }

    pub fn length(&self) -> Option<u32> {
        match *self {
            Arith::Int => None,
            Arith::ZMod { k, .. } | Arith::Poly { k, .. } => Some(k),
        }
    }

    pub fn prime(&self) -> Option<i64> {
        match *self {
            Arith::Int => None,
            Arith::ZMod { p, .. } | Arith::Poly { p, .. } => Some(p),
        }
    }

    fn digits(p: i64, k: u32, mut a: i64) -> Vec<i64> {
        let mut out = Vec::with_capacity(k as usize);
        for _ in 0..k {
            out.push(a % p);
            a /= p;
        }
        out
    }

    fn pack(p: i64, digits: &[i64]) -> i64 {
        digits.iter().rev().fold(0, |acc, d| acc * p + d)
    }

    /// Image of an integer.
    pub fn from_int(&self, n: i64) -> Scalar {
        match *self {
            Arith::Int => n,
            Arith::ZMod { m, .. } => n.rem_euclid(m),
            Arith::Poly { p, m, .. } => {
                if m == 1 {
                    0
                } else {
                    n.rem_euclid(p)
                }
            }
        }
    }

    pub fn in_range(&self, a: Scalar) -> bool {
        match *self {
            Arith::Int => true,
            Arith::ZMod { m, .. } | Arith::Poly { m, .. } => (0..m).contains(&a),
        }
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        match *self {
            Arith::Int => a.checked_add(b).expect("integer overflow in Z"),
            Arith::ZMod { m, .. } => {
                let s = a + b;
                if s >= m {
                    s - m
                } else {
                    s
                }
            }
            Arith::Poly { p, k, .. } => {
                if p == 2 {
                    return a ^ b;
                }
                let (x, y) = (Self::digits(p, k, a), Self::digits(p, k, b));
                let s: Vec<i64> = x.iter().zip(&y).map(|(u, v)| (u + v) % p).collect();
                Self::pack(p, &s)
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        match *self {
            Arith::Int => a.checked_neg().expect("integer overflow in Z"),
            Arith::ZMod { m, .. } => {
                if a == 0 {
                    0
                } else {
                    m - a
                }
            }
            Arith::Poly { p, k, .. } => {
                if p == 2 {
                    return a;
                }
                let x = Self::digits(p, k, a);
                let s: Vec<i64> = x.iter().map(|u| (p - u) % p).collect();
                Self::pack(p, &s)
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        match *self {
            Arith::Int => a.checked_mul(b).expect("integer overflow in Z"),
            Arith::ZMod { m, .. } => (a * b) % m,
            Arith::Poly { p, k, .. } => {
                if a == 0 || b == 0 {
                    return 0;
                }
                let (x, y) = (Self::digits(p, k, a), Self::digits(p, k, b));
                let mut s = vec![0i64; k as usize];
                for (i, u) in x.iter().enumerate() {
                    if *u == 0 {
                        continue;
                    }
                    for (j, v) in y.iter().enumerate().take(k as usize - i) {
                        s[i + j] = (s[i + j] + u * v) % p;
                    }
                }
                Self::pack(p, &s)
            }
        }
    }

    /// Multiplication by `+1`, `-1` or `0`.
    #[inline]
    pub fn mul_sign(&self, a: Scalar, sign: i8) -> Scalar {
        match sign {
            1 => a,
            -1 => self.neg(a),
            _ => 0,
        }
    }

    pub fn is_unit(&self, a: Scalar) -> bool {
        match *self {
            Arith::Int => a == 1 || a == -1,
            Arith::ZMod { p, m, .. } | Arith::Poly { p, m, .. } => m == 1 || a % p != 0,
        }
    }

    pub fn inv(&self, a: Scalar) -> Option<Scalar> {
        match *self {
            Arith::Int => (a == 1 || a == -1).then_some(a),
            Arith::ZMod { m, .. } => {
                if m == 1 {
                    Some(0)
                } else {
                    mod_inverse(a, m)
                }
            }
            Arith::Poly { p, k, m } => {
                if m == 1 {
                    return Some(0);
                }
                let x = Self::digits(p, k, a);
                let b0 = mod_inverse(x[0], p)?;
                let mut y = vec![0i64; k as usize];
                y[0] = b0;
                for n in 1..k as usize {
                    let s: i64 = (1..=n).map(|i| x[i] * y[n - i] % p).sum::<i64>() % p;
                    y[n] = (p - s * b0 % p) % p;
                }
                Some(Self::pack(p, &y))
            }
        }
    }

    /// Valuation capped at `k` (so zero has valuation `k`); `None` over Z.
    pub fn valuation(&self, a: Scalar) -> Option<u32> {
        match *self {
            Arith::Int => None,
            Arith::ZMod { p, k, .. } | Arith::Poly { p, k, .. } => {
                let mut v = 0;
                let mut a = a;
                while v < k && a % p == 0 {
                    a /= p;
                    v += 1;
                }
                Some(v)
            }
        }
    }

    /// `p^j` for `Z/p^k`, `t^j` for a polynomial factor; zero once `j >= k`.
    pub fn uniformizer_power(&self, j: u32) -> Scalar {
        match *self {
            Arith::Int => 0,
            Arith::ZMod { p, k, .. } | Arith::Poly { p, k, .. } => {
                if j >= k {
                    0
                } else {
                    p.pow(j)
                }
            }
        }
    }

    pub fn format(&self, a: Scalar) -> String {
        match *self {
            Arith::Int | Arith::ZMod { .. } => a.to_string(),
            Arith::Poly { p, k, .. } => {
                let d = Self::digits(p, k, a);
                let terms: Vec<String> = d
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0)
                    .map(|(i, c)| match (i, *c) {
                        (0, c) => c.to_string(),
                        (1, 1) => "t".into(),
                        (1, c) => format!("{c}t"),
                        (i, 1) => format!("t^{i}"),
                        (i, c) => format!("{c}t^{i}"),
                    })
                    .collect();
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join("+")
                }
            }
        }
    }

    fn to_json(&self, a: Scalar) -> Value {
        match *self {
            Arith::Int | Arith::ZMod { .. } => Value::from(a),
            Arith::Poly { p, k, .. } => Value::from(Self::digits(p, k, a)),
        }
    }

    fn from_json(&self, v: &Value) -> Result<Scalar> {
        let bad = || Error::Parse(format!("bad ring element {v}"));
        match *self {
            Arith::Poly { p, k, .. } => {
                if let Some(arr) = v.as_array() {
                    if arr.len() > k as usize {
                        return Err(bad());
                    }
                    let mut d = Vec::with_capacity(k as usize);
                    for c in arr {
                        d.push(c.as_i64().ok_or_else(bad)?.rem_euclid(p));
                    }
                    d.resize(k as usize, 0);
                    Ok(Self::pack(p, &d))
                } else {
                    Ok(self.from_int(v.as_i64().ok_or_else(bad)?))
                }
            }
            _ => Ok(self.from_int(v.as_i64().ok_or_else(bad)?)),
        }
    }
}

/// A validated ring; shared through `Arc`.
#[derive(Debug, PartialEq, Eq)]
pub struct Ring {
    spec: RingSpec,
    arith: Vec<Arith>,
}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Arc<Ring>> {
        spec.validate()?;
        let arith = spec.factors.iter().map(Arith::new).collect();
        Ok(Arc::new(Ring { spec, arith }))
    }

    pub fn parse(text: &str) -> Result<Arc<Ring>> {
        Ring::new(RingSpec::parse(text)?)
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn same(a: &Arc<Ring>, b: &Arc<Ring>) -> bool {
        Arc::ptr_eq(a, b) || a.spec == b.spec
    }

    pub fn arith(&self) -> &[Arith] {
        &self.arith
    }

    pub fn factor_count(&self) -> usize {
        self.arith.len()
    }

    pub fn is_finite(&self) -> bool {
        self.spec.is_finite()
    }

    /// Number of elements, if finite and representable.
    pub fn size(&self) -> Option<u64> {
        let mut n: u64 = 1;
        for a in &self.arith {
            n = n.checked_mul(a.modulus()? as u64)?;
        }
        Some(n)
    }

    pub fn elem(self: &Arc<Self>, parts: Vec<Scalar>) -> Result<RingElem> {
        if parts.len() != self.arith.len() || !parts.iter().zip(&self.arith).all(|(a, r)| r.in_range(*a)) {
            return Err(Error::Parse(format!("invalid residues {parts:?} for {}", self.spec)));
        }
        Ok(RingElem { ring: self.clone(), parts })
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> RingElem {
        let parts = self.arith.iter().map(|a| a.from_int(n)).collect();
        RingElem { ring: self.clone(), parts }
    }

    pub fn zero(self: &Arc<Self>) -> RingElem {
        self.from_int(0)
    }

    pub fn one(self: &Arc<Self>) -> RingElem {
        self.from_int(1)
    }

    /// All elements of a finite ring with at most `limit` elements.
    pub fn elements(self: &Arc<Self>, limit: u64) -> Result<Vec<RingElem>> {
        let size = self
            .size()
            .filter(|n| *n <= limit)
            .ok_or_else(|| Error::Unsupported(format!("cannot enumerate {}", self.spec)))?;
        let mut out = Vec::with_capacity(size as usize);
        for mut idx in 0..size {
            let mut parts = Vec::with_capacity(self.arith.len());
            for a in &self.arith {
                let m = a.modulus().unwrap() as u64;
                parts.push((idx % m) as i64);
                idx /= m;
            }
            out.push(RingElem { ring: self.clone(), parts });
        }
        Ok(out)
    }

    /// Uniform element of a finite ring; over Z a value in `-2..=2`.
    pub fn random(self: &Arc<Self>, rng: &mut SplitMix64) -> RingElem {
        let parts = self
            .arith
            .iter()
            .map(|a| match a.modulus() {
                Some(m) => rng.below(m as usize) as i64,
                None => rng.range_i64(-2, 2),
            })
            .collect();
        RingElem { ring: self.clone(), parts }
    }

    pub fn random_unit(self: &Arc<Self>, rng: &mut SplitMix64) -> RingElem {
        loop {
            let x = self.random(rng);
            if x.is_unit() {
                return x;
            }
        }
    }

    pub fn elem_from_json(self: &Arc<Self>, v: &Value) -> Result<RingElem> {
        let parts = if self.arith.len() == 1 && !(v.is_array() && v.as_array().unwrap().first().is_some_and(|x| x.is_array())) {
            // a bare value is accepted for one-factor rings; a one-element array too
            let inner = match v.as_array() {
                Some(a) if a.len() == 1 && !matches!(self.arith[0], Arith::Poly { .. }) => &a[0],
                _ => v,
            };
            vec![self.arith[0].from_json(inner)?]
        } else {
            let arr = v.as_array().ok_or_else(|| Error::Parse(format!("expected array, got {v}")))?;
            if arr.len() != self.arith.len() {
                return Err(Error::Parse(format!("expected {} residues, got {v}", self.arith.len())));
            }
            arr.iter().zip(&self.arith).map(|(x, a)| a.from_json(x)).collect::<Result<_>>()?
        };
        Ok(RingElem { ring: self.clone(), parts })
    }

    /// Quotient by an ideal, factor by factor.
    pub fn quotient(self: &Arc<Self>, ideal: &Ideal) -> Result<QuotientMap> {
        ideal.check_ring(self)?;
        let mut factors = Vec::new();
        let mut plan = Vec::new();
        for (f, (a, part)) in self.arith.iter().zip(&ideal.parts).enumerate() {
            match (a, part) {
                (Arith::ZMod { p, .. }, IdealPart::Power(j)) => {
                    factors.push(ChainFactor::ZMod { p: *p as u64, k: *j });
                    plan.push((f, Some(p.pow(*j))));
                }
                (Arith::Poly { p, .. }, IdealPart::Power(j)) => {
                    factors.push(ChainFactor::Poly { p: *p as u64, k: *j });
                    plan.push((f, Some(p.pow(*j))));
                }
                (Arith::Int, IdealPart::Principal(0)) => {
                    factors.push(ChainFactor::Integers);
                    plan.push((f, None));
                }
                (Arith::Int, IdealPart::Principal(1)) => {
                    factors.push(ChainFactor::ZMod { p: 2, k: 0 });
                    plan.push((f, Some(1)));
                }
                (Arith::Int, IdealPart::Principal(m)) => {
                    for c in RingSpec::zmod(*m as u64)?.factors {
                        if let ChainFactor::ZMod { p, k } = c {
                            plan.push((f, Some((p as i64).pow(k))));
                        }
                        factors.push(c);
                    }
                }
                _ => return Err(Error::Internal("ideal does not match ring".into())),
            }
        }
        let target = Ring::new(RingSpec { factors })?;
        Ok(QuotientMap { source: self.clone(), target, plan })
    }
}

/// Reduction `R -> R/I`.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub source: Arc<Ring>,
    pub target: Arc<Ring>,
    /// For each target factor: the source factor and the modulus to reduce by.
    plan: Vec<(usize, Option<i64>)>,
}

impl QuotientMap {
    pub fn reduce_parts(&self, parts: &[Scalar]) -> Vec<Scalar> {
        self.plan
            .iter()
            .map(|(f, m)| match m {
                None => parts[*f],
                Some(m) => parts[*f].rem_euclid(*m),
            })
            .collect()
    }

    pub fn apply(&self, x: &RingElem) -> Result<RingElem> {
        x.check_ring(&self.source)?;
        Ok(RingElem { ring: self.target.clone(), parts: self.reduce_parts(&x.parts) })
    }

    /// Image of an ideal `J`, i.e. `(J + I)/I`.
    pub fn apply_ideal(&self, j: &Ideal) -> Result<Ideal> {
        j.check_ring(&self.source)?;
        let gens: Vec<RingElem> = j.generators().iter().map(|g| self.apply(g)).collect::<Result<_>>()?;
        Ideal::from_elems(&self.target, &gens)
    }

    /// The factor index map, exposed so matrices can be reduced in bulk.
    pub fn plan(&self) -> &[(usize, Option<i64>)] {
        &self.plan
    }
}

#[derive(Clone, Debug)]
pub struct RingElem {
    ring: Arc<Ring>,
    parts: Vec<Scalar>,
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts && (Arc::ptr_eq(&self.ring, &other.ring) || self.ring.spec == other.ring.spec)
    }
}
impl Eq for RingElem {}

impl RingElem {
    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn parts(&self) -> &[Scalar] {
        &self.parts
    }

    pub fn check_ring(&self, ring: &Arc<Ring>) -> Result<()> {
        if Arc::ptr_eq(&self.ring, ring) || self.ring.spec == ring.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    fn zip(&self, other: &RingElem, f: impl Fn(&Arith, Scalar, Scalar) -> Scalar) -> Result<RingElem> {
        other.check_ring(&self.ring)?;
        let parts = self
            .ring
            .arith
            .iter()
            .zip(self.parts.iter().zip(&other.parts))
            .map(|(a, (x, y))| f(a, *x, *y))
            .collect();
        Ok(RingElem { ring: self.ring.clone(), parts })
    }

    pub fn try_add(&self, other: &RingElem) -> Result<RingElem> {
        self.zip(other, Arith::add)
    }

    pub fn try_sub(&self, other: &RingElem) -> Result<RingElem> {
        self.zip(other, Arith::sub)
    }

    pub fn try_mul(&self, other: &RingElem) -> Result<RingElem> {
        self.zip(other, Arith::mul)
    }

    pub fn neg(&self) -> RingElem {
        let parts = self.ring.arith.iter().zip(&self.parts).map(|(a, x)| a.neg(*x)).collect();
        RingElem { ring: self.ring.clone(), parts }
    }

    pub fn pow(&self, mut e: u32) -> RingElem {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale_sign(&self, sign: i8) -> RingElem {
        let parts = self.ring.arith.iter().zip(&self.parts).map(|(a, x)| a.mul_sign(*x, sign)).collect();
        RingElem { ring: self.ring.clone(), parts }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|x| *x == 0)
    }

    pub fn is_one(&self) -> bool {
        *self == self.ring.one()
    }

    pub fn is_unit(&self) -> bool {
        self.ring.arith.iter().zip(&self.parts).all(|(a, x)| a.is_unit(*x))
    }

    pub fn inv(&self) -> Result<RingElem> {
        let parts = self
            .ring
            .arith
            .iter()
            .zip(&self.parts)
            .map(|(a, x)| a.inv(*x))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::NonUnit(self.to_string()))?;
        Ok(RingElem { ring: self.ring.clone(), parts })
    }

    /// Per-factor valuations (`None` over Z).
    pub fn valuations(&self) -> Vec<Option<u32>> {
        self.ring.arith.iter().zip(&self.parts).map(|(a, x)| a.valuation(*x)).collect()
    }

    pub fn to_json(&self) -> Value {
        if self.parts.len() == 1 {
            self.ring.arith[0].to_json(self.parts[0])
        } else {
            Value::from(self.ring.arith.iter().zip(&self.parts).map(|(a, x)| a.to_json(*x)).collect::<Vec<_>>())
        }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ring.arith.iter().zip(&self.parts).map(|(a, x)| a.format(*x)).collect();
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join(", "))
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl std::ops::$tr<&RingElem> for &RingElem {
            type Output = RingElem;
            /// Panics when the operands live over different rings; use the `try_` form to recover.
            fn $m(self, rhs: &RingElem) -> RingElem {
                self.$try(rhs).expect("ring mismatch")
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl std::ops::Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem::neg(self)
    }
}

/// One factor of an ideal: `(p^j)` resp. `(t^j)` in a chain ring, `(m)` in Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IdealPart {
    Power(u32),
    Principal(i64),
}

#[derive(Clone, Debug)]
pub struct Ideal {
    ring: Arc<Ring>,
    parts: Vec<IdealPart>,
}

impl PartialEq for Ideal {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts && self.ring.spec == other.ring.spec
    }
}
impl Eq for Ideal {}

impl Ideal {
    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn parts(&self) -> &[IdealPart] {
        &self.parts
    }

    pub fn from_parts(ring: &Arc<Ring>, parts: Vec<IdealPart>) -> Result<Ideal> {
        if parts.len() != ring.arith.len() {
            return Err(Error::Parse("ideal has the wrong number of factors".into()));
        }
        for (a, p) in ring.arith.iter().zip(&parts) {
            match (a, p) {
                (Arith::Int, IdealPart::Principal(m)) if *m >= 0 => {}
                (Arith::ZMod { k, .. } | Arith::Poly { k, .. }, IdealPart::Power(j)) if j <= k => {}
                _ => return Err(Error::Parse(format!("ideal part {p:?} does not fit {}", ring.spec))),
            }
        }
        Ok(Ideal { ring: ring.clone(), parts })
    }

    pub fn zero(ring: &Arc<Ring>) -> Ideal {
        let parts = ring
            .arith
            .iter()
            .map(|a| match a.length() {
                Some(k) => IdealPart::Power(k),
                None => IdealPart::Principal(0),
            })
            .collect();
        Ideal { ring: ring.clone(), parts }
    }

    pub fn unit(ring: &Arc<Ring>) -> Ideal {
        let parts = ring
            .arith
            .iter()
            .map(|a| match a {
                Arith::Int => IdealPart::Principal(1),
                _ => IdealPart::Power(0),
            })
            .collect();
        Ideal { ring: ring.clone(), parts }
    }

    /// The ideal generated by `elems`: least valuation per chain factor, gcd over Z.
    pub fn from_elems(ring: &Arc<Ring>, elems: &[RingElem]) -> Result<Ideal> {
        let mut ideal = Ideal::zero(ring);
        for e in elems {
            e.check_ring(ring)?;
            for ((part, a), x) in ideal.parts.iter_mut().zip(&ring.arith).zip(&e.parts) {
                *part = match (*part, a.valuation(*x)) {
                    (IdealPart::Power(j), Some(v)) => IdealPart::Power(j.min(v)),
                    (IdealPart::Principal(m), None) => IdealPart::Principal(m.gcd(x)),
                    _ => unreachable!(),
                };
            }
        }
        Ok(ideal)
    }

    pub fn principal(x: &RingElem) -> Ideal {
        Ideal::from_elems(x.ring(), std::slice::from_ref(x)).expect("same ring")
    }

    pub fn check_ring(&self, ring: &Arc<Ring>) -> Result<()> {
        if Arc::ptr_eq(&self.ring, ring) || self.ring.spec == ring.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    fn zip(&self, other: &Ideal, f: impl Fn(&Arith, IdealPart, IdealPart) -> IdealPart) -> Result<Ideal> {
        other.check_ring(&self.ring)?;
        let parts = self
            .ring
            .arith
            .iter()
            .zip(self.parts.iter().zip(&other.parts))
            .map(|(a, (x, y))| f(a, *x, *y))
            .collect();
        Ok(Ideal { ring: self.ring.clone(), parts })
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        self.zip(other, |_, x, y| match (x, y) {
            (IdealPart::Power(a), IdealPart::Power(b)) => IdealPart::Power(a.min(b)),
            (IdealPart::Principal(a), IdealPart::Principal(b)) => IdealPart::Principal(a.gcd(&b)),
            _ => unreachable!(),
        })
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        self.zip(other, |a, x, y| match (x, y) {
            (IdealPart::Power(u), IdealPart::Power(v)) => IdealPart::Power((u + v).min(a.length().unwrap())),
            (IdealPart::Principal(u), IdealPart::Principal(v)) => {
                IdealPart::Principal(u.checked_mul(v).expect("integer overflow in Z"))
            }
            _ => unreachable!(),
        })
    }

    pub fn intersection(&self, other: &Ideal) -> Result<Ideal> {
        self.zip(other, |_, x, y| match (x, y) {
            (IdealPart::Power(a), IdealPart::Power(b)) => IdealPart::Power(a.max(b)),
            (IdealPart::Principal(a), IdealPart::Principal(b)) => IdealPart::Principal(a.lcm(&b)),
            _ => unreachable!(),
        })
    }

    pub fn pow(&self, e: u32) -> Ideal {
        let mut acc = Ideal::unit(&self.ring);
        for _ in 0..e {
            acc = acc.product(self).expect("same ring");
        }
        acc
    }

    pub fn contains(&self, x: &RingElem) -> Result<bool> {
        x.check_ring(&self.ring)?;
        Ok(self.contains_parts(&x.parts))
    }

    /// Membership test on raw residues; the caller guarantees the ring matches.
    pub fn contains_parts(&self, parts: &[Scalar]) -> bool {
        self.parts.iter().zip(&self.ring.arith).zip(parts).all(|((part, a), x)| match *part {
            IdealPart::Power(j) => a.valuation(*x).unwrap() >= j,
            IdealPart::Principal(0) => *x == 0,
            IdealPart::Principal(m) => x % m == 0,
        })
    }

    pub fn contains_scalar(&self, factor: usize, x: Scalar) -> bool {
        match self.parts[factor] {
            IdealPart::Power(j) => self.ring.arith[factor].valuation(x).unwrap() >= j,
            IdealPart::Principal(0) => x == 0,
            IdealPart::Principal(m) => x % m == 0,
        }
    }

    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool> {
        other.check_ring(&self.ring)?;
        Ok(self.parts.iter().zip(&other.parts).all(|(x, y)| match (x, y) {
            (IdealPart::Power(a), IdealPart::Power(b)) => b >= a,
            (IdealPart::Principal(0), IdealPart::Principal(b)) => *b == 0,
            (IdealPart::Principal(a), IdealPart::Principal(b)) => b % a == 0,
            _ => false,
        }))
    }

    pub fn is_zero(&self) -> bool {
        *self == Ideal::zero(&self.ring)
    }

    pub fn is_unit(&self) -> bool {
        *self == Ideal::unit(&self.ring)
    }

    /// One generator per factor, assembled into a single element (the ideal is principal).
    pub fn generator(&self) -> RingElem {
        let parts = self
            .parts
            .iter()
            .zip(&self.ring.arith)
            .map(|(part, a)| match *part {
                IdealPart::Power(j) => a.uniformizer_power(j),
                IdealPart::Principal(m) => m,
            })
            .collect();
        RingElem { ring: self.ring.clone(), parts }
    }

    pub fn generators(&self) -> Vec<RingElem> {
        vec![self.generator()]
    }

    /// All elements of the ideal in a finite ring.
    pub fn elements(&self, limit: u64) -> Result<Vec<RingElem>> {
        Ok(self
            .ring
            .elements(limit)?
            .into_iter()
            .filter(|x| self.contains_parts(&x.parts))
            .collect())
    }

    /// Uniform element of the ideal (finite rings), or a small multiple of the generator over Z.
    pub fn random(&self, rng: &mut SplitMix64) -> RingElem {
        let r = self.ring.random(rng);
        &r * &self.generator()
    }

    /// Parses `(a)`, `(a,b,...)` or a bare list of generators; each generator
    /// is an integer, a polynomial such as `t^2` or `1+t`, or a bracketed tuple
    /// `[x;y]` giving one residue per factor.
    pub fn parse(ring: &Arc<Ring>, text: &str) -> Result<Ideal> {
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        let mut gens = Vec::new();
        for g in split_top_level(inner, ',') {
            let g = g.trim();
            if !g.is_empty() {
                gens.push(parse_elem(ring, g)?);
            }
        }
        Ideal::from_elems(ring, &gens)
    }
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_poly_scalar(a: &Arith, text: &str) -> Result<Scalar> {
    let bad = || Error::Parse(format!("bad element '{text}'"));
    let mut acc = 0;
    for term in text.split('+') {
        let term = term.trim();
        let value = if let Some(pos) = term.find('t') {
            let coeff = &term[..pos];
            let coeff: i64 = if coeff.is_empty() { 1 } else { coeff.parse().map_err(|_| bad())? };
            let exp: u32 = match term[pos + 1..].strip_prefix('^') {
                Some(e) => e.parse().map_err(|_| bad())?,
                None if term.len() == pos + 1 => 1,
                None => return Err(bad()),
            };
            match a {
                Arith::Poly { .. } => a.mul(a.from_int(coeff), a.uniformizer_power(exp)),
                _ => return Err(Error::Parse(format!("'t' is not defined in a Z/p^k factor: '{text}'"))),
            }
        } else {
            a.from_int(term.parse().map_err(|_| bad())?)
        };
        acc = a.add(acc, value);
    }
    Ok(acc)
}

/// Parses a ring element: an integer, a polynomial in `t`, or `[x;y;...]` per factor.
pub fn parse_elem(ring: &Arc<Ring>, text: &str) -> Result<RingElem> {
    let text = text.trim();
    let parts = if let Some(inner) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        let items: Vec<&str> = inner.split(';').collect();
        if items.len() != ring.arith.len() {
            return Err(Error::Parse(format!("'{text}' needs {} residues", ring.arith.len())));
        }
        items.iter().zip(&ring.arith).map(|(s, a)| parse_poly_scalar(a, s)).collect::<Result<_>>()?
    } else {
        ring.arith.iter().map(|a| parse_poly_scalar(a, text)).collect::<Result<_>>()?
    };
    ring.elem(parts)
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .zip(&self.ring.arith)
            .map(|(part, a)| match (*part, a) {
                (IdealPart::Principal(m), _) => format!("({m})"),
                (IdealPart::Power(j), a) => format!("({})", a.format(a.uniformizer_power(j))),
            })
            .collect();
        write!(f, "{}", parts.join("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> Arc<Ring> {
        Ring::new(RingSpec::zmod(n).unwrap()).unwrap()
    }

    #[test]
    fn crt_split_of_twelve() {
        let spec = RingSpec::zmod(12).unwrap();
        assert_eq!(spec.factors, vec![ChainFactor::ZMod { p: 2, k: 2 }, ChainFactor::ZMod { p: 3, k: 1 }]);
    }

    #[test]
    fn ideal_of_eight_in_z12_is_four() {
        let r = z(12);
        let i = Ideal::from_elems(&r, &[r.from_int(8)]).unwrap();
        assert_eq!(i, Ideal::from_elems(&r, &[r.from_int(4)]).unwrap());
        assert_eq!(i.parts(), &[IdealPart::Power(2), IdealPart::Power(0)]);
    }

    #[test]
    fn ideal_product_two_three_is_six() {
        let r = z(12);
        let two = Ideal::principal(&r.from_int(2));
        let three = Ideal::principal(&r.from_int(3));
        assert_eq!(two.product(&three).unwrap(), Ideal::principal(&r.from_int(6)));
    }

    #[test]
    fn five_is_its_own_inverse_mod_twelve() {
        let r = z(12);
        assert_eq!(r.from_int(5).inv().unwrap(), r.from_int(5));
        assert!(matches!(r.from_int(4).inv(), Err(Error::NonUnit(_))));
    }

    #[test]
    fn one_plus_t_inverse() {
        let r = Ring::parse("f3t2").unwrap();
        let x = parse_elem(&r, "1+t").unwrap();
        assert_eq!(x.inv().unwrap(), parse_elem(&r, "1+2t").unwrap());
    }

    #[test]
    fn quotient_by_unit_ideal_is_zero_ring() {
        let r = z(8);
        let q = r.quotient(&Ideal::unit(&r)).unwrap();
        assert_eq!(q.target.size(), Some(1));
        assert!(q.apply(&r.from_int(5)).unwrap().is_zero());
    }

    #[test]
    fn quotient_of_z4_by_two() {
        let r = z(4);
        let q = r.quotient(&Ideal::principal(&r.from_int(2))).unwrap();
        assert_eq!(q.target.spec(), &RingSpec::zmod(2).unwrap());
        assert_eq!(q.apply(&r.from_int(3)).unwrap(), q.target.one());
        let img = q.apply_ideal(&Ideal::principal(&r.from_int(2))).unwrap();
        assert!(img.is_zero());
    }

    #[test]
    fn quotient_of_integers() {
        let r = Ring::new(RingSpec::integers()).unwrap();
        let q = r.quotient(&Ideal::principal(&r.from_int(12))).unwrap();
        assert_eq!(q.target.spec(), &RingSpec::zmod(12).unwrap());
        assert_eq!(q.apply(&r.from_int(-1)).unwrap().parts(), &[3, 2]);
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let a = z(8).one();
        let b = z(9).one();
        assert_eq!(a.try_add(&b), Err(Error::SpecMismatch));
    }

    #[test]
    fn integer_ideals() {
        let r = Ring::new(RingSpec::integers()).unwrap();
        let i = Ideal::from_elems(&r, &[r.from_int(12), r.from_int(18)]).unwrap();
        assert_eq!(i.parts(), &[IdealPart::Principal(6)]);
        let j = Ideal::principal(&r.from_int(4));
        assert_eq!(i.intersection(&j).unwrap().parts(), &[IdealPart::Principal(12)]);
        assert!(i.contains(&r.from_int(-30)).unwrap());
    }

    #[test]
    fn parse_rings_and_ideals() {
        assert!(RingSpec::parse("z1").is_err());
        assert!(RingSpec::parse("z6xint").is_err());
        let r = Ring::parse("z4xf2t3").unwrap();
        let i = Ideal::parse(&r, "([2;t^2])").unwrap();
        assert_eq!(i.parts(), &[IdealPart::Power(1), IdealPart::Power(2)]);
        assert_eq!(i.to_string(), "(2)x(t^2)");
    }

    #[test]
    fn json_round_trip() {
        let r = Ring::parse("z4xf3t2").unwrap();
        let spec: RingSpec = serde_json::from_str(r#"{"factors":[{"kind":"zmod","p":2,"k":2},{"kind":"poly","p":3,"k":2}]}"#).unwrap();
        assert_eq!(&spec, r.spec());
        let x = parse_elem(&r, "[3;1+2t]").unwrap();
        let back = r.elem_from_json(&x.to_json()).unwrap();
        assert_eq!(x, back);
    }
}
