//! Level certificates for subgroups `H = ⟨E(Δ, R), extra words⟩`.
//!
//! The lower bound is the pair of ideals generated by values `ξ` of witnessed
//! root elements `x_α(ξ) ∈ H`, `α ∈ Ω±`. Each witness comes with an `H`-word
//! (factors from `Δ` and from the extra words) and an extraction trace.
//! The upper side is only a necessary condition: sampled `H`-words must pass
//! the normalizer test for the target pair.

use serde::Serialize;
use serde_json::{json, Value};

use super::extract::{extract_from_nilpotent, extract_from_p, extract_from_p_lambda, Trace, Witness};
use super::ideals::root_type_violation;
use super::parabolic::{self, Side};
use super::{in_normalizer, row_in_ideal, SigmaPair};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rep::{Chevalley, GroupElement, Letter, Word};
use crate::rings::{Ideal, RingElem};
use crate::rng::SplitMix64;
use crate::roots::RootId;

/// One factor of an `H`-word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HFactor {
    Delta(Letter),
    /// Extra word by index, possibly inverted.
    Extra { index: usize, inverse: bool },
}

/// Generators of `H`: all of `E(Δ, R)` plus a list of extra words.
#[derive(Clone, Debug)]
pub struct HGenerators {
    pub extra: Vec<Word>,
}

impl HGenerators {
    pub fn new(extra: Vec<Word>) -> HGenerators {
        HGenerators { extra }
    }

    pub fn expand(&self, chev: &Chevalley, factors: &[HFactor]) -> Result<Word> {
        let case = chev.case();
        let mut out = Vec::new();
        for f in factors {
            match f {
                HFactor::Delta(l) => {
                    let root = match l {
                        Letter::X { root, .. } | Letter::W { root, .. } | Letter::H { root, .. } => *root,
                    };
                    if !case.in_delta(root) {
                        return Err(Error::Domain("a Δ factor uses a root outside Δ".into()));
                    }
                    out.push(l.clone());
                }
                HFactor::Extra { index, inverse } => {
                    let w = self.extra.get(*index).ok_or_else(|| Error::Domain(format!("no extra word {index}")))?;
                    if *inverse {
                        out.extend(crate::rep::invert_word(w));
                    } else {
                        out.extend(w.iter().cloned());
                    }
                }
            }
        }
        Ok(out)
    }

    /// A random product of `Δ`-conjugates of extra words, padded with `Δ` letters.
    pub fn sample(&self, chev: &Chevalley, rng: &mut SplitMix64) -> Vec<HFactor> {
        let delta = chev.case().delta();
        let letter = |rng: &mut SplitMix64| HFactor::Delta(Letter::X { root: *rng.pick(delta), value: chev.ring.random(rng) });
        let mut out = Vec::new();
        let blocks = 1 + rng.below(3);
        for _ in 0..blocks {
            let conj: Vec<HFactor> = (0..rng.below(4)).map(|_| letter(rng)).collect();
            out.extend(conj.iter().cloned());
            if self.extra.is_empty() {
                out.push(letter(rng));
            } else {
                out.push(HFactor::Extra { index: rng.below(self.extra.len()), inverse: rng.coin() });
            }
            out.extend(conj.iter().rev().map(|f| match f {
                HFactor::Delta(l) => HFactor::Delta(l.inverse()),
                other => other.clone(),
            }));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The witnessed lower bound equals the target and no sample violated the normalizer test.
    Certified,
    /// A witness lies outside the target pair.
    Exceeds,
    /// Budget ran out, or a sample failed the normalizer test without a matching witness.
    Incomplete,
}

#[derive(Clone, Debug)]
pub struct LevelWitness {
    pub source: &'static str,
    pub attempt: usize,
    pub factors: Vec<HFactor>,
    pub witness: Witness,
}

impl LevelWitness {
    pub fn root(&self) -> RootId {
        self.witness.root
    }

    /// Rebuilds the starting element from its `H`-word and replays the trace.
    pub fn replay(&self, chev: &Chevalley, gens: &HGenerators) -> Result<bool> {
        let start = chev.eval_word(&gens.expand(chev, &self.factors)?)?;
        if start.mat != self.witness.trace.start.mat {
            return Ok(false);
        }
        self.witness.verify(chev)
    }

    pub fn to_json(&self, chev: &Chevalley) -> Value {
        let mut v = self.witness.to_json(chev);
        v["source"] = json!(self.source);
        v["attempt"] = json!(self.attempt);
        v["word_length"] = json!(self.factors.len());
        v
    }
}

#[derive(Clone, Debug)]
pub struct LevelCertificate {
    pub target: SigmaPair,
    pub lower: SigmaPair,
    pub witnesses: Vec<LevelWitness>,
    pub attempts: usize,
    pub upper_checked: usize,
    pub upper_failures: usize,
    pub verdict: Verdict,
}

impl LevelCertificate {
    pub fn to_json(&self, chev: &Chevalley) -> Value {
        json!({
            "target": self.target.to_string(),
            "lower": self.lower.to_string(),
            "verdict": self.verdict,
            "attempts": self.attempts,
            "upper_checked": self.upper_checked,
            "upper_failures": self.upper_failures,
            "witnesses": self.witnesses.iter().map(|w| w.to_json(chev)).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct LevelOptions {
    pub budget: usize,
    pub seed: u64,
    pub upper_samples: usize,
    pub batch: usize,
    pub exec: Exec,
}

impl LevelOptions {
    pub fn new(budget: usize, seed: u64) -> LevelOptions {
        LevelOptions { budget, seed, upper_samples: 64, batch: 32, exec: Exec::default() }
    }
}

fn direct_witness(start: &GroupElement, root: RootId, value: RingElem) -> Witness {
    Witness { root, value, trace: Trace { start: start.clone(), steps: Vec::new() } }
}

/// Adds `ξ` to the side of the lower bound it belongs to; returns whether it grew.
fn absorb(lower: &mut SigmaPair, level: i32, value: &RingElem) -> Result<bool> {
    let side = if level == 1 { &mut lower.plus } else { &mut lower.minus };
    if side.contains(value)? {
        return Ok(false);
    }
    *side = side.sum(&Ideal::principal(value))?;
    Ok(true)
}

/// All witnesses obtainable from one `H`-element with the current lower bound.
fn harvest(chev: &Chevalley, g: &GroupElement, lower: &SigmaPair) -> Result<Vec<(&'static str, Witness)>> {
    let case = chev.case();
    let w = chev.weights();
    let mut out = Vec::new();
    if let Some((r, v)) = chev.as_root_element(&g.mat) {
        if case.level(r) != 0 {
            out.push(("root_element", direct_witness(g, r, v)));
        }
        return Ok(out);
    }
    let l0 = w.highest();
    if parabolic::in_p(&g.mat, l0) {
        if let Some(wit) = extract_from_p(chev, g, &lower.plus, Side::Plus)? {
            out.push(("parabolic", wit));
        }
    }
    if parabolic::in_p_minus(&g.mat, l0) {
        if let Some(wit) = extract_from_p(chev, g, &lower.minus, Side::Minus)? {
            out.push(("opposite_parabolic", wit));
        }
    }
    if root_type_violation(chev, &g.mat).is_none() && !row_in_ideal(&g.mat, &lower.plus) {
        if let Some(&l1) = w.components()[1].iter().find(|&&l1| parabolic::in_p(&g.mat, l1)) {
            if let Some(wit) = extract_from_p_lambda(chev, g, l1, lower)? {
                out.push(("weight_parabolic", wit));
            }
        }
    }
    let n = chev.dim();
    let one = chev.ring.one();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let d = g.entry(i, j);
            entries.push(if i == j { &d - &one } else { d });
        }
    }
    let b = Ideal::from_elems(&chev.ring, &entries)?;
    if !b.is_zero() && b.product(&b)?.is_zero() && !parabolic::in_p_minus(&g.mat, l0) {
        if let Some(wit) = extract_from_nilpotent(chev, g, &b, lower)? {
            out.push(("nilpotent", wit));
        }
    }
    Ok(out)
}

fn attempt(
    chev: &Chevalley,
    gens: &HGenerators,
    lower: &SigmaPair,
    seed: u64,
    index: usize,
) -> Result<Vec<(&'static str, Vec<HFactor>, Witness)>> {
    let mut rng = SplitMix64::for_sample(seed, index as u64);
    let factors = gens.sample(chev, &mut rng);
    let h = chev.eval_word(&gens.expand(chev, &factors)?)?;
    let mut out: Vec<_> = harvest(chev, &h, lower)?.into_iter().map(|(s, w)| (s, factors.clone(), w)).collect();
    // a conjugate of a root element of Δ is of root type and lies in H
    let gamma = *rng.pick(chev.case().delta());
    let mut conj_factors = factors.clone();
    conj_factors.push(HFactor::Delta(Letter::X { root: gamma, value: chev.ring.one() }));
    conj_factors.extend(factors.iter().rev().map(|f| match f {
        HFactor::Delta(l) => HFactor::Delta(l.inverse()),
        HFactor::Extra { index, inverse } => HFactor::Extra { index: *index, inverse: !inverse },
    }));
    let c = chev.conjugate_root(&h, gamma, &chev.ring.one())?;
    out.extend(harvest(chev, &c, lower)?.into_iter().map(|(s, w)| (s, conj_factors.clone(), w)));
    Ok(out)
}

/// Accumulates witnesses for `H = ⟨E(Δ, R), extra⟩` and compares with `target`.
pub fn level_certificate(
    chev: &Chevalley,
    gens: &HGenerators,
    target: &SigmaPair,
    opts: &LevelOptions,
) -> Result<LevelCertificate> {
    if !chev.ring.is_finite() {
        return Err(Error::Unsupported("level certificates need a finite ring".into()));
    }
    let case = chev.case();
    let mut lower = SigmaPair::zero(&chev.ring);
    let mut witnesses = Vec::new();

    // extra words that are themselves root elements
    for (i, w) in gens.extra.iter().enumerate() {
        let g = chev.eval_word(w)?;
        if let Some((r, v)) = chev.as_root_element(&g.mat) {
            if case.level(r) != 0 && absorb(&mut lower, case.level(r), &v)? {
                witnesses.push(LevelWitness {
                    source: "generator",
                    attempt: 0,
                    factors: vec![HFactor::Extra { index: i, inverse: false }],
                    witness: direct_witness(&g, r, v),
                });
            }
        }
    }

    let mut attempts = 0;
    let batch = opts.batch.max(1);
    while attempts < opts.budget && lower != *target && target.contains(&lower)? {
        let n = batch.min(opts.budget - attempts);
        let base = attempts;
        let snapshot = lower.clone();
        let results = opts.exec.map(n, |k| attempt(chev, gens, &snapshot, opts.seed, base + k));
        for (k, r) in results.into_iter().enumerate() {
            for (source, factors, witness) in r? {
                let level = case.level(witness.root);
                if absorb(&mut lower, level, &witness.value)? {
                    witnesses.push(LevelWitness { source, attempt: base + k, factors, witness });
                }
            }
        }
        attempts += n;
    }

    let mut upper_failures = 0;
    let upper_checked = opts.upper_samples;
    let checks = opts.exec.map(upper_checked, |k| -> Result<bool> {
        let mut rng = SplitMix64::for_sample(opts.seed ^ 0x0005_eed0_fa11, k as u64);
        let factors = gens.sample(chev, &mut rng);
        let h = chev.eval_word(&gens.expand(chev, &factors)?)?;
        in_normalizer(chev, &h, target)
    });
    for c in checks {
        if !c? {
            upper_failures += 1;
        }
    }
    let verdict = if !target.contains(&lower)? {
        Verdict::Exceeds
    } else if lower == *target && upper_failures == 0 {
        Verdict::Certified
    } else {
        Verdict::Incomplete
    };
    Ok(LevelCertificate { target: target.clone(), lower, witnesses, attempts, upper_checked, upper_failures, verdict })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub pass: bool,
    pub reduced_target: String,
    pub reduced_lower: String,
    pub witnesses_checked: usize,
    pub samples_checked: usize,
    pub sample_failures: usize,
}

/// Reduces witnesses modulo `ideal` and compares the ideals they generate with
/// the reduction of `sigma`; sampled reduced `H`-words must pass the reduced
/// normalizer test.
pub fn level_reduction_check(
    chev: &Chevalley,
    gens: &HGenerators,
    ideal: &Ideal,
    sigma: &SigmaPair,
    opts: &LevelOptions,
) -> Result<ReductionReport> {
    let q = chev.ring.quotient(ideal)?;
    let reduced_target = sigma.reduce(&q)?;
    let cert = level_certificate(chev, gens, sigma, opts)?;
    let (small, _) = chev.reduce(&chev.identity(), &q)?;
    let mut reduced_lower = SigmaPair::zero(&small.ring);
    for w in &cert.witnesses {
        let v = q.apply(&w.witness.value)?;
        if !v.is_zero() {
            absorb(&mut reduced_lower, chev.case().level(w.root()), &v)?;
        }
        // the reduced end point is the reduced root element
        let end = w.witness.trace.replay(chev)?;
        let (_, red) = chev.reduce(&end, &q)?;
        if red.mat != small.root_elt(w.root(), &v).mat {
            return Err(Error::Internal("reduced witness is not the reduced root element".into()));
        }
    }
    let samples = opts.upper_samples;
    let checks = opts.exec.map(samples, |k| -> Result<bool> {
        let mut rng = SplitMix64::for_sample(opts.seed ^ 0x0dd_5eed, k as u64);
        let factors = gens.sample(chev, &mut rng);
        let h = chev.eval_word(&gens.expand(chev, &factors)?)?;
        let (_, red) = chev.reduce(&h, &q)?;
        in_normalizer(&small, &red, &reduced_target)
    });
    let mut sample_failures = 0;
    for c in checks {
        if !c? {
            sample_failures += 1;
        }
    }
    let pass = cert.verdict == Verdict::Certified && reduced_lower == reduced_target && sample_failures == 0;
    Ok(ReductionReport {
        pass,
        reduced_target: reduced_target.to_string(),
        reduced_lower: reduced_lower.to_string(),
        witnesses_checked: cert.witnesses.len(),
        samples_checked: samples,
        sample_failures,
    })
}

/// Root elements generating `E(Φ, Δ, R, σ)` beyond `E(Δ, R)`: one per orbit.
pub fn sigma_extra_words(chev: &Chevalley, sigma: &SigmaPair) -> Vec<Word> {
    let case = chev.case();
    let mut out = Vec::new();
    for (ideal, root) in [(&sigma.plus, case.max_root()), (&sigma.minus, case.neg(case.max_root()))] {
        for g in ideal.generators() {
            if !g.is_zero() {
                out.push(vec![Letter::X { root, value: g }]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::Rep;
    use crate::rings::Ring;
    use crate::roots::CaseTag;

    fn chev(tag: CaseTag) -> Chevalley {
        Chevalley::new(Rep::new(tag, 0).unwrap(), Ring::parse("z4").unwrap())
    }

    #[test]
    fn no_extra_words_gives_zero_level() {
        let c = chev(CaseTag::B);
        let gens = HGenerators::new(Vec::new());
        let zero = SigmaPair::zero(&c.ring);
        let cert = level_certificate(&c, &gens, &zero, &LevelOptions::new(16, 1)).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert!(cert.witnesses.is_empty());
    }

    #[test]
    fn max_root_generator_is_witnessed() {
        let c = chev(CaseTag::B);
        let delta = c.case().max_root();
        let gens = HGenerators::new(vec![vec![Letter::X { root: delta, value: c.ring.from_int(2) }]]);
        let target = SigmaPair::parse(&c.ring, "(2),(0)").unwrap();
        let cert = level_certificate(&c, &gens, &target, &LevelOptions::new(64, 7)).unwrap();
        assert_eq!(cert.lower, target);
        assert_eq!(cert.verdict, Verdict::Certified);
        for w in &cert.witnesses {
            assert!(w.replay(&c, &gens).unwrap());
        }
    }

    #[test]
    fn product_word_needs_extraction() {
        let c = chev(CaseTag::C);
        let case = c.case().clone();
        let (b1, b2) = (case.omega_plus()[0], case.omega_plus()[5]);
        let word = vec![Letter::X { root: b1, value: c.ring.from_int(2) }, Letter::X { root: b2, value: c.ring.from_int(2) }];
        let gens = HGenerators::new(vec![word]);
        let target = SigmaPair::parse(&c.ring, "(2),(0)").unwrap();
        let cert = level_certificate(&c, &gens, &target, &LevelOptions::new(64, 3)).unwrap();
        assert_eq!(cert.lower, target);
        assert!(cert.witnesses.iter().all(|w| w.replay(&c, &gens).unwrap()));
    }

    #[test]
    fn reduction_mod_two() {
        let c = chev(CaseTag::B);
        let sigma = SigmaPair::parse(&c.ring, "(2),(0)").unwrap();
        let gens = HGenerators::new(sigma_extra_words(&c, &sigma));
        let two = Ideal::parse(&c.ring, "(2)").unwrap();
        let rep = level_reduction_check(&c, &gens, &two, &sigma, &LevelOptions::new(32, 5)).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.reduced_lower, "((0),(0))");
    }
}
