//! Verification suites, one group per acceptance criterion.
//!
//! Every suite is deterministic in `(seed, counts)`. Failures never abort a
//! suite: errors are recorded as counterexamples and the suite reports
//! `pass = false`.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::forms::{self, OrbitSampler};
use crate::overgroup::extract::{extract_from_nilpotent, extract_from_p, extract_from_p_lambda, Witness};
use crate::overgroup::ideals::{ab_ideals, root_type_violation};
use crate::overgroup::level::{level_reduction_check, sigma_extra_words, HGenerators, LevelOptions};
use crate::overgroup::parabolic::{self, chevalley_matsumoto, from_coords, Side};
use crate::overgroup::{in_normalizer, transporter_check, SigmaPair};
use crate::rep::{Chevalley, GroupElement, Letter, Rep, Word};
use crate::rings::{Ideal, Ring, RingElem};
use crate::rng::SplitMix64;
use crate::roots::{CaseTag, EmbeddingType, RootId};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub pass: bool,
    pub checked: u64,
    pub counterexample: Option<Value>,
}

/// Sample counts. `full` matches the acceptance criteria, `quick` is for the
/// self-test command.
#[derive(Clone, Debug, Serialize)]
pub struct Counts {
    pub root_type: usize,
    pub orbit_samples: usize,
    pub decompositions: usize,
    pub normalizer_words: usize,
    pub transporter_words: usize,
    pub extractions: usize,
    pub ideal_members: usize,
    pub level_budget: usize,
}

impl Counts {
    pub fn full() -> Counts {
        Counts {
            root_type: 500,
            orbit_samples: 1000,
            decompositions: 200,
            normalizer_words: 500,
            transporter_words: 50,
            extractions: 100,
            ideal_members: 200,
            level_budget: 128,
        }
    }

    pub fn quick() -> Counts {
        Counts {
            root_type: 40,
            orbit_samples: 100,
            decompositions: 20,
            normalizer_words: 40,
            transporter_words: 4,
            extractions: 10,
            ideal_members: 20,
            level_budget: 64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub exec: Exec,
    pub counts: Counts,
}

impl SuiteOptions {
    pub fn full(seed: u64) -> SuiteOptions {
        SuiteOptions { seed, exec: Exec::default(), counts: Counts::full() }
    }

    pub fn quick(seed: u64) -> SuiteOptions {
        SuiteOptions { seed, exec: Exec::default(), counts: Counts::quick() }
    }
}

/// Accumulates checks; keeps the first counterexample.
struct Tally {
    name: String,
    checked: u64,
    counterexample: Option<Value>,
}

impl Tally {
    fn new(name: String) -> Tally {
        Tally { name, checked: 0, counterexample: None }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(detail());
        }
    }

    /// Folds per-sample outcomes (`None` = pass) in sample order.
    fn absorb(&mut self, outcomes: Vec<Option<Value>>) {
        for o in outcomes {
            let failed = o.is_some();
            self.check(!failed, || o.unwrap());
        }
    }

    fn report(self) -> SuiteReport {
        SuiteReport { name: self.name, pass: self.counterexample.is_none(), checked: self.checked, counterexample: self.counterexample }
    }
}

fn run(name: String, f: impl FnOnce(&mut Tally) -> Result<()>) -> SuiteReport {
    let mut t = Tally::new(name);
    if let Err(e) = f(&mut t) {
        t.check(false, || json!({ "error": e.to_string() }));
    }
    t.report()
}

/// Outcome of one sample: `Ok(None)` passes, anything else is a counterexample.
fn outcome(index: usize, r: Result<Option<String>>) -> Option<Value> {
    match r {
        Ok(None) => None,
        Ok(Some(msg)) => Some(json!({ "sample": index, "failure": msg })),
        Err(e) => Some(json!({ "sample": index, "error": e.to_string() })),
    }
}

fn fail_unless(ok: bool, msg: impl FnOnce() -> String) -> Result<Option<String>> {
    Ok(if ok { None } else { Some(msg()) })
}

pub fn case_label(rep: &Rep) -> String {
    rep.case().name()
}

/// `(a, 5)`, `(a, 6)`, `(b, -)`, `(c, -)`.
pub fn standard_cases() -> Vec<Arc<Rep>> {
    [(CaseTag::A, 5), (CaseTag::A, 6), (CaseTag::B, 0), (CaseTag::C, 0)]
        .into_iter()
        .map(|(t, l)| Rep::new(t, l).expect("standard cases build"))
        .collect()
}

fn ring(spec: &str) -> Arc<Ring> {
    Ring::parse(spec).expect("built-in ring spec")
}

// ---------------------------------------------------------------------------
// root systems and weights

pub fn lemma_suite(rep: &Rep) -> Vec<SuiteReport> {
    let case = rep.case().clone();
    let w = rep.weights().clone();
    let label = case_label(rep);
    let name = |s: &str| format!("{label}/{s}");
    let l0 = w.highest();
    let mut out = Vec::new();

    out.push(run(name("max_root_coefficients"), |t| {
        let c = case.coeffs(case.max_root());
        t.check(c[case.crossed] == 1 && c[case.adjacent] == 2, || json!({ "max_root": c }));
        Ok(())
    }));

    out.push(run(name("omega_orbits"), |t| {
        let outside: Vec<RootId> = case.roots().filter(|&r| !case.in_delta(r)).collect();
        let mut orbits = case.orbits(&outside, case.delta());
        orbits.iter_mut().for_each(|o| o.sort_unstable());
        orbits.sort();
        let mut expected = vec![case.omega_plus().to_vec(), case.omega_minus().to_vec()];
        expected.iter_mut().for_each(|o| o.sort_unstable());
        expected.sort();
        t.check(orbits == expected, || json!({ "orbit_sizes": orbits.iter().map(|o| o.len()).collect::<Vec<_>>() }));
        Ok(())
    }));

    out.push(run(name("delta_prime_orbits"), |t| {
        let rest: Vec<RootId> = case.delta().iter().copied().filter(|r| !case.delta_prime().contains(r)).collect();
        let orbits = case.orbits(&rest, case.delta_prime());
        let mut signs: Vec<i32> = Vec::new();
        for o in &orbits {
            let s = case.coeffs(o[0])[case.adjacent];
            t.check(o.iter().all(|&r| case.coeffs(r)[case.adjacent] == s), || json!({ "mixed_orbit": o }));
            signs.push(s);
        }
        signs.sort_unstable();
        t.check(signs == vec![-1, 1], || json!({ "adjacent_coefficients": signs }));
        Ok(())
    }));

    out.push(run(name("partner_roots"), |t| {
        for beta in case.roots().filter(|&r| !case.in_delta(r)) {
            let a = case.partner_root(beta)?;
            t.check(case.in_delta(a) && case.add(a, beta).is_some(), || json!({ "beta": case.format_root(beta) }));
        }
        Ok(())
    }));

    out.push(run(name("sigma_split"), |t| {
        for &l1 in &w.components()[1] {
            let s = w.sigma_split(l1)?;
            let at = || json!({ "lambda1": w.format_weight(l1) });
            let first = w.diff(l1, l0);
            t.check(first.is_some() && s.minus == vec![first.unwrap()], at);
            t.check(!s.zero.is_empty(), at);
            let b0 = first.unwrap_or(0);
            for &beta in &s.plus {
                let ok = s.delta_cap.iter().any(|&g| case.add(beta, g).is_some() && case.add(b0, g).is_none());
                t.check(ok, || json!({ "lambda1": w.format_weight(l1), "item": 3, "beta": case.format_root(beta) }));
            }
            t.check(!s.delta_cap_prime.is_empty(), at);
            for &mu in w.components()[1].iter().filter(|&&m| m != l1) {
                let ok = w.weights().any(|nu| w.diff(mu, nu).is_some_and(|r| s.delta_cap_prime.contains(&r)));
                t.check(ok, || json!({ "lambda1": w.format_weight(l1), "item": 4, "mu": w.format_weight(mu) }));
            }
            let mirror = w.diff(l0, l1).expect("adjacent to λ0");
            for &a in case.omega_plus().iter().filter(|&&a| case.pairing(a, mirror) == 1) {
                let ok = s.zero.iter().any(|&g| case.add(a, g).is_some());
                t.check(ok, || json!({ "lambda1": w.format_weight(l1), "item": 5, "alpha": case.format_root(a) }));
            }
        }
        Ok(())
    }));

    out.push(run(name("neighbours"), |t| {
        for &l1 in &w.components()[1] {
            t.check(w.neighbor_in_component(l1, None).is_some(), || json!({ "lambda1": w.format_weight(l1) }));
            for &nu in w.components()[1].iter().filter(|&&n| w.distance(l1, n) == 1) {
                t.check(w.neighbor_in_component(l1, Some(nu)).is_some(), || {
                    json!({ "lambda1": w.format_weight(l1), "nu": w.format_weight(nu) })
                });
            }
        }
        Ok(())
    }));

    out.push(run(name("notroot"), |t| {
        for a in case.roots() {
            let na = case.neg(a);
            for lam in w.weights() {
                let Some(x) = w.shift(lam, na) else { continue };
                for rho in w.weights().filter(|&r| r != x && w.shift(r, a).is_some()) {
                    t.check(w.distance(lam, rho) >= 2, || {
                        json!({ "alpha": case.format_root(a), "lambda": w.format_weight(lam), "rho": w.format_weight(rho) })
                    });
                }
            }
        }
        Ok(())
    }));

    out.push(run(name("top_edge"), |t| {
        let edges: Vec<_> = w.diagram_edges().into_iter().filter(|e| e.upper == l0 || e.lower == l0).collect();
        t.check(!edges.is_empty() && edges.iter().all(|e| e.simple == case.crossed), || {
            json!({ "labels": edges.iter().map(|e| e.simple).collect::<Vec<_>>() })
        });
        Ok(())
    }));

    out.push(run(name("components"), |t| {
        let singles = w.components().iter().filter(|c| c.len() == 1).count();
        let total: usize = w.component_sizes().iter().sum();
        t.check(total == w.len(), || json!({ "sizes": w.component_sizes() }));
        match case.kind() {
            EmbeddingType::First => t.check(singles == 1, || json!({ "sizes": w.component_sizes() })),
            EmbeddingType::Second => {
                t.check(singles == 2, || json!({ "sizes": w.component_sizes() }));
                t.check(w.weights().all(|l| w.negation(l).is_some()), || json!("weight without negative"));
            }
        }
        Ok(())
    }));
    out
}

// ---------------------------------------------------------------------------
// Steinberg relations

pub const STEINBERG_RINGS: [&str; 3] = ["z8", "z9", "f2t2"];

fn steinberg_pair(chev: &Chevalley, a: RootId, b: RootId, rng: &mut SplitMix64) -> Result<Option<String>> {
    let case = chev.case();
    let rep = &chev.rep;
    let xi = chev.ring.random(rng);
    let zeta = chev.ring.random(rng);
    let x = |r: RootId, v: &RingElem| Letter::X { root: r, value: v.clone() };
    if a == b {
        let mut g = chev.root_elt(a, &xi);
        chev.mul_letter(&mut g, &x(a, &zeta))?;
        if g.mat != chev.root_elt(a, &xi.try_add(&zeta)?).mat {
            return Ok(Some("additivity".into()));
        }
    } else if b != case.neg(a) {
        let mut g = chev.root_elt(a, &xi);
        for l in [x(b, &zeta), x(a, &xi.neg()), x(b, &zeta.neg())] {
            chev.mul_letter(&mut g, &l)?;
        }
        match case.add(a, b) {
            Some(s) => {
                let n = rep.structure_constant(a, b).unwrap_or(0);
                if n.abs() != 1 {
                    return Ok(Some(format!("structure constant {n}")));
                }
                let v = xi.try_mul(&zeta)?.scale_sign(n as i8);
                if g.mat != chev.root_elt(s, &v).mat {
                    return Ok(Some("commutator formula".into()));
                }
            }
            None => {
                if !g.is_identity() {
                    return Ok(Some("roots with non-root sum do not commute".into()));
                }
            }
        }
    }
    // w_a(1) x_b(ε) w_a(1)⁻¹ = x_{s_a b}(±ε)
    let eps = chev.ring.random_unit(rng);
    let one = chev.ring.one();
    let mut g = chev.root_elt(b, &eps);
    chev.letter_mul(&Letter::W { root: a, unit: one.clone() }, &mut g)?;
    chev.mul_letter(&mut g, &Letter::W { root: a, unit: one.neg() })?;
    let ok = match chev.as_root_element(&g.mat) {
        Some((r, v)) => r == case.reflect(b, a) && (v == eps || v == eps.neg()),
        None => false,
    };
    fail_unless(ok, || "Weyl conjugation".into())
}

/// All ordered root pairs, one sampled value pair per ring.
pub fn steinberg_suite(rep: &Arc<Rep>, opts: &SuiteOptions) -> Vec<SuiteReport> {
    let n = rep.case().len();
    STEINBERG_RINGS
        .iter()
        .enumerate()
        .map(|(ri, spec)| {
            run(format!("{}/steinberg/{spec}", case_label(rep)), |t| {
                let chev = Chevalley::new(rep.clone(), ring(spec));
                let seed = opts.seed ^ (ri as u64) << 48;
                let outcomes = opts.exec.map(n * n, |k| {
                    let (a, b) = (k / n, k % n);
                    let mut rng = SplitMix64::for_sample(seed, k as u64);
                    outcome(k, steinberg_pair(&chev, a, b, &mut rng)).map(|mut v| {
                        v["alpha"] = json!(chev.case().format_root(a));
                        v["beta"] = json!(chev.case().format_root(b));
                        v
                    })
                });
                t.absorb(outcomes);
                Ok(())
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// root type elements

pub fn root_type_suite(rep: &Arc<Rep>, opts: &SuiteOptions) -> Vec<SuiteReport> {
    let chev = Chevalley::new(rep.clone(), ring("z8"));
    let case = rep.case().clone();
    let n = opts.counts.root_type;
    let label = case_label(rep);
    let conj = run(format!("{label}/root_type/conjugates"), |t| {
        let outcomes = opts.exec.map(n, |k| {
            let mut rng = SplitMix64::for_sample(opts.seed, k as u64);
            let r = (|| {
                let h = chev.eval_word(&chev.random_word(8, &mut rng))?;
                let a = rng.below(case.len());
                let g = chev.conjugate_root(&h, a, &chev.ring.random(&mut rng))?;
                Ok(root_type_violation(&chev, &g.mat))
            })();
            outcome(k, r)
        });
        t.absorb(outcomes);
        Ok(())
    });
    let angle = run(format!("{label}/root_type/angle_pi_3"), |t| {
        let outcomes = opts.exec.map(n, |k| {
            let mut rng = SplitMix64::for_sample(opts.seed ^ 0x3, k as u64);
            let r = (|| {
                let a = rng.below(case.len());
                let partners: Vec<RootId> = case.roots().filter(|&b| case.pairing(a, b) == 1).collect();
                let b = *rng.pick(&partners);
                let h = chev.eval_word(&chev.random_word(8, &mut rng))?;
                let mut x = chev.root_elt(a, &chev.ring.random(&mut rng));
                chev.mul_letter(&mut x, &Letter::X { root: b, value: chev.ring.random(&mut rng) })?;
                let g = chev.conjugate(&h, &x)?;
                Ok(root_type_violation(&chev, &g.mat))
            })();
            outcome(k, r)
        });
        t.absorb(outcomes);
        Ok(())
    });
    vec![conj, angle]
}

// ---------------------------------------------------------------------------
// invariant forms

fn int_column(g: &GroupElement, j: usize) -> Vec<i128> {
    (0..g.mat.n()).map(|i| g.mat.raw(0, i, j) as i128).collect()
}

fn int_row(g: &GroupElement, i: usize) -> Vec<i128> {
    (0..g.mat.n()).map(|j| g.mat.raw(0, i, j) as i128).collect()
}

pub fn forms_suite(rep: &Arc<Rep>, opts: &SuiteOptions) -> Vec<SuiteReport> {
    let label = case_label(rep);
    if rep.case().kind() == EmbeddingType::First {
        return vec![run(format!("{label}/forms"), |t| {
            t.check(matches!(forms::build_bilinear(rep), Err(Error::Unsupported(_))), || json!("first type produced a form"));
            Ok(())
        })];
    }
    let n = opts.counts.orbit_samples;
    let mut out = Vec::new();
    out.push(run(format!("{label}/forms/bilinear_invariance"), |t| {
        let h = forms::build_bilinear(rep)?;
        for spec in ["int", "z9"] {
            let v = forms::bilinear_violation(rep, &h, &ring(spec))?;
            t.check(v.is_none(), || json!({ "ring": spec, "root": v.map(|r| rep.case().format_root(r)) }));
        }
        Ok(())
    }));
    let pi = forms::build_pi_form(rep, opts.seed);
    out.push(run(format!("{label}/forms/pi_form"), |t| {
        let f = pi.as_ref().map_err(|e| e.clone())?;
        let w = rep.weights();
        let c = f.q.get(w.highest(), w.lowest().expect("second type"));
        t.check(c.abs() == 1, || json!({ "corner": c }));
        t.check(!f.q.has_diagonal(), || json!("diagonal term"));
        Ok(())
    }));
    let Ok(f) = pi else { return out };
    let dim = rep.dim();
    // orbit vectors plus every column of some group elements
    let words = n.div_ceil(dim).max(1);
    out.push(run(format!("{label}/forms/orbit_int"), |t| {
        let s = OrbitSampler::new(rep, 4);
        let vecs = opts.exec.map(n, |k| {
            let v = s.vector(&mut SplitMix64::for_sample(opts.seed ^ 0x51, k as u64));
            (f.q.eval(&v) != 0).then(|| json!({ "sample": k }))
        });
        t.absorb(vecs);
        let z = Chevalley::new(rep.clone(), ring("int"));
        for k in 0..words {
            let mut rng = SplitMix64::for_sample(opts.seed ^ 0x52, k as u64);
            let g = z.eval_word(&z.random_word(6, &mut rng))?;
            for j in 0..dim {
                t.check(f.q.eval(&int_column(&g, j)) == 0, || json!({ "word": k, "column": j }));
            }
        }
        Ok(())
    }));
    out.push(run(format!("{label}/forms/orbit_z9"), |t| {
        let s = OrbitSampler::new(rep, 4);
        let vecs = opts.exec.map(n, |k| {
            let v = s.vector_mod(&mut SplitMix64::for_sample(opts.seed ^ 0x91, k as u64), 9);
            (f.q.eval_mod(&v, 9) != 0).then(|| json!({ "sample": k }))
        });
        t.absorb(vecs);
        let z9 = Chevalley::new(rep.clone(), ring("z9"));
        for k in 0..words {
            let mut rng = SplitMix64::for_sample(opts.seed ^ 0x92, k as u64);
            let g = z9.eval_word(&z9.random_word(8, &mut rng))?;
            for j in 0..dim {
                let col: Vec<i64> = (0..dim).map(|i| g.mat.raw(0, i, j)).collect();
                t.check(f.q.eval_mod(&col, 9) == 0, || json!({ "word": k, "column": j }));
            }
        }
        Ok(())
    }));
    out.push(run(format!("{label}/forms/dual_transfer"), |t| {
        let h = forms::build_bilinear(rep)?;
        let s = OrbitSampler::new(rep, 4);
        for k in 0..n.min(200) {
            let cov = s.covector(&mut SplitMix64::for_sample(opts.seed ^ 0xd1, k as u64));
            t.check(f.q.eval(&h.transfer(&cov)) == 0, || json!({ "sample": k }));
        }
        let z = Chevalley::new(rep.clone(), ring("int"));
        let mut rng = SplitMix64::new(opts.seed ^ 0xd2);
        let g = z.eval_word(&z.random_word(6, &mut rng))?;
        for i in 0..dim {
            t.check(f.q.eval(&h.transfer(&int_row(&g, i))) == 0, || json!({ "row": i }));
        }
        Ok(())
    }));
    out
}

// ---------------------------------------------------------------------------
// Chevalley–Matsumoto decomposition

fn random_coords(chev: &Chevalley, roots: &[RootId], ideal: Option<&Ideal>, rng: &mut SplitMix64) -> Vec<(RootId, RingElem)> {
    let mut out = Vec::new();
    for &r in roots {
        if rng.coin() {
            let v = match ideal {
                Some(i) => i.random(rng),
                None => chev.ring.random(rng),
            };
            out.push((r, v));
        }
    }
    out
}

fn levi_word(chev: &Chevalley, len: usize, rng: &mut SplitMix64) -> Word {
    let case = chev.case();
    let mut word = chev.random_word_in(case.delta(), len, rng);
    word.push(Letter::H { root: rng.below(case.len()), unit: chev.ring.random_unit(rng) });
    word.push(Letter::W { root: *rng.pick(case.delta()), unit: chev.ring.random_unit(rng) });
    word
}

pub fn decomposition_suite(rep: &Arc<Rep>, opts: &SuiteOptions) -> Vec<SuiteReport> {
    let chev = Chevalley::new(rep.clone(), ring("z8"));
    let case = rep.case().clone();
    let w = rep.weights().clone();
    let l0 = w.highest();
    vec![run(format!("{}/chevalley_matsumoto", case_label(rep)), |t| {
        let outcomes = opts.exec.map(opts.counts.decompositions, |k| {
            let mut rng = SplitMix64::for_sample(opts.seed, k as u64);
            let r = (|| {
                let v = from_coords(&chev, &random_coords(&chev, case.omega_minus(), None, &mut rng))?;
                let l = chev.eval_word(&levi_word(&chev, 6, &mut rng))?;
                let u = from_coords(&chev, &random_coords(&chev, case.omega_plus(), None, &mut rng))?;
                let g = chev.mul(&chev.mul(&v, &l)?, &u)?;
                let cm = chevalley_matsumoto(&chev, &g)?;
                let back = chev.mul(&chev.mul(&cm.lower, &cm.levi)?, &cm.upper)?;
                if back.mat != g.mat {
                    return Ok(Some("round trip".into()));
                }
                let lp = parabolic::profile(&w, &cm.lower.mat, l0);
                let mp = parabolic::profile(&w, &cm.levi.mat, l0);
                let up = parabolic::profile(&w, &cm.upper.mat, l0);
                if !(lp.in_unipotent_minus && mp.in_levi && up.in_unipotent) {
                    return Ok(Some("factor profiles".into()));
                }
                fail_unless(cm.lower.mat == v.mat && cm.upper.mat == u.mat, || "factors differ from construction".into())
            })();
            outcome(k, r)
        });
        t.absorb(outcomes);
        let corner = chev.weyl(case.max_root(), &chev.ring.one())?;
        t.check(matches!(chevalley_matsumoto(&chev, &corner), Err(Error::Decomposition(_))), || {
            json!("non-unit corner accepted")
        });
        Ok(())
    })]
}

// ---------------------------------------------------------------------------
// normalizer and transporter

/// A word of `E(Φ, Δ, R, σ) T G(Δ, R)`.
fn sigma_torus_levi_word(chev: &Chevalley, sigma: &SigmaPair, rng: &mut SplitMix64) -> Word {
    let mut word = sigma.sampler(chev).word(6, rng);
    word.extend(levi_word(chev, 4, rng));
    word
}

pub fn normalizer_suite(rep: &Arc<Rep>, sigma_text: &str, opts: &SuiteOptions) -> Vec<SuiteReport> {
    normalizer_suite_over(&Chevalley::new(rep.clone(), ring("z4")), sigma_text, opts)
}

/// Normalizer and transporter checks on sampled `E T G(Δ)` words over the ring of `chev`.
pub fn normalizer_suite_over(chev: &Chevalley, sigma_text: &str, opts: &SuiteOptions) -> Vec<SuiteReport> {
    let chev = chev.clone();
    let label = case_label(&chev.rep);
    let sigma = match SigmaPair::parse(&chev.ring, sigma_text) {
        Ok(s) => s,
        Err(e) => return vec![run(format!("{label}/normalizer/{sigma_text}"), |_| Err(e))],
    };
    let seed = opts.seed ^ sigma_text.bytes().fold(0u64, |h, b| h.wrapping_mul(131).wrapping_add(b as u64));
    let n = opts.counts.normalizer_words;
    let m = opts.counts.transporter_words.min(n);
    let sample = |k: usize| -> Result<GroupElement> {
        let mut rng = SplitMix64::for_sample(seed, k as u64);
        chev.eval_word(&sigma_torus_levi_word(&chev, &sigma, &mut rng))
    };
    let norm = run(format!("{label}/normalizer/{sigma}"), |t| {
        t.absorb(opts.exec.map(n, |k| outcome(k, sample(k).and_then(|g| fail_unless(in_normalizer(&chev, &g, &sigma)?, || "normalizer".into())))));
        Ok(())
    });
    let tran = run(format!("{label}/transporter/{sigma}"), |t| {
        t.absorb(opts.exec.map(m, |k| outcome(k, sample(k).and_then(|g| fail_unless(transporter_check(&chev, &g, &sigma)?, || "transporter".into())))));
        // a generator outside E(Φ, Δ, R, σ) is rejected
        let bad = chev.root_elt(chev.case().omega_plus()[0], &chev.ring.one());
        t.check(!transporter_check(&chev, &bad, &sigma)?, || json!("x_β(1) passed"));
        Ok(())
    });
    vec![norm, tran]
}

// ---------------------------------------------------------------------------
// extraction

fn check_witness(chev: &Chevalley, wit: &Witness, sigma: &SigmaPair) -> Result<Option<String>> {
    if !wit.verify(chev)? {
        return Ok(Some("witness replay differs from its root element".into()));
    }
    fail_unless(!sigma.ideal_for(chev, wit.root).contains(&wit.value)?, || "witness value lies in the ideal".into())
}

pub fn extraction_suite(rep: &Arc<Rep>, opts: &SuiteOptions) -> Vec<SuiteReport> {
    let chev = Chevalley::new(rep.clone(), ring("z4"));
    let case = rep.case().clone();
    let w = rep.weights().clone();
    let label = case_label(rep);
    let n = opts.counts.extractions;
    let two = Ideal::parse(&chev.ring, "(2)").expect("ideal");
    let sigma = SigmaPair::parse(&chev.ring, "(2),(0)").expect("pair");
    let mut out = Vec::new();

    out.push(run(format!("{label}/extract/p"), |t| {
        let outcomes = opts.exec.map(2 * n, |k| {
            let mut rng = SplitMix64::for_sample(opts.seed, k as u64);
            let side = if k % 2 == 0 { Side::Plus } else { Side::Minus };
            let r = (|| {
                let roots = parabolic::unipotent_roots(&chev, w.highest(), side);
                let inside = rng.below(4) == 0;
                let mut coords = random_coords(&chev, &roots, inside.then_some(&two), &mut rng);
                if coords.is_empty() {
                    coords.push((roots[0], chev.ring.one()));
                }
                let expect = coords.iter().any(|(_, v)| !two.contains(v).unwrap_or(true));
                let u = from_coords(&chev, &coords)?;
                let l = chev.eval_word(&chev.random_word_in(case.delta(), 5, &mut rng))?;
                let g = chev.mul(&l, &u)?;
                let pair = match side {
                    Side::Plus => SigmaPair::new(two.clone(), Ideal::zero(&chev.ring))?,
                    Side::Minus => SigmaPair::new(Ideal::zero(&chev.ring), two.clone())?,
                };
                match (extract_from_p(&chev, &g, &two, side)?, expect) {
                    (Some(wit), true) => {
                        let top = match side {
                            Side::Plus => case.max_root(),
                            Side::Minus => case.neg(case.max_root()),
                        };
                        if wit.root != top {
                            return Ok(Some("witness is not at the extreme root".into()));
                        }
                        check_witness(&chev, &wit, &pair)
                    }
                    (None, false) => Ok(None),
                    (Some(_), false) => Ok(Some("witness claimed for coordinates inside the ideal".into())),
                    (None, true) => Ok(Some("no witness for a coordinate outside the ideal".into())),
                }
            })();
            outcome(k, r)
        });
        t.absorb(outcomes);
        Ok(())
    }));

    out.push(run(format!("{label}/extract/p_lambda"), |t| {
        let outcomes = opts.exec.map(n, |k| {
            let mut rng = SplitMix64::for_sample(opts.seed ^ 0x1a, k as u64);
            let r = (|| {
                let inside = k % 4 == 3;
                for _ in 0..64 {
                    let h = chev.eval_word(&chev.random_word_in(case.delta(), 6, &mut rng))?;
                    let b = *rng.pick(case.omega_plus());
                    let xi = if inside { two.random(&mut rng) } else { chev.ring.random_unit(&mut rng) };
                    let g = chev.conjugate_root(&h, b, &xi)?;
                    let Some(&l1) = w.components()[1].iter().find(|&&l| parabolic::in_p(&g.mat, l)) else { continue };
                    return match (extract_from_p_lambda(&chev, &g, l1, &sigma)?, inside) {
                        (Some(wit), false) => check_witness(&chev, &wit, &sigma),
                        (None, true) => Ok(None),
                        (Some(_), true) => Ok(Some("witness claimed inside G_σ".into())),
                        (None, false) => Ok(Some("no witness outside G_σ".into())),
                    };
                }
                Ok(Some("no instance in P_λ found".into()))
            })();
            outcome(k, r)
        });
        t.absorb(outcomes);
        Ok(())
    }));

    out.push(run(format!("{label}/extract/nilpotent"), |t| {
        let rings: Vec<(Chevalley, Ideal)> = [("z4", "(2)"), ("f2t2", "(t)")]
            .iter()
            .map(|(r, b)| {
                let c = Chevalley::new(rep.clone(), ring(r));
                let b = Ideal::parse(&c.ring, b).expect("ideal");
                (c, b)
            })
            .collect();
        let outcomes = opts.exec.map(n, |k| {
            let (c, b) = &rings[k % 2];
            let mut rng = SplitMix64::for_sample(opts.seed ^ 0x2b, k as u64);
            let r = (|| {
                let zero = SigmaPair::zero(&c.ring);
                let h = c.eval_word(&c.random_word_in(case.delta(), 6, &mut rng))?;
                let beta = *rng.pick(case.omega_plus());
                let mut xi = b.random(&mut rng);
                while xi.is_zero() {
                    xi = b.random(&mut rng);
                }
                let g = c.conjugate_root(&h, beta, &xi)?;
                let msg = match extract_from_nilpotent(c, &g, b, &zero)? {
                    Some(wit) => check_witness(c, &wit, &zero)?,
                    None => Some("no witness for the zero pair".into()),
                };
                if msg.is_some() {
                    return Ok(msg);
                }
                // the lower version lies in P⁻ and must be rejected
                let low = c.conjugate_root(&h, case.neg(beta), &xi)?;
                fail_unless(matches!(extract_from_nilpotent(c, &low, b, &zero), Err(Error::Domain(_))), || {
                    "element of P⁻ accepted".into()
                })
            })();
            outcome(k, r)
        });
        t.absorb(outcomes);
        Ok(())
    }));
    out
}

// ---------------------------------------------------------------------------
// ideal bounds

pub fn ideal_bound_suite(rep: &Arc<Rep>, opts: &SuiteOptions) -> Vec<SuiteReport> {
    let chev = Chevalley::new(rep.clone(), ring("z4"));
    let label = case_label(rep);
    let n = opts.counts.ideal_members;
    let l1s = rep.weights().components()[1].clone();
    let member = |sigma: &SigmaPair, k: usize, salt: u64| -> Result<GroupElement> {
        let mut rng = SplitMix64::for_sample(opts.seed ^ salt, k as u64);
        let s = sigma.sampler(&chev);
        let h = chev.eval_word(&s.word(6, &mut rng))?;
        let x = chev.eval_word(&[s.sample(&mut rng)])?;
        chev.conjugate(&h, &x)
    };
    let products = run(format!("{label}/ideals/products"), |t| {
        let sigma = SigmaPair::parse(&chev.ring, "(2),(0)")?;
        let outcomes = opts.exec.map(n, |k| {
            let r = (|| {
                let g = member(&sigma, k, 0xab)?;
                for &l1 in &l1s {
                    let ab = ab_ideals(&chev, &g, l1)?;
                    if !sigma.plus.contains_ideal(&ab.a.product(&ab.b)?)? || !sigma.minus.contains_ideal(&ab.a_prime.product(&ab.b_prime)?)? {
                        return Ok(Some(format!("bound fails at weight {l1}")));
                    }
                }
                Ok(None)
            })();
            outcome(k, r)
        });
        t.absorb(outcomes);
        Ok(())
    });
    let cube = run(format!("{label}/ideals/cube"), |t| {
        let sigma = SigmaPair::parse(&chev.ring, "(0),(2)")?;
        let outcomes = opts.exec.map(n, |k| {
            let r = (|| {
                let g = member(&sigma, k, 0xcb)?;
                for &l1 in &l1s {
                    if !ab_ideals(&chev, &g, l1)?.b.pow(3).is_zero() {
                        return Ok(Some(format!("cube nonzero at weight {l1}")));
                    }
                }
                Ok(None)
            })();
            outcome(k, r)
        });
        t.absorb(outcomes);
        Ok(())
    });
    vec![products, cube]
}

// ---------------------------------------------------------------------------
// level reduction

/// `(ring, σ, ideal)` instances: the reduced level must be the reduced pair.
pub const REDUCTION_INSTANCES: [(&str, &str, &str); 2] = [("z4", "(2),(0)", "(2)"), ("z8", "(2),(4)", "(4)")];

pub fn reduction_suite(rep: &Arc<Rep>, opts: &SuiteOptions) -> Vec<SuiteReport> {
    REDUCTION_INSTANCES
        .iter()
        .map(|&(r, s, i)| {
            run(format!("{}/reduction/{r}/{i}", case_label(rep)), |t| {
                let chev = Chevalley::new(rep.clone(), ring(r));
                let sigma = SigmaPair::parse(&chev.ring, s)?;
                let ideal = Ideal::parse(&chev.ring, i)?;
                let gens = HGenerators::new(sigma_extra_words(&chev, &sigma));
                let mut lo = LevelOptions::new(opts.counts.level_budget, opts.seed);
                lo.exec = opts.exec;
                let report = level_reduction_check(&chev, &gens, &ideal, &sigma, &lo)?;
                t.check(report.pass, || serde_json::to_value(&report).unwrap_or(Value::Null));
                Ok(())
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// acceptance criteria

pub const CRITERIA: [&str; 9] = [
    "combinatorial lemmas",
    "Steinberg relations",
    "root type identities",
    "invariant forms",
    "Chevalley-Matsumoto decomposition",
    "normalizer and transporter",
    "extraction soundness",
    "ideal bounds",
    "level reduction",
];

fn rep_of(tag: CaseTag, l: usize) -> Arc<Rep> {
    Rep::new(tag, l).expect("built-in case")
}

/// Runs criterion `n` (1-based) and returns its suites.
pub fn criterion(n: usize, opts: &SuiteOptions) -> Vec<SuiteReport> {
    let bc = || [rep_of(CaseTag::B, 0), rep_of(CaseTag::C, 0)];
    match n {
        1 => standard_cases().iter().flat_map(|r| lemma_suite(r)).collect(),
        2 => steinberg_suite(&rep_of(CaseTag::C, 0), opts),
        3 => standard_cases().iter().flat_map(|r| root_type_suite(r, opts)).collect(),
        4 => [rep_of(CaseTag::A, 6), rep_of(CaseTag::C, 0)].iter().flat_map(|r| forms_suite(r, opts)).collect(),
        5 => standard_cases().iter().flat_map(|r| decomposition_suite(r, opts)).collect(),
        6 => bc()
            .iter()
            .flat_map(|r| ["(2),(0)", "(2),(2)"].into_iter().flat_map(move |s| normalizer_suite(r, s, opts)))
            .collect(),
        7 => bc().iter().flat_map(|r| extraction_suite(r, opts)).collect(),
        8 => bc().iter().flat_map(|r| ideal_bound_suite(r, opts)).collect(),
        9 => bc().iter().flat_map(|r| reduction_suite(r, opts)).collect(),
        _ => vec![run(format!("criterion {n}"), |_| Err(Error::Domain("criteria are numbered 1 to 9".into())))],
    }
}

pub fn all_pass(reports: &[SuiteReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_lemmas_pass_for_every_rank() {
        for l in 5..=8 {
            let rep = rep_of(CaseTag::A, l);
            for r in lemma_suite(&rep) {
                assert!(r.pass, "{} {:?}", r.name, r.counterexample);
            }
        }
    }
}
