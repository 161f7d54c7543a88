use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use overgroup_core::exec::Exec;
use overgroup_core::forms;
use overgroup_core::io;
use overgroup_core::overgroup::level::{level_certificate, HFactor, HGenerators, LevelCertificate, LevelOptions, Verdict};
use overgroup_core::overgroup::parabolic::chevalley_matsumoto;
use overgroup_core::overgroup::{in_g_sigma, in_normalizer, transporter_check, SigmaPair};
use overgroup_core::rep::{Chevalley, Rep};
use overgroup_core::rings::{Ideal, Ring};
use overgroup_core::roots::{CaseTag, EmbeddingType};
use overgroup_core::suites::{self, Counts, SuiteOptions, SuiteReport};
use overgroup_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{sha256_hex, RunConfig};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Incomplete,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Incomplete => 3,
        }
    }

    fn of_suites(suites: &[SuiteReport]) -> Outcome {
        if suites::all_pass(suites) {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

pub struct Report {
    pub command: &'static str,
    pub config: RunConfig,
    /// Digest of every input file read, by path.
    pub inputs: BTreeMap<String, String>,
    pub suites: Vec<SuiteReport>,
    pub witnesses: Vec<Value>,
    pub result: Value,
    pub outcome: Outcome,
}

impl Report {
    fn new(command: &'static str, ctx: Context, suites: Vec<SuiteReport>, result: Value) -> Report {
        let outcome = Outcome::of_suites(&suites);
        Report { command, config: ctx.cfg, inputs: ctx.inputs, suites, witnesses: Vec::new(), result, outcome }
    }

    pub fn config_hash(&self) -> String {
        let key = json!({ "command": self.command, "config": self.config, "inputs": self.inputs });
        sha256_hex(key.to_string().as_bytes())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config,
            "config_hash": self.config_hash(),
            "inputs": self.inputs,
            "outcome": self.outcome,
            "result": self.result,
            "suites": self.suites,
            "witnesses": self.witnesses,
        })
    }
}

/// Resolved configuration plus the files read so far.
pub struct Context {
    pub cfg: RunConfig,
    pub inputs: BTreeMap<String, String>,
    pub exec: Exec,
}

impl Context {
    pub fn new(cfg: RunConfig, exec: Exec) -> Context {
        Context { cfg, inputs: BTreeMap::new(), exec }
    }

    fn read_json(&mut self, path: &str) -> Result<Value, CliError> {
        let bytes = std::fs::read(Path::new(path)).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
        self.inputs.insert(path.to_string(), sha256_hex(&bytes));
        serde_json::from_slice(&bytes).map_err(|e| CliError::Usage(format!("{path} is not valid JSON: {e}")))
    }

    fn rep(&self) -> Result<Arc<Rep>, CliError> {
        let tag = CaseTag::parse(self.cfg.case.as_deref().ok_or_else(|| CliError::Usage("--case is required".into()))?).map_err(usage)?;
        let l = match tag {
            CaseTag::A => self.cfg.l.ok_or_else(|| CliError::Usage("case a needs --l (5 to 10)".into()))?,
            _ => 0,
        };
        Rep::new(tag, l).map_err(usage)
    }

    fn ring(&mut self) -> Result<Arc<Ring>, CliError> {
        let spec = self.cfg.ring.get_or_insert_with(|| "z4".into()).clone();
        Ring::parse(&spec).map_err(usage)
    }

    fn chev(&mut self) -> Result<Chevalley, CliError> {
        let rep = self.rep()?;
        Ok(Chevalley::new(rep, self.ring()?))
    }

    fn suite_options(&self) -> SuiteOptions {
        let mut o = if self.cfg.quick() { SuiteOptions::quick(self.cfg.seed()) } else { SuiteOptions::full(self.cfg.seed()) };
        o.exec = self.exec;
        o
    }

    /// Fills in defaults so the hashed config records what actually ran.
    fn default_seed(&mut self) {
        self.cfg.seed.get_or_insert(1);
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn failure(name: &str, detail: Value) -> SuiteReport {
    SuiteReport { name: name.into(), pass: false, checked: 1, counterexample: Some(detail) }
}

fn passed(name: &str, checked: u64) -> SuiteReport {
    SuiteReport { name: name.into(), pass: true, checked, counterexample: None }
}

fn check(name: &str, ok: bool, detail: impl FnOnce() -> Value) -> SuiteReport {
    if ok {
        passed(name, 1)
    } else {
        failure(name, detail())
    }
}

pub fn info(ctx: Context) -> Result<Report, CliError> {
    let rep = ctx.rep()?;
    let (case, w) = (rep.case(), rep.weights());
    let delta_gens = case.delta_simple();
    let sizes = |set: &[usize]| case.orbits(set, &delta_gens).iter().map(|o| o.len()).collect::<Vec<_>>();
    let mut result = json!({
        "group": case.name(),
        "type": case.kind(),
        "rank": case.rank,
        "crossed": case.crossed,
        "adjacent": case.adjacent,
        "roots": case.len(),
        "positive_roots": case.roots().filter(|&r| case.is_positive(r)).count(),
        "max_root": case.coeffs(case.max_root()),
        "delta_roots": case.delta().len(),
        "omega_plus_orbits": sizes(case.omega_plus()),
        "omega_minus_orbits": sizes(case.omega_minus()),
        "weights": rep.dim(),
        "components": w.component_sizes(),
        "root_list": case.roots().map(|r| case.coeffs(r).to_vec()).collect::<Vec<_>>(),
    });
    if let Some(low) = w.lowest() {
        result["distance_to_lowest"] = json!(w.distance(w.highest(), low));
    }
    if ctx.cfg.weights.unwrap_or(false) {
        result["weight_list"] = w
            .weights()
            .map(|i| json!({ "index": i, "coords": w.coords(i), "component": w.component_of(i) }))
            .collect();
    }
    Ok(Report::new("info", ctx, Vec::new(), result))
}

pub fn lemmas(mut ctx: Context) -> Result<Report, CliError> {
    ctx.default_seed();
    let rep = ctx.rep()?;
    let mut out = suites::lemma_suite(&rep);
    out.extend(suites::steinberg_suite(&rep, &ctx.suite_options()));
    let result = json!({ "group": rep.case().name(), "roots": rep.case().len() });
    Ok(Report::new("lemmas", ctx, out, result))
}

pub fn relcheck(mut ctx: Context) -> Result<Report, CliError> {
    ctx.default_seed();
    let rep = ctx.rep()?;
    let out = suites::steinberg_suite(&rep, &ctx.suite_options());
    let result = json!({ "group": rep.case().name(), "ordered_pairs": rep.case().len() * rep.case().len() });
    Ok(Report::new("relcheck", ctx, out, result))
}

pub const NOT_APPLICABLE: &str = "not applicable: first type";

pub fn forms(mut ctx: Context) -> Result<Report, CliError> {
    ctx.default_seed();
    let rep = ctx.rep()?;
    if rep.case().kind() == EmbeddingType::First {
        return Ok(Report::new("forms", ctx, Vec::new(), json!({ "applicable": false, "message": NOT_APPLICABLE })));
    }
    let h = forms::build_bilinear(&rep).map_err(CliError::Run)?;
    let pi = forms::build_pi_form(&rep, ctx.cfg.seed()).map_err(CliError::Run)?;
    let signs: Vec<Value> =
        rep.weights().weights().map(|i| json!({ "weight": i, "partner": h.partner[i], "sign": h.signs[i] })).collect();
    let result = json!({ "applicable": true, "group": rep.case().name(), "h": signs, "q": pi.to_json() });
    let out = suites::forms_suite(&rep, &ctx.suite_options());
    Ok(Report::new("forms", ctx, out, result))
}

fn coords_json(chev: &Chevalley, coords: &[(usize, overgroup_core::rings::RingElem)]) -> Value {
    coords.iter().map(|(r, v)| json!({ "root": chev.case().coeffs(*r), "value": v.to_json() })).collect()
}

pub fn decompose(mut ctx: Context) -> Result<Report, CliError> {
    let path = ctx.cfg.input.clone().ok_or_else(|| CliError::Usage("decompose needs --in".into()))?;
    let v = ctx.read_json(&path)?;
    let (chev, g) = io::matrix_from_json(&v).map_err(usage)?;
    let (suites, result) = match chevalley_matsumoto(&chev, &g) {
        Ok(cm) => {
            let back = chev.mul(&chev.mul(&cm.lower, &cm.levi).map_err(CliError::Run)?, &cm.upper).map_err(CliError::Run)?;
            let round_trip = check("decompose/round_trip", back.mat == g.mat, || json!("product differs from the input"));
            let result = json!({
                "lower": io::matrix_to_json(&chev, &cm.lower.mat),
                "levi": io::matrix_to_json(&chev, &cm.levi.mat),
                "upper": io::matrix_to_json(&chev, &cm.upper.mat),
                "lower_coords": coords_json(&chev, &cm.lower_coords),
                "upper_coords": coords_json(&chev, &cm.upper_coords),
                "identity_factors": [cm.lower.is_identity(), cm.levi.is_identity(), cm.upper.is_identity()],
            });
            (vec![round_trip], result)
        }
        Err(e @ Error::Decomposition(_)) => (vec![failure("decompose", json!({ "error": e.to_string() }))], Value::Null),
        Err(e) => return Err(CliError::Run(e)),
    };
    Ok(Report::new("decompose", ctx, suites, result))
}

pub fn normcheck(mut ctx: Context) -> Result<Report, CliError> {
    ctx.default_seed();
    let sigma_text = ctx.cfg.sigma.get_or_insert_with(|| "(0),(0)".into()).clone();
    if let Some(path) = ctx.cfg.input.clone() {
        let v = ctx.read_json(&path)?;
        let (chev, g) = io::matrix_from_json(&v).map_err(usage)?;
        ctx.cfg.case = Some(chev.case().tag.to_string());
        let sigma = SigmaPair::parse(&chev.ring, &sigma_text).map_err(usage)?;
        let normal = in_normalizer(&chev, &g, &sigma).map_err(CliError::Run)?;
        let result = json!({
            "sigma": sigma.to_string(),
            "in_g_sigma": in_g_sigma(&g, &sigma),
            "in_normalizer": normal,
            "transporter": transporter_check(&chev, &g, &sigma).map_err(CliError::Run)?,
        });
        let suites = vec![check("normcheck/input", normal, || json!("the input fails the normalizer conditions"))];
        return Ok(Report::new("normcheck", ctx, suites, result));
    }
    let chev = ctx.chev()?;
    let sigma = SigmaPair::parse(&chev.ring, &sigma_text).map_err(usage)?;
    let samples = *ctx.cfg.samples.get_or_insert(500);
    let mut opts = ctx.suite_options();
    opts.counts.normalizer_words = samples;
    opts.counts.transporter_words = samples.min(Counts::full().transporter_words);
    let out = suites::normalizer_suite_over(&chev, &sigma_text, &opts);
    let result = json!({ "group": chev.case().name(), "ring": chev.ring.spec().to_string(), "sigma": sigma.to_string() });
    Ok(Report::new("normcheck", ctx, out, result))
}

fn load_extra(ctx: &mut Context, chev: &Chevalley) -> Result<HGenerators, CliError> {
    let words = match ctx.cfg.extra.clone() {
        Some(path) => {
            let v = ctx.read_json(&path)?;
            io::words_from_json(chev, &v).map_err(usage)?
        }
        None => Vec::new(),
    };
    Ok(HGenerators::new(words))
}

fn factor_json(chev: &Chevalley, f: &HFactor) -> Value {
    match f {
        HFactor::Delta(l) => io::letter_to_json(chev, l),
        HFactor::Extra { index, inverse } => json!({ "extra": index, "inverse": inverse }),
    }
}

/// Certificate witnesses with their `H`-words, each replayed before it is reported.
fn witnesses(chev: &Chevalley, gens: &HGenerators, cert: &LevelCertificate) -> Result<(Vec<Value>, SuiteReport), CliError> {
    let mut out = Vec::new();
    let mut bad = None;
    for (i, w) in cert.witnesses.iter().enumerate() {
        let mut v = w.to_json(chev);
        v["h_word"] = w.factors.iter().map(|f| factor_json(chev, f)).collect();
        if !w.replay(chev, gens).map_err(CliError::Run)? && bad.is_none() {
            bad = Some(json!({ "witness": i }));
        }
        out.push(v);
    }
    let report = match bad {
        None => passed("witness_replay", cert.witnesses.len() as u64),
        Some(d) => failure("witness_replay", d),
    };
    Ok((out, report))
}

fn level_options(ctx: &mut Context) -> LevelOptions {
    let budget = *ctx.cfg.budget.get_or_insert(1000);
    let mut o = LevelOptions::new(budget, ctx.cfg.seed());
    if let Some(s) = ctx.cfg.samples {
        o.upper_samples = s;
    }
    o.exec = ctx.exec;
    o
}

pub fn level(mut ctx: Context) -> Result<Report, CliError> {
    ctx.default_seed();
    let chev = ctx.chev()?;
    let target_text = ctx.cfg.target.clone().ok_or_else(|| CliError::Usage("level needs --target".into()))?;
    let target = SigmaPair::parse(&chev.ring, &target_text).map_err(usage)?;
    let gens = load_extra(&mut ctx, &chev)?;
    let opts = level_options(&mut ctx);
    let cert = level_certificate(&chev, &gens, &target, &opts).map_err(CliError::Run)?;
    let (wits, replay) = witnesses(&chev, &gens, &cert)?;
    let mut result = cert.to_json(&chev);
    result["witnesses"] = json!(wits.len());
    let exceeds = check("target_contains_lower", cert.verdict != Verdict::Exceeds, || {
        json!({ "target": cert.target.to_string(), "lower": cert.lower.to_string() })
    });
    let mut report = Report::new("level", ctx, vec![replay, exceeds], result);
    report.witnesses = wits;
    if report.outcome == Outcome::Pass {
        report.outcome = match cert.verdict {
            Verdict::Certified => Outcome::Pass,
            Verdict::Exceeds => Outcome::Fail,
            Verdict::Incomplete => Outcome::Incomplete,
        };
    }
    Ok(report)
}

/// Harvests a lower bound for the level of `H` with no target, then certifies
/// it: sampled `H`-words must satisfy the normalizer conditions for that bound.
pub fn experiment(mut ctx: Context) -> Result<Report, CliError> {
    ctx.default_seed();
    let chev = ctx.chev()?;
    if !chev.ring.is_finite() {
        return Err(CliError::Usage("experiment needs a finite ring".into()));
    }
    let gens = load_extra(&mut ctx, &chev)?;
    let opts = level_options(&mut ctx);
    let everything = SigmaPair::new(Ideal::unit(&chev.ring), Ideal::unit(&chev.ring)).map_err(CliError::Run)?;
    let harvest = level_certificate(&chev, &gens, &everything, &LevelOptions { upper_samples: 0, ..opts.clone() })
        .map_err(CliError::Run)?;
    let cert = level_certificate(&chev, &gens, &harvest.lower, &opts).map_err(CliError::Run)?;
    let (wits, replay) = witnesses(&chev, &gens, &cert)?;
    let upper = check("upper_normalizer", cert.upper_failures == 0, || {
        json!({ "failures": cert.upper_failures, "checked": cert.upper_checked, "sigma": cert.target.to_string() })
    });
    let result = json!({
        "sigma": cert.lower.to_string(),
        "verdict": cert.verdict,
        "attempts": harvest.attempts,
        "samples_checked": cert.upper_checked,
        "sandwich": format!("E(sigma) witnesses <= H <= normalizer conditions for {}", cert.lower),
    });
    let failed_upper = !upper.pass;
    let mut report = Report::new("experiment", ctx, vec![replay, upper], result);
    report.witnesses = wits;
    // a sample outside the bound means the budget missed part of the level
    if failed_upper && suites::all_pass(&report.suites[..1]) {
        report.outcome = Outcome::Incomplete;
    }
    Ok(report)
}

pub fn selftest(mut ctx: Context) -> Result<Report, CliError> {
    ctx.default_seed();
    let mut opts = SuiteOptions::quick(ctx.cfg.seed());
    opts.exec = ctx.exec;
    let mut all = Vec::new();
    let mut summary = Vec::new();
    for (i, title) in suites::CRITERIA.iter().enumerate() {
        let n = i + 1;
        let reports = suites::criterion(n, &opts);
        summary.push(json!({ "criterion": n, "title": title, "pass": suites::all_pass(&reports), "suites": reports.len() }));
        all.extend(reports);
    }
    Ok(Report::new("selftest", ctx, all, json!({ "criteria": summary })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(case: &str, l: Option<usize>) -> Context {
        Context::new(RunConfig { case: Some(case.into()), l, ..Default::default() }, Exec::Sequential)
    }

    #[test]
    fn rank_four_is_a_usage_error() {
        assert!(matches!(lemmas(ctx("a", Some(4))), Err(CliError::Usage(_))));
        assert!(matches!(info(ctx("a", None)), Err(CliError::Usage(_))));
    }

    #[test]
    fn first_type_forms_are_not_applicable() {
        let r = forms(ctx("b", None)).unwrap();
        assert_eq!((r.result["message"].as_str(), r.outcome), (Some(NOT_APPLICABLE), Outcome::Pass));
    }

    #[test]
    fn empty_extra_gives_zero_level() {
        let mut c = ctx("b", None);
        c.cfg.budget = Some(16);
        c.cfg.samples = Some(8);
        let r = experiment(c).unwrap();
        assert_eq!((r.result["sigma"].as_str(), r.outcome), (Some("((0),(0))"), Outcome::Pass));
    }

    #[test]
    fn config_hash_ignores_the_output_path() {
        let a = info(ctx("b", None)).unwrap();
        let mut c = ctx("b", None);
        c.cfg.out = Some("elsewhere.json".into());
        assert_eq!(a.config_hash(), info(c).unwrap().config_hash());
    }
}
