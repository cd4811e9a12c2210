use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ainfty_cert::ContractionCertificate;
use ainfty_coeff::{rank_kernel, Lin};
use ainfty_core::ainfty::{
    check_functor, check_functor_shifted, check_natural, check_stasheff, check_stasheff_shifted, compose_functors,
    tensor_dg, unit_checks, AInfty, CheckReport, Quiver, SplitUnitWitness, UnitalVerdict,
};
use ainfty_core::barcobar::{eta, strict_quotient, universal, word_name, Bar};
use ainfty_core::contraction::{eta_certificate, eta_quotient_certificate, filtered_contraction};
use ainfty_core::graded::Letter;
use ainfty_core::io::{self, FilteredComplexDoc, GrHomotopiesDoc, WitnessDoc};
use ainfty_core::strictify::{functor_unit_violation, strictify_functor};
use ainfty_core::CoreError;
use serde_json::{json, Value};

use crate::report::Ctx;

#[derive(Debug)]
pub enum CmdError {
    Core(CoreError),
    Io(PathBuf, std::io::Error),
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> Self {
        CmdError::Core(e)
    }
}

/// A mathematical verdict.
pub struct Check {
    pub pass: bool,
    pub code: Option<String>,
    pub message: String,
}

impl Check {
    fn pass(message: impl Into<String>) -> Self {
        Check { pass: true, code: None, message: message.into() }
    }

    fn fail(code: &str, message: impl Into<String>) -> Self {
        Check { pass: false, code: Some(code.into()), message: message.into() }
    }
}

pub type CmdResult = Result<Check, CmdError>;

fn read(ctx: &mut Ctx, path: &Path) -> Result<String, CmdError> {
    ctx.read(path).map_err(|e| CmdError::Io(path.to_path_buf(), e))
}

fn structure(ctx: &mut Ctx, path: &Path) -> Result<std::sync::Arc<AInfty>, CmdError> {
    let s = read(ctx, path)?;
    Ok(io::read_structure(&s)?)
}

fn lin_names(q: &Quiver, x: &Lin<Letter>) -> Vec<(String, String)> {
    x.iter().map(|(l, c)| (q.name(l).to_string(), c.to_string())).collect()
}

fn report_json(q: &Quiver, rep: &CheckReport) -> Value {
    let v = rep.violation.as_ref().map(|v| {
        json!({
            "arity": v.arity,
            "word": v.word.iter().map(|l| q.name(l)).collect::<Vec<_>>(),
            "object": v.object.map(|o| q.objects[o].clone()),
        })
    });
    json!({ "through": rep.through, "frontier": rep.frontier, "violation": v })
}

fn within(requested: usize, available: usize) -> Result<(), CmdError> {
    if requested > available {
        return Err(CoreError::ArityUnderflow { requested, available }.into());
    }
    Ok(())
}

pub fn validate(ctx: &mut Ctx, file: &Path, arity: usize) -> CmdResult {
    let a = structure(ctx, file)?;
    ctx.bound("arity", arity);
    within(arity, a.max_arity)?;
    let q = &a.quiver;
    let literal = check_stasheff(&a, arity);
    let shifted = check_stasheff_shifted(&a, arity);
    let bar = Bar { base: a.clone(), bound: arity };
    let d2 = bar.first_violation().map(|(w, _)| w.len());
    let agree = literal.first_violating_arity() == shifted.first_violating_arity()
        && literal.first_violating_arity() == d2;
    ctx.witness("literal", report_json(q, &literal));
    ctx.witness("shifted", report_json(q, &shifted));
    ctx.witness("bar_d2_first_violation", d2);
    ctx.witness("checkers_agree", agree);
    if let Some(v) = &literal.violation {
        ctx.witness("residual", lin_names(q, &v.residual));
        let msg = format!("A∞ relation fails at arity {} on {}", v.arity, word_name(q, &v.word));
        ctx.say(&msg);
        return Ok(Check::fail("NotAInfty", msg));
    }
    ctx.say(format!("A∞ relations hold through arity {}", literal.through));
    Ok(Check::pass(format!("A∞ through arity {}", literal.through)))
}

pub fn functor_check(ctx: &mut Ctx, file: &Path, arity: usize) -> CmdResult {
    let f = io::read_functor(&read(ctx, file)?)?;
    ctx.bound("arity", arity);
    within(arity, f.max_arity)?;
    let q = &f.source.quiver;
    let rep = check_functor(&f, arity);
    let shifted = check_functor_shifted(&f, arity);
    ctx.witness("literal", report_json(q, &rep));
    ctx.witness("shifted", report_json(q, &shifted));
    ctx.witness("checkers_agree", rep.first_violating_arity() == shifted.first_violating_arity());
    if let Some(v) = &rep.violation {
        ctx.witness("residual", lin_names(&f.target.quiver, &v.residual));
        let msg = format!("functor relation fails at arity {} on {}", v.arity, word_name(q, &v.word));
        ctx.say(&msg);
        return Ok(Check::fail("NotAInfty", msg));
    }
    ctx.say(format!("functor relations hold through arity {}", rep.through));
    Ok(Check::pass(format!("A∞ functor through arity {}", rep.through)))
}

pub fn nat_check(ctx: &mut Ctx, file: &Path, arity: usize) -> CmdResult {
    let t = io::read_prenat(&read(ctx, file)?)?;
    ctx.bound("arity", arity);
    within(arity, t.max_arity)?;
    let q = &t.from.source.quiver;
    let rep = check_natural(&t, arity);
    ctx.witness("natural", report_json(q, &rep));
    if let Some(v) = &rep.violation {
        ctx.witness("residual", lin_names(&t.from.target.quiver, &v.residual));
        let at = match v.object {
            Some(o) if v.word.is_empty() => q.objects[o].clone(),
            _ => word_name(q, &v.word),
        };
        let msg = format!("m1(θ) is nonzero at arity {} on {at}", v.arity);
        ctx.say(&msg);
        return Ok(Check::fail("NotNatural", msg));
    }
    ctx.say(format!("natural through arity {}", rep.through));
    Ok(Check::pass(format!("natural through arity {}", rep.through)))
}

pub fn bar_cmd(ctx: &mut Ctx, file: &Path, max_len: usize, check_d2: bool, emit: Option<&Path>) -> CmdResult {
    let a = structure(ctx, file)?;
    ctx.bound("max_len", max_len);
    within(max_len, a.max_arity)?;
    let q = a.quiver.clone();
    let bar = Bar { base: a, bound: max_len };
    let ranks: Vec<usize> = (1..=max_len).map(|n| q.words(n).len()).collect();
    ctx.witness("words_per_length", &ranks);
    if let Some(path) = emit {
        let mut rows = Vec::new();
        for n in 1..=max_len {
            for w in q.words(n) {
                for (out, c) in bar.d(&w).iter() {
                    rows.push(json!({
                        "in": w.iter().map(|l| q.name(l)).collect::<Vec<_>>(),
                        "out": out.iter().map(|l| q.name(l)).collect::<Vec<_>>(),
                        "coeff": c.to_string(),
                    }));
                }
            }
        }
        let doc = json!({ "schema": io::SCHEMA, "kind": "bar-differential", "max_len": max_len, "d": rows });
        ctx.emit(path.to_path_buf(), io::to_json(&doc));
    }
    if check_d2 {
        if let Some((w, r)) = bar.first_violation() {
            let names: Vec<_> = r.iter().map(|(x, c)| (word_name(&q, x), c.to_string())).collect();
            ctx.witness("d2_residual", names);
            let msg = format!("d∘d ≠ 0 on {} (length {})", word_name(&q, &w), w.len());
            ctx.say(&msg);
            return Ok(Check::fail("NotAInfty", msg));
        }
        ctx.say(format!("d∘d = 0 on all bar words of length ≤ {max_len}"));
    }
    Ok(Check::pass(format!("bar construction through length {max_len}")))
}

pub fn cobar_cmd(ctx: &mut Ctx, file: &Path, max_len: usize, emit: Option<&Path>) -> CmdResult {
    let a = structure(ctx, file)?;
    ctx.bound("max_len", max_len);
    let u = universal(a, max_len)?;
    let s = &u.structure;
    let mut ranks = BTreeMap::new();
    for ((x, y), m) in s.quiver.homs() {
        let mut by_deg: BTreeMap<i64, usize> = BTreeMap::new();
        for (_, d) in &m.basis {
            *by_deg.entry(*d).or_default() += 1;
        }
        ranks.insert(format!("{}|{}", s.quiver.objects[*x], s.quiver.objects[*y]), by_deg);
    }
    ctx.witness("ranks", &ranks);
    let rep = check_stasheff(s, 1);
    ctx.witness("d_squared", report_json(&s.quiver, &rep));
    if let Some(path) = emit {
        ctx.emit(path.to_path_buf(), io::to_json(&io::structure_doc(s)));
    }
    if let Some(v) = rep.violation {
        let msg = format!("d∘d ≠ 0 on {}", word_name(&s.quiver, &v.word));
        ctx.say(&msg);
        return Ok(Check::fail("NotAInfty", msg));
    }
    ctx.say(format!("coB(Bi(A)) on words with at most {max_len} letters; d∘d = 0"));
    Ok(Check::pass("cobar of bar built"))
}

fn verify_into(ctx: &mut Ctx, cert: &ContractionCertificate) -> Option<Check> {
    match cert.verify() {
        Ok(v) => {
            ctx.witness("certificate", &v);
            None
        }
        Err(e) => {
            ctx.witness("violated_identity", e.identity().map(|i| i.to_string()));
            Some(Check::fail("CertificateRejected", e.to_string()))
        }
    }
}

pub fn eta_cmd(ctx: &mut Ctx, file: &Path, max_len: usize, certify: Option<&Path>) -> CmdResult {
    let a = structure(ctx, file)?;
    ctx.bound("max_len", max_len);
    let u = universal(a.clone(), max_len)?;
    let e = eta(&u)?;
    let rep = check_functor(&e, max_len);
    ctx.witness("eta_functor", report_json(&a.quiver, &rep));
    if let Some(v) = rep.violation {
        let msg = format!("η fails the functor relation at arity {}", v.arity);
        ctx.say(&msg);
        return Ok(Check::fail("NotAInfty", msg));
    }
    let cert = eta_certificate(&a, max_len)?;
    if let Some(c) = verify_into(ctx, &cert) {
        return Ok(c);
    }
    ctx.say(format!("η is a functor through arity {max_len}; the contraction certificate verifies"));
    if let Some(path) = certify {
        ctx.emit(path.to_path_buf(), cert.to_json() + "\n");
    }
    Ok(Check::pass("η certified"))
}

pub fn quotient_cmd(ctx: &mut Ctx, file: &Path, retraction: &Path, max_len: usize, certify: Option<&Path>) -> CmdResult {
    let a = structure(ctx, file)?;
    let wdoc: WitnessDoc = io::from_json(&read(ctx, retraction)?)?;
    let w = io::witness_from_doc(&a, &wdoc)?;
    ctx.bound("max_len", max_len);
    let sq = strict_quotient(&a, &w, max_len)?;
    let ring = a.ring;
    let mut pieces = Vec::new();
    let mut ok = true;
    for ((s, t), p) in &sq.pieces {
        let gen_rank = rank_kernel(&ainfty_core::barcobar::generator_matrix(ring, p)?).map_err(CoreError::from)?.rank;
        let holds = p.words.len() - p.normal_forms.len() == gen_rank;
        ok &= holds;
        pieces.push(json!({
            "hom": format!("{}|{}", a.quiver.objects[*s], a.quiver.objects[*t]),
            "words": p.words.len(),
            "normal_forms": p.normal_forms.len(),
            "generator_rank": gen_rank,
            "rank_identity": holds,
        }));
    }
    ctx.witness("pieces", &pieces);
    if !ok {
        ctx.say("rank(words) − #(normal forms) differs from the rank of the unit ideal");
        return Ok(Check::fail("RankIdentity", "quotient rank identity fails"));
    }
    let cert = eta_quotient_certificate(&a, &w, max_len)?;
    if let Some(c) = verify_into(ctx, &cert) {
        return Ok(c);
    }
    ctx.say(format!("strict-unit quotient through {max_len} letters; rank identity holds; η certificate verifies"));
    if let Some(path) = certify {
        ctx.emit(path.to_path_buf(), cert.to_json() + "\n");
    }
    Ok(Check::pass("quotient certified"))
}

pub fn contract(ctx: &mut Ctx, input: &Path, gr: &Path, emit: Option<&Path>) -> CmdResult {
    let fc = io::filtered_complex_from_doc(&io::from_json::<FilteredComplexDoc>(&read(ctx, input)?)?)?;
    let h = io::gr_homotopies_from_doc(&io::from_json::<GrHomotopiesDoc>(&read(ctx, gr)?)?)?;
    ctx.bound("levels", fc.max_level());
    let out = filtered_contraction(&fc, &h)?;
    if let Some(c) = verify_into(ctx, &out.certificate) {
        return Ok(c);
    }
    ctx.witness("first_level", &out.first_level);
    ctx.say(format!("contracted {} basis elements onto the {} of F_1", fc.len(), out.first_level.len()));
    if let Some(path) = emit {
        ctx.emit(path.to_path_buf(), out.certificate.to_json() + "\n");
    }
    Ok(Check::pass("filtered contraction certified"))
}

pub fn verify(ctx: &mut Ctx, file: &Path) -> CmdResult {
    let s = read(ctx, file)?;
    let cert = ContractionCertificate::from_json(&s).map_err(CoreError::from)?;
    if let Some(c) = verify_into(ctx, &cert) {
        ctx.say(format!("rejected: {}", c.message));
        return Ok(c);
    }
    ctx.say(format!("certificate verifies: {} → {}", cert.big.rank(), cert.small.rank()));
    Ok(Check::pass("certificate verifies"))
}

pub fn strictify(
    ctx: &mut Ctx,
    functor: &Path,
    witness: Option<&Path>,
    unit_homotopy: Option<&Path>,
    arity: usize,
    emit_chain: Option<&Path>,
) -> CmdResult {
    let f = io::read_functor(&read(ctx, functor)?)?;
    ctx.bound("arity", arity);
    let w: Option<SplitUnitWitness> = match witness {
        Some(p) => Some(io::witness_from_doc(&f.source, &io::from_json::<WitnessDoc>(&read(ctx, p)?)?)?),
        None => None,
    };
    let h = match unit_homotopy {
        Some(p) => {
            let doc: io::LinMapDoc = io::from_json(&read(ctx, p)?)?;
            io::lin_map_from_doc(f.source.ring, &f.source.quiver, &f.target.quiver, &doc, |o| f.obj_map[o])?
        }
        None => BTreeMap::new(),
    };
    let out = strictify_functor(&f, w.as_ref(), &h, arity)?;
    let stages: Vec<Value> = out.stages.iter().map(|s| json!({ "n": s.n, "m": s.m })).collect();
    ctx.witness("stages", &stages);
    let src = w.as_ref().expect("checked by strictify").validate(&f.source)?;
    let tgt = ainfty_core::ainfty::find_strict_units(&f.target)?.unwrap_or_default();
    ctx.witness("strictly_unital", functor_unit_violation(&out.functor, &src, &tgt, arity).is_none());
    if let Some(dir) = emit_chain {
        ctx.emit(dir.join("functor.json"), io::to_json(&io::functor_doc(&out.functor)));
        for (k, s) in out.stages.iter().enumerate() {
            ctx.emit(dir.join(format!("stage-{k:02}-{}-{}.json", s.n, s.m)), io::to_json(&io::prenat_doc(&s.theta)));
        }
        ctx.emit(dir.join("total.json"), io::to_json(&io::prenat_doc(&out.total)));
    }
    let n = out.stages.len();
    ctx.say(format!("strictly unital through arity {arity} after {n} stage{}; every stage verifies", if n == 1 { "" } else { "s" }));
    Ok(Check::pass("strictified"))
}

pub fn cohomology_cmd(ctx: &mut Ctx, file: &Path, window: (i64, i64)) -> CmdResult {
    let a = structure(ctx, file)?;
    ctx.bound("window", vec![window.0, window.1]);
    let h = ainfty_core::ainfty::cohomology(&a, window)?;
    let q = &a.quiver;
    let mut dims = BTreeMap::new();
    for &(s, t) in h.homs.keys() {
        dims.insert(format!("{}|{}", q.objects[s], q.objects[t]), h.dims(s, t));
    }
    ctx.witness("dims", &dims);
    let ids = h.identities.as_ref().map(|u| {
        u.iter().map(|(o, v)| (q.objects[*o].clone(), lin_names(&h.structure.quiver, v))).collect::<BTreeMap<_, _>>()
    });
    ctx.witness("identities", ids);
    for (k, d) in &dims {
        let parts: Vec<String> = d.iter().filter(|(_, n)| **n > 0).map(|(deg, n)| format!("{n} in degree {deg}")).collect();
        ctx.say(format!("H({k}): {}", if parts.is_empty() { "0".into() } else { parts.join(", ") }));
    }
    Ok(Check::pass("cohomology computed"))
}

pub fn units(ctx: &mut Ctx, file: &Path, emit_witness: Option<&Path>) -> CmdResult {
    let a = structure(ctx, file)?;
    let q = &a.quiver;
    let rep = unit_checks(&a)?;
    let named = |u: &ainfty_core::ainfty::Units| {
        u.iter().map(|(o, v)| (q.objects[*o].clone(), lin_names(q, v))).collect::<BTreeMap<_, _>>()
    };
    ctx.witness("strict", rep.strict.as_ref().map(named));
    ctx.witness("cohomological", rep.cohomological.as_ref().map(|c| named(&c.units)));
    let verdict = match &rep.unital {
        UnitalVerdict::Unital(_) => "unital".to_string(),
        UnitalVerdict::NotUnital(why) => format!("not unital: {why}"),
        UnitalVerdict::NeedsWitness => "undecided without supplied homotopies".into(),
    };
    ctx.witness("unital", &verdict);
    ctx.say(format!(
        "strict units: {}; cohomological units: {}; {verdict}",
        if rep.strict.is_some() { "yes" } else { "no" },
        if rep.cohomological.is_some() { "yes" } else { "no" }
    ));
    if let (Some(path), Some(u)) = (emit_witness, &rep.strict) {
        match SplitUnitWitness::canonical(u) {
            Some(w) => ctx.emit(path.to_path_buf(), io::to_json(&io::witness_doc(&a, &w))),
            None => return Ok(Check::fail("SplitUnitsRequired", "no unit has an invertible coefficient")),
        }
    }
    match rep.unital {
        UnitalVerdict::Unital(_) => Ok(Check::pass(verdict)),
        UnitalVerdict::NotUnital(_) => Ok(Check::fail("NotUnital", verdict)),
        UnitalVerdict::NeedsWitness => Ok(Check::fail("SplitUnitsRequired", verdict)),
    }
}

pub fn tensor(ctx: &mut Ctx, left: &Path, right: &Path, emit: Option<&Path>) -> CmdResult {
    let a = structure(ctx, left)?;
    let b = structure(ctx, right)?;
    let t = tensor_dg(&a, &b)?;
    let rep = check_stasheff(&t, 3);
    ctx.witness("objects", &t.quiver.objects);
    ctx.witness("relations", report_json(&t.quiver, &rep));
    if let Some(path) = emit {
        ctx.emit(path.to_path_buf(), io::to_json(&io::structure_doc(&t)));
    }
    if let Some(v) = rep.violation {
        return Ok(Check::fail("NotAInfty", format!("tensor product fails at arity {}", v.arity)));
    }
    ctx.say(format!("tensor product with {} objects; dg relations hold", t.quiver.num_objects()));
    Ok(Check::pass("tensor product built"))
}

pub fn compose(ctx: &mut Ctx, inner: &Path, outer: &Path, emit: Option<&Path>) -> CmdResult {
    let f = io::read_functor(&read(ctx, inner)?)?;
    let g = io::read_functor(&read(ctx, outer)?)?;
    let h = compose_functors(&g, &f)?;
    ctx.bound("arity", h.max_arity);
    let rep = check_functor(&h, h.max_arity);
    ctx.witness("composite", report_json(&h.source.quiver, &rep));
    if let Some(path) = emit {
        ctx.emit(path.to_path_buf(), io::to_json(&io::functor_doc(&h)));
    }
    if let Some(v) = rep.violation {
        return Ok(Check::fail("NotAInfty", format!("composite fails at arity {}", v.arity)));
    }
    ctx.say(format!("G∘F is a functor through arity {}", rep.through));
    Ok(Check::pass("composed"))
}
