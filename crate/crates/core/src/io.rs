//! The `ainfty/1` JSON formats for structures, functors, prenatural transformations, unit
//! witnesses and filtered complexes.
//!
//! Words are listed in written order: `"in": ["f_i", …, "f_1"]` with `"path": ["A0", …, "Ai"]`,
//! where `f_k` runs from `A(k-1)` to `Ak`. The key `"A|B"` of `"hom"` names the module of
//! morphisms from `A` to `B`.

use std::collections::BTreeMap;
use std::sync::Arc;

use ainfty_coeff::{Lin, Ring, Scalar, SparseMatrix};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::ainfty::{AInfty, Functor, Prenat, Quiver, SplitUnitWitness, Table};
use crate::contraction::FilteredComplex;
use crate::graded::{GradedModule, Letter, Obj};
use crate::{CoreError, Result};

pub const SCHEMA: &str = "ainfty/1";

fn schema_err(msg: impl Into<String>) -> CoreError {
    CoreError::Schema(msg.into())
}

fn check_schema(s: &str) -> Result<()> {
    if s == SCHEMA {
        Ok(())
    } else {
        Err(schema_err(format!("unsupported schema tag {s:?}, expected {SCHEMA:?}")))
    }
}

fn default_schema() -> String {
    SCHEMA.into()
}

/// Pretty JSON with a trailing newline; the form every emitter writes.
pub fn to_json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("serializable");
    s.push('\n');
    s
}

pub fn from_json<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| schema_err(e.to_string()))
}

/// One term of a multilinear table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpDoc {
    pub arity: usize,
    pub path: Vec<String>,
    pub out: String,
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDoc {
    #[serde(default = "default_schema")]
    pub schema: String,
    #[serde(flatten)]
    pub ring: Ring,
    pub objects: Vec<String>,
    pub hom: BTreeMap<String, Vec<(String, i64)>>,
    #[serde(default)]
    pub ops: Vec<OpDoc>,
    pub max_arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorDoc {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub source: StructureDoc,
    pub target: StructureDoc,
    pub obj_map: BTreeMap<String, String>,
    #[serde(default)]
    pub comps: Vec<OpDoc>,
    pub max_arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theta0Doc {
    pub object: String,
    pub out: String,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrenatDoc {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub from: FunctorDoc,
    pub to: FunctorDoc,
    pub degree: i64,
    #[serde(default)]
    pub theta0: Vec<Theta0Doc>,
    #[serde(default)]
    pub comps: Vec<OpDoc>,
    pub max_arity: usize,
}

/// Per object, a combination of named letters: `{"A": {"e": "1"}}`.
pub type LinMapDoc = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub retraction: LinMapDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilteredComplexDoc {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub degrees: Vec<i64>,
    pub d: SparseMatrix,
    pub levels: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

/// Null-homotopies of the graded pieces, keyed by filtration level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrHomotopiesDoc {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub homotopies: BTreeMap<usize, SparseMatrix>,
}

fn hom_key(q: &Quiver, a: Obj, b: Obj) -> String {
    format!("{}|{}", q.objects[a], q.objects[b])
}

fn object(q: &Quiver, name: &str) -> Result<Obj> {
    q.object_index(name).ok_or_else(|| schema_err(format!("unknown object {name:?}")))
}

fn letter(q: &Quiver, a: Obj, b: Obj, name: &str) -> Result<Letter> {
    q.letter_by_name(a, b, name)
        .ok_or_else(|| schema_err(format!("no basis element {name:?} in {}", hom_key(q, a, b))))
}

fn path_of(q: &Quiver, w: &[Letter]) -> Vec<String> {
    let mut p = vec![q.objects[w[w.len() - 1].src].clone()];
    p.extend(w.iter().rev().map(|l| q.objects[l.tgt].clone()));
    p
}

fn ops_of(src: &Quiver, dst: &Quiver, t: &Table) -> Vec<OpDoc> {
    let mut out = Vec::new();
    for (w, v) in t {
        let path = path_of(src, w);
        let inputs: Vec<String> = w.iter().map(|l| src.name(l).to_string()).collect();
        for (l, c) in v.iter() {
            out.push(OpDoc {
                arity: w.len(),
                path: path.clone(),
                out: dst.name(l).to_string(),
                inputs: inputs.clone(),
                coeff: c.to_string(),
            });
        }
    }
    out
}

/// Reads a table; `out_hom` gives the output module for a word from `s` to `e`.
fn table_of(ring: Ring, src: &Quiver, dst: &Quiver, ops: &[OpDoc], out_hom: impl Fn(Obj, Obj) -> (Obj, Obj)) -> Result<Table> {
    let mut t = Table::new();
    for op in ops {
        let n = op.arity;
        if n == 0 || op.inputs.len() != n || op.path.len() != n + 1 {
            return Err(schema_err(format!("operation with arity {n}, {} inputs and a path of length {}", op.inputs.len(), op.path.len())));
        }
        let path = op.path.iter().map(|p| object(src, p)).collect::<Result<Vec<_>>>()?;
        let mut w = Vec::with_capacity(n);
        for (k, name) in op.inputs.iter().enumerate() {
            w.push(letter(src, path[n - k - 1], path[n - k], name)?);
        }
        let (a, b) = out_hom(path[0], path[n]);
        let l = letter(dst, a, b, &op.out)?;
        let c = Scalar::parse(ring, &op.coeff)?;
        t.entry(w).or_insert_with(|| Lin::zero(ring)).add_term(l, &c);
    }
    Ok(t)
}

pub fn structure_doc(a: &AInfty) -> StructureDoc {
    let q = &a.quiver;
    let hom = q
        .homs()
        .filter(|(_, m)| m.rank() > 0)
        .map(|(&(s, t), m)| (hom_key(q, s, t), m.basis.clone()))
        .collect();
    StructureDoc {
        schema: SCHEMA.into(),
        ring: a.ring,
        objects: q.objects.clone(),
        hom,
        ops: ops_of(q, q, a.m_table()),
        max_arity: a.max_arity,
    }
}

pub fn structure_from_doc(d: &StructureDoc) -> Result<Arc<AInfty>> {
    check_schema(&d.schema)?;
    d.ring.check_prime()?;
    let mut seen = std::collections::BTreeSet::new();
    if let Some(dup) = d.objects.iter().find(|o| !seen.insert(o.as_str())) {
        return Err(schema_err(format!("duplicate object {dup:?}")));
    }
    let idx = |name: &str| {
        d.objects.iter().position(|o| o == name).ok_or_else(|| schema_err(format!("unknown object {name:?}")))
    };
    let mut hom = BTreeMap::new();
    for (key, basis) in &d.hom {
        let (s, t) = key.split_once('|').ok_or_else(|| schema_err(format!("hom key {key:?} is not of the form \"A|B\"")))?;
        hom.insert((idx(s)?, idx(t)?), GradedModule::new(basis.clone())?);
    }
    let q = Quiver::new(d.objects.clone(), hom)?;
    let t = table_of(d.ring, &q, &q, &d.ops, |s, e| (s, e))?;
    Ok(Arc::new(AInfty::from_unshifted(d.ring, q, d.max_arity, t)?))
}

pub fn functor_doc(f: &Functor) -> FunctorDoc {
    let (sq, tq) = (&f.source.quiver, &f.target.quiver);
    FunctorDoc {
        schema: SCHEMA.into(),
        source: structure_doc(&f.source),
        target: structure_doc(&f.target),
        obj_map: f.obj_map.iter().enumerate().map(|(o, &fo)| (sq.objects[o].clone(), tq.objects[fo].clone())).collect(),
        comps: ops_of(sq, tq, f.comps()),
        max_arity: f.max_arity,
    }
}

pub fn functor_from_doc(d: &FunctorDoc) -> Result<Functor> {
    check_schema(&d.schema)?;
    let source = structure_from_doc(&d.source)?;
    let target = structure_from_doc(&d.target)?;
    let (sq, tq) = (&source.quiver, &target.quiver);
    let mut obj_map = Vec::with_capacity(sq.num_objects());
    for name in &sq.objects {
        let img = d.obj_map.get(name).ok_or_else(|| schema_err(format!("object {name:?} has no image")))?;
        obj_map.push(object(tq, img)?);
    }
    if d.obj_map.len() != sq.num_objects() {
        return Err(schema_err("object map names objects outside the source"));
    }
    let t = table_of(source.ring, sq, tq, &d.comps, |s, e| (obj_map[s], obj_map[e]))?;
    Functor::new(source.clone(), target.clone(), obj_map, d.max_arity, t)
}

pub fn prenat_doc(theta: &Prenat) -> PrenatDoc {
    let (sq, tq) = (&theta.from.source.quiver, &theta.from.target.quiver);
    let mut theta0 = Vec::new();
    for (&o, v) in theta.theta0_map() {
        for (l, c) in v.iter() {
            theta0.push(Theta0Doc { object: sq.objects[o].clone(), out: tq.name(l).to_string(), coeff: c.to_string() });
        }
    }
    PrenatDoc {
        schema: SCHEMA.into(),
        from: functor_doc(&theta.from),
        to: functor_doc(&theta.to),
        degree: theta.degree,
        theta0,
        comps: ops_of(sq, tq, theta.comps()),
        max_arity: theta.max_arity,
    }
}

pub fn prenat_from_doc(d: &PrenatDoc) -> Result<Prenat> {
    check_schema(&d.schema)?;
    let from = functor_from_doc(&d.from)?;
    let to = functor_from_doc(&d.to)?;
    let ring = from.source.ring;
    let (sq, tq) = (&from.source.quiver, &from.target.quiver);
    let mut theta0: BTreeMap<Obj, Lin<Letter>> = BTreeMap::new();
    for e in &d.theta0 {
        let o = object(sq, &e.object)?;
        let l = letter(tq, from.obj_map[o], to.obj_map[o], &e.out)?;
        theta0.entry(o).or_insert_with(|| Lin::zero(ring)).add_term(l, &Scalar::parse(ring, &e.coeff)?);
    }
    let t = table_of(ring, sq, tq, &d.comps, |s, e| (from.obj_map[s], to.obj_map[e]))?;
    Prenat::new(from, to, d.degree, d.max_arity, theta0, t)
}

/// Combinations of endomorphisms, one per object.
pub fn lin_map_doc(q: &Quiver, m: &BTreeMap<Obj, Lin<Letter>>) -> LinMapDoc {
    m.iter()
        .map(|(&o, v)| (q.objects[o].clone(), v.iter().map(|(l, c)| (q.name(l).to_string(), c.to_string())).collect()))
        .collect()
}

/// Reads combinations of endomorphisms of `tgt(o)` in `dst`, keyed by objects `o` of `src`.
pub fn lin_map_from_doc(
    ring: Ring,
    src: &Quiver,
    dst: &Quiver,
    d: &LinMapDoc,
    tgt: impl Fn(Obj) -> Obj,
) -> Result<BTreeMap<Obj, Lin<Letter>>> {
    let mut out = BTreeMap::new();
    for (name, terms) in d {
        let o = object(src, name)?;
        let to = tgt(o);
        let mut v = Lin::zero(ring);
        for (l, c) in terms {
            v.add_term(letter(dst, to, to, l)?, &Scalar::parse(ring, c)?);
        }
        out.insert(o, v);
    }
    Ok(out)
}

pub fn witness_doc(a: &AInfty, w: &SplitUnitWitness) -> WitnessDoc {
    WitnessDoc { schema: SCHEMA.into(), retraction: lin_map_doc(&a.quiver, &w.retraction) }
}

pub fn witness_from_doc(a: &AInfty, d: &WitnessDoc) -> Result<SplitUnitWitness> {
    check_schema(&d.schema)?;
    let retraction = lin_map_from_doc(a.ring, &a.quiver, &a.quiver, &d.retraction, |o| o)?;
    Ok(SplitUnitWitness { retraction })
}

pub fn filtered_complex_doc(fc: &FilteredComplex) -> FilteredComplexDoc {
    FilteredComplexDoc {
        schema: SCHEMA.into(),
        degrees: fc.degrees.clone(),
        d: fc.d.clone(),
        levels: fc.levels.clone(),
        labels: fc.labels.clone(),
    }
}

pub fn filtered_complex_from_doc(d: &FilteredComplexDoc) -> Result<FilteredComplex> {
    check_schema(&d.schema)?;
    let mut fc = FilteredComplex::new(d.degrees.clone(), d.d.clone(), d.levels.clone())?;
    if !d.labels.is_empty() {
        if d.labels.len() != fc.len() {
            return Err(schema_err(format!("{} labels for {} basis elements", d.labels.len(), fc.len())));
        }
        fc.labels = d.labels.clone();
    }
    Ok(fc)
}

pub fn gr_homotopies_from_doc(d: &GrHomotopiesDoc) -> Result<BTreeMap<usize, SparseMatrix>> {
    check_schema(&d.schema)?;
    Ok(d.homotopies.clone())
}

pub fn read_structure(s: &str) -> Result<Arc<AInfty>> {
    structure_from_doc(&from_json(s)?)
}

pub fn read_functor(s: &str) -> Result<Functor> {
    functor_from_doc(&from_json(s)?)
}

pub fn read_prenat(s: &str) -> Result<Prenat> {
    prenat_from_doc(&from_json(s)?)
}
