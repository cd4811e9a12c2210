//! Strictification of units: a unital functor out of a category with split units is homotopic to
//! a strictly unital one, and a natural transformation between strictly unital functors differs
//! from a strictly unital one by an exact term.

use std::collections::BTreeMap;

use ainfty_coeff::{solve_integer, solve_linear, Lin, Ring, Scalar};

use crate::ainfty::{
    boundary_object, check_functor, check_homotopy, check_natural, find_strict_units, m1_prenat, perturb_by_homotopy,
    homotopy_sum, AInfty, Functor, Prenat, SplitUnitWitness, Table, Units,
};
use crate::graded::{Letter, Obj, Word};
use crate::{CoreError, Result};

/// `w` with the unit inserted so that `m - 1` letters lie to its right.
fn with_unit(w: &[Letter], m: usize, units: &Units, empty: Obj, ring: Ring) -> Vec<Lin<Letter>> {
    let q = w.len() + 1 - m;
    let o = boundary_object(w, q, empty);
    let mut out: Vec<Lin<Letter>> = w[..q].iter().map(|l| Lin::basis(ring, *l)).collect();
    out.push(units.get(&o).cloned().unwrap_or_else(|| Lin::zero(ring)));
    out.extend(w[q..].iter().map(|l| Lin::basis(ring, *l)));
    out
}

/// Where a functor or transformation fails to be strictly unital.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitViolation {
    pub arity: usize,
    /// Position of the unit counted from the right, starting at 1.
    pub slot: usize,
    /// The remaining letters, or empty with `object` set at arity 1.
    pub word: Word,
    pub object: Obj,
    pub value: Lin<Letter>,
}

fn unit_words(a: &AInfty, arity: usize) -> Vec<(Word, Obj)> {
    if arity == 1 {
        (0..a.quiver.num_objects()).map(|o| (Vec::new(), o)).collect()
    } else {
        a.quiver.words(arity - 1).into_iter().map(|w| (w, 0)).collect()
    }
}

/// First place where `F^1(id) ≠ id` or `F^i` (`1 < i ≤ through`) is nonzero on a word containing a
/// unit.
pub fn functor_unit_violation(f: &Functor, src: &Units, tgt: &Units, through: usize) -> Option<UnitViolation> {
    let ring = f.target.ring;
    for (o, u) in src {
        let fo = f.obj_map[*o];
        let value = f.comp_multi(std::slice::from_ref(u)).minus(&tgt.get(&fo).cloned().unwrap_or_else(|| Lin::zero(ring)));
        if !value.is_zero() {
            return Some(UnitViolation { arity: 1, slot: 1, word: Vec::new(), object: *o, value });
        }
    }
    for i in 2..=through {
        for (w, o) in unit_words(&f.source, i) {
            for m in 1..=i {
                let value = f.comp_multi(&with_unit(&w, m, src, o, ring));
                if !value.is_zero() {
                    return Some(UnitViolation { arity: i, slot: m, word: w, object: o, value });
                }
            }
        }
    }
    None
}

/// First component `θ^i` (`1 ≤ i ≤ through`) that is nonzero on a word containing a unit.
pub fn prenat_unit_violation(theta: &Prenat, src: &Units, through: usize) -> Option<UnitViolation> {
    let ring = theta.from.target.ring;
    for i in 1..=through {
        for (w, o) in unit_words(&theta.from.source, i) {
            for m in 1..=i {
                let value = expand_prenat(theta, &with_unit(&w, m, src, o, ring));
                if !value.is_zero() {
                    return Some(UnitViolation { arity: i, slot: m, word: w, object: o, value });
                }
            }
        }
    }
    None
}

fn expand_prenat(theta: &Prenat, factors: &[Lin<Letter>]) -> Lin<Letter> {
    let ring = theta.from.target.ring;
    crate::graded::expand(ring, factors).map_linear(ring, |w| theta.comp(w))
}

/// One homotopy of the chain: stage `(1, 1)` repairs `F^1(id)`, stage `(n, m)` with `n > 1` clears
/// units in slot `m` of `F^n`.
#[derive(Clone, Debug)]
pub struct StrictificationStage {
    pub n: usize,
    pub m: usize,
    /// Homotopy from the previous functor to the next.
    pub theta: Prenat,
}

#[derive(Clone, Debug)]
pub struct StrictificationResult {
    /// Arity through which the output is strictly unital.
    pub arity: usize,
    /// The strictly unital functor, truncated to `arity`.
    pub functor: Functor,
    pub stages: Vec<StrictificationStage>,
    /// A single homotopy from the input to the output, determined through `arity`.
    pub total: Prenat,
}

impl StrictificationResult {
    /// Recheck every stage equation, the strict-unit axioms of the output and the composite homotopy.
    pub fn verify(&self, src: &Units, tgt: &Units) -> Result<()> {
        let n = self.arity;
        for (k, st) in self.stages.iter().enumerate() {
            let rep = check_homotopy(&st.theta, n)?;
            if let Some(v) = rep.violation {
                return Err(CoreError::NotAHomotopy(format!("stage ({}, {}) fails at arity {}", st.n, st.m, v.arity)));
            }
            if rep.through < n {
                return Err(CoreError::ArityUnderflow { requested: n, available: rep.through });
            }
            let low = st.n.saturating_sub(1).max(1);
            if st.theta.comps().keys().any(|w| w.len() < low) {
                return Err(CoreError::NotAHomotopy(format!("stage ({}, {}) is nonzero below arity {low}", st.n, st.m)));
            }
            if let Some(next) = self.stages.get(k + 1) {
                if st.theta.to != next.theta.from {
                    return Err(CoreError::NotAHomotopy(format!("stages {k} and {} do not chain", k + 1)));
                }
            }
        }
        if let Some(v) = functor_unit_violation(&self.functor, src, tgt, n) {
            return Err(CoreError::NotUnital(format!("output fails at arity {} slot {}", v.arity, v.slot)));
        }
        let rep = check_functor(&self.functor, n);
        if let Some(v) = rep.violation {
            return Err(CoreError::NotAInfty(format!("output functor fails at arity {}", v.arity)));
        }
        let rep = check_homotopy(&self.total, n)?;
        if let Some(v) = rep.violation {
            return Err(CoreError::NotAHomotopy(format!("composite homotopy fails at arity {}", v.arity)));
        }
        if self.total.to.with_max_arity(n).comps() != self.functor.comps() {
            return Err(CoreError::NotAHomotopy("composite homotopy does not end at the output".into()));
        }
        Ok(())
    }
}

/// Solve `m1(h) = id − F^1(id_A)` in `B(F A, F A)` of degree −1, or check a supplied `h`.
fn unit_homotopy(f: &Functor, o: Obj, u: &Lin<Letter>, tgt: &Units, given: Option<&Lin<Letter>>) -> Result<Lin<Letter>> {
    let b = &f.target;
    let ring = b.ring;
    let fo = f.obj_map[o];
    let want = tgt.get(&fo).cloned().unwrap_or_else(|| Lin::zero(ring)).minus(&f.comp_multi(std::slice::from_ref(u)));
    if let Some(h) = given {
        if h.keys().any(|l| l.deg != -1 || l.src != fo || l.tgt != fo) || b.m_multi(std::slice::from_ref(h)) != want {
            return Err(CoreError::NotUnital(format!("supplied h for {} does not satisfy F¹(id) = id − m1(h)", f.source.quiver.objects[o])));
        }
        return Ok(h.clone());
    }
    if want.is_zero() {
        return Ok(Lin::zero(ring));
    }
    let letters = b.quiver.letters(fo, fo);
    let cols: Vec<usize> = (0..letters.len()).filter(|&j| letters[j].deg == -1).collect();
    let rows: Vec<usize> = (0..letters.len()).filter(|&j| letters[j].deg == 0).collect();
    let d = b.differential_matrix(fo, fo).select(&rows, &cols);
    let rhs: Vec<Scalar> = rows.iter().map(|&i| want.get(&letters[i])).collect();
    if want.keys().any(|l| l.deg != 0) {
        return Err(CoreError::NotUnital("F¹(id) − id is not of degree 0".into()));
    }
    let x = if ring.is_field() { solve_linear(&d, &rhs)? } else { solve_integer(&d, &rhs)? };
    let x = x.ok_or_else(|| {
        CoreError::NotUnital(format!("F¹(id) − id is not a boundary at {}", f.source.quiver.objects[o]))
    })?;
    let mut h = Lin::zero(ring);
    for (k, &j) in cols.iter().enumerate() {
        h.add_term(letters[j], &x[k]);
    }
    Ok(h)
}

fn stage_theta(f: &Functor, units: &Units, n: usize, m: usize, work: usize) -> Result<Prenat> {
    let ring = f.target.ring;
    let sign = ring.sign(m as i64 + 1);
    let mut comps = Table::new();
    for len in [n - 1, n] {
        for w in f.source.quiver.words(len) {
            let v = f.comp_multi(&with_unit(&w, m, units, 0, ring)).scale(&sign);
            if !v.is_zero() {
                comps.insert(w, v);
            }
        }
    }
    Prenat::new(f.clone(), f.clone(), 0, work, BTreeMap::new(), comps)
}

/// Replace a unital functor `F` by a homotopic one that is strictly unital through arity `n`. `F`
/// must be determined through arity `n + 1`. Missing `h_A` are solved for.
pub fn strictify_functor(
    f: &Functor,
    witness: Option<&SplitUnitWitness>,
    h: &BTreeMap<Obj, Lin<Letter>>,
    n: usize,
) -> Result<StrictificationResult> {
    let witness = witness.ok_or_else(|| CoreError::SplitUnitsRequired("no retraction onto the units was supplied".into()))?;
    let src = witness.validate(&f.source)?;
    let tgt = find_strict_units(&f.target)?.ok_or_else(|| CoreError::NotUnital("the target is not strictly unital".into()))?;
    let work = n + 1;
    let available = f.max_arity.min(f.source.max_arity).min(f.target.max_arity);
    if available < work {
        return Err(CoreError::ArityUnderflow { requested: work, available });
    }
    let rep = check_functor(f, work);
    if let Some(v) = rep.violation {
        return Err(CoreError::NotAInfty(format!("the input is not an A∞ functor at arity {}", v.arity)));
    }
    let ring = f.target.ring;
    let mut cur = f.with_max_arity(work);
    let mut stages = Vec::new();
    let mut step = |cur: &mut Functor, theta: Prenat, n: usize, m: usize| -> Result<()> {
        let (g, th) = perturb_by_homotopy(cur, &theta)?;
        *cur = g;
        stages.push(StrictificationStage { n, m, theta: th });
        Ok(())
    };
    // θ^1(f) = p(f) h_A on endomorphisms
    let mut comps = Table::new();
    for (&o, u) in &src {
        let h_o = unit_homotopy(&cur, o, u, &tgt, h.get(&o))?;
        if h_o.is_zero() {
            continue;
        }
        for l in f.source.quiver.letters(o, o) {
            let c = witness.eval(o, &Lin::basis(ring, l));
            if !c.is_zero() {
                comps.insert(vec![l], h_o.scale(&c));
            }
        }
    }
    if !comps.is_empty() {
        let theta = Prenat::new(cur.clone(), cur.clone(), 0, work, BTreeMap::new(), comps)?;
        step(&mut cur, theta, 1, 1)?;
    }
    for k in 2..=n {
        for m in 1..=k {
            let theta = stage_theta(&cur, &src, k, m, work)?;
            if !theta.is_zero() {
                step(&mut cur, theta, k, m)?;
            }
        }
    }
    let total = match stages.split_first() {
        None => Prenat::zero(cur.clone(), cur.clone(), 0, work),
        Some((first, rest)) => {
            let mut t = first.theta.clone();
            for st in rest {
                t = homotopy_sum(&t, &st.theta)?;
            }
            t
        }
    };
    let out = StrictificationResult { arity: n, functor: cur.with_max_arity(n), stages, total };
    out.verify(&src, &tgt)?;
    Ok(out)
}

/// `θ_strict = θ − m1(θ_tilde)`, strictly unital and natural through arity `n`.
#[derive(Clone, Debug)]
pub struct NatStrictification {
    pub strict: Prenat,
    pub tilde: Prenat,
}

/// Strictify a natural transformation between strictly unital functors; `θ` must be determined
/// through arity `n + 1`.
pub fn strictify_nat(theta: &Prenat, n: usize) -> Result<NatStrictification> {
    let work = n + 1;
    if theta.max_arity < work {
        return Err(CoreError::ArityUnderflow { requested: work, available: theta.max_arity });
    }
    let rep = check_natural(theta, work);
    if let Some(v) = rep.violation {
        return Err(CoreError::NotNatural(format!("m1(θ) is nonzero at arity {}", v.arity)));
    }
    let a = &theta.from.source;
    let ring = theta.from.target.ring;
    let units = find_strict_units(a)?.ok_or_else(|| CoreError::NotUnital("the source is not strictly unital".into()))?;
    let mut cur = theta.clone();
    let mut tilde = Prenat::zero(theta.from.clone(), theta.to.clone(), theta.degree - 1, work);
    for k in 1..=n {
        for m in 1..=k {
            let sign = ring.sign(m as i64);
            let mut theta0 = BTreeMap::new();
            let mut comps = Table::new();
            if k == 1 {
                for (&o, u) in &units {
                    theta0.insert(o, expand_prenat(&cur, std::slice::from_ref(u)).scale(&sign));
                }
            } else {
                for w in a.quiver.words(k - 1) {
                    comps.insert(w.clone(), expand_prenat(&cur, &with_unit(&w, m, &units, 0, ring)).scale(&sign));
                }
            }
            for w in a.quiver.words(k) {
                comps.insert(w.clone(), expand_prenat(&cur, &with_unit(&w, m, &units, 0, ring)).scale(&sign));
            }
            let bar = Prenat::new(theta.from.clone(), theta.to.clone(), theta.degree - 1, work, theta0, comps)?;
            if bar.is_zero() {
                continue;
            }
            cur = cur.plus(&m1_prenat(&bar).scale(&ring.sign(1)));
            tilde = tilde.plus(&bar);
        }
    }
    if let Some(v) = prenat_unit_violation(&cur, &units, n) {
        return Err(CoreError::NotUnital(format!("strictified transformation fails at arity {} slot {}", v.arity, v.slot)));
    }
    if let Some(v) = check_natural(&cur, n).violation {
        return Err(CoreError::NotNatural(format!("strictified transformation fails at arity {}", v.arity)));
    }
    Ok(NatStrictification { strict: cur, tilde })
}

/// `θ̃` with `θ̃^i = θ^i` for `i > 0` and `θ̃^0 = id`: a natural transformation witnessing that
/// homotopic functors into a strictly unital category are weakly equivalent.
pub fn homotopy_to_weak_equiv(theta: &Prenat) -> Result<Prenat> {
    let rep = check_homotopy(theta, theta.max_arity)?;
    if let Some(v) = rep.violation {
        let names: Vec<&str> = v.word.iter().map(|l| theta.from.source.quiver.name(l)).collect();
        return Err(CoreError::NotAHomotopy(format!("G ≠ F + m1(θ) at arity {} on [{}]", v.arity, names.join(", "))));
    }
    let units = find_strict_units(&theta.from.target)?
        .ok_or_else(|| CoreError::NotUnital("the target is not strictly unital".into()))?;
    let mut theta0 = BTreeMap::new();
    for o in 0..theta.from.source.quiver.num_objects() {
        let fo = theta.from.obj_map[o];
        theta0.insert(o, units.get(&fo).cloned().ok_or_else(|| CoreError::NotUnital(format!("no unit at object {fo}")))?);
    }
    let comps = truncate(theta.comps(), rep.through).into_iter().map(|(w, v)| (w, v.neg())).collect();
    Prenat::new(theta.from.clone(), theta.to.clone(), 0, rep.through, theta0, comps)
}

fn truncate(t: &Table, n: usize) -> Table {
    t.iter().filter(|(w, _)| w.len() <= n).map(|(w, v)| (w.clone(), v.clone())).collect()
}
