use std::collections::BTreeMap;
use std::sync::Arc;

use ainfty_coeff::{rank_kernel, Lin, Ring, SparseMatrix};

use super::{AInfty, Quiver, Table};
use crate::graded::{expand, GradedModule, Letter, Obj};
use crate::system::KeyedSystem;
use crate::{CoreError, Result};

pub type Units = BTreeMap<Obj, Lin<Letter>>;

/// Closed degree-0 elements representing the identities of the cohomology category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologicalUnit {
    pub units: Units,
}

/// Homotopies `h` with `action - id = m_1 h + h m_1` on one hom complex, right then left action.
pub type UnitHomotopies = BTreeMap<(Obj, Obj), (SparseMatrix, SparseMatrix)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitalVerdict {
    Unital(UnitHomotopies),
    NotUnital(String),
    /// Over Z without a strict unit the homotopies must be supplied.
    NeedsWitness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitReport {
    pub strict: Option<Units>,
    pub cohomological: Option<CohomologicalUnit>,
    pub unital: UnitalVerdict,
}

impl UnitReport {
    pub fn is_unital(&self) -> bool {
        matches!(self.unital, UnitalVerdict::Unital(_))
    }
}

/// Optional user-supplied data for the unit checks.
#[derive(Clone, Debug, Default)]
pub struct UnitHints {
    pub units: Option<Units>,
    pub homotopies: Option<UnitHomotopies>,
}

/// Evaluate `m_i` with `u` inserted at position `pos` (counted in written order) of `w`.
fn m_with(a: &AInfty, w: &[Letter], pos: usize, u: &Lin<Letter>) -> Lin<Letter> {
    let mut factors: Vec<Lin<Letter>> = w.iter().map(|l| Lin::basis(a.ring, *l)).collect();
    factors.insert(pos, u.clone());
    a.m_lin(&expand(a.ring, &factors))
}

/// Exact check of the strict unit axioms for a candidate family.
pub fn is_strict_unit(a: &AInfty, units: &Units) -> bool {
    let q = &a.quiver;
    for o in 0..q.num_objects() {
        let Some(u) = units.get(&o) else { return false };
        if u.keys().any(|l| l.src != o || l.tgt != o || l.deg != 0) {
            return false;
        }
        for l in q.all_letters() {
            let x = Lin::basis(a.ring, l);
            if l.src == o && a.m_multi(&[x.clone(), u.clone()]) != x {
                return false;
            }
            if l.tgt == o && a.m_multi(&[u.clone(), x.clone()]) != x {
                return false;
            }
        }
        for n in 1..=a.max_arity {
            if n == 2 {
                continue;
            }
            for w in q.words(n - 1) {
                for pos in 0..=w.len() {
                    if !unit_fits(&w, pos, o) {
                        continue;
                    }
                    if !m_with(a, &w, pos, u).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Whether an endomorphism of `o` can be inserted at `pos` in `w` keeping it composable.
pub(crate) fn unit_fits(w: &[Letter], pos: usize, o: Obj) -> bool {
    if w.is_empty() {
        return true;
    }
    let left_ok = pos == 0 || w[pos - 1].src == o;
    let right_ok = pos == w.len() || w[pos].tgt == o;
    left_ok && right_ok
}

/// Solve for strict units, one object at a time.
pub fn find_strict_units(a: &AInfty) -> Result<Option<Units>> {
    let q = &a.quiver;
    let ring = a.ring;
    let mut out = Units::new();
    for o in 0..q.num_objects() {
        let cand: Vec<Letter> = q.letters(o, o).into_iter().filter(|l| l.deg == 0).collect();
        let mut sys: KeyedSystem<(u8, Vec<Letter>, usize, Letter), Letter> = KeyedSystem::new(ring);
        for c in &cand {
            sys.unknown(*c);
        }
        for l in q.all_letters() {
            if l.src == o {
                for c in &cand {
                    for (y, v) in a.m(&[l, *c]).iter() {
                        sys.add((0, vec![l], 0, *y), *c, v);
                    }
                }
                sys.add_rhs((0, vec![l], 0, l), &ring.one());
            }
            if l.tgt == o {
                for c in &cand {
                    for (y, v) in a.m(&[*c, l]).iter() {
                        sys.add((1, vec![l], 0, *y), *c, v);
                    }
                }
                sys.add_rhs((1, vec![l], 0, l), &ring.one());
            }
        }
        for n in 1..=a.max_arity {
            if n == 2 {
                continue;
            }
            for w in q.words(n - 1) {
                for pos in 0..=w.len() {
                    if !unit_fits(&w, pos, o) {
                        continue;
                    }
                    for c in &cand {
                        let mut full = w.clone();
                        full.insert(pos, *c);
                        for (y, v) in a.m(&full).iter() {
                            sys.add((2, w.clone(), pos, *y), *c, v);
                        }
                    }
                }
            }
        }
        match sys.solve()? {
            Some(sol) => {
                let mut u = Lin::zero(ring);
                for (c, v) in sol {
                    u.add_term(c, &v);
                }
                out.insert(o, u);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// A basis of the cycles of one hom complex, computed degree by degree so each is homogeneous.
pub(crate) fn homogeneous_cycles(a: &AInfty, s: Obj, t: Obj) -> Result<Vec<Lin<Letter>>> {
    let q = &a.quiver;
    let letters = q.letters(s, t);
    let mut degs: Vec<i64> = letters.iter().map(|l| l.deg).collect();
    degs.sort();
    degs.dedup();
    let d = a.differential_matrix(s, t);
    let mut out = Vec::new();
    for k in degs {
        let cols: Vec<usize> = letters.iter().filter(|l| l.deg == k).map(|l| l.idx).collect();
        let rows: Vec<usize> = letters.iter().filter(|l| l.deg == k + 1).map(|l| l.idx).collect();
        let sub = d.select(&rows, &cols);
        for z in rank_kernel(&sub)?.kernel {
            let mut v = Lin::zero(a.ring);
            for (i, c) in z.iter().enumerate() {
                v.add_term(letters[cols[i]], c);
            }
            out.push(v);
        }
    }
    Ok(out)
}

fn right_action(a: &AInfty, s: Obj, t: Obj, u: &Lin<Letter>) -> SparseMatrix {
    let r = a.quiver.hom(s, t).rank();
    let mut m = SparseMatrix::zero(a.ring, r, r);
    for l in a.quiver.letters(s, t) {
        for (y, c) in a.m_multi(&[Lin::basis(a.ring, l), u.clone()]).iter() {
            m.add_to(y.idx, l.idx, c);
        }
    }
    m
}

fn left_action(a: &AInfty, s: Obj, t: Obj, u: &Lin<Letter>) -> SparseMatrix {
    let r = a.quiver.hom(s, t).rank();
    let mut m = SparseMatrix::zero(a.ring, r, r);
    for l in a.quiver.letters(s, t) {
        for (y, c) in a.m_multi(&[u.clone(), Lin::basis(a.ring, l)]).iter() {
            m.add_to(y.idx, l.idx, c);
        }
    }
    m
}

/// Cohomological units: closed degree-0 `u_A` with `m_2(z ⊗ u) - z` and `m_2(u ⊗ z) - z` exact for
/// every cycle `z`. The first solution in basis order is returned.
pub fn find_cohomological_units(a: &AInfty) -> Result<Option<CohomologicalUnit>> {
    let q = &a.quiver;
    let ring = a.ring;
    let mut out = Units::new();
    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    enum Var {
        U(Letter),
        Pre(u8, Obj, Obj, usize, Letter),
    }
    for o in 0..q.num_objects() {
        let cand: Vec<Letter> = q.letters(o, o).into_iter().filter(|l| l.deg == 0).collect();
        let mut sys: KeyedSystem<(u8, Obj, Obj, usize, Letter), Var> = KeyedSystem::new(ring);
        for c in &cand {
            sys.unknown(Var::U(*c));
            for (y, v) in a.m(&[*c]).iter() {
                sys.add((9, o, o, 0, *y), Var::U(*c), v);
            }
        }
        for ((s, t), _) in q.homs() {
            let (s, t) = (*s, *t);
            for side in [0u8, 1u8] {
                if (side == 0 && s != o) || (side == 1 && t != o) {
                    continue;
                }
                for (j, zl) in homogeneous_cycles(a, s, t)?.into_iter().enumerate() {
                    for c in &cand {
                        let cu = Lin::basis(ring, *c);
                        let act = if side == 0 { a.m_multi(&[zl.clone(), cu]) } else { a.m_multi(&[cu, zl.clone()]) };
                        for (y, v) in act.iter() {
                            sys.add((side, s, t, j, *y), Var::U(*c), v);
                        }
                    }
                    for (y, v) in zl.iter() {
                        sys.add_rhs((side, s, t, j, *y), v);
                    }
                    // minus m_1 of a free preimage of matching degree
                    let deg = zl.keys().next().map(|l| l.deg);
                    for x in q.letters(s, t) {
                        if deg != Some(x.deg + 1) {
                            continue;
                        }
                        for (y, v) in a.m(&[x]).iter() {
                            sys.add((side, s, t, j, *y), Var::Pre(side, s, t, j, x), &-v);
                        }
                    }
                }
            }
        }
        match sys.solve()? {
            Some(sol) => {
                let mut u = Lin::zero(ring);
                for (var, v) in sol {
                    if let Var::U(c) = var {
                        u.add_term(c, &v);
                    }
                }
                out.insert(o, u);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(CohomologicalUnit { units: out }))
}

/// Solve `m_1 h + h m_1 = target` for a degree `-1` endomorphism `h` of one hom complex.
pub(crate) fn solve_null_homotopy(
    ring: Ring,
    module: &GradedModule,
    d: &SparseMatrix,
    target: &SparseMatrix,
) -> Result<Option<SparseMatrix>> {
    let r = module.rank();
    let mut sys: KeyedSystem<(usize, usize), (usize, usize)> = KeyedSystem::new(ring);
    for i in 0..r {
        for j in 0..r {
            if module.degree(i) == module.degree(j) - 1 {
                sys.unknown((i, j));
            }
        }
    }
    // (d h)[k][j] = Σ_i d[k][i] h[i][j]; (h d)[i][l] = Σ_j h[i][j] d[j][l]
    for (k, i, c) in d.entries() {
        for j in 0..r {
            if module.degree(i) == module.degree(j) - 1 {
                sys.add((k, j), (i, j), c);
            }
        }
    }
    for (j, l, c) in d.entries() {
        for i in 0..r {
            if module.degree(i) == module.degree(j) - 1 {
                sys.add((i, l), (i, j), c);
            }
        }
    }
    for (i, j, c) in target.entries() {
        sys.add_rhs((i, j), c);
    }
    Ok(sys.solve()?.map(|sol| {
        let mut h = SparseMatrix::zero(ring, r, r);
        for ((i, j), v) in sol {
            h.set(i, j, v);
        }
        h
    }))
}

fn homotopy_ok(d: &SparseMatrix, h: &SparseMatrix, target: &SparseMatrix) -> bool {
    d.mul(h).add(&h.mul(d)) == *target
}

/// Strict, cohomological and homotopy unitality, with witnesses.
pub fn unit_checks(a: &AInfty) -> Result<UnitReport> {
    unit_checks_with(a, &UnitHints::default())
}

pub fn unit_checks_with(a: &AInfty, hints: &UnitHints) -> Result<UnitReport> {
    let ring = a.ring;
    let strict = match &hints.units {
        Some(u) if is_strict_unit(a, u) => Some(u.clone()),
        Some(_) => None,
        None => find_strict_units(a)?,
    };
    if let Some(u) = &strict {
        let zero = a
            .quiver
            .homs()
            .map(|(&(s, t), m)| {
                let z = SparseMatrix::zero(ring, m.rank(), m.rank());
                ((s, t), (z.clone(), z))
            })
            .collect();
        return Ok(UnitReport {
            strict: Some(u.clone()),
            cohomological: Some(CohomologicalUnit { units: u.clone() }),
            unital: UnitalVerdict::Unital(zero),
        });
    }
    let cohomological = match &hints.units {
        Some(u) => Some(CohomologicalUnit { units: u.clone() }),
        None => find_cohomological_units(a)?,
    };
    let Some(cu) = &cohomological else {
        return Ok(UnitReport {
            strict: None,
            cohomological: None,
            unital: UnitalVerdict::NotUnital("no cohomological unit".into()),
        });
    };
    let mut homotopies = UnitHomotopies::new();
    for (&(s, t), m) in a.quiver.homs() {
        let d = a.differential_matrix(s, t);
        let id = SparseMatrix::identity(ring, m.rank());
        let tr = right_action(a, s, t, &cu.units[&s]).sub(&id);
        let tl = left_action(a, s, t, &cu.units[&t]).sub(&id);
        if let Some(w) = hints.homotopies.as_ref().and_then(|h| h.get(&(s, t))) {
            if !homotopy_ok(&d, &w.0, &tr) || !homotopy_ok(&d, &w.1, &tl) {
                return Ok(UnitReport {
                    strict: None,
                    cohomological,
                    unital: UnitalVerdict::NotUnital(format!("supplied homotopy fails on hom ({s},{t})")),
                });
            }
            homotopies.insert((s, t), w.clone());
            continue;
        }
        if !ring.is_field() {
            return Ok(UnitReport { strict: None, cohomological, unital: UnitalVerdict::NeedsWitness });
        }
        let hr = solve_null_homotopy(ring, m, &d, &tr)?;
        let hl = solve_null_homotopy(ring, m, &d, &tl)?;
        match (hr, hl) {
            (Some(hr), Some(hl)) => {
                homotopies.insert((s, t), (hr, hl));
            }
            _ => {
                return Ok(UnitReport {
                    strict: None,
                    cohomological,
                    unital: UnitalVerdict::NotUnital(format!("unit action not homotopic to id on hom ({s},{t})")),
                })
            }
        }
    }
    Ok(UnitReport { strict: None, cohomological, unital: UnitalVerdict::Unital(homotopies) })
}

/// Name of the adjoined unit, made unique within the module.
fn fresh_name(m: &GradedModule, base: &str) -> String {
    let mut name = base.to_string();
    while m.index_of(&name).is_some() {
        name.push('\'');
    }
    name
}

/// The augmentation: a formal strict unit `1_A` adjoined to every endomorphism module.
pub fn augment(a: &AInfty) -> Result<(AInfty, Units)> {
    let q = &a.quiver;
    let mut hom = BTreeMap::new();
    let mut units = Units::new();
    for (&(s, t), m) in q.homs() {
        let mut m = m.clone();
        if s == t {
            let name = fresh_name(&m, &format!("1_{}", q.objects[s]));
            m.basis.push((name, 0));
        }
        hom.insert((s, t), m);
    }
    let q2 = Quiver::new(q.objects.clone(), hom)?;
    let mut table: Table = a.m_table().clone();
    for o in 0..q.num_objects() {
        let one = q2.letter(o, o, q.hom(o, o).rank());
        units.insert(o, Lin::basis(a.ring, one));
        for l in q2.all_letters() {
            if l.src == o {
                table.insert(vec![l, one], Lin::basis(a.ring, l));
            }
            if l.tgt == o {
                table.insert(vec![one, l], Lin::basis(a.ring, l));
            }
        }
    }
    Ok((AInfty::from_unshifted(a.ring, q2, a.max_arity.max(2), table)?, units))
}

/// Tensor product of two dg categories; objects are pairs `(a, b)` indexed `a·|B| + b`.
pub fn tensor_dg(a: &AInfty, b: &AInfty) -> Result<Arc<AInfty>> {
    if a.ring != b.ring {
        return Err(ainfty_coeff::CoeffError::RingMismatch(a.ring, b.ring).into());
    }
    for x in [a, b] {
        if let Some(w) = x.m_table().keys().find(|w| w.len() > 2) {
            return Err(CoreError::NotDg(w.len()));
        }
    }
    let ring = a.ring;
    let (na, nb) = (a.quiver.num_objects(), b.quiver.num_objects());
    let obj = |x: Obj, y: Obj| x * nb + y;
    let mut objects = Vec::new();
    for x in &a.quiver.objects {
        for y in &b.quiver.objects {
            objects.push(format!("({x},{y})"));
        }
    }
    let mut hom = BTreeMap::new();
    for s1 in 0..na {
        for t1 in 0..na {
            for s2 in 0..nb {
                for t2 in 0..nb {
                    hom.insert((obj(s1, s2), obj(t1, t2)), a.quiver.hom(s1, t1).tensor(b.quiver.hom(s2, t2)));
                }
            }
        }
    }
    let q = Quiver::new(objects, hom)?;
    // letter of the tensor from a pair of letters
    let pair = |f: &Letter, g: &Letter| -> Letter {
        let rb = b.quiver.hom(g.src, g.tgt).rank();
        q.letter(obj(f.src, g.src), obj(f.tgt, g.tgt), f.idx * rb + g.idx)
    };
    let split = |l: &Letter| -> (Letter, Letter) {
        let (s1, s2) = (l.src / nb, l.src % nb);
        let (t1, t2) = (l.tgt / nb, l.tgt % nb);
        let rb = b.quiver.hom(s2, t2).rank();
        (a.quiver.letter(s1, t1, l.idx / rb), b.quiver.letter(s2, t2, l.idx % rb))
    };
    let mut table = Table::new();
    for l in q.all_letters() {
        let (f, g) = split(&l);
        let mut v = Lin::zero(ring);
        for (df, c) in a.m(&[f]).iter() {
            v.add_term(pair(df, &g), c);
        }
        let s = ring.sign(f.deg);
        for (dg, c) in b.m(&[g]).iter() {
            v.add_term(pair(&f, dg), &(c * &s));
        }
        if !v.is_zero() {
            table.insert(vec![l], v);
        }
    }
    for w in q.words(2) {
        let (f, g) = split(&w[0]);
        let (f2, g2) = split(&w[1]);
        let ma = a.m(&[f, f2]);
        let mb = b.m(&[g, g2]);
        if ma.is_zero() || mb.is_zero() {
            continue;
        }
        let s = ring.sign(g.deg * f2.deg);
        let mut v = Lin::zero(ring);
        for (x, c) in ma.iter() {
            for (y, e) in mb.iter() {
                v.add_term(pair(x, y), &(&(c * e) * &s));
            }
        }
        table.insert(w, v);
    }
    Ok(Arc::new(AInfty::from_unshifted(ring, q, a.max_arity.min(b.max_arity).max(2), table)?))
}

/// Retractions `p_A: A(A,A) → K` with `p_A(id_A) = 1`, each given by its values on basis letters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplitUnitWitness {
    pub retraction: BTreeMap<Obj, Lin<Letter>>,
}

impl SplitUnitWitness {
    /// `p_A(x)` for a combination of letters of `A(A,A)`.
    pub fn eval(&self, o: Obj, x: &Lin<Letter>) -> ainfty_coeff::Scalar {
        let ring = x.ring();
        let mut s = ring.zero();
        if let Some(p) = self.retraction.get(&o) {
            for (l, c) in x.iter() {
                s += &(c * &p.get(l));
            }
        }
        s
    }

    /// Dual of a letter with invertible coefficient in each unit; exists whenever such a letter does.
    pub fn canonical(units: &Units) -> Option<Self> {
        let mut retraction = BTreeMap::new();
        for (&o, u) in units {
            let (l, c) = u.iter().find(|(_, c)| c.is_unit())?;
            retraction.insert(o, Lin::single(u.ring(), *l, c.inv().ok()?));
        }
        Some(SplitUnitWitness { retraction })
    }

    /// Checks the witness against the strict units of `a` and returns them.
    pub fn validate(&self, a: &AInfty) -> Result<Units> {
        let units = find_strict_units(a)?
            .ok_or_else(|| CoreError::SplitUnitsRequired("the source is not strictly unital".into()))?;
        for (&o, u) in &units {
            let p = self
                .retraction
                .get(&o)
                .ok_or_else(|| CoreError::SplitUnitsRequired(format!("no retraction for {}", a.quiver.objects[o])))?;
            if p.keys().any(|l| l.src != o || l.tgt != o || l.deg != 0) {
                return Err(CoreError::SplitUnitsRequired(format!(
                    "retraction for {} is not a degree-0 functional on its endomorphisms",
                    a.quiver.objects[o]
                )));
            }
            if !self.eval(o, u).is_one() {
                return Err(CoreError::SplitUnitsRequired(format!(
                    "retraction for {} does not send the unit to 1",
                    a.quiver.objects[o]
                )));
            }
        }
        Ok(units)
    }
}
