//! A∞ categories, functors and prenatural transformations on finite graded quivers,
//! truncated at an arity bound.

mod cohomology;
mod functor;
mod prenat;
mod units;

use std::collections::BTreeMap;

use ainfty_coeff::{Lin, Ring};

use crate::graded::{
    is_composable, koszul_sign, shift_operation, shifted_degree, word_degree, GradedModule, Letter, Obj,
    ShiftDirection, Word,
};
use crate::{CoreError, Result};

pub use cohomology::{cohomology, GradedCategory, HomCohomology};
pub use functor::{check_functor, check_functor_shifted, compose_functors, Functor};
pub use prenat::{
    check_homotopy, check_natural, homotopy_sum, invert_homotopy, m1_prenat, perturb_by_homotopy, Prenat,
};
pub use prenat::m1_component;
pub use units::{
    augment, find_cohomological_units, find_strict_units, is_strict_unit, tensor_dg, unit_checks, unit_checks_with,
    CohomologicalUnit, SplitUnitWitness, UnitHints, UnitHomotopies, UnitReport, UnitalVerdict, Units,
};

/// Multilinear operation table: input word to output combination.
pub type Table = BTreeMap<Word, Lin<Letter>>;

/// Objects and graded hom modules; every ordered pair is present, possibly of rank 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub objects: Vec<String>,
    hom: BTreeMap<(Obj, Obj), GradedModule>,
}

impl Quiver {
    pub fn new(objects: Vec<String>, mut hom: BTreeMap<(Obj, Obj), GradedModule>) -> Result<Self> {
        let n = objects.len();
        for &(a, b) in hom.keys() {
            if a >= n || b >= n {
                return Err(CoreError::Schema(format!("hom pair ({a},{b}) out of range")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                hom.entry((a, b)).or_default();
            }
        }
        Ok(Quiver { objects, hom })
    }

    /// One object with the given endomorphism basis.
    pub fn algebra(basis: Vec<(String, i64)>) -> Result<Self> {
        let mut hom = BTreeMap::new();
        hom.insert((0, 0), GradedModule::new(basis)?);
        Quiver::new(vec!["A".into()], hom)
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn object_index(&self, name: &str) -> Option<Obj> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn hom(&self, a: Obj, b: Obj) -> &GradedModule {
        &self.hom[&(a, b)]
    }

    pub fn homs(&self) -> impl Iterator<Item = (&(Obj, Obj), &GradedModule)> {
        self.hom.iter()
    }

    pub fn letter(&self, a: Obj, b: Obj, idx: usize) -> Letter {
        Letter { src: a, tgt: b, idx, deg: self.hom(a, b).degree(idx) }
    }

    pub fn letter_by_name(&self, a: Obj, b: Obj, name: &str) -> Option<Letter> {
        self.hom(a, b).index_of(name).map(|i| self.letter(a, b, i))
    }

    pub fn name(&self, l: &Letter) -> &str {
        &self.hom(l.src, l.tgt).basis[l.idx].0
    }

    pub fn letters(&self, a: Obj, b: Obj) -> Vec<Letter> {
        (0..self.hom(a, b).rank()).map(|i| self.letter(a, b, i)).collect()
    }

    pub fn all_letters(&self) -> Vec<Letter> {
        self.hom.keys().flat_map(|&(a, b)| self.letters(a, b)).collect()
    }

    pub fn contains(&self, l: &Letter) -> bool {
        self.hom.get(&(l.src, l.tgt)).is_some_and(|m| l.idx < m.rank() && m.degree(l.idx) == l.deg)
    }

    /// All composable words of length `n`, sorted.
    pub fn words(&self, n: usize) -> Vec<Word> {
        let mut by_src: Vec<Vec<Letter>> = vec![Vec::new(); self.num_objects()];
        for l in self.all_letters() {
            by_src[l.src].push(l);
        }
        // grow from f_1 leftwards, then reverse into written order
        let mut cur: Vec<Word> = if n == 0 { vec![Vec::new()] } else { self.all_letters().into_iter().map(|l| vec![l]).collect() };
        for _ in 1..n {
            let mut next = Vec::new();
            for w in &cur {
                let last = w.last().unwrap();
                for l in &by_src[last.tgt] {
                    let mut w2 = w.clone();
                    w2.push(*l);
                    next.push(w2);
                }
            }
            cur = next;
        }
        let mut out: Vec<Word> = cur
            .into_iter()
            .map(|mut w| {
                w.reverse();
                w
            })
            .collect();
        out.sort();
        out
    }

    /// Source and target object of a nonempty composable word.
    pub fn ends(w: &[Letter]) -> (Obj, Obj) {
        (w.last().unwrap().src, w[0].tgt)
    }
}

/// Object sitting at boundary `q` of a word (letters `w[q..]` lie to its right).
pub(crate) fn boundary_object(w: &[Letter], q: usize, empty: Obj) -> Obj {
    if w.is_empty() {
        empty
    } else if q < w.len() {
        w[q].tgt
    } else {
        w[w.len() - 1].src
    }
}

/// All compositions `(i_1, …, i_r)` of `n` into positive parts; `i_1` is the rightmost block.
pub(crate) fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << (n - 1)) {
        let mut parts = Vec::new();
        let mut len = 1;
        for b in 0..n - 1 {
            if mask & (1 << b) != 0 {
                parts.push(len);
                len = 1;
            } else {
                len += 1;
            }
        }
        parts.push(len);
        out.push(parts);
    }
    out
}

/// First failure of a relation check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub arity: usize,
    pub word: Word,
    /// Set for arity-0 components, which are indexed by an object rather than a word.
    pub object: Option<Obj>,
    pub residual: Lin<Letter>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    /// Arities actually checked (the request clamped to the arity bound).
    pub through: usize,
    /// Arity bound of the data; relations beyond it are not representable.
    pub frontier: usize,
    pub violation: Option<Violation>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }

    pub fn first_violating_arity(&self) -> Option<usize> {
        self.violation.as_ref().map(|v| v.arity)
    }
}

/// Non-unital A∞ category with operations up to `max_arity`.
/// Operations are kept in shifted form `b_i`; the unshifted `m_i` are cached alongside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfty {
    pub ring: Ring,
    pub quiver: Quiver,
    pub max_arity: usize,
    b: Table,
    m: Table,
}

impl AInfty {
    pub fn from_unshifted(ring: Ring, quiver: Quiver, max_arity: usize, m: Table) -> Result<Self> {
        let m = clean(m);
        validate_table(&quiver, &m, max_arity, |n| 2 - n as i64, "operation")?;
        let b = shift_operation(&m, 1, ShiftDirection::ToShifted);
        Ok(AInfty { ring, quiver, max_arity, b, m })
    }

    pub fn from_shifted(ring: Ring, quiver: Quiver, max_arity: usize, b: Table) -> Result<Self> {
        let b = clean(b);
        let m = shift_operation(&b, 1, ShiftDirection::ToUnshifted);
        validate_table(&quiver, &m, max_arity, |n| 2 - n as i64, "operation")?;
        Ok(AInfty { ring, quiver, max_arity, b, m })
    }

    /// The structure with no operations at all.
    pub fn zero(ring: Ring, quiver: Quiver, max_arity: usize) -> Self {
        AInfty { ring, quiver, max_arity, b: Table::new(), m: Table::new() }
    }

    pub fn m(&self, w: &[Letter]) -> Lin<Letter> {
        self.m.get(w).cloned().unwrap_or_else(|| Lin::zero(self.ring))
    }

    pub fn b(&self, w: &[Letter]) -> Lin<Letter> {
        self.b.get(w).cloned().unwrap_or_else(|| Lin::zero(self.ring))
    }

    pub fn m_table(&self) -> &Table {
        &self.m
    }

    pub fn b_table(&self) -> &Table {
        &self.b
    }

    /// `m` evaluated multilinearly on a tensor of combinations.
    pub fn m_multi(&self, factors: &[Lin<Letter>]) -> Lin<Letter> {
        let ws = crate::graded::expand(self.ring, factors);
        ws.map_linear(self.ring, |w| self.m(w))
    }

    pub fn m_lin(&self, ws: &Lin<Word>) -> Lin<Letter> {
        ws.map_linear(self.ring, |w| self.m(w))
    }

    /// Whether every operation of arity above 2 vanishes.
    pub fn is_dg(&self) -> bool {
        self.m.keys().all(|w| w.len() <= 2)
    }

    pub fn with_max_arity(&self, n: usize) -> AInfty {
        let keep = |t: &Table| t.iter().filter(|(w, _)| w.len() <= n).map(|(w, v)| (w.clone(), v.clone())).collect();
        AInfty { ring: self.ring, quiver: self.quiver.clone(), max_arity: n, b: keep(&self.b), m: keep(&self.m) }
    }

    /// `m_1` on a single hom module as a matrix (column = image of basis element).
    pub fn differential_matrix(&self, a: Obj, b: Obj) -> ainfty_coeff::SparseMatrix {
        let r = self.quiver.hom(a, b).rank();
        let mut d = ainfty_coeff::SparseMatrix::zero(self.ring, r, r);
        for l in self.quiver.letters(a, b) {
            for (o, c) in self.m(&[l]).iter() {
                d.set(o.idx, l.idx, c.clone());
            }
        }
        d
    }
}

pub(crate) fn clean(t: Table) -> Table {
    t.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// Checks composability, membership and the degree of every entry of an unshifted table.
pub(crate) fn validate_table(
    quiver: &Quiver,
    t: &Table,
    max_arity: usize,
    degree: impl Fn(usize) -> i64,
    what: &str,
) -> Result<()> {
    for (w, v) in t {
        if w.is_empty() || w.len() > max_arity {
            return Err(CoreError::Schema(format!("{what} of arity {} outside 1..={max_arity}", w.len())));
        }
        if !is_composable(w) || !w.iter().all(|l| quiver.contains(l)) {
            return Err(CoreError::Schema(format!("{what} input is not a composable word")));
        }
        let (s, e) = Quiver::ends(w);
        for (o, _) in v.iter() {
            if o.src != s || o.tgt != e || !quiver.contains(o) {
                return Err(CoreError::Schema(format!("{what} output lies in the wrong hom module")));
            }
            let want = word_degree(w) + degree(w.len());
            if o.deg != want {
                return Err(CoreError::DegreeMismatch(format!(
                    "{what} of arity {} has output degree {} instead of {want}",
                    w.len(),
                    o.deg
                )));
            }
        }
    }
    Ok(())
}

/// Literal residual of the associativity relation of arity `w.len()` on `w`.
pub fn stasheff_residual(a: &AInfty, w: &[Letter]) -> Lin<Letter> {
    let n = w.len() as i64;
    let mut res = Lin::zero(a.ring);
    for k in 1..=n {
        for i in 0..=(n - k) {
            let lo = (n - i - k) as usize;
            let hi = (n - i) as usize;
            let inner = a.m(&w[lo..hi]);
            if inner.is_zero() {
                continue;
            }
            let left = &w[..lo];
            let mut par = i + k * (n - i - k);
            if koszul_sign(2 - k, word_degree(left)) < 0 {
                par += 1;
            }
            let s = a.ring.sign(par);
            for (y, c) in inner.iter() {
                let mut w2: Word = left.to_vec();
                w2.push(*y);
                w2.extend_from_slice(&w[hi..]);
                res.add_scaled(&a.m(&w2), &(c * &s));
            }
        }
    }
    res
}

/// Residual of `b ∘ b̂` on the shifted word `w`, where `b̂` is the coderivation extension.
pub fn shifted_residual(a: &AInfty, w: &[Letter]) -> Lin<Letter> {
    let n = w.len();
    let mut res = Lin::zero(a.ring);
    for lo in 0..n {
        for hi in lo + 1..=n {
            let inner = a.b(&w[lo..hi]);
            if inner.is_zero() {
                continue;
            }
            let s = a.ring.sign(shifted_degree(&w[..lo]));
            for (y, c) in inner.iter() {
                let mut w2: Word = w[..lo].to_vec();
                w2.push(*y);
                w2.extend_from_slice(&w[hi..]);
                res.add_scaled(&a.b(&w2), &(c * &s));
            }
        }
    }
    res
}

fn run_check(a: &AInfty, up_to: usize, residual: impl Fn(&AInfty, &[Letter]) -> Lin<Letter>) -> CheckReport {
    let through = up_to.min(a.max_arity);
    for n in 1..=through {
        for w in a.quiver.words(n) {
            let r = residual(a, &w);
            if !r.is_zero() {
                return CheckReport {
                    through,
                    frontier: a.max_arity,
                    violation: Some(Violation { arity: n, word: w, object: None, residual: r }),
                };
            }
        }
    }
    CheckReport { through, frontier: a.max_arity, violation: None }
}

/// The A∞ associativity relations in their literal unshifted form, through `up_to`.
pub fn check_stasheff(a: &AInfty, up_to: usize) -> CheckReport {
    run_check(a, up_to, stasheff_residual)
}

/// The same relations as `b ∘ b̂ = 0` on the shifted side.
pub fn check_stasheff_shifted(a: &AInfty, up_to: usize) -> CheckReport {
    run_check(a, up_to, shifted_residual)
}
