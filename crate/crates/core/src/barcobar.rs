//! Bar and cobar constructions truncated by word length, the resolution `U(A)`, the unit functor
//! `η: A → U(A)` and the quotient of `U(A)` by its strict-unit ideal.
//!
//! Cobar words are lists of factors in written order: `factors[0]` is the leftmost `c^l`. A factor
//! carries an `A`-word and a `B`-word; the one-variable construction is the case where `B` is the
//! zero algebra.

use std::collections::BTreeMap;
use std::sync::Arc;

use ainfty_coeff::{Lin, Ring, Scalar, SparseMatrix};

use crate::ainfty::{AInfty, Functor, Quiver, SplitUnitWitness, Table};
use crate::graded::{expand, shift_parity, shifted_degree, GradedModule, Letter, Obj, Word};
use crate::{CoreError, Result};

/// Written form of a word, letters joined by `⊗`.
pub fn word_name(q: &Quiver, w: &[Letter]) -> String {
    w.iter().map(|l| q.name(l)).collect::<Vec<_>>().join("⊗")
}

/// Truncated bar construction `(T^c(sA), d_A)` on words of length at most `bound`.
#[derive(Clone, Debug)]
pub struct Bar {
    pub base: Arc<AInfty>,
    pub bound: usize,
}

impl Bar {
    /// The coderivation induced by the shifted operations.
    pub fn d(&self, w: &[Letter]) -> Lin<Word> {
        let a = &self.base;
        let n = w.len();
        let mut out = Lin::zero(a.ring);
        for lo in 0..n {
            for hi in lo + 1..=n.min(lo + a.max_arity) {
                let inner = a.b(&w[lo..hi]);
                if inner.is_zero() {
                    continue;
                }
                let s = a.ring.sign(shifted_degree(&w[..lo]));
                for (y, c) in inner.iter() {
                    let mut w2: Word = w[..lo].to_vec();
                    w2.push(*y);
                    w2.extend_from_slice(&w[hi..]);
                    out.add_term(w2, &(c * &s));
                }
            }
        }
        out
    }

    pub fn d_lin(&self, x: &Lin<Word>) -> Lin<Word> {
        x.map_linear(self.base.ring, |w| self.d(w))
    }

    /// Cocomposition `Δ(w) = Σ w[..k] ⊗ w[k..]` over proper nonempty splittings.
    pub fn delta(&self, w: &[Letter]) -> Vec<(Word, Word)> {
        (1..w.len()).map(|k| (w[..k].to_vec(), w[k..].to_vec())).collect()
    }

    /// First word (by length, then order) with `d(d(w)) ≠ 0`.
    pub fn first_violation(&self) -> Option<(Word, Lin<Word>)> {
        for n in 1..=self.bound {
            for w in self.base.quiver.words(n) {
                let r = self.d_lin(&self.d(&w));
                if !r.is_zero() {
                    return Some((w, r));
                }
            }
        }
        None
    }
}

/// Bar construction with `d∘d = 0` checked on all words of length at most `bound` (clamped to the
/// arity bound of `a`).
pub fn bar(a: Arc<AInfty>, bound: usize) -> Result<Bar> {
    let b = Bar { bound: bound.min(a.max_arity), base: a };
    if let Some((w, _)) = b.first_violation() {
        return Err(CoreError::NotAInfty(format!(
            "d∘d ≠ 0 on the bar word {} of length {}",
            word_name(&b.base.quiver, &w),
            w.len()
        )));
    }
    Ok(b)
}

/// One factor `s⁻¹(sf_m⊗⋯⊗sf_1⊗sg_n⊗⋯⊗sg_1)` of a cobar word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub f: Word,
    pub g: Word,
}

impl Factor {
    pub fn a(f: Word) -> Self {
        Factor { f, g: Vec::new() }
    }

    pub fn letters(&self) -> usize {
        self.f.len() + self.g.len()
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.f.len(), self.g.len())
    }

    pub fn degree(&self) -> i64 {
        shifted_degree(&self.f) + shifted_degree(&self.g) + 1
    }

    /// Object pair after the factor, starting from `cur`.
    pub fn target(&self, cur: (Obj, Obj)) -> (Obj, Obj) {
        (self.f.first().map_or(cur.0, |l| l.tgt), self.g.first().map_or(cur.1, |l| l.tgt))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CobarWord {
    pub src: (Obj, Obj),
    pub factors: Vec<Factor>,
}

impl CobarWord {
    pub fn new(src: (Obj, Obj), factors: Vec<Factor>) -> Self {
        CobarWord { src, factors }
    }

    pub fn degree(&self) -> i64 {
        self.factors.iter().map(Factor::degree).sum()
    }

    pub fn letters(&self) -> usize {
        self.factors.iter().map(Factor::letters).sum()
    }

    pub fn bidegree(&self) -> (usize, usize) {
        self.factors.iter().fold((0, 0), |(m, n), x| (m + x.f.len(), n + x.g.len()))
    }

    pub fn target(&self) -> (Obj, Obj) {
        self.factors.iter().rev().fold(self.src, |cur, x| x.target(cur))
    }

    /// Source object pair of every factor, leftmost first.
    pub fn factor_sources(&self) -> Vec<(Obj, Obj)> {
        let mut out = vec![self.src; self.factors.len()];
        let mut cur = self.src;
        for k in (0..self.factors.len()).rev() {
            out[k] = cur;
            cur = self.factors[k].target(cur);
        }
        out
    }

    /// `self ⊗ right`, the composition in the cobar category.
    pub fn concat(&self, right: &CobarWord) -> CobarWord {
        let mut factors = self.factors.clone();
        factors.extend(right.factors.iter().cloned());
        CobarWord { src: right.src, factors }
    }
}

/// Which part of the cobar differential to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Full,
    /// `μ¹ + Δ`, which preserves the letter bidegree.
    Graded,
    /// `μ^k` for `k ≥ 2`, which lowers it.
    Lower,
}

impl Part {
    fn takes(self, k: usize) -> bool {
        match self {
            Part::Full => true,
            Part::Graded => k == 1,
            Part::Lower => k >= 2,
        }
    }
}

/// Cobar construction of `red(aug Bi(A) ⊗ aug Bi(B))`, truncated by letter count.
#[derive(Clone, Debug)]
pub struct CobarPair {
    pub a: Arc<AInfty>,
    pub b: Arc<AInfty>,
    pub ring: Ring,
    pub bound: usize,
    from_a: Vec<Vec<Vec<Word>>>,
    from_b: Vec<Vec<Vec<Word>>>,
}

// words_from[o][k]: composable words of length k starting (on the right) at o
fn words_from(q: &Quiver, bound: usize) -> Vec<Vec<Vec<Word>>> {
    let mut out = vec![vec![Vec::new(); bound + 1]; q.num_objects()];
    for o in out.iter_mut() {
        o[0].push(Vec::new());
    }
    for k in 1..=bound {
        for w in q.words(k) {
            out[Quiver::ends(&w).0][k].push(w);
        }
    }
    out
}

impl CobarPair {
    pub fn new(a: Arc<AInfty>, b: Arc<AInfty>, bound: usize) -> Result<Self> {
        if a.ring != b.ring {
            return Err(ainfty_coeff::CoeffError::RingMismatch(a.ring, b.ring).into());
        }
        let from_a = words_from(&a.quiver, bound);
        let from_b = words_from(&b.quiver, bound);
        Ok(CobarPair { ring: a.ring, a, b, bound, from_a, from_b })
    }

    /// `coB(Bi(A))`, with `B` the zero algebra on one object.
    pub fn one_variable(a: Arc<AInfty>, bound: usize) -> Self {
        let zero = Arc::new(AInfty::zero(a.ring, Quiver::algebra(Vec::new()).expect("empty basis"), 1));
        CobarPair::new(a, zero, bound).expect("same ring")
    }

    pub fn swapped(&self) -> CobarPair {
        CobarPair {
            a: self.b.clone(),
            b: self.a.clone(),
            ring: self.ring,
            bound: self.bound,
            from_a: self.from_b.clone(),
            from_b: self.from_a.clone(),
        }
    }

    pub fn name(&self, c: &CobarWord) -> String {
        let two = !self.b.quiver.all_letters().is_empty();
        let names = |q: &Quiver, w: &Word| w.iter().map(|l| q.name(l)).collect::<Vec<_>>().join(" ");
        c.factors
            .iter()
            .map(|x| {
                if two {
                    format!("[{} | {}]", names(&self.a.quiver, &x.f), names(&self.b.quiver, &x.g))
                } else {
                    format!("[{}]", names(&self.a.quiver, &x.f))
                }
            })
            .collect()
    }

    /// `d` on a single factor, as a combination of one- or two-factor sequences.
    pub fn factor_d(&self, x: &Factor, part: Part) -> Lin<Vec<Factor>> {
        let ring = self.ring;
        let mut out = Lin::zero(ring);
        let sd_f = shifted_degree(&x.f);
        for (w, alg, offset, is_f) in [(&x.f, &self.a, 0, true), (&x.g, &self.b, sd_f, false)] {
            let n = w.len();
            for lo in 0..n {
                for hi in lo + 1..=n.min(lo + alg.max_arity) {
                    if !part.takes(hi - lo) {
                        continue;
                    }
                    let inner = alg.b(&w[lo..hi]);
                    if inner.is_zero() {
                        continue;
                    }
                    let s = -ring.sign(offset + shifted_degree(&w[..lo]));
                    for (y, c) in inner.iter() {
                        let mut w2: Word = w[..lo].to_vec();
                        w2.push(*y);
                        w2.extend_from_slice(&w[hi..]);
                        let y = if is_f { Factor { f: w2, g: x.g.clone() } } else { Factor { f: x.f.clone(), g: w2 } };
                        out.add_term(vec![y], &(c * &s));
                    }
                }
            }
        }
        if part != Part::Lower {
            let (m, n) = x.bidegree();
            for i in 0..=m {
                for j in 0..=n {
                    if (i, j) == (0, 0) || (i, j) == (m, n) {
                        continue;
                    }
                    let right = Factor { f: x.f[m - i..].to_vec(), g: x.g[n - j..].to_vec() };
                    let left = Factor { f: x.f[..m - i].to_vec(), g: x.g[..n - j].to_vec() };
                    let par = (shifted_degree(&right.f) + 1) * (shifted_degree(&left.g) + 2)
                        + shifted_degree(&left.f)
                        + 1;
                    out.add_term(vec![left, right], &ring.sign(par));
                }
            }
        }
        out
    }

    /// `d` on a word, extended from the factors by the Leibniz rule.
    pub fn d(&self, c: &CobarWord, part: Part) -> Lin<CobarWord> {
        let ring = self.ring;
        let mut out = Lin::zero(ring);
        let mut before = 0i64;
        for k in 0..c.factors.len() {
            let s = ring.sign(before);
            for (rep, coef) in self.factor_d(&c.factors[k], part).iter() {
                let mut fs = c.factors[..k].to_vec();
                fs.extend(rep.iter().cloned());
                fs.extend(c.factors[k + 1..].iter().cloned());
                out.add_term(CobarWord::new(c.src, fs), &(coef * &s));
            }
            before += c.factors[k].degree();
        }
        out
    }

    pub fn d_lin(&self, x: &Lin<CobarWord>, part: Part) -> Lin<CobarWord> {
        x.map_linear(self.ring, |c| self.d(c, part))
    }

    /// All words from `src` with at most `max_a` letters of `A`, `max_b` of `B` and `total` overall,
    /// sorted.
    pub fn words(&self, src: (Obj, Obj), max_a: usize, max_b: usize, total: usize) -> Vec<CobarWord> {
        let total = total.min(self.bound);
        let mut out = Vec::new();
        let mut stack = Vec::new();
        self.grow(src, src, (0, 0), (max_a.min(total), max_b.min(total), total), &mut stack, &mut out);
        out.sort();
        out
    }

    fn grow(
        &self,
        src: (Obj, Obj),
        cur: (Obj, Obj),
        used: (usize, usize),
        lim: (usize, usize, usize),
        stack: &mut Vec<Factor>,
        out: &mut Vec<CobarWord>,
    ) {
        if !stack.is_empty() {
            out.push(CobarWord::new(src, stack.iter().rev().cloned().collect()));
        }
        for lf in 0..=lim.0 - used.0 {
            for lg in 0..=lim.1 - used.1 {
                if lf + lg == 0 || used.0 + used.1 + lf + lg > lim.2 {
                    continue;
                }
                for f in &self.from_a[cur.0][lf] {
                    for g in &self.from_b[cur.1][lg] {
                        let x = Factor { f: f.clone(), g: g.clone() };
                        let next = x.target(cur);
                        stack.push(x);
                        self.grow(src, next, (used.0 + lf, used.1 + lg), lim, stack, out);
                        stack.pop();
                    }
                }
            }
        }
    }

    /// Words from `src` to `tgt` of bidegree accepted by `keep`, within the letter bound.
    pub fn basis(
        &self,
        src: (Obj, Obj),
        tgt: (Obj, Obj),
        total: usize,
        keep: impl Fn((usize, usize)) -> bool,
    ) -> Basis<CobarWord> {
        Basis::new(
            self.words(src, total, total, total)
                .into_iter()
                .filter(|c| c.target() == tgt && keep(c.bidegree()))
                .collect(),
        )
    }
}

/// An ordered finite basis with lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis<K: Ord> {
    pub elems: Vec<K>,
    index: BTreeMap<K, usize>,
}

impl<K: Ord + Clone> Basis<K> {
    pub fn new(elems: Vec<K>) -> Self {
        let index = elems.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        Basis { elems, index }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn position(&self, k: &K) -> Option<usize> {
        self.index.get(k).copied()
    }

    pub fn contains(&self, k: &K) -> bool {
        self.index.contains_key(k)
    }

    /// Coordinates of a combination, or `None` if it leaves the span.
    pub fn coords(&self, ring: Ring, x: &Lin<K>) -> Option<Vec<Scalar>> {
        let mut v = vec![ring.zero(); self.len()];
        for (k, c) in x.iter() {
            v[self.position(k)?] = c.clone();
        }
        Some(v)
    }

    pub fn combination(&self, ring: Ring, v: &[Scalar]) -> Lin<K> {
        let mut x = Lin::zero(ring);
        for (k, c) in self.elems.iter().zip(v) {
            x.add_term(k.clone(), c);
        }
        x
    }

    /// Matrix of `f` from this basis to `target`; column `j` is the image of `elems[j]`.
    pub fn matrix_to<J: Ord + Clone>(
        &self,
        ring: Ring,
        target: &Basis<J>,
        mut f: impl FnMut(&K) -> Lin<J>,
    ) -> Result<SparseMatrix> {
        let mut m = SparseMatrix::zero(ring, target.len(), self.len());
        for (j, k) in self.elems.iter().enumerate() {
            for (y, c) in f(k).iter() {
                let i = target
                    .position(y)
                    .ok_or_else(|| CoreError::Schema("image leaves the truncated basis".into()))?;
                m.add_to(i, j, c);
            }
        }
        Ok(m)
    }

    pub fn endo_matrix(&self, ring: Ring, f: impl FnMut(&K) -> Lin<K>) -> Result<SparseMatrix> {
        self.matrix_to(ring, self, f)
    }
}

impl Basis<CobarWord> {
    pub fn degrees(&self) -> Vec<i64> {
        self.elems.iter().map(CobarWord::degree).collect()
    }
}

/// `U(A)_{≤L} = coB(Bi(A))` on words with at most `L` letters, presented as a dg category with
/// composition set to zero when the concatenation would exceed `L` letters. Only the relations
/// whose terms stay inside the bound hold; `η` is checked within them.
#[derive(Clone, Debug)]
pub struct Universal {
    pub base: Arc<AInfty>,
    pub bound: usize,
    pub cobar: CobarPair,
    pub structure: Arc<AInfty>,
    words: BTreeMap<(Obj, Obj), Basis<CobarWord>>,
}

impl Universal {
    pub fn letter(&self, c: &CobarWord) -> Option<Letter> {
        let s = c.src.0;
        let t = c.target().0;
        let i = self.words.get(&(s, t))?.position(c)?;
        Some(self.structure.quiver.letter(s, t, i))
    }

    pub fn word(&self, l: &Letter) -> &CobarWord {
        &self.words[&(l.src, l.tgt)].elems[l.idx]
    }

    pub fn hom_basis(&self, s: Obj, t: Obj) -> &Basis<CobarWord> {
        &self.words[&(s, t)]
    }

    pub fn to_letters(&self, x: &Lin<CobarWord>) -> Lin<Letter> {
        let mut out = Lin::zero(self.cobar.ring);
        for (c, v) in x.iter() {
            out.add_term(self.letter(c).expect("word inside the bound"), v);
        }
        out
    }
}

pub fn universal(a: Arc<AInfty>, bound: usize) -> Result<Universal> {
    let ring = a.ring;
    let cobar = CobarPair::one_variable(a.clone(), bound);
    let n = a.quiver.num_objects();
    let mut words = BTreeMap::new();
    let mut hom = BTreeMap::new();
    for s in 0..n {
        for t in 0..n {
            let b = cobar.basis((s, 0), (t, 0), bound, |_| true);
            let module = GradedModule::new(b.elems.iter().map(|c| (cobar.name(c), c.degree())).collect())?;
            hom.insert((s, t), module);
            words.insert((s, t), b);
        }
    }
    let q = Quiver::new(a.quiver.objects.clone(), hom)?;
    let mut u = Universal { base: a, bound, cobar, structure: Arc::new(AInfty::zero(ring, q.clone(), 2)), words };
    let mut m = Table::new();
    for ((s, t), b) in &u.words {
        for (i, c) in b.elems.iter().enumerate() {
            let l = q.letter(*s, *t, i);
            let dc = u.cobar.d(c, Part::Full);
            m.insert(vec![l], u.to_letters(&dc));
            for r in 0..n {
                for (j, x) in u.words[&(*t, r)].elems.iter().enumerate() {
                    if x.letters() + c.letters() <= bound {
                        let xl = q.letter(*t, r, j);
                        let prod = x.concat(c);
                        m.insert(vec![xl, l], Lin::basis(ring, u.letter(&prod).expect("within bound")));
                    }
                }
            }
        }
    }
    u.structure = Arc::new(AInfty::from_unshifted(ring, q, bound.max(2), m)?);
    Ok(u)
}

/// The unit functor `η: A → U(A)`, `η^n(f_n⊗⋯⊗f_1) = ±s⁻¹(sf_n⊗⋯⊗sf_1)`, through arity `L`.
pub fn eta(u: &Universal) -> Result<Functor> {
    let a = &u.base;
    let mut comps = Table::new();
    for n in 1..=u.bound {
        for w in a.quiver.words(n) {
            let (s, _) = Quiver::ends(&w);
            let c = CobarWord::new((s, 0), vec![Factor::a(w.clone())]);
            let l = u.letter(&c).expect("single factor within bound");
            comps.insert(w.clone(), Lin::single(a.ring, l, a.ring.sign(shift_parity(0, &w))));
        }
    }
    Functor::new(a.clone(), u.structure.clone(), (0..a.quiver.num_objects()).collect(), u.bound, comps)
}

/// `A` rewritten in a basis in which every strict unit is a basis letter.
#[derive(Clone, Debug)]
pub struct Rebased {
    pub original: Arc<AInfty>,
    pub structure: Arc<AInfty>,
    pub units: BTreeMap<Obj, Letter>,
    pub witness: SplitUnitWitness,
    to_old: BTreeMap<Letter, Lin<Letter>>,
    from_old: BTreeMap<Letter, Lin<Letter>>,
}

impl Rebased {
    /// A new letter as a combination of old ones.
    pub fn to_old(&self, l: &Letter) -> Lin<Letter> {
        self.to_old.get(l).cloned().unwrap_or_else(|| Lin::basis(self.structure.ring, *l))
    }

    pub fn from_old(&self, l: &Letter) -> Lin<Letter> {
        self.from_old.get(l).cloned().unwrap_or_else(|| Lin::basis(self.structure.ring, *l))
    }

    pub fn is_unit(&self, l: &Letter) -> bool {
        self.units.get(&l.src) == Some(l)
    }

    fn convert_word(&self, c: &CobarWord, map: impl Fn(&Letter) -> Lin<Letter>) -> Lin<CobarWord> {
        let ring = self.structure.ring;
        let mut acc: Lin<Vec<Factor>> = Lin::basis(ring, Vec::new());
        for x in &c.factors {
            let parts: Vec<Lin<Letter>> = x.f.iter().map(&map).collect();
            let fs = expand(ring, &parts);
            let mut next = Lin::zero(ring);
            for (pre, a) in acc.iter() {
                for (w, b) in fs.iter() {
                    let mut v = pre.clone();
                    v.push(Factor::a(w.clone()));
                    next.add_term(v, &(a * b));
                }
            }
            acc = next;
        }
        acc.map_linear(ring, |fs| Lin::basis(ring, CobarWord::new(c.src, fs.clone())))
    }

    /// A one-variable cobar combination in old letters, rewritten in new letters.
    pub fn word_from_old(&self, x: &Lin<CobarWord>) -> Lin<CobarWord> {
        x.map_linear(self.structure.ring, |c| self.convert_word(c, |l| self.from_old(l)))
    }

    pub fn word_to_old(&self, x: &Lin<CobarWord>) -> Lin<CobarWord> {
        x.map_linear(self.structure.ring, |c| self.convert_word(c, |l| self.to_old(l)))
    }
}

/// Change of basis putting each unit `u_A` at the index of a letter with invertible coefficient in
/// it; the other letters `l` of `A(A,A)` become `l − p(l)·u_A`, spanning the kernel of `p`.
pub fn rebase_units(a: &Arc<AInfty>, witness: &SplitUnitWitness) -> Result<Rebased> {
    let ring = a.ring;
    let units = witness.validate(a)?;
    let mut to_old = BTreeMap::new();
    let mut from_old = BTreeMap::new();
    let mut unit_letters = BTreeMap::new();
    let mut hom: BTreeMap<(Obj, Obj), GradedModule> = a.quiver.homs().map(|(k, m)| (*k, m.clone())).collect();
    for (&o, u) in &units {
        let (l0, c0) = u
            .iter()
            .find(|(_, c)| c.is_unit())
            .map(|(l, c)| (*l, c.clone()))
            .ok_or_else(|| CoreError::SplitUnitsRequired("no unit has an invertible coefficient".into()))?;
        let c0inv = c0.inv()?;
        let p = |l: &Letter| witness.eval(o, &Lin::basis(ring, *l));
        let endo = a.quiver.letters(o, o);
        // new letters in old terms
        to_old.insert(l0, u.clone());
        for l in endo.iter().filter(|l| **l != l0) {
            let mut x = Lin::basis(ring, *l);
            x.add_scaled(u, &-p(l));
            to_old.insert(*l, x);
        }
        // old letters in new terms
        let mut x0 = Lin::single(ring, l0, p(&l0));
        for l in endo.iter().filter(|l| **l != l0) {
            x0.add_term(*l, &-(&c0inv * &u.get(l)));
        }
        from_old.insert(l0, x0);
        for l in endo.iter().filter(|l| **l != l0) {
            let mut x = Lin::basis(ring, *l);
            x.add_term(l0, &p(l));
            from_old.insert(*l, x);
        }
        if *u != Lin::basis(ring, l0) {
            let m = hom.get_mut(&(o, o)).expect("endomorphisms");
            let mut basis = m.basis.clone();
            basis[l0.idx].0 = "id".into();
            *m = GradedModule::new(basis)?;
        }
        unit_letters.insert(o, l0);
    }
    let q = Quiver::new(a.quiver.objects.clone(), hom)?;
    let mut m = Table::new();
    for n in 1..=a.max_arity {
        for w in q.words(n) {
            let parts: Vec<Lin<Letter>> = w.iter().map(|l| to_old.get(l).cloned().unwrap_or_else(|| Lin::basis(ring, *l))).collect();
            let old = a.m_multi(&parts);
            let new = old.map_linear(ring, |l| from_old.get(l).cloned().unwrap_or_else(|| Lin::basis(ring, *l)));
            if !new.is_zero() {
                m.insert(w, new);
            }
        }
    }
    let structure = Arc::new(AInfty::from_unshifted(ring, q, a.max_arity, m)?);
    Ok(Rebased {
        original: a.clone(),
        structure,
        units: unit_letters,
        witness: witness.clone(),
        to_old,
        from_old,
    })
}

/// Which generator form of the unit ideal an element has.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorForm {
    /// `c − c'` with `c'` obtained by inserting the factor `[id]` at `position` (counted from the right).
    Insertion { position: usize },
    /// A word with a factor of length at least 2 containing a unit.
    UnitInLongFactor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub form: GeneratorForm,
    pub element: Lin<CobarWord>,
}

/// One hom complex of the quotient, with the data used to build it.
#[derive(Clone, Debug)]
pub struct QuotientPiece {
    /// All nonempty words with at most `L` letters.
    pub words: Basis<CobarWord>,
    /// Unit-free words plus the unit word `[id]` on the diagonal.
    pub normal_forms: Basis<CobarWord>,
    pub generators: Vec<Generator>,
    /// Differential on normal forms.
    pub d: SparseMatrix,
    /// Projection from `words` to `normal_forms`.
    pub projection: SparseMatrix,
}

impl QuotientPiece {
    pub fn degrees(&self) -> Vec<i64> {
        self.normal_forms.degrees()
    }

    /// Filtration level of each normal form: its letter count.
    pub fn levels(&self) -> Vec<usize> {
        self.normal_forms.elems.iter().map(CobarWord::letters).collect()
    }
}

/// `VdB(A)_{≤L}`: the truncated `U(A)` modulo the ideal identifying `[id_A]` with the identity.
#[derive(Clone, Debug)]
pub struct StrictQuotient {
    pub rebased: Rebased,
    pub cobar: CobarPair,
    pub bound: usize,
    pub pieces: BTreeMap<(Obj, Obj), QuotientPiece>,
}

impl StrictQuotient {
    pub fn ring(&self) -> Ring {
        self.cobar.ring
    }

    fn unit_word(&self, o: Obj) -> CobarWord {
        CobarWord::new((o, 0), vec![Factor::a(vec![self.rebased.units[&o]])])
    }

    /// Normal form of a word (in rebased letters).
    pub fn project(&self, c: &CobarWord) -> Lin<CobarWord> {
        let ring = self.ring();
        let rb = &self.rebased;
        if c.factors.iter().any(|x| x.f.len() >= 2 && x.f.iter().any(|l| rb.is_unit(l))) {
            return Lin::zero(ring);
        }
        let kept: Vec<Factor> =
            c.factors.iter().filter(|x| !(x.f.len() == 1 && rb.is_unit(&x.f[0]))).cloned().collect();
        if kept.is_empty() {
            return Lin::basis(ring, self.unit_word(c.src.0));
        }
        Lin::basis(ring, CobarWord::new(c.src, kept))
    }

    pub fn project_lin(&self, x: &Lin<CobarWord>) -> Lin<CobarWord> {
        x.map_linear(self.ring(), |c| self.project(c))
    }

    /// Induced differential on a normal form.
    pub fn d(&self, nf: &CobarWord) -> Lin<CobarWord> {
        self.project_lin(&self.cobar.d(nf, Part::Full))
    }

    pub fn name(&self, c: &CobarWord) -> String {
        self.cobar.name(c)
    }
}

fn has_unit(rb: &Rebased, c: &CobarWord) -> bool {
    c.factors.iter().any(|x| x.f.iter().any(|l| rb.is_unit(l)))
}

/// The strict-unit quotient of `U(A)_{≤L}` with normal forms, generator lists and differential.
pub fn strict_quotient(a: &Arc<AInfty>, witness: &SplitUnitWitness, bound: usize) -> Result<StrictQuotient> {
    let rebased = rebase_units(a, witness)?;
    let ring = a.ring;
    let cobar = CobarPair::one_variable(rebased.structure.clone(), bound);
    let mut q = StrictQuotient { rebased, cobar, bound, pieces: BTreeMap::new() };
    let n = a.quiver.num_objects();
    for s in 0..n {
        for t in 0..n {
            let words = q.cobar.basis((s, 0), (t, 0), bound, |_| true);
            let mut nf: Vec<CobarWord> =
                words.elems.iter().filter(|c| !has_unit(&q.rebased, c)).cloned().collect();
            if s == t {
                nf.push(q.unit_word(s));
                nf.sort();
            }
            let normal_forms = Basis::new(nf);
            let mut generators = Vec::new();
            for c in &words.elems {
                if c.factors.iter().any(|x| x.f.len() >= 2 && x.f.iter().any(|l| q.rebased.is_unit(l))) {
                    generators.push(Generator {
                        form: GeneratorForm::UnitInLongFactor,
                        element: Lin::basis(ring, c.clone()),
                    });
                }
                if c.letters() < bound {
                    let objs = c.factor_sources();
                    for i in 0..=c.factors.len() {
                        // boundary i from the right: the object after the i rightmost factors
                        let k = c.factors.len() - i;
                        let o = if i == 0 { c.src.0 } else { c.factors[k].target(objs[k]).0 };
                        let mut fs = c.factors.clone();
                        fs.insert(k, Factor::a(vec![q.rebased.units[&o]]));
                        let mut e = Lin::basis(ring, c.clone());
                        e.add_term(CobarWord::new(c.src, fs), &-ring.one());
                        generators.push(Generator { form: GeneratorForm::Insertion { position: i }, element: e });
                    }
                }
            }
            let projection = words.matrix_to(ring, &normal_forms, |c| q.project(c))?;
            let d = normal_forms.endo_matrix(ring, |c| q.d(c))?;
            q.pieces.insert((s, t), QuotientPiece { words, normal_forms, generators, d, projection });
        }
    }
    Ok(q)
}

/// Generator span as a matrix in word coordinates.
pub fn generator_matrix(ring: Ring, piece: &QuotientPiece) -> Result<SparseMatrix> {
    let cols: Vec<Vec<Scalar>> = piece
        .generators
        .iter()
        .map(|g| {
            piece
                .words
                .coords(ring, &g.element)
                .ok_or_else(|| CoreError::Schema("generator leaves the truncation".into()))
        })
        .collect::<Result<_>>()?;
    Ok(SparseMatrix::from_columns(ring, piece.words.len(), &cols))
}

/// The splitting map `u` of a word of `U(A)` (in the original letters of `A`): the alternating sum
/// over nonempty sets of deletable single-letter endomorphism factors, weighted by the retraction.
pub fn split_map_u(a: &AInfty, witness: &SplitUnitWitness, units: &BTreeMap<Obj, Lin<Letter>>, c: &CobarWord) -> Result<Lin<CobarWord>> {
    let ring = a.ring;
    let objs = c.factor_sources();
    let deletable: Vec<usize> = (0..c.factors.len())
        .filter(|&k| {
            let x = &c.factors[k];
            x.f.len() == 1 && x.f[0].src == x.f[0].tgt
        })
        .collect();
    let mut out = Lin::zero(ring);
    if deletable.len() > 20 {
        return Err(CoreError::Schema("too many factors".into()));
    }
    for mask in 1u32..(1 << deletable.len()) {
        let chosen: Vec<usize> = (0..deletable.len()).filter(|b| mask & (1 << b) != 0).map(|b| deletable[b]).collect();
        let mut coef = ring.sign(chosen.len() as i64 - 1);
        for &k in &chosen {
            let l = c.factors[k].f[0];
            coef = &coef * &witness.eval(objs[k].0, &Lin::basis(ring, l));
        }
        if coef.is_zero() {
            continue;
        }
        let kept: Vec<Factor> =
            (0..c.factors.len()).filter(|k| !chosen.contains(k)).map(|k| c.factors[k].clone()).collect();
        if kept.is_empty() {
            let o = c.src.0;
            let u = units.get(&o).ok_or_else(|| CoreError::SplitUnitsRequired(format!("no unit for object {o}")))?;
            for (l, v) in u.iter() {
                out.add_term(CobarWord::new(c.src, vec![Factor::a(vec![*l])]), &(&coef * v));
            }
        } else {
            out.add_term(CobarWord::new(c.src, kept), &coef);
        }
    }
    Ok(out)
}
