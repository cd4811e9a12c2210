use std::sync::Arc;

use ainfty_coeff::Lin;

use super::{compositions, AInfty, CheckReport, Quiver, Table, Violation};
use crate::graded::{expand, koszul_sign, shift_parity, shifted_degree, word_degree, Letter, Obj, Word};
use crate::{CoreError, Result};

/// Non-unital A∞ functor with unshifted components `F^i` of degree `1-i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    pub source: Arc<AInfty>,
    pub target: Arc<AInfty>,
    pub obj_map: Vec<Obj>,
    pub max_arity: usize,
    comps: Table,
}

impl Functor {
    pub fn new(
        source: Arc<AInfty>,
        target: Arc<AInfty>,
        obj_map: Vec<Obj>,
        max_arity: usize,
        comps: Table,
    ) -> Result<Self> {
        if source.ring != target.ring {
            return Err(ainfty_coeff::CoeffError::RingMismatch(source.ring, target.ring).into());
        }
        if obj_map.len() != source.quiver.num_objects()
            || obj_map.iter().any(|&o| o >= target.quiver.num_objects())
        {
            return Err(CoreError::Schema("object map does not match the categories".into()));
        }
        let comps = super::clean(comps);
        // checked against the source quiver for inputs, then outputs against the target
        for (w, v) in &comps {
            if w.is_empty() || w.len() > max_arity {
                return Err(CoreError::Schema(format!("component of arity {} outside 1..={max_arity}", w.len())));
            }
            if !crate::graded::is_composable(w) || !w.iter().all(|l| source.quiver.contains(l)) {
                return Err(CoreError::Schema("component input is not a composable word".into()));
            }
            let (s, e) = Quiver::ends(w);
            for (o, _) in v.iter() {
                if o.src != obj_map[s] || o.tgt != obj_map[e] || !target.quiver.contains(o) {
                    return Err(CoreError::Schema("component output lies in the wrong hom module".into()));
                }
                let want = word_degree(w) + 1 - w.len() as i64;
                if o.deg != want {
                    return Err(CoreError::DegreeMismatch(format!(
                        "component of arity {} has output degree {} instead of {want}",
                        w.len(),
                        o.deg
                    )));
                }
            }
        }
        Ok(Functor { source, target, obj_map, max_arity, comps })
    }

    /// Identity functor; strict.
    pub fn identity(a: Arc<AInfty>) -> Self {
        let mut comps = Table::new();
        for l in a.quiver.all_letters() {
            comps.insert(vec![l], Lin::basis(a.ring, l));
        }
        let n = a.quiver.num_objects();
        let max = a.max_arity;
        Functor { source: a.clone(), target: a, obj_map: (0..n).collect(), max_arity: max, comps }
    }

    pub fn comp(&self, w: &[Letter]) -> Lin<Letter> {
        self.comps.get(w).cloned().unwrap_or_else(|| Lin::zero(self.target.ring))
    }

    /// Component lookup that refuses arities beyond what the truncation determines.
    pub fn component(&self, w: &[Letter]) -> Result<Lin<Letter>> {
        if w.len() > self.max_arity {
            return Err(CoreError::ArityUnderflow { requested: w.len(), available: self.max_arity });
        }
        Ok(self.comp(w))
    }

    pub fn comps(&self) -> &Table {
        &self.comps
    }

    /// Shifted component `s·F^i` on `sw`; degree 0.
    pub fn shifted(&self, w: &[Letter]) -> Lin<Letter> {
        let v = self.comp(w);
        if shift_parity(0, w) == 0 {
            v
        } else {
            v.neg()
        }
    }

    pub fn is_strict(&self) -> bool {
        self.comps.keys().all(|w| w.len() == 1)
    }

    pub(crate) fn set_comp(&mut self, w: Word, v: Lin<Letter>) {
        if v.is_zero() {
            self.comps.remove(&w);
        } else {
            self.comps.insert(w, v);
        }
    }

    pub fn with_max_arity(&self, n: usize) -> Functor {
        let comps = self.comps.iter().filter(|(w, _)| w.len() <= n).map(|(w, v)| (w.clone(), v.clone())).collect();
        Functor { max_arity: n, comps, ..self.clone() }
    }

    /// `F` applied multilinearly to a word of combinations.
    pub fn comp_multi(&self, factors: &[Lin<Letter>]) -> Lin<Letter> {
        expand(self.source.ring, factors).map_linear(self.target.ring, |w| self.comp(w))
    }
}

/// `cache[a][b] = f(w[a..b])` for all intervals.
pub(crate) fn interval_cache(w: &[Letter], f: impl Fn(&[Letter]) -> Lin<Letter>) -> Vec<Vec<Option<Lin<Letter>>>> {
    let n = w.len();
    let mut c = vec![vec![None; n + 1]; n + 1];
    for a in 0..n {
        for b in a + 1..=n {
            c[a][b] = Some(f(&w[a..b]));
        }
    }
    c
}

/// Left-hand side of the functor relation: `Σ ± F(id ⊗ m_k ⊗ id)`.
pub(crate) fn precompose_m(a: &AInfty, w: &[Letter], outer: impl Fn(&[Letter]) -> Lin<Letter>) -> Lin<Letter> {
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
                res.add_scaled(&outer(&w2), &(c * &s));
            }
        }
    }
    res
}

/// Literal residual of the functor relation of arity `w.len()`.
pub fn functor_residual(f: &Functor, w: &[Letter]) -> Lin<Letter> {
    let ring = f.target.ring;
    let lhs = precompose_m(&f.source, w, |v| f.comp(v));
    let n = w.len();
    let cache = interval_cache(w, |v| f.comp(v));
    let mut rhs = Lin::zero(ring);
    for parts in compositions(n) {
        let r = parts.len();
        let mut par: i64 = 0;
        for t in 0..r {
            for u in t + 1..r {
                par += (1 - parts[t] as i64) * parts[u] as i64;
            }
        }
        // blocks in written order, leftmost first
        let mut factors = Vec::with_capacity(r);
        let mut hi = n;
        let mut bounds = Vec::with_capacity(r);
        for &p in &parts {
            bounds.push((hi - p, hi));
            hi -= p;
        }
        bounds.reverse();
        let mut zero = false;
        for &(lo, hi) in &bounds {
            let v = cache[lo][hi].as_ref().unwrap();
            if v.is_zero() {
                zero = true;
                break;
            }
            let blen = (hi - lo) as i64;
            par += (1 - blen) * word_degree(&w[..lo]);
            factors.push(v.clone());
        }
        if zero {
            continue;
        }
        let out = f.target.m_multi(&factors);
        rhs.add_scaled(&out, &ring.sign(par));
    }
    lhs.minus(&rhs)
}

/// Residual of `d_B ∘ F̂ = F̂ ∘ d_A` projected to one letter, on the shifted side.
pub fn functor_residual_shifted(f: &Functor, w: &[Letter]) -> Lin<Letter> {
    let ring = f.target.ring;
    let a = &f.source;
    let n = w.len();
    let mut lhs = Lin::zero(ring);
    for lo in 0..n {
        for hi in lo + 1..=n {
            let inner = a.b(&w[lo..hi]);
            if inner.is_zero() {
                continue;
            }
            let s = ring.sign(shifted_degree(&w[..lo]));
            for (y, c) in inner.iter() {
                let mut w2: Word = w[..lo].to_vec();
                w2.push(*y);
                w2.extend_from_slice(&w[hi..]);
                lhs.add_scaled(&f.shifted(&w2), &(c * &s));
            }
        }
    }
    let cache = interval_cache(w, |v| f.shifted(v));
    let mut rhs = Lin::zero(ring);
    for parts in compositions(n) {
        let mut hi = n;
        let mut factors = Vec::new();
        for &p in &parts {
            factors.push(cache[hi - p][hi].clone().unwrap());
            hi -= p;
        }
        factors.reverse();
        let ws = expand(ring, &factors);
        rhs.add_assign(&ws.map_linear(ring, |v| f.target.b(v)));
    }
    lhs.minus(&rhs)
}

fn run(f: &Functor, up_to: usize, res: impl Fn(&Functor, &[Letter]) -> Lin<Letter>) -> CheckReport {
    let frontier = f.max_arity.min(f.source.max_arity).min(f.target.max_arity);
    let through = up_to.min(frontier);
    for n in 1..=through {
        for w in f.source.quiver.words(n) {
            let r = res(f, &w);
            if !r.is_zero() {
                return CheckReport {
                    through,
                    frontier,
                    violation: Some(Violation { arity: n, word: w, object: None, residual: r }),
                };
            }
        }
    }
    CheckReport { through, frontier, violation: None }
}

/// The functor relations in literal form through `up_to`.
pub fn check_functor(f: &Functor, up_to: usize) -> CheckReport {
    run(f, up_to, functor_residual)
}

/// The functor relations as compatibility of the bar cofunctor with the differentials.
pub fn check_functor_shifted(f: &Functor, up_to: usize) -> CheckReport {
    run(f, up_to, functor_residual_shifted)
}

/// `G ∘ F`, computed on the shifted side where composition is that of bar cofunctors.
pub fn compose_functors(g: &Functor, f: &Functor) -> Result<Functor> {
    if !Arc::ptr_eq(&f.target, &g.source) && f.target != g.source {
        return Err(CoreError::Schema("target of the first functor is not the source of the second".into()));
    }
    let ring = g.target.ring;
    let max = f.max_arity.min(g.max_arity);
    let mut comps = Table::new();
    for n in 1..=max {
        for w in f.source.quiver.words(n) {
            let cache = interval_cache(&w, |v| f.shifted(v));
            let mut acc = Lin::zero(ring);
            for parts in compositions(n) {
                let mut hi = n;
                let mut factors = Vec::new();
                for &p in &parts {
                    factors.push(cache[hi - p][hi].clone().unwrap());
                    hi -= p;
                }
                factors.reverse();
                if factors.iter().any(|x| x.is_zero()) {
                    continue;
                }
                let ws = expand(ring, &factors);
                acc.add_assign(&ws.map_linear(ring, |v| g.shifted(v)));
            }
            if shift_parity(0, &w) == 1 {
                acc = acc.neg();
            }
            if !acc.is_zero() {
                comps.insert(w, acc);
            }
        }
    }
    let obj_map = f.obj_map.iter().map(|&o| g.obj_map[o]).collect();
    Functor::new(f.source.clone(), g.target.clone(), obj_map, max, comps)
}
