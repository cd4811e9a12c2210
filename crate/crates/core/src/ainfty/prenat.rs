use std::collections::BTreeMap;

use ainfty_coeff::{Lin, Scalar};

use super::functor::{interval_cache, precompose_m};
use super::{compositions, boundary_object, CheckReport, Functor, Quiver, Table, Violation};
use crate::graded::{is_composable, koszul_sign, word_degree, Letter, Obj, Word};
use crate::system::KeyedSystem;
use crate::{CoreError, Result};

/// Prenatural transformation `θ: F → G` of degree `p`; `θ^i` has degree `p - i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prenat {
    pub from: Functor,
    pub to: Functor,
    pub degree: i64,
    pub max_arity: usize,
    theta0: BTreeMap<Obj, Lin<Letter>>,
    comps: Table,
}

impl Prenat {
    pub fn new(
        from: Functor,
        to: Functor,
        degree: i64,
        max_arity: usize,
        theta0: BTreeMap<Obj, Lin<Letter>>,
        comps: Table,
    ) -> Result<Self> {
        if from.source != to.source || from.target != to.target {
            return Err(CoreError::Schema("prenatural transformation between functors with different ends".into()));
        }
        let a = &from.source.quiver;
        let b = &from.target.quiver;
        let theta0: BTreeMap<_, _> = theta0.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        for (&o, v) in &theta0 {
            if o >= a.num_objects() {
                return Err(CoreError::Schema(format!("object {o} out of range")));
            }
            for (l, _) in v.iter() {
                if l.src != from.obj_map[o] || l.tgt != to.obj_map[o] || !b.contains(l) {
                    return Err(CoreError::Schema("arity-0 component lies in the wrong hom module".into()));
                }
                if l.deg != degree {
                    return Err(CoreError::DegreeMismatch(format!(
                        "arity-0 component has degree {} instead of {degree}",
                        l.deg
                    )));
                }
            }
        }
        let comps = super::clean(comps);
        for (w, v) in &comps {
            if w.is_empty() || w.len() > max_arity {
                return Err(CoreError::Schema(format!("component of arity {} outside 1..={max_arity}", w.len())));
            }
            if !is_composable(w) || !w.iter().all(|l| a.contains(l)) {
                return Err(CoreError::Schema("component input is not a composable word".into()));
            }
            let (s, e) = Quiver::ends(w);
            let want = word_degree(w) + degree - w.len() as i64;
            for (l, _) in v.iter() {
                if l.src != from.obj_map[s] || l.tgt != to.obj_map[e] || !b.contains(l) {
                    return Err(CoreError::Schema("component output lies in the wrong hom module".into()));
                }
                if l.deg != want {
                    return Err(CoreError::DegreeMismatch(format!(
                        "component of arity {} has output degree {} instead of {want}",
                        w.len(),
                        l.deg
                    )));
                }
            }
        }
        Ok(Prenat { from, to, degree, max_arity, theta0, comps })
    }

    pub fn zero(from: Functor, to: Functor, degree: i64, max_arity: usize) -> Self {
        Prenat { from, to, degree, max_arity, theta0: BTreeMap::new(), comps: Table::new() }
    }

    /// `θ^0_A = id`: the identity-type transformation of a functor with strict units `units` in the target.
    pub fn identity(f: Functor, units: &BTreeMap<Obj, Lin<Letter>>) -> Result<Self> {
        let mut theta0 = BTreeMap::new();
        for o in 0..f.source.quiver.num_objects() {
            let u = units
                .get(&f.obj_map[o])
                .ok_or_else(|| CoreError::NotUnital(format!("no unit for object {}", f.obj_map[o])))?;
            theta0.insert(o, u.clone());
        }
        let n = f.max_arity;
        Prenat::new(f.clone(), f, 0, n, theta0, Table::new())
    }

    pub fn theta0(&self, o: Obj) -> Lin<Letter> {
        self.theta0.get(&o).cloned().unwrap_or_else(|| Lin::zero(self.from.target.ring))
    }

    pub fn theta0_map(&self) -> &BTreeMap<Obj, Lin<Letter>> {
        &self.theta0
    }

    pub fn comp(&self, w: &[Letter]) -> Lin<Letter> {
        self.comps.get(w).cloned().unwrap_or_else(|| Lin::zero(self.from.target.ring))
    }

    pub fn comps(&self) -> &Table {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.theta0.is_empty() && self.comps.is_empty()
    }

    pub fn has_zero_theta0(&self) -> bool {
        self.theta0.is_empty()
    }

    /// The same components read as a transformation between other functors.
    pub fn retarget(&self, from: Functor, to: Functor) -> Result<Prenat> {
        Prenat::new(from, to, self.degree, self.max_arity, self.theta0.clone(), self.comps.clone())
    }

    pub(crate) fn set_comp(&mut self, w: Word, v: Lin<Letter>) {
        if v.is_zero() {
            self.comps.remove(&w);
        } else {
            self.comps.insert(w, v);
        }
    }

    pub fn plus(&self, other: &Prenat) -> Prenat {
        let mut out = self.clone();
        for (o, v) in &other.theta0 {
            let s = out.theta0(*o).plus(v);
            if s.is_zero() {
                out.theta0.remove(o);
            } else {
                out.theta0.insert(*o, s);
            }
        }
        for (w, v) in &other.comps {
            let s = out.comp(w).plus(v);
            out.set_comp(w.clone(), s);
        }
        out.max_arity = self.max_arity.min(other.max_arity);
        out
    }

    pub fn scale(&self, c: &Scalar) -> Prenat {
        let mut out = self.clone();
        out.theta0 = self.theta0.iter().map(|(o, v)| (*o, v.scale(c))).filter(|(_, v)| !v.is_zero()).collect();
        out.comps = super::clean(self.comps.iter().map(|(w, v)| (w.clone(), v.scale(c))).collect());
        out
    }

    /// Arity bound up to which `m1_prenat` of this transformation is determined.
    pub fn m1_frontier(&self) -> usize {
        let a = &self.from.source;
        let b = &self.from.target;
        let mut n = self.max_arity.min(self.from.max_arity).min(self.to.max_arity).min(a.max_arity);
        // arity-n terms with θ^0 feed n+1 inputs into m^B
        let need = if self.theta0.is_empty() { n } else { n + 1 };
        if need > b.max_arity {
            n = n.min(b.max_arity.saturating_sub(need - n));
        }
        n
    }
}

/// Component of `m_1(θ)` on `w`; `obj` is the object used when `w` is empty.
pub fn m1_component(theta: &Prenat, w: &[Letter], obj: Obj) -> Lin<Letter> {
    let b = &theta.from.target;
    let ring = b.ring;
    let p = theta.degree;
    let n = w.len();
    let mut res = if n == 0 { Lin::zero(ring) } else { precompose_m(&theta.from.source, w, |v| theta.comp(v)) };
    let fc = interval_cache(w, |v| theta.from.comp(v));
    let gc = interval_cache(w, |v| theta.to.comp(v));
    let tc = interval_cache(w, |v| theta.comp(v));
    let nn = n as i64;
    for a in 0..=n {
        for k in 0..=(n - a) {
            let c = n - a - k;
            let tlo = c;
            let thi = n - a;
            let tval = if k == 0 {
                theta.theta0(boundary_object(w, thi, obj))
            } else {
                tc[tlo][thi].clone().unwrap()
            };
            if tval.is_zero() {
                continue;
            }
            let fparts = compositions(a);
            let gparts = compositions(c);
            for ip in &fparts {
                // F blocks, i_1 rightmost
                let mut fbl = Vec::with_capacity(ip.len());
                let mut hi = n;
                let mut par: i64 = 0;
                let mut consumed = 0i64;
                let mut zero = false;
                for &len in ip {
                    let lo = hi - len;
                    par += (1 - len as i64) * (nn - consumed);
                    consumed += len as i64;
                    par += (1 - len as i64) * word_degree(&w[..lo]);
                    let v = fc[lo][hi].as_ref().unwrap();
                    if v.is_zero() {
                        zero = true;
                        break;
                    }
                    fbl.push(v.clone());
                    hi = lo;
                }
                if zero {
                    continue;
                }
                fbl.reverse();
                let r = ip.len() as i64;
                par += p + r * (p - 1) + (p - k as i64) * c as i64;
                par += (p - k as i64) * word_degree(&w[..tlo]);
                for jp in &gparts {
                    let mut gpar = par;
                    for t in 0..jp.len() {
                        for u in t + 1..jp.len() {
                            gpar += (1 - jp[t] as i64) * jp[u] as i64;
                        }
                    }
                    let mut gbl = Vec::with_capacity(jp.len());
                    let mut hi = c;
                    let mut zero = false;
                    for &len in jp {
                        let lo = hi - len;
                        gpar += (1 - len as i64) * word_degree(&w[..lo]);
                        let v = gc[lo][hi].as_ref().unwrap();
                        if v.is_zero() {
                            zero = true;
                            break;
                        }
                        gbl.push(v.clone());
                        hi = lo;
                    }
                    if zero {
                        continue;
                    }
                    gbl.reverse();
                    let mut factors = gbl;
                    factors.push(tval.clone());
                    factors.extend(fbl.iter().cloned());
                    let out = b.m_multi(&factors);
                    res.add_scaled(&out, &ring.sign(gpar));
                }
            }
        }
    }
    res
}

/// `m_1(θ)`, the degree `p+1` prenatural transformation given by the left side of the naturality relation.
pub fn m1_prenat(theta: &Prenat) -> Prenat {
    let n = theta.m1_frontier();
    let a = &theta.from.source;
    let mut theta0 = BTreeMap::new();
    for o in 0..a.quiver.num_objects() {
        let v = m1_component(theta, &[], o);
        if !v.is_zero() {
            theta0.insert(o, v);
        }
    }
    let mut comps = Table::new();
    for k in 1..=n {
        for w in a.quiver.words(k) {
            let v = m1_component(theta, &w, 0);
            if !v.is_zero() {
                comps.insert(w, v);
            }
        }
    }
    Prenat {
        from: theta.from.clone(),
        to: theta.to.clone(),
        degree: theta.degree + 1,
        max_arity: n,
        theta0,
        comps,
    }
}

/// Naturality of `θ`: `m_1(θ)` vanishes through `up_to`.
pub fn check_natural(theta: &Prenat, up_to: usize) -> CheckReport {
    let frontier = theta.m1_frontier();
    let through = up_to.min(frontier);
    let a = &theta.from.source;
    for o in 0..a.quiver.num_objects() {
        let r = m1_component(theta, &[], o);
        if !r.is_zero() {
            return CheckReport {
                through,
                frontier,
                violation: Some(Violation { arity: 0, word: Vec::new(), object: Some(o), residual: r }),
            };
        }
    }
    for k in 1..=through {
        for w in a.quiver.words(k) {
            let r = m1_component(theta, &w, 0);
            if !r.is_zero() {
                return CheckReport {
                    through,
                    frontier,
                    violation: Some(Violation { arity: k, word: w, object: None, residual: r }),
                };
            }
        }
    }
    CheckReport { through, frontier, violation: None }
}

fn require_homotopy_shape(theta: &Prenat) -> Result<()> {
    if theta.degree != 0 {
        return Err(CoreError::NotAHomotopy(format!("degree {} instead of 0", theta.degree)));
    }
    if !theta.has_zero_theta0() {
        return Err(CoreError::NotAHomotopy("arity-0 component is nonzero".into()));
    }
    if theta.from.obj_map != theta.to.obj_map {
        return Err(CoreError::NotAHomotopy("functors differ on objects".into()));
    }
    Ok(())
}

/// `G` with `G^i = F^i + m_1(θ)^i`, where `θ` is read as a transformation `F → G`.
/// Returns `G` together with `θ: F → G`.
pub fn perturb_by_homotopy(f: &Functor, theta: &Prenat) -> Result<(Functor, Prenat)> {
    require_homotopy_shape(theta)?;
    let b = &f.target;
    let n = theta.max_arity.min(f.max_arity).min(f.source.max_arity).min(b.max_arity);
    let mut g = Functor::new(f.source.clone(), f.target.clone(), f.obj_map.clone(), n, Table::new())?;
    let mut th = theta.retarget(f.clone(), g.clone())?;
    for k in 1..=n {
        for w in f.source.quiver.words(k) {
            let v = f.comp(&w).plus(&m1_component(&th, &w, 0));
            g.set_comp(w, v);
        }
        th.to = g.clone();
    }
    th.max_arity = th.max_arity.min(n);
    Ok((g, th))
}

/// Residual check of `G^i = F^i + m_1(θ)^i` through `up_to`.
pub fn check_homotopy(theta: &Prenat, up_to: usize) -> Result<CheckReport> {
    require_homotopy_shape(theta)?;
    let frontier = theta.m1_frontier();
    let through = up_to.min(frontier);
    let a = &theta.from.source;
    for k in 1..=through {
        for w in a.quiver.words(k) {
            let r = theta.to.comp(&w).minus(&theta.from.comp(&w)).minus(&m1_component(theta, &w, 0));
            if !r.is_zero() {
                return Ok(CheckReport {
                    through,
                    frontier,
                    violation: Some(Violation { arity: k, word: w, object: None, residual: r }),
                });
            }
        }
    }
    Ok(CheckReport { through, frontier, violation: None })
}

/// Finds a homotopy `F → H` arity by arity, starting from `guess` and correcting each arity by
/// solving the linear equation in the top component.
fn solve_homotopy(f: &Functor, h: &Functor, guess: &Prenat, max: usize) -> Result<Prenat> {
    let a = &f.source;
    let b = &f.target;
    let ring = b.ring;
    let mut th = Prenat::zero(f.clone(), h.clone(), 0, max);
    // m_1 preimages on the source, for the θ^n ∘ (id ⊗ m_1 ⊗ id) part of the linear operator
    let mut d_pre: BTreeMap<Letter, Vec<(Letter, Scalar)>> = BTreeMap::new();
    for x in a.quiver.all_letters() {
        for (y, c) in a.m(&[x]).iter() {
            d_pre.entry(*y).or_default().push((x, c.clone()));
        }
    }
    for n in 1..=max {
        let words = a.quiver.words(n);
        for w in &words {
            th.set_comp(w.clone(), guess.comp(w));
        }
        let mut residual: BTreeMap<Word, Lin<Letter>> = BTreeMap::new();
        for w in &words {
            let r = h.comp(w).minus(&f.comp(w)).minus(&m1_component(&th, w, 0));
            if !r.is_zero() {
                residual.insert(w.clone(), r);
            }
        }
        if residual.is_empty() {
            continue;
        }
        let mut sys: KeyedSystem<(Word, Letter), (Word, Letter)> = KeyedSystem::new(ring);
        for (w, r) in &residual {
            for (l, c) in r.iter() {
                sys.add_rhs((w.clone(), *l), c);
            }
        }
        let nn = n as i64;
        for wp in &words {
            let (s, e) = Quiver::ends(wp);
            let deg = word_degree(wp) - nn;
            for y in b.quiver.letters(f.obj_map[s], h.obj_map[e]) {
                if y.deg != deg {
                    continue;
                }
                let col = (wp.clone(), y);
                sys.unknown(col.clone());
                // (-1)^p m_1(θ^n(w')) with p = 0
                for (z, c) in b.m(&[y]).iter() {
                    sys.add((wp.clone(), *z), col.clone(), c);
                }
                // θ^n(left ⊗ m_1(x) ⊗ right), k = 1 in the first sum
                for q in 0..wp.len() {
                    let Some(pre) = d_pre.get(&wp[q]) else { continue };
                    let i = nn - 1 - q as i64;
                    for (x, c) in pre {
                        let mut w = wp.clone();
                        w[q] = *x;
                        let mut par = i + (nn - i - 1);
                        if koszul_sign(1, word_degree(&w[..q])) < 0 {
                            par += 1;
                        }
                        sys.add((w, y), col.clone(), &(c * &ring.sign(par)));
                    }
                }
            }
        }
        let sol = sys.solve()?.ok_or(CoreError::CompositionObstructed(n))?;
        for ((w, y), c) in sol {
            if c.is_zero() {
                continue;
            }
            let mut v = th.comp(&w);
            v.add_term(y, &c);
            th.set_comp(w, v);
        }
    }
    Ok(th)
}

/// A homotopy `F → H` from homotopies `θ_1: F → G` and `θ_2: G → H`; it agrees with `θ_1`
/// below the first nonzero arity of `θ_2`.
pub fn homotopy_sum(theta1: &Prenat, theta2: &Prenat) -> Result<Prenat> {
    require_homotopy_shape(theta1)?;
    require_homotopy_shape(theta2)?;
    if theta1.to.comps() != theta2.from.comps() || theta1.to.obj_map != theta2.from.obj_map {
        return Err(CoreError::NotAHomotopy("homotopies are not composable".into()));
    }
    let max = theta1.m1_frontier().min(theta2.m1_frontier());
    let guess = theta1.plus(theta2);
    solve_homotopy(&theta1.from, &theta2.to, &guess, max)
}

/// A homotopy `G → F` from a homotopy `θ: F → G`.
pub fn invert_homotopy(theta: &Prenat) -> Result<Prenat> {
    require_homotopy_shape(theta)?;
    let max = theta.m1_frontier();
    let guess = theta.scale(&theta.from.target.ring.sign(1));
    solve_homotopy(&theta.to, &theta.from, &guess, max)
}
