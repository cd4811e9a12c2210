use std::collections::BTreeMap;
use std::sync::Arc;

use ainfty_coeff::{Lin, Scalar};

use super::units::{find_strict_units, homogeneous_cycles, Units};
use super::{check_stasheff, AInfty, Quiver, Table};
use crate::graded::{GradedModule, Letter, Obj};
use crate::system::KeyedSystem;
use crate::{CoreError, Result};

/// Cohomology of one hom complex: chosen cycle representatives of a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCohomology {
    pub representatives: Vec<Lin<Letter>>,
    pub degrees: Vec<i64>,
}

impl HomCohomology {
    /// Dimension per degree, restricted to a window.
    pub fn dims(&self, window: (i64, i64)) -> BTreeMap<i64, usize> {
        let mut out: BTreeMap<i64, usize> = (window.0..=window.1).map(|d| (d, 0)).collect();
        for d in &self.degrees {
            if let Some(c) = out.get_mut(d) {
                *c += 1;
            }
        }
        out
    }
}

/// A graded category: a one-operation structure with only `m_2`, plus identities when present.
#[derive(Clone, Debug)]
pub struct GradedCategory {
    pub structure: Arc<AInfty>,
    pub homs: BTreeMap<(Obj, Obj), HomCohomology>,
    pub identities: Option<Units>,
    pub window: (i64, i64),
}

impl GradedCategory {
    pub fn dims(&self, s: Obj, t: Obj) -> BTreeMap<i64, usize> {
        self.homs[&(s, t)].dims(self.window)
    }

    pub fn is_zero(&self) -> bool {
        self.homs.values().all(|h| h.representatives.is_empty())
    }
}

/// Express a cycle `z` as a combination of representatives plus a boundary.
fn decompose(a: &AInfty, s: Obj, t: Obj, reps: &[Lin<Letter>], z: &Lin<Letter>) -> Result<Option<Vec<Scalar>>> {
    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    enum Var {
        Rep(usize),
        Pre(Letter),
    }
    let mut sys: KeyedSystem<Letter, Var> = KeyedSystem::new(a.ring);
    for (k, r) in reps.iter().enumerate() {
        sys.unknown(Var::Rep(k));
        for (l, c) in r.iter() {
            sys.add(*l, Var::Rep(k), c);
        }
    }
    for x in a.quiver.letters(s, t) {
        for (y, c) in a.m(&[x]).iter() {
            sys.add(*y, Var::Pre(x), c);
        }
    }
    for (l, c) in z.iter() {
        sys.add_rhs(*l, c);
    }
    Ok(sys.solve()?.map(|sol| {
        (0..reps.len()).map(|k| sol.get(&Var::Rep(k)).cloned().unwrap_or_else(|| a.ring.zero())).collect()
    }))
}

/// The cohomology category `H(A)` with composition induced by `m_2`. Field coefficients only.
pub fn cohomology(a: &AInfty, window: (i64, i64)) -> Result<GradedCategory> {
    let ring = a.ring;
    if !ring.is_field() {
        return Err(CoreError::UnsupportedRing(ring));
    }
    let q = &a.quiver;
    let mut homs = BTreeMap::new();
    let mut modules = BTreeMap::new();
    for (&(s, t), _) in q.homs() {
        let mut reps: Vec<Lin<Letter>> = Vec::new();
        // keep a cycle when it is independent of the boundaries and earlier representatives
        for z in homogeneous_cycles(a, s, t)? {
            if decompose(a, s, t, &reps, &z)?.is_none() {
                reps.push(z);
            }
        }
        let degrees: Vec<i64> = reps.iter().map(|r| r.keys().next().unwrap().deg).collect();
        let basis = degrees.iter().enumerate().map(|(k, d)| (format!("[{k}]"), *d)).collect();
        modules.insert((s, t), GradedModule::new(basis)?);
        homs.insert((s, t), HomCohomology { representatives: reps, degrees });
    }
    let hq = Quiver::new(q.objects.clone(), modules)?;
    let mut table = Table::new();
    for w in hq.words(2) {
        let (x, y) = (w[0], w[1]);
        let zx = &homs[&(x.src, x.tgt)].representatives[x.idx];
        let zy = &homs[&(y.src, y.tgt)].representatives[y.idx];
        let prod = a.m_multi(&[zx.clone(), zy.clone()]);
        let (s, t) = (y.src, x.tgt);
        let coeffs = decompose(a, s, t, &homs[&(s, t)].representatives, &prod)?
            .ok_or_else(|| CoreError::NotAInfty("product of cycles is not a cycle".into()))?;
        let mut v = Lin::zero(ring);
        for (k, c) in coeffs.iter().enumerate() {
            v.add_term(hq.letter(s, t, k), c);
        }
        if !v.is_zero() {
            table.insert(w, v);
        }
    }
    let h = AInfty::from_unshifted(ring, hq, 3, table)?;
    let assoc = check_stasheff(&h, 3);
    if !assoc.ok() {
        return Err(CoreError::NotAInfty(format!(
            "induced composition is not associative (arity {:?})",
            assoc.first_violating_arity()
        )));
    }
    let identities = find_strict_units(&h)?;
    Ok(GradedCategory { structure: Arc::new(h), homs, identities, window })
}
