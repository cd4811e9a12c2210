//! Graded free modules, Koszul signs, tensor words and the shift identification.
//!
//! Words are stored in written order: `w[0]` is the leftmost tensor factor `f_n`, the last entry
//! is `f_1`. For composable words `f_1: A_0 → A_1` is the last letter.

use std::collections::{BTreeMap, BTreeSet};

use ainfty_coeff::{Lin, Ring, Scalar, SparseMatrix};
use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

pub type Obj = usize;

/// A basis element of a hom module `A(src, tgt)`, carrying its degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub src: Obj,
    pub tgt: Obj,
    pub idx: usize,
    pub deg: i64,
}

pub type Word = Vec<Letter>;

pub fn word_degree(w: &[Letter]) -> i64 {
    w.iter().map(|l| l.deg).sum()
}

/// Degree of `sx_n ⊗ … ⊗ sx_1`.
pub fn shifted_degree(w: &[Letter]) -> i64 {
    w.iter().map(|l| l.deg - 1).sum()
}

/// `(-1)^{deg_g · deg_x}` as `±1`.
pub fn koszul_sign(deg_g: i64, deg_x: i64) -> i64 {
    if (deg_g * deg_x).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Parity of the sign relating an operation of shifted degree `d` to its shifted form on `w`:
/// `d + Σ_a (a-1)·deg'(x_a)` with `a` counted from the right. The same sign converts back.
pub fn shift_parity(d: i64, w: &[Letter]) -> i64 {
    let n = w.len();
    let mut e = d;
    for (k, l) in w.iter().enumerate() {
        let a = (n - k) as i64;
        e += (a - 1) * (l.deg + 1);
    }
    e.rem_euclid(2)
}

pub fn is_composable(w: &[Letter]) -> bool {
    w.windows(2).all(|p| p[0].src == p[1].tgt)
}

/// Expand a tensor product of linear combinations of letters into a combination of words.
pub fn expand(ring: Ring, factors: &[Lin<Letter>]) -> Lin<Word> {
    let mut acc = Lin::basis(ring, Vec::new());
    for f in factors {
        let mut next = Lin::zero(ring);
        for (w, c) in acc.iter() {
            for (l, d) in f.iter() {
                let mut w2 = w.clone();
                w2.push(*l);
                next.add_term(w2, &(c * d));
            }
        }
        acc = next;
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// Degree of a homogeneous combination, `None` when zero or inhomogeneous.
pub fn lin_degree(x: &Lin<Letter>) -> Option<i64> {
    let degs: BTreeSet<i64> = x.keys().map(|l| l.deg).collect();
    if degs.len() == 1 {
        degs.into_iter().next()
    } else {
        None
    }
}

/// A graded free module with a named basis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedModule {
    pub basis: Vec<(String, i64)>,
}

impl GradedModule {
    pub fn new(basis: Vec<(String, i64)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (n, _) in &basis {
            if !seen.insert(n.as_str()) {
                return Err(CoreError::Schema(format!("duplicate basis name {n:?}")));
            }
        }
        Ok(GradedModule { basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|(n, _)| n == name)
    }

    /// Basis `x_i ⊗ y_j` in lexicographic order, index `i·rank(other) + j`.
    pub fn tensor(&self, other: &GradedModule) -> GradedModule {
        let mut basis = Vec::with_capacity(self.rank() * other.rank());
        for (a, da) in &self.basis {
            for (b, db) in &other.basis {
                basis.push((format!("{a}⊗{b}"), da + db));
            }
        }
        GradedModule { basis }
    }
}

/// A linear map between graded modules; column `j` is the image of source basis element `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub source: GradedModule,
    pub target: GradedModule,
    pub matrix: SparseMatrix,
}

impl GradedMap {
    pub fn new(source: GradedModule, target: GradedModule, matrix: SparseMatrix) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(CoreError::Schema("map shape does not match modules".into()));
        }
        Ok(GradedMap { source, target, matrix })
    }

    pub fn identity(ring: Ring, m: &GradedModule) -> Self {
        GradedMap { source: m.clone(), target: m.clone(), matrix: SparseMatrix::identity(ring, m.rank()) }
    }

    /// The common degree of all entries; `Some(None)` for the zero map.
    pub fn degree(&self) -> Result<Option<i64>> {
        let mut deg = None;
        for (i, j, _) in self.matrix.entries() {
            let d = self.target.degree(i) - self.source.degree(j);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => {
                    return Err(CoreError::DegreeMismatch("map is not homogeneous".into()));
                }
                _ => {}
            }
        }
        Ok(deg)
    }

    pub fn compose(&self, inner: &GradedMap) -> Result<GradedMap> {
        if inner.target != self.source {
            return Err(CoreError::Schema("composition of maps with mismatched modules".into()));
        }
        Ok(GradedMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.try_mul(&inner.matrix)?,
        })
    }
}

/// `(f⊗g)(x⊗y) = (-1)^{deg(g)deg(x)} f(x)⊗g(y)`; `g` must be homogeneous.
pub fn tensor_maps(f: &GradedMap, g: &GradedMap) -> Result<GradedMap> {
    let dg = g.degree()?.unwrap_or(0);
    let ring = f.matrix.ring();
    let source = f.source.tensor(&g.source);
    let target = f.target.tensor(&g.target);
    let (ns, nt) = (g.source.rank(), g.target.rank());
    let mut m = SparseMatrix::zero(ring, target.rank(), source.rank());
    for (i, x, a) in f.matrix.entries() {
        let s = ring.sign(dg * f.source.degree(x));
        for (k, y, b) in g.matrix.entries() {
            m.add_to(i * nt + k, x * ns + y, &(&(a * b) * &s));
        }
    }
    Ok(GradedMap { source, target, matrix: m })
}

/// Which way `shift_operation` converts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftDirection {
    ToShifted,
    ToUnshifted,
}

/// Convert a table of multilinear maps of shifted degree `d` between the two forms.
pub fn shift_operation(
    table: &BTreeMap<Word, Lin<Letter>>,
    d: i64,
    _dir: ShiftDirection,
) -> BTreeMap<Word, Lin<Letter>> {
    table
        .iter()
        .map(|(w, v)| {
            let s = shift_parity(d, w);
            let out = if s == 0 { v.clone() } else { v.neg() };
            (w.clone(), out)
        })
        .collect()
}

pub fn sign(ring: Ring, parity: i64) -> Scalar {
    ring.sign(parity)
}
