//! Contractions of filtered complexes onto their first level, the null-homotopy `r` of the
//! two-variable cobar pieces `V_{m,n}`, the comparison maps between `V_{1,1}` and `A ⊗ B`, the dg
//! functor `N`, and the certificates for `η¹` built from them.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use ainfty_cert::{direct_sum, Complex, ContractionCertificate, Truncation};
use ainfty_coeff::{inverse, rank_kernel, smith_normal_form, solve_integer, Lin, Ring, Scalar, SparseMatrix};
use serde::Serialize;

use crate::ainfty::{find_strict_units, AInfty, SplitUnitWitness};
use crate::barcobar::{strict_quotient, Basis, CobarPair, CobarWord, Factor, Part};
use crate::graded::{shifted_degree, Letter, Obj};
use crate::{CoreError, Result};

/// A complex in a basis adapted to an ascending filtration: basis element `j` lies in `F_{levels[j]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    pub ring: Ring,
    pub degrees: Vec<i64>,
    pub d: SparseMatrix,
    pub levels: Vec<usize>,
    pub labels: Vec<String>,
}

impl FilteredComplex {
    pub fn new(degrees: Vec<i64>, d: SparseMatrix, levels: Vec<usize>) -> Result<Self> {
        let n = degrees.len();
        if d.rows() != n || d.cols() != n || levels.len() != n {
            return Err(CoreError::Schema(format!(
                "{n} basis elements, {} levels and a {}×{} differential",
                levels.len(),
                d.rows(),
                d.cols()
            )));
        }
        if let Some(j) = levels.iter().position(|&l| l == 0) {
            return Err(CoreError::Schema(format!("basis element {j} has level 0, but F_0 = 0")));
        }
        for (i, j, _) in d.entries() {
            if degrees[i] != degrees[j] + 1 {
                return Err(CoreError::DegreeMismatch(format!("d({j}) has a component in degree {}", degrees[i])));
            }
            if levels[i] > levels[j] {
                return Err(CoreError::Schema(format!(
                    "d does not preserve the filtration: element {j} of level {} hits level {}",
                    levels[j], levels[i]
                )));
            }
        }
        if !d.mul(&d).is_zero() {
            return Err(CoreError::Schema("d∘d ≠ 0".into()));
        }
        Ok(FilteredComplex { ring: d.ring(), degrees, d, levels, labels: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn max_level(&self) -> usize {
        self.levels.iter().copied().max().unwrap_or(1)
    }

    /// Basis indices whose level satisfies `keep`, in increasing order.
    pub fn indices(&self, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.len()).filter(|&j| keep(self.levels[j])).collect()
    }

    pub fn complex(&self) -> Complex {
        Complex { degrees: self.degrees.clone(), d: self.d.clone(), labels: self.labels.clone() }
    }

    /// `gr_n` with its induced differential `d_n`.
    pub fn graded_piece(&self, n: usize) -> Complex {
        let idx = self.indices(|l| l == n);
        Complex {
            degrees: idx.iter().map(|&j| self.degrees[j]).collect(),
            d: self.d.select(&idx, &idx),
            labels: if self.labels.is_empty() { Vec::new() } else { idx.iter().map(|&j| self.labels[j].clone()).collect() },
        }
    }

    /// The connecting map `e_n: C_n → C_{<n}`.
    pub fn connecting(&self, n: usize) -> SparseMatrix {
        self.d.select(&self.indices(|l| l < n), &self.indices(|l| l == n))
    }
}

/// `p_n: C_{≤n} → C_1` and `h_{≤n}` after step `n`; `columns` lists the basis indices of `C_{≤n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub level: usize,
    pub columns: Vec<usize>,
    pub p: SparseMatrix,
    pub h: SparseMatrix,
}

#[derive(Clone, Debug)]
pub struct FilteredContraction {
    pub certificate: ContractionCertificate,
    pub stages: Vec<Stage>,
    /// Basis indices of `C_1`, in the order used by the small complex.
    pub first_level: Vec<usize>,
}

fn identity_residual(m: &SparseMatrix) -> Option<(usize, usize)> {
    let r = m.sub(&SparseMatrix::identity(m.ring(), m.rows()));
    let first = r.entries().next().map(|(i, j, _)| (i, j));
    first
}

fn place(target: &mut SparseMatrix, block: &SparseMatrix, rows: &[usize], cols: &[usize]) {
    for (i, j, v) in block.entries() {
        target.set(rows[i], cols[j], v.clone());
    }
}

/// Contract a filtered complex onto `F_1`. `gr[n]` is a null-homotopy of `gr_n` for each nonempty
/// level `n > 1`, indexed like [`FilteredComplex::graded_piece`].
pub fn filtered_contraction(fc: &FilteredComplex, gr: &BTreeMap<usize, SparseMatrix>) -> Result<FilteredContraction> {
    let ring = fc.ring;
    let n = fc.len();
    let ones = fc.indices(|l| l == 1);
    let rows: Vec<usize> = (0..ones.len()).collect();
    let mut p = SparseMatrix::zero(ring, ones.len(), n);
    for (k, &j) in ones.iter().enumerate() {
        p.set(k, j, ring.one());
    }
    let mut h = SparseMatrix::zero(ring, n, n);
    let mut stages = vec![Stage {
        level: 1,
        columns: ones.clone(),
        p: p.select(&rows, &ones),
        h: SparseMatrix::zero(ring, ones.len(), ones.len()),
    }];
    let minus = -ring.one();
    for level in 2..=fc.max_level() {
        let cur = fc.indices(|l| l == level);
        if !cur.is_empty() {
            let bad = |reason: String| CoreError::BadGrHomotopy { level, reason };
            let hn = gr.get(&level).ok_or_else(|| bad("no homotopy supplied".into()))?;
            if hn.rows() != cur.len() || hn.cols() != cur.len() {
                return Err(bad(format!("{}×{} matrix for a piece of rank {}", hn.rows(), hn.cols(), cur.len())));
            }
            if hn.ring() != ring {
                return Err(bad(format!("homotopy over {} for a complex over {ring}", hn.ring())));
            }
            if let Some((i, j, _)) = hn.entries().find(|(i, j, _)| fc.degrees[cur[*i]] + 1 != fc.degrees[cur[*j]]) {
                return Err(bad(format!("entry ({i}, {j}) does not have degree −1")));
            }
            let dn = fc.d.select(&cur, &cur);
            if let Some((i, j)) = identity_residual(&dn.mul(hn).add(&hn.mul(&dn))) {
                return Err(bad(format!("d∘h + h∘d ≠ id at entry ({i}, {j})")));
            }
            let lower = fc.indices(|l| l < level);
            let eh = fc.d.select(&lower, &cur).mul(hn);
            let pc = p.select(&rows, &lower).mul(&eh).scale(&minus);
            let hc = h.select(&lower, &lower).mul(&eh).scale(&minus);
            place(&mut p, &pc, &rows, &cur);
            place(&mut h, &hc, &lower, &cur);
            place(&mut h, hn, &cur, &cur);
        }
        let upto = fc.indices(|l| l <= level);
        stages.push(Stage { level, p: p.select(&rows, &upto), h: h.select(&upto, &upto), columns: upto });
    }
    let mut i = SparseMatrix::zero(ring, n, ones.len());
    for (k, &j) in ones.iter().enumerate() {
        i.set(j, k, ring.one());
    }
    let mut cert = ContractionCertificate::new(ring, fc.complex(), fc.graded_piece(1), i, p, h);
    cert.filtration = Some(fc.levels.clone());
    cert.verify()?;
    Ok(FilteredContraction { certificate: cert, stages, first_level: ones })
}

/// A filtered complex presented by generators of each `F_n`, rewritten in an adapted basis.
#[derive(Clone, Debug)]
pub struct Adapted {
    pub complex: FilteredComplex,
    /// Columns: the adapted basis in the original coordinates.
    pub basis: SparseMatrix,
    pub inverse: SparseMatrix,
}

impl Adapted {
    /// Transport a certificate for the adapted complex back to the original basis.
    pub fn to_original(&self, cert: &ContractionCertificate, original: Complex) -> ContractionCertificate {
        let t = &self.basis;
        let ti = &self.inverse;
        let mut out = ContractionCertificate::new(
            cert.ring,
            original,
            cert.small.clone(),
            t.mul(&cert.i),
            cert.p.mul(ti),
            t.mul(&cert.h).mul(ti),
        );
        out.truncation = cert.truncation.clone();
        out
    }
}

fn rank_of(ring: Ring, dim: usize, cols: &[Vec<Scalar>]) -> Result<usize> {
    if cols.is_empty() || dim == 0 {
        return Ok(0);
    }
    Ok(rank_kernel(&SparseMatrix::from_columns(ring, dim, cols))?.rank)
}

fn is_unit(x: &ainfty_coeff::Smith) -> bool {
    x.diag.iter().all(|d| Scalar::Z(d.clone()).is_unit())
}

// New basis vectors completing `prefix` (a basis of F_{n-1}) to a basis of F_n = span(gens).
fn extend(ring: Ring, dim: usize, prefix: &[Vec<Scalar>], gens: &[Vec<Scalar>], level: usize, deg: i64) -> Result<Vec<Vec<Scalar>>> {
    let ascending = || CoreError::Schema(format!("F_{} is not contained in F_{level} in degree {deg}", level - 1));
    if ring.is_field() {
        let mut all = prefix.to_vec();
        all.extend(gens.iter().cloned());
        if rank_of(ring, dim, &all)? != rank_of(ring, dim, gens)? {
            return Err(ascending());
        }
        let mut basis = prefix.to_vec();
        let mut added = Vec::new();
        for g in gens {
            basis.push(g.clone());
            if rank_of(ring, dim, &basis)? == basis.len() {
                added.push(g.clone());
            } else {
                basis.pop();
            }
        }
        return Ok(added);
    }
    if gens.is_empty() {
        return if prefix.is_empty() { Ok(Vec::new()) } else { Err(ascending()) };
    }
    let s = smith_normal_form(&SparseMatrix::from_columns(ring, dim, gens))?;
    let uinv = inverse(&s.u)?;
    let basis: Vec<Vec<Scalar>> = (0..s.rank)
        .map(|k| {
            let c = Scalar::Z(s.diag[k].clone());
            uinv.column(k).iter().map(|x| x * &c).collect()
        })
        .collect();
    if prefix.is_empty() {
        return Ok(basis);
    }
    let b = SparseMatrix::from_columns(ring, dim, &basis);
    let mut coords = Vec::new();
    for v in prefix {
        coords.push(solve_integer(&b, v)?.ok_or_else(ascending)?);
    }
    let x = smith_normal_form(&SparseMatrix::from_columns(ring, s.rank, &coords))?;
    if x.rank < prefix.len() || !is_unit(&x) {
        return Err(CoreError::SplittingMissing(format!(
            "F_{} is not a direct summand of F_{level} in degree {deg}",
            level - 1
        )));
    }
    let w = b.mul(&inverse(&x.u)?);
    Ok((prefix.len()..s.rank).map(|j| w.column(j)).collect())
}

/// Build the adapted basis of a complex from generators of `F_1 ⊂ F_2 ⊂ ⋯`, given as coordinate
/// vectors. Each generator must be homogeneous and the last level must be the whole complex.
pub fn from_subcomplexes(degrees: Vec<i64>, d: SparseMatrix, levels: &[Vec<Vec<Scalar>>]) -> Result<Adapted> {
    let ring = d.ring();
    let n = degrees.len();
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (j, &deg) in degrees.iter().enumerate() {
        by_degree.entry(deg).or_default().push(j);
    }
    // degree of each generator, checking homogeneity
    let mut gen_degree: Vec<Vec<Option<i64>>> = Vec::new();
    for (k, gens) in levels.iter().enumerate() {
        let mut ds = Vec::new();
        for (g_idx, g) in gens.iter().enumerate() {
            if g.len() != n {
                return Err(CoreError::Schema(format!("generator {g_idx} of F_{} has length {}", k + 1, g.len())));
            }
            let support: BTreeSet<i64> = g.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, _)| degrees[j]).collect();
            if support.len() > 1 {
                return Err(CoreError::DegreeMismatch(format!("generator {g_idx} of F_{} is not homogeneous", k + 1)));
            }
            ds.push(support.into_iter().next());
        }
        gen_degree.push(ds);
    }
    let mut columns: Vec<(usize, i64, Vec<Scalar>)> = Vec::new();
    for (&deg, idx) in &by_degree {
        let mut prefix: Vec<Vec<Scalar>> = Vec::new();
        for (k, gens) in levels.iter().enumerate() {
            let local: Vec<Vec<Scalar>> = gens
                .iter()
                .zip(&gen_degree[k])
                .filter(|(_, gd)| **gd == Some(deg))
                .map(|(g, _)| idx.iter().map(|&j| g[j].clone()).collect())
                .collect();
            for v in extend(ring, idx.len(), &prefix, &local, k + 1, deg)? {
                let mut full = vec![ring.zero(); n];
                for (x, &j) in v.iter().zip(idx) {
                    full[j] = x.clone();
                }
                columns.push((k + 1, deg, full));
                prefix.push(v);
            }
        }
        if prefix.len() != idx.len() {
            return Err(CoreError::Schema(format!("the filtration does not exhaust degree {deg}")));
        }
    }
    let cols: Vec<Vec<Scalar>> = columns.iter().map(|(_, _, v)| v.clone()).collect();
    let t = SparseMatrix::from_columns(ring, n, &cols);
    let ti = inverse(&t).map_err(|_| CoreError::Schema("the filtration does not exhaust the complex".into()))?;
    let d2 = ti.mul(&d).mul(&t);
    let complex = FilteredComplex::new(
        columns.iter().map(|(_, deg, _)| *deg).collect(),
        d2,
        columns.iter().map(|(l, _, _)| *l).collect(),
    )?;
    Ok(Adapted { complex, basis: t, inverse: ti })
}

/// `r` on a word with at least one `A`-letter: move the leftmost `A`-factor, when it is a single
/// letter, rightwards past the pure `B`-factors and merge it into the next factor.
fn r_direct(ring: Ring, c: &CobarWord) -> Lin<CobarWord> {
    let fs = &c.factors;
    let mut out = Lin::zero(ring);
    let Some(t) = fs.iter().position(|x| !x.f.is_empty()) else { return out };
    if fs[t].f.len() != 1 || !fs[t].g.is_empty() {
        return out;
    }
    let f = fs[t].f[0];
    let left: i64 = fs[..t].iter().map(Factor::degree).sum();
    let mut between = 0i64;
    for k in t + 1..fs.len() {
        let ck = &fs[k];
        let mut merged = vec![f];
        merged.extend_from_slice(&ck.f);
        let mut word = fs[..t].to_vec();
        word.extend(fs[t + 1..k].iter().cloned());
        word.push(Factor { f: merged, g: ck.g.clone() });
        word.extend(fs[k + 1..].iter().cloned());
        out.add_term(CobarWord::new(c.src, word), &ring.sign(left + (f.deg + 1) * between + f.deg));
        if !ck.f.is_empty() {
            break;
        }
        between += ck.degree();
    }
    out
}

/// The letter swap `V_{m,n}(A,B) ≅ V_{n,m}(B,A)`, `s⁻¹(sf⊗sg) ↦ (−1)^{deg(sf)deg(sg)} s⁻¹(sg⊗sf)`.
pub fn swap_word(ring: Ring, c: &CobarWord) -> (Scalar, CobarWord) {
    let mut par = 0;
    let factors = c
        .factors
        .iter()
        .map(|x| {
            par += shifted_degree(&x.f) * shifted_degree(&x.g);
            Factor { f: x.g.clone(), g: x.f.clone() }
        })
        .collect();
    (ring.sign(par), CobarWord::new((c.src.1, c.src.0), factors))
}

pub fn swap_lin(ring: Ring, x: &Lin<CobarWord>) -> Lin<CobarWord> {
    x.map_linear(ring, |c| {
        let (s, w) = swap_word(ring, c);
        Lin::single(ring, w, s)
    })
}

/// The homotopy `r` on `V_{m,n}`: `d∘r + r∘d = id − ξ`. Bidegrees with `m ≤ 1 < n` go through the
/// letter swap.
pub fn contraction_r(ring: Ring, c: &CobarWord) -> Result<Lin<CobarWord>> {
    match c.bidegree() {
        (0, 0) => Err(CoreError::OutOfScopeBidegree(0, 0)),
        (1, 0) | (0, 1) => Ok(Lin::zero(ring)),
        (m, n) if m > 1 || (m, n) == (1, 1) => Ok(r_direct(ring, c)),
        _ => {
            let (s, w) = swap_word(ring, c);
            Ok(swap_lin(ring, &r_direct(ring, &w)).scale(&s))
        }
    }
}

/// `ξ = inc11∘pro11` on `V_{1,1}`, the identity on `V_{1,0}` and `V_{0,1}`, and `0` elsewhere.
pub fn xi(ring: Ring, c: &CobarWord) -> Result<Lin<CobarWord>> {
    match c.bidegree() {
        (0, 0) => Err(CoreError::OutOfScopeBidegree(0, 0)),
        (1, 0) | (0, 1) => Ok(Lin::basis(ring, c.clone())),
        (1, 1) if c.factors.len() == 2 => {
            let (x, y) = (&c.factors[0], &c.factors[1]);
            if x.f.is_empty() {
                return Ok(Lin::basis(ring, c.clone()));
            }
            let (f, g) = (x.f[0], y.g[0]);
            let w = CobarWord::new(c.src, vec![y.clone(), x.clone()]);
            Ok(Lin::single(ring, w, ring.sign(f.deg * g.deg)))
        }
        _ => Ok(Lin::zero(ring)),
    }
}

/// A basis element of `red(aug A ⊗ aug B)`: `None` stands for the adjoined identity.
pub type AugPair = (Option<Letter>, Option<Letter>);

fn aug_degree(x: &Option<Letter>) -> i64 {
    x.map_or(0, |l| l.deg)
}

/// `inc11(f⊗g) = (−1)^{deg f deg g} s⁻¹sg ⊗ s⁻¹sf`.
pub fn inc11(ring: Ring, f: Letter, g: Letter) -> Lin<CobarWord> {
    let w = CobarWord::new((f.src, g.src), vec![Factor { f: Vec::new(), g: vec![g] }, Factor::a(vec![f])]);
    Lin::single(ring, w, ring.sign(f.deg * g.deg))
}

/// `pro11` on a word of `V_{1,1}`.
pub fn pro11(ring: Ring, c: &CobarWord) -> Result<Lin<AugPair>> {
    if c.bidegree() != (1, 1) {
        let (m, n) = c.bidegree();
        return Err(CoreError::OutOfScopeBidegree(m, n));
    }
    if c.factors.len() != 2 {
        return Ok(Lin::zero(ring));
    }
    let (x, y) = (&c.factors[0], &c.factors[1]);
    Ok(if x.f.is_empty() {
        let (f, g) = (y.f[0], x.g[0]);
        Lin::single(ring, (Some(f), Some(g)), ring.sign(f.deg * g.deg))
    } else {
        Lin::basis(ring, (Some(x.f[0]), Some(y.g[0])))
    })
}

/// Basis of `red(aug A ⊗ aug B)((A,B),(A',B'))`.
pub fn tensor_basis(pair: &CobarPair, src: (Obj, Obj), tgt: (Obj, Obj)) -> Basis<AugPair> {
    let side = |q: &crate::ainfty::Quiver, s: Obj, t: Obj| {
        let mut v: Vec<Option<Letter>> = q.letters(s, t).into_iter().map(Some).collect();
        if s == t {
            v.insert(0, None);
        }
        v
    };
    let xs = side(&pair.a.quiver, src.0, tgt.0);
    let ys = side(&pair.b.quiver, src.1, tgt.1);
    let mut out = Vec::new();
    for x in &xs {
        for y in &ys {
            if x.is_some() || y.is_some() {
                out.push((*x, *y));
            }
        }
    }
    out.sort();
    Basis::new(out)
}

pub fn tensor_name(pair: &CobarPair, e: &AugPair) -> String {
    let one_var = pair.b.quiver.all_letters().is_empty();
    match e {
        (Some(f), None) if one_var => pair.a.quiver.name(f).to_string(),
        _ => {
            let x = e.0.map_or("1".to_string(), |l| pair.a.quiver.name(&l).to_string());
            let y = e.1.map_or("1".to_string(), |l| pair.b.quiver.name(&l).to_string());
            format!("{x}⊗{y}")
        }
    }
}

fn aug_m1(a: &AInfty, x: &Option<Letter>) -> Lin<Option<Letter>> {
    match x {
        None => Lin::zero(a.ring),
        Some(l) => a.m(&[*l]).map_linear(a.ring, |y| Lin::basis(a.ring, Some(*y))),
    }
}

/// `d(x⊗y) = m1(x)⊗y + (−1)^{deg x} x⊗m1(y)`.
pub fn tensor_d(pair: &CobarPair, e: &AugPair) -> Lin<AugPair> {
    let ring = pair.ring;
    let mut out = Lin::zero(ring);
    for (x, c) in aug_m1(&pair.a, &e.0).iter() {
        out.add_term((*x, e.1), c);
    }
    let s = ring.sign(aug_degree(&e.0));
    for (y, c) in aug_m1(&pair.b, &e.1).iter() {
        out.add_term((e.0, *y), &(c * &s));
    }
    out
}

fn aug_mul(a: &AInfty, x: &Option<Letter>, y: &Option<Letter>) -> Lin<Option<Letter>> {
    match (x, y) {
        (None, _) => Lin::basis(a.ring, *y),
        (_, None) => Lin::basis(a.ring, *x),
        (Some(p), Some(q)) => a.m(&[*p, *q]).map_linear(a.ring, |l| Lin::basis(a.ring, Some(*l))),
    }
}

/// The dg functor `N: coB(C) → red(aug A ⊗ aug B)` on a word: multiplicative, sending a one-letter
/// factor to `f⊗1` or `1⊗g` and every longer factor to `0`.
pub fn functor_n(pair: &CobarPair, c: &CobarWord) -> Result<Lin<AugPair>> {
    if !pair.a.is_dg() || !pair.b.is_dg() {
        return Err(CoreError::NotDg(3));
    }
    let ring = pair.ring;
    let mut acc: Option<Lin<AugPair>> = None;
    for x in &c.factors {
        let e = match x.bidegree() {
            (1, 0) => (Some(x.f[0]), None),
            (0, 1) => (None, Some(x.g[0])),
            _ => return Ok(Lin::zero(ring)),
        };
        acc = Some(match acc {
            None => Lin::basis(ring, e),
            Some(prev) => {
                let mut next = Lin::zero(ring);
                for ((x0, y0), c0) in prev.iter() {
                    let s = &ring.sign(aug_degree(y0) * aug_degree(&e.0)) * c0;
                    for (xx, a) in aug_mul(&pair.a, x0, &e.0).iter() {
                        for (yy, b) in aug_mul(&pair.b, y0, &e.1).iter() {
                            next.add_term((*xx, *yy), &(&(&s * a) * b));
                        }
                    }
                }
                next
            }
        });
    }
    Ok(acc.unwrap_or_else(|| Lin::zero(ring)))
}

fn try_matrix<K: Ord + Clone, J: Ord + Clone>(
    ring: Ring,
    source: &Basis<K>,
    target: &Basis<J>,
    mut f: impl FnMut(&K) -> Result<Lin<J>>,
) -> Result<SparseMatrix> {
    let images: Vec<Lin<J>> = source.elems.iter().map(&mut f).collect::<Result<_>>()?;
    let mut k = 0;
    source.matrix_to(ring, target, |_| {
        k += 1;
        images[k - 1].clone()
    })
}

/// One graded piece `V_{m,n}` with the differential `μ¹ + Δ`.
pub fn v_piece(pair: &CobarPair, src: (Obj, Obj), tgt: (Obj, Obj), m: usize, n: usize) -> Result<(Basis<CobarWord>, SparseMatrix)> {
    let b = pair.basis(src, tgt, m + n, |bd| bd == (m, n));
    let d = b.endo_matrix(pair.ring, |c| pair.d(c, Part::Graded))?;
    Ok((b, d))
}

/// Matrix of `r` on a basis closed under it.
pub fn r_matrix(ring: Ring, b: &Basis<CobarWord>) -> Result<SparseMatrix> {
    try_matrix(ring, b, b, |c| contraction_r(ring, c))
}

pub fn xi_matrix(ring: Ring, b: &Basis<CobarWord>) -> Result<SparseMatrix> {
    try_matrix(ring, b, b, |c| xi(ring, c))
}

/// The comparison maps between `A(A,A')⊗B(B,B')` and `V_{1,1}`.
#[derive(Clone, Debug)]
pub struct ComparisonMaps {
    pub tensor: Basis<AugPair>,
    pub tensor_d: SparseMatrix,
    pub v11: Basis<CobarWord>,
    pub v11_d: SparseMatrix,
    pub inc11: SparseMatrix,
    pub pro11: SparseMatrix,
    pub xi: SparseMatrix,
    pub r: SparseMatrix,
}

pub fn comparison_maps(pair: &CobarPair, src: (Obj, Obj), tgt: (Obj, Obj)) -> Result<ComparisonMaps> {
    let ring = pair.ring;
    let tensor = Basis::new(
        tensor_basis(pair, src, tgt).elems.into_iter().filter(|(x, y)| x.is_some() && y.is_some()).collect(),
    );
    let tensor_d = tensor.endo_matrix(ring, |e| tensor_d(pair, e))?;
    let (v11, v11_d) = v_piece(pair, src, tgt, 1, 1)?;
    let inc = tensor.matrix_to(ring, &v11, |(f, g)| inc11(ring, f.unwrap(), g.unwrap()))?;
    let pro = try_matrix(ring, &v11, &tensor, |c| pro11(ring, c))?;
    Ok(ComparisonMaps {
        xi: xi_matrix(ring, &v11)?,
        r: r_matrix(ring, &v11)?,
        tensor,
        tensor_d,
        v11,
        v11_d,
        inc11: inc,
        pro11: pro,
    })
}

/// Filtration level of a word in `coB(C) = V_{*,0} ⊕ V_{0,*} ⊕ V_{>0}`.
pub fn cobar_level(c: &CobarWord) -> usize {
    match c.bidegree() {
        (m, 0) => m,
        (0, n) => n,
        (m, n) => m + n - 1,
    }
}

fn truncation(bound: usize, note: &str) -> Truncation {
    Truncation { word_bound: Some(bound), arity_bound: None, note: note.into() }
}

/// Certificate that `red(aug A ⊗ aug B)((A,B),(A',B')) → coB(C)((A,B),(A',B'))` is a homotopy
/// equivalence, on words with at most `pair.bound` letters.
pub fn ab_certificate(pair: &CobarPair, src: (Obj, Obj), tgt: (Obj, Obj)) -> Result<ContractionCertificate> {
    let ring = pair.ring;
    let big = pair.basis(src, tgt, pair.bound, |_| true);
    let d = big.endo_matrix(ring, |c| pair.d(c, Part::Full))?;
    let mut fc = FilteredComplex::new(big.degrees(), d, big.elems.iter().map(cobar_level).collect())?;
    fc.labels = big.elems.iter().map(|c| pair.name(c)).collect();
    let mut gr = BTreeMap::new();
    for level in 2..=fc.max_level() {
        let piece = Basis::new(fc.indices(|l| l == level).into_iter().map(|j| big.elems[j].clone()).collect());
        gr.insert(level, r_matrix(ring, &piece)?);
    }
    let fcon = filtered_contraction(&fc, &gr)?;
    let f1 = Basis::new(fcon.first_level.iter().map(|&j| big.elems[j].clone()).collect());
    let small = tensor_basis(pair, src, tgt);
    let small_d = small.endo_matrix(ring, |e| tensor_d(pair, e))?;
    let i2 = small.matrix_to(ring, &f1, |e| match e {
        (Some(f), None) => Lin::basis(ring, CobarWord::new(src, vec![Factor::a(vec![*f])])),
        (None, Some(g)) => Lin::basis(ring, CobarWord::new(src, vec![Factor { f: Vec::new(), g: vec![*g] }])),
        (Some(f), Some(g)) => inc11(ring, *f, *g),
        (None, None) => unreachable!("reduced"),
    })?;
    let p2 = try_matrix(ring, &f1, &small, |c| match c.bidegree() {
        (1, 0) => Ok(Lin::basis(ring, (Some(c.factors[0].f[0]), None))),
        (0, 1) => Ok(Lin::basis(ring, (None, Some(c.factors[0].g[0])))),
        _ => pro11(ring, c),
    })?;
    let h2 = r_matrix(ring, &f1)?;
    let c1 = &fcon.certificate;
    let p = p2.mul(&c1.p);
    let i = c1.i.mul(&i2);
    let h = c1.h.add(&c1.i.mul(&h2).mul(&c1.p));
    let small_complex = Complex {
        degrees: small.elems.iter().map(|(x, y)| aug_degree(x) + aug_degree(y)).collect(),
        d: small_d,
        labels: small.elems.iter().map(|e| tensor_name(pair, e)).collect(),
    };
    let mut cert = ContractionCertificate::new(ring, fc.complex(), small_complex, i, p, h);
    cert.filtration = Some(fc.levels.clone());
    cert.truncation = truncation(pair.bound, "cobar words with at most word_bound letters");
    cert.verify()?;
    Ok(cert)
}

/// What the dg functor `N` was checked against, and the resulting certificate.
#[derive(Clone, Debug)]
pub struct FunctorNReport {
    /// First basis word of bidegree at most `(1,1)` on which `N` differs from the natural maps.
    pub restriction_mismatch: Option<String>,
    /// First basis word on which `N∘d ≠ d∘N`.
    pub chain_map_violation: Option<String>,
    pub certificate: ContractionCertificate,
}

impl FunctorNReport {
    pub fn ok(&self) -> bool {
        self.restriction_mismatch.is_none() && self.chain_map_violation.is_none()
    }
}

pub fn functor_n_check(pair: &CobarPair, src: (Obj, Obj), tgt: (Obj, Obj)) -> Result<FunctorNReport> {
    let ring = pair.ring;
    let big = pair.basis(src, tgt, pair.bound, |_| true);
    let mut restriction_mismatch = None;
    let mut chain_map_violation = None;
    for c in &big.elems {
        let nc = functor_n(pair, c)?;
        let (m, n) = c.bidegree();
        if m <= 1 && n <= 1 && restriction_mismatch.is_none() {
            let expected = match (m, n) {
                (1, 0) => Lin::basis(ring, (Some(c.factors[0].f[0]), None)),
                (0, 1) => Lin::basis(ring, (None, Some(c.factors[0].g[0]))),
                _ => pro11(ring, c)?,
            };
            if nc != expected {
                restriction_mismatch = Some(pair.name(c));
            }
        }
        if chain_map_violation.is_none() {
            let lhs = pair.d(c, Part::Full).iter().try_fold(Lin::zero(ring), |mut acc, (w, k)| {
                acc.add_scaled(&functor_n(pair, w)?, k);
                Ok::<_, CoreError>(acc)
            })?;
            let rhs = nc.map_linear(ring, |e| tensor_d(pair, e));
            if lhs != rhs {
                chain_map_violation = Some(pair.name(c));
            }
        }
    }
    let certificate = ab_certificate(pair, src, tgt)?;
    Ok(FunctorNReport { restriction_mismatch, chain_map_violation, certificate })
}

/// Certificate that `η¹: A(A,A') → U(A)(A,A')` is a homotopy equivalence for every pair of
/// objects, on words with at most `bound` letters.
pub fn eta_certificate(a: &Arc<AInfty>, bound: usize) -> Result<ContractionCertificate> {
    let pair = CobarPair::one_variable(a.clone(), bound);
    let n = a.quiver.num_objects();
    let mut parts = Vec::new();
    for s in 0..n {
        for t in 0..n {
            parts.push(ab_certificate(&pair, (s, 0), (t, 0))?);
        }
    }
    let mut cert = direct_sum(a.ring, &parts);
    cert.truncation = truncation(bound, "U(A) on words with at most word_bound letters, all object pairs");
    cert.verify()?;
    Ok(cert)
}

/// The same for the strict-unit quotient `VdB(A)`, which requires split units.
pub fn eta_quotient_certificate(a: &Arc<AInfty>, witness: &SplitUnitWitness, bound: usize) -> Result<ContractionCertificate> {
    let ring = a.ring;
    let q = strict_quotient(a, witness, bound)?;
    let rb = &q.rebased;
    let mut parts = Vec::new();
    for (&(s, t), piece) in &q.pieces {
        let nf = &piece.normal_forms;
        let mut fc = FilteredComplex::new(piece.degrees(), piece.d.clone(), piece.levels())?;
        fc.labels = nf.elems.iter().map(|c| q.name(c)).collect();
        let mut gr = BTreeMap::new();
        for level in 2..=fc.max_level() {
            let sub = Basis::new(fc.indices(|l| l == level).into_iter().map(|j| nf.elems[j].clone()).collect());
            let hn = try_matrix(ring, &sub, &sub, |c| {
                let mut img = q.project_lin(&contraction_r(ring, c)?);
                img.retain(|w| w.letters() == level);
                Ok(img)
            })?;
            gr.insert(level, hn);
        }
        let fcon = filtered_contraction(&fc, &gr)?;
        let f1 = Basis::new(fcon.first_level.iter().map(|&j| nf.elems[j].clone()).collect());
        let new_letters = Basis::new(rb.structure.quiver.letters(s, t));
        let old_letters = Basis::new(a.quiver.letters(s, t));
        let i_rb = new_letters.matrix_to(ring, &f1, |l| Lin::basis(ring, CobarWord::new((s, 0), vec![Factor::a(vec![*l])])))?;
        let p_rb = f1.matrix_to(ring, &new_letters, |c| Lin::basis(ring, c.factors[0].f[0]))?;
        let to_old = new_letters.matrix_to(ring, &old_letters, |l| rb.to_old(l))?;
        let from_old = old_letters.matrix_to(ring, &new_letters, |l| rb.from_old(l))?;
        let c1 = &fcon.certificate;
        let small = Complex {
            degrees: old_letters.elems.iter().map(|l| l.deg).collect(),
            d: a.differential_matrix(s, t),
            labels: old_letters.elems.iter().map(|l| a.quiver.name(l).to_string()).collect(),
        };
        let mut cert = ContractionCertificate::new(
            ring,
            fc.complex(),
            small,
            c1.i.mul(&i_rb).mul(&from_old),
            to_old.mul(&p_rb).mul(&c1.p),
            c1.h.clone(),
        );
        cert.filtration = Some(fc.levels.clone());
        cert.verify()?;
        parts.push(cert);
    }
    let mut cert = direct_sum(ring, &parts);
    cert.truncation = truncation(bound, "strict-unit quotient of U(A) on words with at most word_bound letters");
    cert.verify()?;
    Ok(cert)
}

/// Homology of a complex in one degree: free rank and torsion coefficients (over `Z`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<String>,
}

fn rank_and_torsion(m: &SparseMatrix) -> Result<(usize, Vec<String>)> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok((0, Vec::new()));
    }
    if m.ring() == Ring::Z {
        let s = smith_normal_form(m)?;
        let torsion = s.diag.iter().filter(|d| !Scalar::Z((*d).clone()).is_unit()).map(|d| d.to_string()).collect();
        return Ok((s.rank, torsion));
    }
    Ok((rank_kernel(m)?.rank, Vec::new()))
}

/// Homology in every degree occurring in the complex.
pub fn homology(c: &Complex) -> Result<BTreeMap<i64, HomologyGroup>> {
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (j, &deg) in c.degrees.iter().enumerate() {
        by_degree.entry(deg).or_default().push(j);
    }
    let empty = Vec::new();
    let mut out = BTreeMap::new();
    for (&k, idx) in &by_degree {
        let next = by_degree.get(&(k + 1)).unwrap_or(&empty);
        let prev = by_degree.get(&(k - 1)).unwrap_or(&empty);
        let (out_rank, _) = rank_and_torsion(&c.d.select(next, idx))?;
        let (in_rank, torsion) = rank_and_torsion(&c.d.select(idx, prev))?;
        out.insert(k, HomologyGroup { rank: idx.len() - out_rank - in_rank, torsion });
    }
    Ok(out)
}

/// Homology comparison for one hom complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairHomology {
    pub src: Obj,
    pub tgt: Obj,
    pub small: BTreeMap<i64, HomologyGroup>,
    pub big: BTreeMap<i64, HomologyGroup>,
    pub chain_map: bool,
}

impl PairHomology {
    pub fn agrees(&self) -> bool {
        let zero = HomologyGroup { rank: 0, torsion: Vec::new() };
        let keys: BTreeSet<i64> = self.small.keys().chain(self.big.keys()).copied().collect();
        self.chain_map && keys.iter().all(|k| self.small.get(k).unwrap_or(&zero) == self.big.get(k).unwrap_or(&zero))
    }
}

/// The weaker conclusion available without split units: `η¹` into the strict-unit quotient is a
/// chain map inducing isomorphic homology groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiIsoReport {
    pub word_bound: usize,
    pub pairs: Vec<PairHomology>,
}

impl QuasiIsoReport {
    pub fn agrees(&self) -> bool {
        self.pairs.iter().all(PairHomology::agrees)
    }
}

// replace the letter at `slot` of factor `k` by each term of `u`
fn substitute(ring: Ring, c: &CobarWord, k: usize, slot: usize, u: &Lin<Letter>) -> Lin<CobarWord> {
    let mut out = Lin::zero(ring);
    for (l, v) in u.iter() {
        let mut w = c.clone();
        w.factors[k].f[slot] = *l;
        out.add_term(w, v);
    }
    out
}

/// Homology comparison for `η¹: A → VdB(A)` computed without choosing a retraction: the unit ideal
/// is presented by generators in the original letters and divided out with Smith normal forms.
pub fn eta_quasi_iso_report(a: &Arc<AInfty>, bound: usize) -> Result<QuasiIsoReport> {
    let ring = a.ring;
    let units = find_strict_units(a)?.ok_or_else(|| CoreError::NotUnital("no strict units".into()))?;
    let pair = CobarPair::one_variable(a.clone(), bound);
    let n = a.quiver.num_objects();
    let mut pairs = Vec::new();
    for s in 0..n {
        for t in 0..n {
            let words = pair.basis((s, 0), (t, 0), bound, |_| true);
            let mut gens: Vec<Lin<CobarWord>> = Vec::new();
            for c in &words.elems {
                let objs = c.factor_sources();
                for (k, x) in c.factors.iter().enumerate() {
                    if x.f.len() < 2 {
                        continue;
                    }
                    for (slot, l) in x.f.iter().enumerate() {
                        if l.src == l.tgt {
                            gens.push(substitute(ring, c, k, slot, &units[&l.src]));
                        }
                    }
                }
                if c.letters() < bound {
                    for k in 0..=c.factors.len() {
                        let o = if k == c.factors.len() { c.src.0 } else { c.factors[k].target(objs[k]).0 };
                        let mut e = Lin::basis(ring, c.clone());
                        for (l, v) in units[&o].iter() {
                            let mut fs = c.factors.clone();
                            fs.insert(k, Factor::a(vec![*l]));
                            e.add_term(CobarWord::new(c.src, fs), &-v);
                        }
                        gens.push(e);
                    }
                }
            }
            let big = quotient_complex(ring, &words, &gens, |c| pair.d(c, Part::Full))?;
            let letters = Basis::new(a.quiver.letters(s, t));
            let small = Complex::new(letters.elems.iter().map(|l| l.deg).collect(), a.differential_matrix(s, t));
            let eta = letters.matrix_to(ring, &words, |l| Lin::basis(ring, CobarWord::new((s, 0), vec![Factor::a(vec![*l])])))?;
            let i = big.projection.mul(&eta);
            let chain_map = big.complex.d.mul(&i).sub(&i.mul(&small.d)).is_zero();
            pairs.push(PairHomology { src: s, tgt: t, small: homology(&small)?, big: homology(&big.complex)?, chain_map });
        }
    }
    Ok(QuasiIsoReport { word_bound: bound, pairs })
}

struct Quotient {
    complex: Complex,
    projection: SparseMatrix,
}

// The quotient of span(words) by span(gens), degree by degree; the span must be a direct summand.
fn quotient_complex(
    ring: Ring,
    words: &Basis<CobarWord>,
    gens: &[Lin<CobarWord>],
    d: impl FnMut(&CobarWord) -> Lin<CobarWord>,
) -> Result<Quotient> {
    let dm = words.endo_matrix(ring, d)?;
    let degrees = words.degrees();
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (j, &deg) in degrees.iter().enumerate() {
        by_degree.entry(deg).or_default().push(j);
    }
    let n = words.len();
    let mut proj_rows: Vec<Vec<Scalar>> = Vec::new();
    let mut section_cols: Vec<Vec<Scalar>> = Vec::new();
    let mut qdeg = Vec::new();
    for (&deg, idx) in &by_degree {
        let cols: Vec<Vec<Scalar>> = gens
            .iter()
            .filter(|g| g.keys().next().is_some_and(|c| c.degree() == deg))
            .map(|g| {
                let v = words.coords(ring, g).ok_or_else(|| CoreError::Schema("generator leaves the truncation".into()))?;
                Ok(idx.iter().map(|&j| v[j].clone()).collect())
            })
            .collect::<Result<_>>()?;
        // rows of u after the rank give the quotient coordinates, columns of u⁻¹ a section
        let (u, rank) = if cols.is_empty() {
            (SparseMatrix::identity(ring, idx.len()), 0)
        } else {
            let g = SparseMatrix::from_columns(ring, idx.len(), &cols);
            if ring == Ring::Z {
                let s = smith_normal_form(&g)?;
                if !is_unit(&s) {
                    return Err(CoreError::SplittingMissing(format!(
                        "the unit ideal is not a direct summand in degree {deg}"
                    )));
                }
                (s.u, s.rank)
            } else {
                field_complement(&g)?
            }
        };
        let uinv = inverse(&u)?;
        for r in rank..idx.len() {
            let mut row = vec![ring.zero(); n];
            let mut col = vec![ring.zero(); n];
            for (k, &j) in idx.iter().enumerate() {
                row[j] = u.get(r, k);
                col[j] = uinv.get(k, r);
            }
            proj_rows.push(row);
            section_cols.push(col);
            qdeg.push(deg);
        }
    }
    let projection = SparseMatrix::from_columns(ring, n, &proj_rows).transpose();
    let section = SparseMatrix::from_columns(ring, n, &section_cols);
    let qd = projection.mul(&dm).mul(&section);
    Ok(Quotient { complex: Complex::new(qdeg, qd), projection })
}

// An invertible `u` whose first `rank` rows vanish exactly on a complement... more precisely, with
// `u·g` supported in the first `rank` rows.
fn field_complement(g: &SparseMatrix) -> Result<(SparseMatrix, usize)> {
    let ring = g.ring();
    let dim = g.rows();
    // basis of the column span followed by completing unit vectors
    let mut basis: Vec<Vec<Scalar>> = Vec::new();
    for j in 0..g.cols() {
        basis.push(g.column(j));
        if rank_of(ring, dim, &basis)? < basis.len() {
            basis.pop();
        }
    }
    let rank = basis.len();
    for k in 0..dim {
        let mut e = vec![ring.zero(); dim];
        e[k] = ring.one();
        basis.push(e);
        if rank_of(ring, dim, &basis)? < basis.len() {
            basis.pop();
        }
    }
    Ok((inverse(&SparseMatrix::from_columns(ring, dim, &basis))?, rank))
}
