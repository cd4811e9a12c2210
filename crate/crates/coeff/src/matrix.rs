use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::smith::smith_normal_form;
use crate::{CoeffError, Result, Ring, Scalar};

/// Row-major sparse matrix; rows are maps from column index to a nonzero entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Scalar>>,
}

impl SparseMatrix {
    pub fn zero(ring: Ring, rows: usize, cols: usize) -> Self {
        SparseMatrix { ring, rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        let mut m = SparseMatrix::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_dense(ring: Ring, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = SparseMatrix::zero(ring, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, Scalar::from_i64(ring, v));
            }
        }
        m
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[i].get(&j).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, Scalar> {
        &self.data[i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        if v.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, v);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &Scalar) {
        let cur = self.get(i, j);
        self.set(i, j, &cur + v);
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + '_ {
        self.data.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(&j, v)| (i, j, v)))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::zero(self.ring, self.cols, self.rows);
        for (i, j, v) in self.entries() {
            t.data[j].insert(i, v.clone());
        }
        t
    }

    pub fn mul_vec(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.cols, "vector length");
        self.data
            .iter()
            .map(|r| {
                let mut acc = self.ring.zero();
                for (&j, v) in r {
                    if !x[j].is_zero() {
                        acc += &(v * &x[j]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn try_mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ring != other.ring {
            return Err(CoeffError::RingMismatch(self.ring, other.ring));
        }
        if self.cols != other.rows {
            return Err(CoeffError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = SparseMatrix::zero(self.ring, self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (&k, a) in r {
                for (&j, b) in &other.data[k] {
                    let e = acc.entry(j).or_insert_with(|| self.ring.zero());
                    *e += &(a * b);
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[i] = acc;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        self.try_mul(other).expect("matrix product")
    }

    pub fn try_add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ring != other.ring {
            return Err(CoeffError::RingMismatch(self.ring, other.ring));
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(CoeffError::Shape(format!(
                "{}x{} plus {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (i, j, v) in other.entries() {
            out.add_to(i, j, v);
        }
        Ok(out)
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        self.try_add(other).expect("matrix sum")
    }

    pub fn scale(&self, c: &Scalar) -> SparseMatrix {
        let mut out = SparseMatrix::zero(self.ring, self.rows, self.cols);
        for (i, j, v) in self.entries() {
            out.set(i, j, v * c);
        }
        out
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add(&other.scale(&self.ring.sign(1)))
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut pos = BTreeMap::new();
        for (new, &old) in cols.iter().enumerate() {
            pos.insert(old, new);
        }
        let mut out = SparseMatrix::zero(self.ring, rows.len(), cols.len());
        for (ni, &oi) in rows.iter().enumerate() {
            for (j, v) in &self.data[oi] {
                if let Some(&nj) = pos.get(j) {
                    out.data[ni].insert(nj, v.clone());
                }
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn from_columns(ring: Ring, rows: usize, columns: &[Vec<Scalar>]) -> SparseMatrix {
        let mut m = SparseMatrix::zero(ring, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    #[serde(flatten)]
    ring: Ring,
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, String)>,
}

impl Serialize for SparseMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries().map(|(i, j, v)| (i, j, v.to_string())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparseMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        r.ring.check_prime().map_err(D::Error::custom)?;
        let mut m = SparseMatrix::zero(r.ring, r.rows, r.cols);
        for (i, j, v) in r.entries {
            if i >= r.rows || j >= r.cols {
                return Err(D::Error::custom(format!("entry ({i},{j}) out of range")));
            }
            let v = Scalar::parse(r.ring, &v).map_err(D::Error::custom)?;
            m.set(i, j, v);
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankKernel {
    pub rank: usize,
    pub kernel: Vec<Vec<Scalar>>,
}

type Row = BTreeMap<usize, Scalar>;

/// Reduced row echelon form over a field: pivot column and its normalized row, by pivot.
fn rref(ring: Ring, rows: impl IntoIterator<Item = Row>) -> BTreeMap<usize, Row> {
    let mut piv: BTreeMap<usize, Row> = BTreeMap::new();
    for mut r in rows {
        let mut cursor = 0usize;
        loop {
            let Some((&c, v)) = r.range(cursor..).next() else { break };
            let Some(p) = piv.get(&c) else {
                let inv = v.inv().expect("field");
                for e in r.values_mut() {
                    *e = &*e * &inv;
                }
                piv.insert(c, r);
                break;
            };
            let f = v.clone();
            for (&j, pv) in p {
                let e = r.entry(j).or_insert_with(|| ring.zero());
                *e -= &(&f * pv);
                if e.is_zero() {
                    r.remove(&j);
                }
            }
            cursor = c + 1;
        }
    }
    let cols: Vec<usize> = piv.keys().rev().copied().collect();
    for &c in &cols {
        let pr = piv[&c].clone();
        for (_, r) in piv.range_mut(..c) {
            if let Some(f) = r.get(&c).cloned() {
                for (&j, pv) in &pr {
                    let e = r.entry(j).or_insert_with(|| ring.zero());
                    *e -= &(&f * pv);
                    if e.is_zero() {
                        r.remove(&j);
                    }
                }
            }
        }
    }
    piv
}

/// Rank and a kernel basis. Over Z the kernel is a basis of the saturated kernel lattice.
pub fn rank_kernel(m: &SparseMatrix) -> Result<RankKernel> {
    if !m.ring.is_field() {
        let s = smith_normal_form(m)?;
        let kernel = (s.rank..m.cols).map(|j| s.v.column(j)).collect();
        return Ok(RankKernel { rank: s.rank, kernel });
    }
    let piv = rref(m.ring, m.data.iter().cloned());
    let mut kernel = Vec::new();
    for f in (0..m.cols).filter(|c| !piv.contains_key(c)) {
        let mut v = vec![m.ring.zero(); m.cols];
        v[f] = m.ring.one();
        for (&pc, r) in &piv {
            if let Some(e) = r.get(&f) {
                v[pc] = -e;
            }
        }
        kernel.push(v);
    }
    Ok(RankKernel { rank: piv.len(), kernel })
}

/// Some `x` with `M x = b` over a field, free variables set to zero; `None` if inconsistent.
pub fn solve_linear(m: &SparseMatrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    if !m.ring.is_field() {
        return Err(CoeffError::UnsupportedRing(m.ring));
    }
    if b.len() != m.rows {
        return Err(CoeffError::Shape(format!("rhs length {} for {} rows", b.len(), m.rows)));
    }
    for v in b {
        if v.ring() != m.ring {
            return Err(CoeffError::RingMismatch(m.ring, v.ring()));
        }
    }
    let n = m.cols;
    let rows = m.data.iter().zip(b).map(|(r, bi)| {
        let mut r = r.clone();
        if !bi.is_zero() {
            r.insert(n, bi.clone());
        }
        r
    });
    let piv = rref(m.ring, rows);
    if piv.contains_key(&n) {
        return Ok(None);
    }
    let mut x = vec![m.ring.zero(); n];
    for (&pc, r) in &piv {
        if let Some(e) = r.get(&n) {
            x[pc] = e.clone();
        }
    }
    Ok(Some(x))
}
