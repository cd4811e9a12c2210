//! Linear systems indexed by arbitrary ordered keys.

use std::collections::BTreeMap;

use ainfty_coeff::{solve_integer, solve_linear, Ring, Scalar, SparseMatrix};

use crate::Result;

/// Solve `M x = b` over a field, or for an integer solution over Z.
pub fn solve_any(m: &SparseMatrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    if m.ring() == Ring::Z {
        Ok(solve_integer(m, b)?)
    } else {
        Ok(solve_linear(m, b)?)
    }
}

pub(crate) struct KeyedSystem<R: Ord, C: Ord> {
    ring: Ring,
    rows: BTreeMap<R, usize>,
    cols: BTreeMap<C, usize>,
    entries: Vec<(usize, usize, Scalar)>,
    rhs: BTreeMap<usize, Scalar>,
}

impl<R: Ord + Clone, C: Ord + Clone> KeyedSystem<R, C> {
    pub fn new(ring: Ring) -> Self {
        KeyedSystem { ring, rows: BTreeMap::new(), cols: BTreeMap::new(), entries: Vec::new(), rhs: BTreeMap::new() }
    }

    fn row(&mut self, r: R) -> usize {
        let n = self.rows.len();
        *self.rows.entry(r).or_insert(n)
    }

    /// Registers an unknown so it appears in the solution even if no equation mentions it.
    pub fn unknown(&mut self, c: C) -> usize {
        let n = self.cols.len();
        *self.cols.entry(c).or_insert(n)
    }

    pub fn add(&mut self, r: R, c: C, v: &Scalar) {
        if v.is_zero() {
            return;
        }
        let i = self.row(r);
        let j = self.unknown(c);
        self.entries.push((i, j, v.clone()));
    }

    pub fn add_rhs(&mut self, r: R, v: &Scalar) {
        if v.is_zero() {
            return;
        }
        let i = self.row(r);
        let e = self.rhs.entry(i).or_insert_with(|| self.ring.zero());
        *e += v;
    }

    /// Some solution, with free unknowns set to zero over a field.
    pub fn solve(&self) -> Result<Option<BTreeMap<C, Scalar>>> {
        let mut m = SparseMatrix::zero(self.ring, self.rows.len(), self.cols.len());
        for (i, j, v) in &self.entries {
            m.add_to(*i, *j, v);
        }
        let mut b = vec![self.ring.zero(); self.rows.len()];
        for (i, v) in &self.rhs {
            b[*i] = v.clone();
        }
        if self.cols.is_empty() {
            return Ok(if b.iter().all(|x| x.is_zero()) { Some(BTreeMap::new()) } else { None });
        }
        Ok(solve_any(&m, &b)?.map(|x| self.cols.iter().map(|(c, &j)| (c.clone(), x[j].clone())).collect()))
    }
}
