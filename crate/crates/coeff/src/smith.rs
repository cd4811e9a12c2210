use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::{rank_kernel, solve_linear};
use crate::{CoeffError, Result, Ring, Scalar, SparseMatrix};

/// Smith normal form `U·M·V = D` over Z with `d_1 | d_2 | …` positive.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: SparseMatrix,
    pub v: SparseMatrix,
    pub diag: Vec<BigInt>,
    pub rank: usize,
}

impl Smith {
    /// The diagonal matrix `D` with the shape of the input.
    pub fn d(&self) -> SparseMatrix {
        let mut d = SparseMatrix::zero(Ring::Z, self.u.rows(), self.v.rows());
        for (i, x) in self.diag.iter().enumerate() {
            d.set(i, i, Scalar::Z(x.clone()));
        }
        d
    }
}

type Dense = Vec<Vec<BigInt>>;

fn dense(m: &SparseMatrix) -> Result<Dense> {
    let mut a = vec![vec![BigInt::zero(); m.cols()]; m.rows()];
    for (i, j, v) in m.entries() {
        a[i][j] = match v {
            Scalar::Z(z) => z.clone(),
            other => return Err(CoeffError::RingMismatch(Ring::Z, other.ring())),
        };
    }
    Ok(a)
}

fn eye(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

fn to_sparse(a: &Dense, cols: usize) -> SparseMatrix {
    let mut m = SparseMatrix::zero(Ring::Z, a.len(), cols);
    for (i, r) in a.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            m.set(i, j, Scalar::Z(v.clone()));
        }
    }
    m
}

// row_i -= q·row_k, on both the working matrix and U
fn row_op(a: &mut Dense, u: &mut Dense, i: usize, k: usize, q: &BigInt) {
    for j in 0..a[0].len() {
        let t = &a[k][j] * q;
        a[i][j] -= t;
    }
    for j in 0..u[0].len() {
        let t = &u[k][j] * q;
        u[i][j] -= t;
    }
}

// col_j -= q·col_k, on both the working matrix and V
fn col_op(a: &mut Dense, v: &mut Dense, j: usize, k: usize, q: &BigInt) {
    for r in a.iter_mut() {
        let t = &r[k] * q;
        r[j] -= t;
    }
    for r in v.iter_mut() {
        let t = &r[k] * q;
        r[j] -= t;
    }
}

pub fn smith_normal_form(m: &SparseMatrix) -> Result<Smith> {
    if m.ring() != Ring::Z {
        return Err(CoeffError::UnsupportedRing(m.ring()));
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = dense(m)?;
    let mut u = eye(rows);
    let mut v = eye(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for (i, r) in a.iter().enumerate().skip(t) {
            for (j, x) in r.iter().enumerate().skip(t) {
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        for r in v.iter_mut() {
            r.swap(t, pj);
        }
        let mut dirty = false;
        for i in t + 1..rows {
            if !a[i][t].is_zero() {
                let q = a[i][t].div_floor(&a[t][t]);
                row_op(&mut a, &mut u, i, t, &q);
                dirty |= !a[i][t].is_zero();
            }
        }
        for j in t + 1..cols {
            if !a[t][j].is_zero() {
                let q = a[t][j].div_floor(&a[t][t]);
                col_op(&mut a, &mut v, j, t, &q);
                dirty |= !a[t][j].is_zero();
            }
        }
        if dirty {
            continue;
        }
        // enforce divisibility by folding an offending row into row t
        let p = a[t][t].clone();
        let bad = (t + 1..rows).find(|&i| a[i].iter().skip(t + 1).any(|x| !(x % &p).is_zero()));
        if let Some(i) = bad {
            let minus_one = -BigInt::one();
            row_op(&mut a, &mut u, t, i, &minus_one);
            continue;
        }
        if p.is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
        t += 1;
    }
    let diag: Vec<BigInt> = (0..t).map(|i| a[i][i].clone()).collect();
    Ok(Smith { u: to_sparse(&u, rows), v: to_sparse(&v, cols), rank: diag.len(), diag })
}

/// Some integer solution of `M x = b`, or `None` if there is none.
pub fn solve_integer(m: &SparseMatrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    if b.len() != m.rows() {
        return Err(CoeffError::Shape(format!("rhs length {} for {} rows", b.len(), m.rows())));
    }
    let s = smith_normal_form(m)?;
    let ub = s.u.mul_vec(b);
    let mut y = vec![Ring::Z.zero(); m.cols()];
    for (i, c) in ub.iter().enumerate() {
        if i < s.rank {
            match c.div(&Scalar::Z(s.diag[i].clone())) {
                Ok(q) => y[i] = q,
                Err(_) => return Ok(None),
            }
        } else if !c.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(s.v.mul_vec(&y)))
}

/// Two-sided inverse of a square matrix, when it exists over the matrix's ring.
pub fn inverse(m: &SparseMatrix) -> Result<SparseMatrix> {
    let n = m.rows();
    if m.cols() != n {
        return Err(CoeffError::Shape(format!("{}x{} is not square", n, m.cols())));
    }
    if m.ring() == Ring::Z {
        let s = smith_normal_form(m)?;
        if s.rank < n || s.diag.iter().any(|d| !d.is_one()) {
            return Err(CoeffError::NotInvertible("matrix".into()));
        }
        return Ok(s.v.mul(&s.u));
    }
    if rank_kernel(m)?.rank < n {
        return Err(CoeffError::NotInvertible("singular matrix".into()));
    }
    let ring = m.ring();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![ring.zero(); n];
        e[j] = ring.one();
        cols.push(solve_linear(m, &e)?.expect("full rank"));
    }
    Ok(SparseMatrix::from_columns(ring, n, &cols))
}
