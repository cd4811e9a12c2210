//! Small standard structures: the ground ring, dual numbers, endomorphism dg algebras of
//! finite complexes and a few deliberately degenerate examples.

use std::collections::BTreeMap;
use std::sync::Arc;

use ainfty_coeff::{Lin, Ring, Scalar};

use crate::ainfty::{AInfty, Quiver, Table};
use crate::graded::Letter;
use crate::Result;

fn alg(ring: Ring, basis: &[(&str, i64)], max_arity: usize, ops: &[(&[&str], &[(&str, i64)])]) -> Result<Arc<AInfty>> {
    let q = Quiver::algebra(basis.iter().map(|(n, d)| (n.to_string(), *d)).collect())?;
    let l = |n: &str| q.letter_by_name(0, 0, n).expect("basis name");
    let mut t = Table::new();
    for (ins, out) in ops {
        let w: Vec<Letter> = ins.iter().map(|n| l(n)).collect();
        let mut v = Lin::zero(ring);
        for (n, c) in out.iter() {
            v.add_term(l(n), &Scalar::from_i64(ring, *c));
        }
        t.insert(w, v);
    }
    Ok(Arc::new(AInfty::from_unshifted(ring, q, max_arity, t)?))
}

/// The ground ring as a one-object algebra with basis `1`.
pub fn ground(ring: Ring, max_arity: usize) -> Result<Arc<AInfty>> {
    alg(ring, &[("1", 0)], max_arity, &[(&["1", "1"], &[("1", 1)])])
}

/// `K[ε]/ε²` with `ε` of degree 0 and zero differential.
pub fn dual_numbers(ring: Ring, max_arity: usize) -> Result<Arc<AInfty>> {
    alg(
        ring,
        &[("1", 0), ("e", 0)],
        max_arity,
        &[(&["1", "1"], &[("1", 1)]), (&["1", "e"], &[("e", 1)]), (&["e", "1"], &[("e", 1)])],
    )
}

/// Only `m_3(x⊗x⊗x) = y`, with `x` in degree 1 and `y` in degree 2.
pub fn m3_example(ring: Ring, max_arity: usize) -> Result<Arc<AInfty>> {
    alg(ring, &[("x", 1), ("y", 2)], max_arity, &[(&["x", "x", "x"], &[("y", 1)])])
}

/// `m_2(a⊗a) = b`, `m_2(a⊗b) = c`: not associative.
pub fn non_associative(ring: Ring, max_arity: usize) -> Result<Arc<AInfty>> {
    alg(
        ring,
        &[("a", 0), ("b", 0), ("c", 0)],
        max_arity,
        &[(&["a", "a"], &[("b", 1)]), (&["a", "b"], &[("c", 1)])],
    )
}

/// The zero algebra: one object, zero hom module.
pub fn zero_algebra(ring: Ring, max_arity: usize) -> Result<Arc<AInfty>> {
    Ok(Arc::new(AInfty::zero(ring, Quiver::algebra(Vec::new())?, max_arity)))
}

/// A finite complex: basis degrees and a differential `δ(c_j) = Σ δ_ij c_i` of degree 1.
#[derive(Clone, Debug)]
pub struct Complex {
    pub degrees: Vec<i64>,
    pub delta: Vec<(usize, usize, i64)>,
}

impl Complex {
    /// `K --id--> K` in degrees 0 and 1.
    pub fn contractible() -> Self {
        Complex { degrees: vec![0, 1], delta: vec![(1, 0, 1)] }
    }

    fn matrix(&self, ring: Ring) -> BTreeMap<(usize, usize), Scalar> {
        let mut m = BTreeMap::new();
        for &(i, j, c) in &self.delta {
            let e: &mut Scalar = m.entry((i, j)).or_insert_with(|| ring.zero());
            *e += &Scalar::from_i64(ring, c);
        }
        m.retain(|_, v| !v.is_zero());
        m
    }
}

/// Endomorphism dg algebra of a complex: basis `e{i}{j}` mapping `c_j` to `c_i`, composition of maps,
/// and `d(f) = δ∘f - (-1)^{|f|} f∘δ`. Its strict unit is `Σ e{i}{i}`.
pub fn endomorphism_dg(ring: Ring, c: &Complex, max_arity: usize) -> Result<Arc<AInfty>> {
    let r = c.degrees.len();
    let mut basis = Vec::new();
    for i in 0..r {
        for j in 0..r {
            basis.push((format!("e{i}{j}"), c.degrees[i] - c.degrees[j]));
        }
    }
    let q = Quiver::algebra(basis)?;
    let e = |i: usize, j: usize| q.letter(0, 0, i * r + j);
    let delta = c.matrix(ring);
    let mut t = Table::new();
    for i in 0..r {
        for j in 0..r {
            let f = e(i, j);
            let mut v = Lin::zero(ring);
            // δ∘e_ij = Σ_k δ_ki e_kj
            for (&(k, i2), x) in &delta {
                if i2 == i {
                    v.add_term(e(k, j), x);
                }
            }
            // e_ij∘δ = Σ_l δ_jl e_il
            let s = -ring.sign(f.deg);
            for (&(j2, l), x) in &delta {
                if j2 == j {
                    v.add_term(e(i, l), &(x * &s));
                }
            }
            if !v.is_zero() {
                t.insert(vec![f], v);
            }
            for k in 0..r {
                t.insert(vec![e(i, j), e(j, k)], Lin::basis(ring, e(i, k)));
            }
        }
    }
    Ok(Arc::new(AInfty::from_unshifted(ring, q, max_arity, t)?))
}

/// The strict unit `Σ e{i}{i}` of an endomorphism algebra of a complex of rank `r`.
pub fn endomorphism_unit(a: &AInfty, r: usize) -> Lin<Letter> {
    let mut u = Lin::zero(a.ring);
    for i in 0..r {
        u.add_term(a.quiver.letter(0, 0, i * r + i), &a.ring.one());
    }
    u
}
