#![allow(dead_code)]

use std::sync::Arc;

use ainfty_coeff::{Lin, Ring, Scalar};
use ainfty_core::ainfty::{AInfty, Functor, Quiver, Table};
use ainfty_core::graded::{word_degree, Obj};
use ainfty_core::samples::{endomorphism_dg, Complex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn f5() -> Ring {
    Ring::fp(5).unwrap()
}

pub fn rand_scalar(rng: &mut ChaCha8Rng, ring: Ring) -> Scalar {
    Scalar::from_i64(ring, rng.gen_range(-3..=3))
}

/// Random components on every composable word of arity `1..=max`, of output degree `deg(w) + shift(n)`.
pub fn random_table(
    rng: &mut ChaCha8Rng,
    ring: Ring,
    src: &Quiver,
    tgt: &Quiver,
    obj_from: &[Obj],
    obj_to: &[Obj],
    max: usize,
    shift: impl Fn(usize) -> i64,
    density: f64,
) -> Table {
    let mut t = Table::new();
    for n in 1..=max {
        for w in src.words(n) {
            let (s, e) = Quiver::ends(&w);
            let want = word_degree(&w) + shift(n);
            let mut v = Lin::zero(ring);
            for l in tgt.letters(obj_from[s], obj_to[e]) {
                if l.deg == want && rng.gen_bool(density) {
                    v.add_term(l, &Scalar::from_i64(ring, rng.gen_range(1..=4)));
                }
            }
            if !v.is_zero() {
                t.insert(w, v);
            }
        }
    }
    t
}

/// A direct sum of one- and two-term pieces, mixed by elementary base changes within degrees.
pub fn random_complex(rng: &mut ChaCha8Rng, pieces: usize) -> Complex {
    let mut degrees = Vec::new();
    let mut delta: Vec<(usize, usize, i64)> = Vec::new();
    for _ in 0..pieces {
        let d = rng.gen_range(-1..=1);
        if rng.gen_bool(0.5) {
            degrees.push(d);
        } else {
            let a = degrees.len();
            degrees.push(d);
            degrees.push(d + 1);
            delta.push((a + 1, a, if rng.gen_bool(0.5) { 1 } else { -1 }));
        }
    }
    let r = degrees.len();
    let mut m = vec![vec![0i64; r]; r];
    for &(i, j, c) in &delta {
        m[i][j] += c;
    }
    for _ in 0..2 {
        let (a, b) = (rng.gen_range(0..r), rng.gen_range(0..r));
        if a == b || degrees[a] != degrees[b] {
            continue;
        }
        let c = rng.gen_range(-2..=2);
        // δ ↦ P δ P^{-1} with P = I + c E_ab
        for j in 0..r {
            let t = m[b][j];
            m[a][j] += c * t;
        }
        for i in 0..r {
            let t = m[i][a];
            m[i][b] -= c * t;
        }
    }
    let delta = (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).filter(|&(i, j)| m[i][j] != 0).map(|(i, j)| (i, j, m[i][j])).collect();
    Complex { degrees, delta }
}

pub fn random_end_algebra(rng: &mut ChaCha8Rng, ring: Ring, pieces: usize, max_arity: usize) -> Arc<AInfty> {
    let c = random_complex(rng, pieces);
    endomorphism_dg(ring, &c, max_arity).unwrap()
}

/// A random (not necessarily A∞) functor table between two structures.
pub fn random_functor(rng: &mut ChaCha8Rng, a: &Arc<AInfty>, b: &Arc<AInfty>, max: usize, density: f64) -> Functor {
    let obj: Vec<Obj> = (0..a.quiver.num_objects()).map(|_| rng.gen_range(0..b.quiver.num_objects())).collect();
    let t = random_table(rng, a.ring, &a.quiver, &b.quiver, &obj, &obj, max, |n| 1 - n as i64, density);
    Functor::new(a.clone(), b.clone(), obj, max, t).unwrap()
}
