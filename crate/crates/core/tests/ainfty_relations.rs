mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use ainfty_coeff::{Lin, Ring, Scalar};
use ainfty_core::ainfty::{
    augment, check_functor, check_functor_shifted, check_homotopy, check_natural, check_stasheff,
    check_stasheff_shifted, cohomology, compose_functors, homotopy_sum, invert_homotopy, m1_prenat,
    perturb_by_homotopy, tensor_dg, unit_checks, AInfty, Functor, Prenat, Quiver, Table, UnitalVerdict,
};
use ainfty_core::graded::{shift_operation, Letter, ShiftDirection};
use ainfty_core::samples::*;
use ainfty_core::CoreError;
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn dual_numbers_pass() {
    let d = dual_numbers(f5(), 6).unwrap();
    assert!(check_stasheff(&d, 6).ok());
    assert!(check_stasheff_shifted(&d, 6).ok());
}

#[test]
fn m3_example_passes_through_seven() {
    let a = m3_example(Ring::Q, 7).unwrap();
    let r = check_stasheff(&a, 7);
    assert!(r.ok());
    assert_eq!(r.through, 7);
    assert!(check_stasheff_shifted(&a, 7).ok());
}

#[test]
fn non_associative_fails_at_three() {
    let a = non_associative(f5(), 4).unwrap();
    let r = check_stasheff(&a, 4);
    assert_eq!(r.first_violating_arity(), Some(3));
    assert_eq!(check_stasheff_shifted(&a, 4).first_violating_arity(), Some(3));
    let v = r.violation.unwrap();
    let names: Vec<&str> = v.word.iter().map(|l| a.quiver.name(l)).collect();
    assert_eq!(names, ["a", "a", "a"]);
}

#[test]
fn request_is_clamped_to_the_arity_bound() {
    let d = dual_numbers(f5(), 3).unwrap();
    let r = check_stasheff(&d, 10);
    assert_eq!((r.through, r.frontier), (3, 3));
}

#[test]
fn endomorphism_algebras_are_dg() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let a = random_end_algebra(&mut rng, f5(), 2, 3);
        assert!(check_stasheff(&a, 3).ok());
    }
}

#[test]
fn shift_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_end_algebra(&mut rng, f5(), 2, 3);
    let t = random_table(&mut rng, f5(), &a.quiver, &a.quiver, &[0], &[0], 3, |n| 2 - n as i64, 0.3);
    for d in [0, 1] {
        let s = shift_operation(&t, d, ShiftDirection::ToShifted);
        assert_eq!(shift_operation(&s, d, ShiftDirection::ToUnshifted), t);
    }
}

#[test]
fn shift_sign_examples() {
    let q = Quiver::algebra(vec![("x".into(), 0), ("y".into(), 0)]).unwrap();
    let (x, y) = (q.letter(0, 0, 0), q.letter(0, 0, 1));
    let r = f5();
    // arity 1, degree 0: shifted degree 0, no crossing
    let mut t = Table::new();
    t.insert(vec![x], Lin::basis(r, x));
    assert_eq!(shift_operation(&t, 0, ShiftDirection::ToShifted)[&vec![x]], Lin::basis(r, x));
    // arity 2, degree 0: global sign -1, and the shift on y crosses sx of degree -1
    let mut t = Table::new();
    t.insert(vec![x, y], Lin::basis(r, x));
    assert_eq!(shift_operation(&t, 1, ShiftDirection::ToShifted)[&vec![x, y]], Lin::basis(r, x));
    // m_1 of a structure picks up the global sign only
    let q = Quiver::algebra(vec![("x".into(), 0), ("y".into(), 1)]).unwrap();
    let (x, y) = (q.letter(0, 0, 0), q.letter(0, 0, 1));
    let a = AInfty::from_unshifted(r, q, 2, {
        let mut t = Table::new();
        t.insert(vec![x], Lin::basis(r, y));
        t
    })
    .unwrap();
    assert_eq!(a.b(&[x]), Lin::basis(r, y).neg());
}

fn random_ainfty_like(rng: &mut ChaCha8Rng, ring: Ring) -> Arc<AInfty> {
    let kind = rng.gen_range(0..4);
    let max = 4;
    match kind {
        0 => random_end_algebra(rng, ring, 2, max),
        1 => {
            // perturb a dg algebra by a random higher operation; usually breaks the relations
            let a = random_end_algebra(rng, ring, 1, max);
            let extra = random_table(rng, ring, &a.quiver, &a.quiver, &[0], &[0], 3, |n| 2 - n as i64, 0.2);
            let mut t = a.m_table().clone();
            for (w, v) in extra {
                if w.len() == 3 {
                    let cur = t.get(&w).cloned().unwrap_or_else(|| Lin::zero(ring));
                    t.insert(w, cur.plus(&v));
                }
            }
            Arc::new(AInfty::from_unshifted(ring, a.quiver.clone(), max, t).unwrap())
        }
        2 => m3_example(ring, max).unwrap(),
        _ => {
            let q = Quiver::algebra(vec![("a".into(), 0), ("b".into(), 1), ("c".into(), 1)]).unwrap();
            let t = random_table(rng, ring, &q, &q, &[0], &[0], max, |n| 2 - n as i64, 0.4);
            Arc::new(AInfty::from_unshifted(ring, q, max, t).unwrap())
        }
    }
}

#[test]
fn literal_and_shifted_checkers_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..40 {
        let ring = if i % 2 == 0 { f5() } else { Ring::Q };
        let a = random_ainfty_like(&mut rng, ring);
        let lit = check_stasheff(&a, 4);
        let sh = check_stasheff_shifted(&a, 4);
        assert_eq!(lit.first_violating_arity(), sh.first_violating_arity(), "structure {i}");
        if let (Some(x), Some(y)) = (&lit.violation, &sh.violation) {
            assert_eq!(x.word, y.word);
        }
    }
}

#[test]
fn identity_and_ring_map_are_functors() {
    let d = dual_numbers(f5(), 5).unwrap();
    let id = Functor::identity(d.clone());
    assert!(check_functor(&id, 5).ok());
    let k = ground(f5(), 5).unwrap();
    let one = k.quiver.letter(0, 0, 0);
    let mut t = Table::new();
    t.insert(vec![d.quiver.letter_by_name(0, 0, "1").unwrap()], Lin::basis(f5(), one));
    let f = Functor::new(d.clone(), k, vec![0], 5, t).unwrap();
    assert!(check_functor(&f, 5).ok());
    assert!(check_functor_shifted(&f, 5).ok());
}

#[test]
fn functor_degree_gate() {
    let d = dual_numbers(f5(), 5).unwrap();
    let e = d.quiver.letter_by_name(0, 0, "e").unwrap();
    let mut t = Table::new();
    t.insert(vec![e], Lin::basis(f5(), e));
    t.insert(vec![e, e], Lin::basis(f5(), e));
    let r = Functor::new(d.clone(), d.clone(), vec![0], 5, t);
    assert!(matches!(r, Err(CoreError::DegreeMismatch(_))));
}

#[test]
fn functor_checkers_agree_on_random_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let a = random_end_algebra(&mut rng, f5(), 1, 3);
        let b = random_end_algebra(&mut rng, f5(), 2, 3);
        let f = random_functor(&mut rng, &a, &b, 3, 0.3);
        assert_eq!(
            check_functor(&f, 3).first_violating_arity(),
            check_functor_shifted(&f, 3).first_violating_arity()
        );
    }
}

#[test]
fn composition_with_identity_and_strict() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random_end_algebra(&mut rng, f5(), 1, 3);
    let b = random_end_algebra(&mut rng, f5(), 2, 3);
    let f = random_functor(&mut rng, &a, &b, 3, 0.3);
    let g = compose_functors(&Functor::identity(b.clone()), &f).unwrap();
    assert_eq!(g.comps(), f.comps());
    let g = compose_functors(&f, &Functor::identity(a.clone())).unwrap();
    assert_eq!(g.comps(), f.comps());
}

#[test]
fn composition_is_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..5 {
        let a = random_end_algebra(&mut rng, f5(), 1, 4);
        let b = random_end_algebra(&mut rng, f5(), 1, 4);
        let c = random_end_algebra(&mut rng, f5(), 1, 4);
        let d = random_end_algebra(&mut rng, f5(), 1, 4);
        let f = random_functor(&mut rng, &a, &b, 4, 0.4);
        let g = random_functor(&mut rng, &b, &c, 4, 0.4);
        let h = random_functor(&mut rng, &c, &d, 4, 0.4);
        let l = compose_functors(&compose_functors(&h, &g).unwrap(), &f).unwrap();
        let r = compose_functors(&h, &compose_functors(&g, &f).unwrap()).unwrap();
        assert_eq!(l.comps(), r.comps());
    }
}

#[test]
fn composite_of_functors_is_a_functor() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = random_end_algebra(&mut rng, f5(), 1, 3);
    let b = random_end_algebra(&mut rng, f5(), 2, 3);
    let f0 = Functor::identity(a.clone());
    let theta = random_homotopy(&mut rng, &f0, 3);
    let (f, _) = perturb_by_homotopy(&f0, &theta).unwrap();
    let g0 = Functor::identity(b.clone());
    let _ = g0;
    let (g, _) = perturb_by_homotopy(&f, &random_homotopy(&mut rng, &f, 3)).unwrap();
    let gf = compose_functors(&g, &f).unwrap();
    assert!(check_functor(&gf, 3).ok());
}

fn random_prenat(rng: &mut ChaCha8Rng, f: &Functor, g: &Functor, p: i64, max: usize) -> Prenat {
    let a = &f.source;
    let ring = a.ring;
    let t = random_table(rng, ring, &a.quiver, &f.target.quiver, &f.obj_map, &g.obj_map, max, |n| p - n as i64, 0.3);
    let mut theta0 = BTreeMap::new();
    for o in 0..a.quiver.num_objects() {
        let mut v = Lin::zero(ring);
        for l in f.target.quiver.letters(f.obj_map[o], g.obj_map[o]) {
            if l.deg == p && rng.gen_bool(0.5) {
                v.add_term(l, &Scalar::from_i64(ring, rng.gen_range(1..=4)));
            }
        }
        theta0.insert(o, v);
    }
    Prenat::new(f.clone(), g.clone(), p, max, theta0, t).unwrap()
}

fn random_homotopy(rng: &mut ChaCha8Rng, f: &Functor, max: usize) -> Prenat {
    let a = &f.source;
    let t = random_table(rng, a.ring, &a.quiver, &f.target.quiver, &f.obj_map, &f.obj_map, max, |n| -(n as i64), 0.3);
    Prenat::new(f.clone(), f.clone(), 0, max, BTreeMap::new(), t).unwrap()
}

#[test]
fn m1_squares_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..8 {
        let a = random_end_algebra(&mut rng, f5(), 1, 4);
        let b = random_end_algebra(&mut rng, f5(), 2, 4);
        let f0 = Functor::new(a.clone(), b.clone(), vec![0], 3, Table::new()).unwrap();
        let (f, _) = perturb_by_homotopy(&f0, &random_homotopy(&mut rng, &f0, 3)).unwrap();
        let (g, _) = perturb_by_homotopy(&f0, &random_homotopy(&mut rng, &f0, 3)).unwrap();
        let p = rng.gen_range(-1..=1);
        let theta = random_prenat(&mut rng, &f, &g, p, 3);
        let d1 = m1_prenat(&theta);
        assert_eq!(d1.degree, p + 1);
        let d2 = m1_prenat(&d1);
        assert!(d2.is_zero(), "m1∘m1 ≠ 0");
    }
}

#[test]
fn identity_transformation_is_natural() {
    let c = Complex::contractible();
    let b = endomorphism_dg(f5(), &c, 4).unwrap();
    let f = Functor::identity(b.clone());
    let mut units = BTreeMap::new();
    units.insert(0, endomorphism_unit(&b, 2));
    let theta = Prenat::identity(f, &units).unwrap();
    assert!(m1_prenat(&theta).is_zero());
    assert!(check_natural(&theta, 3).ok());
}

#[test]
fn non_closed_theta0_is_caught_at_arity_zero() {
    let c = Complex::contractible();
    let b = endomorphism_dg(f5(), &c, 4).unwrap();
    let f = Functor::identity(b.clone());
    let mut th0 = BTreeMap::new();
    th0.insert(0, Lin::basis(f5(), b.quiver.letter_by_name(0, 0, "e00").unwrap()));
    let theta = Prenat::new(f.clone(), f, 0, 3, th0, Table::new()).unwrap();
    let r = check_natural(&theta, 3);
    assert_eq!(r.first_violating_arity(), Some(0));
    assert_eq!(r.violation.unwrap().residual, b.m(&[b.quiver.letter_by_name(0, 0, "e00").unwrap()]));
}

#[test]
fn perturbation_gives_homotopic_functors() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..6 {
        let a = random_end_algebra(&mut rng, f5(), 1, 4);
        let b = random_end_algebra(&mut rng, f5(), 2, 4);
        let f0 = Functor::new(a.clone(), b.clone(), vec![0], 3, Table::new()).unwrap();
        let (f, _) = perturb_by_homotopy(&f0, &random_homotopy(&mut rng, &f0, 3)).unwrap();
        assert!(check_functor(&f, 3).ok());
        let theta = random_homotopy(&mut rng, &f, 3);
        let (g, th) = perturb_by_homotopy(&f, &theta).unwrap();
        assert!(check_functor(&g, 3).ok());
        assert!(check_homotopy(&th, 3).unwrap().ok());
        let zero = Prenat::zero(f.clone(), f.clone(), 0, 3);
        assert_eq!(perturb_by_homotopy(&f, &zero).unwrap().0.comps(), f.comps());
        let inv = invert_homotopy(&th).unwrap();
        assert!(check_homotopy(&inv, 3).unwrap().ok());
        let (h, th2) = perturb_by_homotopy(&g, &random_homotopy(&mut rng, &g, 3)).unwrap();
        let sum = homotopy_sum(&th, &th2).unwrap();
        assert_eq!(sum.to.comps(), h.comps());
        assert!(check_homotopy(&sum, 3).unwrap().ok());
    }
}

#[test]
fn unit_examples() {
    let d = dual_numbers(Ring::Q, 4).unwrap();
    let r = unit_checks(&d).unwrap();
    assert_eq!(r.strict.unwrap()[&0], Lin::basis(Ring::Q, d.quiver.letter_by_name(0, 0, "1").unwrap()));
    assert!(matches!(r.unital, UnitalVerdict::Unital(_)));

    let b = endomorphism_dg(Ring::Q, &Complex::contractible(), 4).unwrap();
    let r = unit_checks(&b).unwrap();
    assert_eq!(r.strict.unwrap()[&0], endomorphism_unit(&b, 2));
    let h = cohomology(&b, (-2, 2)).unwrap();
    assert!(h.is_zero());
    assert!(h.identities.is_some());

    // Z --2--> Z in degrees 0, 1 with zero multiplication
    let q = Quiver::algebra(vec![("x".into(), 0), ("y".into(), 1)]).unwrap();
    let (x, y) = (q.letter(0, 0, 0), q.letter(0, 0, 1));
    let mut t = Table::new();
    t.insert(vec![x], Lin::single(Ring::Z, y, Scalar::from_i64(Ring::Z, 2)));
    let a = AInfty::from_unshifted(Ring::Z, q, 3, t).unwrap();
    let r = unit_checks(&a).unwrap();
    assert!(r.strict.is_none());
    assert!(r.cohomological.is_none());
    assert!(!r.is_unital());
    assert!(matches!(cohomology(&a, (0, 1)), Err(CoreError::UnsupportedRing(Ring::Z))));
}

#[test]
fn cohomology_examples() {
    let d = dual_numbers(Ring::Q, 4).unwrap();
    let h = cohomology(&d, (0, 0)).unwrap();
    assert_eq!(h.dims(0, 0)[&0], 2);
    // over F2 the differential 2 vanishes
    let f2 = Ring::fp(2).unwrap();
    let q = Quiver::algebra(vec![("x".into(), 0), ("y".into(), 1)]).unwrap();
    let (x, y) = (q.letter(0, 0, 0), q.letter(0, 0, 1));
    let mut t = Table::new();
    t.insert(vec![x], Lin::single(f2, y, Scalar::from_i64(f2, 2)));
    let a = AInfty::from_unshifted(f2, q, 3, t).unwrap();
    let h = cohomology(&a, (0, 1)).unwrap();
    assert_eq!(h.dims(0, 0).into_values().collect::<Vec<_>>(), [1, 1]);
}

#[test]
fn augmentation_and_tensor() {
    let z = zero_algebra(Ring::Q, 4).unwrap();
    let (zp, units) = augment(&z).unwrap();
    assert_eq!(zp.quiver.hom(0, 0).rank(), 1);
    assert!(unit_checks(&zp).unwrap().strict.is_some());
    assert_eq!(units.len(), 1);

    let d = dual_numbers(Ring::Q, 4).unwrap();
    let dd = tensor_dg(&d, &d).unwrap();
    assert_eq!(dd.quiver.hom(0, 0).rank(), 4);
    assert!(check_stasheff(&dd, 4).ok());
    let u = unit_checks(&dd).unwrap().strict.unwrap();
    assert_eq!(u[&0], Lin::basis(Ring::Q, dd.quiver.letter_by_name(0, 0, "1⊗1").unwrap()));
    let m3 = m3_example(Ring::Q, 4).unwrap();
    assert!(matches!(tensor_dg(&d, &m3), Err(CoreError::NotDg(3))));
}

#[test]
fn tensor_product_sign_oracle() {
    // (f⊗g)(f'⊗g') = (-1)^{|g||f'|} ff'⊗gg', expanded independently on random dg algebras
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..4 {
        let a = random_end_algebra(&mut rng, f5(), 2, 3);
        let b = random_end_algebra(&mut rng, f5(), 2, 3);
        let t = tensor_dg(&a, &b).unwrap();
        assert!(check_stasheff(&t, 3).ok());
        let rb = b.quiver.hom(0, 0).rank();
        for _ in 0..20 {
            let la = a.quiver.all_letters();
            let lb = b.quiver.all_letters();
            let (f, f2) = (la[rng.gen_range(0..la.len())], la[rng.gen_range(0..la.len())]);
            let (g, g2) = (lb[rng.gen_range(0..lb.len())], lb[rng.gen_range(0..lb.len())]);
            let x = t.quiver.letter(0, 0, f.idx * rb + g.idx);
            let y = t.quiver.letter(0, 0, f2.idx * rb + g2.idx);
            let got = t.m(&[x, y]);
            let mut want = Lin::zero(f5());
            let sign = if (g.deg * f2.deg) % 2 == 0 { 1 } else { -1 };
            for (p, c) in a.m(&[f, f2]).iter() {
                for (q, e) in b.m(&[g, g2]).iter() {
                    let l: Letter = t.quiver.letter(0, 0, p.idx * rb + q.idx);
                    want.add_term(l, &(&(c * e) * &Scalar::from_i64(f5(), sign)));
                }
            }
            assert_eq!(got, want);
        }
    }
}

#[test]
fn augment_preserves_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let a = random_ainfty_like(&mut rng, f5());
        let (ap, _) = augment(&a).unwrap();
        let before = check_stasheff(&a, 4).ok();
        let after = check_stasheff(&ap, 4).ok();
        if before {
            assert!(after);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn unit_implication_chain(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_end_algebra(&mut rng, Ring::Q, 2, 3);
        let r = unit_checks(&a).unwrap();
        if r.strict.is_some() {
            prop_assert!(r.is_unital());
        }
        if r.is_unital() {
            prop_assert!(r.cohomological.is_some());
        }
    }
}
