mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use ainfty_coeff::{Lin, Ring};
use ainfty_core::ainfty::{
    check_functor, check_homotopy, check_natural, find_strict_units, m1_prenat, perturb_by_homotopy, AInfty, Functor,
    Prenat, SplitUnitWitness, Table,
};
use ainfty_core::samples::{dual_numbers, endomorphism_dg, endomorphism_unit, ground, Complex};
use ainfty_core::strictify::{
    functor_unit_violation, homotopy_to_weak_equiv, prenat_unit_violation, strictify_functor, strictify_nat,
};
use common::{f5, random_table};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn witness(a: &AInfty) -> SplitUnitWitness {
    SplitUnitWitness::canonical(&find_strict_units(a).unwrap().unwrap()).unwrap()
}

fn end_k(ring: Ring, arity: usize) -> Arc<AInfty> {
    endomorphism_dg(ring, &Complex::contractible(), arity).unwrap()
}

fn zero_functor(ring: Ring) -> Functor {
    Functor::new(ground(ring, 6).unwrap(), end_k(ring, 6), vec![0], 5, Table::new()).unwrap()
}

#[test]
fn zero_functor_into_a_contractible_endomorphism_algebra() {
    for ring in [Ring::Q, Ring::Z] {
        let f = zero_functor(ring);
        let w = witness(&f.source);
        let out = strictify_functor(&f, Some(&w), &BTreeMap::new(), 4).unwrap();
        let b = &f.target;
        let one = f.source.quiver.letter_by_name(0, 0, "1").unwrap();
        assert_eq!(out.functor.comp(&[one]), endomorphism_unit(b, 2));
        assert_eq!(out.stages[0].n, 1);
        let src = find_strict_units(&f.source).unwrap().unwrap();
        let tgt = find_strict_units(b).unwrap().unwrap();
        assert!(functor_unit_violation(&out.functor, &src, &tgt, 4).is_none());
        out.verify(&src, &tgt).unwrap();
        assert!(check_functor(&out.functor, 4).ok());
    }
}

#[test]
fn supplied_unit_homotopy_is_checked() {
    let f = zero_functor(Ring::Q);
    let b = &f.target;
    let e01 = b.quiver.letter_by_name(0, 0, "e01").unwrap();
    let good = Lin::basis(Ring::Q, e01);
    let out = strictify_functor(&f, Some(&witness(&f.source)), &BTreeMap::from([(0, good.clone())]), 3).unwrap();
    assert_eq!(out.stages[0].theta.comps().values().next(), Some(&good));
    let bad = good.scale(&ainfty_coeff::Scalar::from_i64(Ring::Q, 2));
    let err = strictify_functor(&f, Some(&witness(&f.source)), &BTreeMap::from([(0, bad)]), 3).unwrap_err();
    assert_eq!(err.code(), "NotUnital");
}

#[test]
fn missing_witness_is_refused() {
    let f = zero_functor(Ring::Q);
    let err = strictify_functor(&f, None, &BTreeMap::new(), 4).unwrap_err();
    assert_eq!(err.code(), "SplitUnitsRequired");
}

#[test]
fn strict_functors_are_left_alone() {
    let d = dual_numbers(Ring::Q, 6).unwrap();
    let f = Functor::identity(d.clone());
    let out = strictify_functor(&f, Some(&witness(&d)), &BTreeMap::new(), 4).unwrap();
    assert!(out.stages.is_empty());
    assert_eq!(out.functor.comps(), f.comps());
}

#[test]
fn truncation_must_cover_one_more_arity() {
    let f = zero_functor(Ring::Q).with_max_arity(3);
    let err = strictify_functor(&f, Some(&witness(&f.source)), &BTreeMap::new(), 3).unwrap_err();
    assert_eq!(err.code(), "ArityUnderflow");
}

fn random_homotopy(rng: &mut ChaCha8Rng, f: &Functor, max: usize, density: f64) -> Prenat {
    let a = &f.source;
    let obj: Vec<usize> = f.obj_map.clone();
    let t = random_table(rng, a.ring, &a.quiver, &f.target.quiver, &obj, &obj, max, |n| -(n as i64), density);
    Prenat::new(f.clone(), f.clone(), 0, max, BTreeMap::new(), t).unwrap()
}

#[test]
fn perturbed_identity_functors_strictify() {
    for seed in 0..6u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = end_k(f5(), 5);
        let f = Functor::identity(a.clone()).with_max_arity(4);
        let theta = random_homotopy(&mut rng, &f, 4, 0.4);
        let (g, _) = perturb_by_homotopy(&f, &theta).unwrap();
        let units = find_strict_units(&a).unwrap().unwrap();
        let out = strictify_functor(&g, Some(&witness(&a)), &BTreeMap::new(), 3).unwrap();
        out.verify(&units, &units).unwrap();
        assert!(functor_unit_violation(&out.functor, &units, &units, 3).is_none(), "seed {seed}");
    }
}

fn random_natural(rng: &mut ChaCha8Rng, ring: Ring, max: usize) -> Prenat {
    let a = end_k(ring, max + 2);
    let f = Functor::identity(a.clone()).with_max_arity(max + 1);
    let units = find_strict_units(&a).unwrap().unwrap();
    let id = Prenat::identity(f.clone(), &units).unwrap();
    let t = random_table(rng, ring, &a.quiver, &a.quiver, &[0], &[0], max, |n| -1 - n as i64, 0.4);
    let e01 = a.quiver.letter_by_name(0, 0, "e01").unwrap();
    let beta = Prenat::new(f.clone(), f, -1, max, BTreeMap::from([(0, Lin::basis(ring, e01))]), t).unwrap();
    id.plus(&m1_prenat(&beta))
}

#[test]
fn natural_transformations_strictify() {
    for seed in 0..4u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = random_natural(&mut rng, Ring::Q, 4);
        assert!(check_natural(&theta, 4).ok());
        let units = find_strict_units(&theta.from.source).unwrap().unwrap();
        let out = strictify_nat(&theta, 3).unwrap();
        assert!(prenat_unit_violation(&out.strict, &units, 3).is_none());
        assert!(check_natural(&out.strict, 3).ok());
        // θ_strict = θ − m1(θ_tilde)
        let back = out.strict.plus(&m1_prenat(&out.tilde));
        for k in 0..=3 {
            for w in theta.from.source.quiver.words(k) {
                if k == 0 {
                    assert_eq!(back.theta0(0), theta.theta0(0));
                } else {
                    assert_eq!(back.comp(&w), theta.comp(&w), "seed {seed}");
                }
            }
        }
        let again = strictify_nat(&out.strict.plus(&Prenat::zero(theta.from.clone(), theta.to.clone(), 0, 4)), 3);
        if out.strict.max_arity >= 4 {
            assert!(again.unwrap().tilde.is_zero());
        }
    }
}

#[test]
fn strict_natural_transformations_have_zero_correction() {
    let a = end_k(Ring::Q, 6);
    let f = Functor::identity(a.clone());
    let units = find_strict_units(&a).unwrap().unwrap();
    let id = Prenat::identity(f, &units).unwrap();
    let out = strictify_nat(&id, 4).unwrap();
    assert!(out.tilde.is_zero());
    assert_eq!(out.strict, id);
}

#[test]
fn non_natural_input_is_refused() {
    let a = end_k(Ring::Q, 6);
    let f = Functor::identity(a.clone());
    let e01 = a.quiver.letter_by_name(0, 0, "e01").unwrap();
    let theta = Prenat::new(f.clone(), f, -1, 5, BTreeMap::from([(0, Lin::basis(Ring::Q, e01))]), Table::new()).unwrap();
    assert_eq!(strictify_nat(&theta, 3).unwrap_err().code(), "NotNatural");
}

#[test]
fn homotopies_become_weak_equivalences() {
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = end_k(f5(), 5);
        let f = Functor::identity(a.clone()).with_max_arity(4);
        let theta = random_homotopy(&mut rng, &f, 4, 0.4);
        let (g, th) = perturb_by_homotopy(&f, &theta).unwrap();
        assert!(check_functor(&g, 4).ok());
        let weak = homotopy_to_weak_equiv(&th).unwrap();
        assert!(check_natural(&weak, 4).ok(), "seed {seed}");
    }
}

#[test]
fn zero_homotopy_gives_the_identity_transformation() {
    let a = end_k(Ring::Q, 5);
    let f = Functor::identity(a.clone());
    let weak = homotopy_to_weak_equiv(&Prenat::zero(f.clone(), f, 0, 4)).unwrap();
    assert_eq!(weak.theta0(0), endomorphism_unit(&a, 2));
    assert!(weak.comps().is_empty());
    assert!(check_natural(&weak, 4).ok());
}

#[test]
fn corrupted_homotopy_is_named() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = end_k(Ring::Q, 5);
    let f = Functor::identity(a.clone()).with_max_arity(4);
    let theta = random_homotopy(&mut rng, &f, 3, 0.5);
    let (g, th) = perturb_by_homotopy(&f, &theta).unwrap();
    let mut table = g.comps().clone();
    let e = |n: &str| a.quiver.letter_by_name(0, 0, n).unwrap();
    let w = vec![e("e00"), e("e00")];
    let extra = Lin::basis(Ring::Q, e("e01"));
    let v = table.get(&w).cloned().unwrap_or_else(|| Lin::zero(Ring::Q)).plus(&extra);
    table.insert(w, v);
    let bad = Functor::new(a.clone(), a, vec![0], g.max_arity, table).unwrap();
    let err = homotopy_to_weak_equiv(&th.retarget(f, bad).unwrap()).unwrap_err();
    assert_eq!(err.code(), "NotAHomotopy");
    assert!(err.to_string().contains("arity 2"), "{err}");
    assert!(check_homotopy(&th, 4).unwrap().ok());
}
