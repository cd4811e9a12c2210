mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use ainfty_cert::tamper;
use ainfty_coeff::{Ring, Scalar, SparseMatrix};
use ainfty_core::ainfty::{find_strict_units, AInfty, SplitUnitWitness};
use ainfty_core::barcobar::{CobarPair, Part};
use ainfty_core::contraction::{
    ab_certificate, comparison_maps, contraction_r, eta_certificate, eta_quasi_iso_report, eta_quotient_certificate,
    filtered_contraction, from_subcomplexes, functor_n, functor_n_check, r_matrix, v_piece, xi_matrix, FilteredComplex,
};
use ainfty_core::samples::{dual_numbers, endomorphism_dg, ground, m3_example, Complex};
use common::f5;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair(ring: Ring, bound: usize) -> CobarPair {
    let a = dual_numbers(ring, 4).unwrap();
    let b = endomorphism_dg(ring, &Complex::contractible(), 4).unwrap();
    CobarPair::new(a, b, bound).unwrap()
}

fn s(ring: Ring, x: i64) -> Scalar {
    Scalar::from_i64(ring, x)
}

fn matrix(ring: Ring, rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> SparseMatrix {
    let mut m = SparseMatrix::zero(ring, rows, cols);
    for &(i, j, x) in entries {
        m.set(i, j, s(ring, x));
    }
    m
}

fn is_id_minus(lhs: &SparseMatrix, xi: &SparseMatrix) -> bool {
    let id = SparseMatrix::identity(lhs.ring(), lhs.rows());
    lhs.sub(&id.sub(xi)).is_zero()
}

#[test]
fn r_is_a_homotopy_on_small_bidegrees() {
    for p in [pair(f5(), 4), pair(f5(), 4).swapped()] {
        for total in 1..=4usize {
            for m in 0..=total {
                let n = total - m;
                let (b, d) = v_piece(&p, (0, 0), (0, 0), m, n).unwrap();
                if b.is_empty() {
                    continue;
                }
                let r = r_matrix(p.ring, &b).unwrap();
                let xi = xi_matrix(p.ring, &b).unwrap();
                assert!(is_id_minus(&d.mul(&r).add(&r.mul(&d)), &xi), "V_({m},{n}) of {}", p.a.quiver.name(&p.a.quiver.all_letters()[0]));
            }
        }
    }
}

#[test]
fn r_rejects_the_empty_bidegree() {
    let p = pair(f5(), 2);
    let empty = ainfty_core::barcobar::CobarWord::new((0, 0), Vec::new());
    assert_eq!(contraction_r(p.ring, &empty).unwrap_err().code(), "OutOfScopeBidegree");
}

#[test]
fn comparison_maps_retract() {
    for ring in [f5(), Ring::Q, Ring::Z] {
        let c = comparison_maps(&pair(ring, 2), (0, 0), (0, 0)).unwrap();
        let id = SparseMatrix::identity(ring, c.tensor.len());
        assert!(c.pro11.mul(&c.inc11).sub(&id).is_zero());
        assert!(c.inc11.mul(&c.pro11).sub(&c.xi).is_zero());
        assert!(c.v11_d.mul(&c.inc11).sub(&c.inc11.mul(&c.tensor_d)).is_zero());
        assert!(c.tensor_d.mul(&c.pro11).sub(&c.pro11.mul(&c.v11_d)).is_zero());
        assert!(is_id_minus(&c.v11_d.mul(&c.r).add(&c.r.mul(&c.v11_d)), &c.xi));
    }
}

// x in level 1, a → b + x with a, b in level 2
fn cone_over_point(ring: Ring) -> FilteredComplex {
    FilteredComplex::new(vec![1, 0, 1], matrix(ring, 3, 3, &[(2, 1, 1), (0, 1, 1)]), vec![1, 2, 2]).unwrap()
}

#[test]
fn filtered_cone_contracts_to_first_level() {
    let ring = Ring::Z;
    let fc = cone_over_point(ring);
    let gr = BTreeMap::from([(2, matrix(ring, 2, 2, &[(0, 1, 1)]))]);
    let out = filtered_contraction(&fc, &gr).unwrap();
    out.certificate.verify().unwrap();
    assert_eq!(out.first_level, vec![0]);
    assert_eq!(out.certificate.p, matrix(ring, 1, 3, &[(0, 0, 1), (0, 2, -1)]));
    assert_eq!(out.stages.len(), 2);
    assert_eq!(out.stages[1].columns, vec![0, 1, 2]);
}

#[test]
fn direct_sum_with_a_constant_piece() {
    // K in level 1 plus an isolated cone in level 3; level 2 is empty
    let ring = Ring::Q;
    let fc = FilteredComplex::new(vec![0, 2, 3], matrix(ring, 3, 3, &[(2, 1, 1)]), vec![1, 3, 3]).unwrap();
    let gr = BTreeMap::from([(3, matrix(ring, 2, 2, &[(0, 1, 1)]))]);
    let out = filtered_contraction(&fc, &gr).unwrap();
    assert_eq!(out.certificate.small.rank(), 1);
    assert_eq!(out.stages.len(), 3);
}

#[test]
fn bad_graded_homotopies_are_named() {
    let ring = Ring::Q;
    let fc = cone_over_point(ring);
    let missing = filtered_contraction(&fc, &BTreeMap::new()).unwrap_err();
    assert_eq!(missing.code(), "BadGrHomotopy");
    let wrong = BTreeMap::from([(2, matrix(ring, 2, 2, &[(0, 1, 2)]))]);
    let err = filtered_contraction(&fc, &wrong).unwrap_err();
    assert!(matches!(err, ainfty_core::CoreError::BadGrHomotopy { level: 2, .. }), "{err}");
    let degree = BTreeMap::from([(2, matrix(ring, 2, 2, &[(1, 0, 1)]))]);
    assert_eq!(filtered_contraction(&fc, &degree).unwrap_err().code(), "BadGrHomotopy");
    let shape = BTreeMap::from([(2, matrix(ring, 1, 1, &[]))]);
    assert_eq!(filtered_contraction(&fc, &shape).unwrap_err().code(), "BadGrHomotopy");
}

#[test]
fn filtration_must_be_preserved() {
    let ring = Ring::Q;
    let err = FilteredComplex::new(vec![0, 1], matrix(ring, 2, 2, &[(1, 0, 1)]), vec![1, 2]).unwrap_err();
    assert_eq!(err.code(), "SchemaError");
}

// a (degree 0) ↦ 2b: F_1 = span(a, 2b) is a subcomplex whose inclusion is a quasi-isomorphism
// over Z, but it is not a direct summand.
fn two_fold(ring: Ring) -> (Vec<i64>, SparseMatrix, Vec<Vec<Vec<Scalar>>>) {
    let d = matrix(ring, 2, 2, &[(1, 0, 2)]);
    let f1 = vec![vec![s(ring, 1), s(ring, 0)], vec![s(ring, 0), s(ring, 2)]];
    let f2 = vec![vec![s(ring, 1), s(ring, 0)], vec![s(ring, 0), s(ring, 1)]];
    (vec![0, 1], d, vec![f1, f2])
}

#[test]
fn non_split_filtration_over_z_is_reported() {
    let (deg, d, gens) = two_fold(Ring::Z);
    assert_eq!(from_subcomplexes(deg, d, &gens).unwrap_err().code(), "SplittingMissing");
    let (deg, d, gens) = two_fold(Ring::Q);
    let adapted = from_subcomplexes(deg, d, &gens).unwrap();
    assert_eq!(adapted.complex.levels, vec![1, 1]);
}

#[test]
fn functor_n_is_a_chain_map_restricting_to_the_comparison() {
    let p = pair(f5(), 3);
    let report = functor_n_check(&p, (0, 0), (0, 0)).unwrap();
    assert!(report.ok(), "{report:?}");
    report.certificate.verify().unwrap();
    let e = p.a.quiver.letter_by_name(0, 0, "e").unwrap();
    let w = ainfty_core::barcobar::CobarWord::new((0, 0), vec![ainfty_core::barcobar::Factor::a(vec![e, e])]);
    assert!(functor_n(&p, &w).unwrap().is_zero());
}

#[test]
fn functor_n_needs_dg_inputs() {
    let a = m3_example(Ring::Q, 4).unwrap();
    let p = CobarPair::new(a, ground(Ring::Q, 4).unwrap(), 3).unwrap();
    let w = p.basis((0, 0), (0, 0), 1, |_| true).elems[0].clone();
    assert_eq!(functor_n(&p, &w).unwrap_err().code(), "NotDg");
}

#[test]
fn two_variable_certificate_over_z() {
    let p = pair(Ring::Z, 3);
    let cert = ab_certificate(&p, (0, 0), (0, 0)).unwrap();
    let v = cert.verify().unwrap();
    // aug adjoins a new identity beside the letter 1: 3·5 − 1
    assert_eq!(v.small_rank, 14);
    assert!(tamper(&cert).verify().is_err());
}

#[test]
fn eta_certificate_for_dual_numbers() {
    let d = dual_numbers(Ring::Q, 4).unwrap();
    let cert = eta_certificate(&d, 4).unwrap();
    let v = cert.verify().unwrap();
    assert_eq!(v.small_rank, 2);
    assert_eq!(cert.truncation.word_bound, Some(4));
    let bad = tamper(&cert);
    assert_eq!(bad.verify().unwrap_err().identity(), Some(ainfty_cert::Identity::Homotopy));
}

fn canonical(a: &AInfty) -> SplitUnitWitness {
    SplitUnitWitness::canonical(&find_strict_units(a).unwrap().unwrap()).unwrap()
}

#[test]
fn eta_into_the_strict_quotient_over_z() {
    let d = dual_numbers(Ring::Z, 4).unwrap();
    let cert = eta_quotient_certificate(&d, &canonical(&d), 4).unwrap();
    let v = cert.verify().unwrap();
    assert_eq!(v.small_rank, 2);
    assert_eq!(cert.small.degrees, vec![0, 0]);
}

#[test]
fn eta_quotient_for_an_endomorphism_algebra() {
    let a = endomorphism_dg(Ring::Q, &Complex::contractible(), 4).unwrap();
    let cert = eta_quotient_certificate(&a, &canonical(&a), 3).unwrap();
    assert_eq!(cert.verify().unwrap().small_rank, 4);
}

#[test]
fn quasi_iso_report_without_a_witness() {
    let d = dual_numbers(Ring::Z, 4).unwrap();
    let report = eta_quasi_iso_report(&d, 3).unwrap();
    assert!(report.agrees(), "{report:?}");
    assert_eq!(report.pairs[0].small[&0].rank, 2);
}

#[test]
fn graded_and_full_differentials_agree_on_the_first_level() {
    let p = pair(Ring::Q, 2);
    for c in p.basis((0, 0), (0, 0), 1, |_| true).elems {
        assert_eq!(p.d(&c, Part::Full), p.d(&c, Part::Graded));
    }
}

// A block complex: level 1 is arbitrary, higher levels are sums of cones, mixed by a unipotent
// filtration-preserving change of basis.
fn random_filtered(rng: &mut ChaCha8Rng, ring: Ring) -> (FilteredComplex, BTreeMap<usize, SparseMatrix>) {
    let mut degrees = Vec::new();
    let mut levels = Vec::new();
    let mut entries = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let deg = rng.gen_range(-1..=1);
        degrees.push(deg);
        levels.push(1);
    }
    let top = rng.gen_range(2..=4);
    for level in 2..=top {
        for _ in 0..rng.gen_range(0..=2) {
            let deg = rng.gen_range(-1..=1);
            let a = degrees.len();
            degrees.extend([deg, deg + 1]);
            levels.extend([level, level]);
            entries.push((a + 1, a, if rng.gen_bool(0.5) { 1 } else { -1 }));
        }
    }
    let n = degrees.len();
    let d = matrix(ring, n, n, &entries);
    let mut t = SparseMatrix::identity(ring, n);
    for i in 0..n {
        for j in 0..n {
            if levels[i] < levels[j] && degrees[i] == degrees[j] && rng.gen_bool(0.5) {
                t.set(i, j, s(ring, rng.gen_range(-2..=2)));
            }
        }
    }
    let ti = ainfty_coeff::inverse(&t).unwrap();
    let fc = FilteredComplex::new(degrees, t.mul(&d).mul(&ti), levels).unwrap();
    let mut gr = BTreeMap::new();
    for level in 2..=top {
        let idx = fc.indices(|l| l == level);
        let piece = fc.d.select(&idx, &idx);
        let mut h = SparseMatrix::zero(ring, idx.len(), idx.len());
        for (i, j, x) in piece.entries() {
            h.set(j, i, x.inv().unwrap());
        }
        gr.insert(level, h);
    }
    (fc, gr)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_filtered_complexes_contract(seed in any::<u64>(), field in any::<bool>()) {
        let ring = if field { Ring::Q } else { Ring::Z };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (fc, gr) = random_filtered(&mut rng, ring);
        let out = filtered_contraction(&fc, &gr).unwrap();
        prop_assert!(out.certificate.verify().is_ok());
        prop_assert_eq!(out.certificate.small.rank(), fc.indices(|l| l == 1).len());
        for st in &out.stages {
            prop_assert_eq!(st.p.cols(), st.columns.len());
        }
    }

    #[test]
    fn adapted_bases_recover_the_filtration(seed in any::<u64>(), field in any::<bool>()) {
        let ring = if field { Ring::Q } else { Ring::Z };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (fc, _) = random_filtered(&mut rng, ring);
        let n = fc.len();
        let unit = |j: usize| (0..n).map(|k| if k == j { ring.one() } else { ring.zero() }).collect::<Vec<_>>();
        let gens: Vec<Vec<Vec<Scalar>>> =
            (1..=fc.max_level()).map(|l| fc.indices(|x| x <= l).into_iter().map(unit).collect()).collect();
        let adapted = from_subcomplexes(fc.degrees.clone(), fc.d.clone(), &gens).unwrap();
        let mut want = fc.levels.clone();
        let mut got = adapted.complex.levels.clone();
        want.sort();
        got.sort();
        prop_assert_eq!(got, want);
        let back = adapted.basis.mul(&adapted.complex.d).mul(&adapted.inverse);
        prop_assert!(back.sub(&fc.d).is_zero());
    }
}

#[test]
fn eta_certificate_for_an_endomorphism_algebra() {
    let a: Arc<AInfty> = endomorphism_dg(Ring::Q, &Complex::contractible(), 3).unwrap();
    let cert = eta_certificate(&a, 3).unwrap();
    assert_eq!(cert.verify().unwrap().small_rank, 4);
}
