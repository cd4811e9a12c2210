use ainfty_cert::{direct_sum, tamper, CertError, Complex, ContractionCertificate, Identity};
use ainfty_coeff::{Ring, Scalar, SparseMatrix};
use proptest::prelude::*;

// a → b with d(a) = b, contracted onto zero
fn cone(ring: Ring, deg: i64) -> ContractionCertificate {
    let d = SparseMatrix::from_dense(ring, &[vec![0, 0], vec![1, 0]]);
    let h = SparseMatrix::from_dense(ring, &[vec![0, 1], vec![0, 0]]);
    let big = Complex::new(vec![deg, deg + 1], d);
    let small = Complex::new(vec![], SparseMatrix::zero(ring, 0, 0));
    ContractionCertificate::new(ring, big, small, SparseMatrix::zero(ring, 2, 0), SparseMatrix::zero(ring, 0, 2), h)
}

// a single cycle retracting onto itself
fn point(ring: Ring, deg: i64) -> ContractionCertificate {
    let big = Complex::new(vec![deg], SparseMatrix::zero(ring, 1, 1));
    let small = Complex::new(vec![deg], SparseMatrix::zero(ring, 1, 1));
    let id = SparseMatrix::identity(ring, 1);
    ContractionCertificate::new(ring, big, small, id.clone(), id, SparseMatrix::zero(ring, 1, 1))
}

#[test]
fn cone_and_point_verify() {
    for ring in [Ring::Q, Ring::Z, Ring::Fp { p: 5 }] {
        assert!(cone(ring, 0).verify().is_ok());
        assert!(point(ring, 3).verify().is_ok());
        let sum = direct_sum(ring, &[cone(ring, -1), point(ring, 0), cone(ring, 2)]);
        let v = sum.verify().unwrap();
        assert_eq!((v.big_rank, v.small_rank), (5, 1));
        assert_eq!(sum.window, (-1, 3));
    }
}

#[test]
fn tampered_homotopy_is_named() {
    let c = direct_sum(Ring::Q, &[point(Ring::Q, 0), cone(Ring::Q, 0)]);
    let err = tamper(&c).verify().unwrap_err();
    assert_eq!(err.identity(), Some(Identity::Homotopy));
    assert!(err.to_string().contains("id − i∘p = d∘h + h∘d"));
}

#[test]
fn tampered_projection_is_named() {
    let c = point(Ring::Fp { p: 5 }, 0);
    let err = tamper(&c).verify().unwrap_err();
    assert_eq!(err, CertError::Violated { identity: Identity::Retraction, row: 0, col: 0 });
}

#[test]
fn degree_and_shape_errors() {
    let mut c = cone(Ring::Q, 0);
    c.big.degrees[1] = 2;
    assert_eq!(c.verify().unwrap_err().identity(), Some(Identity::Degree));
    let mut c = cone(Ring::Q, 0);
    c.h = SparseMatrix::zero(Ring::Q, 1, 2);
    assert_eq!(c.verify().unwrap_err().identity(), Some(Identity::Shape));
    let mut c = cone(Ring::Q, 0);
    c.h = SparseMatrix::zero(Ring::Fp { p: 3 }, 2, 2);
    assert_eq!(c.verify().unwrap_err().identity(), Some(Identity::Shape));
}

#[test]
fn non_chain_map_is_named() {
    // i picks a non-cycle
    let ring = Ring::Q;
    let mut c = direct_sum(ring, &[cone(ring, 0)]);
    c.small = Complex::new(vec![0], SparseMatrix::zero(ring, 1, 1));
    c.i = SparseMatrix::from_dense(ring, &[vec![1], vec![0]]);
    c.p = SparseMatrix::from_dense(ring, &[vec![1, 0]]);
    assert_eq!(c.verify().unwrap_err().identity(), Some(Identity::IChainMap));
}

#[test]
fn json_round_trip() {
    let mut c = direct_sum(Ring::Fp { p: 7 }, &[cone(Ring::Fp { p: 7 }, 1), point(Ring::Fp { p: 7 }, 0)]);
    c.filtration = Some(vec![1, 2, 1]);
    c.truncation.word_bound = Some(3);
    let s = c.to_json();
    assert!(s.contains("\"kind\": \"contraction\""));
    assert!(s.contains("\"schema\": \"ainfty/1\""));
    let back = ContractionCertificate::from_json(&s).unwrap();
    assert_eq!(back, c);
    assert!(back.verify().is_ok());
    let bad = s.replace("ainfty/1", "ainfty/0");
    assert!(matches!(ContractionCertificate::from_json(&bad), Err(CertError::Parse(_))));
}

fn scaled_cone(ring: Ring, deg: i64, c: i64) -> ContractionCertificate {
    // d(a) = c·b, h(b) = c⁻¹·a over Q
    let mut x = cone(ring, deg);
    let cs = Scalar::from_i64(ring, c);
    x.big.d = x.big.d.scale(&cs);
    let inv = match (&cs, ring) {
        (Scalar::Q(q), Ring::Q) => Scalar::Q(q.recip()),
        _ => unreachable!(),
    };
    x.h = x.h.scale(&inv);
    x
}

proptest! {
    #[test]
    fn direct_sums_of_valid_pieces_verify(pieces in proptest::collection::vec((0u8..2, -3i64..3, 1i64..6), 0..6)) {
        let parts: Vec<_> = pieces
            .iter()
            .map(|&(k, deg, c)| if k == 0 { scaled_cone(Ring::Q, deg, c) } else { point(Ring::Q, deg) })
            .collect();
        let sum = direct_sum(Ring::Q, &parts);
        prop_assert!(sum.verify().is_ok());
        if !sum.h.is_zero() {
            prop_assert_eq!(tamper(&sum).verify().unwrap_err().identity(), Some(Identity::Homotopy));
        }
    }
}
