//! Contraction certificates: a complex `C`, a complex `S`, and maps `i: S → C`, `p: C → S`,
//! `h: C → C` with `p∘i = id` and `id − i∘p = d∘h + h∘d`. Verification recomputes every identity
//! from the stored matrices and trusts nothing else.

use std::fmt;

use ainfty_coeff::{Ring, Scalar, SparseMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA: &str = "ainfty/1";

/// A finite complex: basis degrees and a differential of degree `+1` (column = image).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Complex {
    pub degrees: Vec<i64>,
    pub d: SparseMatrix,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

impl Complex {
    pub fn new(degrees: Vec<i64>, d: SparseMatrix) -> Self {
        Complex { degrees, d, labels: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }
}

/// What the certificate is claimed for.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity_bound: Option<usize>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub schema: String,
    pub kind: String,
    pub ring: Ring,
    /// Smallest and largest degree occurring in either complex.
    pub window: (i64, i64),
    pub big: Complex,
    pub small: Complex,
    pub i: SparseMatrix,
    pub p: SparseMatrix,
    pub h: SparseMatrix,
    /// Filtration level of each basis element of the big complex, when built from a filtration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<Vec<usize>>,
    pub truncation: Truncation,
}

/// The identities a certificate asserts, in the order they are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Identity {
    Shape,
    Degree,
    DSquared,
    IChainMap,
    PChainMap,
    Retraction,
    Homotopy,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Identity::Shape => "matrix shapes",
            Identity::Degree => "degrees of d, i, p, h",
            Identity::DSquared => "d∘d = 0",
            Identity::IChainMap => "d∘i = i∘d",
            Identity::PChainMap => "d∘p = p∘d",
            Identity::Retraction => "p∘i = id",
            Identity::Homotopy => "id − i∘p = d∘h + h∘d",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertError {
    #[error("{identity} fails at entry ({row}, {col})")]
    Violated { identity: Identity, row: usize, col: usize },
    #[error("{identity} fails: {detail}")]
    Malformed { identity: Identity, detail: String },
    #[error("unreadable certificate: {0}")]
    Parse(String),
}

impl CertError {
    pub fn identity(&self) -> Option<Identity> {
        match self {
            CertError::Violated { identity, .. } | CertError::Malformed { identity, .. } => Some(*identity),
            CertError::Parse(_) => None,
        }
    }
}

/// Summary of a successful verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verified {
    pub big_rank: usize,
    pub small_rank: usize,
    pub identities: Vec<Identity>,
}

fn first_nonzero(m: &SparseMatrix) -> Option<(usize, usize)> {
    m.entries().next().map(|(i, j, _)| (i, j))
}

fn expect_zero(identity: Identity, m: &SparseMatrix) -> Result<(), CertError> {
    match first_nonzero(m) {
        Some((row, col)) => Err(CertError::Violated { identity, row, col }),
        None => Ok(()),
    }
}

fn shape(m: &SparseMatrix, rows: usize, cols: usize, what: &str) -> Result<(), CertError> {
    if m.rows() != rows || m.cols() != cols {
        return Err(CertError::Malformed {
            identity: Identity::Shape,
            detail: format!("{what} is {}×{}, expected {rows}×{cols}", m.rows(), m.cols()),
        });
    }
    Ok(())
}

// every entry (row, col) must satisfy deg_row = deg_col + shift
fn degree(m: &SparseMatrix, rows: &[i64], cols: &[i64], shift: i64) -> Result<(), CertError> {
    for (i, j, _) in m.entries() {
        if rows[i] != cols[j] + shift {
            return Err(CertError::Violated { identity: Identity::Degree, row: i, col: j });
        }
    }
    Ok(())
}

impl ContractionCertificate {
    pub fn new(ring: Ring, big: Complex, small: Complex, i: SparseMatrix, p: SparseMatrix, h: SparseMatrix) -> Self {
        let all = big.degrees.iter().chain(&small.degrees);
        let window = (all.clone().copied().min().unwrap_or(0), all.copied().max().unwrap_or(0));
        ContractionCertificate {
            schema: SCHEMA.into(),
            kind: "contraction".into(),
            ring,
            window,
            big,
            small,
            i,
            p,
            h,
            filtration: None,
            truncation: Truncation::default(),
        }
    }

    /// Recompute every identity.
    pub fn verify(&self) -> Result<Verified, CertError> {
        let (n, s) = (self.big.rank(), self.small.rank());
        if self.kind != "contraction" {
            return Err(CertError::Malformed { identity: Identity::Shape, detail: format!("kind {:?}", self.kind) });
        }
        shape(&self.big.d, n, n, "big differential")?;
        shape(&self.small.d, s, s, "small differential")?;
        shape(&self.i, n, s, "i")?;
        shape(&self.p, s, n, "p")?;
        shape(&self.h, n, n, "h")?;
        if let Some(levels) = &self.filtration {
            if levels.len() != n {
                return Err(CertError::Malformed {
                    identity: Identity::Shape,
                    detail: format!("{} filtration levels for rank {n}", levels.len()),
                });
            }
        }
        for m in [&self.big.d, &self.small.d, &self.i, &self.p, &self.h] {
            if m.ring() != self.ring {
                return Err(CertError::Malformed {
                    identity: Identity::Shape,
                    detail: format!("matrix over {} in a certificate over {}", m.ring(), self.ring),
                });
            }
        }
        let (bd, sd) = (&self.big.degrees, &self.small.degrees);
        degree(&self.big.d, bd, bd, 1)?;
        degree(&self.small.d, sd, sd, 1)?;
        degree(&self.i, bd, sd, 0)?;
        degree(&self.p, sd, bd, 0)?;
        degree(&self.h, bd, bd, -1)?;
        expect_zero(Identity::DSquared, &self.big.d.mul(&self.big.d))?;
        expect_zero(Identity::DSquared, &self.small.d.mul(&self.small.d))?;
        expect_zero(Identity::IChainMap, &self.big.d.mul(&self.i).sub(&self.i.mul(&self.small.d)))?;
        expect_zero(Identity::PChainMap, &self.small.d.mul(&self.p).sub(&self.p.mul(&self.big.d)))?;
        let id_s = SparseMatrix::identity(self.ring, s);
        expect_zero(Identity::Retraction, &self.p.mul(&self.i).sub(&id_s))?;
        let id_n = SparseMatrix::identity(self.ring, n);
        let lhs = id_n.sub(&self.i.mul(&self.p));
        let rhs = self.big.d.mul(&self.h).add(&self.h.mul(&self.big.d));
        expect_zero(Identity::Homotopy, &lhs.sub(&rhs))?;
        Ok(Verified {
            big_rank: n,
            small_rank: s,
            identities: vec![
                Identity::Shape,
                Identity::Degree,
                Identity::DSquared,
                Identity::IChainMap,
                Identity::PChainMap,
                Identity::Retraction,
                Identity::Homotopy,
            ],
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CertError> {
        let c: ContractionCertificate = serde_json::from_str(s).map_err(|e| CertError::Parse(e.to_string()))?;
        if c.schema != SCHEMA {
            return Err(CertError::Parse(format!("unknown schema {:?}", c.schema)));
        }
        Ok(c)
    }
}

/// Block-diagonal sum of certificates over the same ring.
pub fn direct_sum(ring: Ring, parts: &[ContractionCertificate]) -> ContractionCertificate {
    let n: usize = parts.iter().map(|c| c.big.rank()).sum();
    let s: usize = parts.iter().map(|c| c.small.rank()).sum();
    let mut big_d = SparseMatrix::zero(ring, n, n);
    let mut small_d = SparseMatrix::zero(ring, s, s);
    let mut i = SparseMatrix::zero(ring, n, s);
    let mut p = SparseMatrix::zero(ring, s, n);
    let mut h = SparseMatrix::zero(ring, n, n);
    let (mut bd, mut sd, mut bl, mut sl) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut levels: Option<Vec<usize>> = Some(Vec::new());
    let (mut on, mut os) = (0, 0);
    let place = |target: &mut SparseMatrix, m: &SparseMatrix, r0: usize, c0: usize| {
        for (a, b, v) in m.entries() {
            target.set(r0 + a, c0 + b, v.clone());
        }
    };
    for c in parts {
        place(&mut big_d, &c.big.d, on, on);
        place(&mut small_d, &c.small.d, os, os);
        place(&mut i, &c.i, on, os);
        place(&mut p, &c.p, os, on);
        place(&mut h, &c.h, on, on);
        bd.extend_from_slice(&c.big.degrees);
        sd.extend_from_slice(&c.small.degrees);
        bl.extend(c.big.labels.iter().cloned());
        sl.extend(c.small.labels.iter().cloned());
        levels = match (levels, &c.filtration) {
            (Some(mut l), Some(x)) => {
                l.extend_from_slice(x);
                Some(l)
            }
            _ => None,
        };
        on += c.big.rank();
        os += c.small.rank();
    }
    let mut big = Complex::new(bd, big_d);
    let mut small = Complex::new(sd, small_d);
    if bl.len() == n {
        big.labels = bl;
    }
    if sl.len() == s {
        small.labels = sl;
    }
    let mut out = ContractionCertificate::new(ring, big, small, i, p, h);
    out.filtration = levels.filter(|l| l.len() == n);
    if let Some(first) = parts.first() {
        out.truncation = first.truncation.clone();
    }
    out
}

/// Flip one stored coefficient of `h` (or of `p` if `h` is zero), for tamper tests.
pub fn tamper(c: &ContractionCertificate) -> ContractionCertificate {
    let mut t = c.clone();
    let one = Scalar::from_i64(c.ring, 1);
    let target = if t.h.is_zero() { &mut t.p } else { &mut t.h };
    let (i, j) = first_nonzero(target).unwrap_or((0, 0));
    if target.rows() > 0 && target.cols() > 0 {
        let v = target.get(i, j);
        target.set(i, j, &v + &one);
    }
    t
}
