use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{CoeffError, Result};

/// Coefficient ring. Serialized as `{"ring":"Fp","p":5}`, `{"ring":"Q"}` or `{"ring":"Z"}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "ring")]
pub enum Ring {
    Fp { p: u64 },
    Q,
    Z,
}

impl Ring {
    pub fn fp(p: u64) -> Result<Ring> {
        if !is_prime(p) || p >= 1 << 32 {
            return Err(CoeffError::NotPrime(p));
        }
        Ok(Ring::Fp { p })
    }

    pub fn is_field(self) -> bool {
        !matches!(self, Ring::Z)
    }

    pub fn zero(self) -> Scalar {
        Scalar::from_i64(self, 0)
    }

    pub fn one(self) -> Scalar {
        Scalar::from_i64(self, 1)
    }

    /// `(-1)^parity`.
    pub fn sign(self, parity: i64) -> Scalar {
        Scalar::from_i64(self, if parity.rem_euclid(2) == 0 { 1 } else { -1 })
    }

    pub fn check_prime(self) -> Result<()> {
        match self {
            Ring::Fp { p } if !is_prime(p) => Err(CoeffError::NotPrime(p)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Fp { p } => write!(f, "F{p}"),
            Ring::Q => write!(f, "Q"),
            Ring::Z => write!(f, "Z"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A ring element in canonical form: residue in `[0,p)`, reduced fraction, or integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Fp { v: u64, p: u64 },
    Q(BigRational),
    Z(BigInt),
}

impl Scalar {
    pub fn from_i64(ring: Ring, n: i64) -> Scalar {
        match ring {
            Ring::Fp { p } => Scalar::Fp { v: n.rem_euclid(p as i64) as u64, p },
            Ring::Q => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            Ring::Z => Scalar::Z(BigInt::from(n)),
        }
    }

    pub fn from_bigint(ring: Ring, n: &BigInt) -> Scalar {
        match ring {
            Ring::Fp { p } => {
                let r = n.mod_floor(&BigInt::from(p));
                Scalar::Fp { v: r.to_u64().unwrap(), p }
            }
            Ring::Q => Scalar::Q(BigRational::from_integer(n.clone())),
            Ring::Z => Scalar::Z(n.clone()),
        }
    }

    pub fn ring(&self) -> Ring {
        match self {
            Scalar::Fp { p, .. } => Ring::Fp { p: *p },
            Scalar::Q(_) => Ring::Q,
            Scalar::Z(_) => Ring::Z,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fp { v, .. } => *v == 0,
            Scalar::Q(q) => q.is_zero(),
            Scalar::Z(z) => z.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Fp { v, .. } => *v == 1,
            Scalar::Q(q) => q.is_one(),
            Scalar::Z(z) => z.is_one(),
        }
    }

    /// Whether the element is a unit of its ring.
    pub fn is_unit(&self) -> bool {
        match self {
            Scalar::Z(z) => z.abs().is_one(),
            _ => !self.is_zero(),
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        Ok(match (self, other) {
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) if p == q => {
                Scalar::Fp { v: (a + b) % p, p: *p }
            }
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Z(a), Scalar::Z(b)) => Scalar::Z(a + b),
            _ => return Err(CoeffError::RingMismatch(self.ring(), other.ring())),
        })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        Ok(match (self, other) {
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) if p == q => {
                Scalar::Fp { v: (a * b) % p, p: *p }
            }
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Z(a), Scalar::Z(b)) => Scalar::Z(a * b),
            _ => return Err(CoeffError::RingMismatch(self.ring(), other.ring())),
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.try_add(&-other)
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Fp { v, p } if *v != 0 => Ok(Scalar::Fp { v: pow_mod(*v, p - 2, *p), p: *p }),
            Scalar::Q(q) if !q.is_zero() => Ok(Scalar::Q(q.recip())),
            Scalar::Z(z) if z.abs().is_one() => Ok(self.clone()),
            _ => Err(CoeffError::NotInvertible(format!("{self} in {}", self.ring()))),
        }
    }

    /// Exact quotient `self / other`, failing when it does not exist in the ring.
    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Z(a), Scalar::Z(b)) => {
                if b.is_zero() || !(a % b).is_zero() {
                    return Err(CoeffError::NotInvertible(format!("{b} does not divide {a}")));
                }
                Ok(Scalar::Z(a / b))
            }
            _ => self.try_mul(&other.inv()?),
        }
    }

    pub fn to_bigint(&self) -> Option<BigInt> {
        match self {
            Scalar::Fp { v, .. } => Some(BigInt::from(*v)),
            Scalar::Q(q) if q.is_integer() => Some(q.to_integer()),
            Scalar::Q(_) => None,
            Scalar::Z(z) => Some(z.clone()),
        }
    }

    /// Parse a coefficient string: integers, or `num/den` over Q.
    pub fn parse(ring: Ring, s: &str) -> Result<Scalar> {
        let err = || CoeffError::Parse(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (t, None),
        };
        let n: BigInt = num.parse().map_err(|_| err())?;
        let d: BigInt = match den {
            Some(d) => d.parse().map_err(|_| err())?,
            None => BigInt::one(),
        };
        if d.is_zero() {
            return Err(err());
        }
        match ring {
            Ring::Q => Ok(Scalar::Q(BigRational::new(n, d))),
            _ => Scalar::from_bigint(ring, &n).div(&Scalar::from_bigint(ring, &d)),
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp { v, .. } => write!(f, "{v}"),
            Scalar::Q(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Scalar::Z(z) => write!(f, "{z}"),
        }
    }
}

// Operator impls panic on a ring mismatch; the checked `try_*` methods report it instead.

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("ring mismatch")
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_sub(rhs).expect("ring mismatch")
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("ring mismatch")
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Fp { v, p } => Scalar::Fp { v: (p - v) % p, p: *p },
            Scalar::Q(q) => Scalar::Q(-q),
            Scalar::Z(z) => Scalar::Z(-z),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}
