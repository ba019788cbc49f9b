//! Exact scalars: prime fields `F_p` and arbitrary-precision rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;
use crate::rng::Rng;
use crate::Result;

/// The base field of a computation. Arithmetic is exact in both cases.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Field {
    /// `F_p` for a prime `p < 2^31`; elements are least nonnegative residues.
    Prime(u64),
    /// `Q` with normalized fractions over arbitrary-precision integers.
    Rationals,
}

/// One exact scalar. The variant must match the field it is used with.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Scalar {
    Fp(u64),
    Rat(BigRational),
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

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::NotPrime { p });
        }
        Ok(Field::Prime(p))
    }

    pub fn is_prime_field(&self) -> bool {
        matches!(self, Field::Prime(_))
    }

    /// Number of elements for a prime field, `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Prime(p) => Some(*p),
            Field::Rationals => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Prime(_) => Scalar::Fp(0),
            Field::Rationals => Scalar::Rat(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Prime(_) => Scalar::Fp(1),
            Field::Rationals => Scalar::Rat(BigRational::one()),
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Prime(p) => {
                let p = *p as i64;
                Scalar::Fp(v.rem_euclid(p) as u64)
            }
            Field::Rationals => Scalar::Rat(BigRational::from(BigInt::from(v))),
        }
    }

    /// Parse an integer or an `a/b` fraction, reduced into the field.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s, None),
        };
        let n = BigInt::from_str(num).map_err(|_| Error::Document(format!("bad scalar `{s}`")))?;
        let d = match den {
            Some(b) => {
                BigInt::from_str(b).map_err(|_| Error::Document(format!("bad scalar `{s}`")))?
            }
            None => BigInt::one(),
        };
        if d.is_zero() {
            return Err(Error::Document(format!("zero denominator in `{s}`")));
        }
        match self {
            Field::Rationals => Ok(Scalar::Rat(BigRational::new(n, d))),
            Field::Prime(p) => {
                let p_big = BigInt::from(*p);
                let n_red = ((n % &p_big) + &p_big) % &p_big;
                let d_red = ((d % &p_big) + &p_big) % &p_big;
                let n_u = n_red.to_u64().unwrap();
                let d_u = d_red.to_u64().unwrap();
                if d_u == 0 {
                    return Err(Error::Document(format!(
                        "denominator of `{s}` vanishes mod {p}"
                    )));
                }
                let inv = mod_inverse(d_u, *p).expect("nonzero residue invertible");
                Ok(Scalar::Fp(n_u * inv % *p))
            }
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp((x + y) % p),
            (Field::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp((x + p - y) % p),
            (Field::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x - y),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp(x * y % p),
            (Field::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Field::Prime(p), Scalar::Fp(x)) => {
                if *x == 0 {
                    Scalar::Fp(0)
                } else {
                    Scalar::Fp(p - x)
                }
            }
            (Field::Rationals, Scalar::Rat(x)) => Scalar::Rat(-x),
            _ => panic!("scalar/field mismatch"),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        match (self, a) {
            (Field::Prime(p), Scalar::Fp(x)) => mod_inverse(*x, *p).map(Scalar::Fp),
            (Field::Rationals, Scalar::Rat(x)) => {
                if x.is_zero() {
                    None
                } else {
                    Some(Scalar::Rat(x.recip()))
                }
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// Uniform field element for `F_p`; small random integer for `Q`.
    pub fn random(&self, rng: &mut Rng) -> Scalar {
        match self {
            Field::Prime(p) => Scalar::Fp(rng.below(*p)),
            Field::Rationals => Scalar::Rat(BigRational::from(BigInt::from(rng.signed(4)))),
        }
    }
}

fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    if a == 0 {
        return None;
    }
    // extended Euclid on (a, p)
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "p prime, a nonzero");
    Some(t.rem_euclid(p as i64) as u64)
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fp(x) => *x == 0,
            Scalar::Rat(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Fp(x) => *x == 1,
            Scalar::Rat(x) => x.is_one(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp(x) => write!(f, "{x}"),
            Scalar::Rat(x) => {
                if x.denom().is_one() {
                    write!(f, "{}", x.numer())
                } else {
                    write!(f, "{}/{}", x.numer(), x.denom())
                }
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "F_{p}"),
            Field::Rationals => write!(f, "Q"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_validation() {
        assert!(Field::prime(2).is_ok());
        assert!(Field::prime(5).is_ok());
        assert!(Field::prime(2147483647).is_ok()); // 2^31 - 1
        assert!(Field::prime(1).is_err());
        assert!(Field::prime(4).is_err());
        assert!(Field::prime(1 << 31).is_err());
    }

    #[test]
    fn fp_arithmetic() {
        let f = Field::prime(5).unwrap();
        let a = f.from_i64(3);
        let b = f.from_i64(4);
        assert_eq!(f.add(&a, &b), f.from_i64(2));
        assert_eq!(f.mul(&a, &b), f.from_i64(2));
        assert_eq!(f.neg(&a), f.from_i64(2));
        assert_eq!(f.inv(&a), Some(f.from_i64(2)));
        assert_eq!(f.inv(&f.zero()), None);
        assert_eq!(f.from_i64(-7), f.from_i64(3));
    }

    #[test]
    fn rational_arithmetic() {
        let f = Field::Rationals;
        let half = f.parse("1/2").unwrap();
        let third = f.parse("1/3").unwrap();
        let sum = f.add(&half, &third);
        assert_eq!(sum, f.parse("5/6").unwrap());
        assert_eq!(f.mul(&half, &third), f.parse("1/6").unwrap());
        assert_eq!(f.inv(&half), Some(f.from_i64(2)));
    }

    #[test]
    fn parse_mod_p() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.parse("10").unwrap(), f.from_i64(3));
        assert_eq!(f.parse("-1").unwrap(), f.from_i64(6));
        // 1/2 = 4 mod 7
        assert_eq!(f.parse("1/2").unwrap(), f.from_i64(4));
        assert!(f.parse("1/7").is_err());
    }
}
