//! Exact scalars over ℚ or a prime field.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Moduli are kept below 2^31 so products of residues fit in a `u64`.
const MAX_PRIME: u64 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rationals,
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not a supported prime modulus")));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Q(BigRational::zero()),
            Field::Prime(p) => Scalar::Fp { r: 0, p },
        }
    }

    pub fn one(self) -> Scalar {
        self.int(1)
    }

    pub fn int(self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Fp { r: n.rem_euclid(p as i64) as u64, p },
        }
    }

    /// `(-1)^e` as a scalar.
    pub fn sign(self, e: i64) -> Scalar {
        if e.rem_euclid(2) == 0 {
            self.one()
        } else {
            self.int(-1)
        }
    }

    pub fn ratio(self, num: i64, den: i64) -> Result<Scalar> {
        let d = self.int(den);
        let inv = d.inv().ok_or_else(|| Error::Scalar {
            text: format!("{num}/{den}"),
            reason: "zero denominator in this field".into(),
        })?;
        Ok(&self.int(num) * &inv)
    }

    pub fn parse_scalar(self, text: &str) -> Result<Scalar> {
        let bad = |reason: &str| Error::Scalar { text: text.to_string(), reason: reason.to_string() };
        let t = text.trim();
        match self {
            Field::Rationals => {
                if t.contains("mod") {
                    return Err(bad("prime-field residue in a rational document"));
                }
                let q = parse_rational(t).ok_or_else(|| bad("expected a/b"))?;
                Ok(Scalar::Q(q))
            }
            Field::Prime(p) => {
                if let Some((r, m)) = t.split_once("mod") {
                    let m: u64 = m.trim().parse().map_err(|_| bad("bad modulus"))?;
                    if m != p {
                        return Err(bad("modulus differs from the document field"));
                    }
                    let r: BigInt = r.trim().parse().map_err(|_| bad("bad residue"))?;
                    Ok(Scalar::Fp { r: reduce_mod(&r, p), p })
                } else {
                    let q = parse_rational(t).ok_or_else(|| bad("expected r mod p"))?;
                    let num = reduce_mod(q.numer(), p);
                    let den = reduce_mod(q.denom(), p);
                    if den == 0 {
                        return Err(bad("denominator vanishes mod p"));
                    }
                    Ok(&Scalar::Fp { r: num, p } * &Scalar::Fp { r: den, p }.inv().unwrap())
                }
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "q"),
            Field::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Field> {
        match s.trim() {
            "q" | "Q" => Ok(Field::Rationals),
            other => {
                let p = other
                    .strip_prefix("fp:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| Error::Invalid(format!("unknown field {other:?}; use q or fp:P")))?;
                Field::prime(p)
            }
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn parse_rational(t: &str) -> Option<BigRational> {
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (t.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

fn reduce_mod(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// An element of a [`Field`]. Mixing fields in arithmetic is a bug and panics;
/// public entry points check fields before doing arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { r: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rationals,
            Scalar::Fp { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp { r, .. } => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp { r, .. } => *r == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Q(q) => Scalar::Q(q.recip()),
            Scalar::Fp { r, p } => Scalar::Fp { r: pow_mod(*r, p - 2, *p), p: *p },
        })
    }

    /// Multiplies by `(-1)^e`.
    pub fn signed(self, e: i64) -> Scalar {
        if e.rem_euclid(2) == 0 {
            self
        } else {
            -self
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => {
                let q = q.reduced();
                write!(f, "{}/{}", q.numer(), q.denom())
            }
            Scalar::Fp { r, p } => write!(f, "{r} mod {p}"),
        }
    }
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar field mismatch: {} vs {}", a.field(), b.field())
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { r: a, p }, Scalar::Fp { r: b, p: q }) if p == q => Scalar::Fp { r: (a + b) % p, p: *p },
            _ => mismatch(self, rhs),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a - b),
            (Scalar::Fp { r: a, p }, Scalar::Fp { r: b, p: q }) if p == q => Scalar::Fp { r: (a + p - b) % p, p: *p },
            _ => mismatch(self, rhs),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { r: a, p }, Scalar::Fp { r: b, p: q }) if p == q => Scalar::Fp { r: a * b % p, p: *p },
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { r, p } => Scalar::Fp { r: (p - r) % p, p },
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => *a += b,
            (Scalar::Fp { r: a, p }, Scalar::Fp { r: b, p: q }) if *p == *q => *a = (*a + b) % *p,
            _ => mismatch(self, rhs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_print_in_lowest_terms() {
        let q = Field::Rationals;
        assert_eq!(q.ratio(6, -4).unwrap().to_string(), "-3/2");
        assert_eq!(q.int(0).to_string(), "0/1");
        assert_eq!(q.parse_scalar("10/4").unwrap(), q.ratio(5, 2).unwrap());
        assert_eq!(q.parse_scalar("7").unwrap(), q.int(7));
    }

    #[test]
    fn prime_field_residues() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.int(-1).to_string(), "6 mod 7");
        assert_eq!(f.parse_scalar("13 mod 7").unwrap(), f.int(6));
        assert!(f.parse_scalar("1 mod 5").is_err());
        assert_eq!(&f.int(3) * &f.int(3).inv().unwrap(), f.one());
        assert_eq!(f.parse_scalar("1/2").unwrap(), f.int(4));
    }

    #[test]
    fn rejects_composite_moduli() {
        assert!(Field::prime(91).is_err());
        assert!("fp:101".parse::<Field>().is_ok());
        assert!("fp:100".parse::<Field>().is_err());
    }

    #[test]
    fn signs() {
        let f = Field::prime(5).unwrap();
        assert_eq!(f.sign(3), f.int(-1));
        assert_eq!(f.sign(-2), f.one());
        assert_eq!(f.int(2).signed(1), f.int(3));
    }
}
