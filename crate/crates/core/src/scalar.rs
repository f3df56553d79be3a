//! Exact scalars: rationals and prime fields.
//!
//! All arithmetic is exact; there are no tolerances anywhere in this crate.
//! A scalar is either a `BigRational` or an element of F_p for a prime `p`.
//! Mixing scalars from different fields is a programming error and panics;
//! field consistency is validated once at the I/O boundary.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;

/// The field a scalar or matrix lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldTag {
    Q,
    Fp(u64),
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Q => write!(f, "Q"),
            FieldTag::Fp(p) => write!(f, "F{}", p),
        }
    }
}

impl FieldTag {
    pub fn zero(&self) -> Scalar {
        match self {
            FieldTag::Q => Scalar::Q(BigRational::zero()),
            FieldTag::Fp(p) => Scalar::Fp { v: 0, p: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldTag::Q => Scalar::Q(BigRational::one()),
            FieldTag::Fp(p) => Scalar::Fp { v: 1, p: *p },
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldTag::Q => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            FieldTag::Fp(p) => Scalar::Fp {
                v: n.rem_euclid(*p as i64) as u64,
                p: *p,
            },
        }
    }
}

/// An element of an exact field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Q(BigRational),
    Fp { v: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> FieldTag {
        match self {
            Scalar::Q(_) => FieldTag::Q,
            Scalar::Fp { p, .. } => FieldTag::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) if p == q => Scalar::Fp {
                v: addmod(*a, *b, *p),
                p: *p,
            },
            _ => panic!("scalar field mismatch: {} vs {}", self.field(), rhs.field()),
        }
    }

    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { v, p } => Scalar::Fp {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            },
        }
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) if p == q => Scalar::Fp {
                v: mulmod(*a, *b, *p),
                p: *p,
            },
            _ => panic!("scalar field mismatch: {} vs {}", self.field(), rhs.field()),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Q(a) => {
                if a.is_zero() {
                    None
                } else {
                    Some(Scalar::Q(a.recip()))
                }
            }
            Scalar::Fp { v, p } => {
                if *v == 0 {
                    None
                } else {
                    Some(Scalar::Fp {
                        v: powmod(*v, p - 2, *p),
                        p: *p,
                    })
                }
            }
        }
    }

    pub fn div(&self, rhs: &Scalar) -> Option<Scalar> {
        rhs.inv().map(|i| self.mul(&i))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { v, .. } => write!(f, "{}", v),
        }
    }
}

fn addmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Primality by trial division; field moduli stay small in practice.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Parse a rational written as a decimal integer or `p/q` in lowest terms.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let numer: BigInt = n.trim().parse().ok()?;
        let denom: BigInt = d.trim().parse().ok()?;
        if denom.is_zero() {
            return None;
        }
        Some(BigRational::new(numer, denom))
    } else {
        let numer: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(numer))
    }
}

/// Render a rational as `n` or `p/q` in lowest terms.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Signum as -1, 0, 1.
pub fn rat_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_arithmetic() {
        let a = Scalar::Fp { v: 5, p: 7 };
        let b = Scalar::Fp { v: 4, p: 7 };
        assert_eq!(a.add(&b), Scalar::Fp { v: 2, p: 7 });
        assert_eq!(a.mul(&b), Scalar::Fp { v: 6, p: 7 });
        assert_eq!(a.inv().unwrap().mul(&a), Scalar::Fp { v: 1, p: 7 });
        assert!(FieldTag::Fp(7).zero().inv().is_none());
    }

    #[test]
    fn rational_parse_format() {
        let r = parse_rational("3/4").unwrap();
        assert_eq!(format_rational(&r), "3/4");
        let r = parse_rational("-6/4").unwrap();
        assert_eq!(format_rational(&r), "-3/2");
        let r = parse_rational("5").unwrap();
        assert_eq!(format_rational(&r), "5");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(7));
        assert!(is_prime(101));
        assert!(!is_prime(1));
        assert!(!is_prime(91));
    }
}
