//! Coefficient rings. Algorithms are written against [`Ring`], a context object
//! that owns the arithmetic, so series code never needs to know whether it runs
//! over exact rationals, a cyclotomic field or a p-adic field.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};

/// A p-adic valuation: a rational number or `+infinity` for zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(Ratio<i64>),
    Infinity,
}

impl Valuation {
    pub fn int(v: i64) -> Self {
        Valuation::Finite(Ratio::from_integer(v))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinity)
    }

    pub fn finite(&self) -> Option<Ratio<i64>> {
        match self {
            Valuation::Finite(r) => Some(*r),
            Valuation::Infinity => None,
        }
    }

    pub fn shift(&self, by: Ratio<i64>) -> Self {
        match self {
            Valuation::Finite(r) => Valuation::Finite(r + by),
            Valuation::Infinity => Valuation::Infinity,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Valuation::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Valuation::Infinity => f64::INFINITY,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
            (Valuation::Infinity, _) => Ordering::Greater,
            (_, Valuation::Infinity) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Infinity => write!(f, "inf"),
            Valuation::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Valuation::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// An element `num/den` of `Q/Z`, i.e. the root of unity `exp(2 pi i num/den)` up to
/// the choice of embedding made by the target ring.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0);
        let n = arith::residue(num, den);
        let g = arith::gcd(n, den).max(1);
        if n == 0 {
            return RootOfUnity { num: 0, den: 1 };
        }
        RootOfUnity { num: n / g, den: den / g }
    }

    pub fn one() -> Self {
        RootOfUnity { num: 0, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    /// Exact multiplicative order.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn mul(&self, other: &Self) -> Self {
        let den = arith::lcm(self.den, other.den);
        let a = self.num * (den / self.den) + other.num * (den / other.den);
        RootOfUnity::new(a as i64, den)
    }

    pub fn inv(&self) -> Self {
        RootOfUnity::new(-(self.num as i64), self.den)
    }

    pub fn pow(&self, e: i64) -> Self {
        let n = (self.num as i128 * e as i128).rem_euclid(self.den as i128);
        RootOfUnity::new(n as i64, self.den)
    }
}

/// Ring context. Elements are plain values; all arithmetic goes through `&self`.
pub trait Ring: Clone + Debug + Send + Sync {
    type Elem: Clone + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_rational(&self, x: &BigRational) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn root_of_unity(&self, z: RootOfUnity) -> Result<Self::Elem>;
    /// Valuation at `p`, when the ring admits one.
    fn valuation(&self, a: &Self::Elem, p: u64) -> Result<Valuation>;
    /// Short tag used for mismatch diagnostics.
    fn tag(&self) -> String;

    fn same_ring(&self, other: &Self) -> bool {
        self.tag() == other.tag()
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_rational(&arith::rat(n))
    }

    fn from_bigint(&self, n: &BigInt) -> Self::Elem {
        self.from_rational(&BigRational::from_integer(n.clone()))
    }

    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.is_zero(&self.sub(a, b))
    }

    fn mul_add(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        *acc = self.add(acc, &self.mul(a, b));
    }

    fn add_assign(&self, acc: &mut Self::Elem, a: &Self::Elem) {
        *acc = self.add(acc, a);
    }

    fn scale_rational(&self, a: &Self::Elem, x: &BigRational) -> Self::Elem {
        self.mul(a, &self.from_rational(x))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// A character value: zero or a root of unity.
    fn char_value(&self, v: Option<RootOfUnity>) -> Result<Self::Elem> {
        match v {
            None => Ok(self.zero()),
            Some(z) => self.root_of_unity(z),
        }
    }
}

/// Exact rationals. Only the roots of unity `+1` and `-1` live here.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RationalField;

impl Ring for RationalField {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_rational(&self, x: &BigRational) -> BigRational {
        x.clone()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            Err(Error::Domain("inverse of zero".into()))
        } else {
            Ok(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn mul_add(&self, acc: &mut BigRational, a: &BigRational, b: &BigRational) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *acc += a * b;
    }
    fn add_assign(&self, acc: &mut BigRational, a: &BigRational) {
        *acc += a;
    }
    fn root_of_unity(&self, z: RootOfUnity) -> Result<BigRational> {
        match z.order() {
            1 => Ok(BigRational::one()),
            2 => Ok(-BigRational::one()),
            m => Err(Error::UnsupportedRootOfUnity {
                order: m,
                p: 0,
                reason: "the rational field only contains +1 and -1".into(),
            }),
        }
    }
    fn valuation(&self, a: &BigRational, p: u64) -> Result<Valuation> {
        Ok(match arith::val_rational(a, p) {
            None => Valuation::Infinity,
            Some(v) => Valuation::int(v),
        })
    }
    fn tag(&self) -> String {
        "Q".into()
    }
}

/// `true` when `x` is an integer with absolute value below `2^63`.
pub fn small_integer(x: &BigRational) -> Option<i64> {
    use num_traits::ToPrimitive;
    if x.denom().is_one() {
        x.numer().to_i64()
    } else {
        None
    }
}

/// Sign-aware parity helper used by several closed forms.
pub fn neg_one_pow(e: u64) -> BigRational {
    if e.is_even() {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

pub fn abs_rational(x: &BigRational) -> BigRational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_order() {
        let a = Valuation::Finite(Ratio::new(1, 2));
        assert!(a < Valuation::int(1));
        assert!(Valuation::int(40) < Valuation::Infinity);
        assert_eq!(a.to_string(), "1/2");
    }

    #[test]
    fn roots_of_unity_form_a_group() {
        let z = RootOfUnity::new(2, 6);
        assert_eq!(z.order(), 3);
        assert_eq!(z.mul(&z.inv()), RootOfUnity::one());
        assert_eq!(z.pow(3), RootOfUnity::one());
        assert_eq!(RootOfUnity::new(-1, 4), RootOfUnity::new(3, 4));
    }

    #[test]
    fn rational_roots_of_unity() {
        let q = RationalField;
        assert_eq!(q.root_of_unity(RootOfUnity::new(1, 2)).unwrap(), arith::rat(-1));
        assert!(matches!(q.root_of_unity(RootOfUnity::new(1, 3)), Err(Error::UnsupportedRootOfUnity { .. })));
    }
}
