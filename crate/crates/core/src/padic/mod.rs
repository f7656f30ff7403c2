//! Fixed-precision p-adic numbers over `Q_p` and the totally ramified
//! cyclotomic extensions `Q_p(zeta_{p^t})`.
//!
//! An element is stored as `p^shift * sum_j c_j pi^j` with `pi = zeta - 1`,
//! `0 <= j < e = phi(p^t)` and the `c_j` known modulo `p^rel`. Since
//! `v(pi) = 1/e`, the terms have pairwise distinct fractional valuations and
//! `v(x) = shift + min_j (v(c_j) + j/e)` with no cancellation.

mod hecke;
mod newton;

pub use hecke::{hecke_roots, HeckeRoots};
pub use newton::{newton_polygon, NewtonPolygon, Segment};

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::ring::{Ring, RootOfUnity, Valuation};

/// Default absolute precision.
pub const DEFAULT_PRECISION: i64 = 40;

#[derive(Clone, Debug)]
pub struct PadicElement {
    p: u64,
    level: u32,
    shift: i64,
    /// Empty for zero; otherwise `e` digits with at least one unit.
    digits: Vec<BigInt>,
    rel: i64,
}

impl PadicElement {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Absolute precision: the element is known modulo `p^precision`.
    pub fn precision(&self) -> i64 {
        self.shift + self.rel
    }

    pub fn valuation(&self) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinity;
        }
        let e = self.digits.len() as i64;
        let j0 = self
            .digits
            .iter()
            .position(|c| !c.is_zero() && !c.is_multiple_of(&BigInt::from(self.p)))
            .expect("normalized element has a unit digit") as i64;
        Valuation::Finite(Ratio::new(self.shift * e + j0, e))
    }

    /// For elements of `Q_p`: the integer or rational `p^shift * c_0` with
    /// `0 <= c_0 < p^rel`.
    pub fn to_rational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let c = BigRational::from_integer(self.digits[0].clone());
        c * arith::rat_pow(&arith::rat(self.p as i64), self.shift)
    }

    /// Digits `c_j` in the basis `p^shift pi^j`.
    pub fn digits(&self) -> &[BigInt] {
        &self.digits
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }
}

#[derive(Clone, Debug)]
pub struct PadicField {
    p: u64,
    level: u32,
    precision: i64,
    e: usize,
    /// Monic Eisenstein polynomial `Phi_{p^level}(1 + pi)`, low degree first.
    eis: Arc<Vec<BigInt>>,
}

impl PadicField {
    pub fn new(p: u64, precision: i64) -> Result<Self> {
        Self::cyclotomic(p, 0, precision)
    }

    /// `Q_p(zeta_{p^level})`; level 0 is `Q_p` itself.
    pub fn cyclotomic(p: u64, level: u32, precision: i64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        if precision < 1 {
            return Err(Error::Domain("precision must be positive".into()));
        }
        let e = if level == 0 { 1 } else { arith::euler_phi(arith::pow_u64(p, level)) as usize };
        let mut eis = vec![BigInt::zero(); e + 1];
        if level == 0 {
            // pi itself: the uniformizer is p, encoded by the relation pi = p.
            eis[0] = -BigInt::from(p);
            eis[1] = BigInt::one();
        } else {
            let step = arith::pow_u64(p, level - 1);
            for j in 0..p {
                let n = j * step;
                for (i, c) in eis.iter_mut().enumerate().take(n as usize + 1) {
                    *c += arith::binomial(n, i as u64);
                }
            }
        }
        Ok(PadicField { p, level, precision, e, eis: Arc::new(eis) })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn ramification(&self) -> usize {
        self.e
    }

    /// Same field at a different working precision.
    pub fn with_precision(&self, precision: i64) -> Self {
        PadicField { precision, ..self.clone() }
    }

    fn ppow(&self, k: i64) -> BigInt {
        num_traits::pow(BigInt::from(self.p), k.max(0) as usize)
    }

    pub fn zero_at(&self, precision: i64) -> PadicElement {
        PadicElement { p: self.p, level: self.level, shift: precision, digits: Vec::new(), rel: 0 }
    }

    /// Build a normalized element from digits that are only meaningful mod `p^rel`.
    fn make(&self, shift: i64, mut digits: Vec<BigInt>, rel: i64) -> PadicElement {
        let abs = shift + rel;
        if rel <= 0 {
            return self.zero_at(abs);
        }
        let m = self.ppow(rel);
        for c in digits.iter_mut() {
            *c = c.mod_floor(&m);
        }
        let min_v = digits.iter().filter(|c| !c.is_zero()).map(|c| arith::val_bigint(c, self.p) as i64).min();
        let Some(v) = min_v else {
            return self.zero_at(abs);
        };
        if v > 0 {
            let d = self.ppow(v);
            for c in digits.iter_mut() {
                *c = &*c / &d;
            }
        }
        PadicElement { p: self.p, level: self.level, shift: shift + v, digits, rel: rel - v }
    }

    fn check(&self, x: &PadicElement) {
        debug_assert!(
            x.p == self.p && x.level == self.level,
            "element of Q_{}(level {}) used in Q_{}(level {})",
            x.p,
            x.level,
            self.p,
            self.level
        );
    }

    /// Multiply two digit vectors modulo the Eisenstein polynomial and `p^rel`.
    fn poly_mul(&self, a: &[BigInt], b: &[BigInt], rel: i64) -> Vec<BigInt> {
        let e = self.e;
        let m = self.ppow(rel);
        if e == 1 {
            return vec![(&a[0] * &b[0]).mod_floor(&m)];
        }
        let mut prod = vec![BigInt::zero(); 2 * e - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        for d in (e..2 * e - 1).rev() {
            let c = std::mem::take(&mut prod[d]).mod_floor(&m);
            if c.is_zero() {
                continue;
            }
            for i in 0..e {
                if !self.eis[i].is_zero() {
                    prod[d - e + i] -= &c * &self.eis[i];
                }
            }
        }
        prod.truncate(e);
        for c in prod.iter_mut() {
            *c = c.mod_floor(&m);
        }
        prod
    }

    fn unit_digits(&self, c: BigInt) -> Vec<BigInt> {
        let mut d = vec![BigInt::zero(); self.e];
        d[0] = c;
        d
    }

    /// Teichmuller lift of `u mod p`, the unique `(p-1)`-th root of unity
    /// congruent to `u`.
    pub fn teichmuller(&self, u: u64) -> Result<PadicElement> {
        let x = teichmuller(u, self.p, self.precision)?;
        Ok(self.make(0, self.unit_digits(x), self.precision))
    }

    /// `zeta_{p^level}` is `1 + pi`.
    pub fn zeta_p_power(&self) -> PadicElement {
        let mut d = vec![BigInt::zero(); self.e];
        if self.level == 0 {
            d[0] = BigInt::one();
        } else {
            d[0] = BigInt::one();
            d[1] = BigInt::one();
        }
        self.make(0, d, self.precision)
    }

    /// The uniformizer `pi = zeta - 1` (or `p` over `Q_p`).
    pub fn uniformizer(&self) -> PadicElement {
        if self.level == 0 {
            return self.from_int(self.p as i64);
        }
        let mut d = vec![BigInt::zero(); self.e];
        d[1] = BigInt::one();
        self.make(0, d, self.precision)
    }

    fn inv_unit_digits(&self, c: &[BigInt], rel: i64) -> Result<Vec<BigInt>> {
        let m = self.ppow(rel);
        let c0inv = c[0].modinv(&m).ok_or_else(|| Error::Domain("leading digit of a unit is not invertible".into()))?;
        let mut y = self.unit_digits(c0inv);
        if self.e == 1 {
            return Ok(y);
        }
        let two = self.unit_digits(BigInt::from(2));
        let one = self.unit_digits(BigInt::one());
        // error valuation doubles from 1/e each step
        let steps = ((rel as f64 * self.e as f64).log2().ceil() as usize) + 2;
        for _ in 0..steps {
            let t = self.poly_mul(c, &y, rel);
            if t == one {
                return Ok(y);
            }
            let corr: Vec<BigInt> = two.iter().zip(&t).map(|(a, b)| a - b).collect();
            y = self.poly_mul(&y, &corr, rel);
        }
        let t = self.poly_mul(c, &y, rel);
        if t == one {
            Ok(y)
        } else {
            Err(Error::InsufficientPrecision("Newton inversion did not converge".into()))
        }
    }
}

/// Teichmuller lift of `u` modulo `p^precision`, as an integer in `[0, p^precision)`.
pub fn teichmuller(u: u64, p: u64, precision: i64) -> Result<BigInt> {
    if u % p == 0 {
        return Err(Error::Domain(format!("{u} is not a unit at {p}")));
    }
    let m = num_traits::pow(BigInt::from(p), precision as usize);
    let mut x = BigInt::from(u).mod_floor(&m);
    for _ in 0..=precision {
        let next = x.modpow(&BigInt::from(p), &m);
        if next == x {
            return Ok(x);
        }
        x = next;
    }
    Ok(x)
}

/// `v_p(x)` for a rational.
pub fn val_p(x: &BigRational, p: u64) -> Valuation {
    match arith::val_rational(x, p) {
        None => Valuation::Infinity,
        Some(v) => Valuation::int(v),
    }
}

/// The image of `exp(2 pi i k/m)` in `field` under the fixed embedding:
/// the prime-to-p part maps to Teichmuller lifts of powers of the smallest
/// primitive root, the p-power part to powers of `1 + pi`.
pub fn cyclotomic_embed(k: i64, m: u64, field: &PadicField) -> Result<PadicElement> {
    field.root_of_unity(RootOfUnity::new(k, m))
}

impl Ring for PadicField {
    type Elem = PadicElement;

    fn zero(&self) -> PadicElement {
        self.zero_at(self.precision)
    }

    fn one(&self) -> PadicElement {
        self.make(0, self.unit_digits(BigInt::one()), self.precision)
    }

    fn from_rational(&self, x: &BigRational) -> PadicElement {
        if x.is_zero() {
            return self.zero();
        }
        let vn = arith::val_bigint(x.numer(), self.p) as i64;
        let vd = arith::val_bigint(x.denom(), self.p) as i64;
        let v = vn - vd;
        let rel = self.precision - v;
        if rel <= 0 {
            return self.zero();
        }
        let m = self.ppow(rel);
        let n = x.numer() / self.ppow(vn);
        let d = x.denom() / self.ppow(vd);
        let dinv = d.mod_floor(&m).modinv(&m).expect("unit denominator");
        let c = (n * dinv).mod_floor(&m);
        self.make(v, self.unit_digits(c), rel)
    }

    fn add(&self, a: &PadicElement, b: &PadicElement) -> PadicElement {
        self.check(a);
        self.check(b);
        let abs = a.precision().min(b.precision());
        if a.is_zero() && b.is_zero() {
            return self.zero_at(abs);
        }
        let s = match (a.is_zero(), b.is_zero()) {
            (true, _) => b.shift,
            (_, true) => a.shift,
            _ => a.shift.min(b.shift),
        };
        let mut digits = vec![BigInt::zero(); self.e];
        for x in [a, b] {
            if x.is_zero() {
                continue;
            }
            let f = self.ppow(x.shift - s);
            for (d, c) in digits.iter_mut().zip(&x.digits) {
                *d += c * &f;
            }
        }
        self.make(s, digits, abs - s)
    }

    fn sub(&self, a: &PadicElement, b: &PadicElement) -> PadicElement {
        self.add(a, &self.neg(b))
    }

    fn neg(&self, a: &PadicElement) -> PadicElement {
        if a.is_zero() {
            return a.clone();
        }
        let digits = a.digits.iter().map(|c| -c).collect();
        self.make(a.shift, digits, a.rel)
    }

    fn mul(&self, a: &PadicElement, b: &PadicElement) -> PadicElement {
        self.check(a);
        self.check(b);
        match (a.is_zero(), b.is_zero()) {
            (true, true) => return self.zero_at(a.precision() + b.precision()),
            (true, false) => return self.zero_at(a.precision() + b.shift),
            (false, true) => return self.zero_at(b.precision() + a.shift),
            _ => {}
        }
        let rel = a.rel.min(b.rel);
        let digits = self.poly_mul(&a.digits, &b.digits, rel);
        self.make(a.shift + b.shift, digits, rel)
    }

    fn inv(&self, a: &PadicElement) -> Result<PadicElement> {
        if a.is_zero() {
            return Err(Error::Domain("inverse of a p-adic zero".into()));
        }
        if self.e == 1 {
            let m = self.ppow(a.rel);
            let c = a.digits[0].modinv(&m).expect("unit digit");
            return Ok(self.make(-a.shift, vec![c], a.rel));
        }
        let pb = BigInt::from(self.p);
        let j0 = a.digits.iter().position(|c| !c.is_multiple_of(&pb)).expect("unit digit");
        if j0 == 0 {
            let y = self.inv_unit_digits(&a.digits, a.rel)?;
            return Ok(self.make(-a.shift, y, a.rel));
        }
        // a * pi^(e - j0) = p * unit
        let mut pi_pow = vec![BigInt::zero(); self.e];
        pi_pow[0] = BigInt::one();
        let mut pi = vec![BigInt::zero(); self.e];
        pi[1] = BigInt::one();
        for _ in 0..(self.e - j0) {
            pi_pow = self.poly_mul(&pi_pow, &pi, a.rel + 1);
        }
        let b = self.poly_mul(&a.digits, &pi_pow, a.rel);
        let c: Vec<BigInt> = b.iter().map(|x| x / &pb).collect();
        let cinv = self.inv_unit_digits(&c, a.rel - 1)?;
        let y = self.poly_mul(&cinv, &pi_pow, a.rel - 1);
        Ok(self.make(-a.shift - 1, y, a.rel - 1))
    }

    fn is_zero(&self, a: &PadicElement) -> bool {
        a.is_zero()
    }

    fn root_of_unity(&self, z: RootOfUnity) -> Result<PadicElement> {
        let p = self.p;
        let m = z.order();
        let s = if m == 0 { 0 } else { arith::val_u64(m, p) };
        let ps = arith::pow_u64(p, s);
        let mp = m / ps;
        if (p - 1) % mp != 0 {
            return Err(Error::UnsupportedRootOfUnity {
                order: m,
                p,
                reason: format!("prime-to-p part {mp} does not divide p-1 (needs an unramified extension)"),
            });
        }
        if s > self.level {
            return Err(Error::UnsupportedRootOfUnity {
                order: m,
                p,
                reason: format!("needs Q_{p}(zeta_{ps}); working field has level {}", self.level),
            });
        }
        let k = z.num();
        let a = if mp == 1 { 0 } else { k % mp * arith::mod_inv(ps % mp, mp).unwrap() % mp };
        let b = if ps == 1 { 0 } else { k % ps * arith::mod_inv(mp % ps, ps).unwrap() % ps };
        let g = arith::primitive_root(p);
        let w = arith::mod_pow(g, (p - 1) / mp * a, p);
        let omega = self.teichmuller(w)?;
        if b == 0 {
            return Ok(omega);
        }
        let zeta = self.pow(&self.zeta_p_power(), b * arith::pow_u64(p, self.level - s));
        Ok(self.mul(&omega, &zeta))
    }

    fn valuation(&self, a: &PadicElement, p: u64) -> Result<Valuation> {
        if p != self.p {
            return Err(Error::RingMismatch(format!("{p}-adic valuation requested in a {}-adic field", self.p)));
        }
        Ok(a.valuation())
    }

    fn tag(&self) -> String {
        format!("Q_{}(zeta_{}^{})@{}", self.p, self.p, self.level, self.precision)
    }

    fn same_ring(&self, other: &Self) -> bool {
        self.p == other.p && self.level == other.level
    }
}

/// `p^shift * m + O(p^precision)`, with `m` the balanced representative so
/// that small negative integers read as themselves.
pub fn approx_string(x: &PadicElement) -> String {
    if x.is_zero() {
        return format!("O({}^{})", x.p, x.precision());
    }
    if x.digits.len() == 1 {
        let modulus = BigInt::from(x.p).pow(x.rel as u32);
        let c = &x.digits[0];
        let m = if c * 2 > modulus { c - &modulus } else { c.clone() };
        return format!("{}^{} * {} + O({}^{})", x.p, x.shift, m, x.p, x.precision());
    }
    format!("{}^{} * {:?} + O({}^{})", x.p, x.shift, x.digits, x.p, x.precision())
}

/// Largest `k` with `|x - y| <= p^-k`, i.e. the number of agreeing digits.
pub fn agreement(field: &PadicField, x: &PadicElement, y: &PadicElement) -> Valuation {
    field.sub(x, y).valuation()
}
