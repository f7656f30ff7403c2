//! Exact arithmetic in `Q(zeta_n)`, power basis modulo the cyclotomic polynomial.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::ring::{Ring, RootOfUnity, Valuation};

/// `Phi_n` with integer coefficients, low degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in arith::divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = cyclotomic_polynomial(d);
        num = div_exact(&num, &phi_d);
    }
    num
}

fn div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let c = &rem[i + db] / lead;
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    q
}

#[derive(Clone, Debug)]
pub struct CyclotomicField {
    n: u64,
    phi: Arc<Vec<BigRational>>,
}

pub type CycloElem = Vec<BigRational>;

impl CyclotomicField {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        let phi = cyclotomic_polynomial(n).into_iter().map(BigRational::from_integer).collect();
        CyclotomicField { n, phi: Arc::new(phi) }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    fn reduce(&self, mut a: Vec<BigRational>) -> CycloElem {
        let d = self.degree();
        for i in (d..a.len()).rev() {
            let c = std::mem::take(&mut a[i]);
            if c.is_zero() {
                continue;
            }
            for j in 0..d {
                if !self.phi[j].is_zero() {
                    a[i - d + j] -= &c * &self.phi[j];
                }
            }
        }
        a.resize(d, BigRational::zero());
        a
    }

    /// `zeta_n^k`.
    pub fn zeta_pow(&self, k: i64) -> CycloElem {
        let e = arith::residue(k, self.n) as usize;
        let mut v = vec![BigRational::zero(); e.max(self.degree()) + 1];
        v[e] = BigRational::one();
        self.reduce(v)
    }

    /// Image under `zeta -> zeta^k`, `k` prime to `n`.
    pub fn galois(&self, a: &CycloElem, k: i64) -> CycloElem {
        let mut acc = self.zero();
        for (j, c) in a.iter().enumerate() {
            if !c.is_zero() {
                let z = self.zeta_pow(k * j as i64);
                for (t, zt) in acc.iter_mut().zip(z) {
                    *t += c * zt;
                }
            }
        }
        acc
    }

    /// Complex conjugation.
    pub fn conj(&self, a: &CycloElem) -> CycloElem {
        self.galois(a, -1)
    }

    /// The element as a rational, when it lies in `Q`.
    pub fn as_rational(&self, a: &CycloElem) -> Option<BigRational> {
        if a.iter().skip(1).all(|c| c.is_zero()) {
            Some(a[0].clone())
        } else {
            None
        }
    }

    fn poly_inv(&self, a: &CycloElem) -> Result<CycloElem> {
        // extended Euclid on (a, Phi_n) over Q
        let trim = |mut v: Vec<BigRational>| {
            while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
                v.pop();
            }
            v
        };
        let mut r0 = trim(self.phi.to_vec());
        let mut r1 = trim(a.clone());
        let mut s0: Vec<BigRational> = vec![BigRational::zero()];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while !(r1.len() == 1 && r1[0].is_zero()) {
            let (q, r) = poly_divmod(&r0, &r1);
            let qs = poly_mul(&q, &s1);
            let len = s0.len().max(qs.len());
            let mut ns = vec![BigRational::zero(); len];
            for (i, c) in s0.iter().enumerate() {
                ns[i] += c;
            }
            for (i, c) in qs.iter().enumerate() {
                ns[i] -= c;
            }
            r0 = std::mem::replace(&mut r1, trim(r));
            s0 = std::mem::replace(&mut s1, trim(ns));
        }
        if r0.len() != 1 {
            return Err(Error::Domain("element is not invertible".into()));
        }
        let c = r0[0].recip();
        let s: Vec<BigRational> = s0.into_iter().map(|x| x * &c).collect();
        Ok(self.reduce(s))
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    if a.len() < b.len() {
        return (vec![BigRational::zero()], rem);
    }
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let c = &rem[i + db] / &lead;
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    rem.truncate(db.max(1));
    (q, rem)
}

impl Ring for CyclotomicField {
    type Elem = CycloElem;

    fn zero(&self) -> CycloElem {
        vec![BigRational::zero(); self.degree()]
    }
    fn one(&self) -> CycloElem {
        self.from_rational(&BigRational::one())
    }
    fn from_rational(&self, x: &BigRational) -> CycloElem {
        let mut v = self.zero();
        v[0] = x.clone();
        v
    }
    fn add(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn sub(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }
    fn neg(&self, a: &CycloElem) -> CycloElem {
        a.iter().map(|x| -x).collect()
    }
    fn mul(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        self.reduce(poly_mul(a, b))
    }
    fn inv(&self, a: &CycloElem) -> Result<CycloElem> {
        if self.is_zero(a) {
            return Err(Error::Domain("inverse of zero".into()));
        }
        self.poly_inv(a)
    }
    fn is_zero(&self, a: &CycloElem) -> bool {
        a.iter().all(|c| c.is_zero())
    }
    fn root_of_unity(&self, z: RootOfUnity) -> Result<CycloElem> {
        if self.n % z.order() != 0 {
            return Err(Error::UnsupportedRootOfUnity {
                order: z.order(),
                p: 0,
                reason: format!("not contained in Q(zeta_{})", self.n),
            });
        }
        Ok(self.zeta_pow((z.num() * (self.n / z.order())) as i64))
    }
    fn valuation(&self, a: &CycloElem, p: u64) -> Result<Valuation> {
        match self.as_rational(a) {
            Some(x) => Ok(match arith::val_rational(&x, p) {
                None => Valuation::Infinity,
                Some(v) => Valuation::int(v),
            }),
            None => Err(Error::Domain(
                "p-adic valuation of an irrational cyclotomic number depends on the prime above p".into(),
            )),
        }
    }
    fn tag(&self) -> String {
        format!("Q(zeta_{})", self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        let ints = |v: Vec<BigInt>| v.into_iter().map(|c| i64::try_from(c).unwrap()).collect::<Vec<_>>();
        assert_eq!(ints(cyclotomic_polynomial(1)), vec![-1, 1]);
        assert_eq!(ints(cyclotomic_polynomial(6)), vec![1, -1, 1]);
        assert_eq!(ints(cyclotomic_polynomial(12)), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(105).len() - 1, 48);
    }

    #[test]
    fn roots_of_unity_and_inverses() {
        let k = CyclotomicField::new(12);
        let z = k.zeta_pow(1);
        assert!(k.equal(&k.pow(&z, 12), &k.one()));
        assert!(!k.equal(&k.pow(&z, 6), &k.one()));
        let x = k.add(&z, &k.from_int(3));
        let y = k.inv(&x).unwrap();
        assert!(k.equal(&k.mul(&x, &y), &k.one()));
        assert!(k.equal(&k.mul(&z, &k.conj(&z)), &k.one()));
    }
}
