//! Nearly holomorphic Eisenstein distributions `E_{r,l}((a)_nu)` and their
//! `b`-regularized versions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{self, rat, rat_pow};
use crate::bernoulli::bernoulli_polynomial;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::qexp::{FormMeta, Level, NearlyHolomorphicForm};
use crate::ring::{neg_one_pow, RationalField, Ring};

/// Which divisors enter the coefficient `sum_{d | n, d = a} sgn(d) d^(l-2r-1)`.
///
/// `Positive` sums over `0 < d`. `Signed` also counts the negative divisors
/// `-d` with `-d = a`, each weighted by `sgn(-d) (-d)^(l-2r-1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum DivisorConvention {
    #[default]
    Positive,
    Signed,
}

/// `zeta(-m, a, M) = sum_{0 < n = a mod M} n^m`, regularized:
/// `-M^m B_{m+1}(a/M) / (m+1)` with `a` taken in `(0, M]`.
pub fn partial_hurwitz_neg(m: u32, a: u64, modulus: u64) -> BigRational {
    let a = match a % modulus {
        0 => modulus,
        x => x,
    };
    let x = BigRational::new(BigInt::from(a), BigInt::from(modulus));
    let mm = num_traits::pow(rat(modulus as i64), m as usize);
    -mm * bernoulli_polynomial(m as usize + 1, &x) / rat(m as i64 + 1)
}

/// `W(y, alpha, -r) = sum_i (-1)^i C(r,i) Gamma(alpha)/Gamma(alpha-i) y^(r-i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhittakerPolynomial {
    pub alpha: i64,
    pub r: u32,
}

pub fn whittaker(alpha: i64, r: u32) -> WhittakerPolynomial {
    WhittakerPolynomial { alpha, r }
}

impl WhittakerPolynomial {
    /// Coefficient of `y^(r-i)`.
    pub fn layer_weight(&self, i: u32) -> BigRational {
        if i > self.r {
            return BigRational::zero();
        }
        let c = arith::binomial(self.r as u64, i as u64) * arith::gamma_ratio(self.alpha, i as u64);
        neg_one_pow(i as u64) * BigRational::from_integer(c)
    }

    /// Coefficients from `y^0` up to `y^r`.
    pub fn coefficients(&self) -> Vec<BigRational> {
        (0..=self.r).rev().map(|i| self.layer_weight(i)).collect()
    }

    pub fn eval(&self, y: &BigRational) -> BigRational {
        self.coefficients().iter().rev().fold(BigRational::zero(), |acc, c| acc * y + c)
    }
}

/// The family `a -> E_{r,l}((a)_nu)` on `(Z/N p^nu)^x`.
#[derive(Clone, Debug)]
pub struct EisensteinDistribution {
    pub r: u32,
    pub l: i64,
    pub n: u64,
    pub p: u64,
    pub nu: u32,
    pub convention: DivisorConvention,
}

impl EisensteinDistribution {
    pub fn new(r: u32, l: i64, n: u64, p: u64, nu: u32) -> Result<Self> {
        if l < 1 || r as i64 > l - 1 {
            return Err(Error::Domain(format!("need 0 <= r <= l-1, got r = {r}, l = {l}")));
        }
        if arith::gcd(n, p) != 1 {
            return Err(Error::Domain(format!("{p} divides the tame level {n}")));
        }
        Ok(EisensteinDistribution { r, l, n, p, nu, convention: DivisorConvention::Positive })
    }

    pub fn with_convention(mut self, c: DivisorConvention) -> Self {
        self.convention = c;
        self
    }

    pub fn modulus(&self) -> u64 {
        self.n * arith::pow_u64(self.p, self.nu)
    }

    /// Exponent `l - 2r - 1` of the divisor sums.
    pub fn divisor_exponent(&self) -> i64 {
        self.l - 2 * self.r as i64 - 1
    }

    pub fn whittaker(&self) -> WhittakerPolynomial {
        whittaker(self.l - self.r as i64, self.r)
    }

    fn unit(&self, a: u64) -> Result<u64> {
        let m = self.modulus();
        if arith::gcd(a, m) != 1 {
            return Err(Error::Domain(format!("{a} is not a unit modulo {m}")));
        }
        Ok(a % m)
    }

    /// `Gamma(l-r)/Gamma(l-2r) zeta(1-l+2r, a, M) / 2`, read as its limit at `l = 2r`.
    fn epsilon_core(&self, a: u64) -> BigRational {
        let (r, l) = (self.r as i64, self.l);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if l > 2 * r {
            let g = BigRational::from_integer(arith::gamma_ratio(l - r, r as u64));
            half * g * partial_hurwitz_neg((l - 2 * r - 1) as u32, a, self.modulus())
        } else if l == 2 * r {
            // Gamma(l+s)/Gamma(l+2s) * zeta(1-l-2s) -> Gamma(r) * (-1/M) as s -> -r
            let g = BigRational::from_integer(arith::factorial(r as u64 - 1));
            -half * g / rat(self.modulus() as i64)
        } else {
            BigRational::zero()
        }
    }

    /// Constant term; it sits in layer `r` with the sign of `(-4 pi y)^(-r)`.
    pub fn constant(&self, a: u64) -> Result<BigRational> {
        let a = self.unit(a)?;
        Ok(neg_one_pow(self.r as u64) * self.epsilon_core(a))
    }

    pub fn divisor_sum(&self, a: u64, n: u64) -> Result<BigRational> {
        let a = self.unit(a)?;
        let m = self.modulus();
        let w = self.divisor_exponent();
        let mut s = BigRational::zero();
        for d in arith::divisors(n) {
            if d % m == a {
                s += rat_pow(&rat(d as i64), w);
            }
            if self.convention == DivisorConvention::Signed && (m - d % m) % m == a {
                s += neg_one_pow((w + 1) as u64 & 1) * rat_pow(&rat(d as i64), w);
            }
        }
        Ok(s)
    }

    /// Coefficient of `q^n (4 pi y)^(-i)`.
    pub fn coefficient(&self, a: u64, i: u32, n: u64) -> Result<BigRational> {
        if n == 0 {
            return if i == self.r { self.constant(a) } else { self.unit(a).map(|_| BigRational::zero()) };
        }
        let w = self.whittaker().layer_weight(i);
        if w.is_zero() {
            return Ok(w);
        }
        let nn = num_traits::pow(rat(n as i64), (self.r - i) as usize);
        Ok(self.divisor_sum(a, n)? * w * nn)
    }

    fn meta(&self, note: String) -> FormMeta {
        FormMeta::new(self.l, Level::partial(self.n, self.p, self.nu), "triv", &note)
    }

    fn divisor_sums(&self, a: u64, len: usize) -> Vec<BigRational> {
        let m = self.modulus();
        let w = self.divisor_exponent();
        let mut s = vec![BigRational::zero(); len];
        let mut sieve = |start: u64, sign: BigRational| {
            let mut d = if start == 0 { m } else { start };
            while (d as usize) < len {
                let dw = &sign * rat_pow(&rat(d as i64), w);
                let mut k = d as usize;
                while k < len {
                    s[k] += &dw;
                    k += d as usize;
                }
                d += m;
            }
        };
        sieve(a, BigRational::one());
        if self.convention == DivisorConvention::Signed {
            sieve((m - a) % m, neg_one_pow(((w + 1) & 1) as u64));
        }
        s
    }

    /// `E_{r,l}((a)_nu)` to `q^len`.
    pub fn form(&self, a: u64, len: usize) -> Result<NearlyHolomorphicForm<RationalField>> {
        let a = self.unit(a)?;
        let s = self.divisor_sums(a, len);
        let wp = self.whittaker();
        let mut layers = Vec::with_capacity(self.r as usize + 1);
        for i in 0..=self.r {
            let wi = wp.layer_weight(i);
            let mut layer: Vec<BigRational> = (0..len)
                .map(|n| {
                    if n == 0 || s[n].is_zero() || wi.is_zero() {
                        BigRational::zero()
                    } else {
                        &s[n] * &wi * num_traits::pow(rat(n as i64), (self.r - i) as usize)
                    }
                })
                .collect();
            if i == self.r && len > 0 {
                layer[0] = self.constant(a)?;
            }
            layers.push(layer);
        }
        NearlyHolomorphicForm::new(
            RationalField,
            layers,
            self.meta(format!("E_{},{}(({a})_{})", self.r, self.l, self.nu)),
        )
    }

    /// `b^(l-2r)`, the twist weight in `E^b`.
    pub fn b_weight(&self, b: u64) -> BigRational {
        rat_pow(&rat(b as i64), self.l - 2 * self.r as i64)
    }

    fn b_inverse(&self, b: u64) -> Result<u64> {
        arith::mod_inv(b, self.modulus())
            .filter(|_| arith::gcd(b, self.n * self.p) == 1)
            .ok_or_else(|| Error::Domain(format!("b = {b} is not prime to {}", self.n * self.p)))
    }

    /// `E^b((a)) = E((a)) - b^(l-2r) E((b^-1 a))`.
    pub fn form_b(&self, a: u64, b: u64, len: usize) -> Result<NearlyHolomorphicForm<RationalField>> {
        let binv = self.b_inverse(b)?;
        let m = self.modulus();
        let e1 = self.form(a, len)?;
        let e2 = self.form((binv as u128 * a as u128 % m as u128) as u64, len)?;
        let mut out = e1.sub(&e2.scale(&self.b_weight(b)))?;
        out.meta.note = format!("E^{b}_{},{}(({a})_{})", self.r, self.l, self.nu);
        Ok(out)
    }

    pub fn coefficient_b(&self, a: u64, b: u64, i: u32, n: u64) -> Result<BigRational> {
        let binv = self.b_inverse(b)?;
        let m = self.modulus();
        let a2 = (binv as u128 * a as u128 % m as u128) as u64;
        Ok(self.coefficient(a, i, n)? - self.b_weight(b) * self.coefficient(a2, i, n)?)
    }

    /// `sum_a theta(a) E^b((a))` computed term by term from the partial series.
    pub fn paired_sum<R: Ring>(
        &self,
        ring: &R,
        theta: &DirichletCharacter,
        b: Option<u64>,
        len: usize,
    ) -> Result<NearlyHolomorphicForm<R>> {
        self.check_theta(theta)?;
        let mut acc = NearlyHolomorphicForm::zeros(ring.clone(), self.r as usize, len, self.meta("sum".into()));
        for a in theta.group().units() {
            let t = theta.eval(ring, a as i64)?;
            let e = match b {
                Some(b) => self.form_b(a, b, len)?,
                None => self.form(a, len)?,
            };
            acc = acc.add(&e.to_ring(ring).scale(&t))?;
        }
        acc.meta.note = format!("E_{},{}({})", self.r, self.l, theta.label());
        Ok(acc)
    }

    fn check_theta(&self, theta: &DirichletCharacter) -> Result<()> {
        if theta.modulus() != self.modulus() {
            return Err(Error::Domain(format!(
                "character mod {} paired with a distribution mod {}",
                theta.modulus(),
                self.modulus()
            )));
        }
        Ok(())
    }

    /// `sum_a theta(a) zeta(-m, a, M)` through the generalized Bernoulli number
    /// `B_{m+1,theta} = M^m sum_{a=1}^{M} theta(a) B_{m+1}(a/M)`.
    fn twisted_zeta<R: Ring>(&self, ring: &R, theta: &DirichletCharacter, m: u32) -> Result<R::Elem> {
        let mm = self.modulus();
        let mut bsum = ring.zero();
        for a in 1..=mm {
            let t = theta.eval(ring, a as i64)?;
            if ring.is_zero(&t) {
                continue;
            }
            let x = BigRational::new(BigInt::from(a), BigInt::from(mm));
            bsum = ring.add(&bsum, &ring.scale_rational(&t, &bernoulli_polynomial(m as usize + 1, &x)));
        }
        let scale = -num_traits::pow(rat(mm as i64), m as usize) / rat(m as i64 + 1);
        Ok(ring.scale_rational(&bsum, &scale))
    }

    /// `sum_a theta(a) E^b((a))` from the closed form
    /// `(1 - b^(l-2r) theta(b)) sum_{d | n} theta(d) d^(l-2r-1)` per coefficient.
    pub fn paired_closed_form<R: Ring>(
        &self,
        ring: &R,
        theta: &DirichletCharacter,
        b: Option<u64>,
        len: usize,
    ) -> Result<NearlyHolomorphicForm<R>> {
        self.check_theta(theta)?;
        let factor = match b {
            None => ring.one(),
            Some(b) => {
                self.b_inverse(b)?;
                let tb = theta.eval(ring, b as i64)?;
                ring.sub(&ring.one(), &ring.scale_rational(&tb, &self.b_weight(b)))
            }
        };
        let w = self.divisor_exponent();
        let mut sums = vec![ring.zero(); len];
        for d in 1..len as u64 {
            let mut t = theta.eval(ring, d as i64)?;
            if self.convention == DivisorConvention::Signed {
                let tm = theta.eval(ring, -(d as i64))?;
                t = ring.add(&t, &ring.scale_rational(&tm, &neg_one_pow(((w + 1) & 1) as u64)));
            }
            if ring.is_zero(&t) {
                continue;
            }
            let dw = ring.scale_rational(&t, &rat_pow(&rat(d as i64), w));
            let mut k = d as usize;
            while k < len {
                sums[k] = ring.add(&sums[k], &dw);
                k += d as usize;
            }
        }
        let (r, l) = (self.r as i64, self.l);
        let constant = if l > 2 * r {
            let g = BigRational::from_integer(arith::gamma_ratio(l - r, r as u64)) / rat(2);
            ring.scale_rational(&self.twisted_zeta(ring, theta, (l - 2 * r - 1) as u32)?, &g)
        } else if l == 2 * r {
            let mass = theta
                .group()
                .units()
                .into_iter()
                .try_fold(ring.zero(), |acc, a| theta.eval(ring, a as i64).map(|t| ring.add(&acc, &t)))?;
            let g = -BigRational::from_integer(arith::factorial(r as u64 - 1)) / rat(2 * self.modulus() as i64);
            ring.scale_rational(&mass, &g)
        } else {
            ring.zero()
        };
        let constant = ring.mul(&ring.scale_rational(&constant, &neg_one_pow(r as u64)), &factor);
        let wp = self.whittaker();
        let mut layers = Vec::new();
        for i in 0..=self.r {
            let wi = wp.layer_weight(i);
            let mut layer: Vec<R::Elem> = (0..len)
                .map(|n| {
                    if n == 0 || wi.is_zero() || ring.is_zero(&sums[n]) {
                        return ring.zero();
                    }
                    let c = &wi * num_traits::pow(rat(n as i64), (self.r - i) as usize);
                    ring.mul(&ring.scale_rational(&sums[n], &c), &factor)
                })
                .collect();
            if i == self.r && len > 0 {
                layer[0] = constant.clone();
            }
            layers.push(layer);
        }
        NearlyHolomorphicForm::new(
            ring.clone(),
            layers,
            self.meta(format!("E^b_{},{}({})", self.r, self.l, theta.label())),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_frac;
    use crate::characters::CharacterGroup;
    use crate::cyclo::CyclotomicField;
    use proptest::prelude::*;

    #[test]
    fn hurwitz_at_zero() {
        for (a, m) in [(1u64, 7u64), (3, 7), (5, 77), (77, 77)] {
            let expected = rat_frac(1, 2) - BigRational::new(BigInt::from(a), BigInt::from(m));
            assert_eq!(partial_hurwitz_neg(0, a, m), expected);
        }
    }

    proptest! {
        #[test]
        fn hurwitz_distribution_relation(m in 0u32..6, a in 1u64..7) {
            // zeta(-m, a, 7) = sum over lifts a + 7j mod 49
            let total: BigRational = (0..7).map(|j| partial_hurwitz_neg(m, a + 7 * j, 49)).sum();
            prop_assert_eq!(total, partial_hurwitz_neg(m, a, 7));
        }

        #[test]
        fn full_sum_is_riemann_zeta(m in 1u32..8, modulus in 1u64..12) {
            // sum over all residues recovers zeta(-m) = -B_{m+1}/(m+1)
            let total: BigRational = (1..=modulus).map(|a| partial_hurwitz_neg(m, a, modulus)).sum();
            let zeta = -crate::bernoulli::bernoulli(m as usize + 1) / rat(m as i64 + 1);
            prop_assert_eq!(total, zeta);
        }
    }

    #[test]
    fn whittaker_small_cases() {
        let w = whittaker(5, 2);
        // y^2 - 2*4*y + 4*3
        assert_eq!(w.coefficients(), vec![rat(12), rat(-8), rat(1)]);
        assert_eq!(whittaker(5, 0).coefficients(), vec![rat(1)]);
        assert_eq!(w.eval(&rat(1)), rat(5));
    }

    #[test]
    fn holomorphic_case_is_a_partial_eisenstein_series() {
        let e = EisensteinDistribution::new(0, 4, 1, 5, 1).unwrap();
        let f = e.form(2, 30).unwrap();
        assert_eq!(f.layers[0][12], rat(2 * 2 * 2 + 12 * 12 * 12));
        assert_eq!(f.layers[0][0], rat_frac(1, 2) * partial_hurwitz_neg(3, 2, 5));
        for n in 0..30u64 {
            assert_eq!(e.coefficient(2, 0, n).unwrap(), f.layers[0][n as usize]);
        }
    }

    #[test]
    fn critical_constant_uses_the_limit() {
        let e = EisensteinDistribution::new(2, 4, 1, 7, 1).unwrap();
        // (-1)^2 * (1/2) * (-(1)!/7)
        assert_eq!(e.constant(3).unwrap(), rat_frac(-1, 14));
        let e = EisensteinDistribution::new(3, 5, 1, 7, 1).unwrap();
        assert_eq!(e.constant(3).unwrap(), rat(0));
    }

    #[test]
    fn refinement_including_constants() {
        for (r, l) in [(0u32, 6i64), (1, 6), (2, 10), (3, 6)] {
            let coarse = EisensteinDistribution::new(r, l, 2, 3, 1).unwrap();
            let fine = EisensteinDistribution::new(r, l, 2, 3, 2).unwrap();
            let len = 60;
            for a in [1u64, 5] {
                let mut acc = NearlyHolomorphicForm::zeros(RationalField, r as usize, len, coarse.meta("t".into()));
                for j in 0..3 {
                    acc = acc.add(&fine.form(a + 6 * j, len).unwrap()).unwrap();
                }
                assert_eq!(acc.layers, coarse.form(a, len).unwrap().layers, "r={r} l={l} a={a}");
            }
        }
    }

    #[test]
    fn closed_form_matches_partial_sums() {
        let e = EisensteinDistribution::new(1, 8, 1, 7, 1).unwrap();
        let g = CharacterGroup::new(7).unwrap();
        let field = CyclotomicField::new(6);
        for theta in g.characters() {
            for b in [None, Some(2u64), Some(3)] {
                let direct = e.paired_sum(&field, &theta, b, 40).unwrap();
                let closed = e.paired_closed_form(&field, &theta, b, 40).unwrap();
                assert_eq!(direct.first_difference(&closed), None, "{theta:?} b={b:?}");
            }
        }
    }

    #[test]
    fn signed_divisors_double_the_even_odd_case() {
        // theta even and l - 2r - 1 odd: negative divisors add an equal copy
        let e = EisensteinDistribution::new(1, 10, 1, 7, 1).unwrap();
        let s = e.clone().with_convention(DivisorConvention::Signed);
        let g = CharacterGroup::new(7).unwrap();
        let theta = g.characters().into_iter().find(|c| c.is_even() && !c.is_trivial()).unwrap();
        let field = CyclotomicField::new(6);
        let pos = e.paired_sum(&field, &theta, None, 30).unwrap();
        let sig = s.paired_sum(&field, &theta, None, 30).unwrap();
        for i in 0..=1 {
            for n in 1..30 {
                assert!(field.equal(&sig.layers[i][n], &field.add(&pos.layers[i][n], &pos.layers[i][n])));
            }
        }
    }

    #[test]
    fn rejects_non_units() {
        let e = EisensteinDistribution::new(0, 4, 1, 7, 1).unwrap();
        assert!(e.form(14, 10).is_err());
        assert!(e.form_b(1, 7, 10).is_err());
    }
}
