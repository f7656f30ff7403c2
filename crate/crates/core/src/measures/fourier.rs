//! Fourier coefficients of `U^(2 nu) sum_{r'} C(r,r') (-y)^(r-r') Phi_{r'}` on
//! `y + (p^nu)`, through the characters mod `p^nu`.
//!
//! `A(i, n)` is the coefficient of `q^n (4 pi y)^(-i)`. It splits as
//! `sum_{n1, d | n2} u(n1, d) B(i, n, n1, d)` with unit factor
//! `u = n2^(-i) psi conj(omega)(d) d^(w-1)`, and `B` is also the integral of a
//! polynomial against `mu_b` restricted to one open set.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::context::RankinContext;
use super::dirac::DiracMeasure;
use crate::arith::{self, rat, rat_pow};
use crate::characters::{CharacterGroup, DirichletCharacter};
use crate::eisenstein::whittaker;
use crate::error::{Error, Result};
use crate::ring::{neg_one_pow, Ring};

/// Character data and the sums `T_chi` shared by every `A(i, n)`.
pub struct FourierData<R: Ring> {
    pub ring: R,
    pub nu: u32,
    pub r_max: u32,
    pub out_len: usize,
    chis: Vec<DirichletCharacter>,
    lifted: Vec<DirichletCharacter>,
    /// `1 - b^(w-2r') psi conj(omega) conj(chi)^2 (b)`, per `[chi][r']`.
    factor: Vec<Vec<R::Elem>>,
    /// `sum_{n1+n2 = n p^(2nu)} chi(n1) b_{n1} n2^(r'-i) sum_{d|n2} theta(d) d^(w-2r'-1)`,
    /// per `[chi][r'][i][n]`.
    t: Vec<Vec<Vec<Vec<R::Elem>>>>,
}

fn weight(ctx: &RankinContext, rp: u32, i: u32) -> BigRational {
    whittaker(ctx.w() - rp as i64, rp).layer_weight(i)
}

fn p_power(ctx: &RankinContext, nu: u32, i: u32) -> BigRational {
    BigRational::from_integer(num_traits::pow(BigInt::from(ctx.p), 2 * nu as usize * i as usize))
}

fn center_weight(r: u32, rp: u32, y: u64) -> BigRational {
    BigRational::from_integer(arith::binomial(r as u64, rp as u64))
        * num_traits::pow(rat(-(y as i64)), (r - rp) as usize)
}

impl<R: Ring> FourierData<R> {
    pub fn new(ctx: &RankinContext, ring: &R, nu: u32, r_max: u32, out_len: usize) -> Result<Self> {
        if nu == 0 {
            return Err(Error::Domain("nu must be at least 1".into()));
        }
        let need = super::fused::required_input(ctx.p, nu, out_len);
        ctx.require_g(need)?;
        let pgroup = CharacterGroup::new(arith::pow_u64(ctx.p, nu))?;
        let ygroup = ctx.y_group(nu)?;
        let chis = pgroup.characters();
        let lifted = chis.iter().map(|c| c.lift(&ygroup)).collect::<Result<Vec<_>>>()?;
        let w = ctx.w();
        let pm = arith::pow_u64(ctx.p, 2 * nu) as usize;
        let mut factor = Vec::new();
        let mut t = Vec::new();
        for chi in &lifted {
            let theta = ctx.theta(chi)?;
            let tb = theta.eval(ring, ctx.b as i64)?;
            factor.push(
                (0..=r_max)
                    .map(|rp| {
                        let bw = rat_pow(&rat(ctx.b as i64), w - 2 * rp as i64);
                        ring.sub(&ring.one(), &ring.scale_rational(&tb, &bw))
                    })
                    .collect(),
            );
            let cb: Vec<R::Elem> = (0..need)
                .map(|n1| Ok(ring.scale_rational(&chi.eval(ring, n1 as i64)?, &ctx.g.coeffs[n1])))
                .collect::<Result<_>>()?;
            let th: Vec<R::Elem> = (0..need).map(|d| theta.eval(ring, d as i64)).collect::<Result<_>>()?;
            let mut per_r = Vec::new();
            for rp in 0..=r_max {
                let e = w - 2 * rp as i64 - 1;
                let mut s = vec![ring.zero(); need];
                for d in 1..need {
                    if ring.is_zero(&th[d]) {
                        continue;
                    }
                    let v = ring.scale_rational(&th[d], &rat_pow(&rat(d as i64), e));
                    let mut m = d;
                    while m < need {
                        ring.add_assign(&mut s[m], &v);
                        m += d;
                    }
                }
                let mut per_i = Vec::new();
                for i in 0..=rp {
                    let mut row = vec![ring.zero(); out_len];
                    for (n, slot) in row.iter_mut().enumerate().skip(1) {
                        let top = n * pm;
                        let mut acc = ring.zero();
                        for n1 in 1..top {
                            if ring.is_zero(&cb[n1]) {
                                continue;
                            }
                            let n2 = top - n1;
                            if ring.is_zero(&s[n2]) {
                                continue;
                            }
                            let pw = num_traits::pow(rat(n2 as i64), (rp - i) as usize);
                            ring.mul_add(&mut acc, &ring.scale_rational(&cb[n1], &pw), &s[n2]);
                        }
                        *slot = acc;
                    }
                    per_i.push(row);
                }
                per_r.push(per_i);
            }
            t.push(per_r);
        }
        Ok(FourierData { ring: ring.clone(), nu, r_max, out_len, chis, lifted, factor, t })
    }

    fn check(&self, r: u32, i: u32, n: usize) -> Result<()> {
        if r > self.r_max || i > r {
            return Err(Error::Domain(format!("need i <= r <= {}, got i = {i}, r = {r}", self.r_max)));
        }
        if n >= self.out_len {
            return Err(Error::InsufficientTruncation(format!("A(i, {n}) past the table length {}", self.out_len)));
        }
        Ok(())
    }

    fn inv_phi(&self) -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(self.chis.len()))
    }

    /// `A(i, n)` on `y + (p^nu)` in `Z_p^x`.
    pub fn a_coefficient(&self, ctx: &RankinContext, r: u32, i: u32, n: usize, y: u64) -> Result<R::Elem> {
        self.check(r, i, n)?;
        let ring = &self.ring;
        let mut total = ring.zero();
        for rp in i..=r {
            let c = center_weight(r, rp, y) * weight(ctx, rp, i) * neg_one_pow(rp as u64);
            let mut inner = ring.zero();
            for (ci, chi) in self.chis.iter().enumerate() {
                let cy = ring.char_value(chi.value(y as i64).map(|z| z.inv()))?;
                inner = ring.add(
                    &inner,
                    &ring.mul(&ring.mul(&cy, &self.factor[ci][rp as usize]), &self.t[ci][rp as usize][i as usize][n]),
                );
            }
            total = ring.add(&total, &ring.scale_rational(&inner, &c));
        }
        Ok(ring.scale_rational(&total, &(p_power(ctx, self.nu, i) * self.inv_phi())))
    }

    /// `u(n1, d) = n2^(-i) psi conj(omega)(d) d^(w-1)` with `n2 = n p^(2nu) - n1`.
    pub fn unit_factor(&self, ctx: &RankinContext, i: u32, n: usize, n1: usize, d: u64) -> Result<R::Elem> {
        let n2 = split(ctx, self.nu, n, n1)?;
        let po = self.ring.char_value(ctx.psi_omega_bar(d as i64))?;
        let s = rat_pow(&rat(n2 as i64), -(i as i64)) * rat_pow(&rat(d as i64), ctx.w() - 1);
        Ok(self.ring.scale_rational(&po, &s))
    }

    /// `B(i, n, n1, d)` through the characters mod `p^nu`.
    #[allow(clippy::too_many_arguments)]
    pub fn b_term(&self, ctx: &RankinContext, r: u32, i: u32, n: usize, n1: usize, d: u64, y: u64) -> Result<R::Elem> {
        self.check(r, i, n)?;
        let n2 = split(ctx, self.nu, n, n1)?;
        let ring = &self.ring;
        if arith::gcd(n1 as u64, ctx.n) != 1 {
            return Ok(ring.zero());
        }
        let mut total = ring.zero();
        for rp in i..=r {
            let c = center_weight(r, rp, y)
                * weight(ctx, rp, i)
                * num_traits::pow(rat(-(n2 as i64)), rp as usize)
                * rat_pow(&rat(d as i64), -2 * rp as i64);
            let mut inner = ring.zero();
            for (ci, chi) in self.chis.iter().enumerate() {
                let z = match (chi.value(n1 as i64), chi.value(y as i64), chi.value(d as i64)) {
                    (Some(a), Some(b), Some(e)) => a.mul(&b.inv()).mul(&e.pow(-2)),
                    _ => continue,
                };
                inner = ring.add(&inner, &ring.mul(&ring.root_of_unity(z)?, &self.factor[ci][rp as usize]));
            }
            total = ring.add(&total, &ring.scale_rational(&inner, &c));
        }
        let s = p_power(ctx, self.nu, i) * self.inv_phi() * &ctx.g.coeffs[n1];
        Ok(ring.scale_rational(&total, &s))
    }

    /// `sum_{n1, d | n2} u(n1, d) B(i, n, n1, d)`.
    pub fn a_from_b(&self, ctx: &RankinContext, r: u32, i: u32, n: usize, y: u64) -> Result<R::Elem> {
        self.check(r, i, n)?;
        let ring = &self.ring;
        let top = n * arith::pow_u64(ctx.p, 2 * self.nu) as usize;
        let mut total = ring.zero();
        for n1 in 1..top {
            if arith::gcd(n1 as u64, ctx.n * ctx.p) != 1 || ctx.g.coeffs[n1] == BigRational::from_integer(0.into()) {
                continue;
            }
            let n2 = (top - n1) as u64;
            for d in arith::divisors(n2) {
                if arith::gcd(d, ctx.n * ctx.p) != 1 {
                    continue;
                }
                let u = self.unit_factor(ctx, i, n, n1, d)?;
                let b = self.b_term(ctx, r, i, n, n1, d, y)?;
                ring.mul_add(&mut total, &u, &b);
            }
        }
        Ok(total)
    }

    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.chis
    }

    pub fn lifted(&self) -> &[DirichletCharacter] {
        &self.lifted
    }
}

fn split(ctx: &RankinContext, nu: u32, n: usize, n1: usize) -> Result<usize> {
    let top = n * arith::pow_u64(ctx.p, 2 * nu) as usize;
    if n1 == 0 || n1 >= top {
        return Err(Error::Domain(format!("need 0 < n1 < {top}, got {n1}")));
    }
    Ok(top - n1)
}

/// `P(z) = sum_{r'} C(r,r') (-y)^(r-r') (-1)^i C(r',i) Gamma(w-r')/Gamma(w-r'-i) z^r'`.
pub fn b_polynomial(ctx: &RankinContext, r: u32, i: u32, y: &BigRational, z: &BigRational) -> BigRational {
    (i..=r)
        .map(|rp| {
            BigRational::from_integer(arith::binomial(r as u64, rp as u64))
                * num_traits::pow(-y.clone(), (r - rp) as usize)
                * weight(ctx, rp, i)
                * num_traits::pow(z.clone(), rp as usize)
        })
        .sum()
}

/// `B(i, n, n1, d)` as `b_{n1} p^(2 nu i) int 1[z = y] P(z) dmu_b(x)`, `z = -n2 x / d^2`.
#[allow(clippy::too_many_arguments)]
pub fn b_via_measure<R: Ring>(
    ctx: &RankinContext,
    mu: &DiracMeasure<R>,
    nu: u32,
    r: u32,
    i: u32,
    n: usize,
    n1: usize,
    d: u64,
    y: u64,
) -> Result<R::Elem> {
    let n2 = split(ctx, nu, n, n1)?;
    let ring = &mu.ring;
    if arith::gcd(n1 as u64, ctx.n) != 1 || d % ctx.p == 0 {
        return Ok(ring.zero());
    }
    let pnu = arith::pow_u64(ctx.p, nu);
    let scale = -rat(n2 as i64) / rat_pow(&rat(d as i64), 2);
    let yq = rat(y as i64);
    let integral = mu.integrate(|x| {
        let z = &scale * x;
        let hit = arith::rational_residue(&z, pnu) == Some(y % pnu);
        Ok(if hit { Some(b_polynomial(ctx, r, i, &yq, &z)) } else { None })
    })?;
    Ok(ring.scale_rational(&integral, &(p_power(ctx, nu, i) * &ctx.g.coeffs[n1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::CyclotomicField;
    use crate::measures::context::{sample, OpenKind};
    use crate::measures::dirac::mu_b;
    use crate::measures::fused::{required_input, u_combination, u_phi_all};

    #[test]
    fn closed_form_matches_fused_and_measure() {
        let out_len = 3;
        let ctx = sample::context(required_input(7, 1, out_len));
        let ring = CyclotomicField::new(6);
        let r = 2;
        let data = FourierData::new(&ctx, &ring, 1, r, out_len).unwrap();
        let tables: Vec<_> = (0..=r).map(|rp| u_phi_all(&ctx, 1, rp, OpenKind::Zp, out_len).unwrap()).collect();
        let mu = mu_b(&ctx, &ring).unwrap();
        for y in [1u64, 3, 6] {
            let fused = u_combination(&ctx, &tables, y, &rat(y as i64)).unwrap();
            for i in 0..=r {
                for n in 0..out_len {
                    let a = data.a_coefficient(&ctx, r, i, n, y).unwrap();
                    assert_eq!(a, ring.from_rational(&fused.coeff(i as usize, n)), "y={y} i={i} n={n}");
                    if n > 0 {
                        assert_eq!(data.a_from_b(&ctx, r, i, n, y).unwrap(), a, "unit combination y={y} i={i} n={n}");
                    }
                }
            }
            for (n1, d) in [(1usize, 1u64), (2, 4), (5, 2), (30, 4), (80, 1)] {
                let bt = data.b_term(&ctx, r, 1, 2, n1, d, y).unwrap();
                let bm = b_via_measure(&ctx, &mu, 1, r, 1, 2, n1, d, y).unwrap();
                assert_eq!(bt, bm, "B y={y} n1={n1} d={d}");
            }
        }
    }
}
