//! `U^(2 nu) Phi_r` evaluated straight from the coefficients of `g`, for every
//! open set of a level at once.
//!
//! The coefficient of `q^n (4 pi y)^(-i)` in `U^(2nu) Phi_r((y)_nu)` is
//!
//! `(-1)^r p^(2 nu i) W_i sum_{n1 + n2 = n p^(2nu)} b_{n1} n2^(r-i) sum_{d | n2} d^(w-2r-1) [..]`
//!
//! where the bracket collects `psi conj(omega)(a)` for `a = d` and
//! `-b^(w-2r) psi conj(omega)(a)` for `a = b d`, and the term belongs to the
//! open set containing `n1 a^-2`. Each `(n1, d)` therefore feeds exactly one
//! open set per bracket term.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::context::{OpenKind, RankinContext};
use crate::arith::{self, rat, rat_pow};
use crate::eisenstein::whittaker;
use crate::error::{Error, Result};
use crate::qexp::{FormMeta, Level, NearlyHolomorphicForm};
use crate::ring::{neg_one_pow, RationalField};

/// Positive divisors of every `n < len`.
pub struct DivisorTable {
    divs: Vec<Vec<u32>>,
}

impl DivisorTable {
    pub fn new(len: usize) -> Self {
        let mut divs = vec![Vec::new(); len];
        for d in 1..len {
            let mut m = d;
            while m < len {
                divs[m].push(d as u32);
                m += d;
            }
        }
        DivisorTable { divs }
    }

    pub fn get(&self, n: usize) -> &[u32] {
        &self.divs[n]
    }

    pub fn len(&self) -> usize {
        self.divs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divs.is_empty()
    }
}

/// Coefficients of `U^(2 nu) Phi_r` on every open set of one level.
#[derive(Clone, Debug)]
pub struct UPhiTable {
    pub nu: u32,
    pub r: u32,
    pub kind: OpenKind,
    pub out_len: usize,
    /// Open set representative -> layers `0..=r`, each of length `out_len`.
    pub coeffs: BTreeMap<u64, Vec<Vec<BigRational>>>,
}

/// Input truncation needed for `out_len` coefficients after `U^(2 nu)`.
pub fn required_input(p: u64, nu: u32, out_len: usize) -> usize {
    if out_len == 0 {
        0
    } else {
        (out_len - 1) * arith::pow_u64(p, 2 * nu) as usize + 1
    }
}

/// Multiply-add estimate for one [`u_phi_all`] call.
pub fn estimate_cost(p: u64, nu: u32, r: u32, out_len: usize) -> u128 {
    let pm = arith::pow_u64(p, 2 * nu) as u128;
    let n = out_len as u128;
    // sum over n of n p^(2nu) inner indices, ~10 divisors each, r+1 layers
    pm * n * (n + 1) / 2 * 12 * (r as u128 + 2)
}

pub fn u_phi_all(ctx: &RankinContext, nu: u32, r: u32, kind: OpenKind, out_len: usize) -> Result<UPhiTable> {
    if r as i64 > ctx.w() - 1 {
        return Err(Error::Domain(format!("r = {r} exceeds k-l-1 = {}", ctx.w() - 1)));
    }
    let need = required_input(ctx.p, nu, out_len);
    ctx.require_g(need)?;
    let p = ctx.p;
    let m = ctx.modulus(nu);
    let pnu = arith::pow_u64(p, nu);
    let reduce_to = match kind {
        OpenKind::Y => m,
        OpenKind::Zp => pnu,
    };
    let pm = arith::pow_u64(p, 2 * nu) as usize;
    let w = ctx.w();
    let wr = w - 2 * r as i64 - 1;
    let bw = rat_pow(&rat(ctx.b as i64), w - 2 * r as i64);
    let divs = DivisorTable::new(need.max(1));
    // a^-2 mod M and psi conj(omega)(a) for each residue
    let mut inv_sq = vec![0u64; m as usize];
    let mut po = vec![BigRational::zero(); m as usize];
    for a in ctx.units(nu) {
        let ai = arith::mod_inv(a, m).unwrap();
        inv_sq[a as usize] = (ai as u128 * ai as u128 % m as u128) as u64;
        po[a as usize] = ctx.psi_omega_bar_rational(a as i64)?;
    }
    let bm = ctx.b % m;
    let dpow: Vec<BigRational> =
        (0..need.max(1)).map(|d| if d == 0 { BigRational::zero() } else { rat_pow(&rat(d as i64), wr) }).collect();
    let weights: Vec<BigRational> = {
        let wp = whittaker(w - r as i64, r);
        (0..=r)
            .map(|i| {
                let pp = num_traits::pow(BigInt::from(p), 2 * nu as usize * i as usize);
                neg_one_pow(r as u64) * wp.layer_weight(i) * BigRational::from_integer(pp)
            })
            .collect()
    };
    let units: Vec<u64> = match kind {
        OpenKind::Y => ctx.units(nu),
        OpenKind::Zp => ctx.zp_units(nu),
    };
    let slot: BTreeMap<u64, usize> = units.iter().enumerate().map(|(i, &y)| (y % reduce_to, i)).collect();
    let per_n: Vec<Vec<Vec<BigRational>>> = (1..out_len)
        .into_par_iter()
        .map(|n| {
            let top = n * pm;
            // acc[slot][i]
            let mut acc = vec![vec![BigRational::zero(); r as usize + 1]; units.len()];
            let mut bucket: Vec<BigRational> = vec![BigRational::zero(); units.len()];
            let mut touched: Vec<usize> = Vec::new();
            for n1 in 1..top {
                if arith::gcd(n1 as u64, ctx.n * p) != 1 {
                    continue;
                }
                let bn1 = &ctx.g.coeffs[n1];
                if bn1.is_zero() {
                    continue;
                }
                let n2 = top - n1;
                let n1m = n1 as u64 % m;
                for &d in divs.get(n2) {
                    let d = d as u64;
                    if arith::gcd(d, ctx.n * p) != 1 {
                        continue;
                    }
                    let a1 = d % m;
                    let a2 = (bm as u128 * a1 as u128 % m as u128) as u64;
                    let y1 = (n1m as u128 * inv_sq[a1 as usize] as u128 % m as u128) as u64 % reduce_to;
                    let y2 = (n1m as u128 * inv_sq[a2 as usize] as u128 % m as u128) as u64 % reduce_to;
                    let dp = &dpow[d as usize];
                    let s1 = slot[&y1];
                    if bucket[s1].is_zero() {
                        touched.push(s1);
                    }
                    bucket[s1] += dp * &po[a1 as usize];
                    let s2 = slot[&y2];
                    if bucket[s2].is_zero() {
                        touched.push(s2);
                    }
                    bucket[s2] -= dp * &po[a2 as usize] * &bw;
                }
                touched.sort_unstable();
                touched.dedup();
                let mut n2pow = BigRational::one();
                let mut powers = Vec::with_capacity(r as usize + 1);
                for _ in 0..=r {
                    powers.push(n2pow.clone());
                    n2pow *= rat(n2 as i64);
                }
                for &s in &touched {
                    let v = std::mem::take(&mut bucket[s]);
                    if v.is_zero() {
                        continue;
                    }
                    let bv = bn1 * v;
                    for i in 0..=r as usize {
                        acc[s][i] += &bv * &powers[r as usize - i];
                    }
                }
                touched.clear();
            }
            acc
        })
        .collect();
    let mut coeffs = BTreeMap::new();
    for (s, &y) in units.iter().enumerate() {
        let mut layers = vec![vec![BigRational::zero(); out_len]; r as usize + 1];
        for (idx, acc) in per_n.iter().enumerate() {
            for i in 0..=r as usize {
                layers[i][idx + 1] = &acc[s][i] * &weights[i];
            }
        }
        coeffs.insert(y, layers);
    }
    Ok(UPhiTable { nu, r, kind, out_len, coeffs })
}

/// `U^(2 nu) sum_{r'} C(r, r') (-center)^(r-r') Phi_{r'}(open)` from tables for
/// `r' = 0..=r` at one level.
pub fn u_combination(
    ctx: &RankinContext,
    tables: &[UPhiTable],
    y: u64,
    center: &BigRational,
) -> Result<NearlyHolomorphicForm<RationalField>> {
    let r = tables.len() as u32 - 1;
    let t0 = &tables[0];
    let out_len = t0.out_len;
    let mut layers = vec![vec![BigRational::zero(); out_len]; r as usize + 1];
    for (rp, t) in tables.iter().enumerate() {
        if t.r as usize != rp || t.nu != t0.nu || t.kind != t0.kind || t.out_len != out_len {
            return Err(Error::Domain("tables must cover r' = 0..=r at one level".into()));
        }
        let c = BigRational::from_integer(arith::binomial(r as u64, rp as u64))
            * num_traits::pow(-center.clone(), (r as usize) - rp);
        let src = t.coeffs.get(&y).ok_or_else(|| Error::Domain(format!("no open set with representative {y}")))?;
        for (i, layer) in src.iter().enumerate() {
            for (n, v) in layer.iter().enumerate() {
                if !v.is_zero() {
                    layers[i][n] += &c * v;
                }
            }
        }
    }
    let meta = FormMeta::new(
        ctx.k,
        Level::new(ctx.n).with_exponent(ctx.p, 1).lcm(&Level::new(ctx.n * ctx.n)),
        "triv",
        &format!("U^{}[sum_r' Phi_r'(({y})_{})]", 2 * t0.nu, t0.nu),
    );
    NearlyHolomorphicForm::new(RationalField, layers, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::context::sample;
    use crate::measures::phi::phi_table;
    use crate::qexp::op_u;

    #[test]
    fn matches_materialized_products() {
        let out_len = 4;
        let need = required_input(7, 1, out_len);
        let ctx = sample::context(need);
        for r in 0..=2 {
            let fused = u_phi_all(&ctx, 1, r, OpenKind::Y, out_len).unwrap();
            let table = phi_table(&ctx, 1, r, need).unwrap();
            for (y, layers) in &fused.coeffs {
                let direct = op_u(table.get(*y).unwrap(), 7, 2);
                assert_eq!(direct.len(), out_len);
                assert_eq!(&direct.layers, layers, "r = {r}, y = {y}");
            }
            let zp = u_phi_all(&ctx, 1, r, OpenKind::Zp, out_len).unwrap();
            for (y, layers) in &zp.coeffs {
                let direct = op_u(&table.zp(&ctx, *y).unwrap(), 7, 2);
                assert_eq!(&direct.layers, layers, "Z_p, r = {r}, y = {y}");
            }
        }
    }

    #[test]
    fn short_g_is_refused() {
        let ctx = sample::context(50);
        assert!(matches!(u_phi_all(&ctx, 1, 0, OpenKind::Y, 4), Err(Error::InsufficientTruncation(_))));
    }
}
