//! `Phi_r((y)_nu)` built by multiplying partial series, plus the two routes to
//! `Phi_r(chi)`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::context::{OpenKind, RankinContext};
use crate::arith;
use crate::characters::DirichletCharacter;
use crate::eisenstein::EisensteinDistribution;
use crate::error::{Error, Result};
use crate::qexp::{self, FormMeta, Level, NearlyHolomorphicForm, QExpansion};
use crate::ring::{neg_one_pow, RationalField, Ring};

type QForm = NearlyHolomorphicForm<RationalField>;

/// `Phi_r((y)_nu)` for every `y` in `(Z / N p^nu)^x`, truncated at `len`.
pub struct PhiTable {
    pub nu: u32,
    pub r: u32,
    pub len: usize,
    pub forms: BTreeMap<u64, QForm>,
}

impl PhiTable {
    pub fn get(&self, y: u64) -> Result<&QForm> {
        self.forms
            .get(&y)
            .ok_or_else(|| Error::Domain(format!("{y} is not a unit representative at level {}", self.nu)))
    }

    /// The pushforward to `y + (p^nu)` in `Z_p^x`: the sum over every lift.
    pub fn zp(&self, ctx: &RankinContext, y: u64) -> Result<QForm> {
        let pnu = arith::pow_u64(ctx.p, self.nu);
        let mut acc: Option<QForm> = None;
        for (&x, f) in &self.forms {
            if x % pnu == y % pnu {
                acc = Some(match acc {
                    None => f.clone(),
                    Some(a) => a.add(f)?,
                });
            }
        }
        acc.ok_or_else(|| Error::Domain(format!("{y} is not a unit modulo {pnu}")))
    }

    pub fn open(&self, ctx: &RankinContext, y: u64, kind: OpenKind) -> Result<QForm> {
        match kind {
            OpenKind::Y => self.get(y).cloned(),
            OpenKind::Zp => self.zp(ctx, y),
        }
    }
}

fn distribution(ctx: &RankinContext, r: u32, nu: u32) -> Result<EisensteinDistribution> {
    EisensteinDistribution::new(r, ctx.w(), ctx.n, ctx.p, nu)
}

pub fn phi_meta(ctx: &RankinContext, nu: u32, note: String) -> FormMeta {
    let level = Level::new(ctx.n).lcm(&Level::partial(ctx.n, ctx.p, nu));
    FormMeta::new(ctx.k, level, "triv", &note)
}

/// `(-1)^r sum_a psi conj(omega)(a) g((a^2 y)_nu) E^b_{r,k-l}((a)_nu)` for all `y`.
pub fn phi_table(ctx: &RankinContext, nu: u32, r: u32, len: usize) -> Result<PhiTable> {
    ctx.require_g(len)?;
    let dist = distribution(ctx, r, nu)?;
    let m = ctx.modulus(nu);
    let units = ctx.units(nu);
    let eis: BTreeMap<u64, QForm> =
        units.par_iter().map(|&a| dist.form_b(a, ctx.b, len).map(|f| (a, f))).collect::<Result<_>>()?;
    let mut signs = BTreeMap::new();
    for &a in &units {
        signs.insert(a, ctx.psi_omega_bar_rational(a as i64)?);
    }
    // the support of g((c)_nu), as (n, b_n)
    let mut sparse: BTreeMap<u64, Vec<(usize, BigRational)>> = BTreeMap::new();
    for (n, c) in ctx.g.coeffs.iter().enumerate().take(len) {
        if !c.is_zero() && arith::gcd(n as u64, m) == 1 {
            sparse.entry(n as u64 % m).or_default().push((n, c.clone()));
        }
    }
    let sign_r = neg_one_pow(r as u64);
    let forms: BTreeMap<u64, QForm> = units
        .par_iter()
        .map(|&y| {
            let mut layers = vec![vec![BigRational::zero(); len]; r as usize + 1];
            for &a in &units {
                let c = (a as u128 * a as u128 % m as u128 * y as u128 % m as u128) as u64;
                let Some(gs) = sparse.get(&c) else { continue };
                let e = &eis[&a];
                let s = &signs[&a] * &sign_r;
                for (n1, bn) in gs {
                    let coef = &s * bn;
                    for (i, layer) in e.layers.iter().enumerate() {
                        for (n2, v) in layer.iter().enumerate().take(len - n1) {
                            if !v.is_zero() {
                                layers[i][n1 + n2] += &coef * v;
                            }
                        }
                    }
                }
            }
            let meta = phi_meta(ctx, nu, format!("Phi_{r}(({y})_{nu})"));
            NearlyHolomorphicForm::new(RationalField, layers, meta).map(|f| (y, f))
        })
        .collect::<Result<_>>()?;
    Ok(PhiTable { nu, r, len, forms })
}

/// `sum_y chi(y) Phi_r((y)_nu)` from a materialized table.
pub fn phi_char_definitional<R: Ring>(
    table: &PhiTable,
    ring: &R,
    chi: &DirichletCharacter,
) -> Result<NearlyHolomorphicForm<R>> {
    let mut acc: Option<NearlyHolomorphicForm<R>> = None;
    for (&y, f) in &table.forms {
        let c = chi.eval(ring, y as i64)?;
        let term = f.to_ring(ring).scale(&c);
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    let mut out = acc.ok_or_else(|| Error::Domain("empty table".into()))?;
    out.meta.note = format!("Phi_{}({})", table.r, chi.label());
    Ok(out)
}

/// The twist `g(chi) = sum chi(n) b_n q^n`.
pub fn twist_g<R: Ring>(ctx: &RankinContext, ring: &R, chi: &DirichletCharacter, len: usize) -> Result<QExpansion<R>> {
    ctx.require_g(len)?;
    let coeffs = ctx.g.coeffs[..len]
        .iter()
        .enumerate()
        .map(|(n, b)| {
            let c = chi.eval(ring, n as i64)?;
            Ok(ring.scale_rational(&c, b))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QExpansion::new(ring.clone(), coeffs))
}

/// `(-1)^r g(chi) E^b_{r,k-l}(psi conj(omega) conj(chi)^2)`, with `chi` mod `N p^nu`.
pub fn phi_char_closed<R: Ring>(
    ctx: &RankinContext,
    ring: &R,
    chi: &DirichletCharacter,
    r: u32,
    len: usize,
) -> Result<NearlyHolomorphicForm<R>> {
    let nu = level_of(ctx, chi)?;
    let dist = distribution(ctx, r, nu)?;
    let theta = ctx.theta(chi)?;
    let e = dist.paired_closed_form(ring, &theta, Some(ctx.b), len)?;
    let g = NearlyHolomorphicForm::holomorphic(twist_g(ctx, ring, chi, len)?, phi_meta(ctx, nu, "g(chi)".into()));
    let mut out = qexp::mul(&g, &e)?.scale(&ring.from_rational(&neg_one_pow(r as u64)));
    out.meta = phi_meta(ctx, nu, format!("Phi_{r}({})", chi.label()));
    Ok(out)
}

/// `nu` with `chi` defined modulo `N p^nu`.
pub fn level_of(ctx: &RankinContext, chi: &DirichletCharacter) -> Result<u32> {
    let m = chi.modulus();
    if m % ctx.n != 0 {
        return Err(Error::Domain(format!("character modulus {m} is not a multiple of N = {}", ctx.n)));
    }
    let rest = m / ctx.n;
    let nu = arith::val_u64(rest, ctx.p);
    if arith::pow_u64(ctx.p, nu) != rest || nu == 0 {
        return Err(Error::Domain(format!("character modulus {m} is not N p^nu with nu >= 1")));
    }
    Ok(nu)
}

/// Both routes to `Phi_r(chi)`; a disagreement is an error.
pub fn phi_char<R: Ring>(
    ctx: &RankinContext,
    table: &PhiTable,
    ring: &R,
    chi: &DirichletCharacter,
) -> Result<NearlyHolomorphicForm<R>> {
    let a = phi_char_definitional(table, ring, chi)?;
    let b = phi_char_closed(ctx, ring, chi, table.r, table.len)?;
    if let Some((i, n)) = a.first_difference(&b) {
        return Err(Error::Discrepancy(format!(
            "Phi_{}({}) differs between the sum over opens and the closed form at layer {i}, q^{n}",
            table.r,
            chi.label()
        )));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::CyclotomicField;
    use crate::measures::context::sample;

    #[test]
    fn two_routes_agree() {
        let ctx = sample::context(60);
        let ring = CyclotomicField::new(30);
        for r in [0u32, 2] {
            let table = phi_table(&ctx, 1, r, 60).unwrap();
            let group = ctx.y_group(1).unwrap();
            for chi in group.characters().iter().step_by(7) {
                let f = phi_char(&ctx, &table, &ring, chi).unwrap();
                assert_eq!(f.depth(), r as usize);
            }
        }
    }

    #[test]
    fn refinement_sums_over_lifts() {
        let ctx = sample::context(60);
        let t1 = phi_table(&ctx, 1, 1, 60).unwrap();
        let t2 = phi_table(&ctx, 2, 1, 60).unwrap();
        for y in [1u64, 2, 13, 76] {
            let mut acc = t2.get(y).unwrap().clone();
            for j in 1..7 {
                acc = acc.add(t2.get(y + 77 * j).unwrap()).unwrap();
            }
            assert!(acc.first_difference(t1.get(y).unwrap()).is_none(), "y = {y}");
        }
    }

    #[test]
    fn non_unit_is_unknown() {
        let ctx = sample::context(30);
        let t = phi_table(&ctx, 1, 0, 30).unwrap();
        assert!(t.get(11).is_err());
    }
}
