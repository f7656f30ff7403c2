//! Level, divisibility and growth checks, and the Mellin integrand.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::context::{OpenKind, OpenSet, RankinContext, Ratio};
use super::fourier::FourierData;
use super::fused::{estimate_cost, required_input, u_combination, u_phi_all, UPhiTable};
use super::phi::{level_of, phi_char, phi_char_closed, phi_table};
use crate::arith::{self, rat};
use crate::characters::{CharacterGroup, DirichletCharacter};
use crate::cyclo::CyclotomicField;
use crate::eisenstein::EisensteinDistribution;
use crate::error::{Error, Result};
use crate::padic::{approx_string, hecke_roots, PadicField};
use crate::qexp::{op_u, partial_form, sup_norm_valuation, FormMeta, Level, NearlyHolomorphicForm};
use crate::ring::{RationalField, Ring, Valuation};

fn ratio_string(r: &Ratio) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

fn ser_opt_ratio<S: serde::Serializer>(r: &Option<Ratio>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&ratio_string(r)),
        None => s.serialize_str("inf"),
    }
}

/// Fails with [`Error::BudgetExceeded`] before any work when `needed > budget`.
pub fn check_budget(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

fn g_form(ctx: &RankinContext, len: usize) -> NearlyHolomorphicForm<RationalField> {
    NearlyHolomorphicForm::holomorphic(ctx.g.truncate(len), FormMeta::new(ctx.l, Level::new(ctx.n), "triv", "g"))
}

/// Multiply-add estimate of a divisibility sweep at one level.
pub fn divisibility_cost(ctx: &RankinContext, nu: u32, r_max: u32, out_len: usize) -> u128 {
    (0..=r_max).map(|r| estimate_cost(ctx.p, nu, r, out_len)).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelRow {
    pub nu: u32,
    pub r: u32,
    pub expected: String,
    pub partial_g: String,
    pub eisenstein: String,
    pub phi: String,
    pub pass: bool,
}

/// Every summand of `Phi_r((y)_nu)` and the sum itself carry level dividing `N^2 p^(2nu)`.
pub fn check_level(ctx: &RankinContext, nu: u32, r: u32) -> Result<LevelRow> {
    let expected = Level::partial(ctx.n, ctx.p, nu);
    let len = 8.min(ctx.g.len());
    let g = g_form(ctx, len);
    let pg = partial_form(&g, 1, nu, ctx.n, ctx.p)?;
    let e = EisensteinDistribution::new(r, ctx.w(), ctx.n, ctx.p, nu)?.form_b(1, ctx.b, len)?;
    let phi = phi_table(ctx, nu, r, len)?;
    let phi_level = phi.forms.values().next().map(|f| f.meta.level.clone()).unwrap_or_else(Level::one);
    let divides = |l: &Level| l.lcm(&expected) == expected;
    let pass = divides(&pg.meta.level) && divides(&e.meta.level) && divides(&phi_level);
    Ok(LevelRow {
        nu,
        r,
        expected: expected.to_string(),
        partial_g: pg.meta.level.to_string(),
        eisenstein: e.meta.level.to_string(),
        phi: phi_level.to_string(),
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisibilityRow {
    pub nu: u32,
    pub r: u32,
    pub kind: OpenKind,
    pub y: u64,
    pub out_len: usize,
    pub valuation: Valuation,
    #[serde(serialize_with = "ser_ratio")]
    pub required: Ratio,
    /// `valuation - required`; `inf` when the form vanished on the computed range.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub slack: Option<Ratio>,
    pub pass: bool,
}

impl DivisibilityRow {
    pub const TSV_HEADER: &'static str = "nu\tr\tkind\ty\tout_len\tvaluation\trequired\tslack\tpass";

    pub fn tsv(&self) -> String {
        format!(
            "{}\t{}\t{:?}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.nu,
            self.r,
            self.kind,
            self.y,
            self.out_len,
            self.valuation,
            ratio_string(&self.required),
            self.slack.map(|s| ratio_string(&s)).unwrap_or_else(|| "inf".into()),
            self.pass
        )
    }
}

fn tables(ctx: &RankinContext, nu: u32, r_max: u32, kind: OpenKind, out_len: usize) -> Result<Vec<UPhiTable>> {
    if out_len < 2 {
        return Err(Error::InsufficientTruncation(format!(
            "U^{} leaves {out_len} coefficients; at least q^0 and q^1 are needed",
            2 * nu
        )));
    }
    (0..=r_max).into_par_iter().map(|r| u_phi_all(ctx, nu, r, kind, out_len)).collect()
}

fn divisibility_row(ctx: &RankinContext, tabs: &[UPhiTable], y: u64, r: u32) -> Result<DivisibilityRow> {
    let t0 = &tabs[0];
    let form = u_combination(ctx, &tabs[..=r as usize], y, &rat(y as i64))?;
    let valuation = sup_norm_valuation(&form, ctx.p)?;
    let required = Ratio::from_integer(t0.nu as i64 * r as i64) - ctx.divisibility_constant(r);
    let slack = valuation.finite().map(|v| v - required);
    Ok(DivisibilityRow {
        nu: t0.nu,
        r,
        kind: t0.kind,
        y,
        out_len: t0.out_len,
        valuation,
        required,
        slack,
        pass: valuation >= Valuation::Finite(required),
    })
}

/// `v(U^(2nu) sum_{r'} C(r,r') (-y)^(r-r') Phi_{r'}(open)) >= nu r - v_p(r!) + v_p(g)`.
pub fn check_divisibility(ctx: &RankinContext, open: &OpenSet, r: u32, out_len: usize) -> Result<DivisibilityRow> {
    let tabs = tables(ctx, open.nu, r, open.kind, out_len)?;
    divisibility_row(ctx, &tabs, open.y, r)
}

/// The same for every unit open at level `nu` and every `r <= r_max`, sorted.
pub fn divisibility_sweep(
    ctx: &RankinContext,
    nu: u32,
    r_max: u32,
    kind: OpenKind,
    out_len: usize,
) -> Result<Vec<DivisibilityRow>> {
    let tabs = tables(ctx, nu, r_max, kind, out_len)?;
    let ys: Vec<u64> = tabs[0].coeffs.keys().copied().collect();
    let mut rows = Vec::new();
    for r in 0..=r_max {
        for &y in &ys {
            rows.push(divisibility_row(ctx, &tabs, y, r)?);
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityRow {
    pub nu: u32,
    pub t: u32,
    pub out_len: usize,
    /// Valuation of `U^(2nu) sum_j C(t,j) (-a)^(t-j) Phi_j((a)_nu)`.
    pub raw: Valuation,
    /// After the `alpha^(-2nu)` normalization.
    pub normalized: Valuation,
    /// `nu t - 2 nu v(alpha)`.
    #[serde(serialize_with = "ser_ratio")]
    pub shape: Ratio,
    /// `shape - normalized`: what the constant has to absorb.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub deficit: Option<Ratio>,
    /// `normalized + nu (k - l - t)`, the room left under the growth condition.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub growth_margin: Option<Ratio>,
}

impl AdmissibilityRow {
    pub const TSV_HEADER: &'static str = "nu\tt\tout_len\traw\tnormalized\tshape\tdeficit\tgrowth_margin";

    pub fn tsv(&self) -> String {
        let o = |r: &Option<Ratio>| r.map(|s| ratio_string(&s)).unwrap_or_else(|| "inf".into());
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.nu,
            self.t,
            self.out_len,
            self.raw,
            self.normalized,
            ratio_string(&self.shape),
            o(&self.deficit),
            o(&self.growth_margin)
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub a: u64,
    pub slope: Valuation,
    pub rows: Vec<AdmissibilityRow>,
    /// Smallest `c` with `normalized >= shape - c` on every row.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub fitted_c: Option<Ratio>,
    /// `max_t (v_p(t!) - v_p(g))`, the constant the divisibility bound provides.
    #[serde(serialize_with = "ser_ratio")]
    pub c0: Ratio,
    /// Increasing `t` by one raises `shape` by `nu`.
    pub shape_monotone: bool,
    pub pass: bool,
    pub asymptotic: String,
}

pub const O_CLAIM_NOTE: &str = "the o(p^(nu(h-t))) refinement is asymptotic in nu and is not decidable from finitely many levels; only the O-bound with the predicted exponent is certified";

/// Growth table on `a + (N p^nu)` for each `(nu, out_len)` in `levels` and `t <= t_max`.
pub fn check_admissibility(
    ctx: &RankinContext,
    a: u64,
    levels: &[(u32, usize)],
    t_max: u32,
) -> Result<AdmissibilityReport> {
    if t_max as i64 > ctx.w() - 1 {
        return Err(Error::Domain(format!("t = {t_max} exceeds k-l-1 = {}", ctx.w() - 1)));
    }
    let slope = ctx.slope();
    let va = slope.finite().ok_or_else(|| Error::Domain("alpha vanishes".into()))?;
    let mut rows = Vec::new();
    for &(nu, out_len) in levels {
        let open = OpenSet::new(ctx, a, nu, OpenKind::Y)?;
        if open.y != a {
            return Err(Error::Domain(format!("center {a} must be reduced below N p = {}", ctx.modulus(1))));
        }
        let tabs = tables(ctx, nu, t_max, OpenKind::Y, out_len)?;
        for t in 0..=t_max {
            let form = u_combination(ctx, &tabs[..=t as usize], a, &rat(a as i64))?;
            let raw = sup_norm_valuation(&form, ctx.p)?;
            let two_nu = Ratio::from_integer(2 * nu as i64);
            let normalized = raw.shift(-(two_nu * va));
            let shape = Ratio::from_integer(nu as i64 * t as i64) - two_nu * va;
            let nf = normalized.finite();
            rows.push(AdmissibilityRow {
                nu,
                t,
                out_len,
                raw,
                normalized,
                shape,
                deficit: nf.map(|v| shape - v),
                growth_margin: nf.map(|v| v + Ratio::from_integer(nu as i64 * (ctx.w() - t as i64))),
            });
        }
    }
    let fitted_c = rows.iter().filter_map(|r| r.deficit).max();
    let c0 = (0..=t_max).map(|t| ctx.divisibility_constant(t)).max().unwrap_or_default();
    let shape_monotone =
        rows.windows(2).all(|w| w[0].nu != w[1].nu || w[1].shape - w[0].shape == Ratio::from_integer(w[0].nu as i64));
    let pass = !rows.is_empty() && shape_monotone && fitted_c.is_none_or(|c| c <= c0);
    Ok(AdmissibilityReport { a, slope, rows, fitted_c, c0, shape_monotone, pass, asymptotic: O_CLAIM_NOTE.into() })
}

/// Ring holding every value of `chi`, `psi` and `omega`, for exact comparisons.
pub fn exact_ring(ctx: &RankinContext, chi: &DirichletCharacter) -> CyclotomicField {
    let n = arith::lcm(arith::lcm(chi.order(), ctx.psi.order()), ctx.omega.order());
    CyclotomicField::new(n.max(1))
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoPathRow {
    pub check: String,
    pub nu: u32,
    pub r: u32,
    pub label: String,
    pub compared: usize,
    pub pass: bool,
    pub detail: String,
}

impl TwoPathRow {
    pub const TSV_HEADER: &'static str = "check\tnu\tr\tlabel\tcompared\tpass\tdetail";

    pub fn tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.check, self.nu, self.r, self.label, self.compared, self.pass, self.detail
        )
    }
}

/// `Phi_r(chi)` for every `chi` mod `p^nu` (times the trivial character mod
/// `N`), both routes, exactly.
pub fn two_path_phi(ctx: &RankinContext, nu: u32, r_max: u32, len: usize) -> Result<Vec<TwoPathRow>> {
    let pgroup = CharacterGroup::new(arith::pow_u64(ctx.p, nu))?;
    let ygroup = ctx.y_group(nu)?;
    let mut rows = Vec::new();
    for r in 0..=r_max {
        let table = phi_table(ctx, nu, r, len)?;
        let results: Vec<TwoPathRow> = pgroup
            .characters()
            .par_iter()
            .map(|chi| {
                let lifted = chi.lift(&ygroup)?;
                let ring = exact_ring(ctx, &lifted);
                let res = phi_char(ctx, &table, &ring, &lifted);
                Ok(TwoPathRow {
                    check: "phi_char".into(),
                    nu,
                    r,
                    label: chi.label(),
                    compared: len * (r as usize + 1),
                    pass: res.is_ok(),
                    detail: match res {
                        Ok(_) => "agree".into(),
                        Err(e) => e.to_string(),
                    },
                })
            })
            .collect::<Result<_>>()?;
        rows.extend(results);
    }
    Ok(rows)
}

/// Closed-form `A(i, n)` against the fused pipeline on every `y + (p^nu)`.
pub fn two_path_fourier(ctx: &RankinContext, nu: u32, r_max: u32, out_len: usize) -> Result<Vec<TwoPathRow>> {
    let pgroup = CharacterGroup::new(arith::pow_u64(ctx.p, nu))?;
    let probe = pgroup.characters().into_iter().max_by_key(|c| c.order()).unwrap();
    let ring = exact_ring(ctx, &probe.lift(&ctx.y_group(nu)?)?);
    let data = FourierData::new(ctx, &ring, nu, r_max, out_len)?;
    let tabs = tables(ctx, nu, r_max, OpenKind::Zp, out_len)?;
    let mut rows = Vec::new();
    for r in 0..=r_max {
        for y in ctx.zp_units(nu) {
            let fused = u_combination(ctx, &tabs[..=r as usize], y, &rat(y as i64))?;
            let mut first = None;
            let mut compared = 0;
            for i in 0..=r {
                for n in 0..out_len {
                    let a = data.a_coefficient(ctx, r, i, n, y)?;
                    compared += 1;
                    if a != ring.from_rational(&fused.coeff(i as usize, n)) && first.is_none() {
                        first = Some((i, n));
                    }
                }
            }
            rows.push(TwoPathRow {
                check: "fourier_A".into(),
                nu,
                r,
                label: format!("y={y}"),
                compared,
                pass: first.is_none(),
                detail: match first {
                    None => "agree".into(),
                    Some((i, n)) => format!("first difference at layer {i}, q^{n}"),
                },
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementRow {
    pub object: String,
    pub nu: u32,
    pub r: u32,
    pub residues: usize,
    pub pass: bool,
}

/// Summing level `nu + 1` over the lifts of each residue recovers level `nu`,
/// for `g((a))`, `E_{r,k-l}((a))` and `Phi_r((y))`.
pub fn check_refinement(ctx: &RankinContext, nu: u32, r: u32, len: usize) -> Result<Vec<RefinementRow>> {
    let m = ctx.modulus(nu);
    let units = ctx.units(nu);
    let lifts = |a: u64| (0..ctx.p).map(move |j| a + j * m);
    let g = g_form(ctx, len);
    let mut g_ok = true;
    for &a in &units {
        let base = partial_form(&g, a, nu, ctx.n, ctx.p)?;
        let mut acc = partial_form(&g, a, nu + 1, ctx.n, ctx.p)?;
        for x in lifts(a).skip(1) {
            acc = acc.add(&partial_form(&g, x, nu + 1, ctx.n, ctx.p)?)?;
        }
        g_ok &= acc.first_difference(&base).is_none();
    }
    let e1 = EisensteinDistribution::new(r, ctx.w(), ctx.n, ctx.p, nu)?;
    let e2 = EisensteinDistribution::new(r, ctx.w(), ctx.n, ctx.p, nu + 1)?;
    let e_ok = units
        .par_iter()
        .map(|&a| {
            let base = e1.form(a, len)?;
            let mut acc = e2.form(a, len)?;
            for x in lifts(a).skip(1) {
                acc = acc.add(&e2.form(x, len)?)?;
            }
            Ok(acc.first_difference(&base).is_none())
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);
    let t1 = phi_table(ctx, nu, r, len)?;
    let t2 = phi_table(ctx, nu + 1, r, len)?;
    let mut phi_ok = true;
    for &y in &units {
        let mut acc = t2.get(y)?.clone();
        for x in lifts(y).skip(1) {
            acc = acc.add(t2.get(x)?)?;
        }
        phi_ok &= acc.first_difference(t1.get(y)?).is_none();
    }
    let row = |object: &str, pass| RefinementRow { object: object.into(), nu, r, residues: units.len(), pass };
    Ok(vec![row("g((a))", g_ok), row("E((a))", e_ok), row("Phi((y))", phi_ok)])
}

#[derive(Clone, Debug, Serialize)]
pub struct MellinReport {
    pub chi: String,
    pub chi_modulus: u64,
    pub r: u32,
    pub nu: u32,
    pub out_len: usize,
    /// Valuation of `U^(2nu) h`.
    pub after_u: Valuation,
    /// Valuation of `alpha^(-2nu) U^(2nu) h`.
    pub output: Valuation,
    pub coefficient_valuations: Vec<Vec<Valuation>>,
    /// `1 - b^(k-l-2r) psi conj(chi)(b)`, as printed in the interpolation formula.
    pub factor_stated: String,
    pub factor_stated_valuation: Valuation,
    /// `1 - b^(k-l-2r) psi conj(omega) conj(chi)^2 (b)`, the factor carried by `E^b`.
    pub factor_eisenstein: String,
    pub factor_eisenstein_valuation: Valuation,
    pub factor_zero: bool,
    pub note: String,
}

pub const ARCHIMEDEAN_NOTE: &str = "Petersson norms, the linear form l_{f,alpha} and the archimedean special values are not computed; the report gives the algebraic integrand alpha^(-2nu) U^(2nu) h with h = (-1)^r g(chi) E^b(psi conj(omega) conj(chi)^2)";

/// A `p`-adic field holding every value of `chi`, `psi` and `omega`.
pub fn padic_ring(ctx: &RankinContext, chi: &DirichletCharacter) -> Result<PadicField> {
    let n = arith::lcm(arith::lcm(chi.order(), ctx.psi.order()), ctx.omega.order());
    let t = arith::val_u64(n, ctx.p);
    let field = PadicField::cyclotomic(ctx.p, t, ctx.field.precision())?;
    chi.check_embeddable(&field)?;
    ctx.psi.check_embeddable(&field)?;
    ctx.omega.check_embeddable(&field)?;
    Ok(field)
}

/// `alpha^(-2nu) U^(2nu) h` for `chi` mod `p^nu` or `N p^nu`.
pub fn mellin_data(ctx: &RankinContext, chi: &DirichletCharacter, r: u32, out_len: usize) -> Result<MellinReport> {
    let chi_mod = chi.modulus();
    let lifted = match level_of(ctx, chi) {
        Ok(_) => chi.clone(),
        Err(_) => {
            let nu = arith::val_u64(chi_mod, ctx.p);
            if nu == 0 || arith::pow_u64(ctx.p, nu) != chi_mod {
                return Err(Error::Domain(format!("character modulus {chi_mod} is neither p^nu nor N p^nu")));
            }
            chi.lift(&ctx.y_group(nu)?)?
        }
    };
    let nu = level_of(ctx, &lifted)?;
    let field = padic_ring(ctx, &lifted)?;
    let need = required_input(ctx.p, nu, out_len);
    let h = phi_char_closed(ctx, &field, &lifted, r, need)?;
    let uh = op_u(&h, ctx.p, 2 * nu);
    let a_p = field.from_rational(&ctx.a_p);
    let psi_p = ctx.psi.eval(&field, ctx.p as i64)?;
    let roots = hecke_roots(&a_p, &psi_p, ctx.p, ctx.k, &field)?;
    let s = field.inv(&field.pow(&roots.alpha, 2 * nu as u64))?;
    let out = uh.scale(&s);
    let after_u = sup_norm_valuation(&uh, ctx.p)?;
    let output = sup_norm_valuation(&out, ctx.p)?;
    let coefficient_valuations = out.layers.iter().map(|l| l.iter().map(|c| c.valuation()).collect()).collect();
    let b = ctx.b as i64;
    let bw = arith::rat_pow(&rat(b), ctx.w() - 2 * r as i64);
    let psi_b = ctx.psi.lift(lifted.group())?.eval(&field, b)?;
    let chib = field.char_value(lifted.value(b).map(|z| z.inv()))?;
    let stated = field.sub(&field.one(), &field.scale_rational(&field.mul(&psi_b, &chib), &bw));
    let theta_b = ctx.theta(&lifted)?.eval(&field, b)?;
    let eis = field.sub(&field.one(), &field.scale_rational(&theta_b, &bw));
    let factor_zero = stated.is_zero() || eis.is_zero();
    Ok(MellinReport {
        chi: chi.label(),
        chi_modulus: chi_mod,
        r,
        nu,
        out_len,
        after_u,
        output,
        coefficient_valuations,
        factor_stated: approx_string(&stated),
        factor_stated_valuation: stated.valuation(),
        factor_eisenstein: approx_string(&eis),
        factor_eisenstein_valuation: eis.valuation(),
        factor_zero,
        note: ARCHIMEDEAN_NOTE.into(),
    })
}

/// Replace `g` by `s g`; every distribution is linear in `g`.
pub fn scale_g(ctx: &RankinContext, s: &BigRational) -> RankinContext {
    let mut out = ctx.clone();
    out.g = out.g.scale(s);
    out.g_valuation = match crate::padic::val_p(s, ctx.p).finite() {
        Some(v) => ctx.g_valuation.shift(v),
        None => Valuation::Infinity,
    };
    out
}
