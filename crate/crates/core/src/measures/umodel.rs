//! `U` on the span of `f` and `Vf`, where `f | U = a_p f - psi(p) p^(k-1) Vf`
//! and `Vf | U = f`.

use serde::Serialize;

use super::context::RankinContext;
use crate::error::{Error, Result};
use crate::padic::{PadicElement, PadicField};
use crate::qexp::{op_u, FormMeta, Level, NearlyHolomorphicForm, QExpansion};
use crate::ring::{Ring, Valuation};

/// Row-major 2x2 matrix acting on coordinates `(c_f, c_Vf)`.
pub type Mat2 = [[PadicElement; 2]; 2];

#[derive(Clone, Debug)]
pub struct TwoDimUModel {
    pub field: PadicField,
    pub a_p: PadicElement,
    /// `psi(p) p^(k-1)`.
    pub c: PadicElement,
    pub alpha: PadicElement,
    pub alpha_prime: PadicElement,
}

/// Worst (smallest) valuation of each residual that should vanish.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectorReport {
    pub idempotent: Valuation,
    pub commutes: Valuation,
    pub complementary: Valuation,
    pub char_poly: Valuation,
    pub kills_other_root: Valuation,
    /// The bar every residual has to clear.
    pub required: Valuation,
    pub pass: bool,
}

impl TwoDimUModel {
    pub fn new(ctx: &RankinContext) -> Result<Self> {
        let field = ctx.field.clone();
        let a_p = field.from_rational(&ctx.a_p);
        let psi_p = ctx.psi.eval(&field, ctx.p as i64)?;
        let c = field.mul(&psi_p, &field.pow(&field.from_int(ctx.p as i64), (ctx.k - 1) as u64));
        let (alpha, alpha_prime) = (ctx.roots.alpha.clone(), ctx.roots.alpha_prime.clone());
        if field.sub(&alpha, &alpha_prime).is_zero() {
            return Err(Error::UnsupportedRamification("alpha = alpha' leaves no projector".into()));
        }
        Ok(TwoDimUModel { field, a_p, c, alpha, alpha_prime })
    }

    pub fn u_matrix(&self) -> Mat2 {
        let f = &self.field;
        [[self.a_p.clone(), f.one()], [f.neg(&self.c), f.zero()]]
    }

    fn identity(&self) -> Mat2 {
        let f = &self.field;
        [[f.one(), f.zero()], [f.zero(), f.one()]]
    }

    pub fn mat_mul(&self, a: &Mat2, b: &Mat2) -> Mat2 {
        let f = &self.field;
        let cell = |i: usize, j: usize| f.add(&f.mul(&a[i][0], &b[0][j]), &f.mul(&a[i][1], &b[1][j]));
        [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]]
    }

    fn lin(&self, a: &Mat2, s: &PadicElement, b: &Mat2, t: &PadicElement) -> Mat2 {
        let f = &self.field;
        let cell = |i: usize, j: usize| f.add(&f.mul(s, &a[i][j]), &f.mul(t, &b[i][j]));
        [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]]
    }

    /// `(U - beta) / (gamma - beta)`, the projector onto the `gamma` line.
    fn projector_onto(&self, gamma: &PadicElement, beta: &PadicElement) -> Result<Mat2> {
        let f = &self.field;
        let inv = f.inv(&f.sub(gamma, beta))?;
        Ok(self.lin(&self.u_matrix(), &inv, &self.identity(), &f.neg(&f.mul(beta, &inv))))
    }

    /// `pi_alpha = (U - alpha') / (alpha - alpha')`.
    pub fn projector(&self) -> Result<Mat2> {
        self.projector_onto(&self.alpha, &self.alpha_prime)
    }

    pub fn projector_prime(&self) -> Result<Mat2> {
        self.projector_onto(&self.alpha_prime, &self.alpha)
    }

    /// `M v` for coordinates `v = (c_f, c_Vf)`.
    pub fn apply(&self, m: &Mat2, v: &[PadicElement; 2]) -> [PadicElement; 2] {
        let f = &self.field;
        [
            f.add(&f.mul(&m[0][0], &v[0]), &f.mul(&m[0][1], &v[1])),
            f.add(&f.mul(&m[1][0], &v[0]), &f.mul(&m[1][1], &v[1])),
        ]
    }

    fn worst(&self, m: &Mat2) -> Valuation {
        m.iter().flatten().map(|x| x.valuation()).min().unwrap_or(Valuation::Infinity)
    }

    pub fn check(&self) -> Result<ProjectorReport> {
        let f = &self.field;
        let u = self.u_matrix();
        let pi = self.projector()?;
        let pi2 = self.projector_prime()?;
        let one = f.one();
        let neg = f.neg(&one);
        let idempotent = self.worst(&self.lin(&self.mat_mul(&pi, &pi), &one, &pi, &neg));
        let commutes = self.worst(&self.lin(&self.mat_mul(&pi, &u), &one, &self.mat_mul(&u, &pi), &neg));
        let complementary = self.worst(&self.lin(&self.lin(&pi, &one, &pi2, &one), &one, &self.identity(), &neg));
        // (U - alpha) pi_alpha = 0
        let shifted = self.lin(&u, &one, &self.identity(), &f.neg(&self.alpha));
        let kills_other_root = self.worst(&self.mat_mul(&shifted, &pi));
        let trace = f.sub(&f.add(&self.alpha, &self.alpha_prime), &self.a_p).valuation();
        let det = f.sub(&f.mul(&self.alpha, &self.alpha_prime), &self.c).valuation();
        // trace and determinant of the matrix itself: a_p and c by construction
        let char_poly = trace.min(det);
        // inverting alpha - alpha' costs its valuation in absolute precision
        let loss = f.sub(&self.alpha, &self.alpha_prime).valuation().finite().unwrap_or_default();
        let required = Valuation::int(f.precision()).shift(-loss * 2);
        let pass = [idempotent, commutes, complementary, kills_other_root, char_poly].iter().all(|v| *v >= required);
        Ok(ProjectorReport { idempotent, commutes, complementary, char_poly, kills_other_root, required, pass })
    }
}

/// `alpha^(-depth) U^depth`, truncated to what `U^depth` can see.
pub fn alpha_primary(
    form: &NearlyHolomorphicForm<PadicField>,
    alpha: &PadicElement,
    p: u64,
    depth: u32,
) -> Result<NearlyHolomorphicForm<PadicField>> {
    let field = &form.ring;
    let s = field.inv(&field.pow(alpha, depth as u64))?;
    let mut out = op_u(form, p, depth).scale(&s);
    out.meta.note = format!("alpha^-{depth} U^{depth}({})", form.meta.note);
    Ok(out)
}

/// `c_f f + c_Vf Vf` as a series, from the coefficients of `f`.
pub fn model_series(
    field: &PadicField,
    f: &QExpansion<PadicField>,
    p: u64,
    v: &[PadicElement; 2],
) -> QExpansion<PadicField> {
    let coeffs = (0..f.len())
        .map(|n| {
            let vf = if n as u64 % p == 0 { f.coeff(n / p as usize).clone() } else { field.zero() };
            field.add(&field.mul(&v[0], f.coeff(n)), &field.mul(&v[1], &vf))
        })
        .collect();
    QExpansion::new(field.clone(), coeffs)
}

/// `v(alpha^-d U^d (Vf) - pi_alpha(Vf))` on the first `out_len` coefficients, per `d`.
pub fn projector_convergence(ctx: &RankinContext, depths: &[u32], out_len: usize) -> Result<Vec<(u32, Valuation)>> {
    let model = TwoDimUModel::new(ctx)?;
    let field = &model.field;
    let f = ctx.f.to_ring(field);
    let pi = model.projector()?;
    let target = model.apply(&pi, &[field.zero(), field.one()]);
    let mut out = Vec::new();
    for &d in depths {
        let need = (out_len - 1) * crate::arith::pow_u64(ctx.p, d) as usize + 1;
        if f.len() < need.div_ceil(ctx.p as usize).max(out_len) {
            return Err(Error::InsufficientTruncation(format!(
                "depth {d} needs f to q^{}",
                need.div_ceil(ctx.p as usize).max(out_len)
            )));
        }
        let vf = NearlyHolomorphicForm::holomorphic(extend_vf(field, &f, ctx.p, need), meta(ctx));
        let it = alpha_primary(&vf, &model.alpha, ctx.p, d)?;
        let exact = model_series(field, &f.truncate(out_len), ctx.p, &target);
        let mut worst = Valuation::Infinity;
        for n in 0..out_len {
            worst = worst.min(field.sub(&it.coeff(0, n), exact.coeff(n)).valuation());
        }
        out.push((d, worst));
    }
    Ok(out)
}

fn meta(ctx: &RankinContext) -> FormMeta {
    FormMeta::new(ctx.k, Level::one().with_exponent(ctx.p, 1), "triv", "Vf")
}

/// `Vf` to `q^len`, which only needs `f` to `q^(len/p)`.
fn extend_vf(field: &PadicField, f: &QExpansion<PadicField>, p: u64, len: usize) -> QExpansion<PadicField> {
    let coeffs =
        (0..len).map(|n| if n as u64 % p == 0 { f.coeff(n / p as usize).clone() } else { field.zero() }).collect();
    QExpansion::new(field.clone(), coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::context::sample;
    use crate::qexp::make_f0;

    #[test]
    fn projector_identities() {
        let ctx = sample::context_with(40, 20);
        let model = TwoDimUModel::new(&ctx).unwrap();
        let rep = model.check().unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn f0_is_a_fixed_point() {
        let ctx = sample::context_with(400, 20);
        let model = TwoDimUModel::new(&ctx).unwrap();
        let field = &model.field;
        let f = ctx.f.to_ring(field);
        let f0 = make_f0(&f, &model.alpha_prime, 7);
        let form = NearlyHolomorphicForm::holomorphic(f0.clone(), meta(&ctx));
        for d in 1..=3 {
            let it = alpha_primary(&form, &model.alpha, 7, d).unwrap();
            for n in 0..it.len() {
                let diff = field.sub(&it.coeff(0, n), f0.coeff(n)).valuation();
                assert!(diff >= Valuation::int(field.precision() - 12 * d as i64), "d={d} n={n} {diff}");
            }
        }
    }

    #[test]
    fn iteration_converges_to_projector() {
        let ctx = sample::context_with(400, 20);
        let rows = projector_convergence(&ctx, &[1, 2, 3], 8).unwrap();
        // error is (alpha'/alpha)^d pi_alpha'(Vf): slope 9 per step at p = 7
        for w in rows.windows(2) {
            let (a, b) = (w[0].1.finite().unwrap(), w[1].1.finite().unwrap());
            assert_eq!(b - a, crate::measures::Ratio::from_integer(9), "{rows:?}");
        }
    }
}
