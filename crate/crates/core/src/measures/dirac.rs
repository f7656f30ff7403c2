//! Finite combinations of Dirac masses at rational points of `Z_p^x`.

use num_rational::BigRational;

use super::context::RankinContext;
use crate::arith::{self, rat, rat_pow};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::ring::Ring;

#[derive(Clone, Debug)]
pub struct DiracMeasure<R: Ring> {
    pub ring: R,
    pub atoms: Vec<(BigRational, R::Elem)>,
}

impl<R: Ring> DiracMeasure<R> {
    /// `sum wt f(x)`; `f` returns `None` where the integrand vanishes.
    pub fn integrate<F>(&self, f: F) -> Result<R::Elem>
    where
        F: Fn(&BigRational) -> Result<Option<BigRational>>,
    {
        let mut acc = self.ring.zero();
        for (x, wt) in &self.atoms {
            if let Some(v) = f(x)? {
                acc = self.ring.add(&acc, &self.ring.scale_rational(wt, &v));
            }
        }
        Ok(acc)
    }

    /// `int chi(x) x^m`, with `chi` read on the residue of `x`.
    pub fn moment(&self, chi: &DirichletCharacter, m: u32) -> Result<R::Elem> {
        let ring = &self.ring;
        let mut acc = ring.zero();
        for (x, wt) in &self.atoms {
            let res = arith::rational_residue(x, chi.modulus())
                .ok_or_else(|| Error::Domain(format!("atom {x} is not integral at the modulus")))?;
            let c = chi.eval(ring, res as i64)?;
            let term = ring.scale_rational(&ring.mul(&c, wt), &num_traits::pow(x.clone(), m as usize));
            acc = ring.add(&acc, &term);
        }
        Ok(acc)
    }
}

/// `mu_b = delta_1 - b^w psi conj(omega)(b) delta_(b^-2)`.
pub fn mu_b<R: Ring>(ctx: &RankinContext, ring: &R) -> Result<DiracMeasure<R>> {
    let b = rat(ctx.b as i64);
    let po = ring.char_value(ctx.psi_omega_bar(ctx.b as i64))?;
    let wt = ring.neg(&ring.scale_rational(&po, &rat_pow(&b, ctx.w())));
    Ok(DiracMeasure { ring: ring.clone(), atoms: vec![(rat(1), ring.one()), (rat_pow(&b, -2), wt)] })
}

/// `1 - b^(w-2m) psi conj(omega)(b) conj(chi)^2(b)`, the value `mu_b` must give
/// `chi(x) x^m`.
pub fn mu_b_moment<R: Ring>(ctx: &RankinContext, ring: &R, chi: &DirichletCharacter, m: u32) -> Result<R::Elem> {
    let po = ring.char_value(ctx.psi_omega_bar(ctx.b as i64))?;
    let c = ring.char_value(chi.value(ctx.b as i64).map(|z| z.pow(-2)))?;
    let bw = rat_pow(&rat(ctx.b as i64), ctx.w() - 2 * m as i64);
    Ok(ring.sub(&ring.one(), &ring.scale_rational(&ring.mul(&po, &c), &bw)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::CharacterGroup;
    use crate::cyclo::CyclotomicField;
    use crate::measures::context::sample;

    #[test]
    fn moments_match() {
        let ctx = sample::context(20);
        let ring = CyclotomicField::new(42);
        let mu = mu_b(&ctx, &ring).unwrap();
        for modulus in [7u64, 49] {
            let group = CharacterGroup::new(modulus).unwrap();
            for chi in group.characters().iter().step_by(5) {
                for m in 0..4 {
                    assert_eq!(mu.moment(chi, m).unwrap(), mu_b_moment(&ctx, &ring, chi, m).unwrap());
                }
            }
        }
    }
}
