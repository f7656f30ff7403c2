use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use crate::arith;
use crate::characters::{CharacterGroup, DirichletCharacter};
use crate::error::{Error, Result};
use crate::padic::{hecke_roots, HeckeRoots, PadicElement, PadicField};
use crate::qexp::{sup_norm_valuation, NearlyHolomorphicForm, QExpansion};
use crate::ring::{RationalField, Ring, RootOfUnity, Valuation};

/// Which compact open the distributions are evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OpenKind {
    /// `y + (N p^nu)` in `Y`.
    Y,
    /// `y + (p^nu)` in `Z_p^x`, with trivial tame character.
    Zp,
}

/// A compact open `y + (M)`; `M = N p^nu` for [`OpenKind::Y`] and `p^nu` for
/// [`OpenKind::Zp`]. `y` is the least positive representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OpenSet {
    pub y: u64,
    pub nu: u32,
    pub kind: OpenKind,
    pub modulus: u64,
}

impl OpenSet {
    pub fn new(ctx: &RankinContext, y: u64, nu: u32, kind: OpenKind) -> Result<Self> {
        let modulus = match kind {
            OpenKind::Y => ctx.n * arith::pow_u64(ctx.p, nu),
            OpenKind::Zp => arith::pow_u64(ctx.p, nu),
        };
        let unit = match kind {
            OpenKind::Y => arith::gcd(y, ctx.n * ctx.p) == 1,
            OpenKind::Zp => y % ctx.p != 0,
        };
        if !unit {
            return Err(Error::Domain(format!("{y} is not a unit modulo {modulus}")));
        }
        let y = y % modulus;
        Ok(OpenSet { y: if y == 0 { modulus } else { y }, nu, kind, modulus })
    }

    /// The `p` lifts at level `nu + 1`.
    pub fn lifts(&self, p: u64) -> Vec<OpenSet> {
        (0..p)
            .map(|j| OpenSet {
                y: self.y + j * self.modulus,
                nu: self.nu + 1,
                kind: self.kind,
                modulus: self.modulus * p,
            })
            .collect()
    }

    pub fn contains(&self, x: u64) -> bool {
        x % self.modulus == self.y % self.modulus
    }
}

/// Everything fixed by a choice of `(f, g, p, N, b)`.
#[derive(Clone, Debug)]
pub struct RankinContext {
    pub p: u64,
    pub n: u64,
    pub b: u64,
    pub k: i64,
    pub l: i64,
    pub f: QExpansion<RationalField>,
    pub g: QExpansion<RationalField>,
    pub psi: DirichletCharacter,
    pub omega: DirichletCharacter,
    pub field: PadicField,
    pub a_p: BigRational,
    pub roots: HeckeRoots,
    pub g_valuation: Valuation,
}

impl RankinContext {
    /// Validates the data and splits the Hecke polynomial of `f` at `p`.
    ///
    /// Refuses the configuration unless `2 (floor(v_p(alpha)) + 1) <= k - l`,
    /// since otherwise there are too few distributions to glue.
    pub fn new(
        f: &NearlyHolomorphicForm<RationalField>,
        g: &NearlyHolomorphicForm<RationalField>,
        p: u64,
        n: u64,
        b: u64,
        precision: i64,
    ) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        if n == 0 || n % p == 0 {
            return Err(Error::Domain(format!("tame level {n} must be positive and prime to {p}")));
        }
        if arith::gcd(b, n * p) != 1 {
            return Err(Error::Domain(format!("b = {b} must be prime to {}", n * p)));
        }
        for (name, form) in [("f", f), ("g", g)] {
            if !form.is_holomorphic() {
                return Err(Error::UnsupportedOperand(format!("{name} must be holomorphic")));
            }
            let lv = form.meta.level.value().unwrap_or(0);
            if lv == 0 || n % lv != 0 {
                return Err(Error::Domain(format!("level of {name} ({}) must divide N = {n}", form.meta.level)));
            }
        }
        let (k, l) = (f.meta.weight, g.meta.weight);
        if k <= l {
            return Err(Error::Domain(format!("need k > l, got k = {k}, l = {l}")));
        }
        let fq = f.layer(0);
        if fq.len() <= p as usize {
            return Err(Error::InsufficientPrecision(format!("need a_{p}, f is known to q^{}", fq.len())));
        }
        let group = CharacterGroup::new(n)?;
        let psi = group.parse(&f.meta.character)?;
        let omega = group.parse(&g.meta.character)?;
        let field = PadicField::new(p, precision)?;
        let a_p = fq.coeff(p as usize).clone();
        let psi_p = psi.eval(&field, p as i64)?;
        let roots = hecke_roots(&field.from_rational(&a_p), &psi_p, p, k, &field)?;
        let slope = roots.slope().finite().expect("finite slope");
        let h = slope.floor().to_integer() + 1;
        if 2 * h > k - l {
            return Err(Error::Hypothesis(format!(
                "2(\u{230a}v_p(\u{3b1})\u{230b}+1) \u{2264} k\u{2212}l fails: 2*{h} > {k}-{l} = {}",
                k - l
            )));
        }
        let g_valuation = sup_norm_valuation(g, p)?;
        Ok(RankinContext { p, n, b, k, l, f: fq, g: g.layer(0), psi, omega, field, a_p, roots, g_valuation })
    }

    /// `k - l`, the weight of the Eisenstein factor.
    pub fn w(&self) -> i64 {
        self.k - self.l
    }

    pub fn slope(&self) -> Valuation {
        self.roots.slope()
    }

    pub fn alpha(&self) -> &PadicElement {
        &self.roots.alpha
    }

    pub fn modulus(&self, nu: u32) -> u64 {
        self.n * arith::pow_u64(self.p, nu)
    }

    /// `(Z / N p^nu)^x`.
    pub fn y_group(&self, nu: u32) -> Result<Arc<CharacterGroup>> {
        CharacterGroup::new(self.modulus(nu))
    }

    pub fn units(&self, nu: u32) -> Vec<u64> {
        let m = self.modulus(nu);
        (1..m).filter(|&a| arith::gcd(a, m) == 1).collect()
    }

    /// Representatives of `(Z/p^nu)^x`.
    pub fn zp_units(&self, nu: u32) -> Vec<u64> {
        let m = arith::pow_u64(self.p, nu);
        (1..m).filter(|&a| a % self.p != 0).collect()
    }

    /// `psi(a) conj(omega(a))` as a root of unity, `None` off the units mod `N`.
    pub fn psi_omega_bar(&self, a: i64) -> Option<RootOfUnity> {
        Some(self.psi.value(a)?.mul(&self.omega.value(a)?.inv()))
    }

    /// The same, as a rational sign; fails for non-real characters.
    pub fn psi_omega_bar_rational(&self, a: i64) -> Result<BigRational> {
        RationalField.char_value(self.psi_omega_bar(a))
    }

    /// `b_n`, checking the stored truncation.
    pub fn g_coeff(&self, n: usize) -> Result<&BigRational> {
        self.g.coeffs.get(n).ok_or_else(|| {
            Error::InsufficientTruncation(format!("g is known to q^{}, coefficient {n} requested", self.g.len()))
        })
    }

    pub fn require_g(&self, len: usize) -> Result<()> {
        if self.g.len() < len {
            return Err(Error::InsufficientTruncation(format!(
                "g is known to q^{}, the computation needs q^{len}",
                self.g.len()
            )));
        }
        Ok(())
    }

    /// `theta = psi conj(omega) conj(chi)^2` for `chi` mod `N p^nu`.
    pub fn theta(&self, chi: &DirichletCharacter) -> Result<DirichletCharacter> {
        let group = chi.group().clone();
        let po = self.psi.lift(&group)?.mul(&self.omega.lift(&group)?.conj())?;
        po.mul(&chi.pow(-2))
    }

    /// `v_p(r!) - v_p(g)`, the constant in the divisibility bound.
    pub fn divisibility_constant(&self, r: u32) -> Ratio {
        let vr = (1..=r as u64).map(|j| arith::val_u64(j, self.p) as i64).sum::<i64>();
        let vg = self.g_valuation.finite().unwrap_or_else(|| num_rational::Ratio::from_integer(0));
        num_rational::Ratio::from_integer(vr) - vg
    }
}

pub type Ratio = num_rational::Ratio<i64>;

#[cfg(test)]
pub(crate) mod sample {
    use super::*;
    use crate::qexp::BuiltinForm;

    /// `f = Delta`, `g = eta(z)^2 eta(11z)^2`, `p = 7`, `N = 11`, `b = 2`.
    pub fn context(g_len: usize) -> RankinContext {
        context_with(30, g_len)
    }

    pub fn context_with(f_len: usize, g_len: usize) -> RankinContext {
        let f = BuiltinForm::Delta.form(f_len).unwrap();
        let g = BuiltinForm::Eta2Eta11.form(g_len).unwrap();
        RankinContext::new(&f, &g, 7, 11, 2, 30).unwrap()
    }
}
