use super::newton::{newton_polygon, NewtonPolygon};
use super::{PadicElement, PadicField};
use crate::error::{Error, Result};
use crate::ring::{Ring, Valuation};

/// Roots of `X^2 - a_p X + psi(p) p^(k-1)`, ordered so that `v(alpha) < v(alpha')`.
#[derive(Clone, Debug)]
pub struct HeckeRoots {
    pub alpha: PadicElement,
    pub alpha_prime: PadicElement,
    pub polygon: NewtonPolygon,
    /// Iterations the fixed-point solver needed.
    pub iterations: usize,
}

impl HeckeRoots {
    pub fn slope(&self) -> Valuation {
        self.alpha.valuation()
    }
}

/// Split the Hecke polynomial into its two roots.
///
/// The small root is the fixed point of `x -> a_p - c/x` started at `a_p`,
/// where `c = psi(p) p^(k-1)`. The map contracts by `p^(v(c) - 2 v(a_p))`, so
/// the iteration only converges when the slopes differ; equal or fractional
/// slopes are refused.
pub fn hecke_roots(a_p: &PadicElement, psi_p: &PadicElement, p: u64, k: i64, field: &PadicField) -> Result<HeckeRoots> {
    if field.prime() != p {
        return Err(Error::RingMismatch(format!("field is {}-adic, polynomial is at {p}", field.prime())));
    }
    if psi_p.valuation() != Valuation::int(0) {
        return Err(Error::Domain("psi(p) must be a unit".into()));
    }
    let pk = field.pow(&field.from_int(p as i64), (k - 1) as u64);
    let c = field.mul(psi_p, &pk);
    let polygon = newton_polygon(&[(0, c.valuation()), (1, a_p.valuation()), (2, Valuation::int(0))])?;
    let roots = polygon.root_valuations();
    if roots.len() != 2 || roots[0] == roots[1] {
        return Err(Error::UnsupportedRamification(
            "Hecke polynomial has equal slopes; roots are not separated over this field".into(),
        ));
    }
    if roots.iter().any(|r| !r.is_integer()) && field.ramification() == 1 {
        return Err(Error::UnsupportedRamification(format!(
            "fractional slopes {}/{} need a ramified extension",
            roots[0].numer(),
            roots[0].denom()
        )));
    }
    let target = Valuation::Finite(roots[0]);
    let mut alpha = a_p.clone();
    let mut iterations = 0;
    let cap = (field.precision() as usize + 2) * field.ramification() + 8;
    loop {
        iterations += 1;
        let next = field.sub(a_p, &field.mul(&c, &field.inv(&alpha)?));
        let done = field.equal(&next, &alpha);
        alpha = next;
        if done || iterations >= cap {
            break;
        }
    }
    let alpha_prime = field.sub(a_p, &alpha);
    if alpha.valuation() != target || alpha_prime.valuation() != Valuation::Finite(roots[1]) {
        return Err(Error::InsufficientPrecision(format!(
            "root valuations {:?}/{:?} do not match the Newton polygon",
            alpha.valuation(),
            alpha_prime.valuation()
        )));
    }
    Ok(HeckeRoots { alpha, alpha_prime, polygon, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith;

    fn residual(field: &PadicField, x: &PadicElement, a: i64, c: &PadicElement) -> Valuation {
        let ap = field.from_int(a);
        let v = field.add(&field.sub(&field.mul(x, x), &field.mul(&ap, x)), c);
        v.valuation()
    }

    #[test]
    fn delta_at_seven() {
        let k = PadicField::new(7, 40).unwrap();
        let roots = hecke_roots(&k.from_int(-16744), &k.one(), 7, 12, &k).unwrap();
        assert_eq!(roots.alpha.valuation(), Valuation::int(1));
        assert_eq!(roots.alpha_prime.valuation(), Valuation::int(10));
        let c = k.from_rational(&arith::rat(7i64.pow(11)));
        assert!(residual(&k, &roots.alpha, -16744, &c) >= Valuation::int(40));
        let sum = k.add(&roots.alpha, &roots.alpha_prime);
        assert!(k.equal(&sum, &k.from_int(-16744)));
        let prod = k.mul(&roots.alpha, &roots.alpha_prime);
        assert!(k.sub(&prod, &c).valuation() >= Valuation::int(40));
    }

    #[test]
    fn ordinary_root_is_a_unit() {
        let k = PadicField::new(11, 30).unwrap();
        let roots = hecke_roots(&k.from_int(534612), &k.one(), 11, 12, &k).unwrap();
        assert_eq!(roots.alpha.valuation(), Valuation::int(0));
        assert_eq!(roots.alpha_prime.valuation(), Valuation::int(11));
    }

    #[test]
    fn vanishing_trace_is_refused() {
        let k = PadicField::new(7, 20).unwrap();
        assert!(matches!(hecke_roots(&k.zero(), &k.one(), 7, 12, &k), Err(Error::UnsupportedRamification(_))));
    }
}
