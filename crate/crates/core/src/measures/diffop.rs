//! Laurent polynomials in `(y, z)` and the operator
//! `D = z^(w-i) d/dz z^(-(w-i-1)) d/dz`.
//!
//! The polynomial integrated against `mu_b` satisfies
//! `P_{r,i}(z) = z^i / i! D^i (z - y)^r`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{self, rat};

/// `sum c_(a, e) y^a z^e` with `e` possibly negative.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Laurent {
    terms: BTreeMap<(u32, i64), BigRational>,
}

impl Laurent {
    pub fn monomial(c: BigRational, ya: u32, ze: i64) -> Self {
        let mut l = Laurent::default();
        l.push(ya, ze, c);
        l
    }

    fn push(&mut self, ya: u32, ze: i64, c: BigRational) {
        let slot = self.terms.entry((ya, ze)).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(ya, ze));
        }
    }

    /// `(z - y)^r`.
    pub fn shifted_power(r: u32) -> Self {
        let mut l = Laurent::default();
        for j in 0..=r {
            let c = BigRational::from_integer(arith::binomial(r as u64, j as u64))
                * crate::ring::neg_one_pow((r - j) as u64);
            l.push(r - j, j as i64, c);
        }
        l
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(a, e), c) in &other.terms {
            out.push(a, e, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = Laurent::default();
        for (&(a, e), c) in &self.terms {
            out.push(a, e, c * s);
        }
        out
    }

    pub fn shift_z(&self, by: i64) -> Self {
        Laurent { terms: self.terms.iter().map(|(&(a, e), c)| ((a, e + by), c.clone())).collect() }
    }

    pub fn dz(&self) -> Self {
        let mut out = Laurent::default();
        for (&(a, e), c) in &self.terms {
            if e != 0 {
                out.push(a, e - 1, c * rat(e));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, y: &BigRational, z: &BigRational) -> BigRational {
        self.terms.iter().map(|(&(a, e), c)| c * num_traits::pow(y.clone(), a as usize) * arith::rat_pow(z, e)).sum()
    }
}

/// One application of `z^(w-i) d/dz z^(-(w-i-1)) d/dz`.
pub fn apply_d(f: &Laurent, w: i64, i: u32) -> Laurent {
    let s = w - i as i64;
    f.dz().shift_z(-(s - 1)).dz().shift_z(s)
}

/// `z^i / i! D^i (z - y)^r`.
pub fn via_operator(r: u32, i: u32, w: i64) -> Laurent {
    let mut f = Laurent::shifted_power(r);
    for _ in 0..i {
        f = apply_d(&f, w, i);
    }
    f.shift_z(i as i64)
        .scale(&(BigRational::from_integer(1.into()) / BigRational::from_integer(arith::factorial(i as u64))))
}

/// The same polynomial written out term by term.
pub fn explicit(r: u32, i: u32, w: i64) -> Laurent {
    let mut out = Laurent::default();
    for rp in i..=r {
        let c = BigRational::from_integer(arith::binomial(r as u64, rp as u64))
            * crate::ring::neg_one_pow((r - rp) as u64)
            * crate::eisenstein::whittaker(w - rp as i64, rp).layer_weight(i);
        out = out.add(&Laurent::monomial(c, r - rp, rp as i64));
    }
    out
}

/// `Ok` when the two forms agree for every `i <= r <= r_max`.
pub fn diff_operator_check(r_max: u32, w: i64) -> Result<usize, (u32, u32)> {
    let mut checked = 0;
    for r in 0..=r_max {
        for i in 0..=r {
            if via_operator(r, i, w) != explicit(r, i, w) {
                return Err((r, i));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn operator_identity() {
        for w in [4, 5, 10, 11] {
            assert!(diff_operator_check(w as u32 - 1, w).is_ok(), "w = {w}");
        }
    }

    #[test]
    fn small_case_by_hand() {
        // r = 1, i = 1: z D (z - y) = z * z^(w-1) d/dz z^(-(w-2)) = -(w-2) z
        let f = via_operator(1, 1, 10);
        assert_eq!(f, Laurent::monomial(rat(-8), 0, 1));
    }

    proptest! {
        #[test]
        fn evaluation_agrees(r in 0u32..5, di in 0u32..5, ynum in -20i64..20, znum in 1i64..30) {
            let i = di.min(r);
            let (y, z) = (rat(ynum), rat(znum) / rat(7));
            let a = via_operator(r, i, 12).eval(&y, &z);
            let b = explicit(r, i, 12).eval(&y, &z);
            prop_assert_eq!(a, b);
        }
    }
}
