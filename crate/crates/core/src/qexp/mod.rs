//! Truncated q-expansions and nearly holomorphic forms over a generic ring.

mod generators;
mod io;
mod ops;

pub use generators::{
    builtin_form, delta, e4_delta, eisenstein_series, eta2_eta11, eta_quotient, eta_quotient_logderiv, BuiltinForm,
};
pub use io::{form_from_json, form_to_json, FormFile};
pub use ops::{
    make_f0, mul, mul_then_u, op_tp_check, op_u, op_v, partial_form, series_mul, sup_norm_valuation, TpCheck,
};

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::ring::{RationalField, Ring};

/// A level kept as a formal product of prime powers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Level {
    factors: BTreeMap<u64, u32>,
}

impl Level {
    pub fn one() -> Self {
        Level::default()
    }

    pub fn new(n: u64) -> Self {
        Level { factors: arith::factorize(n).into_iter().collect() }
    }

    pub fn exponent(&self, q: u64) -> u32 {
        self.factors.get(&q).copied().unwrap_or(0)
    }

    pub fn with_exponent(&self, q: u64, e: u32) -> Self {
        let mut f = self.factors.clone();
        if e == 0 {
            f.remove(&q);
        } else {
            f.insert(q, e);
        }
        Level { factors: f }
    }

    pub fn lcm(&self, other: &Level) -> Level {
        let mut f = self.factors.clone();
        for (q, e) in &other.factors {
            let slot = f.entry(*q).or_insert(0);
            *slot = (*slot).max(*e);
        }
        Level { factors: f }
    }

    /// Level of a form supported on `n = a mod N p^nu`: `N^2 p^(2 nu)`.
    pub fn partial(n: u64, p: u64, nu: u32) -> Level {
        let mut f: BTreeMap<u64, u32> = arith::factorize(n).into_iter().map(|(q, e)| (q, 2 * e)).collect();
        if nu > 0 {
            *f.entry(p).or_insert(0) += 2 * nu;
        }
        Level { factors: f }
    }

    pub fn value(&self) -> Option<u64> {
        self.factors.iter().try_fold(1u64, |acc, (q, e)| acc.checked_mul(q.checked_pow(*e)?))
    }

    pub fn factors(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.factors.iter().map(|(q, e)| (*q, *e))
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.factors.iter().map(|(q, e)| if *e == 1 { q.to_string() } else { format!("{q}^{e}") }).collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormMeta {
    pub weight: i64,
    pub level: Level,
    pub character: String,
    /// Free-form history of how the form was produced.
    pub note: String,
}

impl FormMeta {
    pub fn new(weight: i64, level: Level, character: &str, note: &str) -> Self {
        FormMeta { weight, level, character: character.into(), note: note.into() }
    }
}

/// A power series in `q`, known modulo `q^len`.
#[derive(Clone, Debug)]
pub struct QExpansion<R: Ring> {
    pub ring: R,
    pub coeffs: Vec<R::Elem>,
}

impl<R: Ring> QExpansion<R> {
    pub fn new(ring: R, coeffs: Vec<R::Elem>) -> Self {
        QExpansion { ring, coeffs }
    }

    pub fn zeros(ring: R, len: usize) -> Self {
        let z = ring.zero();
        QExpansion { coeffs: vec![z; len], ring }
    }

    /// Truncation: coefficients are known for `n < len()`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, n: usize) -> &R::Elem {
        &self.coeffs[n]
    }

    pub fn truncate(&self, len: usize) -> Self {
        QExpansion::new(self.ring.clone(), self.coeffs[..len.min(self.len())].to_vec())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.len().min(other.len());
        let c = (0..len).map(|n| self.ring.add(&self.coeffs[n], &other.coeffs[n])).collect();
        QExpansion::new(self.ring.clone(), c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.len().min(other.len());
        let c = (0..len).map(|n| self.ring.sub(&self.coeffs[n], &other.coeffs[n])).collect();
        QExpansion::new(self.ring.clone(), c)
    }

    pub fn scale(&self, s: &R::Elem) -> Self {
        let c = self.coeffs.iter().map(|x| self.ring.mul(x, s)).collect();
        QExpansion::new(self.ring.clone(), c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    /// Coefficientwise equality on the common truncation.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let len = self.len().min(other.len());
        (0..len).all(|n| self.ring.equal(&self.coeffs[n], &other.coeffs[n]))
    }
}

impl QExpansion<RationalField> {
    pub fn from_rationals(coeffs: Vec<BigRational>) -> Self {
        QExpansion::new(RationalField, coeffs)
    }

    /// Map into another ring through `from_rational`.
    pub fn to_ring<S: Ring>(&self, ring: &S) -> QExpansion<S> {
        QExpansion::new(ring.clone(), self.coeffs.iter().map(|c| ring.from_rational(c)).collect())
    }
}

/// `sum_i F_i(q) (4 pi y)^(-i)`. Layer `i` holds `F_i`; all layers share one truncation.
#[derive(Clone, Debug)]
pub struct NearlyHolomorphicForm<R: Ring> {
    pub ring: R,
    pub layers: Vec<Vec<R::Elem>>,
    pub meta: FormMeta,
}

impl<R: Ring> NearlyHolomorphicForm<R> {
    pub fn new(ring: R, layers: Vec<Vec<R::Elem>>, meta: FormMeta) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Domain("a form needs at least one layer".into()));
        }
        let len = layers[0].len();
        if layers.iter().any(|l| l.len() != len) {
            return Err(Error::Domain("layers must share one truncation".into()));
        }
        Ok(NearlyHolomorphicForm { ring, layers, meta })
    }

    pub fn zeros(ring: R, depth: usize, len: usize, meta: FormMeta) -> Self {
        let z = ring.zero();
        NearlyHolomorphicForm { layers: vec![vec![z; len]; depth + 1], ring, meta }
    }

    pub fn holomorphic(q: QExpansion<R>, meta: FormMeta) -> Self {
        NearlyHolomorphicForm { ring: q.ring, layers: vec![q.coeffs], meta }
    }

    pub fn len(&self) -> usize {
        self.layers[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Highest layer index carried (not necessarily nonzero).
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn coeff(&self, i: usize, n: usize) -> R::Elem {
        if i < self.layers.len() {
            self.layers[i][n].clone()
        } else {
            self.ring.zero()
        }
    }

    pub fn layer(&self, i: usize) -> QExpansion<R> {
        QExpansion::new(self.ring.clone(), self.layers[i].clone())
    }

    pub fn is_holomorphic(&self) -> bool {
        self.layers[1..].iter().all(|l| l.iter().all(|c| self.ring.is_zero(c)))
    }

    pub fn truncate(&self, len: usize) -> Self {
        let layers = self.layers.iter().map(|l| l[..len.min(l.len())].to_vec()).collect();
        NearlyHolomorphicForm { ring: self.ring.clone(), layers, meta: self.meta.clone() }
    }

    /// Pad with zero layers up to `depth`.
    pub fn with_depth(mut self, depth: usize) -> Self {
        let len = self.len();
        while self.layers.len() <= depth {
            self.layers.push(vec![self.ring.zero(); len]);
        }
        self
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.ring.same_ring(&other.ring) {
            return Err(Error::RingMismatch(format!("{} vs {}", self.ring.tag(), other.ring.tag())));
        }
        let len = self.len().min(other.len());
        let depth = self.depth().max(other.depth());
        let layers = (0..=depth)
            .map(|i| {
                (0..len)
                    .map(|n| match (self.layers.get(i), other.layers.get(i)) {
                        (Some(a), Some(b)) => self.ring.add(&a[n], &b[n]),
                        (Some(a), None) => a[n].clone(),
                        (None, Some(b)) => b[n].clone(),
                        (None, None) => unreachable!(),
                    })
                    .collect()
            })
            .collect();
        let meta = FormMeta { level: self.meta.level.lcm(&other.meta.level), ..self.meta.clone() };
        Ok(NearlyHolomorphicForm { ring: self.ring.clone(), layers, meta })
    }

    pub fn scale(&self, s: &R::Elem) -> Self {
        let layers = self.layers.iter().map(|l| l.iter().map(|c| self.ring.mul(c, s)).collect()).collect();
        NearlyHolomorphicForm { ring: self.ring.clone(), layers, meta: self.meta.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&self.ring.from_int(-1)))
    }

    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(|l| l.iter().all(|c| self.ring.is_zero(c)))
    }

    /// First `(layer, n)` where the forms differ on their common truncation.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        let len = self.len().min(other.len());
        let depth = self.depth().max(other.depth());
        for i in 0..=depth {
            for n in 0..len {
                if !self.ring.equal(&self.coeff(i, n), &other.coeff(i, n)) {
                    return Some((i, n));
                }
            }
        }
        None
    }
}

impl NearlyHolomorphicForm<RationalField> {
    pub fn to_ring<S: Ring>(&self, ring: &S) -> NearlyHolomorphicForm<S> {
        NearlyHolomorphicForm {
            ring: ring.clone(),
            layers: self.layers.iter().map(|l| l.iter().map(|c| ring.from_rational(c)).collect()).collect(),
            meta: self.meta.clone(),
        }
    }
}
