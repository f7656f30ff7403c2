//! Exact and p-adic machinery for Rankin-Selberg type p-adic measures built
//! from a finite-slope eigenform and a family of nearly holomorphic Eisenstein
//! distributions.

pub mod arith;
pub mod bernoulli;
pub mod characters;
pub mod cyclo;
pub mod eisenstein;
pub mod error;
pub mod measures;
pub mod padic;
pub mod qexp;
pub mod ring;

pub use error::{Error, Result};
pub use ring::{RationalField, Ring, RootOfUnity, Valuation};
