//! Bernoulli numbers (`B_1 = -1/2`) and Bernoulli polynomials.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith;

/// `B_0, ..., B_n`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b = vec![BigRational::zero(); n + 1];
    b[0] = BigRational::one();
    for m in 1..=n {
        // sum_{j<=m} C(m+1, j) B_j = 0
        let mut s = BigRational::zero();
        for (j, bj) in b.iter().enumerate().take(m) {
            if !bj.is_zero() {
                s += BigRational::from_integer(arith::binomial(m as u64 + 1, j as u64)) * bj;
            }
        }
        b[m] = -s / BigRational::from_integer((m as i64 + 1).into());
    }
    b
}

pub fn bernoulli(n: usize) -> BigRational {
    bernoulli_numbers(n).pop().unwrap()
}

/// `B_m(x) = sum_j C(m, j) B_j x^(m-j)`.
pub fn bernoulli_polynomial(m: usize, x: &BigRational) -> BigRational {
    let b = bernoulli_numbers(m);
    let mut acc = BigRational::zero();
    let mut xp = BigRational::one();
    // accumulate from j = m down to 0 so x^(m-j) grows
    for j in (0..=m).rev() {
        if !b[j].is_zero() {
            acc += BigRational::from_integer(arith::binomial(m as u64, j as u64)) * &b[j] * &xp;
        }
        xp *= x;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_frac};

    #[test]
    fn known_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], rat_frac(-1, 2));
        assert_eq!(b[2], rat_frac(1, 6));
        assert_eq!(b[3], rat(0));
        assert_eq!(b[4], rat_frac(-1, 30));
        assert_eq!(b[12], rat_frac(-691, 2730));
    }

    #[test]
    fn polynomial_values() {
        assert_eq!(bernoulli_polynomial(1, &rat_frac(1, 3)), rat_frac(-1, 6));
        // B_m(1) = B_m for m != 1
        for m in 2..10 {
            assert_eq!(bernoulli_polynomial(m, &rat(1)), bernoulli(m));
        }
        // B_m(x+1) - B_m(x) = m x^(m-1)
        let x = rat_frac(2, 7);
        for m in 1..8usize {
            let d = bernoulli_polynomial(m, &(&x + rat(1))) - bernoulli_polynomial(m, &x);
            assert_eq!(d, rat(m as i64) * num_traits::pow(x.clone(), m - 1));
        }
    }
}
