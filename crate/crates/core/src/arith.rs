//! Small-integer number theory and exact rational helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Reduce a signed integer into `[0, m)`.
pub fn residue(x: i64, m: u64) -> u64 {
    (x as i128).rem_euclid(m as i128) as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, primes increasing.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Positive divisors of `n`, increasing.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (q, _)| acc / q * (q - 1))
}

/// p-adic valuation of a nonzero machine integer.
pub fn val_u64(mut n: u64, p: u64) -> u32 {
    assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Smallest primitive root modulo an odd prime.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let qs: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
    (2..p).find(|&g| qs.iter().all(|&q| mod_pow(g, (p - 1) / q, p) != 1)).expect("every prime has a primitive root")
}

/// Generator of the cyclic group `(Z/q^e)^x` for an odd prime `q`.
pub fn prime_power_generator(q: u64, e: u32) -> u64 {
    let g = primitive_root(q);
    if e == 1 {
        return g;
    }
    if mod_pow(g, q - 1, q * q) == 1 {
        g + q
    } else {
        g
    }
}

pub fn pow_u64(b: u64, e: u32) -> u64 {
    b.checked_pow(e).expect("modulus overflows u64")
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// `Gamma(x) / Gamma(x - k) = (x-1)(x-2)...(x-k)` as a polynomial identity in `x`.
pub fn gamma_ratio(x: i64, k: u64) -> BigInt {
    (1..=k as i64).fold(BigInt::one(), |acc, j| acc * BigInt::from(x - j))
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `b^e` for a possibly negative exponent.
pub fn rat_pow(b: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(b.clone(), e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

/// p-adic valuation of a nonzero big integer.
pub fn val_bigint(n: &BigInt, p: u64) -> u64 {
    assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn val_rational(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(val_bigint(x.numer(), p) as i64 - val_bigint(x.denom(), p) as i64)
}

/// Parse `"a"` or `"a/b"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
        Some((n, d)) => {
            let n = n.trim().parse::<BigInt>().ok()?;
            let d = d.trim().parse::<BigInt>().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
    }
}

pub fn rational_to_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Residue of a rational with denominator prime to `m`.
pub fn rational_residue(x: &BigRational, m: u64) -> Option<u64> {
    let mb = BigInt::from(m);
    let d = x.denom().mod_floor(&mb).to_u64()?;
    let dinv = mod_inv(d, m)?;
    let n = x.numer().mod_floor(&mb).to_u64()?;
    Some(((n as u128 * dinv as u128) % m as u128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(euler_phi(77), 60);
        assert_eq!(euler_phi(539), 420);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(11), 2);
        assert_eq!(mod_inv(3, 7), Some(5));
        assert_eq!(mod_inv(7, 49), None);
    }

    #[test]
    fn generator_lifts_past_wieferich_style_roots() {
        // 14 is a primitive root mod 29 with 14^28 = 1 mod 29^2.
        assert_eq!(mod_pow(14, 28, 29 * 29), 1);
        for (q, e) in [(3u64, 3u32), (7, 2), (11, 2), (29, 2)] {
            let m = pow_u64(q, e);
            let g = prime_power_generator(q, e);
            let order = (1..=euler_phi(m)).find(|&k| mod_pow(g, k, m) == 1).unwrap();
            assert_eq!(order, euler_phi(m));
        }
    }

    #[test]
    fn gamma_ratio_matches_factorial_quotient() {
        assert_eq!(gamma_ratio(10, 3), BigInt::from(9 * 8 * 7));
        assert_eq!(gamma_ratio(2, 3), BigInt::zero());
    }

    #[test]
    fn rationals_round_trip() {
        let x = parse_rational("-7/21").unwrap();
        assert_eq!(rational_to_string(&x), "-1/3");
        assert_eq!(val_rational(&x, 3), Some(-1));
        assert_eq!(rational_residue(&x, 7), Some(2));
        assert!(parse_rational("1/0").is_none());
    }
}
