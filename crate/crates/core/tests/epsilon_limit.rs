//! The constant term of `E_{r,l}((a))` against a floating-point evaluation of
//! `Gamma(l+s)/Gamma(l+2s) zeta(1-l-2s, a, M) / 2` at `s = -r`, approached
//! from nearby `s` when `l = 2r` puts a pole in each factor.

use num_traits::ToPrimitive;
use rankin_core::eisenstein::EisensteinDistribution;
use statrs::function::gamma::gamma;

// the approach to the pole errs by about 2 t zeta_H's finite part, which is
// near M for a = 1; f64 rounding in the Gamma ratio is far below that
const APPROACH: f64 = 1e-9;
const LIMIT_TOLERANCE: f64 = 1e-5;
const VALUE_TOLERANCE: f64 = 1e-11;

// B_2, B_4, ..., B_12
const BERNOULLI_EVEN: [f64; 6] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];

/// Hurwitz zeta by Euler-Maclaurin, valid for every `s != 1`.
///
/// At nonpositive integers the correction series terminates, so a single
/// explicit term suffices and avoids cancellation between huge powers.
fn hurwitz(s: f64, x: f64) -> f64 {
    let n = if s <= 0.0 { 1 } else { 40 };
    let mut sum: f64 = (0..n).map(|k| (k as f64 + x).powf(-s)).sum();
    let big = n as f64 + x;
    sum += big.powf(1.0 - s) / (s - 1.0) + 0.5 * big.powf(-s);
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = 2 * (j + 1);
        sum += b / fact * rising * big.powf(-s - k as f64 + 1.0);
        rising *= (s + k as f64 - 1.0) * (s + k as f64);
        fact *= ((k + 1) * (k + 2)) as f64;
    }
    sum
}

/// `sum_{n = a mod m, n > 0} n^-s`.
fn partial_zeta(s: f64, a: u64, m: u64) -> f64 {
    (m as f64).powf(-s) * hurwitz(s, a as f64 / m as f64)
}

fn numeric_core(r: u32, l: i64, a: u64, m: u64, t: f64) -> f64 {
    let s = -(r as f64) + t;
    let l = l as f64;
    0.5 * gamma(l + s) / gamma(l + 2.0 * s) * partial_zeta(1.0 - l - 2.0 * s, a, m)
}

fn exact_core(e: &EisensteinDistribution, r: u32, a: u64) -> f64 {
    let c = e.constant(a).unwrap().to_f64().unwrap();
    if r % 2 == 0 {
        c
    } else {
        -c
    }
}

#[test]
fn euler_maclaurin_reproduces_bernoulli_values() {
    // zeta(-1) = -1/12, zeta(-3) = 1/120, zeta(2) = pi^2/6
    assert!((hurwitz(-1.0, 1.0) + 1.0 / 12.0).abs() < 1e-12);
    assert!((hurwitz(-3.0, 1.0) - 1.0 / 120.0).abs() < 1e-12);
    assert!((hurwitz(2.0, 1.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
}

#[test]
fn critical_line_is_the_limit() {
    for (r, nu) in [(1u32, 1u32), (2, 1), (3, 1), (5, 1), (2, 2)] {
        let l = 2 * r as i64;
        let e = EisensteinDistribution::new(r, l, 11, 7, nu).unwrap();
        let m = e.modulus();
        for a in [1u64, 2, 45, m - 1] {
            let exact = exact_core(&e, r, a);
            let near = numeric_core(r, l, a, m, APPROACH);
            assert!((near - exact).abs() <= LIMIT_TOLERANCE * exact.abs(), "r={r} nu={nu} a={a}: {near} vs {exact}");
        }
    }
}

#[test]
fn off_critical_values_match() {
    for (r, l) in [(0u32, 4i64), (1, 6), (2, 10), (1, 3)] {
        let e = EisensteinDistribution::new(r, l, 11, 7, 1).unwrap();
        for a in [1u64, 3, 76] {
            let exact = exact_core(&e, r, a);
            let direct = numeric_core(r, l, a, 77, 0.0);
            assert!(
                (direct - exact).abs() <= VALUE_TOLERANCE * exact.abs().max(1.0),
                "r={r} l={l} a={a}: {direct} vs {exact}"
            );
        }
    }
}

#[test]
fn below_the_critical_line_vanishes() {
    let e = EisensteinDistribution::new(3, 5, 11, 7, 1).unwrap();
    assert_eq!(exact_core(&e, 3, 1), 0.0);
    // 1 / Gamma(l + 2s) has a zero there and the zeta value is finite
    assert!(numeric_core(3, 5, 1, 77, APPROACH).abs() < 1e-6);
}
