use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{FormMeta, Level, NearlyHolomorphicForm, QExpansion};
use crate::bernoulli::bernoulli;
use crate::error::{Error, Result};
use crate::qexp::ops::series_mul;
use crate::ring::RationalField;

fn eta_shift(exps: &[(u64, i64)]) -> Result<usize> {
    let weighted: i64 = exps.iter().map(|(d, r)| *d as i64 * r).sum();
    if weighted % 24 != 0 || weighted < 0 {
        return Err(Error::Domain(format!(
            "eta quotient has leading exponent {weighted}/24, not a nonnegative integer"
        )));
    }
    Ok((weighted / 24) as usize)
}

fn shifted(body: Vec<BigInt>, shift: usize, len: usize) -> QExpansion<RationalField> {
    let mut coeffs = vec![BigRational::zero(); len];
    for (m, c) in body.into_iter().enumerate() {
        if m + shift < len {
            coeffs[m + shift] = BigRational::from_integer(c);
        }
    }
    QExpansion::new(RationalField, coeffs)
}

/// `prod_d eta(d z)^(r_d)` to `q^len`.
///
/// Products with nonnegative exponents multiply sparse copies of Euler's
/// pentagonal series `prod (1 - q^n) = sum (-1)^k q^(k(3k-1)/2)`; quotients go
/// through [`eta_quotient_logderiv`].
pub fn eta_quotient(exps: &[(u64, i64)], len: usize) -> Result<QExpansion<RationalField>> {
    if exps.iter().any(|&(_, r)| r < 0) {
        return eta_quotient_logderiv(exps, len);
    }
    let shift = eta_shift(exps)?;
    let body = len.saturating_sub(shift);
    let mut f = vec![BigInt::zero(); body];
    if body == 0 {
        return Ok(shifted(f, shift, len));
    }
    f[0] = BigInt::one();
    for &(d, r) in exps {
        if d == 0 {
            return Err(Error::Domain("eta(0 z) is undefined".into()));
        }
        let terms = pentagonal(d as usize, body);
        for _ in 0..r {
            for m in (1..body).rev() {
                let mut acc = BigInt::zero();
                for &(e, s) in &terms {
                    if e > m {
                        break;
                    }
                    if !f[m - e].is_zero() {
                        if s > 0 {
                            acc += &f[m - e];
                        } else {
                            acc -= &f[m - e];
                        }
                    }
                }
                f[m] += acc;
            }
        }
    }
    Ok(shifted(f, shift, len))
}

/// Nonzero terms `(d e, sign)` of `prod (1 - q^(d n))` below `q^len`, excluding `q^0`.
fn pentagonal(d: usize, len: usize) -> Vec<(usize, i8)> {
    let mut out = Vec::new();
    for k in 1usize.. {
        let a = d * k * (3 * k - 1) / 2;
        if a >= len {
            break;
        }
        let s = if k % 2 == 1 { -1 } else { 1 };
        out.push((a, s));
        let b = d * k * (3 * k + 1) / 2;
        if b < len {
            out.push((b, s));
        }
    }
    out.sort_unstable();
    out
}

/// `prod_d eta(d z)^(r_d)` via the logarithmic derivative
/// `m F_m = sum_{j=1}^{m} D(j) F_{m-j}` of the infinite product. Quadratic in `len`.
pub fn eta_quotient_logderiv(exps: &[(u64, i64)], len: usize) -> Result<QExpansion<RationalField>> {
    let shift = eta_shift(exps)?;
    let body = len.saturating_sub(shift);
    // D(m) = -sum_{d | m} r_d * d * sigma_1(m / d)
    let mut dcoef = vec![BigInt::zero(); body];
    for &(d, r) in exps {
        let d = d as usize;
        for j in 1.. {
            let m0 = d * j;
            if m0 >= body {
                break;
            }
            // q^(dj) contributes d*j to q d/dq log (1 - q^(dj))^(-1) at every multiple
            let mut m = m0;
            while m < body {
                dcoef[m] -= BigInt::from(r) * BigInt::from(m0 as u64);
                m += m0;
            }
        }
    }
    let mut f = vec![BigInt::zero(); body];
    if body > 0 {
        f[0] = BigInt::one();
    }
    for m in 1..body {
        let mut s = BigInt::zero();
        for j in 1..=m {
            if !dcoef[j].is_zero() && !f[m - j].is_zero() {
                s += &dcoef[j] * &f[m - j];
            }
        }
        f[m] = s / BigInt::from(m as u64);
    }
    Ok(shifted(f, shift, len))
}

pub fn delta(len: usize) -> QExpansion<RationalField> {
    eta_quotient(&[(1, 24)], len).expect("eta^24 has integral shift")
}

/// `eta(z)^2 eta(11 z)^2`, the newform of level 11 and weight 2.
pub fn eta2_eta11(len: usize) -> QExpansion<RationalField> {
    eta_quotient(&[(1, 2), (11, 2)], len).expect("shift is 1")
}

/// `E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n` for even `k >= 2`.
pub fn eisenstein_series(k: u32, len: usize) -> Result<QExpansion<RationalField>> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::Domain(format!("no level one Eisenstein series of weight {k}")));
    }
    let c = -BigRational::from_integer(BigInt::from(2 * k)) / bernoulli(k as usize);
    let mut sigma = vec![BigInt::zero(); len];
    for d in 1..len {
        let dk = num_traits::pow(BigInt::from(d), (k - 1) as usize);
        let mut m = d;
        while m < len {
            sigma[m] += &dk;
            m += d;
        }
    }
    let mut coeffs: Vec<BigRational> = sigma.into_iter().map(|s| &c * BigRational::from_integer(s)).collect();
    if len > 0 {
        coeffs[0] = BigRational::one();
    }
    Ok(QExpansion::new(RationalField, coeffs))
}

/// The weight 16 cusp form `E_4 Delta`.
pub fn e4_delta(len: usize) -> QExpansion<RationalField> {
    let e4 = eisenstein_series(4, len).unwrap();
    let d = delta(len);
    QExpansion::new(RationalField, series_mul(&RationalField, &e4.coeffs, &d.coeffs, len))
}

/// Forms the command line knows by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinForm {
    Delta,
    E4Delta,
    Eta2Eta11,
    Eisenstein(u32),
}

pub fn builtin_form(name: &str) -> Result<BuiltinForm> {
    match name {
        "delta" => Ok(BuiltinForm::Delta),
        "e4delta" => Ok(BuiltinForm::E4Delta),
        "eta2eta11" => Ok(BuiltinForm::Eta2Eta11),
        s => match s.strip_prefix("eisenstein:") {
            Some(k) => k.parse().map(BuiltinForm::Eisenstein).map_err(|_| Error::Parse(format!("bad weight in {s}"))),
            None => Err(Error::Parse(format!("unknown builtin form {s}"))),
        },
    }
}

impl BuiltinForm {
    pub fn weight(&self) -> i64 {
        match self {
            BuiltinForm::Delta => 12,
            BuiltinForm::E4Delta => 16,
            BuiltinForm::Eta2Eta11 => 2,
            BuiltinForm::Eisenstein(k) => *k as i64,
        }
    }

    pub fn level(&self) -> u64 {
        match self {
            BuiltinForm::Eta2Eta11 => 11,
            _ => 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            BuiltinForm::Delta => "delta".into(),
            BuiltinForm::E4Delta => "e4delta".into(),
            BuiltinForm::Eta2Eta11 => "eta2eta11".into(),
            BuiltinForm::Eisenstein(k) => format!("eisenstein:{k}"),
        }
    }

    pub fn qexp(&self, len: usize) -> Result<QExpansion<RationalField>> {
        match self {
            BuiltinForm::Delta => Ok(delta(len)),
            BuiltinForm::E4Delta => Ok(e4_delta(len)),
            BuiltinForm::Eta2Eta11 => Ok(eta2_eta11(len)),
            BuiltinForm::Eisenstein(k) => eisenstein_series(*k, len),
        }
    }

    pub fn form(&self, len: usize) -> Result<NearlyHolomorphicForm<RationalField>> {
        let meta = FormMeta::new(self.weight(), Level::new(self.level()), "triv", &self.name());
        Ok(NearlyHolomorphicForm::holomorphic(self.qexp(len)?, meta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn ints(q: &QExpansion<RationalField>) -> Vec<i64> {
        q.coeffs.iter().map(|c| i64::try_from(c.to_integer()).unwrap()).collect()
    }

    #[test]
    fn pentagonal_matches_log_derivative() {
        for exps in [vec![(1, 24)], vec![(1, 2), (11, 2)], vec![(1, 8), (2, 8)], vec![(1, 1), (23, 1)]] {
            let a = eta_quotient(&exps, 150).unwrap();
            let b = eta_quotient_logderiv(&exps, 150).unwrap();
            assert_eq!(a.coeffs, b.coeffs, "{exps:?}");
        }
        // quotients keep the log-derivative path
        let q = eta_quotient(&[(1, -2), (2, 5), (4, -2)], 30).unwrap();
        assert_eq!(q.coeffs, eta_quotient_logderiv(&[(1, -2), (2, 5), (4, -2)], 30).unwrap().coeffs);
    }

    #[test]
    fn ramanujan_tau() {
        assert_eq!(ints(&delta(12)), vec![0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612]);
    }

    #[test]
    fn level_eleven_newform() {
        assert_eq!(ints(&eta2_eta11(12)), vec![0, 1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1]);
    }

    #[test]
    fn eisenstein_normalization() {
        let e4 = eisenstein_series(4, 4).unwrap();
        assert_eq!(ints(&e4), vec![1, 240, 2160, 6720]);
        assert!(eisenstein_series(5, 4).is_err());
    }

    #[test]
    fn weight_sixteen_product() {
        let f = e4_delta(4);
        assert_eq!(f.coeffs[1], rat(1));
        assert_eq!(f.coeffs[2], rat(216));
    }

    #[test]
    fn fractional_shift_is_refused() {
        assert!(eta_quotient(&[(1, 1)], 5).is_err());
    }
}
