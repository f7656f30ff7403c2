use serde::Serialize;

use super::{FormMeta, NearlyHolomorphicForm, QExpansion};
use crate::arith;
use crate::error::{Error, Result};
use crate::ring::{Ring, Valuation};

const KARATSUBA_THRESHOLD: usize = 48;

fn schoolbook<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem], len: usize) -> Vec<R::Elem> {
    let mut out = vec![ring.zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if ring.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            ring.mul_add(&mut out[i + j], x, y);
        }
    }
    out
}

fn karatsuba<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let n = a.len().max(b.len());
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().min(b.len()) <= KARATSUBA_THRESHOLD {
        return schoolbook(ring, a, b, a.len() + b.len() - 1);
    }
    let m = n / 2;
    let split = |v: &[R::Elem]| -> (Vec<R::Elem>, Vec<R::Elem>) {
        if v.len() <= m {
            (v.to_vec(), vec![ring.zero()])
        } else {
            (v[..m].to_vec(), v[m..].to_vec())
        }
    };
    let (a0, a1) = split(a);
    let (b0, b1) = split(b);
    let sum = |x: &[R::Elem], y: &[R::Elem]| -> Vec<R::Elem> {
        (0..x.len().max(y.len()))
            .map(|i| match (x.get(i), y.get(i)) {
                (Some(u), Some(v)) => ring.add(u, v),
                (Some(u), None) => u.clone(),
                (None, Some(v)) => v.clone(),
                (None, None) => unreachable!(),
            })
            .collect()
    };
    let z0 = karatsuba(ring, &a0, &b0);
    let z2 = karatsuba(ring, &a1, &b1);
    let z1 = karatsuba(ring, &sum(&a0, &a1), &sum(&b0, &b1));
    let mut out = vec![ring.zero(); a.len() + b.len() - 1];
    let mut place = |off: usize, v: &[R::Elem], sign: bool| {
        for (i, c) in v.iter().enumerate() {
            if off + i < out.len() {
                out[off + i] = if sign { ring.add(&out[off + i], c) } else { ring.sub(&out[off + i], c) };
            }
        }
    };
    place(0, &z0, true);
    place(m, &z1, true);
    place(m, &z0, false);
    place(m, &z2, false);
    place(2 * m, &z2, true);
    out
}

fn nonzero<R: Ring>(ring: &R, a: &[R::Elem], len: usize) -> Vec<(usize, R::Elem)> {
    a.iter().take(len).enumerate().filter(|(_, c)| !ring.is_zero(c)).map(|(i, c)| (i, c.clone())).collect()
}

/// Product of two series modulo `q^len`. Sparse inputs are multiplied term by
/// term, dense ones by Karatsuba.
pub fn series_mul<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem], len: usize) -> Vec<R::Elem> {
    let len = len.min(a.len()).min(b.len());
    if len == 0 {
        return Vec::new();
    }
    let na = nonzero(ring, a, len);
    let nb = nonzero(ring, b, len);
    if na.is_empty() || nb.is_empty() {
        return vec![ring.zero(); len];
    }
    let density = na.len().min(nb.len()) as f64 / len as f64;
    if density < 0.3 || len <= KARATSUBA_THRESHOLD {
        let (short, long) = if na.len() <= nb.len() { (&na, b) } else { (&nb, a) };
        let mut out = vec![ring.zero(); len];
        for (i, x) in short.iter() {
            for (j, y) in long.iter().enumerate().take(len - i) {
                if !ring.is_zero(y) {
                    ring.mul_add(&mut out[i + j], x, y);
                }
            }
        }
        return out;
    }
    let mut out = karatsuba(ring, &a[..len], &b[..len]);
    out.truncate(len);
    out
}

fn combine_char(a: &str, b: &str) -> String {
    match (a, b) {
        ("triv", x) | (x, "triv") => x.to_string(),
        _ => format!("{a}*{b}"),
    }
}

fn check_rings<R: Ring>(a: &R, b: &R) -> Result<()> {
    if a.same_ring(b) {
        Ok(())
    } else {
        Err(Error::RingMismatch(format!("{} vs {}", a.tag(), b.tag())))
    }
}

/// Product of nearly holomorphic forms; depths add.
pub fn mul<R: Ring>(f: &NearlyHolomorphicForm<R>, g: &NearlyHolomorphicForm<R>) -> Result<NearlyHolomorphicForm<R>> {
    check_rings(&f.ring, &g.ring)?;
    let ring = &f.ring;
    let len = f.len().min(g.len());
    let depth = f.depth() + g.depth();
    let mut layers = vec![vec![ring.zero(); len]; depth + 1];
    for (i, fi) in f.layers.iter().enumerate() {
        for (j, gj) in g.layers.iter().enumerate() {
            let prod = series_mul(ring, fi, gj, len);
            for (acc, c) in layers[i + j].iter_mut().zip(prod) {
                ring.add_assign(acc, &c);
            }
        }
    }
    let meta = FormMeta {
        weight: f.meta.weight + g.meta.weight,
        level: f.meta.level.lcm(&g.meta.level),
        character: combine_char(&f.meta.character, &g.meta.character),
        note: format!("({})*({})", f.meta.note, g.meta.note),
    };
    Ok(NearlyHolomorphicForm { ring: ring.clone(), layers, meta })
}

fn u_meta(meta: &FormMeta, p: u64, m: u32) -> FormMeta {
    let e = meta.level.exponent(p);
    FormMeta {
        level: meta.level.with_exponent(p, e.saturating_sub(m).max(1)),
        note: format!("U_{p}^{m}({})", meta.note),
        ..meta.clone()
    }
}

/// `U^m`: layer `i`, index `n` becomes `p^(m i) a_i(p^m n)`.
///
/// The output is known for every `n` with `p^m n < len`, i.e. it has
/// truncation `ceil(len / p^m)`.
pub fn op_u<R: Ring>(f: &NearlyHolomorphicForm<R>, p: u64, m: u32) -> NearlyHolomorphicForm<R> {
    let ring = &f.ring;
    let pm = arith::pow_u64(p, m) as usize;
    let out_len = f.len().div_ceil(pm);
    let layers = f
        .layers
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let s = ring.pow(&ring.from_int(p as i64), m as u64 * i as u64);
            (0..out_len).map(|n| ring.mul(&l[n * pm], &s)).collect()
        })
        .collect();
    NearlyHolomorphicForm { ring: ring.clone(), layers, meta: u_meta(&f.meta, p, m) }
}

/// `V f (q) = f(q^p)` for a holomorphic form.
pub fn op_v<R: Ring>(f: &NearlyHolomorphicForm<R>, p: u64) -> Result<NearlyHolomorphicForm<R>> {
    if !f.is_holomorphic() {
        return Err(Error::UnsupportedOperand("V is only defined here on holomorphic forms".into()));
    }
    let ring = &f.ring;
    let p = p as usize;
    let mut out = vec![ring.zero(); f.len() * p];
    for (n, c) in f.layers[0].iter().enumerate() {
        out[n * p] = c.clone();
    }
    let e = f.meta.level.exponent(p as u64);
    Ok(NearlyHolomorphicForm {
        ring: ring.clone(),
        layers: vec![out],
        meta: FormMeta {
            level: f.meta.level.with_exponent(p as u64, e + 1),
            note: format!("V_{p}({})", f.meta.note),
            ..f.meta.clone()
        },
    })
}

/// `U^m (f g)` evaluated directly at the indices `n p^m`, `n < out_len`.
pub fn mul_then_u<R: Ring>(
    f: &NearlyHolomorphicForm<R>,
    g: &NearlyHolomorphicForm<R>,
    p: u64,
    m: u32,
    out_len: usize,
) -> Result<NearlyHolomorphicForm<R>> {
    check_rings(&f.ring, &g.ring)?;
    let ring = &f.ring;
    let pm = arith::pow_u64(p, m) as usize;
    let need = if out_len == 0 { 0 } else { (out_len - 1) * pm + 1 };
    if f.len() < need || g.len() < need {
        return Err(Error::InsufficientTruncation(format!(
            "{out_len} coefficients after U^{m} need inputs known to q^{need}"
        )));
    }
    let depth = f.depth() + g.depth();
    let sparse_f: Vec<Vec<(usize, R::Elem)>> = f.layers.iter().map(|l| nonzero(ring, l, need)).collect();
    let mut layers = vec![vec![ring.zero(); out_len]; depth + 1];
    for n in 0..out_len {
        let idx = n * pm;
        for (i, fi) in sparse_f.iter().enumerate() {
            for (j, gj) in g.layers.iter().enumerate() {
                let mut acc = ring.zero();
                for (t, c) in fi.iter() {
                    if *t > idx {
                        break;
                    }
                    ring.mul_add(&mut acc, c, &gj[idx - t]);
                }
                ring.add_assign(&mut layers[i + j][n], &acc);
            }
        }
    }
    let pb = ring.from_int(p as i64);
    for (k, layer) in layers.iter_mut().enumerate() {
        let s = ring.pow(&pb, m as u64 * k as u64);
        for c in layer.iter_mut() {
            *c = ring.mul(c, &s);
        }
    }
    let prod_meta = FormMeta {
        weight: f.meta.weight + g.meta.weight,
        level: f.meta.level.lcm(&g.meta.level),
        character: combine_char(&f.meta.character, &g.meta.character),
        note: format!("({})*({})", f.meta.note, g.meta.note),
    };
    Ok(NearlyHolomorphicForm { ring: ring.clone(), layers, meta: u_meta(&prod_meta, p, m) })
}

#[derive(Clone, Debug, Serialize)]
pub struct TpCheck {
    pub holds: bool,
    /// `T_p` eigenvalue read off as `a_p / a_1`.
    pub eigenvalue: String,
    pub tested: usize,
    pub first_failure: Option<usize>,
}

/// Check `a_{pn} + psi(p) p^(k-1) a_{n/p} = lambda a_n` for every `n` with
/// `pn` inside the truncation, where `lambda = a_p / a_1`.
pub fn op_tp_check<R: Ring>(f: &QExpansion<R>, p: u64, k: i64, psi_p: &R::Elem) -> Result<TpCheck> {
    let ring = &f.ring;
    let p = p as usize;
    if f.len() <= p {
        return Err(Error::InsufficientPrecision(format!("q-expansion known to q^{} cannot test T_{p}", f.len())));
    }
    let a1 = f.coeff(1);
    let lambda = if ring.is_zero(a1) {
        if !f.is_zero() {
            return Err(Error::Domain("a_1 = 0 but the series is nonzero".into()));
        }
        ring.zero()
    } else {
        ring.mul(f.coeff(p), &ring.inv(a1)?)
    };
    let c = ring.mul(psi_p, &ring.pow(&ring.from_int(p as i64), (k - 1) as u64));
    let mut first_failure = None;
    let mut tested = 0;
    let mut n = 1;
    while p * n < f.len() {
        let mut lhs = f.coeff(p * n).clone();
        if n % p == 0 {
            lhs = ring.add(&lhs, &ring.mul(&c, f.coeff(n / p)));
        }
        let rhs = ring.mul(&lambda, f.coeff(n));
        tested += 1;
        if !ring.equal(&lhs, &rhs) && first_failure.is_none() {
            first_failure = Some(n);
        }
        n += 1;
    }
    Ok(TpCheck { holds: first_failure.is_none(), eigenvalue: format!("{:?}", lambda), tested, first_failure })
}

/// The p-stabilization `f - alpha' V f`.
pub fn make_f0<R: Ring>(f: &QExpansion<R>, alpha_prime: &R::Elem, p: u64) -> QExpansion<R> {
    let ring = &f.ring;
    let p = p as usize;
    let coeffs =
        (0..f.len())
            .map(|n| {
                if n % p == 0 {
                    ring.sub(f.coeff(n), &ring.mul(alpha_prime, f.coeff(n / p)))
                } else {
                    f.coeff(n).clone()
                }
            })
            .collect();
    QExpansion::new(ring.clone(), coeffs)
}

/// Keep the coefficients at `n = a mod N p^nu`.
pub fn partial_form<R: Ring>(
    g: &NearlyHolomorphicForm<R>,
    a: u64,
    nu: u32,
    n_level: u64,
    p: u64,
) -> Result<NearlyHolomorphicForm<R>> {
    if arith::gcd(a, n_level * p) != 1 {
        return Err(Error::Domain(format!("{a} is not a unit modulo {}", n_level * p)));
    }
    let m = n_level * arith::pow_u64(p, nu);
    let a = a % m;
    let ring = &g.ring;
    let layers = g
        .layers
        .iter()
        .map(|l| l.iter().enumerate().map(|(n, c)| if n as u64 % m == a { c.clone() } else { ring.zero() }).collect())
        .collect();
    Ok(NearlyHolomorphicForm {
        ring: ring.clone(),
        layers,
        meta: FormMeta {
            level: g.meta.level.lcm(&super::Level::partial(n_level, p, nu)),
            note: format!("{}|({a} mod {m})", g.meta.note),
            ..g.meta.clone()
        },
    })
}

/// Minimum valuation over every stored coefficient of every layer.
pub fn sup_norm_valuation<R: Ring>(f: &NearlyHolomorphicForm<R>, p: u64) -> Result<Valuation> {
    let mut best = Valuation::Infinity;
    for l in &f.layers {
        for c in l {
            best = best.min(f.ring.valuation(c, p)?);
        }
    }
    Ok(best)
}
