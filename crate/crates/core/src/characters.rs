//! Dirichlet characters with values kept exactly as elements of `Q/Z`.

use std::fmt;
use std::sync::Arc;

use crate::arith;
use crate::cyclo::{CycloElem, CyclotomicField};
use crate::error::{Error, Result};
use crate::ring::{Ring, RootOfUnity};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Generator {
    residue: u64,
    order: u64,
}

/// `(Z/M)^x` with a fixed generating set, one or two generators per prime power.
#[derive(Debug, PartialEq, Eq)]
pub struct CharacterGroup {
    modulus: u64,
    gens: Vec<Generator>,
    /// Discrete logs with respect to `gens`, indexed by residue.
    dlog: Vec<Option<Vec<u64>>>,
}

impl CharacterGroup {
    pub fn new(modulus: u64) -> Result<Arc<Self>> {
        if modulus == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        let mut gens = Vec::new();
        for (q, e) in arith::factorize(modulus) {
            let qe = arith::pow_u64(q, e);
            let rest = modulus / qe;
            let lift = |g: u64| -> u64 {
                // x = g mod q^e, x = 1 mod rest
                if rest == 1 {
                    return g % qe;
                }
                let t = arith::mod_inv(rest % qe, qe).unwrap();
                let x = (1 + rest as u128 * (((g + qe - 1) % qe) as u128 * t as u128 % qe as u128)) % modulus as u128;
                x as u64
            };
            if q == 2 {
                if e >= 2 {
                    gens.push(Generator { residue: lift(qe - 1), order: 2 });
                }
                if e >= 3 {
                    gens.push(Generator { residue: lift(5), order: qe / 4 });
                }
            } else {
                let g = arith::prime_power_generator(q, e);
                gens.push(Generator { residue: lift(g), order: arith::euler_phi(qe) });
            }
        }
        let mut dlog = vec![None; modulus as usize];
        let mut exps = vec![0u64; gens.len()];
        loop {
            let x = gens.iter().zip(&exps).fold(1u64 % modulus, |acc, (g, &k)| {
                (acc as u128 * arith::mod_pow(g.residue, k, modulus) as u128 % modulus as u128) as u64
            });
            dlog[x as usize] = Some(exps.clone());
            let mut i = 0;
            loop {
                if i == gens.len() {
                    return Ok(Arc::new(CharacterGroup { modulus, gens, dlog }));
                }
                exps[i] += 1;
                if exps[i] < gens[i].order {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.gens.iter().map(|g| g.order).product()
    }

    /// Exponent of the group: every character value is an `exponent()`-th root of unity.
    pub fn exponent(&self) -> u64 {
        self.gens.iter().fold(1, |acc, g| arith::lcm(acc, g.order))
    }

    pub fn generators(&self) -> Vec<u64> {
        self.gens.iter().map(|g| g.residue).collect()
    }

    pub fn units(&self) -> Vec<u64> {
        (0..self.modulus).filter(|&x| self.dlog[x as usize].is_some()).collect()
    }

    pub fn dlog(&self, x: i64) -> Option<&[u64]> {
        self.dlog[arith::residue(x, self.modulus) as usize].as_deref()
    }

    pub fn trivial(self: &Arc<Self>) -> DirichletCharacter {
        DirichletCharacter { group: self.clone(), exps: vec![0; self.gens.len()] }
    }

    /// All characters, in lexicographic order of their exponent vectors.
    pub fn characters(self: &Arc<Self>) -> Vec<DirichletCharacter> {
        let mut out = Vec::new();
        let mut exps = vec![0u64; self.gens.len()];
        loop {
            out.push(DirichletCharacter { group: self.clone(), exps: exps.clone() });
            let mut i = self.gens.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                exps[i] += 1;
                if exps[i] < self.gens[i].order {
                    break;
                }
                exps[i] = 0;
            }
        }
    }

    pub fn character(self: &Arc<Self>, exps: Vec<u64>) -> Result<DirichletCharacter> {
        if exps.len() != self.gens.len() {
            return Err(Error::Parse(format!("character mod {} needs {} exponents", self.modulus, self.gens.len())));
        }
        let exps = exps.iter().zip(&self.gens).map(|(e, g)| e % g.order).collect();
        Ok(DirichletCharacter { group: self.clone(), exps })
    }

    /// The character sending every generator of even order to `-1`; for an
    /// odd prime modulus this is the Legendre symbol.
    pub fn quadratic(self: &Arc<Self>) -> Result<DirichletCharacter> {
        let exps: Vec<u64> = self.gens.iter().map(|g| if g.order % 2 == 0 { g.order / 2 } else { 0 }).collect();
        if exps.iter().all(|&e| e == 0) {
            return Err(Error::Domain(format!("no quadratic character mod {}", self.modulus)));
        }
        Ok(DirichletCharacter { group: self.clone(), exps })
    }

    /// `triv`, `quad`, or an exponent vector like `[1,0]` / `1,0` / `3`.
    pub fn parse(self: &Arc<Self>, label: &str) -> Result<DirichletCharacter> {
        match label.trim() {
            "triv" | "trivial" => Ok(self.trivial()),
            "quad" => self.quadratic(),
            s => {
                let body = s.trim_start_matches("chi").trim_start_matches('[').trim_end_matches(']');
                let exps = body
                    .split(',')
                    .map(|t| {
                        t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad character label {label:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.character(exps)
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    group: Arc<CharacterGroup>,
    exps: Vec<u64>,
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi_{}{:?}", self.group.modulus, self.exps)
    }
}

impl DirichletCharacter {
    pub fn group(&self) -> &Arc<CharacterGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    /// `chi(n)`, or `None` when `n` is not a unit.
    pub fn value(&self, n: i64) -> Option<RootOfUnity> {
        let d = self.group.dlog(n)?;
        let mut z = RootOfUnity::one();
        for ((k, e), g) in d.iter().zip(&self.exps).zip(&self.group.gens) {
            z = z.mul(&RootOfUnity::new((k * e % g.order) as i64, g.order));
        }
        Some(z)
    }

    /// Exact order of the character.
    pub fn order(&self) -> u64 {
        self.exps.iter().zip(&self.group.gens).fold(1, |acc, (e, g)| arith::lcm(acc, g.order / arith::gcd(*e, g.order)))
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn is_even(&self) -> bool {
        self.value(-1) == Some(RootOfUnity::one())
    }

    pub fn conj(&self) -> Self {
        let exps = self.exps.iter().zip(&self.group.gens).map(|(e, g)| (g.order - e) % g.order).collect();
        DirichletCharacter { group: self.group.clone(), exps }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.group.modulus != other.group.modulus {
            return Err(Error::Domain(format!(
                "characters mod {} and {} must be lifted to a common modulus",
                self.group.modulus, other.group.modulus
            )));
        }
        let exps =
            self.exps.iter().zip(&other.exps).zip(&self.group.gens).map(|((a, b), g)| (a + b) % g.order).collect();
        Ok(DirichletCharacter { group: self.group.clone(), exps })
    }

    pub fn pow(&self, k: i64) -> Self {
        let exps =
            self.exps.iter().zip(&self.group.gens).map(|(e, g)| arith::residue(*e as i64 * k, g.order)).collect();
        DirichletCharacter { group: self.group.clone(), exps }
    }

    /// The induced character modulo a multiple of the modulus.
    pub fn lift(&self, to: &Arc<CharacterGroup>) -> Result<Self> {
        if to.modulus % self.group.modulus != 0 {
            return Err(Error::Domain(format!(
                "cannot lift a character mod {} to modulus {}",
                self.group.modulus, to.modulus
            )));
        }
        let exps = to
            .gens
            .iter()
            .map(|g| {
                let z = self.value(g.residue as i64).expect("generator is a unit");
                z.num() * (g.order / z.order())
            })
            .collect();
        Ok(DirichletCharacter { group: to.clone(), exps })
    }

    /// Smallest modulus `f | M` through which the character factors.
    pub fn conductor(&self) -> u64 {
        let m = self.group.modulus;
        arith::divisors(m)
            .into_iter()
            .find(|&f| {
                (0..m).filter(|&x| x % f == 1 % f).all(|x| self.value(x as i64).is_none_or(|z| z == RootOfUnity::one()))
            })
            .unwrap_or(m)
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Result<Self> {
        let f = self.conductor();
        let g = CharacterGroup::new(f)?;
        let m = self.group.modulus;
        let exps = g
            .gens
            .iter()
            .map(|gen| {
                // a unit mod M reducing to the generator mod f
                let x = (0..m / f)
                    .map(|t| gen.residue + t * f)
                    .find(|&x| arith::gcd(x, m) == 1)
                    .expect("units lift along reduction");
                let z = self.value(x as i64).unwrap();
                z.num() * (gen.order / z.order())
            })
            .collect();
        Ok(DirichletCharacter { group: g, exps })
    }

    pub fn label(&self) -> String {
        if self.is_trivial() {
            "triv".into()
        } else if self.group.quadratic().ok().as_ref() == Some(self) {
            "quad".into()
        } else {
            format!("[{}]", self.exps.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
        }
    }

    /// `chi(n)` in `ring`, with zero off the units.
    pub fn eval<R: Ring>(&self, ring: &R, n: i64) -> Result<R::Elem> {
        ring.char_value(self.value(n))
    }

    /// Fails unless every value of the character embeds in `ring`.
    pub fn check_embeddable<R: Ring>(&self, ring: &R) -> Result<()> {
        ring.root_of_unity(RootOfUnity::new(1, self.order())).map(|_| ())
    }

    /// `sum_{x mod M} chi(x) zeta_M^x` in `Q(zeta_lcm(M, order))`.
    pub fn gauss_sum(&self) -> (CyclotomicField, CycloElem) {
        let m = self.group.modulus;
        let field = CyclotomicField::new(arith::lcm(m, self.order()));
        let mut acc = field.zero();
        for x in self.group.units() {
            let z = self.value(x as i64).unwrap().mul(&RootOfUnity::new(x as i64, m));
            acc = field.add(&acc, &field.root_of_unity(z).unwrap());
        }
        (field, acc)
    }
}

/// The expansion `1_{a mod M} = (1/phi(M)) sum_chi conj(chi(a)) chi`, as the
/// list of weights `conj(chi(a))`.
pub fn indicator_from_characters(
    a: u64,
    group: &Arc<CharacterGroup>,
) -> Result<Vec<(DirichletCharacter, RootOfUnity)>> {
    if group.dlog(a as i64).is_none() {
        return Err(Error::Domain(format!("{a} is not a unit modulo {}", group.modulus)));
    }
    Ok(group
        .characters()
        .into_iter()
        .map(|chi| {
            let w = chi.value(a as i64).unwrap().inv();
            (chi, w)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use num_rational::BigRational;

    #[test]
    fn unit_group_structure() {
        for m in [7u64, 8, 16, 77, 49, 539, 24] {
            let g = CharacterGroup::new(m).unwrap();
            assert_eq!(g.order(), arith::euler_phi(m), "modulus {m}");
            assert_eq!(g.units().len() as u64, g.order());
            assert_eq!(g.characters().len() as u64, g.order());
        }
    }

    #[test]
    fn legendre_symbol_mod_seven() {
        let g = CharacterGroup::new(7).unwrap();
        let q = g.parse("quad").unwrap();
        assert_eq!(q.value(3), Some(RootOfUnity::new(1, 2)));
        assert_eq!(q.value(2), Some(RootOfUnity::one()));
        assert_eq!(q.value(7), None);
        assert_eq!(q.label(), "quad");
    }

    #[test]
    fn orthogonality_exact() {
        let g = CharacterGroup::new(21).unwrap();
        let field = CyclotomicField::new(g.exponent());
        let chars = g.characters();
        for a in &chars {
            for b in &chars {
                let prod = a.mul(&b.conj()).unwrap();
                let mut s = field.zero();
                for x in g.units() {
                    s = field.add(&s, &prod.eval(&field, x as i64).unwrap());
                }
                let expected = if a == b { rat(g.order() as i64) } else { rat(0) };
                assert_eq!(field.as_rational(&s), Some(expected));
            }
        }
    }

    #[test]
    fn indicator_reconstruction() {
        let g = CharacterGroup::new(15).unwrap();
        let field = CyclotomicField::new(g.exponent());
        let ws = indicator_from_characters(4, &g).unwrap();
        for x in 0..15i64 {
            let mut s = field.zero();
            for (chi, w) in &ws {
                if let Some(v) = chi.value(x) {
                    s = field.add(&s, &field.root_of_unity(v.mul(w)).unwrap());
                }
            }
            let s = field.as_rational(&s).unwrap() / BigRational::from_integer(g.order().into());
            assert_eq!(s, if x == 4 { rat(1) } else { rat(0) });
        }
        assert!(indicator_from_characters(5, &g).is_err());
    }

    #[test]
    fn conductors_and_lifts() {
        let g7 = CharacterGroup::new(7).unwrap();
        let g77 = CharacterGroup::new(77).unwrap();
        let q = g7.quadratic().unwrap();
        let lifted = q.lift(&g77).unwrap();
        assert_eq!(lifted.conductor(), 7);
        assert_eq!(lifted.value(3), q.value(3));
        assert_eq!(lifted.value(11), None);
        assert_eq!(lifted.primitive().unwrap(), q);
        assert_eq!(g77.trivial().conductor(), 1);
    }

    #[test]
    fn gauss_sum_of_quadratic_character() {
        let g = CharacterGroup::new(7).unwrap();
        let (field, s) = g.quadratic().unwrap().gauss_sum();
        // chi(-1) = -1, so G^2 = -7
        let sq = field.mul(&s, &s);
        assert_eq!(field.as_rational(&sq), Some(rat(-7)));
        for chi in g.characters().into_iter().filter(|c| !c.is_trivial()) {
            let (f, s) = chi.gauss_sum();
            let norm = f.mul(&s, &f.conj(&s));
            assert_eq!(f.as_rational(&norm), Some(rat(7)));
        }
    }
}
