use num_rational::BigRational;
use rankin_core::arith::rat;
use rankin_core::characters::{indicator_from_characters, CharacterGroup, DirichletCharacter};
use rankin_core::cyclo::CyclotomicField;
use rankin_core::Ring;

/// `phi(M)^-1 sum_chi conj(chi)(a) chi(x)` over one family of characters.
fn indicator(field: &CyclotomicField, chars: &[DirichletCharacter], a: i64, x: i64) -> BigRational {
    let mut s = field.zero();
    for chi in chars {
        let t = field.mul(&chi.conj().eval(field, a).unwrap(), &chi.eval(field, x).unwrap());
        s = field.add(&s, &t);
    }
    field.as_rational(&s).unwrap() / BigRational::from_integer(chars.len().into())
}

#[test]
fn tame_and_wild_factors_multiply_to_the_one_step_sum() {
    // characters mod 77 are exactly the products xi * chi with xi mod 11, chi mod 7
    let full = CharacterGroup::new(77).unwrap();
    let tame = CharacterGroup::new(11).unwrap();
    let wild = CharacterGroup::new(7).unwrap();
    let field = CyclotomicField::new(full.exponent());
    let lift = |c: &DirichletCharacter| c.lift(&full).unwrap();
    let mut products: Vec<DirichletCharacter> = Vec::new();
    for xi in tame.characters() {
        for chi in wild.characters() {
            products.push(lift(&xi).mul(&lift(&chi)).unwrap());
        }
    }
    let all = full.characters();
    assert_eq!(products.len(), all.len());
    assert!(all.iter().all(|c| products.contains(c)));

    let xis: Vec<_> = tame.characters().iter().map(lift).collect();
    let chis: Vec<_> = wild.characters().iter().map(lift).collect();
    for a in [1i64, 2, 45] {
        for x in 0..77 {
            let one_step = indicator(&field, &all, a, x);
            let factored = indicator(&field, &xis, a, x) * indicator(&field, &chis, a, x);
            assert_eq!(one_step, factored, "a={a} x={x}");
            assert_eq!(one_step, if x == a { rat(1) } else { rat(0) });
        }
    }
}

#[test]
fn indicator_weights_agree_with_the_direct_sum() {
    let g = CharacterGroup::new(49).unwrap();
    let field = CyclotomicField::new(g.exponent());
    let ws = indicator_from_characters(3, &g).unwrap();
    let chars: Vec<_> = ws.iter().map(|(c, _)| c.clone()).collect();
    for x in [3i64, 10, 52, 4] {
        let mut s = field.zero();
        for (chi, w) in &ws {
            if let Some(v) = chi.value(x) {
                s = field.add(&s, &field.root_of_unity(v.mul(w)).unwrap());
            }
        }
        let weighted = field.as_rational(&s).unwrap() / BigRational::from_integer(g.order().into());
        assert_eq!(weighted, indicator(&field, &chars, 3, x));
    }
}
