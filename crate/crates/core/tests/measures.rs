use num_rational::BigRational;
use proptest::prelude::*;
use rankin_core::arith::rat;
use rankin_core::cyclo::CyclotomicField;
use rankin_core::measures::*;
use rankin_core::qexp::BuiltinForm;
use rankin_core::{Error, Ring, Valuation};

fn context(g_len: usize) -> RankinContext {
    let f = BuiltinForm::Delta.form(30).unwrap();
    let g = BuiltinForm::Eta2Eta11.form(g_len).unwrap();
    RankinContext::new(&f, &g, 7, 11, 2, 30).unwrap()
}

#[test]
fn scaling_g_by_p_shifts_every_valuation_by_one() {
    let ctx = context(required_input(7, 1, 4));
    let scaled = scale_g(&ctx, &rat(7));
    for kind in [OpenKind::Y, OpenKind::Zp] {
        let a = divisibility_sweep(&ctx, 1, 2, kind, 4).unwrap();
        let b = divisibility_sweep(&scaled, 1, 2, kind, 4).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.y, x.r), (y.y, y.r));
            assert_eq!(y.valuation, x.valuation.shift(Ratio::from_integer(1)), "y={} r={}", x.y, x.r);
            // the bound moves with |g|_p, so the slack does not
            assert_eq!(x.slack, y.slack);
        }
    }
}

#[test]
fn unit_scaling_changes_nothing() {
    let ctx = context(required_input(7, 1, 3));
    let scaled = scale_g(&ctx, &BigRational::new(3.into(), 5.into()));
    let a = divisibility_sweep(&ctx, 1, 1, OpenKind::Y, 3).unwrap();
    let b = divisibility_sweep(&scaled, 1, 1, OpenKind::Y, 3).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| x.valuation == y.valuation));
}

#[test]
fn opens_are_recovered_from_characters() {
    // Phi_r((y)) = phi(M)^-1 sum_chi conj(chi)(y) Phi_r(chi), with Phi_r(chi)
    // taken from the closed form rather than the table
    let len = 16;
    let ctx = context(len);
    let ring = CyclotomicField::new(30);
    let group = ctx.y_group(1).unwrap();
    let chars = group.characters();
    let inv_phi = ring.from_rational(&BigRational::new(1.into(), (chars.len() as i64).into()));
    for r in [0u32, 1] {
        let table = phi_table(&ctx, 1, r, len).unwrap();
        let closed: Vec<_> = chars.iter().map(|chi| phi_char_closed(&ctx, &ring, chi, r, len).unwrap()).collect();
        for y in [1u64, 2, 30, 76] {
            let mut acc = None;
            for (chi, form) in chars.iter().zip(&closed) {
                let term = form.scale(&chi.conj().eval(&ring, y as i64).unwrap());
                acc = Some(match acc {
                    None => term,
                    Some(a) => term.add(&a).unwrap(),
                });
            }
            let rebuilt = acc.unwrap().scale(&inv_phi);
            let direct = table.get(y).unwrap().to_ring(&ring);
            assert!(rebuilt.first_difference(&direct).is_none(), "r={r} y={y}");
        }
    }
}

#[test]
fn single_open_matches_the_sweep() {
    let ctx = context(required_input(7, 1, 4));
    let sweep = divisibility_sweep(&ctx, 1, 2, OpenKind::Zp, 4).unwrap();
    for y in [1u64, 3, 6] {
        let open = OpenSet::new(&ctx, y, 1, OpenKind::Zp).unwrap();
        let row = check_divisibility(&ctx, &open, 2, 4).unwrap();
        let from_sweep = sweep.iter().find(|s| s.y == y && s.r == 2).unwrap();
        assert_eq!(row.valuation, from_sweep.valuation);
        assert!(row.pass);
    }
}

#[test]
fn level_condition_holds() {
    let ctx = context(60);
    for nu in [1u32, 2] {
        for r in 0..=3 {
            let row = check_level(&ctx, nu, r).unwrap();
            assert!(row.pass, "{row:?}");
        }
    }
}

#[test]
fn refusals() {
    let ctx = context(required_input(7, 1, 4));
    assert!(matches!(check_budget(10, 9), Err(Error::BudgetExceeded { needed: 10, budget: 9 })));
    assert!(check_budget(9, 9).is_ok());
    assert!(matches!(divisibility_sweep(&ctx, 1, 1, OpenKind::Y, 1), Err(Error::InsufficientTruncation(_))));
    // g to q^148 is too short for U^4 with five coefficients left
    assert!(divisibility_sweep(&ctx, 2, 0, OpenKind::Zp, 5).is_err());
    assert!(OpenSet::new(&ctx, 22, 1, OpenKind::Y).is_err());
    assert!(OpenSet::new(&ctx, 22, 1, OpenKind::Zp).is_ok());
}

#[test]
fn growth_table_rejects_degree_beyond_the_weight_gap() {
    let ctx = context(required_input(7, 1, 3));
    assert!(check_admissibility(&ctx, 1, &[(1, 3)], 10).is_err());
    let rep = check_admissibility(&ctx, 1, &[(1, 3)], 1).unwrap();
    assert_eq!(rep.slope, Valuation::int(1));
}

proptest! {
    #[test]
    fn lifts_partition_an_open(y in 1u64..77, x in 0u64..100_000) {
        prop_assume!(y % 7 != 0 && y % 11 != 0);
        let ctx = context(8);
        let open = OpenSet::new(&ctx, y, 1, OpenKind::Y).unwrap();
        let lifts = open.lifts(7);
        let hits = lifts.iter().filter(|l| l.contains(x)).count();
        prop_assert_eq!(hits, usize::from(open.contains(x)));
        prop_assert!(lifts.iter().all(|l| l.modulus == 539 && open.contains(l.y)));
    }
}
