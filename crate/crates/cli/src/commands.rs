use std::fs;
use std::path::Path;

use rankin_core::arith;
use rankin_core::characters::CharacterGroup;
use rankin_core::measures::*;
use rankin_core::padic::{hecke_roots, newton_polygon, val_p, PadicField};
use rankin_core::{Error, Result, Ring, Valuation};
use serde::Serialize;
use serde_json::json;

use crate::scenario::{load_form, Plan, Scenario};

/// What a finished command hands back to `main`.
pub struct Outcome {
    pub pass: bool,
}

fn ratio_string(r: &Ratio) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        r.to_string()
    }
}

fn write_out(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports are plain data");
    s.push('\n');
    s
}

fn header(s: &Scenario, plan: &Plan, command: &str) -> serde_json::Value {
    json!({
        "tool": "rankin",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "scenario": s,
        "defaults": Scenario::default(),
        "plan": plan,
    })
}

fn print_plan(plan: &Plan) {
    for l in &plan.levels {
        println!(
            "plan: nu={} keeps {} coefficients from g to q^{} (~{} multiply-adds)",
            l.nu,
            l.out_len,
            l.input_len - 1,
            l.cost
        );
    }
    println!("plan: g to q^{}, total ~{} against budget {}", plan.g_len - 1, plan.total_cost, plan.budget);
}

#[derive(Serialize)]
struct SlopeReport {
    form: String,
    weight: i64,
    p: u64,
    a_p: String,
    polynomial: String,
    slopes: Vec<String>,
    slope: String,
    h: i64,
    required_weight_gap: i64,
}

/// Hecke polynomial of `f` at `p`, its Newton polygon and the weight gap the
/// construction needs.
pub fn slope(s: &Scenario) -> Result<Outcome> {
    let f = load_form(&s.f, s.p as usize + 2)?;
    let q = f.layer(0);
    if q.len() <= s.p as usize {
        return Err(Error::InsufficientTruncation(format!("need a_{} and f is known to q^{}", s.p, q.len() - 1)));
    }
    let level = f.meta.level.value().unwrap_or(0);
    if level % s.p == 0 {
        return Err(Error::Domain(format!("p = {} divides the level {level}", s.p)));
    }
    let k = f.meta.weight;
    let a_p = q.coeff(s.p as usize).clone();
    let field = PadicField::new(s.p, s.precision)?;
    let psi = CharacterGroup::new(level)?.parse(&f.meta.character)?;
    let psi_p = psi.eval(&field, s.p as i64)?;
    let c_val = Valuation::int(k - 1);
    let polygon = newton_polygon(&[(0, c_val), (1, val_p(&a_p, s.p)), (2, Valuation::int(0))])?;
    let slopes: Vec<String> = polygon.root_valuations().iter().map(ratio_string).collect();
    let neg = arith::rational_to_string(&-a_p.clone());
    let linear = match neg.strip_prefix('-') {
        Some(abs) => format!("- {abs}X"),
        None => format!("+ {neg}X"),
    };
    let constant = if psi.is_trivial() { String::new() } else { format!("psi({}) ", s.p) };
    let polynomial = format!("X^2 {linear} + {constant}{}^{}", s.p, k - 1);
    println!("a_{} = {}", s.p, arith::rational_to_string(&a_p));
    println!("Hecke polynomial: {polynomial}");
    println!("Newton polygon slopes: {}", slopes.join(", "));
    let roots = hecke_roots(&field.from_rational(&a_p), &psi_p, s.p, k, &field)?;
    let v = roots.slope().finite().expect("alpha is a root of a nonzero constant term");
    let h = v.floor().to_integer() + 1;
    println!("slope {}, h={h}, need k-l >= {}", ratio_string(&v), 2 * h);
    let report = SlopeReport {
        form: s.f.clone(),
        weight: k,
        p: s.p,
        a_p: arith::rational_to_string(&a_p),
        polynomial,
        slopes,
        slope: ratio_string(&v),
        h,
        required_weight_gap: 2 * h,
    };
    if let Some(dir) = &s.out {
        write_out(dir, "slope.json", &to_json(&report))?;
    }
    Ok(Outcome { pass: true })
}

fn tsv<T>(header: &str, rows: &[T], line: impl Fn(&T) -> String) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

struct Suite {
    name: &'static str,
    checked: usize,
    failed: usize,
}

impl Suite {
    fn new<T>(name: &'static str, rows: &[T], pass: impl Fn(&T) -> bool) -> Self {
        let failed = rows.iter().filter(|r| !pass(r)).count();
        println!("{} {name}: {} checks, {failed} failing", if failed == 0 { "PASS" } else { "FAIL" }, rows.len());
        Suite { name, checked: rows.len(), failed }
    }
}

/// Runs every suite, then writes the JSON report and TSV tables.
pub fn certify(s: &Scenario) -> Result<Outcome> {
    let plan = s.plan()?;
    print_plan(&plan);
    check_budget(plan.total_cost, s.budget)?;
    let ctx = s.context(&plan)?;
    println!("slope {}, k-l = {}", ctx.slope(), ctx.w());

    let mut levels = Vec::new();
    for nu in 1..=s.nu_max {
        for r in 0..=s.r_max {
            levels.push(check_level(&ctx, nu, r)?);
        }
    }
    let mut refinement = Vec::new();
    for nu in 1..=s.nu_max {
        for r in 0..=s.r_max {
            refinement.extend(check_refinement(&ctx, nu, r, s.check_len)?);
        }
    }
    let mut two_path = two_path_phi(&ctx, 1, s.r_max, s.check_len)?;
    two_path.extend(two_path_fourier(&ctx, 1, s.r_max, s.check_len)?);
    let mut divisibility = Vec::new();
    for nu in 1..=s.nu_max {
        for kind in [OpenKind::Y, OpenKind::Zp] {
            divisibility.extend(divisibility_sweep(&ctx, nu, s.r_max, kind, s.out_len)?);
        }
    }
    let growth_levels: Vec<(u32, usize)> = (1..=s.nu_max).map(|nu| (nu, s.out_len)).collect();
    let admissibility = check_admissibility(&ctx, s.center, &growth_levels, s.r_max)?;

    let suites = [
        Suite::new("level", &levels, |r| r.pass),
        Suite::new("distribution axioms", &refinement, |r| r.pass),
        Suite::new("two-path", &two_path, |r| r.pass),
        Suite::new("divisibility", &divisibility, |r| r.pass),
        Suite::new("admissibility", std::slice::from_ref(&admissibility), |r| r.pass),
    ];
    println!("note: {O_CLAIM_NOTE}");
    let pass = suites.iter().all(|x| x.failed == 0);
    let summary: Vec<_> = suites
        .iter()
        .map(|x| json!({"suite": x.name, "checked": x.checked, "failed": x.failed, "pass": x.failed == 0}))
        .collect();

    if let Some(dir) = &s.out {
        let report = json!({
            "header": header(s, &plan, "certify"),
            "level": levels,
            "distribution_axioms": refinement,
            "two_path": two_path,
            "divisibility": divisibility,
            "admissibility": admissibility,
            "summary": summary,
            "pass": pass,
        });
        write_out(dir, "certify.json", &to_json(&report))?;
        write_out(dir, "divisibility.tsv", &tsv(DivisibilityRow::TSV_HEADER, &divisibility, |r| r.tsv()))?;
        write_out(dir, "admissibility.tsv", &tsv(AdmissibilityRow::TSV_HEADER, &admissibility.rows, |r| r.tsv()))?;
        write_out(dir, "two_path.tsv", &tsv(TwoPathRow::TSV_HEADER, &two_path, |r| r.tsv()))?;
        write_out(
            dir,
            "summary.tsv",
            &tsv("suite\tchecked\tfailed\tpass", &suites, |x| {
                format!("{}\t{}\t{}\t{}", x.name, x.checked, x.failed, x.failed == 0)
            }),
        )?;
    }
    Ok(Outcome { pass })
}

const MELLIN_TSV_HEADER: &str = "chi\tr\tnu\tout_len\tafter_u\toutput\tfactor_stated\tfactor_eisenstein\tfactor_zero";

/// `alpha^(-2nu) U^(2nu) h` statistics and the interpolation factor, for each
/// character in the scenario, at level `nu_max` and every `r <= r_max`.
pub fn mellin(s: &Scenario) -> Result<Outcome> {
    let mut plan = s.plan()?;
    let nu = s.nu_max;
    plan.levels.retain(|l| l.nu == nu);
    plan.total_cost = (0..=s.r_max).map(|r| estimate_cost(s.p, nu, r, s.out_len)).sum();
    plan.g_len = required_input(s.p, nu, s.out_len);
    for l in &mut plan.levels {
        l.cost = plan.total_cost;
    }
    print_plan(&plan);
    check_budget(plan.total_cost, s.budget)?;
    let ctx = s.context(&plan)?;
    let group = CharacterGroup::new(arith::pow_u64(s.p, nu))?;
    let mut reports = Vec::new();
    for label in &s.chi {
        let chi = group.parse(label)?;
        for r in 0..=s.r_max {
            let rep = mellin_data(&ctx, &chi, r, s.out_len)?;
            println!(
                "{} r={r}: v(U h) = {}, v(output) = {}, factor {} (v = {}){}",
                rep.chi,
                rep.after_u,
                rep.output,
                rep.factor_stated,
                rep.factor_stated_valuation,
                if rep.factor_zero { ", FACTOR ZERO" } else { "" }
            );
            reports.push(rep);
        }
    }
    println!("note: {ARCHIMEDEAN_NOTE}");
    if let Some(dir) = &s.out {
        let report = json!({ "header": header(s, &plan, "mellin"), "reports": reports });
        write_out(dir, "mellin.json", &to_json(&report))?;
        let table = tsv(MELLIN_TSV_HEADER, &reports, |m| {
            format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                m.chi, m.r, m.nu, m.out_len, m.after_u, m.output, m.factor_stated, m.factor_eisenstein, m.factor_zero
            )
        });
        write_out(dir, "mellin.tsv", &table)?;
    }
    Ok(Outcome { pass: true })
}
