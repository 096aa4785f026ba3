//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any fails.

use std::sync::Arc;
use std::time::Instant;

use condprev::bounds::{coherent_set_membership, Propagation, SetKind};
use condprev::coherence::{check_coherence, extension_bounds, ExtensionOptions};
use condprev::crq::{import_export_counterexample, parse_quantity, value_table, Assessment, Family};
use condprev::logic::EventSpace;
use condprev::parallel::{self, Strategy};
use condprev::pvalid::rule_catalogue;
use condprev::rational::{rat, Rat};
use condprev_cli::report::Report;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn table_rows(file: &str) -> Result<Vec<(String, String, String)>, String> {
    let out = condprev_cli::run_from(["condprev", "table", "--input", &data(file), "--assessment", "zero_x", "--format", "json"]);
    match Report::from_json(&out.stdout)? {
        Report::Table(t) => Ok(t.rows.into_iter().map(|r| (r.name, r.constituent, r.value)).collect()),
        other => Err(format!("unexpected report {other:?}")),
    }
}

fn owned(rows: &[(&str, &str, &str)]) -> Vec<(String, String, String)> {
    rows.iter().map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string())).collect()
}

fn tables() -> Outcome {
    let table1 = owned(&[
        ("C1", "A H B K", "(1, 1, 1, 1)"),
        ("C2", "A H ~B K", "(1, 0, 0, 0)"),
        ("C3", "A H ~K", "(1, y, y, y)"),
        ("C4", "~A H B K", "(0, 1, 0, mu)"),
        ("C5", "~A H ~B K", "(0, 0, 0, mu)"),
        ("C6", "~A H ~K", "(0, y, 0, mu)"),
        ("C7", "~H B K", "(0, 1, 0, mu)"),
        ("C8", "~H ~B K", "(0, 0, 0, mu)"),
        ("C0", "~H ~K", "(0, y, 0, mu)"),
    ]);
    let table2 = owned(&[
        ("C1", "A B", "(1, 1, 1, 1)"),
        ("C2", "A ~B", "(1, 0, 0, 0)"),
        ("C3", "~A B", "(0, 1, 0, mu)"),
        ("C4", "~A ~B", "(0, 0, 0, mu)"),
    ]);
    let got1 = table_rows("iterated.toml")?;
    let got2 = table_rows("events.toml")?;
    if got1 != table1 {
        return Err(format!("conditional-component table differs: {got1:?}"));
    }
    if got2 != table2 {
        return Err(format!("unconditional-component table differs: {got2:?}"));
    }
    Ok(format!("{} + {} rows match exactly", got1.len(), got2.len()))
}

fn closed_forms() -> Outcome {
    let start = Instant::now();
    let grid: Vec<Rat> = (0..=20).map(|k| rat(k, 20)).collect();
    let pairs: Vec<(Rat, Rat)> = grid.iter().flat_map(|x| grid.iter().map(move |y| (x.clone(), y.clone()))).collect();
    // The search alone is the oracle: no hints.
    let opts = ExtensionOptions { closed_form_hints: false, strategy: Strategy::Sequential, ..Default::default() };
    let mut checked = 0;
    for p in Propagation::ALL {
        let bad: Vec<String> = parallel::map(Strategy::Parallel, &pairs, |(x, y)| {
            let expect = p.closed_form(x, y).map_err(|e| e.to_string())?;
            let (a, target) = p.instance(x, y).map_err(|e| e.to_string())?;
            let b = extension_bounds(&a, target, opts).map_err(|e| e.to_string())?;
            if b.lower.value == expect.lower && b.upper.value == expect.upper && b.exact() {
                Ok(())
            } else {
                Err(format!(
                    "{} at ({x}, {y}): search [{}, {}] exact={} vs closed form [{}, {}]",
                    p.name(),
                    b.lower.value,
                    b.upper.value,
                    b.exact(),
                    expect.lower,
                    expect.upper
                ))
            }
        })
        .into_iter()
        .filter_map(Result::err)
        .collect();
        if let Some(first) = bad.first() {
            return Err(format!("{} mismatches; first: {first}", bad.len()));
        }
        checked += pairs.len();
    }
    Ok(format!("{checked} grid points over 5 rules agree exactly ({:.1?})", start.elapsed()))
}

fn coherent_sets() -> Outcome {
    let families: [(SetKind, &[&str], [&str; 4]); 2] = [
        (
            SetKind::PiIterated,
            &["A", "H", "B", "K"],
            ["cond(A, H)", "cond(B, K)", "and(cond(A, H), cond(B, K))", "given(cond(B, K), cond(A, H))"],
        ),
        (SetKind::PiUnconditional, &["A", "B"], ["A", "B", "A and B", "cond(B, A)"]),
    ];
    let axis: Vec<Rat> = (0..=4).map(|k| rat(k, 4)).collect();
    let mut points = Vec::new();
    for x in &axis {
        for y in &axis {
            for z in &axis {
                for m in &axis {
                    points.push([x.clone(), y.clone(), z.clone(), m.clone()]);
                }
            }
        }
    }
    let mut summary = Vec::new();
    for (kind, atoms, members) in families {
        let space = EventSpace::new(atoms).map_err(|e| e.to_string())?;
        let qs = members.iter().map(|m| parse_quantity(&space, m)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        let family = Arc::new(Family::new(&space, qs).map_err(|e| e.to_string())?);
        let verdicts = parallel::map(Strategy::Parallel, &points, |p| {
            let a = Assessment::new(family.clone(), p.to_vec()).expect("grid values lie in [0,1]");
            (coherent_set_membership(kind, p).expect("valid point"), check_coherence(&a).coherent)
        });
        let disagree: Vec<&[Rat; 4]> =
            points.iter().zip(&verdicts).filter(|(_, (m, c))| m != c).map(|(p, _)| p).collect();
        if let Some(p) = disagree.first() {
            return Err(format!("{kind:?}: {} disagreements, first at {p:?}", disagree.len()));
        }
        let members = verdicts.iter().filter(|(m, _)| *m).count();
        summary.push(format!("{kind:?} {}/{} coherent", members, points.len()));
    }
    Ok(format!("625 points per family agree ({})", summary.join(", ")))
}

fn p_validity() -> Outcome {
    let rules = rule_catalogue(ExtensionOptions::default()).map_err(|e| e.to_string())?;
    let (mut valid, mut invalid) = (0, 0);
    for r in &rules {
        if r.spec.valid {
            if !r.report.exact {
                return Err(format!("{}: verdict not exact", r.spec.name));
            }
            valid += 1;
            continue;
        }
        // The witness must itself be a coherent assessment with the conclusion below 1.
        let w = r.report.witness.as_ref().ok_or_else(|| format!("{}: no witness", r.spec.name))?;
        let space = r.spec.space().map_err(|e| e.to_string())?;
        let (mut qs, c) = r.spec.quantities(&space).map_err(|e| e.to_string())?;
        qs.push(c);
        if qs.len() != w.len() {
            return Err(format!("{}: witness has {} values for {} quantities", r.spec.name, w.len(), qs.len()));
        }
        let values: Vec<Rat> = w.iter().map(|(_, v)| v.clone()).collect();
        let a = Assessment::from_members(&space, qs, values.clone()).map_err(|e| e.to_string())?;
        if !check_coherence(&a).coherent || values.last().unwrap().is_one() {
            return Err(format!("{}: witness {values:?} does not refute", r.spec.name));
        }
        invalid += 1;
    }
    Ok(format!("{valid} rules p-valid, {invalid} non-entailments refuted by coherent witnesses"))
}

fn counterfactuals() -> Outcome {
    let space = EventSpace::new(&["A", "B", "C"]).unwrap();
    let ab = space.parse("A and B").unwrap();
    let space = space.with_constraint(&ab).unwrap();
    let q = |t: &str| parse_quantity(&space, t).unwrap();
    let mut cases = 0;
    for y in (0..=4).map(|k| rat(k, 4)) {
        for pb in [rat(0, 1), rat(1, 2), rat(1, 1)] {
            let a = Assessment::from_members(&space, vec![q("B"), q("cond(C, A)")], vec![pb.clone(), y.clone()])
                .map_err(|e| e.to_string())?;
            let opts = ExtensionOptions { closed_form_hints: false, ..Default::default() };
            let b = extension_bounds(&a, q("given(cond(C, A), B)"), opts).map_err(|e| e.to_string())?;
            if b.lower.value != y || b.upper.value != y || !b.exact() {
                return Err(format!("P(C|A)={y}, P(B)={pb}: got [{}, {}]", b.lower.value, b.upper.value));
            }
            cases += 1;
        }
    }
    let s = EventSpace::new(&["A", "B", "C"]).unwrap();
    let (a, b, c) = (s.atom("A").unwrap(), s.atom("B").unwrap(), s.atom("C").unwrap());
    let w = import_export_counterexample(&s, &a, &b, &c, rat(1, 2), rat(1, 2), rat(1, 4)).map_err(|e| e.to_string())?;
    let not_a_b = s.parse("not A and B").unwrap();
    let on_nab = w.differences.iter().filter(|(asg, _, _)| not_a_b.contains(*asg)).count();
    if on_nab != not_a_b.count() || !check_coherence(&w.assessment).coherent {
        return Err(format!("Import-Export counterexample not found: {:?}", w.differences));
    }
    Ok(format!("{cases} counterfactual intervals are points at P(C|A); (C|A)|B and C|AB differ on all of ~A B"))
}

fn dutch_books() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let space = EventSpace::new(&["A", "H", "B", "K"]).unwrap();
    let q = |t: &str| parse_quantity(&space, t).unwrap();
    let family = Arc::new(
        Family::new(
            &space,
            vec![q("cond(A, H)"), q("cond(B, K)"), q("and(cond(A, H), cond(B, K))"), q("given(cond(B, K), cond(A, H))")],
        )
        .unwrap(),
    );
    let d = 60i64;
    let mut verified = 0;
    let mut attempts = 0;
    while verified < 100 {
        attempts += 1;
        if attempts > 10_000 {
            return Err(format!("only {verified} incoherent samples generated"));
        }
        // A coherent point x>0, z in the Frechet range, mu = z/x, then a nudge.
        let x = rat(rng.random_range(1..=d), d);
        let y = rat(rng.random_range(0..=d), d);
        let lo = (&x + &y - Rat::one()).max(Rat::zero());
        let hi = (&x).min(&y).clone();
        let t = rat(rng.random_range(0..=d), d);
        let z = &lo + (&hi - &lo) * t;
        let mu = &z / &x;
        let mut v = vec![x, y, z, mu];
        let k = rng.random_range(0..4usize);
        let nudge = rat(rng.random_range(1..=6), 97) * if rng.random_bool(0.5) { Rat::one() } else { -Rat::one() };
        v[k] += nudge;
        if v.iter().any(|c| *c < Rat::zero() || *c > Rat::one()) {
            continue;
        }
        let a = Assessment::new(family.clone(), v.clone()).unwrap();
        let verdict = check_coherence(&a);
        if verdict.coherent {
            continue;
        }
        let w = verdict.witness.ok_or("incoherent verdict without witness")?;
        if !w.verify(&a) {
            return Err(format!("witness for {v:?} is not one-signed"));
        }
        verified += 1;
    }
    Ok(format!("{verified} witnesses strictly one-signed by enumeration ({attempts} samples drawn)"))
}

fn biconditional_identity() -> Outcome {
    let space = EventSpace::new(&["A", "B"]).unwrap();
    let q = |t: &str| parse_quantity(&space, t).unwrap();
    let conj = q("and(cond(A, B), cond(B, A))");
    // Spelled out as a conditional event, and through the constructor.
    for other in [q("cond(A and B, A or B)"), q("bicond(A, B)")] {
        for t in (0..=10).map(|k| rat(k, 10)) {
            let a = Assessment::from_members(&space, vec![conj.clone(), other.clone()], vec![t.clone(), t.clone()])
                .map_err(|e| e.to_string())?;
            let t1 = value_table(&conj, &a).map_err(|e| e.to_string())?;
            let t2 = value_table(&other, &a).map_err(|e| e.to_string())?;
            for w in space.possible().iter() {
                if t1.at(w) != t2.at(w) {
                    return Err(format!("{} at prevision {t}: {} differs", other.describe(), space.minterm_label(w)));
                }
            }
        }
    }
    Ok("tables agree with (A and B)|(A or B) on all 4 constituents for 11 previsions".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("constituent tables", tables),
        ("closed forms vs coherence search", closed_forms),
        ("coherent-set membership", coherent_sets),
        ("p-validity catalogue", p_validity),
        ("counterfactuals and Import-Export", counterfactuals),
        ("Dutch-book soundness", dutch_books),
        ("conjunction of converse conditionals", biconditional_identity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS {} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
