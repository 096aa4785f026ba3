use std::sync::Arc;

use super::*;
use crate::crq::{parse_quantity, CompoundQuantity};
use crate::rational::{int, rat};

fn q(space: &EventSpace, text: &str) -> Arc<CompoundQuantity> {
    parse_quantity(space, text).unwrap()
}

fn iterated_family() -> (EventSpace, Arc<Family>) {
    let s = EventSpace::new(&["A", "H", "B", "K"]).unwrap();
    let members = vec![
        q(&s, "cond(A, H)"),
        q(&s, "cond(B, K)"),
        q(&s, "and(cond(A, H), cond(B, K))"),
        q(&s, "given(cond(B, K), cond(A, H))"),
    ];
    (s.clone(), Arc::new(Family::new(&s, members).unwrap()))
}

fn unconditional_family() -> (EventSpace, Arc<Family>) {
    let s = EventSpace::new(&["A", "B"]).unwrap();
    let members = vec![q(&s, "A"), q(&s, "B"), q(&s, "A and B"), q(&s, "cond(B, A)")];
    (s.clone(), Arc::new(Family::new(&s, members).unwrap()))
}

/// `(0, y, 0, μ)` with `y`, `μ` as symbols 0 and 1.
fn symbolic_zero_x() -> Vec<ValueExpr> {
    vec![ValueExpr::zero(), ValueExpr::var(0), ValueExpr::zero(), ValueExpr::var(1)]
}

fn syms() -> Vec<String> {
    vec!["y".into(), "mu".into()]
}

fn assess(f: &Arc<Family>, v: &[Rat]) -> Assessment {
    Assessment::new(f.clone(), v.to_vec()).unwrap()
}

#[test]
fn constituent_table_with_conditional_components() {
    let (s, f) = iterated_family();
    let sp = build_points_symbolic(&f, &symbolic_zero_x(), 2);
    let rows = format_points(&s, &sp, &syms());
    let expect = [
        ("C1", "A H B K", "(1, 1, 1, 1)"),
        ("C2", "A H ~B K", "(1, 0, 0, 0)"),
        ("C3", "A H ~K", "(1, y, y, y)"),
        ("C4", "~A H B K", "(0, 1, 0, mu)"),
        ("C5", "~A H ~B K", "(0, 0, 0, mu)"),
        ("C6", "~A H ~K", "(0, y, 0, mu)"),
        ("C7", "~H B K", "(0, 1, 0, mu)"),
        ("C8", "~H ~B K", "(0, 0, 0, mu)"),
        ("C0", "~H ~K", "(0, y, 0, mu)"),
    ];
    let got: Vec<(&str, &str, &str)> = rows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
    assert_eq!(got, expect);
}

#[test]
fn constituent_table_with_unconditional_components() {
    let (s, f) = unconditional_family();
    let sp = build_points_symbolic(&f, &symbolic_zero_x(), 2);
    let rows = format_points(&s, &sp, &syms());
    let expect = [
        ("C1", "A B", "(1, 1, 1, 1)"),
        ("C2", "A ~B", "(1, 0, 0, 0)"),
        ("C3", "~A B", "(0, 1, 0, mu)"),
        ("C4", "~A ~B", "(0, 0, 0, mu)"),
    ];
    let got: Vec<(&str, &str, &str)> = rows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
    assert_eq!(got, expect);
}

fn lambda_solves(ps: &PointSystem, lambda: &[Rat]) -> bool {
    let total: Rat = lambda.iter().sum();
    let coords = (0..ps.target.len()).all(|i| {
        let s: Rat = ps.points.iter().zip(lambda).map(|(p, l)| &p[i] * l).sum();
        s == ps.target[i]
    });
    total.is_one() && coords && lambda.iter().all(|l| !l.is_negative())
}

#[test]
fn sigma_at_zero_antecedent() {
    let (y, mu) = (rat(1, 3), rat(7, 10));
    let (_, f) = iterated_family();
    let ps = build_points(&assess(&f, &[int(0), y.clone(), int(0), mu.clone()]));
    assert_eq!(ps.points.len(), 8);
    let sol = solve_sigma(&ps).expect("solvable");
    assert!(lambda_solves(&ps, &sol.lambdas));
    let known = [0, 0, 0, 1, 2, 0, 0, 0].map(|k| match k {
        1 => y.clone(),
        2 => Rat::one() - &y,
        _ => Rat::zero(),
    });
    assert!(lambda_solves(&ps, &known));

    let i0 = compute_i0(&ps, Strategy::Sequential).unwrap();
    assert_eq!(i0.zero, vec![3]);
    assert_eq!(i0.maxima[..3], [int(1), int(1), int(1)]);

    let (_, f) = unconditional_family();
    let ps = build_points(&assess(&f, &[int(0), y.clone(), int(0), mu]));
    let known = vec![int(0), int(0), y.clone(), Rat::one() - &y];
    assert!(lambda_solves(&ps, &known));
    assert_eq!(compute_i0(&ps, Strategy::Parallel).unwrap().zero, vec![3]);
}

#[test]
fn sigma_single_event() {
    let s = EventSpace::new(&["A"]).unwrap();
    let f = Arc::new(Family::new(&s, vec![q(&s, "A")]).unwrap());
    let ps = build_points(&assess(&f, &[rat(1, 3)]));
    assert_eq!(ps.points, vec![vec![int(1)], vec![int(0)]]);
    let raw = PointSystem::from_points(ps.points.clone(), vec![int(2)]);
    assert!(solve_sigma(&raw).is_none());
    assert!(compute_i0(&raw, Strategy::Sequential).is_none());
    assert!(compute_i0(&ps, Strategy::Sequential).unwrap().zero.is_empty());
}

#[test]
fn unconditional_families_have_empty_i0() {
    let s = EventSpace::new(&["A", "B"]).unwrap();
    let f = Arc::new(Family::new(&s, vec![q(&s, "A"), q(&s, "B"), q(&s, "A and B")]).unwrap());
    let ps = build_points(&assess(&f, &[rat(1, 2), rat(1, 2), rat(1, 4)]));
    assert!(compute_i0(&ps, Strategy::Sequential).unwrap().zero.is_empty());
}

#[test]
fn coherence_examples() {
    let (_, f) = iterated_family();
    let ok = check_coherence(&assess(&f, &[int(0), rat(1, 2), int(0), rat(7, 10)]));
    assert!(ok.coherent);
    assert_eq!(ok.trace.len(), 2);
    assert!(check_coherence(&assess(&f, &[rat(1, 2), rat(1, 2), rat(2, 5), rat(4, 5)])).coherent);

    let a = assess(&f, &[rat(1, 2), rat(1, 2), rat(3, 10), rat(1, 2)]);
    let bad = check_coherence(&a);
    assert!(!bad.coherent);
    let w = bad.witness.unwrap();
    assert!(w.verify(&a));
    assert!(w.gains.iter().all(|(_, g)| g.is_positive()));
    assert!(check_coherence(&assess(&f, &[rat(1, 2), rat(1, 2), rat(3, 10), rat(3, 5)])).coherent);
}

#[test]
fn strategies_agree_on_verdicts() {
    let (_, f) = unconditional_family();
    for v in [[1, 1, 1, 1], [2, 2, 1, 2], [2, 2, 1, 1], [0, 2, 0, 3]] {
        let vals: Vec<Rat> = v.iter().map(|&k| rat(k, 4)).collect();
        let a = assess(&f, &vals);
        let seq = check_coherence_with(&a, CheckOptions { strategy: Strategy::Sequential });
        let par = check_coherence_with(&a, CheckOptions { strategy: Strategy::Parallel });
        assert_eq!(seq, par);
    }
}

#[test]
fn extension_examples() {
    let s = EventSpace::new(&["A", "H", "B", "K"]).unwrap();
    let a = Assessment::from_members(&s, vec![q(&s, "cond(A, H)"), q(&s, "cond(B, K)")], vec![int(1), int(1)]).unwrap();
    let b = extension_bounds(&a, q(&s, "and(cond(A, H), cond(B, K))"), ExtensionOptions::default()).unwrap();
    assert_eq!((b.lower.value.clone(), b.upper.value.clone()), (int(1), int(1)));
    assert!(b.exact());

    let s = EventSpace::new(&["A", "B"]).unwrap();
    let a = Assessment::from_members(&s, vec![q(&s, "A"), q(&s, "B")], vec![rat(4, 5), rat(3, 5)]).unwrap();
    let opts = ExtensionOptions { closed_form_hints: false, ..Default::default() };
    let b = extension_bounds(&a, q(&s, "cond(B, A)"), opts).unwrap();
    assert_eq!((b.lower.value.clone(), b.upper.value.clone()), (rat(1, 2), rat(3, 4)));
    assert!(b.exact() && b.interval && b.rule.is_none());
    let b = extension_bounds(&a, q(&s, "cond(B, A)"), ExtensionOptions::default()).unwrap();
    assert_eq!(b.rule.as_deref(), Some("unconditional centering"));

    let a = Assessment::from_members(&s, vec![q(&s, "not A"), q(&s, "not B")], vec![int(1), int(1)]).unwrap();
    let b = extension_bounds(&a, q(&s, "bicond(A, B)"), opts).unwrap();
    assert_eq!((b.lower.value, b.upper.value), (int(0), int(1)));
}

#[test]
fn extension_of_incoherent_base_is_an_error() {
    let s = EventSpace::new(&["A", "B"]).unwrap();
    let a = Assessment::from_members(&s, vec![q(&s, "A"), q(&s, "A and B")], vec![rat(1, 4), rat(1, 2)]).unwrap();
    assert_eq!(extension_bounds(&a, q(&s, "B"), ExtensionOptions::default()), Err(crate::error::Error::Incoherent));
}

#[test]
fn extension_without_relaxation_or_hints() {
    let s = EventSpace::new(&["A", "B"]).unwrap();
    let a = Assessment::from_members(&s, vec![q(&s, "cond(A, B)"), q(&s, "cond(B, A)")], vec![rat(1, 2), rat(1, 2)]).unwrap();
    let opts = ExtensionOptions { closed_form_hints: false, relaxation: false, ..Default::default() };
    let b = extension_bounds(&a, q(&s, "bicond(A, B)"), opts).unwrap();
    assert_eq!((b.lower.value.clone(), b.upper.value.clone()), (rat(1, 3), rat(1, 3)));
    assert!(b.exact());
}
