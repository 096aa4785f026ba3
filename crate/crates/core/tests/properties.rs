use std::sync::Arc;

use condprev::bounds::{coherent_set_membership, hamacher_propagation, reverse_biconditional_set, SetKind};
use condprev::coherence::{check_coherence, check_coherence_with, CheckOptions};
use condprev::crq::{conjoin, embed_conditional, parse_quantity, value_table, Assessment, Family};
use condprev::logic::{constituents, gn_inclusion, ConditionalEvent, EventSpace, Formula};
use condprev::parallel::Strategy as Exec;
use condprev::rational::{parse_rational, rat, Rat};
use proptest::prelude::*;

fn abc() -> EventSpace {
    EventSpace::new(&["A", "B", "C"]).unwrap()
}

fn formula(bits: u8) -> Formula {
    Formula::from_fn(3, |a| bits >> a & 1 == 1)
}

fn cond_event(e: u8, h: u8) -> Option<ConditionalEvent> {
    ConditionalEvent::new(&abc(), formula(e), formula(h)).ok()
}

fn unit_rat(den: i64) -> impl Strategy<Value = Rat> {
    (0..=den).prop_map(move |k| rat(k, den))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constituents_partition_the_space(pairs in prop::collection::vec((any::<u8>(), 1u8..=255), 1..4)) {
        let s = abc();
        let family: Vec<ConditionalEvent> = pairs.iter().filter_map(|&(e, h)| cond_event(e, h)).collect();
        prop_assume!(!family.is_empty());
        let c = constituents(&s, &family);
        let mut union = c.c0.clone().unwrap_or_else(|| s.bottom());
        for (i, x) in c.classes.iter().enumerate() {
            prop_assert!(!x.region.is_bottom());
            prop_assert!(!x.region.intersects(&union), "class {i} overlaps");
            union = union.or(&x.region);
        }
        prop_assert_eq!(union, s.possible().clone());
    }

    #[test]
    fn gn_inclusion_is_a_preorder(a in (any::<u8>(), 1u8..=255), b in (any::<u8>(), 1u8..=255), c in (any::<u8>(), 1u8..=255)) {
        let (x, y, z) = (cond_event(a.0, a.1).unwrap(), cond_event(b.0, b.1).unwrap(), cond_event(c.0, c.1).unwrap());
        prop_assert!(gn_inclusion(&x, &x));
        if gn_inclusion(&x, &y) && gn_inclusion(&y, &z) {
            prop_assert!(gn_inclusion(&x, &z));
        }
    }

    #[test]
    fn formulas_print_and_reparse(bits in any::<u8>()) {
        let s = abc();
        let f = formula(bits);
        prop_assert_eq!(s.parse(&s.display(&f)).unwrap(), f);
    }

    #[test]
    fn rationals_print_and_reparse(n in -1000i64..1000, d in 1i64..1000) {
        let r = rat(n, d);
        prop_assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn conjunction_is_symmetric(a in (any::<u8>(), 1u8..=255), b in (any::<u8>(), 1u8..=255), x in unit_rat(8), y in unit_rat(8), z in unit_rat(8)) {
        let s = abc();
        let (c1, c2) = (cond_event(a.0, a.1).unwrap(), cond_event(b.0, b.1).unwrap());
        let (q1, q2) = (Arc::new(embed_conditional(&s, &c1)), Arc::new(embed_conditional(&s, &c2)));
        let k12 = Arc::new(conjoin(&s, &q1, &q2).unwrap());
        let k21 = Arc::new(conjoin(&s, &q2, &q1).unwrap());
        prop_assert_eq!(k12.key(), k21.key());
        prop_assume!(q1.key() != q2.key());
        let a = Assessment::from_members(&s, vec![q1, q2, k12.clone()], vec![x, y, z]).unwrap();
        let (t12, t21) = (value_table(&k12, &a).unwrap(), value_table(&k21, &a).unwrap());
        for w in s.possible().iter() {
            prop_assert_eq!(t12.at(w), t21.at(w));
            let v = t12.at(w).unwrap();
            prop_assert!(*v >= rat(0, 1) && *v <= rat(1, 1));
        }
    }

    #[test]
    fn witnesses_are_sound(v in prop::collection::vec(unit_rat(6), 4)) {
        let s = EventSpace::new(&["A", "H", "B", "K"]).unwrap();
        let q = |t: &str| parse_quantity(&s, t).unwrap();
        let members = vec![q("cond(A, H)"), q("cond(B, K)"), q("and(cond(A, H), cond(B, K))"), q("given(cond(B, K), cond(A, H))")];
        let a = Assessment::from_members(&s, members, v).unwrap();
        let verdict = check_coherence(&a);
        prop_assert_eq!(verdict.coherent, verdict.witness.is_none());
        if let Some(w) = verdict.witness {
            prop_assert!(w.verify(&a));
        }
    }

    #[test]
    fn coherence_survives_dropping_members(v in prop::collection::vec(unit_rat(4), 4), drop in 0usize..4) {
        let s = EventSpace::new(&["A", "B"]).unwrap();
        let q = |t: &str| parse_quantity(&s, t).unwrap();
        let members = vec![q("A"), q("B"), q("A and B"), q("cond(B, A)")];
        let a = Assessment::from_members(&s, members.clone(), v.clone()).unwrap();
        prop_assume!(check_coherence(&a).coherent);
        let mut sub = members;
        let mut vals = v;
        sub.remove(drop);
        vals.remove(drop);
        let f = Arc::new(Family::new(&s, sub).unwrap());
        prop_assert!(check_coherence(&Assessment::new(f, vals).unwrap()).coherent);
    }

    #[test]
    fn strategies_agree(v in prop::collection::vec(unit_rat(4), 3)) {
        let s = EventSpace::new(&["A", "B"]).unwrap();
        let q = |t: &str| parse_quantity(&s, t).unwrap();
        let a = Assessment::from_members(&s, vec![q("cond(A, B)"), q("cond(B, A)"), q("bicond(A, B)")], v).unwrap();
        let seq = check_coherence_with(&a, CheckOptions { strategy: Exec::Sequential });
        let par = check_coherence_with(&a, CheckOptions { strategy: Exec::Parallel });
        prop_assert_eq!(seq, par);
    }

    #[test]
    fn hamacher_value_lies_on_its_curve(x in unit_rat(12), y in unit_rat(12)) {
        let z = hamacher_propagation(&x, &y).unwrap();
        prop_assert!(reverse_biconditional_set(&z).unwrap().contains(&[x, y]).unwrap());
    }

    #[test]
    fn product_formula_set_matches_checker(x in unit_rat(5), y in unit_rat(5), z in unit_rat(5), mu in unit_rat(5)) {
        let s = EventSpace::new(&["A", "B"]).unwrap();
        let q = |t: &str| parse_quantity(&s, t).unwrap();
        let members = vec![q("A"), q("B"), q("A and B"), q("cond(B, A)")];
        let pt = [x, y, z, mu];
        let a = Assessment::from_members(&s, members, pt.to_vec()).unwrap();
        prop_assert_eq!(coherent_set_membership(SetKind::PiUnconditional, &pt).unwrap(), check_coherence(&a).coherent);
    }
}
