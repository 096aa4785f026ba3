//! Event algebra: atoms, formulas, conditional events and constituents.

mod formula;
mod print;

pub use formula::{Formula, MAX_ATOMS};

use crate::error::Error;
use crate::syntax::{self, FormulaAst};
use print::Style;

/// The atoms of a workspace plus the set of logically possible assignments.
///
/// `possible` starts as Ω; constraints such as `A and B` (asserted impossible)
/// shrink it. Everything downstream enumerates only possible assignments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventSpace {
    names: Vec<String>,
    possible: Formula,
}

impl EventSpace {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, Error> {
        if names.is_empty() {
            return Err(Error::Atoms("at least one atom is required".into()));
        }
        if names.len() > MAX_ATOMS {
            return Err(Error::Atoms(format!("{} atoms exceed the limit of {MAX_ATOMS}", names.len())));
        }
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            if !syntax::is_identifier(n) {
                return Err(Error::Atoms(format!("`{n}` is not a valid atom name")));
            }
            if out.iter().any(|m| m == n) {
                return Err(Error::Atoms(format!("duplicate atom `{n}`")));
            }
            out.push(n.to_string());
        }
        let vars = out.len() as u8;
        Ok(EventSpace { names: out, possible: Formula::top(vars) })
    }

    /// Declares `f` impossible.
    pub fn with_constraint(mut self, f: &Formula) -> Result<Self, Error> {
        let possible = self.possible.and_not(f);
        if possible.is_bottom() {
            return Err(Error::Atoms("constraints rule out every assignment".into()));
        }
        self.possible = possible;
        Ok(self)
    }

    pub fn vars(&self) -> u8 {
        self.names.len() as u8
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn possible(&self) -> &Formula {
        &self.possible
    }

    pub fn top(&self) -> Formula {
        Formula::top(self.vars())
    }

    pub fn bottom(&self) -> Formula {
        Formula::bottom(self.vars())
    }

    pub fn atom(&self, name: &str) -> Result<Formula, Error> {
        let idx = self
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))?;
        Ok(Formula::atom(self.vars(), idx))
    }

    /// Restricts `f` to the possible assignments.
    pub fn normalize(&self, f: &Formula) -> Formula {
        f.and(&self.possible)
    }

    pub fn is_impossible(&self, f: &Formula) -> bool {
        !f.intersects(&self.possible)
    }

    /// Logical implication modulo the workspace constraints.
    pub fn implies(&self, f: &Formula, g: &Formula) -> bool {
        self.is_impossible(&f.and_not(g))
    }

    pub fn equivalent(&self, f: &Formula, g: &Formula) -> bool {
        self.implies(f, g) && self.implies(g, f)
    }

    /// True when every one of the `2^k` conjunctions of the formulas or their
    /// negations is possible.
    pub fn independent(&self, fs: &[Formula]) -> bool {
        let k = fs.len();
        if k >= usize::BITS as usize - 1 {
            return false;
        }
        (0..1usize << k).all(|mask| {
            let cell = fs.iter().enumerate().fold(self.possible.clone(), |acc, (j, f)| {
                if mask >> j & 1 == 1 {
                    acc.and(f)
                } else {
                    acc.and_not(f)
                }
            });
            !cell.is_bottom()
        })
    }

    pub fn parse(&self, text: &str) -> Result<Formula, Error> {
        parse_formula(text, self)
    }

    /// Grammar rendering; reparses to an equal formula.
    pub fn display(&self, f: &Formula) -> String {
        print::render(f, &self.bottom(), &self.names, Style::Grammar)
    }

    /// Short label such as `A H ~K`, simplified using the impossible assignments.
    pub fn label(&self, f: &Formula) -> String {
        print::render(&self.normalize(f), &self.possible.negate(), &self.names, Style::Compact)
    }

    /// Label of a single assignment as a full minterm.
    pub fn minterm_label(&self, assignment: usize) -> String {
        let lits: Vec<String> = self
            .names
            .iter()
            .enumerate()
            .map(|(j, n)| if assignment >> j & 1 == 1 { n.clone() } else { format!("~{n}") })
            .collect();
        lits.join(" ")
    }
}

pub fn parse_formula(text: &str, space: &EventSpace) -> Result<Formula, Error> {
    let ast = syntax::parse_formula_ast(text)?;
    formula_from_ast(&ast, space, &|_| None)
}

/// Turns a parsed formula into a truth table. `lookup` resolves names that are
/// not atoms (formula definitions); atoms take precedence.
pub fn formula_from_ast(
    ast: &FormulaAst,
    space: &EventSpace,
    lookup: &dyn Fn(&str) -> Option<Result<Formula, Error>>,
) -> Result<Formula, Error> {
    Ok(match ast {
        FormulaAst::True => space.top(),
        FormulaAst::False => space.bottom(),
        FormulaAst::Ident { name, .. } => match space.atom(name) {
            Ok(f) => f,
            Err(_) => match lookup(name) {
                Some(r) => r?,
                None => return Err(Error::UnknownName(name.clone())),
            },
        },
        FormulaAst::Not(a) => formula_from_ast(a, space, lookup)?.negate(),
        FormulaAst::And(a, b) => formula_from_ast(a, space, lookup)?.and(&formula_from_ast(b, space, lookup)?),
        FormulaAst::Or(a, b) => formula_from_ast(a, space, lookup)?.or(&formula_from_ast(b, space, lookup)?),
    })
}

/// Plain implication of satisfying sets: `f ∧ ¬g = ⊥`.
pub fn implies(f: &Formula, g: &Formula) -> bool {
    f.implies(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    True,
    False,
    Void,
}

/// `E|H`: true on `EH`, false on `ĒH`, void on `H̄`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConditionalEvent {
    pub consequent: Formula,
    pub antecedent: Formula,
}

impl ConditionalEvent {
    pub fn new(space: &EventSpace, consequent: Formula, antecedent: Formula) -> Result<Self, Error> {
        if space.is_impossible(&antecedent) {
            return Err(Error::ImpossibleCondition(space.display(&antecedent)));
        }
        Ok(ConditionalEvent { consequent, antecedent })
    }

    /// `E|Ω`.
    pub fn unconditional(space: &EventSpace, event: Formula) -> Self {
        ConditionalEvent { consequent: event, antecedent: space.top() }
    }

    pub fn true_region(&self) -> Formula {
        self.consequent.and(&self.antecedent)
    }

    pub fn false_region(&self) -> Formula {
        self.antecedent.and_not(&self.consequent)
    }

    pub fn void_region(&self) -> Formula {
        self.antecedent.negate()
    }

    pub fn status(&self, assignment: usize) -> Status {
        if !self.antecedent.contains(assignment) {
            Status::Void
        } else if self.consequent.contains(assignment) {
            Status::True
        } else {
            Status::False
        }
    }

    pub fn describe(&self, space: &EventSpace) -> String {
        let wrap = |f: &Formula| {
            let s = space.display(f);
            if s.contains(' ') {
                format!("({s})")
            } else {
                s
            }
        };
        if space.equivalent(&self.antecedent, &space.top()) {
            space.display(&self.consequent)
        } else {
            format!("{}|{}", wrap(&self.consequent), wrap(&self.antecedent))
        }
    }
}

/// Goodman–Nguyen inclusion: `E₁H₁ ⊆ E₂H₂` and `Ē₂H₂ ⊆ Ē₁H₁`.
pub fn gn_inclusion(c1: &ConditionalEvent, c2: &ConditionalEvent) -> bool {
    c1.true_region().implies(&c2.true_region()) && c2.false_region().implies(&c1.false_region())
}

/// One cell of a partition: the assignments sharing a signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstituentClass {
    /// Per family member: the index of the case it falls in, or `None` when void.
    pub signature: Vec<Option<usize>>,
    pub region: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constituents {
    /// Assignments on which every member is void, if any.
    pub c0: Option<Formula>,
    /// `C₁ … C_m`, ordered by signature.
    pub classes: Vec<ConstituentClass>,
}

impl Constituents {
    /// The disjunction of the classes, i.e. the family's conditioning event.
    pub fn condition(&self, space: &EventSpace) -> Formula {
        self.classes.iter().fold(space.bottom(), |acc, c| acc.or(&c.region))
    }
}

/// Groups the possible assignments by `signature`. Classes are ordered by
/// comparing signatures member by member, case indices ascending and void last;
/// the all-void class becomes `C₀`.
pub fn partition_by_signature(
    space: &EventSpace,
    members: usize,
    signature: impl Fn(usize) -> Vec<Option<usize>>,
) -> Constituents {
    use std::collections::BTreeMap;
    // Void sorts after every case index.
    let key = |sig: &[Option<usize>]| -> Vec<usize> { sig.iter().map(|s| s.unwrap_or(usize::MAX)).collect() };
    let mut groups: BTreeMap<Vec<usize>, (Vec<Option<usize>>, Formula)> = BTreeMap::new();
    for a in space.possible().iter() {
        let sig = signature(a);
        debug_assert_eq!(sig.len(), members);
        groups
            .entry(key(&sig))
            .or_insert_with(|| (sig, space.bottom()))
            .1
            .insert(a);
    }
    let mut c0 = None;
    let mut classes = Vec::with_capacity(groups.len());
    for (_, (signature, region)) in groups {
        if signature.iter().all(Option::is_none) {
            c0 = Some(region);
        } else {
            classes.push(ConstituentClass { signature, region });
        }
    }
    Constituents { c0, classes }
}

/// Constituents generated by a family of conditional events: each member
/// contributes `EH ∨ ĒH ∨ H̄`; cells are the non-empty combinations.
pub fn constituents(space: &EventSpace, family: &[ConditionalEvent]) -> Constituents {
    partition_by_signature(space, family.len(), |a| {
        family
            .iter()
            .map(|c| match c.status(a) {
                Status::True => Some(0),
                Status::False => Some(1),
                Status::Void => None,
            })
            .collect()
    })
}

/// Partition generated by conditioning events alone (each `H` read as `H|H`).
pub fn constituents_of_conditions(space: &EventSpace, conditions: &[Formula]) -> Constituents {
    let family: Vec<ConditionalEvent> =
        conditions.iter().map(|h| ConditionalEvent { consequent: h.clone(), antecedent: h.clone() }).collect();
    constituents(space, &family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(names: &[&str]) -> EventSpace {
        EventSpace::new(names).unwrap()
    }

    #[test]
    fn parse_examples() {
        let s = space(&["A", "B"]);
        let f = s.parse("A and not B").unwrap();
        assert_eq!(f.iter().collect::<Vec<_>>(), vec![1]);
        assert!(s.parse("A or not A").unwrap().is_top());
        assert_eq!(s.parse("not (A or B)").unwrap().iter().collect::<Vec<_>>(), vec![0]);
        assert!(matches!(s.parse("A and C"), Err(Error::UnknownName(n)) if n == "C"));
        assert!(matches!(s.parse("A and"), Err(Error::Syntax(_))));
    }

    #[test]
    fn rejects_bad_atom_sets() {
        assert!(EventSpace::new(&["A", "A"]).is_err());
        assert!(EventSpace::new(&["and"]).is_err());
        assert!(EventSpace::new(&["1x"]).is_err());
        let many: Vec<String> = (0..21).map(|i| format!("X{i}")).collect();
        assert!(EventSpace::new(&many).is_err());
    }

    #[test]
    fn table_one_has_nine_classes() {
        let s = space(&["A", "H", "B", "K"]);
        let a = s.atom("A").unwrap();
        let h = s.atom("H").unwrap();
        let b = s.atom("B").unwrap();
        let k = s.atom("K").unwrap();
        let fam = [ConditionalEvent::new(&s, a, h).unwrap(), ConditionalEvent::new(&s, b, k).unwrap()];
        let c = constituents(&s, &fam);
        let labels: Vec<String> = c.classes.iter().map(|c| s.label(&c.region)).collect();
        assert_eq!(
            labels,
            ["A H B K", "A H ~B K", "A H ~K", "~A H B K", "~A H ~B K", "~A H ~K", "~H B K", "~H ~B K"]
        );
        assert_eq!(s.label(c.c0.as_ref().unwrap()), "~H ~K");
    }

    #[test]
    fn unconditional_family_has_no_c0() {
        let s = space(&["A", "B"]);
        let fam = [
            ConditionalEvent::unconditional(&s, s.atom("A").unwrap()),
            ConditionalEvent::unconditional(&s, s.atom("B").unwrap()),
        ];
        let c = constituents(&s, &fam);
        assert!(c.c0.is_none());
        let labels: Vec<String> = c.classes.iter().map(|c| s.label(&c.region)).collect();
        assert_eq!(labels, ["A B", "A ~B", "~A B", "~A ~B"]);
    }

    #[test]
    fn single_condition() {
        let s = space(&["A"]);
        let c = constituents_of_conditions(&s, &[s.atom("A").unwrap()]);
        assert_eq!(s.label(c.c0.as_ref().unwrap()), "~A");
        assert_eq!(c.classes.len(), 1);
        assert_eq!(s.label(&c.classes[0].region), "A");
    }

    #[test]
    fn goodman_nguyen_examples() {
        let s = space(&["A", "B"]);
        let a = s.atom("A").unwrap();
        let b = s.atom("B").unwrap();
        let ab = a.and(&b);
        let ce = |e: &Formula, h: &Formula| ConditionalEvent::new(&s, e.clone(), h.clone()).unwrap();
        assert!(gn_inclusion(&ce(&ab, &s.top()), &ce(&b, &a)));
        assert!(gn_inclusion(&ce(&ab, &a.or(&b)), &ce(&a, &b)));
        assert!(!gn_inclusion(&ce(&a, &b), &ce(&b, &a)));
    }

    #[test]
    fn constraints_shrink_possible_worlds() {
        let s = space(&["A", "B"]);
        let ab = s.parse("A and B").unwrap();
        let s = s.with_constraint(&ab).unwrap();
        assert!(s.is_impossible(&ab));
        assert!(s.implies(&s.atom("B").unwrap(), &s.parse("not A").unwrap()));
        assert!(!s.independent(&[s.atom("A").unwrap(), s.atom("B").unwrap()]));
        assert_eq!(s.label(&s.atom("B").unwrap()), "B");
        assert!(ConditionalEvent::new(&s, s.atom("A").unwrap(), ab).is_err());
    }
}
