//! Closed-form propagation rules and coherent-set descriptors.
//!
//! These are independent of the numeric extension search; the search uses them
//! only as certified hints, and the tests use the search as their oracle.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::crq::{parse_quantity, Assessment, CompoundQuantity, EventKey, QuantityKind};
use crate::error::Error;
use crate::logic::{ConditionalEvent, EventSpace, Formula};
use crate::rational::{in_unit_interval, Rat};

pub const FRECHET: &str = "Frechet-Hoeffding";
pub const CENTERING: &str = "centering";
pub const UNCONDITIONAL_CENTERING: &str = "unconditional centering";
pub const BICONDITIONAL_CENTERING: &str = "biconditional centering";
pub const HAMACHER: &str = "Hamacher t-norm";
pub const COUNTERFACTUAL: &str = "counterfactual";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundPair {
    pub lower: Rat,
    pub upper: Rat,
}

impl BoundPair {
    fn point(v: Rat) -> Self {
        BoundPair { lower: v.clone(), upper: v }
    }

    pub fn contains(&self, v: &Rat) -> bool {
        self.lower <= *v && *v <= self.upper
    }
}

fn unit(name: &str, v: &Rat) -> Result<(), Error> {
    if in_unit_interval(v) {
        Ok(())
    } else {
        Err(Error::OutOfRange { quantity: name.into(), value: v.to_string() })
    }
}

fn max(a: Rat, b: Rat) -> Rat {
    if a >= b { a } else { b }
}

fn min(a: Rat, b: Rat) -> Rat {
    if a <= b { a } else { b }
}

/// `[max(x+y−1, 0), min(x, y)]`.
pub fn frechet_bounds(x: &Rat, y: &Rat) -> Result<BoundPair, Error> {
    unit("x", x)?;
    unit("y", y)?;
    Ok(BoundPair { lower: max(x + y - Rat::one(), Rat::zero()), upper: min(x.clone(), y.clone()) })
}

/// Bounds on `(B|K)|(A|H)` from `P(A|H)=x`, `P(B|K)=y`:
/// `[max(0, (x+y−1)/x), min(1, y/x)]` for `x > 0`, else `[0, 1]`.
pub fn centering_bounds(x: &Rat, y: &Rat) -> Result<BoundPair, Error> {
    unit("x", x)?;
    unit("y", y)?;
    if x.is_zero() {
        return Ok(BoundPair { lower: Rat::zero(), upper: Rat::one() });
    }
    let f = frechet_bounds(x, y)?;
    Ok(BoundPair { lower: f.lower / x, upper: f.upper / x })
}

/// Bounds on `B|A` from `P(A)=x`, `P(B)=y`; the same shape as [`centering_bounds`].
pub fn unconditional_centering_bounds(x: &Rat, y: &Rat) -> Result<BoundPair, Error> {
    centering_bounds(x, y)
}

/// Bounds on `A||B` from `P(A)=x`, `P(B)=y`.
pub fn biconditional_bounds(x: &Rat, y: &Rat) -> Result<BoundPair, Error> {
    let f = frechet_bounds(x, y)?;
    let hi = max(x.clone(), y.clone());
    let upper = if hi.is_zero() { Rat::one() } else { f.upper / hi };
    Ok(BoundPair { lower: f.lower, upper })
}

/// `P(A||B)` from `P(A|B)=x`, `P(B|A)=y`: the Hamacher product `xy/(x+y−xy)`,
/// and 0 when either is 0.
pub fn hamacher_propagation(x: &Rat, y: &Rat) -> Result<Rat, Error> {
    unit("x", x)?;
    unit("y", y)?;
    if x.is_zero() || y.is_zero() {
        return Ok(Rat::zero());
    }
    Ok(x * y / (x + y - x * y))
}

/// Value of the counterfactual `(C|A)|B` when `AB = ⊥`: it is `P(C|A) = y`.
pub fn counterfactual_prevision(space: &EventSpace, y: &Rat, a: &Formula, b: &Formula) -> Result<Rat, Error> {
    unit("y", y)?;
    if !space.is_impossible(&a.and(b)) {
        return Err(Error::Precondition("the counterfactual rule needs A and B incompatible".into()));
    }
    if space.is_impossible(b) {
        return Err(Error::ImpossibleCondition(space.display(b)));
    }
    Ok(y.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetKind {
    /// Coherent `(x, y, z, μ)` on `{A|H, B|K, (A|H)∧(B|K), (B|K)|(A|H)}`.
    PiIterated,
    /// The same for `{A, B, AB, B|A}`.
    PiUnconditional,
    /// Coherent `(x, y)` on `{A|B, B|A}` with `P(A||B) = z`.
    Dz,
}

/// A closed-form description of a set of coherent assessments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherentSetDescriptor {
    pub kind: SetKind,
    /// `z` for [`SetKind::Dz`]; empty otherwise.
    pub parameters: Vec<Rat>,
}

impl CoherentSetDescriptor {
    pub fn arity(&self) -> usize {
        match self.kind {
            SetKind::PiIterated | SetKind::PiUnconditional => 4,
            SetKind::Dz => 2,
        }
    }

    pub fn contains(&self, point: &[Rat]) -> Result<bool, Error> {
        if point.len() != self.arity() {
            return Err(Error::Precondition(format!("expected {} coordinates, got {}", self.arity(), point.len())));
        }
        for (i, v) in point.iter().enumerate() {
            unit(&format!("coordinate {}", i + 1), v)?;
        }
        Ok(match self.kind {
            SetKind::PiIterated | SetKind::PiUnconditional => {
                let (x, y, z, mu) = (&point[0], &point[1], &point[2], &point[3]);
                if x.is_zero() {
                    z.is_zero()
                } else {
                    frechet_bounds(x, y)?.contains(z) && *z == mu * x
                }
            }
            SetKind::Dz => {
                let (x, y) = (&point[0], &point[1]);
                let z = &self.parameters[0];
                if z.is_zero() {
                    x.is_zero() || y.is_zero()
                } else {
                    z <= x && *y == x * z / (x - z + x * z)
                }
            }
        })
    }
}

/// The coherent `(x, y)` with `P(A||B) = z`.
pub fn reverse_biconditional_set(z: &Rat) -> Result<CoherentSetDescriptor, Error> {
    unit("z", z)?;
    Ok(CoherentSetDescriptor { kind: SetKind::Dz, parameters: vec![z.clone()] })
}

/// Membership of `(x, y, z, μ)` in a `Π` set.
pub fn coherent_set_membership(kind: SetKind, point: &[Rat]) -> Result<bool, Error> {
    if kind == SetKind::Dz {
        return Err(Error::Precondition("use reverse_biconditional_set for D_z".into()));
    }
    CoherentSetDescriptor { kind, parameters: Vec::new() }.contains(point)
}

/// Recognises a registered closed form for extending `a` to `target`.
///
/// Every pattern requires the family to be exactly the premises of the rule,
/// in either order, and the atoms involved to be logically independent.
pub fn closed_form(a: &Assessment, target: &CompoundQuantity) -> Option<(String, BoundPair)> {
    let space = a.space();
    let members = a.family().members();
    let events: Vec<&ConditionalEvent> = members.iter().filter_map(|m| m.as_event()).collect();
    if events.len() != members.len() {
        return None;
    }
    let value_of = |c: &ConditionalEvent| a.lookup(&crate::crq::QuantityKey::Event(EventKey::of(space, c)));
    let nontrivial = |fs: &[&Formula]| -> Vec<Formula> {
        fs.iter().filter(|f| !space.equivalent(f, &space.top())).map(|f| (*f).clone()).collect()
    };

    if let Some(found) = counterfactual(a, target) {
        return Some(found);
    }
    if members.len() != 2 {
        return None;
    }
    let named = |name: &str, b: Result<BoundPair, Error>| b.ok().map(|b| (name.to_string(), b));

    match target.kind() {
        QuantityKind::Conjunction | QuantityKind::Iterated { .. } => {
            // components: conjunction [A|H, B|K]; iterated [antecedent A|H, consequent B|K].
            let (c1, c2) = (&target.components()[0], &target.components()[1]);
            let (x, y) = (value_of(c1)?, value_of(c2)?);
            let atoms = nontrivial(&[&c1.consequent, &c1.antecedent, &c2.consequent, &c2.antecedent]);
            if !space.independent(&atoms) {
                return None;
            }
            match target.kind() {
                QuantityKind::Conjunction => named(FRECHET, frechet_bounds(&x, &y)),
                _ => named(CENTERING, centering_bounds(&x, &y)),
            }
        }
        QuantityKind::Event => {
            let t = target.as_event()?;
            let (e1, e2) = (events[0], events[1]);
            let top = space.top();
            let both_unconditional =
                space.equivalent(&e1.antecedent, &top) && space.equivalent(&e2.antecedent, &top);
            if both_unconditional {
                let (p, q) = (&e1.consequent, &e2.consequent);
                if !space.independent(&[p.clone(), q.clone()]) {
                    return None;
                }
                let (vp, vq) = (&a.values()[0], &a.values()[1]);
                let pq = p.and(q);
                if !space.equivalent(&t.true_region(), &pq) {
                    return None;
                }
                if space.equivalent(&t.antecedent, &p.or(q)) {
                    return named(BICONDITIONAL_CENTERING, biconditional_bounds(vp, vq));
                }
                // q|p needs P(p) as x and P(q) as y.
                if space.equivalent(&t.antecedent, p) {
                    return named(UNCONDITIONAL_CENTERING, unconditional_centering_bounds(vp, vq));
                }
                if space.equivalent(&t.antecedent, q) {
                    return named(UNCONDITIONAL_CENTERING, unconditional_centering_bounds(vq, vp));
                }
                return None;
            }
            // {A|B, B|A} ⊢ A||B.
            let (p, q) = (&e1.antecedent, &e2.antecedent);
            let pq = p.and(q);
            let shape = space.equivalent(&e1.true_region(), &pq)
                && space.equivalent(&e2.true_region(), &pq)
                && space.equivalent(&t.true_region(), &pq)
                && space.equivalent(&t.antecedent, &p.or(q));
            if shape && space.independent(&[p.clone(), q.clone()]) {
                let v = hamacher_propagation(&a.values()[0], &a.values()[1]).ok()?;
                return Some((HAMACHER.to_string(), BoundPair::point(v)));
            }
            None
        }
    }
}

/// `(C|A)|B` with `AB = ⊥`, given `C|A` and optionally `B`.
fn counterfactual(a: &Assessment, target: &CompoundQuantity) -> Option<(String, BoundPair)> {
    let space = a.space();
    if !matches!(target.kind(), QuantityKind::Iterated { .. }) {
        return None;
    }
    let (ant, con) = (&target.components()[0], &target.components()[1]);
    if !space.equivalent(&ant.antecedent, &space.top()) {
        return None;
    }
    let con_key = crate::crq::QuantityKey::Event(EventKey::of(space, con));
    let ant_key = crate::crq::QuantityKey::Event(EventKey::of(space, ant));
    if a.family().members().iter().any(|m| *m.key() != con_key && *m.key() != ant_key) {
        return None;
    }
    let y = a.lookup(&con_key)?;
    let v = counterfactual_prevision(space, &y, &con.antecedent, &ant.consequent).ok()?;
    Some((COUNTERFACTUAL.to_string(), BoundPair::point(v)))
}

/// The five two-premise propagation rules, each with the family and target
/// it speaks about, so the closed form can be set against the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Propagation {
    Frechet,
    Centering,
    UnconditionalCentering,
    Biconditional,
    Hamacher,
}

impl Propagation {
    pub const ALL: [Propagation; 5] = [
        Propagation::Frechet,
        Propagation::Centering,
        Propagation::UnconditionalCentering,
        Propagation::Biconditional,
        Propagation::Hamacher,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Propagation::Frechet => FRECHET,
            Propagation::Centering => CENTERING,
            Propagation::UnconditionalCentering => UNCONDITIONAL_CENTERING,
            Propagation::Biconditional => BICONDITIONAL_CENTERING,
            Propagation::Hamacher => HAMACHER,
        }
    }

    pub fn closed_form(self, x: &Rat, y: &Rat) -> Result<BoundPair, Error> {
        match self {
            Propagation::Frechet => frechet_bounds(x, y),
            Propagation::Centering => centering_bounds(x, y),
            Propagation::UnconditionalCentering => unconditional_centering_bounds(x, y),
            Propagation::Biconditional => biconditional_bounds(x, y),
            Propagation::Hamacher => hamacher_propagation(x, y).map(BoundPair::point),
        }
    }

    /// `(x, y)` on the premises, and the quantity to extend to.
    pub fn instance(self, x: &Rat, y: &Rat) -> Result<(Assessment, Arc<CompoundQuantity>), Error> {
        let (atoms, premises, target): (&[&str], [&str; 2], &str) = match self {
            Propagation::Frechet => (&["A", "H", "B", "K"], ["cond(A, H)", "cond(B, K)"], "and(cond(A, H), cond(B, K))"),
            Propagation::Centering => {
                (&["A", "H", "B", "K"], ["cond(A, H)", "cond(B, K)"], "given(cond(B, K), cond(A, H))")
            }
            Propagation::UnconditionalCentering => (&["A", "B"], ["A", "B"], "cond(B, A)"),
            Propagation::Biconditional => (&["A", "B"], ["A", "B"], "bicond(A, B)"),
            Propagation::Hamacher => (&["A", "B"], ["cond(A, B)", "cond(B, A)"], "bicond(A, B)"),
        };
        let space = EventSpace::new(atoms)?;
        let members = premises.iter().map(|p| parse_quantity(&space, p)).collect::<Result<Vec<_>, _>>()?;
        let mut target = parse_quantity(&space, target)?;
        if self == Propagation::Centering {
            // Only x and y are given, so the conjunction is eliminated.
            target = Arc::new(target.reduce_by_product_formula(&space)?);
        }
        let a = Assessment::from_members(&space, members, vec![x.clone(), y.clone()])?;
        Ok((a, target))
    }
}
