//! Conditional random quantities and the compound constructors.
//!
//! A [`CompoundQuantity`] is a list of cases (disjoint regions with a value
//! expression each) over a conditioning event; off the condition it takes its
//! own prevision. Value expressions are polynomials in the quantity's local
//! parameters; parameter 0 is always the quantity's own prevision and the
//! others name other quantities by [`QuantityKey`].

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::logic::{formula_from_ast, ConditionalEvent, EventSpace, Formula};
use crate::poly::ValueExpr;
use crate::rational::{in_unit_interval, Rat};
use crate::syntax::{self, CondAst, FormulaAst};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuantityKind {
    Event,
    Conjunction,
    /// `reduced` marks the product-formula form (no `z` parameter).
    Iterated { reduced: bool },
}

/// Identity of a conditional event modulo the workspace constraints: `(EH, H)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventKey {
    pub true_region: Formula,
    pub condition: Formula,
}

impl EventKey {
    pub fn of(space: &EventSpace, c: &ConditionalEvent) -> Self {
        EventKey { true_region: space.normalize(&c.true_region()), condition: space.normalize(&c.antecedent) }
    }
}

/// What a parameter refers to. Reduced and unreduced iterated conditionals
/// share a key: they are the same random quantity with the same prevision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantityKey {
    Event(EventKey),
    /// Stored with the two keys sorted, so conjunction is symmetric.
    Conjunction(EventKey, EventKey),
    Iterated { consequent: EventKey, antecedent: EventKey },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub key: QuantityKey,
    pub symbol: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub region: Formula,
    pub value: ValueExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompoundQuantity {
    kind: QuantityKind,
    key: QuantityKey,
    /// Event: `[E|H]`; conjunction: `[A|H, B|K]`; iterated: `[A|H (antecedent), B|K (consequent)]`.
    components: Vec<ConditionalEvent>,
    condition: Formula,
    cases: Vec<Case>,
    params: Vec<Param>,
    label: String,
}

impl CompoundQuantity {
    fn build(
        space: &EventSpace,
        kind: QuantityKind,
        key: QuantityKey,
        components: Vec<ConditionalEvent>,
        raw_cases: Vec<(Formula, ValueExpr)>,
        params: Vec<Param>,
        label: String,
    ) -> Self {
        let mut cases = Vec::new();
        let mut condition = space.bottom();
        for (region, value) in raw_cases {
            let region = space.normalize(&region);
            if region.is_bottom() {
                continue;
            }
            debug_assert!(!region.intersects(&condition), "overlapping cases");
            condition = condition.or(&region);
            cases.push(Case { region, value });
        }
        CompoundQuantity { kind, key, components, condition, cases, params, label }
    }

    pub fn kind(&self) -> QuantityKind {
        self.kind
    }

    pub fn key(&self) -> &QuantityKey {
        &self.key
    }

    pub fn components(&self) -> &[ConditionalEvent] {
        &self.components
    }

    /// The structural conditioning event (possible assignments covered by cases).
    pub fn condition(&self) -> &Formula {
        &self.condition
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn symbols(&self) -> Vec<String> {
        self.params.iter().map(|p| p.symbol.clone()).collect()
    }

    pub fn own_symbol(&self) -> &str {
        &self.params[0].symbol
    }

    pub fn describe(&self) -> &str {
        &self.label
    }

    /// As a plain conditional event, when it is one.
    pub fn as_event(&self) -> Option<&ConditionalEvent> {
        match self.kind {
            QuantityKind::Event => self.components.first(),
            _ => None,
        }
    }

    /// Index of the case containing `assignment`, if any.
    pub fn case_of(&self, assignment: usize) -> Option<usize> {
        self.cases.iter().position(|c| c.region.contains(assignment))
    }

    /// Value expression at an assignment; the own parameter off the condition.
    pub fn value_at(&self, assignment: usize) -> ValueExpr {
        match self.case_of(assignment) {
            Some(i) => self.cases[i].value.clone(),
            None => ValueExpr::var(0),
        }
    }

    /// Local parameter indices that actually occur (always includes 0).
    pub fn referenced_params(&self) -> Vec<usize> {
        let mut v: Vec<usize> = std::iter::once(0).chain(self.cases.iter().flat_map(|c| c.value.vars())).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The product-formula form of an iterated conditional: `z := μx`, after
    /// which the `H̄K̄` entry equals `μ` and leaves the conditioning event.
    pub fn reduce_by_product_formula(&self, space: &EventSpace) -> Result<CompoundQuantity, Error> {
        match self.kind {
            QuantityKind::Iterated { reduced: false } => {
                iterate_impl(space, &self.components[0], &self.components[1], true)
            }
            QuantityKind::Iterated { reduced: true } => Ok(self.clone()),
            _ => Err(Error::Precondition("only iterated conditionals have a product-formula form".into())),
        }
    }
}

fn wrap(s: &str) -> String {
    if s.contains(' ') || s.contains('|') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

/// `E|H` as the random quantity `EH + x·H̄`.
pub fn embed_conditional(space: &EventSpace, c: &ConditionalEvent) -> CompoundQuantity {
    let key = QuantityKey::Event(EventKey::of(space, c));
    let label = c.describe(space);
    CompoundQuantity::build(
        space,
        QuantityKind::Event,
        key.clone(),
        vec![c.clone()],
        vec![(c.true_region(), ValueExpr::one()), (c.false_region(), ValueExpr::zero())],
        vec![Param { key, symbol: "x".into() }],
        label,
    )
}

fn event_component<'a>(q: &'a CompoundQuantity, role: &str) -> Result<&'a ConditionalEvent, Error> {
    q.as_event().ok_or_else(|| {
        Error::Nested(format!("{role} `{}` must be a conditional event, not a compound", q.describe()))
    })
}

/// `(A|H) ∧ (B|K)`: 1 on `AHBK`, 0 on `ĀH ∨ B̄K`, `x` on `H̄BK`, `y` on `AHK̄`,
/// own `z` on `H̄K̄`.
pub fn conjoin(space: &EventSpace, c1: &CompoundQuantity, c2: &CompoundQuantity) -> Result<CompoundQuantity, Error> {
    let e1 = event_component(c1, "conjunct")?;
    let e2 = event_component(c2, "conjunct")?;
    let (k1, k2) = (EventKey::of(space, e1), EventKey::of(space, e2));
    let key = if k1 <= k2 {
        QuantityKey::Conjunction(k1.clone(), k2.clone())
    } else {
        QuantityKey::Conjunction(k2.clone(), k1.clone())
    };
    let (a, h) = (&e1.consequent, &e1.antecedent);
    let (b, k) = (&e2.consequent, &e2.antecedent);
    let ah = a.and(h);
    let bk = b.and(k);
    let z = ValueExpr::var(0);
    let x = ValueExpr::var(1);
    let y = ValueExpr::var(2);
    let cases = vec![
        (ah.and(&bk), ValueExpr::one()),
        (h.and_not(a).or(&k.and_not(b)), ValueExpr::zero()),
        (bk.and_not(h), x),
        (ah.and_not(k), y),
        (h.negate().and_not(k), z),
    ];
    let label = format!("{} and {}", wrap(c1.describe()), wrap(c2.describe()));
    let params = vec![
        Param { key: key.clone(), symbol: "z".into() },
        Param { key: QuantityKey::Event(k1), symbol: "x".into() },
        Param { key: QuantityKey::Event(k2), symbol: "y".into() },
    ];
    let mut q = CompoundQuantity::build(
        space,
        QuantityKind::Conjunction,
        key,
        vec![e1.clone(), e2.clone()],
        cases,
        params,
        label,
    );
    // The own-valued H̄K̄ entry is the complement, not a case.
    let own = ValueExpr::var(0);
    q.cases.retain(|c| c.value != own);
    q.condition = q.cases.iter().fold(space.bottom(), |acc, c| acc.or(&c.region));
    Ok(q)
}

/// `(B|K)|(A|H) = (B|K)∧(A|H) + μ·(Ā|H)`, in its seven-case table.
pub fn iterate(
    space: &EventSpace,
    antecedent: &CompoundQuantity,
    consequent: &CompoundQuantity,
) -> Result<CompoundQuantity, Error> {
    let ant = event_component(antecedent, "antecedent")?;
    let con = event_component(consequent, "consequent")?;
    iterate_impl(space, ant, con, false)
}

fn iterate_impl(
    space: &EventSpace,
    ant: &ConditionalEvent,
    con: &ConditionalEvent,
    reduced: bool,
) -> Result<CompoundQuantity, Error> {
    let (ka, kc) = (EventKey::of(space, ant), EventKey::of(space, con));
    let key = QuantityKey::Iterated { consequent: kc.clone(), antecedent: ka.clone() };
    let conj_key = if ka <= kc {
        QuantityKey::Conjunction(ka.clone(), kc.clone())
    } else {
        QuantityKey::Conjunction(kc.clone(), ka.clone())
    };
    let (a, h) = (&ant.consequent, &ant.antecedent);
    let (b, k) = (&con.consequent, &con.antecedent);
    let ah = a.and(h);
    let hbar = h.negate();
    let mu = ValueExpr::var(0);
    let x = ValueExpr::var(1);
    let y = ValueExpr::var(2);
    let z = ValueExpr::var(3);
    let mu_not_x = mu.mul(&ValueExpr::one().sub(&x));
    let mut cases = vec![
        (ah.and(b).and(k), ValueExpr::one()),
        (ah.and_not(b).and(k), ValueExpr::zero()),
        (ah.and_not(k), y),
        (h.and_not(a), mu.clone()),
        (hbar.and(b).and(k), x.add(&mu_not_x)),
        (hbar.and_not(b).and(k), mu_not_x.clone()),
    ];
    let mut params = vec![
        Param { key: key.clone(), symbol: "mu".into() },
        Param { key: QuantityKey::Event(ka), symbol: "x".into() },
        Param { key: QuantityKey::Event(kc), symbol: "y".into() },
    ];
    if !reduced {
        cases.push((hbar.and_not(k), z.add(&mu_not_x)));
        params.push(Param { key: conj_key, symbol: "z".into() });
    }
    let label = {
        let con_label = wrap(&con.describe(space));
        let ant_label = wrap(&ant.describe(space));
        format!("{con_label}|{ant_label}")
    };
    Ok(CompoundQuantity::build(
        space,
        QuantityKind::Iterated { reduced },
        key,
        vec![ant.clone(), con.clone()],
        cases,
        params,
        label,
    ))
}

/// `A||B = (AB)|(A∨B)`.
pub fn biconditional(space: &EventSpace, a: &Formula, b: &Formula) -> Result<ConditionalEvent, Error> {
    ConditionalEvent::new(space, a.and(b), a.or(b))
}

/// `(AH ∨ H̄)(BK ∨ K̄) | (H ∨ K)`.
pub fn quasi_conjunction(
    space: &EventSpace,
    c1: &ConditionalEvent,
    c2: &ConditionalEvent,
) -> Result<ConditionalEvent, Error> {
    let m1 = c1.true_region().or(&c1.void_region());
    let m2 = c2.true_region().or(&c2.void_region());
    ConditionalEvent::new(space, m1.and(&m2), c1.antecedent.or(&c2.antecedent))
}

/// Where each local parameter of a family member gets its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Link {
    Own,
    Member(usize),
    Fixed(Rat),
    /// Declared by the constructor but absent from every non-empty case.
    Unused,
}

/// An ordered list of quantities with every referenced parameter resolved,
/// either to another member or to a fixed value.
#[derive(Clone, Debug)]
pub struct Family {
    space: EventSpace,
    members: Vec<Arc<CompoundQuantity>>,
    links: Vec<Vec<Link>>,
    bindings: Vec<(QuantityKey, Rat)>,
}

impl Family {
    pub fn new(space: &EventSpace, members: Vec<Arc<CompoundQuantity>>) -> Result<Self, Error> {
        Self::with_bindings(space, members, Vec::new())
    }

    /// `bindings` supplies values for referenced quantities that are not members.
    pub fn with_bindings(
        space: &EventSpace,
        members: Vec<Arc<CompoundQuantity>>,
        bindings: Vec<(QuantityKey, Rat)>,
    ) -> Result<Self, Error> {
        if members.is_empty() {
            return Err(Error::Precondition("a family needs at least one quantity".into()));
        }
        for (_, v) in &bindings {
            if !in_unit_interval(v) {
                return Err(Error::OutOfRange { quantity: "binding".into(), value: v.to_string() });
            }
        }
        let mut links = Vec::with_capacity(members.len());
        for (i, q) in members.iter().enumerate() {
            let used = q.referenced_params();
            let mut row = Vec::with_capacity(q.params.len());
            for (p, param) in q.params.iter().enumerate() {
                if p == 0 {
                    row.push(Link::Own);
                } else if !used.contains(&p) {
                    row.push(Link::Unused);
                } else if let Some(j) = members.iter().position(|m| m.key == param.key) {
                    row.push(if j == i { Link::Own } else { Link::Member(j) });
                } else if let Some((_, v)) = bindings.iter().find(|(k, _)| *k == param.key) {
                    row.push(Link::Fixed(v.clone()));
                } else {
                    return Err(Error::Unresolved { symbol: param.symbol.clone(), quantity: q.describe().to_string() });
                }
            }
            links.push(row);
        }
        Ok(Family { space: space.clone(), members, links, bindings })
    }

    pub fn space(&self) -> &EventSpace {
        &self.space
    }

    pub fn members(&self) -> &[Arc<CompoundQuantity>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn links(&self, i: usize) -> &[Link] {
        &self.links[i]
    }

    pub fn bindings(&self) -> &[(QuantityKey, Rat)] {
        &self.bindings
    }

    /// A new family with `q` appended.
    pub fn push(&self, q: Arc<CompoundQuantity>) -> Result<Family, Error> {
        let mut members = self.members.clone();
        members.push(q);
        Family::with_bindings(&self.space, members, self.bindings.clone())
    }

    /// Whether member `i`'s value expressions read member `j`'s value.
    pub fn depends_on(&self, i: usize, j: usize) -> bool {
        self.links[i].contains(&Link::Member(j))
    }

    pub fn position(&self, key: &QuantityKey) -> Option<usize> {
        self.members.iter().position(|m| m.key() == key)
    }
}

/// Exact values in `[0,1]`, one per family member.
#[derive(Clone, Debug)]
pub struct Assessment {
    family: Arc<Family>,
    values: Vec<Rat>,
}

impl Assessment {
    pub fn new(family: Arc<Family>, values: Vec<Rat>) -> Result<Self, Error> {
        if values.len() != family.len() {
            return Err(Error::Precondition(format!(
                "{} values for a family of {} quantities",
                values.len(),
                family.len()
            )));
        }
        for (q, v) in family.members.iter().zip(&values) {
            if !in_unit_interval(v) {
                return Err(Error::OutOfRange { quantity: q.describe().to_string(), value: v.to_string() });
            }
        }
        Ok(Assessment { family, values })
    }

    /// Convenience: build the family and the assessment in one go.
    pub fn from_members(
        space: &EventSpace,
        members: Vec<Arc<CompoundQuantity>>,
        values: Vec<Rat>,
    ) -> Result<Self, Error> {
        Assessment::new(Arc::new(Family::new(space, members)?), values)
    }

    pub fn family(&self) -> &Arc<Family> {
        &self.family
    }

    pub fn space(&self) -> &EventSpace {
        &self.family.space
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of a quantity identified by key, from the members or the bindings.
    pub fn lookup(&self, key: &QuantityKey) -> Option<Rat> {
        self.family
            .position(key)
            .map(|j| self.values[j].clone())
            .or_else(|| self.family.bindings.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone()))
    }

    /// The local parameter vector of member `i`; unused slots are zero.
    pub fn param_values(&self, i: usize) -> Vec<Rat> {
        self.family.links[i]
            .iter()
            .map(|l| match l {
                Link::Own => self.values[i].clone(),
                Link::Member(j) => self.values[*j].clone(),
                Link::Fixed(v) => v.clone(),
                Link::Unused => Rat::zero(),
            })
            .collect()
    }
}

/// One row of an instantiated value table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueRow {
    pub region: Formula,
    pub value: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueTable {
    /// The cases of the quantity, in constructor order.
    pub rows: Vec<ValueRow>,
    /// The complement of the condition, valued at the own prevision.
    pub complement: Option<ValueRow>,
}

impl ValueTable {
    pub fn at(&self, assignment: usize) -> Option<&Rat> {
        self.rows
            .iter()
            .chain(self.complement.iter())
            .find(|r| r.region.contains(assignment))
            .map(|r| &r.value)
    }
}

/// Instantiates `q` with the values the assessment gives its parameters.
/// `q` need not be a member; every parameter it uses must resolve by key.
pub fn value_table(q: &CompoundQuantity, a: &Assessment) -> Result<ValueTable, Error> {
    let used = q.referenced_params();
    let mut vals = Vec::with_capacity(q.params.len());
    for (p, param) in q.params.iter().enumerate() {
        if !used.contains(&p) {
            vals.push(Rat::zero());
            continue;
        }
        match a.lookup(&param.key) {
            Some(v) => vals.push(v),
            None => {
                return Err(Error::Unresolved { symbol: param.symbol.clone(), quantity: q.describe().to_string() })
            }
        }
    }
    let space = a.space();
    let rows = q.cases.iter().map(|c| ValueRow { region: c.region.clone(), value: c.value.eval(&vals) }).collect();
    let rest = space.possible().and_not(&q.condition);
    let complement = (!rest.is_bottom()).then(|| ValueRow { region: rest, value: vals[0].clone() });
    Ok(ValueTable { rows, complement })
}

/// Symbolic listing of the cases: `(region label, value expression)`, with the
/// complement last.
pub fn describe_cases(space: &EventSpace, q: &CompoundQuantity) -> Vec<(String, String)> {
    let names = q.symbols();
    let mut out: Vec<(String, String)> =
        q.cases.iter().map(|c| (space.label(&c.region), c.value.display(&names))).collect();
    let rest = space.possible().and_not(&q.condition);
    if !rest.is_bottom() {
        out.push((space.label(&rest), names[0].clone()));
    }
    out
}

/// A named formula or quantity available to expressions.
#[derive(Clone, Debug)]
pub enum Definition {
    Formula(Formula),
    Quantity(Arc<CompoundQuantity>),
}

pub type Resolver<'a> = dyn Fn(&str) -> Option<Result<Definition, Error>> + 'a;

/// Parses a compound expression with no definitions in scope.
pub fn parse_quantity(space: &EventSpace, text: &str) -> Result<Arc<CompoundQuantity>, Error> {
    let ast = syntax::parse_cexpr(text)?;
    elaborate(space, &ast, &|_| None)
}

pub fn elaborate(space: &EventSpace, ast: &CondAst, resolve: &Resolver<'_>) -> Result<Arc<CompoundQuantity>, Error> {
    let formula = |f: &FormulaAst| -> Result<Formula, Error> {
        formula_from_ast(f, space, &|name| {
            resolve(name).map(|r| match r? {
                Definition::Formula(f) => Ok(f),
                Definition::Quantity(q) => {
                    Err(Error::Nested(format!("`{name}` names the quantity `{}`, not a formula", q.describe())))
                }
            })
        })
    };
    let event = |ast: &CondAst| -> Result<Arc<CompoundQuantity>, Error> { elaborate(space, ast, resolve) };
    Ok(match ast {
        CondAst::Formula(FormulaAst::Ident { name, .. }) if space.atom(name).is_err() => match resolve(name) {
            Some(Ok(Definition::Quantity(q))) => q,
            Some(Ok(Definition::Formula(f))) => Arc::new(embed_conditional(space, &ConditionalEvent::unconditional(space, f))),
            Some(Err(e)) => return Err(e),
            None => return Err(Error::UnknownName(name.clone())),
        },
        CondAst::Formula(f) => Arc::new(embed_conditional(space, &ConditionalEvent::unconditional(space, formula(f)?))),
        CondAst::Cond(e, h) => Arc::new(embed_conditional(space, &ConditionalEvent::new(space, formula(e)?, formula(h)?)?)),
        CondAst::Bicond(a, b) => Arc::new(embed_conditional(space, &biconditional(space, &formula(a)?, &formula(b)?)?)),
        CondAst::And(l, r) => Arc::new(conjoin(space, &*event(l)?, &*event(r)?)?),
        CondAst::Given { consequent, antecedent } => Arc::new(iterate(space, &*event(antecedent)?, &*event(consequent)?)?),
        CondAst::Quasi(l, r) => {
            let (l, r) = (event(l)?, event(r)?);
            let c1 = event_component(&l, "quasi conjunct")?;
            let c2 = event_component(&r, "quasi conjunct")?;
            Arc::new(embed_conditional(space, &quasi_conjunction(space, c1, c2)?))
        }
    })
}

/// Outcome of the Import–Export comparison between `(C|A)|B` and `C|AB`.
#[derive(Clone, Debug)]
pub struct ImportExportWitness {
    pub assessment: Assessment,
    pub iterated: Arc<CompoundQuantity>,
    pub conditional: Arc<CompoundQuantity>,
    /// `(assignment, value of (C|A)|B, value of C|AB)` wherever they differ.
    pub differences: Vec<(usize, Rat, Rat)>,
}

/// Builds `(C|A)|B` and `C|AB` with `P(A|B)=x`, `P(C|AB)=z`, `P(C|A)=y` and
/// the coherent `μ = zx + y(1−x)`, and lists the assignments where their value
/// tables disagree.
pub fn import_export_counterexample(
    space: &EventSpace,
    a: &Formula,
    b: &Formula,
    c: &Formula,
    x: Rat,
    z: Rat,
    y: Rat,
) -> Result<ImportExportWitness, Error> {
    let ce = |e: &Formula, h: &Formula| ConditionalEvent::new(space, e.clone(), h.clone());
    let a_given_b = Arc::new(embed_conditional(space, &ce(a, b)?));
    let c_given_ab = Arc::new(embed_conditional(space, &ce(c, &a.and(b))?));
    let c_given_a = Arc::new(embed_conditional(space, &ce(c, a)?));
    let b_event = embed_conditional(space, &ConditionalEvent::unconditional(space, b.clone()));
    let iterated = Arc::new(iterate(space, &b_event, &c_given_a)?);
    let mu = &z * &x + &y * (Rat::one() - &x);
    let assessment = Assessment::from_members(
        space,
        vec![a_given_b, c_given_ab.clone(), c_given_a, iterated.clone()],
        vec![x, z, y, mu],
    )?;
    let t1 = value_table(&iterated, &assessment)?;
    let t2 = value_table(&c_given_ab, &assessment)?;
    let mut differences = Vec::new();
    for w in space.possible().iter() {
        let (v1, v2) = (t1.at(w).cloned().unwrap_or_default(), t2.at(w).cloned().unwrap_or_default());
        if v1 != v2 {
            differences.push((w, v1, v2));
        }
    }
    Ok(ImportExportWitness { assessment, iterated, conditional: c_given_ab, differences })
}

/// Groups assignments with equal values, for compact display.
pub fn group_by_value(space: &EventSpace, table: &ValueTable) -> BTreeMap<Rat, Formula> {
    let mut out: BTreeMap<Rat, Formula> = BTreeMap::new();
    for row in table.rows.iter().chain(table.complement.iter()) {
        let e = out.entry(row.value.clone()).or_insert_with(|| space.bottom());
        *e = e.or(&row.region);
    }
    out
}
