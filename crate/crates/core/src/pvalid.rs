//! Probabilistic consistency and entailment.
//!
//! Premises are assessed at 1 and the conclusion's coherent extension range is
//! computed; entailment holds when that range is `{1}`. Compound premises or
//! conclusions often refer to quantities nobody assessed (the conjuncts of a
//! conjunction, say). Those are added as *support* members whose values are
//! free: a coherent choice is searched first, then each support's own range is
//! computed with the others held fixed.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::coherence::{extend_member, is_coherent, ExtensionOptions};
use crate::crq::{
    conjoin, embed_conditional, parse_quantity, Assessment, CompoundQuantity, Family, QuantityKey, QuantityKind,
};
use crate::error::Error;
use crate::logic::EventSpace;
use crate::parallel;
use crate::rational::{rat, Rat};

/// The range one support quantity can take alongside the chosen values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportRange {
    pub label: String,
    pub lower: Rat,
    pub upper: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntailmentReport {
    pub entails: bool,
    /// False when the verdict rests on sampled support values.
    pub exact: bool,
    /// Coherent range of the conclusion with every premise at 1.
    pub lower: Rat,
    pub upper: Rat,
    pub rule: Option<String>,
    pub supports: Vec<SupportRange>,
    /// A coherent assessment with the premises at 1 and the conclusion below 1.
    pub witness: Option<Vec<(String, Rat)>>,
}

/// The referenced quantity behind parameter `p` of `q`.
fn support_for(space: &EventSpace, q: &CompoundQuantity, p: usize) -> Option<CompoundQuantity> {
    let comps = q.components();
    match (q.kind(), p) {
        (QuantityKind::Conjunction | QuantityKind::Iterated { .. }, 1) => Some(embed_conditional(space, &comps[0])),
        (QuantityKind::Conjunction | QuantityKind::Iterated { .. }, 2) => Some(embed_conditional(space, &comps[1])),
        (QuantityKind::Iterated { .. }, 3) => {
            conjoin(space, &embed_conditional(space, &comps[0]), &embed_conditional(space, &comps[1])).ok()
        }
        _ => None,
    }
}

fn rank(q: &CompoundQuantity) -> u8 {
    match q.kind() {
        QuantityKind::Event => 0,
        QuantityKind::Conjunction => 1,
        QuantityKind::Iterated { .. } => 2,
    }
}

/// Missing referenced quantities of `given`, to a fixpoint, simplest first.
fn supports(space: &EventSpace, given: &[Arc<CompoundQuantity>]) -> Vec<Arc<CompoundQuantity>> {
    let mut known: BTreeSet<QuantityKey> = given.iter().map(|q| q.key().clone()).collect();
    let mut out: Vec<Arc<CompoundQuantity>> = Vec::new();
    let mut queue: Vec<Arc<CompoundQuantity>> = given.to_vec();
    while let Some(q) = queue.pop() {
        for p in q.referenced_params() {
            if p == 0 || known.contains(&q.params()[p].key) {
                continue;
            }
            if let Some(s) = support_for(space, &q, p) {
                known.insert(s.key().clone());
                let s = Arc::new(s);
                queue.push(s.clone());
                out.push(s);
            }
        }
    }
    out.sort_by_key(|q| rank(q));
    out
}

/// The working family: premises, supports, then (optionally) the conclusion.
struct Layout {
    family: Arc<Family>,
    premises: usize,
    /// Indices whose values are free in the consistency search.
    free: Vec<usize>,
    conclusion: Option<usize>,
}

impl Layout {
    fn build(space: &EventSpace, premises: &[Arc<CompoundQuantity>], conclusion: Option<&Arc<CompoundQuantity>>) -> Result<Self, Error> {
        if premises.is_empty() {
            return Err(Error::Precondition("at least one premise is needed".into()));
        }
        let mut given: Vec<Arc<CompoundQuantity>> = premises.to_vec();
        given.extend(conclusion.cloned());
        let extra = supports(space, &given);
        let mut members: Vec<Arc<CompoundQuantity>> = premises.to_vec();
        members.extend(extra.iter().cloned());
        let n = members.len();
        let mut free: Vec<usize> = (premises.len()..n).collect();
        let conclusion = match conclusion {
            Some(c) => {
                members.push(c.clone());
                free.push(n);
                Some(n)
            }
            None => None,
        };
        let family = Arc::new(Family::new(space, members)?);
        // The conclusion is only free in the search when something reads it.
        if let Some(c) = conclusion {
            if !(0..c).any(|i| family.depends_on(i, c)) {
                free.pop();
            }
        }
        Ok(Layout { family, premises: premises.len(), free, conclusion })
    }

    /// The family without an unreferenced conclusion.
    fn search_family(&self) -> Result<Arc<Family>, Error> {
        match self.conclusion {
            Some(c) if !self.free.contains(&c) => {
                let members = self.family.members()[..c].to_vec();
                Ok(Arc::new(Family::new(self.family.space(), members)?))
            }
            _ => Ok(self.family.clone()),
        }
    }
}

/// A coherent choice of the free values with every premise at 1, on a grid.
fn search(family: &Arc<Family>, premises: usize, free: &[usize], opts: ExtensionOptions) -> Option<Vec<Rat>> {
    let n = family.len();
    let base = |choice: &[Rat]| -> Vec<Rat> {
        let mut v = vec![Rat::one(); n];
        for (k, &i) in free.iter().enumerate() {
            v[i] = choice[k].clone();
        }
        debug_assert!(v[..premises].iter().all(|x| x.is_one()));
        v
    };
    if free.is_empty() {
        let v = base(&[]);
        return is_coherent(family, v.clone(), opts.strategy).then_some(v);
    }
    for denom in [2i64, 4, 8] {
        let k = free.len() as u32;
        let points = (denom as usize + 1).checked_pow(k)?;
        if points > 4096 {
            break;
        }
        let grid: Vec<Vec<Rat>> = (0..points)
            .map(|mut code| {
                (0..k)
                    .map(|_| {
                        let j = code % (denom as usize + 1);
                        code /= denom as usize + 1;
                        // Try values near 1 first: premises at 1 usually pull supports up.
                        rat(denom - j as i64, denom)
                    })
                    .collect()
            })
            .collect();
        let ok = parallel::map(opts.strategy, &grid, |c| is_coherent(family, base(c), opts.strategy));
        if let Some(pos) = ok.iter().position(|&b| b) {
            return Some(base(&grid[pos]));
        }
    }
    None
}

/// Whether the premises can all be assessed at 1 coherently.
pub fn p_consistent(space: &EventSpace, premises: &[Arc<CompoundQuantity>], opts: ExtensionOptions) -> Result<bool, Error> {
    let layout = Layout::build(space, premises, None)?;
    Ok(search(&layout.family, layout.premises, &layout.free, opts).is_some())
}

pub fn p_entails(
    space: &EventSpace,
    premises: &[Arc<CompoundQuantity>],
    conclusion: &Arc<CompoundQuantity>,
    opts: ExtensionOptions,
) -> Result<EntailmentReport, Error> {
    let layout = Layout::build(space, premises, Some(conclusion))?;
    let search_family = layout.search_family()?;
    let values =
        search(&search_family, layout.premises, &layout.free, opts).ok_or(Error::NotPConsistent)?;

    // A premise repeated as conclusion: reflexivity.
    if let Some(j) = premises.iter().position(|p| p.key() == conclusion.key()) {
        let _ = j;
        return Ok(EntailmentReport {
            entails: true,
            exact: true,
            lower: Rat::one(),
            upper: Rat::one(),
            rule: None,
            supports: Vec::new(),
            witness: None,
        });
    }

    let c = layout.conclusion.expect("conclusion present");
    let support_idx: Vec<usize> = (layout.premises..c).collect();
    let mut ranges = Vec::with_capacity(support_idx.len());
    let mut samples: Vec<Vec<Rat>> = vec![values.clone()];
    let mut exact = true;
    for &i in &support_idx {
        let b = extend_member(&search_family, &values, i, None, opts)?;
        if !b.is_point() {
            exact = false;
            for end in [&b.lower.value, &b.upper.value] {
                let mut v = values.clone();
                v[i] = end.clone();
                if is_coherent(&search_family, v.clone(), opts.strategy) {
                    samples.push(v);
                }
            }
        }
        exact &= b.exact();
        ranges.push(SupportRange {
            label: search_family.members()[i].describe().to_string(),
            lower: b.lower.value,
            upper: b.upper.value,
        });
    }

    let hint = if support_idx.is_empty() && opts.closed_form_hints {
        Assessment::new(Arc::new(Family::new(space, premises.to_vec())?), vec![Rat::one(); premises.len()])
            .ok()
            .and_then(|a| crate::bounds::closed_form(&a, conclusion))
    } else {
        None
    };

    let mut lower: Option<(Rat, Vec<Rat>)> = None;
    let mut upper = Rat::zero();
    let mut rule = None;
    for s in &samples {
        let mut v = s.clone();
        if v.len() == c {
            v.push(Rat::zero());
        }
        let b = extend_member(&layout.family, &v, c, hint.clone(), opts)?;
        exact &= b.exact();
        rule = rule.or(b.rule.clone());
        if lower.as_ref().is_none_or(|(l, _)| b.lower.value < *l) {
            v[c] = b.lower.value.clone();
            lower = Some((b.lower.value.clone(), v));
        }
        if b.upper.value > upper {
            upper = b.upper.value;
        }
    }
    let (lower, at_lower) = lower.expect("at least one sample");
    let entails = lower.is_one();
    let witness = (!entails).then(|| {
        layout.family.members().iter().map(|m| m.describe().to_string()).zip(at_lower).collect()
    });
    Ok(EntailmentReport {
        entails,
        // A counterexample is a genuine coherent assessment, so a negative
        // verdict never depends on sampling.
        exact: !entails || exact,
        lower,
        upper,
        rule,
        supports: ranges,
        witness,
    })
}

/// Entailment of every conclusion (and the joint verdict).
pub fn p_entails_family(
    space: &EventSpace,
    premises: &[Arc<CompoundQuantity>],
    conclusions: &[Arc<CompoundQuantity>],
    opts: ExtensionOptions,
) -> Result<Vec<EntailmentReport>, Error> {
    conclusions.iter().map(|c| p_entails(space, premises, c, opts)).collect()
}

/// A rule in the catalogue, stated in the expression syntax.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSpec {
    pub name: &'static str,
    pub atoms: &'static [&'static str],
    /// Formulas declared impossible.
    pub constraints: &'static [&'static str],
    pub premises: &'static [&'static str],
    pub conclusion: &'static str,
    /// Whether the premises p-entail the conclusion.
    pub valid: bool,
}

impl RuleSpec {
    pub fn space(&self) -> Result<EventSpace, Error> {
        let mut space = EventSpace::new(self.atoms)?;
        for c in self.constraints {
            let f = space.parse(c)?;
            space = space.with_constraint(&f)?;
        }
        Ok(space)
    }

    pub fn quantities(&self, space: &EventSpace) -> Result<(Vec<Arc<CompoundQuantity>>, Arc<CompoundQuantity>), Error> {
        let premises = self.premises.iter().map(|p| parse_quantity(space, p)).collect::<Result<Vec<_>, _>>()?;
        Ok((premises, parse_quantity(space, self.conclusion)?))
    }
}

pub fn rule_specs() -> Vec<RuleSpec> {
    const AHBK: &[&str] = &["A", "H", "B", "K"];
    const AB: &[&str] = &["A", "B"];
    vec![
        RuleSpec {
            name: "And",
            atoms: AHBK,
            constraints: &[],
            premises: &["cond(A, H)", "cond(B, K)"],
            conclusion: "and(cond(A, H), cond(B, K))",
            valid: true,
        },
        RuleSpec {
            name: "one-premise centering",
            atoms: AHBK,
            constraints: &[],
            premises: &["and(cond(A, H), cond(B, K))"],
            conclusion: "given(cond(B, K), cond(A, H))",
            valid: true,
        },
        RuleSpec {
            name: "one-premise centering, events",
            atoms: AB,
            constraints: &[],
            premises: &["A and B"],
            conclusion: "cond(B, A)",
            valid: true,
        },
        RuleSpec {
            name: "two-premise centering",
            atoms: AHBK,
            constraints: &[],
            premises: &["cond(A, H)", "cond(B, K)"],
            conclusion: "given(cond(B, K), cond(A, H))",
            valid: true,
        },
        RuleSpec {
            name: "two-premise centering, events",
            atoms: AB,
            constraints: &[],
            premises: &["A", "B"],
            conclusion: "cond(B, A)",
            valid: true,
        },
        RuleSpec {
            name: "biconditional And",
            atoms: AB,
            constraints: &[],
            premises: &["cond(A, B)", "cond(B, A)"],
            conclusion: "bicond(A, B)",
            valid: true,
        },
        RuleSpec {
            name: "one-premise biconditional centering",
            atoms: AB,
            constraints: &[],
            premises: &["A and B"],
            conclusion: "bicond(A, B)",
            valid: true,
        },
        RuleSpec {
            name: "two-premise biconditional centering",
            atoms: AB,
            constraints: &[],
            premises: &["A", "B"],
            conclusion: "bicond(A, B)",
            valid: true,
        },
        RuleSpec {
            name: "counterfactual",
            atoms: &["A", "B", "C"],
            constraints: &["A and B"],
            premises: &["B", "cond(C, A)"],
            conclusion: "given(cond(C, A), B)",
            valid: true,
        },
        RuleSpec {
            name: "negated components do not give the biconditional",
            atoms: AB,
            constraints: &[],
            premises: &["not A", "not B"],
            conclusion: "bicond(A, B)",
            valid: false,
        },
        RuleSpec {
            name: "a false antecedent does not give the conditional",
            atoms: AB,
            constraints: &[],
            premises: &["not A"],
            conclusion: "cond(B, A)",
            valid: false,
        },
    ]
}

#[derive(Clone, Debug)]
pub struct VerifiedRule {
    pub spec: RuleSpec,
    pub report: EntailmentReport,
}

fn verify_rule(spec: &RuleSpec, opts: ExtensionOptions) -> Result<VerifiedRule, Error> {
    let space = spec.space()?;
    let (premises, conclusion) = spec.quantities(&space)?;
    let report = p_entails(&space, &premises, &conclusion, opts)?;
    if report.entails != spec.valid {
        return Err(Error::Invariant(format!(
            "catalogued rule `{}` expected {} but the check found conclusion range [{}, {}]",
            spec.name,
            if spec.valid { "valid" } else { "invalid" },
            report.lower,
            report.upper
        )));
    }
    Ok(VerifiedRule { spec: spec.clone(), report })
}

/// Every catalogued rule, re-verified. A rule whose verdict disagrees with its
/// entry is an internal error.
pub fn rule_catalogue(opts: ExtensionOptions) -> Result<Vec<VerifiedRule>, Error> {
    let specs = rule_specs();
    let inner = ExtensionOptions { strategy: parallel::Strategy::Sequential, ..opts };
    parallel::map(opts.strategy, &specs, |s| verify_rule(s, inner)).into_iter().collect()
}

/// A chain `premises ⊨ steps ⊨ conclusion`, each link checked separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    pub name: &'static str,
    pub atoms: &'static [&'static str],
    pub premises: &'static [&'static str],
    pub steps: &'static [&'static str],
    pub conclusion: &'static str,
}

pub fn transitivity_chains() -> Vec<ChainSpec> {
    vec![
        ChainSpec {
            name: "And then one-premise centering",
            atoms: &["A", "H", "B", "K"],
            premises: &["cond(A, H)", "cond(B, K)"],
            steps: &["and(cond(A, H), cond(B, K))"],
            conclusion: "given(cond(B, K), cond(A, H))",
        },
        ChainSpec {
            name: "conjunction then biconditional",
            atoms: &["A", "B"],
            premises: &["A", "B"],
            steps: &["A and B"],
            conclusion: "bicond(A, B)",
        },
        ChainSpec {
            name: "conjunction then conditional",
            atoms: &["A", "B"],
            premises: &["A", "B"],
            steps: &["A and B"],
            conclusion: "cond(B, A)",
        },
    ]
}

/// Checks every link of the chain and the direct entailment; all must hold.
pub fn verify_chain(spec: &ChainSpec, opts: ExtensionOptions) -> Result<bool, Error> {
    let space = EventSpace::new(spec.atoms)?;
    let parse = |v: &[&str]| v.iter().map(|p| parse_quantity(&space, p)).collect::<Result<Vec<_>, _>>();
    let premises = parse(spec.premises)?;
    let steps = parse(spec.steps)?;
    let conclusion = parse_quantity(&space, spec.conclusion)?;
    let first = p_entails_family(&space, &premises, &steps, opts)?.iter().all(|r| r.entails);
    let second = p_entails(&space, &steps, &conclusion, opts)?.entails;
    let direct = p_entails(&space, &premises, &conclusion, opts)?.entails;
    Ok(first && second && direct)
}
