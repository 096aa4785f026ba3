//! Coherence checking by the operative characterization.
//!
//! For an assessment `ℳ` on a family, the constituents implying the family's
//! conditioning event give points `Q_h`; `ℳ` must lie in their convex hull
//! (system Σ). If it does, every quantity whose conditioning event can get
//! positive mass under some solution is settled, and the rest (`I₀`) is
//! checked again on its own.
//!
//! Which assignments count as "void" for a quantity is read off the
//! instantiated value table: a case whose value, with every other parameter
//! fixed, is identically the quantity's own prevision contributes no gain and
//! is treated as outside its condition. For `(B|K)|(A|H)` at `P(A|H)=0` this
//! shrinks the condition to `AH`, as it must.

mod extension;

pub use extension::{extend_member, extension_bounds, Endpoint, ExtensionBounds, ExtensionOptions};

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::crq::{Assessment, Family, Link};
use crate::logic::{partition_by_signature, ConstituentClass, EventSpace, Formula};
use crate::lp::{self, Feasibility, Optimum};
use crate::parallel::{self, Strategy};
use crate::poly::ValueExpr;
use crate::rational::Rat;

/// Per-case value expressions of one member after parameter substitution;
/// `None` marks a case that is effectively void.
fn instantiate_member(family: &Family, i: usize, values: &[ValueExpr], nsym: usize) -> Vec<Option<ValueExpr>> {
    let q = &family.members()[i];
    // Own parameter as a fresh placeholder variable `nsym`.
    let own = ValueExpr::var(nsym);
    let subst: Vec<ValueExpr> = family
        .links(i)
        .iter()
        .map(|l| match l {
            Link::Own => own.clone(),
            Link::Member(j) => values[*j].clone(),
            Link::Fixed(v) => ValueExpr::constant(v.clone()),
            Link::Unused => ValueExpr::zero(),
        })
        .collect();
    let mut back: Vec<ValueExpr> = (0..nsym).map(ValueExpr::var).collect();
    back.push(values[i].clone());
    q.cases()
        .iter()
        .map(|c| {
            let e = c.value.compose(&subst);
            if e.is_var(nsym) {
                None
            } else {
                Some(e.compose(&back))
            }
        })
        .collect()
}

struct Instance {
    members: Vec<usize>,
    cases: Vec<Vec<Option<ValueExpr>>>,
}

impl Instance {
    fn new(family: &Family, members: &[usize], values: &[ValueExpr], nsym: usize) -> Self {
        let cases = members.iter().map(|&i| instantiate_member(family, i, values, nsym)).collect();
        Instance { members: members.to_vec(), cases }
    }

    fn signature(&self, family: &Family, assignment: usize) -> Vec<Option<usize>> {
        self.members
            .iter()
            .zip(&self.cases)
            .map(|(&i, cases)| {
                family.members()[i].case_of(assignment).filter(|&c| cases[c].is_some())
            })
            .collect()
    }

    fn partition(&self, family: &Family) -> crate::logic::Constituents {
        partition_by_signature(family.space(), self.members.len(), |a| self.signature(family, a))
    }

    fn point(&self, class: &ConstituentClass, values: &[ValueExpr]) -> Vec<ValueExpr> {
        class
            .signature
            .iter()
            .zip(&self.members)
            .zip(&self.cases)
            .map(|((s, &i), cases)| match s {
                Some(c) => cases[*c].clone().expect("non-void case"),
                None => values[i].clone(),
            })
            .collect()
    }
}

/// The effective conditioning event of member `i` under the assessment.
pub fn effective_condition(a: &Assessment, i: usize) -> Formula {
    let family = a.family();
    let values: Vec<ValueExpr> = a.values().iter().cloned().map(ValueExpr::constant).collect();
    let cases = instantiate_member(family, i, &values, 0);
    let q = &family.members()[i];
    q.cases()
        .iter()
        .zip(&cases)
        .filter(|(_, e)| e.is_some())
        .fold(family.space().bottom(), |acc, (c, _)| acc.or(&c.region))
}

/// Constituent points for an assessment (system Σ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSystem {
    /// Family indices of the quantities involved.
    pub members: Vec<usize>,
    /// `C₁ … C_m` with their regions; empty when built from raw points.
    pub classes: Vec<ConstituentClass>,
    pub c0: Option<Formula>,
    pub points: Vec<Vec<Rat>>,
    /// `ℳ`, the assessed values of the members.
    pub target: Vec<Rat>,
    /// `masks[j][h]`: whether `C_h` implies the conditioning event of member `j`.
    pub masks: Vec<Vec<bool>>,
}

impl PointSystem {
    /// A bare hull problem, every point counting for every coordinate.
    pub fn from_points(points: Vec<Vec<Rat>>, target: Vec<Rat>) -> Self {
        let n = target.len();
        let masks = vec![vec![true; points.len()]; n];
        PointSystem { members: (0..n).collect(), classes: Vec::new(), c0: None, points, target, masks }
    }

    fn rows(&self) -> (Vec<Vec<Rat>>, Vec<Rat>) {
        let n = self.target.len();
        let mut a: Vec<Vec<Rat>> = (0..n).map(|i| self.points.iter().map(|q| q[i].clone()).collect()).collect();
        a.push(vec![Rat::one(); self.points.len()]);
        let mut b = self.target.clone();
        b.push(Rat::one());
        (a, b)
    }
}

pub fn build_points(a: &Assessment) -> PointSystem {
    build_points_for(a, &(0..a.len()).collect::<Vec<_>>())
}

fn build_points_for(a: &Assessment, members: &[usize]) -> PointSystem {
    let family = a.family();
    let values: Vec<ValueExpr> = a.values().iter().cloned().map(ValueExpr::constant).collect();
    let inst = Instance::new(family, members, &values, 0);
    let cons = inst.partition(family);
    let points = cons
        .classes
        .iter()
        .map(|c| {
            inst.point(c, &values)
                .into_iter()
                .map(|e| e.as_constant().expect("numeric assessment gives constant points"))
                .collect()
        })
        .collect();
    let masks = (0..members.len())
        .map(|j| cons.classes.iter().map(|c| c.signature[j].is_some()).collect())
        .collect();
    PointSystem {
        members: members.to_vec(),
        classes: cons.classes,
        c0: cons.c0,
        points,
        target: members.iter().map(|&i| a.values()[i].clone()).collect(),
        masks,
    }
}

/// Points with symbolic coordinates, for displaying tables.
#[derive(Clone, Debug)]
pub struct SymbolicPoints {
    pub classes: Vec<ConstituentClass>,
    pub c0: Option<Formula>,
    pub points: Vec<Vec<ValueExpr>>,
    pub target: Vec<ValueExpr>,
}

/// `values` are polynomials over `nsym` free symbols.
pub fn build_points_symbolic(family: &Family, values: &[ValueExpr], nsym: usize) -> SymbolicPoints {
    let members: Vec<usize> = (0..family.len()).collect();
    let inst = Instance::new(family, &members, values, nsym);
    let cons = inst.partition(family);
    let points = cons.classes.iter().map(|c| inst.point(c, values)).collect();
    SymbolicPoints { classes: cons.classes, c0: cons.c0, points, target: values.to_vec() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaSolution {
    pub lambdas: Vec<Rat>,
}

pub fn solve_sigma(ps: &PointSystem) -> Option<SigmaSolution> {
    let (a, b) = ps.rows();
    match lp::feasibility(&a, &b) {
        Feasibility::Feasible(fb) => Some(SigmaSolution { lambdas: fb.solution() }),
        Feasibility::Infeasible { .. } => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct I0 {
    /// `M_j` for each member of the point system, in order.
    pub maxima: Vec<Rat>,
    /// Positions (into `PointSystem::members`) with `M_j = 0`.
    pub zero: Vec<usize>,
}

/// `M_j = max Σ_{C_h ⊆ H_j} λ_h` over the solutions of Σ; `None` if Σ is infeasible.
pub fn compute_i0(ps: &PointSystem, strategy: Strategy) -> Option<I0> {
    let (a, b) = ps.rows();
    let Feasibility::Feasible(fb) = lp::feasibility(&a, &b) else { return None };
    Some(i0_from_basis(ps, &fb, strategy))
}

fn i0_from_basis(ps: &PointSystem, fb: &lp::FeasibleBasis, strategy: Strategy) -> I0 {
    let maxima = parallel::map(strategy, &ps.masks, |mask| {
        let c: Vec<Rat> = mask.iter().map(|&m| if m { Rat::one() } else { Rat::zero() }).collect();
        match fb.maximize(&c) {
            Optimum::Optimal { value, .. } => value,
            Optimum::Unbounded => unreachable!("Σλ = 1 bounds every Φ_j"),
        }
    });
    let zero = maxima.iter().enumerate().filter(|(_, m)| m.is_zero()).map(|(j, _)| j).collect();
    I0 { maxima, zero }
}

/// Stakes that make the gain one-signed on every constituent of a sub-family's
/// conditioning event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DutchBook {
    /// One stake per family member; zero outside `members`.
    pub stakes: Vec<Rat>,
    /// The sub-family on which the bet is placed.
    pub members: Vec<usize>,
    /// Gain on each constituent class of that sub-family.
    pub gains: Vec<(Formula, Rat)>,
}

impl DutchBook {
    /// Recomputes the gain on every possible assignment from the value tables
    /// and checks it is strictly one-signed wherever some betted quantity is
    /// not void.
    pub fn verify(&self, a: &Assessment) -> bool {
        let family = a.family();
        let space = family.space();
        let cond = self
            .members
            .iter()
            .fold(space.bottom(), |acc, &i| acc.or(&effective_condition(a, i)));
        let tables: Vec<_> = self
            .members
            .iter()
            .map(|&i| crate::crq::value_table(&family.members()[i], a).expect("members resolve"))
            .collect();
        let mut sign = 0i8;
        for w in cond.iter() {
            let g: Rat = self
                .members
                .iter()
                .zip(&tables)
                .map(|(&i, t)| &self.stakes[i] * (t.at(w).expect("total table") - &a.values()[i]))
                .sum();
            let s = if g.is_positive() {
                1
            } else if g.is_negative() {
                -1
            } else {
                return false;
            };
            if sign == 0 {
                sign = s;
            } else if sign != s {
                return false;
            }
        }
        sign != 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub members: Vec<usize>,
    pub constituents: usize,
    /// `None` when Σ was infeasible.
    pub maxima: Option<Vec<Rat>>,
    /// Family indices with `M_j = 0`.
    pub i0: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherenceVerdict {
    pub coherent: bool,
    pub witness: Option<DutchBook>,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    pub strategy: Strategy,
}

pub fn check_coherence(a: &Assessment) -> CoherenceVerdict {
    check_coherence_with(a, CheckOptions::default())
}

pub fn check_coherence_with(a: &Assessment, opts: CheckOptions) -> CoherenceVerdict {
    let mut members: Vec<usize> = (0..a.len()).collect();
    let mut trace = Vec::new();
    loop {
        let ps = build_points_for(a, &members);
        if ps.points.is_empty() {
            // Every quantity is void everywhere: no bet can ever be settled.
            trace.push(TraceStep { members, constituents: 0, maxima: None, i0: Vec::new() });
            return CoherenceVerdict { coherent: true, witness: None, trace };
        }
        let (rows, rhs) = ps.rows();
        match lp::feasibility(&rows, &rhs) {
            Feasibility::Infeasible { farkas } => {
                let witness = witness_from_farkas(a, &ps, &farkas);
                trace.push(TraceStep { members, constituents: ps.points.len(), maxima: None, i0: Vec::new() });
                return CoherenceVerdict { coherent: false, witness: Some(witness), trace };
            }
            Feasibility::Feasible(fb) => {
                let i0 = i0_from_basis(&ps, &fb, opts.strategy);
                let zero: Vec<usize> = i0.zero.iter().map(|&j| members[j]).collect();
                trace.push(TraceStep {
                    members: members.clone(),
                    constituents: ps.points.len(),
                    maxima: Some(i0.maxima),
                    i0: zero.clone(),
                });
                if zero.is_empty() {
                    return CoherenceVerdict { coherent: true, witness: None, trace };
                }
                assert!(
                    zero.len() < members.len(),
                    "I0 = {zero:?} is not a strict subset of {members:?}; assessment {:?}",
                    a.values()
                );
                members = zero;
            }
        }
    }
}

fn witness_from_farkas(a: &Assessment, ps: &PointSystem, farkas: &[Rat]) -> DutchBook {
    let mut stakes = vec![Rat::zero(); a.len()];
    for (k, &i) in ps.members.iter().enumerate() {
        stakes[i] = farkas[k].clone();
    }
    let gains = ps
        .classes
        .iter()
        .zip(&ps.points)
        .map(|(c, q)| {
            let g: Rat = q.iter().zip(&ps.target).zip(&farkas[..ps.members.len()]).map(|((qi, mi), s)| s * (qi - mi)).sum();
            (c.region.clone(), g)
        })
        .collect();
    DutchBook { stakes, members: ps.members.clone(), gains }
}

/// Coherence of `values` on `family`; values outside `[0,1]` are incoherent.
pub fn is_coherent(family: &Arc<Family>, values: Vec<Rat>, strategy: Strategy) -> bool {
    match Assessment::new(family.clone(), values) {
        Ok(a) => check_coherence_with(&a, CheckOptions { strategy }).coherent,
        Err(_) => false,
    }
}

/// Labels and points of a symbolic table, one row per constituent class.
pub fn format_points(space: &EventSpace, sp: &SymbolicPoints, symbols: &[String]) -> Vec<(String, String, String)> {
    let fmt = |p: &[ValueExpr]| format!("({})", p.iter().map(|e| e.display(symbols)).collect::<Vec<_>>().join(", "));
    let mut rows: Vec<(String, String, String)> = sp
        .classes
        .iter()
        .zip(&sp.points)
        .enumerate()
        .map(|(h, (c, p))| (format!("C{}", h + 1), space.label(&c.region), fmt(p)))
        .collect();
    if let Some(c0) = &sp.c0 {
        rows.push(("C0".into(), space.label(c0), fmt(&sp.target)));
    }
    rows
}

#[cfg(test)]
mod tests;
