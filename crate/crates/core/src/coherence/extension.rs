//! Coherent extension bounds by bisection over the coherence oracle.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::{build_points_symbolic, check_coherence_with, is_coherent, CheckOptions};
use crate::bounds::BoundPair;
use crate::crq::{Assessment, CompoundQuantity, Family};
use crate::error::Error;
use crate::lp::{self, LpOutcome};
use crate::parallel::{self, Strategy};
use crate::poly::ValueExpr;
use crate::rational::{dyadic, int, mid, rat, simplest_in, Rat};

#[derive(Clone, Copy, Debug)]
pub struct ExtensionOptions {
    /// Bisection depth `k`: brackets shrink to `2^-k`, and certification
    /// probes at distance `2^-2k`.
    pub depth: u32,
    /// Try endpoints from registered closed forms first (still certified).
    pub closed_form_hints: bool,
    /// Seed the search with the LP relaxation of the first-level system.
    pub relaxation: bool,
    /// Interior points sampled to check that the coherent set is an interval.
    pub interval_samples: usize,
    pub strategy: Strategy,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions { depth: 20, closed_form_hints: true, relaxation: true, interval_samples: 3, strategy: Strategy::Parallel }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub value: Rat,
    /// Certified: coherent here and incoherent just beyond (or at the end of `[0,1]`).
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionBounds {
    pub lower: Endpoint,
    pub upper: Endpoint,
    /// Name of the closed form whose endpoints were certified, if any.
    pub rule: Option<String>,
    /// False if a sampled interior point turned out incoherent.
    pub interval: bool,
    /// Number of coherence checks spent.
    pub oracle_calls: usize,
}

impl ExtensionBounds {
    pub fn is_point(&self) -> bool {
        self.lower.value == self.upper.value
    }

    pub fn exact(&self) -> bool {
        self.lower.exact && self.upper.exact
    }
}

struct Oracle {
    family: Arc<Family>,
    base: Vec<Rat>,
    idx: usize,
    strategy: Strategy,
    calls: AtomicUsize,
}

impl Oracle {
    fn coherent(&self, t: &Rat) -> bool {
        if t.is_negative() || *t > Rat::one() {
            return false;
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        let mut v = self.base.clone();
        v[self.idx] = t.clone();
        is_coherent(&self.family, v, self.strategy)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Lower,
    Upper,
}

/// Range of coherent values for `target` given a coherent assessment.
pub fn extension_bounds(
    a: &Assessment,
    target: Arc<CompoundQuantity>,
    opts: ExtensionOptions,
) -> Result<ExtensionBounds, Error> {
    let check = CheckOptions { strategy: opts.strategy };
    if !check_coherence_with(a, check).coherent {
        return Err(Error::Incoherent);
    }
    if let Some(j) = a.family().position(target.key()) {
        let e = Endpoint { value: a.values()[j].clone(), exact: true };
        return Ok(ExtensionBounds { lower: e.clone(), upper: e, rule: None, interval: true, oracle_calls: 1 });
    }
    let family = Arc::new(a.family().push(target.clone())?);
    let hint = if opts.closed_form_hints { crate::bounds::closed_form(a, &target) } else { None };
    let mut values = a.values().to_vec();
    values.push(Rat::zero());
    extend_member(&family, &values, a.len(), hint, opts)
}

/// Range of coherent values for member `idx` with every other member held at
/// `values` (the entry at `idx` is ignored). Unlike [`extension_bounds`] the
/// other members need not form a family on their own, so `idx` may be a
/// quantity the others refer to.
pub fn extend_member(
    family: &Arc<Family>,
    values: &[Rat],
    idx: usize,
    hint: Option<(String, BoundPair)>,
    opts: ExtensionOptions,
) -> Result<ExtensionBounds, Error> {
    let oracle = Oracle {
        family: family.clone(),
        base: values.to_vec(),
        idx,
        strategy: opts.strategy,
        calls: AtomicUsize::new(0),
    };
    let delta = dyadic(2 * opts.depth);
    let relaxed = if opts.relaxation { relaxation(family, values, idx) } else { (None, None) };

    // A coherent starting point.
    let mut seeds: Vec<Rat> = Vec::new();
    if let Some((_, b)) = &hint {
        seeds.push(b.lower.clone());
        seeds.push(b.upper.clone());
    }
    match &relaxed {
        (Some(l), Some(u)) => seeds.extend([l.clone(), u.clone(), mid(l, u)]),
        (Some(l), None) | (None, Some(l)) => seeds.push(l.clone()),
        (None, None) => {}
    }
    let seed = seeds
        .iter()
        .find(|t| oracle.coherent(t))
        .cloned()
        .or_else(|| scan(&oracle))
        .ok_or(Error::Incoherent)?;

    let lower_cands: Vec<Rat> = hint.iter().map(|(_, b)| b.lower.clone()).chain(relaxed.0.clone()).collect();
    let lower = endpoint(&oracle, Side::Lower, &seed, &lower_cands, opts.depth, &delta);
    let upper_cands: Vec<Rat> = hint.iter().map(|(_, b)| b.upper.clone()).chain(relaxed.1.clone()).collect();
    let upper = endpoint(&oracle, Side::Upper, &lower.value, &upper_cands, opts.depth, &delta);

    let rule = hint.and_then(|(name, b)| {
        (b.lower == lower.value && b.upper == upper.value && lower.exact && upper.exact).then_some(name)
    });

    let interval = if lower.value < upper.value && opts.interval_samples > 0 {
        let n = opts.interval_samples;
        let width = &upper.value - &lower.value;
        let pts: Vec<Rat> = (1..=n).map(|j| &lower.value + &width * rat(j as i64, n as i64 + 1)).collect();
        parallel::map(opts.strategy, &pts, |t| oracle.coherent(t)).into_iter().all(|ok| ok)
    } else {
        true
    };

    Ok(ExtensionBounds { lower, upper, rule, interval, oracle_calls: oracle.calls.load(Ordering::Relaxed) })
}

/// Dyadic grid first, then small denominators.
fn scan(oracle: &Oracle) -> Option<Rat> {
    let mut tried = std::collections::BTreeSet::new();
    for s in 0..=6u32 {
        let d = 1i64 << s;
        for j in 0..=d {
            let t = rat(j, d);
            if tried.insert(t.clone()) && oracle.coherent(&t) {
                return Some(t);
            }
        }
    }
    for q in 3..=64i64 {
        for p in 1..q {
            let t = rat(p, q);
            if tried.insert(t.clone()) && oracle.coherent(&t) {
                return Some(t);
            }
        }
    }
    None
}

fn certify(oracle: &Oracle, side: Side, cand: &Rat, delta: &Rat) -> bool {
    let beyond = match side {
        Side::Lower => cand - delta,
        Side::Upper => cand + delta,
    };
    oracle.coherent(cand) && !oracle.coherent(&beyond)
}

/// One end of the coherent interval, starting from the coherent point `seed`.
fn endpoint(oracle: &Oracle, side: Side, seed: &Rat, candidates: &[Rat], depth: u32, delta: &Rat) -> Endpoint {
    let edge = match side {
        Side::Lower => Rat::zero(),
        Side::Upper => Rat::one(),
    };
    let on_side = |c: &Rat| match side {
        Side::Lower => c <= seed,
        Side::Upper => c >= seed,
    };
    for c in candidates {
        if on_side(c) && certify(oracle, side, c, delta) {
            return Endpoint { value: c.clone(), exact: true };
        }
    }
    if oracle.coherent(&edge) {
        return Endpoint { value: edge, exact: true };
    }
    // `bad` incoherent, `good` coherent.
    let mut bad = edge;
    let mut good = seed.clone();
    for _ in 0..depth {
        let m = mid(&bad, &good);
        if oracle.coherent(&m) {
            good = m;
        } else {
            bad = m;
        }
    }
    let (lo, hi) = match side {
        Side::Lower => (&bad, &good),
        Side::Upper => (&good, &bad),
    };
    let mut cand = simplest_in(lo, hi);
    if cand == bad {
        cand = match side {
            Side::Lower => simplest_in(&mid(&bad, &good), &good),
            Side::Upper => simplest_in(&good, &mid(&bad, &good)),
        };
    }
    if certify(oracle, side, &cand, delta) {
        Endpoint { value: cand, exact: true }
    } else {
        Endpoint { value: good, exact: false }
    }
}

/// LP relaxation of the first-level system with member `idx` free.
///
/// The free coordinate on constituent `h` is affine, `a_h + b_h·t`. With
/// `ν = λ / (1 − Σλ_h b_h)` the system becomes linear:
/// `ν ≥ 0`, `Σν_h(1 − b_h) = 1`, `Σν_h(q_hi − μ_i) = 0`, and `t = Σν_h a_h`.
/// Solutions with `Σλ_h b_h = 1` are missed, so this only proposes values.
fn relaxation(family: &Family, base: &[Rat], idx: usize) -> (Option<Rat>, Option<Rat>) {
    let n = family.len();
    if (0..n).any(|i| i != idx && family.depends_on(i, idx)) {
        return (None, None);
    }
    let values: Vec<ValueExpr> = base
        .iter()
        .enumerate()
        .map(|(i, v)| if i == idx { ValueExpr::var(0) } else { ValueExpr::constant(v.clone()) })
        .collect();
    let sp = build_points_symbolic(family, &values, 1);
    if sp.points.is_empty() {
        return (None, None);
    }
    let others: Vec<usize> = (0..n).filter(|&i| i != idx).collect();
    let mut rows: Vec<Vec<Rat>> = vec![Vec::new(); others.len() + 1];
    let mut obj = Vec::new();
    for p in &sp.points {
        let Some((ah, bh)) = p[idx].affine_in(0) else { return (None, None) };
        for (r, &i) in others.iter().enumerate() {
            let q = p[i].as_constant().expect("other coordinates are numeric");
            rows[r].push(q - &base[i]);
        }
        rows[others.len()].push(Rat::one() - bh);
        obj.push(ah);
    }
    let mut rhs = vec![Rat::zero(); others.len()];
    rhs.push(int(1));
    let clamp = |v: Rat| (!v.is_negative() && v <= Rat::one()).then_some(v);
    let lo = match lp::minimize(&rows, &rhs, &obj) {
        LpOutcome::Optimal { value, .. } => clamp(value),
        _ => None,
    };
    let hi = match lp::maximize(&rows, &rhs, &obj) {
        LpOutcome::Optimal { value, .. } => clamp(value),
        _ => None,
    };
    (lo, hi)
}
