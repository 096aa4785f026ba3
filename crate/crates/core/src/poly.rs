//! Sparse polynomials with exact rational coefficients.
//!
//! Variables are plain indices; a monomial is the sorted multiset of its
//! variables, so `x·x·y` is `[0, 0, 1]`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::rational::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ValueExpr {
    terms: BTreeMap<Vec<usize>, Rat>,
}

impl ValueExpr {
    pub fn zero() -> Self {
        ValueExpr::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        ValueExpr { terms }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn var(v: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![v], Rat::one());
        ValueExpr { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &ValueExpr) -> ValueExpr {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let e = terms.entry(m.clone()).or_insert_with(Rat::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        ValueExpr { terms }
    }

    pub fn neg(&self) -> ValueExpr {
        ValueExpr { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &ValueExpr) -> ValueExpr {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rat) -> ValueExpr {
        if k.is_zero() {
            return ValueExpr::zero();
        }
        ValueExpr { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, other: &ValueExpr) -> ValueExpr {
        let mut out = ValueExpr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m: Vec<usize> = m1.iter().chain(m2).copied().collect();
                m.sort_unstable();
                out = out.add(&ValueExpr { terms: BTreeMap::from([(m, c1 * c2)]) });
            }
        }
        out
    }

    /// Variables that occur with a nonzero coefficient.
    pub fn vars(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// True when the polynomial is exactly the single variable `v`.
    pub fn is_var(&self, v: usize) -> bool {
        self.terms.len() == 1 && self.terms.get(&vec![v]).is_some_and(One::is_one)
    }

    /// Evaluates with `values[v]` for variable `v`.
    pub fn eval(&self, values: &[Rat]) -> Rat {
        self.terms.iter().fold(Rat::zero(), |acc, (m, c)| {
            acc + m.iter().fold(c.clone(), |p, &v| p * &values[v])
        })
    }

    /// Substitutes `subst[v]` for every variable `v`.
    pub fn compose(&self, subst: &[ValueExpr]) -> ValueExpr {
        let mut out = ValueExpr::zero();
        for (m, c) in &self.terms {
            let term = m.iter().fold(ValueExpr::constant(c.clone()), |p, &v| p.mul(&subst[v]));
            out = out.add(&term);
        }
        out
    }

    /// Splits into `a + b·v` when the polynomial is affine in `v` with
    /// constant `a`, `b`.
    pub fn affine_in(&self, v: usize) -> Option<(Rat, Rat)> {
        let mut a = Rat::zero();
        let mut b = Rat::zero();
        for (m, c) in &self.terms {
            match m.as_slice() {
                [] => a = c.clone(),
                [w] if *w == v => b = c.clone(),
                _ => return None,
            }
        }
        Some((a, b))
    }

    /// Human-readable form such as `mu + x - mu*x`; constants print as `p/q`.
    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        // Lower degree first, then by variable order.
        let mut terms: Vec<(&Vec<usize>, &Rat)> = self.terms.iter().collect();
        terms.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        let mut out = String::new();
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let vars: Vec<&str> = m.iter().map(|&v| names[v].as_str()).collect();
            if m.is_empty() {
                let _ = write!(out, "{mag}");
            } else if mag.is_one() {
                out.push_str(&vars.join("*"));
            } else {
                let _ = write!(out, "{mag}*{}", vars.join("*"));
            }
        }
        out
    }
}
