//! Exact rational simplex for `A x = b, x ≥ 0`.
//!
//! Dense tableau, two phases, Bland's rule throughout (so no cycling). Phase I
//! either reaches a feasible basis or yields a Farkas certificate read off the
//! final reduced costs of the artificial columns.

use num_traits::{One, Signed, Zero};

use crate::rational::Rat;

#[derive(Clone, Debug)]
struct Tableau {
    rows: Vec<Vec<Rat>>,
    /// Reduced costs `z_j − c_j` (maximisation form); last entry is the objective value.
    obj: Vec<Rat>,
    basis: Vec<usize>,
    cols: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                *v /= &p;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Installs the objective `max cᵀx` relative to the current basis.
    fn set_objective(&mut self, c: &[Rat]) {
        let mut obj: Vec<Rat> = c.iter().map(|v| -v).collect();
        obj.push(Rat::zero());
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = &c[bj];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(&self.rows[i]) {
                *o += cb * v;
            }
        }
        self.obj = obj;
    }

    fn run(&mut self) -> Step {
        loop {
            let Some(enter) = (0..self.cols).find(|&j| self.obj[j].is_negative()) else {
                return Step::Optimal;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Step::Unbounded,
            }
        }
    }

    fn solution(&self) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); self.cols];
        for (i, &bj) in self.basis.iter().enumerate() {
            x[bj] = self.rhs(i).clone();
        }
        x
    }
}

/// A feasible basis of `A x = b, x ≥ 0`, reusable for several objectives.
#[derive(Clone, Debug)]
pub struct FeasibleBasis {
    tab: Tableau,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Optimum {
    Optimal { value: Rat, x: Vec<Rat> },
    Unbounded,
}

impl FeasibleBasis {
    /// The basic feasible solution found by phase I.
    pub fn solution(&self) -> Vec<Rat> {
        self.tab.solution()
    }

    pub fn maximize(&self, c: &[Rat]) -> Optimum {
        assert_eq!(c.len(), self.tab.cols, "objective length");
        let mut tab = self.tab.clone();
        tab.set_objective(c);
        match tab.run() {
            Step::Optimal => Optimum::Optimal { value: tab.obj[tab.cols].clone(), x: tab.solution() },
            Step::Unbounded => Optimum::Unbounded,
        }
    }

    pub fn minimize(&self, c: &[Rat]) -> Optimum {
        let neg: Vec<Rat> = c.iter().map(|v| -v).collect();
        match self.maximize(&neg) {
            Optimum::Optimal { value, x } => Optimum::Optimal { value: -value, x },
            Optimum::Unbounded => Optimum::Unbounded,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Feasibility {
    Feasible(FeasibleBasis),
    /// `y` with `yᵀA ≥ 0` componentwise and `yᵀb < 0`.
    Infeasible { farkas: Vec<Rat> },
}

/// Phase I on `A x = b, x ≥ 0`; `a` is row-major with `b.len()` rows.
pub fn feasibility(a: &[Vec<Rat>], b: &[Rat]) -> Feasibility {
    let m = b.len();
    assert_eq!(a.len(), m, "row count");
    let n = a.first().map_or(0, Vec::len);
    assert!(a.iter().all(|r| r.len() == n), "ragged constraint matrix");

    let mut sign = vec![Rat::one(); m];
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        if flip {
            sign[i] = -Rat::one();
        }
        let mut row: Vec<Rat> = a[i].iter().map(|v| if flip { -v } else { v.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
        row.push(if flip { -&b[i] } else { b[i].clone() });
        rows.push(row);
    }
    let cols = n + m;
    let mut tab = Tableau { rows, obj: Vec::new(), basis: (n..cols).collect(), cols };
    let mut c = vec![Rat::zero(); cols];
    for v in &mut c[n..] {
        *v = -Rat::one();
    }
    tab.set_objective(&c);
    if let Step::Unbounded = tab.run() {
        unreachable!("phase I objective is bounded above by zero");
    }
    if tab.obj[cols].is_negative() {
        // r_art_i = w_i + 1 at the optimum; undo the row flips.
        let farkas = (0..m).map(|i| (&tab.obj[n + i] - Rat::one()) * &sign[i]).collect();
        return Feasibility::Infeasible { farkas };
    }

    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant and dropped.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
                Some(j) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    for row in tab.rows.iter_mut() {
        let rhs = row[cols].clone();
        row.truncate(n);
        row.push(rhs);
    }
    tab.cols = n;
    tab.obj = vec![Rat::zero(); n + 1];
    Feasibility::Feasible(FeasibleBasis { tab })
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal { value: Rat, x: Vec<Rat> },
    Unbounded,
    Infeasible { farkas: Vec<Rat> },
}

pub fn maximize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LpOutcome {
    match feasibility(a, b) {
        Feasibility::Infeasible { farkas } => LpOutcome::Infeasible { farkas },
        Feasibility::Feasible(fb) => match fb.maximize(c) {
            Optimum::Optimal { value, x } => LpOutcome::Optimal { value, x },
            Optimum::Unbounded => LpOutcome::Unbounded,
        },
    }
}

pub fn minimize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LpOutcome {
    let neg: Vec<Rat> = c.iter().map(|v| -v).collect();
    match maximize(a, b, &neg) {
        LpOutcome::Optimal { value, x } => LpOutcome::Optimal { value: -value, x },
        other => other,
    }
}

/// Checks `yᵀA ≥ 0` and `yᵀb < 0`.
pub fn is_farkas_certificate(a: &[Vec<Rat>], b: &[Rat], y: &[Rat]) -> bool {
    let n = a.first().map_or(0, Vec::len);
    let cols_ok = (0..n).all(|j| {
        let s: Rat = a.iter().zip(y).map(|(row, yi)| &row[j] * yi).sum();
        !s.is_negative()
    });
    let yb: Rat = b.iter().zip(y).map(|(bi, yi)| bi * yi).sum();
    cols_ok && yb.is_negative()
}
