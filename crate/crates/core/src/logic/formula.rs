use std::fmt;
use std::ops::{BitAnd, BitOr, Not};

/// Hard cap on atoms per space: formulas are truth tables over `2^n` assignments.
pub const MAX_ATOMS: usize = 20;

/// A boolean formula in canonical truth-table form.
///
/// Assignment `i` gives atom `j` the value of bit `j` of `i`. Two formulas are equal
/// exactly when their satisfying sets are equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Formula {
    vars: u8,
    words: Vec<u64>,
}

fn word_count(vars: u8) -> usize {
    (1usize << vars).div_ceil(64)
}

fn tail_mask(vars: u8) -> u64 {
    let n = 1usize << vars;
    if n.is_multiple_of(64) {
        u64::MAX
    } else {
        (1u64 << (n % 64)) - 1
    }
}

impl Formula {
    pub fn bottom(vars: u8) -> Self {
        assert!(vars as usize <= MAX_ATOMS);
        Formula { vars, words: vec![0; word_count(vars)] }
    }

    pub fn top(vars: u8) -> Self {
        let mut f = Formula { vars, words: vec![u64::MAX; word_count(vars)] };
        f.clear_tail();
        f
    }

    pub fn atom(vars: u8, index: usize) -> Self {
        assert!(index < vars as usize, "atom index out of range");
        Self::from_fn(vars, |i| (i >> index) & 1 == 1)
    }

    pub fn minterm(vars: u8, assignment: usize) -> Self {
        let mut f = Self::bottom(vars);
        f.insert(assignment);
        f
    }

    pub fn from_fn(vars: u8, pred: impl Fn(usize) -> bool) -> Self {
        let mut f = Self::bottom(vars);
        for i in 0..f.assignments() {
            if pred(i) {
                f.insert(i);
            }
        }
        f
    }

    fn clear_tail(&mut self) {
        let mask = tail_mask(self.vars);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }

    pub fn vars(&self) -> u8 {
        self.vars
    }

    /// Number of assignments of the underlying atom set (`2^n`).
    pub fn assignments(&self) -> usize {
        1usize << self.vars
    }

    pub fn insert(&mut self, assignment: usize) {
        self.words[assignment / 64] |= 1u64 << (assignment % 64);
    }

    pub fn contains(&self, assignment: usize) -> bool {
        self.words[assignment / 64] >> (assignment % 64) & 1 == 1
    }

    pub fn is_bottom(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_top(&self) -> bool {
        *self == Self::top(self.vars)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and(&self, other: &Formula) -> Formula {
        self.check(other);
        Formula {
            vars: self.vars,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn or(&self, other: &Formula) -> Formula {
        self.check(other);
        Formula {
            vars: self.vars,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn negate(&self) -> Formula {
        let mut f = Formula { vars: self.vars, words: self.words.iter().map(|w| !w).collect() };
        f.clear_tail();
        f
    }

    pub fn and_not(&self, other: &Formula) -> Formula {
        self.and(&other.negate())
    }

    /// Plain set inclusion of satisfying assignments.
    pub fn implies(&self, other: &Formula) -> bool {
        self.check(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Formula) -> bool {
        self.check(other);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Satisfying assignments in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    /// Atoms the formula actually depends on.
    pub fn support(&self) -> Vec<usize> {
        (0..self.vars as usize)
            .filter(|&j| (0..self.assignments()).any(|i| self.contains(i) != self.contains(i ^ (1 << j))))
            .collect()
    }

    fn check(&self, other: &Formula) {
        assert_eq!(self.vars, other.vars, "formulas from different atom sets");
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set: Vec<usize> = self.iter().collect();
        write!(f, "Formula[{}]{:?}", self.vars, set)
    }
}

impl BitAnd for &Formula {
    type Output = Formula;
    fn bitand(self, rhs: &Formula) -> Formula {
        self.and(rhs)
    }
}

impl BitOr for &Formula {
    type Output = Formula;
    fn bitor(self, rhs: &Formula) -> Formula {
        self.or(rhs)
    }
}

impl Not for &Formula {
    type Output = Formula;
    fn not(self) -> Formula {
        self.negate()
    }
}
