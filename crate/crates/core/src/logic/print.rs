//! Two-level rendering of truth tables: prime implicants plus a greedy cover.

use super::formula::Formula;

/// A product term over the support atoms: `mask` marks fixed atoms, `bits` their values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Cube {
    mask: u32,
    bits: u32,
}

impl Cube {
    fn covers(&self, point: u32) -> bool {
        point & self.mask == self.bits
    }
}

pub(crate) enum Style {
    /// `A and not B or C`, parseable by the formula grammar.
    Grammar,
    /// `A ~B | C`, used for constituent labels in tables.
    Compact,
}

// Above this many support atoms prime implicant generation gets expensive;
// fall back to a plain minterm listing.
const QM_LIMIT: usize = 10;

/// Renders `on` using assignments in `dont_care` freely.
pub(crate) fn render(on: &Formula, dont_care: &Formula, names: &[String], style: Style) -> String {
    let care_on = on.and_not(dont_care);
    if care_on.is_bottom() {
        return match style {
            Style::Grammar => "false".into(),
            Style::Compact => "⊥".into(),
        };
    }
    if care_on.or(dont_care).is_top() {
        return match style {
            Style::Grammar => "true".into(),
            Style::Compact => "Ω".into(),
        };
    }
    let upper = on.or(dont_care);
    let support: Vec<usize> = {
        let mut s = care_on.support();
        for j in upper.support() {
            if !s.contains(&j) {
                s.push(j);
            }
        }
        s.sort_unstable();
        s
    };
    let project = |assignment: usize| -> u32 {
        support
            .iter()
            .enumerate()
            .fold(0u32, |acc, (k, &j)| acc | ((((assignment >> j) & 1) as u32) << k))
    };
    let mut on_pts: Vec<u32> = care_on.iter().map(project).collect();
    on_pts.sort_unstable();
    on_pts.dedup();
    let mut dc_pts: Vec<u32> = dont_care.iter().map(project).collect();
    dc_pts.sort_unstable();
    dc_pts.dedup();
    let off_pts: std::collections::HashSet<u32> = upper.negate().iter().map(project).collect();
    on_pts.retain(|p| !off_pts.contains(p));
    dc_pts.retain(|p| !off_pts.contains(p));

    let width = support.len();
    let cubes = if width <= QM_LIMIT {
        let implicants = prime_implicants(width, &on_pts, &dc_pts);
        greedy_cover(&implicants, &on_pts)
    } else {
        let full = if width == 32 { u32::MAX } else { (1u32 << width) - 1 };
        on_pts.iter().map(|&p| Cube { mask: full, bits: p }).collect()
    };

    let term = |cube: &Cube| -> String {
        let lits: Vec<String> = (0..width)
            .filter(|k| cube.mask >> k & 1 == 1)
            .map(|k| {
                let name = &names[support[k]];
                let positive = cube.bits >> k & 1 == 1;
                match (&style, positive) {
                    (_, true) => name.clone(),
                    (Style::Grammar, false) => format!("not {name}"),
                    (Style::Compact, false) => format!("~{name}"),
                }
            })
            .collect();
        if lits.is_empty() {
            return match style {
                Style::Grammar => "true".into(),
                Style::Compact => "Ω".into(),
            };
        }
        match style {
            Style::Grammar => lits.join(" and "),
            Style::Compact => lits.join(" "),
        }
    };
    let parts: Vec<String> = cubes.iter().map(term).collect();
    match style {
        Style::Grammar => parts.join(" or "),
        Style::Compact => parts.join(" | "),
    }
}

fn prime_implicants(width: usize, on: &[u32], dc: &[u32]) -> Vec<Cube> {
    let full = if width == 32 { u32::MAX } else { (1u32 << width) - 1 };
    let mut current: std::collections::BTreeSet<Cube> =
        on.iter().chain(dc).map(|&p| Cube { mask: full, bits: p }).collect();
    let mut primes = std::collections::BTreeSet::new();
    while !current.is_empty() {
        let mut next = std::collections::BTreeSet::new();
        let mut merged = std::collections::HashSet::new();
        let items: Vec<Cube> = current.iter().copied().collect();
        for (i, a) in items.iter().enumerate() {
            for b in &items[i + 1..] {
                if a.mask != b.mask {
                    continue;
                }
                let diff = a.bits ^ b.bits;
                if diff.count_ones() == 1 {
                    next.insert(Cube { mask: a.mask & !diff, bits: a.bits & !diff });
                    merged.insert(*a);
                    merged.insert(*b);
                }
            }
        }
        for c in items {
            if !merged.contains(&c) {
                primes.insert(c);
            }
        }
        current = next;
    }
    primes.into_iter().collect()
}

fn greedy_cover(implicants: &[Cube], on: &[u32]) -> Vec<Cube> {
    let mut uncovered: Vec<u32> = on.to_vec();
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        // Prefer the implicant covering the most points; among ties, the one with fewer literals,
        // then the most "positive" one so output reads naturally.
        let best = implicants
            .iter()
            .max_by_key(|c| {
                let n = uncovered.iter().filter(|&&p| c.covers(p)).count();
                (n, std::cmp::Reverse(c.mask.count_ones()), c.bits.count_ones())
            })
            .copied()
            .expect("on-set point without implicant");
        uncovered.retain(|&p| !best.covers(p));
        chosen.push(best);
    }
    // Order terms the way a truth table is read: positive literals of early atoms first.
    chosen.sort_by_key(|c| {
        let mut key = Vec::new();
        for k in 0..32 {
            let fixed = c.mask >> k & 1 == 1;
            let val = c.bits >> k & 1 == 1;
            key.push(match (fixed, val) {
                (true, true) => 0u8,
                (true, false) => 1,
                (false, _) => 2,
            });
        }
        key
    });
    chosen
}
