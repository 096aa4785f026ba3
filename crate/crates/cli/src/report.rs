//! Command results, as serde types (the JSON schema) and as plain text.
//!
//! Every rational is a string, `p/q` or an integer, so reports round-trip
//! without loss.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub schema_version: u32,
    #[serde(flatten)]
    pub report: Report,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Check(CheckReport),
    Bounds(BoundsReport),
    Entails(EntailsReport),
    Pconsistent(PConsistentReport),
    Table(TableReport),
    Constituents(ConstituentsReport),
}

impl Report {
    /// Whether the verdict is affirmative; decides the exit code.
    pub fn affirmative(&self) -> bool {
        match self {
            Report::Check(r) => r.coherent,
            Report::Entails(r) => r.entails,
            Report::Pconsistent(r) => r.consistent,
            Report::Bounds(_) | Report::Table(_) | Report::Constituents(_) => true,
        }
    }

    pub fn to_json(&self) -> String {
        let env = Envelope { schema_version: SCHEMA_VERSION, report: self.clone() };
        serde_json::to_string_pretty(&env).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Report, String> {
        let env: Envelope = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if env.schema_version != SCHEMA_VERSION {
            return Err(format!("unsupported schema version {}", env.schema_version));
        }
        Ok(env.report)
    }

    pub fn to_text(&self) -> String {
        match self {
            Report::Check(r) => r.text(),
            Report::Bounds(r) => r.text(),
            Report::Entails(r) => r.text(),
            Report::Pconsistent(r) => r.text(),
            Report::Table(r) => r.text(),
            Report::Constituents(r) => r.text(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Valued {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub members: Vec<String>,
    pub constituents: usize,
    /// `M_j` per member; absent when the hull system had no solution.
    pub maxima: Option<Vec<String>>,
    pub zero_mass: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub stakes: Vec<Valued>,
    /// Gain per constituent of the betted sub-family.
    pub gains: Vec<Valued>,
    /// Re-checked on every assignment from the value tables.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub assessment: String,
    pub values: Vec<Valued>,
    pub coherent: bool,
    pub trace: Vec<TraceRow>,
    pub witness: Option<Witness>,
}

impl CheckReport {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "assessment {}: {}", self.assessment, if self.coherent { "coherent" } else { "incoherent" });
        for v in &self.values {
            let _ = writeln!(s, "  P({}) = {}", v.name, v.value);
        }
        for (k, t) in self.trace.iter().enumerate() {
            let _ = write!(s, "step {}: {} quantities, {} constituents", k + 1, t.members.len(), t.constituents);
            match &t.maxima {
                Some(m) => {
                    let _ = writeln!(s, ", M = ({})", m.join(", "));
                    if !t.zero_mass.is_empty() {
                        let _ = writeln!(s, "  zero mass: {}", t.zero_mass.join(", "));
                    }
                }
                None => {
                    let _ = writeln!(s, ", no solution");
                }
            }
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(s, "Dutch book ({}):", if w.verified { "verified" } else { "NOT verified" });
            for st in &w.stakes {
                let _ = writeln!(s, "  stake {} on {}", st.value, st.name);
            }
            for g in &w.gains {
                let _ = writeln!(s, "  gain {} on {}", g.value, g.name);
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub assessment: String,
    pub target: String,
    pub lower: String,
    pub upper: String,
    pub lower_exact: bool,
    pub upper_exact: bool,
    pub rule: Option<String>,
    pub interval: bool,
    /// The target was replaced by its product-formula form.
    pub reduced: bool,
    pub oracle_calls: usize,
}

impl BoundsReport {
    fn text(&self) -> String {
        let flag = |e: bool| if e { "exact" } else { "approximate" };
        let mut s = format!(
            "P({}) in [{}, {}]  (lower {}, upper {})\n",
            self.target,
            self.lower,
            self.upper,
            flag(self.lower_exact),
            flag(self.upper_exact)
        );
        if let Some(r) = &self.rule {
            let _ = writeln!(s, "rule: {r}");
        }
        if self.reduced {
            s.push_str("note: the conjunction was eliminated with the product formula\n");
        }
        if !self.interval {
            s.push_str("warning: a sampled interior value was incoherent\n");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportRow {
    pub name: String,
    pub lower: String,
    pub upper: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntailsReport {
    pub premises: Vec<String>,
    pub conclusion: String,
    pub entails: bool,
    pub exact: bool,
    pub lower: String,
    pub upper: String,
    pub rule: Option<String>,
    pub supports: Vec<SupportRow>,
    pub witness: Option<Vec<Valued>>,
}

impl EntailsReport {
    fn text(&self) -> String {
        let mut s = format!(
            "{{{}}} {} {}\n",
            self.premises.join(", "),
            if self.entails { "p-entails" } else { "does not p-entail" },
            self.conclusion
        );
        let _ = writeln!(s, "with the premises at 1: P({}) in [{}, {}]", self.conclusion, self.lower, self.upper);
        if !self.exact {
            s.push_str("note: verdict rests on sampled values of auxiliary quantities\n");
        }
        if let Some(r) = &self.rule {
            let _ = writeln!(s, "rule: {r}");
        }
        for sup in &self.supports {
            let _ = writeln!(s, "  auxiliary P({}) in [{}, {}]", sup.name, sup.lower, sup.upper);
        }
        if let Some(w) = &self.witness {
            s.push_str("witness (coherent):\n");
            for v in w {
                let _ = writeln!(s, "  P({}) = {}", v.name, v.value);
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PConsistentReport {
    pub premises: Vec<String>,
    pub consistent: bool,
}

impl PConsistentReport {
    fn text(&self) -> String {
        format!("{{{}}} is {}\n", self.premises.join(", "), if self.consistent { "p-consistent" } else { "not p-consistent" })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// Constituents and points of an assessment.
    Points,
    /// Cases of one quantity.
    Values,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    /// `C1`, `C2`, …, `C0` for point tables; empty for value tables.
    pub name: String,
    pub constituent: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub kind: TableKind,
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

impl TableReport {
    fn text(&self) -> String {
        let mut s = format!("{}\n", self.title);
        let w0 = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        let w1 = self.rows.iter().map(|r| r.constituent.len()).max().unwrap_or(0);
        for r in &self.rows {
            if w0 > 0 {
                let _ = write!(s, "{:<w0$}  ", r.name);
            }
            let _ = writeln!(s, "{:<w1$}  {}", r.constituent, r.value);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstituentsReport {
    pub quantities: Vec<String>,
    pub classes: Vec<Valued>,
    pub c0: Option<String>,
}

impl ConstituentsReport {
    fn text(&self) -> String {
        let mut s = String::new();
        for c in &self.classes {
            let _ = writeln!(s, "{}  {}", c.name, c.value);
        }
        if let Some(c0) = &self.c0 {
            let _ = writeln!(s, "C0  {c0}");
        }
        s
    }
}
