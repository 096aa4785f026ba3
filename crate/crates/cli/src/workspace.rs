//! The TOML workspace: atoms, constraints, named definitions and assessments.
//!
//! ```toml
//! atoms = ["A", "B", "C"]
//! constraints = ["A and B"]          # declared impossible
//!
//! [definitions]
//! cf = "given(cond(C, A), B)"
//!
//! [[assessment]]
//! name = "base"
//! members = ["B", "cond(C, A)"]
//! values = ["1/2", "0.3"]
//! ```
//!
//! Values are rationals (`p/q` or finite decimals, read exactly) or symbol
//! names, which only the `table` command accepts.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::sync::Arc;

use condprev::crq::{elaborate, Assessment, CompoundQuantity, Definition, Family};
use condprev::logic::{formula_from_ast, EventSpace};
use condprev::poly::ValueExpr;
use condprev::rational::{parse_rational, Rat};
use condprev::syntax::{self, CondAst};
use condprev::Error;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed workspace: {0}")]
    Toml(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Engine(#[from] Error),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorkspace {
    atoms: Vec<String>,
    #[serde(default)]
    constraints: Vec<String>,
    #[serde(default)]
    definitions: BTreeMap<String, String>,
    #[serde(default)]
    assessment: Vec<RawAssessment>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAssessment {
    name: String,
    members: Vec<String>,
    values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Number(Rat),
    Symbol(String),
}

#[derive(Clone, Debug)]
pub struct NamedAssessment {
    pub name: String,
    pub members: Vec<String>,
    pub values: Vec<Value>,
}

/// A family, its values as polynomials, and the symbol names.
pub type Symbolic = (Arc<Family>, Vec<ValueExpr>, Vec<String>);

#[derive(Debug)]
pub struct Workspace {
    pub space: EventSpace,
    definitions: BTreeMap<String, String>,
    pub assessments: Vec<NamedAssessment>,
}

impl Workspace {
    pub fn load(path: &str) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io { path: path.into(), message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, LoadError> {
        let raw: RawWorkspace = toml::from_str(text).map_err(|e| LoadError::Toml(e.message().to_string()))?;
        let mut space = EventSpace::new(&raw.atoms)?;
        for c in &raw.constraints {
            let f = space.parse(c)?;
            space = space.with_constraint(&f)?;
        }
        for name in raw.definitions.keys() {
            if !syntax::is_identifier(name) || space.atom(name).is_ok() {
                return Err(LoadError::Input(format!("`{name}` cannot be used as a definition name")));
            }
        }
        let mut assessments = Vec::new();
        for a in raw.assessment {
            if a.members.len() != a.values.len() {
                return Err(LoadError::Input(format!(
                    "assessment `{}` has {} members but {} values",
                    a.name,
                    a.members.len(),
                    a.values.len()
                )));
            }
            let values = a.values.iter().map(|v| parse_value(v)).collect::<Result<Vec<_>, _>>()?;
            assessments.push(NamedAssessment { name: a.name, members: a.members, values });
        }
        Ok(Workspace { space, definitions: raw.definitions, assessments })
    }

    /// A definition name or an expression.
    pub fn quantity(&self, text: &str) -> Result<Arc<CompoundQuantity>, Error> {
        let stack = RefCell::new(Vec::new());
        self.resolve_text(text, &stack)
    }

    fn resolve_text(&self, text: &str, stack: &RefCell<Vec<String>>) -> Result<Arc<CompoundQuantity>, Error> {
        let ast = syntax::parse_cexpr(text)?;
        let resolver = |name: &str| self.definition(name, stack);
        elaborate(&self.space, &ast, &resolver)
    }

    fn definition(&self, name: &str, stack: &RefCell<Vec<String>>) -> Option<Result<Definition, Error>> {
        let body = self.definitions.get(name)?;
        if stack.borrow().iter().any(|n| n == name) {
            return Some(Err(Error::Precondition(format!("definition `{name}` refers to itself"))));
        }
        stack.borrow_mut().push(name.to_string());
        let out = (|| {
            let ast = syntax::parse_cexpr(body)?;
            Ok(match ast {
                CondAst::Formula(f) => {
                    let f = formula_from_ast(&f, &self.space, &|n| {
                        self.definition(n, stack).map(|r| match r? {
                            Definition::Formula(f) => Ok(f),
                            Definition::Quantity(q) => Err(Error::Nested(format!(
                                "`{n}` names the quantity `{}`, not a formula",
                                q.describe()
                            ))),
                        })
                    })?;
                    Definition::Formula(f)
                }
                other => {
                    let resolver = |n: &str| self.definition(n, stack);
                    Definition::Quantity(elaborate(&self.space, &other, &resolver)?)
                }
            })
        })();
        stack.borrow_mut().pop();
        Some(out)
    }

    pub fn assessment(&self, name: &str) -> Result<&NamedAssessment, LoadError> {
        self.assessments
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| LoadError::Input(format!("no assessment named `{name}`")))
    }

    pub fn members(&self, a: &NamedAssessment) -> Result<Vec<Arc<CompoundQuantity>>, Error> {
        a.members.iter().map(|m| self.quantity(m)).collect()
    }

    /// The assessment with every value numeric.
    pub fn numeric(&self, a: &NamedAssessment) -> Result<Assessment, LoadError> {
        let values = a
            .values
            .iter()
            .map(|v| match v {
                Value::Number(r) => Ok(r.clone()),
                Value::Symbol(s) => {
                    Err(LoadError::Input(format!("assessment `{}` has the symbolic value `{s}`; only `table` accepts symbols", a.name)))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Assessment::from_members(&self.space, self.members(a)?, values)?)
    }

    /// The family with values as polynomials; symbols are numbered in order of
    /// first appearance.
    pub fn symbolic(&self, a: &NamedAssessment) -> Result<Symbolic, LoadError> {
        let family = Arc::new(Family::new(&self.space, self.members(a)?)?);
        let mut symbols: Vec<String> = Vec::new();
        let mut values = Vec::new();
        for (v, q) in a.values.iter().zip(family.members()) {
            values.push(match v {
                Value::Number(r) => {
                    if !condprev::rational::in_unit_interval(r) {
                        return Err(Error::OutOfRange { quantity: q.describe().into(), value: r.to_string() }.into());
                    }
                    ValueExpr::constant(r.clone())
                }
                Value::Symbol(s) => {
                    let k = symbols.iter().position(|t| t == s).unwrap_or_else(|| {
                        symbols.push(s.clone());
                        symbols.len() - 1
                    });
                    ValueExpr::var(k)
                }
            });
        }
        Ok((family, values, symbols))
    }
}

fn parse_value(text: &str) -> Result<Value, LoadError> {
    match parse_rational(text) {
        Ok(r) => Ok(Value::Number(r)),
        Err(_) if syntax::is_identifier(text.trim()) => Ok(Value::Symbol(text.trim().to_string())),
        Err(e) => Err(LoadError::Input(e)),
    }
}

/// Splits a list of expressions on commas outside parentheses.
pub fn split_list(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}
