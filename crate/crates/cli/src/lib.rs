//! Command-line front end: loads a workspace, runs one command, and reports
//! in text or JSON.
//!
//! Exit codes: 0 affirmative verdict, 1 negative verdict, 2 unreadable input
//! (file, TOML, expression syntax, unknown names), 3 domain errors
//! (incoherent base, p-inconsistent premises, out-of-range values, …).

pub mod report;
pub mod workspace;

use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use condprev::coherence::{
    build_points_symbolic, check_coherence, extension_bounds, format_points, ExtensionOptions,
};
use condprev::crq::{describe_cases, value_table, CompoundQuantity, QuantityKind};
use condprev::logic::partition_by_signature;
use condprev::pvalid::{p_consistent, p_entails};
use condprev::Error;

use report::*;
use workspace::{split_list, LoadError, Workspace};

#[derive(Parser, Debug)]
#[command(name = "condprev", version, about = "Coherence checks and propagation for conditional events")]
pub struct Cli {
    /// Workspace file (TOML).
    #[arg(long, global = true)]
    pub input: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Extension brackets shrink to 2^-k before the endpoint is rounded.
    #[arg(long, global = true, default_value_t = 20)]
    pub bisection_depth: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check an assessment for coherence.
    Check {
        #[arg(long)]
        assessment: String,
    },
    /// Coherent range of a quantity given an assessment.
    Bounds {
        #[arg(long)]
        assessment: String,
        /// A definition name or an expression.
        #[arg(long)]
        target: String,
    },
    /// Whether the premises p-entail the conclusion.
    Entails {
        #[arg(long, num_args = 1.., required = true)]
        premises: Vec<String>,
        #[arg(long)]
        conclusion: String,
    },
    /// Whether the premises can all be assessed at 1.
    Pconsistent {
        #[arg(long, num_args = 1.., required = true)]
        premises: Vec<String>,
    },
    /// Constituents and points of an assessment, or the cases of a quantity.
    Table {
        #[arg(long)]
        assessment: Option<String>,
        #[arg(long)]
        target: Option<String>,
    },
    /// The partition generated by some quantities.
    Constituents {
        #[arg(long, num_args = 1.., required = true)]
        premises: Vec<String>,
    },
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Engine(e) => e.into(),
            LoadError::Input(m) => Failure { code: 2, message: m },
            other => Failure { code: 2, message: other.to_string() },
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Syntax(_) | Error::UnknownName(_) => 2,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

/// What the binary prints and returns.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses arguments and runs; never exits the process.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome { code, stdout: String::new(), stderr: e.to_string() };
        }
    };
    match execute(&cli) {
        Ok(r) => {
            let stdout = match cli.format {
                Format::Text => r.to_text(),
                Format::Json => r.to_json() + "\n",
            };
            Outcome { code: if r.affirmative() { 0 } else { 1 }, stdout, stderr: String::new() }
        }
        Err(f) => Outcome { code: f.code, stdout: String::new(), stderr: format!("error: {}\n", f.message) },
    }
}

pub fn execute(cli: &Cli) -> Result<Report, Failure> {
    let path = cli
        .input
        .as_deref()
        .ok_or_else(|| Failure { code: 2, message: "--input <file> is required".into() })?;
    let ws = Workspace::load(path)?;
    let opts = ExtensionOptions { depth: cli.bisection_depth, ..Default::default() };
    match &cli.command {
        Command::Check { assessment } => check(&ws, assessment),
        Command::Bounds { assessment, target } => bounds(&ws, assessment, target, opts),
        Command::Entails { premises, conclusion } => entails(&ws, premises, conclusion, opts),
        Command::Pconsistent { premises } => {
            let names = names(premises);
            let qs = quantities(&ws, &names)?;
            let consistent = p_consistent(&ws.space, &qs, opts)?;
            Ok(Report::Pconsistent(PConsistentReport { premises: labels(&qs), consistent }))
        }
        Command::Table { assessment, target } => table(&ws, assessment.as_deref(), target.as_deref()),
        Command::Constituents { premises } => constituents(&ws, premises),
    }
}

fn names(args: &[String]) -> Vec<String> {
    args.iter().flat_map(|a| split_list(a)).collect()
}

fn quantities(ws: &Workspace, names: &[String]) -> Result<Vec<Arc<CompoundQuantity>>, Failure> {
    Ok(names.iter().map(|n| ws.quantity(n)).collect::<Result<Vec<_>, _>>()?)
}

fn labels(qs: &[Arc<CompoundQuantity>]) -> Vec<String> {
    qs.iter().map(|q| q.describe().to_string()).collect()
}

fn check(ws: &Workspace, name: &str) -> Result<Report, Failure> {
    let named = ws.assessment(name)?;
    let a = ws.numeric(named)?;
    let members = labels(a.family().members());
    let verdict = check_coherence(&a);
    let pick = |idx: &[usize]| idx.iter().map(|&i| members[i].clone()).collect::<Vec<_>>();
    let trace = verdict
        .trace
        .iter()
        .map(|t| TraceRow {
            members: pick(&t.members),
            constituents: t.constituents,
            maxima: t.maxima.as_ref().map(|m| m.iter().map(|v| v.to_string()).collect()),
            zero_mass: pick(&t.i0),
        })
        .collect();
    let witness = verdict.witness.as_ref().map(|w| Witness {
        stakes: w
            .members
            .iter()
            .map(|&i| Valued { name: members[i].clone(), value: w.stakes[i].to_string() })
            .collect(),
        gains: w.gains.iter().map(|(r, g)| Valued { name: ws.space.label(r), value: g.to_string() }).collect(),
        verified: w.verify(&a),
    });
    let values =
        members.iter().zip(a.values()).map(|(n, v)| Valued { name: n.clone(), value: v.to_string() }).collect();
    Ok(Report::Check(CheckReport { assessment: name.into(), values, coherent: verdict.coherent, trace, witness }))
}

fn bounds(ws: &Workspace, name: &str, target: &str, opts: ExtensionOptions) -> Result<Report, Failure> {
    let a = ws.numeric(ws.assessment(name)?)?;
    let mut q = ws.quantity(target)?;
    let mut reduced = false;
    // An iterated conditional whose conjunction nobody assessed can still be
    // bounded through its product-formula form.
    if let (QuantityKind::Iterated { reduced: false }, Err(Error::Unresolved { .. })) =
        (q.kind(), a.family().push(q.clone()))
    {
        q = Arc::new(q.reduce_by_product_formula(&ws.space)?);
        reduced = true;
    }
    let b = extension_bounds(&a, q.clone(), opts)?;
    Ok(Report::Bounds(BoundsReport {
        assessment: name.into(),
        target: q.describe().into(),
        lower: b.lower.value.to_string(),
        upper: b.upper.value.to_string(),
        lower_exact: b.lower.exact,
        upper_exact: b.upper.exact,
        rule: b.rule,
        interval: b.interval,
        reduced,
        oracle_calls: b.oracle_calls,
    }))
}

fn entails(ws: &Workspace, premises: &[String], conclusion: &str, opts: ExtensionOptions) -> Result<Report, Failure> {
    let ps = quantities(ws, &names(premises))?;
    let c = ws.quantity(conclusion)?;
    let r = p_entails(&ws.space, &ps, &c, opts)?;
    Ok(Report::Entails(EntailsReport {
        premises: labels(&ps),
        conclusion: c.describe().into(),
        entails: r.entails,
        exact: r.exact,
        lower: r.lower.to_string(),
        upper: r.upper.to_string(),
        rule: r.rule,
        supports: r
            .supports
            .into_iter()
            .map(|s| SupportRow { name: s.label, lower: s.lower.to_string(), upper: s.upper.to_string() })
            .collect(),
        witness: r
            .witness
            .map(|w| w.into_iter().map(|(n, v)| Valued { name: n, value: v.to_string() }).collect()),
    }))
}

fn table(ws: &Workspace, assessment: Option<&str>, target: Option<&str>) -> Result<Report, Failure> {
    match (assessment, target) {
        (Some(name), None) => {
            let named = ws.assessment(name)?;
            let (family, values, symbols) = ws.symbolic(named)?;
            let sp = build_points_symbolic(&family, &values, symbols.len());
            let rows = format_points(&ws.space, &sp, &symbols)
                .into_iter()
                .map(|(n, c, v)| TableRow { name: n, constituent: c, value: v })
                .collect();
            let members = labels(family.members());
            let shown: Vec<String> = values.iter().map(|v| v.display(&symbols)).collect();
            Ok(Report::Table(TableReport {
                kind: TableKind::Points,
                title: format!("{{{}}} at ({})", members.join(", "), shown.join(", ")),
                columns: vec!["".into(), "C_h".into(), "Q_h".into()],
                rows,
            }))
        }
        (None, Some(t)) => {
            let q = ws.quantity(t)?;
            let rows = describe_cases(&ws.space, &q)
                .into_iter()
                .map(|(c, v)| TableRow { name: String::new(), constituent: c, value: v })
                .collect();
            Ok(Report::Table(TableReport {
                kind: TableKind::Values,
                title: format!("{}  (parameters: {})", q.describe(), q.symbols().join(", ")),
                columns: vec!["constituent".into(), "value".into()],
                rows,
            }))
        }
        (Some(name), Some(t)) => {
            let a = ws.numeric(ws.assessment(name)?)?;
            let q = ws.quantity(t)?;
            let vt = value_table(&q, &a)?;
            let rows = vt
                .rows
                .iter()
                .chain(vt.complement.iter())
                .map(|r| TableRow { name: String::new(), constituent: ws.space.label(&r.region), value: r.value.to_string() })
                .collect();
            Ok(Report::Table(TableReport {
                kind: TableKind::Values,
                title: format!("{} under {name}", q.describe()),
                columns: vec!["constituent".into(), "value".into()],
                rows,
            }))
        }
        (None, None) => Err(Failure { code: 2, message: "table needs --assessment, --target, or both".into() }),
    }
}

fn constituents(ws: &Workspace, premises: &[String]) -> Result<Report, Failure> {
    let qs = quantities(ws, &names(premises))?;
    let cons = partition_by_signature(&ws.space, qs.len(), |a| qs.iter().map(|q| q.case_of(a)).collect());
    let classes = cons
        .classes
        .iter()
        .enumerate()
        .map(|(h, c)| Valued { name: format!("C{}", h + 1), value: ws.space.label(&c.region) })
        .collect();
    Ok(Report::Constituents(ConstituentsReport {
        quantities: labels(&qs),
        classes,
        c0: cons.c0.as_ref().map(|f| ws.space.label(f)),
    }))
}
