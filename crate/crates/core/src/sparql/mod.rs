//! The SPARQL subset used for mining: `PREFIX`, `SELECT [DISTINCT]`, a basic
//! graph pattern, `FILTER(?a != ?b)` and `LIMIT`.

mod eval;
mod parser;
mod results;

use std::collections::BTreeMap;
use std::fmt;

use crate::rdf::Term;

pub use eval::{evaluate, evaluate_in_order, plan, Plan, PlanStep};
pub use parser::parse_query;
pub use results::{ResultSet, ResultsError};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown prefix `{0}:`")]
    UnknownPrefix(String),
    #[error("unsupported feature: {0}")]
    Unsupported(String),
    #[error("variable ?{0} does not occur in any triple pattern")]
    UnboundVariable(String),
    #[error("literal in subject position")]
    LiteralSubject,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Var(String),
    Const(Term),
}

impl PatternTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Const(_) => None,
        }
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Const(t) => f.write_str(&t.to_compact()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub s: PatternTerm,
    pub p: PatternTerm,
    pub o: PatternTerm,
}

impl TriplePattern {
    pub fn new(s: PatternTerm, p: PatternTerm, o: PatternTerm) -> Self {
        TriplePattern { s, p, o }
    }

    pub fn terms(&self) -> [&PatternTerm; 3] {
        [&self.s, &self.p, &self.o]
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.terms().into_iter().filter_map(PatternTerm::var)
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.s, self.p, self.o)
    }
}

/// Parsed query. Prefixed names are already expanded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryIr {
    pub prefixes: BTreeMap<String, String>,
    pub select_vars: Vec<String>,
    pub distinct: bool,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<(String, String)>,
    pub limit: Option<u64>,
}

impl QueryIr {
    /// Every select and filter variable must occur in a pattern.
    pub fn validate(&self) -> Result<(), QueryError> {
        let occurs = |v: &str| self.patterns.iter().any(|p| p.vars().any(|x| x == v));
        for v in self
            .select_vars
            .iter()
            .chain(self.filters.iter().flat_map(|(a, b)| [a, b]))
        {
            if !occurs(v) {
                return Err(QueryError::UnboundVariable(v.clone()));
            }
        }
        if self.patterns.iter().any(|p| matches!(&p.s, PatternTerm::Const(t) if t.is_literal())) {
            return Err(QueryError::LiteralSubject);
        }
        Ok(())
    }

    /// Variables in order of first occurrence across the patterns.
    pub fn pattern_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for v in self.patterns.iter().flat_map(TriplePattern::vars) {
            if !out.iter().any(|x| x == v) {
                out.push(v.to_string());
            }
        }
        out
    }
}
