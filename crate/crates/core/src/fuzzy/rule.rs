use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    And,
    Or,
}

impl Connective {
    #[inline]
    pub fn apply(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Connective::And => lhs.min(rhs),
            Connective::Or => lhs.max(rhs),
        }
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Connective::And => "AND",
            Connective::Or => "OR",
        })
    }
}

/// A `set IS label` clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub set: String,
    pub label: String,
}

impl Clause {
    pub fn new(set: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            set: set.into(),
            label: label.into(),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} IS {}", self.set, self.label)
    }
}

/// `IF a (AND|OR b)* THEN c`, with an inclusion flag.
///
/// Connectives fold strictly left to right: `a OR b AND c` means
/// `(a OR b) AND c`. There is no AND-over-OR precedence.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub antecedents: Vec<Clause>,
    pub connectives: Vec<Connective>,
    pub consequent: Clause,
    pub included: bool,
}

impl Rule {
    pub fn new(
        antecedents: Vec<Clause>,
        connectives: Vec<Connective>,
        consequent: Clause,
    ) -> Result<Self> {
        if antecedents.is_empty() {
            return Err(Error::Specification("rule has no antecedents".into()));
        }
        if connectives.len() + 1 != antecedents.len() {
            return Err(Error::Specification(format!(
                "rule with {} antecedents needs {} connectives, got {}",
                antecedents.len(),
                antecedents.len() - 1,
                connectives.len()
            )));
        }
        Ok(Self {
            antecedents,
            connectives,
            consequent,
            included: true,
        })
    }

    pub fn with_included(mut self, included: bool) -> Self {
        self.included = included;
        self
    }

    /// Folds antecedent degrees supplied by `degree` with min/max.
    pub fn fold_with<F>(&self, mut degree: F) -> Result<f64>
    where
        F: FnMut(&Clause) -> Option<f64>,
    {
        if !self.included {
            return Ok(0.0);
        }
        let lookup = |clause: &Clause, d: Option<f64>| {
            d.ok_or_else(|| Error::Specification(format!("no membership degree for `{clause}`")))
        };
        let first = &self.antecedents[0];
        let mut acc = lookup(first, degree(first))?;
        for (conn, clause) in self.connectives.iter().zip(&self.antecedents[1..]) {
            let d = lookup(clause, degree(clause))?;
            acc = conn.apply(acc, d);
        }
        Ok(acc)
    }
}

/// Membership degrees keyed by `(set, label)`.
pub type Degrees = HashMap<(String, String), f64>;

/// Firing strength of `rule` given precomputed antecedent degrees.
pub fn firing_strength(rule: &Rule, degrees: &Degrees) -> Result<f64> {
    rule.fold_with(|c| degrees.get(&(c.set.clone(), c.label.clone())).copied())
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IF {}", self.antecedents[0])?;
        for (conn, clause) in self.connectives.iter().zip(&self.antecedents[1..]) {
            write!(f, " {conn} {clause}")?;
        }
        write!(f, " THEN {}", self.consequent)
    }
}

impl FromStr for Rule {
    type Err = Error;

    /// Parses `IF set IS label (AND|OR set IS label)* THEN out IS label`.
    /// Keywords are case-insensitive; names are kept verbatim.
    fn from_str(text: &str) -> Result<Self> {
        let err = |message: String| Error::Parse { line: 0, message };
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let kw = |i: usize, want: &str| tokens.get(i).is_some_and(|t| t.eq_ignore_ascii_case(want));

        if !kw(0, "IF") {
            return Err(err(format!("rule must start with IF: `{text}`")));
        }
        let clause_at = |i: usize| -> Result<Clause> {
            match (tokens.get(i), tokens.get(i + 1), tokens.get(i + 2)) {
                (Some(set), Some(is), Some(label)) if is.eq_ignore_ascii_case("IS") => {
                    Ok(Clause::new(*set, *label))
                }
                _ => Err(err(format!(
                    "expected `<set> IS <label>` at token {i} in `{text}`"
                ))),
            }
        };

        let mut pos = 1;
        let mut antecedents = vec![clause_at(pos)?];
        let mut connectives = Vec::new();
        pos += 3;
        loop {
            if kw(pos, "AND") {
                connectives.push(Connective::And);
            } else if kw(pos, "OR") {
                connectives.push(Connective::Or);
            } else if kw(pos, "THEN") {
                break;
            } else {
                return Err(err(format!(
                    "expected AND, OR or THEN at token {pos} in `{text}`"
                )));
            }
            antecedents.push(clause_at(pos + 1)?);
            pos += 4;
        }
        let consequent = clause_at(pos + 1)?;
        if pos + 4 != tokens.len() {
            return Err(err(format!("trailing tokens after consequent in `{text}`")));
        }
        Rule::new(antecedents, connectives, consequent)
    }
}
