//! Clock constraints: simple constraints, their conjunctions (zones), and
//! the textual grammar used by automaton files.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{ClockId, SemanticsError};
use crate::num::{rat, Int};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub fn holds<T: PartialOrd>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Eq => lhs == rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }
}

/// `clock REL bound` or `clock - other REL bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimpleConstraint {
    pub clock: ClockId,
    pub other: Option<ClockId>,
    pub rel: Rel,
    pub bound: i64,
}

impl SimpleConstraint {
    pub fn single(clock: ClockId, rel: Rel, bound: i64) -> Self {
        SimpleConstraint { clock, other: None, rel, bound }
    }

    pub fn difference(clock: ClockId, other: ClockId, rel: Rel, bound: i64) -> Self {
        SimpleConstraint { clock, other: Some(other), rel, bound }
    }

    pub fn clocks(&self) -> impl Iterator<Item = ClockId> {
        std::iter::once(self.clock).chain(self.other)
    }

    pub fn eval<I: Int>(&self, values: &[Ratio<I>]) -> Result<bool, SemanticsError> {
        let get = |c: ClockId| values.get(c).ok_or(SemanticsError::UnknownClock(c));
        let lhs = match self.other {
            None => *get(self.clock)?,
            Some(o) => *get(self.clock)? - *get(o)?,
        };
        Ok(self.rel.holds(&lhs, &rat(self.bound)))
    }

    pub fn render(&self, clocks: &[String]) -> String {
        let name = |c: ClockId| clocks.get(c).cloned().unwrap_or_else(|| format!("#{c}"));
        match self.other {
            None => format!("{}{}{}", name(self.clock), self.rel.symbol(), self.bound),
            Some(o) => format!(
                "{}-{}{}{}",
                name(self.clock),
                name(o),
                self.rel.symbol(),
                self.bound
            ),
        }
    }
}

/// A clock zone given as a conjunction of simple constraints.
///
/// The empty conjunction is `true`; `unsatisfiable` marks an explicit `false`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Zone {
    pub conjuncts: Vec<SimpleConstraint>,
    pub unsatisfiable: bool,
}

impl Zone {
    pub fn always() -> Self {
        Zone::default()
    }

    pub fn never() -> Self {
        Zone { conjuncts: Vec::new(), unsatisfiable: true }
    }

    pub fn of(conjuncts: Vec<SimpleConstraint>) -> Self {
        Zone { conjuncts, unsatisfiable: false }
    }

    pub fn and(mut self, c: SimpleConstraint) -> Self {
        self.conjuncts.push(c);
        self
    }

    pub fn is_trivially_true(&self) -> bool {
        !self.unsatisfiable && self.conjuncts.is_empty()
    }

    /// Exact membership test of a clock valuation.
    pub fn eval<I: Int>(&self, values: &[Ratio<I>]) -> Result<bool, SemanticsError> {
        if self.unsatisfiable {
            return Ok(false);
        }
        for c in &self.conjuncts {
            if !c.eval(values)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn render(&self, clocks: &[String]) -> String {
        if self.unsatisfiable {
            return "false".to_string();
        }
        if self.conjuncts.is_empty() {
            return "true".to_string();
        }
        self.conjuncts
            .iter()
            .map(|c| c.render(clocks))
            .collect::<Vec<_>>()
            .join(" && ")
    }

    pub fn parse(text: &str, clocks: &[String]) -> Result<Zone, ConstraintParseError> {
        parse_zone(text, clocks)
    }
}

/// Evaluates a conjunction of simple constraints against a valuation.
pub fn eval_constraint<I: Int>(
    values: &[Ratio<I>],
    conjunction: &[SimpleConstraint],
) -> Result<bool, SemanticsError> {
    for c in conjunction {
        if !c.eval(values)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstraintParseError {
    #[error("unknown clock `{0}` in constraint")]
    UnknownClock(String),
    #[error("malformed constraint `{0}`")]
    Malformed(String),
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

fn parse_zone(text: &str, clocks: &[String]) -> Result<Zone, ConstraintParseError> {
    let trimmed = text.trim();
    match trimmed {
        "" | "true" => return Ok(Zone::always()),
        "false" => return Ok(Zone::never()),
        _ => {}
    }
    let mut zone = Zone::always();
    for atom in trimmed.split("&&") {
        zone.conjuncts.push(parse_atom(atom.trim(), clocks)?);
    }
    Ok(zone)
}

fn parse_atom(atom: &str, clocks: &[String]) -> Result<SimpleConstraint, ConstraintParseError> {
    let malformed = || ConstraintParseError::Malformed(atom.to_string());
    // Two-character operators first so `<=` is not read as `<`.
    let ops = [("<=", Rel::Le), (">=", Rel::Ge), ("==", Rel::Eq), ("<", Rel::Lt), (">", Rel::Gt), ("=", Rel::Eq)];
    let (pos, len, rel) = ops
        .iter()
        .find_map(|(sym, rel)| atom.find(sym).map(|p| (p, sym.len(), *rel)))
        .ok_or_else(malformed)?;
    let lhs = atom[..pos].trim();
    let rhs = atom[pos + len..].trim();
    let bound: i64 = rhs.parse().map_err(|_| malformed())?;
    let lookup = |name: &str| {
        let name = name.trim();
        if name.is_empty() {
            return Err(malformed());
        }
        clocks
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| ConstraintParseError::UnknownClock(name.to_string()))
    };
    match lhs.split_once('-') {
        Some((a, b)) => Ok(SimpleConstraint::difference(lookup(a)?, lookup(b)?, rel, bound)),
        None => Ok(SimpleConstraint::single(lookup(lhs)?, rel, bound)),
    }
}
