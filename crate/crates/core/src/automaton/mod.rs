//! Bounded timed game automata and their concrete semantics.

mod constraint;
pub mod json;

use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use constraint::{eval_constraint, ConstraintParseError, Rel, SimpleConstraint, Zone};

use crate::num::{cast_ratio, rat, render, Int};
use crate::region::{self, ClockRegion, Region};

pub type ClockId = usize;
pub type LocationId = usize;
pub type ActionId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Min,
    Max,
}

impl Owner {
    pub fn opponent(self) -> Owner {
        match self {
            Owner::Min => Owner::Max,
            Owner::Max => Owner::Min,
        }
    }
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Owner::Min => "min",
            Owner::Max => "max",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("unknown clock #{0}")]
    UnknownClock(ClockId),
    #[error("negative delay")]
    NegativeDelay,
    #[error("clock value would exceed the bound {bound}")]
    BoundExceeded { bound: u32 },
    #[error("delay leaves the state zone")]
    LeftStateZone,
    #[error("configuration is not in the state zone")]
    NotInStateZone,
    #[error("action `{0}` is not enabled")]
    NotEnabled(String),
    #[error("transition target lies outside the state zone")]
    TargetOutsideS,
    #[error("transition function undefined for this location and action")]
    UndefinedTransition,
    #[error("valuation has {found} clocks, automaton has {expected}")]
    ArityMismatch { expected: usize, found: usize },
}

/// A clock valuation: one exact non-negative rational per clock.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClockValuation<I: Int>(Vec<Ratio<I>>);

impl<I: Int> ClockValuation<I> {
    /// Builds a valuation, checking `0 <= v <= bound` for every clock.
    pub fn new(values: Vec<Ratio<I>>, bound: u32) -> Result<Self, SemanticsError> {
        let k = rat::<I>(bound as i64);
        if values.iter().any(|v| *v < Ratio::zero()) {
            return Err(SemanticsError::NegativeDelay);
        }
        if values.iter().any(|v| *v > k) {
            return Err(SemanticsError::BoundExceeded { bound });
        }
        Ok(ClockValuation(values))
    }

    /// Builds a valuation without range checks.
    pub fn from_values(values: Vec<Ratio<I>>) -> Self {
        ClockValuation(values)
    }

    pub fn zero(clocks: usize) -> Self {
        ClockValuation(vec![Ratio::zero(); clocks])
    }

    pub fn values(&self) -> &[Ratio<I>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, c: ClockId) -> Ratio<I> {
        self.0[c]
    }

    pub fn shifted(&self, t: Ratio<I>) -> Self {
        ClockValuation(self.0.iter().map(|v| *v + t).collect())
    }

    pub fn reset(&self, clocks: &[ClockId]) -> Self {
        let mut values = self.0.clone();
        for &c in clocks {
            values[c] = Ratio::zero();
        }
        ClockValuation(values)
    }

    /// An integer valuation.
    pub fn is_corner(&self) -> bool {
        self.0.iter().all(|v| v.is_integer())
    }

    pub fn max_value(&self) -> Ratio<I> {
        self.0.iter().copied().max().unwrap_or_else(Ratio::zero)
    }

    pub fn denominator(&self) -> I {
        crate::num::common_denominator(self.0.iter())
    }

    pub fn cast<J: Int>(&self) -> Option<ClockValuation<J>> {
        self.0
            .iter()
            .map(cast_ratio)
            .collect::<Option<Vec<_>>>()
            .map(ClockValuation)
    }

    pub fn render(&self, clocks: &[String]) -> String {
        clocks
            .iter()
            .zip(&self.0)
            .map(|(n, v)| format!("{n}={}", render(v)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// A location together with a clock valuation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration<I: Int> {
    pub location: LocationId,
    pub valuation: ClockValuation<I>,
}

impl<I: Int> Configuration<I> {
    pub fn new(location: LocationId, valuation: ClockValuation<I>) -> Self {
        Configuration { location, valuation }
    }

    pub fn clock(&self, c: ClockId) -> Ratio<I> {
        self.valuation.get(c)
    }

    pub fn shifted(&self, t: Ratio<I>) -> Self {
        Configuration { location: self.location, valuation: self.valuation.shifted(t) }
    }

    pub fn region(&self, bound: u32) -> Region {
        Region::new(self.location, ClockRegion::of(&self.valuation, bound))
    }

    pub fn cast<J: Int>(&self) -> Option<Configuration<J>> {
        Some(Configuration { location: self.location, valuation: self.valuation.cast()? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimedAction<I: Int> {
    pub delay: Ratio<I>,
    pub action: ActionId,
}

/// A finite run of legal transitions with its cumulative time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run<I: Int> {
    pub initial: Configuration<I>,
    pub steps: Vec<(TimedAction<I>, Configuration<I>)>,
    time: Ratio<I>,
}

impl<I: Int> Run<I> {
    pub fn new(initial: Configuration<I>) -> Self {
        Run { initial, steps: Vec::new(), time: Ratio::zero() }
    }

    pub fn last(&self) -> &Configuration<I> {
        self.steps.last().map(|(_, s)| s).unwrap_or(&self.initial)
    }

    pub fn length(&self) -> usize {
        self.steps.len()
    }

    pub fn time(&self) -> Ratio<I> {
        self.time
    }

    /// Extends the run by one legal transition from its last configuration.
    pub fn extend(
        &mut self,
        tau: TimedAction<I>,
        automaton: &TimedGameAutomaton,
    ) -> Result<&Configuration<I>, SemanticsError> {
        let next = automaton.timed_succ(self.last(), tau)?;
        self.time = self.time + tau.delay;
        self.steps.push((tau, next));
        Ok(&self.steps.last().expect("just pushed").1)
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(mut self, other: Run<I>) -> Option<Run<I>> {
        if self.last() != &other.initial {
            return None;
        }
        self.time = self.time + other.time;
        self.steps.extend(other.steps);
        Some(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub name: String,
    pub owner: Owner,
    pub state_zone: Zone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub name: String,
    /// Sorted, duplicate-free.
    pub resets: Vec<ClockId>,
    /// Enabledness zone, one per location.
    pub enabled: Vec<Zone>,
    /// Transition target, one per location; `None` where the input left it undefined.
    pub delta: Vec<Option<LocationId>>,
}

/// A timed automaton with a Min/Max partition of its locations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedGameAutomaton {
    pub clocks: Vec<String>,
    pub bound: u32,
    pub locations: Vec<Location>,
    pub actions: Vec<Action>,
    pub initial: Option<Configuration<i64>>,
}

/// One problem found by [`TimedGameAutomaton::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoClocks,
    ZeroBound,
    EmptyStateZone,
    DeltaNotTotal { location: String, action: String },
    DeltaOutOfRange { location: String, action: String },
    ConstantExceedsBound { constraint: String, bound: u32 },
    NegativeConstant { constraint: String },
    UnknownClock { clock: ClockId },
    ResetOutOfRange { action: String },
    ShapeMismatch { action: String },
    NoLegalMove { region: String },
    InitialInvalid { reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoClocks => write!(f, "automaton has no clocks"),
            Violation::ZeroBound => write!(f, "clock bound must be positive"),
            Violation::EmptyStateZone => write!(f, "state zone S is empty"),
            Violation::DeltaNotTotal { location, action } => {
                write!(f, "δ not total: no target for ({location}, {action})")
            }
            Violation::DeltaOutOfRange { location, action } => {
                write!(f, "δ target out of range for ({location}, {action})")
            }
            Violation::ConstantExceedsBound { constraint, bound } => {
                write!(f, "constant exceeds bound {bound} in `{constraint}`")
            }
            Violation::NegativeConstant { constraint } => {
                write!(f, "negative constant in `{constraint}`")
            }
            Violation::UnknownClock { clock } => write!(f, "unknown clock #{clock}"),
            Violation::ResetOutOfRange { action } => {
                write!(f, "reset set of `{action}` names an unknown clock")
            }
            Violation::ShapeMismatch { action } => {
                write!(f, "action `{action}` has per-location tables of the wrong length")
            }
            Violation::NoLegalMove { region } => write!(f, "no legal move from region {region}"),
            Violation::InitialInvalid { reason } => write!(f, "initial state invalid: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

impl TimedGameAutomaton {
    pub fn clock_count(&self) -> usize {
        self.clocks.len()
    }

    pub fn owner(&self, location: LocationId) -> Owner {
        self.locations[location].owner
    }

    pub fn location_id(&self, name: &str) -> Option<LocationId> {
        self.locations.iter().position(|l| l.name == name)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn clock_id(&self, name: &str) -> Option<ClockId> {
        self.clocks.iter().position(|c| c == name)
    }

    fn zones(&self) -> impl Iterator<Item = &Zone> {
        self.locations
            .iter()
            .map(|l| &l.state_zone)
            .chain(self.actions.iter().flat_map(|a| a.enabled.iter()))
    }

    /// Lists every structural and availability problem of the automaton.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.clocks.is_empty() {
            violations.push(Violation::NoClocks);
        }
        if self.bound == 0 {
            violations.push(Violation::ZeroBound);
        }
        let n_loc = self.locations.len();
        let mut shapes_ok = true;
        for a in &self.actions {
            if a.enabled.len() != n_loc || a.delta.len() != n_loc {
                violations.push(Violation::ShapeMismatch { action: a.name.clone() });
                shapes_ok = false;
                continue;
            }
            if a.resets.iter().any(|&c| c >= self.clocks.len()) {
                violations.push(Violation::ResetOutOfRange { action: a.name.clone() });
            }
            for (l, target) in a.delta.iter().enumerate() {
                let location = self.locations[l].name.clone();
                match target {
                    None => violations.push(Violation::DeltaNotTotal { location, action: a.name.clone() }),
                    Some(t) if *t >= n_loc => {
                        violations.push(Violation::DeltaOutOfRange { location, action: a.name.clone() })
                    }
                    Some(_) => {}
                }
            }
        }
        let mut constants_ok = true;
        for z in self.zones() {
            for c in &z.conjuncts {
                if let Some(bad) = c.clocks().find(|&x| x >= self.clocks.len()) {
                    violations.push(Violation::UnknownClock { clock: bad });
                    constants_ok = false;
                } else if c.bound < 0 {
                    violations.push(Violation::NegativeConstant { constraint: c.render(&self.clocks) });
                    constants_ok = false;
                } else if c.bound > self.bound as i64 {
                    violations.push(Violation::ConstantExceedsBound {
                        constraint: c.render(&self.clocks),
                        bound: self.bound,
                    });
                    constants_ok = false;
                }
            }
        }
        // Region-level checks need well-formed tables and region-uniform zones.
        if violations.is_empty() && shapes_ok && constants_ok {
            let mut any_state = false;
            for (l, loc) in self.locations.iter().enumerate() {
                for p in region::enumerate_regions(self.clocks.len(), self.bound) {
                    let r = Region::new(l, p);
                    if !r.zone_test(&loc.state_zone) {
                        continue;
                    }
                    any_state = true;
                    let movable = r
                        .future_chain(self)
                        .iter()
                        .any(|later| (0..self.actions.len()).any(|a| later.action_successor(a, self).is_some()));
                    if !movable {
                        violations.push(Violation::NoLegalMove { region: r.render(self) });
                    }
                }
            }
            if !any_state {
                violations.push(Violation::EmptyStateZone);
            }
        }
        if let Some(init) = &self.initial {
            if let Err(e) = self.check_state(init) {
                violations.push(Violation::InitialInvalid { reason: e.to_string() });
            }
        }
        ValidationReport { violations }
    }

    /// Checks that `s` is a well-formed configuration inside S.
    pub fn check_state<I: Int>(&self, s: &Configuration<I>) -> Result<(), SemanticsError> {
        if s.valuation.len() != self.clocks.len() {
            return Err(SemanticsError::ArityMismatch { expected: self.clocks.len(), found: s.valuation.len() });
        }
        if s.location >= self.locations.len() {
            return Err(SemanticsError::NotInStateZone);
        }
        ClockValuation::new(s.valuation.values().to_vec(), self.bound)?;
        if !self.in_state_zone(s)? {
            return Err(SemanticsError::NotInStateZone);
        }
        Ok(())
    }

    pub fn in_state_zone<I: Int>(&self, s: &Configuration<I>) -> Result<bool, SemanticsError> {
        self.locations[s.location].state_zone.eval(s.valuation.values())
    }

    /// Lets `t` time units elapse, keeping every intermediate point in S.
    pub fn delay<I: Int>(&self, s: &Configuration<I>, t: Ratio<I>) -> Result<Configuration<I>, SemanticsError> {
        if t < Ratio::zero() {
            return Err(SemanticsError::NegativeDelay);
        }
        let k = rat::<I>(self.bound as i64);
        if s.valuation.max_value() + t > k {
            return Err(SemanticsError::BoundExceeded { bound: self.bound });
        }
        let target = s.shifted(t);
        let last = target.region(self.bound);
        let mut r = s.region(self.bound);
        let zone = &self.locations[s.location].state_zone;
        // S is a union of regions, so walking the region chain is exact.
        loop {
            if !r.zone_test(zone) {
                return Err(SemanticsError::LeftStateZone);
            }
            if r == last {
                return Ok(target);
            }
            r = match r.time_successor(self.bound) {
                Some(next) => next,
                None => return Err(SemanticsError::LeftStateZone),
            };
        }
    }

    /// `succ(s, a)` without legality checks: reset `ϱ(a)` and jump to `δ(ℓ, a)`.
    pub fn raw_successor<I: Int>(
        &self,
        s: &Configuration<I>,
        a: ActionId,
    ) -> Result<Configuration<I>, SemanticsError> {
        let action = &self.actions[a];
        let target = action.delta[s.location].ok_or(SemanticsError::UndefinedTransition)?;
        Ok(Configuration::new(target, s.valuation.reset(&action.resets)))
    }

    /// Fires `a` from `s`, requiring `s ∈ S ∩ E(a)` and the target in S.
    pub fn apply_action<I: Int>(&self, s: &Configuration<I>, a: ActionId) -> Result<Configuration<I>, SemanticsError> {
        if !self.in_state_zone(s)? {
            return Err(SemanticsError::NotInStateZone);
        }
        let action = &self.actions[a];
        if !action.enabled[s.location].eval(s.valuation.values())? {
            return Err(SemanticsError::NotEnabled(action.name.clone()));
        }
        let next = self.raw_successor(s, a)?;
        if !self.in_state_zone(&next)? {
            return Err(SemanticsError::TargetOutsideS);
        }
        Ok(next)
    }

    /// Delay then fire.
    pub fn timed_succ<I: Int>(&self, s: &Configuration<I>, tau: TimedAction<I>) -> Result<Configuration<I>, SemanticsError> {
        let mid = self.delay(s, tau.delay)?;
        self.apply_action(&mid, tau.action)
    }

    pub fn initial_as<I: Int>(&self) -> Option<Configuration<I>> {
        self.initial.as_ref().and_then(|c| c.cast())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::fixtures::{ex1, ex1_with_state_zone};
    use crate::num::ratio;

    fn cfg(v: Ratio<i64>) -> Configuration<i64> {
        Configuration::new(0, ClockValuation::from_values(vec![v]))
    }

    #[test]
    fn validate_examples() {
        assert!(ex1().validate().is_valid());

        let mut missing = ex1();
        missing.actions[0].delta[0] = None;
        let report = missing.validate();
        assert!(!report.is_valid());
        assert!(report.to_string().contains("δ not total"));

        let mut big = ex1();
        big.actions[0].enabled[0] = Zone::of(vec![SimpleConstraint::single(0, Rel::Eq, 2)]);
        let report = big.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ConstantExceedsBound { .. })));
        assert!(report.to_string().contains("constant exceeds bound"));
    }

    #[test]
    fn validate_reports_stuck_regions() {
        // Guard c=1 but S forbids reaching it from c<1.
        let a = ex1_with_state_zone(Zone::of(vec![SimpleConstraint::single(0, Rel::Lt, 1)]));
        let report = a.validate();
        assert!(report.violations.iter().any(|v| matches!(v, Violation::NoLegalMove { .. })));
    }

    #[test]
    fn delay_examples() {
        let a = ex1();
        assert_eq!(a.delay(&cfg(ratio(0, 1)), ratio(1, 1)).unwrap(), cfg(ratio(1, 1)));
        assert_eq!(
            a.delay(&cfg(ratio(1, 2)), ratio(7, 10)),
            Err(SemanticsError::BoundExceeded { bound: 1 })
        );
        assert_eq!(a.delay(&cfg(ratio(1, 4)), ratio(1, 2)).unwrap(), cfg(ratio(3, 4)));
        assert_eq!(a.delay(&cfg(ratio(1, 4)), ratio(-1, 2)), Err(SemanticsError::NegativeDelay));
    }

    #[test]
    fn delay_checks_intermediate_regions() {
        // S = c<=0 || ... is not convex; use c=0 only: any positive delay leaves S.
        let a = ex1_with_state_zone(Zone::of(vec![SimpleConstraint::single(0, Rel::Le, 0)]));
        assert_eq!(a.delay(&cfg(ratio(0, 1)), ratio(1, 2)), Err(SemanticsError::LeftStateZone));
        assert_eq!(a.delay(&cfg(ratio(0, 1)), ratio(0, 1)).unwrap(), cfg(ratio(0, 1)));
    }

    #[test]
    fn action_examples() {
        let a = ex1();
        assert_eq!(a.apply_action(&cfg(ratio(1, 1)), 0).unwrap(), cfg(ratio(0, 1)));
        assert_eq!(a.apply_action(&cfg(ratio(1, 2)), 0), Err(SemanticsError::NotEnabled("a".into())));

        let mut no_reset = ex1();
        no_reset.actions[0].resets.clear();
        assert_eq!(no_reset.apply_action(&cfg(ratio(1, 1)), 0).unwrap(), cfg(ratio(1, 1)));
    }

    #[test]
    fn timed_succ_examples() {
        let a = ex1();
        let tau = |t, action| TimedAction { delay: t, action };
        assert_eq!(a.timed_succ(&cfg(ratio(0, 1)), tau(ratio(1, 1), 0)).unwrap(), cfg(ratio(0, 1)));
        assert_eq!(a.timed_succ(&cfg(ratio(1, 2)), tau(ratio(1, 2), 0)).unwrap(), cfg(ratio(0, 1)));
        assert_eq!(
            a.timed_succ(&cfg(ratio(0, 1)), tau(ratio(1, 2), 0)),
            Err(SemanticsError::NotEnabled("a".into()))
        );
    }

    #[test]
    fn runs_accumulate_time() {
        let a = ex1();
        let mut r1 = Run::new(cfg(ratio(1, 2)));
        r1.extend(TimedAction { delay: ratio(1, 2), action: 0 }, &a).unwrap();
        let mut r2 = Run::new(cfg(ratio(0, 1)));
        r2.extend(TimedAction { delay: ratio(1, 1), action: 0 }, &a).unwrap();
        r2.extend(TimedAction { delay: ratio(1, 1), action: 0 }, &a).unwrap();
        let (t1, t2) = (r1.time(), r2.time());
        let joined = r1.concat(r2).unwrap();
        assert_eq!(joined.time(), t1 + t2);
        assert_eq!(joined.length(), 3);
        assert_eq!(joined.time(), ratio(5, 2));
    }
}
