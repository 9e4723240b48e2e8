//! Automaton file format.
//!
//! ```json
//! { "clocks": ["c"], "bound": 1,
//!   "locations": [{"name": "l", "owner": "min", "state_constraint": "c<=1"}],
//!   "actions": [{"name": "a", "resets": ["c"], "enabled": {"l": "c=1"}, "delta": {"l": "l"}}],
//!   "initial": {"location": "l", "valuation": {"c": "3/10"}} }
//! ```
//!
//! `state_constraint` defaults to `true`. An action without `enabled` is
//! enabled everywhere; with an `enabled` map, unlisted locations are
//! disabled. `delta` must list every location (validation reports gaps).

use indexmap::IndexMap;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{Action, ClockValuation, Configuration, ConstraintParseError, Location, Owner, TimedGameAutomaton, Zone};
use crate::num::{parse_rational, render, ParseRationalError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonFile {
    pub clocks: Vec<String>,
    pub bound: u32,
    pub locations: Vec<LocationFile>,
    pub actions: Vec<ActionFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<StateFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationFile {
    pub name: String,
    pub owner: Owner,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_constraint: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionFile {
    pub name: String,
    #[serde(default)]
    pub resets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enabled: Option<IndexMap<String, String>>,
    pub delta: IndexMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub location: String,
    pub valuation: IndexMap<String, Number>,
}

/// A rational written either as a JSON number or as a string (`"3/10"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

#[derive(Debug, thiserror::Error)]
pub enum AutomatonFileError {
    #[error("parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error("unknown clock `{0}`")]
    UnknownClock(String),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("in constraint: {0}")]
    Constraint(#[from] ConstraintParseError),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error("initial valuation must give every clock a value")]
    IncompleteValuation,
}

impl Number {
    fn to_ratio(&self) -> Result<Ratio<i64>, ParseRationalError> {
        match self {
            Number::Int(v) => Ok(Ratio::from_integer(*v)),
            Number::Text(s) => parse_rational(s),
        }
    }
}

fn check_unique<'a>(names: impl Iterator<Item = &'a String>) -> Result<(), AutomatonFileError> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(AutomatonFileError::Duplicate(n.clone()));
        }
    }
    Ok(())
}

impl AutomatonFile {
    pub fn into_automaton(self) -> Result<TimedGameAutomaton, AutomatonFileError> {
        check_unique(self.clocks.iter())?;
        check_unique(self.locations.iter().map(|l| &l.name))?;
        check_unique(self.actions.iter().map(|a| &a.name))?;
        let clocks = self.clocks;
        let loc_id = |name: &str| {
            self.locations
                .iter()
                .position(|l| l.name == name)
                .ok_or_else(|| AutomatonFileError::UnknownLocation(name.to_string()))
        };
        let clock_id = |name: &str| {
            clocks
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| AutomatonFileError::UnknownClock(name.to_string()))
        };
        let locations = self
            .locations
            .iter()
            .map(|l| {
                Ok(Location {
                    name: l.name.clone(),
                    owner: l.owner,
                    state_zone: match &l.state_constraint {
                        Some(text) => Zone::parse(text, &clocks)?,
                        None => Zone::always(),
                    },
                })
            })
            .collect::<Result<Vec<_>, AutomatonFileError>>()?;
        let n = locations.len();
        let mut actions = Vec::with_capacity(self.actions.len());
        for a in &self.actions {
            let mut resets = a.resets.iter().map(|c| clock_id(c)).collect::<Result<Vec<_>, _>>()?;
            resets.sort_unstable();
            resets.dedup();
            let enabled = match &a.enabled {
                None => vec![Zone::always(); n],
                Some(map) => {
                    let mut zones = vec![Zone::never(); n];
                    for (loc, text) in map {
                        zones[loc_id(loc)?] = Zone::parse(text, &clocks)?;
                    }
                    zones
                }
            };
            let mut delta = vec![None; n];
            for (from, to) in &a.delta {
                delta[loc_id(from)?] = Some(loc_id(to)?);
            }
            actions.push(Action { name: a.name.clone(), resets, enabled, delta });
        }
        let initial = match &self.initial {
            None => None,
            Some(state) => {
                let mut values = vec![None; clocks.len()];
                for (clock, v) in &state.valuation {
                    values[clock_id(clock)?] = Some(v.to_ratio()?);
                }
                let values = values
                    .into_iter()
                    .collect::<Option<Vec<_>>>()
                    .ok_or(AutomatonFileError::IncompleteValuation)?;
                Some(Configuration::new(loc_id(&state.location)?, ClockValuation::from_values(values)))
            }
        };
        Ok(TimedGameAutomaton { clocks, bound: self.bound, locations, actions, initial })
    }

    pub fn from_automaton(a: &TimedGameAutomaton) -> AutomatonFile {
        let loc = |l: usize| a.locations[l].name.clone();
        AutomatonFile {
            clocks: a.clocks.clone(),
            bound: a.bound,
            locations: a
                .locations
                .iter()
                .map(|l| LocationFile {
                    name: l.name.clone(),
                    owner: l.owner,
                    state_constraint: (!l.state_zone.is_trivially_true()).then(|| l.state_zone.render(&a.clocks)),
                })
                .collect(),
            actions: a
                .actions
                .iter()
                .map(|act| {
                    let everywhere = act.enabled.iter().all(Zone::is_trivially_true);
                    ActionFile {
                        name: act.name.clone(),
                        resets: act.resets.iter().map(|&c| a.clocks[c].clone()).collect(),
                        enabled: (!everywhere).then(|| {
                            act.enabled
                                .iter()
                                .enumerate()
                                .filter(|(_, z)| !z.unsatisfiable)
                                .map(|(l, z)| (loc(l), z.render(&a.clocks)))
                                .collect()
                        }),
                        delta: act
                            .delta
                            .iter()
                            .enumerate()
                            .filter_map(|(l, t)| t.map(|t| (loc(l), loc(t))))
                            .collect(),
                    }
                })
                .collect(),
            initial: a.initial.as_ref().map(|s| StateFile {
                location: loc(s.location),
                valuation: a
                    .clocks
                    .iter()
                    .zip(s.valuation.values())
                    .map(|(c, v)| (c.clone(), Number::Text(render(v))))
                    .collect(),
            }),
        }
    }
}

pub fn parse_automaton(text: &str) -> Result<TimedGameAutomaton, AutomatonFileError> {
    let file: AutomatonFile = serde_json::from_str(text)?;
    file.into_automaton()
}

pub fn automaton_to_json(a: &TimedGameAutomaton) -> String {
    serde_json::to_string_pretty(&AutomatonFile::from_automaton(a)).expect("serialisable")
}

/// Parses `loc` or `loc:c=1/2,d=0` against an automaton (missing clocks are 0).
pub fn parse_state(text: &str, a: &TimedGameAutomaton) -> Result<Configuration<i64>, AutomatonFileError> {
    let (loc, rest) = text.split_once(':').unwrap_or((text, ""));
    let location = a
        .location_id(loc.trim())
        .ok_or_else(|| AutomatonFileError::UnknownLocation(loc.trim().to_string()))?;
    let mut values = vec![Ratio::from_integer(0); a.clocks.len()];
    for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (clock, value) = part
            .split_once('=')
            .ok_or_else(|| ParseRationalError(part.to_string()))?;
        let c = a
            .clock_id(clock.trim())
            .ok_or_else(|| AutomatonFileError::UnknownClock(clock.trim().to_string()))?;
        values[c] = parse_rational(value)?;
    }
    Ok(Configuration::new(location, ClockValuation::from_values(values)))
}
