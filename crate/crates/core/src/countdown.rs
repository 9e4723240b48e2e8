//! Countdown games and their encoding as two-clock average-time games.
//!
//! From `(n, B)` player 1 names a duration `p ≤ B` of some move leaving `n`,
//! then player 2 picks any move of duration exactly `p`; play continues from
//! `(n'', B - p)`. Player 1 wins on reaching budget 0 and loses when stuck.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::automaton::{Action, ClockValuation, Configuration, Location, Owner, Rel, SimpleConstraint, TimedGameAutomaton, Zone};
use crate::num::render;
use crate::pipeline::{solve_average_time, PipelineError, PipelineOptions};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CountdownError {
    #[error("move {0} has zero duration")]
    ZeroDuration(usize),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("duplicate move {0} -> {1}")]
    DuplicateMove(String, String),
    #[error("initial budget must be at least 1")]
    ZeroBudget,
    #[error("W must be at least 1")]
    ZeroW,
    #[error("parse error: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub from: usize,
    pub to: usize,
    pub duration: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountdownGame {
    nodes: Vec<String>,
    moves: Vec<Move>,
    initial: usize,
    budget: u32,
}

impl CountdownGame {
    pub fn new(nodes: Vec<String>, moves: Vec<(usize, usize, u32)>, initial: usize, budget: u32) -> Result<Self, CountdownError> {
        let mut seen = BTreeSet::new();
        for n in &nodes {
            if !seen.insert(n) {
                return Err(CountdownError::DuplicateNode(n.clone()));
            }
        }
        if initial >= nodes.len() {
            return Err(CountdownError::NodeOutOfRange(initial));
        }
        if budget == 0 {
            return Err(CountdownError::ZeroBudget);
        }
        let mut pairs = BTreeSet::new();
        let mut list = Vec::with_capacity(moves.len());
        for (i, (from, to, duration)) in moves.into_iter().enumerate() {
            for v in [from, to] {
                if v >= nodes.len() {
                    return Err(CountdownError::NodeOutOfRange(v));
                }
            }
            if duration == 0 {
                return Err(CountdownError::ZeroDuration(i));
            }
            if !pairs.insert((from, to)) {
                return Err(CountdownError::DuplicateMove(nodes[from].clone(), nodes[to].clone()));
            }
            list.push(Move { from, to, duration });
        }
        Ok(CountdownGame { nodes, moves: list, initial, budget })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    /// Distinct durations of moves leaving `n`, ascending.
    pub fn durations_from(&self, n: usize) -> Vec<u32> {
        let set: BTreeSet<u32> = self.moves.iter().filter(|m| m.from == n).map(|m| m.duration).collect();
        set.into_iter().collect()
    }

    pub fn min_duration(&self) -> Option<u32> {
        self.moves.iter().map(|m| m.duration).min()
    }

    pub fn with_budget(&self, budget: u32) -> Result<Self, CountdownError> {
        let moves = self.moves.iter().map(|m| (m.from, m.to, m.duration)).collect();
        CountdownGame::new(self.nodes.clone(), moves, self.initial, budget)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountdownFile {
    pub nodes: Vec<String>,
    pub moves: Vec<MoveFile>,
    pub initial: InitialFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveFile {
    pub from: String,
    pub to: String,
    pub duration: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialFile {
    pub node: String,
    pub budget: u32,
}

impl CountdownFile {
    pub fn into_game(self) -> Result<CountdownGame, CountdownError> {
        let id = |name: &str| {
            self.nodes
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| CountdownError::UnknownNode(name.to_string()))
        };
        let moves = self
            .moves
            .iter()
            .map(|m| Ok((id(&m.from)?, id(&m.to)?, m.duration)))
            .collect::<Result<Vec<_>, CountdownError>>()?;
        let initial = id(&self.initial.node)?;
        CountdownGame::new(self.nodes.clone(), moves, initial, self.initial.budget)
    }

    pub fn from_game(g: &CountdownGame) -> Self {
        CountdownFile {
            nodes: g.nodes.clone(),
            moves: g
                .moves
                .iter()
                .map(|m| MoveFile { from: g.nodes[m.from].clone(), to: g.nodes[m.to].clone(), duration: m.duration })
                .collect(),
            initial: InitialFile { node: g.nodes[g.initial].clone(), budget: g.budget },
        }
    }
}

pub fn parse_countdown(text: &str) -> Result<CountdownGame, CountdownError> {
    let file: CountdownFile = serde_json::from_str(text).map_err(|e| CountdownError::Json(e.to_string()))?;
    file.into_game()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "player 1")]
    One,
    #[serde(rename = "player 2")]
    Two,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::One => write!(f, "player 1"),
            Player::Two => write!(f, "player 2"),
        }
    }
}

/// Winner of every `(node, budget)` with budget up to the game's `B0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinTable {
    table: Vec<Vec<Player>>,
    choice: Vec<Vec<Option<u32>>>,
}

impl WinTable {
    pub fn winner(&self, node: usize, budget: u32) -> Player {
        self.table[node][budget as usize]
    }

    /// The smallest winning duration for player 1, if any.
    pub fn winning_choice(&self, node: usize, budget: u32) -> Option<u32> {
        self.choice[node][budget as usize]
    }
}

pub fn dp_solve(g: &CountdownGame) -> WinTable {
    let n = g.nodes.len();
    let b0 = g.budget as usize;
    let durations: Vec<Vec<u32>> = (0..n).map(|v| g.durations_from(v)).collect();
    let mut table = vec![vec![Player::Two; b0 + 1]; n];
    let mut choice = vec![vec![None; b0 + 1]; n];
    for row in &mut table {
        row[0] = Player::One;
    }
    for budget in 1..=b0 {
        for v in 0..n {
            let win = durations[v].iter().copied().filter(|&p| p as usize <= budget).find(|&p| {
                g.moves
                    .iter()
                    .filter(|m| m.from == v && m.duration == p)
                    .all(|m| table[m.to][budget - p as usize] == Player::One)
            });
            if let Some(p) = win {
                table[v][budget] = Player::One;
                choice[v][budget] = Some(p);
            }
        }
    }
    WinTable { table, choice }
}

pub const STAR: &str = "*";

pub fn pair_name(g: &CountdownGame, n: usize, p: u32) -> String {
    format!("({},{})", g.nodes[n], p)
}

pub fn duration_action(p: u32) -> String {
    format!("p{p}")
}

pub fn move_action(g: &CountdownGame, m: &Move) -> String {
    format!("{}->{}", g.nodes[m.from], g.nodes[m.to])
}

/// Two clocks `b` (total elapsed budget) and `c` (time in the current step).
///
/// Locations are the nodes (player 1, Min), one `(n, p)` per node and
/// duration leaving it, and `*` (all player 2, Max). From `n` at `c = 0`
/// action `p` enters `(n, p)`; from `(n, p)` at `c = p` a move of duration
/// `p` enters its target node; `*` fires from a node at `b = B0` and loops
/// on `*` at `c = W`. Every action resets `c`, and `*` also resets `b`.
/// Pairs the construction does not list loop in place and are never enabled.
pub fn reduce(g: &CountdownGame, w: u32) -> Result<TimedGameAutomaton, CountdownError> {
    if w == 0 {
        return Err(CountdownError::ZeroW);
    }
    let b0 = g.budget as i64;
    let wi = w as i64;
    let k = g.budget.max(w);
    let (b, c) = (0usize, 1usize);
    let le = |x, v| SimpleConstraint::single(x, Rel::Le, v);
    let eq = |x, v| SimpleConstraint::single(x, Rel::Eq, v);

    let mut locations = Vec::new();
    locations.push(Location {
        name: STAR.into(),
        owner: Owner::Max,
        state_zone: Zone::of(vec![le(c, wi), SimpleConstraint::difference(b, c, Rel::Le, k as i64 - wi)]),
    });
    let node_loc = |n: usize| 1 + n;
    for name in &g.nodes {
        locations.push(Location {
            name: name.clone(),
            owner: Owner::Min,
            state_zone: Zone::of(vec![le(b, b0), le(c, b0), SimpleConstraint::difference(c, b, Rel::Le, 0)]),
        });
    }
    let mut pair_loc = std::collections::BTreeMap::new();
    for n in 0..g.nodes.len() {
        for p in g.durations_from(n) {
            let pi = p as i64;
            pair_loc.insert((n, p), locations.len());
            locations.push(Location {
                name: pair_name(g, n, p),
                owner: Owner::Max,
                state_zone: if pi > b0 {
                    Zone::never()
                } else {
                    Zone::of(vec![le(b, b0), le(c, pi), SimpleConstraint::difference(b, c, Rel::Le, b0 - pi)])
                },
            });
        }
    }
    let n_loc = locations.len();
    let idle = |resets: Vec<usize>, name: String| Action {
        name,
        resets,
        enabled: vec![Zone::never(); n_loc],
        delta: (0..n_loc).map(Some).collect(),
    };

    let mut actions = Vec::new();
    let mut star = idle(vec![b, c], STAR.into());
    star.enabled[0] = Zone::of(vec![eq(c, wi)]);
    for n in 0..g.nodes.len() {
        star.enabled[node_loc(n)] = Zone::of(vec![eq(b, b0)]);
        star.delta[node_loc(n)] = Some(0);
    }
    actions.push(star);

    let all: BTreeSet<u32> = g.moves.iter().map(|m| m.duration).collect();
    for p in all {
        let mut act = idle(vec![c], duration_action(p));
        for n in 0..g.nodes.len() {
            if let Some(&loc) = pair_loc.get(&(n, p)) {
                act.enabled[node_loc(n)] = Zone::of(vec![eq(c, 0)]);
                act.delta[node_loc(n)] = Some(loc);
            }
        }
        actions.push(act);
    }
    for m in &g.moves {
        let mut act = idle(vec![c], move_action(g, m));
        let loc = pair_loc[&(m.from, m.duration)];
        act.enabled[loc] = if m.duration > g.budget { Zone::never() } else { Zone::of(vec![eq(c, m.duration as i64)]) };
        act.delta[loc] = Some(node_loc(m.to));
        actions.push(act);
    }

    Ok(TimedGameAutomaton {
        clocks: vec!["b".into(), "c".into()],
        bound: k,
        locations,
        actions,
        initial: Some(Configuration::new(node_loc(g.initial), ClockValuation::zero(2))),
    })
}

/// Outcome of solving a reduced instance with both solvers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossReport {
    pub value: String,
    pub w: u32,
    pub winner: Player,
    /// `(value = W) == (player 1 wins)`.
    pub correspondence: bool,
    /// `value` compared with `W`: "less", "equal" or "greater".
    pub comparison: &'static str,
    pub brg_vertices: usize,
}

pub fn cross_validate(g: &CountdownGame, w: u32, options: &PipelineOptions) -> Result<CrossReport, CrossError> {
    let a = reduce(g, w)?;
    let s0: Configuration<i64> = a.initial.clone().expect("reduce sets an initial state");
    let solved = solve_average_time(&a, &s0, options)?;
    let value: Ratio<i64> = solved.value();
    let winner = dp_solve(g).winner(g.initial, g.budget);
    let wr = Ratio::from_integer(w as i64);
    let comparison = match value.cmp(&wr) {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    };
    Ok(CrossReport {
        value: render(&value),
        w,
        winner,
        correspondence: (value == wr) == (winner == Player::One),
        comparison,
        brg_vertices: solved.brg.vertex_count(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CrossError {
    #[error(transparent)]
    Countdown(#[from] CountdownError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Default `W`: the smallest move duration (1 for a game without moves).
pub fn default_w(g: &CountdownGame) -> u32 {
    g.min_duration().unwrap_or(1)
}
