//! Finite mean-payoff games: Min minimises and Max maximises the limit
//! average edge weight.

mod brute;
mod energy;
mod karp;
mod solve;

pub use brute::{brute_force_solve, BRUTE_FORCE_LIMIT};
pub use karp::{cycle_means, karp_mean_cycle, Objective};
pub use solve::{round_to_cycle_mean, solve, solve_with, value_iteration, SolveMethod, SolveOptions, Solution};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::automaton::Owner;
use crate::num::{render, Int};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("vertex {0} has no outgoing edge")]
    DeadEnd(usize),
    #[error("edge {edge} refers to unknown vertex {vertex}")]
    UnknownVertex { edge: usize, vertex: usize },
    #[error("vertex ids must be 0..n, each exactly once")]
    BadVertexIds,
    #[error("weight {0} does not fit the integer backing type")]
    WeightOverflow(i64),
    #[error("invalid {player} strategy: {reason}")]
    BadStrategy { player: Owner, reason: String },
    #[error("value vector has {got} entries, game has {expected} vertices")]
    ValueCount { got: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MpgError {
    #[error("brute force needs {pairs} strategy pairs, limit is {limit}")]
    TooLarge { pairs: u128, limit: u128 },
    #[error("{x} is equidistant from two cycle means with denominator at most {n}")]
    AmbiguousRounding { x: String, n: usize },
    #[error("value iteration budget exhausted at horizon {horizon} without a certified solution")]
    Budget { horizon: u64 },
    #[error("extracted strategies failed verification")]
    Uncertified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge<I: Int> {
    pub src: usize,
    pub dst: usize,
    pub weight: I,
}

/// Vertices are `0..n`; edges are numbered in insertion order, which is
/// also the tie-breaking order everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanPayoffGame<I: Int> {
    owners: Vec<Owner>,
    edges: Vec<Edge<I>>,
    out: Vec<Vec<usize>>,
}

impl<I: Int> MeanPayoffGame<I> {
    pub fn new(owners: Vec<Owner>, edges: Vec<(usize, usize, I)>) -> Result<Self, GameError> {
        let n = owners.len();
        let mut out = vec![Vec::new(); n];
        let mut list = Vec::with_capacity(edges.len());
        for (id, (src, dst, weight)) in edges.into_iter().enumerate() {
            for v in [src, dst] {
                if v >= n {
                    return Err(GameError::UnknownVertex { edge: id, vertex: v });
                }
            }
            out[src].push(id);
            list.push(Edge { src, dst, weight });
        }
        if let Some(v) = out.iter().position(Vec::is_empty) {
            return Err(GameError::DeadEnd(v));
        }
        Ok(MeanPayoffGame { owners, edges: list, out })
    }

    pub fn vertex_count(&self) -> usize {
        self.owners.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn owner(&self, v: usize) -> Owner {
        self.owners[v]
    }

    pub fn owners(&self) -> &[Owner] {
        &self.owners
    }

    pub fn edge(&self, e: usize) -> &Edge<I> {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge<I>] {
        &self.edges
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// `W`: largest absolute weight, at least 1.
    pub fn max_abs_weight(&self) -> i128 {
        self.edges.iter().map(|e| wide(e.weight).abs()).max().unwrap_or(0).max(1)
    }

    /// Same graph with every weight multiplied by `m`.
    pub fn scaled(&self, m: I) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.weight = e.weight * m;
        }
        g
    }

    pub(crate) fn wide_edges(&self) -> Vec<(usize, usize, i128)> {
        self.edges.iter().map(|e| (e.src, e.dst, wide(e.weight))).collect()
    }
}

pub(crate) fn wide<I: Int>(x: I) -> i128 {
    x.to_i128().expect("backing integers fit in i128")
}

pub(crate) fn narrow<I: Int>(r: Ratio<i128>) -> Ratio<I> {
    crate::num::cast_ratio(&r).expect("game value fits the integer backing type")
}

/// One chosen outgoing edge per vertex of `player`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PositionalStrategy {
    pub player: Owner,
    choice: Vec<Option<usize>>,
}

impl PositionalStrategy {
    pub fn new<I: Int>(game: &MeanPayoffGame<I>, player: Owner, choice: Vec<Option<usize>>) -> Result<Self, GameError> {
        let bad = |reason: String| GameError::BadStrategy { player, reason };
        if choice.len() != game.vertex_count() {
            return Err(bad(format!("{} entries for {} vertices", choice.len(), game.vertex_count())));
        }
        for (v, c) in choice.iter().enumerate() {
            match (game.owner(v) == player, c) {
                (true, None) => return Err(bad(format!("no choice at vertex {v}"))),
                (false, Some(_)) => return Err(bad(format!("choice at opponent vertex {v}"))),
                (true, Some(e)) if *e >= game.edge_count() || game.edge(*e).src != v => {
                    return Err(bad(format!("edge {e} does not leave vertex {v}")))
                }
                _ => {}
            }
        }
        Ok(PositionalStrategy { player, choice })
    }

    /// Picks the first listed edge everywhere.
    pub fn first_edges<I: Int>(game: &MeanPayoffGame<I>, player: Owner) -> Self {
        let choice = (0..game.vertex_count())
            .map(|v| (game.owner(v) == player).then(|| game.out_edges(v)[0]))
            .collect();
        PositionalStrategy { player, choice }
    }

    pub fn choice(&self, v: usize) -> Option<usize> {
        self.choice.get(v).copied().flatten()
    }

    pub fn choices(&self) -> &[Option<usize>] {
        &self.choice
    }

    /// Edges available once this strategy is fixed.
    pub fn restrict<I: Int>(&self, game: &MeanPayoffGame<I>) -> Vec<bool> {
        let mut allowed = vec![true; game.edge_count()];
        for (v, c) in self.choice.iter().enumerate() {
            if let Some(c) = c {
                for &e in game.out_edges(v) {
                    allowed[e] = e == *c;
                }
            }
        }
        allowed
    }
}

/// Checks both one-player re-solves against `values`.
pub fn verify<I: Int>(
    game: &MeanPayoffGame<I>,
    values: &[Ratio<I>],
    min_strategy: &PositionalStrategy,
    max_strategy: &PositionalStrategy,
) -> bool {
    if values.len() != game.vertex_count() || min_strategy.player != Owner::Min || max_strategy.player != Owner::Max {
        return false;
    }
    let upper = karp_mean_cycle(game, Some(min_strategy), Objective::Max);
    if upper != values {
        return false;
    }
    karp_mean_cycle(game, Some(max_strategy), Objective::Min) == values
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub vertices: Vec<VertexFile>,
    pub edges: Vec<EdgeFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexFile {
    pub id: usize,
    pub owner: Owner,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFile {
    pub src: usize,
    pub dst: usize,
    pub weight: i64,
}

impl GameFile {
    pub fn into_game<I: Int>(self) -> Result<MeanPayoffGame<I>, GameError> {
        let n = self.vertices.len();
        let mut owners = vec![None; n];
        for v in &self.vertices {
            match owners.get_mut(v.id) {
                Some(slot @ None) => *slot = Some(v.owner),
                _ => return Err(GameError::BadVertexIds),
            }
        }
        let owners = owners.into_iter().collect::<Option<Vec<_>>>().ok_or(GameError::BadVertexIds)?;
        let edges = self
            .edges
            .iter()
            .map(|e| Ok((e.src, e.dst, I::from_i64(e.weight).ok_or(GameError::WeightOverflow(e.weight))?)))
            .collect::<Result<Vec<_>, GameError>>()?;
        MeanPayoffGame::new(owners, edges)
    }

    pub fn from_game<I: Int>(game: &MeanPayoffGame<I>) -> Self {
        GameFile {
            vertices: game.owners.iter().enumerate().map(|(id, &owner)| VertexFile { id, owner }).collect(),
            edges: game
                .edges
                .iter()
                .map(|e| EdgeFile { src: e.src, dst: e.dst, weight: e.weight.to_i64().expect("weight fits i64") })
                .collect(),
        }
    }
}

/// Machine-readable solution: one entry per vertex in id order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub vertices: Vec<VertexSolution>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSolution {
    pub id: usize,
    pub owner: Owner,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub edge: Option<usize>,
}

impl SolutionFile {
    pub fn new<I: Int>(
        game: &MeanPayoffGame<I>,
        values: &[Ratio<I>],
        strategies: Option<(&PositionalStrategy, &PositionalStrategy)>,
    ) -> Self {
        let vertices = values
            .iter()
            .enumerate()
            .map(|(id, v)| VertexSolution {
                id,
                owner: game.owner(id),
                value: render(v),
                edge: strategies.and_then(|(min, max)| min.choice(id).or(max.choice(id))),
            })
            .collect();
        SolutionFile { vertices }
    }

    /// Values and, when every vertex carries an edge, both strategies.
    #[allow(clippy::type_complexity)]
    pub fn read<I: Int>(
        &self,
        game: &MeanPayoffGame<I>,
    ) -> Result<(Vec<Ratio<I>>, Option<(PositionalStrategy, PositionalStrategy)>), String> {
        if self.vertices.len() != game.vertex_count() {
            return Err(GameError::ValueCount { got: self.vertices.len(), expected: game.vertex_count() }.to_string());
        }
        let mut values = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id != i {
                return Err(GameError::BadVertexIds.to_string());
            }
            values.push(crate::num::parse_rational(&v.value).map_err(|e| e.to_string())?);
        }
        if self.vertices.iter().any(|v| v.edge.is_none()) {
            return Ok((values, None));
        }
        let pick = |p: Owner| {
            self.vertices.iter().map(|v| (v.owner == p).then_some(v.edge).flatten()).collect::<Vec<_>>()
        };
        let min = PositionalStrategy::new(game, Owner::Min, pick(Owner::Min)).map_err(|e| e.to_string())?;
        let max = PositionalStrategy::new(game, Owner::Max, pick(Owner::Max)).map_err(|e| e.to_string())?;
        Ok((values, Some((min, max))))
    }
}

pub fn parse_game<I: Int>(text: &str) -> Result<MeanPayoffGame<I>, String> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| format!("parse error: {e}"))?;
    file.into_game().map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    pub(crate) fn two_cycle() -> MeanPayoffGame<i64> {
        MeanPayoffGame::new(vec![Owner::Min, Owner::Max], vec![(0, 1, 1), (1, 0, 3)]).unwrap()
    }

    #[test]
    fn rejects_dead_ends_and_bad_edges() {
        assert_eq!(
            MeanPayoffGame::<i64>::new(vec![Owner::Min, Owner::Max], vec![(0, 1, 1)]),
            Err(GameError::DeadEnd(1))
        );
        assert_eq!(
            MeanPayoffGame::<i64>::new(vec![Owner::Min], vec![(0, 2, 1)]),
            Err(GameError::UnknownVertex { edge: 0, vertex: 2 })
        );
    }

    #[test]
    fn strategy_checks() {
        let g = two_cycle();
        assert!(PositionalStrategy::new(&g, Owner::Min, vec![Some(0), None]).is_ok());
        assert!(PositionalStrategy::new(&g, Owner::Min, vec![Some(1), None]).is_err());
        assert!(PositionalStrategy::new(&g, Owner::Min, vec![Some(0), Some(1)]).is_err());
        assert!(PositionalStrategy::new(&g, Owner::Min, vec![None, None]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = two_cycle();
        let text = serde_json::to_string(&GameFile::from_game(&g)).unwrap();
        assert_eq!(text, r#"{"vertices":[{"id":0,"owner":"min"},{"id":1,"owner":"max"}],"edges":[{"src":0,"dst":1,"weight":1},{"src":1,"dst":0,"weight":3}]}"#);
        assert_eq!(parse_game::<i64>(&text).unwrap(), g);
        let dup = text.replace("\"id\":1", "\"id\":0");
        assert!(parse_game::<i64>(&dup).is_err());
    }

    #[test]
    fn verify_rejects_tampered_values() {
        let g = two_cycle();
        let min = PositionalStrategy::first_edges(&g, Owner::Min);
        let max = PositionalStrategy::first_edges(&g, Owner::Max);
        assert!(verify(&g, &[rat(2), rat(2)], &min, &max));
        assert!(!verify(&g, &[rat(3), rat(3)], &min, &max));
        assert!(!verify(&g, &[rat(2), rat(2)], &max, &min));
    }

    #[test]
    fn solution_file_round_trip() {
        let g = two_cycle();
        let s = solve(&g).unwrap();
        let file = SolutionFile::new(&g, &s.values, Some((&s.min_strategy, &s.max_strategy)));
        let (values, strategies) = file.read(&g).unwrap();
        assert_eq!(values, s.values);
        assert_eq!(strategies, Some((s.min_strategy, s.max_strategy)));
    }
}
