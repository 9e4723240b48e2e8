//! The boundary region graph reachable from a rational start configuration.
//!
//! A vertex pairs an exact configuration `s` with a region `R` such that
//! `s ∈ clos(R)`. From `(s, R)` a move picks a region `R''` in the future of
//! `R`, an action `a` enabled on `R''`, and waits exactly until the nearer
//! or farther boundary of the delay interval `{t : s + t ∈ clos(R'')}`. Each
//! such delay has the form `max(0, b - s(c))` for an integer `b` and clock `c`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use crate::automaton::{ActionId, ClockId, Configuration, Owner, SemanticsError, TimedGameAutomaton};
use crate::mpg::{GameError, MeanPayoffGame};
use crate::num::{common_denominator, int, render, Int};
use crate::region::{ClockRegion, Region};

pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BrgError {
    #[error("region is not in the future of the configuration")]
    NotInFuture,
    #[error("explosion guard: more than {cap} boundary region graph vertices")]
    ExplosionGuard { cap: usize },
    #[error("initial state: {0}")]
    InitialState(#[from] SemanticsError),
    #[error("initial valuation is not a corner")]
    NotCornerStart,
    #[error(transparent)]
    Game(#[from] GameError),
}

/// `(s, R)` with `s ∈ clos(R)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BrgConfig<I: Int> {
    pub state: Configuration<I>,
    pub region: Region,
}

impl<I: Int> BrgConfig<I> {
    pub fn new(state: Configuration<I>, region: Region) -> Self {
        BrgConfig { state, region }
    }

    /// `(s, [s])`.
    pub fn initial(state: Configuration<I>, bound: u32) -> Self {
        let region = state.region(bound);
        BrgConfig { state, region }
    }

    pub fn owner(&self, automaton: &TimedGameAutomaton) -> Owner {
        automaton.owner(self.state.location)
    }

    pub fn is_consistent(&self) -> bool {
        self.state.location == self.region.location && self.region.clock.closure_contains(&self.state.valuation)
    }

    pub fn render(&self, automaton: &TimedGameAutomaton) -> String {
        format!(
            "{} | {} | {}",
            automaton.locations[self.state.location].name,
            self.state.valuation.render(&automaton.clocks),
            self.region.clock.render(&automaton.clocks)
        )
    }
}

/// `(b, c)`: wait until clock `c` reads `b` (or not at all if it is past `b`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Witness {
    pub b: i64,
    pub clock: ClockId,
}

impl Witness {
    /// `t(s, α)`: `b - s(c)` if `s(c) <= b`, else 0.
    pub fn delay<I: Int>(&self, s: &Configuration<I>) -> Ratio<I> {
        let t = Ratio::from_integer(int::<I>(self.b)) - s.clock(self.clock);
        if t < Ratio::zero() {
            Ratio::zero()
        } else {
            t
        }
    }
}

/// Which end of the delay interval a move waits for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Inf,
    Sup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryTimes<I: Int> {
    pub inf: (Ratio<I>, Witness),
    pub sup: (Ratio<I>, Witness),
}

impl<I: Int> BoundaryTimes<I> {
    pub fn at(&self, side: Side) -> (Ratio<I>, Witness) {
        match side {
            Side::Inf => self.inf,
            Side::Sup => self.sup,
        }
    }

    pub fn is_point(&self) -> bool {
        self.inf.0 == self.sup.0
    }
}

/// The extreme delays that bring `s` into `clos(target)`, with witnesses.
pub fn boundary_times<I: Int>(s: &Configuration<I>, target: &ClockRegion) -> Result<BoundaryTimes<I>, BrgError> {
    if s.valuation.len() != target.clock_count() || target.clock_count() == 0 {
        return Err(BrgError::NotInFuture);
    }
    let at = |b: i64, c: ClockId| Ratio::from_integer(int::<I>(b)) - s.clock(c);
    let mut lo: Option<(Ratio<I>, Witness)> = None;
    let mut hi: Option<(Ratio<I>, Witness)> = None;
    for c in 0..target.clock_count() {
        let n = target.int_part(c) as i64;
        let upper = if target.class_of(c) == 0 { n } else { n + 1 };
        let (l, h) = (at(n, c), at(upper, c));
        if lo.map_or(true, |(t, _)| l > t) {
            lo = Some((l, Witness { b: n, clock: c }));
        }
        if hi.map_or(true, |(t, _)| h < t) {
            hi = Some((h, Witness { b: upper, clock: c }));
        }
    }
    let (mut lo, hi) = (lo.expect("at least one clock"), hi.expect("at least one clock"));
    if lo.0 < Ratio::zero() {
        lo.0 = Ratio::zero();
    }
    if hi.0 < lo.0 {
        return Err(BrgError::NotInFuture);
    }
    // Fraction-order constraints do not depend on t; checking one endpoint suffices.
    if !target.closure_contains(&s.valuation.shifted(lo.0)) {
        return Err(BrgError::NotInFuture);
    }
    Ok(BoundaryTimes { inf: lo, sup: hi })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMove<I: Int> {
    pub delay: Ratio<I>,
    pub witness: Witness,
    pub side: Side,
    pub via: Region,
    pub action: ActionId,
    pub target: BrgConfig<I>,
}

/// Boundary moves from `q`, ordered by chain position, then action, then delay.
pub fn successors<I: Int>(q: &BrgConfig<I>, automaton: &TimedGameAutomaton) -> Vec<BoundaryMove<I>> {
    let mut moves = Vec::new();
    for via in q.region.future_chain(automaton) {
        for a in 0..automaton.actions.len() {
            let Some(next_region) = via.action_successor(a, automaton) else {
                continue;
            };
            let Ok(times) = boundary_times(&q.state, &via.clock) else {
                debug_assert!(false, "chain region unreachable from its own closure");
                continue;
            };
            let sides: &[Side] = if times.is_point() { &[Side::Inf] } else { &[Side::Inf, Side::Sup] };
            for &side in sides {
                let (delay, witness) = times.at(side);
                let state = automaton
                    .raw_successor(&q.state.shifted(delay), a)
                    .expect("action_successor implies δ is defined");
                let target = BrgConfig::new(state, next_region.clone());
                debug_assert!(target.is_consistent());
                moves.push(BoundaryMove { delay, witness, side, via: via.clone(), action: a, target });
            }
        }
    }
    moves
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrgEdge<I: Int> {
    pub delay: Ratio<I>,
    pub witness: Witness,
    pub side: Side,
    pub via: Region,
    pub action: ActionId,
    pub target: usize,
}

/// The finite graph reachable from one start configuration; vertex 0 is
/// the start, vertices are numbered in BFS order.
#[derive(Debug, Clone)]
pub struct BoundaryRegionGraph<I: Int> {
    vertices: Vec<BrgConfig<I>>,
    edges: Vec<Vec<BrgEdge<I>>>,
    index: HashMap<BrgConfig<I>, usize>,
}

impl<I: Int> BoundaryRegionGraph<I> {
    pub fn initial(&self) -> usize {
        0
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn vertices(&self) -> &[BrgConfig<I>] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &BrgConfig<I> {
        &self.vertices[v]
    }

    pub fn edges(&self, v: usize) -> &[BrgEdge<I>] {
        &self.edges[v]
    }

    pub fn find(&self, q: &BrgConfig<I>) -> Option<usize> {
        self.index.get(q).copied()
    }

    pub fn all_edges(&self) -> impl Iterator<Item = (usize, &BrgEdge<I>)> {
        self.edges.iter().enumerate().flat_map(|(v, es)| es.iter().map(move |e| (v, e)))
    }
}

/// Breadth-first closure of [`successors`] from `(s0, [s0])`.
pub fn explore<I: Int>(
    automaton: &TimedGameAutomaton,
    s0: &Configuration<I>,
    cap: usize,
) -> Result<BoundaryRegionGraph<I>, BrgError> {
    automaton.check_state(s0)?;
    let start = BrgConfig::initial(s0.clone(), automaton.bound);
    let mut g = BoundaryRegionGraph { vertices: vec![start.clone()], edges: Vec::new(), index: HashMap::new() };
    g.index.insert(start, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let moves = successors(&g.vertices[v], automaton);
        let mut out = Vec::with_capacity(moves.len());
        for m in moves {
            let target = match g.index.get(&m.target) {
                Some(&t) => t,
                None => {
                    if g.vertices.len() >= cap {
                        return Err(BrgError::ExplosionGuard { cap });
                    }
                    let t = g.vertices.len();
                    g.vertices.push(m.target.clone());
                    g.index.insert(m.target, t);
                    queue.push_back(t);
                    t
                }
            };
            out.push(BrgEdge { delay: m.delay, witness: m.witness, side: m.side, via: m.via, action: m.action, target });
        }
        if g.edges.len() <= v {
            g.edges.resize_with(v + 1, Vec::new);
        }
        g.edges[v] = out;
    }
    g.edges.resize_with(g.vertices.len(), Vec::new);
    Ok(g)
}

/// A boundary region graph viewed as a mean-payoff game.
#[derive(Debug, Clone)]
pub struct BrgGame<I: Int> {
    pub game: MeanPayoffGame<I>,
    /// Edge weights are delays multiplied by this common denominator.
    pub scale: I,
    /// Game edge id → (vertex, index into that vertex's edge list).
    pub edge_origin: Vec<(usize, usize)>,
}

impl<I: Int> BrgGame<I> {
    pub fn edge_id(&self, vertex: usize, local: usize) -> usize {
        self.game.out_edges(vertex)[local]
    }
}

/// Vertices keep their numbering; weights are `delay · D` with `D` the
/// common denominator of all delays.
pub fn to_mpg<I: Int>(g: &BoundaryRegionGraph<I>, automaton: &TimedGameAutomaton) -> Result<BrgGame<I>, BrgError> {
    let scale = common_denominator(g.all_edges().map(|(_, e)| &e.delay));
    let owners = g.vertices.iter().map(|q| q.owner(automaton)).collect();
    let mut edges = Vec::with_capacity(g.edge_count());
    let mut origin = Vec::with_capacity(g.edge_count());
    for (v, es) in g.edges.iter().enumerate() {
        for (i, e) in es.iter().enumerate() {
            let w = e.delay * Ratio::from_integer(scale);
            debug_assert!(w.is_integer());
            edges.push((v, e.target, w.to_integer()));
            origin.push((v, i));
        }
    }
    let game = MeanPayoffGame::new(owners, edges)?;
    Ok(BrgGame { game, scale, edge_origin: origin })
}

/// From a corner start, every vertex is a corner and every delay a natural number.
pub fn corner_point_view<I: Int>(g: &BoundaryRegionGraph<I>) -> Result<bool, BrgError> {
    if !g.vertex(g.initial()).state.valuation.is_corner() {
        return Err(BrgError::NotCornerStart);
    }
    Ok(g.vertices.iter().all(|q| q.state.valuation.is_corner()) && g.all_edges().all(|(_, e)| e.delay.is_integer()))
}

/// Fractional parts every reachable clock value must come from:
/// `frac(x - y)` for `x, y` ranging over `0` and the start's clock values.
pub fn fractional_offsets<I: Int>(s0: &Configuration<I>) -> Vec<Ratio<I>> {
    let mut base = vec![Ratio::zero()];
    base.extend(s0.valuation.values().iter().copied());
    let mut out: Vec<Ratio<I>> = base
        .iter()
        .flat_map(|x| base.iter().map(move |y| (*x - *y).fract()))
        .map(|f| if f < Ratio::zero() { f + Ratio::from_integer(I::one()) } else { f })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Checks the finiteness certificate: all vertex clock values have
/// fractional parts among [`fractional_offsets`] of the start, and
/// denominators dividing the start's common denominator.
pub fn finiteness_certificate<I: Int>(g: &BoundaryRegionGraph<I>) -> bool {
    let s0 = &g.vertex(g.initial()).state;
    let offsets = fractional_offsets(s0);
    let denom = s0.valuation.denominator();
    g.vertices.iter().all(|q| {
        q.state.valuation.values().iter().all(|v| {
            offsets.binary_search(&v.fract()).is_ok() && (denom % *v.denom()).is_zero()
        })
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BrgJson {
    pub initial: usize,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexJson {
    pub id: usize,
    pub location: String,
    pub owner: Owner,
    #[serde(serialize_with = "serialize_pairs")]
    pub valuation: Vec<(String, String)>,
    pub region: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeJson {
    pub src: usize,
    pub dst: usize,
    pub delay: String,
    pub witness: WitnessJson,
    pub side: Side,
    pub via: String,
    pub action: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessJson {
    pub b: i64,
    pub clock: String,
}

pub(crate) fn serialize_pairs<S: serde::Serializer>(pairs: &[(String, String)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(pairs.iter().map(|(k, v)| (k, v)))
}

pub fn to_json<I: Int>(g: &BoundaryRegionGraph<I>, automaton: &TimedGameAutomaton) -> BrgJson {
    let vertices = g
        .vertices
        .iter()
        .enumerate()
        .map(|(id, q)| VertexJson {
            id,
            location: automaton.locations[q.state.location].name.clone(),
            owner: q.owner(automaton),
            valuation: automaton
                .clocks
                .iter()
                .cloned()
                .zip(q.state.valuation.values().iter().map(render))
                .collect(),
            region: q.region.render(automaton),
        })
        .collect();
    let edges = g
        .all_edges()
        .map(|(src, e)| EdgeJson {
            src,
            dst: e.target,
            delay: render(&e.delay),
            witness: WitnessJson { b: e.witness.b, clock: automaton.clocks[e.witness.clock].clone() },
            side: e.side,
            via: e.via.render(automaton),
            action: automaton.actions[e.action].name.clone(),
        })
        .collect();
    BrgJson { initial: g.initial(), vertices, edges }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot<I: Int>(g: &BoundaryRegionGraph<I>, automaton: &TimedGameAutomaton) -> String {
    let mut out = String::from("digraph brg {\n  rankdir=LR;\n");
    for (v, q) in g.vertices.iter().enumerate() {
        let shape = match q.owner(automaton) {
            Owner::Min => "ellipse",
            Owner::Max => "box",
        };
        let _ = writeln!(out, "  v{v} [shape={shape}, label=\"{}\"];", dot_escape(&q.render(automaton)));
    }
    for (v, e) in g.all_edges() {
        let s = &g.vertices[v].state;
        let label = format!(
            "t={}−{} (={}) via {}, {}",
            e.witness.b,
            automaton.clocks[e.witness.clock],
            render(&e.delay),
            e.via.render(automaton),
            automaton.actions[e.action].name
        );
        let _ = s;
        let _ = writeln!(out, "  v{v} -> v{} [label=\"{}\"];", e.target, dot_escape(&label));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::ClockValuation;
    use crate::fixtures::{ex1, ex2};
    use crate::num::{ratio, rat};

    fn cfg(loc: usize, vals: &[(i64, i64)]) -> Configuration<i64> {
        Configuration::new(loc, ClockValuation::from_values(vals.iter().map(|&(n, d)| ratio(n, d)).collect()))
    }

    fn region(int_part: Vec<u32>, classes: Vec<Vec<usize>>) -> ClockRegion {
        ClockRegion::from_parts(int_part, classes).unwrap()
    }

    #[test]
    fn boundary_time_examples() {
        let s = cfg(0, &[(3, 10)]);
        let t = boundary_times(&s, &region(vec![1], vec![vec![0]])).unwrap();
        assert_eq!(t.inf, (ratio(7, 10), Witness { b: 1, clock: 0 }));
        assert_eq!(t.sup, t.inf);

        let t = boundary_times(&s, &region(vec![0], vec![vec![], vec![0]])).unwrap();
        assert_eq!(t.inf, (rat(0), Witness { b: 0, clock: 0 }));
        assert_eq!(t.sup, (ratio(7, 10), Witness { b: 1, clock: 0 }));
        assert_eq!(t.inf.1.delay(&s), rat(0));

        let s2 = cfg(0, &[(1, 5), (1, 2)]);
        let t = boundary_times(&s2, &region(vec![0, 1], vec![vec![1], vec![0]])).unwrap();
        assert_eq!(t.inf, (ratio(1, 2), Witness { b: 1, clock: 1 }));
        assert!(t.is_point());

        assert_eq!(
            boundary_times(&cfg(0, &[(1, 2)]), &region(vec![0], vec![vec![0]])),
            Err(BrgError::NotInFuture)
        );
    }

    #[test]
    fn successors_ex1() {
        let a = ex1();
        let q = BrgConfig::initial(cfg(0, &[(0, 1)]), 1);
        let moves = successors(&q, &a);
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].delay, rat(1));
        assert_eq!(moves[0].via.clock, region(vec![1], vec![vec![0]]));
        assert_eq!(moves[0].target, q);
    }

    /// Future chain {0},(0,1),{1},(1,2),{2}; `b` is enabled on all of it.
    #[test]
    fn successors_ex2_max() {
        let a = ex2();
        let q = BrgConfig::initial(cfg(1, &[(0, 1)]), 2);
        let moves = successors(&q, &a);
        let delays: Vec<_> = moves.iter().map(|m| m.delay).collect();
        assert_eq!(delays, vec![rat(0), rat(0), rat(1), rat(1), rat(1), rat(2), rat(2)]);
        assert!(moves.iter().all(|m| m.action == 1));
        let thin = moves.iter().filter(|m| m.via.is_thin()).count();
        assert_eq!(thin, 3);
    }

    #[test]
    fn explore_examples() {
        let a = ex1();
        let g = explore(&a, &cfg(0, &[(0, 1)]), DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edges(0).len(), 1);
        assert_eq!(g.edges(0)[0].target, 0);
        assert_eq!(g.edges(0)[0].delay, rat(1));

        let g = explore(&a, &cfg(0, &[(1, 2)]), DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges(0)[0].delay, ratio(1, 2));
        assert_eq!(g.edges(0)[0].target, 1);
        assert_eq!(g.edges(1)[0].target, 1);
        assert!(finiteness_certificate(&g));

        assert_eq!(
            explore(&a, &cfg(0, &[(1, 2)]), 1).unwrap_err(),
            BrgError::ExplosionGuard { cap: 1 }
        );
    }

    #[test]
    fn to_mpg_examples() {
        let a = ex1();
        let g = explore(&a, &cfg(0, &[(0, 1)]), DEFAULT_VERTEX_CAP).unwrap();
        let m = to_mpg(&g, &a).unwrap();
        assert_eq!(m.scale, 1);
        assert_eq!(m.game.vertex_count(), 1);
        assert_eq!(m.game.edge(0).weight, 1);

        let g = explore(&a, &cfg(0, &[(1, 2)]), DEFAULT_VERTEX_CAP).unwrap();
        let m = to_mpg(&g, &a).unwrap();
        assert_eq!(m.scale, 2);
        let mut w: Vec<i64> = (0..m.game.edge_count()).map(|e| m.game.edge(e).weight).collect();
        w.sort();
        assert_eq!(w, vec![1, 2]);

        let b = ex2();
        let g = explore(&b, &cfg(0, &[(0, 1)]), DEFAULT_VERTEX_CAP).unwrap();
        let m = to_mpg(&g, &b).unwrap();
        for v in 0..m.game.vertex_count() {
            for &e in m.game.out_edges(v) {
                let dst = m.game.edge(e).dst;
                assert_ne!(m.game.owner(v), m.game.owner(dst), "EX2 alternates owners");
            }
        }
    }

    #[test]
    fn corner_view_examples() {
        let a = ex1();
        let g = explore(&a, &cfg(0, &[(0, 1)]), DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(corner_point_view(&g), Ok(true));
        let g = explore(&a, &cfg(0, &[(1, 2)]), DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(corner_point_view(&g), Err(BrgError::NotCornerStart));
        let b = ex2();
        let g = explore(&b, &cfg(0, &[(0, 1)]), DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(corner_point_view(&g), Ok(true));
    }

    #[test]
    fn offsets_include_differences() {
        let s0 = cfg(0, &[(1, 5), (1, 2)]);
        let f = fractional_offsets(&s0);
        for x in [rat(0), ratio(1, 5), ratio(1, 2), ratio(4, 5), ratio(3, 10), ratio(7, 10)] {
            assert!(f.contains(&x), "{x}");
        }
    }

    #[test]
    fn json_and_dot_exports() {
        let a = ex1();
        let g = explore(&a, &cfg(0, &[(1, 2)]), DEFAULT_VERTEX_CAP).unwrap();
        let json = serde_json::to_string(&to_json(&g, &a)).unwrap();
        assert!(json.contains("\"valuation\":{\"c\":\"1/2\"}"), "{json}");
        assert!(json.contains("\"delay\":\"1/2\""));
        let dot = to_dot(&g, &a);
        assert!(dot.contains("v0 -> v1"));
        assert!(dot.contains("l | c=1/2 | c∈(0,1) | frac: {c}"));
    }
}
