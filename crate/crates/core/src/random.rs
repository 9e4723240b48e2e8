//! Seeded generators for test instances. The same seed always yields the
//! same instance.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{Action, ClockValuation, Configuration, Location, Owner, Rel, SimpleConstraint, TimedGameAutomaton, Zone};
use crate::countdown::CountdownGame;
use crate::mpg::MeanPayoffGame;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn owner(r: &mut ChaCha8Rng) -> Owner {
    if r.gen_bool(0.5) {
        Owner::Min
    } else {
        Owner::Max
    }
}

/// At most `max_vertices` vertices and `max_edges` edges (at least one edge
/// per vertex), weights in `0..=max_weight`.
pub fn mean_payoff_game(seed: u64, max_vertices: usize, max_edges: usize, max_weight: i64) -> MeanPayoffGame<i64> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_vertices.max(1));
    let m = r.gen_range(n..=max_edges.max(n));
    let owners = (0..n).map(|_| owner(&mut r)).collect();
    let edges = (0..m)
        .map(|i| {
            let src = if i < n { i } else { r.gen_range(0..n) };
            (src, r.gen_range(0..n), r.gen_range(0..=max_weight))
        })
        .collect();
    MeanPayoffGame::new(owners, edges).expect("every vertex has an edge")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AutomatonParams {
    pub max_clocks: usize,
    pub max_bound: u32,
    pub max_locations: usize,
    pub max_actions: usize,
}

impl Default for AutomatonParams {
    fn default() -> Self {
        AutomatonParams { max_clocks: 2, max_bound: 2, max_locations: 4, max_actions: 3 }
    }
}

fn constraint(r: &mut ChaCha8Rng, clocks: usize, bound: u32) -> SimpleConstraint {
    let rels = [Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt];
    let rel = *rels.choose(r).expect("nonempty");
    let c = r.gen_range(0..clocks);
    let k = r.gen_range(0..=bound as i64);
    if clocks > 1 && r.gen_bool(0.2) {
        let mut o = r.gen_range(0..clocks - 1);
        if o >= c {
            o += 1;
        }
        SimpleConstraint::difference(c, o, rel, k)
    } else {
        SimpleConstraint::single(c, rel, k)
    }
}

fn guard(r: &mut ChaCha8Rng, clocks: usize, bound: u32) -> Zone {
    let n = r.gen_range(0..=2);
    Zone::of((0..n).map(|_| constraint(r, clocks, bound)).collect())
}

/// State zones that contain the origin (upper bounds only).
fn state_zone(r: &mut ChaCha8Rng, clocks: usize, bound: u32) -> Zone {
    if r.gen_bool(0.6) {
        return Zone::always();
    }
    let c = r.gen_range(0..clocks);
    let rel = if r.gen_bool(0.5) { Rel::Le } else { Rel::Lt };
    Zone::of(vec![SimpleConstraint::single(c, rel, r.gen_range(1..=bound as i64))])
}

fn candidate(r: &mut ChaCha8Rng, p: &AutomatonParams) -> TimedGameAutomaton {
    let clocks = r.gen_range(1..=p.max_clocks.max(1));
    let bound = r.gen_range(1..=p.max_bound.max(1));
    let n = r.gen_range(1..=p.max_locations.max(1));
    let locations = (0..n)
        .map(|i| Location {
            name: format!("l{i}"),
            owner: owner(r),
            state_zone: if i == 0 { Zone::always() } else { state_zone(r, clocks, bound) },
        })
        .collect();
    let mut actions = Vec::new();
    for i in 0..r.gen_range(1..=p.max_actions.max(1)) {
        let resets = (0..clocks).filter(|_| r.gen_bool(0.5)).collect();
        let enabled = (0..n)
            .map(|_| if r.gen_bool(0.25) { Zone::never() } else { guard(r, clocks, bound) })
            .collect();
        let delta = (0..n).map(|_| Some(r.gen_range(0..n))).collect();
        actions.push(Action { name: format!("a{i}"), resets, enabled, delta });
    }
    // A full reset, sometimes guarded by `x0>=1`, keeps most candidates
    // free of stuck regions.
    let tick_guard = if r.gen_bool(0.5) {
        Zone::always()
    } else {
        Zone::of(vec![SimpleConstraint::single(0, Rel::Ge, 1)])
    };
    actions.push(Action {
        name: "tick".into(),
        resets: (0..clocks).collect(),
        enabled: vec![tick_guard; n],
        delta: (0..n).map(|_| Some(r.gen_range(0..n))).collect(),
    });
    TimedGameAutomaton {
        clocks: (0..clocks).map(|c| format!("x{c}")).collect(),
        bound,
        locations,
        actions,
        initial: Some(Configuration::new(0, ClockValuation::zero(clocks))),
    }
}

/// A valid automaton with initial state `(l0, 0)`; candidates failing
/// validation are redrawn from the same stream.
pub fn automaton(seed: u64, params: &AutomatonParams) -> TimedGameAutomaton {
    let mut r = rng(seed);
    loop {
        let a = candidate(&mut r, params);
        if a.validate().is_valid() {
            return a;
        }
    }
}

/// At most `max_nodes` nodes, durations in `1..=3`, budget in `1..=max_budget`.
pub fn countdown_game(seed: u64, max_nodes: usize, max_budget: u32) -> CountdownGame {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_nodes.max(1));
    let mut moves = Vec::new();
    for from in 0..n {
        let mut targets: Vec<usize> = (0..n).collect();
        targets.shuffle(&mut r);
        for &to in targets.iter().take(r.gen_range(0..=2)) {
            moves.push((from, to, r.gen_range(1..=3)));
        }
    }
    let budget = r.gen_range(1..=max_budget.max(1));
    CountdownGame::new((0..n).map(|i| format!("n{i}")).collect(), moves, 0, budget).expect("well-formed by construction")
}
