//! One-player games: the optimal reachable cycle mean per vertex.

use num_rational::Ratio;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use super::{narrow, MeanPayoffGame, PositionalStrategy};
use crate::num::Int;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Min,
    Max,
}

impl Objective {
    fn better<T: Ord>(self, a: T, b: T) -> T {
        match self {
            Objective::Min => a.min(b),
            Objective::Max => a.max(b),
        }
    }
}

/// With `fixed` applied, the remaining player picks freely; returns, per
/// vertex, the best cycle mean it can reach under `objective`.
pub fn karp_mean_cycle<I: Int>(
    game: &MeanPayoffGame<I>,
    fixed: Option<&PositionalStrategy>,
    objective: Objective,
) -> Vec<Ratio<I>> {
    let allowed = fixed.map(|s| s.restrict(game));
    let edges: Vec<_> = game
        .wide_edges()
        .into_iter()
        .enumerate()
        .filter(|(e, _)| allowed.as_ref().map_or(true, |a| a[*e]))
        .map(|(_, e)| e)
        .collect();
    cycle_means(game.vertex_count(), &edges, objective).into_iter().map(narrow).collect()
}

/// Panics if some vertex has no outgoing edge.
pub fn cycle_means(n: usize, edges: &[(usize, usize, i128)], objective: Objective) -> Vec<Ratio<i128>> {
    let mut graph = DiGraph::<(), i128>::with_capacity(n, edges.len());
    for _ in 0..n {
        graph.add_node(());
    }
    for &(u, v, w) in edges {
        graph.add_edge(NodeIndex::new(u), NodeIndex::new(v), w);
    }
    // Components come out sinks first.
    let sccs = tarjan_scc(&graph);
    let mut comp = vec![usize::MAX; n];
    for (i, scc) in sccs.iter().enumerate() {
        for v in scc {
            comp[v.index()] = i;
        }
    }
    let mut internal: Vec<Vec<(usize, usize, i128)>> = vec![Vec::new(); sccs.len()];
    let mut leaving: Vec<Vec<usize>> = vec![Vec::new(); sccs.len()];
    for &(u, v, w) in edges {
        if comp[u] == comp[v] {
            internal[comp[u]].push((u, v, w));
        } else {
            leaving[comp[u]].push(comp[v]);
        }
    }
    let mut comp_value: Vec<Option<Ratio<i128>>> = vec![None; sccs.len()];
    for (i, scc) in sccs.iter().enumerate() {
        let mut best = (!internal[i].is_empty()).then(|| scc_mean(scc, &internal[i], objective));
        for &j in &leaving[i] {
            let v = comp_value[j].expect("successor component solved first");
            best = Some(best.map_or(v, |b| objective.better(b, v)));
        }
        comp_value[i] = Some(best.expect("every vertex has an outgoing edge"));
    }
    (0..n).map(|v| comp_value[comp[v]].expect("all components solved")).collect()
}

/// Karp's characterisation on one strongly connected component, in O(k) memory.
fn scc_mean(vertices: &[NodeIndex], edges: &[(usize, usize, i128)], objective: Objective) -> Ratio<i128> {
    let k = vertices.len();
    let mut local = std::collections::HashMap::with_capacity(k);
    for (i, v) in vertices.iter().enumerate() {
        local.insert(v.index(), i);
    }
    // Maximisation is minimisation of negated weights.
    let sign = match objective {
        Objective::Min => 1,
        Objective::Max => -1,
    };
    let edges: Vec<(usize, usize, i128)> = edges.iter().map(|&(u, v, w)| (local[&u], local[&v], sign * w)).collect();
    let relax = |d: &[Option<i128>]| {
        let mut next = vec![None; k];
        for &(u, v, w) in &edges {
            if let Some(du) = d[u] {
                let cand = du + w;
                if next[v].map_or(true, |x: i128| cand < x) {
                    next[v] = Some(cand);
                }
            }
        }
        next
    };
    let start = || {
        let mut d = vec![None; k];
        d[0] = Some(0);
        d
    };
    let mut d = start();
    for _ in 0..k {
        d = relax(&d);
    }
    let dk = d;
    let mut worst: Vec<Option<Ratio<i128>>> = vec![None; k];
    let mut d = start();
    for j in 0..k {
        for v in 0..k {
            if let (Some(a), Some(b)) = (dk[v], d[v]) {
                let r = Ratio::new(a - b, (k - j) as i128);
                if worst[v].map_or(true, |x| r > x) {
                    worst[v] = Some(r);
                }
            }
        }
        d = relax(&d);
    }
    let mean = worst.into_iter().flatten().min().expect("a strongly connected component with an edge has a cycle");
    mean * Ratio::from_integer(sign)
}
