//! Strategy extraction from exact values through energy games.
//!
//! Inside a value class `x = p/q`, the player to be served plays an energy
//! game on the shifted weights `p - q·w` (Min) or `q·w - p` (Max). A finite
//! least progress measure gives a positional strategy that keeps the running
//! sum bounded, hence the limit average on the right side of `x`. Edges the
//! opponent takes out of the class are counted as wins: with correct values
//! they lead to classes that are no worse for the player.

use std::collections::{BTreeMap, VecDeque};

use num_rational::Ratio;

use super::{wide, MeanPayoffGame, PositionalStrategy};
use crate::automaton::Owner;
use crate::num::Int;

/// `None` if some vertex of `player` needs unbounded energy, which means
/// `values` are not the game values.
pub(crate) fn strategy_from_values<I: Int>(
    game: &MeanPayoffGame<I>,
    values: &[Ratio<i128>],
    player: Owner,
) -> Option<PositionalStrategy> {
    let n = game.vertex_count();
    let mut classes: BTreeMap<Ratio<i128>, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        classes.entry(values[v]).or_default().push(v);
    }
    let mut choice = vec![None; n];
    for (x, members) in classes {
        let (p, q) = (*x.numer(), *x.denom());
        let shifted = |e: usize| {
            let w = wide(game.edge(e).weight);
            match player {
                Owner::Min => p - q * w,
                Owner::Max => q * w - p,
            }
        };
        let inside = |e: usize| values[game.edge(e).dst] == x;
        let cap: i128 = members
            .iter()
            .map(|&v| {
                game.out_edges(v)
                    .iter()
                    .filter(|&&e| inside(e))
                    .map(|&e| (-shifted(e)).max(0))
                    .max()
                    .unwrap_or(0)
            })
            .sum();
        // None stands for "infinite energy needed".
        let lift = |f: Option<i128>, e: usize| -> Option<i128> {
            let need = (f? - shifted(e)).max(0);
            (need <= cap).then_some(need)
        };
        let mut f: Vec<Option<i128>> = vec![Some(0); n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &v in &members {
            for &e in game.out_edges(v) {
                if inside(e) {
                    preds[game.edge(e).dst].push(v);
                }
            }
        }
        let better = |a: Option<i128>, b: Option<i128>| match (a, b) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(a), Some(b)) => a < b,
        };
        let measure = |v: usize, f: &[Option<i128>]| -> Option<i128> {
            let mut out = game.out_edges(v).iter().map(|&e| if inside(e) { lift(f[game.edge(e).dst], e) } else { Some(0) });
            if game.owner(v) == player {
                // Own moves stay inside the class.
                game.out_edges(v)
                    .iter()
                    .filter(|&&e| inside(e))
                    .map(|&e| lift(f[game.edge(e).dst], e))
                    .reduce(|a, b| if better(b, a) { b } else { a })
                    .unwrap_or(None)
            } else {
                let first = out.next().expect("no dead ends");
                out.fold(first, |a, b| if better(a, b) { b } else { a })
            }
        };
        let mut queue: VecDeque<usize> = members.iter().copied().collect();
        let mut queued = vec![false; n];
        for &v in &members {
            queued[v] = true;
        }
        while let Some(v) = queue.pop_front() {
            queued[v] = false;
            let m = measure(v, &f);
            if better(f[v], m) {
                f[v] = m;
                for &u in &preds[v] {
                    if !queued[u] {
                        queued[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        for &v in members.iter().filter(|&&v| game.owner(v) == player) {
            let mut pick: Option<(Option<i128>, usize)> = None;
            for &e in game.out_edges(v).iter().filter(|&&e| inside(e)) {
                let c = lift(f[game.edge(e).dst], e);
                if pick.map_or(true, |(b, _)| better(c, b)) {
                    pick = Some((c, e));
                }
            }
            match pick {
                Some((Some(_), e)) => choice[v] = Some(e),
                _ => return None,
            }
        }
    }
    PositionalStrategy::new(game, player, choice).ok()
}
