//! Exhaustive solver over positional strategy pairs. Exponential; meant as
//! an oracle on small games.

use num_rational::Ratio;

use super::{narrow, wide, MeanPayoffGame, MpgError};
use crate::automaton::Owner;
use crate::num::Int;

pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

/// `min_μ max_χ` of the cycle mean the pair's play reaches, per vertex.
pub fn brute_force_solve<I: Int>(game: &MeanPayoffGame<I>, limit: u128) -> Result<Vec<Ratio<I>>, MpgError> {
    let n = game.vertex_count();
    let of = |p: Owner| (0..n).filter(|&v| game.owner(v) == p).collect::<Vec<_>>();
    let (mins, maxs) = (of(Owner::Min), of(Owner::Max));
    let count = |vs: &[usize]| {
        vs.iter()
            .fold(1u128, |acc, &v| acc.saturating_mul(game.out_edges(v).len() as u128))
    };
    let pairs = count(&mins).saturating_mul(count(&maxs));
    if pairs > limit {
        return Err(MpgError::TooLarge { pairs, limit });
    }
    let weights: Vec<i128> = game.edges().iter().map(|e| wide(e.weight)).collect();
    let mut next = vec![0usize; n];
    let mut best: Vec<Option<Ratio<i128>>> = vec![None; n];
    let mut min_pick = vec![0usize; mins.len()];
    loop {
        for (i, &v) in mins.iter().enumerate() {
            next[v] = game.out_edges(v)[min_pick[i]];
        }
        let mut worst: Vec<Option<Ratio<i128>>> = vec![None; n];
        let mut max_pick = vec![0usize; maxs.len()];
        loop {
            for (i, &v) in maxs.iter().enumerate() {
                next[v] = game.out_edges(v)[max_pick[i]];
            }
            for (v, slot) in worst.iter_mut().enumerate() {
                let m = play_mean(v, &next, game, &weights);
                if slot.map_or(true, |w| m > w) {
                    *slot = Some(m);
                }
            }
            if !advance(&mut max_pick, &maxs, game) {
                break;
            }
        }
        for (b, w) in best.iter_mut().zip(worst) {
            let w = w.expect("at least one Max strategy");
            if b.map_or(true, |b| w < b) {
                *b = Some(w);
            }
        }
        if !advance(&mut min_pick, &mins, game) {
            break;
        }
    }
    Ok(best.into_iter().map(|b| narrow(b.expect("at least one Min strategy"))).collect())
}

/// Odometer step; false once every combination was visited.
fn advance<I: Int>(pick: &mut [usize], vertices: &[usize], game: &MeanPayoffGame<I>) -> bool {
    for (i, &v) in vertices.iter().enumerate() {
        pick[i] += 1;
        if pick[i] < game.out_edges(v).len() {
            return true;
        }
        pick[i] = 0;
    }
    false
}

/// Mean of the cycle the play from `v` ends in when every vertex uses `next`.
fn play_mean<I: Int>(v: usize, next: &[usize], game: &MeanPayoffGame<I>, weights: &[i128]) -> Ratio<i128> {
    let mut seen = vec![usize::MAX; next.len()];
    let mut path = Vec::new();
    let mut u = v;
    while seen[u] == usize::MAX {
        seen[u] = path.len();
        path.push(next[u]);
        u = game.edge(next[u]).dst;
    }
    let cycle = &path[seen[u]..];
    let total: i128 = cycle.iter().map(|&e| weights[e]).sum();
    Ratio::new(total, cycle.len() as i128)
}
