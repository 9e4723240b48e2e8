//! Value iteration with certified strategy extraction.
//!
//! The solver iterates the finite-horizon Bellman operator and, at doubling
//! checkpoints, reads greedy strategies for both players off the previous
//! iterate. A pair is accepted when the two one-player re-solves coincide:
//! Max's best reply to Min's strategy and Min's best reply to Max's give the
//! same cycle mean everywhere, which pins the values and proves both
//! strategies optimal. If no checkpoint certifies before the horizon
//! `T = 4n³W`, the iterate is rounded exactly to the nearest admissible cycle
//! means and strategies are recovered from the values via energy games.

use num_rational::Ratio;
use num_traits::Signed;
use serde::Serialize;

use super::energy::strategy_from_values;
use super::karp::{karp_mean_cycle, Objective};
use super::{narrow, wide, MeanPayoffGame, MpgError, PositionalStrategy};
use crate::automaton::Owner;
use crate::num::Int;

/// `ν_T`, computed in `i128`.
pub fn value_iteration<I: Int>(game: &MeanPayoffGame<I>, t: u64) -> Vec<i128> {
    let edges = game.wide_edges();
    let mut nu = vec![0i128; game.vertex_count()];
    for _ in 0..t {
        nu = bellman(game, &edges, &nu);
    }
    nu
}

fn bellman<I: Int>(game: &MeanPayoffGame<I>, edges: &[(usize, usize, i128)], prev: &[i128]) -> Vec<i128> {
    (0..game.vertex_count())
        .map(|v| {
            let vals = game.out_edges(v).iter().map(|&e| edges[e].2 + prev[edges[e].1]);
            match game.owner(v) {
                Owner::Min => vals.min(),
                Owner::Max => vals.max(),
            }
            .expect("no dead ends")
        })
        .collect()
}

/// The rational with denominator at most `n` nearest to `x`.
pub fn round_to_cycle_mean<I: Int>(x: Ratio<I>, n: usize) -> Result<Ratio<I>, MpgError> {
    let wide_x = Ratio::new(wide(*x.numer()), wide(*x.denom()));
    round_wide(wide_x, n).map(narrow)
}

fn round_wide(x: Ratio<i128>, n: usize) -> Result<Ratio<i128>, MpgError> {
    let mut best: Option<(Ratio<i128>, Ratio<i128>)> = None;
    let mut tied = false;
    for q in 1..=n.max(1) as i128 {
        let floor = (x * Ratio::from_integer(q)).floor().to_integer();
        for p in [floor, floor + 1] {
            let c = Ratio::new(p, q);
            let d = (c - x).abs();
            match best {
                Some((bd, bc)) if d == bd && c != bc => tied = true,
                Some((bd, _)) if d >= bd => {}
                _ => {
                    best = Some((d, c));
                    tied = false;
                }
            }
        }
    }
    match best {
        Some((_, c)) if !tied => Ok(c),
        _ => Err(MpgError::AmbiguousRounding { x: x.to_string(), n }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    /// Greedy strategies certified at an intermediate horizon.
    Greedy,
    /// Exact rounding at the full horizon, strategies via energy games.
    Rounding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Replaces the rounding horizon `4n³W`.
    pub horizon: Option<u64>,
    /// Bound on Bellman edge relaxations before giving up.
    pub work_budget: u128,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { horizon: None, work_budget: 4_000_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution<I: Int> {
    pub values: Vec<Ratio<I>>,
    pub min_strategy: PositionalStrategy,
    pub max_strategy: PositionalStrategy,
    pub horizon: u64,
    pub method: SolveMethod,
}

pub fn solve<I: Int>(game: &MeanPayoffGame<I>) -> Result<Solution<I>, MpgError> {
    solve_with(game, &SolveOptions::default())
}

pub fn solve_with<I: Int>(game: &MeanPayoffGame<I>, options: &SolveOptions) -> Result<Solution<I>, MpgError> {
    let n = game.vertex_count() as i128;
    let full = 4 * n * n * n * game.max_abs_weight();
    let horizon = options.horizon.map_or(full, |h| h.max(1) as i128).min(u64::MAX as i128) as u64;
    let edges = game.wide_edges();
    let m = game.edge_count().max(1) as u128;

    let mut prev = vec![0i128; game.vertex_count()];
    let mut cur = prev.clone();
    let mut t = 0u64;
    let mut checkpoint = 1u64;
    let mut last_pair: Option<(PositionalStrategy, PositionalStrategy)> = None;
    loop {
        while t < checkpoint {
            if (t as u128 + 1) * m > options.work_budget {
                return Err(MpgError::Budget { horizon: t });
            }
            let next = bellman(game, &edges, &cur);
            prev = std::mem::replace(&mut cur, next);
            t += 1;
        }
        let pair = (greedy(game, &edges, &prev, Owner::Min), greedy(game, &edges, &prev, Owner::Max));
        if last_pair.as_ref() != Some(&pair) {
            if let Some(values) = certify(game, &pair.0, &pair.1) {
                return Ok(Solution {
                    values,
                    min_strategy: pair.0,
                    max_strategy: pair.1,
                    horizon: t,
                    method: SolveMethod::Greedy,
                });
            }
            last_pair = Some(pair);
        }
        if t >= horizon {
            break;
        }
        checkpoint = checkpoint.saturating_mul(2).min(horizon);
    }

    let values = cur
        .iter()
        .map(|&total| round_wide(Ratio::new(total, t as i128), game.vertex_count()))
        .collect::<Result<Vec<_>, _>>()?;
    let min = strategy_from_values(game, &values, Owner::Min).ok_or(MpgError::Uncertified)?;
    let max = strategy_from_values(game, &values, Owner::Max).ok_or(MpgError::Uncertified)?;
    let values: Vec<Ratio<I>> = values.into_iter().map(narrow).collect();
    match certify(game, &min, &max) {
        Some(v) if v == values => {
            Ok(Solution { values, min_strategy: min, max_strategy: max, horizon: t, method: SolveMethod::Rounding })
        }
        _ => Err(MpgError::Uncertified),
    }
}

/// Best edge against `nu`, lowest id on ties.
fn greedy<I: Int>(game: &MeanPayoffGame<I>, edges: &[(usize, usize, i128)], nu: &[i128], player: Owner) -> PositionalStrategy {
    let choice = (0..game.vertex_count())
        .map(|v| {
            (game.owner(v) == player).then(|| {
                let score = |e: usize| edges[e].2 + nu[edges[e].1];
                let mut best = game.out_edges(v)[0];
                for &e in &game.out_edges(v)[1..] {
                    let improves = match player {
                        Owner::Min => score(e) < score(best),
                        Owner::Max => score(e) > score(best),
                    };
                    if improves {
                        best = e;
                    }
                }
                best
            })
        })
        .collect();
    PositionalStrategy::new(game, player, choice).expect("greedy choices are well formed")
}

/// The common value if the two best-response re-solves agree.
fn certify<I: Int>(game: &MeanPayoffGame<I>, min: &PositionalStrategy, max: &PositionalStrategy) -> Option<Vec<Ratio<I>>> {
    let upper = karp_mean_cycle(game, Some(min), Objective::Max);
    let lower = karp_mean_cycle(game, Some(max), Objective::Min);
    (upper == lower).then_some(upper)
}

/// Denominator check for game values: at most the vertex count.
#[cfg(test)]
pub(crate) fn admissible<I: Int>(v: &Ratio<I>, n: usize) -> bool {
    use num_integer::Integer;
    wide(*v.denom()) <= n as i128 && wide(*v.denom()).gcd(&wide(*v.numer())) == 1
}
