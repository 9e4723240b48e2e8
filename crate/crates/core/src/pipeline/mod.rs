//! Average-time games end to end: boundary region graph, mean-payoff
//! solution, and the strategies read back onto the automaton.

mod probe;
mod simulate;

pub use probe::{reachable_regions, regional_constancy_probe, simple_time_probe, uniformity, SimpleFunction};
pub use simulate::{simulate, transient_bound, StateJson, StepJson, Strategy, Trace, TraceJson, TraceStep};

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use crate::automaton::{ActionId, Configuration, Owner, SemanticsError, TimedGameAutomaton};
use crate::brg::{boundary_times, explore, to_mpg, BoundaryRegionGraph, BrgError, BrgGame, Side, Witness, DEFAULT_VERTEX_CAP};
use crate::mpg::{self, MpgError, PositionalStrategy, SolveOptions};
use crate::num::{render, Int};
use crate::region::{ClockRegion, Region};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid automaton:\n{0}")]
    Invalid(String),
    #[error("start state: {0}")]
    State(#[from] SemanticsError),
    #[error(transparent)]
    Brg(#[from] BrgError),
    #[error(transparent)]
    Mpg(#[from] MpgError),
    #[error("strategy undefined at {0}")]
    StrategyUndefined(String),
    #[error("no admissible delay into {0}")]
    EmptyWindow(String),
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("region has no legal move")]
    RegionOutsideS,
    #[error("total time is not a simple function of the start state: {0}")]
    NotSimple(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub cap: usize,
    pub solve: SolveOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { cap: DEFAULT_VERTEX_CAP, solve: SolveOptions::default() }
    }
}

/// A solved game from one start configuration.
#[derive(Debug, Clone)]
pub struct SolvedGame<I: Int> {
    pub automaton: TimedGameAutomaton,
    pub initial: Configuration<I>,
    pub brg: BoundaryRegionGraph<I>,
    pub game: BrgGame<I>,
    /// Per BRG vertex, in time units.
    pub values: Vec<Ratio<I>>,
    pub min_strategy: PositionalStrategy,
    pub max_strategy: PositionalStrategy,
}

impl<I: Int> SolvedGame<I> {
    pub fn value(&self) -> Ratio<I> {
        self.values[self.brg.initial()]
    }

    /// Values in mean-payoff units (before dividing by the scale).
    pub fn game_values(&self) -> Vec<Ratio<I>> {
        self.values.iter().map(|v| *v * Ratio::from_integer(self.game.scale)).collect()
    }

    pub fn verify(&self) -> bool {
        mpg::verify(&self.game.game, &self.game_values(), &self.min_strategy, &self.max_strategy)
    }

    pub fn strategy(&self, player: Owner) -> &PositionalStrategy {
        match player {
            Owner::Min => &self.min_strategy,
            Owner::Max => &self.max_strategy,
        }
    }
}

pub fn solve_average_time<I: Int>(
    automaton: &TimedGameAutomaton,
    s0: &Configuration<I>,
    options: &PipelineOptions,
) -> Result<SolvedGame<I>, PipelineError> {
    let report = automaton.validate();
    if !report.is_valid() {
        return Err(PipelineError::Invalid(report.to_string()));
    }
    automaton.check_state(s0)?;
    let brg = explore(automaton, s0, options.cap)?;
    let game = to_mpg(&brg, automaton)?;
    let solution = mpg::solve_with(&game.game, &options.solve)?;
    let scale = Ratio::from_integer(game.scale);
    let values = solution.values.iter().map(|v| *v / scale).collect();
    Ok(SolvedGame {
        automaton: automaton.clone(),
        initial: s0.clone(),
        brg,
        game,
        values,
        min_strategy: solution.min_strategy,
        max_strategy: solution.max_strategy,
    })
}

/// `val(s0) ≤ bound`.
pub fn decide<I: Int>(
    automaton: &TimedGameAutomaton,
    s0: &Configuration<I>,
    bound: Ratio<I>,
    options: &PipelineOptions,
) -> Result<bool, PipelineError> {
    Ok(solve_average_time(automaton, s0, options)?.value() <= bound)
}

/// "Wait until `c` reads `b` (at the chosen end of the window into `via`),
/// then fire `action`."
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryAction<I: Int> {
    /// Index into the vertex's edge list.
    pub edge: usize,
    pub witness: Witness,
    pub via: Region,
    pub action: ActionId,
    pub side: Side,
    /// Delay from the vertex's own configuration.
    pub delay: Ratio<I>,
}

/// A positional strategy on BRG vertices in boundary timed action form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryStrategy<I: Int> {
    pub player: Owner,
    choices: Vec<Option<BoundaryAction<I>>>,
}

impl<I: Int> BoundaryStrategy<I> {
    pub fn choice(&self, vertex: usize) -> Option<&BoundaryAction<I>> {
        self.choices.get(vertex).and_then(Option::as_ref)
    }

    pub fn choices(&self) -> &[Option<BoundaryAction<I>>] {
        &self.choices
    }
}

pub fn extract_boundary_strategy<I: Int>(solved: &SolvedGame<I>, player: Owner) -> BoundaryStrategy<I> {
    let strategy = solved.strategy(player);
    let choices = (0..solved.brg.vertex_count())
        .map(|v| {
            let e = strategy.choice(v)?;
            let (src, local) = solved.game.edge_origin[e];
            debug_assert_eq!(src, v);
            let edge = &solved.brg.edges(v)[local];
            Some(BoundaryAction {
                edge: local,
                witness: edge.witness,
                via: edge.via.clone(),
                action: edge.action,
                side: edge.side,
                delay: edge.delay,
            })
        })
        .collect();
    BoundaryStrategy { player, choices }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonStrategy<I: Int> {
    pub base: BoundaryStrategy<I>,
    pub epsilon: Ratio<I>,
}

pub fn epsilon_close<I: Int>(strategy: &BoundaryStrategy<I>, epsilon: Ratio<I>) -> Result<EpsilonStrategy<I>, PipelineError> {
    if epsilon <= Ratio::zero() {
        return Err(PipelineError::NonPositiveEpsilon);
    }
    Ok(EpsilonStrategy { base: strategy.clone(), epsilon })
}

/// The concrete delay an ε-close strategy plays from `s` towards `via`.
///
/// If the chosen boundary point already lies in `via` (thin target), it is
/// played exactly. Otherwise the delay moves `δ = min(ε, width)/2` inside the
/// window `[t_lo, t_hi]`: up from `t_lo` or down from `t_hi`.
pub fn epsilon_delay<I: Int>(
    s: &Configuration<I>,
    via: &ClockRegion,
    side: Side,
    epsilon: Ratio<I>,
) -> Result<Ratio<I>, PipelineError> {
    let empty = || PipelineError::EmptyWindow(format!("{via:?}"));
    let times = boundary_times(s, via).map_err(|_| empty())?;
    let (t, _) = times.at(side);
    if via.contains(&s.valuation.shifted(t)) {
        return Ok(t);
    }
    let width = times.sup.0 - times.inf.0;
    if width.is_zero() {
        return Err(empty());
    }
    let two = Ratio::from_integer(I::one() + I::one());
    let delta = epsilon.min(width) / two;
    let t = match side {
        Side::Inf => times.inf.0 + delta,
        Side::Sup => times.sup.0 - delta,
    };
    if via.contains(&s.valuation.shifted(t)) {
        Ok(t)
    } else {
        Err(empty())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StrategyEntry {
    pub vertex: usize,
    pub state: String,
    pub b: i64,
    pub clock: String,
    pub action: String,
    pub via_region: String,
    pub side: Side,
    pub delay: String,
}

pub fn strategy_json<I: Int>(solved: &SolvedGame<I>, strategy: &BoundaryStrategy<I>) -> Vec<StrategyEntry> {
    let a = &solved.automaton;
    strategy
        .choices
        .iter()
        .enumerate()
        .filter_map(|(v, c)| {
            let c = c.as_ref()?;
            Some(StrategyEntry {
                vertex: v,
                state: solved.brg.vertex(v).render(a),
                b: c.witness.b,
                clock: a.clocks[c.witness.clock].clone(),
                action: a.actions[c.action].name.clone(),
                via_region: c.via.render(a),
                side: c.side,
                delay: render(&c.delay),
            })
        })
        .collect()
}
