//! Plays strategies against each other in the closed region semantics.
//!
//! The state is a configuration `s` together with a region `R` whose
//! closure contains it. Strategies are positional on BRG vertices, so the
//! simulation keeps a shadow vertex: the BRG vertex reached by the same
//! sequence of boundary decisions. For exact boundary strategies the
//! concrete state and the shadow coincide whenever the run starts at a
//! vertex; ε-close play and starts elsewhere in a region only share the
//! region-level path.

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use super::{epsilon_delay, BoundaryAction, BoundaryStrategy, EpsilonStrategy, PipelineError, SolvedGame};
use crate::automaton::{Configuration, Owner, Run, TimedAction};
use crate::brg::BrgConfig;
use crate::num::{int, render, Int};
use crate::region::Region;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy<I: Int> {
    Boundary(BoundaryStrategy<I>),
    Epsilon(EpsilonStrategy<I>),
}

impl<I: Int> Strategy<I> {
    pub fn base(&self) -> &BoundaryStrategy<I> {
        match self {
            Strategy::Boundary(b) => b,
            Strategy::Epsilon(e) => &e.base,
        }
    }

    fn delay(&self, s: &Configuration<I>, choice: &BoundaryAction<I>) -> Result<Ratio<I>, PipelineError> {
        match self {
            Strategy::Boundary(_) => Ok(choice.witness.delay(s)),
            Strategy::Epsilon(e) => epsilon_delay(s, &choice.via.clock, choice.side, e.epsilon),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep<I: Int> {
    pub state: Configuration<I>,
    pub region: Region,
    pub delay: Ratio<I>,
    pub action: usize,
    pub next: Configuration<I>,
    pub total_time: Ratio<I>,
    pub running_average: Ratio<I>,
    pub shadow: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace<I: Int> {
    pub initial: Configuration<I>,
    pub steps: Vec<TraceStep<I>>,
}

impl<I: Int> Trace<I> {
    pub fn total_time(&self) -> Ratio<I> {
        self.steps.last().map_or(Ratio::zero(), |s| s.total_time)
    }

    pub fn average(&self) -> Ratio<I> {
        self.steps.last().map_or(Ratio::zero(), |s| s.running_average)
    }

    /// Re-plays the trace in the concrete semantics; fails where the closed
    /// semantics took a boundary point the guards exclude.
    pub fn to_run(&self, solved: &SolvedGame<I>) -> Result<Run<I>, PipelineError> {
        let mut run = Run::new(self.initial.clone());
        for s in &self.steps {
            run.extend(TimedAction { delay: s.delay, action: s.action }, &solved.automaton)?;
        }
        Ok(run)
    }

    pub fn to_json(&self, solved: &SolvedGame<I>) -> TraceJson {
        let a = &solved.automaton;
        let state = |s: &Configuration<I>| StateJson {
            location: a.locations[s.location].name.clone(),
            valuation: a.clocks.iter().cloned().zip(s.valuation.values().iter().map(render)).collect(),
        };
        TraceJson {
            initial: state(&self.initial),
            steps: self
                .steps
                .iter()
                .map(|s| StepJson {
                    state: state(&s.state),
                    delay: render(&s.delay),
                    action: a.actions[s.action].name.clone(),
                    running_average: render(&s.running_average),
                })
                .collect(),
            total_time: render(&self.total_time()),
            average: render(&self.average()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceJson {
    pub initial: StateJson,
    pub steps: Vec<StepJson>,
    pub total_time: String,
    pub average: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StateJson {
    pub location: String,
    #[serde(serialize_with = "crate::brg::serialize_pairs")]
    pub valuation: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepJson {
    pub state: StateJson,
    pub delay: String,
    pub action: String,
    pub running_average: String,
}

/// The BRG vertex standing in for `(s, R)`: the vertex itself if present,
/// else the first vertex with region `R`.
pub(crate) fn shadow_of<I: Int>(solved: &SolvedGame<I>, s: &Configuration<I>, region: &Region) -> Option<usize> {
    solved
        .brg
        .find(&BrgConfig::new(s.clone(), region.clone()))
        .or_else(|| solved.brg.vertices().iter().position(|q| &q.region == region))
}

/// `n` steps of `min` against `max` from `(s0, [s0])`.
pub fn simulate<I: Int>(
    solved: &SolvedGame<I>,
    s0: &Configuration<I>,
    min: &Strategy<I>,
    max: &Strategy<I>,
    steps: usize,
) -> Result<Trace<I>, PipelineError> {
    let region = s0.region(solved.automaton.bound);
    simulate_from(solved, s0, region, min, max, steps)
}

pub(crate) fn simulate_from<I: Int>(
    solved: &SolvedGame<I>,
    s0: &Configuration<I>,
    region: Region,
    min: &Strategy<I>,
    max: &Strategy<I>,
    steps: usize,
) -> Result<Trace<I>, PipelineError> {
    let a = &solved.automaton;
    let undefined = |s: &Configuration<I>, r: &Region| {
        PipelineError::StrategyUndefined(BrgConfig::new(s.clone(), r.clone()).render(a))
    };
    let mut shadow = shadow_of(solved, s0, &region).ok_or_else(|| undefined(s0, &region))?;
    let mut state = s0.clone();
    let mut region = region;
    let mut total = Ratio::zero();
    let mut out = Vec::with_capacity(steps);
    for i in 0..steps {
        let strategy = match a.owner(state.location) {
            Owner::Min => min,
            Owner::Max => max,
        };
        let choice = strategy.base().choice(shadow).ok_or_else(|| undefined(&state, &region))?;
        let t = strategy.delay(&state, choice)?;
        let mid = state.shifted(t);
        if choice.via.location != state.location || !choice.via.clock.closure_contains(&mid.valuation) {
            return Err(undefined(&state, &region));
        }
        let next_region = choice.via.action_successor(choice.action, a).ok_or_else(|| undefined(&state, &region))?;
        let next = a.raw_successor(&mid, choice.action)?;
        total = total + t;
        out.push(TraceStep {
            state: state.clone(),
            region: region.clone(),
            delay: t,
            action: choice.action,
            next: next.clone(),
            total_time: total,
            running_average: total / Ratio::from_integer(int::<I>(i as i64 + 1)),
            shadow,
        });
        shadow = solved.brg.edges(shadow)[choice.edge].target;
        state = next;
        region = next_region;
    }
    Ok(Trace { initial: s0.clone(), steps: out })
}

/// `T0 = k · (prefix + cycle length)` of the lasso the two boundary
/// strategies trace through the BRG from `start`.
pub fn transient_bound<I: Int>(
    solved: &SolvedGame<I>,
    min: &BoundaryStrategy<I>,
    max: &BoundaryStrategy<I>,
    start: usize,
) -> Result<Ratio<I>, PipelineError> {
    let mut seen = vec![false; solved.brg.vertex_count()];
    let mut v = start;
    let mut length = 0i64;
    while !seen[v] {
        seen[v] = true;
        length += 1;
        let owner = solved.brg.vertex(v).owner(&solved.automaton);
        let s = match owner {
            Owner::Min => min,
            Owner::Max => max,
        };
        let choice = s
            .choice(v)
            .ok_or_else(|| PipelineError::StrategyUndefined(solved.brg.vertex(v).render(&solved.automaton)))?;
        v = solved.brg.edges(v)[choice.edge].target;
    }
    Ok(Ratio::from_integer(int::<I>(solved.automaton.bound as i64 * length)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::fixtures::{ex1, ex2};
    use crate::num::{rat, ratio};
    use crate::pipeline::tests::cfg;
    use crate::pipeline::{epsilon_close, extract_boundary_strategy, solve_average_time, PipelineOptions};

    fn optimal(s: &SolvedGame<i64>) -> (Strategy<i64>, Strategy<i64>) {
        (
            Strategy::Boundary(extract_boundary_strategy(s, Owner::Min)),
            Strategy::Boundary(extract_boundary_strategy(s, Owner::Max)),
        )
    }

    #[test]
    fn ex1_average_is_one() {
        let s0 = cfg(0, &[(0, 1)]);
        let s = solve_average_time(&ex1(), &s0, &PipelineOptions::default()).unwrap();
        let (mu, chi) = optimal(&s);
        let trace = simulate(&s, &s0, &mu, &chi, 10).unwrap();
        assert_eq!(trace.average(), rat(1));
        assert_eq!(trace.to_run(&s).unwrap().time(), rat(10));
        let json = serde_json::to_string(&trace.to_json(&s)).unwrap();
        assert!(json.contains("\"running_average\":\"1\""));
    }

    #[test]
    fn ex2_optimal_within_transient() {
        let s0 = cfg(0, &[(0, 1)]);
        let s = solve_average_time(&ex2(), &s0, &PipelineOptions::default()).unwrap();
        let (mu, chi) = optimal(&s);
        let trace = simulate(&s, &s0, &mu, &chi, 100).unwrap();
        let t0 = transient_bound(&s, mu.base(), chi.base(), 0).unwrap();
        assert!((trace.average() - s.value()).abs() <= t0 / 100);
        assert!((trace.average() - rat(1)).abs() <= ratio(1, 50));
    }

    #[test]
    fn ex2_epsilon_min_against_optimal_max() {
        let s0 = cfg(0, &[(0, 1)]);
        let s = solve_average_time(&ex2(), &s0, &PipelineOptions::default()).unwrap();
        let (mu, chi) = optimal(&s);
        let eps = ratio(1, 100);
        let mu_eps = Strategy::Epsilon(epsilon_close(mu.base(), eps).unwrap());
        let n = 1000;
        let trace = simulate(&s, &s0, &mu_eps, &chi, n).unwrap();
        let t0 = transient_bound(&s, mu.base(), chi.base(), 0).unwrap();
        assert!(trace.average() <= s.value() + eps + t0 / n as i64);
        let chi_eps = Strategy::Epsilon(epsilon_close(chi.base(), eps).unwrap());
        let trace = simulate(&s, &s0, &mu, &chi_eps, n).unwrap();
        assert!(trace.average() >= s.value() - eps - t0 / n as i64);
        assert!(trace.to_run(&s).is_ok());
    }

    #[test]
    fn undefined_start() {
        let s0 = cfg(0, &[(0, 1)]);
        let s = solve_average_time(&ex2(), &s0, &PipelineOptions::default()).unwrap();
        let (mu, chi) = optimal(&s);
        let elsewhere = cfg(1, &[(1, 2)]);
        assert!(matches!(simulate(&s, &elsewhere, &mu, &chi, 3), Err(PipelineError::StrategyUndefined(_))));
    }
}
