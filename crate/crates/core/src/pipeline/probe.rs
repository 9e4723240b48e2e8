//! Region-level probes: value constancy and simple total-time functions.

use std::collections::{HashMap, HashSet, VecDeque};

use num_rational::Ratio;
use serde::Serialize;

use super::simulate::{simulate_from, Strategy};
use super::{solve_average_time, BoundaryStrategy, PipelineError, PipelineOptions, SolvedGame};
use crate::automaton::{ClockId, Configuration, TimedGameAutomaton};
use crate::num::{floor_i64, int, Int};
use crate::region::Region;

/// `e` or `e - s(c)` on a region's closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SimpleFunction {
    pub e: i64,
    pub clock: Option<ClockId>,
}

impl SimpleFunction {
    pub fn eval<I: Int>(&self, s: &Configuration<I>) -> Ratio<I> {
        let e = Ratio::from_integer(int::<I>(self.e));
        match self.clock {
            None => e,
            Some(c) => e - s.clock(c),
        }
    }

    pub fn render(&self, clocks: &[String]) -> String {
        match self.clock {
            None => self.e.to_string(),
            Some(c) => format!("{} - {}", self.e, clocks[c]),
        }
    }
}

/// Every region the region graph visits from `[s0]`, including the
/// intermediate regions time passes through, in discovery order.
pub fn reachable_regions<I: Int>(automaton: &TimedGameAutomaton, s0: &Configuration<I>) -> Vec<Region> {
    let start = s0.region(automaton.bound);
    let mut seen: HashSet<Region> = HashSet::from([start.clone()]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(r) = queue.pop_front() {
        for later in r.future_chain(automaton) {
            let mut next: Vec<Region> = vec![later.clone()];
            next.extend((0..automaton.actions.len()).filter_map(|a| later.action_successor(a, automaton)));
            for n in next {
                if seen.insert(n.clone()) {
                    order.push(n.clone());
                    queue.push_back(n);
                }
            }
        }
    }
    order
}

/// Values from `m` sampled states of `region`.
pub fn regional_constancy_probe<I: Int>(
    automaton: &TimedGameAutomaton,
    region: &Region,
    m: usize,
    options: &PipelineOptions,
) -> Result<Vec<Ratio<I>>, PipelineError> {
    if !region.in_state_zone(automaton) {
        return Err(PipelineError::RegionOutsideS);
    }
    region
        .clock
        .representatives::<I>(m)
        .into_iter()
        .map(|v| Ok(solve_average_time(automaton, &Configuration::new(region.location, v), options)?.value()))
        .collect()
}

/// Fits the `n`-step total time from `m` sampled states of `region`, played
/// with exact boundary strategies, to a [`SimpleFunction`].
pub fn simple_time_probe<I: Int>(
    solved: &SolvedGame<I>,
    min: &BoundaryStrategy<I>,
    max: &BoundaryStrategy<I>,
    region: &Region,
    n: usize,
    m: usize,
) -> Result<SimpleFunction, PipelineError> {
    let (min, max) = (Strategy::Boundary(min.clone()), Strategy::Boundary(max.clone()));
    let samples: Vec<Configuration<I>> = region
        .clock
        .representatives::<I>(m)
        .into_iter()
        .map(|v| Configuration::new(region.location, v))
        .collect();
    let totals = samples
        .iter()
        .map(|s| Ok(simulate_from(solved, s, region.clone(), &min, &max, n)?.total_time()))
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let fit = |shift: &dyn Fn(&Configuration<I>) -> Ratio<I>| -> Option<i64> {
        let e = totals[0] + shift(&samples[0]);
        let same = samples.iter().zip(&totals).all(|(s, t)| *t + shift(s) == e);
        (same && e.is_integer()).then(|| floor_i64(&e))
    };
    if let Some(e) = fit(&|_| Ratio::from_integer(I::zero())) {
        return Ok(SimpleFunction { e, clock: None });
    }
    for c in 0..solved.automaton.clocks.len() {
        if let Some(e) = fit(&|s| s.clock(c)) {
            return Ok(SimpleFunction { e, clock: Some(c) });
        }
    }
    let listed: Vec<String> = totals.iter().map(|t| t.to_string()).collect();
    Err(PipelineError::NotSimple(format!("{} totals [{}]", region.render(&solved.automaton), listed.join(", "))))
}

/// Whether the strategy picks the same boundary timed action at every
/// vertex sharing a region.
pub fn uniformity<I: Int>(solved: &SolvedGame<I>, strategy: &BoundaryStrategy<I>) -> bool {
    let mut by_region: HashMap<&Region, (crate::brg::Witness, &Region, usize)> = HashMap::new();
    for (v, c) in strategy.choices().iter().enumerate() {
        let Some(c) = c else { continue };
        let key = (c.witness, &c.via, c.action);
        match by_region.get(&solved.brg.vertex(v).region) {
            Some(prev) if *prev != key => return false,
            Some(_) => {}
            None => {
                by_region.insert(&solved.brg.vertex(v).region, key);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{ClockValuation, Owner};
    use crate::fixtures::{ex1, ex2};
    use crate::num::rat;
    use crate::pipeline::extract_boundary_strategy;
    use crate::region::ClockRegion;

    fn region(loc: usize, int_part: Vec<u32>, classes: Vec<Vec<usize>>) -> Region {
        Region::new(loc, ClockRegion::from_parts(int_part, classes).unwrap())
    }

    #[test]
    fn constancy_examples() {
        let o = PipelineOptions::default();
        let open = region(0, vec![0], vec![vec![], vec![0]]);
        assert_eq!(regional_constancy_probe::<i64>(&ex1(), &open, 3, &o).unwrap(), vec![rat(1); 3]);
        let values = regional_constancy_probe::<i64>(&ex2(), &open, 3, &o).unwrap();
        assert_eq!(values.len(), 3);
        assert!(values.iter().all(|v| *v == values[0]));
        let point = region(0, vec![0], vec![vec![0]]);
        assert_eq!(regional_constancy_probe::<i64>(&ex1(), &point, 3, &o).unwrap().len(), 1);
    }

    #[test]
    fn simple_time_examples() {
        let o = PipelineOptions::default();
        let a = ex1();
        let open = region(0, vec![0], vec![vec![], vec![0]]);
        let rep = &open.clock.representatives::<i64>(3)[0];
        let s = solve_average_time(&a, &Configuration::new(0, rep.clone()), &o).unwrap();
        let (mu, chi) = (extract_boundary_strategy(&s, Owner::Min), extract_boundary_strategy(&s, Owner::Max));
        assert_eq!(simple_time_probe(&s, &mu, &chi, &open, 3, 3).unwrap(), SimpleFunction { e: 3, clock: Some(0) });

        let point = region(0, vec![0], vec![vec![0]]);
        let s = solve_average_time(&a, &Configuration::new(0, ClockValuation::<i64>::zero(1)), &o).unwrap();
        let (mu, chi) = (extract_boundary_strategy(&s, Owner::Min), extract_boundary_strategy(&s, Owner::Max));
        assert_eq!(simple_time_probe(&s, &mu, &chi, &point, 3, 3).unwrap(), SimpleFunction { e: 3, clock: None });

        let b = ex2();
        let min_open = region(0, vec![0], vec![vec![], vec![0]]);
        let rep = &min_open.clock.representatives::<i64>(3)[0];
        let s = solve_average_time(&b, &Configuration::new(0, rep.clone()), &o).unwrap();
        let (mu, chi) = (extract_boundary_strategy(&s, Owner::Min), extract_boundary_strategy(&s, Owner::Max));
        assert!(simple_time_probe(&s, &mu, &chi, &min_open, 2, 3).is_ok());
    }

    #[test]
    fn reachable_regions_ex2() {
        let s0 = Configuration::new(0, ClockValuation::<i64>::zero(1));
        let regions = reachable_regions(&ex2(), &s0);
        // l_min: {0},(0,1),{1}; l_max: {0},(0,1),{1},(1,2),{2}
        assert_eq!(regions.len(), 8);
        assert_eq!(regions[0], s0.region(2));
    }
}
