//! Small reference automata used throughout the tests and the CLI docs.

use crate::automaton::{Action, Location, Owner, Rel, SimpleConstraint, TimedGameAutomaton, Zone};
use crate::countdown::CountdownGame;

/// One Min location `l`, clock `c`, bound 1, action `a` guarded by `c=1`
/// that resets `c` and loops.
pub fn ex1() -> TimedGameAutomaton {
    TimedGameAutomaton {
        clocks: vec!["c".into()],
        bound: 1,
        locations: vec![Location { name: "l".into(), owner: Owner::Min, state_zone: Zone::always() }],
        actions: vec![Action {
            name: "a".into(),
            resets: vec![0],
            enabled: vec![Zone::of(vec![SimpleConstraint::single(0, Rel::Eq, 1)])],
            delta: vec![Some(0)],
        }],
        initial: None,
    }
}

pub fn ex1_with_state_zone(zone: Zone) -> TimedGameAutomaton {
    let mut a = ex1();
    a.locations[0].state_zone = zone;
    a
}

/// Two locations `l_min` (Min) and `l_max` (Max), clock `c`, bound 2.
/// `a` fires from `l_min` under `c<=1`, `b` from `l_max` under `c<=2`; both
/// reset `c` and switch location. Disabled pairs loop in place. `l_min`
/// is restricted to `c<=1` so that every state has a legal move.
pub fn ex2() -> TimedGameAutomaton {
    let le = |n| Zone::of(vec![SimpleConstraint::single(0, Rel::Le, n)]);
    TimedGameAutomaton {
        clocks: vec!["c".into()],
        bound: 2,
        locations: vec![
            Location { name: "l_min".into(), owner: Owner::Min, state_zone: le(1) },
            Location { name: "l_max".into(), owner: Owner::Max, state_zone: Zone::always() },
        ],
        actions: vec![
            Action { name: "a".into(), resets: vec![0], enabled: vec![le(1), Zone::never()], delta: vec![Some(1), Some(1)] },
            Action { name: "b".into(), resets: vec![0], enabled: vec![Zone::never(), le(2)], delta: vec![Some(0), Some(0)] },
        ],
        initial: None,
    }
}

/// Two nodes `u`, `v` with moves `u→v` and `v→u` of duration 2.
pub fn countdown_two_cycle(budget: u32) -> CountdownGame {
    CountdownGame::new(
        vec!["u".into(), "v".into()],
        vec![(0, 1, 2), (1, 0, 2)],
        0,
        budget,
    )
    .expect("well-formed fixture")
}
