//! Average-time games on bounded timed automata, solved exactly through the
//! boundary region graph and finite mean-payoff games.
//!
//! All numeric structures are generic over a primitive signed integer
//! backing [`num_rational::Ratio`]; the aliases below fix it to `i64`.

pub mod automaton;
pub mod brg;
pub mod countdown;
pub mod fixtures;
pub mod mpg;
pub mod num;
pub mod pipeline;
pub mod random;
pub mod region;

pub use automaton::{Owner, TimedGameAutomaton};
pub use num::Int;

pub type Rational = num_rational::Ratio<i64>;
pub type Valuation = automaton::ClockValuation<i64>;
pub type Config = automaton::Configuration<i64>;
pub type Brg = brg::BoundaryRegionGraph<i64>;
pub type Game = mpg::MeanPayoffGame<i64>;
pub type Solved = pipeline::SolvedGame<i64>;
