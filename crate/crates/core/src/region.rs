//! Clock regions: integer parts plus the ordering of fractional parts.
//!
//! A [`ClockRegion`] is stored canonically as an integer part per clock and
//! an ordered list of fraction classes `[X0, X1, ..., Xm]`. `X0` holds the
//! clocks with zero fractional part (it may be empty); `X1..Xm` are nonempty
//! and ordered by strictly increasing fractional part. Equality and hashing
//! are therefore O(|C|).

use std::fmt::Write as _;

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use crate::automaton::{ActionId, ClockId, ClockValuation, LocationId, Rel, SimpleConstraint, TimedGameAutomaton, Zone};
use crate::num::{floor_i64, int, Int};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClockRegion {
    int_part: Vec<u32>,
    classes: Vec<Vec<ClockId>>,
}

/// The set of values a clock (or clock difference) takes over a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Span {
    Exact(i64),
    /// The open interval `(lo, lo + 1)`.
    Open(i64),
}

impl Span {
    fn satisfies(self, rel: Rel, bound: i64) -> bool {
        match self {
            Span::Exact(v) => rel.holds(&v, &bound),
            Span::Open(lo) => match rel {
                Rel::Lt | Rel::Le => lo + 1 <= bound,
                Rel::Eq => false,
                Rel::Ge | Rel::Gt => lo >= bound,
            },
        }
    }
}

impl ClockRegion {
    /// Builds a region from raw parts, normalising class order and
    /// dropping empty positive classes. Returns `None` if the parts are not
    /// a partition of `0..int_part.len()`.
    pub fn from_parts(int_part: Vec<u32>, classes: Vec<Vec<ClockId>>) -> Option<ClockRegion> {
        let n = int_part.len();
        let mut seen = vec![false; n];
        let mut out: Vec<Vec<ClockId>> = Vec::with_capacity(classes.len().max(1));
        for (i, mut class) in classes.into_iter().enumerate() {
            for &c in &class {
                if c >= n || seen[c] {
                    return None;
                }
                seen[c] = true;
            }
            class.sort_unstable();
            if i == 0 || !class.is_empty() {
                out.push(class);
            }
        }
        if out.is_empty() {
            out.push(Vec::new());
        }
        if seen.iter().all(|s| *s) {
            Some(ClockRegion { int_part, classes: out })
        } else {
            None
        }
    }

    /// `[ν]`: the region containing a valuation.
    pub fn of<I: Int>(valuation: &ClockValuation<I>, _bound: u32) -> ClockRegion {
        let values = valuation.values();
        let int_part: Vec<u32> = values.iter().map(|v| floor_i64(v) as u32).collect();
        let fracs: Vec<Ratio<I>> = values.iter().map(|v| v.fract()).collect();
        let mut distinct: Vec<Ratio<I>> = fracs.iter().copied().filter(|f| !f.is_zero()).collect();
        distinct.sort();
        distinct.dedup();
        let mut classes = vec![Vec::new(); distinct.len() + 1];
        for (c, f) in fracs.iter().enumerate() {
            let idx = if f.is_zero() { 0 } else { 1 + distinct.binary_search(f).expect("present") };
            classes[idx].push(c);
        }
        ClockRegion { int_part, classes }
    }

    pub fn clock_count(&self) -> usize {
        self.int_part.len()
    }

    pub fn int_part(&self, c: ClockId) -> u32 {
        self.int_part[c]
    }

    pub fn int_parts(&self) -> &[u32] {
        &self.int_part
    }

    /// `[X0, X1, ..., Xm]`.
    pub fn classes(&self) -> &[Vec<ClockId>] {
        &self.classes
    }

    pub fn zero_class(&self) -> &[ClockId] {
        &self.classes[0]
    }

    /// Number of positive-fraction classes.
    pub fn positive_classes(&self) -> usize {
        self.classes.len() - 1
    }

    pub fn class_of(&self, c: ClockId) -> usize {
        self.classes
            .iter()
            .position(|cl| cl.contains(&c))
            .expect("every clock lies in some class")
    }

    /// Some clock has zero fractional part.
    pub fn is_thin(&self) -> bool {
        !self.classes[0].is_empty()
    }

    /// All clocks are integral: the region is a single corner.
    pub fn is_corner(&self) -> bool {
        self.classes.len() == 1
    }

    pub fn span(&self, c: ClockId) -> Span {
        let n = self.int_part[c] as i64;
        if self.class_of(c) == 0 {
            Span::Exact(n)
        } else {
            Span::Open(n)
        }
    }

    /// Values of `c - other` over the region.
    pub fn difference_span(&self, c: ClockId, other: ClockId) -> Span {
        let d = self.int_part[c] as i64 - self.int_part[other] as i64;
        let (ic, io) = (self.class_of(c), self.class_of(other));
        match ic.cmp(&io) {
            std::cmp::Ordering::Equal => Span::Exact(d),
            std::cmp::Ordering::Greater => Span::Open(d),
            std::cmp::Ordering::Less => Span::Open(d - 1),
        }
    }

    pub fn satisfies(&self, constraint: &SimpleConstraint) -> bool {
        let span = match constraint.other {
            None => self.span(constraint.clock),
            Some(o) => self.difference_span(constraint.clock, o),
        };
        span.satisfies(constraint.rel, constraint.bound)
    }

    /// Region ⊆ zone (zones with constants ≤ k are unions of regions).
    pub fn zone_test(&self, zone: &Zone) -> bool {
        !zone.unsatisfiable && zone.conjuncts.iter().all(|c| self.satisfies(c))
    }

    pub fn contains<I: Int>(&self, valuation: &ClockValuation<I>) -> bool {
        valuation.len() == self.clock_count() && &ClockRegion::of(valuation, 0) == self
    }

    /// Membership in the topological closure: the region's constraints with
    /// every strict inequality relaxed.
    pub fn closure_contains<I: Int>(&self, valuation: &ClockValuation<I>) -> bool {
        if valuation.len() != self.clock_count() {
            return false;
        }
        let offset = |c: ClockId| valuation.get(c) - Ratio::from_integer(int::<I>(self.int_part[c] as i64));
        let one = Ratio::from_integer(I::one());
        for &c in &self.classes[0] {
            if !offset(c).is_zero() {
                return false;
            }
        }
        let mut previous: Option<Ratio<I>> = None;
        for class in &self.classes[1..] {
            let f = offset(class[0]);
            if f < Ratio::zero() || f > one {
                return false;
            }
            if class[1..].iter().any(|&c| offset(c) != f) {
                return false;
            }
            if let Some(p) = previous {
                if f < p {
                    return false;
                }
            }
            previous = Some(f);
        }
        true
    }

    /// The next region reached by letting time pass, if any.
    pub fn time_successor(&self, bound: u32) -> Option<ClockRegion> {
        if self.classes[0].iter().any(|&c| self.int_part[c] >= bound) {
            return None;
        }
        if self.is_thin() {
            let mut classes = Vec::with_capacity(self.classes.len() + 1);
            classes.push(Vec::new());
            classes.extend(self.classes.iter().cloned());
            Some(ClockRegion { int_part: self.int_part.clone(), classes })
        } else {
            let last = self.classes.len() - 1;
            if last == 0 {
                return None;
            }
            let mut int_part = self.int_part.clone();
            for &c in &self.classes[last] {
                int_part[c] += 1;
            }
            let mut classes = Vec::with_capacity(self.classes.len());
            classes.push(self.classes[last].clone());
            classes.extend(self.classes[1..last].iter().cloned());
            Some(ClockRegion { int_part, classes })
        }
    }

    pub fn reset(&self, clocks: &[ClockId]) -> ClockRegion {
        if clocks.is_empty() {
            return self.clone();
        }
        let mut int_part = self.int_part.clone();
        let mut classes: Vec<Vec<ClockId>> = self
            .classes
            .iter()
            .map(|cl| cl.iter().copied().filter(|c| !clocks.contains(c)).collect())
            .collect();
        for &c in clocks {
            int_part[c] = 0;
            if !classes[0].contains(&c) {
                classes[0].push(c);
            }
        }
        classes[0].sort_unstable();
        let mut out = vec![std::mem::take(&mut classes[0])];
        out.extend(classes.into_iter().skip(1).filter(|cl| !cl.is_empty()));
        ClockRegion { int_part, classes: out }
    }

    /// Deterministic rational points of the region.
    ///
    /// Positive fraction classes get offsets with denominator
    /// `2·(m+1)·|C|`, spaced so the `m` samples are pairwise distinct and
    /// never touch a region boundary. A corner region yields one point.
    pub fn representatives<I: Int>(&self, m: usize) -> Vec<ClockValuation<I>> {
        let r = self.positive_classes();
        let count = if r == 0 { 1 } else { m.max(1) };
        let n = self.clock_count().max(1) as i64;
        let m1 = m.max(1) as i64 + 1;
        let denom = 2 * m1 * n;
        (0..count as i64)
            .map(|j| {
                let mut values = vec![Ratio::zero(); self.clock_count()];
                for (i, class) in self.classes.iter().enumerate() {
                    let frac = if i == 0 {
                        Ratio::zero()
                    } else {
                        Ratio::new(int::<I>(2 * m1 * (i as i64 - 1) + 2 * j + 1), int::<I>(denom))
                    };
                    for &c in class {
                        values[c] = Ratio::from_integer(int::<I>(self.int_part[c] as i64)) + frac;
                    }
                }
                ClockValuation::from_values(values)
            })
            .collect()
    }

    pub fn render(&self, clocks: &[String]) -> String {
        let name = |c: ClockId| clocks.get(c).cloned().unwrap_or_else(|| format!("#{c}"));
        let mut out = String::new();
        for c in 0..self.clock_count() {
            if c > 0 {
                out.push_str(", ");
            }
            let n = self.int_part[c];
            if self.class_of(c) == 0 {
                let _ = write!(out, "{}={n}", name(c));
            } else {
                let _ = write!(out, "{}∈({n},{})", name(c), n + 1);
            }
        }
        out.push_str(" | frac: ");
        if self.classes.len() == 1 {
            out.push('∅');
        } else {
            let parts: Vec<String> = self.classes[1..]
                .iter()
                .map(|cl| format!("{{{}}}", cl.iter().map(|&c| name(c)).collect::<Vec<_>>().join(", ")))
                .collect();
            out.push_str(&parts.join(" < "));
        }
        out
    }
}

/// A location paired with a clock region.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Region {
    pub location: LocationId,
    pub clock: ClockRegion,
}

impl Region {
    pub fn new(location: LocationId, clock: ClockRegion) -> Self {
        Region { location, clock }
    }

    pub fn is_thin(&self) -> bool {
        self.clock.is_thin()
    }

    pub fn zone_test(&self, zone: &Zone) -> bool {
        self.clock.zone_test(zone)
    }

    pub fn in_state_zone(&self, automaton: &TimedGameAutomaton) -> bool {
        self.zone_test(&automaton.locations[self.location].state_zone)
    }

    pub fn time_successor(&self, bound: u32) -> Option<Region> {
        self.clock
            .time_successor(bound)
            .map(|clock| Region { location: self.location, clock })
    }

    /// The maximal chain of time successors that stays inside S.
    pub fn future_chain(&self, automaton: &TimedGameAutomaton) -> Vec<Region> {
        let mut chain = Vec::new();
        if !self.in_state_zone(automaton) {
            return chain;
        }
        let mut current = self.clone();
        loop {
            let next = current.time_successor(automaton.bound);
            chain.push(current);
            match next {
                Some(r) if r.in_state_zone(automaton) => current = r,
                _ => return chain,
            }
        }
    }

    /// `R --a--> R'` at region level.
    pub fn action_successor(&self, a: ActionId, automaton: &TimedGameAutomaton) -> Option<Region> {
        let action = &automaton.actions[a];
        if !self.in_state_zone(automaton) || !self.zone_test(&action.enabled[self.location]) {
            return None;
        }
        let target = Region {
            location: action.delta[self.location]?,
            clock: self.clock.reset(&action.resets),
        };
        target.in_state_zone(automaton).then_some(target)
    }

    pub fn render(&self, automaton: &TimedGameAutomaton) -> String {
        format!(
            "{} | {}",
            automaton.locations[self.location].name,
            self.clock.render(&automaton.clocks)
        )
    }
}

/// Every canonical clock region over `clocks` clocks bounded by `bound`.
pub fn enumerate_regions(clocks: usize, bound: u32) -> Vec<ClockRegion> {
    let mut out = Vec::new();
    let mut int_part = vec![0u32; clocks];
    loop {
        enumerate_orders(&int_part, bound, &mut out);
        // Odometer over integer parts.
        let mut i = 0;
        loop {
            if i == clocks {
                return out;
            }
            if int_part[i] < bound {
                int_part[i] += 1;
                break;
            }
            int_part[i] = 0;
            i += 1;
        }
    }
}

fn enumerate_orders(int_part: &[u32], bound: u32, out: &mut Vec<ClockRegion>) {
    let n = int_part.len();
    // Level 0 is X0; clocks at the bound are forced there. Valid level maps
    // use every level in 1..=max exactly when max is the top level.
    let mut level = vec![0usize; n];
    loop {
        let forced_ok = (0..n).all(|c| int_part[c] < bound || level[c] == 0);
        let top = level.iter().copied().max().unwrap_or(0);
        let contiguous = (1..=top).all(|l| level.contains(&l));
        if forced_ok && contiguous {
            let mut classes = vec![Vec::new(); top + 1];
            for (c, &l) in level.iter().enumerate() {
                classes[l].push(c);
            }
            out.push(ClockRegion { int_part: int_part.to_vec(), classes });
        }
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            if level[i] < n {
                level[i] += 1;
                break;
            }
            level[i] = 0;
            i += 1;
        }
    }
}
