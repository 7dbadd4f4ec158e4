//! Timed distributed asynchronous automata.
//!
//! Every event carries an earliest and latest firing time. A time state pairs
//! an automaton state with one clock per event: enabled events have a running
//! clock, disabled ones carry the [`ClockValue::Disabled`] sentinel. Firing
//! an event keeps the clocks of events independent from it (at the source
//! state) and resets the others; letting time pass advances every running
//! clock but may not push any of them past its latest firing time.
//!
//! Minimum and maximum times to reach a state are computed exactly: every
//! run up to a depth bound is turned into a system of difference constraints
//! over its firing instants and solved by all-pairs shortest paths.
//! [`TimedAutomaton::oracle_time_bounds`] computes the same quantities by
//! brute-force exploration on a time grid and serves as an independent check.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::automaton::DistributedAutomaton;
use crate::ident::{EventId, StateId};
use crate::time::{Time, UpperBound};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimedError {
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("unknown event {0}")]
    UnknownEvent(String),
    #[error("no time bounds for event {0}")]
    MissingBounds(EventId),
    #[error("time bounds given twice for event {0}")]
    DuplicateBounds(EventId),
    #[error("invalid bounds for {event}: eft {eft} must satisfy 0 <= eft <= lft {lft}")]
    InvalidBounds {
        event: EventId,
        eft: Time,
        lft: UpperBound,
    },
    #[error("time state does not match the automaton")]
    MalformedState,
    #[error("event {0} is not enabled")]
    NotFirable(EventId),
    #[error("event {event} fired too early: clock {clock} < eft {eft}")]
    TooEarly {
        event: EventId,
        clock: Time,
        eft: Time,
    },
    #[error("negative delay {0}")]
    NegativeDelay(Time),
    #[error("deadline exceeded for {event}: clock {clock} + delay {delay} > lft {lft}")]
    DeadlineExceeded {
        event: EventId,
        clock: Time,
        delay: Time,
        lft: Time,
    },
    #[error("run is not executable at position {position}")]
    InvalidRun { position: usize },
    #[error("grid step must be positive, got {0}")]
    InvalidStep(Time),
    #[error("time bound {value} is not a multiple of the grid step {step}")]
    GridMismatch { value: Time, step: Time },
}

/// Earliest/latest firing times per event, keyed by event name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TimeBounds {
    entries: Vec<(String, Time, UpperBound)>,
}

impl TimeBounds {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, event: impl Into<String>, eft: Time, lft: UpperBound) -> &mut Self {
        self.entries.push((event.into(), eft, lft));
        self
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, Time, UpperBound)> {
        self.entries.iter().map(|(e, a, b)| (e.as_str(), *a, *b))
    }
}

/// A clock reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClockValue {
    Running(Time),
    Disabled,
}

impl ClockValue {
    pub fn running(&self) -> Option<Time> {
        match self {
            ClockValue::Running(t) => Some(*t),
            ClockValue::Disabled => None,
        }
    }
}

impl From<i64> for ClockValue {
    fn from(n: i64) -> Self {
        ClockValue::Running(Time::from_integer(n))
    }
}

impl fmt::Display for ClockValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClockValue::Running(t) => t.fmt(f),
            ClockValue::Disabled => f.write_str("#"),
        }
    }
}

/// An automaton state plus one clock per event, in event declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimedState {
    pub state: StateId,
    pub clocks: Vec<ClockValue>,
}

impl fmt::Display for TimedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.state)?;
        for c in &self.clocks {
            write!(f, ", {c}")?;
        }
        f.write_str(")")
    }
}

/// An executable event sequence from the initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    events: Vec<usize>,
    // states[k] is the state after k firings
    states: Vec<usize>,
}

impl Run {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn event_indices(&self) -> &[usize] {
        &self.events
    }

    pub fn state_indices(&self) -> &[usize] {
        &self.states
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `T[k] >= T[k-1]`.
    Order,
    /// The event fired at step `k` waited at least its eft.
    Earliest(usize),
    /// An event enabled before step `k` had not passed its lft.
    Latest(usize),
}

/// `T[plus] - T[minus] <= bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DifferenceConstraint {
    pub plus: usize,
    pub minus: usize,
    pub bound: Time,
    pub kind: ConstraintKind,
}

/// Difference constraints over the firing instants `T[0] = 0, T[1], ..., T[n]`
/// of a run with `n` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConstraintSystem {
    steps: usize,
    constraints: Vec<DifferenceConstraint>,
}

impl RunConstraintSystem {
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn constraints(&self) -> &[DifferenceConstraint] {
        &self.constraints
    }

    /// Whether `(plus, minus, bound)` is implied directly by one of the
    /// stored constraints (same variables, equal or tighter bound).
    pub fn has(&self, plus: usize, minus: usize, bound: Time) -> bool {
        self.constraints
            .iter()
            .any(|c| c.plus == plus && c.minus == minus && c.bound <= bound)
    }

    /// Whether the schedule `times` (including `T[0]`) satisfies every
    /// constraint.
    pub fn is_satisfied_by(&self, times: &[Time]) -> bool {
        times.len() == self.steps + 1
            && times[0] == Time::ZERO
            && self
                .constraints
                .iter()
                .all(|c| times[c.plus] - times[c.minus] <= c.bound)
    }

    /// Tightens all constraints by Floyd–Warshall. `None` iff infeasible
    /// (a negative cycle).
    pub fn solve(&self) -> Option<RunSolution> {
        let n = self.steps + 1;
        // dist[i][j]: tightest upper bound on T[j] - T[i]; None is +inf
        let mut dist: Vec<Vec<Option<Time>>> = vec![vec![None; n]; n];
        for (i, row) in dist.iter_mut().enumerate() {
            row[i] = Some(Time::ZERO);
        }
        for c in &self.constraints {
            let cell = &mut dist[c.minus][c.plus];
            if cell.is_none_or(|d| c.bound < d) {
                *cell = Some(c.bound);
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(ik) = dist[i][k] else { continue };
                let through = dist[k].clone();
                for (cell, kj) in dist[i].iter_mut().zip(through) {
                    if let Some(kj) = kj {
                        let via = ik + kj;
                        if cell.is_none_or(|d| via < d) {
                            *cell = Some(via);
                        }
                    }
                }
            }
        }
        if (0..n).any(|i| dist[i][i].is_some_and(|d| d.is_negative())) {
            return None;
        }
        Some(RunSolution { dist })
    }
}

impl fmt::Display for DifferenceConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{} - T{} <= {}", self.plus, self.minus, self.bound)
    }
}

/// The tightened constraint matrix of a feasible run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSolution {
    dist: Vec<Vec<Option<Time>>>,
}

impl RunSolution {
    fn last(&self) -> usize {
        self.dist.len() - 1
    }

    /// Tightest bound on `T[j] - T[i]`.
    pub fn max_difference(&self, i: usize, j: usize) -> UpperBound {
        self.dist[i][j].map_or(UpperBound::Infinite, UpperBound::Finite)
    }

    pub fn range(&self) -> TimeRange {
        let n = self.last();
        TimeRange {
            min: -self.dist[n][0].expect("T[0] - T[n] <= 0 by ordering"),
            max: self.max_difference(0, n),
        }
    }

    /// Every instant at its earliest feasible value. This is itself a
    /// feasible schedule.
    pub fn earliest_schedule(&self) -> Vec<Time> {
        (0..self.dist.len())
            .map(|i| -self.dist[i][0].expect("T[0] - T[i] <= 0 by ordering"))
            .collect()
    }

    /// Every instant at its latest feasible value, when all are bounded.
    pub fn latest_schedule(&self) -> Option<Vec<Time>> {
        self.dist[0].iter().copied().collect()
    }
}

/// Minimum and maximum completion time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeRange {
    pub min: Time,
    pub max: UpperBound,
}

impl TimeRange {
    fn merge(self, other: TimeRange) -> TimeRange {
        TimeRange {
            min: self.min.min(other.min),
            max: self.max.max(other.max),
        }
    }
}

/// A distributed asynchronous automaton with firing-time bounds on every
/// event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedAutomaton {
    base: DistributedAutomaton,
    eft: Vec<Time>,
    lft: Vec<UpperBound>,
}

impl TimedAutomaton {
    /// Requires bounds for exactly the base automaton's events, with
    /// `0 <= eft <= lft`.
    pub fn new(base: DistributedAutomaton, bounds: &TimeBounds) -> Result<Self, TimedError> {
        let n = base.events().len();
        let mut eft = vec![None; n];
        let mut lft = vec![UpperBound::Infinite; n];
        for (name, lo, hi) in bounds.entries() {
            let a = base
                .event_index(name)
                .ok_or_else(|| TimedError::UnknownEvent(name.to_string()))?;
            let event = base.events()[a].clone();
            if eft[a].is_some() {
                return Err(TimedError::DuplicateBounds(event));
            }
            if lo.is_negative() || hi < lo || hi.finite().is_some_and(|t| t.is_negative()) {
                return Err(TimedError::InvalidBounds {
                    event,
                    eft: lo,
                    lft: hi,
                });
            }
            eft[a] = Some(lo);
            lft[a] = hi;
        }
        let eft = eft
            .into_iter()
            .enumerate()
            .map(|(a, e)| e.ok_or_else(|| TimedError::MissingBounds(base.events()[a].clone())))
            .collect::<Result<_, _>>()?;
        Ok(Self { base, eft, lft })
    }

    pub fn base(&self) -> &DistributedAutomaton {
        &self.base
    }

    pub fn eft(&self, event: &str) -> Result<Time, TimedError> {
        Ok(self.eft[self.event(event)?])
    }

    pub fn lft(&self, event: &str) -> Result<UpperBound, TimedError> {
        Ok(self.lft[self.event(event)?])
    }

    pub fn eft_index(&self, a: usize) -> Time {
        self.eft[a]
    }

    pub fn lft_index(&self, a: usize) -> UpperBound {
        self.lft[a]
    }

    fn event(&self, name: &str) -> Result<usize, TimedError> {
        self.base
            .event_index(name)
            .ok_or_else(|| TimedError::UnknownEvent(name.to_string()))
    }

    fn state(&self, name: &str) -> Result<usize, TimedError> {
        self.base
            .state_index(name)
            .ok_or_else(|| TimedError::UnknownState(name.to_string()))
    }

    fn event_id(&self, a: usize) -> EventId {
        self.base.events()[a].clone()
    }

    /// `(s0, h0)` with `h0(a) = 0` for events enabled at `s0`.
    pub fn initial_timed_state(&self) -> TimedState {
        let s0 = self.base.initial_index();
        TimedState {
            state: self.base.initial().clone(),
            clocks: (0..self.eft.len())
                .map(|a| {
                    if self.base.is_enabled_index(s0, a) {
                        ClockValue::Running(Time::ZERO)
                    } else {
                        ClockValue::Disabled
                    }
                })
                .collect(),
        }
    }

    /// Enabled events carry a running clock not past their lft; disabled
    /// events carry `Disabled`.
    pub fn is_valid(&self, ts: &TimedState) -> bool {
        let Some(s) = self.base.state_index(ts.state.as_str()) else {
            return false;
        };
        ts.clocks.len() == self.eft.len()
            && ts.clocks.iter().enumerate().all(|(a, c)| {
                match (self.base.is_enabled_index(s, a), c) {
                    (true, ClockValue::Running(v)) => !v.is_negative() && self.lft[a] >= *v,
                    (false, ClockValue::Disabled) => true,
                    _ => false,
                }
            })
    }

    fn check_shape(&self, ts: &TimedState) -> Result<usize, TimedError> {
        if ts.clocks.len() != self.eft.len() {
            return Err(TimedError::MalformedState);
        }
        self.state(ts.state.as_str())
    }

    /// Fires `event` from `ts`.
    ///
    /// For every event `b`, the new clock is `Disabled` if `b` is not enabled
    /// at the target, the old reading if `b` was running and is independent
    /// from `event` at the source state, and `0` otherwise.
    pub fn fire_timed(&self, ts: &TimedState, event: &str) -> Result<TimedState, TimedError> {
        let s = self.check_shape(ts)?;
        let a = self.event(event)?;
        self.fire_index(s, ts, a).map(|(_, next)| next)
    }

    fn fire_index(
        &self,
        s: usize,
        ts: &TimedState,
        a: usize,
    ) -> Result<(usize, TimedState), TimedError> {
        let target = self
            .base
            .step_index(s, a)
            .ok_or_else(|| TimedError::NotFirable(self.event_id(a)))?;
        let clock = ts.clocks[a].running().ok_or(TimedError::MalformedState)?;
        if clock < self.eft[a] {
            return Err(TimedError::TooEarly {
                event: self.event_id(a),
                clock,
                eft: self.eft[a],
            });
        }
        let clocks = (0..self.eft.len())
            .map(|b| {
                if !self.base.is_enabled_index(target, b) {
                    return ClockValue::Disabled;
                }
                match ts.clocks[b] {
                    ClockValue::Running(v) if self.base.is_independent_index(s, a, b) => {
                        ClockValue::Running(v)
                    }
                    _ => ClockValue::Running(Time::ZERO),
                }
            })
            .collect();
        Ok((
            target,
            TimedState {
                state: self.base.states()[target].clone(),
                clocks,
            },
        ))
    }

    /// Lets `delay` time units pass. Fails if a running clock would exceed
    /// its lft; the first such event in declaration order is reported.
    pub fn elapse(&self, ts: &TimedState, delay: Time) -> Result<TimedState, TimedError> {
        self.check_shape(ts)?;
        if delay.is_negative() {
            return Err(TimedError::NegativeDelay(delay));
        }
        let mut clocks = ts.clocks.clone();
        for (a, c) in clocks.iter_mut().enumerate() {
            if let ClockValue::Running(v) = *c {
                let advanced = v + delay;
                if let UpperBound::Finite(lft) = self.lft[a] {
                    if advanced > lft {
                        return Err(TimedError::DeadlineExceeded {
                            event: self.event_id(a),
                            clock: v,
                            delay,
                            lft,
                        });
                    }
                }
                *c = ClockValue::Running(advanced);
            }
        }
        Ok(TimedState {
            state: ts.state.clone(),
            clocks,
        })
    }

    /// Checks that `events` is executable from the initial state.
    pub fn run<S: AsRef<str>>(&self, events: &[S]) -> Result<Run, TimedError> {
        let mut s = self.base.initial_index();
        let mut run = Run {
            events: Vec::with_capacity(events.len()),
            states: vec![s],
        };
        for (position, name) in events.iter().enumerate() {
            let a = self
                .base
                .event_index(name.as_ref())
                .ok_or(TimedError::InvalidRun { position })?;
            s = self
                .base
                .step_index(s, a)
                .ok_or(TimedError::InvalidRun { position })?;
            run.events.push(a);
            run.states.push(s);
        }
        Ok(run)
    }

    /// Encodes the timing rules along `run` as difference constraints.
    ///
    /// Clock origins are tracked symbolically: a clock started at instant
    /// `T[origin]` reads `T[k] - T[origin]` at instant `T[k]`.
    pub fn build_run_constraints(&self, run: &Run) -> Result<RunConstraintSystem, TimedError> {
        let n_events = self.eft.len();
        let mut constraints = Vec::new();
        let mut s = self.base.initial_index();
        if run.states.first() != Some(&s) {
            return Err(TimedError::InvalidRun { position: 0 });
        }
        let mut origin: Vec<Option<usize>> = (0..n_events)
            .map(|b| self.base.is_enabled_index(s, b).then_some(0))
            .collect();
        for (i, &a) in run.events.iter().enumerate() {
            let k = i + 1;
            let Some(next) = self.base.step_index(s, a) else {
                return Err(TimedError::InvalidRun { position: i });
            };
            let fired_origin = origin[a].expect("enabled event has a running clock");
            constraints.push(DifferenceConstraint {
                plus: k - 1,
                minus: k,
                bound: Time::ZERO,
                kind: ConstraintKind::Order,
            });
            constraints.push(DifferenceConstraint {
                plus: fired_origin,
                minus: k,
                bound: -self.eft[a],
                kind: ConstraintKind::Earliest(a),
            });
            for (b, o) in origin.iter().enumerate() {
                if let (Some(o), UpperBound::Finite(lft)) = (o, self.lft[b]) {
                    constraints.push(DifferenceConstraint {
                        plus: k,
                        minus: *o,
                        bound: lft,
                        kind: ConstraintKind::Latest(b),
                    });
                }
            }
            origin = (0..n_events)
                .map(|b| {
                    if !self.base.is_enabled_index(next, b) {
                        None
                    } else if origin[b].is_some() && self.base.is_independent_index(s, a, b) {
                        origin[b]
                    } else {
                        Some(k)
                    }
                })
                .collect();
            s = next;
        }
        Ok(RunConstraintSystem {
            steps: run.events.len(),
            constraints,
        })
    }

    /// Exact completion-time range of `run`, or `None` if no schedule
    /// satisfies its timing constraints.
    pub fn run_time_bounds(&self, run: &Run) -> Result<Option<TimeRange>, TimedError> {
        Ok(self
            .build_run_constraints(run)?
            .solve()
            .map(|sol| sol.range()))
    }

    /// Minimum and maximum time to enter `target`, over all feasible runs
    /// of at most `max_depth` firings. `None` if no such run exists.
    pub fn reach_time_bounds(
        &self,
        target: &str,
        max_depth: usize,
    ) -> Result<Option<TimeRange>, TimedError> {
        let target = self.state(target)?;
        let mut best = None;
        let mut run = Run {
            events: Vec::new(),
            states: vec![self.base.initial_index()],
        };
        self.search_runs(target, max_depth, &mut run, &mut best)?;
        Ok(best)
    }

    fn search_runs(
        &self,
        target: usize,
        max_depth: usize,
        run: &mut Run,
        best: &mut Option<TimeRange>,
    ) -> Result<(), TimedError> {
        // Constraints only accumulate along a run, so an infeasible prefix
        // has no feasible extension.
        let Some(range) = self.run_time_bounds(run)? else {
            return Ok(());
        };
        let here = *run.states.last().expect("run has a start state");
        if here == target {
            *best = Some(best.map_or(range, |b: TimeRange| b.merge(range)));
        }
        if run.len() == max_depth {
            return Ok(());
        }
        for a in self.base.enabled_events_index(here).collect::<Vec<_>>() {
            let next = self.base.step_index(here, a).expect("enabled");
            run.events.push(a);
            run.states.push(next);
            self.search_runs(target, max_depth, run, best)?;
            run.events.pop();
            run.states.pop();
        }
        Ok(())
    }

    /// Brute-force counterpart of [`reach_time_bounds`](Self::reach_time_bounds):
    /// explores every timed execution whose delays are multiples of `step`,
    /// alternating [`elapse`](Self::elapse) and [`fire_timed`](Self::fire_timed),
    /// up to `max_depth` firings and a finite time horizon.
    ///
    /// The horizon is `(max_depth + 1)` times the largest finite bound (eft
    /// or lft). The reported maximum is always finite; it matches the exact
    /// analysis whenever that maximum is finite.
    pub fn oracle_time_bounds(
        &self,
        target: &str,
        max_depth: usize,
        step: Time,
    ) -> Result<Option<TimeRange>, TimedError> {
        let target = self.state(target)?;
        if step <= Time::ZERO {
            return Err(TimedError::InvalidStep(step));
        }
        let mut largest = Time::ZERO;
        for a in 0..self.eft.len() {
            for value in std::iter::once(self.eft[a]).chain(self.lft[a].finite()) {
                if !value.is_multiple_of(step) {
                    return Err(TimedError::GridMismatch { value, step });
                }
                largest = largest.max(value);
            }
        }
        let horizon = largest.scaled(max_depth as i64 + 1);

        let mut found: Option<(Time, Time)> = None;
        let mut record = |t: Time| {
            found = Some(found.map_or((t, t), |(lo, hi)| (lo.min(t), hi.max(t))));
        };
        let start = self.initial_timed_state();
        let s0 = self.base.initial_index();
        if s0 == target {
            record(Time::ZERO);
        }
        let mut seen: HashSet<(usize, TimedState, Time)> = HashSet::new();
        let mut stack = vec![(s0, start, Time::ZERO, 0usize)];
        while let Some((s, ts, now, depth)) = stack.pop() {
            if !seen.insert((depth, ts.clone(), now)) {
                continue;
            }
            if depth < max_depth {
                for a in 0..self.eft.len() {
                    if let Ok((next, fired)) = self.fire_index(s, &ts, a) {
                        if next == target {
                            record(now);
                        }
                        stack.push((next, fired, now, depth + 1));
                    }
                }
            }
            let later = now + step;
            if later <= horizon {
                if let Ok(waited) = self.elapse(&ts, step) {
                    stack.push((s, waited, later, depth));
                }
            }
        }
        Ok(found.map(|(min, max)| TimeRange {
            min,
            max: UpperBound::Finite(max),
        }))
    }
}
