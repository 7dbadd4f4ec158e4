//! Distributed asynchronous automata.
//!
//! An automaton is a quintuple of states, an initial state, events, a
//! transition relation and a per-state family of irreflexive symmetric
//! independence relations. Axiom (i) (determinism) is enforced when an
//! automaton is built; axiom (ii) (the half-diamond completion property) and
//! Goubault's stronger full-square condition are diagnostics run afterwards.
//!
//! Witnesses returned by the checks are the first violation in name order
//! (state name, then event names), so their output is reproducible.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::ident::{EventId, InvalidIdent, StateId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error(transparent)]
    InvalidIdent(#[from] InvalidIdent),
    #[error("duplicate state {0}")]
    DuplicateState(StateId),
    #[error("duplicate event {0}")]
    DuplicateEvent(EventId),
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("unknown event {0}")]
    UnknownEvent(String),
    #[error("no initial state given")]
    MissingInitial,
    #[error("independence at {state} pairs event {event} with itself")]
    ReflexivePair { state: StateId, event: EventId },
    #[error("axiom (i) violated: {src} --{event}--> both {first} and {second}")]
    NondeterministicTransition {
        src: StateId,
        event: EventId,
        first: StateId,
        second: StateId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub src: StateId,
    pub event: EventId,
    pub dst: StateId,
}

/// `src` has two distinct `event`-successors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminismViolation {
    pub state: StateId,
    pub event: EventId,
    pub first: StateId,
    pub second: StateId,
}

/// `state --a1--> s1 --a2--> target` with `(a1, a2)` independent at `state`,
/// but no `state --a2--> s2 --a1--> target` completes the square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiamondViolation {
    pub state: StateId,
    pub a1: EventId,
    pub a2: EventId,
    pub s1: StateId,
    pub target: StateId,
}

/// `(a1, a2)` is independent at `state` but spans no full commuting square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoubaultViolation {
    pub state: StateId,
    pub a1: EventId,
    pub a2: EventId,
}

impl fmt::Display for DeterminismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.state, self.event, self.first, self.second
        )
    }
}

impl fmt::Display for DiamondViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{},{})",
            self.state, self.a1, self.a2, self.s1, self.target
        )
    }
}

impl fmt::Display for GoubaultViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.state, self.a1, self.a2)
    }
}

/// A validated distributed asynchronous automaton.
///
/// States and events keep their declaration order; index-based accessors
/// (`*_index`) refer to positions in [`states`](Self::states) and
/// [`events`](Self::events).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributedAutomaton {
    states: Vec<StateId>,
    state_ix: HashMap<StateId, usize>,
    events: Vec<EventId>,
    event_ix: HashMap<EventId, usize>,
    initial: usize,
    transitions: Vec<(usize, usize, usize)>,
    succ: HashMap<(usize, usize), Vec<usize>>,
    // Unordered pairs stored as (low, high) event indices.
    independence: Vec<BTreeSet<(usize, usize)>>,
}

/// Collects the raw components of an automaton before validation.
#[derive(Debug, Clone, Default)]
pub struct AutomatonBuilder {
    states: Vec<String>,
    initial: Option<String>,
    events: Vec<String>,
    transitions: Vec<(String, String, String)>,
    independence: Vec<(String, String, String)>,
    global_independence: Vec<(String, String)>,
}

impl AutomatonBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: impl Into<String>) -> &mut Self {
        self.states.push(name.into());
        self
    }

    pub fn initial(&mut self, name: impl Into<String>) -> &mut Self {
        self.initial = Some(name.into());
        self
    }

    pub fn event(&mut self, name: impl Into<String>) -> &mut Self {
        self.events.push(name.into());
        self
    }

    pub fn transition(
        &mut self,
        src: impl Into<String>,
        event: impl Into<String>,
        dst: impl Into<String>,
    ) -> &mut Self {
        self.transitions
            .push((src.into(), event.into(), dst.into()));
        self
    }

    /// Declares `a` and `b` independent at `state`. The reverse pair is
    /// added automatically.
    pub fn independent(
        &mut self,
        state: impl Into<String>,
        a: impl Into<String>,
        b: impl Into<String>,
    ) -> &mut Self {
        self.independence.push((state.into(), a.into(), b.into()));
        self
    }

    /// Declares `a` and `b` independent at every state.
    pub fn independent_everywhere(
        &mut self,
        a: impl Into<String>,
        b: impl Into<String>,
    ) -> &mut Self {
        self.global_independence.push((a.into(), b.into()));
        self
    }

    /// Validates and builds the automaton, enforcing axiom (i).
    pub fn build(&self) -> Result<DistributedAutomaton, AutomatonError> {
        self.build_inner(true)
    }

    /// Builds without rejecting nondeterministic transitions, so that
    /// [`DistributedAutomaton::check_determinism`] can report them.
    pub fn build_permissive(&self) -> Result<DistributedAutomaton, AutomatonError> {
        self.build_inner(false)
    }

    fn build_inner(&self, deterministic: bool) -> Result<DistributedAutomaton, AutomatonError> {
        let mut states = Vec::with_capacity(self.states.len());
        let mut state_ix = HashMap::new();
        for name in &self.states {
            let id = StateId::new(name.as_str())?;
            if state_ix.insert(id.clone(), states.len()).is_some() {
                return Err(AutomatonError::DuplicateState(id));
            }
            states.push(id);
        }
        let mut events = Vec::with_capacity(self.events.len());
        let mut event_ix = HashMap::new();
        for name in &self.events {
            let id = EventId::new(name.as_str())?;
            if event_ix.insert(id.clone(), events.len()).is_some() {
                return Err(AutomatonError::DuplicateEvent(id));
            }
            events.push(id);
        }

        let find_state = |name: &str| {
            state_ix
                .get(name)
                .copied()
                .ok_or_else(|| AutomatonError::UnknownState(name.to_string()))
        };
        let find_event = |name: &str| {
            event_ix
                .get(name)
                .copied()
                .ok_or_else(|| AutomatonError::UnknownEvent(name.to_string()))
        };

        let initial = find_state(
            self.initial
                .as_deref()
                .ok_or(AutomatonError::MissingInitial)?,
        )?;

        let mut transitions = Vec::new();
        let mut seen = HashSet::new();
        let mut succ: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (src, event, dst) in &self.transitions {
            let t = (find_state(src)?, find_event(event)?, find_state(dst)?);
            if !seen.insert(t) {
                continue;
            }
            let targets = succ.entry((t.0, t.1)).or_default();
            if deterministic {
                if let Some(&first) = targets.first() {
                    return Err(AutomatonError::NondeterministicTransition {
                        src: states[t.0].clone(),
                        event: events[t.1].clone(),
                        first: states[first].clone(),
                        second: states[t.2].clone(),
                    });
                }
            }
            targets.push(t.2);
            transitions.push(t);
        }

        let mut independence = vec![BTreeSet::new(); states.len()];
        let mut add_pair = |s: usize, a: usize, b: usize| {
            if a == b {
                return Err(AutomatonError::ReflexivePair {
                    state: states[s].clone(),
                    event: events[a].clone(),
                });
            }
            independence[s].insert((a.min(b), a.max(b)));
            Ok(())
        };
        for (state, a, b) in &self.independence {
            add_pair(find_state(state)?, find_event(a)?, find_event(b)?)?;
        }
        for (a, b) in &self.global_independence {
            let (a, b) = (find_event(a)?, find_event(b)?);
            for s in 0..states.len() {
                add_pair(s, a, b)?;
            }
        }

        Ok(DistributedAutomaton {
            states,
            state_ix,
            events,
            event_ix,
            initial,
            transitions,
            succ,
            independence,
        })
    }
}

/// Builds an automaton from an asynchronous system: the single global
/// independence relation is used as `I_s` at every state.
pub fn from_async_system<S: AsRef<str>>(
    states: &[S],
    initial: &str,
    events: &[S],
    transitions: &[(S, S, S)],
    independence: &[(S, S)],
) -> Result<DistributedAutomaton, AutomatonError> {
    let mut b = AutomatonBuilder::new();
    for s in states {
        b.state(s.as_ref());
    }
    b.initial(initial);
    for e in events {
        b.event(e.as_ref());
    }
    for (src, e, dst) in transitions {
        b.transition(src.as_ref(), e.as_ref(), dst.as_ref());
    }
    for (x, y) in independence {
        b.independent_everywhere(x.as_ref(), y.as_ref());
    }
    b.build()
}

impl DistributedAutomaton {
    pub fn builder() -> AutomatonBuilder {
        AutomatonBuilder::new()
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn events(&self) -> &[EventId] {
        &self.events
    }

    pub fn initial(&self) -> &StateId {
        &self.states[self.initial]
    }

    pub fn initial_index(&self) -> usize {
        self.initial
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_ix.get(name).copied()
    }

    pub fn event_index(&self, name: &str) -> Option<usize> {
        self.event_ix.get(name).copied()
    }

    /// Transitions in declaration order, duplicates removed.
    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        self.transitions.iter().map(|&(s, a, d)| Transition {
            src: self.states[s].clone(),
            event: self.events[a].clone(),
            dst: self.states[d].clone(),
        })
    }

    pub fn transition_indices(&self) -> &[(usize, usize, usize)] {
        &self.transitions
    }

    /// `s · a`: the `a`-successor of `s`, or `None` for the undefined value.
    pub fn step(&self, s: &str, a: &str) -> Result<Option<&StateId>, AutomatonError> {
        let si = self
            .state_index(s)
            .ok_or_else(|| AutomatonError::UnknownState(s.to_string()))?;
        let ai = self
            .event_index(a)
            .ok_or_else(|| AutomatonError::UnknownEvent(a.to_string()))?;
        Ok(self.step_index(si, ai).map(|d| &self.states[d]))
    }

    pub fn step_index(&self, s: usize, a: usize) -> Option<usize> {
        self.successors_index(s, a).first().copied()
    }

    /// All `a`-successors of `s`. At most one unless the automaton was built
    /// permissively.
    pub fn successors_index(&self, s: usize, a: usize) -> &[usize] {
        self.succ.get(&(s, a)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_enabled_index(&self, s: usize, a: usize) -> bool {
        self.succ.contains_key(&(s, a))
    }

    /// Events with an outgoing transition from `s`, in declaration order.
    pub fn enabled_events_index(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.events.len()).filter(move |&a| self.is_enabled_index(s, a))
    }

    pub fn is_independent_index(&self, s: usize, a: usize, b: usize) -> bool {
        self.independence[s].contains(&(a.min(b), a.max(b)))
    }

    /// Unordered independent pairs at `s` as `(low, high)` event indices.
    pub fn independent_pairs_index(&self, s: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.independence[s].iter().copied()
    }

    /// Unordered independent pairs at `state`, each listed once with events
    /// in declaration order.
    pub fn independence_at(&self, state: &str) -> Result<Vec<(EventId, EventId)>, AutomatonError> {
        let s = self
            .state_index(state)
            .ok_or_else(|| AutomatonError::UnknownState(state.to_string()))?;
        Ok(self
            .independent_pairs_index(s)
            .map(|(a, b)| (self.events[a].clone(), self.events[b].clone()))
            .collect())
    }

    /// Whether `(a, b)` is in `I_state`. Order of `a` and `b` is irrelevant.
    pub fn is_independent(&self, state: &str, a: &str, b: &str) -> Result<bool, AutomatonError> {
        let s = self
            .state_index(state)
            .ok_or_else(|| AutomatonError::UnknownState(state.to_string()))?;
        let ai = self
            .event_index(a)
            .ok_or_else(|| AutomatonError::UnknownEvent(a.to_string()))?;
        let bi = self
            .event_index(b)
            .ok_or_else(|| AutomatonError::UnknownEvent(b.to_string()))?;
        Ok(self.is_independent_index(s, ai, bi))
    }

    fn states_by_name(&self) -> Vec<usize> {
        let mut ix: Vec<usize> = (0..self.states.len()).collect();
        ix.sort_by(|&x, &y| self.states[x].cmp(&self.states[y]));
        ix
    }

    fn events_by_name(&self) -> Vec<usize> {
        let mut ix: Vec<usize> = (0..self.events.len()).collect();
        ix.sort_by(|&x, &y| self.events[x].cmp(&self.events[y]));
        ix
    }

    fn sorted_successors(&self, s: usize, a: usize) -> Vec<usize> {
        let mut out = self.successors_index(s, a).to_vec();
        out.sort_by(|&x, &y| self.states[x].cmp(&self.states[y]));
        out
    }

    /// Axiom (i): every `(s, a)` has at most one successor.
    pub fn check_determinism(&self) -> Result<(), DeterminismViolation> {
        for s in self.states_by_name() {
            for a in self.events_by_name() {
                let targets = self.sorted_successors(s, a);
                if targets.len() > 1 {
                    return Err(DeterminismViolation {
                        state: self.states[s].clone(),
                        event: self.events[a].clone(),
                        first: self.states[targets[0]].clone(),
                        second: self.states[targets[1]].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Independent pairs at `s` in both orders, sorted by event names.
    fn ordered_pairs_by_name(&self, s: usize) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self.independence[s]
            .iter()
            .flat_map(|&(a, b)| [(a, b), (b, a)])
            .collect();
        pairs.sort_by(|x, y| {
            (&self.events[x.0], &self.events[x.1]).cmp(&(&self.events[y.0], &self.events[y.1]))
        });
        pairs
    }

    fn completes_square(&self, s: usize, a1: usize, a2: usize, target: usize) -> bool {
        self.successors_index(s, a2)
            .iter()
            .any(|&s2| self.successors_index(s2, a1).contains(&target))
    }

    /// Axiom (ii): for `(a1, a2)` independent at `s`, every path
    /// `s --a1--> s1 --a2--> s'` is matched by some `s --a2--> s2 --a1--> s'`.
    pub fn check_diamond(&self) -> Result<(), DiamondViolation> {
        for s in self.states_by_name() {
            for (a1, a2) in self.ordered_pairs_by_name(s) {
                for s1 in self.sorted_successors(s, a1) {
                    for target in self.sorted_successors(s1, a2) {
                        if !self.completes_square(s, a1, a2, target) {
                            return Err(DiamondViolation {
                                state: self.states[s].clone(),
                                a1: self.events[a1].clone(),
                                a2: self.events[a2].clone(),
                                s1: self.states[s1].clone(),
                                target: self.states[target].clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Goubault's condition (ii)': every pair independent at `s` spans a full
    /// square `s --a1--> s1 --a2--> s'`, `s --a2--> s2 --a1--> s'`.
    pub fn check_goubault(&self) -> Result<(), GoubaultViolation> {
        for s in self.states_by_name() {
            for (a1, a2) in self.ordered_pairs_by_name(s) {
                if self.events[a1] > self.events[a2] {
                    // the condition is symmetric in a1, a2
                    continue;
                }
                let has_square = self.successors_index(s, a1).iter().any(|&s1| {
                    self.successors_index(s1, a2)
                        .iter()
                        .any(|&target| self.completes_square(s, a1, a2, target))
                });
                if !has_square {
                    return Err(GoubaultViolation {
                        state: self.states[s].clone(),
                        a1: self.events[a1].clone(),
                        a2: self.events[a2].clone(),
                    });
                }
            }
        }
        Ok(())
    }
}
