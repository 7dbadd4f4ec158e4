//! Distributed asynchronous automata: transition systems whose independence
//! relation between events may differ from state to state.
//!
//! The crate provides
//!
//! * [`automaton`]: the automaton model with checks for determinism, the
//!   diamond completion axiom and Goubault's full-square condition;
//! * [`petri`]: place/transition nets and their translation into automata
//!   over the reachable markings;
//! * [`timed`]: earliest/latest firing times, the clock semantics, and exact
//!   minimum/maximum reachability times;
//! * [`format`] and [`dot`]: the `.daa`/`.pnet` text formats and Graphviz
//!   export.

pub mod automaton;
pub mod dot;
pub mod format;
pub mod ident;
pub mod petri;
pub mod time;
pub mod timed;

pub use automaton::{
    from_async_system, AutomatonBuilder, AutomatonError, DeterminismViolation, DiamondViolation,
    DistributedAutomaton, GoubaultViolation, Transition,
};
pub use format::{parse_daa, parse_pnet, DaaDocument, ParseError, PnetDocument};
pub use ident::{EventId, InvalidIdent, PlaceId, StateId, TransitionId};
pub use petri::{Marking, PetriError, PetriNet, PetriNetBuilder};
pub use time::{Time, UpperBound};
pub use timed::{
    ClockValue, DifferenceConstraint, Run, RunConstraintSystem, RunSolution, TimeBounds, TimeRange,
    TimedAutomaton, TimedError, TimedState,
};
