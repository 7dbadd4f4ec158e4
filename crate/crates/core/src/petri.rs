//! Place/transition nets and their translation into distributed asynchronous
//! automata.
//!
//! Two transitions are independent at a marking when both are enabled there
//! and their presets are disjoint. Translating a net explores the markings
//! reachable from the initial one (breadth first, transitions in declaration
//! order) and labels each marking with that independence relation.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::automaton::{AutomatonBuilder, DistributedAutomaton};
use crate::ident::{InvalidIdent, PlaceId, TransitionId};

/// Markings in BFS order and `(from, transition, to)` firing edges.
type Exploration = (Vec<Marking>, Vec<(usize, usize, usize)>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PetriError {
    #[error(transparent)]
    InvalidIdent(#[from] InvalidIdent),
    #[error("duplicate place {0}")]
    DuplicatePlace(PlaceId),
    #[error("duplicate transition {0}")]
    DuplicateTransition(TransitionId),
    #[error("unknown place {0}")]
    UnknownPlace(String),
    #[error("unknown transition {0}")]
    UnknownTransition(String),
    #[error("marking has {got} entries but the net has {expected} places")]
    MalformedMarking { expected: usize, got: usize },
    #[error("transition {transition} is not enabled: place {place} has too few tokens")]
    NotEnabled {
        transition: TransitionId,
        place: PlaceId,
    },
    #[error("more than {0} reachable markings (the net may be unbounded)")]
    LimitExceeded(usize),
    #[error("token count overflow")]
    Overflow,
}

/// Token counts, one per place in the net's declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(Vec<u64>);

impl Marking {
    pub fn new(tokens: Vec<u64>) -> Self {
        Self(tokens)
    }

    pub fn tokens(&self) -> &[u64] {
        &self.0
    }

    /// Pointwise `self >= other`.
    pub fn covers(&self, other: &Marking) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(m, w)| m >= w)
    }
}

impl From<Vec<u64>> for Marking {
    fn from(tokens: Vec<u64>) -> Self {
        Self(tokens)
    }
}

/// Formats as `(n1,n2,...)`.
impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    places: Vec<PlaceId>,
    place_ix: HashMap<PlaceId, usize>,
    transitions: Vec<TransitionId>,
    transition_ix: HashMap<TransitionId, usize>,
    pre: Vec<Marking>,
    post: Vec<Marking>,
    initial: Marking,
}

#[derive(Debug, Clone, Default)]
pub struct PetriNetBuilder {
    places: Vec<(String, u64)>,
    transitions: Vec<String>,
    pre: Vec<(String, String, u64)>,
    post: Vec<(String, String, u64)>,
}

impl PetriNetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a place holding `tokens` in the initial marking.
    pub fn place(&mut self, name: impl Into<String>, tokens: u64) -> &mut Self {
        self.places.push((name.into(), tokens));
        self
    }

    pub fn transition(&mut self, name: impl Into<String>) -> &mut Self {
        self.transitions.push(name.into());
        self
    }

    /// Sets `pre(t)(p) = weight`.
    pub fn pre(&mut self, t: impl Into<String>, p: impl Into<String>, weight: u64) -> &mut Self {
        self.pre.push((t.into(), p.into(), weight));
        self
    }

    /// Sets `post(t)(p) = weight`.
    pub fn post(&mut self, t: impl Into<String>, p: impl Into<String>, weight: u64) -> &mut Self {
        self.post.push((t.into(), p.into(), weight));
        self
    }

    pub fn build(&self) -> Result<PetriNet, PetriError> {
        let mut places = Vec::new();
        let mut place_ix = HashMap::new();
        let mut initial = Vec::new();
        for (name, tokens) in &self.places {
            let id = PlaceId::new(name.as_str())?;
            if place_ix.insert(id.clone(), places.len()).is_some() {
                return Err(PetriError::DuplicatePlace(id));
            }
            places.push(id);
            initial.push(*tokens);
        }
        let mut transitions = Vec::new();
        let mut transition_ix = HashMap::new();
        for name in &self.transitions {
            let id = TransitionId::new(name.as_str())?;
            if transition_ix
                .insert(id.clone(), transitions.len())
                .is_some()
            {
                return Err(PetriError::DuplicateTransition(id));
            }
            transitions.push(id);
        }

        let arcs = |list: &[(String, String, u64)]| -> Result<Vec<Marking>, PetriError> {
            let mut out = vec![Marking(vec![0; places.len()]); transitions.len()];
            for (t, p, w) in list {
                let ti = *transition_ix
                    .get(t.as_str())
                    .ok_or_else(|| PetriError::UnknownTransition(t.clone()))?;
                let pi = *place_ix
                    .get(p.as_str())
                    .ok_or_else(|| PetriError::UnknownPlace(p.clone()))?;
                out[ti].0[pi] = *w;
            }
            Ok(out)
        };
        let pre = arcs(&self.pre)?;
        let post = arcs(&self.post)?;

        Ok(PetriNet {
            places,
            place_ix,
            transitions,
            transition_ix,
            pre,
            post,
            initial: Marking(initial),
        })
    }
}

impl PetriNet {
    pub fn builder() -> PetriNetBuilder {
        PetriNetBuilder::new()
    }

    pub fn places(&self) -> &[PlaceId] {
        &self.places
    }

    pub fn transitions(&self) -> &[TransitionId] {
        &self.transitions
    }

    pub fn initial(&self) -> &Marking {
        &self.initial
    }

    pub fn place_index(&self, name: &str) -> Option<usize> {
        self.place_ix.get(name).copied()
    }

    pub fn transition_index(&self, name: &str) -> Option<usize> {
        self.transition_ix.get(name).copied()
    }

    fn lookup(&self, t: &str) -> Result<usize, PetriError> {
        self.transition_index(t)
            .ok_or_else(|| PetriError::UnknownTransition(t.to_string()))
    }

    fn check_marking(&self, m: &Marking) -> Result<(), PetriError> {
        if m.0.len() == self.places.len() {
            Ok(())
        } else {
            Err(PetriError::MalformedMarking {
                expected: self.places.len(),
                got: m.0.len(),
            })
        }
    }

    pub fn pre(&self, t: &str) -> Result<&Marking, PetriError> {
        Ok(&self.pre[self.lookup(t)?])
    }

    pub fn post(&self, t: &str) -> Result<&Marking, PetriError> {
        Ok(&self.post[self.lookup(t)?])
    }

    /// `•t`: places with nonzero pre-weight, in declaration order.
    pub fn preset(&self, t: &str) -> Result<Vec<&PlaceId>, PetriError> {
        let ti = self.lookup(t)?;
        Ok(self.preset_index(ti).map(|p| &self.places[p]).collect())
    }

    fn preset_index(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.pre[t]
            .0
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0)
            .map(|(p, _)| p)
    }

    pub fn enabled(&self, m: &Marking, t: &str) -> Result<bool, PetriError> {
        let ti = self.lookup(t)?;
        self.check_marking(m)?;
        Ok(m.covers(&self.pre[ti]))
    }

    /// `M - pre(t) + post(t)`, provided `M >= pre(t)`.
    pub fn fire(&self, m: &Marking, t: &str) -> Result<Marking, PetriError> {
        let ti = self.lookup(t)?;
        self.check_marking(m)?;
        self.fire_index(m, ti)
    }

    fn fire_index(&self, m: &Marking, t: usize) -> Result<Marking, PetriError> {
        let mut out = Vec::with_capacity(m.0.len());
        for (p, ((&have, &take), &give)) in
            m.0.iter()
                .zip(&self.pre[t].0)
                .zip(&self.post[t].0)
                .enumerate()
        {
            let rest = have
                .checked_sub(take)
                .ok_or_else(|| PetriError::NotEnabled {
                    transition: self.transitions[t].clone(),
                    place: self.places[p].clone(),
                })?;
            out.push(rest.checked_add(give).ok_or(PetriError::Overflow)?);
        }
        Ok(Marking(out))
    }

    fn independent_index(&self, m: &Marking, t1: usize, t2: usize) -> bool {
        if t1 == t2 || !m.covers(&self.pre[t1]) || !m.covers(&self.pre[t2]) {
            return false;
        }
        let p1: HashSet<usize> = self.preset_index(t1).collect();
        self.preset_index(t2).all(|p| !p1.contains(&p))
    }

    /// Unordered pairs of distinct transitions that are both enabled at `m`
    /// and have disjoint presets. Each pair is listed once, in declaration
    /// order.
    pub fn independence_at(
        &self,
        m: &Marking,
    ) -> Result<Vec<(TransitionId, TransitionId)>, PetriError> {
        self.check_marking(m)?;
        Ok(self
            .independent_pairs_index(m)
            .into_iter()
            .map(|(a, b)| (self.transitions[a].clone(), self.transitions[b].clone()))
            .collect())
    }

    fn independent_pairs_index(&self, m: &Marking) -> Vec<(usize, usize)> {
        let n = self.transitions.len();
        let mut out = Vec::new();
        for t1 in 0..n {
            for t2 in t1 + 1..n {
                if self.independent_index(m, t1, t2) {
                    out.push((t1, t2));
                }
            }
        }
        out
    }

    /// Breadth-first closure of the initial marking under firing.
    ///
    /// Fails with [`PetriError::LimitExceeded`] once more than `limit`
    /// distinct markings have been discovered.
    pub fn reachable_markings(&self, limit: usize) -> Result<Vec<Marking>, PetriError> {
        Ok(self.explore(limit)?.0)
    }

    /// Returns the markings in BFS order and the firing edges between them
    /// as `(from, transition, to)` indices.
    fn explore(&self, limit: usize) -> Result<Exploration, PetriError> {
        let mut order = vec![self.initial.clone()];
        let mut index: HashMap<Marking, usize> = HashMap::from([(self.initial.clone(), 0)]);
        let mut edges = Vec::new();
        if limit < 1 {
            return Err(PetriError::LimitExceeded(limit));
        }
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for t in 0..self.transitions.len() {
                if !order[i].covers(&self.pre[t]) {
                    continue;
                }
                let next = self.fire_index(&order[i], t)?;
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        if order.len() >= limit {
                            return Err(PetriError::LimitExceeded(limit));
                        }
                        let j = order.len();
                        index.insert(next.clone(), j);
                        order.push(next);
                        queue.push_back(j);
                        j
                    }
                };
                edges.push((i, t, j));
            }
        }
        Ok((order, edges))
    }

    /// Translates the net into a distributed asynchronous automaton over its
    /// reachable markings. States are named by token vector (`(1,0,1)`),
    /// events by transition name.
    pub fn to_automaton(&self, limit: usize) -> Result<DistributedAutomaton, PetriError> {
        let (markings, edges) = self.explore(limit)?;
        let names: Vec<String> = markings.iter().map(Marking::to_string).collect();
        let mut b = AutomatonBuilder::new();
        for name in &names {
            b.state(name.as_str());
        }
        b.initial(names[0].as_str());
        for t in &self.transitions {
            b.event(t.as_str());
        }
        for &(from, t, to) in &edges {
            b.transition(
                names[from].as_str(),
                self.transitions[t].as_str(),
                names[to].as_str(),
            );
        }
        for (m, name) in markings.iter().zip(&names) {
            for (t1, t2) in self.independent_pairs_index(m) {
                b.independent(
                    name.as_str(),
                    self.transitions[t1].as_str(),
                    self.transitions[t2].as_str(),
                );
            }
        }
        // Firing is a function of (marking, transition), so this cannot fail.
        Ok(b.build().expect("net translation is deterministic"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// t1: p1 -> p2, t2: p3 -> p2, t3: p2 -> p1, t4: p2 -> p3.
    fn omega() -> PetriNet {
        let mut b = PetriNetBuilder::new();
        b.place("p1", 1).place("p2", 0).place("p3", 1);
        for t in ["t1", "t2", "t3", "t4"] {
            b.transition(t);
        }
        b.pre("t1", "p1", 1).post("t1", "p2", 1);
        b.pre("t2", "p3", 1).post("t2", "p2", 1);
        b.pre("t3", "p2", 1).post("t3", "p1", 1);
        b.pre("t4", "p2", 1).post("t4", "p3", 1);
        b.build().unwrap()
    }

    fn m(v: &[u64]) -> Marking {
        Marking::new(v.to_vec())
    }

    #[test]
    fn presets() {
        let net = omega();
        let names = |t| -> Vec<String> {
            net.preset(t)
                .unwrap()
                .iter()
                .map(|p| p.to_string())
                .collect()
        };
        assert_eq!(names("t1"), ["p1"]);
        assert_eq!(names("t3"), ["p2"]);

        let mut b = PetriNetBuilder::new();
        b.place("p", 0).transition("t").post("t", "p", 1);
        assert!(b.build().unwrap().preset("t").unwrap().is_empty());
        assert_eq!(
            net.preset("t9"),
            Err(PetriError::UnknownTransition("t9".into()))
        );
    }

    #[test]
    fn enabledness() {
        let net = omega();
        assert!(net.enabled(&m(&[1, 0, 1]), "t1").unwrap());
        assert!(!net.enabled(&m(&[0, 0, 2]), "t1").unwrap());
        assert_eq!(
            net.enabled(&m(&[1, 0]), "t1"),
            Err(PetriError::MalformedMarking {
                expected: 3,
                got: 2
            })
        );

        let mut b = PetriNetBuilder::new();
        b.place("p", 0).transition("t");
        assert!(b.build().unwrap().enabled(&m(&[0]), "t").unwrap());
    }

    #[test]
    fn firing() {
        let net = omega();
        assert_eq!(net.fire(&m(&[1, 0, 1]), "t1").unwrap(), m(&[0, 1, 1]));
        assert_eq!(
            net.fire(&m(&[0, 0, 2]), "t1"),
            Err(PetriError::NotEnabled {
                transition: TransitionId::new("t1").unwrap(),
                place: PlaceId::new("p1").unwrap(),
            })
        );

        let mut b = PetriNetBuilder::new();
        b.place("p", 2).transition("t").pre("t", "p", 2);
        let one = b.build().unwrap();
        assert_eq!(one.fire(one.initial(), "t").unwrap(), m(&[0]));
    }

    #[test]
    fn independence_examples() {
        let net = omega();
        let pairs = |v: &[u64]| -> Vec<(String, String)> {
            net.independence_at(&m(v))
                .unwrap()
                .into_iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect()
        };
        assert_eq!(pairs(&[1, 0, 1]), [("t1".to_string(), "t2".to_string())]);
        assert!(!pairs(&[0, 2, 0]).contains(&("t3".into(), "t4".into())));

        let mut b = PetriNetBuilder::new();
        b.place("p", 0).transition("a").transition("b");
        b.pre("a", "p", 1).pre("b", "p", 1);
        let dead = b.build().unwrap();
        assert!(dead.independence_at(dead.initial()).unwrap().is_empty());
    }

    #[test]
    fn omega_reachability() {
        let got = omega().reachable_markings(100).unwrap();
        let expected = [
            m(&[1, 0, 1]),
            m(&[0, 1, 1]),
            m(&[1, 1, 0]),
            m(&[0, 2, 0]),
            m(&[2, 0, 0]),
            m(&[0, 0, 2]),
        ];
        assert_eq!(got.len(), 6);
        assert_eq!(got[0], expected[0]);
        for e in &expected {
            assert!(got.contains(e), "missing {e}");
        }
        // exactly six markings fit in a limit of six
        assert!(omega().reachable_markings(6).is_ok());
        assert_eq!(
            omega().reachable_markings(5),
            Err(PetriError::LimitExceeded(5))
        );
    }

    #[test]
    fn trivial_nets() {
        let mut b = PetriNetBuilder::new();
        b.place("p", 3);
        let net = b.build().unwrap();
        assert_eq!(net.reachable_markings(1).unwrap(), vec![m(&[3])]);
        let aut = net.to_automaton(1).unwrap();
        assert_eq!(aut.states().len(), 1);
        assert_eq!(aut.transitions().count(), 0);

        let mut b = PetriNetBuilder::new();
        b.place("p", 0).transition("t").post("t", "p", 1);
        let grow = b.build().unwrap();
        assert_eq!(
            grow.reachable_markings(3),
            Err(PetriError::LimitExceeded(3))
        );
        assert_eq!(grow.to_automaton(3), Err(PetriError::LimitExceeded(3)));
    }

    #[test]
    fn omega_translation() {
        let aut = omega().to_automaton(100).unwrap();
        assert_eq!(aut.states().len(), 6);
        assert_eq!(aut.initial().as_str(), "(1,0,1)");
        assert!(aut.check_determinism().is_ok());
        assert!(aut.check_diamond().is_ok());
        assert!(aut.is_independent("(1,0,1)", "t1", "t2").unwrap());
        assert_eq!(aut.independence_at("(1,0,1)").unwrap().len(), 1);
    }

    #[test]
    fn builder_errors() {
        let mut b = PetriNetBuilder::new();
        b.place("p", 0).place("p", 1);
        assert!(matches!(b.build(), Err(PetriError::DuplicatePlace(_))));
        let mut b = PetriNetBuilder::new();
        b.place("p", 0).transition("t").transition("t");
        assert!(matches!(b.build(), Err(PetriError::DuplicateTransition(_))));
        let mut b = PetriNetBuilder::new();
        b.place("p", 0).pre("t9", "p", 1);
        assert_eq!(b.build(), Err(PetriError::UnknownTransition("t9".into())));
        let mut b = PetriNetBuilder::new();
        b.transition("t").post("t", "q", 1);
        assert_eq!(b.build(), Err(PetriError::UnknownPlace("q".into())));
    }
}
