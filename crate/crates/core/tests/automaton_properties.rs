use std::collections::HashMap;

use daa_core::AutomatonBuilder;
use proptest::prelude::*;

/// Cycles through a pool of random numbers.
struct Entropy<'a> {
    pool: &'a [u32],
    at: usize,
}

impl<'a> Entropy<'a> {
    fn new(pool: &'a [u32]) -> Self {
        Self { pool, at: 0 }
    }

    fn below(&mut self, n: usize) -> usize {
        let v = self.pool[self.at % self.pool.len()];
        self.at += 1;
        v as usize % n
    }

    fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }
}

fn name(prefix: &str, i: usize) -> String {
    format!("{prefix}{i}")
}

/// Deterministic automaton in which every independent pair spans a full
/// commuting square, padded with extra transitions in free slots.
fn goubault_automaton(n_states: usize, n_events: usize, pool: &[u32]) -> AutomatonBuilder {
    let mut rng = Entropy::new(pool);
    let mut delta: HashMap<(usize, usize), usize> = HashMap::new();
    let mut indep: Vec<(usize, usize, usize)> = Vec::new();

    for s in 0..n_states {
        for a1 in 0..n_events {
            for a2 in a1 + 1..n_events {
                if !rng.chance(40) {
                    continue;
                }
                let mut trial = delta.clone();
                let mut get_or_set = |from: usize, e: usize, rng: &mut Entropy| {
                    *trial
                        .entry((from, e))
                        .or_insert_with(|| rng.below(n_states))
                };
                let s1 = get_or_set(s, a1, &mut rng);
                let target = get_or_set(s1, a2, &mut rng);
                let s2 = get_or_set(s, a2, &mut rng);
                let closing = *trial.entry((s2, a1)).or_insert(target);
                if closing == target {
                    delta = trial;
                    indep.push((s, a1, a2));
                }
            }
        }
    }
    for s in 0..n_states {
        for a in 0..n_events {
            if !delta.contains_key(&(s, a)) && rng.chance(30) {
                delta.insert((s, a), rng.below(n_states));
            }
        }
    }

    let mut b = AutomatonBuilder::new();
    for s in 0..n_states {
        b.state(name("s", s));
    }
    b.initial("s0");
    for a in 0..n_events {
        b.event(name("a", a));
    }
    let mut edges: Vec<_> = delta.into_iter().collect();
    edges.sort();
    for ((s, a), d) in edges {
        b.transition(name("s", s), name("a", a), name("s", d));
    }
    for (s, a1, a2) in indep {
        b.independent(name("s", s), name("a", a1), name("a", a2));
    }
    b
}

/// Arbitrary deterministic automaton with arbitrary independence.
fn random_automaton(n_states: usize, n_events: usize, pool: &[u32]) -> AutomatonBuilder {
    let mut rng = Entropy::new(pool);
    let mut b = AutomatonBuilder::new();
    for s in 0..n_states {
        b.state(name("s", s));
    }
    b.initial("s0");
    for a in 0..n_events {
        b.event(name("a", a));
    }
    for s in 0..n_states {
        for a in 0..n_events {
            if rng.chance(50) {
                b.transition(name("s", s), name("a", a), name("s", rng.below(n_states)));
            }
        }
        for a1 in 0..n_events {
            for a2 in 0..n_events {
                if a1 != a2 && rng.chance(20) {
                    b.independent(name("s", s), name("a", a1), name("a", a2));
                }
            }
        }
    }
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn goubault_implies_diamond(
        n_states in 1usize..7,
        n_events in 1usize..5,
        pool in prop::collection::vec(any::<u32>(), 32..128),
    ) {
        let aut = goubault_automaton(n_states, n_events, &pool).build().unwrap();
        prop_assert!(aut.check_determinism().is_ok());
        prop_assert!(aut.check_goubault().is_ok());
        prop_assert!(aut.check_diamond().is_ok());
    }

    #[test]
    fn independence_is_symmetric_and_irreflexive(
        n_states in 1usize..6,
        n_events in 1usize..5,
        pool in prop::collection::vec(any::<u32>(), 32..128),
    ) {
        let aut = random_automaton(n_states, n_events, &pool).build().unwrap();
        for s in aut.states() {
            for a in aut.events() {
                prop_assert!(!aut.is_independent(s.as_str(), a.as_str(), a.as_str()).unwrap());
                for b in aut.events() {
                    prop_assert_eq!(
                        aut.is_independent(s.as_str(), a.as_str(), b.as_str()).unwrap(),
                        aut.is_independent(s.as_str(), b.as_str(), a.as_str()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn step_is_a_function(
        n_states in 1usize..6,
        n_events in 1usize..5,
        pool in prop::collection::vec(any::<u32>(), 32..128),
    ) {
        let aut = random_automaton(n_states, n_events, &pool).build().unwrap();
        for s in aut.states() {
            for a in aut.events() {
                let once = aut.step(s.as_str(), a.as_str()).unwrap();
                let twice = aut.step(s.as_str(), a.as_str()).unwrap();
                prop_assert_eq!(once, twice);
                let has_edge = aut.transitions().any(|t| &t.src == s && &t.event == a);
                prop_assert_eq!(once.is_some(), has_edge);
            }
        }
    }

    #[test]
    fn empty_independence_passes_diamond(
        n_states in 1usize..6,
        n_events in 0usize..4,
        pool in prop::collection::vec(any::<u32>(), 32..128),
    ) {
        let mut rng = Entropy::new(&pool);
        let mut b = AutomatonBuilder::new();
        for s in 0..n_states {
            b.state(name("s", s));
        }
        b.initial("s0");
        for a in 0..n_events {
            b.event(name("a", a));
        }
        for s in 0..n_states {
            for a in 0..n_events {
                if rng.chance(60) {
                    b.transition(name("s", s), name("a", a), name("s", rng.below(n_states)));
                }
            }
        }
        let aut = b.build().unwrap();
        prop_assert!(aut.check_diamond().is_ok());
        prop_assert!(aut.check_goubault().is_ok());
    }
}
