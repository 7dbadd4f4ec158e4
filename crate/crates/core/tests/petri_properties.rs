use std::collections::{BTreeSet, HashSet, VecDeque};

use daa_core::{Marking, PetriError, PetriNet, PetriNetBuilder};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct NetSpec {
    initial: Vec<u64>,
    pre: Vec<Vec<u64>>,
    post: Vec<Vec<u64>>,
}

impl NetSpec {
    fn build(&self) -> PetriNet {
        let mut b = PetriNetBuilder::new();
        for (p, &n) in self.initial.iter().enumerate() {
            b.place(format!("p{p}"), n);
        }
        for t in 0..self.pre.len() {
            b.transition(format!("t{t}"));
            for p in 0..self.initial.len() {
                b.pre(format!("t{t}"), format!("p{p}"), self.pre[t][p]);
                b.post(format!("t{t}"), format!("p{p}"), self.post[t][p]);
            }
        }
        b.build().unwrap()
    }
}

fn net_spec() -> impl Strategy<Value = NetSpec> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(places, transitions)| {
        let weights =
            || prop::collection::vec(prop::collection::vec(0u64..=2, places), transitions);
        (
            prop::collection::vec(0u64..=3, places),
            weights(),
            weights(),
        )
            .prop_map(|(initial, pre, post)| NetSpec { initial, pre, post })
    })
}

/// Token game on raw vectors, independent of `PetriNet::fire`.
fn brute_fire(spec: &NetSpec, m: &[u64], t: usize) -> Option<Vec<u64>> {
    m.iter()
        .zip(&spec.pre[t])
        .zip(&spec.post[t])
        .map(|((&have, &take), &give)| (have >= take).then(|| have - take + give))
        .collect()
}

fn brute_reachable(spec: &NetSpec, limit: usize) -> Option<BTreeSet<Vec<u64>>> {
    let mut seen = BTreeSet::from([spec.initial.clone()]);
    let mut queue = VecDeque::from([spec.initial.clone()]);
    while let Some(m) = queue.pop_front() {
        for t in 0..spec.pre.len() {
            if let Some(next) = brute_fire(spec, &m, t) {
                if seen.insert(next.clone()) {
                    if seen.len() > limit {
                        return None;
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    Some(seen)
}

const LIMIT: usize = 500;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn translation_satisfies_both_axioms(spec in net_spec()) {
        let net = spec.build();
        match net.to_automaton(LIMIT) {
            Err(PetriError::LimitExceeded(_)) => {}
            Err(e) => prop_assert!(false, "unexpected {e}"),
            Ok(aut) => {
                prop_assert!(aut.check_determinism().is_ok());
                prop_assert!(aut.check_diamond().is_ok());
            }
        }
    }

    #[test]
    fn independent_pairs_commute(spec in net_spec()) {
        let net = spec.build();
        let Ok(markings) = net.reachable_markings(LIMIT) else { return Ok(()) };
        for m in &markings {
            for (t1, t2) in net.independence_at(m).unwrap() {
                let m1 = net.fire(m, t1.as_str()).unwrap();
                let m2 = net.fire(m, t2.as_str()).unwrap();
                let m12 = net.fire(&m1, t2.as_str()).unwrap();
                let m21 = net.fire(&m2, t1.as_str()).unwrap();
                prop_assert_eq!(m12, m21);
            }
        }
    }

    #[test]
    fn firing_conserves_tokens(spec in net_spec()) {
        let net = spec.build();
        let m = net.initial().clone();
        for (ti, t) in net.transitions().iter().enumerate() {
            match net.fire(&m, t.as_str()) {
                Ok(next) => {
                    for p in 0..m.tokens().len() {
                        prop_assert_eq!(
                            next.tokens()[p] as i64,
                            m.tokens()[p] as i64 - spec.pre[ti][p] as i64 + spec.post[ti][p] as i64
                        );
                    }
                }
                Err(PetriError::NotEnabled { .. }) => {
                    prop_assert!(!net.enabled(&m, t.as_str()).unwrap());
                }
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }
    }

    #[test]
    fn independence_matches_formula(spec in net_spec(), m in prop::collection::vec(0u64..=3, 5)) {
        let net = spec.build();
        let m = Marking::new(m[..spec.initial.len()].to_vec());
        let got: HashSet<(String, String)> = net
            .independence_at(&m)
            .unwrap()
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let n = spec.pre.len();
        let enabled = |t: usize| m.tokens().iter().zip(&spec.pre[t]).all(|(h, w)| h >= w);
        let pair = |a: usize, b: usize| (format!("t{a}"), format!("t{b}"));
        for t1 in 0..n {
            let self_pair = pair(t1, t1);
            prop_assert!(!got.contains(&self_pair));
            for t2 in t1 + 1..n {
                let disjoint = (0..spec.initial.len())
                    .all(|p| spec.pre[t1][p] == 0 || spec.pre[t2][p] == 0);
                let expected = enabled(t1) && enabled(t2) && disjoint;
                prop_assert_eq!(got.contains(&pair(t1, t2)), expected);
                let reversed = pair(t2, t1);
                prop_assert!(!got.contains(&reversed));
            }
        }
    }

    #[test]
    fn reachable_set_is_closed_and_matches_brute_force(spec in net_spec()) {
        let net = spec.build();
        let got = net.reachable_markings(LIMIT);
        let expected = brute_reachable(&spec, LIMIT);
        match (got, expected) {
            (Ok(list), Some(set)) => {
                let as_set: BTreeSet<Vec<u64>> = list.iter().map(|m| m.tokens().to_vec()).collect();
                prop_assert_eq!(as_set.len(), list.len());
                prop_assert_eq!(&as_set, &set);
                for m in &list {
                    for t in net.transitions() {
                        if let Ok(next) = net.fire(m, t.as_str()) {
                            prop_assert!(as_set.contains(next.tokens()));
                        }
                    }
                }
            }
            (Err(PetriError::LimitExceeded(_)), None) => {}
            (got, expected) => prop_assert!(false, "{got:?} vs {expected:?}"),
        }
    }
}

#[test]
fn omega_edges_match_brute_force_token_game() {
    // t1: p1 -> p2, t2: p3 -> p2, t3: p2 -> p1, t4: p2 -> p3
    let spec = NetSpec {
        initial: vec![1, 0, 1],
        pre: vec![vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 0]],
        post: vec![vec![0, 1, 0], vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]],
    };
    let markings = brute_reachable(&spec, 100).unwrap();
    let mut expected = BTreeSet::new();
    for m in &markings {
        for t in 0..4 {
            if let Some(next) = brute_fire(&spec, m, t) {
                let name = |v: &[u64]| {
                    format!(
                        "({})",
                        v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
                    )
                };
                expected.insert((name(m), format!("t{t}"), name(&next)));
            }
        }
    }
    let aut = spec.build().to_automaton(100).unwrap();
    let got: BTreeSet<(String, String, String)> = aut
        .transitions()
        .map(|t| (t.src.to_string(), t.event.to_string(), t.dst.to_string()))
        .collect();
    assert_eq!(got, expected);
    assert_eq!(aut.states().len(), 6);
    // enabled transitions per marking: 2 + 3 + 3 + 2 + 1 + 1
    assert_eq!(got.len(), 12);
}
