//! Line-oriented text formats for automata (`.daa`) and Petri nets (`.pnet`).
//!
//! Both formats are UTF-8, one declaration per line, tokens separated by
//! whitespace, `#` starting a comment.
//!
//! ```text
//! daa <name>                      pnet <name>
//! state <id>                      place <id> [tokens]
//! init <id>                       trans <id>
//! event <id>                      pre <trans> <place> <weight>
//! tran <src> <event> <dst>        post <trans> <place> <weight>
//! indep <state> <e1> <e2>         time <trans> <eft> <lft|inf>
//! time <event> <eft> <lft|inf>
//! ```
//!
//! Serialization is canonical: declarations are grouped by keyword in the
//! order above, so `serialize(parse(text))` is a fixed point of
//! `parse` followed by `serialize`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use thiserror::Error;

use crate::automaton::{AutomatonBuilder, DistributedAutomaton};
use crate::ident::{EventId, TransitionId};
use crate::petri::{PetriError, PetriNet, PetriNetBuilder};
use crate::time::{Time, UpperBound};
use crate::timed::{TimeBounds, TimedAutomaton, TimedError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

fn fail<T>(line: usize, reason: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        reason: reason.into(),
    })
}

/// Non-empty, comment-stripped lines as `(line number, tokens)`.
fn tokenize(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let code = raw.split_once('#').map_or(raw, |(code, _)| code);
        let tokens: Vec<&str> = code.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn expect_args<'t, 's>(
    line: usize,
    tokens: &'t [&'s str],
    min: usize,
    max: usize,
) -> Result<&'t [&'s str], ParseError> {
    let args = &tokens[1..];
    if args.len() < min || args.len() > max {
        let want = if min == max {
            format!("{min}")
        } else {
            format!("{min} to {max}")
        };
        return fail(
            line,
            format!(
                "'{}' expects {want} argument(s), got {}",
                tokens[0],
                args.len()
            ),
        );
    }
    Ok(args)
}

/// Reads the `<keyword> <name>` header, which must be the first declaration.
fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    keyword: &str,
) -> Result<String, ParseError> {
    match lines.next() {
        Some((line, tokens)) if tokens[0] == keyword => {
            let args = expect_args(line, &tokens, 1, 1)?;
            Ok(args[0].to_string())
        }
        Some((line, _)) => fail(line, format!("missing '{keyword} <name>' header")),
        None => fail(0, format!("missing '{keyword} <name>' header")),
    }
}

fn parse_time_pair(line: usize, eft: &str, lft: &str) -> Result<(Time, UpperBound), ParseError> {
    let eft: Time = eft
        .parse()
        .map_err(|e: crate::time::ParseTimeError| ParseError {
            line,
            reason: e.to_string(),
        })?;
    let lft: UpperBound = lft
        .parse()
        .map_err(|e: crate::time::ParseTimeError| ParseError {
            line,
            reason: e.to_string(),
        })?;
    if lft < eft {
        return fail(line, format!("eft {eft} exceeds lft {lft}"));
    }
    Ok((eft, lft))
}

/// A parsed `.daa` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DaaDocument {
    pub name: String,
    pub automaton: DistributedAutomaton,
    /// `(event, eft, lft)` in event declaration order; may cover only some
    /// events.
    pub times: Vec<(EventId, Time, UpperBound)>,
}

impl DaaDocument {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Self::parse_inner(text, true)
    }

    /// Like [`parse`](Self::parse) but accepts nondeterministic transitions,
    /// leaving them for [`DistributedAutomaton::check_determinism`].
    pub fn parse_permissive(text: &str) -> Result<Self, ParseError> {
        Self::parse_inner(text, false)
    }

    fn parse_inner(text: &str, deterministic: bool) -> Result<Self, ParseError> {
        let mut lines = tokenize(text);
        let name = header(&mut lines, "daa")?;

        let mut states: HashMap<&str, usize> = HashMap::new();
        let mut events: HashMap<&str, usize> = HashMap::new();
        let mut init: Option<(usize, &str)> = None;
        let mut trans = Vec::new();
        let mut indep = Vec::new();
        let mut times = Vec::new();
        let mut b = AutomatonBuilder::new();

        for (line, tokens) in lines {
            match tokens[0] {
                "state" => {
                    let id = expect_args(line, &tokens, 1, 1)?[0];
                    if states.insert(id, line).is_some() {
                        return fail(line, format!("duplicate state {id}"));
                    }
                    b.state(id);
                }
                "event" => {
                    let id = expect_args(line, &tokens, 1, 1)?[0];
                    if events.insert(id, line).is_some() {
                        return fail(line, format!("duplicate event {id}"));
                    }
                    b.event(id);
                }
                "init" => {
                    let id = expect_args(line, &tokens, 1, 1)?[0];
                    if init.is_some() {
                        return fail(line, "duplicate init");
                    }
                    init = Some((line, id));
                }
                "tran" => {
                    let a = expect_args(line, &tokens, 3, 3)?;
                    trans.push((line, a[0], a[1], a[2]));
                }
                "indep" => {
                    let a = expect_args(line, &tokens, 3, 3)?;
                    indep.push((line, a[0], a[1], a[2]));
                }
                "time" => {
                    let a = expect_args(line, &tokens, 3, 3)?;
                    let (eft, lft) = parse_time_pair(line, a[1], a[2])?;
                    times.push((line, a[0], eft, lft));
                }
                "daa" => return fail(line, "duplicate header"),
                other => return fail(line, format!("unknown keyword '{other}'")),
            }
        }

        let known_state = |line: usize, id: &str| {
            if states.contains_key(id) {
                Ok(())
            } else {
                fail(line, format!("unknown state {id}"))
            }
        };
        let known_event = |line: usize, id: &str| {
            if events.contains_key(id) {
                Ok(())
            } else {
                fail(line, format!("unknown event {id}"))
            }
        };

        let Some((line, init)) = init else {
            return fail(0, "missing init");
        };
        known_state(line, init)?;
        b.initial(init);

        let mut successor: HashMap<(&str, &str), &str> = HashMap::new();
        for &(line, src, event, dst) in &trans {
            known_state(line, src)?;
            known_event(line, event)?;
            known_state(line, dst)?;
            match successor.get(&(src, event)) {
                Some(&prev) if prev != dst && deterministic => {
                    return fail(
                        line,
                        format!(
                            "nondeterministic tran violates axiom (i): {src} --{event}--> {prev} and {dst}"
                        ),
                    );
                }
                Some(_) => {}
                None => {
                    successor.insert((src, event), dst);
                }
            }
            b.transition(src, event, dst);
        }
        for &(line, s, e1, e2) in &indep {
            known_state(line, s)?;
            known_event(line, e1)?;
            known_event(line, e2)?;
            if e1 == e2 {
                return fail(line, format!("reflexive indep pair ({e1},{e1}) at {s}"));
            }
            b.independent(s, e1, e2);
        }

        let automaton = if deterministic {
            b.build()
        } else {
            b.build_permissive()
        }
        .map_err(|e| ParseError {
            line: 0,
            reason: e.to_string(),
        })?;

        let mut timed: HashSet<&str> = HashSet::new();
        for &(line, e, _, _) in &times {
            known_event(line, e)?;
            if !timed.insert(e) {
                return fail(line, format!("duplicate time for event {e}"));
            }
        }
        times.sort_by_key(|&(_, e, _, _)| automaton.event_index(e));
        let times = times
            .into_iter()
            .map(|(_, e, eft, lft)| (EventId::new(e).expect("validated token"), eft, lft))
            .collect();

        Ok(DaaDocument {
            name,
            automaton,
            times,
        })
    }

    pub fn serialize(&self) -> String {
        let aut = &self.automaton;
        let mut out = String::new();
        writeln!(out, "daa {}", self.name).unwrap();
        for s in aut.states() {
            writeln!(out, "state {s}").unwrap();
        }
        writeln!(out, "init {}", aut.initial()).unwrap();
        for e in aut.events() {
            writeln!(out, "event {e}").unwrap();
        }
        for t in aut.transitions() {
            writeln!(out, "tran {} {} {}", t.src, t.event, t.dst).unwrap();
        }
        for (si, s) in aut.states().iter().enumerate() {
            for (a, b) in aut.independent_pairs_index(si) {
                writeln!(out, "indep {s} {} {}", aut.events()[a], aut.events()[b]).unwrap();
            }
        }
        for (e, eft, lft) in &self.times {
            writeln!(out, "time {e} {eft} {lft}").unwrap();
        }
        out
    }

    /// The timed automaton, if every event has a `time` line.
    pub fn timed(&self) -> Result<TimedAutomaton, TimedError> {
        let mut bounds = TimeBounds::new();
        for (e, eft, lft) in &self.times {
            bounds.set(e.as_str(), *eft, *lft);
        }
        TimedAutomaton::new(self.automaton.clone(), &bounds)
    }
}

/// A parsed `.pnet` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnetDocument {
    pub name: String,
    pub net: PetriNet,
    /// `(transition, eft, lft)` in transition declaration order.
    pub times: Vec<(TransitionId, Time, UpperBound)>,
}

impl PnetDocument {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = tokenize(text);
        let name = header(&mut lines, "pnet")?;

        let mut places: HashSet<&str> = HashSet::new();
        let mut transitions: HashSet<&str> = HashSet::new();
        let mut arcs = Vec::new();
        let mut times = Vec::new();
        let mut b = PetriNetBuilder::new();

        let weight = |line: usize, w: &str| {
            w.parse::<u64>()
                .or_else(|_| fail(line, format!("malformed number {w:?}")))
        };

        for (line, tokens) in lines {
            match tokens[0] {
                "place" => {
                    let a = expect_args(line, &tokens, 1, 2)?;
                    let tokens = match a.get(1) {
                        Some(n) => weight(line, n)?,
                        None => 0,
                    };
                    if !places.insert(a[0]) {
                        return fail(line, format!("duplicate place {}", a[0]));
                    }
                    b.place(a[0], tokens);
                }
                "trans" => {
                    let id = expect_args(line, &tokens, 1, 1)?[0];
                    if !transitions.insert(id) {
                        return fail(line, format!("duplicate transition {id}"));
                    }
                    b.transition(id);
                }
                kind @ ("pre" | "post") => {
                    let a = expect_args(line, &tokens, 3, 3)?;
                    arcs.push((line, kind, a[0], a[1], weight(line, a[2])?));
                }
                "time" => {
                    let a = expect_args(line, &tokens, 3, 3)?;
                    let (eft, lft) = parse_time_pair(line, a[1], a[2])?;
                    times.push((line, a[0], eft, lft));
                }
                "pnet" => return fail(line, "duplicate header"),
                other => return fail(line, format!("unknown keyword '{other}'")),
            }
        }

        let mut seen_arcs = HashSet::new();
        for &(line, kind, t, p, w) in &arcs {
            if !transitions.contains(t) {
                return fail(line, format!("unknown transition {t}"));
            }
            if !places.contains(p) {
                return fail(line, format!("unknown place {p}"));
            }
            if !seen_arcs.insert((kind, t, p)) {
                return fail(line, format!("duplicate {kind} arc {t} {p}"));
            }
            if kind == "pre" {
                b.pre(t, p, w);
            } else {
                b.post(t, p, w);
            }
        }
        let net = b.build().map_err(|e| ParseError {
            line: 0,
            reason: e.to_string(),
        })?;

        let mut timed = HashSet::new();
        for &(line, t, _, _) in &times {
            if !transitions.contains(t) {
                return fail(line, format!("unknown transition {t}"));
            }
            if !timed.insert(t) {
                return fail(line, format!("duplicate time for transition {t}"));
            }
        }
        times.sort_by_key(|&(_, t, _, _)| net.transition_index(t));
        let times = times
            .into_iter()
            .map(|(_, t, eft, lft)| (TransitionId::new(t).expect("validated token"), eft, lft))
            .collect();

        Ok(PnetDocument { name, net, times })
    }

    pub fn serialize(&self) -> String {
        let net = &self.net;
        let mut out = String::new();
        writeln!(out, "pnet {}", self.name).unwrap();
        for (p, &n) in net.places().iter().zip(net.initial().tokens()) {
            if n == 0 {
                writeln!(out, "place {p}").unwrap();
            } else {
                writeln!(out, "place {p} {n}").unwrap();
            }
        }
        for t in net.transitions() {
            writeln!(out, "trans {t}").unwrap();
        }
        for kind in ["pre", "post"] {
            for t in net.transitions() {
                let m = if kind == "pre" {
                    net.pre(t.as_str())
                } else {
                    net.post(t.as_str())
                }
                .expect("declared transition");
                for (p, &w) in net.places().iter().zip(m.tokens()) {
                    if w != 0 {
                        writeln!(out, "{kind} {t} {p} {w}").unwrap();
                    }
                }
            }
        }
        for (t, eft, lft) in &self.times {
            writeln!(out, "time {t} {eft} {lft}").unwrap();
        }
        out
    }

    /// Translates the net over its reachable markings, copying per-transition
    /// time bounds onto the corresponding events.
    pub fn to_daa(&self, limit: usize) -> Result<DaaDocument, PetriError> {
        let automaton = self.net.to_automaton(limit)?;
        let times = self
            .times
            .iter()
            .map(|(t, eft, lft)| {
                (
                    EventId::new(t.as_str()).expect("same token rules"),
                    *eft,
                    *lft,
                )
            })
            .collect();
        Ok(DaaDocument {
            name: self.name.clone(),
            automaton,
            times,
        })
    }
}

pub fn parse_daa(text: &str) -> Result<DaaDocument, ParseError> {
    DaaDocument::parse(text)
}

pub fn parse_pnet(text: &str) -> Result<PnetDocument, ParseError> {
    PnetDocument::parse(text)
}
