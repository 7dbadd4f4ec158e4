//! Graphviz export.

use std::fmt::Write;

use crate::automaton::DistributedAutomaton;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders `aut` as a DOT digraph: one node per state (the initial one
/// double-circled), one labeled edge per transition. Each node's independent
/// pairs go into its `tooltip` and a preceding comment.
pub fn to_dot(aut: &DistributedAutomaton, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(name)).unwrap();
    writeln!(out, "    rankdir=LR;").unwrap();
    writeln!(out, "    node [shape=circle];").unwrap();
    for (si, s) in aut.states().iter().enumerate() {
        let pairs: Vec<String> = aut
            .independent_pairs_index(si)
            .map(|(a, b)| format!("({},{})", aut.events()[a], aut.events()[b]))
            .collect();
        let mut attrs = String::new();
        if si == aut.initial_index() {
            attrs.push_str("shape=doublecircle, ");
        }
        if pairs.is_empty() {
            write!(attrs, "tooltip={}", quote("indep: none")).unwrap();
        } else {
            writeln!(out, "    // indep {}: {}", s, pairs.join(" ")).unwrap();
            write!(
                attrs,
                "tooltip={}",
                quote(&format!("indep: {}", pairs.join(" ")))
            )
            .unwrap();
        }
        writeln!(out, "    {} [{attrs}];", quote(s.as_str())).unwrap();
    }
    for t in aut.transitions() {
        writeln!(
            out,
            "    {} -> {} [label={}];",
            quote(t.src.as_str()),
            quote(t.dst.as_str()),
            quote(t.event.as_str())
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::AutomatonBuilder;

    #[test]
    fn square_renders_four_nodes_four_edges() {
        let mut b = AutomatonBuilder::new();
        for s in ["s", "s1", "s2", "s'"] {
            b.state(s);
        }
        b.initial("s").event("a1").event("a2");
        b.transition("s", "a1", "s1")
            .transition("s1", "a2", "s'")
            .transition("s", "a2", "s2")
            .transition("s2", "a1", "s'")
            .independent("s", "a1", "a2");
        let dot = to_dot(&b.build().unwrap(), "diamond");
        assert_eq!(dot.matches(" -> ").count(), 4);
        assert_eq!(dot.matches("tooltip=").count(), 4);
        assert!(dot.contains("\"s\" [shape=doublecircle, tooltip=\"indep: (a1,a2)\"];"));
        assert!(dot.contains("\"s2\" -> \"s'\" [label=\"a1\"];"));
        assert!(dot.starts_with("digraph \"diamond\" {"));
    }

    #[test]
    fn nodes_only() {
        let mut b = AutomatonBuilder::new();
        b.state("a").state("b\"q").initial("a");
        let dot = to_dot(&b.build().unwrap(), "x");
        assert!(!dot.contains("->"));
        assert!(dot.contains("\"b\\\"q\" [tooltip=\"indep: none\"];"));
    }
}
