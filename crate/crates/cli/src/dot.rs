//! Graphviz rendering.
//!
//! Edges follow the positions of a state's value: tuple indices (when more
//! than one component holds states) and exponent letters form the label,
//! bag multiplicities above one are appended as `×n`. The point gets an
//! incoming edge from a dot-shaped marker node.

use std::fmt::Write as _;

use coalg::{FValue, FiniteSet, Multigraph, PartialDFA, PointedCoalgebra, StateId};

use crate::document::{Document, Truncated};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn holds_states(v: &FValue) -> bool {
    match v {
        FValue::State(_) => true,
        FValue::Const(_) => false,
        FValue::Tuple(items) => items.iter().any(holds_states),
        FValue::Inj(_, v) => holds_states(v),
        FValue::Map(m) => m.values().any(holds_states),
        FValue::Bag(m) => !m.is_empty(),
        FValue::Pow(s) => !s.is_empty(),
    }
}

/// `(label, target, multiplicity)` for every state occurrence in `v`.
fn occurrences(v: &FValue, path: &mut Vec<String>, mult: u32, out: &mut Vec<(String, StateId, u32)>) {
    match v {
        FValue::State(s) => out.push((path.join("."), s.clone(), mult)),
        FValue::Const(_) => {}
        FValue::Tuple(items) => {
            let labelled = items.iter().filter(|v| holds_states(v)).count() > 1;
            for (i, item) in items.iter().enumerate() {
                if labelled {
                    path.push(i.to_string());
                }
                occurrences(item, path, mult, out);
                if labelled {
                    path.pop();
                }
            }
        }
        FValue::Inj(_, v) => occurrences(v, path, mult, out),
        FValue::Map(m) => {
            for (a, v) in m {
                path.push(a.clone());
                occurrences(v, path, mult, out);
                path.pop();
            }
        }
        FValue::Bag(m) => {
            for (v, n) in m {
                occurrences(v, path, mult * n, out);
            }
        }
        FValue::Pow(s) => {
            for v in s {
                occurrences(v, path, mult, out);
            }
        }
    }
}

struct Writer {
    out: String,
}

impl Writer {
    fn new(name: &str) -> Self {
        let mut out = String::new();
        let _ = writeln!(out, "digraph {name} {{");
        let _ = writeln!(out, "  rankdir=TB;");
        let _ = writeln!(out, "  node [shape=circle];");
        Writer { out }
    }

    fn point(&mut self, p: &StateId) {
        let _ = writeln!(self.out, "  \"__point\" [shape=point, label=\"\"];");
        let _ = writeln!(self.out, "  \"__point\" -> {};", quote(p.as_str()));
    }

    fn node(&mut self, x: &StateId, attrs: &str) {
        if attrs.is_empty() {
            let _ = writeln!(self.out, "  {};", quote(x.as_str()));
        } else {
            let _ = writeln!(self.out, "  {} [{attrs}];", quote(x.as_str()));
        }
    }

    fn edge(&mut self, x: &StateId, y: &StateId, label: &str) {
        let (x, y) = (quote(x.as_str()), quote(y.as_str()));
        if label.is_empty() {
            let _ = writeln!(self.out, "  {x} -> {y};");
        } else {
            let _ = writeln!(self.out, "  {x} -> {y} [label={}];", quote(label));
        }
    }

    fn finish(mut self) -> String {
        self.out.push_str("}\n");
        self.out
    }
}

fn value_edges(w: &mut Writer, x: &StateId, v: &FValue) {
    let mut occ = Vec::new();
    occurrences(v, &mut Vec::new(), 1, &mut occ);
    for (label, y, n) in occ {
        let label = match (label.is_empty(), n) {
            (_, 1) => label,
            (true, n) => format!("×{n}"),
            (false, n) => format!("{label} ×{n}"),
        };
        w.edge(x, &y, &label);
    }
}

fn render_structure<'a>(
    states: &FiniteSet,
    point: &StateId,
    frontier: &FiniteSet,
    structure: impl Iterator<Item = (&'a StateId, &'a FValue)>,
) -> String {
    let mut w = Writer::new("coalgebra");
    w.point(point);
    for x in states.iter() {
        w.node(x, if frontier.contains(x) { "style=dashed" } else { "" });
    }
    for (x, v) in structure {
        value_edges(&mut w, x, v);
    }
    w.finish()
}

pub fn coalgebra(c: &PointedCoalgebra) -> String {
    render_structure(c.carrier(), c.point(), &FiniteSet::new(), c.iter())
}

pub fn truncated(t: &Truncated) -> String {
    render_structure(&t.states, &t.point, &t.frontier, t.structure.iter())
}

pub fn dfa(d: &PartialDFA) -> String {
    let mut w = Writer::new("dfa");
    w.point(d.initial());
    for q in d.states().iter() {
        let accepting = d.accepting().contains(q);
        w.node(q, if accepting { "shape=doublecircle" } else { "" });
    }
    for q in d.states().iter() {
        for a in d.alphabet() {
            if let Some(r) = d.step(q, a) {
                w.edge(q, r, a);
            }
        }
    }
    w.finish()
}

pub fn multigraph(g: &Multigraph) -> String {
    let mut w = Writer::new("multigraph");
    w.point(g.root());
    for v in g.vertices().iter() {
        w.node(v, "");
    }
    for e in g.edges() {
        w.edge(&e.source, &e.target, &e.id);
    }
    w.finish()
}

pub fn document(doc: &Document) -> String {
    match doc {
        Document::Coalgebra(c) => coalgebra(c),
        Document::Truncated(t) => truncated(t),
        Document::Dfa(d) => dfa(d),
        Document::Multigraph(g) => multigraph(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use coalg::fixtures;

    fn edges(dot: &str) -> Vec<&str> {
        dot.lines().filter(|l| l.contains("->") && !l.contains("__point")).collect()
    }

    #[test]
    fn double_edge_graph_keeps_both_edges() {
        let dot = multigraph(&fixtures::double_edge_graph());
        assert_eq!(edges(&dot).iter().filter(|l| l.contains("\"p\" -> \"q\"")).count(), 2);
    }

    #[test]
    fn bag_multiplicity_is_a_label() {
        let dot = coalgebra(&fixtures::bag_double());
        assert_eq!(edges(&dot), ["  \"p\" -> \"q\" [label=\"×2\"];"]);
    }

    #[test]
    fn pair_positions_label_edges() {
        let dot = coalgebra(&fixtures::cherry());
        assert_eq!(
            edges(&dot),
            ["  \"p\" -> \"q\" [label=\"0\"];", "  \"p\" -> \"r\" [label=\"1\"];"]
        );
    }

    #[test]
    fn automaton_edges_carry_letters() {
        let dot = coalgebra(&coalg::dfa_to_coalgebra(
            &PartialDFA::new(
                ["a"],
                FiniteSet::from_names(["q0", "q1"]).unwrap(),
                FiniteSet::new(),
                [("q0".into(), "a".to_string(), "q1".into())],
                "q0".into(),
            )
            .unwrap(),
        ));
        assert_eq!(edges(&dot), ["  \"q0\" -> \"q1\" [label=\"a\"];"]);
    }

    #[test]
    fn singleton_has_one_node() {
        let dot = coalgebra(&fixtures::singleton_bottom());
        assert!(edges(&dot).is_empty());
        let nodes = dot.lines().filter(|l| l.starts_with("  \"") && !l.contains("->") && !l.contains("__point"));
        assert_eq!(nodes.count(), 1);
    }

    #[test]
    fn names_are_escaped() {
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }
}
