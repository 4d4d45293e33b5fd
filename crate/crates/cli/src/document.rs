//! The plain-text document format read and written by the CLI.
//!
//! ```text
//! # comment
//! kind: coalgebra            (coalgebra | dfa | multigraph; default coalgebra)
//! functor: 1 + Id x Id
//! states: p, q, r
//! point: p
//! frontier: r                (optional: states left open by a truncation)
//! structure:
//!   p = 0: (@q, @r)
//!   q = 1: #⊥
//! ```
//!
//! Automata use `alphabet`, `states`, `initial`, `accepting` and a
//! `transitions:` block of `source letter target` lines. Multigraphs use
//! `vertices`, `root` and an `edges:` block of `[id:] source -> target`
//! lines; missing ids default to `e<index>`.
//!
//! Keys start in column 0; block lines are indented. Blank lines and lines
//! whose first visible character is `#` are ignored.

use std::fmt::Write as _;

use coalg::{
    check_shape, parse_functor, parse_value, Edge, FValue, FiniteSet, FunctorExpr, Multigraph, PartialDFA,
    PointedCoalgebra, StateId,
};
use indexmap::IndexMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("line {line}, column {column}: {msg}")]
    At { line: usize, column: usize, msg: String },
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    Model(#[from] coalg::Error),
    #[error("{0}")]
    Other(String),
}

type Result<T, E = DocError> = std::result::Result<T, E>;

/// A coalgebra cut off at its frontier; frontier states carry no structure.
#[derive(Clone, Debug)]
pub struct Truncated {
    pub functor: FunctorExpr,
    pub states: FiniteSet,
    pub point: StateId,
    pub frontier: FiniteSet,
    pub structure: IndexMap<StateId, FValue>,
}

#[derive(Clone, Debug)]
pub enum Document {
    Coalgebra(PointedCoalgebra),
    Truncated(Truncated),
    Dfa(PartialDFA),
    Multigraph(Multigraph),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Coalgebra(_) => "coalgebra",
            Document::Truncated(_) => "truncated coalgebra",
            Document::Dfa(_) => "dfa",
            Document::Multigraph(_) => "multigraph",
        }
    }

    /// The document as a pointed coalgebra, converting automata and graphs.
    pub fn coalgebra(&self) -> Result<PointedCoalgebra> {
        match self {
            Document::Coalgebra(c) => Ok(c.clone()),
            Document::Dfa(d) => Ok(coalg::dfa_to_coalgebra(d)),
            Document::Multigraph(g) => Ok(coalg::multigraph_to_bag(g)),
            Document::Truncated(t) => Err(DocError::Other(format!(
                "document is a truncated unfolding ({} frontier states); no coalgebra structure on the frontier",
                t.frontier.len()
            ))),
        }
    }
}

struct Entry<'a> {
    line: usize,
    /// byte offset of `value` within its line
    offset: usize,
    value: &'a str,
    block: Vec<(usize, &'a str)>,
}

fn split_keys(text: &str) -> Result<IndexMap<&str, Entry<'_>>> {
    let mut entries: IndexMap<&str, Entry<'_>> = IndexMap::new();
    let mut current: Option<&str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if raw.starts_with(char::is_whitespace) {
            let Some(key) = current else {
                return Err(DocError::Line {
                    line,
                    msg: "indented line outside a block".into(),
                });
            };
            entries[key].block.push((line, raw));
            continue;
        }
        let Some((key, value)) = raw.split_once(':') else {
            return Err(DocError::Line {
                line,
                msg: format!("expected `key: value`, found `{trimmed}`"),
            });
        };
        let key = key.trim();
        let value_trimmed = value.trim();
        let offset = raw.len() - value.trim_start().len();
        if entries.contains_key(key) {
            return Err(DocError::Line {
                line,
                msg: format!("duplicate key `{key}`"),
            });
        }
        entries.insert(
            key,
            Entry {
                line,
                offset,
                value: value_trimmed,
                block: Vec::new(),
            },
        );
        current = Some(key);
    }
    Ok(entries)
}

struct Keys<'a> {
    entries: IndexMap<&'a str, Entry<'a>>,
    allowed: &'static [&'static str],
}

impl<'a> Keys<'a> {
    fn check_allowed(&self, kind: &str) -> Result<()> {
        for (key, e) in &self.entries {
            if !self.allowed.contains(key) {
                return Err(DocError::Line {
                    line: e.line,
                    msg: format!("unknown key `{key}` for kind {kind}"),
                });
            }
            let is_block = matches!(*key, "structure" | "transitions" | "edges");
            if !is_block && !e.block.is_empty() {
                return Err(DocError::Line {
                    line: e.block[0].0,
                    msg: format!("`{key}` does not take an indented block"),
                });
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Result<&Entry<'a>> {
        self.entries
            .get(key)
            .ok_or_else(|| DocError::Other(format!("missing key `{key}`")))
    }

    fn names(&self, key: &str) -> Result<FiniteSet> {
        let e = self.get(key)?;
        names(e.line, e.value)
    }

    fn optional_names(&self, key: &str) -> Result<FiniteSet> {
        match self.entries.get(key) {
            Some(e) => names(e.line, e.value),
            None => Ok(FiniteSet::new()),
        }
    }

    fn name(&self, key: &str) -> Result<StateId> {
        let e = self.get(key)?;
        let set = names(e.line, e.value)?;
        match set.len() {
            1 => Ok(set.get_index(0).unwrap().clone()),
            _ => Err(DocError::Line {
                line: e.line,
                msg: format!("`{key}` takes exactly one name"),
            }),
        }
    }
}

fn names(line: usize, value: &str) -> Result<FiniteSet> {
    if value.is_empty() {
        return Ok(FiniteSet::new());
    }
    let mut set = FiniteSet::new();
    for part in value.split(',') {
        let name = part.trim();
        if name.is_empty() || !name.chars().all(coalg::syntax::is_name_char) {
            return Err(DocError::Line {
                line,
                msg: format!("invalid name `{name}`"),
            });
        }
        if !set.insert(StateId::new(name)) {
            return Err(DocError::Line {
                line,
                msg: format!("duplicate name `{name}`"),
            });
        }
    }
    Ok(set)
}

/// Re-anchors an error from a value parse at `offset` within `line`.
fn locate(line: usize, offset: usize, e: coalg::Error) -> DocError {
    match e {
        coalg::Error::Syntax { pos, msg } => DocError::At {
            line,
            column: offset + pos + 1,
            msg,
        },
        other => DocError::Line {
            line,
            msg: other.to_string(),
        },
    }
}

pub fn parse(text: &str) -> Result<Document> {
    let entries = split_keys(text)?;
    let kind = entries.get("kind").map(|e| (e.line, e.value)).unwrap_or((0, "coalgebra"));
    match kind.1 {
        "coalgebra" => parse_coalgebra(Keys {
            entries,
            allowed: &["kind", "functor", "states", "point", "frontier", "structure"],
        }),
        "dfa" => parse_dfa(Keys {
            entries,
            allowed: &["kind", "alphabet", "states", "initial", "accepting", "transitions"],
        }),
        "multigraph" => parse_multigraph(Keys {
            entries,
            allowed: &["kind", "vertices", "root", "edges"],
        }),
        other => Err(DocError::Line {
            line: kind.0,
            msg: format!("unknown kind `{other}` (expected coalgebra, dfa or multigraph)"),
        }),
    }
}

fn parse_coalgebra(keys: Keys<'_>) -> Result<Document> {
    keys.check_allowed("coalgebra")?;
    let fe = keys.get("functor")?;
    let functor = parse_functor(fe.value).map_err(|e| locate(fe.line, fe.offset, e))?;
    let states = keys.names("states")?;
    let point = keys.name("point")?;
    let frontier = keys.optional_names("frontier")?;
    if let Some(x) = frontier.iter().find(|x| !states.contains(x)) {
        return Err(DocError::Line {
            line: keys.get("frontier")?.line,
            msg: format!("frontier state `{x}` is not among the states"),
        });
    }
    let mut structure = IndexMap::new();
    for &(line, raw) in &keys.get("structure")?.block {
        let Some((name, value)) = raw.split_once('=') else {
            return Err(DocError::Line {
                line,
                msg: "expected `state = value`".into(),
            });
        };
        let name = StateId::new(name.trim());
        if !states.contains(&name) {
            return Err(DocError::Line {
                line,
                msg: coalg::Error::UnknownState(name).to_string(),
            });
        }
        if frontier.contains(&name) {
            return Err(DocError::Line {
                line,
                msg: format!("frontier state `{name}` must not have structure"),
            });
        }
        let offset = raw.len() - value.len() + (value.len() - value.trim_start().len());
        let v = parse_value(&functor, value.trim()).map_err(|e| locate(line, offset, e))?;
        check_shape(&functor, &v, &states).map_err(|e| locate(line, offset, e))?;
        if structure.insert(name.clone(), v).is_some() {
            return Err(DocError::Line {
                line,
                msg: format!("duplicate structure for `{name}`"),
            });
        }
    }
    if frontier.is_empty() {
        let c = PointedCoalgebra::new(functor, states, structure, point)?;
        return Ok(Document::Coalgebra(c));
    }
    if !states.contains(&point) {
        return Err(coalg::Error::PointOutsideCarrier(point).into());
    }
    if let Some(x) = states.iter().find(|x| !frontier.contains(x) && !structure.contains_key(*x)) {
        return Err(coalg::Error::NotTotal(x.clone()).into());
    }
    Ok(Document::Truncated(Truncated {
        functor,
        states,
        point,
        frontier,
        structure,
    }))
}

fn parse_dfa(keys: Keys<'_>) -> Result<Document> {
    keys.check_allowed("dfa")?;
    let alphabet: Vec<String> = keys.names("alphabet")?.iter().map(|a| a.as_str().to_string()).collect();
    let states = keys.names("states")?;
    let initial = keys.name("initial")?;
    let accepting = keys.optional_names("accepting")?;
    let mut transitions = Vec::new();
    if let Some(block) = keys.entries.get("transitions") {
        for &(line, raw) in &block.block {
            let parts: Vec<&str> = raw.split_whitespace().collect();
            let [q, a, r] = parts[..] else {
                return Err(DocError::Line {
                    line,
                    msg: "expected `source letter target`".into(),
                });
            };
            for s in [q, r] {
                if !states.contains(&StateId::new(s)) {
                    return Err(DocError::Line {
                        line,
                        msg: coalg::Error::UnknownState(StateId::new(s)).to_string(),
                    });
                }
            }
            if !alphabet.iter().any(|b| b == a) {
                return Err(DocError::Line {
                    line,
                    msg: coalg::Error::UnknownLetter(a.to_string()).to_string(),
                });
            }
            transitions.push((StateId::new(q), a.to_string(), StateId::new(r)));
        }
    }
    Ok(Document::Dfa(PartialDFA::new(alphabet, states, accepting, transitions, initial)?))
}

fn parse_multigraph(keys: Keys<'_>) -> Result<Document> {
    keys.check_allowed("multigraph")?;
    let vertices = keys.names("vertices")?;
    let root = keys.name("root")?;
    let mut edges = Vec::new();
    if let Some(block) = keys.entries.get("edges") {
        for (i, &(line, raw)) in block.block.iter().enumerate() {
            let (id, rest) = match raw.split_once(':') {
                Some((id, rest)) => (id.trim().to_string(), rest),
                None => (format!("e{i}"), raw),
            };
            let Some((s, t)) = rest.split_once("->") else {
                return Err(DocError::Line {
                    line,
                    msg: "expected `[id:] source -> target`".into(),
                });
            };
            let (s, t) = (StateId::new(s.trim()), StateId::new(t.trim()));
            for v in [&s, &t] {
                if !vertices.contains(v) {
                    return Err(DocError::Line {
                        line,
                        msg: coalg::Error::UnknownVertex(v.clone()).to_string(),
                    });
                }
            }
            edges.push(Edge {
                id,
                source: s,
                target: t,
            });
        }
    }
    Ok(Document::Multigraph(Multigraph::new(vertices, edges, root)?))
}

fn join<'a>(items: impl IntoIterator<Item = &'a StateId>) -> String {
    items.into_iter().map(StateId::as_str).collect::<Vec<_>>().join(", ")
}

pub fn emit_coalgebra(c: &PointedCoalgebra) -> String {
    emit_parts(c.functor(), c.carrier(), c.point(), &FiniteSet::new(), c.iter())
}

pub fn emit_truncated(t: &Truncated) -> String {
    emit_parts(&t.functor, &t.states, &t.point, &t.frontier, t.structure.iter())
}

fn emit_parts<'a>(
    functor: &FunctorExpr,
    states: &FiniteSet,
    point: &StateId,
    frontier: &FiniteSet,
    structure: impl Iterator<Item = (&'a StateId, &'a FValue)>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "kind: coalgebra");
    let _ = writeln!(out, "functor: {functor}");
    let _ = writeln!(out, "states: {}", join(states.iter()));
    let _ = writeln!(out, "point: {point}");
    if !frontier.is_empty() {
        let _ = writeln!(out, "frontier: {}", join(frontier.iter()));
    }
    let _ = writeln!(out, "structure:");
    for (x, v) in structure {
        let _ = writeln!(out, "  {x} = {v}");
    }
    out
}

pub fn emit_dfa(d: &PartialDFA) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "kind: dfa");
    let _ = writeln!(out, "alphabet: {}", d.alphabet().join(", "));
    let _ = writeln!(out, "states: {}", join(d.states().iter()));
    let _ = writeln!(out, "initial: {}", d.initial());
    let _ = writeln!(out, "accepting: {}", join(d.accepting().iter()));
    let _ = writeln!(out, "transitions:");
    for q in d.states().iter() {
        for a in d.alphabet() {
            if let Some(r) = d.step(q, a) {
                let _ = writeln!(out, "  {q} {a} {r}");
            }
        }
    }
    out
}

pub fn emit_multigraph(g: &Multigraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "kind: multigraph");
    let _ = writeln!(out, "vertices: {}", join(g.vertices().iter()));
    let _ = writeln!(out, "root: {}", g.root());
    let _ = writeln!(out, "edges:");
    for e in g.edges() {
        let _ = writeln!(out, "  {}: {} -> {}", e.id, e.source, e.target);
    }
    out
}

pub fn emit(doc: &Document) -> String {
    match doc {
        Document::Coalgebra(c) => emit_coalgebra(c),
        Document::Truncated(t) => emit_truncated(t),
        Document::Dfa(d) => emit_dfa(d),
        Document::Multigraph(g) => emit_multigraph(g),
    }
}
