//! Partial deterministic automata and rooted multigraphs, with their
//! defined-inputs and rooted-paths unfoldings.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use indexmap::IndexMap;

use crate::coalgebra::{multigraph_to_bag, Multigraph, PointedCoalgebra, Unfolding};
use crate::error::{Error, Result};
use crate::functor::{FValue, FiniteSet, FunctorExpr, StateId, TotalMap};
use crate::unravel::{has_reachable_cycle, UNRAVEL_GUARD};

/// `⟨o, δ⟩: C → 2 × (C + 1)^A` with δ partial.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartialDFA {
    alphabet: Vec<String>,
    states: FiniteSet,
    accepting: FiniteSet,
    delta: BTreeMap<(StateId, String), StateId>,
    initial: StateId,
}

impl PartialDFA {
    pub fn new<I, T>(alphabet: I, states: FiniteSet, accepting: FiniteSet, transitions: T, initial: StateId) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<String>,
        T: IntoIterator<Item = (StateId, String, StateId)>,
    {
        let mut letters: Vec<String> = Vec::new();
        for a in alphabet {
            let a = a.into();
            if a.is_empty() {
                return Err(Error::Invalid("letters must be non-empty".into()));
            }
            if letters.contains(&a) {
                return Err(Error::Duplicate(a));
            }
            letters.push(a);
        }
        if letters.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if !states.contains(&initial) {
            return Err(Error::PointOutsideCarrier(initial));
        }
        if let Some(q) = accepting.iter().find(|q| !states.contains(q)) {
            return Err(Error::UnknownState(q.clone()));
        }
        let mut delta = BTreeMap::new();
        for (q, a, r) in transitions {
            for s in [&q, &r] {
                if !states.contains(s) {
                    return Err(Error::UnknownState(s.clone()));
                }
            }
            if !letters.contains(&a) {
                return Err(Error::UnknownLetter(a));
            }
            if delta.insert((q.clone(), a.clone()), r).is_some() {
                return Err(Error::Duplicate(format!("transition {q} {a}")));
            }
        }
        Ok(PartialDFA {
            alphabet: letters,
            states,
            accepting,
            delta,
            initial,
        })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn states(&self) -> &FiniteSet {
        &self.states
    }

    pub fn accepting(&self) -> &FiniteSet {
        &self.accepting
    }

    pub fn initial(&self) -> &StateId {
        &self.initial
    }

    pub fn step(&self, q: &StateId, a: &str) -> Option<&StateId> {
        self.delta.get(&(q.clone(), a.to_string()))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&StateId, &str, &StateId)> + '_ {
        self.delta.iter().map(|((q, a), r)| (q, a.as_str(), r))
    }

    pub fn functor(&self) -> FunctorExpr {
        FunctorExpr::partial_dfa(self.alphabet.iter().map(String::as_str)).expect("alphabet is non-empty")
    }

    fn output(&self, q: &StateId) -> FValue {
        FValue::constant(if self.accepting.contains(q) { "1" } else { "0" })
    }
}

pub fn dfa_to_coalgebra(d: &PartialDFA) -> PointedCoalgebra {
    let structure = d.states.iter().map(|q| {
        let moves = d.alphabet.iter().map(|a| {
            let v = match d.step(q, a) {
                Some(r) => FValue::inj(0, FValue::state(r.clone())),
                None => FValue::inj(1, FValue::bottom()),
            };
            (a.clone(), v)
        });
        (q.clone(), FValue::tuple([d.output(q), FValue::map(moves)]))
    });
    PointedCoalgebra::new(d.functor(), d.states.clone(), structure, d.initial.clone())
        .expect("automaton is well-formed")
}

/// Runs `word` from the initial state; `None` once a transition is undefined.
pub fn delta_star<S: AsRef<str>>(d: &PartialDFA, word: &[S]) -> Result<Option<StateId>> {
    let mut q = d.initial.clone();
    for a in word {
        let a = a.as_ref();
        if !d.alphabet.iter().any(|b| b == a) {
            return Err(Error::UnknownLetter(a.to_string()));
        }
        match d.step(&q, a) {
            Some(r) => q = r.clone(),
            None => {
                // undefined absorbs, but later letters must still be valid
                for b in word {
                    if !d.alphabet.iter().any(|c| c == b.as_ref()) {
                        return Err(Error::UnknownLetter(b.as_ref().to_string()));
                    }
                }
                return Ok(None);
            }
        }
    }
    Ok(Some(q))
}

pub const EMPTY_WORD: &str = "ε";

/// Names a word or path: `ε`, letters run together when all are single
/// characters, dot-separated otherwise.
fn word_name(letters: &[&str], dotted: bool) -> StateId {
    if letters.is_empty() {
        StateId::new(EMPTY_WORD)
    } else if dotted {
        StateId::new(letters.join("."))
    } else {
        StateId::new(letters.concat())
    }
}

/// Breadth-first unfolding of a deterministic-branching structure.
///
/// `children(node)` lists `(label, child)` for each outgoing step; the result
/// holds every node at depth `< max_len` with its children, plus the nodes at
/// depth `max_len` as frontier when `complete` is false.
struct Enumerated {
    nodes: Vec<(Vec<usize>, StateId, StateId)>, // (labels, name, image)
    children: IndexMap<StateId, Vec<(usize, StateId)>>,
    frontier: FiniteSet,
}

fn enumerate<F>(
    start: &StateId,
    labels: &[String],
    dotted: bool,
    complete: bool,
    max_len: usize,
    mut next: F,
) -> Result<Enumerated>
where
    F: FnMut(&StateId) -> Vec<(usize, StateId)>,
{
    let mut out = Enumerated {
        nodes: Vec::new(),
        children: IndexMap::new(),
        frontier: FiniteSet::new(),
    };
    let mut queue: VecDeque<(Vec<usize>, StateId)> = VecDeque::from([(Vec::new(), start.clone())]);
    let mut names = HashSet::new();
    while let Some((word, image)) = queue.pop_front() {
        let name = word_name(&word.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>(), dotted);
        if !names.insert(name.clone()) {
            return Err(Error::Duplicate(name.to_string()));
        }
        if out.nodes.len() >= UNRAVEL_GUARD {
            return Err(Error::SearchSpaceTooLarge {
                size: (out.nodes.len() + queue.len() + 1) as u128,
                guard: UNRAVEL_GUARD as u128,
            });
        }
        out.nodes.push((word.clone(), name.clone(), image.clone()));
        if !complete && word.len() >= max_len {
            out.frontier.insert(name);
            continue;
        }
        let mut kids = Vec::new();
        for (label, child) in next(&image) {
            let mut w = word.clone();
            w.push(label);
            let child_name = word_name(&w.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>(), dotted);
            kids.push((label, child_name));
            queue.push_back((w, child));
        }
        out.children.insert(name, kids);
    }
    Ok(out)
}

/// The coalgebra of defined inputs, with `δ*` as projection.
///
/// Finite (and complete) exactly when no cycle is reachable; otherwise cut
/// off at words of length `max_len`.
pub fn defined_inputs(d: &PartialDFA, max_len: usize) -> Result<Unfolding> {
    let c = dfa_to_coalgebra(d);
    let complete = !has_reachable_cycle(&c);
    let dotted = d.alphabet.iter().any(|a| a.chars().count() != 1);
    let en = enumerate(&d.initial, &d.alphabet, dotted, complete, max_len, |q| {
        d.alphabet
            .iter()
            .enumerate()
            .filter_map(|(i, a)| d.step(q, a).map(|r| (i, r.clone())))
            .collect()
    })?;
    let states: FiniteSet = en.nodes.iter().map(|(_, n, _)| n.clone()).collect();
    let projection = TotalMap::new(
        states.clone(),
        d.states.clone(),
        en.nodes.iter().map(|(_, n, q)| (n.clone(), q.clone())),
    )?;
    let mut structure = IndexMap::new();
    for (_, name, q) in &en.nodes {
        let Some(kids) = en.children.get(name) else {
            continue;
        };
        let by_letter: HashMap<usize, &StateId> = kids.iter().map(|(i, n)| (*i, n)).collect();
        let moves = d.alphabet.iter().enumerate().map(|(i, a)| {
            let v = match by_letter.get(&i) {
                Some(w) => FValue::inj(0, FValue::state((*w).clone())),
                None => FValue::inj(1, FValue::bottom()),
            };
            (a.clone(), v)
        });
        structure.insert(name.clone(), FValue::tuple([d.output(q), FValue::map(moves)]));
    }
    Ok(Unfolding {
        functor: d.functor(),
        point: StateId::new(EMPTY_WORD),
        states,
        structure,
        frontier: en.frontier,
        projection,
        complete,
    })
}

/// The bag coalgebra of rooted paths, with the target map as projection.
///
/// Paths are named by their dot-joined edge ids; the empty path is `ε`.
pub fn rooted_paths(g: &Multigraph, max_len: usize) -> Result<Unfolding> {
    let complete = !has_reachable_cycle(&multigraph_to_bag(g));
    let ids: Vec<String> = g.edges().iter().map(|e| e.id.clone()).collect();
    let mut out: HashMap<&StateId, Vec<(usize, StateId)>> = HashMap::new();
    for (i, e) in g.edges().iter().enumerate() {
        out.entry(&e.source).or_default().push((i, e.target.clone()));
    }
    let en = enumerate(g.root(), &ids, true, complete, max_len, |v| {
        out.get(v).cloned().unwrap_or_default()
    })?;
    let states: FiniteSet = en.nodes.iter().map(|(_, n, _)| n.clone()).collect();
    let projection = TotalMap::new(
        states.clone(),
        g.vertices().clone(),
        en.nodes.iter().map(|(_, n, v)| (n.clone(), v.clone())),
    )?;
    let structure = en
        .children
        .into_iter()
        .map(|(p, kids)| (p, FValue::bag(kids.into_iter().map(|(_, q)| (FValue::State(q), 1)))))
        .collect();
    Ok(Unfolding {
        functor: FunctorExpr::Bag,
        point: StateId::new(EMPTY_WORD),
        states,
        structure,
        frontier: en.frontier,
        projection,
        complete,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PathCount {
    /// Saturates at `u64::MAX`.
    Finite(u64),
    Infinite,
}

impl std::fmt::Display for PathCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathCount::Finite(n) => write!(f, "{n}"),
            PathCount::Infinite => f.write_str("infinite"),
        }
    }
}

fn closure<'a>(succ: &HashMap<&'a StateId, Vec<&'a StateId>>, from: impl IntoIterator<Item = &'a StateId>) -> HashSet<&'a StateId> {
    let mut seen: HashSet<&StateId> = HashSet::new();
    let mut stack: Vec<&StateId> = from.into_iter().collect();
    while let Some(v) = stack.pop() {
        if seen.insert(v) {
            stack.extend(succ.get(v).into_iter().flatten().copied());
        }
    }
    seen
}

/// Number of paths from each vertex's root, for every vertex.
pub fn path_counts(g: &Multigraph) -> IndexMap<StateId, PathCount> {
    let mut succ: HashMap<&StateId, Vec<&StateId>> = HashMap::new();
    for e in g.edges() {
        succ.entry(&e.source).or_default().push(&e.target);
    }
    let reachable = closure(&succ, [g.root()]);
    // a vertex lies on a cycle iff it can reach itself in one or more steps
    let on_cycle: Vec<&StateId> = reachable
        .iter()
        .copied()
        .filter(|v| closure(&succ, succ.get(v).into_iter().flatten().copied()).contains(v))
        .collect();
    let infinite = closure(&succ, on_cycle);

    // the remaining reachable part is acyclic; count in topological order
    let mut indeg: HashMap<&StateId, usize> = HashMap::new();
    for e in g.edges() {
        if reachable.contains(&e.source) && !infinite.contains(&e.source) {
            *indeg.entry(&e.target).or_default() += 1;
        }
    }
    let mut counts: HashMap<&StateId, u64> = HashMap::new();
    let mut ready: Vec<&StateId> = Vec::new();
    if !infinite.contains(g.root()) {
        counts.insert(g.root(), 1);
        ready.push(g.root());
    }
    while let Some(v) = ready.pop() {
        let n = counts[v];
        for w in succ.get(v).into_iter().flatten() {
            if infinite.contains(w) {
                continue;
            }
            let c = counts.entry(w).or_default();
            *c = c.saturating_add(n);
            let d = indeg.get_mut(w).expect("counted edge");
            *d -= 1;
            if *d == 0 {
                ready.push(w);
            }
        }
    }
    g.vertices()
        .iter()
        .map(|v| {
            let c = if infinite.contains(v) {
                PathCount::Infinite
            } else {
                PathCount::Finite(counts.get(v).copied().unwrap_or(0))
            };
            (v.clone(), c)
        })
        .collect()
}

/// `|Path(root, v)|`
pub fn path_count(g: &Multigraph, v: &StateId) -> Result<PathCount> {
    if !g.vertices().contains(v) {
        return Err(Error::UnknownVertex(v.clone()));
    }
    Ok(path_counts(g)[v])
}

/// Exactly one path from the root to every vertex.
pub fn graph_is_tree(g: &Multigraph) -> bool {
    path_counts(g).values().all(|c| *c == PathCount::Finite(1))
}
