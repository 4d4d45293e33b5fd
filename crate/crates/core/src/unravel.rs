//! Tree unravelling by iterated precise factorization.
//!
//! Level `T_0` is the point. Given `h_k: T_k → C`, the precise factorization
//! of `c · h_k` yields `t_k: T_k → F(T_{k+1})` and `h_{k+1}: T_{k+1} → C`.
//! The coproduct of the levels, mapped to `C` by `[h_k]`, is the unravelling.
//!
//! Tree states are named `target/step/step/…`, one step per edge from the
//! root, where a step is the position of the child inside its parent's value
//! (`0` when the value has a single position). The root keeps the point's name.

use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;

use crate::coalgebra::{canonical_graph, PointedCoalgebra, Unfolding};
use crate::error::{Error, Result};
use crate::factor::{precise_factorize, FMap};
use crate::functor::{fmap, FiniteSet, StateId, TotalMap};
use crate::reach::reachable_part;

/// Largest unravelling (in states) that [`tree_unravelling`] will build.
pub const UNRAVEL_GUARD: usize = 200_000;

#[derive(Clone, Debug)]
pub struct TreeLevels {
    /// `T_0, …, T_n`; the last level is empty unless truncated.
    pub levels: Vec<FiniteSet>,
    /// `t_k: T_k → F(T_{k+1})`, one per level but the last.
    pub step_maps: Vec<FMap>,
    /// `h_k: T_k → C`
    pub projections: Vec<TotalMap>,
    pub truncated: bool,
}

impl TreeLevels {
    pub fn total_states(&self) -> usize {
        self.levels.iter().map(FiniteSet::len).sum()
    }
}

pub type UnravelResult = Unfolding;

enum Stop {
    Depth,
    Size(usize),
}

struct Builder<'a> {
    c: &'a PointedCoalgebra,
    names: HashSet<StateId>,
    steps: HashMap<StateId, String>,
}

impl Builder<'_> {
    fn name(&mut self, target: &StateId, parent: &StateId, step: &str) -> StateId {
        let step = if step.is_empty() { "0" } else { step };
        let path = match self.steps.get(parent).map(String::as_str) {
            None | Some("") => step.to_string(),
            Some(p) => format!("{p}/{step}"),
        };
        let mut name = format!("{target}/{path}");
        while self.names.contains(name.as_str()) {
            name.push('\'');
        }
        let id = StateId::new(name);
        self.names.insert(id.clone());
        self.steps.insert(id.clone(), path);
        id
    }
}

/// Computes levels up to `max_depth`, giving up once more than `limit` states exist.
fn build_levels(c: &PointedCoalgebra, max_depth: usize, limit: usize) -> Result<(TreeLevels, Option<Stop>)> {
    let root = c.point().clone();
    let mut b = Builder {
        c,
        names: HashSet::from([root.clone()]),
        steps: HashMap::new(),
    };
    let t0: FiniteSet = std::iter::once(root.clone()).collect();
    let h0 = TotalMap::new(t0.clone(), c.carrier().clone(), [(root, c.point().clone())])?;
    let mut tl = TreeLevels {
        levels: vec![t0],
        step_maps: Vec::new(),
        projections: vec![h0],
        truncated: false,
    };
    let mut total = 1usize;
    for _ in 0..max_depth {
        let (level, h) = (tl.levels.last().unwrap(), tl.projections.last().unwrap());
        if level.is_empty() {
            return Ok((tl, None));
        }
        let values = h
            .iter()
            .map(|(x, y)| Ok((x.clone(), b.c.structure(y)?.clone())))
            .collect::<Result<Vec<_>>>()?;
        let f = FMap::new(c.functor().clone(), level.clone(), c.carrier().clone(), values)?;
        let pf = precise_factorize(&f)?;
        total += pf.middle.len();
        if total > limit {
            tl.truncated = true;
            return Ok((tl, Some(Stop::Size(total))));
        }
        let mut rename = Vec::with_capacity(pf.middle.len());
        for r in &pf.middle {
            let (origin, path) = &pf.provenance[r];
            let target = pf.h.apply(r)?;
            rename.push((r.clone(), b.name(target, origin, path)));
        }
        let next: FiniteSet = rename.iter().map(|(_, n)| n.clone()).collect();
        let rename = TotalMap::new(pf.middle.clone(), next.clone(), rename)?;
        let inverse = rename.inverse().expect("fresh names are distinct");
        let h_next = inverse.then(&pf.h)?;
        tl.step_maps.push(pf.p.then_fmap(&rename)?);
        tl.levels.push(next);
        tl.projections.push(h_next);
    }
    if tl.levels.last().unwrap().is_empty() {
        Ok((tl, None))
    } else {
        tl.truncated = true;
        Ok((tl, Some(Stop::Depth)))
    }
}

/// Levels `T_0 … T_max_depth`, stopping early at the first empty level.
pub fn tree_levels(c: &PointedCoalgebra, max_depth: usize) -> Result<TreeLevels> {
    Ok(build_levels(c, max_depth, usize::MAX)?.0)
}

fn assemble(c: &PointedCoalgebra, tl: &TreeLevels) -> Result<Unfolding> {
    let mut states = FiniteSet::new();
    let mut pairs = Vec::new();
    for (level, h) in tl.levels.iter().zip(&tl.projections) {
        for (x, y) in h.iter() {
            states.insert(x.clone());
            pairs.push((x.clone(), y.clone()));
        }
        debug_assert_eq!(level.len(), h.domain().len());
    }
    let mut structure = IndexMap::new();
    for t in &tl.step_maps {
        for (x, v) in t.iter() {
            structure.insert(x.clone(), v.clone());
        }
    }
    let frontier = if tl.truncated {
        tl.levels.last().cloned().unwrap_or_default()
    } else {
        FiniteSet::new()
    };
    let projection = TotalMap::new(states.clone(), c.carrier().clone(), pairs)?;
    Ok(Unfolding {
        functor: c.functor().clone(),
        point: tl.levels[0].get_index(0).expect("root").clone(),
        states,
        structure,
        frontier,
        projection,
        complete: !tl.truncated,
    })
}

/// The coproduct of the levels up to `max_depth`, with projection `[h_k]`.
pub fn unravel(c: &PointedCoalgebra, max_depth: usize) -> Result<UnravelResult> {
    if max_depth == 0 {
        return Err(Error::Invalid("unravelling depth must be positive".into()));
    }
    assemble(c, &tree_levels(c, max_depth)?)
}

/// The full unravelling when it is finite, else a truncation at
/// `default_depth` (`3·|C|` when not given).
pub fn tree_unravelling(c: &PointedCoalgebra, default_depth: Option<usize>) -> Result<UnravelResult> {
    let (tl, stop) = build_levels(c, c.len() + 1, UNRAVEL_GUARD)?;
    match stop {
        None => assemble(c, &tl),
        Some(Stop::Size(n)) => Err(size_error(n)),
        Some(Stop::Depth) => {
            let depth = default_depth.unwrap_or(3 * c.len()).max(1);
            let (tl, stop) = build_levels(c, depth, UNRAVEL_GUARD)?;
            match stop {
                Some(Stop::Size(n)) => Err(size_error(n)),
                _ => assemble(c, &tl),
            }
        }
    }
}

fn size_error(n: usize) -> Error {
    Error::SearchSpaceTooLarge {
        size: n as u128,
        guard: UNRAVEL_GUARD as u128,
    }
}

/// Why a coalgebra is not a tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TreeDiagnostic {
    /// Some powerset value is non-empty.
    PowersetDegenerate { state: StateId },
    NotReachable { reachable: FiniteSet },
    /// A cycle is reachable, so the levels never run out.
    Cycle,
    /// The levels terminate but some state is reached along several routes.
    /// `levels` is `None` when counting was abandoned past the size guard.
    Sharing { levels: Option<usize>, carrier: usize },
}

impl fmt::Display for TreeDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeDiagnostic::PowersetDegenerate { state } => {
                write!(f, "powerset-degenerate (value of {state} is a non-empty set)")
            }
            TreeDiagnostic::NotReachable { reachable } => write!(f, "not reachable (reachable part = {reachable})"),
            TreeDiagnostic::Cycle => f.write_str("cycle (levels non-empty past bound)"),
            TreeDiagnostic::Sharing { levels, carrier } => match levels {
                Some(n) => write!(f, "sharing (coproduct of levels has {n} states, carrier has {carrier})"),
                None => write!(
                    f,
                    "sharing (coproduct of levels has more than {UNRAVEL_GUARD} states, carrier has {carrier})"
                ),
            },
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TreeVerdict {
    Tree,
    NotTree(TreeDiagnostic),
}

/// Decides whether `c` is isomorphic to the coproduct of its levels.
///
/// More than `|C|` non-empty levels already give more tree states than `C`
/// has, so the levels are computed to depth `|C| + 1` at most, and abandoned
/// as soon as they hold more than `|C|` states.
pub fn is_tree(c: &PointedCoalgebra) -> Result<bool> {
    let (tl, stop) = match build_levels(c, c.len() + 1, c.len()) {
        Err(Error::PowNotPrecise(_)) => return Ok(false),
        other => other?,
    };
    if stop.is_some() {
        return Ok(false);
    }
    let u = assemble(c, &tl)?;
    Ok(u.projection.is_bijective())
}

pub fn tree_verdict(c: &PointedCoalgebra) -> Result<TreeVerdict> {
    if is_tree(c)? {
        return Ok(TreeVerdict::Tree);
    }
    let diag = diagnose(c)?;
    Ok(TreeVerdict::NotTree(diag))
}

fn diagnose(c: &PointedCoalgebra) -> Result<TreeDiagnostic> {
    let reach = reachable_part(c)?;
    let (tl, stop) = match build_levels(c, c.len() + 1, UNRAVEL_GUARD) {
        Err(Error::PowNotPrecise(state)) => return Ok(TreeDiagnostic::PowersetDegenerate { state }),
        other => other?,
    };
    if reach.sub.len() != c.len() {
        return Ok(TreeDiagnostic::NotReachable { reachable: reach.sub });
    }
    if has_reachable_cycle(c) {
        return Ok(TreeDiagnostic::Cycle);
    }
    let levels = match stop {
        Some(Stop::Size(_)) => None,
        _ => Some(tl.total_states()),
    };
    Ok(TreeDiagnostic::Sharing {
        levels,
        carrier: c.len(),
    })
}

/// Whether a cycle of the canonical graph is reachable from the point.
pub fn has_reachable_cycle(c: &PointedCoalgebra) -> bool {
    let g = canonical_graph(c);
    let mut succ: HashMap<&StateId, Vec<&StateId>> = HashMap::new();
    for e in g.edges() {
        succ.entry(&e.source).or_default().push(&e.target);
    }
    // iterative DFS with colours: 1 = on stack, 2 = done
    let mut colour: HashMap<&StateId, u8> = HashMap::new();
    let mut stack: Vec<(&StateId, usize)> = vec![(g.root(), 0)];
    colour.insert(g.root(), 1);
    while let Some((v, i)) = stack.pop() {
        let next = succ.get(v).and_then(|s| s.get(i)).copied();
        match next {
            None => {
                colour.insert(v, 2);
            }
            Some(w) => {
                stack.push((v, i + 1));
                match colour.get(w) {
                    Some(1) => return true,
                    Some(_) => {}
                    None => {
                        colour.insert(w, 1);
                        stack.push((w, 0));
                    }
                }
            }
        }
    }
    false
}

/// Rebuilds `F(h)(t(x))` for every interior state; used in tests.
#[doc(hidden)]
pub fn level_square_holds(c: &PointedCoalgebra, tl: &TreeLevels) -> Result<bool> {
    for (k, t) in tl.step_maps.iter().enumerate() {
        let (hk, hk1) = (&tl.projections[k], &tl.projections[k + 1]);
        for (x, v) in t.iter() {
            if &fmap(c.functor(), hk1, v)? != c.structure(hk.apply(x)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::check_morphism;
    use crate::factor::is_precise;
    use crate::fixtures;

    fn sizes(tl: &TreeLevels) -> Vec<usize> {
        tl.levels.iter().map(FiniteSet::len).collect()
    }

    #[test]
    fn bag_graph_levels() {
        let d = fixtures::diamond();
        let tl = tree_levels(&d, 10).unwrap();
        assert_eq!(sizes(&tl), [1, 2, 4, 2, 0]);
        assert!(!tl.truncated);
        assert!(level_square_holds(&d, &tl).unwrap());
        assert!(tl.step_maps.iter().all(|t| is_precise(t).unwrap()));
        let u = unravel(&d, 4).unwrap();
        assert!(u.complete);
        assert_eq!(u.states.len(), 9);
        let counts = u.copy_counts();
        let get = |s: &str| counts.get(s).copied().unwrap_or(0);
        assert_eq!((get("r"), get("p"), get("q"), get("v")), (1, 1, 3, 4));
        let names: Vec<&str> = u.states.iter().map(StateId::as_str).collect();
        assert_eq!(names, ["r", "p/0", "q/1", "q/0/0", "q/0/1", "v/0/2", "v/1/0", "v/0/0/0", "v/0/1/0"]);
    }

    #[test]
    fn bag_graph_unravelling_is_the_drawn_tree() {
        let u = tree_unravelling(&fixtures::diamond(), None).unwrap();
        let tree = u.tree().unwrap();
        assert!(crate::coalgebra::find_isomorphism(&tree, &fixtures::diamond_tree()).unwrap().is_some());
        assert!(check_morphism(&u.projection, &tree, &fixtures::diamond()).unwrap().ok);
    }

    #[test]
    fn term_coalgebra_never_terminates() {
        let tl = tree_levels(&fixtures::sigma_loop(), 6).unwrap();
        assert_eq!(sizes(&tl), [1, 2, 2, 2, 2, 2, 2]);
        assert!(tl.truncated);
        let u = tree_unravelling(&fixtures::sigma_loop(), None).unwrap();
        assert!(!u.complete);
        assert!(u.tree().is_none());
        assert_eq!(u.frontier.len(), 2);
        assert!(u.frontier.iter().all(|x| !u.structure.contains_key(x)));
        assert!(u.check_projection(&fixtures::sigma_loop()).unwrap().ok);
    }

    #[test]
    fn singleton_terminates_immediately() {
        let tl = tree_levels(&fixtures::singleton_bottom(), 5).unwrap();
        assert_eq!(sizes(&tl), [1, 0]);
        assert!(!tl.truncated);
    }

    #[test]
    fn small_unravellings() {
        let u = unravel(&fixtures::bag_double(), 5).unwrap();
        assert_eq!(u.states.len(), 3);
        assert_eq!(u.structure[&StateId::new("p")].to_string(), "[q/0, q/1]");

        let u = unravel(&fixtures::shared_leaf(), 5).unwrap();
        let tree = u.tree().unwrap();
        assert!(crate::coalgebra::find_isomorphism(&tree, &fixtures::cherry()).unwrap().is_some());

        let u = unravel(&fixtures::cherry(), 5).unwrap();
        assert!(u.projection.is_bijective());
        assert!(unravel(&fixtures::cherry(), 0).is_err());
    }

    #[test]
    fn verdicts() {
        assert!(is_tree(&fixtures::cherry()).unwrap());
        assert!(!is_tree(&fixtures::shared_leaf()).unwrap());
        assert!(!is_tree(&fixtures::cherry_pair()).unwrap());
        assert!(!is_tree(&fixtures::pow_single()).unwrap());
        assert!(is_tree(&fixtures::build("Pow", &["x"], "x", &[("x", "{||}")])).unwrap());
        assert!(!is_tree(&fixtures::id_two_cycle()).unwrap());
        assert!(!is_tree(&fixtures::id_loop()).unwrap());
        assert!(is_tree(&fixtures::bag_cherry()).unwrap());
        assert!(!is_tree(&fixtures::bag_double()).unwrap());
        assert!(!is_tree(&fixtures::sigma_loop()).unwrap());
        assert!(is_tree(&fixtures::diamond_tree()).unwrap());
    }

    #[test]
    fn diagnostics() {
        let diag = |c| match tree_verdict(&c).unwrap() {
            TreeVerdict::NotTree(d) => d.to_string(),
            TreeVerdict::Tree => "true".into(),
        };
        assert_eq!(diag(fixtures::shared_leaf()), "sharing (coproduct of levels has 3 states, carrier has 2)");
        assert_eq!(diag(fixtures::sigma_loop()), "cycle (levels non-empty past bound)");
        assert_eq!(diag(fixtures::cherry()), "true");
        assert!(diag(fixtures::cherry_pair()).starts_with("not reachable"));
        assert!(diag(fixtures::pow_single()).starts_with("powerset-degenerate"));
    }

    #[test]
    fn pow_levels_error() {
        assert_eq!(
            tree_levels(&fixtures::pow_single(), 3).unwrap_err(),
            Error::PowNotPrecise("p".into())
        );
    }

    #[test]
    fn diamond_chain_hits_size_guard() {
        // 20 diamonds in a row: 2^20 routes to the sink
        let n = 20;
        let mut states = Vec::new();
        let mut structure = Vec::new();
        for i in 0..n {
            states.push(format!("s{i}"));
            structure.push((format!("s{i}"), format!("[s{}*2]", i + 1)));
        }
        states.push(format!("s{n}"));
        structure.push((format!("s{n}"), "[]".into()));
        let st: Vec<&str> = states.iter().map(String::as_str).collect();
        let sv: Vec<(&str, &str)> = structure.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let c = fixtures::build("Bag", &st, "s0", &sv);
        assert!(!is_tree(&c).unwrap());
        assert!(matches!(tree_unravelling(&c, None), Err(Error::SearchSpaceTooLarge { .. })));
        match tree_verdict(&c).unwrap() {
            TreeVerdict::NotTree(TreeDiagnostic::Sharing { levels: None, carrier }) => assert_eq!(carrier, n + 1),
            other => panic!("{other:?}"),
        }
    }
}
