//! Pointed coalgebras, homomorphisms, coproducts and the graph translations.

use std::collections::BTreeMap;
use std::collections::HashSet;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::functor::{check_shape, fmap, used_states, FValue, FiniteSet, FunctorExpr, StateId, TotalMap};
use crate::unify::{unify, Pairing};

/// A finite coalgebra `c: C → F(C)` with a distinguished point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointedCoalgebra {
    functor: FunctorExpr,
    carrier: FiniteSet,
    structure: IndexMap<StateId, FValue>,
    point: StateId,
}

impl PointedCoalgebra {
    pub fn new<I>(functor: FunctorExpr, carrier: FiniteSet, structure: I, point: StateId) -> Result<Self>
    where
        I: IntoIterator<Item = (StateId, FValue)>,
    {
        functor.validate()?;
        if !carrier.contains(&point) {
            return Err(Error::PointOutsideCarrier(point));
        }
        let mut given: IndexMap<StateId, FValue> = IndexMap::new();
        for (x, v) in structure {
            if !carrier.contains(&x) {
                return Err(Error::UnknownState(x));
            }
            if given.contains_key(&x) {
                return Err(Error::Duplicate(x.to_string()));
            }
            check_shape(&functor, &v, &carrier)?;
            given.insert(x, v);
        }
        let mut ordered = IndexMap::with_capacity(carrier.len());
        for x in &carrier {
            let v = given.swap_remove(x).ok_or_else(|| Error::NotTotal(x.clone()))?;
            ordered.insert(x.clone(), v);
        }
        Ok(PointedCoalgebra {
            functor,
            carrier,
            structure: ordered,
            point,
        })
    }

    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn carrier(&self) -> &FiniteSet {
        &self.carrier
    }

    pub fn point(&self) -> &StateId {
        &self.point
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    /// The structure value `c(x)`.
    pub fn structure(&self, x: &StateId) -> Result<&FValue> {
        self.structure.get(x).ok_or_else(|| Error::UnknownState(x.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StateId, &FValue)> + '_ {
        self.structure.iter()
    }

    /// States used by `c(x)`.
    pub fn successors(&self, x: &StateId) -> Result<FiniteSet> {
        used_states(&self.functor, self.structure(x)?)
    }

    /// The subcoalgebra on `sub`, which must contain the point and be closed
    /// under successors.
    pub fn restrict(&self, sub: &FiniteSet) -> Result<PointedCoalgebra> {
        let structure = sub
            .iter()
            .map(|x| Ok((x.clone(), self.structure(x)?.clone())))
            .collect::<Result<Vec<_>>>()?;
        PointedCoalgebra::new(self.functor.clone(), sub.clone(), structure, self.point.clone())
    }

    /// The same coalgebra transported along the bijection `rename`.
    pub fn relabel(&self, rename: &TotalMap) -> Result<PointedCoalgebra> {
        if !rename.is_bijective() || !rename.domain().same_elements(&self.carrier) {
            return Err(Error::Invalid("relabelling must be a bijection on the carrier".into()));
        }
        let structure = self
            .structure
            .iter()
            .map(|(x, v)| Ok((rename.apply(x)?.clone(), fmap(&self.functor, rename, v)?)))
            .collect::<Result<Vec<_>>>()?;
        PointedCoalgebra::new(
            self.functor.clone(),
            rename.codomain().clone(),
            structure,
            rename.apply(&self.point)?.clone(),
        )
    }
}

/// One state where the homomorphism square fails.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SquareFailure {
    pub state: StateId,
    /// `d(h(x))`
    pub expected: FValue,
    /// `F(h)(c(x))`
    pub actual: FValue,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomReport {
    pub ok: bool,
    pub point_preserved: bool,
    pub failures: Vec<SquareFailure>,
}

fn same_functor(a: &FunctorExpr, b: &FunctorExpr) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::FunctorMismatch {
            left: a.to_string(),
            right: b.to_string(),
        })
    }
}

/// Checks `h(point_C) = point_D` and `d · h = F(h) · c`.
pub fn check_morphism(h: &TotalMap, source: &PointedCoalgebra, target: &PointedCoalgebra) -> Result<HomReport> {
    same_functor(&source.functor, &target.functor)?;
    if !h.domain().same_elements(&source.carrier) {
        return Err(Error::Invalid(format!(
            "map domain {} is not the source carrier {}",
            h.domain(),
            source.carrier
        )));
    }
    if !h.codomain().is_subset(&target.carrier) {
        return Err(Error::Invalid(format!(
            "map codomain {} is not inside the target carrier {}",
            h.codomain(),
            target.carrier
        )));
    }
    let point_preserved = h.apply(&source.point)? == &target.point;
    let mut failures = Vec::new();
    for (x, v) in &source.structure {
        let expected = target.structure(h.apply(x)?)?;
        let actual = fmap(&source.functor, h, v)?;
        if &actual != expected {
            failures.push(SquareFailure {
                state: x.clone(),
                expected: expected.clone(),
                actual,
            });
        }
    }
    Ok(HomReport {
        ok: point_preserved && failures.is_empty(),
        point_preserved,
        failures,
    })
}

fn tagged(tag: &str, x: &StateId) -> StateId {
    StateId::new(format!("{tag}.{x}"))
}

/// Disjoint union with `left.`/`right.` tagged names; the point is the left one.
pub fn coproduct(c1: &PointedCoalgebra, c2: &PointedCoalgebra) -> Result<PointedCoalgebra> {
    same_functor(&c1.functor, &c2.functor)?;
    let mut carrier = FiniteSet::new();
    let mut structure = Vec::with_capacity(c1.len() + c2.len());
    for (tag, c) in [("left", c1), ("right", c2)] {
        let names: Vec<StateId> = c.carrier.iter().map(|x| tagged(tag, x)).collect();
        let inj = TotalMap::new(
            c.carrier.clone(),
            names.iter().cloned().collect(),
            c.carrier.iter().cloned().zip(names.iter().cloned()),
        )?;
        for (x, v) in &c.structure {
            let name = inj.apply(x)?.clone();
            if !carrier.insert(name.clone()) {
                return Err(Error::Duplicate(name.to_string()));
            }
            structure.push((name, fmap(&c.functor, &inj, v)?));
        }
    }
    PointedCoalgebra::new(c1.functor.clone(), carrier, structure, tagged("left", &c1.point))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub id: String,
    pub source: StateId,
    pub target: StateId,
}

/// A finite directed multigraph with a root.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Multigraph {
    vertices: FiniteSet,
    edges: Vec<Edge>,
    root: StateId,
}

impl Multigraph {
    pub fn new(vertices: FiniteSet, edges: Vec<Edge>, root: StateId) -> Result<Self> {
        if !vertices.contains(&root) {
            return Err(Error::UnknownVertex(root));
        }
        let mut ids = HashSet::new();
        for e in &edges {
            if e.id.is_empty() {
                return Err(Error::Invalid("edge ids must be non-empty".into()));
            }
            if !ids.insert(e.id.as_str()) {
                return Err(Error::DuplicateEdge(e.id.clone()));
            }
            for v in [&e.source, &e.target] {
                if !vertices.contains(v) {
                    return Err(Error::UnknownVertex(v.clone()));
                }
            }
        }
        Ok(Multigraph { vertices, edges, root })
    }

    /// Builds a graph from `(source, target)` pairs with ids `e0, e1, …`.
    pub fn from_pairs<I>(vertices: FiniteSet, pairs: I, root: StateId) -> Result<Self>
    where
        I: IntoIterator<Item = (StateId, StateId)>,
    {
        let edges = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (source, target))| Edge {
                id: format!("e{i}"),
                source,
                target,
            })
            .collect();
        Multigraph::new(vertices, edges, root)
    }

    pub fn vertices(&self) -> &FiniteSet {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn root(&self) -> &StateId {
        &self.root
    }

    pub fn out_edges<'a>(&'a self, v: &'a StateId) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| &e.source == v)
    }
}

/// One edge `x → y` for every `y` used by `c(x)`.
pub fn canonical_graph(c: &PointedCoalgebra) -> Multigraph {
    let mut pairs = Vec::new();
    for (x, v) in &c.structure {
        // well-shaped by construction
        let used = used_states(&c.functor, v).unwrap_or_default();
        pairs.extend(used.iter().map(|y| (x.clone(), y.clone())));
    }
    Multigraph::from_pairs(c.carrier.clone(), pairs, c.point.clone()).expect("carrier is closed")
}

/// `c(u)(v)` = number of edges from `u` to `v`.
pub fn multigraph_to_bag(g: &Multigraph) -> PointedCoalgebra {
    let mut counts: IndexMap<StateId, BTreeMap<FValue, u32>> =
        g.vertices.iter().map(|v| (v.clone(), BTreeMap::new())).collect();
    for e in &g.edges {
        *counts[&e.source].entry(FValue::State(e.target.clone())).or_insert(0) += 1;
    }
    let structure = counts.into_iter().map(|(v, m)| (v, FValue::Bag(m)));
    PointedCoalgebra::new(FunctorExpr::Bag, g.vertices.clone(), structure, g.root.clone())
        .expect("edges stay inside the vertex set")
}

/// One edge per unit of multiplicity, ids `e0, e1, …` in carrier order.
pub fn bag_to_multigraph(c: &PointedCoalgebra) -> Result<Multigraph> {
    same_functor(&FunctorExpr::Bag, &c.functor)?;
    let mut pairs = Vec::new();
    for (u, v) in &c.structure {
        let FValue::Bag(m) = v else {
            return Err(Error::shape("bag", v));
        };
        for (w, n) in m {
            let FValue::State(w) = w else {
                return Err(Error::shape("state", w));
            };
            pairs.extend(std::iter::repeat_n((u.clone(), w.clone()), *n as usize));
        }
    }
    Multigraph::from_pairs(c.carrier.clone(), pairs, c.point.clone())
}

/// A possibly infinite coalgebra cut off at some depth.
///
/// Interior states carry structure; frontier states are the open leaves of a
/// truncated unfolding and carry none. With an empty frontier the unfolding
/// is an ordinary pointed coalgebra.
#[derive(Clone, Debug)]
pub struct Unfolding {
    pub functor: FunctorExpr,
    pub states: FiniteSet,
    pub point: StateId,
    pub structure: IndexMap<StateId, FValue>,
    pub frontier: FiniteSet,
    /// Map to the coalgebra being unfolded.
    pub projection: TotalMap,
    pub complete: bool,
}

impl Unfolding {
    /// The unfolding as a coalgebra, when nothing was cut off.
    pub fn tree(&self) -> Option<PointedCoalgebra> {
        if !self.complete {
            return None;
        }
        PointedCoalgebra::new(
            self.functor.clone(),
            self.states.clone(),
            self.structure.iter().map(|(x, v)| (x.clone(), v.clone())),
            self.point.clone(),
        )
        .ok()
    }

    /// Number of states projecting onto each target state.
    pub fn copy_counts(&self) -> IndexMap<StateId, usize> {
        self.projection.fibre_sizes()
    }

    /// Checks the homomorphism square on the interior states and the point.
    pub fn check_projection(&self, target: &PointedCoalgebra) -> Result<HomReport> {
        same_functor(&self.functor, &target.functor)?;
        let point_preserved = self.projection.apply(&self.point)? == &target.point;
        let mut failures = Vec::new();
        for (x, v) in &self.structure {
            let expected = target.structure(self.projection.apply(x)?)?;
            let actual = fmap(&self.functor, &self.projection, v)?;
            if &actual != expected {
                failures.push(SquareFailure {
                    state: x.clone(),
                    expected: expected.clone(),
                    actual,
                });
            }
        }
        Ok(HomReport {
            ok: point_preserved && failures.is_empty(),
            point_preserved,
            failures,
        })
    }
}

/// A pointed isomorphism `C → D`, if one exists.
pub fn find_isomorphism(c: &PointedCoalgebra, d: &PointedCoalgebra) -> Result<Option<TotalMap>> {
    same_functor(&c.functor, &d.functor)?;
    if c.len() != d.len() {
        return Ok(None);
    }
    let mut pairing = Pairing::new();
    pairing.bind(&c.point, &d.point);
    let allow = |_: &StateId, _: &StateId| true;
    let found = extend_iso(c, d, &mut pairing, 0, &allow);
    if !found {
        return Ok(None);
    }
    let map = TotalMap::new(c.carrier.clone(), d.carrier.clone(), pairing.pairs().cloned())?;
    Ok(Some(map))
}

fn extend_iso(
    c: &PointedCoalgebra,
    d: &PointedCoalgebra,
    pairing: &mut Pairing,
    next: usize,
    allow: &dyn Fn(&StateId, &StateId) -> bool,
) -> bool {
    if next < pairing.len() {
        let (a, b) = pairing.pair_at(next);
        let (Ok(v), Ok(w)) = (c.structure(&a), d.structure(&b)) else {
            return false;
        };
        return unify(&c.functor, v, w, pairing, allow, &mut |p: &mut Pairing| {
            extend_iso(c, d, p, next + 1, allow)
        });
    }
    // the paired part is closed; guess a partner for some unpaired state
    let Some(a) = c.carrier.iter().find(|x| pairing.get(x).is_none()) else {
        return true;
    };
    let a = a.clone();
    let taken: HashSet<&StateId> = pairing.pairs().map(|(_, b)| b).collect();
    let candidates: Vec<StateId> = d.carrier.iter().filter(|b| !taken.contains(b)).cloned().collect();
    for b in candidates {
        let mark = pairing.mark();
        pairing.bind(&a, &b);
        if extend_iso(c, d, pairing, next, allow) {
            return true;
        }
        pairing.undo_to(mark);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(names: &[&str]) -> FiniteSet {
        FiniteSet::from_names(names.iter().copied()).unwrap()
    }

    fn map(dom: &[&str], cod: &[&str], pairs: &[(&str, &str)]) -> TotalMap {
        TotalMap::new(
            set(dom),
            set(cod),
            pairs.iter().map(|(a, b)| (StateId::new(a), StateId::new(b))),
        )
        .unwrap()
    }

    #[test]
    fn bag_tree_projects_onto_graph() {
        let tree = fixtures::diamond_tree();
        let d = fixtures::diamond();
        let h = TotalMap::new(
            tree.carrier().clone(),
            d.carrier().clone(),
            tree.carrier().iter().map(|x| {
                let target = &x.as_str()[..1];
                (x.clone(), StateId::new(target))
            }),
        )
        .unwrap();
        assert!(check_morphism(&h, &tree, &d).unwrap().ok);
    }

    #[test]
    fn identity_is_a_morphism() {
        for c in fixtures::all() {
            let id = TotalMap::identity(c.1.carrier());
            assert!(check_morphism(&id, &c.1, &c.1).unwrap().ok, "{}", c.0);
        }
    }

    #[test]
    fn fold_map_and_swapped_point() {
        let c = fixtures::cherry_pair();
        let d = fixtures::cherry();
        let fold = fixtures::codiagonal();
        assert!(check_morphism(&fold, &c, &d).unwrap().ok);

        let swapped = PointedCoalgebra::new(
            c.functor().clone(),
            c.carrier().clone(),
            c.iter().map(|(x, v)| (x.clone(), v.clone())),
            "right.q".into(),
        )
        .unwrap();
        let report = check_morphism(&fold, &swapped, &d).unwrap();
        assert!(!report.ok);
        assert!(!report.point_preserved);
        assert!(report.failures.is_empty());
    }

    #[test]
    fn square_failure_is_reported() {
        let d = fixtures::cherry();
        let e = fixtures::shared_leaf();
        let h = map(&["p", "q", "r"], &["p", "q"], &[("p", "p"), ("q", "q"), ("r", "p")]);
        let report = check_morphism(&h, &d, &e).unwrap();
        assert!(!report.ok);
        let failed: Vec<&str> = report.failures.iter().map(|f| f.state.as_str()).collect();
        assert_eq!(failed, ["p", "r"]);
    }

    #[test]
    fn coproduct_examples() {
        let c = coproduct(&fixtures::cherry(), &fixtures::cherry()).unwrap();
        assert_eq!(c, fixtures::cherry_pair());
        assert_eq!(c.point().as_str(), "left.p");

        let one = fixtures::singleton_bottom();
        let two = coproduct(&one, &one).unwrap();
        assert_eq!(two.carrier(), &set(&["left.x", "right.x"]));
        assert_eq!(two.point().as_str(), "left.x");

        let edge = multigraph_to_bag(&Multigraph::from_pairs(set(&["a", "b"]), [("a".into(), "b".into())], "a".into()).unwrap());
        let lone = multigraph_to_bag(&Multigraph::from_pairs(set(&["z"]), [], "z".into()).unwrap());
        assert_eq!(coproduct(&edge, &lone).unwrap().len(), 3);

        assert!(matches!(
            coproduct(&fixtures::cherry(), &fixtures::bag_double()),
            Err(Error::FunctorMismatch { .. })
        ));
    }

    #[test]
    fn canonical_graph_examples() {
        let g = canonical_graph(&fixtures::shared_leaf());
        let pairs: Vec<(&str, &str)> = g.edges().iter().map(|e| (e.source.as_str(), e.target.as_str())).collect();
        assert_eq!(pairs, [("p", "q")]);

        let g = canonical_graph(&fixtures::id_loop());
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edges()[0].source, g.edges()[0].target);

        assert!(canonical_graph(&fixtures::singleton_bottom()).edges().is_empty());
    }

    #[test]
    fn multigraph_bag_translation() {
        let d = multigraph_to_bag(&fixtures::diamond_graph());
        let s = |x: &str| d.structure(&x.into()).unwrap().to_string();
        assert_eq!(s("p"), "[q*2, v]");
        assert_eq!(s("r"), "[p, q]");
        assert_eq!(s("q"), "[v]");
        assert_eq!(s("v"), "[]");
        assert_eq!(d, fixtures::diamond());

        let g = bag_to_multigraph(&d).unwrap();
        assert_eq!(g.edges().len(), 6);
        assert_eq!(multigraph_to_bag(&g), d);

        let e = multigraph_to_bag(&fixtures::double_edge_graph());
        assert_eq!(e.structure(&"p".into()).unwrap().to_string(), "[q*2]");
        let g = bag_to_multigraph(&e).unwrap();
        assert_eq!(g.edges().len(), 2);

        let empty = multigraph_to_bag(&Multigraph::from_pairs(set(&["a", "b"]), [], "a".into()).unwrap());
        assert!(empty.iter().all(|(_, v)| v == &FValue::bag([])));
        assert!(bag_to_multigraph(&empty).unwrap().edges().is_empty());

        assert!(bag_to_multigraph(&fixtures::cherry()).is_err());
    }

    #[test]
    fn multigraph_validation() {
        let dup = vec![
            Edge { id: "x".into(), source: "a".into(), target: "a".into() },
            Edge { id: "x".into(), source: "a".into(), target: "a".into() },
        ];
        assert_eq!(Multigraph::new(set(&["a"]), dup, "a".into()).unwrap_err(), Error::DuplicateEdge("x".into()));
        assert_eq!(
            Multigraph::from_pairs(set(&["a"]), [("a".into(), "b".into())], "a".into()).unwrap_err(),
            Error::UnknownVertex("b".into())
        );
        assert!(Multigraph::from_pairs(set(&["a"]), [], "z".into()).is_err());
    }

    #[test]
    fn coalgebra_validation() {
        let f = FunctorExpr::Identity;
        assert_eq!(
            PointedCoalgebra::new(f.clone(), set(&["a"]), [("a".into(), FValue::state("a"))], "b".into()).unwrap_err(),
            Error::PointOutsideCarrier("b".into())
        );
        assert_eq!(
            PointedCoalgebra::new(f.clone(), set(&["a", "b"]), [("a".into(), FValue::state("a"))], "a".into()).unwrap_err(),
            Error::NotTotal("b".into())
        );
        assert_eq!(
            PointedCoalgebra::new(f, set(&["a"]), [("a".into(), FValue::state("z"))], "a".into()).unwrap_err(),
            Error::UnknownState("z".into())
        );
    }

    #[test]
    fn isomorphism_search() {
        let d = fixtures::cherry();
        let rename = map(&["p", "q", "r"], &["x", "y", "z"], &[("p", "x"), ("q", "z"), ("r", "y")]);
        let d2 = d.relabel(&rename).unwrap();
        let iso = find_isomorphism(&d, &d2).unwrap().unwrap();
        assert!(check_morphism(&iso, &d, &d2).unwrap().ok);
        assert!(find_isomorphism(&d, &fixtures::shared_leaf()).unwrap().is_none());

        // unreachable parts are matched too
        let c = fixtures::cherry_pair();
        let iso = find_isomorphism(&c, &c).unwrap().unwrap();
        assert!(iso.is_bijective());
        assert!(find_isomorphism(&fixtures::id_two_cycle(), &fixtures::id_loop()).unwrap().is_none());
    }
}
