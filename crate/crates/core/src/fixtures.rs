//! Small worked examples used throughout the tests and the CLI fixtures.

use crate::coalgebra::{Multigraph, PointedCoalgebra};
use crate::factor::FMap;
use crate::functor::{FiniteSet, StateId, TotalMap};
use crate::syntax::{parse_functor, parse_value};

fn set(names: &[&str]) -> FiniteSet {
    FiniteSet::from_names(names.iter().copied()).expect("distinct names")
}

/// Builds a coalgebra from textual values; panics on malformed input.
pub fn build(functor: &str, states: &[&str], point: &str, structure: &[(&str, &str)]) -> PointedCoalgebra {
    let f = parse_functor(functor).expect("functor");
    let values = structure
        .iter()
        .map(|(x, v)| (StateId::new(x), parse_value(&f, v).expect("value")));
    PointedCoalgebra::new(f.clone(), set(states), values, point.into()).expect("coalgebra")
}

fn total(dom: &[&str], cod: &[&str], pairs: &[(&str, &str)]) -> TotalMap {
    TotalMap::new(
        set(dom),
        set(cod),
        pairs.iter().map(|(a, b)| (StateId::new(a), StateId::new(b))),
    )
    .expect("total map")
}

const PAIR_OR_BOTTOM: &str = "Id x Id + 1";

/// `f: X → F(Y)` for `F = X×X + 1`, using `y2` three times.
pub fn sharing_map() -> FMap {
    let f = parse_functor(PAIR_OR_BOTTOM).unwrap();
    let v = |s: &str| parse_value(&f, s).unwrap();
    FMap::new(
        f.clone(),
        set(&["x1", "x2", "x3", "x4"]),
        set(&["y1", "y2", "y3", "y4"]),
        [
            ("x1".into(), v("1: ⊥")),
            ("x2".into(), v("0: (y1, y2)")),
            ("x3".into(), v("0: (y2, y2)")),
            ("x4".into(), v("1: ⊥")),
        ],
    )
    .unwrap()
}

/// The precise map through which [`sharing_map`] factors.
pub fn sharing_map_factor() -> FMap {
    let f = parse_functor(PAIR_OR_BOTTOM).unwrap();
    let v = |s: &str| parse_value(&f, s).unwrap();
    FMap::new(
        f.clone(),
        set(&["x1", "x2", "x3", "x4"]),
        set(&["r1", "r2", "r3", "r4"]),
        [
            ("x1".into(), v("1: ⊥")),
            ("x2".into(), v("0: (r1, r2)")),
            ("x3".into(), v("0: (r3, r4)")),
            ("x4".into(), v("1: ⊥")),
        ],
    )
    .unwrap()
}

/// Identity functor: a two-cycle.
pub fn id_two_cycle() -> PointedCoalgebra {
    build("Id", &["p0", "p1"], "p0", &[("p0", "p1"), ("p1", "p0")])
}

/// Identity functor: a self-loop.
pub fn id_loop() -> PointedCoalgebra {
    build("Id", &["l"], "l", &[("l", "l")])
}

/// The collapse `D → E` of the two-cycle onto the loop.
pub fn cycle_collapse() -> TotalMap {
    total(&["p0", "p1"], &["l"], &[("p0", "l"), ("p1", "l")])
}

/// Root with two distinct leaves.
pub fn cherry() -> PointedCoalgebra {
    build(
        PAIR_OR_BOTTOM,
        &["p", "q", "r"],
        "p",
        &[("p", "0: (q, r)"), ("q", "1: ⊥"), ("r", "1: ⊥")],
    )
}

/// Root whose two children are the same leaf.
pub fn shared_leaf() -> PointedCoalgebra {
    build(PAIR_OR_BOTTOM, &["p", "q"], "p", &[("p", "0: (q, q)"), ("q", "1: ⊥")])
}

/// Two copies of [`cherry`], pointed on the left.
pub fn cherry_pair() -> PointedCoalgebra {
    build(
        PAIR_OR_BOTTOM,
        &["left.p", "left.q", "left.r", "right.p", "right.q", "right.r"],
        "left.p",
        &[
            ("left.p", "0: (left.q, left.r)"),
            ("left.q", "1: ⊥"),
            ("left.r", "1: ⊥"),
            ("right.p", "0: (right.q, right.r)"),
            ("right.q", "1: ⊥"),
            ("right.r", "1: ⊥"),
        ],
    )
}

/// Codiagonal `C = D + D → D`.
pub fn codiagonal() -> TotalMap {
    let c = cherry_pair();
    let d = cherry();
    TotalMap::new(
        c.carrier().clone(),
        d.carrier().clone(),
        c.carrier().iter().map(|x| {
            let base = x.as_str().rsplit('.').next().unwrap();
            (x.clone(), StateId::new(base))
        }),
    )
    .unwrap()
}

/// Left injection `D → D + D`.
pub fn left_injection() -> TotalMap {
    let c = cherry_pair();
    total(
        &["p", "q", "r"],
        &c.carrier().iter().map(StateId::as_str).collect::<Vec<_>>(),
        &[("p", "left.p"), ("q", "left.q"), ("r", "left.r")],
    )
}

/// The unravelling `D → E` of [`shared_leaf`].
pub fn shared_leaf_unravelling() -> TotalMap {
    total(&["p", "q", "r"], &["p", "q"], &[("p", "p"), ("q", "q"), ("r", "q")])
}

/// Rooted multigraph with a double edge `p → q`.
pub fn diamond_graph() -> Multigraph {
    Multigraph::from_pairs(
        set(&["r", "p", "q", "v"]),
        [("r", "p"), ("r", "q"), ("p", "q"), ("p", "q"), ("p", "v"), ("q", "v")]
            .into_iter()
            .map(|(a, b)| (a.into(), b.into())),
        "r".into(),
    )
    .unwrap()
}

/// [`diamond_graph`] as a bag coalgebra.
pub fn diamond() -> PointedCoalgebra {
    build(
        "Bag",
        &["r", "p", "q", "v"],
        "r",
        &[("r", "[p, q]"), ("p", "[q*2, v]"), ("q", "[v]"), ("v", "[]")],
    )
}

/// The tree unravelling of [`diamond`]; each name starts with its image.
pub fn diamond_tree() -> PointedCoalgebra {
    build(
        "Bag",
        &["r", "p", "q1", "v1", "q2", "q3", "v2", "v3", "v4"],
        "r",
        &[
            ("r", "[p, q1]"),
            ("p", "[v1, q2, q3]"),
            ("q1", "[v4]"),
            ("q2", "[v2]"),
            ("q3", "[v3]"),
            ("v1", "[]"),
            ("v2", "[]"),
            ("v3", "[]"),
            ("v4", "[]"),
        ],
    )
}

/// Bag root with two distinct children.
pub fn bag_cherry() -> PointedCoalgebra {
    build("Bag", &["p", "q", "r"], "p", &[("p", "[q, r]"), ("q", "[]"), ("r", "[]")])
}

/// Bag root with one child of multiplicity two.
pub fn bag_double() -> PointedCoalgebra {
    build("Bag", &["p", "q"], "p", &[("p", "[q*2]"), ("q", "[]")])
}

pub fn double_edge_graph() -> Multigraph {
    Multigraph::from_pairs(
        set(&["p", "q"]),
        [("p".into(), "q".into()), ("p".into(), "q".into())],
        "p".into(),
    )
    .unwrap()
}

/// Powerset root with two children.
pub fn pow_cherry() -> PointedCoalgebra {
    build("Pow", &["p", "q", "r"], "p", &[("p", "{| q, r |}"), ("q", "{||}"), ("r", "{||}")])
}

/// Powerset root with one child.
pub fn pow_single() -> PointedCoalgebra {
    build("Pow", &["p", "q"], "p", &[("p", "{| q |}"), ("q", "{||}")])
}

pub const SIGMA_FUNCTOR: &str = "{a} + {b} + Id x Id";

/// Term-like coalgebra: two binary nodes pointing at each other, each with a
/// constant on the left.
pub fn sigma_loop() -> PointedCoalgebra {
    build(
        SIGMA_FUNCTOR,
        &["i", "a", "j", "b"],
        "i",
        &[("i", "2: (a, j)"), ("j", "2: (b, i)"), ("a", "0: a"), ("b", "1: b")],
    )
}

/// One state, no successors.
pub fn singleton_bottom() -> PointedCoalgebra {
    build(PAIR_OR_BOTTOM, &["x"], "x", &[("x", "1: ⊥")])
}

/// Every named coalgebra fixture.
pub fn all() -> Vec<(&'static str, PointedCoalgebra)> {
    vec![
        ("id-two-cycle", id_two_cycle()),
        ("id-loop", id_loop()),
        ("cherry-pair", cherry_pair()),
        ("cherry", cherry()),
        ("shared-leaf", shared_leaf()),
        ("diamond", diamond()),
        ("diamond-tree", diamond_tree()),
        ("bag-cherry", bag_cherry()),
        ("bag-double", bag_double()),
        ("pow-cherry", pow_cherry()),
        ("pow-single", pow_single()),
        ("sigma-loop", sigma_loop()),
        ("singleton", singleton_bottom()),
    ]
}
