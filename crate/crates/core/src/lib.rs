//! Generalized reachability and tree unravelling for pointed coalgebras of
//! set functors built from identity, constants, products, coproducts,
//! exponents, composition, finite bags and finite powersets.

pub mod automata;
pub mod coalgebra;
pub mod error;
pub mod factor;
pub mod fixtures;
pub mod functor;
pub mod oracle;
pub mod reach;
pub mod syntax;
mod unify;
pub mod unravel;

pub use automata::{
    defined_inputs, delta_star, dfa_to_coalgebra, graph_is_tree, path_count, path_counts, rooted_paths, PartialDFA,
    PathCount,
};
pub use coalgebra::{
    bag_to_multigraph, canonical_graph, check_morphism, coproduct, find_isomorphism, multigraph_to_bag, Edge,
    HomReport, Multigraph, PointedCoalgebra, SquareFailure, Unfolding,
};
pub use error::{Error, Result};
pub use factor::{
    factorization_iso, factorize, is_precise, least_bound, precise_factorize, FMap, Factorization, LeastBound, Mode,
    PreciseFactorization,
};
pub use functor::{
    check_shape, fmap, fvalue_equal, map_leaves, used_states, visit_leaves, FValue, FiniteSet, FunctorExpr, StateId,
    TotalMap,
};
pub use oracle::{bfs_reachable, Counterexample, HomSet, Oracle};
pub use reach::{is_reachable, reach_levels, reachable_part, LevelSequence, ReachablePart};
pub use syntax::{parse_functor, parse_value};
pub use unravel::{
    is_tree, tree_levels, tree_unravelling, tree_verdict, unravel, TreeDiagnostic, TreeLevels, TreeVerdict,
    UnravelResult,
};
