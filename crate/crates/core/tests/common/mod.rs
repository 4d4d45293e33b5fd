#![allow(dead_code)]

use coalg::{FMap, FValue, FiniteSet, FunctorExpr, Multigraph, PartialDFA, PointedCoalgebra, StateId};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(prefix: &str, n: usize) -> FiniteSet {
    (0..n).map(|i| StateId::new(format!("{prefix}{i}"))).collect()
}

fn letters(rng: &mut Rand) -> Vec<String> {
    let n = rng.gen_range(1..=2);
    ["a", "b"][..n].iter().map(|s| s.to_string()).collect()
}

/// A random functor of the whole grammar, at most `depth` constructors deep.
pub fn functor(rng: &mut Rand, depth: u32, allow_pow: bool) -> FunctorExpr {
    let leaf = |rng: &mut Rand| match rng.gen_range(0..if allow_pow { 5 } else { 4 }) {
        0 | 1 => FunctorExpr::Identity,
        2 => {
            if rng.gen_bool(0.5) {
                FunctorExpr::one()
            } else {
                FunctorExpr::two()
            }
        }
        3 => FunctorExpr::Bag,
        _ => FunctorExpr::Pow,
    };
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    match rng.gen_range(0..4) {
        0 => FunctorExpr::Product(vec![functor(rng, depth - 1, allow_pow), functor(rng, depth - 1, allow_pow)]),
        1 => FunctorExpr::Coproduct(vec![functor(rng, depth - 1, allow_pow), functor(rng, depth - 1, allow_pow)]),
        2 => FunctorExpr::exponent(functor(rng, depth - 1, allow_pow), letters(rng)).unwrap(),
        _ => FunctorExpr::compose(functor(rng, depth - 1, allow_pow), functor(rng, depth - 1, allow_pow)),
    }
}

pub fn pick(rng: &mut Rand, carrier: &FiniteSet) -> StateId {
    carrier.get_index(rng.gen_range(0..carrier.len())).unwrap().clone()
}

/// A random element of `F(carrier)`; `carrier` must be non-empty.
pub fn value(rng: &mut Rand, f: &FunctorExpr, carrier: &FiniteSet) -> FValue {
    match f {
        FunctorExpr::Identity => FValue::State(pick(rng, carrier)),
        FunctorExpr::Const(symbols) => FValue::constant(symbols.choose(rng).unwrap().clone()),
        FunctorExpr::Product(fs) => FValue::tuple(fs.iter().map(|g| value(rng, g, carrier))),
        FunctorExpr::Coproduct(fs) => {
            let tag = rng.gen_range(0..fs.len());
            FValue::inj(tag, value(rng, &fs[tag], carrier))
        }
        FunctorExpr::Exponent(base, alphabet) => {
            FValue::map(alphabet.iter().map(|a| (a.clone(), value(rng, base, carrier))))
        }
        FunctorExpr::Compose(outer, inner) => {
            let shape = value(rng, outer, carrier);
            coalg::map_leaves(outer, &shape, &mut |_| Ok(value(rng, inner, carrier))).unwrap()
        }
        FunctorExpr::Bag => {
            let n = rng.gen_range(0..=3);
            FValue::bag((0..n).map(|_| (FValue::State(pick(rng, carrier)), rng.gen_range(1..=3))))
        }
        FunctorExpr::Pow => {
            let n = rng.gen_range(0..=3);
            FValue::pow((0..n).map(|_| FValue::State(pick(rng, carrier))))
        }
    }
}

pub fn coalgebra(rng: &mut Rand, f: &FunctorExpr, n: usize) -> PointedCoalgebra {
    let carrier = names("s", n);
    let structure: Vec<(StateId, FValue)> = carrier.iter().map(|x| (x.clone(), value(rng, f, &carrier))).collect();
    let point = pick(rng, &carrier);
    PointedCoalgebra::new(f.clone(), carrier, structure, point).unwrap()
}

pub fn fmap_over(rng: &mut Rand, f: &FunctorExpr, nx: usize, ny: usize) -> FMap {
    let xs = names("x", nx);
    let ys = names("y", ny);
    let values: Vec<(StateId, FValue)> = xs.iter().map(|x| (x.clone(), value(rng, f, &ys))).collect();
    FMap::new(f.clone(), xs, ys, values).unwrap()
}

pub fn multigraph(rng: &mut Rand, max_vertices: usize, max_edges: usize) -> Multigraph {
    let n = rng.gen_range(1..=max_vertices);
    let vs = names("v", n);
    let m = rng.gen_range(0..=max_edges);
    // bias towards acyclic graphs so both verdicts occur often
    let acyclic = rng.gen_bool(0.6);
    let mut pairs = Vec::with_capacity(m);
    for _ in 0..m {
        let (mut i, mut j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if acyclic {
            if i == j {
                continue;
            }
            if i > j {
                std::mem::swap(&mut i, &mut j);
            }
        }
        pairs.push((vs.get_index(i).unwrap().clone(), vs.get_index(j).unwrap().clone()));
    }
    let root = vs.get_index(0).unwrap().clone();
    Multigraph::from_pairs(vs, pairs, root).unwrap()
}

/// A random partial DFA whose transitions only go forward in state order.
pub fn acyclic_dfa(rng: &mut Rand, max_states: usize, max_letters: usize) -> PartialDFA {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_letters);
    let alphabet: Vec<String> = ["a", "b", "c"][..k].iter().map(|s| s.to_string()).collect();
    let states = names("q", n);
    let mut transitions = Vec::new();
    for i in 0..n {
        for a in &alphabet {
            if i + 1 < n && rng.gen_bool(0.6) {
                let j = rng.gen_range(i + 1..n);
                transitions.push((
                    states.get_index(i).unwrap().clone(),
                    a.clone(),
                    states.get_index(j).unwrap().clone(),
                ));
            }
        }
    }
    let accepting = states.filter(|_| rng.gen_bool(0.5));
    let initial = states.get_index(0).unwrap().clone();
    PartialDFA::new(alphabet, states, accepting, transitions, initial).unwrap()
}

/// A uniformly random bijection of `set` onto fresh names.
pub fn permutation(rng: &mut Rand, set: &FiniteSet, prefix: &str) -> coalg::TotalMap {
    let mut targets: Vec<usize> = (0..set.len()).collect();
    targets.shuffle(rng);
    let fresh = names(prefix, set.len());
    coalg::TotalMap::new(
        set.clone(),
        fresh.clone(),
        set.iter()
            .zip(&targets)
            .map(|(x, &i)| (x.clone(), fresh.get_index(i).unwrap().clone())),
    )
    .unwrap()
}
