//! Backtracking search for bijections that carry one functor value onto another.
//!
//! Positional shapes (tuples, injections, exponent maps) force the pairing of
//! their leaves; bags and sets only fix it up to a permutation, which is where
//! the search branches. The search is written in continuation-passing style so
//! callers can chain several value pairs and stop at the first success.

use std::collections::HashMap;

use crate::functor::{FValue, FunctorExpr, StateId};

/// A partial bijection with an undo trail.
#[derive(Default, Debug, Clone)]
pub(crate) struct Pairing {
    fwd: HashMap<StateId, StateId>,
    bwd: HashMap<StateId, StateId>,
    trail: Vec<(StateId, StateId)>,
}

impl Pairing {
    pub fn new() -> Self {
        Pairing::default()
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (a, b) = self.trail.pop().unwrap();
            self.fwd.remove(&a);
            self.bwd.remove(&b);
        }
    }

    /// `Some(true)` for a new pair, `Some(false)` if already present, `None` on conflict.
    pub fn bind(&mut self, a: &StateId, b: &StateId) -> Option<bool> {
        match (self.fwd.get(a), self.bwd.get(b)) {
            (Some(x), Some(y)) if x == b && y == a => Some(false),
            (None, None) => {
                self.fwd.insert(a.clone(), b.clone());
                self.bwd.insert(b.clone(), a.clone());
                self.trail.push((a.clone(), b.clone()));
                Some(true)
            }
            _ => None,
        }
    }

    pub fn get(&self, a: &StateId) -> Option<&StateId> {
        self.fwd.get(a)
    }

    pub fn len(&self) -> usize {
        self.trail.len()
    }

    pub fn pair_at(&self, i: usize) -> (StateId, StateId) {
        self.trail[i].clone()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(StateId, StateId)> + '_ {
        self.trail.iter()
    }
}

pub(crate) type Cont<'a> = dyn FnMut(&mut Pairing) -> bool + 'a;
type Leaf<'a> = dyn Fn(&FValue, &FValue, &mut Pairing, &mut Cont<'_>) -> bool + 'a;

/// Tries to extend `pairing` so that it maps `v` onto `w`, then calls `k`.
///
/// Returns `true` as soon as some extension makes `k` succeed; on `false` the
/// pairing is restored. `allow(a, b)` filters candidate state pairs.
pub(crate) fn unify(
    functor: &FunctorExpr,
    v: &FValue,
    w: &FValue,
    pairing: &mut Pairing,
    allow: &dyn Fn(&StateId, &StateId) -> bool,
    k: &mut Cont<'_>,
) -> bool {
    let leaf = |a: &FValue, b: &FValue, p: &mut Pairing, k: &mut Cont<'_>| match (a, b) {
        (FValue::State(x), FValue::State(y)) => {
            if !allow(x, y) {
                return false;
            }
            let mark = p.mark();
            match p.bind(x, y) {
                None => false,
                Some(_) => {
                    if k(p) {
                        true
                    } else {
                        p.undo_to(mark);
                        false
                    }
                }
            }
        }
        _ => false,
    };
    unify_with(functor, v, w, pairing, &leaf, k)
}

fn unify_with(
    functor: &FunctorExpr,
    v: &FValue,
    w: &FValue,
    p: &mut Pairing,
    leaf: &Leaf<'_>,
    k: &mut Cont<'_>,
) -> bool {
    match (functor, v, w) {
        (FunctorExpr::Identity, _, _) => leaf(v, w, p, k),
        (FunctorExpr::Const(_), FValue::Const(a), FValue::Const(b)) => a == b && k(p),
        (FunctorExpr::Product(fs), FValue::Tuple(xs), FValue::Tuple(ys)) => {
            if xs.len() != fs.len() || ys.len() != fs.len() {
                return false;
            }
            let triples: Vec<_> = fs.iter().zip(xs).zip(ys).map(|((f, x), y)| (f, x, y)).collect();
            unify_seq(&triples, p, leaf, k)
        }
        (FunctorExpr::Coproduct(fs), FValue::Inj(i, x), FValue::Inj(j, y)) => {
            i == j && fs.get(*i).is_some_and(|f| unify_with(f, x, y, p, leaf, k))
        }
        (FunctorExpr::Exponent(base, _), FValue::Map(xs), FValue::Map(ys)) => {
            if xs.len() != ys.len() || xs.keys().any(|a| !ys.contains_key(a)) {
                return false;
            }
            let triples: Vec<_> = xs.iter().map(|(a, x)| (&**base, x, &ys[a])).collect();
            unify_seq(&triples, p, leaf, k)
        }
        (FunctorExpr::Compose(outer, inner), _, _) => {
            let inner_leaf = |a: &FValue, b: &FValue, p: &mut Pairing, k: &mut Cont<'_>| {
                unify_with(inner, a, b, p, leaf, k)
            };
            unify_with(outer, v, w, p, &inner_leaf, k)
        }
        (FunctorExpr::Bag, FValue::Bag(xs), FValue::Bag(ys)) => {
            let left: Vec<&FValue> = xs
                .iter()
                .flat_map(|(x, n)| std::iter::repeat_n(x, *n as usize))
                .collect();
            let right: Vec<&FValue> = ys
                .iter()
                .flat_map(|(y, n)| std::iter::repeat_n(y, *n as usize))
                .collect();
            if left.len() != right.len() {
                return false;
            }
            let mut used = vec![false; right.len()];
            match_elements(&left, &right, &mut used, p, leaf, k)
        }
        (FunctorExpr::Pow, FValue::Pow(xs), FValue::Pow(ys)) => {
            let left: Vec<&FValue> = xs.iter().collect();
            let right: Vec<&FValue> = ys.iter().collect();
            if left.len() != right.len() {
                return false;
            }
            let mut used = vec![false; right.len()];
            match_elements(&left, &right, &mut used, p, leaf, k)
        }
        _ => false,
    }
}

fn unify_seq(
    items: &[(&FunctorExpr, &FValue, &FValue)],
    p: &mut Pairing,
    leaf: &Leaf<'_>,
    k: &mut Cont<'_>,
) -> bool {
    match items.split_first() {
        None => k(p),
        Some((&(f, x, y), rest)) => {
            unify_with(f, x, y, p, leaf, &mut |p: &mut Pairing| unify_seq(rest, p, leaf, k))
        }
    }
}

/// Perfect matching between the two element lists, each pair unified by `leaf`.
fn match_elements(
    left: &[&FValue],
    right: &[&FValue],
    used: &mut [bool],
    p: &mut Pairing,
    leaf: &Leaf<'_>,
    k: &mut Cont<'_>,
) -> bool {
    let Some((first, rest)) = left.split_first() else {
        return k(p);
    };
    for j in 0..right.len() {
        if used[j] {
            continue;
        }
        // identical candidates lead to identical subtrees
        if (0..j).any(|i| !used[i] && right[i] == right[j]) {
            continue;
        }
        used[j] = true;
        let ok = leaf(first, right[j], p, &mut |p: &mut Pairing| {
            let mut used_inner = used.to_vec();
            match_elements(rest, right, &mut used_inner, p, leaf, k)
        });
        used[j] = false;
        if ok {
            return true;
        }
    }
    false
}
