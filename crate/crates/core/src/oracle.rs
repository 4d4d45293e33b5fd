//! Brute-force checks of the definitional properties on tiny instances.
//!
//! Everything here enumerates maps or coalgebras outright and is guarded by a
//! bound on the number of candidates, reported as
//! [`Error::SearchSpaceTooLarge`] instead of running away.

use std::collections::{HashSet, VecDeque};

use crate::coalgebra::{check_morphism, Multigraph, PointedCoalgebra};
use crate::error::{Error, Result};
use crate::functor::{fmap, used_states, FValue, FiniteSet, FunctorExpr, StateId, TotalMap};
use crate::reach::is_reachable;

pub const DEFAULT_GUARD: u128 = 10_000_000;

/// Search-space bound shared by all oracles.
#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    pub guard: u128,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { guard: DEFAULT_GUARD }
    }
}

#[derive(Clone, Debug)]
pub struct HomSet {
    pub homs: Vec<TotalMap>,
}

/// A pointed coalgebra with a homomorphism into the tested one that has no
/// homomorphic section.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub coalgebra: PointedCoalgebra,
    pub hom: TotalMap,
}

fn check(size: u128, guard: u128) -> Result<()> {
    if size > guard {
        Err(Error::SearchSpaceTooLarge { size, guard })
    } else {
        Ok(())
    }
}

fn pow(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// Backtracking over maps `src → tgt` with `h(x) ∈ candidates[x]`.
///
/// The point comes first; the square at `x` is checked as soon as `x` and all
/// states used by `c(x)` have images. `found` returns `true` to stop.
fn search_homs(
    src: &PointedCoalgebra,
    tgt: &PointedCoalgebra,
    candidates: &[Vec<StateId>],
    found: &mut dyn FnMut(&TotalMap) -> bool,
) -> Result<()> {
    let order: Vec<usize> = std::iter::once(src.carrier().index_of(src.point()).expect("point"))
        .chain((0..src.len()).filter(|&i| src.carrier().get_index(i) != Some(src.point())))
        .collect();
    let states: Vec<StateId> = order.iter().map(|&i| src.carrier().get_index(i).unwrap().clone()).collect();
    let cands: Vec<&Vec<StateId>> = order.iter().map(|&i| &candidates[i]).collect();
    let position = |x: &StateId| states.iter().position(|s| s == x).expect("carrier state");
    // squares to check once position k is assigned
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    for (k, x) in states.iter().enumerate() {
        let used = used_states(src.functor(), src.structure(x)?)?;
        let last = used.iter().map(position).chain([k]).max().unwrap();
        due[last].push(k);
    }
    let mut image: Vec<StateId> = Vec::with_capacity(states.len());
    let partial = |image: &[StateId]| -> TotalMap {
        let dom: FiniteSet = states[..image.len()].iter().cloned().collect();
        TotalMap::new(dom, tgt.carrier().clone(), states.iter().cloned().zip(image.iter().cloned()))
            .expect("images are target states")
    };
    fn go(
        k: usize,
        image: &mut Vec<StateId>,
        ctx: &(dyn Fn(usize, &[StateId]) -> Result<bool> + '_),
        cands: &[&Vec<StateId>],
        done: &mut dyn FnMut(&[StateId]) -> bool,
    ) -> Result<bool> {
        if k == cands.len() {
            return Ok(done(image));
        }
        for y in cands[k] {
            image.push(y.clone());
            if ctx(k, image)? && go(k + 1, image, ctx, cands, done)? {
                return Ok(true);
            }
            image.pop();
        }
        Ok(false)
    }
    let squares = |k: usize, image: &[StateId]| -> Result<bool> {
        if due[k].is_empty() {
            return Ok(true);
        }
        let h = partial(image);
        for &j in &due[k] {
            let x = &states[j];
            if &fmap(src.functor(), &h, src.structure(x)?)? != tgt.structure(&image[j])? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut done = |image: &[StateId]| found(&partial(image));
    go(0, &mut image, &squares, &cands, &mut done)?;
    Ok(())
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

impl Oracle {
    pub fn new(guard: u128) -> Self {
        Oracle { guard }
    }

    /// All pointed homomorphisms `src → tgt`.
    pub fn enumerate_homs(&self, src: &PointedCoalgebra, tgt: &PointedCoalgebra) -> Result<HomSet> {
        same_functor(src.functor(), tgt.functor())?;
        check(pow(tgt.len(), src.len()), self.guard)?;
        let candidates: Vec<Vec<StateId>> = src
            .carrier()
            .iter()
            .map(|x| {
                if x == src.point() {
                    vec![tgt.point().clone()]
                } else {
                    tgt.carrier().iter().cloned().collect()
                }
            })
            .collect();
        let mut homs = Vec::new();
        search_homs(src, tgt, &candidates, &mut |h| {
            homs.push(h.clone());
            false
        })?;
        Ok(HomSet { homs })
    }

    /// Whether `h` has a homomorphic section `s` with `h · s = id`.
    pub fn is_split_epi(&self, h: &TotalMap, src: &PointedCoalgebra, tgt: &PointedCoalgebra) -> Result<bool> {
        if !check_morphism(h, src, tgt)?.ok {
            return Err(Error::NotAHomomorphism);
        }
        Ok(self.section(h, src, tgt)?.is_some())
    }

    fn section(&self, h: &TotalMap, src: &PointedCoalgebra, tgt: &PointedCoalgebra) -> Result<Option<TotalMap>> {
        let candidates: Vec<Vec<StateId>> = tgt
            .carrier()
            .iter()
            .map(|y| {
                if y == tgt.point() {
                    vec![src.point().clone()]
                } else {
                    h.iter().filter(|(_, z)| *z == y).map(|(x, _)| x.clone()).collect()
                }
            })
            .collect();
        let size = candidates.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
        check(size, self.guard)?;
        let mut section = None;
        search_homs(tgt, src, &candidates, &mut |s| {
            section = Some(s.clone());
            true
        })?;
        Ok(section)
    }

    /// Every subcoalgebra containing the point is the whole coalgebra.
    pub fn reachable_by_definition(&self, c: &PointedCoalgebra) -> Result<bool> {
        let n = c.len();
        check(pow(2, n - 1), self.guard)?;
        let p = c.carrier().index_of(c.point()).expect("point");
        let succ: Vec<Vec<usize>> = c
            .carrier()
            .iter()
            .map(|x| {
                let used = c.successors(x).expect("well-formed");
                used.iter().map(|y| c.carrier().index_of(y).unwrap()).collect()
            })
            .collect();
        let others: Vec<usize> = (0..n).filter(|&i| i != p).collect();
        for mask in 0u64..(1u64 << others.len()) {
            let mut member = vec![false; n];
            member[p] = true;
            for (b, &i) in others.iter().enumerate() {
                member[i] = mask >> b & 1 == 1;
            }
            let closed = (0..n).all(|i| !member[i] || succ[i].iter().all(|&j| member[j]));
            if !closed {
                continue;
            }
            let sub = c.carrier().filter(|x| member[c.carrier().index_of(x).unwrap()]);
            let d = c.restrict(&sub)?;
            let m = TotalMap::inclusion(&sub, c.carrier())?;
            debug_assert!(check_morphism(&m, &d, c)?.ok);
            if !m.is_bijective() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Looks for a coalgebra with at most `size_bound` states and a
    /// homomorphism into `c` that does not split.
    ///
    /// `None` means nothing was found within the bound, not that `c` is a tree.
    /// Unreachable candidates are skipped: restricting a non-split
    /// homomorphism to the reachable part keeps it non-split, so the reachable
    /// part is itself a counterexample no larger than the original.
    pub fn tree_refute_by_definition(&self, c: &PointedCoalgebra, size_bound: usize) -> Result<Option<Counterexample>> {
        let mut spent = 0u128;
        let targets: Vec<StateId> = c.carrier().iter().cloned().collect();
        for n in 1..=size_bound {
            let names: Vec<StateId> = (0..n).map(|i| StateId::new(format!("t{i}"))).collect();
            let carrier: FiniteSet = names.iter().cloned().collect();
            spent = spent.saturating_add(pow(targets.len(), n - 1));
            check(spent, self.guard)?;
            // odometer over h(t1..), with h(t0) = point
            let mut digits = vec![0usize; n - 1];
            loop {
                let image: Vec<StateId> = std::iter::once(c.point().clone())
                    .chain(digits.iter().map(|&d| targets[d].clone()))
                    .collect();
                let h = TotalMap::new(carrier.clone(), c.carrier().clone(), names.iter().cloned().zip(image.iter().cloned()))?;
                if let Some(found) = self.refute_with(c, &carrier, &h, &mut spent)? {
                    return Ok(Some(found));
                }
                if !advance(&mut digits, targets.len()) {
                    break;
                }
            }
        }
        Ok(None)
    }

    fn refute_with(
        &self,
        c: &PointedCoalgebra,
        carrier: &FiniteSet,
        h: &TotalMap,
        spent: &mut u128,
    ) -> Result<Option<Counterexample>> {
        let functor = c.functor();
        let mut options: Vec<Vec<FValue>> = Vec::with_capacity(carrier.len());
        for t in carrier {
            let target = c.structure(h.apply(t)?)?;
            let leaf = |w: &FValue| -> Vec<FValue> {
                match w {
                    FValue::State(y) => h
                        .iter()
                        .filter(|(_, z)| *z == y)
                        .map(|(x, _)| FValue::State(x.clone()))
                        .collect(),
                    _ => Vec::new(),
                }
            };
            let pre = preimages(functor, target, &leaf);
            if pre.is_empty() {
                return Ok(None);
            }
            options.push(pre);
        }
        let size = options.iter().fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128));
        *spent = spent.saturating_add(size);
        check(*spent, self.guard)?;
        let mut digits = vec![0usize; options.len()];
        loop {
            let structure = carrier
                .iter()
                .zip(&digits)
                .enumerate()
                .map(|(i, (t, &d))| (t.clone(), options[i][d].clone()));
            let t = PointedCoalgebra::new(functor.clone(), carrier.clone(), structure, carrier.get_index(0).unwrap().clone())?;
            if is_reachable(&t)? {
                debug_assert!(check_morphism(h, &t, c)?.ok);
                if self.section(h, &t, c)?.is_none() {
                    return Ok(Some(Counterexample {
                        coalgebra: t,
                        hom: h.clone(),
                    }));
                }
            }
            let radices: Vec<usize> = options.iter().map(Vec::len).collect();
            if !advance_mixed(&mut digits, &radices) {
                return Ok(None);
            }
        }
    }
}

fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

fn advance_mixed(digits: &mut [usize], radices: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radices) {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

/// All `v` with `F(h)(v) = w`, where `leaf` lists the preimages of a leaf.
fn preimages(functor: &FunctorExpr, w: &FValue, leaf: &dyn Fn(&FValue) -> Vec<FValue>) -> Vec<FValue> {
    match (functor, w) {
        (FunctorExpr::Identity, _) => leaf(w),
        (FunctorExpr::Const(_), FValue::Const(_)) => vec![w.clone()],
        (FunctorExpr::Product(fs), FValue::Tuple(items)) => {
            let parts: Vec<Vec<FValue>> = fs.iter().zip(items).map(|(f, x)| preimages(f, x, leaf)).collect();
            cartesian(&parts).into_iter().map(FValue::Tuple).collect()
        }
        (FunctorExpr::Coproduct(fs), FValue::Inj(tag, x)) => fs
            .get(*tag)
            .map(|f| preimages(f, x, leaf).into_iter().map(|v| FValue::inj(*tag, v)).collect())
            .unwrap_or_default(),
        (FunctorExpr::Exponent(base, _), FValue::Map(entries)) => {
            let keys: Vec<&String> = entries.keys().collect();
            let parts: Vec<Vec<FValue>> = entries.values().map(|x| preimages(base, x, leaf)).collect();
            cartesian(&parts)
                .into_iter()
                .map(|vs| FValue::Map(keys.iter().map(|k| (*k).clone()).zip(vs).collect()))
                .collect()
        }
        (FunctorExpr::Compose(outer, inner), _) => {
            let inner_leaf = |x: &FValue| preimages(inner, x, leaf);
            preimages(outer, w, &inner_leaf)
        }
        (FunctorExpr::Bag, FValue::Bag(entries)) => {
            // each element's copies are spread over its preimages
            let parts: Vec<Vec<Vec<(FValue, u32)>>> = entries
                .iter()
                .map(|(x, n)| multisets(&leaf(x), *n))
                .collect();
            cartesian(&parts)
                .into_iter()
                .map(|choice| FValue::bag(choice.into_iter().flatten()))
                .collect()
        }
        (FunctorExpr::Pow, FValue::Pow(items)) => {
            let parts: Vec<Vec<Vec<FValue>>> = items.iter().map(|x| nonempty_subsets(&leaf(x))).collect();
            cartesian(&parts)
                .into_iter()
                .map(|choice| FValue::pow(choice.into_iter().flatten()))
                .collect()
        }
        _ => Vec::new(),
    }
}

fn cartesian<T: Clone>(parts: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for part in parts {
        let mut next = Vec::with_capacity(out.len() * part.len());
        for prefix in &out {
            for x in part {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Multisets of size `n` over `items`, as (item, multiplicity) lists.
fn multisets(items: &[FValue], n: u32) -> Vec<Vec<(FValue, u32)>> {
    fn go(items: &[FValue], n: u32, acc: &mut Vec<(FValue, u32)>, out: &mut Vec<Vec<(FValue, u32)>>) {
        match items.split_first() {
            None => {
                if n == 0 {
                    out.push(acc.clone());
                }
            }
            Some((x, rest)) => {
                for k in (0..=n).rev() {
                    if k > 0 {
                        acc.push((x.clone(), k));
                    }
                    go(rest, n - k, acc, out);
                    if k > 0 {
                        acc.pop();
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    go(items, n, &mut Vec::new(), &mut out);
    out
}

fn nonempty_subsets(items: &[FValue]) -> Vec<Vec<FValue>> {
    (1u64..(1u64 << items.len().min(63)))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

/// Breadth-first closure from the root, in visiting order.
pub fn bfs_reachable(g: &Multigraph) -> FiniteSet {
    let mut seen = FiniteSet::new();
    let mut queue = VecDeque::from([g.root().clone()]);
    let mut queued: HashSet<StateId> = HashSet::from([g.root().clone()]);
    while let Some(v) = queue.pop_front() {
        seen.insert(v.clone());
        for e in g.out_edges(&v) {
            if queued.insert(e.target.clone()) {
                queue.push_back(e.target.clone());
            }
        }
    }
    seen
}
