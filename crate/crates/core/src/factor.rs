//! Factorizations of maps `f: X → F(Y)` through a middle object.
//!
//! Two modes are supported. [`Mode::All`] yields the precise factorization
//! `f = F(h) · p` where every element of the fresh middle object `R` is used
//! exactly once by `p`. [`Mode::Mono`] yields the least bound: the smallest
//! subset `Z ⊆ Y` through which `f` factors.

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::functor::{check_shape, fmap, used_states, FValue, FiniteSet, FunctorExpr, StateId, TotalMap};
use crate::unify::{unify, Pairing};

/// A map `X → F(Y)` between finite sets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FMap {
    functor: FunctorExpr,
    domain: FiniteSet,
    codomain: FiniteSet,
    values: IndexMap<StateId, FValue>,
}

impl FMap {
    pub fn new<I>(functor: FunctorExpr, domain: FiniteSet, codomain: FiniteSet, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (StateId, FValue)>,
    {
        functor.validate()?;
        let mut given: IndexMap<StateId, FValue> = IndexMap::new();
        for (x, v) in values {
            if !domain.contains(&x) {
                return Err(Error::UnknownState(x));
            }
            check_shape(&functor, &v, &codomain)?;
            given.insert(x, v);
        }
        let mut ordered = IndexMap::with_capacity(domain.len());
        for x in &domain {
            let v = given.swap_remove(x).ok_or_else(|| Error::NotTotal(x.clone()))?;
            ordered.insert(x.clone(), v);
        }
        Ok(FMap {
            functor,
            domain,
            codomain,
            values: ordered,
        })
    }

    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn domain(&self) -> &FiniteSet {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSet {
        &self.codomain
    }

    pub fn value(&self, x: &StateId) -> Option<&FValue> {
        self.values.get(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StateId, &FValue)> + '_ {
        self.values.iter()
    }

    /// `F(g) · self`
    pub fn then_fmap(&self, g: &TotalMap) -> Result<FMap> {
        let values = self
            .values
            .iter()
            .map(|(x, v)| Ok((x.clone(), fmap(&self.functor, g, v)?)))
            .collect::<Result<Vec<_>>>()?;
        FMap::new(self.functor.clone(), self.domain.clone(), g.codomain().clone(), values)
    }

    /// `self · g` for `g: W → X`.
    pub fn precompose(&self, g: &TotalMap) -> Result<FMap> {
        let values = g
            .iter()
            .map(|(w, x)| {
                let v = self.values.get(x).ok_or_else(|| Error::UnknownState(x.clone()))?;
                Ok((w.clone(), v.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        FMap::new(self.functor.clone(), g.domain().clone(), self.codomain.clone(), values)
    }
}

/// Which factorization system a construction uses.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    /// Epi/mono: least bounds, middle object a subset of the codomain.
    Mono,
    /// Iso/all maps: precise factorizations, middle object fresh.
    All,
}

/// `f = F(h) · p` with `p` precise.
#[derive(Clone, Debug)]
pub struct PreciseFactorization {
    pub middle: FiniteSet,
    pub p: FMap,
    pub h: TotalMap,
    /// For each middle element: the domain element whose value it occurs in,
    /// and its position path inside that value.
    pub provenance: IndexMap<StateId, (StateId, String)>,
}

/// `f = F(m) · g` with `m: Z ↪ Y` the least such subset inclusion.
#[derive(Clone, Debug)]
pub struct LeastBound {
    pub sub: FiniteSet,
    pub g: FMap,
    pub m: TotalMap,
}

/// Mode-independent view of a factorization `f = F(h) · p`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub middle: FiniteSet,
    pub p: FMap,
    pub h: TotalMap,
}

pub fn factorize(mode: Mode, f: &FMap) -> Result<Factorization> {
    match mode {
        Mode::Mono => {
            let lb = least_bound(f)?;
            Ok(Factorization {
                middle: lb.sub,
                p: lb.g,
                h: lb.m,
            })
        }
        Mode::All => {
            let pf = precise_factorize(f)?;
            Ok(Factorization {
                middle: pf.middle,
                p: pf.p,
                h: pf.h,
            })
        }
    }
}

struct Splitter<'a> {
    origin: &'a StateId,
    middle: &'a mut IndexMap<StateId, (StateId, StateId, String)>,
}

impl Splitter<'_> {
    fn fresh(&mut self, path: &str, target: &StateId) -> StateId {
        let base = if path.is_empty() {
            self.origin.to_string()
        } else {
            format!("{}.{}", self.origin, path)
        };
        let mut name = base.clone();
        while self.middle.contains_key(name.as_str()) {
            name.push('\'');
        }
        let name = StateId::new(name);
        self.middle
            .insert(name.clone(), (target.clone(), self.origin.clone(), path.to_string()));
        name
    }
}

fn join(path: &str, seg: impl std::fmt::Display) -> String {
    if path.is_empty() {
        seg.to_string()
    } else {
        format!("{path}.{seg}")
    }
}

/// Replaces every use of a state in `v` by a fresh middle element.
///
/// `leaf` is called at the `Identity` positions of `functor`; for a
/// composition the outer functor is split first and each of its leaves is
/// then split by the inner functor.
fn split(
    functor: &FunctorExpr,
    v: &FValue,
    path: &str,
    leaf: &mut dyn FnMut(&FValue, &str) -> Result<FValue>,
    at: &StateId,
) -> Result<FValue> {
    match (functor, v) {
        (FunctorExpr::Identity, _) => leaf(v, path),
        (FunctorExpr::Const(_), FValue::Const(_)) => Ok(v.clone()),
        (FunctorExpr::Product(fs), FValue::Tuple(items)) if fs.len() == items.len() => {
            let items = fs
                .iter()
                .zip(items)
                .enumerate()
                .map(|(i, (f, x))| split(f, x, &join(path, i), leaf, at))
                .collect::<Result<Vec<_>>>()?;
            Ok(FValue::Tuple(items))
        }
        (FunctorExpr::Coproduct(fs), FValue::Inj(tag, x)) if *tag < fs.len() => {
            Ok(FValue::inj(*tag, split(&fs[*tag], x, path, leaf, at)?))
        }
        (FunctorExpr::Exponent(base, _), FValue::Map(entries)) => {
            let entries = entries
                .iter()
                .map(|(a, x)| Ok((a.clone(), split(base, x, &join(path, a), leaf, at)?)))
                .collect::<Result<_>>()?;
            Ok(FValue::Map(entries))
        }
        (FunctorExpr::Compose(outer, inner), _) => split(
            outer,
            v,
            path,
            &mut |x: &FValue, p: &str| split(inner, x, p, leaf, at),
            at,
        ),
        (FunctorExpr::Bag, FValue::Bag(entries)) => {
            let mut copies = Vec::new();
            let mut k = 0usize;
            for (x, n) in entries {
                for _ in 0..*n {
                    copies.push((leaf(x, &join(path, k))?, 1));
                    k += 1;
                }
            }
            Ok(FValue::bag(copies))
        }
        (FunctorExpr::Pow, FValue::Pow(items)) => {
            if items.is_empty() {
                Ok(v.clone())
            } else {
                Err(Error::PowNotPrecise(at.clone()))
            }
        }
        _ => Err(Error::shape(format!("value of `{functor}`"), v)),
    }
}

/// Precise factorization of `f`, built by recursion on the functor.
///
/// Every occurrence of a state in a value (bag multiplicities counted) gets
/// its own middle element, named after the domain element and the position
/// path of the occurrence.
pub fn precise_factorize(f: &FMap) -> Result<PreciseFactorization> {
    let mut middle: IndexMap<StateId, (StateId, StateId, String)> = IndexMap::new();
    let mut p_values = Vec::with_capacity(f.domain.len());
    for (x, v) in &f.values {
        let mut splitter = Splitter {
            origin: x,
            middle: &mut middle,
        };
        let pv = split(
            &f.functor,
            v,
            "",
            &mut |leaf: &FValue, path: &str| match leaf {
                FValue::State(y) => Ok(FValue::State(splitter.fresh(path, y))),
                other => Err(Error::shape("state", other)),
            },
            x,
        )?;
        p_values.push((x.clone(), pv));
    }
    let carrier: FiniteSet = middle.keys().cloned().collect();
    let h = TotalMap::new(
        carrier.clone(),
        f.codomain.clone(),
        middle.iter().map(|(r, (y, _, _))| (r.clone(), y.clone())),
    )?;
    let p = FMap::new(f.functor.clone(), f.domain.clone(), carrier.clone(), p_values)?;
    let provenance = middle
        .into_iter()
        .map(|(r, (_, origin, path))| (r, (origin, path)))
        .collect();
    Ok(PreciseFactorization {
        middle: carrier,
        p,
        h,
        provenance,
    })
}

/// Whether `p` is precise: its own precise factorization is a bijection onto
/// the codomain carrier.
pub fn is_precise(p: &FMap) -> Result<bool> {
    let pf = precise_factorize(p)?;
    Ok(pf.h.is_bijective())
}

/// The least subset of the codomain through which `f` factors.
pub fn least_bound(f: &FMap) -> Result<LeastBound> {
    let mut used = FiniteSet::new();
    for v in f.values.values() {
        for y in &used_states(&f.functor, v)? {
            used.insert(y.clone());
        }
    }
    let sub = f.codomain.filter(|y| used.contains(y));
    let g = FMap::new(
        f.functor.clone(),
        f.domain.clone(),
        sub.clone(),
        f.values.iter().map(|(x, v)| (x.clone(), v.clone())),
    )?;
    let m = TotalMap::inclusion(&sub, &f.codomain)?;
    Ok(LeastBound { sub, g, m })
}

/// The bijection `d: R₁ → R₂` with `h₂ · d = h₁` and `F(d) · p₁ = p₂`.
pub fn factorization_iso(pf1: &PreciseFactorization, pf2: &PreciseFactorization) -> Result<TotalMap> {
    if pf1.p.functor != pf2.p.functor {
        return Err(Error::FunctorMismatch {
            left: pf1.p.functor.to_string(),
            right: pf2.p.functor.to_string(),
        });
    }
    if !pf1.p.domain.same_elements(&pf2.p.domain) || pf1.middle.len() != pf2.middle.len() {
        return Err(Error::NotIsomorphic);
    }
    let allow = |a: &StateId, b: &StateId| match (pf1.h.get(a), pf2.h.get(b)) {
        (Some(y1), Some(y2)) => y1 == y2,
        _ => false,
    };
    let xs: Vec<&StateId> = pf1.p.domain.iter().collect();
    let mut pairing = Pairing::new();
    let found = unify_all(&xs, pf1, pf2, &mut pairing, &allow);
    if !found || pairing.len() != pf1.middle.len() {
        return Err(Error::NotIsomorphic);
    }
    let d = TotalMap::new(
        pf1.middle.clone(),
        pf2.middle.clone(),
        pairing.pairs().cloned(),
    )
    .map_err(|_| Error::NotIsomorphic)?;
    // the search only pairs leaves, so re-check both equations on the result
    if d.then(&pf2.h)? != pf1.h || pf1.p.then_fmap(&d)? != pf2.p {
        return Err(Error::NotIsomorphic);
    }
    Ok(d)
}

fn unify_all(
    xs: &[&StateId],
    pf1: &PreciseFactorization,
    pf2: &PreciseFactorization,
    pairing: &mut Pairing,
    allow: &dyn Fn(&StateId, &StateId) -> bool,
) -> bool {
    let Some((x, rest)) = xs.split_first() else {
        return true;
    };
    let (Some(v), Some(w)) = (pf1.p.value(x), pf2.p.value(x)) else {
        return false;
    };
    unify(&pf1.p.functor, v, w, pairing, allow, &mut |p: &mut Pairing| {
        unify_all(rest, pf1, pf2, p, allow)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_functor;

    fn set(names: &[&str]) -> FiniteSet {
        FiniteSet::from_names(names.iter().copied()).unwrap()
    }

    fn pair(a: &str, b: &str) -> FValue {
        FValue::inj(0, FValue::tuple([FValue::state(a), FValue::state(b)]))
    }

    fn bottom() -> FValue {
        FValue::inj(1, FValue::bottom())
    }

    /// The non-precise map of the worked example for `X×X + 1`.
    fn example_f() -> FMap {
        FMap::new(
            parse_functor("Id x Id + 1").unwrap(),
            set(&["x1", "x2", "x3", "x4"]),
            set(&["y1", "y2", "y3", "y4"]),
            [
                ("x1".into(), bottom()),
                ("x2".into(), pair("y1", "y2")),
                ("x3".into(), pair("y2", "y2")),
                ("x4".into(), bottom()),
            ],
        )
        .unwrap()
    }

    fn example_p() -> FMap {
        FMap::new(
            parse_functor("Id x Id + 1").unwrap(),
            set(&["x1", "x2", "x3", "x4"]),
            set(&["r1", "r2", "r3", "r4"]),
            [
                ("x1".into(), bottom()),
                ("x2".into(), pair("r1", "r2")),
                ("x3".into(), pair("r3", "r4")),
                ("x4".into(), bottom()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn pair_functor_factorization() {
        let f = example_f();
        let pf = precise_factorize(&f).unwrap();
        assert_eq!(pf.middle.len(), 4);
        let targets: Vec<&str> = pf.middle.iter().map(|r| pf.h.apply(r).unwrap().as_str()).collect();
        assert_eq!(targets, ["y1", "y2", "y2", "y2"]);
        assert_eq!(pf.p.value(&"x1".into()), Some(&bottom()));
        assert_eq!(pf.p.value(&"x2".into()), Some(&pair("x2.0", "x2.1")));
        assert_eq!(pf.p.value(&"x3".into()), Some(&pair("x3.0", "x3.1")));
        assert_eq!(pf.p.then_fmap(&pf.h).unwrap(), f);
        assert!(is_precise(&pf.p).unwrap());

        // matches the hand-drawn factorization up to renaming
        let hand = PreciseFactorization {
            middle: set(&["r1", "r2", "r3", "r4"]),
            p: example_p(),
            h: TotalMap::new(
                set(&["r1", "r2", "r3", "r4"]),
                set(&["y1", "y2", "y3", "y4"]),
                [
                    ("r1".into(), "y1".into()),
                    ("r2".into(), "y2".into()),
                    ("r3".into(), "y2".into()),
                    ("r4".into(), "y2".into()),
                ],
            )
            .unwrap(),
            provenance: IndexMap::new(),
        };
        let d = factorization_iso(&pf, &hand).unwrap();
        assert_eq!(d.apply(&"x3.1".into()).unwrap().as_str(), "r4");
    }

    #[test]
    fn precision_of_worked_example() {
        assert!(is_precise(&example_p()).unwrap());
        assert!(!is_precise(&example_f()).unwrap());
    }

    #[test]
    fn bag_factorization_copies_multiplicities() {
        let f = FMap::new(
            FunctorExpr::Bag,
            set(&["x"]),
            set(&["y"]),
            [("x".into(), FValue::bag([(FValue::state("y"), 2)]))],
        )
        .unwrap();
        let pf = precise_factorize(&f).unwrap();
        assert_eq!(pf.middle, set(&["x.0", "x.1"]));
        assert_eq!(
            pf.p.value(&"x".into()).unwrap(),
            &FValue::bag([(FValue::state("x.0"), 1), (FValue::state("x.1"), 1)])
        );
        assert!(pf.middle.iter().all(|r| pf.h.apply(r).unwrap().as_str() == "y"));
    }

    #[test]
    fn constant_functor_has_empty_middle() {
        let f = FMap::new(
            FunctorExpr::one(),
            set(&["x"]),
            set(&["y"]),
            [("x".into(), FValue::bottom())],
        )
        .unwrap();
        let pf = precise_factorize(&f).unwrap();
        assert!(pf.middle.is_empty());
        assert_eq!(pf.p.value(&"x".into()), Some(&FValue::bottom()));
        assert!(pf.h.domain().is_empty());
    }

    #[test]
    fn singleton_bag_is_precise() {
        let p = FMap::new(
            FunctorExpr::Bag,
            set(&["x"]),
            set(&["y"]),
            [("x".into(), FValue::bag([(FValue::state("y"), 1)]))],
        )
        .unwrap();
        assert!(is_precise(&p).unwrap());
    }

    #[test]
    fn nonempty_powerset_value_is_rejected() {
        let f = FMap::new(
            FunctorExpr::Pow,
            set(&["x", "z"]),
            set(&["y"]),
            [
                ("x".into(), FValue::pow([])),
                ("z".into(), FValue::pow([FValue::state("y")])),
            ],
        )
        .unwrap();
        assert_eq!(precise_factorize(&f).unwrap_err(), Error::PowNotPrecise("z".into()));
        let empty = FMap::new(FunctorExpr::Pow, set(&["x"]), set(&[]), [("x".into(), FValue::pow([]))]).unwrap();
        assert!(is_precise(&empty).unwrap());
    }

    #[test]
    fn least_bound_examples() {
        assert_eq!(least_bound(&example_f()).unwrap().sub, set(&["y1", "y2"]));
        let f = FMap::new(
            FunctorExpr::Bag,
            set(&["x"]),
            set(&["y", "z", "w"]),
            [("x".into(), FValue::bag([(FValue::state("y"), 2), (FValue::state("z"), 1)]))],
        )
        .unwrap();
        let lb = least_bound(&f).unwrap();
        assert_eq!(lb.sub, set(&["y", "z"]));
        assert_eq!(lb.g.then_fmap(&lb.m).unwrap(), f);
        let all_bottom = FMap::new(
            parse_functor("Id x Id + 1").unwrap(),
            set(&["a", "b"]),
            set(&["y"]),
            [("a".into(), bottom()), ("b".into(), bottom())],
        )
        .unwrap();
        assert!(least_bound(&all_bottom).unwrap().sub.is_empty());
    }

    #[test]
    fn iso_is_identity_on_itself_and_rejects_mismatch() {
        let pf = precise_factorize(&example_f()).unwrap();
        let d = factorization_iso(&pf, &pf).unwrap();
        assert_eq!(d, TotalMap::identity(&pf.middle));

        let mut other = pf.clone();
        let swapped: Vec<(StateId, StateId)> = pf
            .h
            .iter()
            .map(|(r, y)| {
                let y = if y.as_str() == "y1" { "y2" } else { "y1" };
                (r.clone(), StateId::new(y))
            })
            .collect();
        other.h = TotalMap::new(pf.middle.clone(), pf.h.codomain().clone(), swapped).unwrap();
        assert_eq!(factorization_iso(&pf, &other).unwrap_err(), Error::NotIsomorphic);
    }

    #[test]
    fn composite_factorization_goes_outer_then_inner() {
        let f = FMap::new(
            parse_functor("Bag . (Id x Id)").unwrap(),
            set(&["x"]),
            set(&["a", "b"]),
            [(
                "x".into(),
                FValue::bag([(FValue::tuple([FValue::state("a"), FValue::state("b")]), 2)]),
            )],
        )
        .unwrap();
        let pf = precise_factorize(&f).unwrap();
        assert_eq!(pf.middle, set(&["x.0.0", "x.0.1", "x.1.0", "x.1.1"]));
        assert_eq!(pf.p.then_fmap(&pf.h).unwrap(), f);
        assert!(is_precise(&pf.p).unwrap());
    }

    #[test]
    fn mode_dispatch() {
        let f = example_f();
        assert_eq!(factorize(Mode::Mono, &f).unwrap().middle, set(&["y1", "y2"]));
        assert_eq!(factorize(Mode::All, &f).unwrap().middle.len(), 4);
    }
}
