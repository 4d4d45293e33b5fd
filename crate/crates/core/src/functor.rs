//! Functor expressions, their values at finite carriers, and the action on maps.
//!
//! A [`FunctorExpr`] describes the shape of the successor structure of a state.
//! [`FValue`]s are the elements of `F(X)` for a finite carrier `X`; the carrier
//! elements themselves appear at the `Identity` positions of the expression.
//! Under a composition `F . G` the `Identity` positions of `F` hold values of
//! `G`, so every algorithm here is written against a leaf callback that is
//! threaded through compositions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use indexmap::{IndexMap, IndexSet};

use crate::error::{Error, Result};

/// Name of a state, vertex or other carrier element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(Arc<str>);

impl StateId {
    pub fn new(name: impl AsRef<str>) -> Self {
        let name = name.as_ref();
        assert!(!name.is_empty(), "state names must be non-empty");
        StateId(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for StateId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for StateId {
    fn from(s: &str) -> Self {
        StateId::new(s)
    }
}

impl From<String> for StateId {
    fn from(s: String) -> Self {
        StateId::new(s)
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// A finite set of states with deterministic (insertion) iteration order.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct FiniteSet(IndexSet<StateId>);

impl FiniteSet {
    pub fn new() -> Self {
        FiniteSet(IndexSet::new())
    }

    /// Builds a set from a sequence, rejecting duplicates.
    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<StateId>,
    {
        let mut set = FiniteSet::new();
        for name in names {
            let name = name.into();
            if !set.insert(name.clone()) {
                return Err(Error::Duplicate(name.to_string()));
            }
        }
        Ok(set)
    }

    /// Returns `false` if the element was already present.
    pub fn insert(&mut self, x: StateId) -> bool {
        self.0.insert(x)
    }

    pub fn contains(&self, x: &StateId) -> bool {
        self.0.contains(x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &StateId> + '_ {
        self.0.iter()
    }

    pub fn get_index(&self, i: usize) -> Option<&StateId> {
        self.0.get_index(i)
    }

    pub fn index_of(&self, x: &StateId) -> Option<usize> {
        self.0.get_index_of(x)
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.0.iter().all(|x| other.contains(x))
    }

    /// Equality as sets, ignoring order.
    pub fn same_elements(&self, other: &FiniteSet) -> bool {
        self.len() == other.len() && self.is_subset(other)
    }

    /// Elements of `self` that satisfy `keep`, in the order of `self`.
    pub fn filter(&self, mut keep: impl FnMut(&StateId) -> bool) -> FiniteSet {
        FiniteSet(self.0.iter().filter(|x| keep(x)).cloned().collect())
    }
}

impl FromIterator<StateId> for FiniteSet {
    /// Collects, silently dropping repeated elements.
    fn from_iter<T: IntoIterator<Item = StateId>>(iter: T) -> Self {
        FiniteSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a FiniteSet {
    type Item = &'a StateId;
    type IntoIter = indexmap::set::Iter<'a, StateId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A total function between two finite sets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TotalMap {
    domain: FiniteSet,
    codomain: FiniteSet,
    mapping: IndexMap<StateId, StateId>,
}

impl TotalMap {
    pub fn new<I>(domain: FiniteSet, codomain: FiniteSet, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (StateId, StateId)>,
    {
        let mut mapping = IndexMap::new();
        for (x, y) in pairs {
            if !domain.contains(&x) {
                return Err(Error::UnknownState(x));
            }
            if !codomain.contains(&y) {
                return Err(Error::UnknownState(y));
            }
            mapping.insert(x, y);
        }
        for x in &domain {
            if !mapping.contains_key(x) {
                return Err(Error::NotTotal(x.clone()));
            }
        }
        // keep the mapping in domain order
        let mapping = domain
            .iter()
            .map(|x| (x.clone(), mapping[x].clone()))
            .collect();
        Ok(TotalMap {
            domain,
            codomain,
            mapping,
        })
    }

    pub fn identity(set: &FiniteSet) -> Self {
        TotalMap {
            domain: set.clone(),
            codomain: set.clone(),
            mapping: set.iter().map(|x| (x.clone(), x.clone())).collect(),
        }
    }

    /// The inclusion of `sub` into `sup`.
    pub fn inclusion(sub: &FiniteSet, sup: &FiniteSet) -> Result<Self> {
        TotalMap::new(
            sub.clone(),
            sup.clone(),
            sub.iter().map(|x| (x.clone(), x.clone())),
        )
    }

    pub fn domain(&self) -> &FiniteSet {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSet {
        &self.codomain
    }

    pub fn get(&self, x: &StateId) -> Option<&StateId> {
        self.mapping.get(x)
    }

    pub fn apply(&self, x: &StateId) -> Result<&StateId> {
        self.mapping
            .get(x)
            .ok_or_else(|| Error::UnknownState(x.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StateId, &StateId)> + '_ {
        self.mapping.iter()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &TotalMap) -> Result<TotalMap> {
        let pairs = self
            .mapping
            .iter()
            .map(|(x, y)| Ok((x.clone(), other.apply(y)?.clone())))
            .collect::<Result<Vec<_>>>()?;
        TotalMap::new(self.domain.clone(), other.codomain.clone(), pairs)
    }

    pub fn is_injective(&self) -> bool {
        let image: IndexSet<&StateId> = self.mapping.values().collect();
        image.len() == self.mapping.len()
    }

    pub fn is_surjective(&self) -> bool {
        let image: IndexSet<&StateId> = self.mapping.values().collect();
        self.codomain.iter().all(|y| image.contains(y))
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// The image of the whole domain, in codomain order.
    pub fn image(&self) -> FiniteSet {
        let image: IndexSet<&StateId> = self.mapping.values().collect();
        self.codomain.filter(|y| image.contains(y))
    }

    /// Number of preimages of each codomain element.
    pub fn fibre_sizes(&self) -> IndexMap<StateId, usize> {
        let mut sizes: IndexMap<StateId, usize> =
            self.codomain.iter().map(|y| (y.clone(), 0)).collect();
        for y in self.mapping.values() {
            *sizes.get_mut(y).expect("image lies in codomain") += 1;
        }
        sizes
    }

    pub fn inverse(&self) -> Option<TotalMap> {
        if !self.is_bijective() {
            return None;
        }
        TotalMap::new(
            self.codomain.clone(),
            self.domain.clone(),
            self.mapping.iter().map(|(x, y)| (y.clone(), x.clone())),
        )
        .ok()
    }
}

/// Syntax tree of a set functor.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum FunctorExpr {
    Identity,
    /// Constant functor on a non-empty finite set of symbols.
    Const(Vec<String>),
    Product(Vec<FunctorExpr>),
    Coproduct(Vec<FunctorExpr>),
    /// `base ^ alphabet`: total maps from the alphabet into `base`.
    Exponent(Box<FunctorExpr>, Vec<String>),
    /// `outer . inner`, i.e. `X ↦ outer(inner(X))`.
    Compose(Box<FunctorExpr>, Box<FunctorExpr>),
    /// Finite multisets.
    Bag,
    /// Finite subsets.
    Pow,
}

impl FunctorExpr {
    /// `{0, 1}`
    pub fn two() -> Self {
        FunctorExpr::Const(vec!["0".into(), "1".into()])
    }

    /// `{⊥}`
    pub fn one() -> Self {
        FunctorExpr::Const(vec![BOTTOM.into()])
    }

    pub fn constant<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols = unique_symbols(symbols)?;
        if symbols.is_empty() {
            return Err(Error::EmptyConstant);
        }
        Ok(FunctorExpr::Const(symbols))
    }

    pub fn exponent<I, S>(base: FunctorExpr, alphabet: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let alphabet = unique_symbols(alphabet)?;
        if alphabet.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        Ok(FunctorExpr::Exponent(Box::new(base), alphabet))
    }

    pub fn compose(outer: FunctorExpr, inner: FunctorExpr) -> Self {
        FunctorExpr::Compose(Box::new(outer), Box::new(inner))
    }

    /// The functor of partial deterministic automata, `2 x (Id + 1)^A`.
    pub fn partial_dfa<I, S>(alphabet: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ok(FunctorExpr::Product(vec![
            FunctorExpr::two(),
            FunctorExpr::exponent(
                FunctorExpr::Coproduct(vec![FunctorExpr::Identity, FunctorExpr::one()]),
                alphabet,
            )?,
        ]))
    }

    /// Whether a `Pow` occurs anywhere in the expression.
    pub fn mentions_pow(&self) -> bool {
        match self {
            FunctorExpr::Pow => true,
            FunctorExpr::Identity | FunctorExpr::Const(_) | FunctorExpr::Bag => false,
            FunctorExpr::Product(fs) | FunctorExpr::Coproduct(fs) => {
                fs.iter().any(FunctorExpr::mentions_pow)
            }
            FunctorExpr::Exponent(base, _) => base.mentions_pow(),
            FunctorExpr::Compose(outer, inner) => outer.mentions_pow() || inner.mentions_pow(),
        }
    }

    /// Structural validity: non-empty component lists, constants and alphabets.
    pub fn validate(&self) -> Result<()> {
        match self {
            FunctorExpr::Identity | FunctorExpr::Bag | FunctorExpr::Pow => Ok(()),
            FunctorExpr::Const(symbols) => {
                if symbols.is_empty() {
                    return Err(Error::EmptyConstant);
                }
                unique_symbols(symbols.iter().cloned()).map(|_| ())
            }
            FunctorExpr::Product(fs) | FunctorExpr::Coproduct(fs) => {
                if fs.is_empty() {
                    return Err(Error::Invalid(
                        "products and coproducts need at least one component".into(),
                    ));
                }
                fs.iter().try_for_each(FunctorExpr::validate)
            }
            FunctorExpr::Exponent(base, alphabet) => {
                if alphabet.is_empty() {
                    return Err(Error::EmptyAlphabet);
                }
                unique_symbols(alphabet.iter().cloned())?;
                base.validate()
            }
            FunctorExpr::Compose(outer, inner) => {
                outer.validate()?;
                inner.validate()
            }
        }
    }
}

/// The symbol of the one-element constant set `1`.
pub const BOTTOM: &str = "⊥";

fn unique_symbols<I, S>(symbols: I) -> Result<Vec<String>>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut seen = IndexSet::new();
    for s in symbols {
        let s = s.into();
        if !seen.insert(s.clone()) {
            return Err(Error::Duplicate(s));
        }
    }
    Ok(seen.into_iter().collect())
}

/// An element of `F(X)`.
///
/// Bags store only positive multiplicities and powerset values are sets, so
/// the derived equality is equality of functor values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum FValue {
    State(StateId),
    Const(String),
    Tuple(Vec<FValue>),
    Inj(usize, Box<FValue>),
    Map(BTreeMap<String, FValue>),
    Bag(BTreeMap<FValue, u32>),
    Pow(BTreeSet<FValue>),
}

impl FValue {
    pub fn state(name: impl Into<StateId>) -> Self {
        FValue::State(name.into())
    }

    pub fn constant(symbol: impl Into<String>) -> Self {
        FValue::Const(symbol.into())
    }

    pub fn bottom() -> Self {
        FValue::Const(BOTTOM.into())
    }

    pub fn inj(tag: usize, v: FValue) -> Self {
        FValue::Inj(tag, Box::new(v))
    }

    pub fn tuple(items: impl IntoIterator<Item = FValue>) -> Self {
        FValue::Tuple(items.into_iter().collect())
    }

    pub fn map<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, FValue)>,
        S: Into<String>,
    {
        FValue::Map(entries.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    /// A multiset; repeated elements are summed and zero entries dropped.
    pub fn bag(entries: impl IntoIterator<Item = (FValue, u32)>) -> Self {
        let mut bag = BTreeMap::new();
        for (v, n) in entries {
            if n > 0 {
                *bag.entry(v).or_insert(0) += n;
            }
        }
        FValue::Bag(bag)
    }

    pub fn pow(items: impl IntoIterator<Item = FValue>) -> Self {
        FValue::Pow(items.into_iter().collect())
    }

    fn kind(&self) -> &'static str {
        match self {
            FValue::State(_) => "state",
            FValue::Const(_) => "constant",
            FValue::Tuple(_) => "tuple",
            FValue::Inj(..) => "injection",
            FValue::Map(_) => "exponent map",
            FValue::Bag(_) => "bag",
            FValue::Pow(_) => "set",
        }
    }
}

impl fmt::Display for FValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn elem(v: &FValue, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match v {
                FValue::State(s) => write!(f, "{s}"),
                other => write!(f, "{other}"),
            }
        }
        match self {
            FValue::State(s) => write!(f, "@{s}"),
            FValue::Const(c) => write!(f, "#{c}"),
            FValue::Tuple(items) => {
                f.write_str("(")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
            FValue::Inj(tag, v) => write!(f, "{tag}: {v}"),
            FValue::Map(entries) => {
                f.write_str("{")?;
                for (i, (a, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, " {a}: {v}")?;
                }
                f.write_str(" }")
            }
            FValue::Bag(entries) => {
                f.write_str("[")?;
                for (i, (v, n)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    elem(v, f)?;
                    if *n != 1 {
                        write!(f, "*{n}")?;
                    }
                }
                f.write_str("]")
            }
            FValue::Pow(items) => {
                f.write_str("{|")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(" ")?;
                    elem(v, f)?;
                }
                if !items.is_empty() {
                    f.write_str(" ")?;
                }
                f.write_str("|}")
            }
        }
    }
}

/// Callback applied at the `Identity` positions of a functor expression.
pub type LeafFn<'a> = dyn FnMut(&FValue) -> Result<FValue> + 'a;
pub type VisitFn<'a> = dyn FnMut(&FValue) -> Result<()> + 'a;

/// Rebuilds `v` with every `Identity` position replaced by `leaf(position)`.
///
/// Bags re-sum multiplicities of elements that become equal and sets merge
/// duplicates, which is exactly the functor action on maps.
pub fn map_leaves(functor: &FunctorExpr, v: &FValue, leaf: &mut LeafFn<'_>) -> Result<FValue> {
    match (functor, v) {
        (FunctorExpr::Identity, _) => leaf(v),
        (FunctorExpr::Const(symbols), FValue::Const(c)) => {
            if symbols.contains(c) {
                Ok(v.clone())
            } else {
                Err(Error::shape(format!("one of {{{}}}", symbols.join(",")), v))
            }
        }
        (FunctorExpr::Product(fs), FValue::Tuple(items)) => {
            if fs.len() != items.len() {
                return Err(Error::shape(format!("{}-tuple", fs.len()), v));
            }
            let items = fs
                .iter()
                .zip(items)
                .map(|(f, item)| map_leaves(f, item, leaf))
                .collect::<Result<Vec<_>>>()?;
            Ok(FValue::Tuple(items))
        }
        (FunctorExpr::Coproduct(fs), FValue::Inj(tag, inner)) => {
            let f = fs
                .get(*tag)
                .ok_or_else(|| Error::shape(format!("tag below {}", fs.len()), v))?;
            Ok(FValue::Inj(*tag, Box::new(map_leaves(f, inner, leaf)?)))
        }
        (FunctorExpr::Exponent(base, alphabet), FValue::Map(entries)) => {
            check_letters(alphabet, entries, v)?;
            let entries = entries
                .iter()
                .map(|(a, x)| Ok((a.clone(), map_leaves(base, x, leaf)?)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            Ok(FValue::Map(entries))
        }
        (FunctorExpr::Compose(outer, inner), _) => {
            map_leaves(outer, v, &mut |x| map_leaves(inner, x, leaf))
        }
        (FunctorExpr::Bag, FValue::Bag(entries)) => {
            let mut out: BTreeMap<FValue, u32> = BTreeMap::new();
            for (x, n) in entries {
                if *n == 0 {
                    return Err(Error::shape("positive multiplicity", v));
                }
                *out.entry(leaf(x)?).or_insert(0) += n;
            }
            Ok(FValue::Bag(out))
        }
        (FunctorExpr::Pow, FValue::Pow(items)) => Ok(FValue::Pow(
            items.iter().map(leaf).collect::<Result<_>>()?,
        )),
        (functor, v) => Err(mismatch(functor, v)),
    }
}

/// Calls `leaf` on every `Identity` position (once per distinct bag/set element).
pub fn visit_leaves(functor: &FunctorExpr, v: &FValue, leaf: &mut VisitFn<'_>) -> Result<()> {
    match (functor, v) {
        (FunctorExpr::Identity, _) => leaf(v),
        (FunctorExpr::Const(symbols), FValue::Const(c)) => {
            if symbols.contains(c) {
                Ok(())
            } else {
                Err(Error::shape(format!("one of {{{}}}", symbols.join(",")), v))
            }
        }
        (FunctorExpr::Product(fs), FValue::Tuple(items)) => {
            if fs.len() != items.len() {
                return Err(Error::shape(format!("{}-tuple", fs.len()), v));
            }
            fs.iter()
                .zip(items)
                .try_for_each(|(f, item)| visit_leaves(f, item, leaf))
        }
        (FunctorExpr::Coproduct(fs), FValue::Inj(tag, inner)) => {
            let f = fs
                .get(*tag)
                .ok_or_else(|| Error::shape(format!("tag below {}", fs.len()), v))?;
            visit_leaves(f, inner, leaf)
        }
        (FunctorExpr::Exponent(base, alphabet), FValue::Map(entries)) => {
            check_letters(alphabet, entries, v)?;
            entries.values().try_for_each(|x| visit_leaves(base, x, leaf))
        }
        (FunctorExpr::Compose(outer, inner), _) => {
            visit_leaves(outer, v, &mut |x| visit_leaves(inner, x, leaf))
        }
        (FunctorExpr::Bag, FValue::Bag(entries)) => entries.iter().try_for_each(|(x, n)| {
            if *n == 0 {
                return Err(Error::shape("positive multiplicity", v));
            }
            leaf(x)
        }),
        (FunctorExpr::Pow, FValue::Pow(items)) => items.iter().try_for_each(leaf),
        (functor, v) => Err(mismatch(functor, v)),
    }
}

fn check_letters(alphabet: &[String], entries: &BTreeMap<String, FValue>, v: &FValue) -> Result<()> {
    if entries.len() != alphabet.len() || alphabet.iter().any(|a| !entries.contains_key(a)) {
        return Err(Error::shape(
            format!("map on {{{}}}", alphabet.join(",")),
            v,
        ));
    }
    Ok(())
}

fn mismatch(functor: &FunctorExpr, v: &FValue) -> Error {
    let expected = match functor {
        FunctorExpr::Identity => "state",
        FunctorExpr::Const(_) => "constant",
        FunctorExpr::Product(_) => "tuple",
        FunctorExpr::Coproduct(_) => "injection",
        FunctorExpr::Exponent(..) => "exponent map",
        FunctorExpr::Compose(..) => "composite value",
        FunctorExpr::Bag => "bag",
        FunctorExpr::Pow => "set",
    };
    Error::shape(format!("{expected} for `{functor}`"), format!("{} `{v}`", v.kind()))
}

/// Checks that `v` is shaped by `functor` over `carrier`.
pub fn check_shape(functor: &FunctorExpr, v: &FValue, carrier: &FiniteSet) -> Result<()> {
    visit_leaves(functor, v, &mut |leaf| match leaf {
        FValue::State(s) if carrier.contains(s) => Ok(()),
        FValue::State(s) => Err(Error::UnknownState(s.clone())),
        other => Err(Error::shape("state", format!("{} `{other}`", other.kind()))),
    })
}

/// The functor action `F g` applied to `v`.
pub fn fmap(functor: &FunctorExpr, g: &TotalMap, v: &FValue) -> Result<FValue> {
    map_leaves(functor, v, &mut |leaf| match leaf {
        FValue::State(s) => Ok(FValue::State(g.apply(s)?.clone())),
        other => Err(Error::shape("state", format!("{} `{other}`", other.kind()))),
    })
}

/// States occurring in `v`, in order of first occurrence.
pub fn used_states(functor: &FunctorExpr, v: &FValue) -> Result<FiniteSet> {
    let mut used = FiniteSet::new();
    visit_leaves(functor, v, &mut |leaf| match leaf {
        FValue::State(s) => {
            used.insert(s.clone());
            Ok(())
        }
        other => Err(Error::shape("state", format!("{} `{other}`", other.kind()))),
    })?;
    Ok(used)
}

/// Equality of two values of the same functor; both must be well-shaped.
pub fn fvalue_equal(functor: &FunctorExpr, v: &FValue, w: &FValue) -> Result<bool> {
    let mut states_only = |leaf: &FValue| match leaf {
        FValue::State(_) => Ok(()),
        other => Err(Error::shape("state", format!("{} `{other}`", other.kind()))),
    };
    visit_leaves(functor, v, &mut states_only)?;
    visit_leaves(functor, w, &mut states_only)?;
    Ok(v == w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(names: &[&str]) -> FiniteSet {
        FiniteSet::from_names(names.iter().copied()).unwrap()
    }

    fn pair_or_bottom() -> FunctorExpr {
        FunctorExpr::Coproduct(vec![
            FunctorExpr::Product(vec![FunctorExpr::Identity, FunctorExpr::Identity]),
            FunctorExpr::one(),
        ])
    }

    fn pair(a: &str, b: &str) -> FValue {
        FValue::inj(0, FValue::tuple([FValue::state(a), FValue::state(b)]))
    }

    #[test]
    fn bag_image_sums_merged_multiplicities() {
        let g = TotalMap::new(
            set(&["q", "r"]),
            set(&["y"]),
            [("q".into(), "y".into()), ("r".into(), "y".into())],
        )
        .unwrap();
        let v = FValue::bag([(FValue::state("q"), 1), (FValue::state("r"), 1)]);
        let image = fmap(&FunctorExpr::Bag, &g, &v).unwrap();
        assert_eq!(image, FValue::bag([(FValue::state("y"), 2)]));
    }

    #[test]
    fn pow_image_collapses() {
        let g = TotalMap::new(
            set(&["q", "r"]),
            set(&["y"]),
            [("q".into(), "y".into()), ("r".into(), "y".into())],
        )
        .unwrap();
        let v = FValue::pow([FValue::state("q"), FValue::state("r")]);
        assert_eq!(
            fmap(&FunctorExpr::Pow, &g, &v).unwrap(),
            FValue::pow([FValue::state("y")])
        );
    }

    #[test]
    fn identity_map_fixes_pairs() {
        let carrier = set(&["y1", "y2", "y3"]);
        let id = TotalMap::identity(&carrier);
        let v = pair("y1", "y2");
        assert_eq!(fmap(&pair_or_bottom(), &id, &v).unwrap(), v);
    }

    #[test]
    fn fmap_rejects_state_outside_domain() {
        let g = TotalMap::identity(&set(&["a"]));
        let err = fmap(&FunctorExpr::Identity, &g, &FValue::state("b")).unwrap_err();
        assert_eq!(err, Error::UnknownState("b".into()));
    }

    #[test]
    fn used_states_examples() {
        let f = pair_or_bottom();
        assert_eq!(used_states(&f, &pair("y2", "y2")).unwrap(), set(&["y2"]));
        assert!(used_states(&f, &FValue::inj(1, FValue::bottom()))
            .unwrap()
            .is_empty());
        let bag = FValue::bag([(FValue::state("q"), 2)]);
        assert_eq!(used_states(&FunctorExpr::Bag, &bag).unwrap(), set(&["q"]));
    }

    #[test]
    fn used_states_through_composition() {
        let f = FunctorExpr::compose(
            FunctorExpr::Bag,
            FunctorExpr::Product(vec![FunctorExpr::Identity, FunctorExpr::Identity]),
        );
        let v = FValue::bag([
            (FValue::tuple([FValue::state("a"), FValue::state("b")]), 2),
            (FValue::tuple([FValue::state("b"), FValue::state("c")]), 1),
        ]);
        assert_eq!(used_states(&f, &v).unwrap(), set(&["a", "b", "c"]));
    }

    #[test]
    fn equality_examples() {
        let q2 = FValue::bag([(FValue::state("q"), 2)]);
        assert!(fvalue_equal(&FunctorExpr::Bag, &q2, &q2.clone()).unwrap());
        let single = FValue::pow([FValue::state("q")]);
        let doubled = FValue::pow([FValue::state("q"), FValue::state("q")]);
        assert!(fvalue_equal(&FunctorExpr::Pow, &single, &doubled).unwrap());
        let f = pair_or_bottom();
        assert!(!fvalue_equal(&f, &pair("y1", "y2"), &pair("y2", "y1")).unwrap());
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let err = fvalue_equal(&FunctorExpr::Bag, &FValue::state("q"), &FValue::state("q"));
        assert!(matches!(err, Err(Error::ShapeMismatch { .. })));
        let wrong_arity = FValue::inj(0, FValue::tuple([FValue::state("a")]));
        assert!(used_states(&pair_or_bottom(), &wrong_arity).is_err());
        let bad_tag = FValue::inj(2, FValue::bottom());
        assert!(used_states(&pair_or_bottom(), &bad_tag).is_err());
    }

    #[test]
    fn bag_constructor_normalizes() {
        let v = FValue::bag([
            (FValue::state("a"), 1),
            (FValue::state("b"), 0),
            (FValue::state("a"), 2),
        ]);
        assert_eq!(v, FValue::bag([(FValue::state("a"), 3)]));
    }

    #[test]
    fn duplicate_elements_rejected() {
        assert!(FiniteSet::from_names(["a", "a"]).is_err());
        assert!(FunctorExpr::constant(["x", "x"]).is_err());
        assert_eq!(
            FunctorExpr::constant(Vec::<String>::new()),
            Err(Error::EmptyConstant)
        );
    }

    #[test]
    fn total_map_checks() {
        let err = TotalMap::new(set(&["a", "b"]), set(&["x"]), [("a".into(), "x".into())]);
        assert_eq!(err, Err(Error::NotTotal("b".into())));
        let m = TotalMap::new(
            set(&["a", "b"]),
            set(&["x", "y"]),
            [("b".into(), "x".into()), ("a".into(), "y".into())],
        )
        .unwrap();
        assert!(m.is_bijective());
        let back = m.inverse().unwrap();
        assert_eq!(m.then(&back).unwrap(), TotalMap::identity(&set(&["a", "b"])));
    }
}
