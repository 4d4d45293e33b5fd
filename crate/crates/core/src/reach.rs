//! Reachability by iterated least bounds.
//!
//! Starting from the point, each level `C_{k+1}` is the least subset through
//! which `c` restricted to `C_k` factors; the reachable part is the union of
//! all levels.

use crate::coalgebra::PointedCoalgebra;
use crate::error::Result;
use crate::factor::{least_bound, FMap};
use crate::functor::{FiniteSet, StateId, TotalMap};

#[derive(Clone, Debug)]
pub struct LevelSequence {
    /// `C_0, C_1, …` as subsets of the carrier. The last level is the one at
    /// which the union stopped growing; it may be empty.
    pub levels: Vec<FiniteSet>,
    /// `m_k: C_k ↪ C`
    pub inclusions: Vec<TotalMap>,
    /// `c_k: C_k → F(C_{k+1})`, one fewer than there are levels.
    pub step_maps: Vec<FMap>,
}

impl LevelSequence {
    pub fn union(&self) -> FiniteSet {
        self.levels.iter().flat_map(|l| l.iter().cloned()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ReachablePart {
    pub sub: FiniteSet,
    pub coalgebra: PointedCoalgebra,
    pub embedding: TotalMap,
    pub point: StateId,
}

fn restriction(c: &PointedCoalgebra, level: &FiniteSet) -> Result<FMap> {
    let values = level
        .iter()
        .map(|x| Ok((x.clone(), c.structure(x)?.clone())))
        .collect::<Result<Vec<_>>>()?;
    FMap::new(c.functor().clone(), level.clone(), c.carrier().clone(), values)
}

/// Levels until the cumulative union stabilizes; at most `|C|` steps.
pub fn reach_levels(c: &PointedCoalgebra) -> Result<LevelSequence> {
    let mut current: FiniteSet = std::iter::once(c.point().clone()).collect();
    let mut seen = current.clone();
    let mut seq = LevelSequence {
        levels: Vec::new(),
        inclusions: Vec::new(),
        step_maps: Vec::new(),
    };
    loop {
        seq.inclusions.push(TotalMap::inclusion(&current, c.carrier())?);
        seq.levels.push(current.clone());
        if current.is_empty() {
            break;
        }
        let lb = least_bound(&restriction(c, &current)?)?;
        let before = seen.len();
        for y in lb.sub.iter() {
            seen.insert(y.clone());
        }
        let grew = seen.len() > before;
        // C_{k+1} is the codomain of c_k
        seq.step_maps.push(lb.g);
        current = lb.sub;
        if !grew {
            seq.inclusions.push(TotalMap::inclusion(&current, c.carrier())?);
            seq.levels.push(current);
            break;
        }
    }
    Ok(seq)
}

pub fn reachable_part(c: &PointedCoalgebra) -> Result<ReachablePart> {
    let seq = reach_levels(c)?;
    let seen = seq.union();
    // keep carrier order
    let sub = c.carrier().filter(|x| seen.contains(x));
    let coalgebra = c.restrict(&sub)?;
    let embedding = TotalMap::inclusion(&sub, c.carrier())?;
    Ok(ReachablePart {
        sub,
        coalgebra,
        embedding,
        point: c.point().clone(),
    })
}

pub fn is_reachable(c: &PointedCoalgebra) -> Result<bool> {
    Ok(reachable_part(c)?.sub.len() == c.len())
}
