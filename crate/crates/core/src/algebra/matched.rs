use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{generating_sequence, IntervalSet};
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::good::{default_budget, find_clopen_subset, SubsetSearch};
use crate::maps::TransducerMap;
use crate::measure::{check_preserves, delta_for_epsilon, CylinderMeasure, Preservation};
use crate::partition::ClopenPartition;
use crate::rational::{int, Rational};

/// A `Y`-cell, the `X`-cell it is matched with, and their shared interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchedCell {
    pub y: ClopenSet,
    pub x: ClopenSet,
    pub interval: IntervalSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchedLevel {
    pub cylinder_depth: usize,
    pub cells: Vec<MatchedCell>,
}

/// Finite stages of a measure algebra isomorphism `T` from the clopen algebra
/// of `(Y, ν)` to that of `(X, μ)` agreeing with `f^{-1}` on the first `n`
/// generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchedTower {
    pub mu: CylinderMeasure,
    pub nu: CylinderMeasure,
    pub generators: Vec<ClopenSet>,
    pub levels: Vec<MatchedLevel>,
}

/// `T^*(A) = f^{-1}(A)`.
pub fn algebra_pullback(f: &TransducerMap, a: &ClopenSet) -> ClopenSet {
    f.preimage(a)
}

fn lay_out(
    nu: &CylinderMeasure,
    pairs: Vec<(ClopenSet, ClopenSet)>,
    start: Rational,
    parent: Option<usize>,
) -> Vec<MatchedCell> {
    let mut left = start;
    pairs
        .into_iter()
        .map(|(y, x)| {
            let right = &left + nu.clopen_measure(&y);
            let interval = IntervalSet::interval(std::mem::replace(&mut left, right.clone()), right);
            MatchedCell { y, x, interval, parent }
        })
        .collect()
}

/// Level 0 is the partition generated by `E_1..E_n` matched with its
/// pullback. Level `L >= 1` cuts every `Y`-cell into cylinders of the least
/// depth with ν-weights below `1/(L+1)` and carves matching clopen pieces of
/// the `X`-cell, largest first, the last piece taking what remains.
/// `budget` bounds the depth of the carved pieces; it defaults to the cell
/// depth plus the usual slack.
pub fn approx_algebra_iso(
    f: &TransducerMap,
    mu: &CylinderMeasure,
    nu: &CylinderMeasure,
    generators: &[ClopenSet],
    n: usize,
    depth: usize,
    budget: Option<usize>,
) -> Result<MatchedTower> {
    for m in [mu, nu] {
        if !m.is_normalized() {
            return Err(Error::NotNormalized(Box::new(m.total().clone())));
        }
    }
    let gens = generating_sequence(generators, n);
    let resolving = gens.iter().map(ClopenSet::max_depth).max().unwrap_or(0).max(1);
    if let Preservation::Violated { witness, lhs, rhs } = check_preserves(f, mu, nu, resolving) {
        return Err(Error::PreservationViolated { witness, lhs: Box::new(lhs), rhs: Box::new(rhs) });
    }

    let mut partition = ClopenPartition::new(vec![ClopenSet::whole()])?;
    for e in &gens {
        partition = partition.common_refinement(&ClopenPartition::binary(&ClopenSet::whole(), e)?)?;
    }
    let base = partition.cells().iter().map(|y| (y.clone(), f.preimage(y))).collect();
    let mut levels = vec![MatchedLevel { cylinder_depth: 0, cells: lay_out(nu, base, Rational::zero(), None) }];

    for l in 1..=depth {
        let k = delta_for_epsilon(nu, &(Rational::one() / int(l as i64 + 1)))?.depth;
        let mut cells = Vec::new();
        for (pi, cell) in levels[l - 1].cells.iter().enumerate() {
            let mut pieces: Vec<ClopenSet> = cell.y.split_at_depth(k).into_iter().map(|(_, p)| p).collect();
            pieces.sort_by(|a, b| a.layout_cmp(b));
            let last = pieces.pop().expect("cells are nonempty");
            let mut remainder = cell.x.clone();
            let mut pairs = Vec::with_capacity(pieces.len() + 1);
            for y in pieces {
                let target = nu.clopen_measure(&y);
                let b = budget.unwrap_or_else(|| default_budget(k.max(remainder.max_depth())));
                let x = match find_clopen_subset(mu, &remainder, &target, b)? {
                    SubsetSearch::Found { set } => set,
                    SubsetSearch::NotFoundUpToDepth { depth } => {
                        return Err(Error::Budget(format!(
                            "no clopen subset of {remainder} with measure {target} up to depth {depth}"
                        )))
                    }
                };
                remainder = remainder.difference(&x);
                pairs.push((y, x));
            }
            pairs.push((last, remainder));
            let start = cell.interval.intervals()[0].0.clone();
            cells.extend(lay_out(nu, pairs, start, Some(pi)));
        }
        levels.push(MatchedLevel { cylinder_depth: k, cells });
    }
    Ok(MatchedTower { mu: mu.clone(), nu: nu.clone(), generators: gens, levels })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub set: ClopenSet,
    /// `Σ ν(cell ∖ B)` over the cells that `B` meets without covering.
    #[serde(with = "crate::rational::serde_str")]
    pub error_bound: Rational,
}

impl MatchedTower {
    /// Number of refinement levels past level 0.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// `T(B)` at `level`, when `B` is a union of that level's `Y`-cells.
    pub fn image(&self, level: usize, b: &ClopenSet) -> Result<ClopenSet> {
        let cells = &self.levels.get(level).ok_or_else(|| Error::OutOfRange(format!("no level {level}")))?.cells;
        let mut out = ClopenSet::empty();
        for c in cells {
            if c.y.is_subset(b) {
                out = out.union(&c.x);
            } else if !c.y.is_disjoint(b) {
                return Err(Error::Unresolvable(format!("{b} splits the cell {} at level {level}", c.y)));
            }
        }
        Ok(out)
    }

    /// Structural invariants; the first failure as a message.
    pub fn check(&self) -> std::result::Result<(), String> {
        for (l, level) in self.levels.iter().enumerate() {
            let ys = ClopenPartition::new(level.cells.iter().map(|c| c.y.clone()).collect());
            let xs = ClopenPartition::new(level.cells.iter().map(|c| c.x.clone()).collect());
            match (ys, xs) {
                (Ok(y), Ok(x)) if y.ambient().is_whole() && x.ambient().is_whole() => {}
                _ => return Err(format!("level {l}: cells do not partition the space")),
            }
            let mut left = Rational::zero();
            for c in &level.cells {
                let (mx, ny) = (self.mu.clopen_measure(&c.x), self.nu.clopen_measure(&c.y));
                if mx != ny || c.interval.length() != ny {
                    return Err(format!("level {l}: cell {} has mismatched measures", c.y));
                }
                if l == 0 && c.interval.intervals()[0].0 != left {
                    return Err(format!("level 0: interval of {} is out of place", c.y));
                }
                left += ny;
                if l > 0 {
                    let p = c.parent.and_then(|i| self.levels[l - 1].cells.get(i)).ok_or("missing parent")?;
                    let nested =
                        c.y.is_subset(&p.y) && c.x.is_subset(&p.x) && c.interval.difference(&p.interval).is_empty();
                    if !nested {
                        return Err(format!("level {l}: cell {} escapes its parent", c.y));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The union of `X`-cells whose `Y`-cells meet `b` at `level`.
pub fn evaluate_matched_tower(t: &MatchedTower, b: &ClopenSet, level: usize) -> Result<Evaluation> {
    let cells = &t.levels.get(level).ok_or_else(|| Error::OutOfRange(format!("tower has no level {level}")))?.cells;
    let mut set = ClopenSet::empty();
    let mut error_bound = Rational::zero();
    for c in cells.iter().filter(|c| !c.y.is_disjoint(b)) {
        set = set.union(&c.x);
        error_bound += t.nu.clopen_measure(&c.y.difference(b));
    }
    Ok(Evaluation { set, error_bound })
}

/// `max_i μ(T_1(E_i) + T_2(E_i)) / i` over the shared generators.
pub fn tower_distance(t1: &MatchedTower, t2: &MatchedTower) -> Result<Rational> {
    if t1.generators != t2.generators || t1.mu != t2.mu {
        return Err(Error::OutOfRange("towers are built over different generators or measures".into()));
    }
    let mut best = Rational::zero();
    for (i, e) in t1.generators.iter().enumerate() {
        let d = t1.mu.clopen_measure(&t1.image(0, e)?.boolean_sum(&t2.image(0, e)?)) / int(i as i64 + 1);
        best = best.max(d);
    }
    Ok(best)
}
