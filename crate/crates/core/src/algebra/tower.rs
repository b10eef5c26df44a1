use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::IntervalSet;
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::measure::{delta_for_epsilon, CylinderMeasure};
use crate::rational::{int, Rational};
use crate::word::Word;

/// The `i`-th nonempty word in shortlex order, from 0.
fn shortlex(mut i: usize) -> Word {
    let mut len = 1;
    while i >= 1 << len {
        i -= 1 << len;
        len += 1;
    }
    Word::from_bits((0..len).rev().map(|j| (i >> j) & 1 == 1).collect())
}

/// `given` followed by the cylinders `[0], [1], [00], [01], …`, cut to
/// `count` entries. The cylinders generate the clopen algebra, so the
/// sequence is dense in the measure algebra.
pub fn generating_sequence(given: &[ClopenSet], count: usize) -> Vec<ClopenSet> {
    given.iter().cloned().chain((0..).map(|i| ClopenSet::cylinder(shortlex(i)))).take(count).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerCell {
    pub set: ClopenSet,
    /// A single interval of length `μ(set)`.
    pub interval: IntervalSet,
    /// Index of the enclosing cell one level up.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerLevel {
    pub generator: ClopenSet,
    /// Cells were cut down to cylinders of this depth.
    pub cylinder_depth: usize,
    pub cells: Vec<TowerCell>,
}

impl TowerLevel {
    pub fn sets(&self) -> impl Iterator<Item = &ClopenSet> {
        self.cells.iter().map(|c| &c.set)
    }

    /// True when `a` is a union of cells of this level.
    pub fn resolves(&self, a: &ClopenSet) -> bool {
        self.sets().all(|c| c.is_subset(a) || c.is_disjoint(a))
    }
}

/// Finite stage of the isometric realization of the clopen measure algebra
/// of a normalized measure inside the interval algebra of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealizationTower {
    pub measure: CylinderMeasure,
    pub levels: Vec<TowerLevel>,
}

/// Lay `pieces` out left to right from `start`, each with length `weight`.
fn layout(m: &CylinderMeasure, pieces: Vec<ClopenSet>, start: &Rational, parent: Option<usize>) -> Vec<TowerCell> {
    let mut left = start.clone();
    pieces
        .into_iter()
        .map(|set| {
            let right = &left + m.clopen_measure(&set);
            let interval = IntervalSet::interval(std::mem::replace(&mut left, right.clone()), right);
            TowerCell { set, interval, parent }
        })
        .collect()
}

fn left_end(i: &IntervalSet) -> Rational {
    i.intervals().first().map(|(a, _)| a.clone()).unwrap_or_else(Rational::zero)
}

/// Levels `1..=depth`. Level 1 is `{E_1, complement}` with `E_1` placed on
/// `[0, μ(E_1)]`. Level `L > 1` splits every level-`(L-1)` cell by `E_L` and
/// by the cylinders of the least depth whose weights are all below `1/L`,
/// ordering children by first word. Level `L` therefore has μ-mesh at most
/// `1/L`.
pub fn caratheodory_tower(m: &CylinderMeasure, generators: &[ClopenSet], depth: usize) -> Result<RealizationTower> {
    if !m.is_normalized() {
        return Err(Error::NotNormalized(Box::new(m.total().clone())));
    }
    if depth == 0 {
        return Err(Error::OutOfRange("tower depth must be at least 1".into()));
    }
    let gens = generating_sequence(generators, depth);
    let first = &gens[0];
    let pieces = [first.clone(), first.complement()].into_iter().filter(|c| !c.is_empty()).collect();
    let mut levels = vec![TowerLevel {
        generator: first.clone(),
        cylinder_depth: 0,
        cells: layout(m, pieces, &Rational::zero(), None),
    }];

    for (l, e) in gens.iter().enumerate().skip(1) {
        let eps = Rational::one() / int(l as i64 + 1);
        let k = delta_for_epsilon(m, &eps)?.depth;
        let parent = levels.last().expect("level 1 exists");
        let mut cells = Vec::new();
        for (pi, cell) in parent.cells.iter().enumerate() {
            let mut pieces: Vec<ClopenSet> = [cell.set.intersection(e), cell.set.difference(e)]
                .iter()
                .filter(|c| !c.is_empty())
                .flat_map(|c| c.split_at_depth(k).into_iter().map(|(_, p)| p))
                .collect();
            pieces.sort_by(|a, b| a.layout_cmp(b));
            cells.extend(layout(m, pieces, &left_end(&cell.interval), Some(pi)));
        }
        levels.push(TowerLevel { generator: e.clone(), cylinder_depth: k, cells });
    }
    Ok(RealizationTower { measure: m.clone(), levels })
}

impl RealizationTower {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Shallowest level (from 1) at which `a` is a union of cells.
    pub fn resolving_level(&self, a: &ClopenSet) -> Option<usize> {
        self.levels.iter().position(|l| l.resolves(a)).map(|i| i + 1)
    }

    /// μ-mesh of level `level` (from 1).
    pub fn mesh(&self, level: usize) -> Rational {
        self.levels[level - 1].sets().map(|c| self.measure.clopen_measure(c)).max().unwrap_or_else(Rational::zero)
    }
}

/// `S(A)`: the union of the intervals of the cells making up `a`.
pub fn interval_realize(t: &RealizationTower, a: &ClopenSet) -> Result<IntervalSet> {
    let level = t
        .resolving_level(a)
        .ok_or_else(|| Error::Unresolvable(format!("{a} is not a union of cells at tower depth {}", t.depth())))?;
    let raw = t.levels[level - 1]
        .cells
        .iter()
        .filter(|c| c.set.is_subset(a))
        .flat_map(|c| c.interval.intervals().iter().cloned())
        .collect();
    Ok(IntervalSet::from_intervals(raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::boolean_distance;
    use crate::clopen::clopen;
    use crate::rational::ratio;
    use crate::word::w;

    fn b(n: i64, d: i64) -> CylinderMeasure {
        CylinderMeasure::bernoulli(ratio(n, d)).unwrap()
    }

    fn single(a: (i64, i64), bnd: (i64, i64)) -> IntervalSet {
        IntervalSet::interval(ratio(a.0, a.1), ratio(bnd.0, bnd.1))
    }

    #[test]
    fn shortlex_enumeration() {
        let names: Vec<String> = (0..6).map(|i| shortlex(i).to_string()).collect();
        assert_eq!(names, ["0", "1", "00", "01", "10", "11"]);
        assert_eq!(shortlex(6), w("000"));
    }

    #[test]
    fn triadic_first_levels() {
        let t = caratheodory_tower(&b(1, 3), &[], 2).unwrap();
        let one: Vec<(ClopenSet, IntervalSet)> =
            t.levels[0].cells.iter().map(|c| (c.set.clone(), c.interval.clone())).collect();
        assert_eq!(one, vec![(clopen(&["0"]), single((0, 1), (1, 3))), (clopen(&["1"]), single((1, 3), (1, 1)))]);
        let two: Vec<IntervalSet> = t.levels[1].cells.iter().map(|c| c.interval.clone()).collect();
        assert_eq!(
            two,
            vec![single((0, 1), (1, 9)), single((1, 9), (1, 3)), single((1, 3), (5, 9)), single((5, 9), (1, 1))]
        );
        assert_eq!(
            interval_realize(&t, &clopen(&["00", "11"])).unwrap(),
            IntervalSet::from_intervals(vec![(ratio(0, 1), ratio(1, 9)), (ratio(5, 9), ratio(1, 1))])
        );
        assert_eq!(interval_realize(&t, &ClopenSet::whole()).unwrap(), single((0, 1), (1, 1)));
        assert!(matches!(interval_realize(&t, &clopen(&["000"])), Err(Error::Unresolvable(_))));
    }

    #[test]
    fn first_generator_goes_left() {
        let t = caratheodory_tower(&b(1, 2), &[clopen(&["1"])], 1).unwrap();
        assert_eq!(interval_realize(&t, &clopen(&["1"])).unwrap(), single((0, 1), (1, 2)));
        assert_eq!(interval_realize(&t, &clopen(&["0"])).unwrap(), single((1, 2), (1, 1)));
    }

    #[test]
    fn rejects_unnormalized() {
        let m = b(1, 2).scaled(&ratio(2, 1)).unwrap();
        assert_eq!(caratheodory_tower(&m, &[], 3), Err(Error::NotNormalized(Box::new(ratio(2, 1)))));
    }

    #[test]
    fn structure_holds() {
        let m = b(1, 3);
        let t = caratheodory_tower(&m, &[clopen(&["01", "1"])], 6).unwrap();
        for (li, level) in t.levels.iter().enumerate() {
            let l = li + 1;
            assert!(t.mesh(l) <= ratio(1, l as i64));
            for c in &level.cells {
                assert_eq!(c.interval.length(), m.clopen_measure(&c.set));
            }
            assert!(level.resolves(&level.generator));
            if li == 0 {
                continue;
            }
            let parents = &t.levels[li - 1].cells;
            for (pi, p) in parents.iter().enumerate() {
                let kids: Vec<&TowerCell> = level.cells.iter().filter(|c| c.parent == Some(pi)).collect();
                let union = kids.iter().fold(IntervalSet::empty(), |acc, c| acc.union(&c.interval));
                assert_eq!(union, p.interval);
                let set = kids.iter().fold(ClopenSet::empty(), |acc, c| acc.union(&c.set));
                assert_eq!(set, p.set);
            }
        }
        let a = clopen(&["00", "11"]);
        let c = clopen(&["0"]);
        let (sa, sc) = (interval_realize(&t, &a).unwrap(), interval_realize(&t, &c).unwrap());
        assert_eq!(boolean_distance(&m, &a, &c), sa.boolean_sum(&sc).length());
    }
}
