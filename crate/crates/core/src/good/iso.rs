use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::good::{find_clopen_subset, SubsetSearch};
use crate::homeo::{approximate_by_cells, Approximation};
use crate::maps::{PrefixExchange, TransducerMap};
use crate::measure::{check_preserves, CylinderMeasure, Preservation};
use crate::rational::{int, Rational};
use crate::word::Word;

/// Extra search depth granted beyond the deepest input word.
pub const BUDGET_SLACK: usize = 16;

pub fn default_budget(input_depth: usize) -> usize {
    input_depth + BUDGET_SLACK
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MeasureIso {
    Found {
        exchange: PrefixExchange,
    },
    /// `[unmatched]` could not be paired within `budget`. Either the value
    /// sets of the two restricted measures differ, or the budget is too
    /// small; the search cannot tell which.
    FailedAtBudget {
        budget: usize,
        unmatched: Word,
    },
}

struct Matcher<'a> {
    mu: &'a CylinderMeasure,
    nu: &'a CylinderMeasure,
    budget: usize,
    rules: Vec<(Word, Word)>,
}

impl Matcher<'_> {
    /// Pairs the cylinders `source` (largest first) with pieces of `target`.
    fn run(&mut self, source: Vec<Word>, mut target: ClopenSet) -> std::result::Result<(), Word> {
        let mut queue: VecDeque<Word> = source.into();
        while let Some(u) = queue.pop_front() {
            let want = self.mu.weight(&u);
            let piece = if want == self.nu.clopen_measure(&target) {
                Some(target.clone())
            } else {
                match find_clopen_subset(self.nu, &target, &want, self.budget).map_err(|_| u.clone())? {
                    SubsetSearch::Found { set } => Some(set),
                    SubsetSearch::NotFoundUpToDepth { .. } => None,
                }
            };
            let splittable = u.len() < self.budget;
            match piece {
                Some(p) if p.words().len() == 1 && self.mu.same_tail(&u, self.nu, &p.words()[0]) => {
                    self.rules.push((u, p.words()[0].clone()));
                    target = target.difference(&p);
                }
                Some(p) if splittable => {
                    target = target.difference(&p);
                    self.run(vec![u.child(false), u.child(true)], p)?;
                }
                None if splittable => {
                    queue.push_front(u.child(true));
                    queue.push_front(u.child(false));
                }
                _ => return Err(u),
            }
        }
        Ok(())
    }
}

/// A prefix exchange from `a` onto `b` whose every rule `u → v` has
/// `μ([u]) = ν([v])` and proportional conditional laws below `u` and `v`,
/// so that it carries `μ` restricted to `a` onto `ν` restricted to `b`.
pub fn measure_clopen_iso(
    mu: &CylinderMeasure,
    nu: &CylinderMeasure,
    a: &ClopenSet,
    b: &ClopenSet,
    budget: usize,
) -> Result<MeasureIso> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let (ma, nb) = (mu.clopen_measure(a), nu.clopen_measure(b));
    if ma != nb {
        return Err(Error::OutOfRange(format!("mu(A) = {ma} differs from nu(B) = {nb}")));
    }
    let mut source = a.words().to_vec();
    source.sort_by(|x, y| mu.weight(y).cmp(&mu.weight(x)).then_with(|| x.cmp(y)));
    let mut matcher = Matcher { mu, nu, budget: budget.max(a.max_depth()).max(b.max_depth()), rules: Vec::new() };
    match matcher.run(source, b.clone()) {
        Ok(()) => Ok(MeasureIso::Found { exchange: PrefixExchange::new(matcher.rules)? }),
        Err(unmatched) => Ok(MeasureIso::FailedAtBudget { budget, unmatched }),
    }
}

/// `g` with `f(x) ∈ [w] ⇔ g(x) ∈ [w]` for all depth-`n` words `w`, built from
/// measure-preserving isomorphisms `f^{-1}[w] → [w]`. `budget` defaults to
/// the depth of the deepest cell plus [`BUDGET_SLACK`].
pub fn approx_measure_homeo(
    f: &TransducerMap,
    mu: &CylinderMeasure,
    nu: &CylinderMeasure,
    n: usize,
    budget: Option<usize>,
) -> Result<Approximation> {
    if n == 0 {
        return Err(Error::OutOfRange("approximation depth must be at least 1".into()));
    }
    if let Preservation::Violated { witness, lhs, rhs } = check_preserves(f, mu, nu, n) {
        return Err(Error::PreservationViolated { witness, lhs: Box::new(lhs), rhs: Box::new(rhs) });
    }
    approximate_by_cells(f, n, |pre, cell| {
        let budget = budget.unwrap_or_else(|| default_budget(pre.max_depth().max(cell.max_depth())));
        match measure_clopen_iso(mu, nu, pre, cell, budget)? {
            MeasureIso::Found { exchange } => Ok(exchange),
            MeasureIso::FailedAtBudget { unmatched, .. } => Err(Error::Budget(format!(
                "no measure-preserving match for [{unmatched}] inside f^-1({cell}) at budget {budget}"
            ))),
        }
    })
}

/// The tent-map analogue: a 2-to-1 measure-preserving surjection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HalfFold {
    /// `A_1`, of measure half the total; `A_2` is its complement.
    pub half: ClopenSet,
    pub rules: Vec<(Word, Word)>,
    pub map: TransducerMap,
}

/// Finds `A_1` with `μ(A_1) = μ(C)/2` and maps each of `A_1`, `A_2` onto
/// `C` carrying `2μ` to `μ`.
pub fn half_fold(m: &CylinderMeasure, budget: usize) -> Result<HalfFold> {
    let whole = ClopenSet::whole();
    let half_total = m.total() / int(2);
    let half = match find_clopen_subset(m, &whole, &half_total, budget)? {
        SubsetSearch::Found { set } => set,
        SubsetSearch::NotFoundUpToDepth { depth } => {
            return Err(Error::Budget(format!("no clopen set of measure {half_total} up to depth {depth}")))
        }
    };
    let doubled = m.scaled(&int(2))?;
    let mut rules = Vec::new();
    for piece in [half.clone(), half.complement()] {
        match measure_clopen_iso(&doubled, m, &piece, &whole, budget)? {
            MeasureIso::Found { exchange } => rules.extend(exchange.rules().iter().cloned()),
            MeasureIso::FailedAtBudget { unmatched, .. } => {
                return Err(Error::Budget(format!(
                    "cannot unfold [{unmatched}] onto the whole space at budget {budget}"
                )))
            }
        }
    }
    rules.sort();
    let map = TransducerMap::from_rules(&rules)?;
    Ok(HalfFold { half, rules, map })
}

/// `(u, v, μ([u]), ν([v]))` for every rule.
pub fn rule_measures(
    p: &PrefixExchange,
    mu: &CylinderMeasure,
    nu: &CylinderMeasure,
) -> Vec<(Word, Word, Rational, Rational)> {
    p.rules().iter().map(|(u, v)| (u.clone(), v.clone(), mu.weight(u), nu.weight(v))).collect()
}

/// True when every rule pairs equal weights with proportional tails.
pub fn is_measure_preserving(p: &PrefixExchange, mu: &CylinderMeasure, nu: &CylinderMeasure) -> bool {
    p.rules().iter().all(|(u, v)| mu.weight(u) == nu.weight(v) && mu.same_tail(u, nu, v))
}
