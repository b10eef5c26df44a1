//! Clopen values sets, the subset condition, and measure-preserving
//! homeomorphisms.

mod iso;
mod subset;
mod values;

use serde::{Deserialize, Serialize};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::measure::CylinderMeasure;
use crate::rational::Rational;
use crate::word::Word;

pub use iso::{
    approx_measure_homeo, default_budget, half_fold, is_measure_preserving, measure_clopen_iso, rule_measures,
    HalfFold, MeasureIso, BUDGET_SLACK,
};
pub use subset::{find_clopen_subset, SubsetSearch, NODE_CAP};
pub use values::{clopen_values, group_like_check, GroupLike, ValueSample, MAX_VALUES_DEPTH};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum GoodnessScan {
    ConsistentUpTo {
        depth: usize,
    },
    /// `μ(a) = t <= μ(b)` but no clopen subset of `b` of measure `t` was
    /// found within the budget.
    Obstruction {
        a: ClopenSet,
        b: ClopenSet,
        #[serde(with = "crate::rational::serde_str")]
        t: Rational,
    },
}

/// Runs the subset condition on every value `t` of a depth-`depth` union
/// against every cylinder `B` of depth at most `depth` with `t <= μ(B)`.
/// Cylinders go shortest first, values ascending.
pub fn goodness_scan(m: &CylinderMeasure, depth: usize, budget: usize) -> Result<GoodnessScan> {
    if depth == 0 || budget == 0 {
        return Err(Error::OutOfRange("depth and budget must be at least 1".into()));
    }
    let sample = clopen_values(m, depth)?;
    for u in Word::all_up_to(depth) {
        let b = ClopenSet::cylinder(u);
        let mb = m.clopen_measure(&b);
        for t in sample.values.iter().take_while(|t| **t <= mb) {
            if let SubsetSearch::NotFoundUpToDepth { .. } = find_clopen_subset(m, &b, t, budget)? {
                let a = match find_clopen_subset(m, &ClopenSet::whole(), t, depth)? {
                    SubsetSearch::Found { set } => set,
                    SubsetSearch::NotFoundUpToDepth { .. } => {
                        return Err(Error::ResourceLimit(format!("could not rebuild a clopen of measure {t}")))
                    }
                };
                return Ok(GoodnessScan::Obstruction { a, b, t: t.clone() });
            }
        }
    }
    Ok(GoodnessScan::ConsistentUpTo { depth })
}
