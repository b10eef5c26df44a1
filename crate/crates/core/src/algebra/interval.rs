use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::clopen::BoolOp;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A finite union of intervals with rational endpoints, up to endpoints:
/// intervals are kept sorted, disjoint and of positive length, and touching
/// intervals are merged.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn interval(a: Rational, b: Rational) -> Self {
        Self::from_intervals(vec![(a, b)])
    }

    /// Sorts and merges; degenerate pieces are dropped.
    pub fn from_intervals(mut raw: Vec<(Rational, Rational)>) -> Self {
        raw.retain(|(a, b)| a < b);
        raw.sort();
        let mut intervals: Vec<(Rational, Rational)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match intervals.last_mut() {
                Some((_, end)) if a <= *end => {
                    if b > *end {
                        *end = b;
                    }
                }
                _ => intervals.push((a, b)),
            }
        }
        IntervalSet { intervals }
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure.
    pub fn length(&self) -> Rational {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    fn covers(&self, x: &Rational) -> bool {
        self.intervals.iter().any(|(a, b)| a < x && x < b)
    }

    /// Binary operations by a sweep over the combined breakpoints.
    pub fn combine(&self, other: &IntervalSet, op: BoolOp) -> IntervalSet {
        let mut cuts: Vec<&Rational> =
            self.intervals.iter().chain(&other.intervals).flat_map(|(a, b)| [a, b]).collect();
        cuts.sort();
        cuts.dedup();
        let two = Rational::from_integer(2.into());
        let mut out = Vec::new();
        for pair in cuts.windows(2) {
            let mid = (pair[0] + pair[1]) / &two;
            let (x, y) = (self.covers(&mid), other.covers(&mid));
            let keep = match op {
                BoolOp::Union => x || y,
                BoolOp::Intersection => x && y,
                BoolOp::Difference => x && !y,
                BoolOp::BooleanSum => x != y,
                BoolOp::Complement => !x,
            };
            if keep {
                out.push((pair[0].clone(), pair[1].clone()));
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, BoolOp::Union)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, BoolOp::Intersection)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, BoolOp::Difference)
    }

    pub fn boolean_sum(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, BoolOp::BooleanSum)
    }

    /// Complement inside `[0, total]`.
    pub fn complement_within(&self, total: &Rational) -> IntervalSet {
        IntervalSet::interval(Rational::zero(), total.clone()).difference(self)
    }

    pub fn is_disjoint(&self, other: &IntervalSet) -> bool {
        self.intersection(other).is_empty()
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (i, (a, b)) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "[{a},{b}]")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    intervals: Vec<(String, String)>,
}

impl Serialize for IntervalSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalRepr {
            intervals: self.intervals.iter().map(|(a, b)| (rational::to_string(a), rational::to_string(b))).collect(),
        }
        .serialize(s)
    }
}

fn parse_endpoint(s: &str) -> Result<Rational> {
    rational::parse(s).ok_or_else(|| Error::Parse(format!("bad rational {s:?}")))
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = IntervalRepr::deserialize(d)?;
        let mut raw = Vec::with_capacity(repr.intervals.len());
        for (a, b) in &repr.intervals {
            let (a, b) = (parse_endpoint(a), parse_endpoint(b));
            raw.push((a.map_err(serde::de::Error::custom)?, b.map_err(serde::de::Error::custom)?));
        }
        if raw.iter().any(|(a, b)| a > b) {
            return Err(serde::de::Error::custom("interval endpoints out of order"));
        }
        Ok(IntervalSet::from_intervals(raw))
    }
}
