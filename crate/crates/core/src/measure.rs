//! Full nonatomic Borel measures on `C` given by exact cylinder weights.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::maps::TransducerMap;
use crate::rational::{dyadic, int, Rational};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Presentation {
    /// Independent coordinates, each `0` with probability `p`.
    Bernoulli { p: Rational },
    /// Stationary-free two-state Markov chain: `initial[a]` is the law of the
    /// first coordinate, `rows[a][b]` the probability that `b` follows `a`.
    Markov { initial: [Rational; 2], rows: [[Rational; 2]; 2] },
    /// Absolute weights for every depth-`depth` word, then independent
    /// coordinates with `P(0) = tail`.
    Table { depth: usize, weights: BTreeMap<Word, Rational>, tail: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum TailClass {
    Uniform,
    After(bool),
    Prefix(Word),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderMeasure {
    presentation: Presentation,
    total: Rational,
    // Table only: weights of every word of length <= depth
    prefix_weights: BTreeMap<Word, Rational>,
}

fn in_open_unit(r: &Rational) -> bool {
    r > &Rational::zero() && r < &Rational::one()
}

fn branch(p: &Rational, bit: bool) -> Rational {
    if bit {
        Rational::one() - p
    } else {
        p.clone()
    }
}

impl CylinderMeasure {
    pub fn bernoulli(p: Rational) -> Result<Self> {
        Self::new(Presentation::Bernoulli { p }, int(1))
    }

    pub fn markov(initial: [Rational; 2], rows: [[Rational; 2]; 2]) -> Result<Self> {
        Self::new(Presentation::Markov { initial, rows }, int(1))
    }

    /// The total is the sum of the table weights.
    pub fn table(depth: usize, weights: BTreeMap<Word, Rational>, tail: Rational) -> Result<Self> {
        let total = weights.values().sum();
        Self::new(Presentation::Table { depth, weights, tail }, total)
    }

    pub fn new(presentation: Presentation, total: Rational) -> Result<Self> {
        if total <= Rational::zero() {
            return Err(Error::InvalidMeasure("total must be positive".into()));
        }
        let mut prefix_weights = BTreeMap::new();
        match &presentation {
            Presentation::Bernoulli { p } => {
                if !in_open_unit(p) {
                    return Err(Error::InvalidMeasure(format!("bernoulli parameter {p} not in (0,1)")));
                }
            }
            Presentation::Markov { initial, rows } => {
                let stochastic = |row: &[Rational; 2]| row.iter().all(in_open_unit) && &row[0] + &row[1] == int(1);
                if !stochastic(initial) {
                    return Err(Error::InvalidMeasure("initial law must be strictly inside (0,1) and sum to 1".into()));
                }
                if !rows.iter().all(stochastic) {
                    return Err(Error::InvalidMeasure(
                        "transition rows must be strictly positive and stochastic".into(),
                    ));
                }
            }
            Presentation::Table { depth, weights, tail } => {
                if !in_open_unit(tail) {
                    return Err(Error::InvalidMeasure(format!("tail parameter {tail} not in (0,1)")));
                }
                if *depth > 20 {
                    return Err(Error::ResourceLimit(format!("table depth {depth} exceeds 20")));
                }
                if weights.len() != 1 << depth || weights.keys().any(|w| w.len() != *depth) {
                    return Err(Error::InvalidMeasure(format!(
                        "table must list exactly the {} words of length {depth}",
                        1usize << depth
                    )));
                }
                if weights.values().any(|v| v <= &Rational::zero()) {
                    return Err(Error::InvalidMeasure("table weights must be positive".into()));
                }
                if weights.values().sum::<Rational>() != total {
                    return Err(Error::InvalidMeasure("table weights must sum to the total".into()));
                }
                let mut level: BTreeMap<Word, Rational> = weights.clone();
                for len in (0..*depth).rev() {
                    let mut up = BTreeMap::new();
                    for u in Word::all_of_length(len) {
                        let s = &level[&u.child(false)] + &level[&u.child(true)];
                        up.insert(u, s);
                    }
                    prefix_weights.extend(level);
                    level = up;
                }
                prefix_weights.extend(level);
            }
        }
        Ok(CylinderMeasure { presentation, total, prefix_weights })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn total(&self) -> &Rational {
        &self.total
    }

    pub fn is_normalized(&self) -> bool {
        self.total.is_one()
    }

    /// Same shape, total multiplied by `factor > 0`.
    pub fn scaled(&self, factor: &Rational) -> Result<Self> {
        if factor <= &Rational::zero() {
            return Err(Error::InvalidMeasure("scale factor must be positive".into()));
        }
        match &self.presentation {
            Presentation::Table { depth, weights, tail } => {
                Self::table(*depth, weights.iter().map(|(w, v)| (w.clone(), v * factor)).collect(), tail.clone())
            }
            other => Self::new(other.clone(), &self.total * factor),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        self.scaled(&(Rational::one() / &self.total))
    }

    /// Depth beyond which the presentation is a plain Markov or Bernoulli
    /// chain.
    pub fn structure_depth(&self) -> usize {
        match &self.presentation {
            Presentation::Table { depth, .. } => *depth,
            _ => 0,
        }
    }

    /// Words in the same class have proportional conditional laws below
    /// them: `μ([u·z]) / μ([u])` depends only on the class of `u`.
    pub(crate) fn tail_class(&self, u: &Word) -> TailClass {
        match &self.presentation {
            Presentation::Bernoulli { .. } => TailClass::Uniform,
            Presentation::Markov { .. } => match u.last() {
                Some(b) => TailClass::After(b),
                None => TailClass::Prefix(Word::empty()),
            },
            Presentation::Table { depth, .. } if u.len() >= *depth => TailClass::Uniform,
            Presentation::Table { .. } => TailClass::Prefix(u.clone()),
        }
    }

    /// `μ([w])`.
    pub fn weight(&self, w: &Word) -> Rational {
        match &self.presentation {
            Presentation::Bernoulli { p } => {
                let zeros = w.bits().iter().filter(|b| !**b).count();
                let ones = w.len() - zeros;
                let q = Rational::one() - p;
                &self.total * num_traits::pow(p.clone(), zeros) * num_traits::pow(q, ones)
            }
            Presentation::Markov { initial, rows } => {
                let bits = w.bits();
                let Some(&first) = bits.first() else { return self.total.clone() };
                let mut acc = &self.total * &initial[first as usize];
                for pair in bits.windows(2) {
                    acc *= &rows[pair[0] as usize][pair[1] as usize];
                }
                acc
            }
            Presentation::Table { depth, tail, .. } => {
                if w.len() <= *depth {
                    return self.prefix_weights[w].clone();
                }
                let mut acc = self.prefix_weights[&w.prefix(*depth)].clone();
                for &b in &w.bits()[*depth..] {
                    acc *= branch(tail, b);
                }
                acc
            }
        }
    }

    /// `μ(A)` for a clopen `A`.
    pub fn clopen_measure(&self, a: &ClopenSet) -> Rational {
        a.words().iter().map(|w| self.weight(w)).sum()
    }

    /// Largest weight among the depth-`n` cylinders.
    pub fn max_weight_at_depth(&self, n: usize) -> Rational {
        match &self.presentation {
            Presentation::Bernoulli { p } => {
                let m = p.clone().max(Rational::one() - p);
                &self.total * num_traits::pow(m, n)
            }
            Presentation::Markov { initial, rows } => {
                if n == 0 {
                    return self.total.clone();
                }
                let mut best = [&self.total * &initial[0], &self.total * &initial[1]];
                for _ in 1..n {
                    let next = |b: usize| (&best[0] * &rows[0][b]).max(&best[1] * &rows[1][b]);
                    best = [next(0), next(1)];
                }
                best[0].clone().max(best[1].clone())
            }
            Presentation::Table { depth, tail, .. } => {
                let level = n.min(*depth);
                let top = self
                    .prefix_weights
                    .iter()
                    .filter(|(w, _)| w.len() == level)
                    .map(|(_, v)| v.clone())
                    .max()
                    .expect("table has every level");
                let m = tail.clone().max(Rational::one() - tail);
                top * num_traits::pow(m, n - level)
            }
        }
    }

    /// True when the conditional laws on `[u]` under `self` and on `[v]`
    /// under `other` agree, i.e. `μ([u·z])/μ([u]) = ν([v·z])/ν([v])` for
    /// every `z`. For these presentations agreement up to length
    /// `max(structure depths) + 2` forces agreement everywhere.
    pub fn same_tail(&self, u: &Word, other: &CylinderMeasure, v: &Word) -> bool {
        let horizon = self.structure_depth().max(other.structure_depth()) + 2;
        let (mu_u, nu_v) = (self.weight(u), other.weight(v));
        Word::all_up_to(horizon).all(|z| self.weight(&u.concat(&z)) * &nu_v == other.weight(&v.concat(&z)) * &mu_u)
    }
}

/// `δ = 2^(-depth)` for the least `depth` whose cylinders all weigh less than
/// `eps`; every clopen set of diameter below `δ` then has measure below `eps`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaForEpsilon {
    pub depth: usize,
    #[serde(with = "crate::rational::serde_str")]
    pub delta: Rational,
}

pub fn delta_for_epsilon(m: &CylinderMeasure, eps: &Rational) -> Result<DeltaForEpsilon> {
    if eps <= &Rational::zero() {
        return Err(Error::OutOfRange("epsilon must be positive".into()));
    }
    let mut depth = 0;
    while &m.max_weight_at_depth(depth) >= eps {
        depth += 1;
    }
    Ok(DeltaForEpsilon { depth, delta: dyadic(depth) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Preservation {
    Preserved {
        depth: usize,
    },
    Violated {
        witness: Word,
        #[serde(with = "crate::rational::serde_str")]
        lhs: Rational,
        #[serde(with = "crate::rational::serde_str")]
        rhs: Rational,
    },
}

/// Checks `μ(f^{-1}[w]) = ν([w])` for every `|w| <= depth`, shortest words
/// first.
pub fn check_preserves(f: &TransducerMap, mu: &CylinderMeasure, nu: &CylinderMeasure, depth: usize) -> Preservation {
    for w in Word::all_up_to(depth) {
        let lhs = mu.clopen_measure(&f.preimage(&ClopenSet::cylinder(w.clone())));
        let rhs = nu.weight(&w);
        if lhs != rhs {
            return Preservation::Violated { witness: w, lhs, rhs };
        }
    }
    Preservation::Preserved { depth }
}

// JSON form: {"kind":"bernoulli","p":"1/3"} and friends; rationals as strings.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MeasureRepr {
    Bernoulli {
        #[serde(with = "crate::rational::serde_str")]
        p: Rational,
        #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::rational::serde_str_opt")]
        total: Option<Rational>,
    },
    Markov {
        #[serde(with = "crate::rational::serde_str_vec")]
        initial: Vec<Rational>,
        rows: Vec<RowRepr>,
        #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::rational::serde_str_opt")]
        total: Option<Rational>,
    },
    Table {
        depth: usize,
        weights: BTreeMap<Word, StrRational>,
        #[serde(with = "crate::rational::serde_str")]
        tail: Rational,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RowRepr(#[serde(with = "crate::rational::serde_str_vec")] Vec<Rational>);

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct StrRational(#[serde(with = "crate::rational::serde_str")] Rational);

fn pair(v: Vec<Rational>, what: &str) -> Result<[Rational; 2]> {
    <[Rational; 2]>::try_from(v).map_err(|_| Error::InvalidMeasure(format!("{what} must have two entries")))
}

impl TryFrom<MeasureRepr> for CylinderMeasure {
    type Error = Error;

    fn try_from(repr: MeasureRepr) -> Result<Self> {
        match repr {
            MeasureRepr::Bernoulli { p, total } => Self::new(Presentation::Bernoulli { p }, total.unwrap_or(int(1))),
            MeasureRepr::Markov { initial, rows, total } => {
                let rows: Vec<[Rational; 2]> = rows.into_iter().map(|r| pair(r.0, "row")).collect::<Result<_>>()?;
                let rows = <[[Rational; 2]; 2]>::try_from(rows)
                    .map_err(|_| Error::InvalidMeasure("markov needs two rows".into()))?;
                Self::new(Presentation::Markov { initial: pair(initial, "initial")?, rows }, total.unwrap_or(int(1)))
            }
            MeasureRepr::Table { depth, weights, tail } => {
                Self::table(depth, weights.into_iter().map(|(w, v)| (w, v.0)).collect(), tail)
            }
        }
    }
}

impl Serialize for CylinderMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let total = (!self.total.is_one()).then(|| self.total.clone());
        let repr = match &self.presentation {
            Presentation::Bernoulli { p } => MeasureRepr::Bernoulli { p: p.clone(), total },
            Presentation::Markov { initial, rows } => MeasureRepr::Markov {
                initial: initial.to_vec(),
                rows: rows.iter().map(|r| RowRepr(r.to_vec())).collect(),
                total,
            },
            Presentation::Table { depth, weights, tail } => MeasureRepr::Table {
                depth: *depth,
                weights: weights.iter().map(|(w, v)| (w.clone(), StrRational(v.clone()))).collect(),
                tail: tail.clone(),
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CylinderMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(d)?;
        CylinderMeasure::try_from(repr).map_err(serde::de::Error::custom)
    }
}
