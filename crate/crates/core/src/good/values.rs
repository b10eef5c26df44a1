use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::CylinderMeasure;
use crate::rational::Rational;
use crate::word::Word;

pub const MAX_VALUES_DEPTH: usize = 20;
const BITSET_LIMIT: u64 = 1 << 26;
const HASH_LIMIT: usize = 1 << 22;

/// Measures of all unions of depth-`depth` cylinders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueSample {
    pub depth: usize,
    #[serde(with = "crate::rational::serde_str")]
    pub total: Rational,
    #[serde(with = "crate::rational::serde_str_vec")]
    pub values: Vec<Rational>,
}

impl ValueSample {
    pub fn contains(&self, v: &Rational) -> bool {
        self.values.binary_search(v).is_ok()
    }

    /// Largest gap between consecutive values.
    pub fn max_gap(&self) -> Rational {
        self.values.windows(2).map(|p| &p[1] - &p[0]).max().unwrap_or_else(Rational::zero)
    }
}

fn shift_or(bits: &mut [u64], s: usize) {
    let (words, rem) = (s / 64, s % 64);
    for i in (0..bits.len()).rev() {
        let mut v = 0;
        if i >= words {
            v = bits[i - words] << rem;
            if rem > 0 && i > words {
                v |= bits[i - words - 1] >> (64 - rem);
            }
        }
        bits[i] |= v;
    }
}

/// Subset sums of a multiset given as value → multiplicity.
fn subset_sums(counts: &BTreeMap<Rational, usize>, total: &Rational) -> Result<Vec<Rational>> {
    let lcm = counts.keys().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let scaled_total = (total * Rational::from_integer(lcm.clone())).to_integer();
    if let Some(n) = scaled_total.to_u64().filter(|n| *n <= BITSET_LIMIT) {
        let n = n as usize;
        let mut bits = vec![0u64; n / 64 + 1];
        bits[0] = 1;
        for (w, &c) in counts {
            let unit = (w * Rational::from_integer(lcm.clone())).to_integer().to_usize().expect("bounded by total");
            // binary splitting of the multiplicity
            let (mut left, mut chunk) = (c, 1);
            while left > 0 {
                let take = chunk.min(left);
                shift_or(&mut bits, unit * take);
                left -= take;
                chunk *= 2;
            }
        }
        let scale = Rational::from_integer(lcm);
        return Ok((0..=n)
            .filter(|i| bits[i / 64] >> (i % 64) & 1 == 1)
            .map(|i| Rational::from_integer(i.into()) / &scale)
            .collect());
    }
    let mut sums: BTreeSet<Rational> = BTreeSet::from([Rational::zero()]);
    for (w, &c) in counts {
        let mut next = BTreeSet::new();
        for s in &sums {
            let mut v = s.clone();
            for _ in 0..=c {
                next.insert(v.clone());
                v += w;
            }
        }
        if next.len() > HASH_LIMIT {
            return Err(Error::ResourceLimit(format!("more than {HASH_LIMIT} distinct clopen values")));
        }
        sums = next;
    }
    Ok(sums.into_iter().collect())
}

/// Exact clopen values at depth `depth`.
pub fn clopen_values(m: &CylinderMeasure, depth: usize) -> Result<ValueSample> {
    if depth > MAX_VALUES_DEPTH {
        return Err(Error::ResourceLimit(format!("value depth {depth} exceeds {MAX_VALUES_DEPTH}")));
    }
    let mut counts: BTreeMap<Rational, usize> = BTreeMap::new();
    for u in Word::all_of_length(depth) {
        *counts.entry(m.weight(&u)).or_default() += 1;
    }
    let values = subset_sums(&counts, m.total())?;
    Ok(ValueSample { depth, total: m.total().clone(), values })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum GroupLike {
    GroupLike,
    /// `s <= t` are in the set but `t - s` is not.
    Counterexample {
        #[serde(with = "crate::rational::serde_str")]
        s: Rational,
        #[serde(with = "crate::rational::serde_str")]
        t: Rational,
        #[serde(with = "crate::rational::serde_str")]
        difference: Rational,
    },
}

/// Closure of a finite value set under `s <= t ⇒ t - s ∈ S`, after scaling
/// `total` to 1. The witness is the first failure with `s` then `t`
/// ascending, reported in the original scale.
pub fn group_like_check(values: &[Rational], total: &Rational) -> Result<GroupLike> {
    if total <= &Rational::zero() {
        return Err(Error::MalformedValues("total must be positive".into()));
    }
    let set: BTreeSet<Rational> = values.iter().map(|v| v / total).collect();
    if !set.contains(&Rational::zero()) || !set.contains(&Rational::one()) {
        return Err(Error::MalformedValues("value set must contain 0 and the total".into()));
    }
    if set.iter().any(|v| v > &Rational::one() || v < &Rational::zero()) {
        return Err(Error::MalformedValues("values must lie in [0, total]".into()));
    }
    // A finite set closed under differences is {0, g, 2g, …, 1} with g its
    // least positive element, and any failure shows up with s = g.
    let g = set.iter().nth(1).expect("0 < 1 both present").clone();
    for t in set.range(&g..) {
        let d = t - &g;
        if !set.contains(&d) {
            return Ok(GroupLike::Counterexample { s: &g * total, t: t * total, difference: d * total });
        }
    }
    Ok(GroupLike::GroupLike)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::ClopenSet;
    use crate::rational::{int, ratio};

    fn b(n: i64, d: i64) -> CylinderMeasure {
        CylinderMeasure::bernoulli(ratio(n, d)).unwrap()
    }

    fn fractions(nums: &[i64], den: i64) -> Vec<Rational> {
        nums.iter().map(|&n| ratio(n, den)).collect()
    }

    /// Oracle: measures of all `2^(2^depth)` unions.
    fn brute(m: &CylinderMeasure, depth: usize) -> Vec<Rational> {
        let cyl: Vec<Word> = Word::all_of_length(depth).collect();
        let mut out = BTreeSet::new();
        for mask in 0u64..1 << cyl.len() {
            let a = ClopenSet::canonicalize(
                cyl.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, u)| u.clone()),
            );
            out.insert(m.clopen_measure(&a));
        }
        out.into_iter().collect()
    }

    #[test]
    fn examples() {
        assert_eq!(clopen_values(&b(1, 2), 2).unwrap().values, fractions(&[0, 1, 2, 3, 4], 4));
        assert_eq!(clopen_values(&b(1, 3), 2).unwrap().values, fractions(&(0..=9).collect::<Vec<_>>(), 9));
        let scaled = b(1, 3).scaled(&int(3)).unwrap();
        assert_eq!(clopen_values(&scaled, 0).unwrap().values, vec![int(0), int(3)]);
        assert!(clopen_values(&b(1, 2), MAX_VALUES_DEPTH + 1).is_err());
    }

    #[test]
    fn agrees_with_brute_force() {
        let weird = CylinderMeasure::markov(
            [ratio(2, 7), ratio(5, 7)],
            [[ratio(1, 6), ratio(5, 6)], [ratio(4, 5), ratio(1, 5)]],
        )
        .unwrap();
        for m in [b(1, 3), b(2, 5), weird] {
            for depth in 0..=3 {
                assert_eq!(clopen_values(&m, depth).unwrap().values, brute(&m, depth));
            }
        }
    }

    #[test]
    fn hash_path_for_huge_denominators() {
        let m = b(1, 1_000_003);
        let v = clopen_values(&m, 2).unwrap();
        assert_eq!(v.values, brute(&m, 2));
    }

    #[test]
    fn shifting_across_words() {
        let mut bits = vec![0b1011u64, 0];
        shift_or(&mut bits, 62);
        assert_eq!(bits, vec![0b1011 | (1 << 62) | (1 << 63), 0b10]);
    }

    #[test]
    fn nested_and_dense() {
        for m in [b(1, 2), b(1, 3)] {
            let mut previous = clopen_values(&m, 0).unwrap();
            for depth in 1..=8 {
                let next = clopen_values(&m, depth).unwrap();
                assert!(previous.values.iter().all(|v| next.contains(v)));
                assert!(next.max_gap() <= m.max_weight_at_depth(depth));
                previous = next;
            }
        }
    }

    #[test]
    fn group_like_examples() {
        let one = int(1);
        assert_eq!(group_like_check(&fractions(&[0, 1, 2, 3, 4], 4), &one).unwrap(), GroupLike::GroupLike);
        assert_eq!(
            group_like_check(&[int(0), ratio(1, 5), ratio(1, 2), int(1)], &one).unwrap(),
            GroupLike::Counterexample { s: ratio(1, 5), t: ratio(1, 2), difference: ratio(3, 10) }
        );
        assert_eq!(group_like_check(&[int(0), int(1)], &one).unwrap(), GroupLike::GroupLike);
        assert!(group_like_check(&[ratio(1, 2), int(1)], &one).is_err());
        assert_eq!(group_like_check(&[int(0), int(1), int(2)], &int(2)).unwrap(), GroupLike::GroupLike);
    }

    #[test]
    fn group_like_matches_pairwise_oracle() {
        for mask in 0u32..1 << 7 {
            let mut v = vec![int(0), int(1)];
            v.extend((1..8).filter(|i| mask >> (i - 1) & 1 == 1).map(|i| ratio(i, 8)));
            let closed = v.iter().all(|s| v.iter().filter(|t| *t >= s).all(|t| v.contains(&(t - s))));
            let verdict = group_like_check(&v, &int(1)).unwrap();
            assert_eq!(closed, verdict == GroupLike::GroupLike, "{v:?}");
            if let GroupLike::Counterexample { s, t, difference } = verdict {
                assert!(v.contains(&s) && v.contains(&t) && !v.contains(&difference));
            }
        }
    }

    #[test]
    fn sample_is_group_like_for_fair_and_triadic_coins() {
        for m in [b(1, 2), b(1, 3)] {
            for depth in 0..=8 {
                let s = clopen_values(&m, depth).unwrap();
                assert_eq!(group_like_check(&s.values, &s.total).unwrap(), GroupLike::GroupLike);
            }
        }
    }
}
