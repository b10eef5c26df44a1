//! Homeomorphisms between clopen sets, and homeomorphic approximation of
//! continuous surjections.

use serde::{Deserialize, Serialize};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::maps::{PrefixExchange, TransducerMap};
use crate::word::Word;

/// Split the lexicographically first shortest word into its two children.
fn split_first_shortest(words: &mut Vec<Word>) {
    let (i, _) = words
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .expect("nonempty antichain");
    let u = words.remove(i);
    words.insert(i, u.child(true));
    words.insert(i, u.child(false));
}

/// Cylinder partitions of `a` and `b` with equal counts, paired in
/// lexicographic order.
pub fn balance_antichains(a: &ClopenSet, b: &ClopenSet) -> Result<Vec<(Word, Word)>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut left = a.words().to_vec();
    let mut right = b.words().to_vec();
    while left.len() != right.len() {
        if left.len() < right.len() {
            split_first_shortest(&mut left);
        } else {
            split_first_shortest(&mut right);
        }
    }
    Ok(left.into_iter().zip(right).collect())
}

/// The deterministic homeomorphism `a → b` from [`balance_antichains`].
pub fn canonical_clopen_homeo(a: &ClopenSet, b: &ClopenSet) -> Result<PrefixExchange> {
    PrefixExchange::new(balance_antichains(a, b)?)
}

/// One target cell of an approximation: `[target]` and its preimage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellMatch {
    pub target: Word,
    pub preimage: ClopenSet,
    pub rules: Vec<(Word, Word)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximation {
    pub exchange: PrefixExchange,
    pub cells: Vec<CellMatch>,
}

/// For every depth-`n` cylinder `[w]` of the target, pair `f^{-1}[w]` with
/// `[w]` using `pair`, and join the pieces.
pub(crate) fn approximate_by_cells<F>(f: &TransducerMap, n: usize, mut pair: F) -> Result<Approximation>
where
    F: FnMut(&ClopenSet, &ClopenSet) -> Result<PrefixExchange>,
{
    let mut rules = Vec::new();
    let mut cells = Vec::with_capacity(1 << n);
    for target in Word::all_of_length(n) {
        let cell = ClopenSet::cylinder(target.clone());
        let preimage = f.preimage(&cell);
        if preimage.is_empty() {
            return Err(Error::NotSurjective { witness: target });
        }
        let piece = pair(&preimage, &cell)?;
        rules.extend(piece.rules().iter().cloned());
        cells.push(CellMatch { target, preimage, rules: piece.rules().to_vec() });
    }
    Ok(Approximation { exchange: PrefixExchange::new(rules)?, cells })
}

/// Self-homeomorphism `g` of `C` with `f(x) ∈ [w] ⇔ g(x) ∈ [w]` for every
/// depth-`n` word `w`; hence `d(f, g) ≤ 2^(-n)`.
pub fn approx_homeo(f: &TransducerMap, n: usize) -> Result<PrefixExchange> {
    approx_homeo_cells(f, n).map(|a| a.exchange)
}

pub fn approx_homeo_cells(f: &TransducerMap, n: usize) -> Result<Approximation> {
    if n == 0 {
        return Err(Error::OutOfRange("approximation depth must be at least 1".into()));
    }
    approximate_by_cells(f, n, canonical_clopen_homeo)
}
