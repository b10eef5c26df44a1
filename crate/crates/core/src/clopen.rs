//! Canonical clopen subsets of the Cantor space `{0,1}^N`.
//!
//! A clopen set is a finite union of cylinders `[w]`. The canonical form is
//! the unique prefix-free, sibling-merged antichain in lexicographic order,
//! so structural equality is set equality.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{dyadic, Rational};
use crate::word::Word;

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClopenSet {
    antichain: Vec<Word>,
}

/// How a cylinder `[u]` sits relative to a clopen set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cover {
    Full,
    Empty,
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoolOp {
    Union,
    Intersection,
    Complement,
    BooleanSum,
    Difference,
}

impl BoolOp {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::Union => a || b,
            BoolOp::Intersection => a && b,
            BoolOp::Complement => !a,
            BoolOp::BooleanSum => a != b,
            BoolOp::Difference => a && !b,
        }
    }
}

impl ClopenSet {
    pub fn empty() -> Self {
        ClopenSet { antichain: Vec::new() }
    }

    /// The whole space, `{ε}`.
    pub fn whole() -> Self {
        ClopenSet { antichain: vec![Word::empty()] }
    }

    pub fn cylinder(w: Word) -> Self {
        ClopenSet { antichain: vec![w] }
    }

    /// Canonical form of the union of the given cylinders.
    pub fn canonicalize<I: IntoIterator<Item = Word>>(words: I) -> Self {
        let mut words: Vec<Word> = words.into_iter().collect();
        words.sort();
        words.dedup();

        let mut stack: Vec<Word> = Vec::with_capacity(words.len());
        let mut last_kept: Option<Word> = None;
        for word in words {
            if let Some(p) = &last_kept {
                if p.is_prefix_of(&word) {
                    continue;
                }
            }
            last_kept = Some(word.clone());
            stack.push(word);
            while stack.len() >= 2 {
                let n = stack.len();
                let (a, b) = (&stack[n - 2], &stack[n - 1]);
                let siblings = a.len() == b.len()
                    && !a.is_empty()
                    && a.last() == Some(false)
                    && b.last() == Some(true)
                    && a.bits()[..a.len() - 1] == b.bits()[..b.len() - 1];
                if !siblings {
                    break;
                }
                let parent = b.parent().expect("nonempty");
                stack.truncate(n - 2);
                stack.push(parent);
            }
        }
        ClopenSet { antichain: stack }
    }

    pub fn words(&self) -> &[Word] {
        &self.antichain
    }

    pub fn into_words(self) -> Vec<Word> {
        self.antichain
    }

    pub fn is_empty(&self) -> bool {
        self.antichain.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.antichain.len() == 1 && self.antichain[0].is_empty()
    }

    /// Longest word in the antichain (0 for the empty set).
    pub fn max_depth(&self) -> usize {
        self.antichain.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn first_word(&self) -> Option<&Word> {
        self.antichain.first()
    }

    /// Classify the cylinder `[u]` against this set.
    pub fn cover(&self, u: &Word) -> Cover {
        // greatest element <= u is the only candidate prefix of u
        let idx = match self.antichain.binary_search(u) {
            Ok(_) => return Cover::Full,
            Err(i) => i,
        };
        if idx > 0 && self.antichain[idx - 1].is_prefix_of(u) {
            return Cover::Full;
        }
        if idx < self.antichain.len() && u.is_prefix_of(&self.antichain[idx]) {
            return Cover::Partial;
        }
        Cover::Empty
    }

    /// True if `[u]` is contained in the set.
    pub fn contains_cylinder(&self, u: &Word) -> bool {
        self.cover(u) == Cover::Full
    }

    /// True if `[u]` meets the set.
    pub fn meets_cylinder(&self, u: &Word) -> bool {
        self.cover(u) != Cover::Empty
    }

    /// Membership of a point given by a long enough prefix. Returns `None`
    /// when the prefix is too short to decide.
    pub fn contains_point_prefix(&self, x: &Word) -> Option<bool> {
        match self.cover(x) {
            Cover::Full => Some(true),
            Cover::Empty => Some(false),
            Cover::Partial => None,
        }
    }

    fn combine(&self, other: &ClopenSet, op: BoolOp) -> ClopenSet {
        fn walk(a: &ClopenSet, b: &ClopenSet, op: BoolOp, u: Word, out: &mut Vec<Word>) {
            let ca = a.cover(&u);
            let cb = b.cover(&u);
            if ca != Cover::Partial && cb != Cover::Partial {
                if op.apply(ca == Cover::Full, cb == Cover::Full) {
                    out.push(u);
                }
                return;
            }
            walk(a, b, op, u.child(false), out);
            walk(a, b, op, u.child(true), out);
        }
        let mut out = Vec::new();
        walk(self, other, op, Word::empty(), &mut out);
        ClopenSet::canonicalize(out)
    }

    /// Apply a boolean operation. `Complement` ignores `other`.
    pub fn boolean_op(&self, op: BoolOp, other: Option<&ClopenSet>) -> ClopenSet {
        match (op, other) {
            (BoolOp::Complement, _) => self.complement(),
            (op, Some(b)) => self.combine(b, op),
            (op, None) => self.combine(&ClopenSet::empty(), op),
        }
    }

    pub fn union(&self, other: &ClopenSet) -> ClopenSet {
        ClopenSet::canonicalize(self.antichain.iter().chain(&other.antichain).cloned())
    }

    pub fn intersection(&self, other: &ClopenSet) -> ClopenSet {
        self.combine(other, BoolOp::Intersection)
    }

    pub fn difference(&self, other: &ClopenSet) -> ClopenSet {
        self.combine(other, BoolOp::Difference)
    }

    pub fn boolean_sum(&self, other: &ClopenSet) -> ClopenSet {
        self.combine(other, BoolOp::BooleanSum)
    }

    pub fn complement(&self) -> ClopenSet {
        self.combine(&ClopenSet::empty(), BoolOp::Complement)
    }

    pub fn is_subset(&self, other: &ClopenSet) -> bool {
        self.antichain.iter().all(|u| other.contains_cylinder(u))
    }

    pub fn is_disjoint(&self, other: &ClopenSet) -> bool {
        self.antichain.iter().all(|u| other.cover(u) == Cover::Empty)
    }

    /// `{ z : u·z ∈ A }`.
    pub fn quotient(&self, u: &Word) -> ClopenSet {
        match self.cover(u) {
            Cover::Full => ClopenSet::whole(),
            Cover::Empty => ClopenSet::empty(),
            Cover::Partial => {
                let start = self.antichain.partition_point(|v| v < u);
                let words = self.antichain[start..]
                    .iter()
                    .take_while(|v| u.is_prefix_of(v))
                    .map(|v| v.suffix_from(u.len()))
                    .collect();
                ClopenSet { antichain: words }
            }
        }
    }

    /// `u·A`, the image of the set under `z ↦ u·z`.
    pub fn prefixed(&self, u: &Word) -> ClopenSet {
        ClopenSet { antichain: self.antichain.iter().map(|v| u.concat(v)).collect() }
    }

    /// Nonempty pieces `A ∩ [v]` over all depth-`k` words `v`, in
    /// lexicographic order. Cylinders shallower than `k` are split.
    pub fn split_at_depth(&self, k: usize) -> Vec<(Word, ClopenSet)> {
        let mut out: Vec<(Word, ClopenSet)> = Vec::new();
        for u in &self.antichain {
            if u.len() >= k {
                let v = u.prefix(k);
                match out.last_mut() {
                    Some((last, piece)) if *last == v => piece.antichain.push(u.clone()),
                    _ => out.push((v, ClopenSet { antichain: vec![u.clone()] })),
                }
            } else {
                let extra = k - u.len();
                for tail in Word::all_of_length(extra) {
                    let v = u.concat(&tail);
                    out.push((v.clone(), ClopenSet::cylinder(v)));
                }
            }
        }
        out
    }

    /// Diameter under `d(x,y) = 2^(-lcp)`: `2^(-|p|)` with `p` the longest
    /// common prefix of the antichain; zero for the empty set.
    pub fn diameter(&self) -> Rational {
        let Some(first) = self.antichain.first() else {
            return Rational::from_integer(0.into());
        };
        let lcp = self.antichain.iter().skip(1).fold(first.len(), |acc, v| acc.min(first.common_prefix_len(v)));
        dyadic(lcp)
    }

    /// Order used to lay out cells: by the first antichain word.
    pub fn layout_cmp(&self, other: &ClopenSet) -> Ordering {
        self.antichain.first().cmp(&other.antichain.first())
    }
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.antichain).finish()
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.antichain.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v:?}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct ClopenRepr {
    antichain: Vec<Word>,
}

impl Serialize for ClopenSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ClopenRepr { antichain: self.antichain.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClopenSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ClopenRepr::deserialize(d)?;
        Ok(ClopenSet::canonicalize(repr.antichain))
    }
}

/// Build a canonical set from string literals. Test and example helper.
pub fn clopen(words: &[&str]) -> ClopenSet {
    ClopenSet::canonicalize(words.iter().map(|s| crate::word::w(s)))
}
