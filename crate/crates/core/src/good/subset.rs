use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::measure::{CylinderMeasure, TailClass};
use crate::rational::Rational;
use crate::word::Word;

/// Search nodes visited before [`find_clopen_subset`] gives up.
pub const NODE_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SubsetSearch {
    Found {
        set: ClopenSet,
    },
    /// No subset with words of length at most `depth` was found. Also
    /// returned when the node cap runs out; never a refutation.
    NotFoundUpToDepth {
        depth: usize,
    },
}

pub(crate) fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    Rational::new(a.numer().gcd(b.numer()), a.denom().lcm(b.denom()))
}

/// Every clopen subset of `[u]` with words of length `<= depth` has measure
/// a multiple of `grain(u)`.
struct Grain<'a> {
    m: &'a CylinderMeasure,
    depth: usize,
    memo: HashMap<(TailClass, usize), Rational>,
}

impl<'a> Grain<'a> {
    fn new(m: &'a CylinderMeasure, depth: usize) -> Self {
        Grain { m, depth, memo: HashMap::new() }
    }

    fn of(&mut self, u: &Word) -> Rational {
        let below = self.depth.saturating_sub(u.len());
        self.m.weight(u) * self.relative(u, below)
    }

    fn relative(&mut self, u: &Word, n: usize) -> Rational {
        if n == 0 {
            return Rational::one();
        }
        let key = (self.m.tail_class(u), n);
        if let Some(g) = self.memo.get(&key) {
            return g.clone();
        }
        let base = self.m.weight(u);
        let (u0, u1) = (u.child(false), u.child(true));
        let g0 = self.m.weight(&u0) / &base * self.relative(&u0, n - 1);
        let g1 = self.m.weight(&u1) / &base * self.relative(&u1, n - 1);
        let g = rational_gcd(&g0, &g1);
        self.memo.insert(key, g.clone());
        g
    }
}

enum Action {
    Nothing,
    Included,
    Split,
    Excluded,
}

struct Frame {
    u: Word,
    w: Rational,
    stage: u8,
    action: Action,
}

type Pending = BTreeSet<(Reverse<Rational>, Word)>;

/// A clopen `A ⊆ b` with `μ(A) = t` and all words of length at most
/// `depth_budget` (or the depth of `b`, if larger).
///
/// Depth-first over cylinder refinements of `b`, largest weight first with
/// ties broken lexicographically; at each cylinder try including it, then
/// splitting it (or excluding it once it cannot be split). Branches are cut
/// when the remaining mass is too small, or when the remaining target is not
/// a multiple of the finest weight the pending cylinders can reach.
pub fn find_clopen_subset(
    m: &CylinderMeasure,
    b: &ClopenSet,
    t: &Rational,
    depth_budget: usize,
) -> Result<SubsetSearch> {
    let total = m.clopen_measure(b);
    if t < &Rational::zero() || t > &total {
        return Err(Error::OutOfRange(format!("target {t} outside [0, {total}]")));
    }
    if t.is_zero() {
        return Ok(SubsetSearch::Found { set: ClopenSet::empty() });
    }
    if *t == total {
        return Ok(SubsetSearch::Found { set: b.clone() });
    }
    let budget = depth_budget.max(b.max_depth());
    let mut grain = Grain::new(m, budget);
    let mut pending: Pending = b.words().iter().map(|u| (Reverse(m.weight(u)), u.clone())).collect();
    let mut mass = total;
    let mut r = t.clone();
    let mut chosen: Vec<Word> = Vec::new();
    let mut stack: Vec<Frame> = Vec::new();
    let mut nodes = 0usize;
    let not_found = SubsetSearch::NotFoundUpToDepth { depth: depth_budget };

    'enter: loop {
        nodes += 1;
        if nodes > NODE_CAP {
            return Ok(not_found);
        }
        if r.is_zero() {
            return Ok(SubsetSearch::Found { set: ClopenSet::canonicalize(chosen) });
        }
        let viable = mass >= r && !pending.is_empty() && {
            let g = pending.iter().fold(Rational::zero(), |g, (_, u)| rational_gcd(&g, &grain.of(u)));
            (&r / g).is_integer()
        };
        if viable {
            let (Reverse(w), u) = pending.pop_first().expect("nonempty");
            stack.push(Frame { u, w, stage: 0, action: Action::Nothing });
        }

        loop {
            let Some(fr) = stack.last_mut() else { return Ok(not_found) };
            match std::mem::replace(&mut fr.action, Action::Nothing) {
                Action::Nothing => {}
                Action::Included => {
                    chosen.pop();
                    r += &fr.w;
                    mass += &fr.w;
                }
                Action::Split => {
                    for c in [fr.u.child(false), fr.u.child(true)] {
                        pending.remove(&(Reverse(m.weight(&c)), c));
                    }
                }
                Action::Excluded => mass += &fr.w,
            }
            if fr.stage == 0 {
                fr.stage = 1;
                if fr.w <= r {
                    chosen.push(fr.u.clone());
                    r -= &fr.w;
                    mass -= &fr.w;
                    fr.action = Action::Included;
                    continue 'enter;
                }
            }
            if fr.stage == 1 {
                fr.stage = 2;
                if fr.u.len() < budget {
                    for c in [fr.u.child(false), fr.u.child(true)] {
                        pending.insert((Reverse(m.weight(&c)), c));
                    }
                    fr.action = Action::Split;
                } else {
                    mass -= &fr.w;
                    fr.action = Action::Excluded;
                }
                continue 'enter;
            }
            let done = stack.pop().expect("top frame");
            pending.insert((Reverse(done.w), done.u));
        }
    }
}
