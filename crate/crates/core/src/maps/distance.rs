//! Uniform distance between transducer maps.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::maps::TransducerMap;
use crate::rational::{dyadic, Rational};
use crate::word::Word;

/// Result of [`sup_distance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distance {
    /// `sup_x d(f(x), g(x)) = 2^(-k)`; `f` and `g` disagree at output
    /// position `k + 1` on every continuation of `witness`.
    Exact {
        #[serde(with = "crate::rational::serde_str")]
        value: Rational,
        k: usize,
        witness: Word,
    },
    /// All inputs produce outputs agreeing on the first `depth` bits.
    AtMost {
        #[serde(with = "crate::rational::serde_str")]
        value: Rational,
        depth: usize,
    },
}

impl Distance {
    pub fn value(&self) -> &Rational {
        match self {
            Distance::Exact { value, .. } | Distance::AtMost { value, .. } => value,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Distance::Exact { .. })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Pending {
    f_state: usize,
    g_state: usize,
    // true when g's output is ahead of f's
    g_ahead: bool,
    surplus: Word,
}

/// Exact uniform distance `sup_x d(f(x), g(x))` when it is at least
/// `2^(-(depth_bound - 1))`, otherwise the bound `2^(-depth_bound)`.
///
/// Explores the product machine ordered by the number of agreed output bits,
/// so the first disagreement found is the shallowest one.
pub fn sup_distance(f: &TransducerMap, g: &TransducerMap, depth_bound: usize) -> Distance {
    assert!(depth_bound >= 1, "depth_bound must be at least 1");
    let start = Pending { f_state: f.initial(), g_state: g.initial(), g_ahead: false, surplus: Word::empty() };
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0usize, 0usize, Word::empty(), start)));
    let mut seen: HashSet<Pending> = HashSet::new();
    let mut best: Option<(usize, Word)> = None;

    while let Some(Reverse((agreed, _, input, node))) = heap.pop() {
        if let Some((k, _)) = &best {
            if agreed >= *k {
                break;
            }
        }
        if agreed >= depth_bound || !seen.insert(node.clone()) {
            continue;
        }
        for bit in [false, true] {
            let tf = f.transition(node.f_state, bit);
            let tg = g.transition(node.g_state, bit);
            let (f_out, g_out) = if node.g_ahead {
                (tf.emit.clone(), node.surplus.concat(&tg.emit))
            } else {
                (node.surplus.concat(&tf.emit), tg.emit.clone())
            };
            let shared = f_out.len().min(g_out.len());
            let lcp = f_out.common_prefix_len(&g_out);
            let next_input = input.child(bit);
            if lcp < shared {
                let k = agreed + lcp;
                if k < depth_bound && best.as_ref().is_none_or(|(b, _)| k < *b) {
                    best = Some((k, next_input));
                }
                continue;
            }
            let (g_ahead, mut surplus) = if g_out.len() > f_out.len() {
                (true, g_out.suffix_from(shared))
            } else {
                (false, f_out.suffix_from(shared))
            };
            // bits past the horizon can never yield a disagreement that counts
            if surplus.len() > depth_bound {
                surplus = surplus.prefix(depth_bound);
            }
            let next = Pending { f_state: tf.to, g_state: tg.to, g_ahead: g_ahead && !surplus.is_empty(), surplus };
            heap.push(Reverse((agreed + shared, next_input.len(), next_input, next)));
        }
    }

    match best {
        Some((k, witness)) => Distance::Exact { value: dyadic(k), k, witness },
        None => Distance::AtMost { value: dyadic(depth_bound), depth: depth_bound },
    }
}
