use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::maps::TransducerMap;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Surjectivity {
    Surjective,
    /// `f(C) ∩ [witness] = ∅`.
    NotSurjective {
        witness: Word,
    },
}

type Configs = BTreeSet<(usize, Word)>;

/// Configurations reachable after the output has been extended by `bit`.
/// A configuration `(q, s)` means: the machine is in `q` and has already
/// emitted `s` beyond the output read so far.
fn step(f: &TransducerMap, configs: &Configs, bit: bool) -> Configs {
    let mut next = Configs::new();
    for (q, surplus) in configs {
        if let Some(&head) = surplus.bits().first() {
            if head == bit {
                next.insert((*q, surplus.suffix_from(1)));
            }
            continue;
        }
        // follow silent edges until something is emitted
        let mut stack = vec![*q];
        let mut visited = HashSet::new();
        while let Some(s) = stack.pop() {
            if !visited.insert(s) {
                continue;
            }
            for input in [false, true] {
                let t = f.transition(s, input);
                match t.emit.bits().first() {
                    None => stack.push(t.to),
                    Some(&head) if head == bit => {
                        next.insert((t.to, t.emit.suffix_from(1)));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    next
}

/// Decides surjectivity exactly with a subset construction over output
/// prefixes. The witness is the shortest, lexicographically first word whose
/// cylinder the image misses.
pub fn surjectivity_decide(f: &TransducerMap) -> Surjectivity {
    let start: Configs = BTreeSet::from([(f.initial(), Word::empty())]);
    let mut seen: HashSet<Configs> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, Word::empty())]);
    while let Some((configs, word)) = queue.pop_front() {
        for bit in [false, true] {
            let next = step(f, &configs, bit);
            let next_word = word.child(bit);
            if next.is_empty() {
                return Surjectivity::NotSurjective { witness: next_word };
            }
            if seen.insert(next.clone()) {
                queue.push_back((next, next_word));
            }
        }
    }
    Surjectivity::Surjective
}
