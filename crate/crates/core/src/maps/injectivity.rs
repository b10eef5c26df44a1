//! Bounded injectivity certificates from the self-product of a transducer.
//!
//! Pairs of inputs are simulated together from the point where they first
//! differ. A product node records both states and the surplus output one
//! side has emitted beyond the other. Inconsistent outputs kill the pair.
//! A reachable cycle of consistent nodes yields two distinct inputs with
//! equal images; an acyclic product bounds how long distinct inputs can keep
//! their outputs in agreement.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::maps::TransducerMap;
use crate::word::Word;

pub const DEFAULT_BUFFER_BOUND: usize = 64;

/// `x = stem.0 · cycle.0^ω` and `y = stem.1 · cycle.1^ω` are distinct
/// inputs with `f(x) = f(y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionWitness {
    pub stem: (Word, Word),
    pub cycle: (Word, Word),
}

/// If `f(x)` and `f(y)` agree on their first `output_bits` bits then `x`
/// and `y` agree on their first `input_bits` bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub input_bits: usize,
    pub output_bits: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Injectivity {
    Injective { separation: Vec<Separation> },
    NotInjective { witness: CollisionWitness },
    Unknown { reason: String },
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Node {
    x: usize,
    y: usize,
    // true when y's output is ahead
    y_ahead: bool,
    surplus: Word,
}

enum Step {
    Dead { agreed: usize },
    Live { agreed: usize, node: Node },
}

fn advance(f: &TransducerMap, node: &Node, bx: bool, by: bool) -> Step {
    let tx = f.transition(node.x, bx);
    let ty = f.transition(node.y, by);
    let (ox, oy) = if node.y_ahead {
        (tx.emit.clone(), node.surplus.concat(&ty.emit))
    } else {
        (node.surplus.concat(&tx.emit), ty.emit.clone())
    };
    let shared = ox.len().min(oy.len());
    let lcp = ox.common_prefix_len(&oy);
    if lcp < shared {
        return Step::Dead { agreed: lcp };
    }
    let (y_ahead, surplus) =
        if oy.len() > ox.len() { (true, oy.suffix_from(shared)) } else { (false, ox.suffix_from(shared)) };
    Step::Live { agreed: shared, node: Node { x: tx.to, y: ty.to, y_ahead: y_ahead && !surplus.is_empty(), surplus } }
}

const PAIRS: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

struct Search<'a> {
    f: &'a TransducerMap,
    bound: usize,
    // longest further agreement from a finished node
    done: HashMap<Node, usize>,
    overflow: bool,
}

enum Outcome {
    Agreement(usize),
    Cycle { path: Vec<(bool, bool)>, loop_start: usize },
}

impl Search<'_> {
    /// Iterative DFS from `root`. Returns the maximal agreement gained from
    /// `root`, or a cycle as the bit-pair path from `root` plus the index in
    /// that path where the loop begins.
    fn explore(&mut self, root: Node) -> Outcome {
        if let Some(&a) = self.done.get(&root) {
            return Outcome::Agreement(a);
        }
        struct Frame {
            node: Node,
            next: usize,
            best: usize,
            via: Option<(bool, bool)>,
            gain: usize,
        }
        let mut on_stack: HashMap<Node, usize> = HashMap::new();
        let mut stack = vec![Frame { node: root.clone(), next: 0, best: 0, via: None, gain: 0 }];
        on_stack.insert(root, 0);
        loop {
            let top = stack.len() - 1;
            if stack[top].next == PAIRS.len() {
                let frame = stack.pop().expect("nonempty");
                on_stack.remove(&frame.node);
                self.done.insert(frame.node.clone(), frame.best);
                match stack.last_mut() {
                    None => return Outcome::Agreement(frame.best),
                    Some(parent) => parent.best = parent.best.max(frame.gain + frame.best),
                }
                continue;
            }
            let (bx, by) = PAIRS[stack[top].next];
            stack[top].next += 1;
            match advance(self.f, &stack[top].node, bx, by) {
                Step::Dead { agreed } => stack[top].best = stack[top].best.max(agreed),
                Step::Live { agreed, node } => {
                    if node.surplus.len() > self.bound {
                        self.overflow = true;
                        continue;
                    }
                    if let Some(&depth) = on_stack.get(&node) {
                        let mut path: Vec<(bool, bool)> = stack.iter().skip(1).filter_map(|fr| fr.via).collect();
                        path.push((bx, by));
                        return Outcome::Cycle { path, loop_start: depth };
                    }
                    if let Some(&a) = self.done.get(&node) {
                        stack[top].best = stack[top].best.max(agreed + a);
                        continue;
                    }
                    on_stack.insert(node.clone(), stack.len());
                    stack.push(Frame { node, next: 0, best: 0, via: Some((bx, by)), gain: agreed });
                }
            }
        }
    }
}

/// Shortest, lexicographically first input reaching each state.
fn access_words(f: &TransducerMap) -> Vec<Word> {
    let mut words: Vec<Option<Word>> = vec![None; f.state_count()];
    words[f.initial()] = Some(Word::empty());
    let mut queue = VecDeque::from([f.initial()]);
    while let Some(s) = queue.pop_front() {
        let here = words[s].clone().expect("visited");
        for bit in [false, true] {
            let to = f.transition(s, bit).to;
            if words[to].is_none() {
                words[to] = Some(here.child(bit));
                queue.push_back(to);
            }
        }
    }
    words.into_iter().map(|w| w.expect("all states reachable")).collect()
}

/// Certifies injectivity, exhibits a collision, or gives up when the
/// surplus buffer exceeds `buffer_bound`.
pub fn injectivity_certificate(f: &TransducerMap, buffer_bound: usize) -> Injectivity {
    assert!(buffer_bound >= 1, "buffer_bound must be at least 1");
    let access = access_words(f);
    let mut search = Search { f, bound: buffer_bound, done: HashMap::new(), overflow: false };
    let diagonal = Node { x: 0, y: 0, y_ahead: false, surplus: Word::empty() };

    // agreement gained by pairs that split at state s (x reads 0, y reads 1)
    let mut split_agreement = vec![0usize; f.state_count()];
    for s in 0..f.state_count() {
        let here = Node { x: s, y: s, ..diagonal.clone() };
        match advance(f, &here, false, true) {
            Step::Dead { agreed } => split_agreement[s] = agreed,
            Step::Live { agreed, node } => {
                if node.surplus.len() > buffer_bound {
                    search.overflow = true;
                    continue;
                }
                match search.explore(node) {
                    Outcome::Agreement(a) => split_agreement[s] = agreed + a,
                    Outcome::Cycle { path, loop_start } => {
                        let mut stem = (access[s].child(false), access[s].child(true));
                        let mut cycle = (Word::empty(), Word::empty());
                        for (i, (bx, by)) in path.into_iter().enumerate() {
                            let side = if i < loop_start { &mut stem } else { &mut cycle };
                            side.0.push(bx);
                            side.1.push(by);
                        }
                        return Injectivity::NotInjective { witness: CollisionWitness { stem, cycle } };
                    }
                }
            }
        }
    }
    if search.overflow {
        return Injectivity::Unknown { reason: format!("output surplus exceeded buffer bound {buffer_bound}") };
    }

    // longest output over inputs of each length, per state
    let mut longest: Vec<Option<usize>> = vec![None; f.state_count()];
    longest[f.initial()] = Some(0);
    let mut separation = Vec::with_capacity(buffer_bound);
    let mut worst = 0usize;
    for n in 1..=buffer_bound {
        for (s, len) in longest.iter().enumerate() {
            if let Some(len) = len {
                worst = worst.max(len + split_agreement[s]);
            }
        }
        separation.push(Separation { input_bits: n, output_bits: worst + 1 });
        let mut next = vec![None; f.state_count()];
        for (s, len) in longest.iter().enumerate() {
            let Some(len) = len else { continue };
            for bit in [false, true] {
                let t = f.transition(s, bit);
                let cand = len + t.emit.len();
                let slot: &mut Option<usize> = &mut next[t.to];
                *slot = Some(slot.map_or(cand, |c: usize| c.max(cand)));
            }
        }
        longest = next;
    }
    Injectivity::Injective { separation }
}

/// Replays a collision witness: the stems must split, the cycle must return
/// both runs to the same product configuration, and every emitted bit must
/// agree.
pub fn verify_collision(f: &TransducerMap, witness: &CollisionWitness) -> bool {
    let (sx, sy) = &witness.stem;
    let (cx, cy) = &witness.cycle;
    if sx.comparable(sy) || cx.len() != cy.len() || cx.is_empty() || sx.len() != sy.len() {
        return false;
    }
    let (ox, px) = f.run_from(f.initial(), sx);
    let (oy, py) = f.run_from(f.initial(), sy);
    if !ox.comparable(&oy) {
        return false;
    }
    let (lx, qx) = f.run_from(px, cx);
    let (ly, qy) = f.run_from(py, cy);
    let (fx, fy) = (ox.concat(&lx), oy.concat(&ly));
    if !fx.comparable(&fy) || (qx, qy) != (px, py) {
        return false;
    }
    // same surplus before and after the loop
    let before = ox.len() as isize - oy.len() as isize;
    let after = fx.len() as isize - fy.len() as isize;
    if before != after {
        return false;
    }
    let surplus = |a: &Word, b: &Word| if a.len() >= b.len() { a.suffix_from(b.len()) } else { b.suffix_from(a.len()) };
    surplus(&ox, &oy) == surplus(&fx, &fy)
}
