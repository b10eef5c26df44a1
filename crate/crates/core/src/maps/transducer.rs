//! Finite-state, non-starving binary transducers.
//!
//! A transducer reads an infinite input sequence bit by bit; each step emits
//! a finite (possibly empty) word. Non-starving means every reachable cycle
//! emits at least one bit, so infinite inputs produce infinite outputs and
//! the machine denotes a continuous map `C → C`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub emit: Word,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransducerMap {
    names: Vec<String>,
    initial: usize,
    delta: Vec<[Transition; 2]>,
}

impl TransducerMap {
    /// Builds a machine, pruning states unreachable from `initial` and
    /// rejecting machines with a silent (non-emitting) reachable cycle.
    pub fn new(names: Vec<String>, initial: usize, delta: Vec<[Transition; 2]>) -> Result<Self> {
        let n = delta.len();
        if names.len() != n {
            return Err(Error::InvalidMap("state name count does not match transitions".into()));
        }
        if initial >= n {
            return Err(Error::InvalidMap("initial state out of range".into()));
        }
        if delta.iter().flatten().any(|t| t.to >= n) {
            return Err(Error::InvalidMap("transition target out of range".into()));
        }

        let mut seen = vec![false; n];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([initial]);
        seen[initial] = true;
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for t in &delta[s] {
                if !seen[t.to] {
                    seen[t.to] = true;
                    queue.push_back(t.to);
                }
            }
        }
        let mut renumber = vec![usize::MAX; n];
        for (new, &old) in order.iter().enumerate() {
            renumber[old] = new;
        }
        let names = order.iter().map(|&s| names[s].clone()).collect();
        let delta: Vec<[Transition; 2]> =
            order.iter().map(|&s| delta[s].clone().map(|t| Transition { emit: t.emit, to: renumber[t.to] })).collect();

        let map = TransducerMap { names, initial: 0, delta };
        map.check_non_starving()?;
        Ok(map)
    }

    fn check_non_starving(&self) -> Result<()> {
        // the silent-edge subgraph must be acyclic
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let mut mark = vec![Mark::New; self.delta.len()];
        for root in 0..self.delta.len() {
            if mark[root] != Mark::New {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            mark[root] = Mark::Open;
            while let Some(&mut (s, ref mut next)) = stack.last_mut() {
                if *next == 2 {
                    mark[s] = Mark::Done;
                    stack.pop();
                    continue;
                }
                let t = &self.delta[s][*next];
                *next += 1;
                if !t.emit.is_empty() {
                    continue;
                }
                match mark[t.to] {
                    Mark::Open => {
                        return Err(Error::InvalidMap(format!("silent cycle through state {:?}", self.names[t.to])))
                    }
                    Mark::New => {
                        mark[t.to] = Mark::Open;
                        stack.push((t.to, 0));
                    }
                    Mark::Done => {}
                }
            }
        }
        Ok(())
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn transition(&self, s: usize, bit: bool) -> &Transition {
        &self.delta[s][bit as usize]
    }

    /// Longest single-step emission.
    pub fn max_emit(&self) -> usize {
        self.delta.iter().flatten().map(|t| t.emit.len()).max().unwrap_or(0)
    }

    /// Runs from `state` over `input`, returning the emitted word and the
    /// final state.
    pub fn run_from(&self, state: usize, input: &Word) -> (Word, usize) {
        let mut out = Word::empty();
        let mut s = state;
        for &b in input.bits() {
            let t = self.transition(s, b);
            out = out.concat(&t.emit);
            s = t.to;
        }
        (out, s)
    }

    /// Output emitted after consuming `input` from the initial state.
    pub fn evaluate(&self, input: &Word) -> Word {
        self.run_from(self.initial, input).0
    }

    /// `f^{-1}(A)` as a canonical clopen set.
    pub fn preimage(&self, target: &ClopenSet) -> ClopenSet {
        let mut memo = HashMap::new();
        self.preimage_from(self.initial, target, &mut memo)
    }

    fn preimage_from(
        &self,
        state: usize,
        target: &ClopenSet,
        memo: &mut HashMap<(usize, ClopenSet), ClopenSet>,
    ) -> ClopenSet {
        if target.is_empty() || target.is_whole() {
            return target.clone();
        }
        let key = (state, target.clone());
        if let Some(hit) = memo.get(&key) {
            return hit.clone();
        }
        let mut words = Vec::new();
        for bit in [false, true] {
            let t = self.transition(state, bit);
            let rest = target.quotient(&t.emit);
            let piece = self.preimage_from(t.to, &rest, memo);
            words.extend(piece.prefixed(&Word::from_bits(vec![bit])).into_words());
        }
        let result = ClopenSet::canonicalize(words);
        memo.insert(key, result.clone());
        result
    }

    /// `h = g ∘ f`, i.e. `h(x) = g(f(x))`. Each output word of `f` is fed to
    /// `g` eagerly, so the product needs no extra buffer.
    pub fn then(&self, g: &TransducerMap) -> TransducerMap {
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(self.initial, g.initial)];
        index.insert((self.initial, g.initial), 0);
        let mut delta: Vec<[Transition; 2]> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let step = |bit: bool, pairs: &mut Vec<(usize, usize)>, index: &mut HashMap<(usize, usize), usize>| {
                let tf = self.transition(p, bit);
                let (emit, q2) = g.run_from(q, &tf.emit);
                let key = (tf.to, q2);
                let to = *index.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    pairs.len() - 1
                });
                Transition { emit, to }
            };
            let t0 = step(false, &mut pairs, &mut index);
            let t1 = step(true, &mut pairs, &mut index);
            delta.push([t0, t1]);
            i += 1;
        }
        let names = pairs.iter().map(|&(p, q)| format!("{}|{}", self.names[p], g.names[q])).collect();
        TransducerMap::new(names, 0, delta).expect("composition of non-starving machines is non-starving")
    }

    pub fn identity() -> TransducerMap {
        let copy = [
            Transition { emit: Word::from_bits(vec![false]), to: 0 },
            Transition { emit: Word::from_bits(vec![true]), to: 0 },
        ];
        TransducerMap { names: vec!["copy".into()], initial: 0, delta: vec![copy] }
    }

    /// Cantor analogue of the tent map: `0x ↦ x` and `1x ↦ x̄`.
    pub fn fold() -> TransducerMap {
        let bit = |b: bool| Word::from_bits(vec![b]);
        let delta = vec![
            [Transition { emit: Word::empty(), to: 1 }, Transition { emit: Word::empty(), to: 2 }],
            [Transition { emit: bit(false), to: 1 }, Transition { emit: bit(true), to: 1 }],
            [Transition { emit: bit(true), to: 2 }, Transition { emit: bit(false), to: 2 }],
        ];
        TransducerMap::new(vec!["start".into(), "copy".into(), "flip".into()], 0, delta).expect("fold is well formed")
    }

    /// Flips the first coordinate and copies the rest.
    pub fn flip_first() -> TransducerMap {
        let bit = |b: bool| Word::from_bits(vec![b]);
        let delta = vec![
            [Transition { emit: bit(true), to: 1 }, Transition { emit: bit(false), to: 1 }],
            [Transition { emit: bit(false), to: 1 }, Transition { emit: bit(true), to: 1 }],
        ];
        TransducerMap::new(vec!["start".into(), "copy".into()], 0, delta).expect("well formed")
    }

    /// Every step emits `bit`; the image is a single point.
    pub fn constant(bit: bool) -> TransducerMap {
        let t = Transition { emit: Word::from_bits(vec![bit]), to: 0 };
        TransducerMap { names: vec!["const".into()], initial: 0, delta: vec![[t.clone(), t]] }
    }

    /// The one-sided shift `bx ↦ x`.
    pub fn shift() -> TransducerMap {
        let bit = |b: bool| Word::from_bits(vec![b]);
        let delta = vec![
            [Transition { emit: Word::empty(), to: 1 }, Transition { emit: Word::empty(), to: 1 }],
            [Transition { emit: bit(false), to: 1 }, Transition { emit: bit(true), to: 1 }],
        ];
        TransducerMap::new(vec!["start".into(), "copy".into()], 0, delta).expect("well formed")
    }

    /// Machine that reads a prefix from a complete prefix code and emits the
    /// matching output word, then copies. `rules` must have input words that
    /// partition the whole space; output words are unconstrained.
    pub fn from_rules(rules: &[(Word, Word)]) -> Result<TransducerMap> {
        let inputs = ClopenSet::canonicalize(rules.iter().map(|(u, _)| u.clone()));
        let mut ins: Vec<&Word> = rules.iter().map(|(u, _)| u).collect();
        ins.sort();
        if ins.windows(2).any(|p| p[0].is_prefix_of(p[1])) {
            return Err(Error::InvalidExchange("input words overlap".into()));
        }
        if !inputs.is_whole() {
            return Err(Error::AmbientNotWhole);
        }
        let lookup: HashMap<&Word, &Word> = rules.iter().map(|(u, v)| (u, v)).collect();

        // states: proper prefixes of the input words (trie nodes), then copy
        let mut nodes: Vec<Word> = vec![Word::empty()];
        let mut node_index: HashMap<Word, usize> = HashMap::from([(Word::empty(), 0)]);
        let mut i = 0;
        while i < nodes.len() {
            let u = nodes[i].clone();
            if !lookup.contains_key(&u) {
                for bit in [false, true] {
                    let c = u.child(bit);
                    if !lookup.contains_key(&c) && !node_index.contains_key(&c) {
                        node_index.insert(c.clone(), nodes.len());
                        nodes.push(c);
                    }
                }
            }
            i += 1;
        }
        let copy = nodes.len();
        let mut delta = Vec::with_capacity(copy + 1);
        for u in &nodes {
            let step = |bit: bool| {
                if let Some(out) = lookup.get(u) {
                    // only reachable for the single rule ε → out
                    return Transition { emit: out.child(bit), to: copy };
                }
                let c = u.child(bit);
                match lookup.get(&c) {
                    Some(out) => Transition { emit: (*out).clone(), to: copy },
                    None => Transition { emit: Word::empty(), to: node_index[&c] },
                }
            };
            delta.push([step(false), step(true)]);
        }
        delta.push([
            Transition { emit: Word::from_bits(vec![false]), to: copy },
            Transition { emit: Word::from_bits(vec![true]), to: copy },
        ]);
        let mut names: Vec<String> =
            nodes.iter().map(|u| if u.is_empty() { "root".to_string() } else { format!("read:{u}") }).collect();
        names.push("copy".into());
        TransducerMap::new(names, 0, delta)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum StateId {
    Num(u64),
    Name(String),
}

impl StateId {
    fn key(&self) -> String {
        match self {
            StateId::Num(n) => n.to_string(),
            StateId::Name(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TransitionRepr {
    from: StateId,
    bit: u8,
    emit: Word,
    to: StateId,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MapRepr {
    states: Vec<StateId>,
    initial: StateId,
    transitions: Vec<TransitionRepr>,
}

impl Serialize for TransducerMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let name = |i: usize| StateId::Name(self.names[i].clone());
        let transitions = self
            .delta
            .iter()
            .enumerate()
            .flat_map(|(from, ts)| {
                ts.iter().enumerate().map(move |(bit, t)| TransitionRepr {
                    from: name(from),
                    bit: bit as u8,
                    emit: t.emit.clone(),
                    to: name(t.to),
                })
            })
            .collect();
        MapRepr { states: (0..self.names.len()).map(name).collect(), initial: name(self.initial), transitions }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TransducerMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MapRepr::deserialize(d)?;
        let names: Vec<String> = repr.states.iter().map(StateId::key).collect();
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        if index.len() != names.len() {
            return Err(D::Error::custom("duplicate state name"));
        }
        let lookup = |id: &StateId| {
            index
                .get(id.key().as_str())
                .copied()
                .ok_or_else(|| D::Error::custom(format!("unknown state {:?}", id.key())))
        };
        let mut slots: Vec<[Option<Transition>; 2]> = vec![[None, None]; names.len()];
        for t in &repr.transitions {
            if t.bit > 1 {
                return Err(D::Error::custom(format!("bit must be 0 or 1, got {}", t.bit)));
            }
            let from = lookup(&t.from)?;
            let slot = &mut slots[from][t.bit as usize];
            if slot.is_some() {
                return Err(D::Error::custom(format!("duplicate transition from {:?} on {}", t.from.key(), t.bit)));
            }
            *slot = Some(Transition { emit: t.emit.clone(), to: lookup(&t.to)? });
        }
        let mut delta = Vec::with_capacity(names.len());
        for (i, [a, b]) in slots.into_iter().enumerate() {
            match (a, b) {
                (Some(a), Some(b)) => delta.push([a, b]),
                _ => return Err(D::Error::custom(format!("state {:?} lacks a transition", names[i]))),
            }
        }
        let initial = lookup(&repr.initial)?;
        TransducerMap::new(names, initial, delta).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::clopen;
    use crate::word::w;

    /// Brute-force preimage: depth-`d` inputs whose outputs decide membership.
    fn brute_preimage(f: &TransducerMap, a: &ClopenSet, d: usize) -> Option<ClopenSet> {
        let mut words = Vec::new();
        for x in Word::all_of_length(d) {
            if a.contains_point_prefix(&f.evaluate(&x))? {
                words.push(x);
            }
        }
        Some(ClopenSet::canonicalize(words))
    }

    #[test]
    fn fold_traces() {
        let f = TransducerMap::fold();
        assert_eq!(f.evaluate(&w("00")), w("0"));
        assert_eq!(f.evaluate(&w("10")), w("1"));
        assert_eq!(f.evaluate(&w("01")), w("1"));
        assert_eq!(f.evaluate(&w("1010")), w("101"));
        assert_eq!(TransducerMap::identity().evaluate(&w("0110")), w("0110"));
    }

    #[test]
    fn preimage_examples() {
        let f = TransducerMap::fold();
        assert_eq!(f.preimage(&clopen(&["0"])), clopen(&["00", "11"]));
        assert_eq!(f.preimage(&clopen(&["1"])), clopen(&["01", "10"]));
        assert_eq!(TransducerMap::identity().preimage(&clopen(&["01"])), clopen(&["01"]));
        assert_eq!(brute_preimage(&f, &clopen(&["0"]), 2), Some(clopen(&["00", "11"])));
        assert!(TransducerMap::constant(false).preimage(&clopen(&["1"])).is_empty());
        assert!(TransducerMap::constant(false).preimage(&clopen(&["0"])).is_whole());
    }

    #[test]
    fn rejects_silent_cycles_and_partial_tables() {
        let silent = vec![[Transition { emit: Word::empty(), to: 0 }, Transition { emit: w("1"), to: 0 }]];
        assert!(matches!(TransducerMap::new(vec!["s".into()], 0, silent), Err(Error::InvalidMap(_))));

        let json = r#"{"states":["a"],"initial":"a","transitions":[{"from":"a","bit":0,"emit":"0","to":"a"}]}"#;
        assert!(serde_json::from_str::<TransducerMap>(json).is_err());
    }

    #[test]
    fn prunes_unreachable_states() {
        let delta = vec![
            [Transition { emit: w("0"), to: 0 }, Transition { emit: w("1"), to: 0 }],
            [Transition { emit: Word::empty(), to: 1 }, Transition { emit: Word::empty(), to: 1 }],
        ];
        // state 1 has a silent loop but is unreachable
        let f = TransducerMap::new(vec!["a".into(), "dead".into()], 0, delta).unwrap();
        assert_eq!(f.state_count(), 1);
    }

    #[test]
    fn json_round_trip() {
        let f = TransducerMap::fold();
        let text = serde_json::to_string(&f).unwrap();
        let back: TransducerMap = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let numeric = r#"{"states":[0],"initial":0,"transitions":[{"from":0,"bit":0,"emit":"1","to":0},{"from":0,"bit":1,"emit":"0","to":0}]}"#;
        let g: TransducerMap = serde_json::from_str(numeric).unwrap();
        assert_eq!(g.evaluate(&w("001")), w("110"));
    }

    #[test]
    fn composition_examples() {
        let id = TransducerMap::identity();
        let fold = TransducerMap::fold();
        let flip = TransducerMap::flip_first();
        for x in Word::all_of_length(4) {
            assert_eq!(id.then(&fold).evaluate(&x), fold.evaluate(&x));
            assert_eq!(fold.then(&id).evaluate(&x), fold.evaluate(&x));
            assert_eq!(flip.then(&flip).evaluate(&x), x);
            // h(x) = fold(flip(x))
            let expect = fold.evaluate(&flip.evaluate(&x));
            assert_eq!(flip.then(&fold).evaluate(&x), expect);
        }
    }

    #[test]
    fn from_rules_builds_exchange() {
        let g = TransducerMap::from_rules(&[(w("0"), w("1")), (w("1"), w("0"))]).unwrap();
        assert_eq!(g.evaluate(&w("0110")), w("1110"));
        let id = TransducerMap::from_rules(&[(w(""), w(""))]).unwrap();
        assert_eq!(id.evaluate(&w("0110")), w("0110"));
        let shifted = TransducerMap::from_rules(&[(w(""), w("1"))]).unwrap();
        assert_eq!(shifted.evaluate(&w("00")), w("100"));
        assert_eq!(TransducerMap::from_rules(&[(w("0"), w("1"))]), Err(Error::AmbientNotWhole));
    }

    #[test]
    fn evaluate_is_monotone() {
        let maps = [TransducerMap::fold(), TransducerMap::flip_first(), TransducerMap::shift()];
        for f in &maps {
            for u in Word::all_up_to(6) {
                let out = f.evaluate(&u);
                for b in [false, true] {
                    assert!(out.is_prefix_of(&f.evaluate(&u.child(b))));
                }
            }
        }
    }
}
