use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::maps::TransducerMap;
use crate::word::Word;

/// A finite matching of input cylinders onto output cylinders, denoting the
/// homeomorphism `u·z ↦ v·z` from the union of the inputs onto the union of
/// the outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixExchange {
    rules: Vec<(Word, Word)>,
    source: ClopenSet,
    target: ClopenSet,
}

fn check_disjoint<'a, I: Iterator<Item = &'a Word>>(words: I, side: &str) -> Result<()> {
    let mut ws: Vec<&Word> = words.collect();
    ws.sort();
    match ws.windows(2).find(|p| p[0].is_prefix_of(p[1])) {
        Some(p) => Err(Error::InvalidExchange(format!("{side} cylinders [{}] and [{}] overlap", p[0], p[1]))),
        None => Ok(()),
    }
}

impl PrefixExchange {
    pub fn new(rules: Vec<(Word, Word)>) -> Result<Self> {
        check_disjoint(rules.iter().map(|(u, _)| u), "input")?;
        check_disjoint(rules.iter().map(|(_, v)| v), "output")?;
        let source = ClopenSet::canonicalize(rules.iter().map(|(u, _)| u.clone()));
        let target = ClopenSet::canonicalize(rules.iter().map(|(_, v)| v.clone()));
        Ok(PrefixExchange { rules, source, target })
    }

    pub fn identity() -> Self {
        PrefixExchange::new(vec![(Word::empty(), Word::empty())]).expect("valid")
    }

    pub fn rules(&self) -> &[(Word, Word)] {
        &self.rules
    }

    pub fn sorted_rules(&self) -> Vec<(Word, Word)> {
        let mut r = self.rules.clone();
        r.sort();
        r
    }

    pub fn source(&self) -> &ClopenSet {
        &self.source
    }

    pub fn target(&self) -> &ClopenSet {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Longest word on either side of any rule.
    pub fn max_depth(&self) -> usize {
        self.rules.iter().map(|(u, v)| u.len().max(v.len())).max().unwrap_or(0)
    }

    pub fn is_self_map_of_whole(&self) -> bool {
        self.source.is_whole() && self.target.is_whole()
    }

    /// Image of the point with prefix `x`; `None` if `x` is shorter than
    /// its rule or lies outside the source.
    pub fn apply(&self, x: &Word) -> Option<Word> {
        self.rules.iter().find(|(u, _)| u.is_prefix_of(x)).map(|(u, v)| v.concat(&x.suffix_from(u.len())))
    }

    pub fn inverse(&self) -> PrefixExchange {
        PrefixExchange {
            rules: self.rules.iter().map(|(u, v)| (v.clone(), u.clone())).collect(),
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }

    /// Concatenates two exchanges with disjoint sources and disjoint targets.
    pub fn join(&self, other: &PrefixExchange) -> Result<PrefixExchange> {
        PrefixExchange::new(self.rules.iter().chain(&other.rules).cloned().collect())
    }

    /// Image of a clopen subset of the source.
    pub fn image(&self, a: &ClopenSet) -> ClopenSet {
        let mut words = Vec::new();
        for (u, v) in &self.rules {
            words.extend(a.quotient(u).prefixed(v).into_words());
        }
        ClopenSet::canonicalize(words)
    }

    /// Transducer computing the same self-map of the whole space.
    pub fn to_transducer(&self) -> Result<TransducerMap> {
        if !self.is_self_map_of_whole() {
            return Err(Error::AmbientNotWhole);
        }
        TransducerMap::from_rules(&self.rules)
    }
}

#[derive(Serialize, Deserialize)]
struct ExchangeRepr {
    rules: Vec<(Word, Word)>,
}

impl Serialize for PrefixExchange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExchangeRepr { rules: self.rules.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrefixExchange {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ExchangeRepr::deserialize(d)?;
        PrefixExchange::new(repr.rules).map_err(serde::de::Error::custom)
    }
}
