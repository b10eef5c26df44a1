//! Self-contained JSON certificates for homeomorphic approximations, and
//! their independent re-verification.

use serde::{Deserialize, Serialize};

use crate::clopen::ClopenSet;
use crate::error::Result;
use crate::good::{approx_measure_homeo, is_measure_preserving};
use crate::homeo::{approx_homeo_cells, Approximation, CellMatch};
use crate::maps::{
    injectivity_certificate, sup_distance, surjectivity_decide, Distance, Injectivity, PrefixExchange, Surjectivity,
    TransducerMap, DEFAULT_BUFFER_BOUND,
};
use crate::measure::{check_preserves, CylinderMeasure, Preservation};
use crate::rational::{dyadic, Rational};
use crate::word::Word;

/// How far past `n` the distance search looks.
pub const DISTANCE_SLACK: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub from: Word,
    pub to: Word,
    #[serde(with = "crate::rational::serde_str")]
    pub mu: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub nu: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureSection {
    pub mu: CylinderMeasure,
    pub nu: CylinderMeasure,
    /// `f` checked against `(μ, ν)` up to the approximation depth.
    pub map_preservation: Preservation,
    /// `g` checked against `(μ, ν)` one level past its deepest rule.
    pub exchange_preservation: Preservation,
    pub rules: Vec<RuleRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bijectivity {
    pub surjective: Surjectivity,
    pub injective: Injectivity,
}

/// `g` approximates `f` to within `2^(-depth)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomeoCertificate {
    pub map: TransducerMap,
    pub depth: usize,
    pub exchange: PrefixExchange,
    pub cells: Vec<CellMatch>,
    pub bijectivity: Bijectivity,
    pub distance: Distance,
    pub distance_depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSection>,
}

fn bijectivity_of(g: &TransducerMap) -> Bijectivity {
    Bijectivity { surjective: surjectivity_decide(g), injective: injectivity_certificate(g, DEFAULT_BUFFER_BOUND) }
}

fn assemble(
    f: &TransducerMap,
    n: usize,
    approx: Approximation,
    measure: Option<(&CylinderMeasure, &CylinderMeasure)>,
) -> Result<HomeoCertificate> {
    let g = approx.exchange.to_transducer()?;
    let distance_depth = n + DISTANCE_SLACK;
    let measure = measure.map(|(mu, nu)| MeasureSection {
        mu: mu.clone(),
        nu: nu.clone(),
        map_preservation: check_preserves(f, mu, nu, n),
        exchange_preservation: check_preserves(&g, mu, nu, approx.exchange.max_depth() + 1),
        rules: approx
            .exchange
            .rules()
            .iter()
            .map(|(u, v)| RuleRecord { from: u.clone(), to: v.clone(), mu: mu.weight(u), nu: nu.weight(v) })
            .collect(),
    });
    Ok(HomeoCertificate {
        map: f.clone(),
        depth: n,
        bijectivity: bijectivity_of(&g),
        distance: sup_distance(f, &g, distance_depth),
        distance_depth,
        exchange: approx.exchange,
        cells: approx.cells,
        measure,
    })
}

pub fn certify_homeo(f: &TransducerMap, n: usize) -> Result<HomeoCertificate> {
    assemble(f, n, approx_homeo_cells(f, n)?, None)
}

pub fn certify_measure_homeo(
    f: &TransducerMap,
    mu: &CylinderMeasure,
    nu: &CylinderMeasure,
    n: usize,
    budget: Option<usize>,
) -> Result<HomeoCertificate> {
    assemble(f, n, approx_measure_homeo(f, mu, nu, n, budget)?, Some((mu, nu)))
}

/// Recomputes every claim of `c` from its own contents. Returns the
/// discrepancies found; an empty list means the certificate holds.
pub fn verify(c: &HomeoCertificate) -> Vec<String> {
    let mut bad = Vec::new();
    let g = match c.exchange.to_transducer() {
        Ok(g) => g,
        Err(e) => return vec![format!("exchange is not a self-map of the whole space: {e}")],
    };
    if !c.exchange.is_self_map_of_whole() {
        bad.push("exchange does not cover the whole space on both sides".into());
    }
    let b = bijectivity_of(&g);
    if b != c.bijectivity {
        bad.push(format!("bijectivity claim {:?} differs from recomputed {:?}", c.bijectivity, b));
    }
    if b.surjective != Surjectivity::Surjective || !matches!(b.injective, Injectivity::Injective { .. }) {
        bad.push("exchange is not bijective".into());
    }

    let targets: Vec<Word> = c.cells.iter().map(|m| m.target.clone()).collect();
    if targets != Word::all_of_length(c.depth).collect::<Vec<_>>() {
        bad.push(format!("cells are not the depth-{} cylinders in order", c.depth));
    }
    let mut from_cells = Vec::new();
    for cell in &c.cells {
        let wanted = c.map.preimage(&ClopenSet::cylinder(cell.target.clone()));
        if wanted != cell.preimage {
            bad.push(format!("preimage of [{}] is {wanted}, certificate says {}", cell.target, cell.preimage));
        }
        let sources = ClopenSet::canonicalize(cell.rules.iter().map(|(u, _)| u.clone()));
        let images = ClopenSet::canonicalize(cell.rules.iter().map(|(_, v)| v.clone()));
        if sources != cell.preimage || images != ClopenSet::cylinder(cell.target.clone()) {
            bad.push(format!("rules of cell [{}] do not map its preimage onto it", cell.target));
        }
        from_cells.extend(cell.rules.iter().cloned());
    }
    from_cells.sort();
    if from_cells != c.exchange.sorted_rules() {
        bad.push("cell rules do not add up to the exchange".into());
    }

    let d = sup_distance(&c.map, &g, c.distance_depth);
    if d != c.distance {
        bad.push(format!("distance claim {:?} differs from recomputed {:?}", c.distance, d));
    }
    if d.value() > &dyadic(c.depth) {
        bad.push(format!("distance {} exceeds 2^-{}", d.value(), c.depth));
    }

    if let Some(m) = &c.measure {
        let (mu, nu) = (&m.mu, &m.nu);
        let records: Vec<(Word, Word)> = m.rules.iter().map(|r| (r.from.clone(), r.to.clone())).collect();
        if records != c.exchange.rules() {
            bad.push("measure records do not list the exchange rules".into());
        }
        for r in &m.rules {
            let (a, b) = (mu.weight(&r.from), nu.weight(&r.to));
            if a != r.mu || b != r.nu || a != b {
                bad.push(format!("rule {} -> {}: weights {a} and {b}, recorded {} and {}", r.from, r.to, r.mu, r.nu));
            }
            if !mu.same_tail(&r.from, nu, &r.to) {
                bad.push(format!("rule {} -> {} joins different conditional laws", r.from, r.to));
            }
        }
        if !is_measure_preserving(&c.exchange, mu, nu) {
            bad.push("exchange is not measure-preserving".into());
        }
        let fp = check_preserves(&c.map, mu, nu, c.depth);
        if fp != m.map_preservation || !matches!(fp, Preservation::Preserved { .. }) {
            bad.push(format!("map preservation recomputes to {fp:?}"));
        }
        let gp = check_preserves(&g, mu, nu, c.exchange.max_depth() + 1);
        if gp != m.exchange_preservation || !matches!(gp, Preservation::Preserved { .. }) {
            bad.push(format!("exchange preservation recomputes to {gp:?}"));
        }
    }
    bad
}
