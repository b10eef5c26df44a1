//! The clopen measure algebra: its metric, interval realizations, and
//! matched towers approximating algebra isomorphisms.

mod interval;
mod matched;
mod tower;

use crate::clopen::ClopenSet;
use crate::measure::CylinderMeasure;
use crate::rational::Rational;

pub use interval::IntervalSet;
pub use matched::{
    algebra_pullback, approx_algebra_iso, evaluate_matched_tower, tower_distance, Evaluation, MatchedCell,
    MatchedLevel, MatchedTower,
};
pub use tower::{caratheodory_tower, generating_sequence, interval_realize, RealizationTower, TowerCell, TowerLevel};

/// `d(A, B) = μ(A + B)`.
pub fn boolean_distance(m: &CylinderMeasure, a: &ClopenSet, b: &ClopenSet) -> Rational {
    m.clopen_measure(&a.boolean_sum(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::clopen;
    use crate::maps::TransducerMap;
    use crate::rational::ratio;
    use proptest::prelude::*;

    #[test]
    fn distance_examples() {
        let m = CylinderMeasure::bernoulli(ratio(1, 2)).unwrap();
        assert_eq!(boolean_distance(&m, &clopen(&["0"]), &clopen(&["00"])), ratio(1, 4));
        assert_eq!(boolean_distance(&m, &clopen(&["0"]), &clopen(&["0"])), ratio(0, 1));
        assert_eq!(boolean_distance(&m, &clopen(&["0"]), &clopen(&["1"])), ratio(1, 1));
    }

    #[test]
    fn pullback_examples() {
        assert_eq!(algebra_pullback(&TransducerMap::identity(), &clopen(&["01"])), clopen(&["01"]));
        assert_eq!(algebra_pullback(&TransducerMap::fold(), &clopen(&["0"])), clopen(&["00", "11"]));
        assert!(algebra_pullback(&TransducerMap::fold(), &ClopenSet::whole()).is_whole());
    }

    fn arb_set() -> impl Strategy<Value = ClopenSet> {
        prop::collection::vec(prop::collection::vec(any::<bool>(), 0..6).prop_map(crate::word::Word::from_bits), 0..5)
            .prop_map(ClopenSet::canonicalize)
    }

    proptest! {
        #[test]
        fn pseudometric(a in arb_set(), b in arb_set(), c in arb_set()) {
            let m = CylinderMeasure::bernoulli(ratio(1, 3)).unwrap();
            prop_assert_eq!(boolean_distance(&m, &a, &b), boolean_distance(&m, &b, &a));
            prop_assert!(boolean_distance(&m, &a, &c) <= boolean_distance(&m, &a, &b) + boolean_distance(&m, &b, &c));
        }

        #[test]
        fn pullback_is_a_boolean_homomorphism(a in arb_set(), b in arb_set()) {
            let f = TransducerMap::fold();
            prop_assert_eq!(f.preimage(&a.union(&b)), f.preimage(&a).union(&f.preimage(&b)));
            prop_assert_eq!(f.preimage(&a.complement()), f.preimage(&a).complement());
        }
    }
}
