//! Continuous self-maps of the Cantor space as finite transducers.

mod distance;
mod exchange;
mod injectivity;
mod surjectivity;
mod transducer;

pub use distance::{sup_distance, Distance};
pub use exchange::PrefixExchange;
pub use injectivity::{
    injectivity_certificate, verify_collision, CollisionWitness, Injectivity, Separation, DEFAULT_BUFFER_BOUND,
};
pub use surjectivity::{surjectivity_decide, Surjectivity};
pub use transducer::{TransducerMap, Transition};

/// `h(x) = g(f(x))`.
pub fn compose(f: &TransducerMap, g: &TransducerMap) -> TransducerMap {
    f.then(g)
}
