//! Exact computations on the binary Cantor space `C = {0,1}^N`.
//!
//! * [`clopen`] and [`partition`]: the clopen algebra in canonical form.
//! * [`maps`]: continuous maps as non-starving transducers, prefix exchanges,
//!   uniform distance, and surjectivity / injectivity certificates.
//! * [`homeo`]: homeomorphisms between clopen sets and homeomorphic
//!   approximation of surjections.
//! * [`measure`]: full nonatomic measures given by exact cylinder weights.
//! * [`algebra`]: interval realizations of the clopen measure algebra and
//!   matched towers approximating measure algebra maps.
//! * [`good`]: clopen values sets, subset-condition search, and
//!   measure-preserving homeomorphisms.
//! * [`cert`] and [`cli`]: JSON certificates and the `cantor` command.

pub mod algebra;
pub mod cert;
pub mod cli;
pub mod clopen;
pub mod error;
pub mod good;
pub mod homeo;
pub mod maps;
pub mod measure;
pub mod partition;
pub mod rational;
pub mod word;

pub use clopen::{BoolOp, ClopenSet};
pub use error::{Error, Result};
pub use maps::{PrefixExchange, TransducerMap};
pub use measure::CylinderMeasure;
pub use partition::ClopenPartition;
pub use rational::Rational;
pub use word::Word;
