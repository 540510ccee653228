//! Total-variation bounds between a distribution `nu` and a reference `mu`
//! when `nu` is log-concave relative to `mu`.
//!
//! [`relbound`] holds the two-sided bound at an anchor `l` and the
//! certificate machinery. The family modules ([`sums`], [`matroids`],
//! [`intrinsic`], [`compound`], [`continuous`]) build matched targets and
//! their closed-form bounds, and every report carries an oracle distance
//! computed independently (exact rationals, full-support sums or quadrature).
//! [`sweep`] runs randomized dominance checks, on rayon when the `parallel`
//! feature is on.

pub mod compound;
pub mod continuous;
pub mod dist;
pub mod error;
pub mod exact;
pub mod intrinsic;
pub mod logconcave;
pub mod matroids;
pub mod numeric;
pub mod relbound;
pub mod sums;
pub mod sweep;

pub use error::{Error, Result};
