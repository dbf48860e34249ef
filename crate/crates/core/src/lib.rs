//! Grid-supporting microgrid energy management.
//!
//! The crate runs a rolling-horizon economic dispatch over a small microgrid
//! (diesel generators, battery storage, curtailable wind, rooftop PV and a
//! tie-line to the main grid) and then, for the committed interval, computes
//! the range of tie-line trading power the microgrid can accept when each
//! adjustable resource is released by a fraction `alpha` of its capacity
//! around its dispatch target. The result is a [`flexband::DataPackage`]
//! offered to the grid operator.
//!
//! Everything is solved by the in-crate [`lp`] simplex and the [`milp`]
//! branch-and-bound on top of it; no external solver is required.
//!
//! Sign convention throughout: trading power is `buy - sell`, so positive
//! values are imports from the main grid.

pub mod dispatch;
pub mod error;
pub mod flexband;
pub mod ingest;
pub mod lp;
pub mod milp;
pub mod model;
pub mod par;

pub use error::{Error, Result};
pub use par::ExecMode;
