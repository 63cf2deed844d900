//! Consensus-weight design and analysis for star-family sensor networks.
//!
//! The crate covers three star families (symmetric, complete-cored and
//! k-cored) and arbitrary connected graphs:
//!
//! * [`topology`] builds the graphs with their edge-orbit (stratum) labels,
//! * [`weights`] produces the closed-form optimal weights and the usual
//!   heuristic schemes and assembles the weight matrix,
//! * [`spectral`] computes spectra, the SLEM, the two-block reduction of the
//!   symmetric star and the characteristic-equation roots,
//! * [`optimality`] checks the closed forms independently (dual certificate
//!   residuals and a numerical SLEM minimizer),
//! * [`simulate`] runs exact and quantized consensus iterations and seeded
//!   Monte Carlo batches.
//!
//! [`experiments`] and [`verify`] bundle these into the reference tables,
//! figures and property suites exposed by the `starcons` binary.

pub mod error;
pub mod experiments;
pub mod linalg;
pub mod optimality;
pub mod reference;
pub mod simulate;
pub mod spectral;
pub mod topology;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use topology::{Graph, Topology};
pub use weights::{WeightAssignment, WeightMatrix, Weighting};
