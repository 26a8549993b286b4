//! Simulation and analysis toolkit for driven boson sampling.
//!
//! Photons from heralded parametric down-conversion sources are injected at
//! any of the `k·m` links of a layered beam-splitter network, which then feeds
//! an `m`-mode Haar-random unitary. The crate covers:
//!
//! - [`linalg`]: dense complex matrices, Ryser permanents, Haar unitaries;
//! - [`network`]: coupling layers, the blocks `B_q` and the `m × k·m`
//!   evolution matrix;
//! - [`fock`]: exact permanent-based output distributions and sampling;
//! - [`source`]: PDC statistics, success probabilities, optimal squeezing,
//!   heralding SNR and the unit-SNR bounds;
//! - [`montecarlo`]: shot-level simulation of the heralded sources;
//! - [`diagnostics`]: Kolmogorov–Smirnov checks of submatrix entries;
//! - [`cli`]: the experiment manifests and figure-data commands behind the
//!   `dbsim` binary.
//!
//! Runnable walkthroughs live in `examples/`, one per capability.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod montecarlo;
pub mod network;
pub mod rng;
pub mod source;

pub use error::{Error, Result};
pub use fock::{full_distribution, outcome_weight, sample_outcomes, OccupationVector, OutcomeDistribution};
pub use linalg::{gram_matrix, haar_unitary, permanent_naive, permanent_ryser, ComplexAmplitudeMatrix};
pub use network::{
    block, coupling_matrix, evolution_matrix, random_network, submatrix, EvolutionMatrix, GenerationNetwork,
};
pub use rng::RandomSeed;
pub use source::{PdcSource, Scheme, SchemeParams};
