//! Simulation and numerical-analysis toolkit for the low-temperature
//! random-cluster model on trees, treelike graphs, and random regular graphs.
//!
//! The crate is organized around six subsystems:
//!
//! - [`topology`]: the graph families (d-ary and Delta-regular trees,
//!   almost-regular variants, unicyclic graphs, configuration-model random
//!   regular graphs), BFS balls and subtrees;
//! - [`boundary`]: boundary conditions as partitions of a boundary vertex
//!   set, with free/wired/theta-wired constructors and induced conditions;
//! - [`oracle`]: exact ground truth by exhaustive enumeration on small
//!   instances — partition functions, event probabilities, z-splits,
//!   total-variation distances, spectral gaps;
//! - [`recursion`]: the tree message recursion, thresholds and fixed points,
//!   the weak-spatial-mixing rate, and the cycle-gadget update;
//! - [`dynamics`]: single-edge heat-bath Glauber steps with the cut-edge
//!   rule, monotone grand couplings with censoring, an exact two-pass tree
//!   sampler, and block heat-bath updates;
//! - [`percolation`]: Bernoulli edge percolation, component statistics,
//!   branching-process survival, and ball boundary profiles on random
//!   regular graphs.

pub mod boundary;
pub mod configuration;
pub mod dynamics;
pub mod error;
pub mod oracle;
pub mod params;
pub mod percolation;
pub mod recursion;
pub mod rng;
pub mod stats;
pub mod topology;
pub mod unionfind;

pub use configuration::Configuration;
pub use error::{Error, Result};
pub use params::RCParams;
