//! Node-LDP release of a graph's degree sequence.
//!
//! Pipeline per run:
//!
//! 1. the collector picks a projection threshold θ from masked sums
//!    ([`theta`], on top of [`secagg`]);
//! 2. every node samples a coarse degree order ([`ndoe`]) and shares it with
//!    its neighbors;
//! 3. nodes bound their degree to θ by negotiated edge addition
//!    ([`projection`]);
//! 4. every node reports its projected degree plus Laplace noise
//!    ([`release`]).
//!
//! With budget ε and allocation α, steps 2 and 3 each spend αε/2 and step 4
//! spends (1 − α)ε. [`harness`] runs the whole thing over many trials and
//! writes CSV.

pub mod error;
pub mod graph;
pub mod harness;
pub mod mech;
pub mod metrics;
pub mod ndoe;
pub mod projection;
pub mod release;
pub mod secagg;
pub mod seed;
pub mod synth;
pub mod theta;

pub use error::{Error, Result};
pub use graph::{load_edge_list, load_edge_list_str, Graph, GraphStats};
pub use mech::PrivacyParams;
pub use projection::{ProjectedGraph, ProjectionConfig, Strategy};
