//! Coded multicasting for shared-link caching networks.
//!
//! The pipeline is: a [`model::DemandDistribution`] and a
//! [`model::CachingDistribution`] drive a random cache placement
//! ([`placement`]); a sampled demand vector and the placement define the
//! index-coding conflict graph ([`conflict_graph`]); a proper coloring of
//! that graph ([`gcc`], [`grasp`]) is turned into XOR codewords
//! ([`delivery`]), one transmission per color. [`bound`] evaluates the
//! large-packetization rate bound used to pick the caching distribution and
//! [`simulator`] runs the Monte Carlo sweeps.

pub mod bound;
pub mod coloring;
pub mod conflict_graph;
pub mod delivery;
mod error;
pub mod gcc;
pub mod graph;
pub mod grasp;
pub mod model;
pub mod oracle;
pub mod placement;
pub mod rng;
pub mod simulator;

pub use coloring::Coloring;
pub use conflict_graph::{ConflictGraph, UserSet, Vertex};
pub use error::{Error, Result};
pub use graph::Graph;
pub use model::{
    CachingDistribution, DemandDistribution, DemandVector, PacketId, RateSample, SystemConfig,
};
pub use placement::CachePlacement;
