//! Generic reachable-subspace dimensions of temporal continuous-time linear
//! networks, bounded from sparsity patterns and measured on random realizations.
//!
//! A temporal network runs `N` linear subsystems `(A_i, B_i)` one after the
//! other. The crate provides:
//!
//! * upper bounds from vertex-disjoint linkings in the cascaded dynamic graph
//!   ([`cdg`]) and the multi-layer dynamic graph ([`mdg`]),
//! * lower bounds from cactus covers ([`cactus`]),
//! * a Monte Carlo oracle over random realizations ([`oracle`]),
//! * switching-path search and switched-system bounds ([`switched`]).

pub mod analysis;
pub mod cactus;
pub mod cdg;
pub mod error;
pub mod fixtures;
pub mod graphkit;
pub mod io;
pub mod mdg;
pub mod model;
pub mod oracle;
pub mod switched;

pub use error::{Error, Result};
pub use model::{
    augment_dedicated_inputs, reverse_temporal_order, sample_realization, stcp_embedding,
    validate_network, Realization, SamplingConfig, SparsityPattern, StructuredPair, SwitchingPath,
    TargetSpec, TemporalNetwork, ValidationReport,
};
