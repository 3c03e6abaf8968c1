//! Simulation kernels for the hard-sphere model (a Poisson point process
//! conditioned on a pairwise exclusion distance) on bounded regions of R^d.
//!
//! The crate provides:
//!
//! * [`geometry`] — points, canonical configurations, sampling regions built
//!   from a box with balls carved out or intersected in, and the total order
//!   used to sequence thinning decisions;
//! * [`hardcore`] — the exclusion constraint, its Hamiltonian form, boundary
//!   conditions, and a packing bound on configuration size;
//! * [`sampling`] — seeded reproducible random streams, Poisson sampling on
//!   regions, and an exact rejection sampler used as ground truth;
//! * [`partition`] — acceptance probabilities, an exact one-dimensional
//!   partition-function oracle, and the thinning probability (a ratio of
//!   partition functions over the unexplored part of the domain);
//! * [`coupling`] — the dependent thinning from a dominating Poisson process
//!   to the hard-sphere model, and the recursive twisted coupling of two
//!   hard-sphere processes with differing boundary conditions under one
//!   dominating Poisson process;
//! * [`percolation`] — Gilbert-graph clustering, connection probabilities,
//!   spanning sweeps, and exponential decay fits;
//! * [`bounds`] — the table of critical-intensity and cluster-expansion
//!   constants the simulations are compared against.
//!
//! The crate is `no_std`-compatible (with `alloc`); the `std` feature, on by
//! default, only switches float math to the faster intrinsics.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bounds;
pub mod coupling;
pub mod error;
mod fmath;
pub mod geometry;
pub mod hardcore;
pub mod partition;
pub mod percolation;
pub mod sampling;

pub use error::{Error, Result};
pub use geometry::{Configuration, InteractionRadius, Point, Region};
pub use hardcore::BoundaryCondition;
pub use partition::{Estimate, Method, ThinningEstimator};
pub use sampling::{Intensity, RngStream};
