//! Outage probability and throughput of full-duplex cellular networks whose
//! base stations and users carry sectorized directional antennas.
//!
//! Every quantity is available two ways: by numerically evaluating the
//! stochastic-geometry expressions ([`analytic`], [`composite`]) and by Monte
//! Carlo simulation of Poisson networks ([`montecarlo`]). The crate is
//! `no_std` and only needs `alloc`; IO, configuration files and parallel
//! drivers live in the `duplexnet` companion crate.

#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

mod error;
pub(crate) mod math;

pub mod analytic;
pub mod composite;
pub mod model;
pub mod montecarlo;
pub mod specfun;

pub use analytic::{Method, OutageEstimate, Scenario};
pub use error::Error;
pub use model::{AntennaSystem, NetworkConfig, NodeKind, SuppressionMode, ThinningTable};
pub use specfun::{QuadratureError, QuadratureSpec};
