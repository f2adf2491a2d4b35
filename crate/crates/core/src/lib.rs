//! Tail bounds, stability analysis and simulation for task replication in
//! parallel queueing systems.
//!
//! Jobs arrive to `K` servers; each task is replicated onto `k` of them and
//! the first replica to finish wins. [`bounds`] gives exponential upper
//! bounds `P(r ≥ σ) ≤ C·e^{-θσ}` on the steady-state response time,
//! [`stability`] the load at which the system stays stable and the best
//! replication factor, and [`sim`] simulates every model to check them.
//!
//! ```
//! use replibound_core::bounds::theta;
//! use replibound_core::sim::simulate;
//! use replibound_core::{ArrivalProcess, Distribution, Policy, ReplicationSpec, SystemConfig};
//!
//! # fn main() -> replibound_core::Result<()> {
//! let service = Distribution::exponential(1.0)?;
//! let arrivals = ArrivalProcess::poisson(3.0)?;
//!
//! let bound = theta(&ReplicationSpec::new(4, 2, service.clone(), arrivals.clone())?)?;
//! let run = simulate(
//!     &SystemConfig::new(4, 2, arrivals, service, Policy::ReplicatedBatches)
//!         .with_jobs(200_000)
//!         .with_seed(7),
//! )?;
//! assert!(run.ccdf(5.0) <= bound.ccdf(5.0)?);
//! # Ok(())
//! # }
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;

pub mod bounds;
pub mod dist;
pub mod quad;
pub mod scenarios;
pub mod sim;
pub mod stability;

pub use bounds::{BoundResult, Regime};
pub use dist::{ArrivalProcess, Distribution, ReplicaModel};
pub use error::{Error, Result};
pub use sim::{Policy, Purging, SimResult, SystemConfig};
pub use stability::ReplicationSpec;
