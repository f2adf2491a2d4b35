//! Simulation of replicated, fork-join and deferred-replication systems.
//!
//! Systems whose dynamics reduce to a single FIFO queue per batch are run
//! through Lindley-type recursions; dispatching policies with per-server
//! queues run on a discrete-event engine.

mod empirical;
mod engine;
mod events;
mod fjr;
mod recursion;
mod result;

use std::fmt;

use rand::SeedableRng;
use rand_pcg::Pcg64Mcg;

pub use empirical::{empirical_ccdf, empirical_quantile, ks_distance};
pub use engine::simulate_event_driven;
pub use events::EventQueue;
pub use fjr::fjr_job_services;
pub use recursion::fork_join_job_services;
pub use result::{SimResult, Summary};

use crate::dist::{ArrivalProcess, ReplicaModel};
use crate::error::{invalid, Result};
use crate::stability::check_factor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    /// Jobs go round-robin to `K/k` groups of `k` servers; every server of
    /// the group runs a replica.
    ReplicatedBatches,
    /// Uniformly random server, no replication.
    Random,
    /// Server `i mod K`, no replication.
    RoundRobin,
    /// One FIFO queue; the lowest-indexed idle server takes the head job.
    CentralQueue,
    /// Blocking fork-join: a job's `K` tasks start together and the next
    /// job waits until all of them are done.
    ForkJoin,
    /// Fork-join where idle servers replicate still-running tasks.
    ForkJoinReplication,
    /// Two servers; a replica starts on server 2 once the original has run
    /// for `offset` time units.
    Deferred { offset: f64 },
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::ReplicatedBatches => "replicated",
            Policy::Random => "random",
            Policy::RoundRobin => "round_robin",
            Policy::CentralQueue => "central_queue",
            Policy::ForkJoin => "fork_join",
            Policy::ForkJoinReplication => "fjr",
            Policy::Deferred { .. } => "deferred",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Deferred { offset } => write!(f, "deferred(offset={offset})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purging {
    /// Sibling replicas are cancelled when the first one finishes.
    Purging,
    /// Every replica runs to completion.
    NonPurging,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub servers: usize,
    pub replicas: usize,
    pub arrivals: ArrivalProcess,
    pub service: ReplicaModel,
    pub policy: Policy,
    pub purging: Purging,
    pub n_jobs: usize,
    pub seed: u64,
    pub warmup_fraction: f64,
    /// Keep every response time in arrival order, warm-up included.
    pub record_trace: bool,
}

impl SystemConfig {
    pub fn new(
        servers: usize,
        replicas: usize,
        arrivals: ArrivalProcess,
        service: impl Into<ReplicaModel>,
        policy: Policy,
    ) -> Self {
        Self {
            servers,
            replicas,
            arrivals,
            service: service.into(),
            policy,
            purging: Purging::Purging,
            n_jobs: 100_000,
            seed: 1,
            warmup_fraction: 0.01,
            record_trace: false,
        }
    }

    pub fn with_jobs(mut self, n_jobs: usize) -> Self {
        self.n_jobs = n_jobs;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_warmup(mut self, warmup_fraction: f64) -> Self {
        self.warmup_fraction = warmup_fraction;
        self
    }

    pub fn with_purging(mut self, purging: Purging) -> Self {
        self.purging = purging;
        self
    }

    pub fn with_trace(mut self, record_trace: bool) -> Self {
        self.record_trace = record_trace;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_factor(self.servers, self.replicas)?;
        if self.n_jobs == 0 {
            return Err(invalid("at least one job is required"));
        }
        if !(0.0..=0.5).contains(&self.warmup_fraction) {
            return Err(invalid(format!("warm-up fraction must lie in [0, 0.5], got {}", self.warmup_fraction)));
        }
        match self.policy {
            Policy::Random | Policy::RoundRobin | Policy::CentralQueue if self.replicas != 1 => {
                Err(invalid(format!("policy {} does not replicate; use k = 1", self.policy)))
            }
            Policy::Deferred { offset } if !(offset >= 0.0) => {
                Err(invalid(format!("replication offset must be >= 0, got {offset}")))
            }
            Policy::Deferred { .. } if self.servers != 2 => {
                Err(invalid("deferred replication runs on exactly two servers"))
            }
            _ => Ok(()),
        }
    }

    /// Number of jobs discarded as warm-up.
    pub fn warmup_jobs(&self) -> usize {
        (self.n_jobs as f64 * self.warmup_fraction).round() as usize
    }

    pub(crate) fn rng(&self) -> Pcg64Mcg {
        Pcg64Mcg::seed_from_u64(self.seed)
    }
}

impl fmt::Display for SystemConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "policy={} K={} k={} arrivals={} service={} purging={} n_jobs={} seed={} warmup={}",
            self.policy,
            self.servers,
            self.replicas,
            self.arrivals,
            self.service,
            matches!(self.purging, Purging::Purging),
            self.n_jobs,
            self.seed,
            self.warmup_fraction
        )
    }
}

/// Runs the configured system.
pub fn simulate(cfg: &SystemConfig) -> Result<SimResult> {
    cfg.validate()?;
    match cfg.policy {
        Policy::ReplicatedBatches => Ok(recursion::replicated(cfg)),
        Policy::Random | Policy::RoundRobin | Policy::CentralQueue => Ok(engine::run(cfg)),
        Policy::ForkJoin => Ok(recursion::fork_join(cfg)),
        Policy::ForkJoinReplication => Ok(fjr::run(cfg)),
        Policy::Deferred { offset } => Ok(recursion::deferred(cfg, offset)),
    }
}

/// Recursion-based run of the replicated-batch system.
pub fn simulate_replicated(cfg: &SystemConfig) -> Result<SimResult> {
    expect_policy(cfg, matches!(cfg.policy, Policy::ReplicatedBatches))?;
    simulate(cfg)
}

pub fn simulate_policies(cfg: &SystemConfig) -> Result<SimResult> {
    expect_policy(cfg, matches!(cfg.policy, Policy::Random | Policy::RoundRobin | Policy::CentralQueue))?;
    simulate(cfg)
}

pub fn simulate_nonpurging(cfg: &SystemConfig) -> Result<SimResult> {
    expect_policy(cfg, matches!(cfg.policy, Policy::ReplicatedBatches))?;
    simulate(&cfg.clone().with_purging(Purging::NonPurging))
}

pub fn simulate_fork_join(cfg: &SystemConfig) -> Result<SimResult> {
    expect_policy(cfg, matches!(cfg.policy, Policy::ForkJoin))?;
    simulate(cfg)
}

pub fn simulate_fjr(cfg: &SystemConfig) -> Result<SimResult> {
    expect_policy(cfg, matches!(cfg.policy, Policy::ForkJoinReplication))?;
    simulate(cfg)
}

pub fn simulate_deferred(cfg: &SystemConfig) -> Result<SimResult> {
    expect_policy(cfg, matches!(cfg.policy, Policy::Deferred { .. }))?;
    simulate(cfg)
}

fn expect_policy(cfg: &SystemConfig, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(invalid(format!("policy {} is not handled by this entry point", cfg.policy)))
    }
}
