//! Parameter sets of the reference experiments, shared by the command-line
//! figure generator, the benches and the acceptance checks.

use crate::bounds::{harmonic, DeferredConfig, Regime};
use crate::dist::{ArrivalProcess, Distribution, ReplicaModel};
use crate::error::{invalid, Result};
use crate::sim::{Policy, SystemConfig};
use crate::stability::ReplicationSpec;

/// Servers in the replication scenarios.
pub const SERVERS: usize = 4;
/// Per-server load `ρ = λ/(Kμ)` of the replication scenarios.
pub const LOAD: f64 = 0.75;
/// Correlation degree of the correlated replication scenarios.
pub const CORRELATION: f64 = 0.5;
/// Tail probability behind every reported "99th percentile".
pub const EPSILON: f64 = 0.01;
/// Replication factors compared in the replication scenarios.
pub const FACTORS: [usize; 3] = [1, 2, 4];

/// Two-state chain with mean interarrival 1/3.
pub const MARKOV_P: f64 = 0.1;
pub const MARKOV_ACTIVE: f64 = 30.0;
pub const MARKOV_INACTIVE: f64 = 0.3;

/// Arrival and service rates of the two-server deferred-replication model.
pub const DEFERRED_LAMBDA: f64 = 0.75;
pub const DEFERRED_MU: f64 = 1.0;
pub const DEFERRED_CORRELATIONS: [f64; 2] = [0.25, 0.75];

/// Replica rate `δk + (1−δ)` under which the mean of the fastest of `k`
/// correlated Exp replicas is `1/k`, i.e. replication leaves the load unchanged.
pub fn scaled_rate(delta: f64, k: usize) -> f64 {
    delta * k as f64 + (1.0 - delta)
}

pub fn poisson_arrivals() -> ArrivalProcess {
    ArrivalProcess::poisson(SERVERS as f64 * LOAD).expect("positive rate")
}

pub fn markov_arrivals() -> ArrivalProcess {
    ArrivalProcess::mmpp(MARKOV_P, MARKOV_ACTIVE, MARKOV_INACTIVE).expect("valid chain")
}

/// Correlated Exp replicas with both components at rate [`scaled_rate`].
pub fn correlated_service(delta: f64, k: usize) -> Result<ReplicaModel> {
    let mu = scaled_rate(delta, k);
    ReplicaModel::correlated(delta, Distribution::exponential(mu)?, Distribution::exponential(mu)?)
}

/// `K = 4`, `ρ = 0.75` replication scenario for one of the four
/// replicated-batch regimes.
pub fn replication_spec(regime: Regime, k: usize) -> Result<ReplicationSpec> {
    let exp1 = Distribution::exponential(1.0)?;
    let (service, arrivals) = match regime {
        Regime::Ind => (ReplicaModel::from(exp1), poisson_arrivals()),
        Regime::Cor => (correlated_service(CORRELATION, k)?, poisson_arrivals()),
        Regime::Mkv => (ReplicaModel::from(exp1), markov_arrivals()),
        Regime::MkvCor => (correlated_service(CORRELATION, k)?, markov_arrivals()),
        other => return Err(invalid(format!("no replication scenario for regime {other}"))),
    };
    ReplicationSpec::new(SERVERS, k, service, arrivals)
}

/// Simulation of [`replication_spec`] with replicated batches and purging.
pub fn replication_config(regime: Regime, k: usize, n_jobs: usize, seed: u64) -> Result<SystemConfig> {
    let spec = replication_spec(regime, k)?;
    Ok(SystemConfig::new(SERVERS, k, spec.arrivals, spec.service, Policy::ReplicatedBatches)
        .with_jobs(n_jobs)
        .with_seed(seed))
}

/// Pareto(1.1) service, Poisson(1) arrivals on four servers: overloaded
/// for `k = 1` and `k = 4`, stable for `k = 2`.
pub fn overload_spec(k: usize) -> Result<ReplicationSpec> {
    ReplicationSpec::new(SERVERS, k, Distribution::pareto(1.1)?, ArrivalProcess::poisson(1.0)?)
}

/// Trace run of [`overload_spec`], started empty and without warm-up.
pub fn overload_config(k: usize, n_jobs: usize, seed: u64) -> Result<SystemConfig> {
    let spec = overload_spec(k)?;
    Ok(SystemConfig::new(SERVERS, k, spec.arrivals, spec.service, Policy::ReplicatedBatches)
        .with_jobs(n_jobs)
        .with_seed(seed)
        .with_warmup(0.0)
        .with_trace(true))
}

/// Fork-join comparison across `K`: each job carries one unit of Exp work
/// split over `K` tasks (task rate `K`), and λ = 0.75 for every `K`.
pub const FORK_JOIN_LAMBDA: f64 = 0.75;
pub const FORK_JOIN_SERVERS: [usize; 5] = [1, 2, 4, 8, 16];

pub fn fork_join_task_rate(servers: usize) -> f64 {
    servers as f64
}

/// Arrival rate at which a blocking fork-join system with `K` Exp(1) tasks
/// has load `λ·H_K = rho`.
pub fn fork_join_rate_for_load(servers: usize, rho: f64) -> f64 {
    rho / harmonic(servers)
}

/// Correlation degrees compared between fork-join with and without replication.
pub const FJR_CORRELATIONS: [f64; 3] = [0.0, 0.5, 0.9];
pub const FJR_SERVERS: usize = 4;
pub const FJR_FJ_LOAD: f64 = 0.9;

/// Task law `(1−δ)·fresh + δ·x(i)` with unit-rate exponentials.
pub fn fjr_service(delta: f64) -> Result<ReplicaModel> {
    let exp1 = Distribution::exponential(1.0)?;
    ReplicaModel::correlated(delta, exp1.clone(), exp1)
}

pub fn deferred_independent(offset: f64) -> Result<DeferredConfig> {
    DeferredConfig::independent_exponential(offset, DEFERRED_LAMBDA, DEFERRED_MU)
}

pub fn deferred_correlated(offset: f64, delta: f64) -> Result<DeferredConfig> {
    DeferredConfig::correlated(offset, DEFERRED_LAMBDA, delta, DEFERRED_MU)
}

/// Simulation of the two-server deferred model for a correlation degree
/// (`0` gives independent replicas).
pub fn deferred_config(offset: f64, delta: f64, n_jobs: usize, seed: u64) -> Result<SystemConfig> {
    let exp = Distribution::exponential(DEFERRED_MU)?;
    let service =
        if delta == 0.0 { ReplicaModel::from(exp) } else { ReplicaModel::correlated(delta, exp.clone(), exp)? };
    Ok(SystemConfig::new(2, 1, ArrivalProcess::poisson(DEFERRED_LAMBDA)?, service, Policy::Deferred { offset })
        .with_jobs(n_jobs)
        .with_seed(seed))
}
