//! Stability conditions and the stability-optimal replication factor.
//!
//! With `K` servers split into `K/k` batches of `k` replicas, each batch
//! sees every `(K/k)`-th arrival. The queue is stable iff
//! `E[min{x_1..x_k}] < (K/k)·E[t]`.

use statrs::function::gamma::gamma;

use crate::dist::{ArrivalProcess, Distribution, Kind, ReplicaModel};
use crate::error::{invalid, Error, Result};

/// A replicated system: `servers` = K, `replicas` = k with `k | K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSpec {
    servers: usize,
    replicas: usize,
    pub service: ReplicaModel,
    pub arrivals: ArrivalProcess,
}

impl ReplicationSpec {
    pub fn new(
        servers: usize,
        replicas: usize,
        service: impl Into<ReplicaModel>,
        arrivals: ArrivalProcess,
    ) -> Result<Self> {
        check_factor(servers, replicas)?;
        Ok(Self { servers, replicas, service: service.into(), arrivals })
    }

    pub fn servers(&self) -> usize {
        self.servers
    }

    pub fn replicas(&self) -> usize {
        self.replicas
    }

    /// Number of arrivals aggregated into one batch interarrival, `K/k`.
    pub fn batch_size(&self) -> usize {
        self.servers / self.replicas
    }
}

pub(crate) fn check_factor(servers: usize, replicas: usize) -> Result<()> {
    if servers == 0 || replicas == 0 {
        return Err(invalid("server count and replication factor must be >= 1"));
    }
    if !servers.is_multiple_of(replicas) {
        return Err(invalid(format!("replication factor {replicas} does not divide {servers}")));
    }
    Ok(())
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|&d| n.is_multiple_of(d)).collect()
}

/// `E[min of k i.i.d. copies] = ∫ S(x)^k dx`.
pub fn min_mean(d: &Distribution, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(invalid("replication factor must be >= 1"));
    }
    let kf = k as f64;
    Ok(match d.kind() {
        Kind::Exponential { rate } => 1.0 / (kf * rate),
        Kind::UniformZeroOne => 1.0 / (kf + 1.0),
        Kind::Pareto { alpha } => {
            if kf * alpha <= 1.0 {
                return Err(Error::DivergentMean { replicas: k });
            }
            1.0 + 1.0 / (kf * alpha - 1.0)
        }
        Kind::Weibull { scale, shape } => scale * kf.powf(-1.0 / shape) * gamma(1.0 + 1.0 / shape),
        Kind::Deterministic { value } => *value,
        Kind::Erlang { .. } | Kind::HyperExponential { .. } => {
            if k == 1 {
                d.mean()
            } else {
                d.min_mean_numeric(k)
            }
        }
    })
}

/// Quadrature path of [`min_mean`], used to cross-check the closed forms.
pub fn min_mean_numeric(d: &Distribution, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(invalid("replication factor must be >= 1"));
    }
    if let Kind::Pareto { alpha } = d.kind() {
        if k as f64 * alpha <= 1.0 {
            return Err(Error::DivergentMean { replicas: k });
        }
    }
    Ok(d.min_mean_numeric(k))
}

/// `δ·E[y] + (1−δ)·E[min of k idiosyncratic parts]`; plain [`min_mean`] for
/// independent replicas.
pub fn min_mean_correlated(model: &ReplicaModel, k: usize) -> Result<f64> {
    match model {
        ReplicaModel::Independent(d) => min_mean(d, k),
        ReplicaModel::AdditiveCorrelated(c) => {
            let delta = c.delta();
            let shared = if delta > 0.0 {
                let m = c.shared().mean();
                if !m.is_finite() {
                    return Err(Error::DivergentMean { replicas: k });
                }
                delta * m
            } else {
                0.0
            };
            let idio = if delta < 1.0 { (1.0 - delta) * min_mean(c.idio(), k)? } else { 0.0 };
            Ok(shared + idio)
        }
    }
}

/// `ρ = (k/K)·E[min] / E[t]`; the system is stable iff `ρ < 1`.
pub fn utilization(spec: &ReplicationSpec) -> Result<f64> {
    let m = min_mean_correlated(&spec.service, spec.replicas)?;
    Ok(spec.replicas as f64 / spec.servers as f64 * m / spec.arrivals.mean_interarrival())
}

pub fn is_stable(spec: &ReplicationSpec) -> Result<bool> {
    Ok(utilization(spec)? < 1.0)
}

/// The divisor `k` of `K` minimizing `k·E[min of k]`, i.e. the factor with
/// the largest stability region. Ties go to the smaller `k`.
pub fn best_k(model: &ReplicaModel, servers: usize) -> Result<usize> {
    if servers == 0 {
        return Err(invalid("server count must be >= 1"));
    }
    let mut best: Option<(usize, f64)> = None;
    for k in divisors(servers) {
        let cost = match min_mean_correlated(model, k) {
            Ok(m) => k as f64 * m,
            Err(Error::DivergentMean { .. }) => continue,
            Err(e) => return Err(e),
        };
        if best.is_none_or(|(_, c)| cost < c) {
            best = Some((k, cost));
        }
    }
    best.map(|(k, _)| k).ok_or(Error::AllUnstable)
}
