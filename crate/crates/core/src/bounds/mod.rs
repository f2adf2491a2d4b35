//! Exponential tail bounds on the steady-state response time.
//!
//! Every bound has the form `P(r ≥ σ) ≤ C·e^{-θσ}` where θ is the positive
//! root of `Φ(θ) = 1` for a regime-specific product `Φ` of a service-side
//! MGF and an arrival-side transform, and `C` is the service-side factor at
//! that root.

mod deferred;
mod forkjoin;
mod markov;
mod reference;
mod root;
mod theta;

use std::fmt;
use std::str::FromStr;

pub use deferred::{deferred_bound, deferred_decay, deferred_usage, DeferredConfig, DeferredService, DeferredUsage};
pub use forkjoin::{fj_bound, fj_stability, fjr_bound, harmonic, FjStability};
pub use markov::{markov_transform, MarkovTransform};
pub use reference::{mm_reference, MmReference};
pub use theta::{theta, theta_cor, theta_ind, theta_mkv, theta_mkv_cor};

use crate::error::{Error, Result};
use root::Search;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Ind,
    Mkv,
    Cor,
    MkvCor,
    Fj,
    Fjr,
    Deferred,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Ind => "ind",
            Regime::Mkv => "mkv",
            Regime::Cor => "cor",
            Regime::MkvCor => "mkv_cor",
            Regime::Fj => "fj",
            Regime::Fjr => "fjr",
            Regime::Deferred => "deferred",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ind" => Regime::Ind,
            "mkv" => Regime::Mkv,
            "cor" => Regime::Cor,
            "mkv_cor" => Regime::MkvCor,
            "fj" => Regime::Fj,
            "fjr" => Regime::Fjr,
            "deferred" => Regime::Deferred,
            other => return Err(Error::Parse(format!("unknown regime '{other}'"))),
        })
    }
}

/// `P(r ≥ σ) ≤ prefactor·e^{-theta·σ}`, valid when `stable`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub regime: Regime,
    pub servers: usize,
    pub replicas: usize,
    pub theta: f64,
    pub prefactor: f64,
    pub stable: bool,
}

impl BoundResult {
    pub const CSV_HEADER: &'static str = "regime,K,k,theta,prefactor,stable";

    pub fn new(regime: Regime, servers: usize, replicas: usize, theta: f64, prefactor: f64) -> Self {
        Self { regime, servers, replicas, theta, prefactor, stable: theta > 0.0 }
    }

    pub fn unstable(regime: Regime, servers: usize, replicas: usize) -> Self {
        Self { regime, servers, replicas, theta: 0.0, prefactor: 1.0, stable: false }
    }

    /// `min(1, C·e^{-θσ})`.
    pub fn ccdf(&self, sigma: f64) -> Result<f64> {
        if !self.stable {
            return Err(Error::UnstableBound);
        }
        Ok((self.prefactor * (-self.theta * sigma).exp()).min(1.0))
    }

    /// Smallest σ with bound ≤ ε: `max(0, ln(C/ε)/θ)`.
    pub fn quantile(&self, epsilon: f64) -> Result<f64> {
        if !self.stable {
            return Err(Error::UnstableBound);
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::DomainError(format!("tail probability must lie in (0, 1), got {epsilon}")));
        }
        Ok(((self.prefactor / epsilon).ln() / self.theta).max(0.0))
    }

    /// `(σ, bound)` at 64 geometric σ points between the bound's 10th and
    /// 99.99th percentiles, matching the empirical grid of a simulation.
    pub fn curve(&self) -> Result<Vec<(f64, f64)>> {
        let hi = self.quantile(1e-4)?;
        let lo = self.quantile(0.9)?.max(hi * 1e-3);
        let n = crate::sim::SimResult::GRID_POINTS;
        let step = (hi / lo).ln() / (n - 1) as f64;
        (0..n)
            .map(|i| {
                let s = lo * (step * i as f64).exp();
                Ok((s, self.ccdf(s)?))
            })
            .collect()
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{},{}", self.regime, self.servers, self.replicas, self.theta, self.prefactor, self.stable)
    }
}

pub fn bound_ccdf(b: &BoundResult, sigma: f64) -> Result<f64> {
    b.ccdf(sigma)
}

pub fn quantile(b: &BoundResult, epsilon: f64) -> Result<f64> {
    b.quantile(epsilon)
}

/// A root problem `ln Φ = log_service + log_arrival = 0`.
pub(crate) struct Problem<S, A> {
    pub regime: Regime,
    pub servers: usize,
    pub replicas: usize,
    /// `E[service] − E[batch interarrival]`; the queue is stable iff negative.
    pub drift: f64,
    /// Abscissa of the service-side MGF.
    pub service_max: f64,
    /// Upper end of the arrival transform's domain, if any.
    pub arrival_cap: Option<f64>,
    pub log_service: S,
    pub log_arrival: A,
}

impl<S, A> Problem<S, A>
where
    S: Fn(f64) -> Result<f64>,
    A: Fn(f64) -> Result<f64>,
{
    pub fn solve(self) -> Result<BoundResult> {
        if !(self.drift < 0.0) {
            return Ok(BoundResult::unstable(self.regime, self.servers, self.replicas));
        }
        if !(self.service_max > 0.0) {
            return Err(Error::MgfDiverges { theta: 0.0, abscissa: self.service_max });
        }
        let theta_max = self.service_max.min(self.arrival_cap.unwrap_or(f64::INFINITY));
        let log_phi = |t: f64| Ok((self.log_service)(t)? + (self.log_arrival)(t)?);
        match root::search(log_phi, theta_max)? {
            Search::Root(theta) => {
                let prefactor = (self.log_service)(theta)?.exp();
                Ok(BoundResult::new(self.regime, self.servers, self.replicas, theta, prefactor))
            }
            Search::BelowOneToCap(cap) => Err(Error::RootOutsideDomain { cap }),
        }
    }
}
