use crate::error::{Error, Result};

/// Mean response times of a two-server system with Poisson arrivals and
/// Exp(μ) service at per-server load ρ, under four dispatching rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmReference {
    /// Uniformly random server: two M/M/1 queues.
    pub rnd: f64,
    /// Alternating servers: two E2/M/1 queues.
    pub rr: f64,
    /// Shared FIFO queue: M/M/2.
    pub mm2: f64,
    /// Every job on both servers, purged on first completion.
    pub rep: f64,
}

pub fn mm_reference(rho: f64, mu: f64) -> Result<MmReference> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::DomainError(format!("utilization must lie in (0, 1), got {rho}")));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::DomainError(format!("service rate must be > 0, got {mu}")));
    }
    Ok(MmReference {
        rnd: 1.0 / (mu * (1.0 - rho)),
        rr: 2.0 / (mu * (1.0 - 4.0 * rho + (1.0 + 8.0 * rho).sqrt())),
        mm2: 1.0 / (mu * (1.0 - rho * rho)),
        rep: 1.0 / (2.0 * mu * (1.0 - rho)),
    })
}
