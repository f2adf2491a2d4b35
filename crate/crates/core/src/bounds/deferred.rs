use super::{BoundResult, Problem, Regime};
use crate::dist::Distribution;
use crate::error::{invalid, Error, Result};
use crate::quad;

/// Service model of the two-server deferred-replication system.
#[derive(Debug, Clone, PartialEq)]
pub enum DeferredService {
    /// Original `x` on server 1, replica `y` on server 2.
    Independent { x: Distribution, y: Distribution },
    /// Original `(1−δ)x + δz`, replica `(1−δ)y + δz`, all three Exp(μ).
    Correlated { delta: f64, mu: f64 },
}

/// Jobs arrive as a Poisson stream to server 1. A job whose processing
/// lasts longer than `offset` (Δ) gets a replica on server 2; the first
/// copy to finish purges the other.
#[derive(Debug, Clone, PartialEq)]
pub struct DeferredConfig {
    offset: f64,
    arrival_rate: f64,
    service: DeferredService,
}

impl DeferredConfig {
    pub fn new(offset: f64, arrival_rate: f64, service: DeferredService) -> Result<Self> {
        if !(offset >= 0.0) {
            return Err(invalid(format!("replication offset must be >= 0, got {offset}")));
        }
        if !(arrival_rate.is_finite() && arrival_rate > 0.0) {
            return Err(invalid(format!("arrival rate must be > 0, got {arrival_rate}")));
        }
        if let DeferredService::Correlated { delta, mu } = service {
            if !(0.0..=1.0).contains(&delta) {
                return Err(Error::DomainError(format!("correlation degree must lie in [0, 1], got {delta}")));
            }
            if !(mu.is_finite() && mu > 0.0) {
                return Err(invalid(format!("service rate must be > 0, got {mu}")));
            }
        }
        Ok(Self { offset, arrival_rate, service })
    }

    pub fn independent_exponential(offset: f64, arrival_rate: f64, mu: f64) -> Result<Self> {
        let e = Distribution::exponential(mu)?;
        Self::new(offset, arrival_rate, DeferredService::Independent { x: e.clone(), y: e })
    }

    pub fn correlated(offset: f64, arrival_rate: f64, delta: f64, mu: f64) -> Result<Self> {
        Self::new(offset, arrival_rate, DeferredService::Correlated { delta, mu })
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn arrival_rate(&self) -> f64 {
        self.arrival_rate
    }

    pub fn service(&self) -> &DeferredService {
        &self.service
    }
}

/// Server utilizations `ρ₁`, `ρ₂` and the resource usage `u = ρ₁ + ρ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeferredUsage {
    pub rho1: f64,
    pub rho2: f64,
    pub u: f64,
}

impl DeferredUsage {
    fn new(rho1: f64, rho2: f64) -> Self {
        Self { rho1, rho2, u: rho1 + rho2 }
    }
}

/// `ρ₁ = λ·E[min{x, Δ+y}]` and `ρ₂ = λ·E[min{(x−Δ)⁺, y}]`.
pub fn deferred_usage(cfg: &DeferredConfig) -> Result<DeferredUsage> {
    let (lambda, offset) = (cfg.arrival_rate, cfg.offset);
    match &cfg.service {
        DeferredService::Independent { x, y } => Ok(independent_usage(x, y, offset, lambda)),
        DeferredService::Correlated { delta, mu } => {
            let (delta, mu) = (*delta, *mu);
            let load = lambda / mu;
            if delta == 0.0 {
                let e = (-mu * offset).exp();
                return Ok(DeferredUsage::new(load * (1.0 - 0.5 * e), load * 0.5 * e));
            }
            if delta == 1.0 {
                return Ok(DeferredUsage::new(load, load * (-mu * offset).exp()));
            }
            if (delta - 0.5).abs() < 1e-6 {
                // removable singularity of the 1/(2δ−1) terms
                let lo = correlated_usage(delta - 1e-6, mu, offset, load);
                let hi = correlated_usage(delta + 1e-6, mu, offset, load);
                return Ok(DeferredUsage::new(0.5 * (lo.rho1 + hi.rho1), 0.5 * (lo.rho2 + hi.rho2)));
            }
            Ok(correlated_usage(delta, mu, offset, load))
        }
    }
}

fn correlated_usage(delta: f64, mu: f64, offset: f64, load: f64) -> DeferredUsage {
    let e_shared = (-mu * offset / delta).exp();
    let e_idio = (-mu * offset / (1.0 - delta)).exp();
    let d = 2.0 * delta - 1.0;
    let rho1 = load * (1.0 - 0.5 * (1.0 - delta) * e_idio);
    let rho2 = load * (delta * delta / d * e_shared - (1.0 - delta) / (2.0 * d) * e_idio);
    DeferredUsage::new(rho1, rho2)
}

fn independent_usage(x: &Distribution, y: &Distribution, offset: f64, lambda: f64) -> DeferredUsage {
    if offset.is_infinite() {
        return DeferredUsage::new(lambda * x.mean(), 0.0);
    }
    use crate::dist::Kind::Exponential;
    if let (Exponential { rate: mx }, Exponential { rate: my }) = (x.kind(), y.kind()) {
        let e = (-mx * offset).exp();
        let rho1 = lambda * ((1.0 - e) / mx + e / (mx + my));
        return DeferredUsage::new(rho1, lambda * e / (mx + my));
    }
    let rho1 = lambda * shifted_min_mean(x, y, offset);
    let rho2 = lambda
        * quad::integrate_half_line(|s| x.log_survival(s + offset) + y.log_survival(s), &[], quad::DEFAULT_REL_TOL);
    DeferredUsage::new(rho1, rho2)
}

/// `E[min{x, Δ+y}] = ∫ S_x(s)·S_y(s−Δ) ds`.
fn shifted_min_mean(x: &Distribution, y: &Distribution, offset: f64) -> f64 {
    if offset.is_infinite() {
        return x.mean();
    }
    quad::integrate_half_line(|s| x.log_survival(s) + y.log_survival(s - offset), &[offset], quad::DEFAULT_REL_TOL)
}

fn shifted_min_abscissa(x: &Distribution, y: &Distribution, offset: f64) -> f64 {
    if offset.is_infinite() {
        x.mgf_abscissa()
    } else {
        x.mgf_abscissa() + y.mgf_abscissa()
    }
}

/// `E[e^{θ·min{x, Δ+y}}] = 1 + θ∫ e^{θs}·S_x(s)·S_y(s−Δ) ds`.
pub(crate) fn shifted_min_mgf(x: &Distribution, y: &Distribution, offset: f64, theta: f64) -> Result<f64> {
    if offset.is_infinite() {
        return x.mgf(theta);
    }
    if theta == 0.0 {
        return Ok(1.0);
    }
    let abscissa = shifted_min_abscissa(x, y, offset);
    if theta >= abscissa {
        return Err(Error::MgfDiverges { theta, abscissa });
    }
    let integral = quad::integrate_half_line(
        |s| theta * s + x.log_survival(s) + y.log_survival(s - offset),
        &[offset],
        quad::DEFAULT_REL_TOL,
    );
    Ok(1.0 + theta * integral)
}

/// Decay-rate bound for the response time at server 1, whose effective
/// service is the shifted minimum (plus the shared part when correlated).
pub fn deferred_decay(cfg: &DeferredConfig) -> Result<BoundResult> {
    let lambda = cfg.arrival_rate;
    let offset = cfg.offset;
    let usage = deferred_usage(cfg)?;
    let drift = usage.rho1 / lambda - 1.0 / lambda;
    let log_arrival = |t: f64| Ok((lambda / (lambda + t)).ln());

    match &cfg.service {
        DeferredService::Independent { x, y } => Problem {
            regime: Regime::Deferred,
            servers: 2,
            replicas: 2,
            drift,
            service_max: shifted_min_abscissa(x, y, offset),
            arrival_cap: None,
            log_service: |t: f64| Ok(shifted_min_mgf(x, y, offset, t)?.ln()),
            log_arrival,
        }
        .solve(),
        DeferredService::Correlated { delta, mu } => {
            let (delta, mu) = (*delta, *mu);
            let shared = Distribution::exponential(mu)?;
            let scaled = if delta < 1.0 { Some(Distribution::exponential(mu / (1.0 - delta))?) } else { None };
            let mut service_max = if delta > 0.0 { mu / delta } else { f64::INFINITY };
            if let Some(s) = &scaled {
                service_max = service_max.min(shifted_min_abscissa(s, s, offset));
            }
            let log_service = |t: f64| -> Result<f64> {
                let mut v = 0.0;
                if delta > 0.0 {
                    v += shared.mgf(delta * t)?.ln();
                }
                if let Some(s) = &scaled {
                    v += shifted_min_mgf(s, s, offset, t)?.ln();
                }
                Ok(v)
            };
            Problem {
                regime: Regime::Deferred,
                servers: 2,
                replicas: 2,
                drift,
                service_max,
                arrival_cap: None,
                log_service,
                log_arrival,
            }
            .solve()
        }
    }
}

/// The `(1−ε)`-quantile bound of the response time.
pub fn deferred_bound(cfg: &DeferredConfig, epsilon: f64) -> Result<f64> {
    deferred_decay(cfg)?.quantile(epsilon)
}
