use super::{BoundResult, Problem, Regime};
use crate::dist::{ArrivalProcess, Distribution};
use crate::error::{invalid, Error, Result};

/// `H_K = Σ_{i≤K} 1/i`.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// Load of a blocking fork-join system with `K` exponential tasks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FjStability {
    /// `λ·H_K/μ`; stable iff below one.
    pub load: f64,
    /// The cruder `λ·ln K/μ`.
    pub load_log_approx: f64,
    pub stable: bool,
}

pub fn fj_stability(servers: usize, mu: f64, arrival_rate: f64) -> FjStability {
    let load = arrival_rate * harmonic(servers) / mu;
    FjStability { load, load_log_approx: arrival_rate * (servers as f64).ln() / mu, stable: load < 1.0 }
}

fn renewal(arrivals: &ArrivalProcess) -> Result<&Distribution> {
    match arrivals {
        ArrivalProcess::Renewal(t) => Ok(t),
        ArrivalProcess::MarkovModulated(_) => Err(Error::WrongVariant("fork-join bounds need renewal arrivals")),
    }
}

fn check(servers: usize, mu: f64) -> Result<()> {
    if servers == 0 {
        return Err(invalid("server count must be >= 1"));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(invalid(format!("task rate must be > 0, got {mu}")));
    }
    Ok(())
}

/// Blocking fork-join with `K` i.i.d. Exp(μ) tasks per job. The job
/// service is the maximum of the tasks, which is distributed as
/// `Σ_{i≤K} x_i/i`, so its MGF is `Π iμ/(iμ−θ)`.
pub fn fj_bound(servers: usize, mu: f64, arrivals: &ArrivalProcess) -> Result<BoundResult> {
    check(servers, mu)?;
    let t = renewal(arrivals)?;
    let log_service = |theta: f64| -> Result<f64> {
        if theta >= mu {
            return Err(Error::MgfDiverges { theta, abscissa: mu });
        }
        Ok((1..=servers)
            .map(|i| {
                let r = i as f64 * mu;
                (r / (r - theta)).ln()
            })
            .sum())
    };
    Problem {
        regime: Regime::Fj,
        servers,
        replicas: 1,
        drift: harmonic(servers) / mu - t.mean(),
        service_max: mu,
        arrival_cap: None,
        log_service,
        log_arrival: |theta: f64| Ok(t.laplace(theta)?.ln()),
    }
    .solve()
}

/// Fork-join where idle servers replicate running tasks: the job service
/// is Erlang(K, Kμ).
pub fn fjr_bound(servers: usize, mu: f64, arrivals: &ArrivalProcess) -> Result<BoundResult> {
    check(servers, mu)?;
    let t = renewal(arrivals)?;
    let service = Distribution::erlang(servers as u32, servers as f64 * mu)?;
    Problem {
        regime: Regime::Fjr,
        servers,
        replicas: servers,
        drift: service.mean() - t.mean(),
        service_max: service.mgf_abscissa(),
        arrival_cap: None,
        log_service: |theta: f64| Ok(service.mgf(theta)?.ln()),
        log_arrival: |theta: f64| Ok(t.laplace(theta)?.ln()),
    }
    .solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson(rate: f64) -> ArrivalProcess {
        ArrivalProcess::poisson(rate).unwrap()
    }

    #[test]
    fn single_task_is_mm1() {
        let b = fj_bound(1, 1.0, &poisson(0.5)).unwrap();
        assert!((b.theta - 0.5).abs() < 1e-9);
        let r = fjr_bound(1, 1.0, &poisson(0.5)).unwrap();
        assert!((r.theta - 0.5).abs() < 1e-9);
    }

    #[test]
    fn max_mean_is_harmonic() {
        assert!((harmonic(4) - 25.0 / 12.0).abs() < 1e-15);
        // derivative of ln M_max at zero
        let h = 1e-7;
        let d: f64 = (1..=4).map(|i| (i as f64 / (i as f64 - h)).ln()).sum::<f64>() / h;
        assert!((d - 25.0 / 12.0).abs() < 1e-6);
    }

    #[test]
    fn erlang_moments() {
        for k in [2u32, 4, 8] {
            let e = Distribution::erlang(k, k as f64).unwrap();
            assert!((e.mean() - 1.0).abs() < 1e-15);
            assert!((e.variance() - 1.0 / k as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn stability_thresholds() {
        let s = fj_stability(4, 1.0, 0.49);
        assert!(!s.stable && s.load > 1.0);
        assert!((s.load_log_approx - 0.49 * 4f64.ln()).abs() < 1e-15);
        assert!(fj_stability(8, 1.0, 0.3).stable);
        assert!(!fj_stability(8, 1.0, 0.9).stable);
        assert!(!fj_bound(8, 1.0, &poisson(0.9)).unwrap().stable);
        assert!(fjr_bound(8, 1.0, &poisson(0.9)).unwrap().stable);
        assert!(!fjr_bound(8, 1.0, &poisson(1.0)).unwrap().stable);
    }

    #[test]
    fn fjr_beats_fj() {
        // K=4, task rate Kμ so one job carries unit work, λ = 0.75
        let a = poisson(0.75);
        let fj = fj_bound(4, 4.0, &a).unwrap().quantile(0.01).unwrap();
        let fjr = fjr_bound(4, 4.0, &a).unwrap().quantile(0.01).unwrap();
        assert!(fj.is_finite() && fjr < fj);
        assert!(fjr / fj < 0.6, "{fjr} / {fj}");
    }

    #[test]
    fn rejects_markov_arrivals() {
        let a = ArrivalProcess::mmpp(0.1, 30.0, 0.3).unwrap();
        assert!(matches!(fj_bound(4, 1.0, &a), Err(Error::WrongVariant(_))));
    }
}
