use super::markov::markov_transform;
use super::{BoundResult, Problem, Regime};
use crate::dist::{ArrivalProcess, Distribution, ReplicaModel};
use crate::error::{Error, Result};
use crate::stability::{min_mean_correlated, ReplicationSpec};

/// Decay rate for renewal arrivals and independent replicas: the root of
/// `E[e^{θ·min_k x}]·E[e^{-θt}]^{K/k} = 1`.
pub fn theta_ind(spec: &ReplicationSpec) -> Result<BoundResult> {
    require(spec, false, false)?;
    solve(spec, Regime::Ind)
}

/// Markov-modulated arrivals, independent replicas: the Laplace transform
/// is replaced by the spectral radius `ξ(θ)` of `T_θ`.
pub fn theta_mkv(spec: &ReplicationSpec) -> Result<BoundResult> {
    require(spec, true, false)?;
    solve(spec, Regime::Mkv)
}

/// Renewal arrivals, additively correlated replicas.
pub fn theta_cor(spec: &ReplicationSpec) -> Result<BoundResult> {
    require(spec, false, true)?;
    solve(spec, Regime::Cor)
}

/// Markov-modulated arrivals, additively correlated replicas.
pub fn theta_mkv_cor(spec: &ReplicationSpec) -> Result<BoundResult> {
    require(spec, true, true)?;
    solve(spec, Regime::MkvCor)
}

/// Picks the regime from the arrival and replica variants.
pub fn theta(spec: &ReplicationSpec) -> Result<BoundResult> {
    let regime = match (&spec.arrivals, &spec.service) {
        (ArrivalProcess::Renewal(_), ReplicaModel::Independent(_)) => Regime::Ind,
        (ArrivalProcess::MarkovModulated(_), ReplicaModel::Independent(_)) => Regime::Mkv,
        (ArrivalProcess::Renewal(_), ReplicaModel::AdditiveCorrelated(_)) => Regime::Cor,
        (ArrivalProcess::MarkovModulated(_), ReplicaModel::AdditiveCorrelated(_)) => Regime::MkvCor,
    };
    solve(spec, regime)
}

fn require(spec: &ReplicationSpec, markov: bool, correlated: bool) -> Result<()> {
    let is_markov = matches!(spec.arrivals, ArrivalProcess::MarkovModulated(_));
    let is_correlated = matches!(spec.service, ReplicaModel::AdditiveCorrelated(_));
    if is_markov != markov {
        return Err(Error::WrongVariant(if markov {
            "this regime needs Markov-modulated arrivals"
        } else {
            "this regime needs renewal arrivals"
        }));
    }
    if is_correlated != correlated {
        return Err(Error::WrongVariant(if correlated {
            "this regime needs additively correlated replicas"
        } else {
            "this regime needs independent replicas"
        }));
    }
    Ok(())
}

fn scaled_abscissa(d: &Distribution, k: usize, weight: f64) -> f64 {
    if weight == 0.0 {
        f64::INFINITY
    } else {
        d.min_order_abscissa(k) / weight
    }
}

/// `ln E[e^{θ·S}]` for the task service `S` (fastest of `k` replicas) and
/// the abscissa of that MGF.
fn service_side(model: &ReplicaModel, k: usize) -> (impl Fn(f64) -> Result<f64> + '_, f64) {
    let abscissa = match model {
        ReplicaModel::Independent(d) => d.min_order_abscissa(k),
        ReplicaModel::AdditiveCorrelated(c) => {
            scaled_abscissa(c.shared(), 1, c.delta()).min(scaled_abscissa(c.idio(), k, 1.0 - c.delta()))
        }
    };
    let log_mgf = move |t: f64| -> Result<f64> {
        match model {
            ReplicaModel::Independent(d) => Ok(d.min_order_mgf(k, t)?.ln()),
            ReplicaModel::AdditiveCorrelated(c) => {
                let delta = c.delta();
                let mut v = 0.0;
                if delta > 0.0 {
                    v += c.shared().mgf(delta * t)?.ln();
                }
                if delta < 1.0 {
                    v += c.idio().min_order_mgf(k, (1.0 - delta) * t)?.ln();
                }
                Ok(v)
            }
        }
    };
    (log_mgf, abscissa)
}

fn solve(spec: &ReplicationSpec, regime: Regime) -> Result<BoundResult> {
    let (servers, k) = (spec.servers(), spec.replicas());
    let batch = spec.batch_size() as f64;
    let mean_service = match min_mean_correlated(&spec.service, k) {
        Ok(m) => m,
        Err(Error::DivergentMean { .. }) => return Ok(BoundResult::unstable(regime, servers, k)),
        Err(e) => return Err(e),
    };
    let drift = mean_service - batch * spec.arrivals.mean_interarrival();
    let (log_service, service_max) = service_side(&spec.service, k);

    match &spec.arrivals {
        ArrivalProcess::Renewal(t) => Problem {
            regime,
            servers,
            replicas: k,
            drift,
            service_max,
            arrival_cap: None,
            log_service,
            log_arrival: |theta: f64| Ok(batch * t.laplace(theta)?.ln()),
        }
        .solve(),
        ArrivalProcess::MarkovModulated(chain) => Problem {
            regime,
            servers,
            replicas: k,
            drift,
            service_max,
            arrival_cap: Some(chain.rate_inactive()),
            log_service,
            log_arrival: |theta: f64| Ok(batch * markov_transform(chain, theta)?.xi.ln()),
        }
        .solve(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_pcg::Pcg64Mcg;

    fn exp(rate: f64) -> Distribution {
        Distribution::exponential(rate).unwrap()
    }

    fn ind(servers: usize, k: usize, mu: f64, lambda: f64) -> ReplicationSpec {
        ReplicationSpec::new(servers, k, exp(mu), ArrivalProcess::poisson(lambda).unwrap()).unwrap()
    }

    fn bursty_chain() -> ArrivalProcess {
        ArrivalProcess::mmpp(0.1, 30.0, 0.3).unwrap()
    }

    fn residual(spec: &ReplicationSpec, b: &BoundResult) -> f64 {
        let (log_service, _) = service_side(&spec.service, spec.replicas());
        let batch = spec.batch_size() as f64;
        let arrival = match &spec.arrivals {
            ArrivalProcess::Renewal(t) => batch * t.laplace(b.theta).unwrap().ln(),
            ArrivalProcess::MarkovModulated(c) => batch * markov_transform(c, b.theta).unwrap().xi.ln(),
        };
        ((log_service(b.theta).unwrap() + arrival).exp() - 1.0).abs()
    }

    #[test]
    fn mm1_closed_form() {
        let b = theta_ind(&ind(1, 1, 1.0, 0.5)).unwrap();
        assert!((b.theta - 0.5).abs() < 1e-9);
        assert!((b.prefactor - 2.0).abs() < 1e-8);
    }

    #[test]
    fn full_replication_closed_form() {
        let b = theta_ind(&ind(4, 4, 1.0, 3.0)).unwrap();
        assert!((b.theta - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bisection_residual() {
        let spec = ind(4, 1, 1.0, 3.0);
        let b = theta_ind(&spec).unwrap();
        assert!(residual(&spec, &b) < 1e-10);
        assert!((b.theta - 0.377_69).abs() < 1e-4);
    }

    #[test]
    fn unstable_reported() {
        let b = theta_ind(&ind(1, 1, 1.0, 1.5)).unwrap();
        assert!(!b.stable && b.theta == 0.0);
    }

    #[test]
    fn pareto_service_needs_fit() {
        let spec =
            ReplicationSpec::new(4, 2, Distribution::pareto(1.1).unwrap(), ArrivalProcess::poisson(1.0).unwrap())
                .unwrap();
        assert!(matches!(theta_ind(&spec), Err(Error::MgfDiverges { .. })));
    }

    #[test]
    fn regime_mismatch() {
        let spec = ReplicationSpec::new(4, 4, exp(1.0), bursty_chain()).unwrap();
        assert!(matches!(theta_ind(&spec), Err(Error::WrongVariant(_))));
        assert!(theta_mkv(&spec).is_ok());
    }

    #[test]
    fn bursty_roots_inside_domain() {
        for (k, expected) in [(1, 0.103_56), (2, 0.116_26), (4, 0.123_80)] {
            let spec = ReplicationSpec::new(4, k, exp(1.0), bursty_chain()).unwrap();
            let b = theta_mkv(&spec).unwrap();
            assert!(b.theta < 0.3);
            assert!((b.theta - expected).abs() < 1e-4, "k={k}: {}", b.theta);
            assert!(residual(&spec, &b) < 1e-10);
        }
    }

    #[test]
    fn correlated_delta_zero_equals_ind() {
        let shared = exp(1.0);
        for k in [1, 2, 4] {
            let cor = ReplicationSpec::new(
                4,
                k,
                ReplicaModel::correlated(0.0, shared.clone(), exp(1.0)).unwrap(),
                ArrivalProcess::poisson(3.0).unwrap(),
            )
            .unwrap();
            let a = theta_cor(&cor).unwrap().theta;
            let b = theta_ind(&ind(4, k, 1.0, 3.0)).unwrap().theta;
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn correlated_delta_one_ignores_k() {
        // one batch of k servers: θ = μ − λ whatever k is
        for k in [1, 2, 4, 8] {
            let spec = ReplicationSpec::new(
                k,
                k,
                ReplicaModel::correlated(1.0, exp(1.0), exp(1.0)).unwrap(),
                ArrivalProcess::poisson(0.6).unwrap(),
            )
            .unwrap();
            let b = theta_cor(&spec).unwrap();
            assert!((b.theta - 0.4).abs() < 1e-9, "k={k}: {}", b.theta);
        }
    }

    #[test]
    fn correlated_ordering_under_scaled_rate() {
        // μ' = δk + (1−δ) keeps the per-replica mean at one over the k batch
        let delta = 0.5;
        let mut quantiles = Vec::new();
        for k in [1, 2, 4] {
            let mu = delta * k as f64 + (1.0 - delta);
            let model = ReplicaModel::correlated(delta, exp(mu), exp(mu)).unwrap();
            let spec = ReplicationSpec::new(4, k, model, ArrivalProcess::poisson(3.0).unwrap()).unwrap();
            let b = theta_cor(&spec).unwrap();
            assert!(residual(&spec, &b) < 1e-10);
            quantiles.push(b.quantile(0.01).unwrap());
        }
        assert!(quantiles[0] > quantiles[1] && quantiles[1] > quantiles[2], "{quantiles:?}");
    }

    #[test]
    fn degenerate_chain_matches_poisson() {
        let rate = 3.0;
        let chain = ArrivalProcess::mmpp(1.0, rate, rate * (1.0 - 1e-12)).unwrap();
        for k in [1, 2, 4] {
            let mkv = ReplicationSpec::new(4, k, exp(1.0), chain.clone()).unwrap();
            let a = theta_mkv(&mkv).unwrap().theta;
            let b = theta_ind(&ind(4, k, 1.0, rate)).unwrap().theta;
            assert!((a - b).abs() < 1e-6, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn mkv_cor_delta_zero_equals_mkv() {
        for k in [1, 2, 4] {
            let model = ReplicaModel::correlated(0.0, exp(1.0), exp(1.0)).unwrap();
            let a = theta_mkv_cor(&ReplicationSpec::new(4, k, model, bursty_chain()).unwrap()).unwrap().theta;
            let b = theta_mkv(&ReplicationSpec::new(4, k, exp(1.0), bursty_chain()).unwrap()).unwrap().theta;
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn interior_point_is_feasible() {
        let spec = ind(4, 2, 1.0, 3.0);
        let b = theta_ind(&spec).unwrap();
        let (log_service, _) = service_side(&spec.service, 2);
        let half = 0.5 * b.theta;
        let v = log_service(half).unwrap() + 2.0 * (3.0f64 / (3.0 + half)).ln();
        assert!(v < 0.0);
    }

    #[test]
    fn martingale_increment_has_unit_mean() {
        let spec = ind(4, 2, 1.0, 3.0);
        let b = theta_ind(&spec).unwrap();
        let service = exp(1.0);
        let gap = exp(3.0);
        let mut rng = Pcg64Mcg::seed_from_u64(77);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| {
                let s = service.sample(&mut rng).min(service.sample(&mut rng));
                let t = gap.sample(&mut rng) + gap.sample(&mut rng);
                (b.theta * (s - t)).exp()
            })
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "{mean} ± {se}");
    }
}
