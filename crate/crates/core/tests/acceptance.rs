//! Acceptance checks: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_pcg::Pcg64Mcg;
use replibound_core::bounds::{
    deferred_bound, deferred_usage, fj_bound, fjr_bound, markov_transform, mm_reference, theta, theta_cor, theta_ind,
    theta_mkv, theta_mkv_cor,
};
use replibound_core::dist::Mmpp;
use replibound_core::scenarios::{self, FACTORS};
use replibound_core::sim::{fjr_job_services, simulate};
use replibound_core::stability::{min_mean, min_mean_numeric, utilization};
use replibound_core::{ArrivalProcess, Distribution, Policy, Regime, ReplicaModel, ReplicationSpec, SystemConfig};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn exp(rate: f64) -> Distribution {
    Distribution::exponential(rate).unwrap()
}

fn poisson(rate: f64) -> ArrivalProcess {
    ArrivalProcess::poisson(rate).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn criterion_1() -> Check {
    let cases = [(1, 1, 1.0, 0.5, 0.5), (4, 4, 1.0, 3.0, 1.0), (2, 2, 1.5, 2.0, 1.0), (8, 8, 0.5, 1.0, 3.0)];
    let mut slowest = Duration::ZERO;
    for (servers, k, mu, lambda, expected) in cases {
        let spec = ReplicationSpec::new(servers, k, exp(mu), poisson(lambda)).map_err(err)?;
        for _ in 0..100 {
            let start = Instant::now();
            let b = theta_ind(&spec).map_err(err)?;
            slowest = slowest.max(start.elapsed());
            ensure((b.theta - expected).abs() < 1e-9, format!("K={servers} k={k}: θ={} expected {expected}", b.theta))?;
        }
    }
    ensure(slowest < Duration::from_millis(1), format!("slowest root {:.3} ms", ms(slowest)))?;
    Ok(format!("4 oracles within 1e-9, slowest root {:.3} ms", ms(slowest)))
}

fn criterion_2() -> Check {
    let mut notes = Vec::new();
    for (k, expected, drifts) in [(1, 2.75, true), (2, 0.9167, false), (4, 1.2941, true)] {
        let rho = utilization(&scenarios::overload_spec(k).map_err(err)?).map_err(err)?;
        ensure((rho - expected).abs() < 1e-3, format!("k={k}: ρ={rho} expected {expected}"))?;
        let r = simulate(&scenarios::overload_config(k, 10_000, 2).map_err(err)?).map_err(err)?;
        let (first, last) = r.trace_decile_means().ok_or("no trace")?;
        let ratio = last / first;
        notes.push(format!("k={k}: ρ={rho:.4} last/first={ratio:.2}"));
        if drifts {
            ensure(ratio > 5.0, format!("k={k} should drift: {}", notes.join("; ")))?;
        } else {
            ensure(ratio < 1.5, format!("k={k} should be stationary: {}", notes.join("; ")))?;
        }
    }
    Ok(notes.join("; "))
}

/// Least-squares slope of `ln P̂(r ≥ σ)` over the σ range where the
/// empirical CCDF lies in `[1e-5, 1e-2]`.
fn log_ccdf_slope(r: &replibound_core::SimResult) -> f64 {
    let (lo, hi) = (r.quantile(1.0 - 1e-2), r.quantile(1.0 - 1e-5));
    let pts: Vec<(f64, f64)> = (0..48).map(|i| lo + (hi - lo) * i as f64 / 47.0).map(|s| (s, r.ccdf(s).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_3() -> Check {
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for (i, regime) in [Regime::Ind, Regime::Cor, Regime::Mkv, Regime::MkvCor].into_iter().enumerate() {
        for k in FACTORS {
            let start = Instant::now();
            let b = theta(&scenarios::replication_spec(regime, k).map_err(err)?).map_err(err)?;
            let cfg =
                scenarios::replication_config(regime, k, 10_000_000, 300 + 10 * i as u64 + k as u64).map_err(err)?;
            let r = simulate(&cfg).map_err(err)?;
            let violations = r.sigma_grid().into_iter().filter(|&s| r.ccdf(s) > b.ccdf(s).unwrap_or(f64::NAN)).count();
            let slope_err = (-log_ccdf_slope(&r) / b.theta - 1.0).abs();
            let secs = start.elapsed().as_secs_f64();
            let tag = format!("{regime}/k={k}");
            notes.push(format!("{tag}: θ={:.5} slope err {:.1}% {secs:.1}s", b.theta, 100.0 * slope_err));
            if violations > 0 {
                failures.push(format!("{tag}: bound below empirical CCDF at {violations} σ points"));
            }
            if slope_err >= 0.10 {
                failures.push(format!("{tag}: slope off by {:.1}%", 100.0 * slope_err));
            }
            if secs > 300.0 {
                failures.push(format!("{tag}: took {secs:.0}s"));
            }
        }
    }
    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("{} | {}", failures.join("; "), notes.join("; ")))
    }
}

fn criterion_4() -> Check {
    let m = mm_reference(0.5, 1.0).map_err(err)?;
    let run = |servers, k, policy| -> Result<f64, String> {
        let cfg = SystemConfig::new(servers, k, poisson(1.0), exp(1.0), policy).with_jobs(1_000_000).with_seed(4);
        Ok(simulate(&cfg).map_err(err)?.mean)
    };
    let rep = run(2, 2, Policy::ReplicatedBatches)?;
    let mm2 = run(2, 1, Policy::CentralQueue)?;
    let rr = run(2, 1, Policy::RoundRobin)?;
    let rnd = run(2, 1, Policy::Random)?;
    let mut notes = Vec::new();
    for (name, sim, exact) in [("rep", rep, m.rep), ("mm2", mm2, m.mm2), ("rr", rr, m.rr), ("rnd", rnd, m.rnd)] {
        notes.push(format!("{name} {sim:.4}/{exact:.4}"));
        ensure((sim / exact - 1.0).abs() < 0.02, format!("{name}: {sim} vs {exact}"))?;
    }
    ensure(rep < mm2 && mm2 < rr && rr < rnd, format!("ordering broken: {}", notes.join(", ")))?;
    Ok(notes.join(", "))
}

fn criterion_5() -> Check {
    let mut notes = Vec::new();
    for servers in [2usize, 4, 8] {
        let s = fjr_job_services(servers, &exp(1.0).into(), 1_000_000, 50 + servers as u64);
        let n = s.len() as f64;
        let mean = s.iter().sum::<f64>() / n;
        let var = s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let target_var = 1.0 / servers as f64;
        ensure((mean - 1.0).abs() < 0.01, format!("K={servers}: mean {mean}"))?;
        ensure((var / target_var - 1.0).abs() < 0.03, format!("K={servers}: var {var} vs {target_var}"))?;
        notes.push(format!("K={servers}: mean {mean:.4} var {var:.4}"));
    }
    let a = poisson(0.9);
    ensure(fjr_bound(8, 1.0, &a).map_err(err)?.stable, "FJR bound unstable at 0.9")?;
    ensure(!fj_bound(8, 1.0, &a).map_err(err)?.stable, "FJ bound stable at 0.9")?;
    let cfg = SystemConfig::new(8, 1, a, exp(1.0), Policy::ForkJoinReplication)
        .with_jobs(200_000)
        .with_seed(58)
        .with_warmup(0.0)
        .with_trace(true);
    let (f0, f1) = simulate(&cfg).map_err(err)?.trace_decile_means().ok_or("no trace")?;
    let (j0, j1) = simulate(&SystemConfig { policy: Policy::ForkJoin, ..cfg })
        .map_err(err)?
        .trace_decile_means()
        .ok_or("no trace")?;
    ensure(f1 < 1.5 * f0, format!("FJR trace drifts {f0} -> {f1}"))?;
    ensure(j1 > 5.0 * j0, format!("FJ trace does not drift {j0} -> {j1}"))?;
    notes.push(format!("λ=0.9 K=8: FJR deciles {f0:.2}->{f1:.2}, FJ {j0:.1}->{j1:.1}"));
    Ok(notes.join("; "))
}

fn criterion_6() -> Check {
    let a = poisson(scenarios::FORK_JOIN_LAMBDA);
    let mut notes = Vec::new();
    for servers in [4usize, 8, 16] {
        let rate = scenarios::fork_join_task_rate(servers);
        let fj = fj_bound(servers, rate, &a).map_err(err)?.quantile(scenarios::EPSILON).map_err(err)?;
        let fjr = fjr_bound(servers, rate, &a).map_err(err)?.quantile(scenarios::EPSILON).map_err(err)?;
        let ratio = fjr / fj;
        notes.push(format!("K={servers}: {fjr:.3}/{fj:.3}={ratio:.3}"));
        ensure(ratio <= 0.6, notes.join("; "))?;
    }
    Ok(notes.join("; "))
}

fn criterion_7() -> Check {
    let mut notes = Vec::new();
    for offset in [0.0, 0.25, 0.5, 1.0, 2.0, 5.0, f64::INFINITY] {
        let u = deferred_usage(&scenarios::deferred_independent(offset).map_err(err)?).map_err(err)?.u;
        ensure((u - 0.75).abs() < 1e-12, format!("analytic u({offset}) = {u}"))?;
    }
    for offset in [0.0, 0.5, 2.0] {
        let r = simulate(&scenarios::deferred_config(offset, 0.0, 1_000_000, 70).map_err(err)?).map_err(err)?;
        let u: f64 = r.utilizations.iter().sum();
        ensure((u / 0.75 - 1.0).abs() < 0.02, format!("simulated u(Δ={offset}) = {u}"))?;
        notes.push(format!("sim u(Δ={offset})={u:.4}"));
    }
    for delta in scenarios::DEFERRED_CORRELATIONS {
        let u = deferred_usage(&scenarios::deferred_correlated(0.0, delta).map_err(err)?).map_err(err)?.u;
        let target = 0.75 * (1.0 + delta);
        ensure((u - target).abs() < 1e-9, format!("correlated u(0) at δ={delta}: {u} vs {target}"))?;
    }
    let q = |offset: f64, delta: f64| -> Result<f64, String> {
        deferred_bound(&scenarios::deferred_correlated(offset, delta).map_err(err)?, scenarios::EPSILON).map_err(err)
    };
    let low = q(f64::INFINITY, 0.25)? / q(0.0, 0.25)? - 1.0;
    let high = q(0.8, 0.75)? / q(0.0, 0.75)? - 1.0;
    notes.push(format!("q99 increase δ=0.25: {:.0}%, δ=0.75: {:.0}%", 100.0 * low, 100.0 * high));
    ensure((low - 2.30).abs() <= 0.25, notes.join("; "))?;
    ensure((high - 0.37).abs() <= 0.25, notes.join("; "))?;
    Ok(notes.join("; "))
}

fn criterion_8() -> Check {
    // martingale increment at the root has unit mean
    let b = theta_ind(&ReplicationSpec::new(4, 2, exp(1.0), poisson(3.0)).map_err(err)?).map_err(err)?;
    let (service, gap) = (exp(1.0), exp(3.0));
    let mut rng = Pcg64Mcg::seed_from_u64(81);
    let n = 1_000_000;
    let draws: Vec<f64> = (0..n)
        .map(|_| {
            let s = service.sample(&mut rng).min(service.sample(&mut rng));
            let t = gap.sample(&mut rng) + gap.sample(&mut rng);
            (b.theta * (s - t)).exp()
        })
        .collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let se = (draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 / n as f64).sqrt();
    ensure((mean - 1.0).abs() < 3.0 * se, format!("martingale mean {mean} ± {se}"))?;

    // consistency ladder
    let chain = scenarios::markov_arrivals();
    let flat = ArrivalProcess::mmpp(1.0, 3.0, 3.0 * (1.0 - 1e-12)).map_err(err)?;
    let cor0 = || ReplicaModel::correlated(0.0, exp(1.0), exp(1.0)).unwrap();
    let mut ladder = 0.0f64;
    for k in FACTORS {
        let spec = |m: ReplicaModel, a: &ArrivalProcess| ReplicationSpec::new(4, k, m, a.clone()).unwrap();
        let ind = theta_ind(&spec(exp(1.0).into(), &poisson(3.0))).map_err(err)?.theta;
        let mkv = theta_mkv(&spec(exp(1.0).into(), &chain)).map_err(err)?.theta;
        ladder = ladder
            .max((theta_cor(&spec(cor0(), &poisson(3.0))).map_err(err)?.theta - ind).abs())
            .max((theta_mkv_cor(&spec(cor0(), &chain)).map_err(err)?.theta - mkv).abs())
            .max((theta_mkv(&spec(exp(1.0).into(), &flat)).map_err(err)?.theta - ind).abs());
    }
    ensure(ladder < 1e-6, format!("ladder gap {ladder:e}"))?;

    // transform at zero and eigen-residual
    let mmpp = Mmpp::new(0.1, 30.0, 0.3).map_err(err)?;
    let xi0 = markov_transform(&mmpp, 0.0).map_err(err)?.xi;
    let residual = markov_transform(&mmpp, 0.15).map_err(err)?.eigen_residual();
    ensure((xi0 - 1.0).abs() < 1e-15 && residual < 1e-10, format!("ξ(0)={xi0}, residual {residual:e}"))?;

    // quadrature against closed forms
    let mut numeric_gap = 0.0f64;
    for d in [
        Distribution::uniform_zero_one(),
        Distribution::weibull(1.0, 0.5).unwrap(),
        Distribution::pareto(1.1).unwrap(),
        exp(1.0),
    ] {
        for k in [1usize, 2, 4] {
            if let Ok(closed) = min_mean(&d, k) {
                numeric_gap = numeric_gap.max((min_mean_numeric(&d, k).map_err(err)? / closed - 1.0).abs());
            }
        }
    }
    for k in [1usize, 2, 4, 8] {
        for theta in [0.1, 0.5 * k as f64] {
            let e = exp(1.0);
            let closed = e.min_order_mgf(k, theta).map_err(err)?;
            numeric_gap = numeric_gap.max((e.min_order_mgf_numeric(k, theta).map_err(err)? / closed - 1.0).abs());
        }
    }
    ensure(numeric_gap < 1e-8, format!("quadrature gap {numeric_gap:e}"))?;

    // same seed, same bits
    let cfg = scenarios::replication_config(Regime::MkvCor, 2, 100_000, 88).map_err(err)?;
    let bits = |r: replibound_core::SimResult| r.samples.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    ensure(
        bits(simulate(&cfg).map_err(err)?) == bits(simulate(&cfg).map_err(err)?),
        "same seed gave different samples",
    )?;
    Ok(format!(
        "martingale {mean:.5}±{se:.5}; ladder {ladder:.1e}; residual {residual:.1e}; quadrature {numeric_gap:.1e}; reproducible"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("closed-form decay-rate oracles", criterion_1),
        ("overload/underload utilizations and traces", criterion_2),
        ("bound dominance and tail slope", criterion_3),
        ("two-server policy means", criterion_4),
        ("replicated fork-join service law and stability", criterion_5),
        ("fork-join percentile factor", criterion_6),
        ("deferred replication usage and percentiles", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
