use anyhow::Context;
use replibound_core::bounds::{
    deferred_decay, deferred_usage, fj_bound, fjr_bound, theta_cor, theta_ind, theta_mkv, theta_mkv_cor, DeferredConfig,
};
use replibound_core::dist::{fit_hyperexp_to_pareto, Kind};
use replibound_core::sim::simulate as run_sim;
use replibound_core::sim::Summary;
use replibound_core::stability::{best_k, divisors, min_mean_correlated, utilization};
use replibound_core::{BoundResult, Error, Policy, Purging, ReplicationSpec, SimResult, SystemConfig};

use crate::model::Model;
use crate::output::{emit, header};
use crate::{BoundArgs, FitArgs, PolicyArg, SimulateArgs, StabilityArgs, UsageError};

const DEFAULT_EPSILON: f64 = 0.01;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn bound(args: &BoundArgs) -> anyhow::Result<()> {
    let model = Model::resolve(&args.model, &["regime", "offset", "epsilon", "out", "curve"])?;
    let file = &model.file;
    let regime: String = file
        .pick(args.regime.clone(), "regime")?
        .ok_or_else(|| usage("missing --regime (ind, mkv, cor, mkv_cor, fj, fjr or deferred)"))?;
    let epsilon: f64 = file.pick(args.epsilon, "epsilon")?.unwrap_or(DEFAULT_EPSILON);
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(usage(format!("--epsilon must lie in (0, 1), got {epsilon}")));
    }
    let out = file.pick(args.out.clone(), "out")?;
    let curve = file.pick(args.curve.clone(), "curve")?;

    let mut config = vec![format!("regime={regime}"), format!("epsilon={epsilon}")];
    let mut extra = String::new();
    let result = match regime.as_str() {
        "ind" | "mkv" | "cor" | "mkv_cor" => {
            let servers = model.servers()?;
            let spec = ReplicationSpec::new(servers, model.replicas_or(1), model.replica_model()?, model.arrivals()?)?;
            config.push(format!(
                "K={} k={} arrivals={} service={}",
                spec.servers(),
                spec.replicas(),
                spec.arrivals,
                spec.service
            ));
            match regime.as_str() {
                "ind" => theta_ind(&spec)?,
                "mkv" => theta_mkv(&spec)?,
                "cor" => theta_cor(&spec)?,
                _ => theta_mkv_cor(&spec)?,
            }
        }
        "fj" | "fjr" => {
            let servers = model.servers()?;
            let mu = model.exponential_rate()?;
            let arrivals = model.arrivals()?;
            config.push(format!("K={servers} mu={mu} arrivals={arrivals}"));
            if regime == "fj" {
                fj_bound(servers, mu, &arrivals)?
            } else {
                fjr_bound(servers, mu, &arrivals)?
            }
        }
        "deferred" => {
            let offset: f64 =
                file.pick(args.offset, "offset")?.ok_or_else(|| usage("the deferred regime needs --offset"))?;
            let lambda = model.poisson_rate()?;
            let mu = model.exponential_rate()?;
            let cfg = match model.delta {
                Some(delta) => DeferredConfig::correlated(offset, lambda, delta, mu)?,
                None => DeferredConfig::independent_exponential(offset, lambda, mu)?,
            };
            config.push(format!("offset={offset} lambda={lambda} mu={mu} delta={}", model.delta.unwrap_or(0.0)));
            let u = deferred_usage(&cfg)?;
            extra = format!("# usage: rho1={} rho2={} u={}\n", u.rho1, u.rho2, u.u);
            deferred_decay(&cfg)?
        }
        other => return Err(usage(format!("unknown regime '{other}'"))),
    };

    let mut text = header("bound", &config, None);
    text.push_str(&extra);
    text.push_str(BoundResult::CSV_HEADER);
    text.push_str(",epsilon,quantile\n");
    let q = if result.stable { result.quantile(epsilon)?.to_string() } else { "inf".into() };
    text.push_str(&format!("{},{epsilon},{q}\n", result.csv_row()));
    emit(out.as_deref(), &text)?;
    if !result.stable {
        return Err(Error::UnstableBound.into());
    }

    if let Some(path) = curve {
        let mut c = header("bound --curve", &config, None);
        c.push_str("sigma,bound\n");
        for (s, b) in result.curve()? {
            c.push_str(&format!("{s},{b}\n"));
        }
        emit(Some(&path), &c)?;
    }
    Ok(())
}

fn policy(arg: PolicyArg, offset: Option<f64>) -> anyhow::Result<Policy> {
    Ok(match arg {
        PolicyArg::Replicated => Policy::ReplicatedBatches,
        PolicyArg::Random => Policy::Random,
        PolicyArg::RoundRobin => Policy::RoundRobin,
        PolicyArg::CentralQueue => Policy::CentralQueue,
        PolicyArg::ForkJoin => Policy::ForkJoin,
        PolicyArg::Fjr => Policy::ForkJoinReplication,
        PolicyArg::Deferred => {
            Policy::Deferred { offset: offset.ok_or_else(|| usage("the deferred policy needs --offset"))? }
        }
    })
}

pub fn simulate(args: &SimulateArgs) -> anyhow::Result<()> {
    let model =
        Model::resolve(&args.model, &["policy", "offset", "non_purging", "jobs", "seed", "warmup", "reps", "out"])?;
    let file = &model.file;
    let policy_arg = match args.policy {
        Some(p) => p,
        None => match file.get("policy") {
            Some(raw) => <PolicyArg as clap::ValueEnum>::from_str(raw, true)
                .map_err(|_| usage(format!("config key 'policy': unknown policy '{raw}'")))?,
            None => return Err(usage("missing --policy")),
        },
    };
    let policy = policy(policy_arg, file.pick(args.offset, "offset")?)?;
    let non_purging = args.non_purging || file.pick(None::<bool>, "non_purging")?.unwrap_or(false);
    let jobs: usize = file.pick(args.jobs, "jobs")?.unwrap_or(100_000);
    if jobs == 0 {
        return Err(Error::EmptySample.into());
    }
    let seed: u64 = file.pick(args.seed, "seed")?.unwrap_or(1);
    let warmup: f64 = file.pick(args.warmup, "warmup")?.unwrap_or(0.01);
    let reps: usize = file.pick(args.reps, "reps")?.unwrap_or(1);
    if reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    let out = file.pick(args.out.clone(), "out")?;

    let servers = match policy {
        Policy::Deferred { .. } => model.servers.unwrap_or(2),
        _ => model.servers()?,
    };
    let replicas = model.replicas_or(1);
    let cfg = SystemConfig::new(servers, replicas, model.arrivals()?, model.replica_model()?, policy)
        .with_jobs(jobs)
        .with_warmup(warmup)
        .with_purging(if non_purging { Purging::NonPurging } else { Purging::Purging });
    cfg.validate()?;

    let results: Vec<SimResult> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..reps as u64)
            .map(|i| {
                let cfg = cfg.clone().with_seed(seed + i);
                s.spawn(move || run_sim(&cfg))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect::<Result<_, _>>()
    })?;

    let config = vec![cfg.to_string(), format!("reps={reps}")];
    let mut summary = header("simulate", &config, Some(seed));
    summary.push_str("policy,");
    summary.push_str(Summary::CSV_HEADER);
    summary.push('\n');
    for r in &results {
        summary.push_str(&format!("{},{}\n", policy.name(), r.summary().csv_row()));
    }

    match out {
        None => emit(None, &summary),
        Some(prefix) => {
            let mut ccdf = header("simulate", &config, Some(seed));
            ccdf.push_str("seed,sigma,ccdf\n");
            for r in &results {
                for (s, p) in r.ccdf_points() {
                    ccdf.push_str(&format!("{},{s},{p}\n", r.seed));
                }
            }
            let with_suffix = |suffix: &str| {
                let mut p = prefix.clone().into_os_string();
                p.push(suffix);
                std::path::PathBuf::from(p)
            };
            emit(Some(&with_suffix(".summary.csv")), &summary)?;
            emit(Some(&with_suffix(".ccdf.csv")), &ccdf)
        }
    }
}

pub fn stability(args: &StabilityArgs) -> anyhow::Result<()> {
    let model = Model::resolve(&args.model, &["out"])?;
    let out = model.file.pick(args.out.clone(), "out")?;
    let servers = model.servers()?;
    let service = model.replica_model()?;
    let arrivals = model.arrivals()?;
    let best = match best_k(&service, servers) {
        Ok(k) => Some(k),
        Err(Error::AllUnstable) => None,
        Err(e) => return Err(e.into()),
    };

    let config = vec![format!("K={servers} arrivals={arrivals} service={service}")];
    let mut text = header("stability", &config, None);
    text.push_str("k,min_mean,objective,utilization,stable,best\n");
    for k in divisors(servers) {
        let spec = ReplicationSpec::new(servers, k, service.clone(), arrivals.clone())?;
        let row = match min_mean_correlated(&service, k) {
            Ok(m) => {
                let rho = utilization(&spec)?;
                format!("{k},{m},{},{rho},{},{}", k as f64 * m, rho < 1.0, best == Some(k))
            }
            Err(Error::DivergentMean { .. }) => format!("{k},inf,inf,inf,false,false"),
            Err(e) => return Err(e.into()),
        };
        text.push_str(&row);
        text.push('\n');
    }
    emit(out.as_deref(), &text)
}

pub fn fit(args: &FitArgs) -> anyhow::Result<()> {
    let d = fit_hyperexp_to_pareto(args.alpha, args.phases, args.lo, args.hi)
        .with_context(|| format!("fitting Pareto({}) on [{}, {}]", args.alpha, args.lo, args.hi))?;
    let Kind::HyperExponential { weights, rates } = d.kind() else {
        unreachable!("fit returns a hyperexponential");
    };
    let config = vec![format!("alpha={} phases={} lo={} hi={}", args.alpha, args.phases, args.lo, args.hi)];
    let mut text = header("fit", &config, None);
    text.push_str("phase,weight,rate\n");
    for (i, (p, mu)) in weights.iter().zip(rates).enumerate() {
        text.push_str(&format!("{},{p},{mu}\n", i + 1));
    }
    emit(args.out.as_deref(), &text)
}
