//! Data behind the reference figures, one or more CSV files per figure.

use std::path::{Path, PathBuf};

use replibound_core::bounds::{deferred_bound, deferred_usage, fj_bound, fjr_bound, theta, theta_cor};
use replibound_core::dist::Distribution;
use replibound_core::scenarios::{self, EPSILON};
use replibound_core::sim::simulate;
use replibound_core::{ArrivalProcess, Policy, Regime, ReplicationSpec, Result, SimResult, SystemConfig};

use crate::output::{header, write_atomic, OUT_DIR_ENV};
use crate::{FigureArgs, FigureName, Scale};

struct Ctx {
    dir: PathBuf,
    scale: Scale,
    seed: u64,
    name: &'static str,
}

impl Ctx {
    fn write(&self, file: &str, config: &[String], seed: Option<u64>, body: &str) -> anyhow::Result<()> {
        let path = self.dir.join(file);
        let command = format!("figure {} --scale {}", self.name, scale_name(self.scale));
        write_atomic(&path, &(header(&command, config, seed) + body))?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    fn jobs(&self, desk: usize) -> usize {
        match self.scale {
            Scale::Desk => desk,
            Scale::Full => desk * 10,
        }
    }
}

fn scale_name(s: Scale) -> &'static str {
    match s {
        Scale::Desk => "desk",
        Scale::Full => "full",
    }
}

fn figure_name(n: FigureName) -> &'static str {
    match n {
        FigureName::Fig2 => "fig2",
        FigureName::Fig3 => "fig3",
        FigureName::Fig4a => "fig4a",
        FigureName::Fig4b => "fig4b",
        FigureName::Fig4c => "fig4c",
        FigureName::Fig4d => "fig4d",
        FigureName::Fig6 => "fig6",
        FigureName::Fig7 => "fig7",
        FigureName::Fig8 => "fig8",
        FigureName::Fig9 => "fig9",
    }
}

fn out_dir(arg: Option<&Path>) -> PathBuf {
    match (arg, std::env::var_os(OUT_DIR_ENV)) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => PathBuf::from("figures"),
    }
}

/// Runs every configuration on its own thread, results in input order.
fn simulate_all(configs: &[SystemConfig]) -> Result<Vec<SimResult>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || simulate(c))).collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    })
}

fn fmt_quantile(b: &replibound_core::BoundResult) -> Result<String> {
    Ok(if b.stable { b.quantile(EPSILON)?.to_string() } else { "inf".into() })
}

pub fn run(args: &FigureArgs) -> anyhow::Result<()> {
    let ctx =
        Ctx { dir: out_dir(args.out_dir.as_deref()), scale: args.scale, seed: args.seed, name: figure_name(args.name) };
    match args.name {
        FigureName::Fig2 => fig2(&ctx),
        FigureName::Fig3 => fig3(&ctx),
        FigureName::Fig4a => fig4(&ctx, Regime::Ind),
        FigureName::Fig4b => fig4(&ctx, Regime::Cor),
        FigureName::Fig4c => fig4(&ctx, Regime::Mkv),
        FigureName::Fig4d => fig4(&ctx, Regime::MkvCor),
        FigureName::Fig6 => fig6(&ctx),
        FigureName::Fig7 => fig7(&ctx),
        FigureName::Fig8 => fig8(&ctx),
        FigureName::Fig9 => fig9(&ctx),
    }
}

/// Response-time traces of the Pareto(1.1) system, started empty.
fn fig2(ctx: &Ctx) -> anyhow::Result<()> {
    let jobs = ctx.jobs(10_000);
    let configs = scenarios::FACTORS
        .iter()
        .enumerate()
        .map(|(i, &k)| scenarios::overload_config(k, jobs, ctx.seed + i as u64))
        .collect::<Result<Vec<_>>>()?;
    for (cfg, r) in configs.iter().zip(simulate_all(&configs)?) {
        let mut body = String::from("job,response\n");
        for (j, x) in r.trace.as_deref().unwrap_or_default().iter().enumerate() {
            body.push_str(&format!("{j},{x}\n"));
        }
        ctx.write(&format!("fig2_k{}.csv", cfg.replicas), &[cfg.to_string()], Some(cfg.seed), &body)?;
    }
    Ok(())
}

/// 99%-quantile bound against the correlation degree for k = 1, 2, 4.
fn fig3(ctx: &Ctx) -> anyhow::Result<()> {
    let mut body = String::from("delta");
    for k in scenarios::FACTORS {
        body.push_str(&format!(",q99_k{k}"));
    }
    body.push('\n');
    for step in 0..=20 {
        let delta = step as f64 / 20.0;
        body.push_str(&format!("{delta}"));
        for k in scenarios::FACTORS {
            let spec = ReplicationSpec::new(
                scenarios::SERVERS,
                k,
                scenarios::correlated_service(delta, k)?,
                scenarios::poisson_arrivals(),
            )?;
            body.push_str(&format!(",{}", fmt_quantile(&theta_cor(&spec)?)?));
        }
        body.push('\n');
    }
    let config = vec![format!(
        "K={} arrivals={} replica rate delta*k+(1-delta) epsilon={EPSILON}",
        scenarios::SERVERS,
        scenarios::poisson_arrivals()
    )];
    ctx.write("fig3.csv", &config, None, &body)
}

/// Simulated CCDF against the bound, one file per replication factor.
fn fig4(ctx: &Ctx, regime: Regime) -> anyhow::Result<()> {
    let jobs = ctx.jobs(10_000_000);
    let configs = scenarios::FACTORS
        .iter()
        .enumerate()
        .map(|(i, &k)| scenarios::replication_config(regime, k, jobs, ctx.seed + i as u64))
        .collect::<Result<Vec<_>>>()?;
    let results = match ctx.scale {
        Scale::Desk => simulate_all(&configs)?,
        // full-length sample vectors are large; one at a time
        Scale::Full => configs.iter().map(simulate).collect::<Result<Vec<_>>>()?,
    };
    for (cfg, r) in configs.iter().zip(results) {
        let b = theta(&scenarios::replication_spec(regime, cfg.replicas)?)?;
        let mut body = String::from("sigma,empirical,bound\n");
        for s in r.sigma_grid() {
            body.push_str(&format!("{s},{},{}\n", r.ccdf(s), b.ccdf(s)?));
        }
        let config = vec![cfg.to_string(), b.csv_row()];
        ctx.write(&format!("{}_k{}.csv", ctx.name, cfg.replicas), &config, Some(cfg.seed), &body)?;
    }
    Ok(())
}

/// Fork-join with and without replication as the number of servers grows.
fn fig6(ctx: &Ctx) -> anyhow::Result<()> {
    let a = ArrivalProcess::poisson(scenarios::FORK_JOIN_LAMBDA)?;
    let mut body = String::from("K,q99_fj,q99_fjr\n");
    for servers in scenarios::FORK_JOIN_SERVERS {
        let mu = scenarios::fork_join_task_rate(servers);
        let fj = fmt_quantile(&fj_bound(servers, mu, &a)?)?;
        let fjr = fmt_quantile(&fjr_bound(servers, mu, &a)?)?;
        body.push_str(&format!("{servers},{fj},{fjr}\n"));
    }
    let config = vec![format!("arrivals={a} task rate=K epsilon={EPSILON}")];
    ctx.write("fig6.csv", &config, None, &body)
}

/// Simulated CCDFs of fork-join and of fork-join with replication.
fn fig7(ctx: &Ctx) -> anyhow::Result<()> {
    let servers = scenarios::FJR_SERVERS;
    let a = ArrivalProcess::poisson(scenarios::fork_join_rate_for_load(servers, scenarios::FJR_FJ_LOAD))?;
    let jobs = ctx.jobs(1_000_000);
    let mut labels = vec!["fj".to_string()];
    let mut configs = vec![SystemConfig::new(servers, 1, a.clone(), Distribution::exponential(1.0)?, Policy::ForkJoin)];
    for delta in scenarios::FJR_CORRELATIONS {
        labels.push(format!("fjr_delta{delta}"));
        configs.push(SystemConfig::new(
            servers,
            1,
            a.clone(),
            scenarios::fjr_service(delta)?,
            Policy::ForkJoinReplication,
        ));
    }
    let configs: Vec<_> =
        configs.into_iter().enumerate().map(|(i, c)| c.with_jobs(jobs).with_seed(ctx.seed + i as u64)).collect();
    let mut body = String::from("curve,sigma,ccdf\n");
    for (label, r) in labels.iter().zip(simulate_all(&configs)?) {
        for (s, p) in r.ccdf_points() {
            body.push_str(&format!("{label},{s},{p}\n"));
        }
    }
    let config: Vec<String> = configs.iter().map(|c| c.to_string()).collect();
    ctx.write("fig7.csv", &config, Some(ctx.seed), &body)
}

/// `0, 1/per_unit, .., max`, built by division so grid points print cleanly.
fn offsets(max: usize, per_unit: usize) -> Vec<f64> {
    (0..=max * per_unit).map(|i| i as f64 / per_unit as f64).collect()
}

/// Deferred replication: usage, quantile bound and simulated quantile
/// against the offset, one file per correlation degree.
fn fig8(ctx: &Ctx) -> anyhow::Result<()> {
    let jobs = ctx.jobs(1_000_000);
    for (j, delta) in scenarios::DEFERRED_CORRELATIONS.into_iter().enumerate() {
        let grid = offsets(4, 5);
        let configs = grid
            .iter()
            .enumerate()
            .map(|(i, &o)| scenarios::deferred_config(o, delta, jobs, ctx.seed + (j * grid.len() + i) as u64))
            .collect::<Result<Vec<_>>>()?;
        let mut body = String::from("offset,u,q99_bound,q99_sim\n");
        for (&o, r) in grid.iter().zip(simulate_all(&configs)?) {
            let cfg = scenarios::deferred_correlated(o, delta)?;
            let u = deferred_usage(&cfg)?.u;
            let q = deferred_bound(&cfg, EPSILON)?;
            body.push_str(&format!("{o},{u},{q},{}\n", r.quantile(1.0 - EPSILON)));
        }
        let config = vec![
            format!(
                "lambda={} mu={} delta={delta} epsilon={EPSILON}",
                scenarios::DEFERRED_LAMBDA,
                scenarios::DEFERRED_MU
            ),
            format!("n_jobs={jobs} seed of offset i = base + {} + i", j * grid.len()),
        ];
        ctx.write(&format!("fig8_delta{delta}.csv"), &config, Some(ctx.seed), &body)?;
    }
    Ok(())
}

/// Analytic resource usage against the offset.
fn fig9(ctx: &Ctx) -> anyhow::Result<()> {
    let mut body = String::from("offset");
    for delta in scenarios::DEFERRED_CORRELATIONS {
        body.push_str(&format!(",u_delta{delta}"));
    }
    body.push('\n');
    for o in offsets(4, 10) {
        body.push_str(&format!("{o}"));
        for delta in scenarios::DEFERRED_CORRELATIONS {
            body.push_str(&format!(",{}", deferred_usage(&scenarios::deferred_correlated(o, delta)?)?.u));
        }
        body.push('\n');
    }
    let config = vec![format!("lambda={} mu={}", scenarios::DEFERRED_LAMBDA, scenarios::DEFERRED_MU)];
    ctx.write("fig9.csv", &config, None, &body)
}
