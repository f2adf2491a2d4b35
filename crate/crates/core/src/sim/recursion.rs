//! Lindley-type recursions: `start = max(arrival, free)`, `free = start + service`.

use rand::SeedableRng;
use rand_pcg::Pcg64Mcg;

use super::result::{Recorder, SimResult};
use super::{Purging, SystemConfig};
use crate::dist::ReplicaModel;

/// Replicated batches. Under purging the `k` servers of a group always
/// free up together, so one recursion per group suffices; without purging
/// each server keeps its own backlog.
pub(crate) fn replicated(cfg: &SystemConfig) -> SimResult {
    let (servers, k) = (cfg.servers, cfg.replicas);
    let groups = servers / k;
    let mut rng = cfg.rng();
    let mut arrivals = cfg.arrivals.sampler(&mut rng);
    let mut rec = Recorder::new(cfg, servers);
    let mut free = vec![0.0f64; servers];
    let mut reps = vec![0.0f64; k];
    let mut now = 0.0;

    for n in 0..cfg.n_jobs {
        now += arrivals.next_interarrival(&mut rng);
        cfg.service.sample_replicas(&mut rng, &mut reps);
        let base = (n % groups) * k;
        let fastest = reps.iter().copied().fold(f64::INFINITY, f64::min);
        let done = match cfg.purging {
            Purging::Purging => {
                let done = now.max(free[base]) + fastest;
                free[base..base + k].fill(done);
                for b in &mut rec.busy[base..base + k] {
                    *b += fastest;
                }
                done
            }
            Purging::NonPurging => {
                let mut first = f64::INFINITY;
                for (j, &x) in (base..base + k).zip(&reps) {
                    free[j] = now.max(free[j]) + x;
                    rec.busy[j] += x;
                    first = first.min(free[j]);
                }
                first
            }
        };
        rec.job(done - now, fastest);
    }
    rec.horizon = free.iter().copied().fold(now, f64::max);
    rec.finish(cfg)
}

fn draw_tasks<R: rand::Rng + ?Sized>(model: &ReplicaModel, rng: &mut R, tasks: &mut [f64]) {
    // tasks are distinct pieces of work: each gets its own shared component
    for t in tasks.iter_mut() {
        model.sample_replicas(rng, std::slice::from_mut(t));
    }
}

/// Blocking fork-join: the job's service is its slowest task.
pub(crate) fn fork_join(cfg: &SystemConfig) -> SimResult {
    let servers = cfg.servers;
    let mut rng = cfg.rng();
    let mut arrivals = cfg.arrivals.sampler(&mut rng);
    let mut rec = Recorder::new(cfg, servers);
    let mut tasks = vec![0.0f64; servers];
    let (mut now, mut free) = (0.0f64, 0.0f64);

    for _ in 0..cfg.n_jobs {
        now += arrivals.next_interarrival(&mut rng);
        draw_tasks(&cfg.service, &mut rng, &mut tasks);
        let service = tasks.iter().copied().fold(0.0, f64::max);
        free = now.max(free) + service;
        for (b, t) in rec.busy.iter_mut().zip(&tasks) {
            *b += t;
        }
        rec.job(free - now, service);
    }
    rec.horizon = free.max(now);
    rec.finish(cfg)
}

/// `n` fork-join job service times (maximum of `servers` tasks).
pub fn fork_join_job_services(servers: usize, model: &ReplicaModel, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let mut tasks = vec![0.0f64; servers];
    (0..n)
        .map(|_| {
            draw_tasks(model, &mut rng, &mut tasks);
            tasks.iter().copied().fold(0.0, f64::max)
        })
        .collect()
}

/// Two servers; server 2 only ever works on a replica of the job in
/// service at server 1, so the system is one queue with service
/// `min{x, Δ + y}`.
pub(crate) fn deferred(cfg: &SystemConfig, offset: f64) -> SimResult {
    let mut rng = cfg.rng();
    let mut arrivals = cfg.arrivals.sampler(&mut rng);
    let mut rec = Recorder::new(cfg, 2);
    let mut pair = [0.0f64; 2];
    let (mut now, mut free) = (0.0f64, 0.0f64);

    for _ in 0..cfg.n_jobs {
        now += arrivals.next_interarrival(&mut rng);
        cfg.service.sample_replicas(&mut rng, &mut pair);
        let service = pair[0].min(offset + pair[1]);
        free = now.max(free) + service;
        rec.busy[0] += service;
        rec.busy[1] += (service - offset).max(0.0);
        rec.job(free - now, service);
    }
    rec.horizon = free.max(now);
    rec.finish(cfg)
}

#[cfg(test)]
mod tests {
    use super::super::{simulate, Policy};
    use super::*;
    use crate::bounds::harmonic;
    use crate::dist::{ArrivalProcess, Distribution};

    fn exp(rate: f64) -> Distribution {
        Distribution::exponential(rate).unwrap()
    }

    fn poisson(rate: f64) -> ArrivalProcess {
        ArrivalProcess::poisson(rate).unwrap()
    }

    #[test]
    fn mm1_mean() {
        let cfg = SystemConfig::new(1, 1, poisson(0.5), exp(1.0), Policy::ReplicatedBatches)
            .with_jobs(1_000_000)
            .with_seed(3);
        let r = simulate(&cfg).unwrap();
        assert!((r.mean / 2.0 - 1.0).abs() < 0.02, "{}", r.mean);
    }

    #[test]
    fn zero_service_zero_response() {
        let cfg =
            SystemConfig::new(4, 2, poisson(1.0), Distribution::deterministic(0.0).unwrap(), Policy::ReplicatedBatches)
                .with_jobs(1000);
        let r = simulate(&cfg).unwrap();
        assert!(r.samples.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn count_respects_warmup() {
        let cfg =
            SystemConfig::new(1, 1, poisson(0.5), exp(1.0), Policy::ReplicatedBatches).with_jobs(1234).with_warmup(0.1);
        assert_eq!(simulate(&cfg).unwrap().count(), 1234 - 123);
    }

    #[test]
    fn nonpurging_single_replica_identical() {
        let base =
            SystemConfig::new(4, 1, poisson(2.0), exp(1.0), Policy::ReplicatedBatches).with_jobs(20_000).with_seed(8);
        let a = simulate(&base).unwrap();
        let b = simulate(&base.clone().with_purging(Purging::NonPurging)).unwrap();
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn nonpurging_k_fold_utilization() {
        // base load ρ = λ/(Kμ) = 0.2
        let cfg = SystemConfig::new(4, 2, poisson(0.8), exp(1.0), Policy::ReplicatedBatches)
            .with_jobs(1_000_000)
            .with_seed(10)
            .with_purging(Purging::NonPurging);
        let r = simulate(&cfg).unwrap();
        let mean_util = r.utilizations.iter().sum::<f64>() / 4.0;
        assert!((mean_util / 0.4 - 1.0).abs() < 0.03, "{mean_util}");
        assert!(r.mean.is_finite() && r.mean < 10.0);
    }

    #[test]
    fn fork_join_service_mean_is_harmonic() {
        let s = fork_join_job_services(4, &ReplicaModel::Independent(exp(1.0)), 1_000_000, 2);
        let m = s.iter().sum::<f64>() / s.len() as f64;
        assert!((m / harmonic(4) - 1.0).abs() < 0.01, "{m}");
    }

    #[test]
    fn fork_join_single_task_is_plain_queue() {
        let fj = SystemConfig::new(1, 1, poisson(0.5), exp(1.0), Policy::ForkJoin).with_jobs(10_000);
        let rb = SystemConfig { policy: Policy::ReplicatedBatches, ..fj.clone() };
        assert_eq!(simulate(&fj).unwrap().samples, simulate(&rb).unwrap().samples);
    }

    #[test]
    fn fork_join_beyond_threshold_drifts() {
        let cfg = SystemConfig::new(4, 1, poisson(0.49), exp(1.0), Policy::ForkJoin)
            .with_jobs(200_000)
            .with_warmup(0.0)
            .with_trace(true);
        let (first, last) = simulate(&cfg).unwrap().trace_decile_means().unwrap();
        assert!(last > 3.0 * first, "{first} -> {last}");
    }

    #[test]
    fn deferred_without_replicas_is_mm1() {
        let cfg = SystemConfig::new(2, 1, poisson(0.75), exp(1.0), Policy::Deferred { offset: f64::INFINITY })
            .with_jobs(1_000_000)
            .with_seed(6);
        let r = simulate(&cfg).unwrap();
        assert!((r.mean / 4.0 - 1.0).abs() < 0.02, "{}", r.mean);
        assert_eq!(r.utilizations[1], 0.0);
    }

    #[test]
    fn deferred_usage_invariant_in_offset() {
        for offset in [0.0, 0.5, 2.0] {
            let cfg = SystemConfig::new(2, 1, poisson(0.75), exp(1.0), Policy::Deferred { offset })
                .with_jobs(1_000_000)
                .with_seed(7);
            let u: f64 = simulate(&cfg).unwrap().utilizations.iter().sum();
            assert!((u / 0.75 - 1.0).abs() < 0.02, "Δ={offset}: {u}");
        }
    }

    #[test]
    fn deferred_correlated_usage() {
        let model = ReplicaModel::correlated(0.25, exp(1.0), exp(1.0)).unwrap();
        let cfg = SystemConfig::new(2, 1, poisson(0.75), model, Policy::Deferred { offset: 0.0 })
            .with_jobs(1_000_000)
            .with_seed(5);
        let u: f64 = simulate(&cfg).unwrap().utilizations.iter().sum();
        assert!((u / 0.9375 - 1.0).abs() < 0.02, "{u}");
    }
}
