//! Fork-join with replication: whenever a server becomes idle during a job,
//! it starts a replica of a uniformly chosen unfinished task; the first copy
//! of a task to finish cancels the others.

use rand::{Rng, RngExt, SeedableRng};
use rand_pcg::Pcg64Mcg;

use super::result::{Recorder, SimResult};
use super::SystemConfig;
use crate::dist::{Distribution, ReplicaModel};

/// Service of a fresh copy of a task: `(1−δ)·fresh + δ·shared(task)`.
struct TaskLaw<'a> {
    delta: f64,
    fresh: &'a Distribution,
    shared: Option<&'a Distribution>,
}

impl<'a> TaskLaw<'a> {
    fn new(model: &'a ReplicaModel) -> Self {
        match model {
            ReplicaModel::Independent(d) => Self { delta: 0.0, fresh: d, shared: None },
            ReplicaModel::AdditiveCorrelated(c) => Self { delta: c.delta(), fresh: c.idio(), shared: Some(c.shared()) },
        }
    }

    fn shared_part<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.shared {
            Some(d) if self.delta > 0.0 => self.delta * d.sample(rng),
            _ => 0.0,
        }
    }

    fn copy<R: Rng + ?Sized>(&self, shared: f64, rng: &mut R) -> f64 {
        if self.delta < 1.0 {
            shared + (1.0 - self.delta) * self.fresh.sample(rng)
        } else {
            shared
        }
    }
}

/// Scratch state for one job on `K` servers.
struct JobRun {
    shared: Vec<f64>,
    done: Vec<bool>,
    /// `(task, finish time)` per server.
    running: Vec<Option<(usize, f64)>>,
    open: Vec<usize>,
}

impl JobRun {
    fn new(servers: usize) -> Self {
        Self {
            shared: vec![0.0; servers],
            done: vec![false; servers],
            running: vec![None; servers],
            open: Vec::with_capacity(servers),
        }
    }

    /// Time from fork until every task has a finished copy.
    fn run<R: Rng + ?Sized>(&mut self, law: &TaskLaw, rng: &mut R) -> f64 {
        let k = self.done.len();
        for i in 0..k {
            self.shared[i] = law.shared_part(rng);
            self.done[i] = false;
        }
        for i in 0..k {
            self.running[i] = Some((i, law.copy(self.shared[i], rng)));
        }
        let mut remaining = k;
        let mut now = 0.0;
        while remaining > 0 {
            let (task, t) = self
                .running
                .iter()
                .flatten()
                .copied()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("a task is always running while the job is open");
            now = t;
            self.done[task] = true;
            remaining -= 1;
            for slot in self.running.iter_mut() {
                if matches!(slot, Some((j, _)) if *j == task) {
                    *slot = None;
                }
            }
            if remaining == 0 {
                break;
            }
            self.open.clear();
            self.open.extend((0..k).filter(|&i| !self.done[i]));
            for s in 0..k {
                if self.running[s].is_none() {
                    let task = self.open[rng.random_range(0..self.open.len())];
                    self.running[s] = Some((task, now + law.copy(self.shared[task], rng)));
                }
            }
            debug_assert!(self.running.iter().all(Option::is_some), "a server idles while tasks remain");
        }
        now
    }
}

pub(crate) fn run(cfg: &SystemConfig) -> SimResult {
    let servers = cfg.servers;
    let law = TaskLaw::new(&cfg.service);
    let mut rng = cfg.rng();
    let mut arrivals = cfg.arrivals.sampler(&mut rng);
    let mut rec = Recorder::new(cfg, servers);
    let mut job = JobRun::new(servers);
    let (mut now, mut free) = (0.0f64, 0.0f64);
    let mut total = 0.0;

    for _ in 0..cfg.n_jobs {
        now += arrivals.next_interarrival(&mut rng);
        let service = job.run(&law, &mut rng);
        free = now.max(free) + service;
        total += service;
        rec.job(free - now, service);
    }
    // no server idles while a job is in service
    rec.busy.iter_mut().for_each(|b| *b = total);
    rec.horizon = free.max(now);
    rec.finish(cfg)
}

/// `n` job service times of the replicating fork-join system.
pub fn fjr_job_services(servers: usize, model: &ReplicaModel, n: usize, seed: u64) -> Vec<f64> {
    let law = TaskLaw::new(model);
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let mut job = JobRun::new(servers);
    (0..n).map(|_| job.run(&law, &mut rng)).collect()
}
