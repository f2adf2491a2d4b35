//! Discrete-event engine with one FIFO queue per server (or one shared
//! queue for [`Policy::CentralQueue`]).

use std::collections::VecDeque;

use rand::RngExt;

use super::events::EventQueue;
use super::result::{Recorder, SimResult};
use super::{Policy, Purging, SystemConfig};
use crate::error::{invalid, Result};

enum Event {
    Arrival,
    Done { server: usize, epoch: u64 },
}

#[derive(Default)]
struct Server {
    queue: VecDeque<(usize, f64)>,
    /// `(job, start time)` of the replica in service.
    current: Option<(usize, f64)>,
    /// Bumped on every start and cancellation, so stale completions are ignored.
    epoch: u64,
}

struct Job {
    arrival: f64,
    service: f64,
    first_server: usize,
    response: Option<f64>,
}

struct Engine<'a> {
    cfg: &'a SystemConfig,
    events: EventQueue<Event>,
    servers: Vec<Server>,
    central: VecDeque<(usize, f64)>,
    jobs: Vec<Job>,
    busy: Vec<f64>,
}

impl Engine<'_> {
    fn purging(&self) -> bool {
        self.cfg.purging == Purging::Purging
    }

    fn start(&mut self, s: usize, job: usize, service: f64, now: f64) {
        let server = &mut self.servers[s];
        server.epoch += 1;
        server.current = Some((job, now));
        self.events.schedule(now + service, Event::Done { server: s, epoch: server.epoch });
    }

    fn start_next(&mut self, s: usize, now: f64) {
        let source =
            if self.cfg.policy == Policy::CentralQueue { &mut self.central } else { &mut self.servers[s].queue };
        while let Some((job, service)) = source.pop_front() {
            if self.cfg.purging == Purging::Purging && self.jobs[job].response.is_some() {
                continue;
            }
            self.start(s, job, service, now);
            return;
        }
    }

    fn finish_replica(&mut self, s: usize, now: f64) {
        let (job, started) = self.servers[s].current.take().expect("completion on an idle server");
        self.busy[s] += now - started;
        if self.jobs[job].response.is_none() {
            self.jobs[job].response = Some(now - self.jobs[job].arrival);
            if self.purging() {
                self.cancel_siblings(job, s, now);
            }
        }
        self.start_next(s, now);
    }

    fn cancel_siblings(&mut self, job: usize, finished: usize, now: f64) {
        let group = self.cfg.replicas;
        let base = self.jobs[job].first_server;
        for s in base..base + group {
            if s == finished {
                continue;
            }
            if let Some((j, started)) = self.servers[s].current {
                if j == job {
                    self.busy[s] += now - started;
                    self.servers[s].current = None;
                    self.servers[s].epoch += 1;
                    self.start_next(s, now);
                }
            }
        }
    }
}

pub(crate) fn run(cfg: &SystemConfig) -> SimResult {
    let (servers, k) = (cfg.servers, cfg.replicas);
    let groups = servers / k;
    let mut rng = cfg.rng();
    let mut arrivals = cfg.arrivals.sampler(&mut rng);
    let mut engine = Engine {
        cfg,
        events: EventQueue::new(),
        servers: (0..servers).map(|_| Server::default()).collect(),
        central: VecDeque::new(),
        jobs: Vec::with_capacity(cfg.n_jobs),
        busy: vec![0.0; servers],
    };
    let mut reps = vec![0.0f64; k];
    let mut now = arrivals.next_interarrival(&mut rng);
    engine.events.schedule(now, Event::Arrival);

    while let Some((t, event)) = engine.events.pop() {
        now = t;
        match event {
            Event::Arrival => {
                let id = engine.jobs.len();
                cfg.service.sample_replicas(&mut rng, &mut reps);
                let base = match cfg.policy {
                    Policy::Random => rng.random_range(0..servers),
                    Policy::RoundRobin => id % servers,
                    Policy::CentralQueue => 0,
                    _ => (id % groups) * k,
                };
                let fastest = reps.iter().copied().fold(f64::INFINITY, f64::min);
                engine.jobs.push(Job { arrival: t, service: fastest, first_server: base, response: None });

                if cfg.policy == Policy::CentralQueue {
                    match engine.servers.iter().position(|s| s.current.is_none()) {
                        Some(s) => engine.start(s, id, reps[0], t),
                        None => engine.central.push_back((id, reps[0])),
                    }
                } else {
                    for (s, &x) in (base..base + k).zip(&reps) {
                        if engine.servers[s].current.is_none() && engine.servers[s].queue.is_empty() {
                            engine.start(s, id, x, t);
                        } else {
                            engine.servers[s].queue.push_back((id, x));
                        }
                    }
                }

                if id + 1 < cfg.n_jobs {
                    engine.events.schedule(t + arrivals.next_interarrival(&mut rng), Event::Arrival);
                }
            }
            Event::Done { server, epoch } => {
                if engine.servers[server].epoch == epoch && engine.servers[server].current.is_some() {
                    engine.finish_replica(server, t);
                }
            }
        }
    }

    let mut rec = Recorder::new(cfg, servers);
    for job in &engine.jobs {
        rec.job(job.response.expect("every job completes"), job.service);
    }
    rec.busy = engine.busy;
    rec.horizon = now;
    rec.finish(cfg)
}

/// Runs any per-server-queue policy, including replicated batches, on the
/// event engine; used to cross-check the recursions.
pub fn simulate_event_driven(cfg: &SystemConfig) -> Result<SimResult> {
    cfg.validate()?;
    match cfg.policy {
        Policy::ReplicatedBatches | Policy::Random | Policy::RoundRobin | Policy::CentralQueue => Ok(run(cfg)),
        other => Err(invalid(format!("policy {other} has no event-driven implementation"))),
    }
}
