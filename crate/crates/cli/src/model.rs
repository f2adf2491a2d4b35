//! Resolution of flags and config-file entries into core types.

use replibound_core::{ArrivalProcess, Distribution, ReplicaModel};

use crate::config::ConfigFile;
use crate::{ModelArgs, UsageError};

pub const MODEL_KEYS: &[&str] = &[
    "K",
    "k",
    "service",
    "service.rate",
    "arrivals",
    "arrivals.rate",
    "arrivals.p",
    "arrivals.lact",
    "arrivals.liact",
    "delta",
    "shared",
];

/// Model flags merged with the config file (flags win).
pub struct Model {
    pub file: ConfigFile,
    pub servers: Option<usize>,
    pub replicas: Option<usize>,
    service: Option<String>,
    mu: Option<f64>,
    arrivals: Option<String>,
    lambda: Option<f64>,
    chain: (Option<f64>, Option<f64>, Option<f64>),
    pub delta: Option<f64>,
    shared: Option<String>,
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

impl Model {
    pub fn resolve(args: &ModelArgs, extra_keys: &[&str]) -> anyhow::Result<Self> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let allowed: Vec<&str> = MODEL_KEYS.iter().chain(extra_keys).copied().collect();
        file.check_keys(&allowed)?;
        Ok(Self {
            servers: file.pick(args.servers, "K")?,
            replicas: file.pick(args.replicas, "k")?,
            service: file.pick(args.service.clone(), "service")?,
            mu: file.pick(args.mu, "service.rate")?,
            arrivals: file.pick(args.arrivals.clone(), "arrivals")?,
            lambda: file.pick(args.lambda, "arrivals.rate")?,
            chain: (
                file.pick(args.p, "arrivals.p")?,
                file.pick(args.lact, "arrivals.lact")?,
                file.pick(args.liact, "arrivals.liact")?,
            ),
            delta: file.pick(args.delta, "delta")?,
            shared: file.pick(args.shared.clone(), "shared")?,
            file,
        })
    }

    pub fn servers(&self) -> Result<usize, UsageError> {
        self.servers.ok_or_else(|| usage("missing --K (number of servers)"))
    }

    pub fn replicas_or(&self, default: usize) -> usize {
        self.replicas.unwrap_or(default)
    }

    /// The service law of one replica (the idiosyncratic part when correlated).
    pub fn service(&self) -> anyhow::Result<Distribution> {
        match (&self.service, self.mu) {
            (Some(_), Some(_)) => Err(usage("give either --service or --mu, not both").into()),
            (Some(s), None) => Ok(s.parse()?),
            (None, Some(mu)) => Ok(Distribution::exponential(mu)?),
            (None, None) => Err(usage("missing --service (or --mu)").into()),
        }
    }

    /// Rate of an exponential service law.
    pub fn exponential_rate(&self) -> anyhow::Result<f64> {
        let d = self.service()?;
        match d.kind() {
            replibound_core::dist::Kind::Exponential { rate } => Ok(*rate),
            _ => Err(usage(format!("this model needs exponential service, got {d}")).into()),
        }
    }

    pub fn replica_model(&self) -> anyhow::Result<ReplicaModel> {
        let idio = self.service()?;
        match self.delta {
            None => {
                if self.shared.is_some() {
                    return Err(usage("--shared needs --delta").into());
                }
                Ok(ReplicaModel::Independent(idio))
            }
            Some(delta) => {
                let shared = match &self.shared {
                    Some(s) => s.parse()?,
                    None => idio.clone(),
                };
                Ok(ReplicaModel::correlated(delta, shared, idio)?)
            }
        }
    }

    pub fn arrivals(&self) -> anyhow::Result<ArrivalProcess> {
        let chain = match self.chain {
            (None, None, None) => None,
            (Some(p), Some(a), Some(i)) => Some(ArrivalProcess::mmpp(p, a, i)?),
            _ => return Err(usage("a modulated stream needs all of --p, --lact and --liact").into()),
        };
        let given = [self.arrivals.is_some(), self.lambda.is_some(), chain.is_some()];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(usage("give exactly one of --arrivals, --lambda or --p/--lact/--liact").into());
        }
        if let Some(c) = chain {
            return Ok(c);
        }
        if let Some(rate) = self.lambda {
            return Ok(ArrivalProcess::poisson(rate)?);
        }
        match &self.arrivals {
            Some(s) => Ok(s.parse()?),
            None => Err(usage("missing --arrivals (or --lambda, or --p/--lact/--liact)").into()),
        }
    }

    /// Poisson rate of a renewal stream with exponential interarrivals.
    pub fn poisson_rate(&self) -> anyhow::Result<f64> {
        match self.arrivals()? {
            ArrivalProcess::Renewal(d) => match d.kind() {
                replibound_core::dist::Kind::Exponential { rate } => Ok(*rate),
                _ => Err(usage(format!("this model needs Poisson arrivals, got {d}")).into()),
            },
            other => Err(usage(format!("this model needs Poisson arrivals, got {other}")).into()),
        }
    }
}
