//! Worker pool and parallel Monte Carlo drivers. Realizations are indexed
//! and their outage indicators summed as integers, so an estimate does not
//! depend on how the indices are split across workers.

use duplexnet_core::montecarlo::threegpp::{outage_indicator_3gpp, ThreeGppParams};
use duplexnet_core::montecarlo::{outage_indicator, SeedPolicy, SimSettings, MIN_REALIZATIONS};
use duplexnet_core::{AntennaSystem, Error, NetworkConfig, OutageEstimate, Scenario};
use rayon::prelude::*;

use crate::error::RunError;

pub struct Pool {
    inner: rayon::ThreadPool,
}

impl Pool {
    /// `workers = None` uses one thread per available core.
    pub fn new(workers: Option<usize>) -> Result<Self, RunError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = workers {
            if n == 0 {
                return Err(RunError::config("workers must be at least 1"));
            }
            b = b.num_threads(n);
        }
        let inner = b
            .build()
            .map_err(|e| RunError::config(format!("cannot start worker pool: {e}")))?;
        Ok(Self { inner })
    }

    pub fn workers(&self) -> usize {
        self.inner.current_num_threads()
    }

    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.inner.install(f)
    }

    /// Maps `f` over `items` on the pool, keeping input order.
    pub fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        self.inner.install(|| items.par_iter().map(f).collect())
    }
}

fn count_outages(n: u64, indicator: impl Fn(u64) -> bool + Sync + Send) -> u64 {
    (0..n).into_par_iter().filter(|&i| indicator(i)).count() as u64
}

fn check_n(n: u64) -> Result<(), Error> {
    if n < MIN_REALIZATIONS {
        return Err(Error::InvalidConfig(format!(
            "at least {MIN_REALIZATIONS} realizations are required, got {n}"
        )));
    }
    Ok(())
}

/// Parallel counterpart of `estimate_outage_mc_with`, identical to it for
/// the same inputs. Runs on the calling pool.
pub fn mc_outage(
    scenario: Scenario,
    cfg: &NetworkConfig,
    ant: &AntennaSystem,
    settings: &SimSettings,
    n: u64,
    seed: u64,
) -> Result<OutageEstimate, Error> {
    cfg.validate()?;
    ant.validate()?;
    settings.validate(cfg.lambda)?;
    check_n(n)?;
    let seeds = SeedPolicy::new(seed);
    let outages = count_outages(n, |i| outage_indicator(scenario, cfg, ant, settings, &seeds, i));
    Ok(OutageEstimate::monte_carlo(outages, n))
}

/// Parallel counterpart of `estimate_outage_3gpp`.
pub fn mc_outage_3gpp(
    scenario: Scenario,
    params: &ThreeGppParams,
    ant: &AntennaSystem,
    n: u64,
    seed: u64,
) -> Result<OutageEstimate, Error> {
    let model = params.model()?;
    ant.validate()?;
    check_n(n)?;
    let seeds = SeedPolicy::new(seed);
    let outages = count_outages(n, |i| outage_indicator_3gpp(scenario, &model, ant, &seeds, i));
    Ok(OutageEstimate::monte_carlo(outages, n))
}
