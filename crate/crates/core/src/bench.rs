//! Seeded trial harnesses behind the benchmark commands.
//!
//! Trial `i` of a run with base seed `s` draws everything from a generator
//! seeded with `s + i`, so trials are independent of scheduling and may run in
//! parallel. Results are always returned in trial order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::discrepancy::{discrepancy, low_disc_color, random_coloring};
use crate::error::Result;
use crate::geometry::{halfspace_instance, Distribution};
use crate::matching::crossing_number;
use crate::params::params_from_dual_shatter;
use crate::presample::{low_disc_color_presampled, PresampleConfig};
use crate::stats::{mean, paired_t_test, sd};
use crate::system::SetSystem;

/// Dual shatter constant of half-spaces in `R^d`.
pub fn halfspace_shatter_constant(d: usize) -> f64 {
    (4.0 * std::f64::consts::E).powi(d as i32)
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64))
}

/// One paired trial: both colorings evaluated on the same instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscTrial {
    pub trial: usize,
    pub m: usize,
    pub ours: f64,
    pub random: f64,
    pub crossing: usize,
    pub incidence_calls: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscRow {
    pub n: usize,
    pub dim: usize,
    pub trials: usize,
    pub mean_ours: f64,
    pub sd_ours: f64,
    pub mean_random: f64,
    pub sd_random: f64,
    /// One-sided paired t-test p-value for "ours < random".
    pub p_less: f64,
}

/// Paired trials of the matching coloring against uniform random signs.
pub fn disc_vs_random(n: usize, dim: usize, dist: Distribution, trials: usize, seed: u64) -> Result<(DiscRow, Vec<DiscTrial>)> {
    let c = halfspace_shatter_constant(dim);
    let runs: Result<Vec<DiscTrial>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let sys = halfspace_instance(n, dim, dist, &mut rng)?;
            let params = params_from_dual_shatter(c, dim as f64, sys.num_ranges())?;
            let run = low_disc_color(&sys, &params, &mut rng)?;
            let random = random_coloring(n, &mut rng);
            Ok(DiscTrial {
                trial,
                m: sys.num_ranges(),
                ours: discrepancy(&run.coloring, &sys) as f64,
                random: discrepancy(&random, &sys) as f64,
                crossing: crossing_number(&run.matching, &sys),
                incidence_calls: run.calls.incidence,
            })
        })
        .collect();
    let runs = runs?;
    let ours: Vec<f64> = runs.iter().map(|r| r.ours).collect();
    let random: Vec<f64> = runs.iter().map(|r| r.random).collect();
    let row = DiscRow {
        n,
        dim,
        trials,
        mean_ours: mean(&ours),
        sd_ours: sd(&ours),
        mean_random: mean(&random),
        sd_random: sd(&random),
        p_less: paired_t_test(&ours, &random).p_less,
    };
    Ok((row, runs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffTrial {
    pub alpha: f64,
    pub trial: usize,
    pub crossing: usize,
    pub discrepancy: f64,
    pub incidence_calls: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffRow {
    pub alpha: f64,
    pub n: usize,
    pub dim: usize,
    pub trials: usize,
    pub mean_crossing: f64,
    pub mean_disc: f64,
    pub sd_disc: f64,
    pub mean_incidence_calls: f64,
}

/// Presampled colorings at each `alpha`. Trial `i` uses the same instance
/// for every `alpha`.
pub fn tradeoff(
    alphas: &[f64],
    n: usize,
    dim: usize,
    dist: Distribution,
    trials: usize,
    seed: u64,
) -> Result<(Vec<TradeoffRow>, Vec<TradeoffTrial>)> {
    let c = halfspace_shatter_constant(dim);
    let mut rows = Vec::with_capacity(alphas.len());
    let mut all = Vec::with_capacity(alphas.len() * trials);
    for &alpha in alphas {
        let cfg = PresampleConfig::new(c, dim as f64, alpha)?;
        let runs: Result<Vec<TradeoffTrial>> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(seed, trial);
                let sys = halfspace_instance(n, dim, dist, &mut rng)?;
                let run = low_disc_color_presampled(&sys, &cfg, &mut rng)?;
                Ok(TradeoffTrial {
                    alpha,
                    trial,
                    crossing: crossing_number(&run.run.matching, &sys),
                    discrepancy: discrepancy(&run.coloring, &sys) as f64,
                    incidence_calls: run.run.calls.incidence,
                })
            })
            .collect();
        let runs = runs?;
        let disc: Vec<f64> = runs.iter().map(|r| r.discrepancy).collect();
        let cross: Vec<f64> = runs.iter().map(|r| r.crossing as f64).collect();
        let calls: Vec<f64> = runs.iter().map(|r| r.incidence_calls as f64).collect();
        rows.push(TradeoffRow {
            alpha,
            n,
            dim,
            trials,
            mean_crossing: mean(&cross),
            mean_disc: mean(&disc),
            sd_disc: sd(&disc),
            mean_incidence_calls: mean(&calls),
        });
        all.extend(runs);
    }
    Ok((rows, all))
}

/// Rows as CSV with a header line.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| crate::error::Error::Data(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| crate::error::Error::Data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
