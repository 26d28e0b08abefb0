//! ε-approximations by repeated halving along low-discrepancy colorings.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::discrepancy::{low_disc_color, Coloring};
use crate::error::{Error, Result};
use crate::params::AssumptionParams;
use crate::system::{OracleCalls, Restricted, SetSystem};

/// Default constant of the uniform-sampling bound `eps <= sqrt(C d_vc / |A|)`.
pub const DEFAULT_C_APX: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    /// Element ids of the approximation, increasing.
    pub subset: Vec<usize>,
    pub eps_measured: f64,
    pub rounds: u32,
    pub incidence_calls: u64,
    /// True when the target was too small for any halving round to be safe.
    #[serde(default)]
    pub no_op: bool,
}

/// `max_S | |S|/|X| - |A cap S|/|A| |` over the ranges of `sys`.
///
/// Panics if `subset` is empty.
pub fn eps_error<S: SetSystem + ?Sized>(subset: &[usize], sys: &S) -> f64 {
    assert!(!subset.is_empty(), "approximation must be non-empty");
    let n = sys.num_elements() as f64;
    let k = subset.len() as f64;
    (0..sys.num_ranges())
        .map(|r| {
            let inside = subset.iter().filter(|&&x| sys.contains(r, x)).count() as f64;
            (sys.range_size(r) as f64 / n - inside / k).abs()
        })
        .fold(0.0, f64::max)
}

/// `ceil(n/2)` elements of the larger color class (ties favor `+1`), lowest
/// indices first.
pub fn larger_color_class(coloring: &Coloring) -> Vec<usize> {
    let plus = coloring.class(1);
    let minus = coloring.class(-1);
    let mut larger = if plus.len() >= minus.len() { plus } else { minus };
    larger.truncate(coloring.len().div_ceil(2));
    larger
}

/// The `+1` class resized to `ceil(n/2)`: padded with the lowest-index `-1`
/// elements, or truncated to its lowest indices.
pub fn halving_class(coloring: &Coloring) -> Vec<usize> {
    let target = coloring.len().div_ceil(2);
    let mut class = coloring.class(1);
    if class.len() > target {
        class.truncate(target);
    } else {
        let missing = target - class.len();
        class.extend(coloring.class(-1).into_iter().take(missing));
        class.sort_unstable();
    }
    class
}

/// Number of halving rounds for target error `eps`:
/// `floor(log n + min{(2/(2-g)) log(eps sqrt(g) / (30 sqrt(a ln m))),
/// log(eps / (12 sqrt((b/2 + 12 ln m) ln m log n)))})`, logs base 2.
///
/// May be zero or negative. Capped at `ceil(log n)`, beyond which halving no
/// longer shrinks the set.
pub fn halving_rounds(params: &AssumptionParams, eps: f64, n: usize, m: usize) -> i64 {
    if n <= 1 {
        return 0;
    }
    let log_n = (n as f64).log2();
    let ln_m = (m as f64).ln();
    let g = params.gamma;
    let first = 2.0 / (2.0 - g) * (eps * g.sqrt() / (30.0 * (params.a * ln_m).sqrt())).log2();
    let second = (eps / (12.0 * ((params.b / 2.0 + 12.0 * ln_m) * ln_m * log_n).sqrt())).log2();
    let raw = log_n + first.min(second);
    let cap = log_n.ceil() as i64;
    if raw.is_nan() || raw >= cap as f64 {
        cap
    } else {
        raw.floor() as i64
    }
}

/// Size bound of the halving approximation:
/// `2 max{(30 sqrt(a ln m / g) / eps)^{2/(2-g)}, 12 sqrt((b/2 + 12 ln m) ln m log n) / eps} + 1`.
pub fn approx_size_bound(params: &AssumptionParams, eps: f64, n: usize, m: usize) -> f64 {
    let ln_m = (m as f64).ln();
    let log_n = (n as f64).log2();
    let g = params.gamma;
    let first = (30.0 * (params.a * ln_m / g).sqrt() / eps).powf(2.0 / (2.0 - g));
    let second = 12.0 * ((params.b / 2.0 + 12.0 * ln_m) * ln_m * log_n).sqrt() / eps;
    2.0 * first.max(second) + 1.0
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")))
    }
}

/// An ε-approximation with expected error at most `eps`, built by halving the
/// ground set along low-discrepancy colorings.
///
/// Returns the whole ground set, flagged `no_op`, when no halving round is
/// affordable at this `eps`.
pub fn approximate<S, R>(sys: &S, params: &AssumptionParams, eps: f64, rng: &mut R) -> Result<ApproxResult>
where
    S: SetSystem + ?Sized,
    R: Rng + ?Sized,
{
    check_eps(eps)?;
    let n = sys.num_elements();
    if n == 0 {
        return Err(Error::Precondition("empty ground set".into()));
    }
    let rounds = halving_rounds(params, eps, n, sys.num_ranges());
    let mut subset: Vec<usize> = (0..n).collect();
    let mut calls = OracleCalls::default();
    for _ in 0..rounds.max(0) {
        let local = Restricted::new(sys, subset.clone());
        let run = low_disc_color(&local, params, rng)?;
        calls += run.calls;
        subset = halving_class(&run.coloring)
            .into_iter()
            .map(|x| subset[x])
            .collect();
    }
    Ok(ApproxResult {
        eps_measured: eps_error(&subset, sys),
        subset,
        rounds: rounds.max(0) as u32,
        incidence_calls: calls.incidence,
        no_op: rounds <= 0,
    })
}

/// Uniform sample of `min(n, ceil(4 c_apx d_vc / eps^2))` elements.
pub fn bootstrap_sample<R: Rng + ?Sized>(n: usize, eps: f64, d_vc: f64, c_apx: f64, rng: &mut R) -> Vec<usize> {
    let size = ((4.0 * c_apx * d_vc / (eps * eps)).ceil() as usize).min(n);
    let mut sample = index::sample(rng, n, size).into_vec();
    sample.sort_unstable();
    sample
}

/// Uniform presample sized for error `eps/2`, then [`approximate`] with
/// `eps/2` on the sample. Errors of the two stages add up.
pub fn vc_bootstrap_approximate<S, R>(
    sys: &S,
    params: &AssumptionParams,
    eps: f64,
    d_vc: f64,
    c_apx: f64,
    rng: &mut R,
) -> Result<ApproxResult>
where
    S: SetSystem + ?Sized,
    R: Rng + ?Sized,
{
    check_eps(eps)?;
    if d_vc < 1.0 {
        return Err(Error::InvalidParameter(format!("VC dimension must be at least 1, got {d_vc}")));
    }
    let n = sys.num_elements();
    if n == 0 {
        return Err(Error::Precondition("empty ground set".into()));
    }
    let sample = bootstrap_sample(n, eps, d_vc, c_apx, rng);
    let local = Restricted::new(sys, sample.clone());
    let inner = approximate(&local, params, eps / 2.0, rng)?;
    let subset: Vec<usize> = inner.subset.iter().map(|&x| sample[x]).collect();
    Ok(ApproxResult {
        eps_measured: eps_error(&subset, sys),
        subset,
        rounds: inner.rounds,
        incidence_calls: inner.incidence_calls,
        no_op: inner.no_op,
    })
}

/// Smallest constant in `candidates` for which a uniform sample of
/// `ceil(4 C d_vc / eps^2)` elements has error at most `eps/2` in at least
/// `quantile` of `trials` draws on every system given.
pub fn calibrate_capx<S, R>(
    systems: &[S],
    eps: f64,
    d_vc: f64,
    candidates: &[f64],
    trials: usize,
    quantile: f64,
    rng: &mut R,
) -> Option<f64>
where
    S: SetSystem,
    R: Rng + ?Sized,
{
    let mut sorted = candidates.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.into_iter().find(|&c| {
        systems.iter().all(|sys| {
            let good = (0..trials)
                .filter(|_| {
                    let sample = bootstrap_sample(sys.num_elements(), eps, d_vc, c, rng);
                    eps_error(&sample, sys) <= eps / 2.0
                })
                .count();
            good as f64 >= quantile * trials as f64
        })
    })
}
