//! Matchings over a random sample of candidate edges.
//!
//! Restricting the weight process to an i.i.d. sample of the pairs trades
//! crossing number for fewer oracle calls. [`relaxed_mwu`] is the simplified
//! deterministic-tier process used to reason about when a sample still
//! contains a large enough matching, and [`grid_lowerbound_check`] counts
//! short edges in samples of the grid instance.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::discrepancy::{color_from_matching, Coloring};
use crate::error::{Error, Result};
use crate::geometry::grid_instance;
use crate::matching::{
    absorb, complete_edge_at, complete_edge_index, match_randomly, partial_matching, CandidateEdges, Matching,
    MwuConfig,
};
use crate::params::AssumptionParams;
use crate::sampling::binomial_subset;
use crate::system::{Edge, OracleCalls, Restricted, SetSystem};

/// `min{2 ln n / n^{1-alpha} + 4 ln(2/delta) / n^{2-alpha}, 1}`.
pub fn presample_probability(n: usize, alpha: f64, delta: f64) -> f64 {
    assert!(n >= 2, "presampling needs at least two elements");
    let nf = n as f64;
    let p = 2.0 * nf.ln() / nf.powf(1.0 - alpha) + 4.0 * (2.0 / delta).ln() / nf.powf(2.0 - alpha);
    p.min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PresampleConfig {
    /// Dual shatter constant `c`.
    pub c: f64,
    /// Dual shatter exponent `d`.
    pub d: f64,
    pub alpha: f64,
    /// Failure probability per round; `None` uses `1/|X|`.
    pub delta: Option<f64>,
    /// Factor applied to the sampling probability before clamping to 1.
    pub multiplier: f64,
}

impl PresampleConfig {
    pub fn new(c: f64, d: f64, alpha: f64) -> Result<Self> {
        let cfg = Self {
            c,
            d,
            alpha,
            delta: None,
            multiplier: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if let Some(delta) = self.delta {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
            }
        }
        if !(self.c > 0.0 && self.d >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need c > 0 and d >= 1, got c = {}, d = {}",
                self.c, self.d
            )));
        }
        if !(self.multiplier > 0.0) {
            return Err(Error::InvalidParameter("multiplier must be positive".into()));
        }
        Ok(())
    }

    /// `a = (2c)^{1/d}`, `b = ln m`, `gamma = 1 - alpha/d`.
    pub fn params(&self, m: usize) -> Result<AssumptionParams> {
        let b = if m > 1 { (m as f64).ln() } else { 0.0 };
        AssumptionParams::new((2.0 * self.c).powf(1.0 / self.d), b, 1.0 - self.alpha / self.d)
    }

    fn probability(&self, k: usize) -> f64 {
        let delta = self.delta.unwrap_or(1.0 / k as f64);
        (self.multiplier * presample_probability(k, self.alpha, delta)).min(1.0)
    }
}

/// Every pair of `0..k` independently with probability `p`.
pub fn sample_pairs<R: Rng + ?Sized>(k: usize, p: f64, rng: &mut R) -> Vec<Edge> {
    let total = k * k.saturating_sub(1) / 2;
    binomial_subset(total, p, rng)
        .into_iter()
        .map(|i| complete_edge_at(k, i))
        .collect()
}

#[derive(Debug, Clone)]
pub struct PresampledRun {
    pub matching: Matching,
    pub calls: OracleCalls,
    /// Rounds whose sample ran out and was redrawn with doubled probability.
    pub retries: usize,
    /// Rounds that fell back to all pairs after the retry also ran out.
    pub fallbacks: usize,
}

/// Perfect matching whose rounds each draw a fresh edge sample.
///
/// While more than 16 elements are unmatched, pairs of unmatched elements
/// are sampled with [`presample_probability`]`(|X|, alpha, 1/|X|)` and
/// [`partial_matching`] picks `ceil(|X|/16)` edges among them. A round whose
/// sample runs out is redrawn once with doubled probability and then run on
/// all pairs. The last elements are paired at random.
pub fn matching_presampled<S, R>(sys: &S, cfg: &PresampleConfig, rng: &mut R) -> Result<PresampledRun>
where
    S: SetSystem + ?Sized,
    R: Rng + ?Sized,
{
    cfg.validate()?;
    let params = cfg.params(sys.num_ranges())?;
    let mwu = MwuConfig::default();
    let mut survivors: Vec<usize> = (0..sys.num_elements()).collect();
    let mut edges = Vec::with_capacity(survivors.len().div_ceil(2));
    let mut calls = OracleCalls::default();
    let (mut retries, mut fallbacks) = (0, 0);
    while survivors.len() > 16 {
        let k = survivors.len();
        let t = k.div_ceil(16);
        let local = Restricted::new(sys, survivors.clone());
        let p = cfg.probability(k);
        let attempts = [Some(p), Some((2.0 * p).min(1.0)), None];
        let mut chosen = None;
        for (i, attempt) in attempts.into_iter().enumerate() {
            let candidates = match attempt {
                Some(q) if q < 1.0 => CandidateEdges::Listed(sample_pairs(k, q, rng)),
                _ => CandidateEdges::Complete,
            };
            match partial_matching(&local, &candidates, &params, t, &mwu, rng) {
                Ok(run) => {
                    calls += run.calls;
                    chosen = Some(run.edges);
                    break;
                }
                Err(Error::InfeasibleSample { .. }) => {
                    if i == 0 {
                        retries += 1;
                    } else {
                        fallbacks += 1;
                    }
                }
                Err(e) => return Err(e),
            }
        }
        let chosen = chosen.expect("all pairs always admit the round");
        survivors = absorb(&survivors, &chosen, &mut edges);
    }
    match_randomly(survivors, &mut edges, rng);
    Ok(PresampledRun {
        matching: Matching::new(edges),
        calls,
        retries,
        fallbacks,
    })
}

#[derive(Debug, Clone)]
pub struct PresampledColoring {
    pub coloring: Coloring,
    pub run: PresampledRun,
}

/// Opposite signs on the pairs of [`matching_presampled`].
pub fn low_disc_color_presampled<S, R>(sys: &S, cfg: &PresampleConfig, rng: &mut R) -> Result<PresampledColoring>
where
    S: SetSystem + ?Sized,
    R: Rng + ?Sized,
{
    let run = matching_presampled(sys, cfg, rng)?;
    let coloring = color_from_matching(&run.matching, sys.num_elements(), rng);
    Ok(PresampledColoring { coloring, run })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedRun {
    /// Chosen edges, in order.
    pub edges: Vec<Edge>,
    /// Number of steps completed before halting.
    pub halted_at: usize,
    /// Number of chosen edges crossing each range; its weight is `2^count`.
    pub doublings: Vec<u32>,
}

impl RelaxedRun {
    pub fn range_weight(&self, r: usize) -> f64 {
        2f64.powi(self.doublings[r] as i32)
    }
}

/// Multiplicative weights over ranges with a uniform choice among the
/// lightest pairs.
///
/// At each step the unmatched pairs are ranked by the total weight of the
/// ranges crossing them (ties by pair index) and the lightest
/// `ceil(|X_i|^{2-alpha})` form the tier. If none of them is in `sample`, the
/// process halts. Otherwise a uniform tier member from the sample is matched
/// and the weights of the ranges crossing it are doubled.
pub fn relaxed_mwu<S, R>(sys: &S, alpha: f64, sample: &[Edge], rng: &mut R) -> Result<RelaxedRun>
where
    S: SetSystem + ?Sized,
    R: Rng + ?Sized,
{
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let n = sys.num_elements();
    let m = sys.num_ranges();
    let total = n * n.saturating_sub(1) / 2;
    let mut in_sample = vec![false; total];
    for e in sample {
        if e.is_loop() || e.v >= n {
            return Err(Error::InvalidParameter(format!("sampled edge {e:?} is not a pair of elements")));
        }
        in_sample[complete_edge_index(n, e.u, e.v)] = true;
    }
    // Ranges crossing each pair, and pairs crossed by each range.
    let mut crossed_by: Vec<Vec<usize>> = vec![Vec::new(); m];
    for u in 0..n {
        for v in u + 1..n {
            let idx = complete_edge_index(n, u, v);
            for (r, list) in crossed_by.iter_mut().enumerate() {
                if sys.contains(r, u) != sys.contains(r, v) {
                    list.push(idx);
                }
            }
        }
    }
    let mut weight: Vec<f64> = vec![0.0; total];
    for list in &crossed_by {
        for &i in list {
            weight[i] += 1.0;
        }
    }
    let mut doublings = vec![0u32; m];
    let mut alive = vec![true; n];
    let mut edges = Vec::new();
    let mut tier = Vec::new();

    for step in 0..n / 2 {
        let k = n - 2 * step;
        let size = (k as f64).powf(2.0 - alpha).ceil() as usize;
        let mut live: Vec<usize> = (0..total)
            .filter(|&i| {
                let e = complete_edge_at(n, i);
                alive[e.u] && alive[e.v]
            })
            .collect();
        let by_weight = |a: &usize, b: &usize| weight[*a].total_cmp(&weight[*b]).then(a.cmp(b));
        if size < live.len() {
            live.select_nth_unstable_by(size, by_weight);
            live.truncate(size);
        }
        tier.clear();
        tier.extend(live.into_iter().filter(|&i| in_sample[i]));
        if tier.is_empty() {
            return Ok(RelaxedRun {
                edges,
                halted_at: step,
                doublings,
            });
        }
        tier.sort_unstable();
        let pick = tier[rng.random_range(0..tier.len())];
        let e = complete_edge_at(n, pick);
        for r in 0..m {
            if sys.contains(r, e.u) != sys.contains(r, e.v) {
                let w = 2f64.powi(doublings[r] as i32);
                doublings[r] += 1;
                for &i in &crossed_by[r] {
                    weight[i] += w;
                }
            }
        }
        alive[e.u] = false;
        alive[e.v] = false;
        edges.push(e);
    }
    let halted_at = edges.len();
    Ok(RelaxedRun {
        edges,
        halted_at,
        doublings,
    })
}

/// Crossing-number bound of the relaxed process after `t` steps,
/// `(ln m + (10 c1)^{1/d} t^{1 - alpha/d} / (1 - alpha/d)) / ln 2`.
pub fn relaxed_crossing_bound(m: usize, c1: f64, d: f64, alpha: f64, t: usize) -> f64 {
    let g = 1.0 - alpha / d;
    ((m as f64).ln() + (10.0 * c1).powf(1.0 / d) * (t as f64).powf(g) / g) / std::f64::consts::LN_2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LowerBoundCheck {
    /// The sampling probability is not below the threshold the argument needs.
    NotApplicable { reason: String },
    Checked {
        n: usize,
        p: f64,
        /// `(1/(16 p))^{1/d}`.
        k_p: f64,
        sampled: usize,
        /// Sampled edges of `l1` length at most `k_p`.
        short_edges: usize,
        /// `n / 8`.
        limit: f64,
        /// `short_edges <= limit`.
        holds: bool,
        /// Lower bound on the crossing number of any matching of `n/4`
        /// sampled edges when `holds`: `(n/8) k_p / m`.
        forced_crossing: f64,
    },
}

impl LowerBoundCheck {
    pub fn holds(&self) -> Option<bool> {
        match self {
            LowerBoundCheck::NotApplicable { .. } => None,
            LowerBoundCheck::Checked { holds, .. } => Some(*holds),
        }
    }
}

/// Sample pairs of the grid instance with probability `p` and count those of
/// `l1` length at most `k_p = (1/(16 p))^{1/d}`.
///
/// If at most `n/8` are that short, any `n/4` sampled disjoint edges include
/// at least `n/8` longer ones. Each is crossed by as many axis thresholds as
/// its length, so some threshold crosses at least `(n/8) k_p / m` of them.
/// Reported as not applicable when `p >= n^{alpha - 1}` or `k_p < 1`.
pub fn grid_lowerbound_check<R: Rng + ?Sized>(n0: usize, d: usize, alpha: f64, p: f64, rng: &mut R) -> Result<LowerBoundCheck> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
    }
    let grid = grid_instance(n0, d)?;
    let n = grid.num_elements();
    let threshold = (n as f64).powf(alpha - 1.0);
    if p >= threshold {
        return Ok(LowerBoundCheck::NotApplicable {
            reason: format!("p = {p} is not below n^(alpha-1) = {threshold}"),
        });
    }
    let k_p = (1.0 / (16.0 * p)).powf(1.0 / d as f64);
    if k_p < 1.0 {
        return Ok(LowerBoundCheck::NotApplicable {
            reason: format!("k_p = {k_p} is below one"),
        });
    }
    let sample = sample_pairs(n, p, rng);
    let points = grid.points();
    let short_edges = sample
        .iter()
        .filter(|e| {
            let l1: f64 = points
                .point(e.u)
                .iter()
                .zip(points.point(e.v))
                .map(|(a, b)| (a - b).abs())
                .sum();
            l1 <= k_p
        })
        .count();
    let limit = n as f64 / 8.0;
    Ok(LowerBoundCheck::Checked {
        n,
        p,
        k_p,
        sampled: sample.len(),
        short_edges,
        limit,
        holds: short_edges as f64 <= limit,
        forced_crossing: limit * k_p / grid.num_ranges() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::ExplicitSystem;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn probability_examples() {
        assert_eq!(presample_probability(2, 1.0, 0.5), 1.0);
        assert_eq!(presample_probability(1000, 1.0, 0.5), 1.0);
        let p = presample_probability(10_000, 0.5, 0.5);
        let expected = 2.0 * 1e4f64.ln() / 100.0 + 4.0 * 4f64.ln() / 1e6;
        assert!((p - expected).abs() < 1e-15);
        assert!((p - 0.184_212).abs() < 1e-5);
        let near_one = presample_probability(10_000, 0.5, 1.0 - 1e-12);
        let limit = 2.0 * 1e4f64.ln() / 100.0 + 4.0 * 2f64.ln() / 1e6;
        assert!((near_one - limit).abs() < 1e-12);
    }

    #[test]
    fn probability_decreases_in_n() {
        let mut prev = presample_probability(1000, 0.5, 0.1);
        for n in (2000..100_000).step_by(1000) {
            let p = presample_probability(n, 0.5, 0.1);
            assert!(p < prev);
            prev = p;
        }
    }

    #[test]
    fn relaxed_with_all_pairs_never_halts() {
        let sys = ExplicitSystem::new(8, (1..8).map(|j| (0..j).collect()).collect()).unwrap();
        let all: Vec<Edge> = (0..8).flat_map(|u| (u + 1..8).map(move |v| Edge::new(u, v))).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let run = relaxed_mwu(&sys, 1.0, &all, &mut rng).unwrap();
        assert_eq!(run.halted_at, 4);
        assert!(Matching::new(run.edges.clone()).is_perfect(8));
        let empty = relaxed_mwu(&sys, 1.0, &[], &mut rng).unwrap();
        assert_eq!(empty.halted_at, 0);
    }

    #[test]
    fn relaxed_weights_replay() {
        let sys = ExplicitSystem::new(10, vec![vec![0, 1, 2], vec![3, 4], vec![5, 6, 7, 8, 9], vec![0, 9]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sample = sample_pairs(10, 0.7, &mut rng);
        let run = relaxed_mwu(&sys, 0.5, &sample, &mut rng).unwrap();
        for r in 0..4 {
            let crossings = run.edges.iter().filter(|e| e.crossed_by(&sys, r)).count() as u32;
            assert_eq!(run.doublings[r], crossings);
            assert_eq!(run.range_weight(r), 2f64.powi(crossings as i32));
        }
    }

    #[test]
    fn lower_bound_not_applicable_at_p_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let res = grid_lowerbound_check(100, 2, 0.5, 1.0, &mut rng).unwrap();
        assert!(matches!(res, LowerBoundCheck::NotApplicable { .. }));
        assert_eq!(res.holds(), None);
    }

    #[test]
    fn presampled_small_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let cfg = PresampleConfig::new(1.0, 2.0, 0.5).unwrap();
        for n in [0, 1, 2, 5, 16, 17, 40] {
            let sys = ExplicitSystem::new(n, vec![(0..n / 2).collect(); 3]).unwrap();
            let run = matching_presampled(&sys, &cfg, &mut rng).unwrap();
            assert!(run.matching.is_perfect(n), "n = {n}");
        }
        assert!(PresampleConfig::new(1.0, 2.0, 0.0).is_err());
    }
}
