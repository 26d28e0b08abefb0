//! Perfect matchings with low crossing number.
//!
//! [`partial_matching`] runs the primal-dual weight process: edges carry
//! weights that are halved whenever a sampled range crosses them, ranges carry
//! weights that are doubled whenever they cross the chosen edge, and each step
//! picks an edge in proportion to its weight. [`build_matching`] repeats it on
//! the shrinking set of unmatched elements until fewer than four remain.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{low_mask, BitSet};
use crate::error::{Error, Result};
use crate::params::AssumptionParams;
use crate::sampling::{bernoulli_word, binomial, binomial_subset};
use crate::system::{Edge, OracleCalls, Restricted, SetSystem};
use crate::weighted::WeightedIndex;

/// A set of vertex-disjoint edges. At most one edge may be a loop.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    edges: Vec<Edge>,
}

impl Matching {
    pub fn new(edges: Vec<Edge>) -> Self {
        Self { edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Checks disjointness, index bounds and the single-loop rule.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        let mut loops = 0;
        for e in &self.edges {
            if e.v >= n {
                return Err(Error::Data(format!("edge {:?} exceeds n = {n}", e)));
            }
            if e.is_loop() {
                loops += 1;
            }
            for x in [e.u, e.v] {
                if seen[x] && !(e.is_loop() && x == e.v) {
                    return Err(Error::Data(format!("element {x} matched twice")));
                }
                seen[x] = true;
            }
        }
        if loops > 1 {
            return Err(Error::Data(format!("{loops} loops in matching")));
        }
        Ok(())
    }

    /// True iff the edges partition `0..n`, with a loop exactly when `n` is odd.
    pub fn is_perfect(&self, n: usize) -> bool {
        if self.validate(n).is_err() {
            return false;
        }
        let loops = self.edges.iter().filter(|e| e.is_loop()).count();
        let covered: usize = self.edges.iter().map(|e| if e.is_loop() { 1 } else { 2 }).sum();
        covered == n && loops == n % 2
    }

    pub fn to_report(&self, crossing_number: usize, incidence_calls: u64, seed: u64) -> MatchingReport {
        MatchingReport {
            edges: self.edges.iter().map(|e| [e.u, e.v]).collect(),
            crossing_number,
            incidence_calls,
            seed,
        }
    }
}

/// Serialized form of a matching run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingReport {
    pub edges: Vec<[usize; 2]>,
    pub crossing_number: usize,
    pub incidence_calls: u64,
    pub seed: u64,
}

impl MatchingReport {
    pub fn matching(&self) -> Matching {
        Matching::new(self.edges.iter().map(|&[u, v]| Edge::new(u, v)).collect())
    }
}

/// Number of edges of `matching` crossed by each range.
pub fn crossing_counts<S: SetSystem + ?Sized>(matching: &Matching, sys: &S) -> Vec<usize> {
    (0..sys.num_ranges())
        .map(|r| {
            matching
                .edges()
                .iter()
                .filter(|e| e.crossed_by(sys, r))
                .count()
        })
        .collect()
}

/// Largest number of matching edges crossed by a single range.
pub fn crossing_number<S: SetSystem + ?Sized>(matching: &Matching, sys: &S) -> usize {
    crossing_counts(matching, sys).into_iter().max().unwrap_or(0)
}

/// Sampling-rate constants of the weight process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MwuConfig {
    /// Edge-update rate is `min{edge_rate_coeff * ln(|E| t) / (a |X|^gamma + b), 1}`.
    pub edge_rate_coeff: f64,
    /// Range-update rate is `min{range_rate_coeff * ln(m t) / (a |X|^gamma + b), 1}`.
    pub range_rate_coeff: f64,
    /// Record every step so the weight evolution can be replayed.
    pub record_trace: bool,
}

impl Default for MwuConfig {
    fn default() -> Self {
        Self {
            edge_rate_coeff: 48.0,
            range_rate_coeff: 72.0,
            record_trace: false,
        }
    }
}

impl MwuConfig {
    pub fn rates(&self, params: &AssumptionParams, k: usize, num_edges: usize, m: usize, t: usize) -> (f64, f64) {
        let denom = params.crossing_budget(k);
        let rate = |coeff: f64, count: f64| {
            if count <= 1.0 {
                0.0
            } else {
                (coeff * count.ln() / denom).min(1.0)
            }
        };
        (
            rate(self.edge_rate_coeff, num_edges as f64 * t as f64),
            rate(self.range_rate_coeff, m as f64 * t as f64),
        )
    }
}

/// The edges a partial matching may choose from, over local element ids.
#[derive(Debug, Clone, PartialEq)]
pub enum CandidateEdges {
    /// Every pair of distinct elements.
    Complete,
    /// An explicit list of non-loop edges.
    Listed(Vec<Edge>),
}

/// Index of edge `{u, v}` (`u < v`) in the row-major layout of all pairs of `k` elements.
#[inline]
pub fn complete_edge_index(k: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < k);
    row_start(k, u) + v - u - 1
}

#[inline]
fn row_start(k: usize, u: usize) -> usize {
    u * k - u * (u + 1) / 2
}

/// Inverse of [`complete_edge_index`].
pub fn complete_edge_at(k: usize, index: usize) -> Edge {
    debug_assert!(index < k * (k - 1) / 2);
    let (mut lo, mut hi) = (0, k - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if row_start(k, mid) <= index {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Edge::new(lo, index - row_start(k, lo) + lo + 1)
}

/// One recorded step of the weight process.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    /// Index of the chosen edge in the candidate collection.
    pub edge: usize,
    /// The range drawn from the range weights; `None` without ranges.
    pub range: Option<usize>,
    /// Candidate-edge indices drawn for the halving update.
    pub edge_sample: Vec<usize>,
    /// Ranges drawn for the doubling update.
    pub range_sample: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MwuTrace {
    pub steps: Vec<TraceStep>,
    pub final_edge_weights: Vec<f64>,
    pub final_range_weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PartialRun {
    /// Chosen edges over local ids, in order of selection.
    pub edges: Vec<Edge>,
    pub calls: OracleCalls,
    pub edge_rate: f64,
    pub range_rate: f64,
    pub trace: Option<MwuTrace>,
}

struct EdgePool<'a> {
    candidates: &'a CandidateEdges,
    k: usize,
    /// Incident candidate indices per element; listed candidates only.
    adjacency: Vec<Vec<usize>>,
}

impl<'a> EdgePool<'a> {
    fn new(candidates: &'a CandidateEdges, k: usize) -> Result<Self> {
        let mut adjacency = Vec::new();
        if let CandidateEdges::Listed(list) = candidates {
            adjacency = vec![Vec::new(); k];
            for (i, e) in list.iter().enumerate() {
                if e.v >= k {
                    return Err(Error::InvalidParameter(format!(
                        "candidate edge {e:?} outside {k} elements"
                    )));
                }
                if e.is_loop() {
                    return Err(Error::InvalidParameter(format!("candidate edge {e:?} is a loop")));
                }
                adjacency[e.u].push(i);
                adjacency[e.v].push(i);
            }
        }
        Ok(Self {
            candidates,
            k,
            adjacency,
        })
    }

    fn len(&self) -> usize {
        match self.candidates {
            CandidateEdges::Complete => self.k * self.k.saturating_sub(1) / 2,
            CandidateEdges::Listed(list) => list.len(),
        }
    }

    fn edge(&self, index: usize) -> Edge {
        match self.candidates {
            CandidateEdges::Complete => complete_edge_at(self.k, index),
            CandidateEdges::Listed(list) => list[index],
        }
    }

    fn zero_incident(&self, weights: &mut WeightedIndex, x: usize) {
        match self.candidates {
            CandidateEdges::Complete => {
                for u in 0..x {
                    weights.zero(complete_edge_index(self.k, u, x));
                }
                let start = row_start(self.k, x);
                for i in start..start + (self.k - 1 - x) {
                    weights.zero(i);
                }
            }
            CandidateEdges::Listed(_) => {
                for &i in &self.adjacency[x] {
                    weights.zero(i);
                }
            }
        }
    }
}

/// Zero the weight of every candidate edge incident to `x`.
pub fn zero_incident(weights: &mut WeightedIndex, candidates: &CandidateEdges, k: usize, x: usize) {
    EdgePool::new(candidates, k)
        .expect("valid candidate edges")
        .zero_incident(weights, x);
}

/// Choose `t` disjoint edges from `candidates` by the sampled weight process.
///
/// Edge ids in the result are the element ids of `sys`. Fails with
/// [`Error::InfeasibleSample`] if the candidates run out before `t` edges are
/// chosen, which cannot happen for complete candidates and `2t <= n`.
pub fn partial_matching<S, R>(
    sys: &S,
    candidates: &CandidateEdges,
    params: &AssumptionParams,
    t: usize,
    config: &MwuConfig,
    rng: &mut R,
) -> Result<PartialRun>
where
    S: SetSystem + ?Sized,
    R: Rng + ?Sized,
{
    let k = sys.num_elements();
    let m = sys.num_ranges();
    let pool = EdgePool::new(candidates, k)?;
    let num_edges = pool.len();
    let (p1, p2) = config.rates(params, k, num_edges, m, t);

    let mut omega = WeightedIndex::uniform(num_edges);
    let mut pi = WeightedIndex::uniform(m);
    let mut in_s = BitSet::new(k);
    let mut live = BitSet::new(k);
    (0..k).for_each(|x| live.set(x, true));
    let mut calls = OracleCalls::default();
    let mut chosen = Vec::with_capacity(t);
    let mut steps = Vec::new();

    for step in 0..t {
        let e_index = omega.sample(rng).map_err(|_| Error::InfeasibleSample {
            drawn: step,
            requested: t,
        })?;
        let edge = pool.edge(e_index);
        let mut record = config.record_trace.then(|| TraceStep {
            edge: e_index,
            range: None,
            edge_sample: Vec::new(),
            range_sample: Vec::new(),
        });

        if m > 0 {
            let s = pi.sample(rng).expect("range weights stay positive");
            for x in 0..k {
                in_s.set(x, sys.contains(s, x));
            }
            let mut evaluated = 0u64;
            let sample_log = record.as_mut().map(|r| &mut r.edge_sample);
            match candidates {
                CandidateEdges::Complete => {
                    evaluated += halve_complete(&mut omega, k, p1, &in_s, &live, sample_log, rng);
                }
                CandidateEdges::Listed(list) => {
                    let drawn = binomial_subset(list.len(), p1, rng);
                    evaluated += drawn.len() as u64;
                    for &i in &drawn {
                        let e = list[i];
                        if in_s.get(e.u) != in_s.get(e.v) {
                            omega.scale(i, 0.5);
                        }
                    }
                    if let Some(log) = sample_log {
                        *log = drawn;
                    }
                }
            }

            let ranges = binomial_subset(m, p2, rng);
            evaluated += ranges.len() as u64;
            for &r in &ranges {
                if sys.contains(r, edge.u) != sys.contains(r, edge.v) {
                    pi.scale(r, 2.0);
                }
            }
            calls += OracleCalls {
                incidence: evaluated,
                membership: 2 * evaluated,
            };
            if let Some(r) = record.as_mut() {
                r.range = Some(s);
                r.range_sample = ranges;
            }
        }

        pool.zero_incident(&mut omega, edge.u);
        pool.zero_incident(&mut omega, edge.v);
        live.set(edge.u, false);
        live.set(edge.v, false);
        chosen.push(edge);
        if let Some(r) = record {
            steps.push(r);
        }
    }

    let trace = config.record_trace.then(|| MwuTrace {
        steps,
        final_edge_weights: (0..num_edges).map(|i| omega.weight(i)).collect(),
        final_range_weights: (0..m).map(|i| pi.weight(i)).collect(),
    });
    Ok(PartialRun {
        edges: chosen,
        calls,
        edge_rate: p1,
        range_rate: p2,
        trace,
    })
}

/// Halve every complete-graph edge that is drawn with probability `p` and
/// crossed by the range whose indicator is `in_s`. Returns the number of
/// edges drawn.
///
/// Rows are processed 64 edges at a time with a Bernoulli bit mask. Edges
/// with a matched endpoint already have weight zero, so halving them is
/// skipped; they are still drawn and counted. Rows whose first endpoint is
/// matched only need their draw count, which is taken from the binomial
/// law directly unless the draws are being logged.
fn halve_complete<R: Rng + ?Sized>(
    omega: &mut WeightedIndex,
    k: usize,
    p: f64,
    in_s: &BitSet,
    live: &BitSet,
    mut log: Option<&mut Vec<usize>>,
    rng: &mut R,
) -> u64 {
    let mut drawn = 0u64;
    if p <= 0.0 {
        return 0;
    }
    for u in 0..k.saturating_sub(1) {
        let row = row_start(k, u);
        let len = k - 1 - u;
        if !live.get(u) && log.is_none() {
            drawn += binomial(len as u64, p, rng);
            continue;
        }
        let flip = if in_s.get(u) { !0u64 } else { 0 };
        let row_live = if live.get(u) { !0u64 } else { 0 };
        let mut off = 0;
        while off < len {
            let mask = bernoulli_word(rng, p) & low_mask(len - off);
            drawn += mask.count_ones() as u64;
            let v0 = u + 1 + off;
            if let Some(log) = log.as_deref_mut() {
                let mut bits = mask;
                while bits != 0 {
                    log.push(row + off + bits.trailing_zeros() as usize);
                    bits &= bits - 1;
                }
            }
            let halve = mask & (in_s.window(v0) ^ flip) & live.window(v0) & row_live;
            omega.scale_masked(row + off, halve, 0.5);
            off += 64;
        }
    }
    drawn
}

/// A matching together with the oracle calls spent building it.
#[derive(Debug, Clone)]
pub struct MatchingRun {
    pub matching: Matching,
    pub calls: OracleCalls,
}

/// A perfect matching of all elements of `sys` with low expected crossing
/// number.
///
/// While at least four elements are unmatched, a quarter of them (rounded up)
/// are matched by [`partial_matching`] over all pairs of unmatched elements.
/// The last one to three elements are paired uniformly at random, with a loop
/// when their number is odd. A single element yields a single loop.
pub fn build_matching<S, R>(sys: &S, params: &AssumptionParams, rng: &mut R) -> Result<MatchingRun>
where
    S: SetSystem + ?Sized,
    R: Rng + ?Sized,
{
    build_matching_with(sys, params, &MwuConfig::default(), rng)
}

pub fn build_matching_with<S, R>(
    sys: &S,
    params: &AssumptionParams,
    config: &MwuConfig,
    rng: &mut R,
) -> Result<MatchingRun>
where
    S: SetSystem + ?Sized,
    R: Rng + ?Sized,
{
    let mut survivors: Vec<usize> = (0..sys.num_elements()).collect();
    let mut edges = Vec::with_capacity(survivors.len().div_ceil(2));
    let mut calls = OracleCalls::default();
    while survivors.len() >= 4 {
        let t = survivors.len().div_ceil(4);
        let local = Restricted::new(sys, survivors.clone());
        let run = partial_matching(&local, &CandidateEdges::Complete, params, t, config, rng)?;
        calls += run.calls;
        survivors = absorb(&survivors, &run.edges, &mut edges);
    }
    match_randomly(survivors, &mut edges, rng);
    Ok(MatchingRun {
        matching: Matching::new(edges),
        calls,
    })
}

/// Append `local` edges mapped through `survivors` to `out` and return the
/// survivors left unmatched.
pub(crate) fn absorb(survivors: &[usize], local: &[Edge], out: &mut Vec<Edge>) -> Vec<usize> {
    let mut matched = vec![false; survivors.len()];
    for e in local {
        matched[e.u] = true;
        matched[e.v] = true;
        out.push(Edge::new(survivors[e.u], survivors[e.v]));
    }
    survivors
        .iter()
        .zip(&matched)
        .filter(|(_, &m)| !m)
        .map(|(&x, _)| x)
        .collect()
}

/// Pair up `rest` uniformly at random; an odd element out becomes a loop.
pub(crate) fn match_randomly<R: Rng + ?Sized>(mut rest: Vec<usize>, out: &mut Vec<Edge>, rng: &mut R) {
    rest.shuffle(rng);
    for pair in rest.chunks(2) {
        match *pair {
            [a, b] => out.push(Edge::new(a, b)),
            [a] => out.push(Edge::new(a, a)),
            _ => unreachable!(),
        }
    }
}
