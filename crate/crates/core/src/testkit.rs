//! Exhaustive reference solvers for small instances.
//!
//! These are independent of the randomized algorithms and serve as oracles
//! in tests: optimum crossing numbers, optimum discrepancies, exact expected
//! discrepancies of matching colorings, and lightest crossing edges.

use crate::discrepancy::Coloring;
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::system::{Edge, SetSystem};

pub const MAX_MATCHING_BRUTE: usize = 12;
pub const MAX_MATCHING_BACKTRACK: usize = 8;
pub const MAX_DISCREPANCY_BRUTE: usize = 20;
pub const MAX_EXPECTED_EDGES: usize = 20;

fn crossing_lists<S: SetSystem + ?Sized>(sys: &S) -> Vec<Vec<usize>> {
    let n = sys.num_elements();
    let mut lists = vec![Vec::new(); n * n];
    for u in 0..n {
        for v in u + 1..n {
            lists[u * n + v] = (0..sys.num_ranges())
                .filter(|&r| sys.contains(r, u) != sys.contains(r, v))
                .collect();
        }
    }
    lists
}

struct MatchingSearch<'a> {
    n: usize,
    crossing: &'a [Vec<usize>],
    counts: Vec<usize>,
    used: Vec<bool>,
    current: Vec<Edge>,
    best: Option<(Vec<Edge>, usize)>,
}

impl MatchingSearch<'_> {
    fn run(&mut self, current_max: usize, loop_used: bool) {
        if let Some((_, best)) = &self.best {
            if current_max >= *best {
                return;
            }
        }
        let Some(x) = (0..self.n).find(|&i| !self.used[i]) else {
            self.best = Some((self.current.clone(), current_max));
            return;
        };
        self.used[x] = true;
        for y in x + 1..self.n {
            if self.used[y] {
                continue;
            }
            self.used[y] = true;
            let mut new_max = current_max;
            for &r in &self.crossing[x * self.n + y] {
                self.counts[r] += 1;
                new_max = new_max.max(self.counts[r]);
            }
            self.current.push(Edge::new(x, y));
            self.run(new_max, loop_used);
            self.current.pop();
            for &r in &self.crossing[x * self.n + y] {
                self.counts[r] -= 1;
            }
            self.used[y] = false;
        }
        if self.n % 2 == 1 && !loop_used {
            self.current.push(Edge::new(x, x));
            self.run(current_max, true);
            self.current.pop();
        }
        self.used[x] = false;
    }
}

/// A perfect matching of minimum crossing number, and that number.
///
/// Branch and bound over all perfect matchings, always pairing the lowest
/// unmatched element first. Refuses more than 12 elements.
pub fn brute_min_crossing_matching<S: SetSystem + ?Sized>(sys: &S) -> Result<(Matching, usize)> {
    let n = sys.num_elements();
    if n > MAX_MATCHING_BRUTE {
        return Err(Error::TooLarge {
            size: n,
            limit: MAX_MATCHING_BRUTE,
        });
    }
    let crossing = crossing_lists(sys);
    let mut search = MatchingSearch {
        n,
        crossing: &crossing,
        counts: vec![0; sys.num_ranges()],
        used: vec![false; n],
        current: Vec::new(),
        best: None,
    };
    search.run(0, false);
    let (edges, best) = search.best.expect("some perfect matching exists");
    Ok((Matching::new(edges), best))
}

/// The same optimum as [`brute_min_crossing_matching`] by plain recursive
/// enumeration from the highest index down, scoring complete matchings only.
/// Refuses more than 8 elements.
pub fn backtrack_min_crossing<S: SetSystem + ?Sized>(sys: &S) -> Result<usize> {
    let n = sys.num_elements();
    if n > MAX_MATCHING_BACKTRACK {
        return Err(Error::TooLarge {
            size: n,
            limit: MAX_MATCHING_BACKTRACK,
        });
    }
    fn score<S: SetSystem + ?Sized>(sys: &S, pairs: &[(usize, usize)]) -> usize {
        let mut worst = 0;
        for r in 0..sys.num_ranges() {
            let mut c = 0;
            for &(a, b) in pairs {
                if a != b && (sys.contains(r, a) ^ sys.contains(r, b)) {
                    c += 1;
                }
            }
            worst = worst.max(c);
        }
        worst
    }
    fn rec<S: SetSystem + ?Sized>(sys: &S, free: &mut Vec<usize>, pairs: &mut Vec<(usize, usize)>, best: &mut usize) {
        let Some(x) = free.pop() else {
            *best = (*best).min(score(sys, pairs));
            return;
        };
        if free.len() % 2 == 0 {
            // Odd count including x: x may be the loop.
            pairs.push((x, x));
            rec(sys, free, pairs, best);
            pairs.pop();
        }
        for i in 0..free.len() {
            let y = free.remove(i);
            pairs.push((y, x));
            rec(sys, free, pairs, best);
            pairs.pop();
            free.insert(i, y);
        }
        free.push(x);
    }
    let mut free: Vec<usize> = (0..n).collect();
    let mut best = usize::MAX;
    rec(sys, &mut free, &mut Vec::new(), &mut best);
    Ok(if n == 0 { 0 } else { best })
}

/// A coloring of minimum discrepancy, and that discrepancy.
///
/// Walks all `2^n` colorings in Gray-code order, updating range sums one
/// flip at a time. Refuses more than 20 elements.
pub fn brute_min_discrepancy<S: SetSystem + ?Sized>(sys: &S) -> Result<(Coloring, i64)> {
    let n = sys.num_elements();
    if n > MAX_DISCREPANCY_BRUTE {
        return Err(Error::TooLarge {
            size: n,
            limit: MAX_DISCREPANCY_BRUTE,
        });
    }
    let m = sys.num_ranges();
    let ranges_of: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..m).filter(|&r| sys.contains(r, x)).collect())
        .collect();
    let mut signs = vec![1i8; n];
    let mut sums: Vec<i64> = (0..m).map(|r| sys.range_size(r) as i64).collect();
    let disc = |sums: &[i64]| sums.iter().map(|s| s.abs()).max().unwrap_or(0);
    let mut best = disc(&sums);
    let mut best_signs = signs.clone();
    for step in 1u64..(1u64 << n) {
        let x = step.trailing_zeros() as usize;
        signs[x] = -signs[x];
        let delta = 2 * signs[x] as i64;
        for &r in &ranges_of[x] {
            sums[r] += delta;
        }
        let d = disc(&sums);
        if d < best {
            best = d;
            best_signs.copy_from_slice(&signs);
        }
    }
    Ok((Coloring::new(best_signs).expect("signs are ±1"), best))
}

/// Exact expected discrepancy of the coloring that gives each edge of
/// `matching` a uniform sign on its first endpoint and the opposite sign on
/// its second (a loop gets a uniform sign).
///
/// Only crossing edges (and loops inside a range) contribute to a range sum,
/// so each range is a signed sum of independent edge signs; all `2^|M|`
/// assignments are enumerated. Elements outside the matching contribute
/// nothing. Refuses more than 20 edges.
pub fn exact_expected_matching_discrepancy<S: SetSystem + ?Sized>(matching: &Matching, sys: &S) -> Result<f64> {
    let k = matching.len();
    if k > MAX_EXPECTED_EDGES {
        return Err(Error::TooLarge {
            size: k,
            limit: MAX_EXPECTED_EDGES,
        });
    }
    matching.validate(sys.num_elements())?;
    // For each range, the edges whose sign enters with + and with -.
    let masks: Vec<(u32, u32)> = (0..sys.num_ranges())
        .map(|r| {
            let mut plus = 0u32;
            let mut minus = 0u32;
            for (i, e) in matching.edges().iter().enumerate() {
                let in_u = sys.contains(r, e.u);
                let in_v = sys.contains(r, e.v);
                if e.is_loop() {
                    if in_u {
                        plus |= 1 << i;
                    }
                } else if in_u && !in_v {
                    plus |= 1 << i;
                } else if in_v && !in_u {
                    minus |= 1 << i;
                }
            }
            (plus, minus)
        })
        .filter(|&(p, q)| p | q != 0)
        .collect();
    if masks.is_empty() {
        return Ok(0.0);
    }
    let mut total: u64 = 0;
    for sigma in 0u32..(1u32 << k) {
        let worst = masks
            .iter()
            .map(|&(p, q)| {
                let s = 2 * (p & sigma).count_ones() as i64 - p.count_ones() as i64
                    - (2 * (q & sigma).count_ones() as i64 - q.count_ones() as i64);
                s.unsigned_abs()
            })
            .max()
            .unwrap_or(0);
        total += worst;
    }
    Ok(total as f64 / (1u64 << k) as f64)
}

/// The pair in `subset` minimizing the total weight of ranges crossing it,
/// and that total. Ties go to the lexicographically first pair.
pub fn min_weighted_crossing_edge<S: SetSystem + ?Sized>(subset: &[usize], sys: &S, weights: &[f64]) -> (Edge, f64) {
    assert!(subset.len() >= 2, "need at least two elements");
    assert_eq!(weights.len(), sys.num_ranges(), "one weight per range");
    let mut best: Option<(Edge, f64)> = None;
    for (i, &x) in subset.iter().enumerate() {
        for &y in &subset[i + 1..] {
            let total: f64 = (0..sys.num_ranges())
                .filter(|&r| sys.contains(r, x) != sys.contains(r, y))
                .map(|r| weights[r])
                .sum();
            if best.as_ref().is_none_or(|(_, b)| total < *b) {
                best = Some((Edge::new(x, y), total));
            }
        }
    }
    best.expect("at least one pair")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::crossing_number;
    use crate::system::ExplicitSystem;

    fn line(n: usize) -> ExplicitSystem {
        ExplicitSystem::new(n, (1..n).map(|j| (0..j).collect()).collect()).unwrap()
    }

    #[test]
    fn matching_optimum_examples() {
        let sys = ExplicitSystem::new(2, vec![vec![0]]).unwrap();
        let (m, k) = brute_min_crossing_matching(&sys).unwrap();
        assert_eq!(m.edges(), &[Edge::new(0, 1)]);
        assert_eq!(k, 1);
        let (m, k) = brute_min_crossing_matching(&line(4)).unwrap();
        assert_eq!(k, 1);
        assert_eq!(crossing_number(&m, &line(4)), 1);
        assert_eq!(backtrack_min_crossing(&line(4)).unwrap(), 1);
        let (m, _) = brute_min_crossing_matching(&line(7)).unwrap();
        assert!(m.is_perfect(7));
        assert!(brute_min_crossing_matching(&line(13)).is_err());
    }

    #[test]
    fn discrepancy_optimum_examples() {
        let whole = ExplicitSystem::new(6, vec![(0..6).collect()]).unwrap();
        assert_eq!(brute_min_discrepancy(&whole).unwrap().1, 0);
        let singletons = ExplicitSystem::new(5, (0..5).map(|x| vec![x]).collect()).unwrap();
        assert_eq!(brute_min_discrepancy(&singletons).unwrap().1, 1);
    }

    #[test]
    fn expected_discrepancy_examples() {
        let sys = ExplicitSystem::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let pairs = Matching::new(vec![Edge::new(0, 1), Edge::new(2, 3)]);
        assert_eq!(exact_expected_matching_discrepancy(&pairs, &sys).unwrap(), 0.0);
        let crossed = Matching::new(vec![Edge::new(0, 2), Edge::new(1, 3)]);
        // Each range meets both edges once: |±1 ± 1| is 0 or 2 with equal odds.
        assert_eq!(exact_expected_matching_discrepancy(&crossed, &sys).unwrap(), 1.0);
        let one = ExplicitSystem::new(4, vec![vec![0], vec![2]]).unwrap();
        assert_eq!(exact_expected_matching_discrepancy(&pairs, &one).unwrap(), 1.0);
    }

    #[test]
    fn lightest_edge_examples() {
        let sys = ExplicitSystem::new(4, vec![vec![0, 1]]).unwrap();
        let (e, w) = min_weighted_crossing_edge(&[0, 1], &sys, &[1.0]);
        assert_eq!((e, w), (Edge::new(0, 1), 0.0));
        let l = line(5);
        let weights = [1.0, 2.0, 3.0, 4.0];
        let (e, w) = min_weighted_crossing_edge(&[0, 1, 2, 3, 4], &l, &weights);
        assert_eq!((e, w), (Edge::new(0, 1), 1.0));
    }
}
