//! Two-colorings and their discrepancy.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{build_matching, Matching};
use crate::params::AssumptionParams;
use crate::system::{OracleCalls, SetSystem};

/// A ±1 sign for every element.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Coloring {
    signs: Vec<i8>,
}

impl Coloring {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(pos) = signs.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::Data(format!(
                "sign at position {pos} is {}, expected 1 or -1",
                signs[pos]
            )));
        }
        Ok(Self { signs })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn sign(&self, x: usize) -> i8 {
        self.signs[x]
    }

    /// Elements colored `sign`, in increasing order.
    pub fn class(&self, sign: i8) -> Vec<usize> {
        (0..self.signs.len()).filter(|&x| self.signs[x] == sign).collect()
    }

    pub fn to_report(&self, discrepancy: i64) -> ColoringReport {
        ColoringReport {
            signs: self.signs.clone(),
            discrepancy,
        }
    }
}

/// Serialized form of a coloring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringReport {
    pub signs: Vec<i8>,
    pub discrepancy: i64,
}

impl ColoringReport {
    pub fn coloring(&self) -> Result<Coloring> {
        Coloring::new(self.signs.clone())
    }
}

/// Signed sum of `coloring` over each range.
pub fn range_sums<S: SetSystem + ?Sized>(coloring: &Coloring, sys: &S) -> Vec<i64> {
    assert_eq!(
        coloring.len(),
        sys.num_elements(),
        "coloring size does not match the set system"
    );
    (0..sys.num_ranges())
        .map(|r| {
            (0..coloring.len())
                .filter(|&x| sys.contains(r, x))
                .map(|x| coloring.sign(x) as i64)
                .sum()
        })
        .collect()
}

/// `max_S |sum_{x in S} chi(x)|`, or 0 without ranges.
pub fn discrepancy<S: SetSystem + ?Sized>(coloring: &Coloring, sys: &S) -> i64 {
    range_sums(coloring, sys)
        .into_iter()
        .map(i64::abs)
        .max()
        .unwrap_or(0)
}

/// Color each matched pair with opposite signs, the first endpoint uniformly;
/// a loop gets a uniform sign.
///
/// Panics unless `matching` is a perfect matching of `0..n`.
pub fn color_from_matching<R: Rng + ?Sized>(matching: &Matching, n: usize, rng: &mut R) -> Coloring {
    assert!(
        matching.is_perfect(n),
        "coloring requires a perfect matching of {n} elements"
    );
    let mut signs = vec![0i8; n];
    for e in matching.edges() {
        let s: i8 = if rng.random::<bool>() { 1 } else { -1 };
        signs[e.u] = s;
        if !e.is_loop() {
            signs[e.v] = -s;
        }
    }
    Coloring { signs }
}

/// Uniform independent signs.
pub fn random_coloring<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Coloring {
    Coloring {
        signs: (0..n)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect(),
    }
}

#[derive(Debug, Clone)]
pub struct ColoringRun {
    pub coloring: Coloring,
    pub matching: Matching,
    pub calls: OracleCalls,
}

/// Coloring derived from a low-crossing perfect matching.
///
/// Matching first and coloring afterwards is the same random process as
/// assigning opposite signs to each pair at the moment it is matched, since
/// the signs never influence which pairs are chosen.
pub fn low_disc_color<S, R>(sys: &S, params: &AssumptionParams, rng: &mut R) -> Result<ColoringRun>
where
    S: SetSystem + ?Sized,
    R: Rng + ?Sized,
{
    let run = build_matching(sys, params, rng)?;
    let coloring = color_from_matching(&run.matching, sys.num_elements(), rng);
    Ok(ColoringRun {
        coloring,
        matching: run.matching,
        calls: run.calls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{Edge, ExplicitSystem};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn examples() {
        let sys = ExplicitSystem::new(6, vec![(0..5).collect()]).unwrap();
        assert_eq!(discrepancy(&Coloring::new(vec![1; 6]).unwrap(), &sys), 5);

        let sys = ExplicitSystem::new(6, vec![vec![0, 1, 2]]).unwrap();
        let alt = Coloring::new(vec![1, -1, 1, -1, 1, -1]).unwrap();
        assert_eq!(discrepancy(&alt, &sys), 1);

        let empty = ExplicitSystem::new(3, vec![]).unwrap();
        assert_eq!(discrepancy(&Coloring::new(vec![1; 3]).unwrap(), &empty), 0);
        assert!(Coloring::new(vec![1, 0]).is_err());
    }

    #[test]
    fn pairs_cancel() {
        let m = Matching::new(vec![Edge::new(0, 3), Edge::new(1, 2)]);
        let sys = ExplicitSystem::new(4, vec![vec![0, 3], vec![0, 1, 2, 3], vec![1, 2]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let chi = color_from_matching(&m, 4, &mut rng);
            assert_eq!(discrepancy(&chi, &sys), 0);
            assert_eq!(chi.signs().iter().map(|&s| s as i32).sum::<i32>(), 0);
        }
    }

    #[test]
    fn single_edge_is_fair() {
        let m = Matching::new(vec![Edge::new(0, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let plus_first = (0..10_000)
            .filter(|_| color_from_matching(&m, 2, &mut rng).sign(0) == 1)
            .count();
        assert!((plus_first as f64 / 10_000.0 - 0.5).abs() < 0.02);
    }

    #[test]
    #[should_panic(expected = "perfect matching")]
    fn rejects_partial_matching() {
        let m = Matching::new(vec![Edge::new(0, 1)]);
        color_from_matching(&m, 3, &mut ChaCha8Rng::seed_from_u64(0));
    }

    #[test]
    fn two_elements_forced() {
        let sys = ExplicitSystem::new(2, vec![vec![0]]).unwrap();
        let params = AssumptionParams::new(1.0, 1.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let run = low_disc_color(&sys, &params, &mut rng).unwrap();
            assert_eq!(discrepancy(&run.coloring, &sys), 1);
        }
    }

    #[test]
    fn random_coloring_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(random_coloring(0, &mut rng).is_empty());
        let plus = (0..10_000)
            .filter(|_| random_coloring(1, &mut rng).sign(0) == 1)
            .count();
        assert!((plus as f64 / 10_000.0 - 0.5).abs() < 0.02);
    }

    #[test]
    fn report_round_trip() {
        let chi = Coloring::new(vec![1, -1, -1]).unwrap();
        let text = serde_json::to_string(&chi.to_report(2)).unwrap();
        assert_eq!(text, r#"{"signs":[1,-1,-1],"discrepancy":2}"#);
        let back: ColoringReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.coloring().unwrap(), chi);
    }
}
