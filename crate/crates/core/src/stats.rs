//! Small statistical helpers for the benchmark harness and tests.

use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (denominator `n - 1`); zero for fewer than two values.
pub fn sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    /// One-sided p-value for `mean(a - b) < 0`.
    pub p_less: f64,
    /// Two-sided p-value for `mean(a - b) != 0`.
    pub p_two_sided: f64,
}

/// Paired t-test on the differences `a[i] - b[i]`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> TTest {
    assert_eq!(a.len(), b.len(), "paired samples differ in length");
    assert!(a.len() >= 2, "paired test needs at least two pairs");
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let df = (diffs.len() - 1) as f64;
    let m = mean(&diffs);
    let s = sd(&diffs);
    if s == 0.0 {
        // Identical differences: the sign of the mean decides.
        let (p_less, p_two) = match m.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Less) => (0.0, 0.0),
            Some(std::cmp::Ordering::Greater) => (1.0, 0.0),
            _ => (0.5, 1.0),
        };
        return TTest {
            t: if m == 0.0 { 0.0 } else { m.signum() * f64::INFINITY },
            df,
            p_less,
            p_two_sided: p_two,
        };
    }
    let t = m / (s / (diffs.len() as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    let p_less = dist.cdf(t);
    TTest {
        t,
        df,
        p_less,
        p_two_sided: 2.0 * dist.cdf(-t.abs()),
    }
}

/// Pearson chi-square goodness-of-fit p-value of `observed` counts against
/// cell probabilities `probs`. Cells with zero probability must be empty and
/// do not count toward the degrees of freedom.
pub fn chi_square_p(observed: &[u64], probs: &[f64]) -> f64 {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&o, &p) in observed.iter().zip(probs) {
        if p == 0.0 {
            if o > 0 {
                return 0.0;
            }
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    if cells < 2 {
        return 1.0;
    }
    let dist = ChiSquared::new((cells - 1) as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(stat)
}
