//! Parameters `(a, b, gamma)` of the low-crossing assumption: every subset
//! `Y` of the ground set has a perfect matching with crossing number at most
//! `a * |Y|^gamma + b`.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Smallest range count for which the matching-to-coloring bound applies.
pub const MIN_RANGES: usize = 34;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionParams {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
}

impl AssumptionParams {
    pub fn new(a: f64, b: f64, gamma: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
        }
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "b must be non-negative, got {b}"
            )));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0, 1], got {gamma}"
            )));
        }
        Ok(Self { a, b, gamma })
    }

    /// `a * k^gamma + b`, the assumed crossing number for `k` elements.
    pub fn crossing_budget(&self, k: usize) -> f64 {
        self.a * (k as f64).powf(self.gamma) + self.b
    }

    /// Expected crossing-number bound of a full matching on `n` elements
    /// with `m` ranges: `(3a/gamma) n^gamma + (3b/2) log n + 18 ln(mn) log n`.
    pub fn matching_bound(&self, n: usize, m: usize) -> f64 {
        let nf = n as f64;
        let log_n = nf.log2();
        3.0 * self.a / self.gamma * nf.powf(self.gamma)
            + 1.5 * self.b * log_n
            + 18.0 * (m as f64 * nf).ln() * log_n
    }

    /// Expected discrepancy bound of the coloring derived from a full matching:
    /// `3 sqrt((a/gamma) n^gamma ln m + (b/2) ln m log n + 12 ln^2 m log n)`.
    pub fn discrepancy_bound(&self, n: usize, m: usize) -> f64 {
        let nf = n as f64;
        let ln_m = (m as f64).ln();
        let log_n = nf.log2();
        3.0 * (self.a / self.gamma * nf.powf(self.gamma) * ln_m
            + self.b / 2.0 * ln_m * log_n
            + 12.0 * ln_m * ln_m * log_n)
            .sqrt()
    }

    /// Expected incidence-call bound of a full matching run:
    /// `min{24 n^{3-g} ln n / a + 18 m n^{1-g} ln(mn) min{2/(1-g), log n} / a, n^3/7 + mn/2}`.
    pub fn matching_call_bound(&self, n: usize, m: usize) -> f64 {
        let nf = n as f64;
        let mf = m as f64;
        let g = self.gamma;
        let tail = if g < 1.0 {
            (2.0 / (1.0 - g)).min(nf.log2())
        } else {
            nf.log2()
        };
        let sampled = 24.0 * nf.powf(3.0 - g) * nf.ln() / self.a
            + 18.0 * mf * nf.powf(1.0 - g) * (mf * nf).ln() * tail / self.a;
        let dense = nf.powi(3) / 7.0 + mf * nf / 2.0;
        sampled.min(dense)
    }
}

/// Parameters implied by a dual shatter function bounded by `c * k^d`:
/// `a = (2c)^{1/d} / (2 ln 2 (1 - 1/d))`, `b = ln m / ln 2`, `gamma = 1 - 1/d`.
pub fn params_from_dual_shatter(c: f64, d: f64, m: usize) -> Result<AssumptionParams> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    if !(d > 1.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!("d must exceed 1, got {d}")));
    }
    if m < MIN_RANGES {
        return Err(Error::Precondition(format!(
            "at least {MIN_RANGES} ranges required, got {m}"
        )));
    }
    let gamma = 1.0 - 1.0 / d;
    let a = (2.0 * c).powf(1.0 / d) / (2.0 * LN_2 * gamma);
    let b = (m as f64).ln() / LN_2;
    AssumptionParams::new(a, b, gamma)
}

/// Discrepancy bound stated directly in terms of the dual shatter constants:
/// `3 sqrt((9 c^{1/d} / 2) n^{1-1/d} ln m + 19 ln^2 m ln n)`.
pub fn dual_shatter_discrepancy_bound(c: f64, d: f64, n: usize, m: usize) -> f64 {
    let nf = n as f64;
    let ln_m = (m as f64).ln();
    3.0 * (4.5 * c.powf(1.0 / d) * nf.powf(1.0 - 1.0 / d) * ln_m + 19.0 * ln_m * ln_m * nf.ln())
        .sqrt()
}

/// Incidence-call bound stated in terms of the dual shatter constants:
/// `34 n^{2+1/d} ln n / c^{1/d} + 25 m n^{1/d} ln(mn) log n / c^{1/d}`.
pub fn dual_shatter_call_bound(c: f64, d: f64, n: usize, m: usize) -> f64 {
    let nf = n as f64;
    let mf = m as f64;
    let root = c.powf(1.0 / d);
    34.0 * nf.powf(2.0 + 1.0 / d) * nf.ln() / root
        + 25.0 * mf * nf.powf(1.0 / d) * (mf * nf).ln() * nf.log2() / root
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boxed_formula_at_c1_d2() {
        let p = params_from_dual_shatter(1.0, 2.0, 34).unwrap();
        assert!((p.a - 2f64.sqrt() / LN_2).abs() < 1e-12);
        assert!((p.a - 2.0403).abs() < 1e-4);
        assert!((p.b - 34f64.ln() / LN_2).abs() < 1e-12);
        assert!((p.b - 5.0875).abs() < 1e-4);
        assert_eq!(p.gamma, 0.5);
    }

    #[test]
    fn large_d_limit() {
        let p = params_from_dual_shatter(1.0, 1e9, 34).unwrap();
        assert!((p.gamma - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            params_from_dual_shatter(1.0, 1.0, 40),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            params_from_dual_shatter(1.0, 2.0, 33),
            Err(Error::Precondition(_))
        ));
        assert!(AssumptionParams::new(0.0, 1.0, 0.5).is_err());
        assert!(AssumptionParams::new(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn monotone_in_c_and_m() {
        let mut prev = params_from_dual_shatter(0.5, 3.0, 34).unwrap();
        for step in 1..20 {
            let p = params_from_dual_shatter(0.5 + step as f64, 3.0, 34 + step * 10).unwrap();
            assert!(p.a > prev.a);
            assert!(p.b > prev.b);
            prev = p;
        }
    }

    #[test]
    fn assumption_bound_matches_dual_shatter_bound() {
        // Substituting the dual-shatter parameters into the general discrepancy
        // bound never exceeds the closed form in c and d.
        for &(c, d, n, m) in &[(118.0, 2.0, 1024, 3000), (1.0, 3.0, 4096, 500)] {
            let p = params_from_dual_shatter(c, d, m).unwrap();
            assert!(
                p.discrepancy_bound(n, m) <= dual_shatter_discrepancy_bound(c, d, n, m) * 1.0001
            );
        }
    }
}
