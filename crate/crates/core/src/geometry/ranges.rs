use serde::{Deserialize, Serialize};

use super::semialg::SemialgebraicRange;
use crate::error::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `{x : <normal, x> <= offset}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let h = Self { normal, offset };
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<()> {
        if self.normal.is_empty() || self.normal.iter().all(|&c| c == 0.0) {
            return Err(Error::Degenerate("half-space normal is zero".into()));
        }
        if !self.offset.is_finite() || self.normal.iter().any(|c| !c.is_finite()) {
            return Err(Error::Data("half-space has non-finite coefficients".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        assert_eq!(x.len(), self.normal.len(), "dimension mismatch");
        dot(&self.normal, x) <= self.offset
    }
}

/// `{x : |x - center|^2 <= radius^2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        let b = Self { center, radius };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::Data(format!("invalid ball radius {}", self.radius)));
        }
        if self.center.is_empty() || self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Data("invalid ball center".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        assert_eq!(x.len(), self.center.len(), "dimension mismatch");
        let d2: f64 = self.center.iter().zip(x).map(|(c, y)| (y - c) * (y - c)).sum();
        d2 <= self.radius * self.radius
    }
}

/// One range of a geometric family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GeometricRange {
    #[serde(rename = "halfspace")]
    HalfSpace(HalfSpace),
    Ball(Ball),
    Semialg(SemialgebraicRange),
}

impl GeometricRange {
    pub fn dim(&self) -> usize {
        match self {
            GeometricRange::HalfSpace(h) => h.normal.len(),
            GeometricRange::Ball(b) => b.center.len(),
            GeometricRange::Semialg(s) => s.dim(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            GeometricRange::HalfSpace(h) => h.contains(x),
            GeometricRange::Ball(b) => b.contains(x),
            GeometricRange::Semialg(s) => s.contains(x),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GeometricRange::HalfSpace(h) => h.validate(),
            GeometricRange::Ball(b) => b.validate(),
            GeometricRange::Semialg(s) => s.validate(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_boundaries() {
        let h = HalfSpace::new(vec![1.0, 0.0], 0.0).unwrap();
        assert!(h.contains(&[-1.0, 0.0]));
        assert!(h.contains(&[0.0, 7.0]));
        assert!(!h.contains(&[0.1, 0.0]));
        let b = Ball::new(vec![0.0, 0.0], 1.0).unwrap();
        assert!(b.contains(&[0.6, 0.8]));
        assert!(!b.contains(&[0.8, 0.8]));
        let point = Ball::new(vec![1.0, 2.0], 0.0).unwrap();
        assert!(point.contains(&[1.0, 2.0]));
        assert!(!point.contains(&[1.0, 2.000001]));
    }

    #[test]
    fn rejects_invalid() {
        assert!(HalfSpace::new(vec![0.0, 0.0], 1.0).is_err());
        assert!(Ball::new(vec![0.0], -1.0).is_err());
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn dimension_is_a_contract() {
        HalfSpace::new(vec![1.0, 0.0], 0.0).unwrap().contains(&[1.0]);
    }

    #[test]
    fn json_tags() {
        let h = GeometricRange::HalfSpace(HalfSpace::new(vec![1.0, 2.0], 0.5).unwrap());
        let text = serde_json::to_string(&h).unwrap();
        assert_eq!(text, r#"{"type":"halfspace","normal":[1.0,2.0],"offset":0.5}"#);
        let b: GeometricRange =
            serde_json::from_str(r#"{"type":"ball","center":[0.0],"radius":2.0}"#).unwrap();
        assert!(b.contains(&[-2.0]));
    }
}
