//! Point-set generators and the axis-threshold grid instance.

use rand::Rng;
use rand_distr::{Distribution as _, StandardNormal};
use std::fmt;
use std::str::FromStr;

use super::ranges::{GeometricRange, HalfSpace};
use super::{GeometricSystem, PointSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Uniform in `[0, 1]^d`.
    UniformBox,
    /// Standard normal.
    Gaussian,
    /// `ceil(sqrt(n))` Gaussian blobs of spread 0.05 around uniform centers.
    Clustered,
    /// Uniform direction, radius uniform in `[0.5, 1]`.
    Annulus,
    /// The first `n` points of the integer grid `[1, side]^d`, row-major.
    Grid,
}

impl Distribution {
    pub const ALL: [Distribution; 5] = [
        Distribution::UniformBox,
        Distribution::Gaussian,
        Distribution::Clustered,
        Distribution::Annulus,
        Distribution::Grid,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Distribution::UniformBox => "uniform-box",
            Distribution::Gaussian => "gaussian",
            Distribution::Clustered => "clustered",
            Distribution::Annulus => "annulus",
            Distribution::Grid => "grid",
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Distribution::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown distribution {s:?}")))
    }
}

fn gaussian_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

/// `n` points in `R^d` drawn from `dist`.
pub fn gen_points<R: Rng + ?Sized>(n: usize, d: usize, dist: Distribution, rng: &mut R) -> PointSet {
    assert!(d >= 1, "dimension must be positive");
    let mut coords = Vec::with_capacity(n * d);
    match dist {
        Distribution::UniformBox => {
            coords.extend((0..n * d).map(|_| rng.random::<f64>()));
        }
        Distribution::Gaussian => {
            for _ in 0..n {
                coords.extend(gaussian_vec(d, rng));
            }
        }
        Distribution::Clustered => {
            let k = (n as f64).sqrt().ceil().max(1.0) as usize;
            let centers: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
                .collect();
            for _ in 0..n {
                let c = &centers[rng.random_range(0..k)];
                coords.extend(c.iter().zip(gaussian_vec(d, rng)).map(|(ci, g)| ci + 0.05 * g));
            }
        }
        Distribution::Annulus => {
            for _ in 0..n {
                let mut dir = gaussian_vec(d, rng);
                let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    dir = vec![0.0; d];
                    dir[0] = 1.0;
                } else {
                    dir.iter_mut().for_each(|x| *x /= norm);
                }
                let r = rng.random_range(0.5..=1.0);
                coords.extend(dir.into_iter().map(|x| r * x));
            }
        }
        Distribution::Grid => {
            let side = grid_side(n.max(1), d);
            for i in 0..n {
                coords.extend(grid_coords(i, side, d).into_iter().map(|c| c as f64));
            }
        }
    }
    PointSet::new(d, coords).expect("generated coordinates are finite")
}

/// `ceil(n^{1/d})`, computed exactly.
pub fn grid_side(n: usize, d: usize) -> usize {
    let mut side = (n as f64).powf(1.0 / d as f64).round().max(1.0) as usize;
    while pow(side, d) < n {
        side += 1;
    }
    while side > 1 && pow(side - 1, d) >= n {
        side -= 1;
    }
    side
}

fn pow(base: usize, exp: usize) -> usize {
    (0..exp).fold(1usize, |acc, _| acc.saturating_mul(base))
}

/// Integer coordinates in `[1, side]^d` of row-major grid index `i`; the
/// last axis varies fastest.
fn grid_coords(mut i: usize, side: usize, d: usize) -> Vec<usize> {
    let mut c = vec![0; d];
    for axis in (0..d).rev() {
        c[axis] = i % side + 1;
        i /= side;
    }
    c
}

/// The grid `[1, side]^d` with `side = ceil(n0^{1/d})`, and the axis
/// thresholds `x_i <= j + 1/2` for `j = 1..side-1`.
///
/// An edge is crossed by exactly as many thresholds as the `l1` distance
/// between its endpoints.
pub fn grid_instance(n0: usize, d: usize) -> Result<GeometricSystem> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if n0 < pow(2, d) {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least 2^{d} points, got {n0}"
        )));
    }
    let side = grid_side(n0, d);
    let total = pow(side, d);
    let mut coords = Vec::with_capacity(total * d);
    for i in 0..total {
        coords.extend(grid_coords(i, side, d).into_iter().map(|c| c as f64));
    }
    let points = PointSet::new(d, coords)?;
    let mut ranges = Vec::with_capacity(d * (side - 1));
    for axis in 0..d {
        for j in 1..side {
            let mut normal = vec![0.0; d];
            normal[axis] = 1.0;
            ranges.push(GeometricRange::HalfSpace(HalfSpace {
                normal,
                offset: j as f64 + 0.5,
            }));
        }
    }
    GeometricSystem::new(points, ranges)
}

/// `n` points from `dist` in `R^d` with the half-space test set of
/// parameter `t = ceil(n^{1/d})`.
pub fn halfspace_instance<R: Rng + ?Sized>(n: usize, d: usize, dist: Distribution, rng: &mut R) -> Result<GeometricSystem> {
    let points = gen_points(n, d, dist, rng);
    let t = grid_side(n.max(1), d);
    let ranges = super::build_halfspace_testset(&points, t, rng)?
        .into_iter()
        .map(GeometricRange::HalfSpace)
        .collect();
    GeometricSystem::new(points, ranges)
}
