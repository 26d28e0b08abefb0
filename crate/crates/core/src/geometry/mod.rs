//! Geometric range families over point sets in `R^d`.
//!
//! All ranges are closed: boundary points are members.

mod generate;
mod io;
mod ranges;
mod semialg;
mod testset;

pub use generate::{gen_points, grid_instance, grid_side, halfspace_instance, Distribution};
pub use io::{read_points_csv, read_ranges_json, write_points_csv, write_ranges_json};
pub use ranges::{dot, Ball, GeometricRange, HalfSpace};
pub use semialg::{semialg_dual_shatter_params, Formula, Polynomial, SemialgebraicRange, Term, SIGN_TOL};
pub use testset::{
    build_ball_testset, build_halfspace_testset, halfspace_to_ball, lift_ball, lift_ball_system, lift_point,
    lift_points, BallTestSet,
};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::system::SetSystem;

/// `n` points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::Data(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::Data(format!(
                "coordinate {} of point {} is not finite",
                bad % dim,
                bad / dim
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn subset(&self, ids: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(ids.len() * self.dim);
        for &i in ids {
            coords.extend_from_slice(self.point(i));
        }
        PointSet {
            dim: self.dim,
            coords,
        }
    }
}

/// A point set with a finite family of geometric ranges, as a set system.
///
/// Memberships are evaluated once at construction and stored as bit rows.
#[derive(Debug, Clone)]
pub struct GeometricSystem {
    points: PointSet,
    ranges: Vec<GeometricRange>,
    bits: Vec<BitSet>,
    sizes: Vec<usize>,
}

impl GeometricSystem {
    pub fn new(points: PointSet, ranges: Vec<GeometricRange>) -> Result<Self> {
        for r in &ranges {
            r.validate()?;
            if r.dim() != points.dim() {
                return Err(Error::DimensionMismatch {
                    expected: points.dim(),
                    found: r.dim(),
                });
            }
        }
        let bits: Vec<BitSet> = ranges
            .iter()
            .map(|r| {
                let mut b = BitSet::new(points.len());
                for (i, p) in points.iter().enumerate() {
                    if r.contains(p) {
                        b.set(i, true);
                    }
                }
                b
            })
            .collect();
        let sizes = bits.iter().map(BitSet::count_ones).collect();
        Ok(Self {
            points,
            ranges,
            bits,
            sizes,
        })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn ranges(&self) -> &[GeometricRange] {
        &self.ranges
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }
}

impl SetSystem for GeometricSystem {
    fn num_elements(&self) -> usize {
        self.points.len()
    }

    fn num_ranges(&self) -> usize {
        self.ranges.len()
    }

    #[inline]
    fn contains(&self, range: usize, element: usize) -> bool {
        self.bits[range].get(element)
    }

    fn range_size(&self, range: usize) -> usize {
        self.sizes[range]
    }
}
