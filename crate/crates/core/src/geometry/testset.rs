//! Finite surrogate families for all half-spaces and all balls, and the
//! paraboloid lifting that turns balls into half-spaces.

use rand::seq::index;
use rand::Rng;

use super::ranges::{dot, Ball, GeometricRange, HalfSpace};
use super::{GeometricSystem, PointSet};
use crate::error::{Error, Result};

/// `p -> (p, |p|^2)`.
pub fn lift_point(p: &[f64]) -> Vec<f64> {
    let mut q = p.to_vec();
    q.push(dot(p, p));
    q
}

pub fn lift_points(points: &PointSet) -> PointSet {
    let coords = points.iter().flat_map(lift_point).collect();
    PointSet::new(points.dim() + 1, coords).expect("lifted coordinates are finite")
}

/// The half-space `{(y, z) : z - 2<c, y> + |c|^2 - r^2 <= 0}`, which contains
/// a lifted point exactly when the ball contains the original point.
pub fn lift_ball(ball: &Ball) -> HalfSpace {
    let mut normal: Vec<f64> = ball.center.iter().map(|c| -2.0 * c).collect();
    normal.push(1.0);
    let offset = ball.radius * ball.radius - dot(&ball.center, &ball.center);
    HalfSpace { normal, offset }
}

pub fn lift_ball_system(points: &PointSet, balls: &[Ball]) -> (PointSet, Vec<HalfSpace>) {
    (lift_points(points), balls.iter().map(lift_ball).collect())
}

/// The ball whose lift is `h`, if `h` bounds the paraboloid from above.
pub fn halfspace_to_ball(h: &HalfSpace) -> Option<Ball> {
    let (&wz, w) = h.normal.split_last()?;
    if wz <= 0.0 {
        return None;
    }
    let center: Vec<f64> = w.iter().map(|c| -c / (2.0 * wz)).collect();
    let r2 = h.offset / wz + dot(&center, &center);
    (r2 >= 0.0).then(|| Ball {
        center,
        radius: r2.sqrt(),
    })
}

/// Unit normal of the hyperplane through `pts` (exactly `d` points in `R^d`),
/// or `None` when they are affinely dependent.
fn hyperplane_normal(pts: &[&[f64]]) -> Option<Vec<f64>> {
    let d = pts[0].len();
    if d == 1 {
        return Some(vec![1.0]);
    }
    // Rows p_k - p_0; the normal spans their null space. Reduce to row
    // echelon form and back-substitute with the free variable set to one.
    let mut rows: Vec<Vec<f64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect())
        .collect();
    let scale = rows
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let tol = 1e-10 * scale;
    let mut pivots = Vec::with_capacity(d - 1);
    let mut r = 0;
    for col in 0..d {
        if r == rows.len() {
            break;
        }
        let best = (r..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))?;
        if rows[best][col].abs() <= tol {
            continue;
        }
        rows.swap(r, best);
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][col] / rows[r][col];
                if f != 0.0 {
                    for j in col..d {
                        rows[i][j] -= f * rows[r][j];
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if pivots.len() < d - 1 {
        return None;
    }
    let free = (0..d).find(|c| !pivots.contains(c))?;
    let mut normal = vec![0.0; d];
    normal[free] = 1.0;
    for (row, &col) in rows.iter().zip(&pivots) {
        normal[col] = -row[free] / row[col];
    }
    let norm = dot(&normal, &normal).sqrt();
    normal.iter_mut().for_each(|c| *c /= norm);
    Some(normal)
}

/// Advance `comb` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// A finite family of at most `(d + 1) t^d` half-spaces standing in for all
/// half-spaces.
///
/// For each axis, thresholds at the `t` quantiles of the coordinates; then
/// hyperplanes spanned by `d`-subsets of a uniform sample of `min(n, 2t)`
/// points, skipping affinely dependent subsets, until the cap is reached.
pub fn build_halfspace_testset<R: Rng + ?Sized>(points: &PointSet, t: usize, rng: &mut R) -> Result<Vec<HalfSpace>> {
    let d = points.dim();
    let n = points.len();
    if t == 0 {
        return Err(Error::InvalidParameter("t must be positive".into()));
    }
    if n < d {
        return Err(Error::Degenerate(format!("{n} points cannot span a hyperplane in dimension {d}")));
    }
    Ok(halfspace_family(points, t, rng))
}

fn halfspace_family<R: Rng + ?Sized>(points: &PointSet, t: usize, rng: &mut R) -> Vec<HalfSpace> {
    let d = points.dim();
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let cap = (d as f64 + 1.0) * (t as f64).powi(d as i32);
    let cap = if cap > usize::MAX as f64 / 2.0 { usize::MAX / 2 } else { cap as usize };
    let mut out = Vec::new();

    for axis in 0..d {
        let mut values: Vec<f64> = points.iter().map(|p| p[axis]).collect();
        values.sort_by(f64::total_cmp);
        let mut last = None;
        for j in 1..=t {
            let pos = (j * n).div_ceil(t).max(1) - 1;
            let v = values[pos.min(n - 1)];
            if last != Some(v) {
                let mut normal = vec![0.0; d];
                normal[axis] = 1.0;
                out.push(HalfSpace { normal, offset: v });
                last = Some(v);
            }
        }
    }
    out.truncate(cap);

    let sample_size = (2 * t).min(n);
    let mut sample = index::sample(rng, n, sample_size).into_vec();
    sample.sort_unstable();
    let mut comb: Vec<usize> = (0..d).collect();
    if sample_size >= d {
        loop {
            if out.len() >= cap {
                break;
            }
            let pts: Vec<&[f64]> = comb.iter().map(|&i| points.point(sample[i])).collect();
            if let Some(normal) = hyperplane_normal(&pts) {
                let offset = dot(&normal, pts[0]);
                out.push(HalfSpace { normal, offset });
            }
            if !next_combination(&mut comb, sample_size) {
                break;
            }
        }
    }
    out
}

/// Lifted points together with a lifted half-space family of at most
/// `(d + 2) n^{1 + 1/d}` members standing in for all balls.
#[derive(Debug, Clone)]
pub struct BallTestSet {
    pub lifted: PointSet,
    pub halfspaces: Vec<HalfSpace>,
}

impl BallTestSet {
    pub fn into_system(self) -> Result<GeometricSystem> {
        GeometricSystem::new(
            self.lifted,
            self.halfspaces.into_iter().map(GeometricRange::HalfSpace).collect(),
        )
    }
}

/// Lift the points and build a half-space family in `R^{d+1}` with
/// `t = floor(n^{1/d})`. With at most `d` points no hyperplane is spanned and
/// only the axis thresholds remain.
pub fn build_ball_testset<R: Rng + ?Sized>(points: &PointSet, rng: &mut R) -> Result<BallTestSet> {
    let d = points.dim();
    let n = points.len();
    let mut t = (n as f64).powf(1.0 / d as f64).floor().max(1.0) as usize;
    // Guard against the root rounding up past the true value.
    while t > 1 && (t as f64).powi(d as i32) > n as f64 {
        t -= 1;
    }
    let lifted = lift_points(points);
    let halfspaces = halfspace_family(&lifted, t, rng);
    Ok(BallTestSet { lifted, halfspaces })
}
