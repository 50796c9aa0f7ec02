//! Boxes, finite point patches and the small amount of linear algebra the
//! crate needs.

use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// A closed axis-aligned box `[lo_1, hi_1] x ... x [lo_d, hi_d]` in
/// physical space. Physical regions are closed so that symmetric regions
/// like `[-N, N]` contain both endpoints; internal windows instead use the
/// half-open convention (see [`crate::groups::InternalWindow`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct BoxRegion<R: Real> {
    pub lo: Vec<R>,
    pub hi: Vec<R>,
}

impl<R: Real> BoxRegion<R> {
    pub fn new(lo: Vec<R>, hi: Vec<R>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Argument("box endpoints must share a positive dimension".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::Argument("box has negative side length".into()));
        }
        Ok(Self { lo, hi })
    }

    /// 1-D interval `[lo, hi]`.
    pub fn interval(lo: R, hi: R) -> Self {
        Self::new(vec![lo], vec![hi]).expect("interval endpoints ordered")
    }

    /// Centered cube `[-h, h]^d`.
    pub fn centered_cube(dim: usize, half_side: R) -> Self {
        Self {
            lo: vec![-half_side; dim],
            hi: vec![half_side; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[R]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    pub fn volume(&self) -> R {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(lo, hi)| *hi - *lo)
            .fold(R::one(), |a, b| a * b)
    }

    pub fn widths(&self) -> Vec<R> {
        self.lo.iter().zip(&self.hi).map(|(lo, hi)| *hi - *lo).collect()
    }

    /// Shrinks every face inward by `margin`; empty boxes collapse to a point.
    pub fn shrink(&self, margin: R) -> Self {
        let lo: Vec<R> = self.lo.iter().map(|x| *x + margin).collect();
        let hi: Vec<R> = self.hi.iter().map(|x| *x - margin).collect();
        let (lo, hi) = lo
            .into_iter()
            .zip(hi)
            .map(|(a, b)| if a > b { ((a + b) / R::of(2.0), (a + b) / R::of(2.0)) } else { (a, b) })
            .unzip();
        Self { lo, hi }
    }

    pub fn translate(&self, t: &[R]) -> Self {
        Self {
            lo: self.lo.iter().zip(t).map(|(a, b)| *a + *b).collect(),
            hi: self.hi.iter().zip(t).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let lo: Vec<R> = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<R> = self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect();
        let (lo, hi) = lo
            .into_iter()
            .zip(hi)
            .map(|(a, b)| if a > b { (a, a) } else { (a, b) })
            .unzip();
        Self { lo, hi }
    }

    /// Symmetric box `[-m, m]^d` with `m = max |coordinate bound|`.
    pub fn symmetrized(&self) -> Self {
        let m = self
            .lo
            .iter()
            .chain(&self.hi)
            .fold(R::zero(), |acc, x| acc.max(x.abs()));
        Self::centered_cube(self.dim(), m)
    }
}

/// Lexicographic comparison of coordinate vectors; total order used for all
/// deterministic sorting of point sets (NaN never appears in valid data).
pub fn lex_cmp<R: Real>(a: &[R], b: &[R]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}

pub fn dist<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y) * (*x - *y))
        .fold(R::zero(), |s, v| s + v)
        .sqrt()
}

/// A finite set of physical points together with the region it exhausts:
/// the truncation of an (ideally infinite) point set to a box. When the
/// points came out of a scheme enumeration, `provenance` carries the exact
/// lattice coordinates of each point, in the same order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct PointPatch<R: Real> {
    pub points: Vec<Vec<R>>,
    pub region: BoxRegion<R>,
    pub provenance: Option<Vec<Vec<i64>>>,
}

impl<R: Real> PointPatch<R> {
    /// Builds a patch, sorting points (and provenance alongside) and
    /// checking the declared invariants: containment in the region and no
    /// duplicate points.
    pub fn new(
        mut points: Vec<Vec<R>>,
        region: BoxRegion<R>,
        provenance: Option<Vec<Vec<i64>>>,
    ) -> Result<Self> {
        for p in &points {
            if p.len() != region.dim() {
                return Err(Error::Argument("point dimension differs from region".into()));
            }
            if !region.contains(p) {
                return Err(Error::Argument(format!(
                    "point {:?} outside its declared region",
                    p.iter().map(|x| x.as_f64()).collect::<Vec<_>>()
                )));
            }
        }
        let mut provenance = provenance;
        if let Some(prov) = &mut provenance {
            if prov.len() != points.len() {
                return Err(Error::Argument("provenance length mismatch".into()));
            }
            let mut idx: Vec<usize> = (0..points.len()).collect();
            idx.sort_by(|&i, &j| lex_cmp(&points[i], &points[j]));
            let points_sorted: Vec<_> = idx.iter().map(|&i| points[i].clone()).collect();
            let prov_sorted: Vec<_> = idx.iter().map(|&i| prov[i].clone()).collect();
            points = points_sorted;
            *prov = prov_sorted;
        } else {
            points.sort_by(|a, b| lex_cmp(a, b));
        }
        for w in points.windows(2) {
            if dist(&w[0], &w[1]) <= R::of(crate::tol::DEDUP_TOL) {
                return Err(Error::Argument("duplicate points in patch".into()));
            }
        }
        Ok(Self { points, region, provenance })
    }

    /// Patch of 1-D points.
    pub fn from_scalars(xs: Vec<R>, region: BoxRegion<R>) -> Result<Self> {
        Self::new(xs.into_iter().map(|x| vec![x]).collect(), region, None)
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// 1-D coordinates; errors for higher dimension.
    pub fn scalars(&self) -> Result<Vec<R>> {
        if self.dim() != 1 {
            return Err(Error::Argument("scalar access on a multi-dimensional patch".into()));
        }
        Ok(self.points.iter().map(|p| p[0]).collect())
    }

    /// Membership within `DEDUP_TOL`.
    pub fn contains_point(&self, p: &[R]) -> bool {
        let tol = R::of(crate::tol::DEDUP_TOL);
        if self.dim() == 1 && p.len() == 1 {
            let idx = self.points.partition_point(|q| q[0] < p[0] - tol);
            return idx < self.points.len() && (self.points[idx][0] - p[0]).abs() <= tol;
        }
        self.nearest_distance(p).map(|d| d <= tol).unwrap_or(false)
    }

    /// Distance from `p` to the nearest patch point (`None` when empty).
    pub fn nearest_distance(&self, p: &[R]) -> Option<R> {
        if self.points.is_empty() {
            return None;
        }
        // Points are lex-sorted; prune on the first coordinate.
        let key = p[0];
        let idx = self.points.partition_point(|q| q[0] < key);
        let mut best = R::infinity();
        let mut right = idx;
        while right < self.points.len() && (self.points[right][0] - key).abs() <= best {
            let d = dist(&self.points[right], p);
            if d < best {
                best = d;
            }
            right += 1;
        }
        let mut left = idx;
        while left > 0 && (key - self.points[left - 1][0]).abs() <= best {
            let d = dist(&self.points[left - 1], p);
            if d < best {
                best = d;
            }
            left -= 1;
        }
        Some(best)
    }

    /// Keeps the points inside `sub` (which becomes the new region).
    pub fn restrict(&self, sub: &BoxRegion<R>) -> Self {
        let mut points = Vec::new();
        let mut prov = self.provenance.as_ref().map(|_| Vec::new());
        for (i, p) in self.points.iter().enumerate() {
            if sub.contains(p) {
                points.push(p.clone());
                if let (Some(acc), Some(src)) = (prov.as_mut(), self.provenance.as_ref()) {
                    acc.push(src[i].clone());
                }
            }
        }
        Self { points, region: sub.clone(), provenance: prov }
    }

    pub fn translate(&self, t: &[R]) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| p.iter().zip(t).map(|(a, b)| *a + *b).collect())
                .collect(),
            region: self.region.translate(t),
            provenance: self.provenance.clone(),
        }
    }
}

/// Dense row-major matrix over `R`; just enough linear algebra for star
/// maps, enumeration bounds and dual lattices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct Matrix<R: Real> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<R>,
}

impl<R: Real> Matrix<R> {
    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Argument("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::Argument("matrix rows must share a positive length".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![R::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = R::one();
        }
        Self { rows: n, cols: n, data }
    }

    pub fn at(&self, i: usize, j: usize) -> R {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_int_vec(&self, v: &[i64]) -> Vec<R> {
        (0..self.rows)
            .map(|i| {
                v.iter()
                    .enumerate()
                    .map(|(j, &n)| self.at(i, j) * R::of_i64(n))
                    .fold(R::zero(), |a, b| a + b)
            })
            .collect()
    }

    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        (0..self.rows)
            .map(|i| {
                v.iter()
                    .enumerate()
                    .map(|(j, &x)| self.at(i, j) * x)
                    .fold(R::zero(), |a, b| a + b)
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![R::zero(); self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.at(i, j);
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    /// Gauss-Jordan inverse; errors on non-square or singular input.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Argument("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(n).data;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[i * n + col]
                        .abs()
                        .partial_cmp(&a[j * n + col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a[pivot * n + col].abs() < R::of(1e-14) {
                return Err(Error::Argument("singular matrix".into()));
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    inv.swap(col * n + j, pivot * n + j);
                }
            }
            let p = a[col * n + col];
            for j in 0..n {
                a[col * n + j] = a[col * n + j] / p;
                inv[col * n + j] = inv[col * n + j] / p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[i * n + col];
                if f == R::zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a[col * n + j] * f;
                    a[i * n + j] = a[i * n + j] - v;
                    let w = inv[col * n + j] * f;
                    inv[i * n + j] = inv[i * n + j] - w;
                }
            }
        }
        Ok(Self { rows: n, cols: n, data: inv })
    }

    pub fn determinant(&self) -> Result<R> {
        if self.rows != self.cols {
            return Err(Error::Argument("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = R::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[i * n + col]
                        .abs()
                        .partial_cmp(&a[j * n + col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a[pivot * n + col].abs() < R::of(1e-14) {
                return Ok(R::zero());
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det = det * p;
            for i in col + 1..n {
                let f = a[i * n + col] / p;
                if f == R::zero() {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j] * f;
                    a[i * n + j] = a[i * n + j] - v;
                }
            }
        }
        Ok(det)
    }
}
