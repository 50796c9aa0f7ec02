//! Concrete cut-and-project schemes `(G x H, L)`: the star map, model-set
//! and weighted-comb generation, the dual scheme for Euclidean internal
//! spaces, and a gallery of presets.
//!
//! Abstract lattice coordinates are exact integers end to end; only the
//! physical and internal embeddings produce floats, so window membership
//! never flickers from accumulated error in the coordinates.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geom::{lex_cmp, BoxRegion, Matrix, PointPatch};
use crate::groups::{
    internal_add, internal_scale, InternalElement, InternalGroupSpec, InternalWindow,
};
use crate::{Error, Real, Result};

/// A cut-and-project scheme: rank-`r` abstract lattice `Z^r`, a physical
/// embedding into `R^d` and a star map into the internal group, with the
/// Haar calibration constant precomputed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct SchemeSpec<R: Real> {
    pub rank: usize,
    /// `d x r` matrix of the physical projection.
    pub phys_map: Matrix<R>,
    pub internal: InternalGroupSpec,
    /// Image of each abstract generator under the star map.
    pub star_map: Vec<InternalElement<R>>,
    /// Scheme-level Haar normalization (see [`crate::groups::haar_measure`]).
    pub calibration: R,
}

/// Relative-denseness witness recorded at construction time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct SchemeWitness<R: Real> {
    /// Largest nearest-point distance of the projected test patch.
    pub covering_radius: R,
    /// Size of the coordinate test box used for the discreteness check.
    pub test_bound: i64,
}

impl<R: Real> SchemeSpec<R> {
    /// Builds and validates a scheme.
    ///
    /// Validation enumerates a test box of lattice coordinates and checks
    /// that the combined map `Z^r -> G x H` is injective there, and that
    /// the physical projection of the test patch has a finite covering
    /// radius on its spanned region.
    pub fn new(
        phys_map: Matrix<R>,
        internal: InternalGroupSpec,
        star_map: Vec<InternalElement<R>>,
        calibration: R,
    ) -> Result<Self> {
        let rank = phys_map.cols;
        if star_map.len() != rank {
            return Err(Error::Argument("star map must give one image per generator".into()));
        }
        if calibration <= R::zero() {
            return Err(Error::Argument("calibration must be positive".into()));
        }
        for e in &star_map {
            internal.check_element(e)?;
        }
        let scheme = Self { rank, phys_map, internal, star_map, calibration };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn dim(&self) -> usize {
        self.phys_map.rows
    }

    /// Discreteness witness: the combined map is injective on the test box
    /// `|coords| <= bound` (bound shrinks with rank to keep the check
    /// affordable; rank 1 and 2 use the full `|c| <= 100` box).
    fn validate(&self) -> Result<SchemeWitness<R>> {
        let bound: i64 = match self.rank {
            1 => 100,
            2 => 100,
            3 => 20,
            _ => 6,
        };
        let mut coords = vec![-bound; self.rank];
        let zero_tol = R::of(crate::tol::EQ_TOL);
        loop {
            let nonzero = coords.iter().any(|&c| c != 0);
            if nonzero {
                let (phys, star) = self.star_unchecked(&coords);
                let phys_zero =
                    phys.iter().all(|x| x.abs() < zero_tol);
                if phys_zero && star == self.internal.zero() {
                    return Err(Error::Argument(format!(
                        "combined map not injective: coords {coords:?} map to (0, 0)"
                    )));
                }
            }
            // odometer over the box
            let mut k = 0;
            loop {
                if k == self.rank {
                    // full sweep done; now the covering-radius witness
                    return self.covering_witness(bound);
                }
                coords[k] += 1;
                if coords[k] <= bound {
                    break;
                }
                coords[k] = -bound;
                k += 1;
            }
        }
    }

    fn covering_witness(&self, bound: i64) -> Result<SchemeWitness<R>> {
        // Project a small coordinate box and measure the largest gap of the
        // first physical coordinate on the central half of its span.
        let mut xs: Vec<R> = Vec::new();
        let mut coords = vec![-bound; self.rank];
        loop {
            let phys = self.phys_map.mul_int_vec(&coords);
            xs.push(phys[0]);
            let mut k = 0;
            loop {
                if k == self.rank {
                    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
                    let span = *xs.last().unwrap() - xs[0];
                    if span <= R::zero() {
                        return Err(Error::Argument(
                            "physical projection is degenerate on the test box".into(),
                        ));
                    }
                    let lo = xs[0] + span / R::of(4.0);
                    let hi = *xs.last().unwrap() - span / R::of(4.0);
                    let mut radius = R::zero();
                    for w in xs.windows(2) {
                        if w[1] < lo || w[0] > hi {
                            continue;
                        }
                        let gap = (w[1] - w[0]) / R::of(2.0);
                        if gap > radius {
                            radius = gap;
                        }
                    }
                    return Ok(SchemeWitness { covering_radius: radius, test_bound: bound });
                }
                coords[k] += 1;
                if coords[k] <= bound {
                    break;
                }
                coords[k] = -bound;
                k += 1;
            }
        }
    }

    /// Star map: physical and internal images of an abstract lattice point.
    pub fn star(&self, coords: &[i64]) -> Result<(Vec<R>, InternalElement<R>)> {
        if coords.len() != self.rank {
            return Err(Error::Argument(format!(
                "expected {} coordinates, got {}",
                self.rank,
                coords.len()
            )));
        }
        if coords.iter().any(|c| c.abs() > (1 << 40)) {
            return Err(Error::Argument("lattice coordinates exceed the overflow guard".into()));
        }
        Ok(self.star_unchecked(coords))
    }

    fn star_unchecked(&self, coords: &[i64]) -> (Vec<R>, InternalElement<R>) {
        let phys = self.phys_map.mul_int_vec(coords);
        let mut star = self.internal.zero();
        for (gen_image, &c) in self.star_map.iter().zip(coords) {
            if c == 0 {
                continue;
            }
            let scaled = internal_scale(&self.internal, gen_image, c)
                .expect("star map images conform by construction");
            star = internal_add(&self.internal, &star, &scaled)
                .expect("star map images conform by construction");
        }
        (phys, star)
    }

    /// Combined square embedding matrix for Euclidean internal spaces
    /// (physical rows stacked over internal rows), when `r = d + m`.
    pub fn combined_matrix(&self) -> Result<Matrix<R>> {
        let m = match &self.internal {
            InternalGroupSpec::Euclidean { m } => *m,
            _ => {
                return Err(Error::UnsupportedScheme(
                    "combined matrix needs a Euclidean internal space".into(),
                ))
            }
        };
        if self.dim() + m != self.rank {
            return Err(Error::UnsupportedScheme(format!(
                "embedding is not square: d + m = {} but rank = {}",
                self.dim() + m,
                self.rank
            )));
        }
        let mut rows: Vec<Vec<R>> = (0..self.dim()).map(|i| self.phys_map.row(i).to_vec()).collect();
        for axis in 0..m {
            let row: Vec<R> = self
                .star_map
                .iter()
                .map(|e| match e {
                    InternalElement::Euclidean(v) => v[axis],
                    _ => unreachable!("internal is Euclidean"),
                })
                .collect();
            rows.push(row);
        }
        Matrix::from_rows(rows)
    }
}

/// One linear constraint `lo <= row . n <= hi` on integer coordinates.
struct ConstraintRow<R: Real> {
    row: Vec<R>,
    lo: R,
    hi: R,
}

/// Exhaustive enumeration of the integer solutions of a full-rank system
/// of interval constraints, by nested interval refinement: at each level
/// the admissible interval for the current coordinate is derived from every
/// constraint row by relaxing the not-yet-fixed coordinates over their base
/// ranges. This prunes exactly and misses nothing.
fn enumerate_integer_box<R: Real>(
    constraints: &[ConstraintRow<R>],
    rank: usize,
    mut visit: impl FnMut(&[i64]),
) -> Result<()> {
    // Base ranges via the inverse of a square subsystem.
    if constraints.len() < rank {
        return Err(Error::EnumerationBound(format!(
            "{} constraints cannot bound {} coordinates",
            constraints.len(),
            rank
        )));
    }
    let square = Matrix::from_rows(constraints[..rank].iter().map(|c| c.row.clone()).collect())?;
    let inv = square
        .inverse()
        .map_err(|_| Error::EnumerationBound("constraint matrix is singular".into()))?;
    let slack = R::of(1e-9);
    let mut base: Vec<(i64, i64)> = Vec::with_capacity(rank);
    for i in 0..rank {
        let mut lo = R::zero();
        let mut hi = R::zero();
        for j in 0..rank {
            let a = inv.at(i, j);
            let (blo, bhi) = (constraints[j].lo, constraints[j].hi);
            if a >= R::zero() {
                lo = lo + a * blo;
                hi = hi + a * bhi;
            } else {
                lo = lo + a * bhi;
                hi = hi + a * blo;
            }
        }
        let lo_i = (lo - slack).ceil().as_f64() as i64;
        let hi_i = (hi + slack).floor().as_f64() as i64;
        base.push((lo_i, hi_i));
    }

    // Nested refinement, last coordinate innermost.
    fn recurse<R: Real>(
        constraints: &[ConstraintRow<R>],
        base: &[(i64, i64)],
        fixed: &mut Vec<i64>,
        visit: &mut impl FnMut(&[i64]),
    ) {
        let level = fixed.len();
        let rank = base.len();
        if level == rank {
            visit(fixed);
            return;
        }
        let slack = R::of(1e-9);
        let (mut lo_i, mut hi_i) = base[level];
        for c in constraints {
            let a = c.row[level];
            if a.abs() < R::of(1e-13) {
                continue;
            }
            // residual interval after removing fixed coords and relaxing
            // the free ones over their base ranges
            let mut rlo = c.lo;
            let mut rhi = c.hi;
            for (j, &v) in fixed.iter().enumerate() {
                let t = c.row[j] * R::of_i64(v);
                rlo = rlo - t;
                rhi = rhi - t;
            }
            for j in level + 1..rank {
                let coef = c.row[j];
                let (blo, bhi) = (R::of_i64(base[j].0), R::of_i64(base[j].1));
                if coef >= R::zero() {
                    rlo = rlo - coef * bhi;
                    rhi = rhi - coef * blo;
                } else {
                    rlo = rlo - coef * blo;
                    rhi = rhi - coef * bhi;
                }
            }
            let (a_lo, a_hi) = if a > R::zero() { (rlo / a, rhi / a) } else { (rhi / a, rlo / a) };
            lo_i = lo_i.max((a_lo - slack).ceil().as_f64() as i64);
            hi_i = hi_i.min((a_hi + slack).floor().as_f64() as i64);
        }
        for v in lo_i..=hi_i {
            fixed.push(v);
            recurse(constraints, base, fixed, visit);
            fixed.pop();
        }
    }

    let mut fixed = Vec::with_capacity(rank);
    recurse(constraints, &base, &mut fixed, &mut visit);
    Ok(())
}

/// Collects the lattice coordinates whose physical image can meet `region`
/// (and, for Euclidean internal spaces, whose star can meet the window
/// bounding box), then filters exactly.
fn enumerate_scheme<R: Real>(
    s: &SchemeSpec<R>,
    region: &BoxRegion<R>,
    internal_bbox: Option<(Vec<R>, Vec<R>)>,
    mut visit: impl FnMut(&[i64], &[R], &InternalElement<R>),
) -> Result<()> {
    if region.dim() != s.dim() {
        return Err(Error::Argument("region dimension differs from scheme".into()));
    }
    let mut constraints: Vec<ConstraintRow<R>> = (0..s.dim())
        .map(|i| ConstraintRow { row: s.phys_map.row(i).to_vec(), lo: region.lo[i], hi: region.hi[i] })
        .collect();
    if let Some((lo, hi)) = internal_bbox {
        if let InternalGroupSpec::Euclidean { m } = &s.internal {
            for axis in 0..*m {
                let row: Vec<R> = s
                    .star_map
                    .iter()
                    .map(|e| match e {
                        InternalElement::Euclidean(v) => v[axis],
                        _ => unreachable!(),
                    })
                    .collect();
                constraints.push(ConstraintRow { row, lo: lo[axis], hi: hi[axis] });
            }
        }
    }
    if constraints.len() < s.rank {
        return Err(Error::EnumerationBound(
            "physical region and window do not bound the lattice coordinates; \
             the enumeration would be infinite"
                .into(),
        ));
    }
    enumerate_integer_box(&constraints, s.rank, |coords| {
        let (phys, star) = s.star_unchecked(coords);
        if region.contains(&phys) {
            visit(coords, &phys, &star);
        }
    })
}

/// All physical projections of lattice points whose star value lies in the
/// window and whose physical part lies in `region`. Exhaustive, sorted,
/// with physical duplicates (from a nonzero star-map kernel) deduplicated.
pub fn model_set<R: Real>(
    s: &SchemeSpec<R>,
    w: &InternalWindow<R>,
    region: &BoxRegion<R>,
) -> Result<PointPatch<R>> {
    w.check(&s.internal)?;
    let internal_bbox = match (&s.internal, w) {
        (InternalGroupSpec::Euclidean { .. }, _) => match w.euclidean_bbox() {
            Some(b) => Some(b),
            None => {
                // empty window: nothing to enumerate
                return PointPatch::new(vec![], region.clone(), Some(vec![]));
            }
        },
        _ => None,
    };
    let mut hits: Vec<(Vec<R>, Vec<i64>)> = Vec::new();
    enumerate_scheme(s, region, internal_bbox, |coords, phys, star| {
        if w.contains_unchecked(&s.internal, star) {
            hits.push((phys.to_vec(), coords.to_vec()));
        }
    })?;
    hits.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    // ker(star) != 0 yields physical duplicates; keep the first witness.
    let tol = R::of(crate::tol::DEDUP_TOL);
    let mut points: Vec<Vec<R>> = Vec::with_capacity(hits.len());
    let mut prov: Vec<Vec<i64>> = Vec::with_capacity(hits.len());
    for (p, c) in hits {
        if let Some(last) = points.last() {
            if crate::geom::dist(last, &p) <= tol {
                continue;
            }
        }
        points.push(p);
        prov.push(c);
    }
    PointPatch::new(points, region.clone(), Some(prov))
}

/// A finite truncation of a weighted Dirac comb: support points with
/// complex weights, all inside `region`; zero weights are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct WeightedComb<R: Real> {
    pub points: Vec<Vec<R>>,
    pub weights: Vec<Complex<R>>,
    pub region: BoxRegion<R>,
}

impl<R: Real> WeightedComb<R> {
    pub fn new(
        entries: Vec<(Vec<R>, Complex<R>)>,
        region: BoxRegion<R>,
        zero_tol: R,
    ) -> Result<Self> {
        let mut entries: Vec<(Vec<R>, Complex<R>)> = entries
            .into_iter()
            .filter(|(_, w)| w.norm() > zero_tol)
            .collect();
        for (p, _) in &entries {
            if !region.contains(p) {
                return Err(Error::Argument("comb support point outside its region".into()));
            }
        }
        entries.sort_by(|a, b| lex_cmp(&a.0, &b.0));
        for w in entries.windows(2) {
            if crate::geom::dist(&w[0].0, &w[1].0) <= R::of(crate::tol::DEDUP_TOL) {
                return Err(Error::Argument("duplicate support points in comb".into()));
            }
        }
        let (points, weights) = entries.into_iter().unzip();
        Ok(Self { points, weights, region })
    }

    pub fn empty(region: BoxRegion<R>) -> Self {
        Self { points: vec![], weights: vec![], region }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    /// Weight at `x` (zero off the support), matched within `DEDUP_TOL`.
    pub fn weight_at(&self, x: &[R]) -> Complex<R> {
        let tol = R::of(crate::tol::DEDUP_TOL);
        let key = x[0] - tol;
        let mut i = self.points.partition_point(|q| q[0] < key);
        while i < self.points.len() && self.points[i][0] <= x[0] + tol {
            if crate::geom::dist(&self.points[i], x) <= tol {
                return self.weights[i];
            }
            i += 1;
        }
        Complex::new(R::zero(), R::zero())
    }

    /// The support as a patch over the same region.
    pub fn support_patch(&self) -> PointPatch<R> {
        PointPatch::new(self.points.clone(), self.region.clone(), None)
            .expect("comb support satisfies patch invariants")
    }

    /// Indicator comb of a patch (weight one everywhere).
    pub fn indicator(patch: &PointPatch<R>) -> Self {
        Self {
            points: patch.points.clone(),
            weights: vec![Complex::new(R::one(), R::zero()); patch.len()],
            region: patch.region.clone(),
        }
    }
}

/// The function on the internal group that weights a model comb.
///
/// Euclidean variants must carry bounded support (the support box is what
/// bounds the comb enumeration); finite internal groups can tabulate the
/// function on residues outright.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real", tag = "kind", rename_all = "snake_case")]
pub enum WindowFunction<R: Real> {
    /// `1` on the window, `0` elsewhere.
    Indicator { window: InternalWindow<R> },
    /// `max(0, 1 - |h| / radius)` on a 1-D Euclidean internal space.
    Tent { radius: R },
    /// Covariogram of a 1-D Euclidean window: `vol(W intersect (W + h))`.
    Covariogram { window: InternalWindow<R> },
    /// Finite table of values on a discrete internal group.
    Samples { entries: Vec<(InternalElement<R>, Complex<R>)> },
}

impl<R: Real> WindowFunction<R> {
    pub fn eval(&self, g: &InternalGroupSpec, h: &InternalElement<R>) -> Result<Complex<R>> {
        match self {
            Self::Indicator { window } => {
                let inside = window.contains(g, h)?;
                Ok(if inside { Complex::new(R::one(), R::zero()) } else { Complex::new(R::zero(), R::zero()) })
            }
            Self::Tent { radius } => match h {
                InternalElement::Euclidean(v) if v.len() == 1 => {
                    let x = R::one() - v[0].abs() / *radius;
                    Ok(Complex::new(x.max(R::zero()), R::zero()))
                }
                _ => Err(Error::SpecMismatch("tent needs a 1-D Euclidean internal space".into())),
            },
            Self::Covariogram { window } => match (window, h) {
                (InternalWindow::Euclidean { boxes }, InternalElement::Euclidean(v))
                    if v.len() == 1 =>
                {
                    let t = v[0];
                    let mut overlap = R::zero();
                    // covariogram of a union: measure of W intersect (W+t);
                    // exact for disjoint pieces after merging
                    let merged = {
                        let mut iv: Vec<(R, R)> = boxes.iter().map(|b| (b.lo[0], b.hi[0])).collect();
                        iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
                        iv
                    };
                    for &(a1, b1) in &merged {
                        for &(a2, b2) in &merged {
                            let lo = a1.max(a2 + t);
                            let hi = b1.min(b2 + t);
                            if hi > lo {
                                overlap = overlap + (hi - lo);
                            }
                        }
                    }
                    Ok(Complex::new(overlap, R::zero()))
                }
                _ => Err(Error::SpecMismatch(
                    "covariogram needs a 1-D Euclidean window".into(),
                )),
            },
            Self::Samples { entries } => {
                for (e, w) in entries {
                    g.check_element(e)?;
                    if e == h {
                        return Ok(*w);
                    }
                }
                Ok(Complex::new(R::zero(), R::zero()))
            }
        }
    }

    /// Declared support bounding box in internal Euclidean coordinates;
    /// `None` when the internal group is discrete (no bound needed).
    pub fn support_bbox(&self, g: &InternalGroupSpec) -> Result<Option<(Vec<R>, Vec<R>)>> {
        match g {
            InternalGroupSpec::Euclidean { .. } => match self {
                Self::Indicator { window } | Self::Covariogram { window } => {
                    let bbox = window.euclidean_bbox().ok_or_else(|| {
                        Error::Argument("empty window has no support box".into())
                    })?;
                    match self {
                        Self::Covariogram { .. } => {
                            // support of the covariogram is W - W
                            let (lo, hi) = bbox;
                            let dlo: Vec<R> =
                                lo.iter().zip(&hi).map(|(l, h)| *l - *h).collect();
                            let dhi: Vec<R> =
                                hi.iter().zip(&lo).map(|(h, l)| *h - *l).collect();
                            Ok(Some((dlo, dhi)))
                        }
                        _ => Ok(Some(bbox)),
                    }
                }
                Self::Tent { radius } => Ok(Some((vec![-*radius], vec![*radius]))),
                Self::Samples { .. } => Err(Error::Argument(
                    "sampled functions on a Euclidean internal space carry no support box"
                        .into(),
                )),
            },
            _ => Ok(None),
        }
    }
}

/// Weighted model comb truncation: weights `g(x*)` over lattice points with
/// physical part in `region`, dropping magnitudes at or below `zero_tol`.
pub fn weighted_comb<R: Real>(
    s: &SchemeSpec<R>,
    g: &WindowFunction<R>,
    region: &BoxRegion<R>,
    zero_tol: R,
) -> Result<WeightedComb<R>> {
    let bbox = match g.support_bbox(&s.internal) {
        Ok(b) => b,
        Err(_) => {
            return Err(Error::Argument(
                "weighted combs over Euclidean internal spaces need a declared support box"
                    .into(),
            ))
        }
    };
    let mut entries: Vec<(Vec<R>, Complex<R>)> = Vec::new();
    let mut eval_err = None;
    enumerate_scheme(s, region, bbox, |_, phys, star| {
        if eval_err.is_some() {
            return;
        }
        match g.eval(&s.internal, star) {
            Ok(w) => {
                if w.norm() > zero_tol {
                    entries.push((phys.to_vec(), w));
                }
            }
            Err(e) => eval_err = Some(e),
        }
    })?;
    if let Some(e) = eval_err {
        return Err(e);
    }
    // ker(star) != 0 duplicates project to the same x with the same weight
    entries.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    entries.dedup_by(|a, b| crate::geom::dist(&a.0, &b.0) <= R::of(crate::tol::DEDUP_TOL));
    WeightedComb::new(entries, region.clone(), zero_tol)
}

/// Dual scheme of a Euclidean-internal scheme with square invertible
/// embedding: the lattice is replaced by its annihilator under the pairing
/// `exp(2 pi i <., .>)`, i.e. the inverse-transpose lattice.
pub fn dual_scheme<R: Real>(s: &SchemeSpec<R>) -> Result<SchemeSpec<R>> {
    let m_int = match &s.internal {
        InternalGroupSpec::Euclidean { m } => {
            if *m == 0 {
                return Err(Error::UnsupportedScheme(
                    "dual scheme needs a positive-dimensional Euclidean internal space".into(),
                ));
            }
            *m
        }
        _ => {
            return Err(Error::UnsupportedScheme(
                "dual scheme is only built for Euclidean internal spaces".into(),
            ))
        }
    };
    let combined = s.combined_matrix()?;
    let dual = combined.inverse()?.transpose();
    let d = s.dim();
    let phys_rows: Vec<Vec<R>> = (0..d).map(|i| dual.row(i).to_vec()).collect();
    let star_map: Vec<InternalElement<R>> = (0..s.rank)
        .map(|j| InternalElement::Euclidean((0..m_int).map(|i| dual.at(d + i, j)).collect()))
        .collect();
    let det = dual.determinant()?.abs();
    SchemeSpec::new(
        Matrix::from_rows(phys_rows)?,
        InternalGroupSpec::euclidean(m_int),
        star_map,
        det,
    )
}

/// Verifies the annihilator property on `trials` random coordinate pairs:
/// `exp(2 pi i <l, z>) = 1` for every primal point `l` and dual point `z`.
pub fn check_annihilator<R: Real>(
    primal: &SchemeSpec<R>,
    dual: &SchemeSpec<R>,
    trials: usize,
    seed: u64,
) -> Result<R> {
    use rand::Rng;
    use rand::SeedableRng;
    let pm = primal.combined_matrix()?;
    let dm = dual.combined_matrix()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = R::zero();
    for _ in 0..trials {
        let p: Vec<i64> = (0..primal.rank).map(|_| rng.gen_range(-50..=50)).collect();
        let q: Vec<i64> = (0..dual.rank).map(|_| rng.gen_range(-50..=50)).collect();
        let l = pm.mul_int_vec(&p);
        let z = dm.mul_int_vec(&q);
        let dot: R = l.iter().zip(&z).map(|(a, b)| *a * *b).fold(R::zero(), |a, b| a + b);
        let frac = (dot - dot.round()).abs();
        if frac > worst {
            worst = frac;
        }
    }
    if worst > R::of(crate::tol::PAIRING_TOL) {
        return Err(Error::Argument(format!(
            "annihilator pairing violated: fractional part {}",
            worst.as_f64()
        )));
    }
    Ok(worst)
}

/// Named presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum GalleryName {
    /// `Z` as a model set with trivial internal group.
    TrivialZ,
    /// `m -> (m, m mod n)` with internal `Z/n`.
    Cyclic { n: u64 },
    /// `m -> (m, m mod p^k)` with truncated p-adic internal space.
    Padic { p: u64, depth: u32 },
    /// Quadratic scheme `(a + b alpha, a - b alpha)`.
    Quadratic { alpha: QuadraticAlpha },
    /// Marker consumed by the diffraction module's sieve.
    VisiblePointsZ2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadraticAlpha {
    /// `alpha = sqrt(2)` (silver mean).
    Sqrt2,
    /// `alpha = (1 + sqrt(5)) / 2`; the star sends it to its conjugate.
    Golden,
}

/// Returns the documented preset with calibration precomputed.
pub fn gallery<R: Real>(name: &GalleryName) -> Result<SchemeSpec<R>> {
    match name {
        GalleryName::TrivialZ => SchemeSpec::new(
            Matrix::from_rows(vec![vec![R::one()]])?,
            InternalGroupSpec::cyclic(1)?,
            vec![InternalElement::Cyclic(0)],
            R::one(),
        ),
        GalleryName::Cyclic { n } => SchemeSpec::new(
            Matrix::from_rows(vec![vec![R::one()]])?,
            InternalGroupSpec::cyclic(*n)?,
            vec![InternalElement::Cyclic(1 % *n)],
            R::one() / R::of_i64(*n as i64),
        ),
        GalleryName::Padic { p, depth } => SchemeSpec::new(
            Matrix::from_rows(vec![vec![R::one()]])?,
            InternalGroupSpec::padic(*p, *depth)?,
            vec![InternalElement::Padic(1)],
            R::one(),
        ),
        GalleryName::Quadratic { alpha } => {
            let (a, conj) = match alpha {
                QuadraticAlpha::Sqrt2 => {
                    let s = R::of(2.0).sqrt();
                    (s, -s)
                }
                QuadraticAlpha::Golden => {
                    let s = R::of(5.0).sqrt();
                    ((R::one() + s) / R::of(2.0), (R::one() - s) / R::of(2.0))
                }
            };
            let phys = Matrix::from_rows(vec![vec![R::one(), a]])?;
            let star = vec![
                InternalElement::Euclidean(vec![R::one()]),
                InternalElement::Euclidean(vec![conj]),
            ];
            let calibration = (a - conj).abs();
            SchemeSpec::new(phys, InternalGroupSpec::euclidean(1), star, calibration)
        }
        GalleryName::VisiblePointsZ2 => Err(Error::Catalog(
            "visible_points_z2 is a sieve marker; use diffraction::visible_points".into(),
        )),
    }
}

/// Parses gallery names of the textual form used by configs:
/// `trivial_Z`, `cyclic(4)`, `padic(2,8)`, `quadratic(sqrt2)`,
/// `quadratic(golden)`, `visible_points_Z2`.
pub fn parse_gallery(name: &str) -> Result<GalleryName> {
    let name = name.trim();
    let lower = name.to_ascii_lowercase();
    if lower == "trivial_z" {
        return Ok(GalleryName::TrivialZ);
    }
    if lower == "visible_points_z2" {
        return Ok(GalleryName::VisiblePointsZ2);
    }
    let parse_args = |s: &str, prefix: &str| -> Option<Vec<String>> {
        let rest = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
        Some(rest.split(',').map(|t| t.trim().to_string()).collect())
    };
    if let Some(args) = parse_args(&lower, "cyclic") {
        if args.len() == 1 {
            if let Ok(n) = args[0].parse::<u64>() {
                return Ok(GalleryName::Cyclic { n });
            }
        }
    }
    if let Some(args) = parse_args(&lower, "padic") {
        if args.len() == 2 {
            if let (Ok(p), Ok(k)) = (args[0].parse::<u64>(), args[1].parse::<u32>()) {
                return Ok(GalleryName::Padic { p, depth: k });
            }
        }
    }
    if let Some(args) = parse_args(&lower, "quadratic") {
        if args.len() == 1 {
            match args[0].as_str() {
                "sqrt2" | "silver" => {
                    return Ok(GalleryName::Quadratic { alpha: QuadraticAlpha::Sqrt2 })
                }
                "golden" => {
                    return Ok(GalleryName::Quadratic { alpha: QuadraticAlpha::Golden })
                }
                _ => {}
            }
        }
    }
    Err(Error::Catalog(name.to_string()))
}

/// Generates a model set by splitting the region into per-thread sub-boxes
/// along the first axis and merging the sorted results; the output equals
/// the single-threaded one for any worker count.
pub fn model_set_par<R: Real>(
    s: &SchemeSpec<R>,
    w: &InternalWindow<R>,
    region: &BoxRegion<R>,
    chunks: usize,
) -> Result<PointPatch<R>> {
    if chunks <= 1 {
        return model_set(s, w, region);
    }
    let width = region.hi[0] - region.lo[0];
    let step = width / R::of_i64(chunks as i64);
    if step <= R::zero() {
        return model_set(s, w, region);
    }
    let sub: Vec<BoxRegion<R>> = (0..chunks)
        .map(|i| {
            let mut lo = region.lo.clone();
            let mut hi = region.hi.clone();
            lo[0] = region.lo[0] + step * R::of_i64(i as i64);
            hi[0] = if i + 1 == chunks { region.hi[0] } else { region.lo[0] + step * R::of_i64(i as i64 + 1) };
            BoxRegion { lo, hi }
        })
        .collect();
    let parts: Vec<Result<PointPatch<R>>> =
        sub.par_iter().map(|r| model_set(s, w, r)).collect();
    let mut points: Vec<Vec<R>> = Vec::new();
    let mut prov: Vec<Vec<i64>> = Vec::new();
    for part in parts {
        let part = part?;
        let src = part.provenance.clone().unwrap_or_default();
        for (i, p) in part.points.into_iter().enumerate() {
            // sub-box seams are closed on both sides; drop the duplicate
            if let Some(last) = points.last() {
                if crate::geom::dist(last, &p) <= R::of(crate::tol::DEDUP_TOL) {
                    continue;
                }
            }
            points.push(p);
            prov.push(src[i].clone());
        }
    }
    PointPatch::new(points, region.clone(), Some(prov))
}
