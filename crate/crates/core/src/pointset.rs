//! Decision procedures on finite point patches: uniform discreteness,
//! relative denseness, finite local complexity, Minkowski combinations,
//! covering witnesses, the Meyer-set test battery and period-lattice
//! detection.
//!
//! Everything here is about *truncations* of infinite sets, so every
//! verdict distinguishes a failure in the interior of the trusted region
//! from one that only occurs within the truncation margin.

use serde::{Deserialize, Serialize};

use crate::geom::{dist, lex_cmp, BoxRegion, PointPatch};
use crate::scheme::WeightedComb;
use crate::{Error, Real, Result};

/// Tunable thresholds for the patch-level tests.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct PatchConfig<R: Real> {
    /// A minimal gap above this counts as uniformly discrete.
    pub gap_threshold: R,
    /// A covering radius at or below this counts as relatively dense;
    /// `None` derives `region width / 4` at call time.
    pub max_covering_radius: Option<R>,
    /// Truncation margin; `None` derives `3 x covering radius`.
    pub margin: Option<R>,
    /// Grid pitch for covering-radius scans in dimension >= 2; `None`
    /// derives `diameter / 1e4`.
    pub grid_pitch: Option<R>,
}

impl<R: Real> Default for PatchConfig<R> {
    fn default() -> Self {
        Self {
            gap_threshold: R::of(crate::tol::UNIFORM_DISCRETE_GAP),
            max_covering_radius: None,
            margin: None,
            grid_pitch: None,
        }
    }
}

/// Signed Minkowski combination of patches: all sums `±p_1 ±p_2 ... ±p_k`
/// (one point per operand, sign per operand) landing in `region`,
/// deduplicated within `DEDUP_TOL`.
pub fn minkowski<R: Real>(
    operands: &[&PointPatch<R>],
    signs: &[i8],
    region: &BoxRegion<R>,
) -> Result<PointPatch<R>> {
    if operands.is_empty() || operands.len() != signs.len() {
        return Err(Error::Argument("one sign per operand, at least one operand".into()));
    }
    if signs.iter().any(|s| *s != 1 && *s != -1) {
        return Err(Error::Argument("signs must be +1 or -1".into()));
    }
    let dim = region.dim();
    if operands.iter().any(|p| p.dim() != dim) {
        return Err(Error::Argument("operand dimension differs from region".into()));
    }
    let mut acc: Vec<Vec<R>> = vec![vec![R::zero(); dim]];
    for (step, (patch, &sign)) in operands.iter().zip(signs).enumerate() {
        if patch.is_empty() {
            return PointPatch::new(vec![], region.clone(), None);
        }
        // partial sums may still travel by the reach of the later operands
        let mut budget = R::zero();
        for later in operands.iter().skip(step + 1) {
            let reach = later
                .points
                .iter()
                .map(|p| p.iter().fold(R::zero(), |m, x| m.max(x.abs())))
                .fold(R::zero(), |m, x| m.max(x));
            budget = budget + reach;
        }
        let mut next: Vec<Vec<R>> = Vec::with_capacity(acc.len() * patch.len());
        for base in &acc {
            for p in &patch.points {
                let q: Vec<R> = base
                    .iter()
                    .zip(p)
                    .map(|(b, x)| *b + R::of_i64(sign as i64) * *x)
                    .collect();
                let within = q.iter().zip(region.lo.iter().zip(&region.hi)).all(|(x, (lo, hi))| {
                    *x >= *lo - budget && *x <= *hi + budget
                });
                if within {
                    next.push(q);
                }
            }
        }
        next.sort_by(|a, b| lex_cmp(a, b));
        next.dedup_by(|a, b| dist(a, b) <= R::of(crate::tol::DEDUP_TOL));
        acc = next;
    }
    let points: Vec<Vec<R>> = acc.into_iter().filter(|p| region.contains(p)).collect();
    PointPatch::new(points, region.clone(), None)
}

/// Minimal pairwise distance; `+inf` for fewer than two points.
pub fn min_gap<R: Real>(p: &PointPatch<R>) -> R {
    if p.len() < 2 {
        return R::infinity();
    }
    // lex-sorted points; prune on the first coordinate
    let mut best = R::infinity();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let dx = p.points[j][0] - p.points[i][0];
            if dx > best {
                break;
            }
            let d = dist(&p.points[i], &p.points[j]);
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// `(min_gap > threshold, min_gap)`; empty and singleton patches are
/// vacuously discrete with an infinite gap.
pub fn is_uniformly_discrete<R: Real>(p: &PointPatch<R>, threshold: R) -> (bool, R) {
    let gap = min_gap(p);
    (gap > threshold, gap)
}

/// Largest distance from a point of the (margin-shrunk) region to the
/// nearest patch point. Exact gap scan in 1-D, grid sup otherwise.
pub fn covering_radius<R: Real>(p: &PointPatch<R>, margin: R, grid_pitch: Option<R>) -> R {
    if p.is_empty() {
        return R::infinity();
    }
    let safe = p.region.shrink(margin);
    if p.dim() == 1 {
        let xs: Vec<R> = p.points.iter().map(|q| q[0]).collect();
        let lo = safe.lo[0];
        let hi = safe.hi[0];
        let mut radius = R::zero();
        // distance attains its maxima at midpoints of gaps and at the ends
        for w in xs.windows(2) {
            let mid = (w[0] + w[1]) / R::of(2.0);
            if mid >= lo && mid <= hi {
                radius = radius.max((w[1] - w[0]) / R::of(2.0));
            }
        }
        let edge_lo = (xs[0] - lo).max(R::zero());
        let edge_hi = (hi - *xs.last().unwrap()).max(R::zero());
        radius.max(edge_lo).max(edge_hi)
    } else {
        let widths = safe.widths();
        let diam = widths.iter().fold(R::zero(), |a, b| a + *b * *b).sqrt();
        let pitch = grid_pitch.unwrap_or(diam / R::of(1e4)).max(R::of(1e-9));
        let steps: Vec<usize> = widths
            .iter()
            .map(|w| ((*w / pitch).ceil().as_f64() as usize).max(1))
            .collect();
        let mut radius = R::zero();
        let mut idx = vec![0usize; safe.dim()];
        loop {
            let q: Vec<R> = idx
                .iter()
                .zip(safe.lo.iter().zip(widths.iter().zip(&steps)))
                .map(|(&i, (lo, (w, &n)))| *lo + *w * R::of_i64(i as i64) / R::of_i64(n as i64))
                .collect();
            if let Some(d) = p.nearest_distance(&q) {
                if d > radius {
                    radius = d;
                }
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return radius;
                }
                idx[k] += 1;
                if idx[k] <= steps[k] {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

/// The difference set `(L - L) ∩ k_box` with an FLC verdict: finite local
/// complexity holds on the box when the clusters are uniformly discrete
/// above the threshold.
pub fn flc_clusters<R: Real>(
    p: &PointPatch<R>,
    k_box: &BoxRegion<R>,
    gap_threshold: R,
) -> Result<(bool, PointPatch<R>)> {
    let mut diffs: Vec<Vec<R>> = Vec::new();
    let reach = k_box
        .lo
        .iter()
        .chain(&k_box.hi)
        .fold(R::zero(), |m, x| m.max(x.abs()));
    for x in &p.points {
        // points are lex-sorted: only partners within reach on axis 0
        let lo = x[0] - reach;
        let start = p.points.partition_point(|q| q[0] < lo);
        for y in &p.points[start..] {
            if y[0] - x[0] > reach {
                break;
            }
            for (a, b) in [(x, y), (y, x)] {
                let d: Vec<R> = a.iter().zip(b.iter()).map(|(u, v)| *u - *v).collect();
                if k_box.contains(&d) {
                    diffs.push(d);
                }
            }
        }
    }
    diffs.sort_by(|a, b| lex_cmp(a, b));
    diffs.dedup_by(|a, b| dist(a, b) <= R::of(crate::tol::DEDUP_TOL));
    let patch = PointPatch::new(diffs, k_box.clone(), None)?;
    let (ud, _) = is_uniformly_discrete(&patch, gap_threshold);
    Ok((ud, patch))
}

/// Constructive covering witness: a finite `F` with `A ⊆ B + F` on the
/// safe region, built as `F = (A - B) ∩ K` for a covering box `K` derived
/// from the covering radius of `B`.
pub fn covering_witness<R: Real>(
    a: &PointPatch<R>,
    b: &PointPatch<R>,
    cfg: &PatchConfig<R>,
) -> Result<PointPatch<R>> {
    if b.is_empty() {
        return Err(Error::WitnessUnavailable("base set is empty".into()));
    }
    let margin = cfg
        .margin
        .unwrap_or_else(|| covering_radius(b, R::zero(), cfg.grid_pitch) * R::of(3.0));
    let radius = covering_radius(b, margin, cfg.grid_pitch);
    let max_radius = cfg
        .max_covering_radius
        .unwrap_or_else(|| (b.region.hi[0] - b.region.lo[0]) / R::of(4.0));
    if radius > max_radius {
        return Err(Error::WitnessUnavailable(format!(
            "base set is not relatively dense: covering radius {} exceeds {}",
            radius.as_f64(),
            max_radius.as_f64()
        )));
    }
    let k_box = if a.dim() == 1 {
        // one-sided half-open [0, 2r) suffices in 1-D and keeps F small
        BoxRegion::interval(R::zero(), radius * R::of(2.0))
    } else {
        BoxRegion::centered_cube(a.dim(), radius + R::of(crate::tol::INCLUSION_SLACK))
    };
    // collect offsets realized by safe points; a guard band keeps offsets
    // sitting exactly on the half-open edge (up to float noise) out
    let safe_a = a.region.shrink(margin);
    let guard = R::of(crate::tol::DEDUP_TOL);
    let mut f: Vec<Vec<R>> = Vec::new();
    for x in &a.points {
        if !safe_a.contains(x) {
            continue;
        }
        for y in &b.points {
            let d: Vec<R> = x.iter().zip(y).map(|(p, q)| *p - *q).collect();
            let inside = if a.dim() == 1 {
                d[0] >= R::zero() && d[0] < k_box.hi[0] - guard
            } else {
                k_box.contains(&d)
            };
            if inside {
                f.push(d);
            }
        }
    }
    f.sort_by(|p, q| lex_cmp(p, q));
    f.dedup_by(|p, q| dist(p, q) <= R::of(crate::tol::DEDUP_TOL));
    let f_patch = PointPatch::new(f, k_box, None)?;

    // verification pass on the safe region
    let safe = a.region.shrink(margin);
    for x in &a.points {
        if !safe.contains(x) {
            continue;
        }
        let mut hit = false;
        for fp in &f_patch.points {
            let target: Vec<R> = x.iter().zip(fp).map(|(p, q)| *p - *q).collect();
            if b.contains_point(&target) {
                hit = true;
                break;
            }
        }
        if !hit {
            return Err(Error::WitnessUnavailable(format!(
                "witness verification failed at {:?}",
                x.iter().map(|v| v.as_f64()).collect::<Vec<_>>()
            )));
        }
    }
    Ok(f_patch)
}

/// Outcome of the Meyer battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    IndeterminateAtBoundary,
}

/// Which clause failed first, when one did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeyerClause {
    UniformlyDiscrete,
    RelativelyDense,
    FiniteLocalComplexity,
    TripleDifferenceLocallyFinite,
    AlmostLatticeWitness,
}

/// Report of the Meyer-set battery on a truncated patch.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct MeyerReport<R: Real> {
    pub uniformly_discrete: bool,
    pub min_gap: R,
    pub relatively_dense: bool,
    pub covering_radius: R,
    pub flc: bool,
    pub cluster_count: usize,
    pub triple_diff_locally_finite: bool,
    pub triple_diff_min_gap: Option<R>,
    pub almost_lattice_witness: Option<PointPatch<R>>,
    pub failing_clause: Option<MeyerClause>,
    pub verdict: Verdict,
}

/// Runs the Meyer battery: uniform discreteness, relative denseness,
/// finite local complexity of `L - L` on a test box, local finiteness of
/// `L - L - L`, and the constructive almost-lattice witness
/// `F = (L - L - L) ∩ K` with the inclusion `L - L ⊆ L + F` verified on
/// the safe sub-region.
pub fn meyer_test<R: Real>(
    p: &PointPatch<R>,
    k_box: &BoxRegion<R>,
    cfg: &PatchConfig<R>,
) -> Result<MeyerReport<R>> {
    if p.len() < 3 {
        return Err(Error::InsufficientData("patch too small for the battery".into()));
    }
    let (ud, gap) = is_uniformly_discrete(p, cfg.gap_threshold);
    let margin = cfg
        .margin
        .unwrap_or_else(|| covering_radius(p, R::zero(), cfg.grid_pitch) * R::of(3.0));
    let radius = covering_radius(p, margin, cfg.grid_pitch);
    let widths = p.region.widths();
    let max_radius = cfg.max_covering_radius.unwrap_or(widths[0] / R::of(4.0));
    if margin * R::of(2.0) >= widths[0] {
        return Err(Error::InsufficientData(
            "region too small relative to the covering radius".into(),
        ));
    }
    let rel_dense = radius <= max_radius;
    let (flc, clusters) = flc_clusters(p, k_box, cfg.gap_threshold)?;

    let mut report = MeyerReport {
        uniformly_discrete: ud,
        min_gap: gap,
        relatively_dense: rel_dense,
        covering_radius: radius,
        flc,
        cluster_count: clusters.len(),
        triple_diff_locally_finite: false,
        triple_diff_min_gap: None,
        almost_lattice_witness: None,
        failing_clause: None,
        verdict: Verdict::Fail,
    };
    if !ud {
        report.failing_clause = Some(MeyerClause::UniformlyDiscrete);
        return Ok(report);
    }
    if !rel_dense {
        report.failing_clause = Some(MeyerClause::RelativelyDense);
        return Ok(report);
    }
    if !flc {
        report.failing_clause = Some(MeyerClause::FiniteLocalComplexity);
        return Ok(report);
    }

    // L - L - L on the test box: differences dd = x - y are needed near
    // every patch point z (t = dd - z in the box), so collect the full
    // distinct difference set first.
    let full_diffs = distinct_differences(p);
    let mut triple: Vec<Vec<R>> = Vec::new();
    let reach = k_box.lo.iter().chain(&k_box.hi).fold(R::zero(), |m, x| m.max(x.abs()));
    for dd in &full_diffs {
        let lo = dd[0] - reach;
        let start = p.points.partition_point(|q| q[0] < lo);
        for y in &p.points[start..] {
            if y[0] - dd[0] > reach {
                break;
            }
            let t: Vec<R> = dd.iter().zip(y).map(|(a, b)| *a - *b).collect();
            if k_box.contains(&t) {
                triple.push(t);
            }
        }
    }
    triple.sort_by(|a, b| lex_cmp(a, b));
    triple.dedup_by(|a, b| dist(a, b) <= R::of(crate::tol::DEDUP_TOL));
    let triple_patch = PointPatch::new(triple, k_box.clone(), None)?;
    let (triple_ok, triple_gap) = is_uniformly_discrete(&triple_patch, cfg.gap_threshold);
    report.triple_diff_locally_finite = triple_ok;
    report.triple_diff_min_gap = Some(triple_gap);
    if !triple_ok {
        report.failing_clause = Some(MeyerClause::TripleDifferenceLocallyFinite);
        return Ok(report);
    }

    // Almost-lattice witness F = (L - L - L) ∩ K with K the covering box
    // [-r, r]^d, then verify L - L ⊆ L + F on the safe sub-region.
    let span = radius + R::of(crate::tol::INCLUSION_SLACK);
    let f: Vec<Vec<R>> = triple_patch
        .points
        .iter()
        .filter(|t| t.iter().all(|x| x.abs() <= span))
        .cloned()
        .collect();
    let f_patch = PointPatch::new(f, BoxRegion::centered_cube(p.dim(), span), None)?;
    // The inclusion L - L ⊆ L + F is only checkable where the patch data
    // around the difference is trusted: differences inside the shrunk
    // region itself.
    let safe_pts = p.region.shrink(margin);
    let mut witness_ok = true;
    'outer: for x in &p.points {
        for y in &p.points {
            let d: Vec<R> = x.iter().zip(y).map(|(a, b)| *a - *b).collect();
            if !safe_pts.contains(&d) {
                continue;
            }
            let mut hit = false;
            for fp in &f_patch.points {
                let target: Vec<R> = d.iter().zip(fp).map(|(a, b)| *a - *b).collect();
                if p.contains_point(&target) {
                    hit = true;
                    break;
                }
            }
            if !hit {
                witness_ok = false;
                break 'outer;
            }
        }
    }
    if witness_ok {
        report.almost_lattice_witness = Some(f_patch);
        report.verdict = Verdict::Pass;
    } else {
        report.failing_clause = Some(MeyerClause::AlmostLatticeWitness);
        report.verdict = Verdict::IndeterminateAtBoundary;
    }
    Ok(report)
}

/// All distinct pairwise differences of a patch (both signs), deduplicated
/// by rounding to a 1e-9 grid.
fn distinct_differences<R: Real>(p: &PointPatch<R>) -> Vec<Vec<R>> {
    let quantum = R::of(1e-9);
    let mut seen: std::collections::HashSet<Vec<i64>> = std::collections::HashSet::new();
    let mut out: Vec<Vec<R>> = Vec::new();
    for x in &p.points {
        for y in &p.points {
            let d: Vec<R> = x.iter().zip(y).map(|(a, b)| *a - *b).collect();
            let key: Vec<i64> = d.iter().map(|v| (*v / quantum).round().as_f64() as i64).collect();
            if seen.insert(key) {
                out.push(d);
            }
        }
    }
    out.sort_by(|a, b| lex_cmp(a, b));
    out
}

/// Support for period detection: a comb or a bare patch (treated as its
/// indicator comb).
pub enum CombLike<'a, R: Real> {
    Comb(&'a WeightedComb<R>),
    Patch(&'a PointPatch<R>),
}

/// Finds the translations `t` (candidates: support differences within the
/// search box) that map the comb to itself within `tol` in the sup norm on
/// the safe overlap, and reduces them to a generating list.
pub fn period_lattice<R: Real>(
    c: CombLike<'_, R>,
    search_box: &BoxRegion<R>,
    tol: R,
) -> Result<Vec<Vec<R>>> {
    let comb_storage;
    let comb: &WeightedComb<R> = match c {
        CombLike::Comb(c) => c,
        CombLike::Patch(p) => {
            comb_storage = WeightedComb::indicator(p);
            &comb_storage
        }
    };
    if comb.is_empty() {
        return Ok(vec![]);
    }
    let candidates = support_differences(comb, search_box);
    let mut periods: Vec<Vec<R>> = Vec::new();
    for t in candidates {
        if t.iter().all(|x| x.abs() <= R::of(crate::tol::DEDUP_TOL)) {
            continue;
        }
        if sup_translation_defect(comb, &t) <= tol {
            periods.push(t);
        }
    }
    Ok(reduce_generators(periods, tol))
}

/// Distinct support differences inside `search_box`.
pub(crate) fn support_differences<R: Real>(
    comb: &WeightedComb<R>,
    search_box: &BoxRegion<R>,
) -> Vec<Vec<R>> {
    let reach = search_box
        .lo
        .iter()
        .chain(&search_box.hi)
        .fold(R::zero(), |m, x| m.max(x.abs()));
    let mut out: Vec<Vec<R>> = Vec::new();
    for x in &comb.points {
        let lo = x[0] - reach;
        let start = comb.points.partition_point(|q| q[0] < lo);
        for y in &comb.points[start..] {
            if y[0] - x[0] > reach {
                break;
            }
            for (a, b) in [(x, y), (y, x)] {
                let d: Vec<R> = a.iter().zip(b.iter()).map(|(p, q)| *p - *q).collect();
                if search_box.contains(&d) {
                    out.push(d);
                }
            }
        }
    }
    out.sort_by(|a, b| lex_cmp(a, b));
    out.dedup_by(|a, b| dist(a, b) <= R::of(crate::tol::DEDUP_TOL));
    out
}

/// `max_x |w(x - t) - w(x)|` over the safe overlap of the comb with its
/// translate (evaluated on the union of the support and the shifted
/// support).
pub(crate) fn sup_translation_defect<R: Real>(comb: &WeightedComb<R>, t: &[R]) -> R {
    let overlap = comb.region.intersect(&comb.region.translate(t));
    let mut worst = R::zero();
    for (x, w) in comb.points.iter().zip(&comb.weights) {
        // T_t w at x is w(x - t); compare where x is trusted in both
        if overlap.contains(x) {
            let shifted: Vec<R> = x.iter().zip(t).map(|(a, b)| *a - *b).collect();
            let diff = (comb.weight_at(&shifted) - *w).norm();
            if diff > worst {
                worst = diff;
            }
        }
        // also probe at x + t, a support point of the translated comb
        let fwd: Vec<R> = x.iter().zip(t).map(|(a, b)| *a + *b).collect();
        if overlap.contains(&fwd) {
            let diff = (*w - comb.weight_at(&fwd)).norm();
            if diff > worst {
                worst = diff;
            }
        }
    }
    worst
}

/// Reduces a period list to a short generating set: 1-D keeps the smallest
/// positive period; higher dimensions run pairwise reduction (subtract
/// nearest integer multiples) until stable.
fn reduce_generators<R: Real>(periods: Vec<Vec<R>>, tol: R) -> Vec<Vec<R>> {
    if periods.is_empty() {
        return vec![];
    }
    let dim = periods[0].len();
    if dim == 1 {
        let mut pos: Vec<R> = periods.iter().map(|p| p[0].abs()).filter(|x| *x > tol).collect();
        pos.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        match pos.first() {
            Some(&g) => vec![vec![g]],
            None => vec![],
        }
    } else {
        let mut basis: Vec<Vec<R>> = Vec::new();
        let mut pool = periods;
        pool.sort_by(|a, b| {
            let na = a.iter().fold(R::zero(), |s, x| s + *x * *x);
            let nb = b.iter().fold(R::zero(), |s, x| s + *x * *x);
            na.partial_cmp(&nb).unwrap_or(std::cmp::Ordering::Equal)
        });
        for mut v in pool {
            let mut changed = true;
            while changed {
                changed = false;
                for b in &basis {
                    let bb = b.iter().fold(R::zero(), |s, x| s + *x * *x);
                    if bb <= R::zero() {
                        continue;
                    }
                    let vb = v.iter().zip(b).map(|(x, y)| *x * *y).fold(R::zero(), |a, c| a + c);
                    let k = (vb / bb).round();
                    if k != R::zero() {
                        for (x, y) in v.iter_mut().zip(b) {
                            *x = *x - k * *y;
                        }
                        changed = true;
                    }
                }
            }
            let norm = v.iter().fold(R::zero(), |s, x| s + *x * *x).sqrt();
            if norm > tol.max(R::of(crate::tol::DEDUP_TOL)) {
                basis.push(v);
            }
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::BoxRegion;
    use crate::groups::InternalWindow;
    use crate::scheme::{gallery, model_set, GalleryName, QuadraticAlpha};

    fn int_patch(xs: &[i64], lo: f64, hi: f64) -> PointPatch<f64> {
        PointPatch::from_scalars(
            xs.iter().map(|&x| x as f64).collect(),
            BoxRegion::interval(lo, hi),
        )
        .unwrap()
    }

    /// Complete truncation of `step Z + offsets` to `[lo, hi]`; the patch
    /// honestly exhausts its declared region.
    pub(crate) fn coset_patch(step: i64, offsets: &[i64], lo: i64, hi: i64) -> PointPatch<f64> {
        let mut xs: Vec<i64> = Vec::new();
        for j in (lo / step - 2)..=(hi / step + 2) {
            for &o in offsets {
                let x = step * j + o;
                if x >= lo && x <= hi {
                    xs.push(x);
                }
            }
        }
        xs.sort_unstable();
        int_patch(&xs, lo as f64, hi as f64)
    }

    /// The locally-finite-but-not-uniformly-discrete example
    /// `{ n + k/(n+1) : 0 <= k <= n-1, 1 <= n <= n_max }`.
    pub(crate) fn accumulating_patch(n_max: i64) -> PointPatch<f64> {
        let mut xs = Vec::new();
        for n in 1..=n_max {
            for k in 0..n {
                xs.push(n as f64 + k as f64 / (n as f64 + 1.0));
            }
        }
        PointPatch::from_scalars(xs, BoxRegion::interval(0.0, n_max as f64 + 1.0)).unwrap()
    }

    fn silver_patch(lo: f64, hi: f64) -> PointPatch<f64> {
        let s = gallery::<f64>(&GalleryName::Quadratic { alpha: QuadraticAlpha::Sqrt2 }).unwrap();
        let w = InternalWindow::euclidean_interval(-1.0, 1.0).unwrap();
        model_set(&s, &w, &BoxRegion::interval(lo, hi)).unwrap()
    }

    #[test]
    fn minkowski_difference_example() {
        let a = int_patch(&[0, 1, 4], -5.0, 5.0);
        let region = BoxRegion::interval(-5.0, 5.0);
        let d = minkowski(&[&a, &a], &[1, -1], &region).unwrap();
        assert_eq!(d.scalars().unwrap(), vec![-4.0, -3.0, -1.0, 0.0, 1.0, 3.0, 4.0]);
    }

    #[test]
    fn minkowski_identity_and_empty() {
        let a = int_patch(&[0, 2, 3], 0.0, 5.0);
        let zero = int_patch(&[0], -1.0, 1.0);
        let region = BoxRegion::interval(0.0, 5.0);
        let sum = minkowski(&[&a, &zero], &[1, 1], &region).unwrap();
        assert_eq!(sum.scalars().unwrap(), a.scalars().unwrap());

        let empty = PointPatch::from_scalars(vec![], BoxRegion::interval(0.0, 1.0)).unwrap();
        let s = minkowski(&[&a, &empty], &[1, 1], &region).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn minkowski_commutes_and_associates() {
        let a = int_patch(&[0, 1], -20.0, 20.0);
        let b = int_patch(&[0, 3], -20.0, 20.0);
        let c = int_patch(&[0, 5], -20.0, 20.0);
        let region = BoxRegion::interval(-20.0, 20.0);
        let abc = minkowski(&[&a, &b, &c], &[1, 1, 1], &region).unwrap();
        let bac = minkowski(&[&b, &a, &c], &[1, 1, 1], &region).unwrap();
        assert_eq!(abc.scalars().unwrap(), bac.scalars().unwrap());
        let ab = minkowski(&[&a, &b], &[1, 1], &region).unwrap();
        let ab_then_c = minkowski(&[&ab, &c], &[1, 1], &region).unwrap();
        assert_eq!(abc.scalars().unwrap(), ab_then_c.scalars().unwrap());
    }

    #[test]
    fn silver_difference_min_gap() {
        let a = silver_patch(0.0, 50.0);
        let region = BoxRegion::interval(-10.0, 10.0);
        let d = minkowski(&[&a, &a], &[1, -1], &region).unwrap();
        let (_, gap) = is_uniformly_discrete(&d, 1e-6);
        assert!(gap >= 2.0f64.sqrt() - 1.0 - 1e-9, "gap {gap}");
        // brute-force oracle over pairs
        let xs = a.scalars().unwrap();
        let mut brute: Vec<f64> = Vec::new();
        for &x in &xs {
            for &y in &xs {
                let v = x - y;
                if (-10.0..=10.0).contains(&v) {
                    brute.push(v);
                }
            }
        }
        brute.sort_by(|p, q| p.partial_cmp(q).unwrap());
        brute.dedup_by(|p, q| (*p - *q).abs() <= 1e-9);
        let mut brute_gap = f64::INFINITY;
        for w in brute.windows(2) {
            brute_gap = brute_gap.min(w[1] - w[0]);
        }
        assert!((brute_gap - gap).abs() < 1e-9);
    }

    #[test]
    fn uniform_discreteness_examples() {
        let z = int_patch(&(0..=100).collect::<Vec<_>>(), 0.0, 100.0);
        let (ok, gap) = is_uniformly_discrete(&z, 1e-6);
        assert!(ok);
        assert_eq!(gap, 1.0);

        let acc = accumulating_patch(30);
        let (ok, gap) = is_uniformly_discrete(&acc, 0.05);
        assert!(!ok);
        assert!((gap - 1.0 / 31.0).abs() < 1e-12, "gap {gap}");

        let empty =
            PointPatch::from_scalars(Vec::<f64>::new(), BoxRegion::interval(0.0, 1.0)).unwrap();
        let (ok, gap) = is_uniformly_discrete(&empty, 1e-6);
        assert!(ok);
        assert!(gap.is_infinite());
    }

    #[test]
    fn covering_radius_examples() {
        let z = int_patch(&(0..=100).collect::<Vec<_>>(), 0.0, 100.0);
        let r = covering_radius(&z, 1.0, None);
        assert!((r - 0.5).abs() < 1e-9);

        let silver = silver_patch(0.0, 1000.0);
        let r = covering_radius(&silver, 3.0, None);
        assert!(r <= 1.0 + 2.0f64.sqrt(), "radius {r}");
        assert!((r - (1.0 + 2.0f64.sqrt()) / 2.0).abs() < 1e-6, "radius {r}");

        let single = int_patch(&[0], 0.0, 100.0);
        let r = covering_radius(&single, 0.0, None);
        assert!((r - 100.0).abs() < 1e-9);
    }

    #[test]
    fn flc_examples() {
        let mut xs: Vec<i64> = Vec::new();
        for j in 0..=100 {
            xs.push(5 * j);
            xs.push(5 * j + 1);
        }
        let p = int_patch(&xs, 0.0, 501.0);
        let kbox = BoxRegion::interval(-6.0, 6.0);
        let (ok, d) = flc_clusters(&p, &kbox, 1e-6).unwrap();
        assert!(ok);
        assert_eq!(
            d.scalars().unwrap(),
            vec![-6.0, -5.0, -4.0, -1.0, 0.0, 1.0, 4.0, 5.0, 6.0]
        );

        let acc = accumulating_patch(30);
        let (ok, _) = flc_clusters(&acc, &BoxRegion::interval(-2.0, 2.0), 0.05).unwrap();
        assert!(!ok);

        let single = int_patch(&[3], 0.0, 10.0);
        let (ok, d) = flc_clusters(&single, &BoxRegion::interval(-1.0, 1.0), 1e-6).unwrap();
        assert!(ok);
        assert_eq!(d.scalars().unwrap(), vec![0.0]);
    }

    #[test]
    fn covering_witness_examples() {
        let a = int_patch(&(0..=20).collect::<Vec<_>>(), 0.0, 20.0);
        let b = int_patch(&(0..=10).map(|i| 2 * i).collect::<Vec<_>>(), 0.0, 20.0);
        let cfg = PatchConfig { margin: Some(2.0), ..Default::default() };
        let f = covering_witness(&a, &b, &cfg).unwrap();
        assert_eq!(f.scalars().unwrap(), vec![0.0, 1.0]);

        let f_self = covering_witness(&b, &b, &cfg).unwrap();
        assert_eq!(f_self.scalars().unwrap(), vec![0.0]);
    }

    #[test]
    fn covering_witness_silver() {
        let s = gallery::<f64>(&GalleryName::Quadratic { alpha: QuadraticAlpha::Sqrt2 }).unwrap();
        let region = BoxRegion::interval(0.0, 500.0);
        let a = model_set(&s, &InternalWindow::euclidean_interval(-1.0, 1.0).unwrap(), &region)
            .unwrap();
        let b = model_set(&s, &InternalWindow::euclidean_interval(-0.5, 0.5).unwrap(), &region)
            .unwrap();
        let cfg = PatchConfig { margin: Some(15.0), ..Default::default() };
        let f = covering_witness(&a, &b, &cfg).unwrap();
        // the window pair [-1,1) over [-1/2,1/2) needs four offsets: the
        // internal interval [-1,1) splits into four pieces under translates
        // of [-1/2,1/2) by realizable star values
        assert!(f.len() <= 4, "|F| = {}", f.len());
    }

    #[test]
    fn covering_witness_needs_dense_base() {
        let a = int_patch(&(0..=100).collect::<Vec<_>>(), 0.0, 100.0);
        let sparse = int_patch(&[0], 0.0, 100.0);
        let cfg = PatchConfig { margin: Some(1.0), ..Default::default() };
        assert!(matches!(covering_witness(&a, &sparse, &cfg), Err(Error::WitnessUnavailable(_))));
    }

    #[test]
    fn meyer_battery_verdicts() {
        let cfg = PatchConfig {
            gap_threshold: 0.05,
            margin: Some(8.0),
            ..Default::default()
        };
        let kbox = BoxRegion::interval(-5.0, 5.0);

        let silver = silver_patch(0.0, 2000.0);
        let rep = meyer_test(&silver, &kbox, &cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        let f = rep.almost_lattice_witness.as_ref().unwrap();
        assert!(f.len() <= 5, "|F| = {}", f.len());

        let z = int_patch(&(0..=2000).collect::<Vec<_>>(), 0.0, 2000.0);
        let rep = meyer_test(&z, &kbox, &cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert_eq!(rep.almost_lattice_witness.unwrap().scalars().unwrap(), vec![0.0]);

        let acc = accumulating_patch(30);
        let rep = meyer_test(&acc, &BoxRegion::interval(-2.0, 2.0), &cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(matches!(
            rep.failing_clause,
            Some(MeyerClause::UniformlyDiscrete) | Some(MeyerClause::FiniteLocalComplexity)
        ));
    }

    #[test]
    fn meyer_pass_is_translation_invariant() {
        let cfg = PatchConfig {
            gap_threshold: 0.05,
            margin: Some(8.0),
            ..Default::default()
        };
        let kbox = BoxRegion::interval(-5.0, 5.0);
        let silver = silver_patch(0.0, 800.0);
        let rep = meyer_test(&silver, &kbox, &cfg).unwrap();
        let shifted = silver.translate(&[13.37]);
        let rep2 = meyer_test(&shifted, &kbox, &cfg).unwrap();
        assert_eq!(rep.verdict, rep2.verdict);
    }

    #[test]
    fn model_sets_pass_meyer() {
        // any model-set output with a compact Euclidean window passes
        let s = gallery::<f64>(&GalleryName::Quadratic { alpha: QuadraticAlpha::Sqrt2 }).unwrap();
        let cfg = PatchConfig {
            gap_threshold: 0.01,
            margin: Some(20.0),
            ..Default::default()
        };
        for (lo, hi) in [(-0.3, 0.55), (-1.0, 1.0)] {
            let w = InternalWindow::euclidean_interval(lo, hi).unwrap();
            let patch = model_set(&s, &w, &BoxRegion::interval(0.0, 1500.0)).unwrap();
            let rep = meyer_test(&patch, &BoxRegion::interval(-5.0, 5.0), &cfg).unwrap();
            assert_eq!(rep.verdict, Verdict::Pass, "window [{lo}, {hi})");
        }
    }

    #[test]
    fn period_lattice_examples() {
        let p = coset_patch(5, &[0, 1], -500, 500);
        let gens =
            period_lattice(CombLike::Patch(&p), &BoxRegion::interval(-30.0, 30.0), 1e-9).unwrap();
        assert_eq!(gens.len(), 1);
        assert!((gens[0][0] - 5.0).abs() < 1e-9);

        let silver = silver_patch(0.0, 400.0);
        let gens =
            period_lattice(CombLike::Patch(&silver), &BoxRegion::interval(-30.0, 30.0), 1e-9)
                .unwrap();
        assert!(gens.is_empty(), "aperiodic patch reported periods {gens:?}");
    }

    #[test]
    fn period_lattice_weighted_two_coset_comb() {
        // indicator of Z minus half the indicator of pi + Z: generator 1
        let region = BoxRegion::interval(-200.0, 200.0);
        let mut entries: Vec<(Vec<f64>, num_complex::Complex<f64>)> = Vec::new();
        for n in -200..=200 {
            entries.push((vec![n as f64], num_complex::Complex::new(1.0, 0.0)));
        }
        let pi = std::f64::consts::PI;
        for m in -204..=204i64 {
            let x = m as f64 + pi;
            if (-200.0..=200.0).contains(&x) {
                entries.push((vec![x], num_complex::Complex::new(-0.5, 0.0)));
            }
        }
        let comb = WeightedComb::new(entries, region, 1e-12).unwrap();
        let gens =
            period_lattice(CombLike::Comb(&comb), &BoxRegion::interval(-20.0, 20.0), 1e-9)
                .unwrap();
        assert_eq!(gens.len(), 1);
        assert!((gens[0][0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn period_output_satisfies_the_defining_inequality() {
        let p = coset_patch(7, &[0, 2], -420, 420);
        let comb = WeightedComb::indicator(&p);
        let tol = 1e-9;
        let gens =
            period_lattice(CombLike::Patch(&p), &BoxRegion::interval(-40.0, 40.0), tol).unwrap();
        assert_eq!(gens.len(), 1);
        assert!(sup_translation_defect(&comb, &gens[0]) <= tol);
    }
}
