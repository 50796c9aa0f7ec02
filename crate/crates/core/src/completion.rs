//! From a family `{P_eps}` of almost-period sets to internal-space data:
//! axiom verification, the pseudo-metric `d(x, y) = inf { eps : x - y in
//! P_eps }`, coset coordinates at each grid level (the desk-scale stand-in
//! for completion coordinates), and lifting of comb support functions to
//! functions of those coordinates.
//!
//! ε is sampled on a finite decreasing grid; every "for all eps" claim
//! becomes "for all grid values", and each patch is read as the family
//! value on the half-open ε-interval down to the next grid point.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::combs::{almost_periods, AlmostPeriodOptions, NormKind};
use crate::geom::{dist, lex_cmp, BoxRegion, PointPatch};
use crate::pointset::{covering_radius, is_uniformly_discrete, minkowski};
use crate::groups::InternalWindow;
use crate::scheme::{model_set, SchemeSpec, WeightedComb};
use crate::{Error, Real, Result};

/// How membership of a point in the group `L` is certified.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real", tag = "kind", rename_all = "snake_case")]
pub enum GroupL<R: Real> {
    /// `L` is the span of the listed generators; membership is an exact
    /// integer solve (1 generator by divisibility, 2 generators via the
    /// paired star generators when available).
    Generators { phys: Vec<Vec<R>>, star: Option<Vec<Vec<R>>> },
    /// `L` is taken to be the group spanned by the support differences;
    /// patches built from combs satisfy this by construction.
    SupportDifferences,
}

/// A decreasing family of almost-period patches with its cap `C`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct PeriodFamily<R: Real> {
    /// Strictly decreasing ε grid in `(0, C]`.
    pub eps_grid: Vec<R>,
    /// One patch per grid value, sharing a region.
    pub patches: Vec<PointPatch<R>>,
    /// The cap `C` of the family.
    pub cap: R,
    pub group_l: GroupL<R>,
}

impl<R: Real> PeriodFamily<R> {
    pub fn new(
        eps_grid: Vec<R>,
        patches: Vec<PointPatch<R>>,
        cap: R,
        group_l: GroupL<R>,
    ) -> Result<Self> {
        if eps_grid.len() != patches.len() || eps_grid.is_empty() {
            return Err(Error::Argument("one patch per grid value required".into()));
        }
        if eps_grid.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Argument("eps grid must be strictly decreasing".into()));
        }
        if eps_grid[0] > cap || *eps_grid.last().unwrap() <= R::zero() {
            return Err(Error::Argument("grid values must lie in (0, C]".into()));
        }
        let region = patches[0].region.clone();
        if patches.iter().any(|p| p.region != region) {
            return Err(Error::Argument("patches must share a region".into()));
        }
        Ok(Self { eps_grid, patches, cap, group_l })
    }

    pub fn region(&self) -> &BoxRegion<R> {
        &self.patches[0].region
    }

    pub fn dim(&self) -> usize {
        self.patches[0].dim()
    }

    /// Index of the largest grid value `<= eps` (the patch standing for
    /// `P_eps` under the step-family convention), if any.
    pub fn level_for(&self, eps: R) -> Option<usize> {
        self.eps_grid.iter().position(|&g| g <= eps)
    }

    /// Index of the smallest grid value `>= eps`; membership there is a
    /// necessary condition for membership in the true `P_eps`.
    pub fn level_ge(&self, eps: R) -> Option<usize> {
        self.eps_grid.iter().rposition(|&g| g >= eps)
    }
}

/// Per-axiom outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct AxiomReport<R: Real> {
    /// 0-membership and symmetry per grid value.
    pub a1_pass: bool,
    /// uniform discreteness (checked for grid values `< C/2`), with the
    /// worst minimal gap observed.
    pub a2_pass: bool,
    pub a2_worst_gap: R,
    /// pairwise sums land in the patch for `eps + eps'` (up to grid
    /// resolution); on failure the first witnessing sum is recorded.
    pub a3_pass: bool,
    pub a3_witness: Option<(R, R, Vec<R>)>,
    /// covering radii per grid value, all finite and below the threshold.
    pub a4_pass: bool,
    pub a4_radii: Vec<R>,
    /// membership of every patch point in `L`.
    pub a5_pass: bool,
    /// monotonicity of the family (smaller eps yields a subset).
    pub monotone_pass: bool,
}

impl<R: Real> AxiomReport<R> {
    pub fn all_pass(&self) -> bool {
        self.a1_pass
            && self.a2_pass
            && self.a3_pass
            && self.a4_pass
            && self.a5_pass
            && self.monotone_pass
    }
}

/// Margin inside which patch membership checks are excused (translated
/// sums may exit the trusted region).
fn safe_margin<R: Real>(family: &PeriodFamily<R>) -> R {
    let widths = family.region().widths();
    widths[0] / R::of(8.0)
}

fn patch_symmetric<R: Real>(p: &PointPatch<R>, safe: &BoxRegion<R>) -> bool {
    for x in &p.points {
        if !safe.contains(x) {
            continue;
        }
        let neg: Vec<R> = x.iter().map(|v| -*v).collect();
        if safe.contains(&neg) && !p.contains_point(&neg) {
            return false;
        }
    }
    true
}

/// Exact integer membership of `x` in the span of the generators.
fn in_span<R: Real>(group: &GroupL<R>, x: &[R], star: Option<&[R]>) -> bool {
    match group {
        GroupL::SupportDifferences => true,
        GroupL::Generators { phys, star: star_gens } => {
            let tol = R::of(1e-6);
            match (phys.len(), star_gens) {
                (1, _) => {
                    // x = a * g: divisibility along each axis
                    let g = &phys[0];
                    let mut ratio: Option<R> = None;
                    for (xi, gi) in x.iter().zip(g) {
                        if gi.abs() < R::of(1e-12) {
                            if xi.abs() > tol {
                                return false;
                            }
                            continue;
                        }
                        let r = *xi / *gi;
                        if (r - r.round()).abs() > tol {
                            return false;
                        }
                        match ratio {
                            None => ratio = Some(r.round()),
                            Some(prev) => {
                                if (prev - r.round()).abs() > tol {
                                    return false;
                                }
                            }
                        }
                    }
                    true
                }
                (2, Some(sg)) => {
                    // solve [g1 g2; g1* g2*] (a, b) = (x, x*) exactly
                    let (s, x0) = match (star, x.len()) {
                        (Some(s), 1) => (s[0], x[0]),
                        _ => return false,
                    };
                    let (g1, g2) = (phys[0][0], phys[1][0]);
                    let (h1, h2) = (sg[0][0], sg[1][0]);
                    let det = g1 * h2 - g2 * h1;
                    if det.abs() < R::of(1e-12) {
                        return false;
                    }
                    let a = (x0 * h2 - g2 * s) / det;
                    let b = (g1 * s - x0 * h1) / det;
                    (a - a.round()).abs() <= tol && (b - b.round()).abs() <= tol
                }
                _ => false,
            }
        }
    }
}

/// Checks (A1)-(A5) and family monotonicity on the safe region.
pub fn verify_axioms<R: Real>(family: &PeriodFamily<R>) -> Result<AxiomReport<R>> {
    if family.eps_grid.len() < 3 {
        return Err(Error::Argument("need at least three grid values".into()));
    }
    let margin = safe_margin(family);
    let safe = family.region().shrink(margin);
    let zero = vec![R::zero(); family.dim()];

    // A1: zero membership and symmetry
    let a1_pass = family
        .patches
        .iter()
        .all(|p| p.contains_point(&zero) && patch_symmetric(p, &safe));

    // monotone: patch(eps') subset of patch(eps) for eps' < eps
    let mut monotone_pass = true;
    'mono: for i in 0..family.patches.len() {
        for j in i + 1..family.patches.len() {
            let small = &family.patches[j];
            let big = &family.patches[i];
            for x in &small.points {
                if safe.contains(x) && !big.contains_point(x) {
                    monotone_pass = false;
                    break 'mono;
                }
            }
        }
    }

    // A2: uniform discreteness for grid values below C/2
    let half_cap = family.cap / R::of(2.0);
    let mut a2_pass = true;
    let mut a2_worst_gap = R::infinity();
    for (eps, p) in family.eps_grid.iter().zip(&family.patches) {
        if *eps >= half_cap {
            continue;
        }
        let (ok, gap) = is_uniformly_discrete(p, R::of(crate::tol::UNIFORM_DISCRETE_GAP));
        if gap < a2_worst_gap {
            a2_worst_gap = gap;
        }
        if !ok {
            a2_pass = false;
        }
    }

    // A3: pairwise sums land in the patch of the smallest grid value at
    // or above eps + eps' (a superset of the true P_{eps+eps'}, so this
    // is the strongest sound check at the grid resolution); pairs whose
    // sum exceeds the coarsest grid value cannot be checked and are
    // skipped.
    let mut a3_pass = true;
    let mut a3_witness = None;
    'a3: for (i, &eps_i) in family.eps_grid.iter().enumerate() {
        for (j, &eps_j) in family.eps_grid.iter().enumerate().skip(i) {
            let total = eps_i + eps_j;
            if total >= family.cap {
                continue;
            }
            let Some(level) = family.level_ge(total) else { continue };
            let target = &family.patches[level];
            use rayon::prelude::*;
            let witness = family.patches[i].points.par_iter().find_map_first(|x| {
                for y in &family.patches[j].points {
                    let sum: Vec<R> = x.iter().zip(y).map(|(a, b)| *a + *b).collect();
                    if safe.contains(&sum) && !target.contains_point(&sum) {
                        return Some(sum);
                    }
                }
                None
            });
            if let Some(sum) = witness {
                a3_pass = false;
                a3_witness = Some((eps_i, eps_j, sum));
                break 'a3;
            }
        }
    }

    // A4: finite covering radius per grid value
    let widths = family.region().widths();
    let max_radius = widths[0] / R::of(4.0);
    let a4_radii: Vec<R> = family
        .patches
        .iter()
        .map(|p| covering_radius(p, margin, None))
        .collect();
    let a4_pass = a4_radii.iter().all(|r| *r <= max_radius);

    // A5: membership in L
    let a5_pass = family.patches.iter().all(|p| {
        p.points.iter().all(|x| in_span(&family.group_l, x, None))
            || matches!(family.group_l, GroupL::SupportDifferences)
    });

    Ok(AxiomReport {
        a1_pass,
        a2_pass,
        a2_worst_gap,
        a3_pass,
        a3_witness,
        a4_pass,
        a4_radii,
        a5_pass,
        monotone_pass,
    })
}

/// Greedy minimal witness `F` with `P_eps ⊆ P_eps' + F` on the safe
/// region: sweep the points of `P_eps`, and whenever one is not yet
/// covered, add its offset to the nearest point of `P_eps'`.
pub fn inclusion_witness<R: Real>(
    family: &PeriodFamily<R>,
    big_index: usize,
    small_index: usize,
) -> Result<PointPatch<R>> {
    if big_index >= small_index {
        return Err(Error::Argument(
            "need eps' < eps: the witness covers the larger patch by the smaller".into(),
        ));
    }
    let big = &family.patches[big_index];
    let small = &family.patches[small_index];
    if small.is_empty() {
        return Err(Error::InsufficientData("empty target patch".into()));
    }
    let margin = safe_margin(family);
    let safe = family.region().shrink(margin);
    let mut f: Vec<Vec<R>> = Vec::new();
    for x in &big.points {
        if !safe.contains(x) {
            continue;
        }
        let covered = f.iter().any(|off| {
            let target: Vec<R> = x.iter().zip(off).map(|(a, b)| *a - *b).collect();
            small.contains_point(&target)
        });
        if covered {
            continue;
        }
        // nearest point of the small patch
        let mut best: Option<(R, &Vec<R>)> = None;
        for y in &small.points {
            let d = dist(x, y);
            if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                best = Some((d, y));
            }
        }
        let (_, y) = best.unwrap();
        f.push(x.iter().zip(y).map(|(a, b)| *a - *b).collect());
    }
    f.sort_by(|a, b| lex_cmp(a, b));
    f.dedup_by(|a, b| dist(a, b) <= R::of(crate::tol::DEDUP_TOL));
    let span = f
        .iter()
        .flat_map(|v| v.iter())
        .fold(R::one(), |m, x| m.max(x.abs()));
    PointPatch::new(f, BoxRegion::centered_cube(family.dim(), span + R::one()), None)
}

/// `inf { eps : x - y in P_eps }` read off the grid: the next grid value
/// below the last containing one (the patches stand for the family on the
/// half-open interval down to the next grid point), `0` when the
/// difference sits in every patch, and the cap `C` when it sits in none.
pub fn pseudo_metric<R: Real>(family: &PeriodFamily<R>, x: &[R], y: &[R]) -> Result<R> {
    let d: Vec<R> = x.iter().zip(y).map(|(a, b)| *a - *b).collect();
    let sym = family.region().symmetrized();
    if !sym.contains(&d) {
        return Err(Error::InsufficientData(
            "difference outside the region covered by the family".into(),
        ));
    }
    let mut last_containing: Option<usize> = None;
    for (i, p) in family.patches.iter().enumerate() {
        if p.contains_point(&d) {
            last_containing = Some(i);
        } else {
            break;
        }
    }
    Ok(match last_containing {
        None => family.cap,
        Some(i) if i + 1 == family.patches.len() => R::zero(),
        Some(i) => family.eps_grid[i + 1],
    })
}

/// Coset identifier at one grid level: the index into the level's
/// transversal plus the stored representative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct CosetId<R: Real> {
    pub level: usize,
    pub index: usize,
    pub representative: Vec<R>,
}

/// Per-level transversals built greedily (first-seen representative);
/// deterministic given query order, always seeded with 0.
#[derive(Debug, Clone)]
pub struct Transversal<R: Real> {
    reps: Vec<Vec<Vec<R>>>,
}

impl<R: Real> Transversal<R> {
    pub fn new(levels: usize, dim: usize) -> Self {
        Self { reps: vec![vec![vec![R::zero(); dim]]; levels] }
    }
}

/// Reduces `x` against the stored transversal at the first `depth` grid
/// levels: the identifier of the coset `x + P_eps_i` for each level.
pub fn completion_coords<R: Real>(
    family: &PeriodFamily<R>,
    transversal: &mut Transversal<R>,
    x: &[R],
    depth: usize,
) -> Result<Vec<CosetId<R>>> {
    if depth > family.eps_grid.len() {
        return Err(Error::Argument("depth exceeds the grid length".into()));
    }
    let sym = family.region().symmetrized();
    let mut out = Vec::with_capacity(depth);
    for level in 0..depth {
        let patch = &family.patches[level];
        let reps = &mut transversal.reps[level];
        let mut found: Option<usize> = None;
        for (i, rep) in reps.iter().enumerate() {
            let d: Vec<R> = x.iter().zip(rep).map(|(a, b)| *a - *b).collect();
            if !sym.contains(&d) {
                return Err(Error::InsufficientData(
                    "transversal representative too far from the query".into(),
                ));
            }
            if patch.contains_point(&d) {
                found = Some(i);
                break;
            }
        }
        let index = match found {
            Some(i) => i,
            None => {
                reps.push(x.to_vec());
                reps.len() - 1
            }
        };
        out.push(CosetId { level, index, representative: reps[index].clone() });
    }
    Ok(out)
}

/// Extracts residue digits from coset representatives when the patches
/// are arithmetic progressions `g_i Z` (1-D families): the residue of the
/// representative modulo the detected generator.
pub fn residue_digits<R: Real>(family: &PeriodFamily<R>, coords: &[CosetId<R>]) -> Result<Vec<i64>> {
    if family.dim() != 1 {
        return Err(Error::Argument("residue digits are defined for 1-D families".into()));
    }
    let mut out = Vec::with_capacity(coords.len());
    for c in coords {
        let patch = &family.patches[c.level];
        let g = progression_generator(patch)
            .ok_or_else(|| Error::InsufficientData("patch is not an arithmetic progression".into()))?;
        let rep = c.representative[0].as_f64();
        let m = (rep / g).round() * g;
        let residue = rep - m;
        let r = if residue < 0.0 { residue + g } else { residue };
        out.push(r.round() as i64);
    }
    Ok(out)
}

/// Detects the common difference of a 1-D arithmetic-progression patch.
fn progression_generator<R: Real>(p: &PointPatch<R>) -> Option<f64> {
    let xs: Vec<f64> = p.points.iter().map(|v| v[0].as_f64()).collect();
    if xs.len() < 2 {
        return None;
    }
    let g = xs[1] - xs[0];
    if g <= 0.0 {
        return None;
    }
    for w in xs.windows(2) {
        if ((w[1] - w[0]) - g).abs() > 1e-9 {
            return None;
        }
    }
    Some(g)
}

/// Lifts the comb's support function through the family: the value at a
/// query point of `L` is the weight at any support point within
/// pseudo-metric `tol`, after a uniform-continuity pre-check. All found
/// representatives must agree within the observed modulus of continuity.
pub fn lift_function<R: Real>(
    comb: &WeightedComb<R>,
    family: &PeriodFamily<R>,
    query: &[R],
    tol: R,
) -> Result<Complex<R>> {
    // continuity pre-check: weights across the finest patch move by less
    // than the requested tolerance on sampled support pairs
    let finest = family
        .level_for(tol)
        .ok_or_else(|| Error::InsufficientData("no grid value at or below tol".into()))?;
    let modulus = continuity_modulus(comb, &family.patches[finest], 400);
    if modulus > tol + R::of(crate::tol::INCLUSION_SLACK) {
        return Err(Error::NotLiftable(format!(
            "support function moves by {} across the finest patch, above tol {}",
            modulus.as_f64(),
            tol.as_f64()
        )));
    }
    let patch = &family.patches[finest];
    let mut value: Option<Complex<R>> = None;
    let mut reps = 0usize;
    for t in &patch.points {
        let cand: Vec<R> = query.iter().zip(t).map(|(a, b)| *a - *b).collect();
        if !comb.region.contains(&cand) {
            continue;
        }
        let w = comb.weight_at(&cand);
        if w.norm() <= R::of(crate::tol::DEDUP_TOL) {
            continue;
        }
        reps += 1;
        match value {
            None => value = Some(w),
            Some(prev) => {
                // representative independence up to twice the modulus
                if (prev - w).norm() > modulus * R::of(2.0) + R::of(crate::tol::INCLUSION_SLACK) {
                    return Err(Error::NotLiftable(format!(
                        "representatives disagree by {} at the query",
                        (prev - w).norm().as_f64()
                    )));
                }
            }
        }
        if reps >= 8 {
            break;
        }
    }
    value.ok_or_else(|| Error::InsufficientData("no representative within tol of the query".into()))
}

/// Largest weight change across translations in `patch`, sampled over up
/// to `samples` support points per translation (full scan when small).
fn continuity_modulus<R: Real>(
    comb: &WeightedComb<R>,
    patch: &PointPatch<R>,
    samples: usize,
) -> R {
    let mut worst = R::zero();
    let stride = (comb.len() / samples.max(1)).max(1);
    for t in &patch.points {
        if t.iter().all(|v| v.abs() <= R::of(crate::tol::DEDUP_TOL)) {
            continue;
        }
        let mut i = 0;
        while i < comb.len() {
            let x = &comb.points[i];
            let shifted: Vec<R> = x.iter().zip(t).map(|(a, b)| *a + *b).collect();
            if comb.region.contains(&shifted) {
                let d = (comb.weight_at(&shifted) - comb.weights[i]).norm();
                if d > worst {
                    worst = d;
                }
            }
            i += stride;
        }
    }
    worst
}

/// Report of a reconstruction run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct ReconstructionReport<R: Real> {
    pub axioms: AxiomReport<R>,
    /// Per grid value: number of almost periods found on the search region.
    pub patch_sizes: Vec<usize>,
    /// When a reference scheme was supplied: per grid value, whether the
    /// patch is contained in the model set of the internal ball of radius
    /// eps (checked membership-wise).
    pub reference_inclusion: Option<Vec<bool>>,
}

/// Computes `P_eps` for every grid value via the sup norm, assembles the
/// family, verifies the axioms, and optionally checks each patch against
/// a reference scheme's model set of the internal ball of radius eps.
pub fn reconstruct<R: Real>(
    comb: &WeightedComb<R>,
    eps_grid: &[R],
    search_region: &BoxRegion<R>,
    reference: Option<&SchemeSpec<R>>,
) -> Result<(PeriodFamily<R>, ReconstructionReport<R>)> {
    let sup = crate::combs::sup_norm(comb);
    if !(sup > R::zero()) {
        return Err(Error::Argument("comb must have a positive sup norm".into()));
    }
    if eps_grid.iter().any(|e| *e <= R::zero() || *e >= sup) {
        return Err(Error::Argument("grid values must lie in (0, sup_norm)".into()));
    }
    let opts = AlmostPeriodOptions::default();
    let mut patches = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let set = almost_periods(comb, eps, NormKind::Sup, search_region, &opts)?;
        patches.push(set.periods);
    }
    let family = PeriodFamily::new(
        eps_grid.to_vec(),
        patches,
        sup,
        GroupL::SupportDifferences,
    )?;
    let axioms = verify_axioms(&family)?;
    let patch_sizes = family.patches.iter().map(|p| p.len()).collect();

    let reference_inclusion = match reference {
        None => None,
        Some(scheme) => {
            let mut checks = Vec::with_capacity(eps_grid.len());
            for (i, &eps) in eps_grid.iter().enumerate() {
                let window = InternalWindow::euclidean_interval(-eps, eps)?;
                let ball_set = model_set(scheme, &window, &family.patches[i].region)?;
                let ok = family.patches[i]
                    .points
                    .iter()
                    .all(|t| ball_set.contains_point(t));
                checks.push(ok);
            }
            Some(checks)
        }
    };

    Ok((family, ReconstructionReport { axioms, patch_sizes, reference_inclusion }))
}

/// Builds the difference patch `P_eps - P_eps` restricted to a box; used
/// by the uniform-discreteness consequence for `eps < C/4`.
pub fn patch_self_difference<R: Real>(
    family: &PeriodFamily<R>,
    index: usize,
    k_box: &BoxRegion<R>,
) -> Result<PointPatch<R>> {
    let p = &family.patches[index];
    minkowski(&[p, p], &[1, -1], k_box)
}
