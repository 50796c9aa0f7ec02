//! ε-dual character sets of a finite patch in `R^d`: the frequencies
//! `kappa` with `|exp(2 pi i <kappa, x>) - 1| <= eps` for every patch
//! point `x`.
//!
//! A finite patch can only weaken the infinite-set constraint, so every
//! computed set is a superset of the true one restricted to the scanned
//! grid; outputs carry the patch size and resolution so callers can
//! compare across truncations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geom::{lex_cmp, BoxRegion, PointPatch};
use crate::pointset::{covering_radius, min_gap};
use crate::{Error, Real, Result};

/// Computed ε-dual set over a frequency region.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct CharacterSet<R: Real> {
    /// Qualifying frequency grid points (cell representatives for d >= 2).
    pub frequencies: PointPatch<R>,
    pub epsilon: R,
    pub source_region: BoxRegion<R>,
    pub freq_region: BoxRegion<R>,
    /// Grid pitch used by the scan.
    pub resolution: R,
    /// 1-D only, when refinement was requested: per connected component,
    /// the bisection-refined `[lo, hi]` frequency interval.
    pub refined_components: Option<Vec<(R, R)>>,
    /// Set when `eps >= 2`: every character qualifies trivially.
    pub trivial_warning: bool,
}

/// `max_x |chi_kappa(x) - 1|` over the patch: `2 max |sin(pi <kappa, x>)|`.
pub fn max_deviation<R: Real>(p: &PointPatch<R>, kappa: &[R]) -> R {
    let pi = R::PI();
    let mut worst = R::zero();
    for x in &p.points {
        let phase: R = kappa.iter().zip(x).map(|(k, v)| *k * *v).fold(R::zero(), |a, b| a + b);
        let dev = (pi * phase).sin().abs() * R::of(2.0);
        if dev > worst {
            worst = dev;
        }
    }
    worst
}

/// Scans a frequency grid over `freq_region` and keeps the grid points
/// whose maximal deviation over the patch stays at or below `eps` (plus a
/// resolution slack). With `refine` set and a 1-D patch, each connected
/// component's boundary is localized by 20 bisection steps against the
/// deviation function.
pub fn eps_dual<R: Real>(
    p: &PointPatch<R>,
    eps: R,
    freq_region: &BoxRegion<R>,
    pitch: R,
    refine: bool,
) -> Result<CharacterSet<R>> {
    if eps <= R::zero() {
        return Err(Error::Argument("eps must be positive".into()));
    }
    if pitch <= R::zero() {
        return Err(Error::Argument("pitch must be positive".into()));
    }
    if freq_region.dim() != p.dim() {
        return Err(Error::Argument("frequency region dimension differs from patch".into()));
    }
    let trivial_warning = eps >= R::of(2.0);
    let slack = R::of(crate::tol::INCLUSION_SLACK);

    let widths = freq_region.widths();
    let steps: Vec<usize> = widths
        .iter()
        .map(|w| ((*w / pitch).round().as_f64() as usize).max(1))
        .collect();

    let qualifying: Vec<Vec<R>> = if p.dim() == 1 {
        let n = steps[0];
        let lo = freq_region.lo[0];
        let w = widths[0];
        (0..=n)
            .into_par_iter()
            .filter_map(|i| {
                let kappa = lo + w * R::of_i64(i as i64) / R::of_i64(n as i64);
                (max_deviation(p, &[kappa]) <= eps + slack).then(|| vec![kappa])
            })
            .collect()
    } else {
        let mut out = Vec::new();
        let mut idx = vec![0usize; p.dim()];
        loop {
            let kappa: Vec<R> = idx
                .iter()
                .zip(freq_region.lo.iter().zip(widths.iter().zip(&steps)))
                .map(|(&i, (lo, (w, &n)))| *lo + *w * R::of_i64(i as i64) / R::of_i64(n as i64))
                .collect();
            if max_deviation(p, &kappa) <= eps + slack {
                out.push(kappa);
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return finish(p, eps, freq_region, pitch, out, None, trivial_warning);
                }
                idx[k] += 1;
                if idx[k] <= steps[k] {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    };

    // 1-D path: optionally refine component boundaries
    let refined = if refine && p.dim() == 1 && !qualifying.is_empty() {
        let mut comps: Vec<(R, R)> = Vec::new();
        let gap = pitch * R::of(1.5);
        let mut start = qualifying[0][0];
        let mut prev = start;
        for q in qualifying.iter().skip(1) {
            if q[0] - prev > gap {
                comps.push((start, prev));
                start = q[0];
            }
            prev = q[0];
        }
        comps.push((start, prev));
        let refined: Vec<(R, R)> = comps
            .iter()
            .map(|&(lo, hi)| {
                let left = bisect_boundary(p, eps, lo - pitch, lo, 20);
                let right = bisect_boundary(p, eps, hi + pitch, hi, 20);
                (left, right)
            })
            .collect();
        Some(refined)
    } else {
        None
    };
    finish(p, eps, freq_region, pitch, qualifying, refined, trivial_warning)
}

fn finish<R: Real>(
    p: &PointPatch<R>,
    eps: R,
    freq_region: &BoxRegion<R>,
    pitch: R,
    mut qualifying: Vec<Vec<R>>,
    refined: Option<Vec<(R, R)>>,
    trivial_warning: bool,
) -> Result<CharacterSet<R>> {
    qualifying.sort_by(|a, b| lex_cmp(a, b));
    qualifying.dedup_by(|a, b| crate::geom::dist(a, b) <= R::of(crate::tol::DEDUP_TOL));
    Ok(CharacterSet {
        frequencies: PointPatch::new(qualifying, freq_region.clone(), None)?,
        epsilon: eps,
        source_region: p.region.clone(),
        freq_region: freq_region.clone(),
        resolution: pitch,
        refined_components: refined,
        trivial_warning,
    })
}

/// Bisection between a non-qualifying frequency `outside` and a
/// qualifying one `inside` against `max_deviation = eps`.
fn bisect_boundary<R: Real>(p: &PointPatch<R>, eps: R, outside: R, inside: R, iters: usize) -> R {
    let mut lo = outside;
    let mut hi = inside;
    if max_deviation(p, &[lo]) <= eps {
        return lo;
    }
    for _ in 0..iters {
        let mid = (lo + hi) / R::of(2.0);
        if max_deviation(p, &[mid]) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Membership-style checks of the inclusion lemmas on computed data.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct DualInclusionReport<R: Real> {
    /// `L^eps + L^eps' ⊆ L^(eps+eps')`, rechecked by direct evaluation at
    /// every pairwise sum inside the frequency region.
    pub sum_inclusion_pass: bool,
    pub sum_pairs_checked: usize,
    /// `L^eps ⊆ Delta^(2 eps)` with `Delta = L - L`, rechecked pointwise.
    pub delta_inclusion_pass: bool,
    /// Minimal gap between distinct components of `L^eps` (1-D) or grid
    /// cells (d >= 2), when the source patch is relatively dense.
    pub min_gap: Option<R>,
    pub min_gap_positive: bool,
    /// 0-membership and symmetry of the computed set.
    pub a1_pass: bool,
}

/// Runs the inclusion battery at `eps` (and `eps' = eps`): A1, the sum
/// inclusion, the `Delta^(2 eps)` inclusion, and the uniform-discreteness
/// gap for `eps < sqrt(3)/2`.
pub fn dual_inclusion_checks<R: Real>(
    p: &PointPatch<R>,
    eps: R,
    freq_region: &BoxRegion<R>,
    pitch: R,
) -> Result<DualInclusionReport<R>> {
    let set = eps_dual(p, eps, freq_region, pitch, false)?;
    let slack = R::of(1e-7);

    // A1: zero and symmetry (rechecked by evaluation, not grid membership)
    let mut a1_pass = max_deviation(p, &vec![R::zero(); p.dim()]) <= eps + slack;
    for kappa in &set.frequencies.points {
        let neg: Vec<R> = kappa.iter().map(|x| -*x).collect();
        if max_deviation(p, &neg) > eps + slack {
            a1_pass = false;
            break;
        }
    }

    // sums stay eps+eps'-dual
    let mut sum_inclusion_pass = true;
    let mut pairs = 0usize;
    let limit = 4000usize;
    'sums: for (i, a) in set.frequencies.points.iter().enumerate() {
        for b in set.frequencies.points.iter().skip(i) {
            let sum: Vec<R> = a.iter().zip(b).map(|(x, y)| *x + *y).collect();
            if !freq_region.contains(&sum) {
                continue;
            }
            pairs += 1;
            if max_deviation(p, &sum) > eps + eps + slack {
                sum_inclusion_pass = false;
                break 'sums;
            }
            if pairs >= limit {
                break 'sums;
            }
        }
    }

    // L^eps sits inside Delta^(2 eps): evaluate against the difference set
    let diff_region = {
        let lo: Vec<R> = p.region.lo.iter().zip(&p.region.hi).map(|(a, b)| *a - *b).collect();
        let hi: Vec<R> = p.region.hi.iter().zip(&p.region.lo).map(|(a, b)| *a - *b).collect();
        BoxRegion { lo, hi }
    };
    let delta = crate::pointset::minkowski(&[p, p], &[1, -1], &diff_region)?;
    let mut delta_inclusion_pass = true;
    for kappa in &set.frequencies.points {
        if max_deviation(&delta, kappa) > eps + eps + slack {
            delta_inclusion_pass = false;
            break;
        }
    }

    // uniform discreteness evidence: gap between distinct components
    let sqrt3_half = R::of(3.0).sqrt() / R::of(2.0);
    let (min_gap_val, min_gap_positive) = if eps < sqrt3_half && set.frequencies.len() >= 2 {
        if p.dim() == 1 {
            // cluster the qualifying grid points into components first
            let xs = set.frequencies.scalars()?;
            let gap_thresh = pitch * R::of(1.5);
            let mut comps: Vec<(R, R)> = Vec::new();
            let mut start = xs[0];
            let mut prev = xs[0];
            for &x in xs.iter().skip(1) {
                if x - prev > gap_thresh {
                    comps.push((start, prev));
                    start = x;
                }
                prev = x;
            }
            comps.push((start, prev));
            if comps.len() >= 2 {
                let mut g = R::infinity();
                for w in comps.windows(2) {
                    let d = w[1].0 - w[0].1;
                    if d < g {
                        g = d;
                    }
                }
                (Some(g), g > pitch)
            } else {
                (None, true)
            }
        } else {
            let g = min_gap(&set.frequencies);
            (Some(g), g > pitch)
        }
    } else {
        (None, true)
    };

    Ok(DualInclusionReport {
        sum_inclusion_pass,
        sum_pairs_checked: pairs,
        delta_inclusion_pass,
        min_gap: min_gap_val,
        min_gap_positive,
        a1_pass,
    })
}

/// Harmonicity evidence for one eps: the covering radius of the dual set
/// on a frequency window, and its stability when the window doubles.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct HarmoniousVerdict<R: Real> {
    pub eps: R,
    pub covering_radius: R,
    pub covering_radius_doubled: R,
    /// Radius stays finite and within 50% when the window doubles.
    pub harmonious_evidence: bool,
}

/// For each eps: compute the dual set on `freq_region` and on its doubled
/// version, and compare covering radii. Relative denseness that survives
/// the doubling is the desk-scale evidence of harmonicity.
pub fn harmonious_check<R: Real>(
    p: &PointPatch<R>,
    eps_list: &[R],
    freq_region: &BoxRegion<R>,
    pitch: R,
) -> Result<Vec<HarmoniousVerdict<R>>> {
    let doubled = {
        let lo: Vec<R> = freq_region.lo.iter().map(|x| *x * R::of(2.0)).collect();
        let hi: Vec<R> = freq_region.hi.iter().map(|x| *x * R::of(2.0)).collect();
        BoxRegion { lo, hi }
    };
    let mut out = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let base = eps_dual(p, eps, freq_region, pitch, false)?;
        let big = eps_dual(p, eps, &doubled, pitch, false)?;
        let r1 = covering_radius(&base.frequencies, R::zero(), None);
        let r2 = covering_radius(&big.frequencies, R::zero(), None);
        let finite = r1.is_finite() && r2.is_finite();
        let stable = finite && r2 <= r1 * R::of(1.5) + R::of(crate::tol::INCLUSION_SLACK);
        out.push(HarmoniousVerdict {
            eps,
            covering_radius: r1,
            covering_radius_doubled: r2,
            harmonious_evidence: stable,
        });
    }
    Ok(out)
}
