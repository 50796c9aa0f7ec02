//! Autocorrelation over box averaging sequences, Fourier–Bohr
//! coefficients, pure-point diffraction tables, visible Bragg-peak sets
//! with their inclusion checks, means, densities and the visible-points
//! sieve.
//!
//! All estimates are finite-volume averages over centered boxes; every
//! report carries the box used so the `O(perimeter / volume)` edge error
//! is attributable.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geom::{dist, lex_cmp, BoxRegion, PointPatch};
use crate::groups::{InternalElement, InternalGroupSpec, InternalWindow};
use crate::scheme::{SchemeSpec, WeightedComb, WindowFunction};
use crate::{Error, Real, Result};

/// An increasing sequence of centered boxes used for volume averaging.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct BoxSequence<R: Real> {
    pub boxes: Vec<BoxRegion<R>>,
}

impl<R: Real> BoxSequence<R> {
    /// Centered cubes with half-sides `base * 2^j`, `j = 0..count`.
    pub fn centered_cubes(dim: usize, base: R, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Argument("need at least one box".into()));
        }
        let boxes: Vec<BoxRegion<R>> = (0..count)
            .map(|j| BoxRegion::centered_cube(dim, base * R::of(2.0).powi(j as i32)))
            .collect();
        Self::new(boxes)
    }

    /// Validates growth and the shrinking thickened-boundary ratio for the
    /// unit test box (the finite stand-in for the van Hove property).
    pub fn new(boxes: Vec<BoxRegion<R>>) -> Result<Self> {
        if boxes.is_empty() {
            return Err(Error::Argument("need at least one box".into()));
        }
        for w in boxes.windows(2) {
            if w[1].volume() <= w[0].volume() {
                return Err(Error::Argument("box volumes must strictly increase".into()));
            }
        }
        let mut prev_ratio = R::infinity();
        for b in &boxes {
            let widths = b.widths();
            let inner: R = widths.iter().map(|w| (*w - R::of(2.0)).max(R::zero())).fold(R::one(), |a, x| a * x);
            let outer: R = widths.iter().map(|w| *w + R::of(2.0)).fold(R::one(), |a, x| a * x);
            let vol = b.volume();
            if vol <= R::zero() {
                return Err(Error::Argument("degenerate box in the sequence".into()));
            }
            let ratio = (outer - inner) / vol;
            if ratio > prev_ratio + R::of(crate::tol::INCLUSION_SLACK) {
                return Err(Error::Argument(
                    "thickened-boundary ratio must decrease along the sequence".into(),
                ));
            }
            prev_ratio = ratio;
        }
        Ok(Self { boxes })
    }

    pub fn largest(&self) -> &BoxRegion<R> {
        self.boxes.last().expect("non-empty by construction")
    }
}

/// Finite-volume autocorrelation `gamma({z}) = (1/vol) sum w(x+z)
/// conj(w(x))` over support pairs inside the box.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct AutocorrelationEstimate<R: Real> {
    pub comb: WeightedComb<R>,
    pub box_used: BoxRegion<R>,
    pub normalization: R,
    /// Set when the support inside the box was empty.
    pub empty_warning: bool,
}

/// Computes the finite autocorrelation on `box_used ⊆ comb.region`.
pub fn autocorrelation<R: Real>(
    c: &WeightedComb<R>,
    box_used: &BoxRegion<R>,
) -> Result<AutocorrelationEstimate<R>> {
    for (lo, hi) in box_used.lo.iter().zip(&c.region.lo).map(|(a, b)| (*a, *b)) {
        if lo < hi {
            return Err(Error::Argument("autocorrelation box exceeds the comb region".into()));
        }
    }
    for (hi, chi) in box_used.hi.iter().zip(&c.region.hi).map(|(a, b)| (*a, *b)) {
        if hi > chi {
            return Err(Error::Argument("autocorrelation box exceeds the comb region".into()));
        }
    }
    let vol = box_used.volume();
    let inside: Vec<(usize, &Vec<R>)> = c
        .points
        .iter()
        .enumerate()
        .filter(|(_, p)| box_used.contains(p))
        .map(|(i, p)| (i, p))
        .collect();
    let empty_warning = inside.is_empty();
    let mut acc: Vec<(Vec<R>, Complex<R>)> = Vec::new();
    // z-values keyed by rounded coordinates for exact accumulation
    let mut keys: std::collections::HashMap<Vec<i64>, usize> = std::collections::HashMap::new();
    let quantum = R::of(1e-9);
    for &(i, x) in &inside {
        for &(j, y) in &inside {
            let z: Vec<R> = y.iter().zip(x).map(|(a, b)| *a - *b).collect();
            let contrib = c.weights[j] * c.weights[i].conj();
            let key: Vec<i64> = z.iter().map(|v| (*v / quantum).round().as_f64() as i64).collect();
            match keys.get(&key) {
                Some(&idx) => acc[idx].1 = acc[idx].1 + contrib,
                None => {
                    keys.insert(key, acc.len());
                    acc.push((z, contrib));
                }
            }
        }
    }
    let scale = R::one() / vol;
    let entries: Vec<(Vec<R>, Complex<R>)> = acc
        .into_iter()
        .map(|(z, w)| (z, w * Complex::new(scale, R::zero())))
        .collect();
    let diff_region = {
        let lo: Vec<R> = box_used.lo.iter().zip(&box_used.hi).map(|(a, b)| *a - *b).collect();
        let hi: Vec<R> = box_used.hi.iter().zip(&box_used.lo).map(|(a, b)| *a - *b).collect();
        BoxRegion { lo, hi }
    };
    let comb = WeightedComb::new(entries, diff_region, R::zero())?;

    // hermitian symmetry and positivity at 0 are structural; assert them
    let zero = vec![R::zero(); comb.dim()];
    let at_zero = comb.weight_at(&zero);
    if at_zero.im.abs() > R::of(crate::tol::UNIT_CIRCLE_TOL) || at_zero.re < R::zero() {
        return Err(Error::Argument("autocorrelation at 0 must be real non-negative".into()));
    }
    for (z, w) in comb.points.iter().zip(&comb.weights) {
        let neg: Vec<R> = z.iter().map(|v| -*v).collect();
        let conj = comb.weight_at(&neg).conj();
        if (conj - *w).norm() > R::of(1e-9) {
            return Err(Error::Argument("autocorrelation lost hermitian symmetry".into()));
        }
    }
    Ok(AutocorrelationEstimate {
        comb,
        box_used: box_used.clone(),
        normalization: vol,
        empty_warning,
    })
}

/// Finite Fourier–Bohr coefficient
/// `(1/vol) sum_x w(x) exp(-2 pi i <kappa, x>)` over the support in `box_used`.
pub fn fourier_bohr<R: Real>(
    c: &WeightedComb<R>,
    kappa: &[R],
    box_used: &BoxRegion<R>,
) -> Result<Complex<R>> {
    if kappa.len() != c.dim() {
        return Err(Error::Argument("frequency dimension differs from comb".into()));
    }
    let vol = box_used.volume();
    if vol <= R::zero() {
        return Err(Error::Argument("degenerate averaging box".into()));
    }
    let tau = R::TAU();
    let mut sum = Complex::new(R::zero(), R::zero());
    for (x, w) in c.points.iter().zip(&c.weights) {
        if !box_used.contains(x) {
            continue;
        }
        let phase: R = kappa.iter().zip(x).map(|(k, v)| *k * *v).fold(R::zero(), |a, b| a + b);
        sum = sum + *w * Complex::from_polar(R::one(), -tau * phase);
    }
    Ok(sum * Complex::new(R::one() / vol, R::zero()))
}

/// One diffraction-table row.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct DiffractionRow<R: Real> {
    pub kappa: Vec<R>,
    pub coefficient: Complex<R>,
    pub intensity: R,
    /// Internal coordinate of the frequency when it came from a dual
    /// scheme (used for analytic predictions).
    pub kappa_star: Option<Vec<R>>,
    /// Analytic prediction of the coefficient when the comb's internal
    /// function is known.
    pub predicted: Option<Complex<R>>,
}

/// Pure-point diffraction data over a candidate frequency list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct DiffractionTable<R: Real> {
    pub rows: Vec<DiffractionRow<R>>,
    pub box_used: BoxRegion<R>,
    pub source: String,
}

impl<R: Real> DiffractionTable<R> {
    /// Row lookup by frequency within `tol`.
    pub fn row_at(&self, kappa: &[R], tol: R) -> Option<&DiffractionRow<R>> {
        self.rows.iter().find(|r| dist(&r.kappa, kappa) <= tol)
    }

    /// Intensity at the zero frequency.
    pub fn zero_intensity(&self) -> Option<R> {
        let zero = vec![R::zero(); self.box_used.dim()];
        self.row_at(&zero, R::of(1e-9)).map(|r| r.intensity)
    }
}

/// A candidate frequency, optionally with its dual-scheme internal part.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct FrequencyCandidate<R: Real> {
    pub kappa: Vec<R>,
    pub kappa_star: Option<Vec<R>>,
}

/// Candidates from the dual scheme: projections of dual-lattice points
/// with frequency in `freq_region` and internal part within the cutoff.
pub fn dual_frequency_candidates<R: Real>(
    s: &SchemeSpec<R>,
    freq_region: &BoxRegion<R>,
    internal_cutoff: R,
) -> Result<Vec<FrequencyCandidate<R>>> {
    let dual = crate::scheme::dual_scheme(s)?;
    let window = InternalWindow::euclidean_interval(-internal_cutoff, internal_cutoff)?;
    let patch = crate::scheme::model_set(&dual, &window, freq_region)?;
    let prov = patch.provenance.clone().unwrap_or_default();
    let mut out = Vec::with_capacity(patch.len());
    for (p, coords) in patch.points.iter().zip(&prov) {
        let (_, star) = dual.star(coords)?;
        let star = match star {
            InternalElement::Euclidean(v) => v,
            _ => unreachable!("dual schemes have Euclidean internal spaces"),
        };
        out.push(FrequencyCandidate { kappa: p.clone(), kappa_star: Some(star) });
    }
    Ok(out)
}

/// Builds the diffraction table over the candidates. When `predictor` is
/// given, each dual candidate also carries the analytic prediction
/// `(1/cal) ∫ g(h) exp(2 pi i kappa* h) dh` by quadrature (the
/// equidistribution limit of the finite sum).
pub fn diffraction_table<R: Real>(
    c: &WeightedComb<R>,
    candidates: &[FrequencyCandidate<R>],
    box_used: &BoxRegion<R>,
    predictor: Option<(&SchemeSpec<R>, &WindowFunction<R>)>,
    source: &str,
) -> Result<DiffractionTable<R>> {
    let rows: Vec<DiffractionRow<R>> = candidates
        .par_iter()
        .map(|cand| -> Result<DiffractionRow<R>> {
            let coeff = fourier_bohr(c, &cand.kappa, box_used)?;
            let predicted = match (&cand.kappa_star, predictor) {
                (Some(star), Some((scheme, g))) if star.len() == 1 => {
                    Some(predict_coefficient(scheme, g, star[0])?)
                }
                _ => None,
            };
            Ok(DiffractionRow {
                kappa: cand.kappa.clone(),
                coefficient: coeff,
                intensity: coeff.norm_sqr(),
                kappa_star: cand.kappa_star.clone(),
                predicted,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiffractionTable { rows, box_used: box_used.clone(), source: source.to_string() })
}

/// `(1/cal) ∫ g(h) exp(2 pi i nu h) dh` by trapezoid quadrature over the
/// declared support (1-D Euclidean internal spaces).
pub fn predict_coefficient<R: Real>(
    s: &SchemeSpec<R>,
    g: &WindowFunction<R>,
    nu: R,
) -> Result<Complex<R>> {
    let bbox = g
        .support_bbox(&s.internal)?
        .ok_or_else(|| Error::Argument("prediction needs a Euclidean internal space".into()))?;
    if bbox.0.len() != 1 {
        return Err(Error::UnsupportedScheme("prediction implemented for 1-D internal".into()));
    }
    let (lo, hi) = (bbox.0[0], bbox.1[0]);
    let n = 20_000usize;
    let h = (hi - lo) / R::of_i64(n as i64);
    let tau = R::TAU();
    let mut sum = Complex::new(R::zero(), R::zero());
    for i in 0..=n {
        let x = lo + h * R::of_i64(i as i64);
        let v = g.eval(&s.internal, &InternalElement::Euclidean(vec![x]))?;
        let weight = if i == 0 || i == n { R::of(0.5) } else { R::one() };
        sum = sum + v * Complex::from_polar(weight, tau * nu * x);
    }
    let integral = sum * Complex::new(h, R::zero());
    Ok(integral * Complex::new(R::one() / s.calibration, R::zero()))
}

/// Frequencies with intensity at or above the threshold `a` (the
/// `a`-visible Bragg peaks); for `a <= 0` this is the whole candidate set.
pub fn visible_bragg<R: Real>(t: &DiffractionTable<R>, a: R) -> Result<PointPatch<R>> {
    let mut freqs: Vec<Vec<R>> = t
        .rows
        .iter()
        .filter(|r| r.intensity >= a)
        .map(|r| r.kappa.clone())
        .collect();
    freqs.sort_by(|x, y| lex_cmp(x, y));
    freqs.dedup_by(|x, y| dist(x, y) <= R::of(crate::tol::DEDUP_TOL));
    let region = t.box_used.clone();
    PointPatch::new(freqs, region, None)
}

/// Outcome of the positive-definiteness (Krein) battery on a table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct KreinReport<R: Real> {
    pub pairs_checked: usize,
    pub pairs_skipped: usize,
    pub worst_excess: R,
    pub pass: bool,
}

/// Checks `|I(psi + chi) - I(psi)|^2 <= 2 I(0) (I(0) - I(chi)) + slack`
/// over row pairs whose sum is also a row; missing sums are counted as
/// skipped. `extra_slack` absorbs the finite-box estimation error.
pub fn krein_check<R: Real>(
    t: &DiffractionTable<R>,
    max_pairs: usize,
    extra_slack: R,
) -> Result<KreinReport<R>> {
    let zero_intensity = t
        .zero_intensity()
        .ok_or_else(|| Error::Argument("table must contain the zero frequency".into()))?;
    let slack = R::of(crate::tol::KREIN_SLACK) + extra_slack;
    let match_tol = R::of(1e-6);
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut worst = R::zero();
    'outer: for chi in &t.rows {
        for psi in &t.rows {
            if checked >= max_pairs {
                break 'outer;
            }
            let sum: Vec<R> = chi.kappa.iter().zip(&psi.kappa).map(|(a, b)| *a + *b).collect();
            let Some(sum_row) = t.row_at(&sum, match_tol) else {
                skipped += 1;
                continue;
            };
            checked += 1;
            let lhs = (sum_row.intensity - psi.intensity) * (sum_row.intensity - psi.intensity);
            let rhs = R::of(2.0) * zero_intensity * (zero_intensity - chi.intensity);
            let excess = lhs - rhs;
            if excess > worst {
                worst = excess;
            }
        }
    }
    Ok(KreinReport {
        pairs_checked: checked,
        pairs_skipped: skipped,
        worst_excess: worst,
        pass: worst <= slack,
    })
}

/// Outcome of the visible-peak inclusion battery.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct BraggInclusionReport<R: Real> {
    /// `I(a) ± I(b) ⊆ I(b - sqrt(2 I0 (I0 - a)))`, membership-wise.
    pub pair_inclusion_pass: bool,
    pub pair_sums_checked: usize,
    pub pair_sums_outside: usize,
    pub threshold: R,
    /// Minimal gap of `I(a) - I(a) - I(a)` inside the frequency region.
    pub triple_difference_min_gap: R,
}

/// Membership checks for the inclusion of sums of visible peaks, plus the
/// triple-difference uniform-discreteness scan for the Meyer criterion.
/// `tol` absorbs finite-box intensity error on the threshold comparison.
pub fn bragg_inclusion_check<R: Real>(
    t: &DiffractionTable<R>,
    a: R,
    b: R,
    tol: R,
) -> Result<BraggInclusionReport<R>> {
    let i0 = t
        .zero_intensity()
        .ok_or_else(|| Error::Argument("table must contain the zero frequency".into()))?;
    if a >= i0 || b >= i0 || a <= R::zero() || b <= R::zero() {
        return Err(Error::Argument("thresholds must lie in (0, I(0))".into()));
    }
    let ia = visible_bragg(t, a)?;
    let ib = visible_bragg(t, b)?;
    let threshold = b - (R::of(2.0) * i0 * (i0 - a)).sqrt();
    let match_tol = R::of(1e-6);
    let mut checked = 0usize;
    let mut outside = 0usize;
    let mut pass = true;
    for x in &ia.points {
        for y in &ib.points {
            for sign in [R::one(), -R::one()] {
                let sum: Vec<R> = x.iter().zip(y).map(|(p, q)| *p + sign * *q).collect();
                match t.row_at(&sum, match_tol) {
                    Some(row) => {
                        checked += 1;
                        if row.intensity < threshold - tol {
                            pass = false;
                        }
                    }
                    None => outside += 1,
                }
            }
        }
    }

    // I(a) - I(a) - I(a): minimal gap of the triple difference set
    let mut triples: Vec<Vec<R>> = Vec::new();
    for x in &ia.points {
        for y in &ia.points {
            for z in &ia.points {
                let v: Vec<R> = x
                    .iter()
                    .zip(y.iter().zip(z.iter()))
                    .map(|(p, (q, r))| *p - *q - *r)
                    .collect();
                triples.push(v);
            }
        }
    }
    triples.sort_by(|p, q| lex_cmp(p, q));
    triples.dedup_by(|p, q| dist(p, q) <= R::of(crate::tol::DEDUP_TOL));
    let mut min_gap = R::infinity();
    for w in triples.windows(2) {
        let d = dist(&w[0], &w[1]);
        if d < min_gap {
            min_gap = d;
        }
    }
    Ok(BraggInclusionReport {
        pair_inclusion_pass: pass,
        pair_sums_checked: checked,
        pair_sums_outside: outside,
        threshold,
        triple_difference_min_gap: min_gap,
    })
}

/// Mean of a comb along the box sequence, with a first-order Richardson
/// extrapolation and an optional comparison against the internal Haar
/// integral of the weighting function.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct MeanReport<R: Real> {
    pub per_box: Vec<Complex<R>>,
    pub extrapolated: Complex<R>,
    pub haar_integral: Option<Complex<R>>,
}

/// `(sum of weights in A_n) / vol(A_n)` per box; doubling boxes admit the
/// two-point Richardson estimate `2 M_n - M_{n-1}`.
pub fn mean<R: Real>(
    c: &WeightedComb<R>,
    seq: &BoxSequence<R>,
    reference: Option<(&SchemeSpec<R>, &WindowFunction<R>)>,
) -> Result<MeanReport<R>> {
    let mut per_box = Vec::with_capacity(seq.boxes.len());
    for b in &seq.boxes {
        let vol = b.volume();
        let mut sum = Complex::new(R::zero(), R::zero());
        for (x, w) in c.points.iter().zip(&c.weights) {
            if b.contains(x) {
                sum = sum + *w;
            }
        }
        per_box.push(sum * Complex::new(R::one() / vol, R::zero()));
    }
    let extrapolated = if per_box.len() >= 2 {
        let last = per_box[per_box.len() - 1];
        let prev = per_box[per_box.len() - 2];
        last * Complex::new(R::of(2.0), R::zero()) - prev
    } else {
        per_box[0]
    };
    let haar_integral = match reference {
        None => None,
        Some((s, g)) => Some(haar_integral_of(s, g)?),
    };
    Ok(MeanReport { per_box, extrapolated, haar_integral })
}

/// `∫_H g dθ_H` under the scheme calibration: trapezoid for Euclidean
/// internal spaces, exact weighted sums for finite ones.
pub fn haar_integral_of<R: Real>(s: &SchemeSpec<R>, g: &WindowFunction<R>) -> Result<Complex<R>> {
    match &s.internal {
        InternalGroupSpec::Euclidean { m } if *m == 1 => predict_coefficient(s, g, R::zero()),
        InternalGroupSpec::Euclidean { .. } => Err(Error::UnsupportedScheme(
            "Haar integrals implemented for 1-D Euclidean internal".into(),
        )),
        InternalGroupSpec::Cyclic { n } => {
            let mut sum = Complex::new(R::zero(), R::zero());
            for r in 0..*n {
                let v = g.eval(&s.internal, &InternalElement::Cyclic(r))?;
                sum = sum + v;
            }
            Ok(sum * Complex::new(s.calibration, R::zero()))
        }
        InternalGroupSpec::Padic { .. } => {
            let m = s.internal.modulus().unwrap();
            let mut sum = Complex::new(R::zero(), R::zero());
            for r in 0..m {
                let v = g.eval(&s.internal, &InternalElement::Padic(r))?;
                sum = sum + v;
            }
            // each residue carries mass p^-depth
            Ok(sum * Complex::new(s.calibration / R::of_i64(m as i64), R::zero()))
        }
        InternalGroupSpec::Product { .. } => Err(Error::UnsupportedScheme(
            "Haar integrals for product internal spaces are not implemented".into(),
        )),
    }
}

/// Density estimates over sampled translations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct DensityReport<R: Real> {
    /// min over translations of the count/volume at the largest box.
    pub lower: R,
    /// max over translations at the largest box.
    pub upper: R,
    pub uniform: bool,
    pub translations_used: usize,
    /// Per-box `(min, max)` pairs for the full sequence.
    pub per_box: Vec<(R, R)>,
    /// When the patch came from a model set: `(theta(W°), theta(W̄))` and
    /// whether the sandwich held within the tolerance.
    pub window_sandwich: Option<(R, R, bool)>,
}

/// Counts patch points in translated boxes for `translations` sampled
/// offsets (seeded), returning lower/upper density proxies and, when
/// window data is supplied, the interior/closure measure sandwich.
#[allow(clippy::too_many_arguments)]
pub fn density_bounds<R: Real>(
    p: &PointPatch<R>,
    seq: &BoxSequence<R>,
    translations: usize,
    seed: u64,
    tolerance: R,
    window: Option<(&InternalGroupSpec, &InternalWindow<R>, R)>,
) -> Result<DensityReport<R>> {
    let largest = seq.largest();
    let margin: Vec<R> = largest.widths().iter().map(|w| *w / R::of(2.0)).collect();
    // translations stay inside the region minus the largest box
    let mut lo = Vec::with_capacity(p.dim());
    let mut hi = Vec::with_capacity(p.dim());
    for i in 0..p.dim() {
        let l = p.region.lo[i] + margin[i];
        let h = p.region.hi[i] - margin[i];
        if l > h {
            return Err(Error::InsufficientData(
                "region does not contain the largest box plus translation margin".into(),
            ));
        }
        lo.push(l);
        hi.push(h);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut offsets: Vec<Vec<R>> = vec![vec![R::zero(); p.dim()]];
    for _ in 1..translations.max(1) {
        let t: Vec<R> = (0..p.dim())
            .map(|i| {
                let u: f64 = rng.gen_range(0.0..1.0);
                lo[i] + (hi[i] - lo[i]) * R::of(u)
            })
            .collect();
        offsets.push(t);
    }
    let mut per_box = Vec::with_capacity(seq.boxes.len());
    for b in &seq.boxes {
        let vol = b.volume();
        let mut lo_d = R::infinity();
        let mut hi_d = R::zero();
        for t in &offsets {
            let shifted = b.translate(t);
            let count = count_in_box(p, &shifted);
            let d = R::of_i64(count as i64) / vol;
            if d < lo_d {
                lo_d = d;
            }
            if d > hi_d {
                hi_d = d;
            }
        }
        per_box.push((lo_d, hi_d));
    }
    let (lower, upper) = *per_box.last().unwrap();
    let uniform = (upper - lower) <= tolerance;
    let window_sandwich = match window {
        None => None,
        Some((g, w, cal)) => {
            let interior = w.interior_measure(g, cal)?;
            let closure = w.closure_measure(g, cal)?;
            let ok = interior - tolerance <= lower && upper <= closure + tolerance;
            Some((interior, closure, ok))
        }
    };
    Ok(DensityReport {
        lower,
        upper,
        uniform,
        translations_used: offsets.len(),
        per_box,
        window_sandwich,
    })
}

fn count_in_box<R: Real>(p: &PointPatch<R>, b: &BoxRegion<R>) -> usize {
    // lex order on the first coordinate bounds the scan
    let start = p.points.partition_point(|q| q[0] < b.lo[0]);
    let mut n = 0usize;
    for q in &p.points[start..] {
        if q[0] > b.hi[0] {
            break;
        }
        if b.contains(q) {
            n += 1;
        }
    }
    n
}

/// Output of the visible-points sieve on `[-n, n]^2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VisiblePointsReport {
    pub n: i64,
    pub visible_count: u64,
    pub invisible_count: u64,
    /// visible count divided by the number of nonzero lattice sites.
    pub visible_density: f64,
    /// Lower-left corners of the first all-invisible k x k blocks found in
    /// `[1, scan_bound]^2`, for k = 2 and k = 3 (None when absent there).
    pub block2: Option<(i64, i64)>,
    pub block3: Option<(i64, i64)>,
    pub scan_bound: i64,
}

/// Sieves `[-n, n]^2` by gcd: a nonzero point is visible iff its
/// coordinates are coprime. Also scans `[1, scan_bound]^2` for all
/// -invisible 2x2 and 3x3 blocks.
pub fn visible_points(n: i64, scan_bound: i64) -> Result<VisiblePointsReport> {
    if !(1..=10_000).contains(&n) {
        return Err(Error::Argument("n must lie in [1, 10^4]".into()));
    }
    fn gcd(a: i64, b: i64) -> i64 {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    let rows: Vec<(u64, u64)> = (-n..=n)
        .into_par_iter()
        .map(|a| {
            let mut vis = 0u64;
            let mut invis = 0u64;
            for b in -n..=n {
                if a == 0 && b == 0 {
                    continue;
                }
                if gcd(a, b) == 1 {
                    vis += 1;
                } else {
                    invis += 1;
                }
            }
            (vis, invis)
        })
        .collect();
    let visible_count: u64 = rows.iter().map(|r| r.0).sum();
    let invisible_count: u64 = rows.iter().map(|r| r.1).sum();
    let side = (2 * n + 1) as f64;
    let visible_density = visible_count as f64 / (side * side - 1.0);

    let bound = scan_bound.min(n.max(1));
    let invisible = |a: i64, b: i64| gcd(a, b) > 1;
    let mut block2 = None;
    'scan2: for a in 1..bound {
        for b in 1..bound {
            if invisible(a, b) && invisible(a + 1, b) && invisible(a, b + 1) && invisible(a + 1, b + 1)
            {
                block2 = Some((a, b));
                break 'scan2;
            }
        }
    }
    let mut block3 = None;
    'scan3: for a in 1..bound.saturating_sub(1) {
        for b in 1..bound.saturating_sub(1) {
            let mut all = true;
            'cells: for i in 0..3 {
                for j in 0..3 {
                    if !invisible(a + i, b + j) {
                        all = false;
                        break 'cells;
                    }
                }
            }
            if all {
                block3 = Some((a, b));
                break 'scan3;
            }
        }
    }
    Ok(VisiblePointsReport {
        n,
        visible_count,
        invisible_count,
        visible_density,
        block2,
        block3,
        scan_bound: bound,
    })
}

/// Independent oracle for a 2x2 all-invisible block: assign the primes
/// 2, 3, 5, 7 to the four cells and solve the congruences by CRT. Returns
/// the lower-left corner.
pub fn crt_invisible_block() -> (i64, i64) {
    // a = 0 mod 6, a = -1 mod 35; b = 0 mod 10, b = -1 mod 21
    let a = (0..210).find(|a| a % 6 == 0 && (a + 1) % 35 == 0).expect("CRT solution exists");
    let b = (0..210).find(|b| b % 10 == 0 && (b + 1) % 21 == 0).expect("CRT solution exists");
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{gallery, weighted_comb, GalleryName, QuadraticAlpha};

    type C = Complex<f64>;

    fn delta_z(n: i64) -> WeightedComb<f64> {
        let region = BoxRegion::interval(-(n as f64), n as f64);
        let entries: Vec<(Vec<f64>, C)> =
            (-n..=n).map(|k| (vec![k as f64], C::new(1.0, 0.0))).collect();
        WeightedComb::new(entries, region, 1e-12).unwrap()
    }

    fn silver_scheme() -> SchemeSpec<f64> {
        gallery(&GalleryName::Quadratic { alpha: QuadraticAlpha::Sqrt2 }).unwrap()
    }

    fn silver_indicator(n: f64) -> WeightedComb<f64> {
        let s = silver_scheme();
        let w = InternalWindow::euclidean_interval(-1.0, 1.0).unwrap();
        weighted_comb(
            &s,
            &WindowFunction::Indicator { window: w },
            &BoxRegion::interval(-n, n),
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn box_sequence_validation() {
        let seq = BoxSequence::<f64>::centered_cubes(1, 4.0, 5).unwrap();
        assert_eq!(seq.boxes.len(), 5);
        assert!(BoxSequence::new(vec![
            BoxRegion::interval(-2.0, 2.0),
            BoxRegion::interval(-1.0, 1.0),
        ])
        .is_err());
    }

    #[test]
    fn autocorrelation_delta_z() {
        let c = delta_z(1000);
        let est = autocorrelation(&c, &BoxRegion::interval(-1000.0, 1000.0)).unwrap();
        // gamma({k}) = (2N + 1 - |k|) / (2N)
        let at = |k: f64| est.comb.weight_at(&[k]).re;
        assert!((at(0.0) - 2001.0 / 2000.0).abs() < 1e-9);
        assert!((at(1.0) - 2000.0 / 2000.0).abs() < 1e-9);
        assert!((at(500.0) - 1501.0 / 2000.0).abs() < 1e-9);
        assert!((at(-500.0) - at(500.0)).abs() < 1e-12);
    }

    #[test]
    fn autocorrelation_single_point() {
        let region = BoxRegion::interval(-1.0, 1.0);
        let c = WeightedComb::new(vec![(vec![0.0], C::new(1.0, 0.0))], region.clone(), 1e-12)
            .unwrap();
        let est = autocorrelation(&c, &region).unwrap();
        assert_eq!(est.comb.len(), 1);
        assert!((est.comb.weight_at(&[0.0]).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn autocorrelation_translation_insensitive() {
        let c = delta_z(300);
        let shifted = {
            let entries: Vec<(Vec<f64>, C)> = c
                .points
                .iter()
                .zip(&c.weights)
                .map(|(p, w)| (vec![p[0] + 7.0], *w))
                .collect();
            WeightedComb::new(entries, BoxRegion::interval(-293.0, 307.0), 1e-12).unwrap()
        };
        let b1 = BoxRegion::interval(-250.0, 250.0);
        let e1 = autocorrelation(&c, &b1).unwrap();
        let e2 = autocorrelation(&shifted, &b1).unwrap();
        // identical up to O(1/N) edge terms
        for k in [0.0, 1.0, 5.0] {
            let d = (e1.comb.weight_at(&[k]).re - e2.comb.weight_at(&[k]).re).abs();
            assert!(d < 0.05, "difference {d} at {k}");
        }
    }

    #[test]
    fn fourier_bohr_delta_z_examples() {
        let c = delta_z(1000);
        let b = BoxRegion::interval(-1000.0, 1000.0);
        let c0 = fourier_bohr(&c, &[0.0], &b).unwrap();
        assert!((c0.re - 1.0005).abs() < 1e-9);
        let ch = fourier_bohr(&c, &[0.5], &b).unwrap();
        assert!(ch.norm() <= 0.0005 + 1e-9);
        let c1 = fourier_bohr(&c, &[1.0], &b).unwrap();
        assert!((c1.re - 1.0005).abs() < 1e-9);
    }

    #[test]
    fn fourier_transform_of_autocorrelation_matches_coefficient() {
        // |c_kappa|^2 = FT[gamma](kappa) / vol, an algebraic identity of
        // the finite-box estimates
        let comb = silver_indicator(2000.0);
        let b = BoxRegion::interval(-2000.0, 2000.0);
        let est = autocorrelation(&comb, &b).unwrap();
        let vol = b.volume();
        for kappa in [0.0, 0.5 + 0.5 / 2.0f64.sqrt(), 0.31] {
            let c = fourier_bohr(&comb, &[kappa], &b).unwrap();
            let tau = std::f64::consts::TAU;
            let mut ft = C::new(0.0, 0.0);
            for (z, w) in est.comb.points.iter().zip(&est.comb.weights) {
                ft += *w * C::from_polar(1.0, -tau * kappa * z[0]);
            }
            let lhs = c.norm_sqr();
            let rhs = ft.re / vol;
            assert!(
                (lhs - rhs).abs() < 1e-6 * lhs.max(1.0),
                "identity failed at {kappa}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn diffraction_table_silver_values() {
        let s = silver_scheme();
        let comb = silver_indicator(10_000.0);
        let b = BoxRegion::interval(-10_000.0, 10_000.0);
        let freq = BoxRegion::interval(-3.0, 3.0);
        let mut cands = dual_frequency_candidates(&s, &freq, 3.0).unwrap();
        cands.push(FrequencyCandidate { kappa: vec![0.31], kappa_star: None });
        let w = InternalWindow::euclidean_interval(-1.0, 1.0).unwrap();
        let table = diffraction_table(
            &comb,
            &cands,
            &b,
            Some((&s, &WindowFunction::Indicator { window: w })),
            "silver indicator",
        )
        .unwrap();
        // intensity at zero = dens^2 = 1/2
        let z = table.zero_intensity().unwrap();
        assert!((z - 0.5).abs() < 0.005, "intensity at zero {z}");
        // control frequency decays
        let ctrl = table.row_at(&[0.31], 1e-9).unwrap();
        assert!(ctrl.intensity <= 1e-3, "control intensity {}", ctrl.intensity);
        // dual peaks match the analytic sinc prediction within 2%
        let mut compared = 0;
        for row in &table.rows {
            let (Some(star), Some(pred)) = (&row.kappa_star, row.predicted) else { continue };
            if star[0].abs() < 1e-12 || star[0].abs() > 1.5 {
                continue;
            }
            let analytic = (std::f64::consts::TAU * star[0] / 2.0 * 2.0).sin()
                / (std::f64::consts::PI * star[0])
                / (2.0 * 2.0f64.sqrt());
            assert!(
                (pred.norm() - analytic.abs()).abs() < 2e-3,
                "prediction {} vs closed form {}",
                pred.norm(),
                analytic
            );
            assert!(
                (row.coefficient.norm() - pred.norm()).abs() <= 0.02,
                "finite coefficient {} vs prediction {} at kappa* {}",
                row.coefficient.norm(),
                pred.norm(),
                star[0]
            );
            compared += 1;
        }
        assert!(compared >= 10, "only {compared} dual rows compared");
    }

    #[test]
    fn visible_bragg_monotone_and_examples() {
        let c = delta_z(1000);
        let b = BoxRegion::interval(-1000.0, 1000.0);
        let mut cands: Vec<FrequencyCandidate<f64>> = (-3..=3)
            .map(|k| FrequencyCandidate { kappa: vec![k as f64], kappa_star: None })
            .collect();
        for i in 1..=20 {
            cands.push(FrequencyCandidate {
                kappa: vec![i as f64 * 0.13 + 0.105],
                kappa_star: None,
            });
        }
        let table = diffraction_table(&c, &cands, &b, None, "delta_Z").unwrap();
        let i_half = visible_bragg(&table, 0.5).unwrap();
        let ints: Vec<f64> = i_half.scalars().unwrap();
        assert_eq!(ints, vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        let above_max = visible_bragg(&table, 2.0).unwrap();
        assert!(above_max.is_empty());
        let i_04 = visible_bragg(&table, 0.4).unwrap();
        for k in &i_half.points {
            assert!(i_04.contains_point(k));
        }
    }

    #[test]
    fn krein_rejects_adversarial_table() {
        // exact table passes with equality
        let c = delta_z(500);
        let b = BoxRegion::interval(-500.0, 500.0);
        let cands: Vec<FrequencyCandidate<f64>> = (-2..=2)
            .map(|k| FrequencyCandidate { kappa: vec![k as f64], kappa_star: None })
            .collect();
        let table = diffraction_table(&c, &cands, &b, None, "delta_Z").unwrap();
        let rep = krein_check(&table, 200, 0.01).unwrap();
        assert!(rep.pass, "worst excess {}", rep.worst_excess);

        // fabricated violation: big intensity jump with I(chi) = I(0)
        let fake = DiffractionTable {
            rows: vec![
                DiffractionRow {
                    kappa: vec![0.0],
                    coefficient: C::new(0.7071, 0.0),
                    intensity: 0.5,
                    kappa_star: None,
                    predicted: None,
                },
                DiffractionRow {
                    kappa: vec![1.0],
                    coefficient: C::new(0.7071, 0.0),
                    intensity: 0.5,
                    kappa_star: None,
                    predicted: None,
                },
                DiffractionRow {
                    kappa: vec![2.0],
                    coefficient: C::new(0.1, 0.0),
                    intensity: 0.01,
                    kappa_star: None,
                    predicted: None,
                },
            ],
            box_used: BoxRegion::interval(-1.0, 3.0),
            source: "adversarial".into(),
        };
        let rep = krein_check(&fake, 200, 0.0).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn mean_examples() {
        let seq = BoxSequence::centered_cubes(1, 128.0, 4).unwrap();
        let z = delta_z(1100);
        let rep = mean(&z, &seq, None).unwrap();
        assert!((rep.extrapolated.re - 1.0).abs() < 1e-3);

        let empty = WeightedComb::empty(BoxRegion::interval(-1100.0, 1100.0));
        let rep = mean(&empty, &seq, None).unwrap();
        assert_eq!(rep.extrapolated, C::new(0.0, 0.0));

        let s = silver_scheme();
        let tent = WindowFunction::Tent { radius: 1.0 };
        let comb = weighted_comb(&s, &tent, &BoxRegion::interval(-1100.0, 1100.0), 1e-12)
            .unwrap();
        let rep = mean(&comb, &seq, Some((&s, &tent))).unwrap();
        let target = 1.0 / (2.0 * 2.0f64.sqrt());
        assert!((rep.extrapolated.re - target).abs() < 0.01 * target.max(1.0));
        let integral = rep.haar_integral.unwrap();
        assert!((integral.re - target).abs() < 1e-6);
    }

    #[test]
    fn density_z_exact() {
        let xs: Vec<f64> = (-600..=600).map(|k| k as f64).collect();
        let p = PointPatch::from_scalars(xs, BoxRegion::interval(-600.0, 600.0)).unwrap();
        let seq = BoxSequence::centered_cubes(1, 16.0, 4).unwrap();
        let rep = density_bounds(&p, &seq, 20, 7, 0.05, None).unwrap();
        assert!(rep.uniform);
        assert!((rep.lower - 1.0).abs() < 0.05 && (rep.upper - 1.0).abs() < 0.05);
    }

    #[test]
    fn visible_points_examples() {
        let rep = visible_points(400, 400).unwrap();
        let target = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((rep.visible_density - target).abs() < 0.01, "{}", rep.visible_density);
        // (1,0) visible, (2,2) invisible
        assert!(rep.block2.is_some());
        let (a, b) = rep.block2.unwrap();
        for (i, j) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let g = num_gcd(a + i, b + j);
            assert!(g > 1, "block cell ({}, {}) visible", a + i, b + j);
        }
        let (ca, cb) = crt_invisible_block();
        for (i, j) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            assert!(num_gcd(ca + i, cb + j) > 1);
        }
    }

    fn num_gcd(a: i64, b: i64) -> i64 {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }

    #[test]
    fn coefficient_bounded_by_mean_of_magnitudes() {
        let comb = silver_indicator(500.0);
        let b = BoxRegion::interval(-500.0, 500.0);
        let mean_mag: f64 = comb
            .points
            .iter()
            .zip(&comb.weights)
            .filter(|(p, _)| b.contains(p))
            .map(|(_, w)| w.norm())
            .sum::<f64>()
            / b.volume();
        for kappa in [0.0, 0.2, 1.3, 2.41] {
            let c = fourier_bohr(&comb, &[kappa], &b).unwrap();
            assert!(c.norm() <= mean_mag + 1e-12);
        }
    }
}
