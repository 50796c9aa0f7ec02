//! Arithmetic, characters and Haar measure for the catalog of concrete
//! internal groups: Euclidean `R^m`, cyclic `Z/n`, truncated p-adic
//! integers at a fixed depth, and finite products of these.
//!
//! p-adic elements are truncated to depth `k`: an element is its residue
//! modulo `p^k`. Operations that would need deeper digits (cylinders or
//! characters of level `> k`) report a precision error instead of
//! guessing.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// Description of one internal group from the catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum InternalGroupSpec {
    /// `R^m` with the standard topology.
    Euclidean { m: usize },
    /// `Z/nZ`, discrete.
    Cyclic { n: u64 },
    /// `Z_p` truncated at depth `k`: residues modulo `p^k`.
    Padic { p: u64, depth: u32 },
    /// Finite product of catalog groups.
    Product { factors: Vec<InternalGroupSpec> },
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl InternalGroupSpec {
    pub fn euclidean(m: usize) -> Self {
        Self::Euclidean { m }
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("cyclic modulus must be >= 1".into()));
        }
        Ok(Self::Cyclic { n })
    }

    pub fn padic(p: u64, depth: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Argument(format!("{p} is not prime")));
        }
        if depth == 0 {
            return Err(Error::Argument("p-adic depth must be >= 1".into()));
        }
        let modulus = (p as u128).checked_pow(depth);
        if modulus.is_none() || modulus.unwrap() > u64::MAX as u128 {
            return Err(Error::Precision(format!("p^k overflows for p={p}, k={depth}")));
        }
        Ok(Self::Padic { p, depth })
    }

    pub fn product(factors: Vec<InternalGroupSpec>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Argument("product of groups needs at least one factor".into()));
        }
        Ok(Self::Product { factors })
    }

    /// Modulus `n` resp. `p^k` for the finite variants.
    pub fn modulus(&self) -> Option<u64> {
        match self {
            Self::Cyclic { n } => Some(*n),
            Self::Padic { p, depth } => Some(p.pow(*depth)),
            _ => None,
        }
    }

    pub fn zero<R: Real>(&self) -> InternalElement<R> {
        match self {
            Self::Euclidean { m } => InternalElement::Euclidean(vec![R::zero(); *m]),
            Self::Cyclic { .. } => InternalElement::Cyclic(0),
            Self::Padic { .. } => InternalElement::Padic(0),
            Self::Product { factors } => {
                InternalElement::Product(factors.iter().map(|f| f.zero()).collect())
            }
        }
    }

    /// Checks that `e` conforms to this spec (residues reduced, dimensions
    /// matching).
    pub fn check_element<R: Real>(&self, e: &InternalElement<R>) -> Result<()> {
        match (self, e) {
            (Self::Euclidean { m }, InternalElement::Euclidean(v)) if v.len() == *m => Ok(()),
            (Self::Cyclic { n }, InternalElement::Cyclic(r)) if r < n => Ok(()),
            (Self::Padic { .. }, InternalElement::Padic(r)) if *r < self.modulus().unwrap() => {
                Ok(())
            }
            (Self::Product { factors }, InternalElement::Product(parts))
                if factors.len() == parts.len() =>
            {
                factors.iter().zip(parts).try_for_each(|(f, p)| f.check_element(p))
            }
            _ => Err(Error::SpecMismatch(format!("element {e:?} does not conform to {self:?}"))),
        }
    }
}

/// A point of an internal group, with per-variant coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real", tag = "variant", rename_all = "snake_case")]
pub enum InternalElement<R: Real> {
    Euclidean(Vec<R>),
    Cyclic(u64),
    Padic(u64),
    Product(Vec<InternalElement<R>>),
}

impl<R: Real> InternalElement<R> {
    /// Reduces an integer into the cyclic/p-adic residue range.
    pub fn residue(g: &InternalGroupSpec, value: i64) -> Result<Self> {
        let m = g
            .modulus()
            .ok_or_else(|| Error::SpecMismatch("residue construction needs a finite group".into()))?
            as i64;
        let r = value.rem_euclid(m) as u64;
        match g {
            InternalGroupSpec::Cyclic { .. } => Ok(Self::Cyclic(r)),
            InternalGroupSpec::Padic { .. } => Ok(Self::Padic(r)),
            _ => unreachable!(),
        }
    }
}

/// Group law; both operands must conform to `g`.
pub fn internal_add<R: Real>(
    g: &InternalGroupSpec,
    a: &InternalElement<R>,
    b: &InternalElement<R>,
) -> Result<InternalElement<R>> {
    g.check_element(a)?;
    g.check_element(b)?;
    Ok(add_unchecked(g, a, b))
}

fn add_unchecked<R: Real>(
    g: &InternalGroupSpec,
    a: &InternalElement<R>,
    b: &InternalElement<R>,
) -> InternalElement<R> {
    match (g, a, b) {
        (_, InternalElement::Euclidean(x), InternalElement::Euclidean(y)) => {
            InternalElement::Euclidean(x.iter().zip(y).map(|(p, q)| *p + *q).collect())
        }
        (InternalGroupSpec::Cyclic { n }, InternalElement::Cyclic(x), InternalElement::Cyclic(y)) => {
            InternalElement::Cyclic((x + y) % n)
        }
        (g @ InternalGroupSpec::Padic { .. }, InternalElement::Padic(x), InternalElement::Padic(y)) => {
            InternalElement::Padic((x + y) % g.modulus().unwrap())
        }
        (InternalGroupSpec::Product { factors }, InternalElement::Product(xs), InternalElement::Product(ys)) => {
            InternalElement::Product(
                factors
                    .iter()
                    .zip(xs.iter().zip(ys))
                    .map(|(f, (x, y))| add_unchecked(f, x, y))
                    .collect(),
            )
        }
        _ => unreachable!("checked by internal_add"),
    }
}

/// Additive inverse.
pub fn internal_neg<R: Real>(g: &InternalGroupSpec, a: &InternalElement<R>) -> Result<InternalElement<R>> {
    g.check_element(a)?;
    Ok(neg_unchecked(g, a))
}

fn neg_unchecked<R: Real>(g: &InternalGroupSpec, a: &InternalElement<R>) -> InternalElement<R> {
    match (g, a) {
        (_, InternalElement::Euclidean(x)) => {
            InternalElement::Euclidean(x.iter().map(|v| -*v).collect())
        }
        (InternalGroupSpec::Cyclic { n }, InternalElement::Cyclic(x)) => {
            InternalElement::Cyclic(if *x == 0 { 0 } else { n - x })
        }
        (g @ InternalGroupSpec::Padic { .. }, InternalElement::Padic(x)) => {
            let m = g.modulus().unwrap();
            InternalElement::Padic(if *x == 0 { 0 } else { m - x })
        }
        (InternalGroupSpec::Product { factors }, InternalElement::Product(xs)) => {
            InternalElement::Product(
                factors.iter().zip(xs).map(|(f, x)| neg_unchecked(f, x)).collect(),
            )
        }
        _ => unreachable!(),
    }
}

/// Integer scaling `c * a` (repeated addition, reduced per variant).
pub fn internal_scale<R: Real>(
    g: &InternalGroupSpec,
    a: &InternalElement<R>,
    c: i64,
) -> Result<InternalElement<R>> {
    g.check_element(a)?;
    Ok(scale_unchecked(g, a, c))
}

fn scale_unchecked<R: Real>(g: &InternalGroupSpec, a: &InternalElement<R>, c: i64) -> InternalElement<R> {
    match (g, a) {
        (_, InternalElement::Euclidean(x)) => {
            InternalElement::Euclidean(x.iter().map(|v| *v * R::of_i64(c)).collect())
        }
        (InternalGroupSpec::Cyclic { n }, InternalElement::Cyclic(x)) => {
            let m = *n as i128;
            InternalElement::Cyclic(((*x as i128 * c as i128).rem_euclid(m)) as u64)
        }
        (g @ InternalGroupSpec::Padic { .. }, InternalElement::Padic(x)) => {
            let m = g.modulus().unwrap() as i128;
            InternalElement::Padic(((*x as i128 * c as i128).rem_euclid(m)) as u64)
        }
        (InternalGroupSpec::Product { factors }, InternalElement::Product(xs)) => {
            InternalElement::Product(
                factors.iter().zip(xs).map(|(f, x)| scale_unchecked(f, x, c)).collect(),
            )
        }
        _ => unreachable!(),
    }
}

/// Half-open box `[lo_1, hi_1) x ...` in internal Euclidean coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct HalfOpenBox<R: Real> {
    pub lo: Vec<R>,
    pub hi: Vec<R>,
}

impl<R: Real> HalfOpenBox<R> {
    pub fn new(lo: Vec<R>, hi: Vec<R>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Argument("box endpoints must share a positive dimension".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::Argument("box has negative side length".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn interval(lo: R, hi: R) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn contains(&self, p: &[R]) -> bool {
        p.len() == self.lo.len()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (lo, hi))| *x >= *lo && *x < *hi)
    }

    pub fn volume(&self) -> R {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(lo, hi)| *hi - *lo)
            .fold(R::one(), |a, b| a * b)
    }
}

/// A p-adic cylinder `base + p^level * (all deeper digits)`, `level <= depth`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cylinder {
    pub base: u64,
    pub level: u32,
}

/// A measurable subset of an internal group, variant-matched.
///
/// Euclidean windows are finite unions of half-open boxes; cyclic windows
/// are residue subsets; p-adic windows are finite unions of cylinders;
/// product windows are products of component windows. Overlaps inside a
/// union are never double-counted by the measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real", tag = "variant", rename_all = "snake_case")]
pub enum InternalWindow<R: Real> {
    Euclidean { boxes: Vec<HalfOpenBox<R>> },
    Cyclic { residues: Vec<u64> },
    Padic { cylinders: Vec<Cylinder> },
    Product { factors: Vec<InternalWindow<R>> },
}

impl<R: Real> InternalWindow<R> {
    pub fn euclidean_interval(lo: R, hi: R) -> Result<Self> {
        Ok(Self::Euclidean { boxes: vec![HalfOpenBox::interval(lo, hi)?] })
    }

    pub fn cyclic(mut residues: Vec<u64>) -> Self {
        residues.sort_unstable();
        residues.dedup();
        Self::Cyclic { residues }
    }

    pub fn empty_for(g: &InternalGroupSpec) -> Self {
        match g {
            InternalGroupSpec::Euclidean { .. } => Self::Euclidean { boxes: vec![] },
            InternalGroupSpec::Cyclic { .. } => Self::Cyclic { residues: vec![] },
            InternalGroupSpec::Padic { .. } => Self::Padic { cylinders: vec![] },
            InternalGroupSpec::Product { factors } => Self::Product {
                factors: factors.iter().map(Self::empty_for).collect(),
            },
        }
    }

    /// Full group for the finite variants; errors for Euclidean (no finite
    /// full window exists).
    pub fn full_for(g: &InternalGroupSpec) -> Result<Self> {
        match g {
            InternalGroupSpec::Euclidean { .. } => {
                Err(Error::Argument("Euclidean groups have no full finite window".into()))
            }
            InternalGroupSpec::Cyclic { n } => Ok(Self::Cyclic { residues: (0..*n).collect() }),
            InternalGroupSpec::Padic { .. } => {
                Ok(Self::Padic { cylinders: vec![Cylinder { base: 0, level: 0 }] })
            }
            InternalGroupSpec::Product { factors } => Ok(Self::Product {
                factors: factors.iter().map(Self::full_for).collect::<Result<_>>()?,
            }),
        }
    }

    /// Validates this window against a group spec.
    pub fn check(&self, g: &InternalGroupSpec) -> Result<()> {
        match (self, g) {
            (Self::Euclidean { boxes }, InternalGroupSpec::Euclidean { m }) => {
                if boxes.iter().all(|b| b.lo.len() == *m) {
                    Ok(())
                } else {
                    Err(Error::SpecMismatch("box dimension differs from group".into()))
                }
            }
            (Self::Cyclic { residues }, InternalGroupSpec::Cyclic { n }) => {
                if residues.iter().all(|r| r < n) {
                    Ok(())
                } else {
                    Err(Error::SpecMismatch("residue outside [0, n)".into()))
                }
            }
            (Self::Padic { cylinders }, InternalGroupSpec::Padic { p, depth }) => {
                for c in cylinders {
                    if c.level > *depth {
                        return Err(Error::Precision(format!(
                            "cylinder level {} exceeds depth {depth}",
                            c.level
                        )));
                    }
                    if c.base >= p.pow(*depth) {
                        return Err(Error::SpecMismatch("cylinder base outside residue range".into()));
                    }
                }
                Ok(())
            }
            (Self::Product { factors: wf }, InternalGroupSpec::Product { factors: gf })
                if wf.len() == gf.len() =>
            {
                wf.iter().zip(gf).try_for_each(|(w, g)| w.check(g))
            }
            _ => Err(Error::SpecMismatch("window variant differs from group variant".into())),
        }
    }

    /// Membership of `h` in the window itself.
    pub fn contains(&self, g: &InternalGroupSpec, h: &InternalElement<R>) -> Result<bool> {
        self.check(g)?;
        g.check_element(h)?;
        Ok(self.contains_unchecked(g, h))
    }

    pub(crate) fn contains_unchecked(&self, g: &InternalGroupSpec, h: &InternalElement<R>) -> bool {
        match (self, h) {
            (Self::Euclidean { boxes }, InternalElement::Euclidean(v)) => {
                boxes.iter().any(|b| b.contains(v))
            }
            (Self::Cyclic { residues }, InternalElement::Cyclic(r)) => {
                residues.binary_search(r).is_ok()
            }
            (Self::Padic { cylinders }, InternalElement::Padic(r)) => {
                let p = match g {
                    InternalGroupSpec::Padic { p, .. } => *p,
                    _ => unreachable!(),
                };
                cylinders.iter().any(|c| {
                    let m = p.pow(c.level);
                    r % m == c.base % m
                })
            }
            (Self::Product { factors }, InternalElement::Product(parts)) => {
                let gs = match g {
                    InternalGroupSpec::Product { factors } => factors,
                    _ => unreachable!(),
                };
                factors
                    .iter()
                    .zip(gs.iter().zip(parts))
                    .all(|(w, (gg, hh))| w.contains_unchecked(gg, hh))
            }
            _ => false,
        }
    }

    /// Membership in the topological interior of the window.
    ///
    /// For cyclic and p-adic variants the window is clopen, so this agrees
    /// with [`Self::contains`]. For 1-D Euclidean windows the interval
    /// union is merged exactly; in higher dimension a point counts as
    /// interior when a small box around it stays inside the union (probe
    /// radius `EQ_TOL`).
    pub fn interior_contains(&self, g: &InternalGroupSpec, h: &InternalElement<R>) -> Result<bool> {
        self.check(g)?;
        g.check_element(h)?;
        Ok(match (self, h) {
            (Self::Euclidean { boxes }, InternalElement::Euclidean(v)) => {
                if v.len() == 1 {
                    merged_intervals(boxes)
                        .iter()
                        .any(|(lo, hi)| v[0] > *lo && v[0] < *hi)
                } else {
                    let eps = R::of(crate::tol::EQ_TOL);
                    corner_probe(v, eps).iter().all(|q| boxes.iter().any(|b| b.contains(q)))
                }
            }
            (Self::Product { factors }, InternalElement::Product(parts)) => {
                let gs = match g {
                    InternalGroupSpec::Product { factors } => factors,
                    _ => unreachable!(),
                };
                factors
                    .iter()
                    .zip(gs.iter().zip(parts))
                    .map(|(w, (gg, hh))| w.interior_contains(gg, hh))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .all(|b| b)
            }
            _ => self.contains_unchecked(g, h),
        })
    }

    /// Membership in the topological closure of the window.
    pub fn closure_contains(&self, g: &InternalGroupSpec, h: &InternalElement<R>) -> Result<bool> {
        self.check(g)?;
        g.check_element(h)?;
        Ok(match (self, h) {
            (Self::Euclidean { boxes }, InternalElement::Euclidean(v)) => {
                if v.len() == 1 {
                    merged_intervals(boxes)
                        .iter()
                        .any(|(lo, hi)| v[0] >= *lo && v[0] <= *hi)
                } else {
                    let eps = R::of(crate::tol::EQ_TOL);
                    corner_probe(v, eps).iter().any(|q| boxes.iter().any(|b| b.contains(q)))
                }
            }
            (Self::Product { factors }, InternalElement::Product(parts)) => {
                let gs = match g {
                    InternalGroupSpec::Product { factors } => factors,
                    _ => unreachable!(),
                };
                factors
                    .iter()
                    .zip(gs.iter().zip(parts))
                    .map(|(w, (gg, hh))| w.closure_contains(gg, hh))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .all(|b| b)
            }
            _ => self.contains_unchecked(g, h),
        })
    }

    /// Haar measure of the interior (Lebesgue of the merged-open union for
    /// Euclidean variants, same as the window for the discrete ones).
    pub fn interior_measure(&self, g: &InternalGroupSpec, normalization: R) -> Result<R> {
        // Interiors of half-open box unions differ from the union only on a
        // Lebesgue-null set, so the calibrated measure is the same.
        haar_measure(g, self, normalization)
    }

    /// Haar measure of the closure; identical to the window measure for
    /// the box/cylinder classes (the boundary is null resp. empty).
    pub fn closure_measure(&self, g: &InternalGroupSpec, normalization: R) -> Result<R> {
        haar_measure(g, self, normalization)
    }

    /// Bounding closed box of a Euclidean window, used to bound scheme
    /// enumerations.
    pub fn euclidean_bbox(&self) -> Option<(Vec<R>, Vec<R>)> {
        match self {
            Self::Euclidean { boxes } => {
                let first = boxes.first()?;
                let mut lo = first.lo.clone();
                let mut hi = first.hi.clone();
                for b in boxes.iter().skip(1) {
                    for (a, x) in lo.iter_mut().zip(&b.lo) {
                        *a = a.min(*x);
                    }
                    for (a, x) in hi.iter_mut().zip(&b.hi) {
                        *a = a.max(*x);
                    }
                }
                Some((lo, hi))
            }
            _ => None,
        }
    }
}

fn corner_probe<R: Real>(v: &[R], eps: R) -> Vec<Vec<R>> {
    let mut probes = vec![v.to_vec()];
    for axis in 0..v.len() {
        for sign in [-R::one(), R::one()] {
            let mut q = v.to_vec();
            q[axis] = q[axis] + sign * eps;
            probes.push(q);
        }
    }
    probes
}

/// Merges 1-D half-open intervals into maximal disjoint `[lo, hi)` pieces,
/// gluing touching endpoints.
fn merged_intervals<R: Real>(boxes: &[HalfOpenBox<R>]) -> Vec<(R, R)> {
    let mut iv: Vec<(R, R)> = boxes
        .iter()
        .filter(|b| b.hi[0] > b.lo[0])
        .map(|b| (b.lo[0], b.hi[0]))
        .collect();
    iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<(R, R)> = Vec::new();
    for (lo, hi) in iv {
        match out.last_mut() {
            Some((_, phi)) if lo <= *phi => {
                if hi > *phi {
                    *phi = hi;
                }
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Lebesgue measure of a union of boxes (no double counting), via
/// recursive sweep on the first axis.
fn union_volume<R: Real>(boxes: &[HalfOpenBox<R>]) -> R {
    if boxes.is_empty() {
        return R::zero();
    }
    let dim = boxes[0].lo.len();
    if dim == 1 {
        return merged_intervals(boxes)
            .into_iter()
            .map(|(lo, hi)| hi - lo)
            .fold(R::zero(), |a, b| a + b);
    }
    let mut cuts: Vec<R> = boxes.iter().flat_map(|b| [b.lo[0], b.hi[0]]).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    cuts.dedup_by(|a, b| *a == *b);
    let mut total = R::zero();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = (a + b) / R::of(2.0);
        let slab: Vec<HalfOpenBox<R>> = boxes
            .iter()
            .filter(|bx| bx.lo[0] <= mid && mid < bx.hi[0])
            .map(|bx| HalfOpenBox { lo: bx.lo[1..].to_vec(), hi: bx.hi[1..].to_vec() })
            .collect();
        total = total + (b - a) * union_volume(&slab);
    }
    total
}

/// Measure of a union of cylinders with containments removed, in units of
/// `p^(-level)`.
fn cylinder_mass<R: Real>(p: u64, depth: u32, cylinders: &[Cylinder]) -> R {
    // A cylinder (a, j) is contained in (b, i) iff i <= j and a = b mod p^i;
    // maximal survivors are pairwise disjoint.
    let mut keep: Vec<&Cylinder> = Vec::new();
    'outer: for c in cylinders {
        for other in cylinders {
            if (other.level < c.level
                || (other.level == c.level
                    && other.base % p.pow(other.level) < c.base % p.pow(c.level)))
                && c.base % p.pow(other.level) == other.base % p.pow(other.level)
            {
                continue 'outer;
            }
        }
        keep.push(c);
    }
    let mut seen: Vec<(u64, u32)> = Vec::new();
    let mut total = R::zero();
    for c in keep {
        let key = (c.base % p.pow(c.level), c.level);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let _ = depth;
        total = total + R::one() / R::of_i64(p.pow(c.level) as i64);
    }
    total
}

/// Calibrated Haar measure of a window.
///
/// The `normalization` constant is the scheme-level calibration threaded
/// through every estimate, chosen so that model-set densities match window
/// measures. Per variant:
///
/// - Euclidean: Lebesgue measure of the union divided by `normalization`
///   (the lattice covolume, e.g. `2 sqrt(2)` for the silver-mean scheme);
/// - cyclic: `|subset| * normalization` (default `1/n`);
/// - p-adic: sum of `p^(-level)` over disjoint cylinders, times
///   `normalization` (default 1);
/// - product: product of the factors' neutral measures (Lebesgue for
///   Euclidean parts, probability measure for finite parts) divided by
///   `normalization`.
pub fn haar_measure<R: Real>(
    g: &InternalGroupSpec,
    w: &InternalWindow<R>,
    normalization: R,
) -> Result<R> {
    if normalization <= R::zero() {
        return Err(Error::Argument("normalization must be positive".into()));
    }
    w.check(g)?;
    Ok(match (g, w) {
        (InternalGroupSpec::Euclidean { .. }, InternalWindow::Euclidean { boxes }) => {
            union_volume(boxes) / normalization
        }
        (InternalGroupSpec::Cyclic { .. }, InternalWindow::Cyclic { residues }) => {
            R::of_i64(residues.len() as i64) * normalization
        }
        (InternalGroupSpec::Padic { p, depth }, InternalWindow::Padic { cylinders }) => {
            cylinder_mass::<R>(*p, *depth, cylinders) * normalization
        }
        (InternalGroupSpec::Product { .. }, InternalWindow::Product { .. }) => {
            neutral_measure(g, w)? / normalization
        }
        _ => unreachable!("window checked against group"),
    })
}

/// Measure with the per-variant neutral normalization: Lebesgue for
/// Euclidean, probability for cyclic, `p^(-level)` mass for p-adic.
fn neutral_measure<R: Real>(g: &InternalGroupSpec, w: &InternalWindow<R>) -> Result<R> {
    Ok(match (g, w) {
        (InternalGroupSpec::Euclidean { .. }, InternalWindow::Euclidean { boxes }) => {
            union_volume(boxes)
        }
        (InternalGroupSpec::Cyclic { n }, InternalWindow::Cyclic { residues }) => {
            R::of_i64(residues.len() as i64) / R::of_i64(*n as i64)
        }
        (InternalGroupSpec::Padic { p, depth }, InternalWindow::Padic { cylinders }) => {
            cylinder_mass::<R>(*p, *depth, cylinders)
        }
        (InternalGroupSpec::Product { factors }, InternalWindow::Product { factors: wf }) => {
            factors
                .iter()
                .zip(wf)
                .map(|(gg, ww)| neutral_measure(gg, ww))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(R::one(), |a, b| a * b)
        }
        _ => return Err(Error::SpecMismatch("window variant differs from group variant".into())),
    })
}

/// A character of an internal group. Evaluation lands on the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real", tag = "variant", rename_all = "snake_case")]
pub enum InternalCharacter<R: Real> {
    /// Pairing `exp(2 pi i <kappa, h>)`.
    Euclidean { frequency: Vec<R> },
    /// Pairing `exp(2 pi i r h / n)`.
    Cyclic { r: u64 },
    /// Pairing `exp(2 pi i r h / p^level)`, `level <= depth`.
    Padic { r: i64, level: u32 },
    Product { factors: Vec<InternalCharacter<R>> },
}

impl<R: Real> InternalCharacter<R> {
    pub fn check(&self, g: &InternalGroupSpec) -> Result<()> {
        match (self, g) {
            (Self::Euclidean { frequency }, InternalGroupSpec::Euclidean { m })
                if frequency.len() == *m =>
            {
                Ok(())
            }
            (Self::Cyclic { r }, InternalGroupSpec::Cyclic { n }) if r < n => Ok(()),
            (Self::Padic { level, .. }, InternalGroupSpec::Padic { depth, .. }) => {
                if level <= depth {
                    Ok(())
                } else {
                    Err(Error::Precision(format!("character level {level} exceeds depth {depth}")))
                }
            }
            (Self::Product { factors }, InternalGroupSpec::Product { factors: gf })
                if factors.len() == gf.len() =>
            {
                factors.iter().zip(gf).try_for_each(|(c, g)| c.check(g))
            }
            _ => Err(Error::SpecMismatch("character variant differs from group".into())),
        }
    }
}

/// Evaluates a character at a group element; unit-modulus by construction.
pub fn char_eval<R: Real>(
    g: &InternalGroupSpec,
    chi: &InternalCharacter<R>,
    h: &InternalElement<R>,
) -> Result<Complex<R>> {
    chi.check(g)?;
    g.check_element(h)?;
    Ok(char_eval_unchecked(g, chi, h))
}

fn char_eval_unchecked<R: Real>(
    g: &InternalGroupSpec,
    chi: &InternalCharacter<R>,
    h: &InternalElement<R>,
) -> Complex<R> {
    let tau = R::TAU();
    match (g, chi, h) {
        (_, InternalCharacter::Euclidean { frequency }, InternalElement::Euclidean(v)) => {
            let phase: R = frequency
                .iter()
                .zip(v)
                .map(|(k, x)| *k * *x)
                .fold(R::zero(), |a, b| a + b);
            Complex::from_polar(R::one(), tau * phase)
        }
        (InternalGroupSpec::Cyclic { n }, InternalCharacter::Cyclic { r }, InternalElement::Cyclic(h)) => {
            let phase = R::of_i64((r * h % n) as i64) / R::of_i64(*n as i64);
            Complex::from_polar(R::one(), tau * phase)
        }
        (
            InternalGroupSpec::Padic { p, .. },
            InternalCharacter::Padic { r, level },
            InternalElement::Padic(h),
        ) => {
            let m = p.pow(*level) as i64;
            if m == 1 {
                return Complex::new(R::one(), R::zero());
            }
            let phase = R::of_i64((r * (*h as i64 % m)).rem_euclid(m)) / R::of_i64(m);
            Complex::from_polar(R::one(), tau * phase)
        }
        (
            InternalGroupSpec::Product { factors },
            InternalCharacter::Product { factors: cf },
            InternalElement::Product(parts),
        ) => cf
            .iter()
            .zip(factors.iter().zip(parts))
            .map(|(c, (gg, hh))| char_eval_unchecked(gg, c, hh))
            .fold(Complex::new(R::one(), R::zero()), |a, b| a * b),
        _ => unreachable!("checked by char_eval"),
    }
}

/// Largest distance from 1 attained on a subgroup of `U(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum U1Subgroup {
    /// Cyclic of the given order.
    Finite(u64),
    /// Dense (generated by an irrational rotation).
    Dense,
}

/// `sup_{z in subgroup} |z - 1|` for a subgroup of the unit circle.
///
/// 0 for the trivial subgroup, 2 whenever `-1` lies in the closure (even
/// order or dense), and `2 sin(pi floor(n/2) / n)` for odd order `n`. Any
/// non-trivial subgroup reaches at least `sqrt(3)`; this is asserted.
pub fn u1_subgroup_gap(order: U1Subgroup) -> Result<f64> {
    let gap = match order {
        U1Subgroup::Finite(0) => return Err(Error::Argument("subgroup order must be >= 1".into())),
        U1Subgroup::Finite(1) => 0.0,
        U1Subgroup::Finite(n) if n % 2 == 0 => 2.0,
        U1Subgroup::Finite(n) => 2.0 * (std::f64::consts::PI * ((n / 2) as f64) / n as f64).sin(),
        U1Subgroup::Dense => 2.0,
    };
    if !matches!(order, U1Subgroup::Finite(1)) {
        assert!(gap >= 3.0_f64.sqrt() - 1e-12, "subgroup gap fell below sqrt(3): {gap}");
    }
    Ok(gap)
}
