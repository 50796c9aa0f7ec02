//! Deterministic text serialization: CSV emitters for patches, combs,
//! almost-period sets, character sets and diffraction tables. Floats are
//! printed with a fixed 12-significant-digit format so byte-identical
//! reruns are a property of the data, not the allocator.

use std::fmt::Write as _;

use crate::combs::AlmostPeriodSet;
use crate::diffraction::DiffractionTable;
use crate::epsdual::CharacterSet;
use crate::geom::PointPatch;
use crate::scheme::WeightedComb;
use crate::Real;

/// Fixed-format float used by every CSV emitter.
pub fn fmt_float<R: Real>(x: R) -> String {
    let v = x.as_f64();
    if v == 0.0 {
        // normalize the sign of zero
        return String::from("0.000000000000e0");
    }
    format!("{v:.12e}")
}

fn coord_header(dim: usize, prefix: &str) -> String {
    (0..dim).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>().join(",")
}

/// `x0,..,x{d-1}` rows.
pub fn patch_to_csv<R: Real>(p: &PointPatch<R>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", coord_header(p.dim(), "x"));
    for point in &p.points {
        let row: Vec<String> = point.iter().map(|v| fmt_float(*v)).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// `x0,..,weight_re,weight_im` rows.
pub fn comb_to_csv<R: Real>(c: &WeightedComb<R>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{},weight_re,weight_im", coord_header(c.dim(), "x"));
    for (point, w) in c.points.iter().zip(&c.weights) {
        let mut row: Vec<String> = point.iter().map(|v| fmt_float(*v)).collect();
        row.push(fmt_float(w.re));
        row.push(fmt_float(w.im));
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// `t0,..` rows of the almost periods.
pub fn almost_periods_to_csv<R: Real>(s: &AlmostPeriodSet<R>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", coord_header(s.periods.dim(), "t"));
    for t in &s.periods.points {
        let row: Vec<String> = t.iter().map(|v| fmt_float(*v)).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// `kappa0,..,max_deviation` rows.
pub fn character_set_to_csv<R: Real>(
    s: &CharacterSet<R>,
    source: &PointPatch<R>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{},max_deviation", coord_header(s.frequencies.dim(), "kappa"));
    for kappa in &s.frequencies.points {
        let dev = crate::epsdual::max_deviation(source, kappa);
        let mut row: Vec<String> = kappa.iter().map(|v| fmt_float(*v)).collect();
        row.push(fmt_float(dev));
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// `kappa0,..,re,im,intensity,predicted_intensity` rows (the prediction
/// column is empty when absent).
pub fn diffraction_to_csv<R: Real>(t: &DiffractionTable<R>) -> String {
    let mut out = String::new();
    let dim = t.rows.first().map(|r| r.kappa.len()).unwrap_or(1);
    let _ = writeln!(out, "{},re,im,intensity,predicted_intensity", coord_header(dim, "kappa"));
    for r in &t.rows {
        let mut row: Vec<String> = r.kappa.iter().map(|v| fmt_float(*v)).collect();
        row.push(fmt_float(r.coefficient.re));
        row.push(fmt_float(r.coefficient.im));
        row.push(fmt_float(r.intensity));
        row.push(r.predicted.map(|p| fmt_float(p.norm_sqr())).unwrap_or_default());
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Two-column `kappa intensity` file ready for plotting tools.
pub fn diffraction_to_plot<R: Real>(t: &DiffractionTable<R>) -> String {
    let mut out = String::new();
    for r in &t.rows {
        let k = r.kappa.iter().map(|v| fmt_float(*v)).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "{k} {}", fmt_float(r.intensity));
    }
    out
}
