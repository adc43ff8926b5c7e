//! Plain-text rendering of reports.

use std::fmt::Write;

use convex_shape::decompose::QuotientMin;
use convex_shape::shape::CoercivityMethod;
use convex_shape::{Decomposition, ShapeReport, Subspace};

/// Compact number formatting: up to ten significant decimals, no trailing
/// zeros, exponent form for very large or small magnitudes.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 || v.abs() < 1e-12 {
        return "0".into();
    }
    if v.abs() >= 1e7 || v.abs() < 1e-4 {
        let s = format!("{v:.6e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exp}");
    }
    let s = format!("{v:.10}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| num(*x)).collect();
    format!("[{}]", parts.join(", "))
}

fn subspace(out: &mut String, label: &str, s: &Subspace) {
    if s.is_zero() {
        let _ = writeln!(out, "  {label}: {{0}}");
        return;
    }
    if s.is_full() {
        let _ = writeln!(out, "  {label}: all of R^{}", s.ambient_dim());
        return;
    }
    let _ = writeln!(out, "  {label}: dim {}, basis", s.dim());
    for b in s.basis() {
        let _ = writeln!(out, "    {}", vector(b));
    }
}

pub fn shape(out: &mut String, r: &ShapeReport, q: &QuotientMin) {
    subspace(out, "lineality space", &r.lineality);
    let _ = writeln!(
        out,
        "  conjugate domain: hull of {} slopes, affine dim {}",
        r.conjugate_domain.len(),
        r.conjugate_domain.direction_space().dim()
    );
    let _ = writeln!(out, "  directionally coercive: {}", r.directionally_coercive);
    let _ = writeln!(out, "  certificate: {}", vector(&r.essential_certificate));
    let attained = if q.attained { "attained" } else { "not attained" };
    let _ = writeln!(out, "  quotient infimum at certificate: {} ({attained})", num(q.value));
    if let Some(c) = &r.coercivity_constant {
        let how = match c.method {
            CoercivityMethod::FacetEnumeration => "exact",
            CoercivityMethod::SampledUpperBound => "sampled upper bound",
        };
        let _ = writeln!(out, "  coercivity constant: {} ({how})", num(c.alpha));
    }
}

pub fn decomposition(out: &mut String, d: &Decomposition) {
    subspace(out, "Y (lineality)", &d.y);
    subspace(out, "Z (complement)", &d.z);
    let _ = writeln!(out, "  v: {}", vector(&d.v));
    let _ = writeln!(out, "  certificate: {}", vector(&d.certificate));
    let _ = writeln!(out, "  c: {} pieces on R^{}", d.c.num_pieces(), d.c.dim());
    for (a, b) in d.c.slopes().iter().zip(d.c.offsets()) {
        let _ = writeln!(out, "    slope {} offset {}", vector(a), num(*b));
    }
    let _ = writeln!(out, "  z_shift: {}", vector(&d.z_shift));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1e-17), "0");
        assert_eq!(num(2e8), "2e8");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
        assert_eq!(vector(&[1.0, -2.5]), "[1, -2.5]");
    }
}
