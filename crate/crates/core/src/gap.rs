//! LOCC versus SEP on the combing family `ψ½`.
//!
//! Separable operations comb `ψ½` onto party 1 with certainty; the best LOCC
//! protocol succeeds with `1 − (1 − 1/(N−1))^(N−1)`, which tends to `1 − 1/e`.

use std::fmt::Write as _;
use std::io::Write;

use num_traits::One;

use crate::error::{Error, Result};
use crate::protocols::combing_distribution;
use crate::scalar::{format_significant, Rational, Scalar};
use crate::wstate::WClassState;

/// Largest `N` for which the LOCC value is also computed by enumeration.
pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct GapCurvePoint {
    pub n_parties: usize,
    pub locc_prob: f64,
    pub sep_prob: f64,
    pub gap: f64,
    /// Exact LOCC value, present for `N ≤ ENUMERATION_LIMIT`.
    pub locc_exact: Option<Rational>,
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::TooFewParties(n));
    }
    Ok(())
}

/// `1 − ((N−2)/(N−1))^(N−1)` in exact arithmetic.
pub fn locc_exact(n: usize) -> Result<Rational> {
    check_n(n)?;
    let base = Rational::from_ratio(n as i64 - 2, n as i64 - 1);
    Ok(Rational::one() - Scalar::powi(&base, n - 1))
}

/// `1 − (1 − 1/(N−1))^(N−1)` in floating point.
pub fn locc_closed_form(n: usize) -> Result<f64> {
    check_n(n)?;
    let m = (n - 1) as f64;
    Ok(-((m * (-1.0 / m).ln_1p()).exp_m1()))
}

/// Party-1 combing probability of `ψ½` from the enumerated protocol tree.
pub fn locc_by_enumeration(n: usize) -> Result<Rational> {
    check_n(n)?;
    let s = WClassState::<Rational>::psi_half(n)?;
    Ok(combing_distribution(&s, 0)?.epr_with(0))
}

pub fn gap_point(n: usize) -> Result<GapCurvePoint> {
    check_n(n)?;
    let (locc_prob, locc_exact) = if n <= ENUMERATION_LIMIT {
        let exact = locc_exact(n)?;
        let enumerated = locc_by_enumeration(n)?;
        if exact != enumerated {
            return Err(Error::CrossCheck(format!("N = {n}: closed form {exact} but enumeration {enumerated}")));
        }
        (exact.to_f64(), Some(exact))
    } else {
        (locc_closed_form(n)?, None)
    };
    let sep_prob = 1.0;
    Ok(GapCurvePoint { n_parties: n, locc_prob, sep_prob, gap: sep_prob - locc_prob, locc_exact })
}

pub fn gap_curve(n_min: usize, n_max: usize) -> Result<Vec<GapCurvePoint>> {
    check_n(n_min)?;
    if n_max < n_min {
        return Err(Error::DimensionMismatch { expected: n_min, found: n_max });
    }
    (n_min..=n_max).map(gap_point).collect()
}

pub fn gap_curve_csv(points: &[GapCurvePoint]) -> String {
    let mut out = String::from("N,locc,sep,gap\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.n_parties,
            format_significant(p.locc_prob, 12),
            format_significant(p.sep_prob, 12),
            format_significant(p.gap, 12)
        );
    }
    out
}

pub fn write_gap_curve_csv(points: &[GapCurvePoint], path: &std::path::Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(gap_curve_csv(points).as_bytes())?;
    Ok(())
}

/// Static line plot of both curves and the `1 − 1/e` asymptote.
pub fn gap_curve_svg(points: &[GapCurvePoint]) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let n_lo = points.first().map_or(3, |p| p.n_parties) as f64;
    let n_hi = points.last().map_or(4, |p| p.n_parties).max(n_lo as usize + 1) as f64;
    let sx = |n: f64| pad + (n - n_lo) / (n_hi - n_lo) * (w - 2.0 * pad);
    let sy = |v: f64| h - pad - (v - 0.5) / 0.5 * (h - 2.0 * pad);
    let line = |f: &dyn Fn(&GapCurvePoint) -> f64| {
        points
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.n_parties as f64), sy(f(p))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let asymptote = sy(1.0 - (-1.0f64).exp());
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{pad}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        h - pad,
        w - pad,
        h - pad
    );
    let _ = writeln!(svg, r#"<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{}" stroke="black"/>"#, h - pad);
    let _ = writeln!(
        svg,
        r#"<line x1="{pad}" y1="{asymptote:.2}" x2="{}" y2="{asymptote:.2}" stroke="gray" stroke-dasharray="4 4"/>"#,
        w - pad
    );
    let _ = writeln!(svg, r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#, line(&|p| p.sep_prob));
    let _ = writeln!(svg, r#"<polyline fill="none" stroke="firebrick" stroke-width="2" points="{}"/>"#, line(&|p| p.locc_prob));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="12">N</text>"#, w / 2.0, h - 15.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" font-size="12">SEP</text>"#, w - pad + 5.0, sy(1.0));
    let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" font-size="12">LOCC</text>"#, w - pad + 5.0, asymptote);
    svg.push_str("</svg>\n");
    svg
}
