//! CSV tables with 9 significant digits and LF line endings.

use std::fmt::Write;

use incompat_core::{BoundaryRow, CurveRow};

const SIGNIFICANT: i32 = 9;

/// `%.9g`: 9 significant digits, trailing zeros dropped, exponent form
/// outside `[1e-5, 1e9)`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (SIGNIFICANT - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..SIGNIFICANT).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (SIGNIFICANT - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn boundary_csv(rows: &[BoundaryRow]) -> String {
    let mut out = String::from("mu,lambda_lower,lambda_upper\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            sig9(r.mu),
            sig9(r.lambda_lower),
            sig9(r.lambda_upper)
        );
    }
    out
}

pub fn curves_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("d,eq2,cloning\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.d, sig9(r.eq2), sig9(r.cloning));
    }
    out
}
