//! Closed forms of the series that make up the Scheme 1 expected-MG
//! expansion.
//!
//! With `q = 1 - rho_f` and `m = floor(l / 2)`, the large-`K` slow MG of
//! Scheme 1 is
//!
//! ```text
//! (1-rho)^2/2 * [ sum_l rho^l 2l
//!               - sum_l rho^l floor(l/(D+2))     (1 + q^m)
//!               - sum_l rho^l floor((l+1)/(D+2)) (1 - q^m) ] - rho rho_f / 2
//! ```
//!
//! The first sum is `2 rho / (1-rho)^2`; the other two are the "second" and
//! "third" sums below.

use serde::{Deserialize, Serialize};

use super::pw;
use crate::error::{check_probability, invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValues {
    /// `sum_{x>=1} x c^x = c / (1-c)^2`.
    pub sum_xcx: f64,
    /// `sum_{x=0}^{n} c^x = (1 - c^(n+1)) / (1 - c)`.
    pub geom: f64,
}

fn check_open_unit(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must lie in (0, 1), got {x}")))
    }
}

fn check_sum_args(rho: f64, rho_f: f64, d: u32) -> Result<()> {
    check_open_unit("rho", rho)?;
    check_probability("rho_f", rho_f)?;
    if rho_f == 0.0 {
        return Err(invalid("rho_f", "must be positive"));
    }
    if d % 2 == 1 {
        return Err(invalid("D", format!("must be even, got {d}")));
    }
    Ok(())
}

pub fn series_identities(c: f64, n: u64) -> Result<SeriesValues> {
    check_open_unit("c", c)?;
    Ok(SeriesValues {
        sum_xcx: c / ((1.0 - c) * (1.0 - c)),
        geom: (1.0 - pw(c, n + 1)) / (1.0 - c),
    })
}

/// `sum_{l>=1} rho^l floor(l/(D+2)) (1 + (1-rho_f)^floor(l/2))`.
pub fn second_sum_closed(rho: f64, rho_f: f64, d: u32) -> Result<f64> {
    check_sum_args(rho, rho_f, d)?;
    let q = 1.0 - rho_f;
    let d = d as u64;
    let r_d2 = pw(rho, d + 2);
    let z = r_d2 * pw(q, d / 2 + 1);
    Ok((1.0 + rho) * r_d2 / ((1.0 - rho * rho) * (1.0 - r_d2))
        + (1.0 + rho) * z / ((1.0 - q * rho * rho) * (1.0 - z)))
}

/// `sum_{l>=1} rho^l floor((l+1)/(D+2)) (1 - (1-rho_f)^floor(l/2))`.
///
/// The standard form divides by `1 - rho_f`, so `rho_f = 1` is rejected.
pub fn third_sum_closed(rho: f64, rho_f: f64, d: u32) -> Result<f64> {
    check_sum_args(rho, rho_f, d)?;
    if rho_f == 1.0 {
        return Err(invalid("rho_f", "third sum is singular at rho_f = 1"));
    }
    let q = 1.0 - rho_f;
    let d = d as u64;
    let r_d2 = pw(rho, d + 2);
    let z = r_d2 * pw(q, d / 2 + 1);
    Ok(r_d2 / (rho * (1.0 - rho) * (1.0 - r_d2))
        - (1.0 + rho * q) * z / (rho * q * (1.0 - q * rho * rho) * (1.0 - z)))
}

/// Third sum with the `q` in the denominator cancelled against the
/// numerator's `q^(D/2+1)`; finite at `rho_f = 1`.
fn third_sum_reduced(rho: f64, rho_f: f64, d: u32) -> f64 {
    let q = 1.0 - rho_f;
    let d = d as u64;
    let r_d2 = pw(rho, d + 2);
    let q_half = pw(q, d / 2);
    let z = r_d2 * q_half * q;
    r_d2 / (rho * (1.0 - rho) * (1.0 - r_d2))
        - (1.0 + rho * q) * r_d2 * q_half / (rho * (1.0 - q * rho * rho) * (1.0 - z))
}

/// Slow MG of Scheme 1 assembled from the three sums.
pub fn three_sum_assembly(rho: f64, rho_f: f64, d: u32) -> Result<f64> {
    check_sum_args(rho, rho_f, d)?;
    let first = 2.0 * rho / ((1.0 - rho) * (1.0 - rho));
    let second = second_sum_closed(rho, rho_f, d)?;
    let third = third_sum_reduced(rho, rho_f, d);
    Ok((1.0 - rho) * (1.0 - rho) / 2.0 * (first - second - third) - rho * rho_f / 2.0)
}
