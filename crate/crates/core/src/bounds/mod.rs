//! Closed-form MG bounds: the slow-MG cap, the penalty factor `M`, the
//! corner points of both schemes and the resulting inner and outer regions.
//!
//! Every region is a trapezoid with right angles at the two axes, stored as
//! three vertices `(0, cap) -> corner -> (s_f_max, 0)` with
//! `s_f_max = rho * rho_f / 2`.

pub mod finite;
pub mod series;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_probability, invalid, Error, Result};
use crate::numeric::fmt_sig;

pub use finite::{exact_expectation, finite_k_expectation, MAX_ENUMERATION_K};
pub use series::{
    second_sum_closed, series_identities, third_sum_closed, three_sum_assembly, SeriesValues,
};

/// Cooperation-round budget, possibly unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Delay {
    Finite(u32),
    Infinite,
}

impl Delay {
    pub fn finite(self) -> Option<u32> {
        match self {
            Delay::Finite(d) => Some(d),
            Delay::Infinite => None,
        }
    }
}

impl From<u32> for Delay {
    fn from(d: u32) -> Self {
        Delay::Finite(d)
    }
}

impl fmt::Display for Delay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delay::Finite(d) => write!(f, "{d}"),
            Delay::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Delay {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Delay::Infinite),
            other => other.parse::<u32>().map(Delay::Finite).map_err(|_| {
                invalid(
                    "D",
                    format!("expected a nonnegative integer or `inf`, got `{other}`"),
                )
            }),
        }
    }
}

impl Serialize for Delay {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Delay::Finite(d) => s.serialize_u32(*d),
            Delay::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Delay {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Int(u32),
            Str(String),
        }
        match Wire::deserialize(de)? {
            Wire::Int(d) => Ok(Delay::Finite(d)),
            Wire::Str(s) if s == "inf" => Ok(Delay::Infinite),
            Wire::Str(s) => Err(serde::de::Error::custom(format!(
                "expected integer or \"inf\", got \"{s}\""
            ))),
        }
    }
}

/// A (fast MG, slow MG) pair. Serialized as `[s_f, s_s]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct MgPoint {
    pub s_f: f64,
    pub s_s: f64,
}

impl MgPoint {
    pub const fn new(s_f: f64, s_s: f64) -> Self {
        Self { s_f, s_s }
    }

    pub fn sum(&self) -> f64 {
        self.s_f + self.s_s
    }
}

impl From<[f64; 2]> for MgPoint {
    fn from([s_f, s_s]: [f64; 2]) -> Self {
        Self { s_f, s_s }
    }
}

impl From<MgPoint> for [f64; 2] {
    fn from(p: MgPoint) -> Self {
        [p.s_f, p.s_s]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionKind {
    /// The linear inner bound with slope `-M`.
    #[serde(rename = "inner-theorem1")]
    InnerTheorem1,
    /// Time-sharing hull of the two scheme points.
    #[serde(rename = "inner-timeshare")]
    InnerTimeShare,
    #[serde(rename = "outer")]
    Outer,
}

impl RegionKind {
    pub fn label(self) -> &'static str {
        match self {
            RegionKind::InnerTheorem1 => "inner-theorem1",
            RegionKind::InnerTimeShare => "inner-timeshare",
            RegionKind::Outer => "outer",
        }
    }
}

impl FromStr for RegionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inner-theorem1" => Ok(RegionKind::InnerTheorem1),
            "inner-timeshare" => Ok(RegionKind::InnerTimeShare),
            "outer" => Ok(RegionKind::Outer),
            other => Err(invalid("kind", format!("unknown region kind `{other}`"))),
        }
    }
}

/// Inner-bound construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerKind {
    Theorem1,
    TimeShare,
}

/// A trapezoidal MG region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgRegion {
    pub kind: RegionKind,
    pub rho: f64,
    pub rho_f: f64,
    #[serde(rename = "D")]
    pub d: Delay,
    /// Penalty factor of the inner bound; 1 for the outer bound.
    #[serde(rename = "M")]
    pub m: f64,
    /// Upper bound on `s_f + s_s`, reached on the slow axis.
    pub cap: f64,
    pub vertices: [MgPoint; 3],
}

impl MgRegion {
    pub fn s_f_max(&self) -> f64 {
        self.vertices[2].s_f
    }

    pub fn corner(&self) -> MgPoint {
        self.vertices[1]
    }

    /// CSV with header `s_f,s_s`, one vertex per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s_f,s_s\n");
        for v in &self.vertices {
            out.push_str(&format!("{},{}\n", fmt_sig(v.s_f), fmt_sig(v.s_s)));
        }
        out
    }
}

fn check_rho(rho: f64) -> Result<()> {
    check_probability("rho", rho)?;
    if rho == 0.0 {
        return Err(invalid("rho", "closed forms need rho > 0"));
    }
    Ok(())
}

fn check_rho_f_positive(rho_f: f64) -> Result<()> {
    check_probability("rho_f", rho_f)?;
    if rho_f == 0.0 {
        return Err(invalid("rho_f", "M needs rho_f > 0"));
    }
    Ok(())
}

fn check_even(d: Delay) -> Result<()> {
    match d {
        Delay::Finite(d) if d % 2 == 1 => Err(invalid("D", format!("must be even, got {d}"))),
        _ => Ok(()),
    }
}

fn check_scheme1_delay(d: Delay) -> Result<()> {
    match d {
        Delay::Finite(d) => crate::scheduler::check_scheme1_budget(d),
        Delay::Infinite => Ok(()),
    }
}

/// `x^n` for nonnegative integer `n`.
pub(crate) fn pw(x: f64, n: u64) -> f64 {
    if n <= i32::MAX as u64 {
        x.powi(n as i32)
    } else {
        x.powf(n as f64)
    }
}

/// The two `D`-dependent tails shared by `M` and the Scheme 1 corner:
/// `rho^(D+1) / (1 - rho^(D+2))` and
/// `rho^(D+1) q^(D/2) / (1 - rho^(D+2) q^(D/2+1))` with `q = 1 - rho_f`.
fn tails(rho: f64, rho_f: f64, d: u32) -> (f64, f64) {
    let d = d as u64;
    let q = 1.0 - rho_f;
    let r_d1 = pw(rho, d + 1);
    let r_d2 = r_d1 * rho;
    let q_half = pw(q, d / 2);
    let plain = r_d1 / (1.0 - r_d2);
    let mixed = r_d1 * q_half / (1.0 - r_d2 * q_half * q);
    (plain, mixed)
}

/// Penalty factor `M >= 1` of the linear inner bound.
pub fn compute_m(rho: f64, rho_f: f64, d: Delay) -> Result<f64> {
    check_rho(rho)?;
    check_rho_f_positive(rho_f)?;
    check_even(d)?;
    let Delay::Finite(d) = d else {
        return Ok(1.0);
    };
    if rho == 1.0 {
        return Ok(1.0);
    }
    let (plain, mixed) = tails(rho, rho_f, d);
    let w = (1.0 - rho) * (1.0 - rho) / (rho * rho_f);
    Ok(1.0 + w * rho * plain + w * mixed)
}

/// Sum-MG cap `rho - (1 - rho) rho^(D+2) / (1 - rho^(D+2))`, with its
/// `rho = 1` and `D = inf` limits.
pub fn slow_mg_cap(rho: f64, d: Delay) -> Result<f64> {
    check_rho(rho)?;
    Ok(match (d, rho == 1.0) {
        (Delay::Infinite, _) => rho,
        (Delay::Finite(d), true) => (d as f64 + 1.0) / (d as f64 + 2.0),
        (Delay::Finite(d), false) => {
            let r = pw(rho, d as u64 + 2);
            rho - (1.0 - rho) * r / (1.0 - r)
        }
    })
}

fn scheme1_point(rho: f64, rho_f: f64, d: Delay, mixed_sign: f64) -> Result<MgPoint> {
    check_rho(rho)?;
    check_probability("rho_f", rho_f)?;
    check_scheme1_delay(d)?;
    let s_f = rho * rho_f / 2.0;
    let s_s = match d {
        Delay::Infinite => rho - s_f,
        Delay::Finite(d) if rho == 1.0 => (d as f64 + 1.0) / (d as f64 + 2.0) - s_f,
        Delay::Finite(d) => {
            let (plain, mixed) = tails(rho, rho_f, d);
            rho - s_f - (1.0 - rho * rho) * plain / 2.0
                + mixed_sign * (1.0 - rho) * (1.0 - rho) * mixed / 2.0
        }
    };
    Ok(MgPoint::new(s_f, s_s))
}

/// Corner of Scheme 1 in the closed form used for the reference region
/// plots.
///
/// The last term enters with a minus sign here. Summing the three series of
/// the expected-MG expansion gives the same expression with a plus sign
/// (see [`scheme1_expected_corner`]); the two differ by
/// `(1 - rho)^2 rho^(D+1) (1 - rho_f)^(D/2) / (1 - rho^(D+2) (1 - rho_f)^(D/2+1))`.
pub fn scheme1_corner(rho: f64, rho_f: f64, d: Delay) -> Result<MgPoint> {
    scheme1_point(rho, rho_f, d, -1.0)
}

/// Large-`K` expected MG pair actually achieved by Scheme 1, i.e. the value
/// the three-sum expansion and the Monte Carlo estimator converge to.
pub fn scheme1_expected_corner(rho: f64, rho_f: f64, d: Delay) -> Result<MgPoint> {
    scheme1_point(rho, rho_f, d, 1.0)
}

/// Scheme 2 sends slow data only and reaches the cap.
pub fn scheme2_point(rho: f64, d: Delay) -> Result<MgPoint> {
    Ok(MgPoint::new(0.0, slow_mg_cap(rho, d)?))
}

pub fn inner_region(rho: f64, rho_f: f64, d: Delay, kind: InnerKind) -> Result<MgRegion> {
    let m = compute_m(rho, rho_f, d)?;
    let cap = slow_mg_cap(rho, d)?;
    let s_f_max = rho * rho_f / 2.0;
    let (region_kind, corner) = match kind {
        InnerKind::Theorem1 => (
            RegionKind::InnerTheorem1,
            MgPoint::new(s_f_max, cap - m * s_f_max),
        ),
        InnerKind::TimeShare => (RegionKind::InnerTimeShare, scheme1_corner(rho, rho_f, d)?),
    };
    Ok(MgRegion {
        kind: region_kind,
        rho,
        rho_f,
        d,
        m,
        cap,
        vertices: [MgPoint::new(0.0, cap), corner, MgPoint::new(s_f_max, 0.0)],
    })
}

pub fn outer_region(rho: f64, rho_f: f64, d: Delay) -> Result<MgRegion> {
    check_probability("rho_f", rho_f)?;
    let cap = slow_mg_cap(rho, d)?;
    let s_f_max = rho * rho_f / 2.0;
    Ok(MgRegion {
        kind: RegionKind::Outer,
        rho,
        rho_f,
        d,
        m: 1.0,
        cap,
        vertices: [
            MgPoint::new(0.0, cap),
            MgPoint::new(s_f_max, cap - s_f_max),
            MgPoint::new(s_f_max, 0.0),
        ],
    })
}

/// Half-plane membership test with slack `tol` on every constraint.
pub fn region_contains(region: &MgRegion, p: MgPoint, tol: f64) -> bool {
    let [top, corner, _] = region.vertices;
    let s_f_max = region.s_f_max();
    if p.s_f < -tol || p.s_s < -tol || p.s_f > s_f_max + tol {
        return false;
    }
    if s_f_max == 0.0 {
        return p.s_s <= top.s_s + tol;
    }
    let slope = (top.s_s - corner.s_s) / s_f_max;
    p.s_s + slope * p.s_f <= top.s_s + tol
}
