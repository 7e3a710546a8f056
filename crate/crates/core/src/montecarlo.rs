//! Monte Carlo estimation of the per-user MG pair of either scheme.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    compute_m, finite_k_expectation, scheme1_corner, scheme1_expected_corner, scheme2_point,
    slow_mg_cap, Delay, MgPoint,
};
use crate::error::{Error, Result};
use crate::model::{sample_activity, NetworkConfig};
use crate::numeric::mean_and_stderr;
use crate::scheduler::{
    check_scheme1_budget, converse_sum_bound, realization_mg_with, PatternCondition, Scheme,
};

/// Sample mean of `(fast_sum / K, slow_sum / K)` over independent trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "EstimateWire", into = "EstimateWire")]
pub struct MgEstimate {
    pub point: MgPoint,
    /// `None` when fewer than two trials were run.
    pub stderr_f: Option<f64>,
    pub stderr_s: Option<f64>,
    pub n_trials: u64,
    pub k: usize,
    pub scheme: Scheme,
    pub seed: u64,
    /// Large-`K` closed-form value of the scheme, when one exists.
    pub target: Option<MgPoint>,
}

impl MgEstimate {
    /// Whether `value` lies within `sigmas` standard errors plus `slack` of
    /// the slow estimate.
    pub fn slow_within(&self, value: f64, sigmas: f64, slack: f64) -> bool {
        let se = self.stderr_s.unwrap_or(0.0);
        (self.point.s_s - value).abs() <= sigmas * se + slack
    }

    pub fn fast_within(&self, value: f64, sigmas: f64, slack: f64) -> bool {
        let se = self.stderr_f.unwrap_or(0.0);
        (self.point.s_f - value).abs() <= sigmas * se + slack
    }
}

#[derive(Serialize, Deserialize)]
struct EstimateWire {
    scheme: Scheme,
    #[serde(rename = "K")]
    k: usize,
    n_trials: u64,
    seed: u64,
    s_f: f64,
    s_s: f64,
    stderr_f: Option<f64>,
    stderr_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target_s_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target_s_f: Option<f64>,
}

impl From<MgEstimate> for EstimateWire {
    fn from(e: MgEstimate) -> Self {
        Self {
            scheme: e.scheme,
            k: e.k,
            n_trials: e.n_trials,
            seed: e.seed,
            s_f: e.point.s_f,
            s_s: e.point.s_s,
            stderr_f: e.stderr_f,
            stderr_s: e.stderr_s,
            target_s_s: e.target.map(|t| t.s_s),
            target_s_f: e.target.map(|t| t.s_f),
        }
    }
}

impl From<EstimateWire> for MgEstimate {
    fn from(w: EstimateWire) -> Self {
        let target = match (w.target_s_f, w.target_s_s) {
            (Some(f), Some(s)) => Some(MgPoint::new(f, s)),
            _ => None,
        };
        Self {
            point: MgPoint::new(w.s_f, w.s_s),
            stderr_f: w.stderr_f,
            stderr_s: w.stderr_s,
            n_trials: w.n_trials,
            k: w.k,
            scheme: w.scheme,
            seed: w.seed,
            target,
        }
    }
}

/// Large-`K` closed form attached to an estimate as its target.
pub fn closed_form_target(cfg: &NetworkConfig, scheme: Scheme) -> Option<MgPoint> {
    let d = Delay::Finite(cfg.d());
    match scheme {
        Scheme::One => scheme1_corner(cfg.rho(), cfg.rho_f(), d).ok(),
        Scheme::Two => scheme2_point(cfg.rho(), d).ok(),
    }
}

pub fn estimate_mg(cfg: &NetworkConfig, scheme: Scheme, n_trials: u64) -> Result<MgEstimate> {
    estimate_mg_with(cfg, scheme, n_trials, PatternCondition::Display)
}

/// Runs `n_trials` trials in parallel. Trial `t` always draws from stream
/// `t` of the configured seed and results are reduced in trial order, so the
/// estimate is identical for any thread count.
pub fn estimate_mg_with(
    cfg: &NetworkConfig,
    scheme: Scheme,
    n_trials: u64,
    condition: PatternCondition,
) -> Result<MgEstimate> {
    if n_trials == 0 {
        return Err(crate::error::invalid("n_trials", "must be at least 1"));
    }
    if scheme == Scheme::One {
        check_scheme1_budget(cfg.d())?;
    }
    let k = cfg.k() as f64;
    let samples: Vec<(f64, f64)> = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let r = sample_activity(cfg, t);
            let mg = realization_mg_with(&r, cfg.d(), scheme, condition)?;
            let bound = converse_sum_bound(&r, cfg.d());
            if mg.total() > bound as f64 {
                return Err(Error::ConverseViolation {
                    trial: t,
                    achieved: mg.total(),
                    bound,
                });
            }
            Ok((mg.fast_sum / k, mg.slow_sum / k))
        })
        .collect::<Result<_>>()?;
    let (fast, slow): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    let (s_f, stderr_f) = mean_and_stderr(&fast);
    let (s_s, stderr_s) = mean_and_stderr(&slow);
    Ok(MgEstimate {
        point: MgPoint::new(s_f, s_s),
        stderr_f,
        stderr_s,
        n_trials,
        k: cfg.k(),
        scheme,
        seed: cfg.seed(),
        target: closed_form_target(cfg, scheme),
    })
}

/// Closed-form slow-MG values a Scheme 1 estimate can be compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateValues {
    /// Corner used for the reference region plots.
    pub scheme1_corner: f64,
    /// Corner reassembled from the three-sum expansion.
    pub scheme1_expected_corner: f64,
    /// Corner of the linear inner bound, `cap - M rho rho_f / 2`.
    pub theorem1_corner: Option<f64>,
    /// Exact expectation at the simulated `K`.
    pub finite_k: f64,
}

impl CandidateValues {
    fn named(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![
            ("scheme1_corner", self.scheme1_corner),
            ("scheme1_expected_corner", self.scheme1_expected_corner),
            ("finite_k", self.finite_k),
        ];
        if let Some(t) = self.theorem1_corner {
            v.push(("theorem1_corner", t));
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub estimate: MgEstimate,
    /// Candidates within three standard errors of the slow estimate.
    pub supports: Vec<String>,
}

/// Scheme 1 simulated under both pattern conditions, side by side with the
/// competing closed-form corners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub rho: f64,
    pub rho_f: f64,
    #[serde(rename = "D")]
    pub d: u32,
    #[serde(rename = "K")]
    pub k: usize,
    pub n_trials: u64,
    pub seed: u64,
    pub candidates: CandidateValues,
    pub display: ConditionResult,
    pub prose: ConditionResult,
}

pub fn discrepancy_report(
    rho: f64,
    rho_f: f64,
    d: u32,
    k: usize,
    n_trials: u64,
    seed: u64,
) -> Result<DiscrepancyReport> {
    check_scheme1_budget(d)?;
    let cfg = NetworkConfig::new(k, rho, rho_f, d, seed)?;
    let delay = Delay::Finite(d);
    let theorem1_corner = compute_m(rho, rho_f, delay)
        .and_then(|m| Ok(slow_mg_cap(rho, delay)? - m * rho * rho_f / 2.0))
        .ok();
    let candidates = CandidateValues {
        scheme1_corner: scheme1_corner(rho, rho_f, delay)?.s_s,
        scheme1_expected_corner: scheme1_expected_corner(rho, rho_f, delay)?.s_s,
        theorem1_corner,
        finite_k: finite_k_expectation(&cfg, Scheme::One)?.s_s,
    };
    let run = |condition| -> Result<ConditionResult> {
        let estimate = estimate_mg_with(&cfg, Scheme::One, n_trials, condition)?;
        let supports = candidates
            .named()
            .into_iter()
            .filter(|&(_, v)| estimate.slow_within(v, 3.0, 0.0))
            .map(|(name, _)| name.to_string())
            .collect();
        Ok(ConditionResult { estimate, supports })
    };
    Ok(DiscrepancyReport {
        rho,
        rho_f,
        d,
        k,
        n_trials,
        seed,
        display: run(PatternCondition::Display)?,
        prose: run(PatternCondition::Prose)?,
        candidates,
    })
}
