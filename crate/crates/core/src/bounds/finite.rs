//! Exact expectations of the per-user MG pair for a finite network.
//!
//! Two independent routes: [`exact_expectation`] enumerates every activity
//! and fast pattern and runs the scheduler on each, while
//! [`finite_k_expectation`] sums the subnet-length distribution directly.

use rayon::prelude::*;

use super::MgPoint;
use crate::error::{Error, Result};
use crate::model::{length_pmf, ActivityRealization, NetworkConfig};
use crate::numeric::pairwise_sum;
use crate::scheduler::{
    check_scheme1_budget, realization_mg, scheme1_subnet_sum, subnet_cap, Scheme,
};

/// Largest `K` accepted by [`exact_expectation`] (3^14 patterns).
pub const MAX_ENUMERATION_K: usize = 14;

/// Expected `(fast_sum / K, slow_sum / K)` by exhaustive enumeration over
/// all `3^K` patterns (inactive, active slow, active fast per user).
pub fn exact_expectation(cfg: &NetworkConfig, scheme: Scheme) -> Result<MgPoint> {
    let k = cfg.k();
    if k > MAX_ENUMERATION_K {
        return Err(Error::EnumerationTooLarge {
            k,
            max: MAX_ENUMERATION_K,
        });
    }
    if scheme == Scheme::One {
        check_scheme1_budget(cfg.d())?;
    }
    let weights = [
        1.0 - cfg.rho(),
        cfg.rho() * (1.0 - cfg.rho_f()),
        cfg.rho() * cfg.rho_f(),
    ];
    let total = 3u64.pow(k as u32);
    // Fixed chunking keeps the summation order independent of the thread pool.
    let chunk = 3u64.pow(k.saturating_sub(6) as u32);
    let partials: Vec<(f64, f64)> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| -> Result<(f64, f64)> {
            let mut fast = Vec::with_capacity(chunk as usize);
            let mut slow = Vec::with_capacity(chunk as usize);
            for code in c * chunk..((c + 1) * chunk).min(total) {
                let (r, w) = decode(code, k, &weights);
                if w == 0.0 {
                    continue;
                }
                let mg = realization_mg(&r, cfg.d(), scheme)?;
                fast.push(w * mg.fast_sum);
                slow.push(w * mg.slow_sum);
            }
            Ok((pairwise_sum(&fast), pairwise_sum(&slow)))
        })
        .collect::<Result<_>>()?;
    let (f, s): (Vec<f64>, Vec<f64>) = partials.into_iter().unzip();
    let kf = k as f64;
    Ok(MgPoint::new(pairwise_sum(&f) / kf, pairwise_sum(&s) / kf))
}

/// Base-3 digit `i` of `code` is user `i + 1`'s state.
fn decode(mut code: u64, k: usize, weights: &[f64; 3]) -> (ActivityRealization, f64) {
    let mut active = Vec::with_capacity(k);
    let mut fast = Vec::with_capacity(k);
    let mut w = 1.0;
    for _ in 0..k {
        let digit = (code % 3) as usize;
        code /= 3;
        active.push(digit > 0);
        fast.push(digit == 2);
        w *= weights[digit];
    }
    let r = ActivityRealization::new(active, fast).expect("fast implies active by construction");
    (r, w)
}

/// Expected per-user MG pair from the subnet-length distribution:
/// `(1/K) sum_k sum_l Pr[A_{k-1} = 0] P_{l,k} S(l)`, with `A_0 = 0`.
///
/// For Scheme 1, `S(l)` is the two-phase average: the phase matching the
/// first user's parity always takes pattern A, and the other phase takes
/// pattern A with probability `(1-rho_f)^floor(l/2)`.
pub fn finite_k_expectation(cfg: &NetworkConfig, scheme: Scheme) -> Result<MgPoint> {
    let (k, rho, rho_f, d) = (cfg.k(), cfg.rho(), cfg.rho_f(), cfg.d());
    if scheme == Scheme::One {
        check_scheme1_budget(d)?;
    }
    let q = 1.0 - rho_f;
    let per_length: Vec<f64> = (0..=k)
        .map(|l| match (l, scheme) {
            (0, _) => 0.0,
            (_, Scheme::Two) => subnet_cap(l, d) as f64,
            (_, Scheme::One) => {
                let p_a = q.powi((l / 2) as i32);
                let a = scheme1_subnet_sum(l, true, d) as f64;
                let b = scheme1_subnet_sum(l, false, d) as f64;
                a * (0.5 + p_a / 2.0) + b * (1.0 - p_a) / 2.0
            }
        })
        .collect();
    // prefix[n] = sum_{l=1}^{n} rho^l (1 - rho) S(l), the interior-subnet part.
    let mut prefix = vec![0.0; k + 1];
    for l in 1..=k {
        prefix[l] = prefix[l - 1] + length_pmf(l, l + 1, rho) * per_length[l];
    }
    let terms: Vec<f64> = (1..=k)
        .map(|start| {
            let prev_inactive = if start == 1 { 1.0 } else { 1.0 - rho };
            let room = k - start + 1;
            let edge = length_pmf(room, room, rho) * per_length[room];
            prev_inactive * (prefix[room - 1] + edge)
        })
        .collect();
    let total = pairwise_sum(&terms) / k as f64;
    let s_f = match scheme {
        Scheme::One => rho * rho_f / 2.0,
        Scheme::Two => 0.0,
    };
    Ok(MgPoint::new(s_f, total - s_f))
}
