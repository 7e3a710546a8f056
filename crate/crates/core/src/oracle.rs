//! Brute-force truncated sums used to check the closed forms.
//!
//! Each function evaluates the defining series term by term, starting at
//! `l = 1` and stopping after `terms` terms. None of them shares code with
//! the closed forms in [`crate::bounds`].

/// `sum_{x=1}^{terms} x c^x`.
pub fn truncated_sum_xcx(c: f64, terms: u64) -> f64 {
    let mut acc = 0.0;
    let mut cx = 1.0;
    for x in 1..=terms {
        cx *= c;
        acc += x as f64 * cx;
    }
    acc
}

/// `sum_{x=0}^{n} c^x`, summed directly.
pub fn direct_geometric(c: f64, n: u64) -> f64 {
    let mut acc = 0.0;
    let mut cx = 1.0;
    for _ in 0..=n {
        acc += cx;
        cx *= c;
    }
    acc
}

/// Visits `(l, rho^l, q^floor(l/2))` for `l = 1..=terms`.
fn for_each_term(rho: f64, q: f64, terms: u64, mut f: impl FnMut(u64, f64, f64)) {
    let mut rl = 1.0;
    let mut qm = 1.0;
    for l in 1..=terms {
        rl *= rho;
        if l % 2 == 0 {
            qm *= q;
        }
        f(l, rl, qm);
    }
}

/// `sum_l rho^l floor(l/(D+2)) (1 + (1-rho_f)^floor(l/2))`.
pub fn truncated_second_sum(rho: f64, rho_f: f64, d: u32, terms: u64) -> f64 {
    let p = d as u64 + 2;
    let mut acc = 0.0;
    for_each_term(rho, 1.0 - rho_f, terms, |l, rl, qm| {
        acc += rl * (l / p) as f64 * (1.0 + qm);
    });
    acc
}

/// `sum_l rho^l floor((l+1)/(D+2)) (1 - (1-rho_f)^floor(l/2))`.
pub fn truncated_third_sum(rho: f64, rho_f: f64, d: u32, terms: u64) -> f64 {
    let p = d as u64 + 2;
    let mut acc = 0.0;
    for_each_term(rho, 1.0 - rho_f, terms, |l, rl, qm| {
        acc += rl * ((l + 1) / p) as f64 * (1.0 - qm);
    });
    acc
}

/// Large-`K` slow MG of Scheme 1 summed over subnet lengths:
/// `sum_l (1-rho)^2 rho^l E[scheduled in length-l subnet] - rho rho_f / 2`.
///
/// A subnet of length `l` keeps `l - floor(l/(D+2))` users in the phase
/// matching its first user's parity. In the other phase it keeps the same
/// count when none of its `floor(l/2)` opposite-parity users is fast, and
/// `l - 1 - floor((l-D-1)/(D+2))` otherwise.
pub fn truncated_scheme1_slow(rho: f64, rho_f: f64, d: u32, terms: u64) -> f64 {
    let p = d as i64 + 2;
    let mut acc = 0.0;
    for_each_term(rho, 1.0 - rho_f, terms, |l, rl, qm| {
        let l = l as i64;
        let keep_a = (l - l.div_euclid(p)) as f64;
        let keep_b = (l - 1 - (l - d as i64 - 1).div_euclid(p)) as f64;
        let per_subnet = 0.5 * keep_a + 0.5 * (qm * keep_a + (1.0 - qm) * keep_b);
        acc += rl * per_subnet;
    });
    (1.0 - rho) * (1.0 - rho) * acc - rho * rho_f / 2.0
}

/// Large-`K` slow MG of Scheme 2: `sum_l (1-rho)^2 rho^l (l - floor(l/(D+2)))`.
pub fn truncated_scheme2_slow(rho: f64, d: u32, terms: u64) -> f64 {
    let p = d as u64 + 2;
    let mut acc = 0.0;
    for_each_term(rho, 1.0, terms, |l, rl, _| {
        acc += rl * (l - l / p) as f64;
    });
    (1.0 - rho) * (1.0 - rho) * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_hand_sums() {
        // 1*0.5 + 2*0.25 + 3*0.125
        assert_eq!(truncated_sum_xcx(0.5, 3), 1.375);
        assert_eq!(direct_geometric(0.5, 3), 1.875);
        // D = 0: l = 2 -> floor(2/2) = 1, q^1 = 0.5; l = 3 -> 1, q^1
        let s = truncated_second_sum(0.5, 0.5, 0, 3);
        assert!((s - (0.25 * 1.5 + 0.125 * 1.5)).abs() < 1e-15);
    }
}
