//! Network configuration, random activity sampling and the decomposition of
//! a realization into independent subnets.
//!
//! Users are labelled `1..=K` everywhere, including in serialized forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, invalid, Error, Result};

/// Parameters of one network instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    k: usize,
    rho: f64,
    rho_f: f64,
    d: u32,
    seed: u64,
}

impl NetworkConfig {
    pub fn new(k: usize, rho: f64, rho_f: f64, d: u32, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("K", "network needs at least one user"));
        }
        check_probability("rho", rho)?;
        check_probability("rho_f", rho_f)?;
        Ok(Self {
            k,
            rho,
            rho_f,
            d,
            seed,
        })
    }

    /// Number of Tx/Rx pairs.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Per-user activity probability.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Probability that an active user also carries a fast message.
    pub fn rho_f(&self) -> f64 {
        self.rho_f
    }

    /// Total number of cooperation rounds.
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// One draw of the activity and fast indicators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RealizationWire", into = "RealizationWire")]
pub struct ActivityRealization {
    active: Vec<bool>,
    fast: Vec<bool>,
}

impl ActivityRealization {
    /// Builds a realization, rejecting length mismatches and fast users that
    /// are not active.
    pub fn new(active: Vec<bool>, fast: Vec<bool>) -> Result<Self> {
        if active.len() != fast.len() {
            return Err(Error::MalformedRealization(format!(
                "active has {} entries but fast has {}",
                active.len(),
                fast.len()
            )));
        }
        if let Some(k) = (0..active.len()).find(|&i| fast[i] && !active[i]) {
            return Err(Error::MalformedRealization(format!(
                "user {} is fast but not active",
                k + 1
            )));
        }
        Ok(Self { active, fast })
    }

    /// Builds a realization of `k` users from 1-based lists of inactive and
    /// fast users.
    pub fn from_lists(k: usize, inactive: &[usize], fast: &[usize]) -> Result<Self> {
        let mut a = vec![true; k];
        let mut b = vec![false; k];
        for &i in inactive {
            if i == 0 || i > k {
                return Err(Error::IndexOutOfRange { index: i, k });
            }
            a[i - 1] = false;
        }
        for &i in fast {
            if i == 0 || i > k {
                return Err(Error::IndexOutOfRange { index: i, k });
            }
            b[i - 1] = true;
        }
        Self::new(a, b)
    }

    pub fn inactive(k: usize) -> Self {
        Self {
            active: vec![false; k],
            fast: vec![false; k],
        }
    }

    pub fn k(&self) -> usize {
        self.active.len()
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn fast(&self) -> &[bool] {
        &self.fast
    }

    /// `A_k` for a 1-based user index.
    pub fn is_active(&self, k: usize) -> bool {
        self.active[k - 1]
    }

    /// `B_k` for a 1-based user index (always false for inactive users).
    pub fn is_fast(&self, k: usize) -> bool {
        self.fast[k - 1]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn fast_count(&self) -> usize {
        self.fast.iter().filter(|&&b| b).count()
    }
}

#[derive(Serialize, Deserialize)]
struct RealizationWire {
    #[serde(rename = "K")]
    k: usize,
    active: Vec<u8>,
    fast: Vec<u8>,
}

impl From<ActivityRealization> for RealizationWire {
    fn from(r: ActivityRealization) -> Self {
        Self {
            k: r.k(),
            active: r.active.iter().map(|&a| a as u8).collect(),
            fast: r.fast.iter().map(|&b| b as u8).collect(),
        }
    }
}

impl TryFrom<RealizationWire> for ActivityRealization {
    type Error = Error;

    fn try_from(w: RealizationWire) -> Result<Self> {
        if w.active.len() != w.k || w.fast.len() != w.k {
            return Err(Error::MalformedRealization(format!(
                "K = {} but active has {} entries and fast has {}",
                w.k,
                w.active.len(),
                w.fast.len()
            )));
        }
        let bits = |name: &str, v: &[u8]| -> Result<Vec<bool>> {
            v.iter()
                .map(|&x| match x {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(Error::MalformedRealization(format!(
                        "{name} entries must be 0 or 1, got {other}"
                    ))),
                })
                .collect()
        };
        Self::new(bits("active", &w.active)?, bits("fast", &w.fast)?)
    }
}

/// A maximal run of consecutive active users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subnet {
    /// 1-based index of the first user.
    pub start: usize,
    #[serde(rename = "len")]
    pub length: usize,
}

impl Subnet {
    /// 1-based index of the last user.
    pub fn end(&self) -> usize {
        self.start + self.length - 1
    }

    pub fn users(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end()
    }
}

/// Subnets of a realization, in increasing order of start index.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubnetDecomposition {
    pub subnets: Vec<Subnet>,
}

impl SubnetDecomposition {
    pub fn iter(&self) -> std::slice::Iter<'_, Subnet> {
        self.subnets.iter()
    }

    pub fn len(&self) -> usize {
        self.subnets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subnets.is_empty()
    }

    /// Rebuilds the activity vector of a `k`-user network.
    pub fn to_activity(&self, k: usize) -> Vec<bool> {
        let mut a = vec![false; k];
        for s in &self.subnets {
            a[s.start - 1..s.start - 1 + s.length].fill(true);
        }
        a
    }
}

impl<'a> IntoIterator for &'a SubnetDecomposition {
    type Item = &'a Subnet;
    type IntoIter = std::slice::Iter<'a, Subnet>;

    fn into_iter(self) -> Self::IntoIter {
        self.subnets.iter()
    }
}

/// Draws realization number `trial_index` for `cfg`.
///
/// Each trial reads its own ChaCha stream selected by the trial index under
/// the master seed, so the result does not depend on which worker evaluates
/// it or in what order.
pub fn sample_activity(cfg: &NetworkConfig, trial_index: u64) -> ActivityRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial_index);
    let mut active = Vec::with_capacity(cfg.k);
    let mut fast = Vec::with_capacity(cfg.k);
    for _ in 0..cfg.k {
        let a = rng.random_bool(cfg.rho);
        let b = a && rng.random_bool(cfg.rho_f);
        active.push(a);
        fast.push(b);
    }
    ActivityRealization { active, fast }
}

/// Reference 20-user realization for the D = 6 scheduling walkthrough:
/// users 9, 12 and 13 are inactive and users 1, 3, 7, 11 and 15 carry fast
/// messages. Scheme 1 additionally silences users 8 and 20 in phase 1; those
/// two are active here.
pub fn fig5_realization() -> ActivityRealization {
    ActivityRealization::from_lists(20, &[9, 12, 13], &[1, 3, 7, 11, 15])
        .expect("static realization is well formed")
}

/// Splits the active users into maximal runs.
pub fn decompose_subnets(r: &ActivityRealization) -> SubnetDecomposition {
    let mut subnets = Vec::new();
    let mut run_start = None;
    for (i, &a) in r.active.iter().enumerate() {
        match (a, run_start) {
            (true, None) => run_start = Some(i + 1),
            (false, Some(start)) => {
                subnets.push(Subnet {
                    start,
                    length: i + 1 - start,
                });
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(start) = run_start {
        subnets.push(Subnet {
            start,
            length: r.k() + 1 - start,
        });
    }
    SubnetDecomposition { subnets }
}

/// Probability that a subnet starting at user `k` has length `ell`.
///
/// A subnet that reaches user `K` is cut by the network edge rather than by
/// an inactive user, hence the separate boundary branch.
pub fn subnet_length_pmf(ell: usize, k: usize, cfg: &NetworkConfig) -> Result<f64> {
    if k == 0 || k > cfg.k {
        return Err(Error::IndexOutOfRange { index: k, k: cfg.k });
    }
    Ok(length_pmf(ell, cfg.k - k + 1, cfg.rho))
}

/// `P_{ell,k}` with `room = K - k + 1` users available to the right.
pub(crate) fn length_pmf(ell: usize, room: usize, rho: f64) -> f64 {
    use std::cmp::Ordering;
    match ell.cmp(&room) {
        Ordering::Less => rho.powi(ell as i32) * (1.0 - rho),
        Ordering::Equal => rho.powi(ell as i32),
        Ordering::Greater => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_activity_never_activates() {
        let cfg = NetworkConfig::new(50, 0.0, 0.7, 4, 3).unwrap();
        for t in 0..10 {
            let r = sample_activity(&cfg, t);
            assert_eq!(r.active_count(), 0);
            assert_eq!(r.fast_count(), 0);
        }
    }

    #[test]
    fn full_activity_activates_everyone() {
        let cfg = NetworkConfig::new(50, 1.0, 1.0, 4, 3).unwrap();
        let r = sample_activity(&cfg, 17);
        assert!(r.active().iter().all(|&a| a));
        assert!(r.fast().iter().all(|&b| b));
    }

    #[test]
    fn activity_fraction_concentrates() {
        // sd of the 10^7-sample fraction is sqrt(0.16 / 1e7) ~ 1.3e-4
        let cfg = NetworkConfig::new(100_000, 0.8, 0.5, 4, 11).unwrap();
        let total: usize = (0..100)
            .map(|t| sample_activity(&cfg, t).active_count())
            .sum();
        let frac = total as f64 / 1e7;
        assert!((frac - 0.8).abs() < 0.01, "fraction {frac}");
    }

    #[test]
    fn sampling_is_deterministic_per_trial() {
        let cfg = NetworkConfig::new(300, 0.6, 0.4, 2, 99).unwrap();
        assert_eq!(sample_activity(&cfg, 5), sample_activity(&cfg, 5));
        assert_ne!(sample_activity(&cfg, 5), sample_activity(&cfg, 6));
    }

    #[test]
    fn config_rejects_bad_parameters() {
        assert!(NetworkConfig::new(0, 0.5, 0.5, 2, 0).is_err());
        assert!(NetworkConfig::new(4, 1.5, 0.5, 2, 0).is_err());
        assert!(NetworkConfig::new(4, 0.5, -0.1, 2, 0).is_err());
        assert!(NetworkConfig::new(4, f64::NAN, 0.5, 2, 0).is_err());
    }

    #[test]
    fn fig5_subnets() {
        let d = decompose_subnets(&fig5_realization());
        let got: Vec<_> = d.iter().map(|s| (s.start, s.length)).collect();
        assert_eq!(got, vec![(1, 8), (10, 2), (14, 7)]);
    }

    #[test]
    fn trivial_decompositions() {
        assert!(decompose_subnets(&ActivityRealization::inactive(9)).is_empty());
        let all = ActivityRealization::new(vec![true; 7], vec![false; 7]).unwrap();
        assert_eq!(
            decompose_subnets(&all).subnets,
            vec![Subnet {
                start: 1,
                length: 7
            }]
        );
    }

    #[test]
    fn pmf_examples() {
        let cfg = NetworkConfig::new(20, 0.5, 0.5, 4, 0).unwrap();
        assert_eq!(subnet_length_pmf(2, 1, &cfg).unwrap(), 0.125);
        assert_eq!(subnet_length_pmf(5, 16, &cfg).unwrap(), 0.03125);
        assert_eq!(subnet_length_pmf(25, 1, &cfg).unwrap(), 0.0);
        assert!(matches!(
            subnet_length_pmf(1, 21, &cfg),
            Err(Error::IndexOutOfRange { index: 21, k: 20 })
        ));
        assert!(subnet_length_pmf(1, 0, &cfg).is_err());
    }

    #[test]
    fn realization_rejects_fast_inactive_user() {
        assert!(ActivityRealization::new(vec![true, false], vec![false, true]).is_err());
        assert!(ActivityRealization::new(vec![true], vec![false, false]).is_err());
    }

    #[test]
    fn realization_json_shape() {
        let r = ActivityRealization::from_lists(4, &[2], &[3]).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"K":4,"active":[1,0,1,1],"fast":[0,0,1,0]}"#);
        let back: ActivityRealization = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let bad = r#"{"K":2,"active":[0,1],"fast":[1,0]}"#;
        assert!(serde_json::from_str::<ActivityRealization>(bad).is_err());
        let bad_len = r#"{"K":3,"active":[0,1],"fast":[0,0]}"#;
        assert!(serde_json::from_str::<ActivityRealization>(bad_len).is_err());
    }

    #[test]
    fn subnet_json_shape() {
        let d = decompose_subnets(&fig5_realization());
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(
            s,
            r#"[{"start":1,"len":8},{"start":10,"len":2},{"start":14,"len":7}]"#
        );
    }

    proptest! {
        #[test]
        fn decomposition_reconstructs_activity(bits in prop::collection::vec(any::<bool>(), 1..200)) {
            let k = bits.len();
            let r = ActivityRealization::new(bits.clone(), vec![false; k]).unwrap();
            let d = decompose_subnets(&r);
            prop_assert_eq!(d.to_activity(k), bits.clone());
            for s in &d {
                prop_assert!(s.start == 1 || !bits[s.start - 2]);
                prop_assert!(s.end() == k || !bits[s.end()]);
            }
            let json = serde_json::to_string(&d).unwrap();
            let back: SubnetDecomposition = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, d);
        }

        #[test]
        fn sampled_fast_users_are_active(seed in any::<u64>(), t in any::<u64>(), rho in 0.0..=1.0f64, rho_f in 0.0..=1.0f64) {
            let cfg = NetworkConfig::new(64, rho, rho_f, 2, seed).unwrap();
            let r = sample_activity(&cfg, t);
            for i in 1..=64 {
                prop_assert!(!r.is_fast(i) || r.is_active(i));
            }
        }

        #[test]
        fn pmf_sums_to_one(k_total in 1usize..60, rho in 0.0..=1.0f64, frac in 0.0..1.0f64) {
            let cfg = NetworkConfig::new(k_total, rho, 0.5, 2, 0).unwrap();
            let k = 1 + (frac * k_total as f64) as usize;
            let k = k.min(k_total);
            let total: f64 = (0..=k_total - k + 1)
                .map(|ell| subnet_length_pmf(ell, k, &cfg).unwrap())
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
