//! Per-realization scheduling for the two transmission schemes.
//!
//! Scheme 1 runs two equally long phases. Phase 1 lets odd-indexed fast users
//! send their fast message, phase 2 the even-indexed ones, and every other
//! active user sends slow data. Scheme 2 is a single slow-only phase. In both
//! schemes a subnet is cut into segments of at most `D + 1` users by
//! silencing every `(D + 2)`-th user, starting from an offset chosen by the
//! pattern rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{decompose_subnets, ActivityRealization, Subnet};

/// Phase of Scheme 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum PhaseId {
    /// Serves fast users with odd index.
    One,
    /// Serves fast users with even index.
    Two,
}

impl PhaseId {
    pub const BOTH: [PhaseId; 2] = [PhaseId::One, PhaseId::Two];

    pub fn new(value: u8) -> Result<Self> {
        match value {
            1 => Ok(PhaseId::One),
            2 => Ok(PhaseId::Two),
            other => Err(crate::error::invalid(
                "phase",
                format!("must be 1 or 2, got {other}"),
            )),
        }
    }

    pub fn value(self) -> u8 {
        match self {
            PhaseId::One => 1,
            PhaseId::Two => 2,
        }
    }

    /// Whether user `k` (1-based) belongs to this phase's parity group.
    pub fn contains(self, k: usize) -> bool {
        match self {
            PhaseId::One => k % 2 == 1,
            PhaseId::Two => k.is_multiple_of(2),
        }
    }
}

impl From<PhaseId> for u8 {
    fn from(p: PhaseId) -> u8 {
        p.value()
    }
}

impl TryFrom<u8> for PhaseId {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        PhaseId::new(v)
    }
}

/// Which transmission scheme to schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Scheme {
    /// Two phases carrying fast and slow traffic.
    One,
    /// One slow-only phase.
    Two,
}

impl From<Scheme> for u8 {
    fn from(s: Scheme) -> u8 {
        match s {
            Scheme::One => 1,
            Scheme::Two => 2,
        }
    }
}

impl TryFrom<u8> for Scheme {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Scheme::One),
            2 => Ok(Scheme::Two),
            other => Err(crate::error::invalid(
                "scheme",
                format!("must be 1 or 2, got {other}"),
            )),
        }
    }
}

/// Transmission state of one user during one phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserState {
    Inactive,
    Silenced,
    Fast,
    Slow,
    /// Slow user at either end of a segment; it uses the fast-style coding
    /// but counts like any other slow user.
    SlowEdge,
}

impl UserState {
    /// Active and not silenced.
    pub fn is_scheduled(self) -> bool {
        matches!(
            self,
            UserState::Fast | UserState::Slow | UserState::SlowEdge
        )
    }
}

/// Silencing pattern applied to a subnet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pattern {
    /// Silence offsets `c (D + 2)` from the subnet start.
    A,
    /// Silence offset `D + 1` and every `D + 2` after it.
    B,
    /// No choice made (Scheme 2); silences like [`Pattern::A`].
    #[serde(rename = "none")]
    None,
}

/// Rule deciding between patterns A and B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PatternCondition {
    /// Pattern A when the subnet's first user is in the phase's parity group,
    /// or when the subnet holds no fast user of that group.
    #[default]
    Display,
    /// Pattern A when the subnet's first user is itself a fast user of the
    /// phase, or when the subnet holds no fast user of that group.
    Prose,
}

/// Pattern tag recorded for one subnet of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubnetPattern {
    pub start: usize,
    #[serde(rename = "len")]
    pub length: usize,
    pub pattern: Pattern,
}

/// States of all users during one phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleWire", into = "ScheduleWire")]
pub struct PhaseSchedule {
    /// `None` for the single phase of Scheme 2.
    pub phase: Option<PhaseId>,
    /// Indexed by user `k - 1`.
    pub states: Vec<UserState>,
    pub subnets: Vec<SubnetPattern>,
}

impl PhaseSchedule {
    pub fn state(&self, k: usize) -> UserState {
        self.states[k - 1]
    }

    /// 1-based indices of users in `state`.
    pub fn users_in(&self, state: UserState) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == state)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn count(&self, state: UserState) -> usize {
        self.states.iter().filter(|&&s| s == state).count()
    }

    /// Number of active, non-silenced users.
    pub fn scheduled_count(&self) -> usize {
        self.states.iter().filter(|s| s.is_scheduled()).count()
    }

    /// Number of active, non-silenced users inside `subnet`.
    pub fn scheduled_in(&self, subnet: &Subnet) -> usize {
        subnet
            .users()
            .filter(|&k| self.state(k).is_scheduled())
            .count()
    }
}

#[derive(Serialize, Deserialize)]
struct UserRecord {
    k: usize,
    state: UserState,
}

#[derive(Serialize, Deserialize)]
struct ScheduleWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase: Option<PhaseId>,
    users: Vec<UserRecord>,
    subnets: Vec<SubnetPattern>,
}

impl From<PhaseSchedule> for ScheduleWire {
    fn from(s: PhaseSchedule) -> Self {
        Self {
            phase: s.phase,
            users: s
                .states
                .iter()
                .enumerate()
                .map(|(i, &state)| UserRecord { k: i + 1, state })
                .collect(),
            subnets: s.subnets,
        }
    }
}

impl TryFrom<ScheduleWire> for PhaseSchedule {
    type Error = Error;

    fn try_from(w: ScheduleWire) -> Result<Self> {
        let mut states = Vec::with_capacity(w.users.len());
        for (i, rec) in w.users.into_iter().enumerate() {
            if rec.k != i + 1 {
                return Err(Error::MalformedRealization(format!(
                    "schedule record {} has k = {}",
                    i + 1,
                    rec.k
                )));
            }
            states.push(rec.state);
        }
        Ok(Self {
            phase: w.phase,
            states,
            subnets: w.subnets,
        })
    }
}

/// Per-realization MG sums, before normalization by `K`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RealizationMg {
    pub fast_sum: f64,
    pub slow_sum: f64,
}

impl RealizationMg {
    pub fn total(&self) -> f64 {
        self.fast_sum + self.slow_sum
    }
}

/// Scheme 1 spends one Tx round and at least one Rx round, and its parity
/// argument needs an even budget.
pub fn check_scheme1_budget(d: u32) -> Result<()> {
    if d >= 2 && d.is_multiple_of(2) {
        Ok(())
    } else {
        Err(Error::Scheme1Budget(d))
    }
}

/// Pattern chosen for `subnet` in `phase` under the default condition.
pub fn pattern_for(
    subnet: &Subnet,
    phase: PhaseId,
    r: &ActivityRealization,
    d: u32,
) -> Result<Pattern> {
    pattern_for_with(subnet, phase, r, d, PatternCondition::Display)
}

pub fn pattern_for_with(
    subnet: &Subnet,
    phase: PhaseId,
    r: &ActivityRealization,
    d: u32,
    condition: PatternCondition,
) -> Result<Pattern> {
    check_scheme1_budget(d)?;
    Ok(choose_pattern(subnet, phase, r, condition))
}

fn choose_pattern(
    subnet: &Subnet,
    phase: PhaseId,
    r: &ActivityRealization,
    condition: PatternCondition,
) -> Pattern {
    let first = subnet.start;
    let first_ok = match condition {
        PatternCondition::Display => phase.contains(first),
        PatternCondition::Prose => phase.contains(first) && r.is_fast(first),
    };
    let no_phase_fast = !subnet.users().any(|k| phase.contains(k) && r.is_fast(k));
    if first_ok || no_phase_fast {
        Pattern::A
    } else {
        Pattern::B
    }
}

/// 1-based indices silenced by `pattern` inside `subnet`.
pub fn silenced_users(subnet: &Subnet, pattern: Pattern, d: u32) -> Vec<usize> {
    let period = d as usize + 2;
    let base = subnet.start - 1;
    let ell = subnet.length;
    match pattern {
        Pattern::A | Pattern::None => (1..=ell / period).map(|c| base + c * period).collect(),
        Pattern::B => {
            let first = d as usize + 1;
            if ell < first {
                Vec::new()
            } else {
                (0..=(ell - first) / period)
                    .map(|c| base + first + c * period)
                    .collect()
            }
        }
    }
}

fn fill_subnet(
    states: &mut [UserState],
    subnet: &Subnet,
    silenced: &[usize],
    phase: Option<PhaseId>,
    r: &ActivityRealization,
) {
    for k in subnet.users() {
        states[k - 1] = match phase {
            Some(p) if p.contains(k) && r.is_fast(k) => UserState::Fast,
            _ => UserState::Slow,
        };
    }
    for &k in silenced {
        states[k - 1] = UserState::Silenced;
    }
    if phase.is_none() {
        return;
    }
    // Segment ends switch to fast-style coding.
    let mut k = subnet.start;
    while k <= subnet.end() {
        if states[k - 1] == UserState::Silenced {
            k += 1;
            continue;
        }
        let seg_start = k;
        while k <= subnet.end() && states[k - 1] != UserState::Silenced {
            k += 1;
        }
        for edge in [seg_start, k - 1] {
            if states[edge - 1] == UserState::Slow {
                states[edge - 1] = UserState::SlowEdge;
            }
        }
    }
}

fn schedule_phase(
    r: &ActivityRealization,
    d: u32,
    phase: PhaseId,
    condition: PatternCondition,
) -> PhaseSchedule {
    let mut states = vec![UserState::Inactive; r.k()];
    let mut subnets = Vec::new();
    for subnet in &decompose_subnets(r) {
        let pattern = choose_pattern(subnet, phase, r, condition);
        let silenced = silenced_users(subnet, pattern, d);
        fill_subnet(&mut states, subnet, &silenced, Some(phase), r);
        subnets.push(SubnetPattern {
            start: subnet.start,
            length: subnet.length,
            pattern,
        });
    }
    PhaseSchedule {
        phase: Some(phase),
        states,
        subnets,
    }
}

/// Both phase schedules of Scheme 1.
pub fn schedule_scheme1(r: &ActivityRealization, d: u32) -> Result<(PhaseSchedule, PhaseSchedule)> {
    schedule_scheme1_with(r, d, PatternCondition::Display)
}

pub fn schedule_scheme1_with(
    r: &ActivityRealization,
    d: u32,
    condition: PatternCondition,
) -> Result<(PhaseSchedule, PhaseSchedule)> {
    check_scheme1_budget(d)?;
    Ok((
        schedule_phase(r, d, PhaseId::One, condition),
        schedule_phase(r, d, PhaseId::Two, condition),
    ))
}

/// The single slow-only phase of Scheme 2. Any `D >= 0` is accepted.
pub fn schedule_scheme2(r: &ActivityRealization, d: u32) -> PhaseSchedule {
    let mut states = vec![UserState::Inactive; r.k()];
    let mut subnets = Vec::new();
    for subnet in &decompose_subnets(r) {
        let silenced = silenced_users(subnet, Pattern::None, d);
        fill_subnet(&mut states, subnet, &silenced, None, r);
        subnets.push(SubnetPattern {
            start: subnet.start,
            length: subnet.length,
            pattern: Pattern::None,
        });
    }
    PhaseSchedule {
        phase: None,
        states,
        subnets,
    }
}

/// Number of users Scheme 1 schedules in a subnet of length `ell`, for
/// pattern A (`condition_a`) or pattern B.
pub fn scheme1_subnet_sum(ell: usize, condition_a: bool, d: u32) -> usize {
    let period = d as i64 + 2;
    let ell_i = ell as i64;
    let kept = if condition_a {
        ell_i - ell_i.div_euclid(period)
    } else {
        ell_i - 1 - (ell_i - d as i64 - 1).div_euclid(period)
    };
    kept as usize
}

/// Converse cap `ell - floor(ell / (D + 2))` for one subnet.
pub fn subnet_cap(ell: usize, d: u32) -> usize {
    ell - ell / (d as usize + 2)
}

pub fn realization_mg(r: &ActivityRealization, d: u32, scheme: Scheme) -> Result<RealizationMg> {
    realization_mg_with(r, d, scheme, PatternCondition::Display)
}

/// MG sums of one realization. A scheduled user contributes one unit per
/// phase, weighted by the phase length (1/2 in Scheme 1, 1 in Scheme 2).
pub fn realization_mg_with(
    r: &ActivityRealization,
    d: u32,
    scheme: Scheme,
    condition: PatternCondition,
) -> Result<RealizationMg> {
    match scheme {
        Scheme::One => {
            let (p1, p2) = schedule_scheme1_with(r, d, condition)?;
            let total = 0.5 * (p1.scheduled_count() + p2.scheduled_count()) as f64;
            let fast_sum = 0.5 * (p1.count(UserState::Fast) + p2.count(UserState::Fast)) as f64;
            Ok(RealizationMg {
                fast_sum,
                slow_sum: total - fast_sum,
            })
        }
        Scheme::Two => Ok(RealizationMg {
            fast_sum: 0.0,
            slow_sum: schedule_scheme2(r, d).scheduled_count() as f64,
        }),
    }
}

/// Largest sum MG any scheme with budget `D` can reach on this realization.
pub fn converse_sum_bound(r: &ActivityRealization, d: u32) -> usize {
    decompose_subnets(r)
        .iter()
        .map(|s| subnet_cap(s.length, d))
        .sum()
}
