//! Mixed-delay multiplexing-gain (MG) regions of Wyner's soft-handoff
//! linear network when users are active at random.
//!
//! Each user is active with probability `rho`; an active user carries
//! delay-sensitive ("fast") traffic with probability `rho_f` and
//! delay-tolerant ("slow") traffic otherwise. Fast messages must be decoded
//! without cooperation, slow messages may use `D` cooperation rounds.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod numeric;
pub mod oracle;
pub mod scheduler;
pub mod verify;

pub use bounds::{
    compute_m, inner_region, outer_region, region_contains, slow_mg_cap, Delay, InnerKind, MgPoint,
    MgRegion, RegionKind,
};
pub use error::{Error, Result};
pub use model::{decompose_subnets, sample_activity, ActivityRealization, NetworkConfig, Subnet};
pub use montecarlo::{estimate_mg, MgEstimate};
pub use scheduler::{
    schedule_scheme1, schedule_scheme2, PhaseId, PhaseSchedule, Scheme, UserState,
};
