//! Limits on exhaustive work. Every enumeration checks its count against
//! the matching guard up front and refuses with
//! [`Error::GuardExceeded`](crate::Error::GuardExceeded) instead of
//! truncating.

use serde::{Deserialize, Serialize};

use crate::rules::DEFAULT_RP_AGENT_CAP;

pub const DEFAULT_CASE_GUARD: u64 = 1_000_000;
/// Orders over more objects than this are not enumerated as misreports.
pub const DEFAULT_ORDER_GUARD: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guards {
    /// Preference profiles in a sweep.
    pub profiles: u64,
    /// Discrete assignments enumerated for ex-post checks.
    pub discrete: u64,
    /// Largest `m` for which all `m!` misreports are enumerated.
    pub order_objects: usize,
    /// Joint misreports of a coalition.
    pub joint: u64,
    /// Largest `n` for exact random priority.
    pub rp_agents: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            profiles: DEFAULT_CASE_GUARD,
            discrete: DEFAULT_CASE_GUARD,
            order_objects: DEFAULT_ORDER_GUARD,
            joint: DEFAULT_CASE_GUARD,
            rp_agents: DEFAULT_RP_AGENT_CAP,
        }
    }
}

impl Guards {
    /// The same cap for every counted enumeration.
    pub fn with_case_limit(limit: u64) -> Self {
        Guards {
            profiles: limit,
            discrete: limit,
            joint: limit,
            ..Guards::default()
        }
    }
}
